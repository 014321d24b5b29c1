//! Experiment commands behind the `charpoisson` binary.
//!
//! Every command turns a [`ScenarioConfig`] into a [`Report`]. Invalid input
//! is an error ([`CliError::Input`], exit code 2); numerical trouble is
//! recorded in the report and makes it fail (exit code 1).

pub mod config;
pub mod report;

use charpoisson::cohomology::{h1_basis_with, parabolic_basis_with, relative_group_basis_with};
use charpoisson::poisson::{casimir_residuals, hamiltonian_step};
use charpoisson::representation::find_good_representation;
use charpoisson::verify::{invariant_suite, limits, Check, SuiteOptions};
use charpoisson::{Error, GroupFamily, PoissonBivector, Representation, Scalar, SurfaceComplex, TraceFunction};
use num_complex::Complex64;
use std::path::PathBuf;
use thiserror::Error;

pub use config::{ScenarioConfig, ToleranceOverrides, CONFIG_SCHEMA};
pub use report::{Report, ScenarioReport};

/// Reseeding attempts before a scenario is declared to have no good point.
pub const RESEED_ATTEMPTS: usize = 20;

/// Cumulative boundary-trace drift allowed along a flow is
/// `FLOW_BUDGET * steps * epsilon^2`.
pub const FLOW_BUDGET: f64 = 10.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Numeric(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoPunctures(_)
            | Error::BoundaryIndex { .. }
            | Error::UnknownGenerator(_)
            | Error::MalformedExponent(_)
            | Error::InvalidDocument(_)
            | Error::InvalidElement(_)
            | Error::PresentationMismatch { .. }
            | Error::FieldMismatch(_) => CliError::Input(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Dims,
    Bracket,
    Selftest,
    Flow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, clap::Parser)]
#[command(name = "charpoisson", version, about = "Poisson structure on character varieties of punctured surfaces")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Scenario config (schema charpoisson-config-v1). Optional for selftest.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// The selftest scenarios used when no config is given.
pub fn default_scenarios() -> Vec<ScenarioConfig> {
    let mut v: Vec<ScenarioConfig> = [((1, 1), 7), ((0, 3), 11), ((1, 2), 1), ((2, 1), 3)]
        .into_iter()
        .map(|((g, m), s)| ScenarioConfig::new(GroupFamily::SU2, g, m, s))
        .collect();
    v.push(ScenarioConfig::new(GroupFamily::SL2C, 1, 1, 7));
    v
}

/// Parsed arguments plus the raw environment inputs.
pub fn run(cli: &Cli, echo: Vec<String>, seed_override: Option<&str>) -> Result<Report, CliError> {
    let configs = match &cli.config {
        Some(path) => vec![ScenarioConfig::load(path)?.with_seed_override(seed_override)?],
        None if cli.command == Command::Selftest => default_scenarios()
            .into_iter()
            .map(|c| c.with_seed_override(seed_override))
            .collect::<Result<_, _>>()?,
        None => return Err(CliError::Input("--config is required".into())),
    };
    if !(cli.epsilon.is_finite() && cli.epsilon >= 0.0) {
        return Err(CliError::Input(format!("--epsilon must be finite and >= 0, got {}", cli.epsilon)));
    }
    let f = match cli.command {
        Command::Bracket | Command::Flow => Some(required(&cli.f, "--f")?),
        _ => None,
    };
    let g = match cli.command {
        Command::Bracket => Some(required(&cli.g, "--g")?),
        _ => None,
    };
    for cfg in &configs {
        let p = cfg.presentation()?;
        for w in [&f, &g].into_iter().flatten() {
            TraceFunction::parse(&p, w)?;
        }
    }
    let job = |cfg: ScenarioConfig| -> Result<ScenarioReport, CliError> {
        match cfg.group {
            GroupFamily::SL2C => run_scenario::<Complex64>(cli, cfg, f.as_deref(), g.as_deref()),
            _ => run_scenario::<f64>(cli, cfg, f.as_deref(), g.as_deref()),
        }
    };
    // Scenarios are independent; results are collected in input order.
    let results: Vec<Result<ScenarioReport, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.into_iter().map(|cfg| s.spawn(move || job(cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    });
    let scenarios = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Report::new(echo, scenarios))
}

fn required(v: &Option<String>, flag: &str) -> Result<String, CliError> {
    v.clone().ok_or_else(|| CliError::Input(format!("{flag} is required for this command")))
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    }
}

fn run_scenario<T: Scalar>(
    cli: &Cli,
    cfg: ScenarioConfig,
    f: Option<&str>,
    g: Option<&str>,
) -> Result<ScenarioReport, CliError> {
    let mut rep = ScenarioReport::new(cfg.clone());
    let p = cfg.presentation()?;
    let tol = cfg.tolerances();
    let (found, tried) = find_good_representation(p, cfg.spec(), cfg.seed, RESEED_ATTEMPTS, tol.tau_rank);
    rep.seeds_tried = tried;
    let rho = match found {
        Some((rho, used)) => {
            rep.seed_used = Some(used);
            rho
        }
        None => {
            let last = Representation::from_seed(p, cfg.spec(), *rep.seeds_tried.last().unwrap_or(&cfg.seed));
            let cert = last.certify_goodness_with(tol.tau_rank);
            rep.error = Some(format!(
                "no good, boundary-regular point within {RESEED_ATTEMPTS} seeds: {}",
                Error::NotGoodPoint { centralizer_dim: cert.centralizer_dim }
            ));
            rep.finish();
            return Ok(rep);
        }
    };
    let cert = rho.certify_goodness_with(tol.tau_rank);
    rep.goodness = Some(report::Goodness {
        centralizer_dim: cert.centralizer_dim,
        is_good: cert.is_good,
        boundary_centralizer_dims: cert.boundary_centralizer_dims.clone(),
    });
    let complex = SurfaceComplex::build_at_level(p, 2 + cfg.subdivision_level);
    let outcome = match cli.command {
        Command::Dims => dims::<T>(&mut rep, &rho, &complex),
        Command::Bracket => bracket::<T>(&mut rep, &rho, &complex, f.unwrap_or(""), g.unwrap_or("")),
        Command::Selftest => selftest::<T>(&mut rep, &rho, &complex),
        Command::Flow => flow::<T>(&mut rep, &rho, &complex, f.unwrap_or(""), cli.steps, cli.epsilon),
    };
    match outcome {
        Ok(()) => {}
        Err(e @ CliError::Input(_)) => return Err(e),
        Err(CliError::Numeric(e)) => rep.error = Some(e.to_string()),
    }
    rep.finish();
    Ok(rep)
}

fn bivector<T: Scalar>(
    rep: &ScenarioReport,
    rho: &Representation,
    complex: &SurfaceComplex,
) -> Result<PoissonBivector<T>, CliError> {
    let tau = rep.scenario.tolerances().tau_rank;
    let h1 = h1_basis_with::<T>(rho, tau)?;
    let rel = relative_group_basis_with::<T>(rho, tau)?;
    Ok(PoissonBivector::with_bases(rho, complex, h1, rel)?)
}

fn dims<T: Scalar>(rep: &mut ScenarioReport, rho: &Representation, complex: &SurfaceComplex) -> Result<(), CliError> {
    let tol = rep.scenario.tolerances();
    let defect = rho.images().iter().map(|x| x.invariant_defect(rho.family())).fold(0.0, f64::max);
    rep.residuals.push(Check::at_most("generator images lie in the group", defect, tol.tau_group));
    let pb = bivector::<T>(rep, rho, complex)?;
    let par = parabolic_basis_with(rho, pb.h1(), tol.tau_rank)?;
    let rank = pb.rank_with(tol.tau_rank);
    let boundary: usize = rep.goodness.as_ref().map_or(0, |g| g.boundary_centralizer_dims.iter().sum());
    rep.dimensions = Some(report::Dims {
        h1: pb.dim(),
        h1_relative: pb.pairing.relative_group.dim(),
        parabolic: par.dim(),
        bivector_rank: rank,
        bivector_corank: pb.dim() - rank,
    });
    rep.residuals.push(Check::at_most("antisymmetry of eta(F xi)", pb.antisymmetry_residual(), limits::ANTISYMMETRY));
    rep.residuals.push(Check::at_most("duality condition number", pb.pairing.condition, limits::DUALITY_CONDITION));
    rep.residuals.push(Check::count("bivector rank = parabolic dim", rank, par.dim()));
    rep.residuals.push(Check::count("bivector corank = boundary centralizers", pb.dim() - rank, boundary.min(pb.dim())));
    let p = *rho.presentation();
    let gens: Vec<TraceFunction> = (0..p.rank()).map(|i| TraceFunction::new(p.generator_word(i))).collect();
    let casimir = casimir_residuals(&pb, &gens)?.into_iter().fold(0.0, f64::max);
    rep.residuals.push(Check::at_most("boundary traces are Casimirs", casimir, limits::CASIMIR));
    rep.matrices.push(report::NamedMatrix::new("bivector", &pb.matrix, "e", "e"));
    rep.matrices.push(report::NamedMatrix::new("duality", &pb.pairing.matrix, "r", "t"));
    Ok(())
}

fn bracket<T: Scalar>(
    rep: &mut ScenarioReport,
    rho: &Representation,
    complex: &SurfaceComplex,
    f: &str,
    g: &str,
) -> Result<(), CliError> {
    let p = *rho.presentation();
    let (f, g) = (TraceFunction::parse(&p, f)?, TraceFunction::parse(&p, g)?);
    let pb = bivector::<T>(rep, rho, complex)?;
    let fg = pb.bracket(&f, &g)?;
    let gf = pb.bracket(&g, &f)?;
    rep.value("bracket", fg);
    rep.value("bracket reversed", gf);
    rep.value("trace f", T::from_c64(f.value(rho)));
    rep.value("trace g", T::from_c64(g.value(rho)));
    rep.residuals.push(Check::at_most("antisymmetry {f,g} + {g,f}", (fg + gf).modulus(), limits::ANTISYMMETRY));
    for (name, h) in [("f is a Casimir", &f), ("g is a Casimir", &g)] {
        let x = pb.hamiltonian_vector(h)?;
        rep.flag(name, x.iter().map(|v| v.modulus()).fold(0.0, f64::max) <= limits::CASIMIR);
    }
    let casimir = casimir_residuals(&pb, &[f, g])?.into_iter().fold(0.0, f64::max);
    rep.residuals.push(Check::at_most("boundary traces are Casimirs", casimir, limits::CASIMIR));
    Ok(())
}

fn selftest<T: Scalar>(rep: &mut ScenarioReport, rho: &Representation, complex: &SurfaceComplex) -> Result<(), CliError> {
    let opts = SuiteOptions {
        tolerances: rep.scenario.tolerances(),
        seed: rep.scenario.seed,
        ..SuiteOptions::default()
    };
    let outcome = invariant_suite::<T>(rho, complex, &opts)?;
    let d = &outcome.dimensions;
    rep.dimensions = Some(report::Dims {
        h1: d.h1,
        h1_relative: d.h1_relative,
        parabolic: d.parabolic,
        bivector_rank: d.bivector_rank,
        bivector_corank: d.bivector_corank,
    });
    rep.residuals = outcome.checks;
    Ok(())
}

fn flow<T: Scalar>(
    rep: &mut ScenarioReport,
    rho: &Representation,
    complex: &SurfaceComplex,
    f: &str,
    steps: usize,
    eps: f64,
) -> Result<(), CliError> {
    let tau = rep.scenario.tolerances().tau_rank;
    let f = TraceFunction::parse(rho.presentation(), f)?;
    let start = rho.boundary_traces();
    let drift = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let mut table = Vec::with_capacity(steps + 1);
    let mut current = rho.clone();
    let mut prev = start.clone();
    for k in 0..=steps {
        let pb = bivector::<T>(rep, &current, complex)?;
        let traces = current.boundary_traces();
        table.push(report::FlowStep {
            step: k,
            step_drift: drift(&traces, &prev),
            cumulative_drift: drift(&traces, &start),
            bivector_rank: pb.rank_with(tau),
            boundary_traces: traces.iter().map(|&z| report::Number::of(T::from_c64(z))).collect(),
        });
        prev = traces;
        if k == steps {
            break;
        }
        current = hamiltonian_step(&pb, &f, eps)?;
        if !current.certify_goodness_with(tau).is_good {
            rep.flow = Some(table);
            return Err(Error::GoodnessLostUnderPerturbation.into());
        }
    }
    let cumulative = table.last().map_or(0.0, |s| s.cumulative_drift);
    let budget = FLOW_BUDGET * steps as f64 * eps * eps;
    rep.residuals.push(Check::at_most("cumulative boundary-trace drift", cumulative, budget));
    let r0 = table[0].bivector_rank;
    let changes = table.iter().filter(|s| s.bivector_rank != r0).count();
    rep.residuals.push(Check::count("bivector rank constant along the path", changes, 0));
    rep.flag("rank constant", changes == 0);
    rep.value("final trace f", T::from_c64(f.value(&current)));
    rep.flow = Some(table);
    Ok(())
}
