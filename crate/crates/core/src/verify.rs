//! The invariant suite run by `selftest` and the acceptance tests: every
//! structural property of the construction at one scenario, each residual
//! paired with the threshold it is judged against.

use crate::cellular::{
    cellular_h1_with, cup_pair_unchecked, differential, duality_pairing_with_bases, LiftChoice,
    LocalSystem, SurfaceComplex, TwistedCochain,
};
use crate::cohomology::{
    block_adjoint, h1_basis_with, parabolic_basis_with, relative_group_basis_with, H1Basis, RelativeGroupBasis,
};
use crate::lie::{self, random_group_element};
use crate::linalg::{self, Cutoff};
use crate::poisson::{
    casimir_residuals, directional_derivative, jacobi_residual_with, leaf_form_with, PoissonBivector,
    TraceFunction,
};
use crate::representation::Representation;
use crate::surface::{Letter, SurfacePresentation, Word};
use crate::tol::Tolerances;
use crate::{Result, Scalar};
use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Thresholds of the suite that are not configurable rank/group/step
/// tolerances.
pub mod limits {
    pub const FLATNESS: f64 = 1e-10;
    pub const D_SQUARED: f64 = 1e-10;
    pub const STOKES: f64 = 1e-9;
    pub const DUALITY_CONDITION: f64 = 1e6;
    pub const ANTISYMMETRY: f64 = 1e-8;
    pub const PRINCIPAL_ANGLE: f64 = 1e-6;
    pub const CASIMIR: f64 = 1e-8;
    pub const JACOBI_RELATIVE: f64 = 1e-4;
    pub const LEAF_ANTISYMMETRY: f64 = 1e-10;
    pub const LEAF_CONSISTENCY: f64 = 1e-8;
    pub const VANISHING_BIVECTOR: f64 = 1e-8;
    pub const TRACE_DERIVATIVE: f64 = 1e-6;
    pub const COBOUNDARY_DIFFERENTIAL: f64 = 1e-10;
    pub const MODEL_INDEPENDENCE: f64 = 1e-8;
    /// Required separation, on both sides, between the rank cutoff and the
    /// singular values it classifies.
    pub const RANK_MARGIN: f64 = 100.0;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.to_string(), value, tolerance, passed: value <= tolerance }
    }

    /// Integer equality, reported as `|computed - expected|` against 0.
    pub fn count(name: &str, computed: usize, expected: usize) -> Self {
        Self::at_most(name, computed.abs_diff(expected) as f64, 0.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Dimensions {
    pub centralizer: usize,
    pub boundary_centralizers: Vec<usize>,
    pub h1: usize,
    pub h1_relative: usize,
    pub h1_cellular: usize,
    pub h1_cellular_relative: usize,
    pub parabolic: usize,
    pub bivector_rank: usize,
    pub bivector_corank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub tolerances: Tolerances,
    pub jacobi_triples: usize,
    pub casimir_functions: usize,
    pub max_word_length: usize,
    /// Also rerun on a subdivided complex, with the other lift choice and
    /// at a conjugated representation.
    pub model_independence: bool,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            jacobi_triples: 10,
            casimir_functions: 20,
            max_word_length: 6,
            model_independence: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub dimensions: Dimensions,
    pub checks: Vec<Check>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Reduced random word of length `1..=max_len` (possibly shorter after
/// reduction).
pub fn random_word<R: Rng + ?Sized>(p: &SurfacePresentation, rng: &mut R, max_len: usize) -> Word {
    let len = rng.random_range(1..=max_len.max(1));
    let letters = (0..len)
        .map(|_| Letter::new(rng.random_range(0..p.rank()), rng.random_bool(0.5)))
        .collect();
    Word::from_letters(letters).reduced()
}

pub fn random_trace_functions<R: Rng + ?Sized>(
    p: &SurfacePresentation,
    rng: &mut R,
    count: usize,
    max_len: usize,
) -> Vec<TraceFunction> {
    if p.rank() == 0 {
        return vec![TraceFunction::new(Word::empty()); count];
    }
    (0..count).map(|_| TraceFunction::new(random_word(p, rng, max_len))).collect()
}

fn random_scalar<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let re: f64 = rng.sample(StandardNormal);
    if T::IS_COMPLEX {
        let im: f64 = rng.sample(StandardNormal);
        T::from_c64(num_complex::Complex64::new(re, im) / 2f64.sqrt())
    } else {
        <T as Scalar>::from_f64(re)
    }
}

fn random_cochain<T: Scalar, R: Rng + ?Sized>(rng: &mut R, cells: usize, degree: usize) -> TwistedCochain<T> {
    TwistedCochain::from_values(degree, (0..cells).map(|_| Vector3::from_fn(|_, _| random_scalar(rng))).collect())
}

fn max_diff<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    linalg::max_abs(&(a - b))
}

/// Runs every invariant at `rho` on `complex`. Errors only on malformed
/// input; numerical failures are reported as failed checks.
pub fn invariant_suite<T: Scalar>(
    rho: &Representation,
    complex: &SurfaceComplex,
    opts: &SuiteOptions,
) -> Result<SuiteOutcome> {
    let tol = opts.tolerances;
    let p = *rho.presentation();
    let n = p.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    let mut dims = Dimensions::default();

    let cert = rho.certify_goodness_with(tol.tau_rank);
    dims.centralizer = cert.centralizer_dim;
    dims.boundary_centralizers = cert.boundary_centralizer_dims.clone();
    if n > 0 {
        checks.push(Check::count("good point (centralizer dimension)", cert.centralizer_dim, 0));
        if !cert.is_good {
            return Ok(SuiteOutcome { dimensions: dims, checks });
        }
    }

    let ls = LocalSystem::<T>::new(complex, rho)?;
    checks.push(Check::at_most("local system flatness", ls.flatness_residual(), limits::FLATNESS));
    let mut dd = 0.0f64;
    for _ in 0..3 {
        let f = random_cochain::<T, _>(&mut rng, complex.vertex_count(), 0);
        let ddf = differential(&ls, &differential(&ls, &f)?)?;
        dd = dd.max(ddf.max_norm() / f.max_norm().max(1.0));
    }
    checks.push(Check::at_most("d o d = 0", dd, limits::D_SQUARED));

    let h1 = h1_basis_with::<T>(rho, tol.tau_rank)?;
    let rel = relative_group_basis_with::<T>(rho, tol.tau_rank)?;
    let par = parabolic_basis_with(rho, &h1, tol.tau_rank)?;
    let abs_cell = cellular_h1_with(&ls, false, tol.tau_rank)?;
    let rel_cell = cellular_h1_with(&ls, true, tol.tau_rank)?;
    dims.h1 = h1.dim();
    dims.h1_relative = rel.dim();
    dims.h1_cellular = abs_cell.dim();
    dims.h1_cellular_relative = rel_cell.dim();
    dims.parabolic = par.dim();
    let expected_h1 = 3 * n.saturating_sub(1);
    let boundary_total: usize = cert.boundary_centralizer_dims.iter().sum();
    checks.push(Check::count("dim H1 = 3(n-1)", h1.dim(), expected_h1));
    checks.push(Check::count("dim H1 relative (group) = dim H1", rel.dim(), h1.dim()));
    checks.push(Check::count("dim H1 cellular = dim H1", abs_cell.dim(), h1.dim()));
    checks.push(Check::count("dim H1 cellular relative = dim H1", rel_cell.dim(), h1.dim()));
    checks.push(Check::count(
        "parabolic dim = dim H1 - boundary centralizers",
        par.dim(),
        h1.dim().saturating_sub(boundary_total),
    ));

    // trace differentials: well defined on classes and matching finite differences
    let fns = random_trace_functions(&p, &mut rng, opts.casimir_functions, opts.max_word_length);
    if n > 0 {
        let ad = crate::cohomology::AdjointData::<T>::new(rho)?;
        let x = Vector3::from_fn(|_, _| random_scalar::<T, _>(&mut rng));
        let dx = crate::cohomology::GroupCocycle::from_vector(ad.coboundary_matrix() * x);
        let w = &fns[0];
        let g = rho.evaluate_word(&w.word);
        let v = crate::cohomology::evaluate_with(&ad, &dx, &w.word);
        let on_coboundary = (lie::from_coords::<T>(ad.family, &v).matrix() * g.matrix()).trace().norm();
        checks.push(Check::at_most("trace differential vanishes on coboundaries", on_coboundary, limits::COBOUNDARY_DIFFERENTIAL));
        if h1.dim() > 0 {
            let t = DVector::from_fn(h1.dim(), |_, _| random_scalar::<T, _>(&mut rng));
            let exact = (crate::poisson::trace_differential(rho, &h1, w)?.transpose() * &t)[(0, 0)];
            let fd = directional_derivative(rho, &h1, |r| Ok(T::from_c64(w.value(r))), &t, tol.fd_step)?;
            checks.push(Check::at_most("trace differential matches finite differences", (fd - exact).modulus(), limits::TRACE_DERIVATIVE));
        }
    }

    let pb = match PoissonBivector::with_bases(rho, complex, h1.clone(), rel.clone()) {
        Ok(pb) => pb,
        Err(e) => {
            checks.push(Check::at_most(&format!("duality pairing ({e})"), f64::INFINITY, 0.0));
            return Ok(SuiteOutcome { dimensions: dims, checks });
        }
    };
    let rank = pb.rank_with(tol.tau_rank);
    dims.bivector_rank = rank;
    dims.bivector_corank = pb.dim() - rank;
    checks.push(Check::at_most("duality condition number", pb.pairing.condition, limits::DUALITY_CONDITION));
    checks.push(Check::at_most("antisymmetry of eta(F xi)", pb.antisymmetry_residual(), limits::ANTISYMMETRY));
    checks.push(Check::count("bivector rank = parabolic dim", rank, par.dim()));
    checks.push(Check::count("bivector corank = boundary centralizers", pb.dim() - rank, boundary_total.min(pb.dim())));
    checks.push(Check::count("bivector rank is even", rank % 2, 0));
    checks.push(Check::at_most(
        "bivector rank decision has margin",
        pb.rank_margin(tol.tau_rank, limits::RANK_MARGIN),
        1.0,
    ));
    if par.dim() == 0 {
        checks.push(Check::at_most("bivector vanishes", pb.relative_norm(), limits::VANISHING_BIVECTOR));
    }
    let image = linalg::column_space(pb.forget_matrix(), Cutoff::with_unit_floor(tol.tau_rank));
    let angle = match linalg::principal_angles(&image, &par.coords) {
        Some(a) => a.into_iter().fold(0.0, f64::max),
        None => f64::INFINITY,
    };
    checks.push(Check::at_most("image of forgetful map = parabolic subspace", angle, limits::PRINCIPAL_ANGLE));

    // Stokes on the pair: exact relative cochains and exact absolute cochains pair to zero.
    let dual = &pb.pairing;
    let mut stokes = 0.0f64;
    if dual.dim() > 0 {
        let mut f_rel = random_cochain::<T, _>(&mut rng, complex.vertex_count(), 0);
        for v in 0..complex.vertex_count() {
            if complex.is_boundary_vertex(v) {
                f_rel.set(v, Vector3::zeros());
            }
        }
        let df_rel = differential(&ls, &f_rel)?;
        let chi = random_cochain::<T, _>(&mut rng, complex.vertex_count(), 0);
        let dchi = differential(&ls, &chi)?;
        for k in 0..dual.dim() {
            stokes = stokes.max(cup_pair_unchecked(&ls, &df_rel, &dual.absolute[k]).modulus());
            stokes = stokes.max(cup_pair_unchecked(&ls, &dual.relative[k], &dchi).modulus());
        }
    }
    checks.push(Check::at_most("cup pairing descends to cohomology", stokes, limits::STOKES));

    let casimir = casimir_residuals(&pb, &fns)?.into_iter().fold(0.0, f64::max);
    checks.push(Check::at_most("boundary traces are Casimirs", casimir, limits::CASIMIR));

    // Triples whose terms all vanish (constants, Casimirs, commuting words)
    // are judged on the absolute residual; sampling continues until enough
    // informative triples are seen.
    let mut jacobi = 0.0f64;
    let mut jacobi_flat = 0.0f64;
    let mut informative = 0usize;
    let mut attempts = 0usize;
    while informative < opts.jacobi_triples && attempts < 20 * opts.jacobi_triples.max(1) {
        attempts += 1;
        let t = random_trace_functions(&p, &mut rng, 3, opts.max_word_length);
        match jacobi_residual_with::<T>(rho, complex, [&t[0], &t[1], &t[2]], tol.fd_step) {
            Ok(r) if r.is_degenerate() => jacobi_flat = jacobi_flat.max(r.residual),
            Ok(r) => {
                informative += 1;
                jacobi = jacobi.max(r.relative());
            }
            Err(_) => jacobi = f64::INFINITY,
        }
    }
    checks.push(Check::at_most("Jacobi identity (relative)", jacobi, limits::JACOBI_RELATIVE));
    checks.push(Check::at_most("Jacobi identity (vanishing triples)", jacobi_flat, limits::VANISHING_BIVECTOR));
    if par.dim() > 0 {
        checks.push(Check::count(
            "Jacobi informative triples sampled",
            informative,
            opts.jacobi_triples,
        ));
    }

    if par.dim() > 0 {
        let leaf = leaf_form_with(&pb, tol.tau_rank);
        checks.push(Check::at_most("leaf form antisymmetry", leaf.antisymmetry_residual(), limits::LEAF_ANTISYMMETRY));
        checks.push(Check::count("leaf form rank = parabolic dim", leaf.rank(), par.dim()));
        let mut consistency = 0.0f64;
        for j in 0..pb.dim() {
            for k in 0..pb.dim() {
                let xj = leaf.coordinates(&pb.forget_matrix().column(j).into_owned());
                let xk = leaf.coordinates(&pb.forget_matrix().column(k).into_owned());
                let lhs = leaf.evaluate(&xj, &xk);
                consistency = consistency.max((lhs - dual.self_pairing[(k, j)]).modulus());
            }
        }
        checks.push(Check::at_most("leaf form reproduces eta(F xi)", consistency, limits::LEAF_CONSISTENCY));
    }

    if opts.model_independence && n > 0 {
        let probes = random_trace_functions(&p, &mut rng, 4, opts.max_word_length);
        let brackets = |b: &PoissonBivector<T>| -> Result<Vec<T>> {
            let mut out = Vec::new();
            for i in 0..probes.len() {
                for j in i + 1..probes.len() {
                    out.push(b.bracket(&probes[i], &probes[j])?);
                }
            }
            Ok(out)
        };
        let base = brackets(&pb)?;
        let scale = linalg::max_abs(&dual.matrix).max(1.0);
        let bracket_diff = |other: &[T]| {
            base.iter().zip(other).map(|(a, b)| (*a - *b).modulus()).fold(0.0, f64::max)
        };

        let fine = complex.subdivide();
        let pb_fine = PoissonBivector::with_bases(rho, &fine, h1.clone(), rel.clone())?;
        let dev = max_diff(&pb_fine.pairing.matrix, &dual.matrix) / scale;
        checks.push(Check::at_most("pairing invariant under subdivision", dev, limits::MODEL_INDEPENDENCE));
        checks.push(Check::at_most("brackets invariant under subdivision", bracket_diff(&brackets(&pb_fine)?), limits::MODEL_INDEPENDENCE));

        let other_choice = match complex.lift_choice() {
            LiftChoice::First => LiftChoice::Last,
            LiftChoice::Last => LiftChoice::First,
        };
        let relifted = complex.with_lift_choice(other_choice);
        let pb_lift = PoissonBivector::with_bases(rho, &relifted, h1.clone(), rel.clone())?;
        let dev = max_diff(&pb_lift.pairing.matrix, &dual.matrix) / scale;
        checks.push(Check::at_most("pairing invariant under lift choice", dev, limits::MODEL_INDEPENDENCE));
        checks.push(Check::at_most("brackets invariant under lift choice", bracket_diff(&brackets(&pb_lift)?), limits::MODEL_INDEPENDENCE));

        let g = random_group_element(rho.spec(), &mut rng);
        let conj = rho.conjugate(&g);
        let (abs_t, rel_t) = transported_bases(&conj, &g, &h1, &rel, tol.tau_rank)?;
        let ls_c = LocalSystem::<T>::new(complex, &conj)?;
        let dual_c = duality_pairing_with_bases(&ls_c, abs_t, rel_t)?;
        let dev = max_diff(&dual_c.matrix, &dual.matrix) / scale;
        checks.push(Check::at_most("pairing invariant under conjugation", dev, limits::MODEL_INDEPENDENCE));
        let pb_conj = PoissonBivector::<T>::on_complex(&conj, complex)?;
        checks.push(Check::at_most("brackets invariant under conjugation", bracket_diff(&brackets(&pb_conj)?), limits::MODEL_INDEPENDENCE));
        // The residual is finite-difference error, which a badly conditioned
        // gauge amplifies; the probe conjugates by the compact subgroup.
        let k = lie::random_compact_element(rho.spec(), &mut rng);
        let conj_k = rho.conjugate(&k);
        let t = random_trace_functions(&p, &mut rng, 3, opts.max_word_length);
        let j0 = jacobi_residual_with::<T>(rho, complex, [&t[0], &t[1], &t[2]], tol.fd_step)?;
        let j1 = jacobi_residual_with::<T>(&conj_k, complex, [&t[0], &t[1], &t[2]], tol.fd_step)?;
        let dev = (j0.residual - j1.residual).abs() / j0.scale.max(j1.scale).max(1.0);
        checks.push(Check::at_most("Jacobi residual invariant under conjugation", dev, limits::MODEL_INDEPENDENCE));
    }

    Ok(SuiteOutcome { dimensions: dims, checks })
}

/// Bases at `g rho g^-1` obtained by applying `Ad_g` blockwise to the bases at `rho`.
pub fn transported_bases<T: Scalar>(
    conj: &Representation,
    g: &lie::GroupElement,
    h1: &H1Basis<T>,
    rel: &RelativeGroupBasis<T>,
    tau_rank: f64,
) -> Result<(H1Basis<T>, RelativeGroupBasis<T>)> {
    let p = conj.presentation();
    let (n, m) = (p.rank(), p.punctures());
    let fresh = h1_basis_with::<T>(conj, tau_rank)?;
    let abs = H1Basis::from_columns(
        block_adjoint::<T>(conj.family(), g, n) * &h1.basis,
        fresh.coboundaries,
        fresh.certificate,
    );
    let mut moved = relative_group_basis_with::<T>(conj, tau_rank)?;
    moved.basis = block_adjoint::<T>(conj.family(), g, n + m) * &rel.basis;
    Ok((abs, moved))
}
