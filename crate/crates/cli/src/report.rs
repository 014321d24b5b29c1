use charpoisson::verify::Check;
use charpoisson::Scalar;
use nalgebra::DMatrix;
use serde::Serialize;
use std::fmt::Write as _;

use crate::config::ScenarioConfig;

pub const REPORT_SCHEMA: &str = "charpoisson-report-v1";

/// Real scalars serialize as numbers, complex ones as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Complex([f64; 2]),
}

impl Number {
    pub fn of<T: Scalar>(x: T) -> Self {
        let z = x.to_c64();
        if T::IS_COMPLEX {
            Number::Complex([z.re, z.im])
        } else {
            Number::Real(z.re)
        }
    }

    fn cell(&self) -> String {
        match self {
            Number::Real(x) => format!("{x:e}"),
            Number::Complex([re, im]) => format!("{re:e}{im:+e}i"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedMatrix {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Row-major.
    pub entries: Vec<Vec<Number>>,
}

impl NamedMatrix {
    pub fn new<T: Scalar>(name: &str, m: &DMatrix<T>, row_prefix: &str, col_prefix: &str) -> Self {
        Self {
            name: name.to_string(),
            rows: m.nrows(),
            cols: m.ncols(),
            row_labels: (1..=m.nrows()).map(|i| format!("{row_prefix}{i}")).collect(),
            col_labels: (1..=m.ncols()).map(|j| format!("{col_prefix}{j}")).collect(),
            entries: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| Number::of(m[(i, j)])).collect()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Goodness {
    pub centralizer_dim: usize,
    pub is_good: bool,
    pub boundary_centralizer_dims: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Dims {
    pub h1: usize,
    pub h1_relative: usize,
    pub parabolic: usize,
    pub bivector_rank: usize,
    pub bivector_corank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowStep {
    pub step: usize,
    pub step_drift: f64,
    pub cumulative_drift: f64,
    pub bivector_rank: usize,
    pub boundary_traces: Vec<Number>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: Number,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedFlag {
    pub name: String,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: ScenarioConfig,
    pub seeds_tried: Vec<u64>,
    pub seed_used: Option<u64>,
    pub goodness: Option<Goodness>,
    pub dimensions: Option<Dims>,
    pub values: Vec<NamedValue>,
    pub flags: Vec<NamedFlag>,
    pub matrices: Vec<NamedMatrix>,
    pub residuals: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow: Option<Vec<FlowStep>>,
    pub error: Option<String>,
    pub passed: bool,
}

impl ScenarioReport {
    pub fn new(scenario: ScenarioConfig) -> Self {
        Self {
            scenario,
            seeds_tried: Vec::new(),
            seed_used: None,
            goodness: None,
            dimensions: None,
            values: Vec::new(),
            flags: Vec::new(),
            matrices: Vec::new(),
            residuals: Vec::new(),
            flow: None,
            error: None,
            passed: false,
        }
    }

    pub fn value<T: Scalar>(&mut self, name: &str, x: T) {
        self.values.push(NamedValue { name: name.to_string(), value: Number::of(x) });
    }

    pub fn flag(&mut self, name: &str, value: bool) {
        self.flags.push(NamedFlag { name: name.to_string(), value });
    }

    pub fn finish(&mut self) {
        self.passed = self.error.is_none() && self.residuals.iter().all(|c| c.passed);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: String,
    pub command: Vec<String>,
    pub scenarios: Vec<ScenarioReport>,
    pub passed: bool,
    /// Wall-clock seconds since the epoch; the only non-deterministic field.
    pub timestamp: u64,
}

impl Report {
    pub fn new(command: Vec<String>, scenarios: Vec<ScenarioReport>) -> Self {
        let passed = scenarios.iter().all(|s| s.passed);
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self { schema: REPORT_SCHEMA.to_string(), command, scenarios, passed, timestamp }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Matrices as row-major blocks with a header row of basis labels,
    /// followed by the residual table and the flow table when present.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for sc in &self.scenarios {
            let label = sc.scenario.label();
            for m in &sc.matrices {
                let _ = writeln!(out, "# {label}: {}", m.name);
                let _ = writeln!(out, "{},{}", m.name, m.col_labels.join(","));
                for (rl, row) in m.row_labels.iter().zip(&m.entries) {
                    let cells: Vec<String> = row.iter().map(Number::cell).collect();
                    let _ = writeln!(out, "{rl},{}", cells.join(","));
                }
            }
            let _ = writeln!(out, "# {label}: residuals");
            let _ = writeln!(out, "check,value,tolerance,passed");
            for c in &sc.residuals {
                let _ = writeln!(out, "\"{}\",{:e},{:e},{}", c.name, c.value, c.tolerance, c.passed);
            }
            if let Some(flow) = &sc.flow {
                let _ = writeln!(out, "# {label}: flow");
                let _ = writeln!(out, "step,step_drift,cumulative_drift,bivector_rank");
                for s in flow {
                    let _ = writeln!(out, "{},{:e},{:e},{}", s.step, s.step_drift, s.cumulative_drift, s.bivector_rank);
                }
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "charpoisson {}", self.command.join(" "));
        for sc in &self.scenarios {
            let _ = writeln!(out, "\n== {}", sc.scenario.label());
            if sc.seeds_tried.len() > 1 {
                let _ = writeln!(out, "seeds tried: {:?}", sc.seeds_tried);
            }
            if let Some(g) = &sc.goodness {
                let _ = writeln!(
                    out,
                    "centralizer dim {} (good: {}), boundary centralizers {:?}",
                    g.centralizer_dim, g.is_good, g.boundary_centralizer_dims
                );
            }
            if let Some(d) = &sc.dimensions {
                let _ = writeln!(
                    out,
                    "H1 {}  H1_c {}  parabolic {}  bivector rank {} corank {}",
                    d.h1, d.h1_relative, d.parabolic, d.bivector_rank, d.bivector_corank
                );
            }
            for v in &sc.values {
                let _ = writeln!(out, "{} = {}", v.name, v.value.cell());
            }
            for f in &sc.flags {
                let _ = writeln!(out, "{}: {}", f.name, f.value);
            }
            for m in &sc.matrices {
                let _ = writeln!(out, "{} ({}x{}):", m.name, m.rows, m.cols);
                for row in &m.entries {
                    let cells: Vec<String> = row.iter().map(|x| format!("{:>24}", x.cell())).collect();
                    let _ = writeln!(out, "  {}", cells.join(" "));
                }
            }
            if let Some(flow) = &sc.flow {
                let _ = writeln!(out, "{:>5} {:>12} {:>12} {:>5}", "step", "drift", "cumulative", "rank");
                for s in flow {
                    let _ = writeln!(
                        out,
                        "{:>5} {:>12.3e} {:>12.3e} {:>5}",
                        s.step, s.step_drift, s.cumulative_drift, s.bivector_rank
                    );
                }
            }
            for c in &sc.residuals {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "{tag} {:<55} {:>10.3e} <= {:.0e}", c.name, c.value, c.tolerance);
            }
            if let Some(e) = &sc.error {
                let _ = writeln!(out, "ERROR {e}");
            }
        }
        let _ = writeln!(out, "\n{}", if self.passed { "all checks passed" } else { "FAILED" });
        out
    }
}
