use charpoisson::tol::Tolerances;
use charpoisson::{GroupFamily, GroupSpec, SurfacePresentation};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::CliError;

pub const CONFIG_SCHEMA: &str = "charpoisson-config-v1";

fn default_schema() -> String {
    CONFIG_SCHEMA.to_string()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_rank: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_group: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub group: GroupFamily,
    pub genus: usize,
    pub punctures: usize,
    pub seed: u64,
    /// Subdivisions on top of the default two.
    #[serde(default)]
    pub subdivision_level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

impl ScenarioConfig {
    pub fn new(group: GroupFamily, genus: usize, punctures: usize, seed: u64) -> Self {
        Self {
            schema: default_schema(),
            group,
            genus,
            punctures,
            seed,
            subdivision_level: 0,
            tolerances: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != CONFIG_SCHEMA {
            return Err(CliError::Input(format!(
                "unsupported config schema `{}` (expected {CONFIG_SCHEMA})",
                self.schema
            )));
        }
        if self.punctures < 1 {
            return Err(CliError::Input("punctures must be >= 1".into()));
        }
        if let Some(t) = self.tolerances {
            for (name, v) in [("tau_rank", t.tau_rank), ("tau_group", t.tau_group), ("fd_step", t.fd_step)] {
                if let Some(x) = v {
                    if !(x.is_finite() && x > 0.0) {
                        return Err(CliError::Input(format!("tolerance {name} must be positive, got {x}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies a `CHARPOISSON_SEED` value, if any.
    pub fn with_seed_override(mut self, raw: Option<&str>) -> Result<Self, CliError> {
        if let Some(s) = raw {
            self.seed = s
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("CHARPOISSON_SEED is not an unsigned integer: `{s}`")))?;
        }
        Ok(self)
    }

    pub fn presentation(&self) -> Result<SurfacePresentation, CliError> {
        SurfacePresentation::new(self.genus, self.punctures).map_err(CliError::from)
    }

    pub fn spec(&self) -> GroupSpec {
        GroupSpec::new(self.group)
    }

    pub fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(o) = self.tolerances {
            t.tau_rank = o.tau_rank.unwrap_or(t.tau_rank);
            t.tau_group = o.tau_group.unwrap_or(t.tau_group);
            t.fd_step = o.fd_step.unwrap_or(t.fd_step);
        }
        t
    }

    pub fn label(&self) -> String {
        format!("{} ({},{}) seed {}", self.group, self.genus, self.punctures, self.seed)
    }
}
