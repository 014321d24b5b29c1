//! Numerical thresholds shared across the crate.

/// Relative Frobenius drift allowed on group-element invariants
/// (`det = 1`, unitarity) and on flatness of the local system.
pub const TAU_GROUP: f64 = 1e-10;

/// Relative singular-value cutoff for numerical rank decisions.
pub const TAU_RANK: f64 = 1e-8;

/// Central finite-difference step for directional derivatives.
pub const FD_STEP: f64 = 1e-5;

/// Closedness residual (relative to the cochain's max-norm) accepted by the
/// cup product before it reports `NotACocycle`.
pub const COCYCLE_RESIDUAL: f64 = 1e-8;

/// Condition number of the duality matrix above which it is rejected.
pub const MAX_CONDITION: f64 = 1e8;

/// Tunable thresholds. Defaults are the module constants above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub tau_rank: f64,
    pub tau_group: f64,
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tau_rank: TAU_RANK,
            tau_group: TAU_GROUP,
            fd_step: FD_STEP,
        }
    }
}
