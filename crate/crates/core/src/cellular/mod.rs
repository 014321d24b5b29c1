//! Cellular model: the triangulated surface, the twisted cochain complex and
//! the cup product pairing.

mod cochain;
mod complex;
mod h1;
mod local_system;
mod pairing;
pub mod polygon;

pub use cochain::{
    boundary_residual, cocycle_residual, comparison, differential, relative_comparison, TwistedCochain,
};
pub use complex::{build_surface_complex, LiftChoice, MeshDocument, SurfaceComplex, VertexLift, MESH_SCHEMA};
pub use h1::{cellular_h1, cellular_h1_unchecked, cellular_h1_with, CellularH1, GaugeTree};
pub use local_system::LocalSystem;
pub use pairing::{cup_pair, cup_pair_unchecked, duality_pairing, duality_pairing_with_bases, DualityPairing};
