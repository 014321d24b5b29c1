//! Poisson geometry of character varieties of punctured surfaces.
//!
//! The crate works at a single representation `rho` of the free fundamental
//! group of a punctured surface into `SU(2)`, `SL(2,R)` or `SL(2,C)` and
//! computes, entirely numerically:
//!
//! * the tangent space `H^1(Gamma, g_{Ad rho})` and its parabolic subspace
//!   ([`cohomology`]),
//! * a triangulated fundamental-domain model of the surface with the adjoint
//!   local system, relative (compactly supported) cohomology and the
//!   cup-product duality pairing ([`cellular`]),
//! * the Poisson bivector obtained from the forgetful map
//!   `H^1_c -> H^1`, brackets of trace functions and the structural checks
//!   (antisymmetry, Casimirs, Jacobi identity, symplectic leaves)
//!   ([`poisson`]).
//!
//! Coordinate-space linear algebra is generic over the scalar field
//! ([`Scalar`]): `f64` for the real forms `SU2`/`SL2R` and
//! [`num_complex::Complex64`] for `SL2C`.

mod error;
pub mod cellular;
pub mod cohomology;
pub mod lie;
pub mod linalg;
pub mod poisson;
pub mod representation;
mod scalar;
pub mod surface;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use lie::{AlgebraElement, GroupElement, GroupFamily, GroupSpec};
pub use representation::{GoodnessCertificate, Representation};
pub use surface::{SurfacePresentation, Word};
pub use cellular::{LiftChoice, LocalSystem, SurfaceComplex, TwistedCochain};
pub use cohomology::{GroupCocycle, H1Basis, ParabolicBasis, RelativeGroupBasis};
pub use poisson::{LeafForm, PoissonBivector, TraceFunction};
