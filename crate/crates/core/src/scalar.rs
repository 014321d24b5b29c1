use nalgebra::ComplexField;
use num_complex::Complex64;
use std::fmt::Debug;

/// Scalar field of the Lie algebra coordinates: `f64` for the real forms,
/// `Complex64` for `SL(2,C)`.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Debug + Send + Sync + 'static {
    const IS_COMPLEX: bool;

    /// Projects a complex number into the field (real forms keep the real part).
    fn from_c64(z: Complex64) -> Self;

    fn to_c64(self) -> Complex64;

    fn from_f64(x: f64) -> Self {
        Self::from_c64(Complex64::new(x, 0.0))
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    fn from_c64(z: Complex64) -> Self {
        z.re
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    fn from_c64(z: Complex64) -> Self {
        z
    }

    fn to_c64(self) -> Complex64 {
        self
    }
}
