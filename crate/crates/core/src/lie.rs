//! `SU(2)`, `SL(2,R)` and `SL(2,C)` in the defining 2x2 representation.
//!
//! Group and algebra elements are stored as complex 2x2 matrices for all
//! three families. Algebra coordinates refer to the fixed basis returned by
//! [`algebra_basis`]:
//!
//! * `SU2`: `[[i,0],[0,-i]]`, `[[0,1],[-1,0]]`, `[[0,i],[i,0]]`
//! * `SL2R`, `SL2C`: `H = [[1,0],[0,-1]]`, `E = [[0,1],[0,0]]`, `F = [[0,0],[1,0]]`
//!
//! The invariant form is the trace form `B(X, Y) = tr(XY)`.

use crate::linalg::{self, Cutoff};
use crate::{Error, Result, Scalar};
use nalgebra::{DMatrix, Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt;

pub type CMatrix2 = Matrix2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupFamily {
    SU2,
    SL2R,
    SL2C,
}

impl GroupFamily {
    pub fn name(self) -> &'static str {
        match self {
            GroupFamily::SU2 => "SU2",
            GroupFamily::SL2R => "SL2R",
            GroupFamily::SL2C => "SL2C",
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GroupFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "SU2" => Ok(GroupFamily::SU2),
            "SL2R" => Ok(GroupFamily::SL2R),
            "SL2C" => Ok(GroupFamily::SL2C),
            other => Err(format!("unknown group `{other}` (expected SU2, SL2R or SL2C)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: GroupFamily,
}

impl GroupSpec {
    pub fn new(family: GroupFamily) -> Self {
        Self { family }
    }

    pub fn su2() -> Self {
        Self::new(GroupFamily::SU2)
    }

    pub fn sl2r() -> Self {
        Self::new(GroupFamily::SL2R)
    }

    pub fn sl2c() -> Self {
        Self::new(GroupFamily::SL2C)
    }

    /// True exactly when the scalar field is `C`.
    pub fn is_complex(&self) -> bool {
        self.family == GroupFamily::SL2C
    }

    pub fn algebra_dim(&self) -> usize {
        3
    }

    /// Rejects a scalar type that does not match the family's field.
    pub fn check_field<T: Scalar>(&self) -> Result<()> {
        if T::IS_COMPLEX == self.is_complex() {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.family.name()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement(pub CMatrix2);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraElement(pub CMatrix2);

impl GroupElement {
    pub fn identity() -> Self {
        Self(CMatrix2::identity())
    }

    pub fn matrix(&self) -> &CMatrix2 {
        &self.0
    }

    /// Inverse of a determinant-one matrix (the adjugate).
    pub fn inverse(&self) -> Self {
        let m = &self.0;
        Self(CMatrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]))
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement(self.0 * other.0)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn det(&self) -> Complex64 {
        self.0.determinant()
    }

    /// Largest violation of the group invariants, relative to `|g|_F`.
    pub fn invariant_defect(&self, family: GroupFamily) -> f64 {
        let scale = self.0.norm().max(1.0);
        let mut defect = (self.det() - ONE).norm() / scale;
        match family {
            GroupFamily::SU2 => {
                let u = self.0.adjoint() * self.0 - CMatrix2::identity();
                defect = defect.max(u.norm() / scale);
            }
            GroupFamily::SL2R => {
                let im = self.0.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                defect = defect.max(im / scale);
            }
            GroupFamily::SL2C => {}
        }
        defect
    }

    pub fn distance(&self, other: &GroupElement) -> f64 {
        (self.0 - other.0).norm()
    }
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self(CMatrix2::zeros())
    }

    pub fn matrix(&self) -> &CMatrix2 {
        &self.0
    }

    pub fn bracket(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement(self.0 * other.0 - other.0 * self.0)
    }

    pub fn invariant_defect(&self, family: GroupFamily) -> f64 {
        let scale = self.0.norm().max(1.0);
        let mut defect = self.0.trace().norm() / scale;
        match family {
            GroupFamily::SU2 => {
                defect = defect.max((self.0 + self.0.adjoint()).norm() / scale);
            }
            GroupFamily::SL2R => {
                let im = self.0.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                defect = defect.max(im / scale);
            }
            GroupFamily::SL2C => {}
        }
        defect
    }
}

pub fn algebra_basis(spec: GroupSpec) -> [AlgebraElement; 3] {
    match spec.family {
        GroupFamily::SU2 => [
            AlgebraElement(CMatrix2::new(I, ZERO, ZERO, -I)),
            AlgebraElement(CMatrix2::new(ZERO, ONE, -ONE, ZERO)),
            AlgebraElement(CMatrix2::new(ZERO, I, I, ZERO)),
        ],
        GroupFamily::SL2R | GroupFamily::SL2C => [
            AlgebraElement(CMatrix2::new(ONE, ZERO, ZERO, -ONE)),
            AlgebraElement(CMatrix2::new(ZERO, ONE, ZERO, ZERO)),
            AlgebraElement(CMatrix2::new(ZERO, ZERO, ONE, ZERO)),
        ],
    }
}

/// Coordinates of a traceless matrix in [`algebra_basis`] (complex-valued;
/// real for genuine elements of the real forms).
pub fn algebra_coords(family: GroupFamily, x: &AlgebraElement) -> [Complex64; 3] {
    let m = &x.0;
    let p = (m[(0, 0)] - m[(1, 1)]) * 0.5;
    let q = m[(0, 1)];
    let r = m[(1, 0)];
    match family {
        GroupFamily::SU2 => [-I * p, (q - r) * 0.5, -I * (q + r) * 0.5],
        GroupFamily::SL2R | GroupFamily::SL2C => [p, q, r],
    }
}

pub fn from_coords<T: Scalar>(family: GroupFamily, c: &Vector3<T>) -> AlgebraElement {
    let basis = algebra_basis(GroupSpec::new(family));
    let mut m = CMatrix2::zeros();
    for (b, ci) in basis.iter().zip(c.iter()) {
        m += b.0 * ci.to_c64();
    }
    AlgebraElement(m)
}

pub fn to_coords<T: Scalar>(family: GroupFamily, x: &AlgebraElement) -> Vector3<T> {
    let c = algebra_coords(family, x);
    Vector3::new(T::from_c64(c[0]), T::from_c64(c[1]), T::from_c64(c[2]))
}

/// Matrix exponential, via `X^2 = -det(X) I` for traceless 2x2 `X`:
/// `exp(X) = cosh(s) I + sinh(s)/s X` with `s^2 = -det(X)`.
pub fn exp_map(x: &AlgebraElement) -> GroupElement {
    let delta = -x.0.determinant();
    let (c, sc) = if delta.norm() < 1e-6 {
        // Taylor series of cosh(sqrt(d)) and sinh(sqrt(d))/sqrt(d).
        let d = delta;
        (
            ONE + d / 2.0 + d * d / 24.0 + d * d * d / 720.0,
            ONE + d / 6.0 + d * d / 120.0 + d * d * d / 5040.0,
        )
    } else {
        let s = delta.sqrt();
        (s.cosh(), s.sinh() / s)
    };
    GroupElement(CMatrix2::identity() * c + x.0 * sc)
}

pub fn adjoint_action(g: &GroupElement, x: &AlgebraElement) -> AlgebraElement {
    AlgebraElement(g.0 * x.0 * g.inverse().0)
}

/// `B(X, Y) = tr(XY)`.
pub fn invariant_form(x: &AlgebraElement, y: &AlgebraElement) -> Complex64 {
    (x.0 * y.0).trace()
}

/// Gram matrix of `B` in the algebra basis.
pub fn gram<T: Scalar>(family: GroupFamily) -> Matrix3<T> {
    let basis = algebra_basis(GroupSpec::new(family));
    Matrix3::from_fn(|i, j| T::from_c64(invariant_form(&basis[i], &basis[j])))
}

/// Matrix of `Ad_g` acting on algebra coordinates.
pub fn ad_matrix<T: Scalar>(family: GroupFamily, g: &GroupElement) -> Matrix3<T> {
    let basis = algebra_basis(GroupSpec::new(family));
    let mut m = Matrix3::zeros();
    for (j, b) in basis.iter().enumerate() {
        let c = to_coords::<T>(family, &adjoint_action(g, b));
        m.set_column(j, &c);
    }
    m
}

/// `exp` of an algebra element whose basis coefficients are standard normal
/// (standard complex normal for `SL2C`).
pub fn random_group_element<R: Rng + ?Sized>(spec: GroupSpec, rng: &mut R) -> GroupElement {
    let coeffs: [Complex64; 3] = std::array::from_fn(|_| {
        let re: f64 = rng.sample(StandardNormal);
        if spec.is_complex() {
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        } else {
            Complex64::new(re, 0.0)
        }
    });
    let basis = algebra_basis(spec);
    let mut m = CMatrix2::zeros();
    for (b, c) in basis.iter().zip(coeffs) {
        m += b.0 * c;
    }
    exp_map(&AlgebraElement(m))
}

/// Random element of the maximal compact subgroup: `SU(2)` inside `SU2` and
/// `SL2C`, `SO(2)` inside `SL2R`.
pub fn random_compact_element<R: Rng + ?Sized>(spec: GroupSpec, rng: &mut R) -> GroupElement {
    match spec.family {
        GroupFamily::SL2R => {
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let (s, c) = t.sin_cos();
            GroupElement(CMatrix2::new(
                Complex64::new(c, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(c, 0.0),
            ))
        }
        _ => random_group_element(GroupSpec::su2(), rng),
    }
}

/// Dimension of the common fixed space `{X : Ad_g X = X for all g}`.
pub fn fixed_space_dim(spec: GroupSpec, elements: &[GroupElement], tau_rank: f64) -> usize {
    let mut stacked = DMatrix::<Complex64>::zeros(3 * elements.len(), 3);
    for (k, g) in elements.iter().enumerate() {
        let a = ad_matrix::<Complex64>(spec.family, g) - Matrix3::identity();
        stacked.view_mut((3 * k, 0), (3, 3)).copy_from(&a);
    }
    3 - linalg::rank(&stacked, Cutoff::with_unit_floor(tau_rank))
}
