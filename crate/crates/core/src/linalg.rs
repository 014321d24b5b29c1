//! Dense SVD-based helpers: ranks, null spaces, complements, subspace angles.
//!
//! Every rank decision goes through a [`Cutoff`]: a singular value counts as
//! zero when it is at most `rel * max(sigma_max, floor)`.

use crate::Scalar;
use faer::c64;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub rel: f64,
    pub floor: f64,
}

impl Cutoff {
    pub fn relative(rel: f64) -> Self {
        Self { rel, floor: 0.0 }
    }

    /// Relative cutoff that never drops below `rel` in absolute terms.
    pub fn with_unit_floor(rel: f64) -> Self {
        Self { rel, floor: 1.0 }
    }

    pub fn threshold(&self, sigma_max: f64) -> f64 {
        self.rel * sigma_max.max(self.floor)
    }
}

/// Full singular value decomposition `a = u * diag(s) * v^*` with descending
/// singular values and a square `v` (rows are zero-padded when `a` is wide).
pub struct FullSvd<T: Scalar> {
    pub u: DMatrix<T>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<T>,
}

pub fn svd_full<T: Scalar>(a: &DMatrix<T>) -> FullSvd<T> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return FullSvd {
            u: DMatrix::zeros(m, 0),
            singular_values: Vec::new(),
            v: DMatrix::identity(n, n),
        };
    }
    // nalgebra's bidiagonal SVD loses accuracy on some rank-deficient
    // inputs; faer's is used instead, in the matching field.
    let k = m.min(n);
    if T::IS_COMPLEX {
        let f = faer::Mat::<c64>::from_fn(m, n, |i, j| a[(i, j)].to_c64());
        let svd = f.svd().expect("SVD did not converge");
        let s = svd.S().column_vector();
        FullSvd {
            u: DMatrix::from_fn(m, k, |i, j| T::from_c64(svd.U()[(i, j)])),
            singular_values: (0..k).map(|i| s[i].re).collect(),
            v: DMatrix::from_fn(n, n, |i, j| T::from_c64(svd.V()[(i, j)])),
        }
    } else {
        let f = faer::Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)].to_c64().re);
        let svd = f.svd().expect("SVD did not converge");
        let s = svd.S().column_vector();
        FullSvd {
            u: DMatrix::from_fn(m, k, |i, j| <T as Scalar>::from_f64(svd.U()[(i, j)])),
            singular_values: (0..k).map(|i| s[i]).collect(),
            v: DMatrix::from_fn(n, n, |i, j| <T as Scalar>::from_f64(svd.V()[(i, j)])),
        }
    }
}

pub fn singular_values<T: Scalar>(a: &DMatrix<T>) -> Vec<f64> {
    svd_full(a).singular_values
}

pub fn rank<T: Scalar>(a: &DMatrix<T>, cutoff: Cutoff) -> usize {
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let thr = cutoff.threshold(smax);
    s.iter().filter(|&&x| x > thr).count()
}

/// How close the cutoff comes to the singular values on either side of it:
/// the larger of `margin * threshold / smallest_kept` and
/// `margin * largest_dropped / threshold`. At most 1 when the threshold sits
/// at least `margin`-fold inside the spectral gap.
pub fn rank_margin<T: Scalar>(a: &DMatrix<T>, cutoff: Cutoff, margin: f64) -> f64 {
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let thr = cutoff.threshold(smax);
    if thr == 0.0 {
        return 0.0;
    }
    let kept = s.iter().copied().filter(|&x| x > thr).fold(f64::INFINITY, f64::min);
    let dropped = s.iter().copied().filter(|&x| x <= thr).fold(0.0, f64::max);
    let low = if kept.is_finite() { margin * thr / kept } else { 0.0 };
    low.max(margin * dropped / thr)
}

/// Orthonormal basis (columns) of the null space of `a`.
pub fn null_space<T: Scalar>(a: &DMatrix<T>, cutoff: Cutoff) -> DMatrix<T> {
    let n = a.ncols();
    let svd = svd_full(a);
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    let thr = cutoff.threshold(smax);
    let r = svd.singular_values.iter().filter(|&&x| x > thr).count();
    svd.v.columns(r, n - r).into_owned()
}

/// Orthonormal basis (columns) of the column space of `a`.
pub fn column_space<T: Scalar>(a: &DMatrix<T>, cutoff: Cutoff) -> DMatrix<T> {
    let svd = svd_full(a);
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    let thr = cutoff.threshold(smax);
    let r = svd.singular_values.iter().filter(|&&x| x > thr).count();
    svd.u.columns(0, r).into_owned()
}

/// Orthonormal complement of the span of the orthonormal columns `q` inside
/// the ambient space of dimension `q.nrows()`.
pub fn orthogonal_complement<T: Scalar>(q: &DMatrix<T>) -> DMatrix<T> {
    let n = q.nrows();
    if q.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    null_space(&q.adjoint(), Cutoff { rel: 0.5, floor: 1.0 })
}

/// Removes from the columns of `a` their components along the orthonormal
/// columns of `q`.
pub fn project_out<T: Scalar>(a: &DMatrix<T>, q: &DMatrix<T>) -> DMatrix<T> {
    if q.ncols() == 0 {
        return a.clone();
    }
    a - q * (q.adjoint() * a)
}

/// Principal angles (radians, ascending) between the spans of two
/// orthonormal column sets. Returns `None` when the dimensions differ.
pub fn principal_angles<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> Option<Vec<f64>> {
    if a.ncols() != b.ncols() || a.nrows() != b.nrows() {
        return None;
    }
    if a.ncols() == 0 {
        return Some(Vec::new());
    }
    // Sines of the angles are the singular values of the residual of `a`
    // after projecting onto span(b); this stays accurate for tiny angles.
    let residual = project_out(a, b);
    let mut angles: Vec<f64> = singular_values(&residual)
        .into_iter()
        .map(|s| s.clamp(0.0, 1.0).asin())
        .collect();
    angles.sort_by(|x, y| x.partial_cmp(y).expect("NaN angle"));
    Some(angles)
}

/// Ratio of largest to smallest singular value; infinite when singular.
pub fn condition_number<T: Scalar>(a: &DMatrix<T>) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Solves `a x = b` with partial-pivot LU.
pub fn solve<T: Scalar>(a: &DMatrix<T>, b: &DVector<T>) -> Option<DVector<T>> {
    if a.nrows() == 0 {
        return Some(DVector::zeros(0));
    }
    a.clone().lu().solve(b)
}

pub fn solve_matrix<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> Option<DMatrix<T>> {
    if a.nrows() == 0 {
        return Some(DMatrix::zeros(0, b.ncols()));
    }
    a.clone().lu().solve(b)
}

pub fn max_abs<T: Scalar>(a: &DMatrix<T>) -> f64 {
    a.iter().map(|x| x.modulus()).fold(0.0, f64::max)
}

/// Max-modulus of `a + a^T` (bilinear antisymmetry defect, no conjugation).
pub fn antisymmetry_defect<T: Scalar>(a: &DMatrix<T>) -> f64 {
    max_abs(&(a + a.transpose()))
}

/// Largest singular value.
pub fn operator_norm<T: Scalar>(a: &DMatrix<T>) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}
