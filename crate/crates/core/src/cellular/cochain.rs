//! Simplicial cochains with twisted coefficients.
//!
//! Values sit in the frame of the distinguished lift of the first vertex, so
//! `(df)(v0 v1) = A01 f(v1) - f(v0)` and
//! `(dphi)(v0 v1 v2) = A01 phi(v1 v2) - phi(v0 v2) + phi(v0 v1)`.

use super::local_system::LocalSystem;
use crate::cohomology::{evaluate_with, GroupCocycle, RelativeGroupBasis};
use crate::{Error, Result, Scalar};
use nalgebra::{DVector, Vector3};

#[derive(Debug, Clone, PartialEq)]
pub struct TwistedCochain<T: Scalar> {
    degree: usize,
    values: Vec<Vector3<T>>,
}

impl<T: Scalar> TwistedCochain<T> {
    pub fn zeros(cells: usize, degree: usize) -> Self {
        Self { degree, values: vec![Vector3::zeros(); cells] }
    }

    pub fn from_values(degree: usize, values: Vec<Vector3<T>>) -> Self {
        Self { degree, values }
    }

    /// Constant section `X` on every vertex.
    pub fn constant(cells: usize, x: Vector3<T>) -> Self {
        Self { degree: 0, values: vec![x; cells] }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Vector3<T>] {
        &self.values
    }

    pub fn value(&self, cell: usize) -> &Vector3<T> {
        &self.values[cell]
    }

    pub fn set(&mut self, cell: usize, v: Vector3<T>) {
        self.values[cell] = v;
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { degree: self.degree, values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree, other.degree);
        Self {
            degree: self.degree,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-T::one()))
    }

    pub fn to_vector(&self) -> DVector<T> {
        DVector::from_iterator(3 * self.len(), self.values.iter().flat_map(|v| v.iter().copied()))
    }

    pub fn from_vector(degree: usize, v: &DVector<T>) -> Self {
        let values = (0..v.len() / 3).map(|k| v.fixed_rows::<3>(3 * k).into_owned()).collect();
        Self { degree, values }
    }
}

fn cell_count<T: Scalar>(ls: &LocalSystem<'_, T>, degree: usize) -> usize {
    let c = ls.complex();
    match degree {
        0 => c.vertex_count(),
        1 => c.edge_count(),
        2 => c.triangle_count(),
        _ => 0,
    }
}

fn check_shape<T: Scalar>(ls: &LocalSystem<'_, T>, c: &TwistedCochain<T>) -> Result<()> {
    let expected = cell_count(ls, c.degree);
    if c.len() != expected {
        return Err(Error::DimensionMismatch { expected, found: c.len() });
    }
    Ok(())
}

pub fn differential<T: Scalar>(ls: &LocalSystem<'_, T>, c: &TwistedCochain<T>) -> Result<TwistedCochain<T>> {
    check_shape(ls, c)?;
    let x = ls.complex();
    let values = match c.degree {
        0 => (0..x.edge_count())
            .map(|e| {
                let [a, b] = x.edge(e);
                ls.transport(e) * c.values[b] - c.values[a]
            })
            .collect(),
        1 => (0..x.triangle_count())
            .map(|t| {
                let [e01, e12, e02] = x.triangle_edges(t);
                ls.transport(e01) * c.values[e12] - c.values[e02] + c.values[e01]
            })
            .collect(),
        _ => Vec::new(),
    };
    Ok(TwistedCochain { degree: c.degree + 1, values })
}

/// `|d phi|_max / max(|phi|_max, 1)`.
pub fn cocycle_residual<T: Scalar>(ls: &LocalSystem<'_, T>, c: &TwistedCochain<T>) -> Result<f64> {
    let d = differential(ls, c)?;
    Ok(d.max_norm() / c.max_norm().max(1.0))
}

/// Pullback of a group cocycle: `phi(e) = u(gamma_e)`.
pub fn comparison<T: Scalar>(ls: &LocalSystem<'_, T>, u: &GroupCocycle<T>) -> Result<TwistedCochain<T>> {
    let ad = ls.adjoint();
    if u.rank() != ad.rank() {
        return Err(Error::DimensionMismatch { expected: 3 * ad.rank(), found: 3 * u.rank() });
    }
    let x = ls.complex();
    let values = (0..x.edge_count()).map(|e| evaluate_with(ad, u, x.edge_deck(e))).collect();
    Ok(TwistedCochain { degree: 1, values })
}

/// Relative cochain of a relative group class `(u, h)`: the comparison
/// cochain of `u` minus `d f`, where `f` is `Ad_{sigma_v} h_j - u(sigma_v)`
/// on vertices of boundary circle `j` (with `sigma_v` the frame offset of `v`)
/// and zero inside. The result vanishes on every boundary edge.
pub fn relative_comparison<T: Scalar>(
    ls: &LocalSystem<'_, T>,
    rel: &RelativeGroupBasis<T>,
    v: &DVector<T>,
) -> Result<TwistedCochain<T>> {
    let u = rel.absolute_part(v);
    let phi = comparison(ls, &u)?;
    let x = ls.complex();
    let ad = ls.adjoint();
    let mut f = TwistedCochain::zeros(x.vertex_count(), 0);
    for vtx in 0..x.vertex_count() {
        if let Some(j) = x.vertex_circle(vtx) {
            let sigma = x.frame_offset(vtx);
            let h = rel.boundary_value(v, j);
            f.values[vtx] = ad.word(sigma) * h - evaluate_with(ad, &u, sigma);
        }
    }
    Ok(phi.sub(&differential(ls, &f)?))
}

/// Max norm over boundary edges.
pub fn boundary_residual<T: Scalar>(ls: &LocalSystem<'_, T>, c: &TwistedCochain<T>) -> f64 {
    ls.complex()
        .boundary_edges()
        .iter()
        .map(|&e| c.values[e].norm())
        .fold(0.0, f64::max)
}
