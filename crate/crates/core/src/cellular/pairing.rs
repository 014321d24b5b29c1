//! Cup product pairing `H^1(X, dX) x H^1(X) -> k` and the duality matrices.

use super::cochain::{cocycle_residual, comparison, relative_comparison, TwistedCochain};
use super::local_system::LocalSystem;
use crate::cohomology::{self, H1Basis, RelativeGroupBasis};
use crate::lie;
use crate::linalg;
use crate::{tol, Error, Result, Scalar};
use nalgebra::{DMatrix, DVector};

/// `sum_t sign_t B(phi(e01), Ad_{g01} psi(e12))`, no cocycle checks.
pub fn cup_pair_unchecked<T: Scalar>(ls: &LocalSystem<'_, T>, phi: &TwistedCochain<T>, psi: &TwistedCochain<T>) -> T {
    let c = ls.complex();
    let g = lie::gram::<T>(ls.family());
    let mut acc = T::zero();
    for t in 0..c.triangle_count() {
        let [e01, e12, _] = c.triangle_edges(t);
        let y = ls.transport(e01) * psi.value(e12);
        let val = (phi.value(e01).transpose() * g * y)[(0, 0)];
        acc += if c.orientation(t) > 0 { val } else { -val };
    }
    acc
}

pub fn cup_pair<T: Scalar>(ls: &LocalSystem<'_, T>, phi: &TwistedCochain<T>, psi: &TwistedCochain<T>) -> Result<T> {
    let ne = ls.complex().edge_count();
    for c in [phi, psi] {
        if c.degree() != 1 || c.len() != ne {
            return Err(Error::DimensionMismatch { expected: ne, found: c.len() });
        }
        let r = cocycle_residual(ls, c)?;
        if r > tol::COCYCLE_RESIDUAL {
            return Err(Error::NotACocycle { residual: r });
        }
    }
    Ok(cup_pair_unchecked(ls, phi, psi))
}

/// Duality data at one point: the relative classes `r_k`, absolute classes
/// `t_l` (both pulled back from canonical group-level bases), `D_kl = <r_k, t_l>`
/// and `P_jk = <r_j, r_k>`.
#[derive(Debug, Clone)]
pub struct DualityPairing<T: Scalar> {
    pub absolute_group: H1Basis<T>,
    pub relative_group: RelativeGroupBasis<T>,
    pub absolute: Vec<TwistedCochain<T>>,
    pub relative: Vec<TwistedCochain<T>>,
    pub matrix: DMatrix<T>,
    pub self_pairing: DMatrix<T>,
    /// `D^{-1} P`: the forgetful map in `t`-coordinates, one column per `r_k`.
    pub forget: DMatrix<T>,
    pub condition: f64,
}

impl<T: Scalar> DualityPairing<T> {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Absolute-class coordinates (in the `t` basis) of the image of the
    /// relative class with coordinates `xi`.
    pub fn forget_supports(&self, xi: &DVector<T>) -> Result<DVector<T>> {
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: xi.len() });
        }
        Ok(&self.forget * xi)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values(&self.matrix)
    }
}

pub fn duality_pairing<T: Scalar>(ls: &LocalSystem<'_, T>) -> Result<DualityPairing<T>> {
    let rho = ls.representation();
    let absolute = cohomology::h1_basis::<T>(rho)?;
    let relative = cohomology::relative_group_basis::<T>(rho)?;
    duality_pairing_with_bases(ls, absolute, relative)
}

pub fn duality_pairing_with_bases<T: Scalar>(
    ls: &LocalSystem<'_, T>,
    absolute_group: H1Basis<T>,
    relative_group: RelativeGroupBasis<T>,
) -> Result<DualityPairing<T>> {
    let d = absolute_group.dim();
    if relative_group.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: relative_group.dim() });
    }
    let absolute: Vec<_> = (0..d)
        .map(|l| comparison(ls, &absolute_group.cocycle(l)))
        .collect::<Result<_>>()?;
    let relative: Vec<_> = (0..d)
        .map(|k| relative_comparison(ls, &relative_group, &relative_group.vector(k)))
        .collect::<Result<_>>()?;
    for c in absolute.iter().chain(&relative) {
        let r = cocycle_residual(ls, c)?;
        if r > tol::COCYCLE_RESIDUAL {
            return Err(Error::NotACocycle { residual: r });
        }
    }
    for r in &relative {
        let b = super::cochain::boundary_residual(ls, r) / r.max_norm().max(1.0);
        if b > tol::COCYCLE_RESIDUAL {
            return Err(Error::NotRelative { residual: b });
        }
    }
    let matrix = DMatrix::from_fn(d, d, |k, l| cup_pair_unchecked(ls, &relative[k], &absolute[l]));
    let self_pairing = DMatrix::from_fn(d, d, |j, k| cup_pair_unchecked(ls, &relative[j], &relative[k]));
    let condition = linalg::condition_number(&matrix);
    if !(condition <= tol::MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let forget = linalg::solve_matrix(&matrix, &self_pairing).ok_or(Error::IllConditioned { condition })?;
    Ok(DualityPairing { absolute_group, relative_group, absolute, relative, matrix, self_pairing, forget, condition })
}
