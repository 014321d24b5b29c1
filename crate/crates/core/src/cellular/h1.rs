//! Cellular `H^1` and `H^1(X, dX)` by tree/co-tree gauge fixing.
//!
//! A spanning tree (absolute) or a spanning forest grown from the boundary
//! (relative) fixes the coboundary gauge. Cocycle equations on triangles are
//! then solved by peeling a spanning tree of the dual graph from its leaves,
//! so a gauge-fixed cocycle is determined by its values on the `n` free edges
//! left over. In the relative case the root triangle adds three linear
//! constraints; in the absolute case the parallel sections along the tree
//! leave a 3-dimensional space of coboundaries to split off.

use super::cochain::{cocycle_residual, TwistedCochain};
use super::complex::SurfaceComplex;
use super::local_system::LocalSystem;
use crate::linalg::{self, Cutoff};
use crate::{tol, Error, Result, Scalar};
use nalgebra::{DMatrix, DVector, Vector3};
use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct GaugeTree {
    pub relative: bool,
    /// Vertices in BFS order with the tree edge to their parent.
    pub vertex_order: Vec<(usize, Option<(usize, usize)>)>,
    /// Triangles in dual BFS order with the edge crossed to reach them.
    pub peel: Vec<(usize, usize)>,
    pub free_edges: Vec<usize>,
    pub root_triangle: Option<usize>,
}

impl GaugeTree {
    pub fn new(complex: &SurfaceComplex, relative: bool) -> Self {
        let nv = complex.vertex_count();
        let ne = complex.edge_count();
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
        for e in 0..ne {
            let [a, b] = complex.edge(e);
            adjacency[a].push((e, b));
            adjacency[b].push((e, a));
        }
        let mut used = vec![false; ne];
        let mut seen = vec![false; nv];
        let mut vertex_order = Vec::with_capacity(nv);
        let mut queue = VecDeque::new();
        if relative {
            for v in 0..nv {
                if complex.is_boundary_vertex(v) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        } else if nv > 0 {
            seen[0] = true;
            queue.push_back(0);
            vertex_order.push((0, None));
        }
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adjacency[v] {
                if !seen[w] && !(relative && complex.is_boundary_vertex(w)) {
                    seen[w] = true;
                    used[e] = true;
                    vertex_order.push((w, Some((e, v))));
                    queue.push_back(w);
                }
            }
        }

        let nt = complex.triangle_count();
        let mut reached = vec![false; nt];
        let mut peel = Vec::with_capacity(nt);
        let mut tqueue = VecDeque::new();
        let mut root_triangle = None;
        let crossable = |e: usize, used: &[bool]| !used[e] && !(relative && complex.is_boundary_edge(e));
        if relative {
            if nt > 0 {
                reached[0] = true;
                root_triangle = Some(0);
                tqueue.push_back(0);
            }
        } else {
            // The exterior node: its neighbours are triangles on boundary edges.
            for &e in complex.boundary_edges() {
                if used[e] {
                    continue;
                }
                let t = complex.edge_triangles(e)[0];
                if !reached[t] {
                    reached[t] = true;
                    used[e] = true;
                    peel.push((t, e));
                    tqueue.push_back(t);
                }
            }
        }
        while let Some(t) = tqueue.pop_front() {
            for e in complex.triangle_edges(t) {
                if !crossable(e, &used) {
                    continue;
                }
                if let Some(&s) = complex.edge_triangles(e).iter().find(|&&s| s != t) {
                    if !reached[s] {
                        reached[s] = true;
                        used[e] = true;
                        peel.push((s, e));
                        tqueue.push_back(s);
                    }
                }
            }
        }
        let free_edges = (0..ne)
            .filter(|&e| !used[e] && !(relative && complex.is_boundary_edge(e)))
            .collect();
        Self { relative, vertex_order, peel, free_edges, root_triangle }
    }

    /// Fills in the cocycle whose free-edge values are `free` and which
    /// vanishes on tree edges (and boundary edges, when relative).
    pub fn reconstruct<T: Scalar>(&self, ls: &LocalSystem<'_, T>, free: &DVector<T>) -> TwistedCochain<T> {
        let c = ls.complex();
        let mut phi = TwistedCochain::zeros(c.edge_count(), 1);
        for (k, &e) in self.free_edges.iter().enumerate() {
            phi.set(e, free.fixed_rows::<3>(3 * k).into_owned());
        }
        for &(t, e) in self.peel.iter().rev() {
            let [e01, e12, e02] = c.triangle_edges(t);
            let a = ls.transport(e01);
            let v = if e == e12 {
                ls.transport_inverse(e01) * (phi.value(e02) - phi.value(e01))
            } else if e == e02 {
                a * phi.value(e12) + phi.value(e01)
            } else {
                phi.value(e02) - a * phi.value(e12)
            };
            phi.set(e, v);
        }
        phi
    }

    /// Zero-cochain `f` such that `phi - d f` vanishes on tree edges, with
    /// `f(root) = root_value` (absolute) or `f = 0` on the boundary (relative).
    pub fn gauge_potential<T: Scalar>(
        &self,
        ls: &LocalSystem<'_, T>,
        phi: &TwistedCochain<T>,
        root_value: Vector3<T>,
    ) -> TwistedCochain<T> {
        let c = ls.complex();
        let mut f = TwistedCochain::zeros(c.vertex_count(), 0);
        for &(v, parent) in &self.vertex_order {
            match parent {
                None => f.set(v, root_value),
                Some((e, p)) => {
                    let [a, _] = c.edge(e);
                    let val = if a == p {
                        ls.transport_inverse(e) * (phi.value(e) + f.value(p))
                    } else {
                        ls.transport(e) * f.value(p) - phi.value(e)
                    };
                    f.set(v, val);
                }
            }
        }
        f
    }

    pub fn free_values<T: Scalar>(&self, phi: &TwistedCochain<T>) -> DVector<T> {
        DVector::from_iterator(
            3 * self.free_edges.len(),
            self.free_edges.iter().flat_map(|&e| phi.value(e).iter().copied().collect::<Vec<_>>()),
        )
    }
}

/// A basis of cellular `H^1` (absolute or relative) for one local system.
#[derive(Debug, Clone)]
pub struct CellularH1<T: Scalar> {
    pub gauge: GaugeTree,
    /// Orthonormal basis columns in free-edge coordinates.
    pub coords: DMatrix<T>,
    pub basis: Vec<TwistedCochain<T>>,
}

impl<T: Scalar> CellularH1<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_relative(&self) -> bool {
        self.gauge.relative
    }

    /// Coordinates of the class of a cocycle in this basis.
    pub fn class_coordinates(&self, ls: &LocalSystem<'_, T>, phi: &TwistedCochain<T>) -> Result<DVector<T>> {
        let expected = ls.complex().edge_count();
        if phi.degree() != 1 || phi.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: phi.len() });
        }
        let f = self.gauge.gauge_potential(ls, phi, Vector3::zeros());
        let gauged = phi.sub(&super::cochain::differential(ls, &f)?);
        Ok(self.coords.adjoint() * self.gauge.free_values(&gauged))
    }
}

pub fn cellular_h1<T: Scalar>(ls: &LocalSystem<'_, T>, relative: bool) -> Result<CellularH1<T>> {
    cellular_h1_with(ls, relative, tol::TAU_RANK)
}

pub fn cellular_h1_with<T: Scalar>(ls: &LocalSystem<'_, T>, relative: bool, tau_rank: f64) -> Result<CellularH1<T>> {
    crate::cohomology::check_point(ls.representation(), tau_rank)?;
    cellular_h1_unchecked(ls, relative, tau_rank)
}

/// As [`cellular_h1_with`] without the goodness requirement (e.g. trivial
/// coefficients).
pub fn cellular_h1_unchecked<T: Scalar>(ls: &LocalSystem<'_, T>, relative: bool, tau_rank: f64) -> Result<CellularH1<T>> {
    let c = ls.complex();
    let gauge = GaugeTree::new(c, relative);
    let k = 3 * gauge.free_edges.len();
    let coords = if relative {
        let mut m = DMatrix::zeros(3, k);
        if let Some(root) = gauge.root_triangle {
            let [e01, e12, e02] = c.triangle_edges(root);
            for i in 0..k {
                let phi = gauge.reconstruct(ls, &DVector::from_fn(k, |r, _| if r == i { T::one() } else { T::zero() }));
                let r = ls.transport(e01) * phi.value(e12) - phi.value(e02) + phi.value(e01);
                m.column_mut(i).copy_from(&r);
            }
        }
        linalg::null_space(&m, Cutoff::with_unit_floor(tau_rank))
    } else {
        let mut b = DMatrix::zeros(k, 3);
        let zero = TwistedCochain::zeros(c.edge_count(), 1);
        for i in 0..3 {
            let x = Vector3::from_fn(|r, _| if r == i { T::one() } else { T::zero() });
            let f = gauge.gauge_potential(ls, &zero, x);
            let df = super::cochain::differential(ls, &f)?;
            b.column_mut(i).copy_from(&gauge.free_values(&df));
        }
        let cob = linalg::column_space(&b, Cutoff::with_unit_floor(tau_rank));
        linalg::orthogonal_complement(&cob)
    };
    let basis: Vec<TwistedCochain<T>> = (0..coords.ncols())
        .map(|i| gauge.reconstruct(ls, &coords.column(i).into_owned()))
        .collect();
    for phi in &basis {
        let r = cocycle_residual(ls, phi)?;
        if r > tol::COCYCLE_RESIDUAL {
            return Err(Error::NotACocycle { residual: r });
        }
    }
    Ok(CellularH1 { gauge, coords, basis })
}
