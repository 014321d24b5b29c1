//! Flat bundle `Ad o rho` on the surface complex, trivialized at the
//! distinguished lift of each vertex.

use super::complex::SurfaceComplex;
use crate::cohomology::AdjointData;
use crate::lie::{self, GroupElement, GroupFamily};
use crate::representation::Representation;
use crate::{Error, Result, Scalar};
use nalgebra::Matrix3;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct LocalSystem<'c, T: Scalar> {
    complex: &'c SurfaceComplex,
    rho: Representation,
    ad: AdjointData<T>,
    holonomy: Vec<GroupElement>,
    transport: Vec<Matrix3<T>>,
    transport_inv: Vec<Matrix3<T>>,
}

impl<'c, T: Scalar> LocalSystem<'c, T> {
    pub fn new(complex: &'c SurfaceComplex, rho: &Representation) -> Result<Self> {
        let (cp, rp) = (complex.presentation(), rho.presentation());
        if cp != rp {
            return Err(Error::PresentationMismatch {
                complex_genus: cp.genus(),
                complex_punctures: cp.punctures(),
                rep_genus: rp.genus(),
                rep_punctures: rp.punctures(),
            });
        }
        let ad = AdjointData::<T>::new(rho)?;
        let family = rho.family();
        let mut cache: HashMap<&crate::surface::Word, (GroupElement, Matrix3<T>, Matrix3<T>)> = HashMap::new();
        let mut holonomy = Vec::with_capacity(complex.edge_count());
        let mut transport = Vec::with_capacity(complex.edge_count());
        let mut transport_inv = Vec::with_capacity(complex.edge_count());
        for e in 0..complex.edge_count() {
            let w = complex.edge_deck(e);
            let (g, a, ai) = cache
                .entry(w)
                .or_insert_with(|| {
                    let g = rho.evaluate_word(w);
                    let a = lie::ad_matrix::<T>(family, &g);
                    let ai = lie::ad_matrix::<T>(family, &g.inverse());
                    (g, a, ai)
                })
                .clone();
            holonomy.push(g);
            transport.push(a);
            transport_inv.push(ai);
        }
        Ok(Self { complex, rho: rho.clone(), ad, holonomy, transport, transport_inv })
    }

    pub fn complex(&self) -> &'c SurfaceComplex {
        self.complex
    }

    pub fn representation(&self) -> &Representation {
        &self.rho
    }

    pub fn family(&self) -> GroupFamily {
        self.rho.family()
    }

    pub fn adjoint(&self) -> &AdjointData<T> {
        &self.ad
    }

    /// `rho(gamma_e)`.
    pub fn holonomy(&self, e: usize) -> &GroupElement {
        &self.holonomy[e]
    }

    /// `Ad_{rho(gamma_e)}`: carries the fibre at `v1` into the frame at `v0`.
    pub fn transport(&self, e: usize) -> &Matrix3<T> {
        &self.transport[e]
    }

    pub fn transport_inverse(&self, e: usize) -> &Matrix3<T> {
        &self.transport_inv[e]
    }

    /// Max over triangles of `|rho(g01) rho(g12) - rho(g02)|`.
    pub fn flatness_residual(&self) -> f64 {
        let c = self.complex;
        (0..c.triangle_count())
            .map(|t| {
                let [e01, e12, e02] = c.triangle_edges(t);
                self.holonomy[e01].mul(&self.holonomy[e12]).distance(&self.holonomy[e02])
            })
            .fold(0.0, f64::max)
    }
}
