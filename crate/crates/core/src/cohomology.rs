//! Twisted group cohomology of the free surface group with coefficients in
//! the Lie algebra via `Ad o rho`.
//!
//! A cocycle is determined by its values on the free generators (the free
//! group imposes no cocycle conditions), so cochains are coordinate vectors in
//! `k^{3n}`, one 3-block per generator. The crossed-homomorphism convention is
//! `u(xy) = u(x) + Ad_{rho(x)} u(y)`, matching the deformation
//! `rho_t(x) = exp(t u(x)) rho(x)`; coboundaries are `(dX)(x) = X - Ad_{rho(x)} X`.
//!
//! The relative complex used for compactly supported classes pairs a cocycle
//! `u` with boundary values `h_1..h_m` subject to
//! `u(gamma_j) = (Ad_{rho(gamma_j)} - 1) h_j`, where `gamma_j` is the
//! peripheral word of puncture `j`; relative coboundaries are
//! `(dX, -X, ..., -X)`.

use crate::lie::{self, GroupFamily};
use crate::linalg::{self, Cutoff};
use crate::representation::{GoodnessCertificate, Representation};
use crate::surface::Word;
use crate::{tol, Error, Result, Scalar};
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

/// `Ad` matrices of the generator images and their inverses.
#[derive(Debug, Clone)]
pub struct AdjointData<T: Scalar> {
    pub family: GroupFamily,
    ad: Vec<Matrix3<T>>,
    ad_inv: Vec<Matrix3<T>>,
}

impl<T: Scalar> AdjointData<T> {
    pub fn new(rho: &Representation) -> Result<Self> {
        rho.spec().check_field::<T>()?;
        let family = rho.family();
        let ad = rho.images().iter().map(|g| lie::ad_matrix::<T>(family, g)).collect();
        let ad_inv = rho
            .images()
            .iter()
            .map(|g| lie::ad_matrix::<T>(family, &g.inverse()))
            .collect();
        Ok(Self { family, ad, ad_inv })
    }

    pub fn rank(&self) -> usize {
        self.ad.len()
    }

    pub fn generator(&self, k: usize) -> &Matrix3<T> {
        &self.ad[k]
    }

    pub fn word(&self, w: &Word) -> Matrix3<T> {
        w.letters().iter().fold(Matrix3::identity(), |acc, l| {
            acc * if l.inverse { self.ad_inv[l.generator] } else { self.ad[l.generator] }
        })
    }

    /// The `3 x 3n` matrix of the linear map `u -> u(w)`.
    pub fn evaluation_matrix(&self, w: &Word) -> DMatrix<T> {
        let n = self.rank();
        let mut m = DMatrix::zeros(3, 3 * n);
        let mut prefix = Matrix3::<T>::identity();
        for l in w.letters() {
            let k = l.generator;
            let (block, next) = if l.inverse {
                // u(x^-1) = -Ad_{x^-1} u(x)
                (-(prefix * self.ad_inv[k]), prefix * self.ad_inv[k])
            } else {
                (prefix, prefix * self.ad[k])
            };
            let mut view = m.view_mut((0, 3 * k), (3, 3));
            view += block;
            prefix = next;
        }
        m
    }

    /// The `3n x 3` matrix of `X -> dX`.
    pub fn coboundary_matrix(&self) -> DMatrix<T> {
        let n = self.rank();
        let mut m = DMatrix::zeros(3 * n, 3);
        for k in 0..n {
            m.view_mut((3 * k, 0), (3, 3))
                .copy_from(&(Matrix3::identity() - self.ad[k]));
        }
        m
    }
}

/// A 1-cocycle, stored as its values on the free generators.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupCocycle<T: Scalar> {
    values: DVector<T>,
}

impl<T: Scalar> GroupCocycle<T> {
    pub fn zero(rank: usize) -> Self {
        Self { values: DVector::zeros(3 * rank) }
    }

    pub fn from_vector(values: DVector<T>) -> Self {
        assert_eq!(values.len() % 3, 0, "cocycle coordinates come in blocks of 3");
        Self { values }
    }

    pub fn from_values(values: &[Vector3<T>]) -> Self {
        let mut v = DVector::zeros(3 * values.len());
        for (k, x) in values.iter().enumerate() {
            v.fixed_rows_mut::<3>(3 * k).copy_from(x);
        }
        Self { values: v }
    }

    pub fn rank(&self) -> usize {
        self.values.len() / 3
    }

    pub fn vector(&self) -> &DVector<T> {
        &self.values
    }

    pub fn value(&self, generator: usize) -> Vector3<T> {
        self.values.fixed_rows::<3>(3 * generator).into_owned()
    }

    /// Value on a generator as a matrix.
    pub fn algebra_value(&self, family: GroupFamily, generator: usize) -> lie::AlgebraElement {
        lie::from_coords(family, &self.value(generator))
    }
}

pub fn coboundary<T: Scalar>(rho: &Representation, x: &Vector3<T>) -> Result<GroupCocycle<T>> {
    let ad = AdjointData::<T>::new(rho)?;
    Ok(GroupCocycle { values: ad.coboundary_matrix() * x })
}

/// Value of the crossed homomorphism on a word.
pub fn evaluate_cocycle<T: Scalar>(rho: &Representation, u: &GroupCocycle<T>, w: &Word) -> Result<Vector3<T>> {
    let ad = AdjointData::<T>::new(rho)?;
    Ok(evaluate_with(&ad, u, w))
}

pub fn evaluate_with<T: Scalar>(ad: &AdjointData<T>, u: &GroupCocycle<T>, w: &Word) -> Vector3<T> {
    let mut acc = Vector3::zeros();
    let mut prefix = Matrix3::<T>::identity();
    for l in w.letters() {
        let k = l.generator;
        if l.inverse {
            let step = prefix * ad.ad_inv[k];
            acc -= step * u.value(k);
            prefix = step;
        } else {
            acc += prefix * u.value(k);
            prefix *= ad.ad[k];
        }
    }
    acc
}

/// `dim Z^1 - dim B^1 = 3n - rank(d)`, without requiring a good point.
pub fn h1_dimension<T: Scalar>(rho: &Representation, tau_rank: f64) -> Result<usize> {
    let ad = AdjointData::<T>::new(rho)?;
    let r = linalg::rank(&ad.coboundary_matrix(), Cutoff::with_unit_floor(tau_rank));
    Ok(3 * ad.rank() - r)
}

/// Basis of `H^1` as the orthogonal complement of `B^1` in `k^{3n}`.
#[derive(Debug, Clone)]
pub struct H1Basis<T: Scalar> {
    pub basis: DMatrix<T>,
    pub coboundaries: DMatrix<T>,
    pub certificate: GoodnessCertificate,
}

impl<T: Scalar> H1Basis<T> {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn cocycle(&self, i: usize) -> GroupCocycle<T> {
        GroupCocycle { values: self.basis.column(i).into_owned() }
    }

    pub fn cocycle_from_coords(&self, coords: &DVector<T>) -> GroupCocycle<T> {
        GroupCocycle { values: &self.basis * coords }
    }

    /// Coordinates of `[u]`; zero exactly on coboundaries.
    pub fn class_coordinates(&self, u: &GroupCocycle<T>) -> Result<DVector<T>> {
        if u.values.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: u.values.len() });
        }
        Ok(self.basis.adjoint() * &u.values)
    }

    /// A basis given by explicit cocycles (e.g. transported or held fixed
    /// along a path); only the complement property is checked.
    pub fn from_columns(basis: DMatrix<T>, coboundaries: DMatrix<T>, certificate: GoodnessCertificate) -> Self {
        Self { basis, coboundaries, certificate }
    }
}

pub fn h1_basis<T: Scalar>(rho: &Representation) -> Result<H1Basis<T>> {
    h1_basis_with(rho, tol::TAU_RANK)
}

pub fn h1_basis_with<T: Scalar>(rho: &Representation, tau_rank: f64) -> Result<H1Basis<T>> {
    let certificate = check_point(rho, tau_rank)?;
    let ad = AdjointData::<T>::new(rho)?;
    let coboundaries = linalg::column_space(&ad.coboundary_matrix(), Cutoff::with_unit_floor(tau_rank));
    let basis = linalg::orthogonal_complement(&coboundaries);
    Ok(H1Basis { basis, coboundaries, certificate })
}

/// Classes whose boundary values `u(C_j)` lie in `image(Ad_{rho(C_j)} - 1)`.
#[derive(Debug, Clone)]
pub struct ParabolicBasis<T: Scalar> {
    /// Coordinates in the `H1Basis` (orthonormal columns).
    pub coords: DMatrix<T>,
    /// The same classes as cocycles in `k^{3n}`.
    pub cocycles: DMatrix<T>,
}

impl<T: Scalar> ParabolicBasis<T> {
    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }
}

/// Orthonormal basis of the Hermitian complement of `image(A - 1)`.
fn image_complement<T: Scalar>(a: &Matrix3<T>, tau_rank: f64) -> DMatrix<T> {
    let m = DMatrix::from_fn(3, 3, |i, j| a[(i, j)] - if i == j { T::one() } else { T::zero() });
    let image = linalg::column_space(&m, Cutoff::with_unit_floor(tau_rank));
    linalg::orthogonal_complement(&image)
}

pub fn parabolic_basis<T: Scalar>(rho: &Representation, h1: &H1Basis<T>) -> Result<ParabolicBasis<T>> {
    parabolic_basis_with(rho, h1, tol::TAU_RANK)
}

pub fn parabolic_basis_with<T: Scalar>(
    rho: &Representation,
    h1: &H1Basis<T>,
    tau_rank: f64,
) -> Result<ParabolicBasis<T>> {
    check_point(rho, tau_rank)?;
    let ad = AdjointData::<T>::new(rho)?;
    let mut rows: Vec<DMatrix<T>> = Vec::new();
    for c in rho.presentation().boundary_words() {
        let k = image_complement(&ad.word(&c), tau_rank);
        if k.ncols() > 0 {
            rows.push(k.adjoint() * ad.evaluation_matrix(&c) * &h1.basis);
        }
    }
    let d = h1.dim();
    let total: usize = rows.iter().map(|r| r.nrows()).sum();
    let mut conditions = DMatrix::zeros(total, d);
    let mut at = 0;
    for r in rows {
        conditions.view_mut((at, 0), (r.nrows(), d)).copy_from(&r);
        at += r.nrows();
    }
    // Conditions have O(1) scale; unit floor keeps an all-zero block from
    // being treated as full rank.
    let coords = linalg::null_space(&conditions, Cutoff::with_unit_floor(tau_rank));
    let cocycles = &h1.basis * &coords;
    Ok(ParabolicBasis { coords, cocycles })
}

pub fn class_coordinates<T: Scalar>(u: &GroupCocycle<T>, basis: &H1Basis<T>) -> Result<DVector<T>> {
    basis.class_coordinates(u)
}

/// Basis of relative group cohomology: vectors `(u, h_1, ..., h_m)` in
/// `k^{3n + 3m}`.
#[derive(Debug, Clone)]
pub struct RelativeGroupBasis<T: Scalar> {
    pub basis: DMatrix<T>,
    pub coboundaries: DMatrix<T>,
    pub rank: usize,
    pub punctures: usize,
    pub peripheral_words: Vec<Word>,
    constraints: DMatrix<T>,
}

impl<T: Scalar> RelativeGroupBasis<T> {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The cocycle part `u` of a relative vector (the forgetful map).
    pub fn absolute_part(&self, v: &DVector<T>) -> GroupCocycle<T> {
        GroupCocycle { values: v.rows(0, 3 * self.rank).into_owned() }
    }

    pub fn boundary_value(&self, v: &DVector<T>, j: usize) -> Vector3<T> {
        v.fixed_rows::<3>(3 * self.rank + 3 * j).into_owned()
    }

    pub fn vector(&self, k: usize) -> DVector<T> {
        self.basis.column(k).into_owned()
    }

    /// Max-modulus of the relative cocycle constraints at `v`.
    pub fn constraint_residual(&self, v: &DVector<T>) -> f64 {
        (&self.constraints * v).iter().map(|x| x.modulus()).fold(0.0, f64::max)
    }
}

pub fn relative_group_basis<T: Scalar>(rho: &Representation) -> Result<RelativeGroupBasis<T>> {
    relative_group_basis_with(rho, tol::TAU_RANK)
}

pub fn relative_group_basis_with<T: Scalar>(rho: &Representation, tau_rank: f64) -> Result<RelativeGroupBasis<T>> {
    check_point(rho, tau_rank)?;
    let ad = AdjointData::<T>::new(rho)?;
    let p = rho.presentation();
    let (n, m) = (p.rank(), p.punctures());
    let peripheral_words: Vec<Word> = (1..=m).map(|j| p.peripheral_word(j)).collect::<Result<_>>()?;
    let dim = 3 * n + 3 * m;
    let mut constraints = DMatrix::zeros(3 * m, dim);
    for (j, w) in peripheral_words.iter().enumerate() {
        constraints
            .view_mut((3 * j, 0), (3, 3 * n))
            .copy_from(&ad.evaluation_matrix(w));
        let hol = ad.word(w);
        constraints
            .view_mut((3 * j, 3 * n + 3 * j), (3, 3))
            .copy_from(&(Matrix3::identity() - hol));
    }
    let mut cob = DMatrix::zeros(dim, 3);
    cob.view_mut((0, 0), (3 * n, 3)).copy_from(&ad.coboundary_matrix());
    for j in 0..m {
        cob.view_mut((3 * n + 3 * j, 0), (3, 3))
            .copy_from(&(-DMatrix::<T>::identity(3, 3)));
    }
    let coboundaries = linalg::column_space(&cob, Cutoff::with_unit_floor(tau_rank));
    let kernel = linalg::null_space(&constraints, Cutoff::with_unit_floor(tau_rank));
    let reduced = linalg::project_out(&kernel, &coboundaries);
    let basis = linalg::column_space(&reduced, Cutoff::with_unit_floor(tau_rank));
    Ok(RelativeGroupBasis { basis, coboundaries, rank: n, punctures: m, peripheral_words, constraints })
}

/// Goodness check, waived for the disc: with no generators `H^1 = 0` and
/// every basis below is empty.
pub(crate) fn check_point(rho: &Representation, tau_rank: f64) -> Result<GoodnessCertificate> {
    if rho.presentation().rank() == 0 {
        Ok(rho.certify_goodness_with(tau_rank))
    } else {
        rho.require_good(tau_rank)
    }
}

/// Block-diagonal `Ad_g` acting on `blocks` consecutive 3-blocks.
pub fn block_adjoint<T: Scalar>(family: GroupFamily, g: &lie::GroupElement, blocks: usize) -> DMatrix<T> {
    let a = lie::ad_matrix::<T>(family, g);
    let mut m = DMatrix::zeros(3 * blocks, 3 * blocks);
    for k in 0..blocks {
        m.view_mut((3 * k, 3 * k), (3, 3)).copy_from(&a);
    }
    m
}
