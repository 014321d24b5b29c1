//! The Poisson bivector on the character variety at a good point, brackets of
//! trace functions, and the leaf form.
//!
//! Cotangent vectors are functionals on `H^1` given by their values `a_l` on
//! the absolute basis `t_l`; a functional is represented by the relative class
//! `xi` with `<xi, t_l> = a_l`, i.e. `D^T xi = a`. The forgetful map has matrix
//! `F = D^{-1} P` in these bases, so `{f, g} = dg(F xi_f) = b^T Lambda a` with
//! `Lambda = D^{-1} P D^{-T}`.

use crate::cellular::{duality_pairing_with_bases, DualityPairing, LocalSystem, SurfaceComplex};
use crate::cohomology::{self, evaluate_with, AdjointData, GroupCocycle, H1Basis, RelativeGroupBasis};
use crate::lie;
use crate::linalg::{self, Cutoff};
use crate::representation::Representation;
use crate::surface::{SurfacePresentation, Word};
use crate::{tol, Error, Result, Scalar};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// `W -> tr rho(W)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceFunction {
    pub word: Word,
}

impl TraceFunction {
    pub fn new(word: Word) -> Self {
        Self { word }
    }

    pub fn parse(p: &SurfacePresentation, text: &str) -> Result<Self> {
        Ok(Self { word: p.parse_word(text)? })
    }

    /// Boundary trace `tr C_j` (1-based).
    pub fn boundary(p: &SurfacePresentation, j: usize) -> Result<Self> {
        Ok(Self { word: p.boundary_word(j)? })
    }

    pub fn value(&self, rho: &Representation) -> Complex64 {
        trace_value(rho, self)
    }
}

pub fn trace_value(rho: &Representation, f: &TraceFunction) -> Complex64 {
    rho.evaluate_word(&f.word).trace()
}

/// `rho_eps(x) = exp(eps u(x)) rho(x)` on the generators.
pub fn deform<T: Scalar>(rho: &Representation, u: &GroupCocycle<T>, eps: f64) -> Representation {
    let family = rho.family();
    let images = (0..rho.presentation().rank())
        .map(|k| {
            let x = lie::from_coords::<T>(family, &(u.value(k) * <T as Scalar>::from_f64(eps)));
            lie::exp_map(&x).mul(rho.image(k))
        })
        .collect();
    rho.with_images(images)
}

/// Values `tr(u_l(W) rho(W))` of `d tr_W` on the basis cocycles.
pub fn trace_differential<T: Scalar>(rho: &Representation, h1: &H1Basis<T>, f: &TraceFunction) -> Result<DVector<T>> {
    let ad = AdjointData::<T>::new(rho)?;
    if h1.ambient_dim() != 3 * ad.rank() {
        return Err(Error::DimensionMismatch { expected: 3 * ad.rank(), found: h1.ambient_dim() });
    }
    let g = rho.evaluate_word(&f.word);
    Ok(DVector::from_fn(h1.dim(), |l, _| {
        let v = evaluate_with(&ad, &h1.cocycle(l), &f.word);
        let x = lie::from_coords::<T>(ad.family, &v);
        T::from_c64((x.matrix() * g.matrix()).trace())
    }))
}

#[derive(Debug, Clone)]
pub struct PoissonBivector<T: Scalar> {
    rho: Representation,
    pub pairing: DualityPairing<T>,
    /// `Lambda = D^{-1} P D^{-T}` acting on differential coordinates.
    pub matrix: DMatrix<T>,
}

impl<T: Scalar> PoissonBivector<T> {
    /// Bivector at `rho` on the default complex.
    pub fn new(rho: &Representation) -> Result<Self> {
        Self::on_complex(rho, &SurfaceComplex::build(*rho.presentation()))
    }

    pub fn on_complex(rho: &Representation, complex: &SurfaceComplex) -> Result<Self> {
        let abs = cohomology::h1_basis::<T>(rho)?;
        let rel = cohomology::relative_group_basis::<T>(rho)?;
        Self::with_bases(rho, complex, abs, rel)
    }

    pub fn with_bases(
        rho: &Representation,
        complex: &SurfaceComplex,
        absolute: H1Basis<T>,
        relative: RelativeGroupBasis<T>,
    ) -> Result<Self> {
        let ls = LocalSystem::<T>::new(complex, rho)?;
        let pairing = duality_pairing_with_bases(&ls, absolute, relative)?;
        let ill = Error::IllConditioned { condition: pairing.condition };
        let y = linalg::solve_matrix(&pairing.matrix, &pairing.forget.transpose()).ok_or(ill)?;
        let matrix = y.transpose();
        Ok(Self { rho: rho.clone(), pairing, matrix })
    }

    pub fn representation(&self) -> &Representation {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn h1(&self) -> &H1Basis<T> {
        &self.pairing.absolute_group
    }

    /// `F = D^{-1} P`.
    pub fn forget_matrix(&self) -> &DMatrix<T> {
        &self.pairing.forget
    }

    pub fn differential(&self, f: &TraceFunction) -> Result<DVector<T>> {
        trace_differential(&self.rho, self.h1(), f)
    }

    /// Relative-basis coordinates `xi` with `D^T xi = df`.
    pub fn cotangent_representative(&self, df: &DVector<T>) -> Result<DVector<T>> {
        if df.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: df.len() });
        }
        linalg::solve(&self.pairing.matrix.transpose(), df)
            .ok_or(Error::IllConditioned { condition: self.pairing.condition })
    }

    /// `X_f = Lambda df` in absolute coordinates, so that `{f, g} = dg(X_f)`.
    pub fn hamiltonian_vector(&self, f: &TraceFunction) -> Result<DVector<T>> {
        Ok(&self.matrix * self.differential(f)?)
    }

    pub fn bracket_differentials(&self, a: &DVector<T>, b: &DVector<T>) -> T {
        (b.transpose() * &self.matrix * a)[(0, 0)]
    }

    pub fn bracket(&self, f: &TraceFunction, g: &TraceFunction) -> Result<T> {
        Ok(self.bracket_differentials(&self.differential(f)?, &self.differential(g)?))
    }

    /// Max-modulus of `P + P^T`, the antisymmetry defect of `(xi, eta) -> eta(F xi)`.
    pub fn antisymmetry_residual(&self) -> f64 {
        linalg::antisymmetry_defect(&self.pairing.self_pairing)
    }

    /// Rank of the forgetful map with a unit-floored cutoff (`F` is O(1)).
    pub fn rank(&self) -> usize {
        self.rank_with(tol::TAU_RANK)
    }

    pub fn rank_with(&self, tau_rank: f64) -> usize {
        linalg::rank(self.forget_matrix(), Cutoff::with_unit_floor(tau_rank))
    }

    /// [`linalg::rank_margin`] of the rank decision made by `rank_with`.
    pub fn rank_margin(&self, tau_rank: f64, margin: f64) -> f64 {
        linalg::rank_margin(self.forget_matrix(), Cutoff::with_unit_floor(tau_rank), margin)
    }

    pub fn corank(&self) -> usize {
        self.dim() - self.rank()
    }

    /// `|P| / |D|`: size of the bivector relative to the pairing.
    pub fn relative_norm(&self) -> f64 {
        let d = linalg::operator_norm(&self.pairing.matrix);
        if d == 0.0 {
            0.0
        } else {
            linalg::operator_norm(&self.pairing.self_pairing) / d
        }
    }
}

pub fn poisson_bracket<T: Scalar>(lambda: &PoissonBivector<T>, f: &TraceFunction, g: &TraceFunction) -> Result<T> {
    lambda.bracket(f, g)
}

pub fn cotangent_representative<T: Scalar>(lambda: &PoissonBivector<T>, df: &DVector<T>) -> Result<DVector<T>> {
    lambda.cotangent_representative(df)
}

/// Central difference of `eval` along the cocycle with coordinates `t`.
pub fn directional_derivative<T, F>(
    rho: &Representation,
    h1: &H1Basis<T>,
    eval: F,
    t: &DVector<T>,
    step: f64,
) -> Result<T>
where
    T: Scalar,
    F: Fn(&Representation) -> Result<T>,
{
    let u = h1.cocycle_from_coords(t);
    let plus = deform(rho, &u, step);
    let minus = deform(rho, &u, -step);
    if rho.presentation().rank() > 0 {
        for r in [&plus, &minus] {
            if !r.certify_goodness().is_good {
                return Err(Error::GoodnessLostUnderPerturbation);
            }
        }
    }
    Ok((eval(&plus)? - eval(&minus)?) / <T as Scalar>::from_f64(2.0 * step))
}

#[derive(Debug, Clone)]
pub struct JacobiReport<T: Scalar> {
    /// `{f,{g,h}}`, `{g,{h,f}}`, `{h,{f,g}}`.
    pub outer: [T; 3],
    /// `{g,h}`, `{h,f}`, `{f,g}`.
    pub inner: [T; 3],
    pub residual: f64,
    /// Max modulus of the six terms.
    pub scale: f64,
}

/// Below this scale all six terms sit at finite-difference noise and the
/// relative residual carries no information.
pub const JACOBI_DEGENERATE_SCALE: f64 = 1e-8;

impl<T: Scalar> JacobiReport<T> {
    pub fn is_degenerate(&self) -> bool {
        self.scale < JACOBI_DEGENERATE_SCALE
    }

    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.residual
        } else {
            self.residual / self.scale
        }
    }
}

pub fn jacobi_residual<T: Scalar>(
    rho: &Representation,
    complex: &SurfaceComplex,
    f: &TraceFunction,
    g: &TraceFunction,
    h: &TraceFunction,
) -> Result<JacobiReport<T>> {
    jacobi_residual_with(rho, complex, [f, g, h], tol::FD_STEP)
}

pub fn jacobi_residual_with<T: Scalar>(
    rho: &Representation,
    complex: &SurfaceComplex,
    fns: [&TraceFunction; 3],
    step: f64,
) -> Result<JacobiReport<T>> {
    let here = PoissonBivector::<T>::on_complex(rho, complex)?;
    let mut outer = [T::zero(); 3];
    let mut inner = [T::zero(); 3];
    for k in 0..3 {
        let (a, b, c) = (fns[k], fns[(k + 1) % 3], fns[(k + 2) % 3]);
        inner[k] = here.bracket(b, c)?;
        let x = here.hamiltonian_vector(a)?;
        outer[k] = directional_derivative(
            rho,
            here.h1(),
            |r| PoissonBivector::<T>::on_complex(r, complex)?.bracket(b, c),
            &x,
            step,
        )?;
    }
    let residual = (outer[0] + outer[1] + outer[2]).modulus();
    let scale = outer.iter().chain(&inner).map(|v| v.modulus()).fold(0.0, f64::max);
    Ok(JacobiReport { outer, inner, residual, scale })
}

/// Max over the given functions of `|{tr C_j, f}|`, one entry per boundary.
pub fn casimir_residuals<T: Scalar>(lambda: &PoissonBivector<T>, fns: &[TraceFunction]) -> Result<Vec<f64>> {
    let p = *lambda.representation().presentation();
    (1..=p.punctures())
        .map(|j| {
            let c = lambda.differential(&TraceFunction::boundary(&p, j)?)?;
            let mut worst = 0.0f64;
            for f in fns {
                worst = worst.max(lambda.bracket_differentials(&c, &lambda.differential(f)?).modulus());
            }
            Ok(worst)
        })
        .collect()
}

/// The two-form on `V = image(F)` in the orthonormal basis of left singular
/// vectors `e_i = F zeta_i`: `omega_ij = zeta_j^T P zeta_i`.
#[derive(Debug, Clone)]
pub struct LeafForm<T: Scalar> {
    pub matrix: DMatrix<T>,
    /// Columns `e_i` in absolute coordinates.
    pub basis: DMatrix<T>,
    /// Relative classes `zeta_i` with `F zeta_i = e_i`.
    pub preimages: DMatrix<T>,
    /// Set when the parabolic subspace is zero.
    pub empty_leaf: bool,
}

impl<T: Scalar> LeafForm<T> {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        linalg::antisymmetry_defect(&self.matrix)
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.matrix, Cutoff::relative(tol::TAU_RANK))
    }

    pub fn is_nondegenerate(&self) -> bool {
        let s = linalg::singular_values(&self.matrix);
        match (s.first(), s.last()) {
            (Some(&hi), Some(&lo)) => lo > tol::TAU_RANK * hi,
            _ => false,
        }
    }

    /// Coordinates in the leaf basis of an absolute class lying in `V`.
    pub fn coordinates(&self, v: &DVector<T>) -> DVector<T> {
        self.basis.adjoint() * v
    }

    pub fn evaluate(&self, x: &DVector<T>, y: &DVector<T>) -> T {
        (x.transpose() * &self.matrix * y)[(0, 0)]
    }
}

pub fn leaf_form<T: Scalar>(lambda: &PoissonBivector<T>) -> LeafForm<T> {
    leaf_form_with(lambda, tol::TAU_RANK)
}

pub fn leaf_form_with<T: Scalar>(lambda: &PoissonBivector<T>, tau_rank: f64) -> LeafForm<T> {
    let f = lambda.forget_matrix();
    let d = lambda.dim();
    let svd = linalg::svd_full(f);
    let r = lambda.rank_with(tau_rank);
    let basis = svd.u.columns(0, r).into_owned();
    let preimages = DMatrix::from_fn(d, r, |i, k| svd.v[(i, k)] / <T as Scalar>::from_f64(svd.singular_values[k]));
    let p = &lambda.pairing.self_pairing;
    let matrix = DMatrix::from_fn(r, r, |i, j| {
        (preimages.column(j).transpose() * p * preimages.column(i))[(0, 0)]
    });
    LeafForm { matrix, basis, preimages, empty_leaf: r == 0 }
}

/// Euler step `rho'(x) = exp(eps u_f(x)) rho(x)` along the Hamiltonian vector of `f`.
pub fn hamiltonian_step<T: Scalar>(lambda: &PoissonBivector<T>, f: &TraceFunction, eps: f64) -> Result<Representation> {
    let x = lambda.hamiltonian_vector(f)?;
    let u = lambda.h1().cocycle_from_coords(&x);
    Ok(deform(lambda.representation(), &u, eps))
}
