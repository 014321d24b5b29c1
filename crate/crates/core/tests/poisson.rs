use charpoisson::cohomology::{coboundary, h1_basis, H1Basis};
use charpoisson::lie::random_group_element;
use charpoisson::linalg;
use charpoisson::poisson::*;
use charpoisson::representation::find_good_representation;
use charpoisson::verify::random_trace_functions;
use charpoisson::*;
use nalgebra::{DVector, Vector3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// tr rho(a1), (1,1), SU2, seed 7: read off the generator matrix directly.
const TRACE_A1_SEED7: f64 = -0.4901990879411748;
/// {tr a1, tr b1} at the same point; equals 1/2 xy - z (Goldman's formula).
const BRACKET_A1_B1_SEED7: f64 = -1.2161086252923876;
/// Smallest singular value of D at the same point (regression value).
const DUALITY_SMIN_SEED7: f64 = 2.0409584178002831;

fn pres(g: usize, m: usize) -> SurfacePresentation {
    SurfacePresentation::new(g, m).unwrap()
}

fn good(g: usize, m: usize, spec: GroupSpec, seed: u64) -> Representation {
    find_good_representation(pres(g, m), spec, seed, 20, tol::TAU_RANK).0.unwrap().0
}

fn seed7() -> Representation {
    Representation::from_seed(pres(1, 1), GroupSpec::su2(), 7)
}

fn tf(p: &SurfacePresentation, s: &str) -> TraceFunction {
    TraceFunction::parse(p, s).unwrap()
}

#[test]
fn trace_values() {
    let rho = seed7();
    let p = *rho.presentation();
    assert_eq!(trace_value(&rho, &TraceFunction::new(Word::empty())), Complex64::new(2.0, 0.0));
    assert!((trace_value(&rho, &tf(&p, "a1")).re - TRACE_A1_SEED7).abs() < 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = random_group_element(GroupSpec::su2(), &mut rng);
    let conj = rho.conjugate(&g);
    for f in random_trace_functions(&p, &mut rng, 10, 6) {
        assert!((trace_value(&rho, &f) - trace_value(&conj, &f)).norm() < 1e-12);
    }
}

#[test]
fn trace_differentials() {
    let rho = seed7();
    let p = *rho.presentation();
    let h = h1_basis::<f64>(&rho).unwrap();
    assert_eq!(trace_differential(&rho, &h, &TraceFunction::new(Word::empty())).unwrap(), DVector::zeros(3));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = Vector3::new(0.3, -0.8, 0.1);
    let dx = coboundary(&rho, &x).unwrap();
    let whole = H1Basis::from_columns(
        nalgebra::DMatrix::from_column_slice(6, 1, dx.vector().as_slice()),
        h.coboundaries.clone(),
        h.certificate.clone(),
    );
    for f in random_trace_functions(&p, &mut rng, 10, 6) {
        assert!(trace_differential(&rho, &whole, &f).unwrap()[0].abs() < 1e-10);
        let t = DVector::from_vec(vec![0.4, -1.0, 0.7]);
        let exact = trace_differential(&rho, &h, &f).unwrap().dot(&t);
        let step = 1e-5;
        let u = h.cocycle_from_coords(&t);
        let fd = (f.value(&deform(&rho, &u, step)).re - f.value(&deform(&rho, &u, -step)).re) / (2.0 * step);
        assert!((fd - exact).abs() < 1e-6);
    }
}

#[test]
fn cotangent_representatives() {
    let rho = seed7();
    let pb = PoissonBivector::<f64>::new(&rho).unwrap();
    assert_eq!(pb.cotangent_representative(&DVector::zeros(3)).unwrap(), DVector::zeros(3));
    let a = DVector::from_vec(vec![1.0, -2.0, 0.5]);
    let b = DVector::from_vec(vec![0.3, 0.1, -0.9]);
    let xa = pb.cotangent_representative(&a).unwrap();
    let xb = pb.cotangent_representative(&b).unwrap();
    let xab = pb.cotangent_representative(&(&a * 2.0 - &b)).unwrap();
    assert!((xab - (xa.clone() * 2.0 - xb)).norm() < 1e-10);
    // pairing the representative against each absolute class gives back a
    let back = pb.pairing.matrix.transpose() * &xa;
    assert!((back - a).norm() < 1e-8);
    assert!(pb.cotangent_representative(&DVector::zeros(2)).is_err());
    assert!((pb.pairing.singular_values()[2] - DUALITY_SMIN_SEED7).abs() < 1e-8);
}

#[test]
fn bracket_basics() {
    let rho = seed7();
    let p = *rho.presentation();
    let pb = PoissonBivector::<f64>::new(&rho).unwrap();
    let (x, y) = (tf(&p, "a1"), tf(&p, "b1"));
    assert!((poisson_bracket(&pb, &x, &y).unwrap() - BRACKET_A1_B1_SEED7).abs() < 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fns = random_trace_functions(&p, &mut rng, 8, 6);
    for f in &fns {
        assert!(pb.bracket(f, f).unwrap().abs() < 1e-10);
        for g in &fns {
            let s = pb.bracket(f, g).unwrap() + pb.bracket(g, f).unwrap();
            assert!(s.abs() < 1e-8);
        }
    }
    // gauge invariance
    let g = random_group_element(GroupSpec::su2(), &mut rng);
    let pc = PoissonBivector::<f64>::new(&rho.conjugate(&g)).unwrap();
    for f in &fns[..4] {
        for h in &fns[4..] {
            assert!((pb.bracket(f, h).unwrap() - pc.bracket(f, h).unwrap()).abs() < 1e-8);
        }
    }
}

#[test]
fn boundary_traces_are_casimirs() {
    for (g, m) in [(1, 1), (1, 2), (0, 3), (2, 1)] {
        let rho = good(g, m, GroupSpec::su2(), 4);
        let pb = PoissonBivector::<f64>::new(&rho).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fns = random_trace_functions(rho.presentation(), &mut rng, 20, 6);
        for r in casimir_residuals(&pb, &fns).unwrap() {
            assert!(r < 1e-8, "({g},{m}) {r}");
        }
    }
    // `c1` on (1,2) is a generator whose trace is a boundary trace
    let rho = good(1, 2, GroupSpec::su2(), 6);
    let p = *rho.presentation();
    let pb = PoissonBivector::<f64>::new(&rho).unwrap();
    assert!(pb.hamiltonian_vector(&tf(&p, "c1")).unwrap().norm() < 1e-8);
}

#[test]
fn classical_trace_bracket_ratio() {
    let p = pres(1, 1);
    let (x, y, z) = (tf(&p, "a1"), tf(&p, "b1"), tf(&p, "a1 b1"));
    let mut ratios = Vec::new();
    for seed in 0..10 {
        let rho = good(1, 1, GroupSpec::su2(), 100 + 17 * seed);
        let pb = PoissonBivector::<f64>::new(&rho).unwrap();
        let (xv, yv, zv) = (x.value(&rho).re, y.value(&rho).re, z.value(&rho).re);
        ratios.push(pb.bracket(&x, &y).unwrap() / (0.5 * xv * yv - zv));
        ratios.push(pb.bracket(&y, &z).unwrap() / (0.5 * yv * zv - xv));
        ratios.push(pb.bracket(&z, &x).unwrap() / (0.5 * zv * xv - yv));
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((hi - lo) / hi.abs() < 1e-4);
    assert!((ratios[0] - 1.0).abs() < 1e-8, "normalization with B = tr and CCW orientation");
}

#[test]
fn directional_derivatives() {
    let rho = seed7();
    let p = *rho.presentation();
    let h = h1_basis::<f64>(&rho).unwrap();
    let t = DVector::from_vec(vec![0.2, 0.5, -0.3]);
    let c = directional_derivative(&rho, &h, |_| Ok(3.25), &t, 1e-5).unwrap();
    assert!(c.abs() < 1e-10);
    let f = tf(&p, "a1 b1^-1 a1");
    let eval = |r: &Representation| Ok(f.value(r).re);
    let fd = directional_derivative(&rho, &h, eval, &t, 1e-5).unwrap();
    let exact = trace_differential(&rho, &h, &f).unwrap().dot(&t);
    assert!((fd - exact).abs() < 1e-6);
    let fd2 = directional_derivative(&rho, &h, eval, &(&t * 2.0), 1e-5).unwrap();
    assert!((fd2 - 2.0 * fd).abs() < 1e-6);
}

#[test]
fn jacobi_identity() {
    let p = pres(1, 1);
    let rho = seed7();
    let c = SurfaceComplex::build(p);
    let (x, y, z) = (tf(&p, "a1"), tf(&p, "b1"), tf(&p, "a1 b1"));
    let r = jacobi_residual::<f64>(&rho, &c, &x, &y, &z).unwrap();
    assert!(r.relative() < 1e-4, "{r:?}");
    let d = jacobi_residual::<f64>(&rho, &c, &x, &x, &y).unwrap();
    assert!(d.residual < 1e-8);

    let rho = good(1, 2, GroupSpec::su2(), 8);
    let c = SurfaceComplex::build(*rho.presentation());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3 {
        let t = random_trace_functions(rho.presentation(), &mut rng, 3, 6);
        let r = jacobi_residual::<f64>(&rho, &c, &t[0], &t[1], &t[2]).unwrap();
        assert!(r.relative() < 1e-4, "{r:?}");
    }
}

#[test]
fn leaf_forms() {
    let pb = PoissonBivector::<f64>::new(&seed7()).unwrap();
    let leaf = leaf_form(&pb);
    assert_eq!(leaf.dim(), 2);
    assert!(!leaf.empty_leaf);
    assert!(leaf.is_nondegenerate());
    assert!(leaf.antisymmetry_residual() < 1e-10);

    let rho = good(0, 3, GroupSpec::su2(), 11);
    let pb = PoissonBivector::<f64>::new(&rho).unwrap();
    let leaf = leaf_form(&pb);
    assert!(leaf.empty_leaf);
    assert_eq!(leaf.dim(), 0);
    assert!(pb.relative_norm() < 1e-8);
}

#[test]
fn hamiltonian_steps() {
    let rho = seed7();
    let p = *rho.presentation();
    let pb = PoissonBivector::<f64>::new(&rho).unwrap();
    let f = tf(&p, "a1");
    assert_eq!(hamiltonian_step(&pb, &f, 0.0).unwrap().distance(&rho), 0.0);
    let drift = |eps: f64| {
        let r = hamiltonian_step(&pb, &f, eps).unwrap();
        (r.boundary_traces()[0] - rho.boundary_traces()[0]).norm()
    };
    let ratio = drift(1e-2) / drift(5e-3);
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    // moving along the Hamiltonian direction of a Casimir does nothing
    let cas = TraceFunction::boundary(&p, 1).unwrap();
    assert!(hamiltonian_step(&pb, &cas, 1.0).unwrap().distance(&rho) < 1e-8);
}

#[test]
fn bivector_varies_continuously() {
    let rho = seed7();
    let c = SurfaceComplex::build(*rho.presentation());
    let h = h1_basis::<f64>(&rho).unwrap();
    let rel = charpoisson::cohomology::relative_group_basis::<f64>(&rho).unwrap();
    let base = PoissonBivector::with_bases(&rho, &c, h.clone(), rel.clone()).unwrap();
    let dir = h.cocycle_from_coords(&DVector::from_vec(vec![0.6, -0.2, 0.9]));
    let mut consts = Vec::new();
    for t in [1e-3, 1e-4] {
        let moved = deform(&rho, &dir, t);
        let fixed = H1Basis::from_columns(h.basis.clone(), h.coboundaries.clone(), h.certificate.clone());
        let relm = charpoisson::cohomology::relative_group_basis::<f64>(&moved).unwrap();
        let pb = PoissonBivector::with_bases(&moved, &c, fixed, relm).unwrap();
        consts.push(linalg::max_abs(&(&pb.matrix - &base.matrix)) / t);
    }
    assert!(consts[0] > 0.0 && consts[1] > 0.0);
    assert!((consts[0] / consts[1] - 1.0).abs() < 0.1, "{consts:?}");
}

#[test]
fn sl2c_brackets() {
    let rho = good(1, 1, GroupSpec::sl2c(), 12);
    let p = *rho.presentation();
    let pb = PoissonBivector::<Complex64>::new(&rho).unwrap();
    assert_eq!(pb.rank(), 2);
    let (x, y, z) = (tf(&p, "a1"), tf(&p, "b1"), tf(&p, "a1 b1"));
    let (xv, yv, zv) = (x.value(&rho), y.value(&rho), z.value(&rho));
    let ratio = pb.bracket(&x, &y).unwrap() / (xv * yv * 0.5 - zv);
    assert!((ratio - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    let c = SurfaceComplex::build(p);
    let r = jacobi_residual::<Complex64>(&rho, &c, &x, &y, &z).unwrap();
    assert!(r.relative() < 1e-4);
    assert!(PoissonBivector::<f64>::new(&rho).is_err());
}

#[test]
fn sl2r_dimensions() {
    let rho = good(1, 1, GroupSpec::sl2r(), 13);
    let pb = PoissonBivector::<f64>::new(&rho).unwrap();
    assert_eq!(pb.dim(), 3);
    assert!(pb.antisymmetry_residual() < 1e-8);
}

#[test]
fn disc_is_empty() {
    let rho = Representation::trivial(pres(0, 1), GroupSpec::su2());
    let pb = PoissonBivector::<f64>::new(&rho).unwrap();
    assert_eq!(pb.dim(), 0);
    assert!(leaf_form(&pb).empty_leaf);
}

mod properties {
    use super::*;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn brackets_are_antisymmetric_and_gauge_invariant(seed in 0u64..100_000, which in 0usize..3) {
            let (g, m) = [(1, 1), (1, 2), (2, 1)][which];
            let rho = good(g, m, GroupSpec::su2(), seed);
            let p = *rho.presentation();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fns = random_trace_functions(&p, &mut rng, 2, 5);
            let pb = PoissonBivector::<f64>::new(&rho).unwrap();
            let fg = pb.bracket(&fns[0], &fns[1]).unwrap();
            let gf = pb.bracket(&fns[1], &fns[0]).unwrap();
            prop_assert!((fg + gf).abs() <= 1e-8 * fg.abs().max(1.0));
            let conj = rho.conjugate(&random_group_element(GroupSpec::su2(), &mut rng));
            let pc = PoissonBivector::<f64>::new(&conj).unwrap();
            let fg_c = pc.bracket(&fns[0], &fns[1]).unwrap();
            prop_assert!((fg - fg_c).abs() <= 1e-8 * fg.abs().max(1.0));
        }

        #[test]
        fn boundary_traces_commute_with_everything(seed in 0u64..100_000) {
            let rho = good(1, 2, GroupSpec::su2(), seed);
            let p = *rho.presentation();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fns = random_trace_functions(&p, &mut rng, 5, 6);
            let pb = PoissonBivector::<f64>::new(&rho).unwrap();
            for r in casimir_residuals(&pb, &fns).unwrap() {
                prop_assert!(r <= 1e-8);
            }
        }
    }
}
