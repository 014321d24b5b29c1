use charpoisson::cellular::{
    boundary_residual, cellular_h1, cellular_h1_unchecked, cocycle_residual, comparison, cup_pair, differential, duality_pairing,
    relative_comparison, LiftChoice, LocalSystem, SurfaceComplex, TwistedCochain,
};
use charpoisson::cohomology::{coboundary, h1_basis, relative_group_basis};
use charpoisson::lie::{random_group_element, GroupSpec};
use charpoisson::linalg::{self, Cutoff};
use charpoisson::representation::find_good_representation;
use charpoisson::{tol, Representation, SurfacePresentation};
use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SURFACES: [(usize, usize); 4] = [(1, 1), (0, 3), (1, 2), (2, 1)];

fn good_rho(g: usize, m: usize, spec: GroupSpec, seed: u64) -> Representation {
    let p = SurfacePresentation::new(g, m).unwrap();
    find_good_representation(p, spec, seed, 20, tol::TAU_RANK).0.unwrap().0
}

fn complex(g: usize, m: usize) -> SurfaceComplex {
    SurfaceComplex::build(SurfacePresentation::new(g, m).unwrap())
}

#[test]
fn combinatorics_of_the_quotient() {
    for (g, m) in [(0, 1), (1, 1), (0, 3), (1, 2), (2, 1), (0, 2)] {
        let c = complex(g, m);
        assert_eq!(c.euler_characteristic(), 2 - 2 * g as i64 - m as i64, "({g},{m})");
        assert_eq!(c.boundary_component_count(), m);
        assert!(c.is_simplicial(), "({g},{m})");
        assert_eq!(c.deck_conflicts(), 0);
        // boundary vertices found combinatorially agree with the labels
        let mut on_edge = vec![false; c.vertex_count()];
        for &e in c.boundary_edges() {
            for v in c.edge(e) {
                on_edge[v] = true;
            }
        }
        for v in 0..c.vertex_count() {
            assert_eq!(on_edge[v], c.is_boundary_vertex(v));
        }
        let fine = c.subdivide();
        assert_eq!(fine.triangle_count(), 6 * c.triangle_count());
        assert_eq!(fine.euler_characteristic(), c.euler_characteristic());
    }
}

#[test]
fn one_subdivision_is_not_enough() {
    let c = SurfaceComplex::build_at_level(SurfacePresentation::new(1, 1).unwrap(), 1);
    assert!(!c.is_simplicial() || c.deck_conflicts() > 0);
}

#[test]
fn disc_triangle_count() {
    let c = complex(0, 1);
    assert_eq!(c.triangle_count(), 3 * 36);
    assert_eq!(c.euler_characteristic(), 1);
}

#[test]
fn mesh_round_trip() {
    let c = complex(1, 1);
    let doc: charpoisson::cellular::MeshDocument = serde_json::from_str(&c.to_mesh_json()).unwrap();
    let back = SurfaceComplex::from_mesh_document(&doc, 2).unwrap();
    assert_eq!(back.to_mesh_json(), c.to_mesh_json());
    assert!(SurfaceComplex::from_mesh_document(&doc, 3).is_err());
}

#[test]
fn flat_and_d_squared_zero() {
    for (g, m) in SURFACES {
        let rho = good_rho(g, m, GroupSpec::su2(), 2);
        for choice in [LiftChoice::First, LiftChoice::Last] {
            let c = complex(g, m).with_lift_choice(choice);
            let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
            assert!(ls.flatness_residual() < 1e-10);
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let f = TwistedCochain::from_values(
                0,
                (0..c.vertex_count()).map(|_| Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0))).collect(),
            );
            let ddf = differential(&ls, &differential(&ls, &f).unwrap()).unwrap();
            assert!(ddf.max_norm() < 1e-10);
        }
    }
}

#[test]
fn complex_rejects_mismatched_representation() {
    let c = complex(1, 1);
    let rho = good_rho(0, 3, GroupSpec::su2(), 1);
    assert!(LocalSystem::<f64>::new(&c, &rho).is_err());
}

#[test]
fn comparison_of_cocycles_and_coboundaries() {
    let rho = good_rho(1, 2, GroupSpec::su2(), 4);
    let c = complex(1, 2);
    let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
    let h = h1_basis::<f64>(&rho).unwrap();
    for l in 0..h.dim() {
        let phi = comparison(&ls, &h.cocycle(l)).unwrap();
        assert!(cocycle_residual(&ls, &phi).unwrap() < 1e-10);
    }
    let x = Vector3::new(0.4, -0.3, 1.1);
    let phi = comparison(&ls, &coboundary(&rho, &x).unwrap()).unwrap();
    let df = differential(&ls, &TwistedCochain::constant(c.vertex_count(), -x)).unwrap();
    assert!(phi.sub(&df).max_norm() < 1e-10);
}

#[test]
fn relative_comparison_is_relative_cocycle() {
    for (g, m) in SURFACES {
        let rho = good_rho(g, m, GroupSpec::su2(), 5);
        for choice in [LiftChoice::First, LiftChoice::Last] {
            let c = complex(g, m).with_lift_choice(choice);
            let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
            let rel = relative_group_basis::<f64>(&rho).unwrap();
            for k in 0..rel.dim() {
                let r = relative_comparison(&ls, &rel, &rel.vector(k)).unwrap();
                assert!(cocycle_residual(&ls, &r).unwrap() < 1e-10);
                assert!(boundary_residual(&ls, &r) < 1e-10, "({g},{m}) {choice:?}");
            }
        }
    }
}

/// Dense `H^1` dimension via SVD of the assembled differentials.
fn dense_h1_dim(ls: &LocalSystem<'_, f64>, relative: bool) -> usize {
    let c = ls.complex();
    let verts: Vec<usize> = (0..c.vertex_count()).filter(|&v| !relative || !c.is_boundary_vertex(v)).collect();
    let edges: Vec<usize> = (0..c.edge_count()).filter(|&e| !relative || !c.is_boundary_edge(e)).collect();
    let col_of_edge = |e: usize| edges.iter().position(|&x| x == e);
    let mut d0 = DMatrix::<f64>::zeros(3 * edges.len(), 3 * verts.len());
    for (j, &v) in verts.iter().enumerate() {
        for i in 0..3 {
            let mut f = TwistedCochain::zeros(c.vertex_count(), 0);
            f.set(v, Vector3::from_fn(|r, _| if r == i { 1.0 } else { 0.0 }));
            let df = differential(ls, &f).unwrap();
            for (k, &e) in edges.iter().enumerate() {
                d0.fixed_view_mut::<3, 1>(3 * k, 3 * j + i).copy_from(df.value(e));
            }
        }
    }
    let mut d1 = DMatrix::<f64>::zeros(3 * c.triangle_count(), 3 * edges.len());
    for (j, &e) in edges.iter().enumerate() {
        assert_eq!(col_of_edge(e), Some(j));
        for i in 0..3 {
            let mut phi = TwistedCochain::zeros(c.edge_count(), 1);
            phi.set(e, Vector3::from_fn(|r, _| if r == i { 1.0 } else { 0.0 }));
            let dphi = differential(ls, &phi).unwrap();
            for t in 0..c.triangle_count() {
                d1.fixed_view_mut::<3, 1>(3 * t, 3 * j + i).copy_from(dphi.value(t));
            }
        }
    }
    let cut = Cutoff::with_unit_floor(1e-9);
    3 * edges.len() - linalg::rank(&d1, cut) - linalg::rank(&d0, cut)
}

#[test]
fn tree_cotree_matches_dense_oracle() {
    for (g, m) in [(1, 1), (0, 3)] {
        let rho = good_rho(g, m, GroupSpec::su2(), 6);
        let c = complex(g, m);
        let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
        for relative in [false, true] {
            let h = cellular_h1(&ls, relative).unwrap();
            assert_eq!(h.dim(), dense_h1_dim(&ls, relative), "({g},{m}) relative={relative}");
            assert_eq!(h.dim(), 3 * (rho.presentation().rank() - 1));
        }
    }
}

#[test]
fn cellular_dimensions_all_surfaces() {
    for (g, m) in SURFACES {
        let rho = good_rho(g, m, GroupSpec::su2(), 7);
        let c = complex(g, m);
        let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
        let n = rho.presentation().rank();
        let abs = cellular_h1(&ls, false).unwrap();
        let rel = cellular_h1(&ls, true).unwrap();
        assert_eq!(abs.dim(), 3 * (n - 1));
        assert_eq!(rel.dim(), 3 * (n - 1));
        for r in &rel.basis {
            assert!(boundary_residual(&ls, r) < 1e-12);
        }
        // comparison cochains span the absolute cellular H^1
        let h = h1_basis::<f64>(&rho).unwrap();
        let coords = DMatrix::from_columns(
            &(0..h.dim())
                .map(|l| abs.class_coordinates(&ls, &comparison(&ls, &h.cocycle(l)).unwrap()).unwrap())
                .collect::<Vec<DVector<f64>>>(),
        );
        assert_eq!(linalg::rank(&coords, Cutoff::relative(1e-8)), abs.dim());
    }
}

#[test]
fn disc_has_empty_bases() {
    let p = SurfacePresentation::new(0, 1).unwrap();
    let rho = Representation::trivial(p, GroupSpec::su2());
    let c = SurfaceComplex::build(p);
    let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
    assert_eq!(cellular_h1(&ls, false).unwrap().dim(), 0);
    assert_eq!(cellular_h1(&ls, true).unwrap().dim(), 0);
    assert_eq!(duality_pairing(&ls).unwrap().dim(), 0);
}

#[test]
fn cup_pairing_descends_to_cohomology() {
    let rho = good_rho(1, 1, GroupSpec::su2(), 8);
    let c = complex(1, 1);
    let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
    let dual = duality_pairing(&ls).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = TwistedCochain::from_values(
        0,
        (0..c.vertex_count()).map(|_| Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0))).collect(),
    );
    let df = differential(&ls, &f).unwrap();
    let scale = linalg::max_abs(&dual.matrix);
    for k in 0..dual.dim() {
        for l in 0..dual.dim() {
            let shifted = dual.absolute[l].add(&df);
            let v = cup_pair(&ls, &dual.relative[k], &shifted).unwrap();
            assert!((v - dual.matrix[(k, l)]).abs() < 1e-9 * scale.max(1.0));
        }
    }
    // a non-cocycle is rejected
    let mut bad = dual.absolute[0].clone();
    bad.set(0, bad.value(0) + Vector3::new(1.0, 0.0, 0.0));
    assert!(cup_pair(&ls, &dual.relative[0], &bad).is_err());
}

#[test]
fn duality_is_nondegenerate_and_stable() {
    for (g, m) in SURFACES {
        let rho = good_rho(g, m, GroupSpec::su2(), 10);
        let c = complex(g, m);
        let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
        let dual = duality_pairing(&ls).unwrap();
        let n = rho.presentation().rank();
        assert_eq!(dual.dim(), 3 * (n - 1));
        assert!(dual.condition < tol::MAX_CONDITION);
        let scale = linalg::max_abs(&dual.matrix).max(1.0);
        // subdivision and lift choice leave D unchanged
        for other in [c.subdivide(), c.with_lift_choice(LiftChoice::Last)] {
            let ls2 = LocalSystem::<f64>::new(&other, &rho).unwrap();
            let d2 = duality_pairing(&ls2).unwrap();
            assert!(linalg::max_abs(&(&d2.matrix - &dual.matrix)) < 1e-9 * scale, "({g},{m})");
            assert!(linalg::max_abs(&(&d2.self_pairing - &dual.self_pairing)) < 1e-9 * scale);
        }
    }
}

#[test]
fn forget_matches_group_projection() {
    for (g, m) in SURFACES {
        let rho = good_rho(g, m, GroupSpec::su2(), 11);
        let c = complex(g, m);
        let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
        let dual = duality_pairing(&ls).unwrap();
        // H^* u of each relative class, with H orthonormal
        let rel = &dual.relative_group;
        let group = DMatrix::from_columns(
            &(0..dual.dim())
                .map(|k| dual.absolute_group.class_coordinates(&rel.absolute_part(&rel.vector(k))).unwrap())
                .collect::<Vec<_>>(),
        );
        assert!(linalg::max_abs(&(&dual.forget - &group)) < 1e-8, "({g},{m})");
    }
}

#[test]
fn sl2c_pairing_is_complex_bilinear() {
    let rho = good_rho(1, 1, GroupSpec::sl2c(), 12);
    let c = complex(1, 1);
    let ls = LocalSystem::<Complex64>::new(&c, &rho).unwrap();
    let dual = duality_pairing(&ls).unwrap();
    assert_eq!(dual.dim(), 3);
    let z = Complex64::new(0.3, 1.7);
    let scaled = dual.absolute[1].scaled(z);
    let v = cup_pair(&ls, &dual.relative[0], &scaled).unwrap();
    assert!((v - z * dual.matrix[(0, 1)]).norm() < 1e-9);
    let f64_ls = LocalSystem::<f64>::new(&c, &rho);
    assert!(f64_ls.is_err());
}

#[test]
fn gauge_equivariance_of_duality_matrix() {
    let rho = good_rho(1, 2, GroupSpec::su2(), 13);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let gel = random_group_element(GroupSpec::su2(), &mut rng);
    let c = complex(1, 2);
    let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
    let dual = duality_pairing(&ls).unwrap();
    // transport both group bases by Ad_g
    let conj = rho.conjugate(&gel);
    let n = rho.presentation().rank();
    let m = rho.presentation().punctures();
    let blk_abs = charpoisson::cohomology::block_adjoint::<f64>(rho.family(), &gel, n);
    let blk_rel = charpoisson::cohomology::block_adjoint::<f64>(rho.family(), &gel, n + m);
    let h = h1_basis::<f64>(&conj).unwrap();
    let abs = charpoisson::cohomology::H1Basis::from_columns(
        &blk_abs * &dual.absolute_group.basis,
        h.coboundaries.clone(),
        h.certificate.clone(),
    );
    let mut rel = relative_group_basis::<f64>(&conj).unwrap();
    rel.basis = &blk_rel * &dual.relative_group.basis;
    let ls2 = LocalSystem::<f64>::new(&c, &conj).unwrap();
    let d2 = charpoisson::cellular::duality_pairing_with_bases(&ls2, abs, rel).unwrap();
    assert!(linalg::max_abs(&(&d2.matrix - &dual.matrix)) < 1e-9);
}

#[test]
fn trivial_coefficients_give_betti_numbers() {
    // With Ad rho = 1 the coefficients split into three copies of R, so both
    // H^1 and compactly supported H^1 have dimension 3 * b_1 = 3(2g + m - 1).
    for (g, m) in SURFACES {
        let p = SurfacePresentation::new(g, m).unwrap();
        let rho = Representation::trivial(p, GroupSpec::su2());
        let c = complex(g, m);
        let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
        for relative in [false, true] {
            let h = cellular_h1_unchecked(&ls, relative, tol::TAU_RANK).unwrap();
            assert_eq!(h.dim(), 3 * (2 * g + m - 1), "({g},{m}) relative={relative}");
            if g + m <= 3 {
                assert_eq!(h.dim(), dense_h1_dim(&ls, relative));
            }
        }
    }
}

mod properties {
    use super::*;
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};

    fn random_zero_cochain(rng: &mut ChaCha8Rng, n: usize) -> TwistedCochain<f64> {
        TwistedCochain::from_values(0, (0..n).map(|_| Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0))).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn d_squared_vanishes_for_random_points(seed in 0u64..100_000, which in 0usize..4, sl2r in any::<bool>()) {
            let (g, m) = SURFACES[which];
            let spec = if sl2r { GroupSpec::sl2r() } else { GroupSpec::su2() };
            let rho = Representation::from_seed(SurfacePresentation::new(g, m).unwrap(), spec, seed);
            let c = complex(g, m);
            let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_zero_cochain(&mut rng, c.vertex_count());
            let ddf = differential(&ls, &differential(&ls, &f).unwrap()).unwrap();
            // dd f = (A01 A12 - A02) f2: roundoff in a product of two transports.
            let a = (0..c.edge_count()).map(|e| ls.transport(e).norm()).fold(1.0, f64::max);
            prop_assert!(ddf.max_norm() <= 1e-13 * a * a * f.max_norm());
        }

        #[test]
        fn pairing_kills_exact_relative_cochains(seed in 0u64..100_000, which in 0usize..4) {
            let (g, m) = SURFACES[which];
            let rho = good_rho(g, m, GroupSpec::su2(), seed);
            let c = complex(g, m);
            let ls = LocalSystem::<f64>::new(&c, &rho).unwrap();
            let dual = duality_pairing(&ls).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let mut f = random_zero_cochain(&mut rng, c.vertex_count());
            for v in 0..c.vertex_count() {
                if c.is_boundary_vertex(v) {
                    f.set(v, Vector3::zeros());
                }
            }
            let df = differential(&ls, &f).unwrap();
            for k in 0..dual.dim() {
                prop_assert!(cup_pair(&ls, &df, &dual.absolute[k]).unwrap().abs() < 1e-9);
            }
        }
    }
}
