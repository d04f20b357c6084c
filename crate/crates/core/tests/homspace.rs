use std::sync::Arc;

use homfinsler::harness::suites::{admissible_members, case_space, excluded_members, s11_space, su2_space};
use homfinsler::homspace::catalog::{catalog, normalize_kl, CaseParams};
use homfinsler::homspace::curvature::{lie_sectional, u_tensor};
use homfinsler::homspace::{kvcl_check, s_curvature_hom, CosetSpace, InvariantABMetric, RiemannianHomMetric};
use homfinsler::minkowski::PhiFunction;
use homfinsler::numkernel::linalg::axpy;
use homfinsler::Error;
use proptest::prelude::*;

fn vec_n(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n).prop_filter("small", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.01)
}

fn phi_strategy() -> impl Strategy<Value = PhiFunction> {
    prop_oneof![
        (0.05f64..0.8).prop_map(PhiFunction::randers),
        (-0.3f64..0.3, 0.05f64..0.2).prop_map(|(c1, c2)| PhiFunction::polynomial(vec![1.0, c1, c2])),
    ]
}

fn member(i: usize) -> Arc<CosetSpace> {
    case_space(admissible_members()[i].clone()).unwrap()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[test]
fn catalog_lists_ten_families() {
    let c = catalog();
    assert_eq!(c.iter().map(|r| r.id).collect::<Vec<_>>(), (1..=10).collect::<Vec<u8>>());
    let admissible: Vec<u8> = c.iter().filter(|r| r.admissible).map(|r| r.id).collect();
    assert_eq!(admissible, vec![1, 2, 3, 4, 6, 7]);
    assert!(c.iter().filter(|r| !r.admissible).all(|r| r.exclusion.is_some()));
}

#[test]
fn sphere_and_aloff_wallach_dimensions() {
    let dim = |p: CaseParams| case_space(p).unwrap().n();
    assert_eq!(dim(CaseParams { case: 1, n: 1, ..CaseParams::default() }), 3);
    assert_eq!(dim(CaseParams { case: 1, n: 3, ..CaseParams::default() }), 7);
    assert_eq!(dim(CaseParams { case: 3, n: 1, ..CaseParams::default() }), 7);
    assert_eq!(dim(CaseParams { case: 6, k: 2, l: 1, ..CaseParams::default() }), 7);
    assert_eq!(dim(CaseParams { case: 7, ..CaseParams::default() }), 7);
}

#[test]
fn excluded_members_are_structural_errors() {
    for p in excluded_members() {
        match case_space(p.clone()) {
            Err(Error::Structural(_)) => {}
            other => panic!("{p:?} gave {:?}", other.map(|s| s.label.clone())),
        }
    }
    assert!(matches!(case_space(CaseParams { case: 11, ..CaseParams::default() }), Err(Error::Config(_))));
}

#[test]
fn kl_normalization() {
    assert_eq!(normalize_kl(2, 4).unwrap(), (2, 1));
    assert_eq!(normalize_kl(1, 3).unwrap(), (3, 1));
    assert!(normalize_kl(0, 0).is_err());
    // S_{k,l} and S_{-k,-l} are the same space
    assert_eq!(normalize_kl(-2, -1).unwrap(), normalize_kl(2, 1).unwrap());
}

#[test]
fn non_invariant_data_is_rejected() {
    let sp = s11_space().unwrap();
    let a = sp.block_inner(&[0.5, 0.7, 1.0, 0.85]).unwrap();
    // a vector of a root plane not fixed by h
    let v = sp.blocks[2].vectors[0].clone();
    assert!(matches!(
        InvariantABMetric::new(sp.clone(), a.clone(), v, PhiFunction::randers(0.2)),
        Err(Error::Invariance(_))
    ));
    // Randers with b >= 1 is not a Finsler metric
    let v = sp.default_v.clone().unwrap();
    let b = a.bilinear(&v, &v).sqrt();
    let v: Vec<f64> = v.iter().map(|x| 1.2 * x / b).collect();
    assert!(matches!(
        InvariantABMetric::new(sp, a, v, PhiFunction::randers(1.0)),
        Err(Error::Positivity { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // block metrics with v along m0 satisfy KVCL, so S vanishes on every ray
    #[test]
    fn kvcl_block_metrics_have_zero_s(
        which in 0usize..11,
        scalars in prop::collection::vec(0.3f64..1.5, 4),
        phi in phi_strategy(),
        y in vec_n(11),
    ) {
        let sp = member(which);
        let a = sp.block_inner(&scalars[..sp.blocks.len()]).unwrap();
        let v = sp.default_v.clone().unwrap();
        let b = a.bilinear(&v, &v).sqrt();
        let v: Vec<f64> = v.iter().map(|x| x / b).collect();
        let m = InvariantABMetric::new(sp.clone(), a, v, phi).unwrap();
        prop_assert!(kvcl_check(&m).pass);
        let y = &y[..sp.n()];
        prop_assume!(y.iter().any(|x| x.abs() > 0.05));
        prop_assert!(s_curvature_hom(&m, y).unwrap().abs() < 1e-12);
    }

    // S is positively homogeneous of degree one
    #[test]
    fn s_curvature_is_homogeneous(y in vec_n(7), lam in 0.2f64..5.0, tilt in 0.3f64..1.0) {
        let sp = s11_space().unwrap();
        let a = sp.block_inner(&[0.5, 1.1, 1.0, 0.85]).unwrap();
        let v = axpy(tilt, &sp.blocks[1].vectors[0], sp.default_v.as_ref().unwrap());
        let b = a.bilinear(&v, &v).sqrt();
        let v: Vec<f64> = v.iter().map(|x| x / b).collect();
        let m = InvariantABMetric::new(sp, a, v, PhiFunction::randers(0.4)).unwrap();
        prop_assert!(!kvcl_check(&m).pass);
        let ly: Vec<f64> = y.iter().map(|x| lam * x).collect();
        let s1 = s_curvature_hom(&m, &y).unwrap();
        let s2 = s_curvature_hom(&m, &ly).unwrap();
        prop_assert!((s2 - lam * s1).abs() < 1e-12 * (1.0 + s1.abs() * lam));
    }

    #[test]
    fn u_tensor_is_symmetric(x in vec_n(7), y in vec_n(7), c in prop::collection::vec(0.3f64..1.5, 4)) {
        let sp = s11_space().unwrap();
        let r = RiemannianHomMetric::new(sp.clone(), sp.block_inner(&c).unwrap()).unwrap();
        let u = u_tensor(&r, &x, &y).unwrap();
        let w = u_tensor(&r, &y, &x).unwrap();
        for i in 0..7 {
            prop_assert!((u[i] - w[i]).abs() < 1e-13);
        }
    }

    // K depends only on the plane
    #[test]
    fn sectional_curvature_depends_on_the_plane(
        x in vec_n(7),
        y in vec_n(7),
        c in prop::collection::vec(0.3f64..1.5, 4),
        m in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let det = m[0] * m[3] - m[1] * m[2];
        prop_assume!(det.abs() > 0.2);
        let sp = s11_space().unwrap();
        let r = RiemannianHomMetric::new(sp.clone(), sp.block_inner(&c).unwrap()).unwrap();
        let k = lie_sectional(&r, &x, &y);
        prop_assume!(k.is_ok());
        let k = k.unwrap();
        let x2: Vec<f64> = x.iter().zip(&y).map(|(p, q)| m[0] * p + m[1] * q).collect();
        let y2: Vec<f64> = x.iter().zip(&y).map(|(p, q)| m[2] * p + m[3] * q).collect();
        let k2 = lie_sectional(&r, &x2, &y2).unwrap();
        prop_assert!((k - k2).abs() < 1e-9 * (1.0 + k.abs()), "{k} vs {k2}");
    }

    // bi-invariant metric on a compact group: K = |[x, y]|^2 / 4 for orthonormal x, y
    #[test]
    fn bi_invariant_group_curvature(x in vec_n(3), y in vec_n(3)) {
        let sp = su2_space().unwrap();
        let a = sp.bi_invariant_inner();
        let area = a.bilinear(&x, &x) * a.bilinear(&y, &y) - a.bilinear(&x, &y).powi(2);
        prop_assume!(area > 1e-3);
        let r = RiemannianHomMetric::new(sp.clone(), a).unwrap();
        let br = sp.bracket_g(&x, &y);
        let want = 0.25 * sp.g.inner(&br, &br) / area;
        prop_assert!((lie_sectional(&r, &x, &y).unwrap() - want).abs() < 1e-12);
    }

    // normal homogeneous metric: K area = |[x,y]_m|^2 / 4 + |[x,y]_h|^2
    #[test]
    fn normal_homogeneous_curvature(x in vec_n(7), y in vec_n(7)) {
        let sp = s11_space().unwrap();
        let a = sp.bi_invariant_inner();
        let area = a.bilinear(&x, &x) * a.bilinear(&y, &y) - a.bilinear(&x, &y).powi(2);
        prop_assume!(area > 1e-3);
        let r = RiemannianHomMetric::new(sp.clone(), a).unwrap();
        let full = sp.bracket_g(&x, &y);
        let mpart = sp.split.embed(&sp.bracket_m(&x, &y));
        let hpart: Vec<f64> = full.iter().zip(&mpart).map(|(p, q)| p - q).collect();
        prop_assert!(dot(&hpart, &mpart).abs() < 1e-12);
        let want = (0.25 * sp.g.inner(&mpart, &mpart) + sp.g.inner(&hpart, &hpart)) / area;
        prop_assert!((lie_sectional(&r, &x, &y).unwrap() - want).abs() < 1e-11 * (1.0 + want));
    }
}
