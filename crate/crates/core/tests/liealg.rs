use homfinsler::liealg::{
    ad_invariance_check, build_algebra, rank, root_plane_decomposition, AlgebraSpec, ReductiveSplit, Subalgebra,
};
use homfinsler::numkernel::DenseMatrix;
use proptest::prelude::*;

fn families() -> Vec<(&'static str, usize, usize)> {
    // name, dim, rank
    vec![
        ("su(2)", 3, 1),
        ("su(3)", 8, 2),
        ("u(2)", 4, 2),
        ("sp(1)", 3, 1),
        ("sp(2)", 10, 2),
        ("su(2)+R^2", 5, 3),
        ("u(3)", 9, 3),
    ]
}

#[test]
fn dimensions_ranks_and_identities() {
    for (name, dim, rk) in families() {
        let g = build_algebra(&AlgebraSpec::parse(name).unwrap()).unwrap();
        assert_eq!(g.dim(), dim, "{name}");
        assert_eq!(rank(&g, 7), rk, "{name}");
        assert!(g.jacobi_defect() < 1e-12, "{name}");
        assert!(g.invariance_defect() < 1e-12, "{name}");
    }
}

#[test]
fn unknown_algebra_names_are_config_errors() {
    assert!(AlgebraSpec::parse("so(3)").is_err());
    assert!(AlgebraSpec::parse("su(x)").is_err());
}

fn su3() -> homfinsler::liealg::LieAlgebra {
    build_algebra(&AlgebraSpec::Su(3)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric_and_jacobi(
        x in prop::collection::vec(-1.0f64..1.0, 8),
        y in prop::collection::vec(-1.0f64..1.0, 8),
        z in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let g = su3();
        let xy = g.bracket(&x, &y);
        let yx = g.bracket(&y, &x);
        for i in 0..8 {
            prop_assert!((xy[i] + yx[i]).abs() < 1e-13);
        }
        let a = g.bracket(&x, &g.bracket(&y, &z));
        let b = g.bracket(&y, &g.bracket(&z, &x));
        let c = g.bracket(&z, &g.bracket(&x, &y));
        for i in 0..8 {
            prop_assert!((a[i] + b[i] + c[i]).abs() < 1e-12);
        }
    }

    // <[x, y], z> = <x, [y, z]>
    #[test]
    fn form_is_ad_invariant(
        x in prop::collection::vec(-1.0f64..1.0, 8),
        y in prop::collection::vec(-1.0f64..1.0, 8),
        z in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let g = su3();
        let l = g.inner(&g.bracket(&x, &y), &z);
        let r = g.inner(&x, &g.bracket(&y, &z));
        prop_assert!((l - r).abs() < 1e-12);
    }

    #[test]
    fn matrix_coordinates_round_trip(x in prop::collection::vec(-2.0f64..2.0, 8)) {
        let g = su3();
        let back = g.coords_of(&g.matrix_of(&x));
        for i in 0..8 {
            prop_assert!((back[i] - x[i]).abs() < 1e-13);
        }
    }
}

#[test]
fn torus_complement_splits_into_root_planes() {
    let g = su3();
    let d1 = homfinsler::liealg::diagonal_element(&g, &[1.0, -1.0, 0.0]).unwrap();
    let d2 = homfinsler::liealg::diagonal_element(&g, &[0.0, 1.0, -1.0]).unwrap();
    let h = Subalgebra::new(&g, &[d1, d2]).unwrap();
    assert!(h.closure_defect(&g) < 1e-12);
    let split = ReductiveSplit::new(&g, &h, g.form()).unwrap();
    assert_eq!(split.dim_m(), 6);
    assert!(ad_invariance_check(&g, &split, &DenseMatrix::identity(6)).pass);
    let roots = root_plane_decomposition(&g, &h, &split).unwrap();
    assert!(roots.m0.is_empty());
    assert_eq!(roots.planes.len(), 3);
    assert_eq!(roots.dim(), 6);
}
