use homfinsler::minkowski::{positivity_check, q_delta_phi, ABNormData, PhiFunction};
use homfinsler::numkernel::linalg::DenseMatrix;
use proptest::prelude::*;

fn spd(entries: &[f64], n: usize) -> DenseMatrix<f64> {
    let b = DenseMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
    b.transpose().matmul(&b).add(&DenseMatrix::identity(n).scale(0.5))
}

fn phi_strategy() -> impl Strategy<Value = PhiFunction> {
    prop_oneof![
        (0.0f64..0.8).prop_map(PhiFunction::randers),
        (-0.3f64..0.3, 0.0f64..0.2).prop_map(|(c1, c2)| PhiFunction::polynomial(vec![1.0, c1, c2])),
        Just(PhiFunction::riemannian()),
    ]
}

fn data_strategy() -> impl Strategy<Value = (ABNormData, Vec<f64>)> {
    (
        prop::collection::vec(-1.0f64..1.0, 9),
        prop::collection::vec(-1.0f64..1.0, 3),
        prop::collection::vec(-1.0f64..1.0, 3),
        phi_strategy(),
    )
        .prop_filter_map("degenerate", |(e, v, y, phi)| {
            let a = spd(&e, 3);
            let b = a.bilinear(&v, &v).sqrt();
            let ny = y.iter().map(|x| x * x).sum::<f64>().sqrt();
            if b < 0.1 || ny < 0.1 {
                return None;
            }
            let v: Vec<f64> = v.iter().map(|x| x / b).collect();
            Some((ABNormData::new(a, v, phi).ok()?, y))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn norm_is_positively_homogeneous((d, y) in data_strategy(), lam in 0.1f64..10.0) {
        let f = d.ab_eval(&y).unwrap();
        let ly: Vec<f64> = y.iter().map(|x| lam * x).collect();
        prop_assert!((d.ab_eval(&ly).unwrap() - lam * f).abs() <= 1e-12 * lam * f);
        prop_assert!(f > 0.0);
    }

    // g_y(y, y) = F(y)^2 and g_{λy} = g_y
    #[test]
    fn fundamental_tensor_is_homogeneous_of_degree_zero((d, y) in data_strategy(), lam in 0.2f64..5.0) {
        let f = d.ab_eval(&y).unwrap();
        let g = d.hessian(&y).unwrap();
        prop_assert!((g.g.bilinear(&y, &y) - f * f).abs() < 1e-11 * f * f);
        let ly: Vec<f64> = y.iter().map(|x| lam * x).collect();
        let gl = d.hessian(&ly).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((gl.g[(i, j)] - g.g[(i, j)]).abs() < 1e-10 * (1.0 + g.g[(i, j)].abs()));
            }
        }
    }

    // F = α + β: g_ij = (F/α)(a_ij - l_i l_j) + (l_i + b_i)(l_j + b_j), l_i = a_ij y^j / α
    #[test]
    fn randers_hessian_closed_form(
        e in prop::collection::vec(-1.0f64..1.0, 9),
        v in prop::collection::vec(-1.0f64..1.0, 3),
        y in prop::collection::vec(-1.0f64..1.0, 3),
        eps in 0.0f64..0.9,
    ) {
        let a = spd(&e, 3);
        let b = a.bilinear(&v, &v).sqrt();
        prop_assume!(b > 0.1 && y.iter().any(|x| x.abs() > 0.1));
        let v: Vec<f64> = v.iter().map(|x| x / b).collect();
        let d = ABNormData::new(a.clone(), v.clone(), PhiFunction::randers(eps)).unwrap();
        let alpha = a.bilinear(&y, &y).sqrt();
        let ay = a.matvec(&y);
        let av = a.matvec(&v);
        let f = d.ab_eval(&y).unwrap();
        let l: Vec<f64> = ay.iter().map(|x| x / alpha).collect();
        let bb: Vec<f64> = av.iter().map(|x| eps * x).collect();
        let g = d.hessian(&y).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = f / alpha * (a[(i, j)] - l[i] * l[j]) + (l[i] + bb[i]) * (l[j] + bb[j]);
                prop_assert!((g.g[(i, j)] - want).abs() < 1e-11 * (1.0 + want.abs()));
            }
        }
    }

    // for b < b_o the Hessian is positive definite everywhere
    #[test]
    fn admissible_norms_have_positive_hessians((d, y) in data_strategy()) {
        prop_assert!(positivity_check(&d.phi, d.b(), 401).pass);
        prop_assert!(d.hessian(&y).is_ok());
    }
}

#[test]
fn randers_positivity_boundary_is_unit_length() {
    // φ = 1 + εs is admissible on [-b, b] iff εb < 1
    for (eps, expect) in [(0.5, true), (0.99, true), (1.01, false), (2.0, false)] {
        let r = positivity_check(&PhiFunction::randers(eps), 1.0, 201);
        assert_eq!(r.pass, expect, "eps {eps}");
    }
    let r = positivity_check(&PhiFunction::randers(1.5), 1.0, 201);
    let w = r.witness.unwrap();
    assert!((w.s + 1.0).abs() < 1e-12);
    assert!((w.value + 0.5).abs() < 1e-12);
}

#[test]
fn convexity_criterion_boundary_for_quadratic_phi() {
    // φ = 1 + c s^2 on [-1, 1]: criterion 1 + 2c - 3c s^2, admissible iff -1/2 < c < 1
    for (c, expect) in [(-0.45, true), (-0.55, false), (0.95, true), (1.05, false)] {
        let r = positivity_check(&PhiFunction::polynomial(vec![1.0, 0.0, c]), 1.0, 201);
        assert_eq!(r.pass, expect, "c {c}");
    }
}

#[test]
fn riemannian_phi_has_vanishing_big_phi() {
    for s in [-0.9, -0.2, 0.0, 0.4, 0.8] {
        let r = q_delta_phi(&PhiFunction::riemannian(), s, 1.0, 5).unwrap();
        assert_eq!(r.q, 0.0);
        assert_eq!(r.big_phi, 0.0);
        assert_eq!(r.delta, 1.0);
    }
    let r = q_delta_phi(&PhiFunction::randers(0.3), 0.5, 1.0, 3).unwrap();
    assert!(r.big_phi.abs() > 1e-3);
}
