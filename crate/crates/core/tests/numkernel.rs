use homfinsler::liealg::{build_algebra, AlgebraSpec};
use homfinsler::numkernel::linalg::{to_nalgebra, DenseMatrix};
use homfinsler::numkernel::quadrature::sphere_area;
use homfinsler::numkernel::{ad_transport, jet_eval, minimize_on_spheres, MinimizerConfig, Scalar, SphereRule};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // f = sin(x) e^y + x^2 y / (1 + y^2)
    #[test]
    fn jet_partials_match_closed_forms(x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let j = jet_eval(
            |a| {
                let q = a[1].clone() * &a[1];
                let den = q.add_f64(1.0);
                a[0].sin() * &a[1].exp() + &(a[0].clone() * &a[0] * &a[1] / &den)
            },
            &[x, y],
            &[0, 1],
            2,
        )
        .unwrap();
        let d = 1.0 + y * y;
        let fx = x.cos() * y.exp() + 2.0 * x * y / d;
        let fy = x.sin() * y.exp() + x * x * (1.0 - y * y) / (d * d);
        let fxx = -x.sin() * y.exp() + 2.0 * y / d;
        let fxy = x.cos() * y.exp() + 2.0 * x * (1.0 - y * y) / (d * d);
        let fyy = x.sin() * y.exp() + x * x * (2.0 * y * y * y - 6.0 * y) / (d * d * d);
        for (got, want) in [
            (j.partial(&[0]), fx),
            (j.partial(&[1]), fy),
            (j.partial(&[0, 0]), fxx),
            (j.partial(&[0, 1]), fxy),
            (j.partial(&[1, 1]), fyy),
        ] {
            prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()), "{got} vs {want}");
        }
    }

    // ad X A(X) = I - exp(-ad X), checked against nalgebra's matrix exponential
    #[test]
    fn transport_series_matches_exponential(c in prop::collection::vec(-1.5f64..1.5, 3)) {
        let g = build_algebra(&AlgebraSpec::Su(2)).unwrap();
        let a = ad_transport(&c, &g, 1e-15).unwrap();
        let adx = g.ad_matrix(&c);
        let lhs = adx.matmul(&a);
        let e = to_nalgebra(&adx.scale(-1.0)).exp();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 } - e[(i, j)];
                prop_assert!((lhs[(i, j)] - want).abs() < 1e-12);
            }
        }
        // A(X) X = X
        let ax = a.matvec(&c);
        for i in 0..3 {
            prop_assert!((ax[i] - c[i]).abs() < 1e-13);
        }
    }

    // sum_q w_q <θ_q, B θ_q> = tr(B) |S^{n-1}| / n
    #[test]
    fn product_rule_integrates_quadratics(n in 2usize..6, entries in prop::collection::vec(-1.0f64..1.0, 36)) {
        let b = DenseMatrix::from_fn(n, n, |i, j| entries[i * 6 + j] + entries[j * 6 + i]);
        let rule = SphereRule::product_gauss(n, 4);
        let sum: f64 = rule.nodes.iter().zip(&rule.weights).map(|(t, w)| w * b.bilinear(t, t)).sum();
        let tr: f64 = (0..n).map(|i| b[(i, i)]).sum();
        prop_assert!((sum - tr * sphere_area(n) / n as f64).abs() < 1e-11);
    }

    #[test]
    fn linear_objective_minimum_is_minus_norm(c in prop::collection::vec(-2.0f64..2.0, 4)) {
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 0.1);
        let cfg = MinimizerConfig { samples: 64, refine_iters: 80, tol: 1e-10, ..MinimizerConfig::default() };
        let r = minimize_on_spheres(
            |p| Some(p[0].iter().zip(&c).map(|(a, b)| a * b).sum()),
            &[4],
            &cfg,
        )
        .unwrap();
        prop_assert!((r.value + norm).abs() < 1e-6 * norm, "{} vs {}", r.value, -norm);
    }
}

#[test]
fn sequential_and_parallel_minimizers_agree() {
    let f = |p: &[Vec<f64>]| Some(p[0][0] * p[0][1] + 0.3 * p[0][2] * p[0][2]);
    let base = MinimizerConfig { samples: 128, ..MinimizerConfig::default() };
    let par = minimize_on_spheres(f, &[3], &MinimizerConfig { parallel: true, ..base.clone() }).unwrap();
    let seq = minimize_on_spheres(f, &[3], &MinimizerConfig { parallel: false, ..base }).unwrap();
    assert_eq!(par, seq);
}

#[test]
fn jets_respect_scalar_value() {
    let j = jet_eval(|a| a[0].exp().ln(), &[0.7], &[0], 2).unwrap();
    assert!((j.value() - 0.7).abs() < 1e-15);
    assert!((j.partial(&[0]) - 1.0).abs() < 1e-15);
    assert!(j.partial(&[0, 0]).abs() < 1e-14);
}
