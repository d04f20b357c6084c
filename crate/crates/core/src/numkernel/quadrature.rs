//! Quadrature rules on the unit sphere `S^{n-1}`.

use super::linalg::{sym_eigen, DenseMatrix};
use super::minimize::SpherePointSet;
use std::f64::consts::PI;

/// `int_0^pi sin^p(psi) d psi`.
fn sine_power_integral(p: usize) -> f64 {
    match p {
        0 => PI,
        1 => 2.0,
        _ => sine_power_integral(p - 2) * (p as f64 - 1.0) / p as f64,
    }
}

/// Volume of the Euclidean unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface area of `S^{n-1}`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Gauss rule for `int_{-1}^{1} f(t) (1 - t^2)^a dt` (Golub-Welsch).
pub fn gauss_gegenbauer(m: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    let jac = DenseMatrix::from_fn(m, m, |i, j| {
        if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            (k * (k + 2.0 * a) / ((2.0 * k + 2.0 * a + 1.0) * (2.0 * k + 2.0 * a - 1.0))).sqrt()
        } else {
            0.0
        }
    });
    let (vals, vecs) = sym_eigen(&jac);
    let mu0 = sine_power_integral((2.0 * a + 1.0).round() as usize);
    let w = (0..m).map(|k| mu0 * vecs[(0, k)] * vecs[(0, k)]).collect();
    (vals, w)
}

/// Nodes and weights of a rule on `S^{n-1}` (weights sum to the area).
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Tensor-product Gauss rule in hyperspherical coordinates: `m` Gauss
    /// nodes per polar angle and `2m` trapezoid nodes in the azimuth.
    pub fn product_gauss(n: usize, m: usize) -> SphereRule {
        assert!(n >= 1 && m >= 1);
        if n == 1 {
            return SphereRule {
                dim: 1,
                nodes: vec![vec![1.0], vec![-1.0]],
                weights: vec![1.0, 1.0],
            };
        }
        // polar angle k carries sin^{n-2-k}
        let polar: Vec<(Vec<f64>, Vec<f64>)> = (0..n - 2)
            .map(|k| {
                let p = n - 2 - k;
                gauss_gegenbauer(m, (p as f64 - 1.0) / 2.0)
            })
            .collect();
        let naz = 2 * m;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut idx = vec![0usize; n - 2];
        loop {
            let mut prefix = 1.0;
            let mut w = 1.0;
            let mut x = vec![0.0; n];
            for (k, &i) in idx.iter().enumerate() {
                let t = polar[k].0[i];
                let s = (1.0 - t * t).max(0.0).sqrt();
                x[k] = prefix * t;
                prefix *= s;
                w *= polar[k].1[i];
            }
            for j in 0..naz {
                let phi = 2.0 * PI * (j as f64 + 0.5) / naz as f64;
                let mut p = x.clone();
                p[n - 2] = prefix * phi.cos();
                p[n - 1] = prefix * phi.sin();
                nodes.push(p);
                weights.push(w * 2.0 * PI / naz as f64);
            }
            // odometer over polar indices
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return SphereRule {
                        dim: n,
                        nodes,
                        weights,
                    };
                }
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// Equal-weight quasi-random rule.
    pub fn quasi_random(n: usize, count: usize, seed: u64) -> SphereRule {
        let set = SpherePointSet::new(&[n], seed);
        let w = sphere_area(n) / count as f64;
        SphereRule {
            dim: n,
            nodes: (0..count).map(|i| set.point(i).remove(0)).collect(),
            weights: vec![w; count],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        for n in 2..=7 {
            let r = SphereRule::product_gauss(n, 4);
            let s: f64 = r.weights.iter().sum();
            assert!((s - sphere_area(n)).abs() < 1e-12 * sphere_area(n), "n = {n}");
            assert!(r.nodes.iter().all(|p| (p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn low_degree_moments_are_exact() {
        // int x_1^2 x_n^2 over S^{n-1} = area / (n (n + 2))
        for n in 3..=6 {
            let r = SphereRule::product_gauss(n, 5);
            let q: f64 = r
                .nodes
                .iter()
                .zip(&r.weights)
                .map(|(p, w)| w * p[0] * p[0] * p[n - 1] * p[n - 1])
                .sum();
            let exact = sphere_area(n) / (n as f64 * (n as f64 + 2.0));
            assert!((q - exact).abs() < 1e-12, "n = {n}: {q} vs {exact}");
        }
    }

    #[test]
    fn legendre_rule() {
        let (t, w) = gauss_gegenbauer(3, 0.0);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!((t[2] - (0.6f64).sqrt()).abs() < 1e-14);
    }
}
