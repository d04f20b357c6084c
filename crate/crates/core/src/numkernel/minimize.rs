//! Deterministic minimization over products of unit spheres.
//!
//! Sampling uses a randomly shifted Halton sequence pushed through Box-Muller
//! and normalized; the best samples are then polished by a best-improvement
//! coordinate search that renormalizes after every move.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linalg::norm;
use super::par::map_indexed;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinimizerConfig {
    /// Quasi-random samples drawn before refinement.
    pub samples: usize,
    /// Coordinate-search sweeps per refined start.
    pub refine_iters: usize,
    /// Stop refining once the step length drops below this.
    pub tol: f64,
    pub seed: u64,
    /// How many of the best samples are refined.
    pub starts: usize,
    /// Evaluate batches on the rayon pool when available.
    pub parallel: bool,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        MinimizerConfig {
            samples: 256,
            refine_iters: 60,
            tol: 1e-7,
            seed: 0x5eed,
            starts: 4,
            parallel: true,
        }
    }
}

/// A flag `(y, w)`: flagpole `y` and a transverse edge `w` of the 2-plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereMin {
    pub value: f64,
    /// One unit vector per sphere factor.
    pub point: Vec<Vec<f64>>,
    pub evaluations: usize,
}

const FIRST_PRIMES: [u64; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131,
];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Deterministic quasi-random points on `S^{d_1-1} x ... x S^{d_k-1}`.
pub struct SpherePointSet {
    dims: Vec<usize>,
    shift: Vec<f64>,
}

impl SpherePointSet {
    pub fn new(dims: &[usize], seed: u64) -> Self {
        let total: usize = dims.iter().sum();
        let nu = 2 * total.div_ceil(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..nu).map(|_| rng.random::<f64>()).collect();
        SpherePointSet {
            dims: dims.to_vec(),
            shift,
        }
    }

    pub fn point(&self, index: usize) -> Vec<Vec<f64>> {
        let nu = self.shift.len();
        let u: Vec<f64> = (0..nu)
            .map(|k| {
                let h = radical_inverse(index as u64 + 1, FIRST_PRIMES[k % FIRST_PRIMES.len()]);
                let v = (h + self.shift[k]).fract();
                v.clamp(1e-12, 1.0 - 1e-12)
            })
            .collect();
        let mut g = Vec::with_capacity(nu);
        for pair in u.chunks(2) {
            let r = (-2.0 * pair[0].ln()).sqrt();
            let t = 2.0 * std::f64::consts::PI * pair[1];
            g.push(r * t.cos());
            g.push(r * t.sin());
        }
        let mut out = Vec::with_capacity(self.dims.len());
        let mut off = 0;
        for &d in &self.dims {
            let mut v = g[off..off + d].to_vec();
            off += d;
            let nv = norm(&v);
            if nv < 1e-12 {
                v = vec![0.0; d];
                v[0] = 1.0;
            } else {
                v.iter_mut().for_each(|x| *x /= nv);
            }
            out.push(v);
        }
        out
    }
}

fn score(v: Option<f64>) -> f64 {
    match v {
        Some(x) if x.is_finite() => x,
        _ => f64::INFINITY,
    }
}

/// Minimizes `objective` over a product of unit spheres of the given
/// dimensions. Points where the objective returns `None` are skipped.
pub fn minimize_on_spheres<F>(objective: F, dims: &[usize], config: &MinimizerConfig) -> Result<SphereMin>
where
    F: Fn(&[Vec<f64>]) -> Option<f64> + Sync + Send,
{
    if dims.contains(&0) {
        return Err(Error::Dimension("sphere factor of dimension 0".into()));
    }
    let samples = config.samples.max(1);
    let pts = SpherePointSet::new(dims, config.seed);
    let scored: Vec<(f64, usize)> = map_indexed(samples, config.parallel, |i| {
        (score(objective(&pts.point(i))), i)
    });
    let mut evaluations = samples;
    let mut ranked = scored;
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    if !ranked[0].0.is_finite() {
        return Err(Error::Numeric("objective undefined at every sample".into()));
    }

    let ncoord: usize = dims.iter().sum();
    let mut best: Option<SphereMin> = None;
    for &(v0, idx) in ranked.iter().take(config.starts.max(1)) {
        if !v0.is_finite() {
            break;
        }
        let mut cur = pts.point(idx);
        let mut cur_v = v0;
        let mut step = 0.25;
        for _ in 0..config.refine_iters {
            if step < config.tol {
                break;
            }
            let moves: Vec<(f64, Vec<Vec<f64>>)> = map_indexed(2 * ncoord, config.parallel, |m| {
                let coord = m / 2;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let mut cand = cur.clone();
                let mut off = 0;
                for (f, &d) in dims.iter().enumerate() {
                    if coord < off + d {
                        cand[f][coord - off] += sign * step;
                        let nv = norm(&cand[f]);
                        cand[f].iter_mut().for_each(|x| *x /= nv);
                        break;
                    }
                    off += d;
                }
                (score(objective(&cand)), cand)
            });
            evaluations += moves.len();
            let (bv, bc) = moves
                .into_iter()
                .fold((f64::INFINITY, None), |acc, (v, c)| {
                    if v < acc.0 {
                        (v, Some(c))
                    } else {
                        acc
                    }
                });
            if bv < cur_v {
                cur_v = bv;
                cur = bc.unwrap();
            } else {
                step *= 0.5;
            }
        }
        if best.as_ref().is_none_or(|b| cur_v < b.value) {
            best = Some(SphereMin {
                value: cur_v,
                point: cur,
                evaluations: 0,
            });
        }
    }
    let mut best = best.unwrap();
    best.evaluations = evaluations;
    Ok(best)
}

/// Minimum of a flag function over `S^{n-1} x S^{n-1}`, skipping flags whose
/// edges are (numerically) parallel.
pub fn minimize_over_flags<F>(objective: F, n: usize, config: &MinimizerConfig) -> Result<(f64, Flag)>
where
    F: Fn(&Flag) -> f64 + Sync + Send,
{
    if n < 2 {
        return Err(Error::Dimension(format!(
            "flags need dimension >= 2, got {n}"
        )));
    }
    let res = minimize_on_spheres(
        |p| {
            let c: f64 = p[0].iter().zip(&p[1]).map(|(a, b)| a * b).sum();
            if 1.0 - c.abs() < 1e-9 {
                return None;
            }
            Some(objective(&Flag {
                y: p[0].clone(),
                w: p[1].clone(),
            }))
        },
        &[n, n],
        config,
    )?;
    let mut pts = res.point.into_iter();
    let y = pts.next().unwrap();
    let w = pts.next().unwrap();
    Ok((res.value, Flag { y, w }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_objective() {
        let (v, _) = minimize_over_flags(|_| 1.0, 3, &MinimizerConfig::default()).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn linear_objective_on_sphere() {
        let (v, f) = minimize_over_flags(|f| f.y[0], 4, &MinimizerConfig::default()).unwrap();
        assert!((v + 1.0).abs() < 1e-6, "v = {v}");
        assert!((f.y[0] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn dimension_one_has_no_planes() {
        assert!(matches!(
            minimize_over_flags(|_| 0.0, 1, &MinimizerConfig::default()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let obj = |f: &Flag| f.y[0] * f.w[1] + 0.3 * f.y[2];
        let cfg = MinimizerConfig {
            samples: 64,
            ..Default::default()
        };
        let a = minimize_over_flags(obj, 3, &cfg).unwrap();
        let b = minimize_over_flags(obj, 3, &cfg).unwrap();
        assert_eq!(a, b);
        let seq = MinimizerConfig {
            parallel: false,
            ..cfg
        };
        assert_eq!(minimize_over_flags(obj, 3, &seq).unwrap(), a);
    }

    #[test]
    fn single_sample_budget() {
        let cfg = MinimizerConfig {
            samples: 1,
            refine_iters: 0,
            ..Default::default()
        };
        let a = minimize_over_flags(|f| f.y[0], 3, &cfg).unwrap();
        let b = minimize_over_flags(|f| f.y[0], 3, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
