//! Dense matrices over any [`Scalar`], plus real-only spectral helpers.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix<S = f64> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S> Index<(usize, usize)> for DenseMatrix<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for DenseMatrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Clone> DenseMatrix<S> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        Self::from_fn(r, c, |i, j| rows[i][j].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<T: Clone>(&self, f: impl Fn(&S) -> T) -> DenseMatrix<T> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_f64(m: &DenseMatrix<f64>) -> Self {
        m.map(|&x| S::from_f64(x))
    }

    pub fn values(&self) -> DenseMatrix<f64> {
        self.map(|x| x.value())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx].mul_add_assign(a, &other[(k, j)]);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    acc.mul_add_assign(a, x);
                }
                acc
            })
            .collect()
    }

    /// `u^T A w`.
    pub fn bilinear(&self, u: &[S], w: &[S]) -> S {
        dot(u, &self.matvec(w))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b)
                .collect(),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|x| x.scale(k))
    }

    pub fn scale_by(&self, k: &S) -> Self {
        self.map(|x| x.clone() * k)
    }

    /// Largest coefficient magnitude over all entries.
    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    pub fn symmetrize(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)].clone() + &self[(j, i)]).scale(0.5)
        })
    }

    /// LU factorization with partial pivoting on the real part.
    fn lu(&self) -> Result<(Self, Vec<usize>, f64)> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "square matrix required, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = a.data.iter().map(|x| x.value().abs()).fold(0.0, f64::max);
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, a[(i, k)].value().abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pv <= 1e-300 || pv <= scale * 1e-15 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let inv = a[(k, k)].recip();
            for i in (k + 1)..n {
                let f = a[(i, k)].clone() * &inv;
                for j in (k + 1)..n {
                    let t = f.clone() * &a[(k, j)];
                    a[(i, j)] = a[(i, j)].clone() - &t;
                }
                a[(i, k)] = f;
            }
        }
        Ok((a, perm, sign))
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[S]) -> Result<Vec<S>> {
        let (lu, perm, _) = self.lu()?;
        Ok(lu_solve(&lu, &perm, b))
    }

    pub fn solve_matrix(&self, b: &Self) -> Result<Self> {
        let (lu, perm, _) = self.lu()?;
        let cols: Vec<Vec<S>> = (0..b.cols).map(|j| lu_solve(&lu, &perm, &b.col(j))).collect();
        Ok(Self::from_fn(b.rows, b.cols, |i, j| cols[j][i].clone()))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve_matrix(&Self::identity(self.rows))
    }

    pub fn det(&self) -> Result<S> {
        match self.lu() {
            Ok((lu, _, sign)) => {
                let mut d = S::from_f64(sign);
                for k in 0..self.rows {
                    d = d * &lu[(k, k)];
                }
                Ok(d)
            }
            Err(Error::Singular) => Ok(S::zero()),
            Err(e) => Err(e),
        }
    }
}

/// Lower-triangular `L` with `L Lᵀ = m` for symmetric positive definite `m`.
pub fn cholesky<S: Scalar>(m: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
    let n = m.rows();
    let mut l = DenseMatrix::<S>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].clone();
        for k in 0..j {
            let t = l[(j, k)].clone() * &l[(j, k)];
            d = d - &t;
        }
        if !(d.value() > 0.0) {
            return Err(Error::Domain("matrix is not positive definite".into()));
        }
        let djj = d.sqrt();
        let inv = djj.recip();
        for i in (j + 1)..n {
            let mut s = m[(i, j)].clone();
            for k in 0..j {
                let t = l[(i, k)].clone() * &l[(j, k)];
                s = s - &t;
            }
            l[(i, j)] = s * &inv;
        }
        l[(j, j)] = djj;
    }
    Ok(l)
}

fn lu_solve<S: Scalar>(lu: &DenseMatrix<S>, perm: &[usize], b: &[S]) -> Vec<S> {
    let n = lu.rows;
    let mut y: Vec<S> = perm.iter().map(|&p| b[p].clone()).collect();
    for i in 0..n {
        for k in 0..i {
            let t = lu[(i, k)].clone() * &y[k];
            y[i] = y[i].clone() - &t;
        }
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let t = lu[(i, k)].clone() * &y[k];
            y[i] = y[i].clone() - &t;
        }
        y[i] = y[i].clone() / &lu[(i, i)];
    }
    y
}

pub fn dot<S: Scalar>(u: &[S], w: &[S]) -> S {
    assert_eq!(u.len(), w.len());
    let mut acc = S::zero();
    for (a, b) in u.iter().zip(w) {
        acc.mul_add_assign(a, b);
    }
    acc
}

pub fn norm(u: &[f64]) -> f64 {
    u.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect()
}

pub fn to_nalgebra(m: &DenseMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows, m.cols, &m.data)
}

pub fn from_nalgebra(m: &DMatrix<f64>) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Symmetric eigendecomposition: ascending eigenvalues and a matrix whose
/// columns are the matching orthonormal eigenvectors.
pub fn sym_eigen(m: &DenseMatrix<f64>) -> (Vec<f64>, DenseMatrix<f64>) {
    let n = m.rows();
    let eig = to_nalgebra(&m.symmetrize()).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DenseMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DenseMatrix<f64>) -> f64 {
    sym_eigen(m).0.first().copied().unwrap_or(f64::NAN)
}

/// Orthonormal basis (as columns) of the null space, with singular values
/// below `tol * max(1, sigma_max)` counted as zero.
pub fn nullspace(m: &DenseMatrix<f64>, tol: f64) -> DenseMatrix<f64> {
    let cols = m.cols();
    if m.rows() == 0 {
        return DenseMatrix::identity(cols);
    }
    // pad to at least square so that V^T from the SVD is complete
    let rows = m.rows().max(cols);
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    for i in 0..m.rows() {
        for j in 0..cols {
            a[(i, j)] = m[(i, j)];
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    let keep: Vec<usize> = (0..cols).filter(|&k| sv[k] <= cut).collect();
    DenseMatrix::from_fn(cols, keep.len(), |i, j| vt[(keep[j], i)])
}

/// Gram-Schmidt against an inner-product matrix `g`; drops dependent vectors.
pub fn orthonormalize(vectors: &[Vec<f64>], g: &DenseMatrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = g.bilinear(q, &w);
                w = axpy(-c, q, &w);
            }
        }
        let nn = g.bilinear(&w, &w);
        if nn > tol * tol {
            let s = 1.0 / nn.sqrt();
            out.push(w.iter().map(|x| x * s).collect());
        }
    }
    out
}

/// True if the symmetric matrix is positive definite (Cholesky succeeds).
pub fn is_spd(m: &DenseMatrix<f64>) -> bool {
    to_nalgebra(&m.symmetrize()).cholesky().is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix<f64> {
        let b = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        b.transpose()
            .matmul(&b)
            .add(&DenseMatrix::<f64>::identity(n).scale(0.5))
    }

    #[test]
    fn spd_solves_are_accurate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=20 {
            let a = random_spd(n, &mut rng);
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = a.solve(&b).unwrap();
            let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
            assert!(norm(&r) <= 1e-10 * norm(&b), "n = {n}");
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_spd(6, &mut rng);
        let (vals, v) = sym_eigen(&a);
        let vtv = v.transpose().matmul(&v);
        for i in 0..6 {
            for j in 0..6 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((vtv[(i, j)] - e).abs() < 1e-12);
            }
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let av = a.matmul(&v);
        for j in 0..6 {
            for i in 0..6 {
                assert!((av[(i, j)] - vals[j] * v[(i, j)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(a.solve(&[1.0, 1.0]), Err(Error::Singular));
        assert_eq!(a.det().unwrap(), 0.0);
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 0.0]]);
        let ns = nullspace(&a, 1e-10);
        assert_eq!(ns.cols(), 2);
        let prod = a.matmul(&ns);
        assert!(prod.max_magnitude() < 1e-12);
    }
}
