//! Matrix realizations of compact Lie algebras.
//!
//! Complex entries are embedded as 2x2 real blocks `[[a, -b], [b, a]]` and
//! quaternion entries as 4x4 left-multiplication blocks, so every algebra is a
//! space of real skew matrices. The bi-invariant inner product is
//! `<X, Y> = -tr(XY)` in the embedded representation; with this normalization
//! the standard su(2) triple `(E12 - E21)/2, i(E12 + E21)/2, i diag(1,-1)/2` is
//! orthonormal and satisfies `[X1, X2] = X3`. All built bases are orthonormal,
//! so the form matrix is the identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::linalg::{axpy, dot, norm, nullspace, orthonormalize, DenseMatrix};
use crate::numkernel::scalar::Scalar;

/// Scale of the bi-invariant form relative to `-tr(XY)` of the real embedding.
pub const FORM_CONSTANT: f64 = 1.0;

/// Tolerance for bracket-closure style checks.
pub const CLOSURE_TOL: f64 = 1e-12;

/// Role of a basis element, used to locate root planes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    /// Off-diagonal element supported on entries `(j, k)` and `(k, j)`.
    Root(usize, usize),
    /// Diagonal element of the standard torus.
    Cartan,
    /// Generator of an abelian summand.
    Abelian,
    Other,
}

/// Family description accepted by [`build_algebra`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraSpec {
    Su(usize),
    U(usize),
    Sp(usize),
    Abelian(usize),
    F4,
    Sum(Vec<AlgebraSpec>),
}

impl AlgebraSpec {
    /// Parses names such as `su(3)`, `u(2)`, `sp(2)+R`, `su(2)+R^2`, `f4`.
    pub fn parse(text: &str) -> Result<AlgebraSpec> {
        let parts: Vec<&str> = text.split('+').map(str::trim).collect();
        let mut out = Vec::new();
        for p in parts {
            let lower = p.to_ascii_lowercase();
            let spec = if lower == "r" {
                AlgebraSpec::Abelian(1)
            } else if let Some(k) = lower.strip_prefix("r^") {
                AlgebraSpec::Abelian(parse_count(k, p)?)
            } else if lower == "f4" {
                AlgebraSpec::F4
            } else if let Some(rest) = lower.strip_prefix("su(") {
                AlgebraSpec::Su(parse_count(rest.trim_end_matches(')'), p)?)
            } else if let Some(rest) = lower.strip_prefix("sp(") {
                AlgebraSpec::Sp(parse_count(rest.trim_end_matches(')'), p)?)
            } else if let Some(rest) = lower.strip_prefix("u(") {
                AlgebraSpec::U(parse_count(rest.trim_end_matches(')'), p)?)
            } else {
                return Err(Error::Config(format!("unknown algebra family '{p}'")));
            };
            out.push(spec);
        }
        Ok(if out.len() == 1 {
            out.pop().unwrap()
        } else {
            AlgebraSpec::Sum(out)
        })
    }
}

fn parse_count(s: &str, whole: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad size in algebra name '{whole}'")))
}

/// A real Lie algebra with an orthonormal basis for its bi-invariant form.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    basis: Vec<DenseMatrix<f64>>,
    kinds: Vec<BasisKind>,
    /// `c[(i * dim + j) * dim + k] = c^k_{ij}`.
    structure: Vec<f64>,
    form: DenseMatrix<f64>,
}

fn trace_product(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> f64 {
    let n = a.rows();
    let mut t = 0.0;
    for i in 0..n {
        for j in 0..n {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t
}

fn commutator(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> DenseMatrix<f64> {
    a.matmul(b).sub(&b.matmul(a))
}

impl LieAlgebra {
    /// Builds an algebra from real matrices that must be orthonormal for
    /// `-tr(XY)` and closed under the commutator.
    pub fn from_matrices(
        name: impl Into<String>,
        basis: Vec<DenseMatrix<f64>>,
        kinds: Vec<BasisKind>,
    ) -> Result<LieAlgebra> {
        let name = name.into();
        let dim = basis.len();
        assert_eq!(kinds.len(), dim);
        for i in 0..dim {
            for j in 0..=i {
                let g = -FORM_CONSTANT * trace_product(&basis[i], &basis[j]);
                let e = if i == j { 1.0 } else { 0.0 };
                if (g - e).abs() > 1e-12 {
                    return Err(Error::Structural(format!(
                        "{name}: basis not orthonormal at ({i}, {j}): {g}"
                    )));
                }
            }
        }
        let mut structure = vec![0.0; dim * dim * dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let c = commutator(&basis[i], &basis[j]);
                let mut recon = DenseMatrix::zeros(c.rows(), c.cols());
                for k in 0..dim {
                    let v = -FORM_CONSTANT * trace_product(&c, &basis[k]);
                    structure[(i * dim + j) * dim + k] = v;
                    structure[(j * dim + i) * dim + k] = -v;
                    recon = recon.add(&basis[k].scale(v));
                }
                if c.sub(&recon).max_magnitude() > 1e-10 {
                    return Err(Error::Structural(format!(
                        "{name}: span not closed under the bracket at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(LieAlgebra {
            name,
            dim,
            basis,
            kinds,
            structure,
            form: DenseMatrix::identity(dim),
        })
    }

    /// Abstract algebra from structure constants `c[i][j][k] = c^k_{ij}`, with
    /// the identity as its form. The form need not be invariant (useful for
    /// nilpotent test algebras).
    pub fn from_structure_constants(
        name: impl Into<String>,
        dim: usize,
        c: &[Vec<Vec<f64>>],
    ) -> LieAlgebra {
        let mut structure = vec![0.0; dim * dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    structure[(i * dim + j) * dim + k] = c[i][j][k];
                }
            }
        }
        LieAlgebra {
            name: name.into(),
            dim,
            basis: Vec::new(),
            kinds: vec![BasisKind::Other; dim],
            structure,
            form: DenseMatrix::identity(dim),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[DenseMatrix<f64>] {
        &self.basis
    }

    pub fn kinds(&self) -> &[BasisKind] {
        &self.kinds
    }

    pub fn form(&self) -> &DenseMatrix<f64> {
        &self.form
    }

    #[inline]
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    /// Matrix of `ad X` in basis coordinates: column `j` holds `[X, e_j]`.
    pub fn ad_matrix<S: Scalar>(&self, x: &[S]) -> DenseMatrix<S> {
        let d = self.dim;
        assert_eq!(x.len(), d);
        let mut out = DenseMatrix::<S>::zeros(d, d);
        for (i, xi) in x.iter().enumerate() {
            if xi.magnitude() == 0.0 {
                continue;
            }
            for j in 0..d {
                let base = (i * d + j) * d;
                for k in 0..d {
                    let c = self.structure[base + k];
                    if c != 0.0 {
                        out[(k, j)] = out[(k, j)].clone() + xi.scale(c);
                    }
                }
            }
        }
        out
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim;
        assert_eq!(x.len(), d, "dimension mismatch in bracket");
        assert_eq!(y.len(), d, "dimension mismatch in bracket");
        let mut out = vec![0.0; d];
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let base = (i * d + j) * d;
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.structure[base + k];
                }
            }
        }
        out
    }

    /// Bracket with dimension checking.
    pub fn try_bracket(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::Dimension(format!(
                "bracket in {} needs {} coordinates, got {} and {}",
                self.name,
                self.dim,
                x.len(),
                y.len()
            )));
        }
        Ok(self.bracket(x, y))
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.form.bilinear(x, y)
    }

    /// Real matrix of an element.
    pub fn matrix_of(&self, x: &[f64]) -> DenseMatrix<f64> {
        let n = self.basis[0].rows();
        let mut m = DenseMatrix::zeros(n, n);
        for (xi, b) in x.iter().zip(&self.basis) {
            if *xi != 0.0 {
                m = m.add(&b.scale(*xi));
            }
        }
        m
    }

    /// Coordinates of a matrix in the span of the basis.
    pub fn coords_of(&self, m: &DenseMatrix<f64>) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| -FORM_CONSTANT * trace_product(m, b))
            .collect()
    }

    /// Largest Jacobi-identity defect over basis triples.
    pub fn jacobi_defect(&self) -> f64 {
        let d = self.dim;
        let e = |i: usize| {
            let mut v = vec![0.0; d];
            v[i] = 1.0;
            v
        };
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let a = self.bracket(&e(i), &self.bracket(&e(j), &e(k)));
                    let b = self.bracket(&e(j), &self.bracket(&e(k), &e(i)));
                    let c = self.bracket(&e(k), &self.bracket(&e(i), &e(j)));
                    for t in 0..d {
                        worst = worst.max((a[t] + b[t] + c[t]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest defect of `B([z,x],y) + B(x,[z,y]) = 0` over basis triples.
    pub fn invariance_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for z in 0..d {
            for x in 0..d {
                for y in 0..d {
                    let v = self.structure_constant(z, x, y) + self.structure_constant(z, y, x);
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }

    /// Basis (rows) of the center.
    pub fn center(&self) -> Vec<Vec<f64>> {
        let d = self.dim;
        // x is central iff sum_i x_i c^k_{ij} = 0 for all j, k
        let m = DenseMatrix::from_fn(d * d, d, |r, i| {
            let (j, k) = (r / d, r % d);
            self.structure_constant(i, j, k)
        });
        let ns = nullspace(&m, 1e-10);
        (0..ns.cols()).map(|c| ns.col(c)).collect()
    }
}

fn complex_matrix(n: usize, entries: &[(usize, usize, f64, f64)]) -> DenseMatrix<f64> {
    let mut m = DenseMatrix::zeros(2 * n, 2 * n);
    for &(j, k, a, b) in entries {
        m[(2 * j, 2 * k)] += a;
        m[(2 * j, 2 * k + 1)] -= b;
        m[(2 * j + 1, 2 * k)] += b;
        m[(2 * j + 1, 2 * k + 1)] += a;
    }
    m
}

/// Coordinates of `sqrt(-1) diag(d)` in a realization of `su(n)` or `u(n)`.
pub fn diagonal_element(g: &LieAlgebra, d: &[f64]) -> Result<Vec<f64>> {
    let size = g.basis()[0].rows();
    if size != 2 * d.len() {
        return Err(Error::Dimension(format!(
            "{} does not act on C^{}",
            g.name(),
            d.len()
        )));
    }
    let entries: Vec<(usize, usize, f64, f64)> = d.iter().enumerate().map(|(k, x)| (k, k, 0.0, *x)).collect();
    let m = complex_matrix(d.len(), &entries);
    let x = g.coords_of(&m);
    if g.matrix_of(&x).sub(&m).max_magnitude() > 1e-12 {
        return Err(Error::Domain(format!("diag{d:?} is not an element of {}", g.name())));
    }
    Ok(x)
}

/// Quaternion product on `(1, i, j, k)` coordinates.
pub fn quat_mul(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    [
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

fn quat_conj(q: [f64; 4]) -> [f64; 4] {
    [q[0], -q[1], -q[2], -q[3]]
}

const QUAT_UNITS: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

fn quaternion_matrix(n: usize, entries: &[(usize, usize, [f64; 4])]) -> DenseMatrix<f64> {
    let mut m = DenseMatrix::zeros(4 * n, 4 * n);
    for &(j, k, q) in entries {
        for (c, unit) in QUAT_UNITS.iter().enumerate() {
            let img = quat_mul(q, *unit);
            for (r, val) in img.iter().enumerate() {
                m[(4 * j + r, 4 * k + c)] += val;
            }
        }
    }
    m
}

fn su_basis(n: usize, with_center: bool) -> (Vec<DenseMatrix<f64>>, Vec<BasisKind>) {
    let mut basis = Vec::new();
    let mut kinds = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            basis.push(complex_matrix(n, &[(j, k, 0.5, 0.0), (k, j, -0.5, 0.0)]));
            basis.push(complex_matrix(n, &[(j, k, 0.0, 0.5), (k, j, 0.0, 0.5)]));
            kinds.push(BasisKind::Root(j, k));
            kinds.push(BasisKind::Root(j, k));
        }
    }
    if with_center {
        let s = 1.0 / 2f64.sqrt();
        for k in 0..n {
            basis.push(complex_matrix(n, &[(k, k, 0.0, s)]));
            kinds.push(BasisKind::Cartan);
        }
    } else {
        for l in 1..n {
            let lf = l as f64;
            let s = 1.0 / (2.0 * (lf + lf * lf)).sqrt();
            let mut entries: Vec<(usize, usize, f64, f64)> = (0..l).map(|a| (a, a, 0.0, s)).collect();
            entries.push((l, l, 0.0, -lf * s));
            basis.push(complex_matrix(n, &entries));
            kinds.push(BasisKind::Cartan);
        }
    }
    (basis, kinds)
}

fn sp_basis(n: usize) -> (Vec<DenseMatrix<f64>>, Vec<BasisKind>) {
    let mut basis = Vec::new();
    let mut kinds = Vec::new();
    for k in 0..n {
        for (u, unit) in QUAT_UNITS.iter().enumerate().skip(1) {
            let q = unit.map(|x| 0.5 * x);
            basis.push(quaternion_matrix(n, &[(k, k, q)]));
            kinds.push(if u == 1 { BasisKind::Cartan } else { BasisKind::Other });
        }
    }
    let s = 1.0 / (2.0 * 2f64.sqrt());
    for j in 0..n {
        for k in (j + 1)..n {
            for unit in QUAT_UNITS {
                let q = unit.map(|x| s * x);
                let qc = quat_conj(q).map(|x| -x);
                basis.push(quaternion_matrix(n, &[(j, k, q), (k, j, qc)]));
                kinds.push(BasisKind::Root(j, k));
            }
        }
    }
    (basis, kinds)
}

fn abelian_basis(k: usize) -> (Vec<DenseMatrix<f64>>, Vec<BasisKind>) {
    let s = 1.0 / 2f64.sqrt();
    let basis = (0..k)
        .map(|i| {
            let mut m = DenseMatrix::zeros(2 * k, 2 * k);
            m[(2 * i, 2 * i + 1)] = -s;
            m[(2 * i + 1, 2 * i)] = s;
            m
        })
        .collect();
    (basis, vec![BasisKind::Abelian; k])
}

fn block_diag(parts: &[(Vec<DenseMatrix<f64>>, Vec<BasisKind>)]) -> (Vec<DenseMatrix<f64>>, Vec<BasisKind>) {
    let sizes: Vec<usize> = parts
        .iter()
        .map(|(b, _)| b.first().map(|m| m.rows()).unwrap_or(0))
        .collect();
    let total: usize = sizes.iter().sum();
    let mut basis = Vec::new();
    let mut kinds = Vec::new();
    let mut off = 0;
    for ((b, k), &sz) in parts.iter().zip(&sizes) {
        for m in b {
            basis.push(DenseMatrix::from_fn(total, total, |i, j| {
                if i >= off && i < off + sz && j >= off && j < off + sz {
                    m[(i - off, j - off)]
                } else {
                    0.0
                }
            }));
        }
        kinds.extend(k.iter().copied());
        off += sz;
    }
    (basis, kinds)
}

fn spec_name(spec: &AlgebraSpec) -> String {
    match spec {
        AlgebraSpec::Su(n) => format!("su({n})"),
        AlgebraSpec::U(n) => format!("u({n})"),
        AlgebraSpec::Sp(n) => format!("sp({n})"),
        AlgebraSpec::Abelian(1) => "R".into(),
        AlgebraSpec::Abelian(k) => format!("R^{k}"),
        AlgebraSpec::F4 => "f4".into(),
        AlgebraSpec::Sum(parts) => parts.iter().map(spec_name).collect::<Vec<_>>().join("+"),
    }
}

fn spec_basis(spec: &AlgebraSpec) -> Result<(Vec<DenseMatrix<f64>>, Vec<BasisKind>)> {
    Ok(match spec {
        AlgebraSpec::Su(n) if *n >= 2 => su_basis(*n, false),
        AlgebraSpec::U(n) if *n >= 1 => su_basis(*n, true),
        AlgebraSpec::Sp(n) if *n >= 1 => sp_basis(*n),
        AlgebraSpec::Abelian(k) if *k >= 1 => abelian_basis(*k),
        AlgebraSpec::F4 => {
            return Err(Error::NotRealized {
                family: "f4".into(),
                reason: "exceptional algebras appear only as catalog entries (cases 9 and 10)".into(),
            })
        }
        AlgebraSpec::Sum(parts) => {
            let built = parts.iter().map(spec_basis).collect::<Result<Vec<_>>>()?;
            block_diag(&built)
        }
        other => {
            return Err(Error::Config(format!(
                "unsupported algebra size {}",
                spec_name(other)
            )))
        }
    })
}

/// Realizes `u(n)`, `su(n)`, `sp(n)`, `R^k` and direct sums of them.
pub fn build_algebra(spec: &AlgebraSpec) -> Result<LieAlgebra> {
    let (basis, kinds) = spec_basis(spec)?;
    LieAlgebra::from_matrices(spec_name(spec), basis, kinds)
}

/// Unit coordinate vector.
pub fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

/// Rank via the centralizer of generic integer elements (minimum over three
/// draws with coefficients in `[-10, 10]`).
pub fn rank(g: &LieAlgebra, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..3)
        .map(|_| {
            let x: Vec<f64> = (0..g.dim()).map(|_| rng.random_range(-10..=10) as f64).collect();
            centralizer_dim(g, &x)
        })
        .min()
        .unwrap_or(0)
}

pub fn centralizer_dim(g: &LieAlgebra, x: &[f64]) -> usize {
    nullspace(&g.ad_matrix(x), 1e-9).cols()
}

/// Subalgebra given by a spanning set, stored as a form-orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    vectors: Vec<Vec<f64>>,
}

impl Subalgebra {
    pub fn new(g: &LieAlgebra, span: &[Vec<f64>]) -> Result<Subalgebra> {
        let vectors = orthonormalize(span, g.form(), 1e-10);
        let s = Subalgebra { vectors };
        let defect = s.closure_defect(g);
        if defect > CLOSURE_TOL * 10.0 {
            return Err(Error::Structural(format!(
                "span is not closed under the bracket (defect {defect:e})"
            )));
        }
        Ok(s)
    }

    pub fn zero() -> Subalgebra {
        Subalgebra { vectors: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Distance of `x` from the span.
    pub fn residual(&self, g: &LieAlgebra, x: &[f64]) -> f64 {
        let mut r = x.to_vec();
        for q in &self.vectors {
            r = axpy(-g.inner(q, &r), q, &r);
        }
        norm(&r)
    }

    pub fn closure_defect(&self, g: &LieAlgebra) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.vectors {
            for b in &self.vectors {
                worst = worst.max(self.residual(g, &g.bracket(a, b)));
            }
        }
        worst
    }
}

/// Largest subspace of `k` invariant under `ad(g)`.
pub fn maximal_ideal_in(g: &LieAlgebra, k: &Subalgebra) -> Vec<Vec<f64>> {
    let d = g.dim();
    let mut cur: Vec<Vec<f64>> = k.basis().to_vec();
    loop {
        if cur.is_empty() {
            return cur;
        }
        let r = cur.len();
        // coefficients c with (1 - P_I)[e_i, sum c_a I_a] = 0 for all i
        let mut rows = Vec::new();
        for i in 0..d {
            let imgs: Vec<Vec<f64>> = cur.iter().map(|q| g.bracket(&unit(d, i), q)).collect();
            let resid: Vec<Vec<f64>> = imgs
                .iter()
                .map(|x| {
                    let mut y = x.clone();
                    for q in &cur {
                        y = axpy(-g.inner(q, &y), q, &y);
                    }
                    y
                })
                .collect();
            for t in 0..d {
                rows.push((0..r).map(|a| resid[a][t]).collect::<Vec<f64>>());
            }
        }
        let ns = nullspace(&DenseMatrix::from_rows(&rows), 1e-9);
        if ns.cols() == r {
            return cur;
        }
        let next: Vec<Vec<f64>> = (0..ns.cols())
            .map(|c| {
                let mut v = vec![0.0; d];
                for a in 0..r {
                    v = axpy(ns[(a, c)], &cur[a], &v);
                }
                v
            })
            .collect();
        cur = orthonormalize(&next, g.form(), 1e-10);
    }
}

/// `g = h + m` with `m` the orthogonal complement of `h` for a given form.
#[derive(Clone, Debug)]
pub struct ReductiveSplit {
    h: Vec<Vec<f64>>,
    m: Vec<Vec<f64>>,
    /// Rows map algebra coordinates to `m` coordinates (projection along `h`).
    pr_m: DenseMatrix<f64>,
    pr_h: DenseMatrix<f64>,
}

impl ReductiveSplit {
    /// Complement of `h` orthogonal for the SPD form `inner` on `g`.
    pub fn new(g: &LieAlgebra, h: &Subalgebra, inner: &DenseMatrix<f64>) -> Result<ReductiveSplit> {
        let d = g.dim();
        let m = if h.dim() == 0 {
            (0..d).map(|i| unit(d, i)).collect()
        } else {
            let rows: Vec<Vec<f64>> = h.basis().iter().map(|q| inner.matvec(q)).collect();
            let ns = nullspace(&DenseMatrix::from_rows(&rows), 1e-10);
            let cols: Vec<Vec<f64>> = (0..ns.cols()).map(|c| ns.col(c)).collect();
            orthonormalize(&cols, inner, 1e-10)
        };
        Self::with_basis(g, h, m)
    }

    /// Uses an explicit basis of a complement to `h`.
    pub fn with_basis(g: &LieAlgebra, h: &Subalgebra, m: Vec<Vec<f64>>) -> Result<ReductiveSplit> {
        let d = g.dim();
        if h.dim() + m.len() != d {
            return Err(Error::Dimension(format!(
                "dim h + dim m = {} + {} != {d}",
                h.dim(),
                m.len()
            )));
        }
        let full = DenseMatrix::from_fn(d, d, |i, j| {
            if j < h.dim() {
                h.basis()[j][i]
            } else {
                m[j - h.dim()][i]
            }
        });
        let inv = full
            .inverse()
            .map_err(|_| Error::Structural("h and m do not span g".into()))?;
        let nh = h.dim();
        let pr_h = DenseMatrix::from_fn(nh, d, |i, j| inv[(i, j)]);
        let pr_m = DenseMatrix::from_fn(m.len(), d, |i, j| inv[(nh + i, j)]);
        let split = ReductiveSplit {
            h: h.basis().to_vec(),
            m,
            pr_m,
            pr_h,
        };
        let defect = split.reductivity_defect(g);
        if defect > 1e-10 {
            return Err(Error::Invariance(format!(
                "[h, m] is not contained in m (defect {defect:e})"
            )));
        }
        Ok(split)
    }

    pub fn dim_m(&self) -> usize {
        self.m.len()
    }

    pub fn dim_h(&self) -> usize {
        self.h.len()
    }

    pub fn h_basis(&self) -> &[Vec<f64>] {
        &self.h
    }

    pub fn m_basis(&self) -> &[Vec<f64>] {
        &self.m
    }

    /// Algebra coordinates of an `m`-coordinate vector.
    pub fn embed(&self, y: &[f64]) -> Vec<f64> {
        let d = self.pr_m.cols();
        let mut out = vec![0.0; d];
        for (c, b) in y.iter().zip(&self.m) {
            out = axpy(*c, b, &out);
        }
        out
    }

    /// `m` coordinates of `pr_m(x)`.
    pub fn project_m(&self, x: &[f64]) -> Vec<f64> {
        self.pr_m.matvec(x)
    }

    pub fn project_h(&self, x: &[f64]) -> Vec<f64> {
        self.pr_h.matvec(x)
    }

    pub fn pr_m_matrix(&self) -> &DenseMatrix<f64> {
        &self.pr_m
    }

    /// Inclusion `m -> g` as a `dim g x dim m` matrix.
    pub fn inclusion_matrix(&self) -> DenseMatrix<f64> {
        DenseMatrix::from_fn(self.pr_m.cols(), self.m.len(), |i, j| self.m[j][i])
    }

    /// `[y1, y2]_m` for `m`-coordinate vectors.
    pub fn bracket_m(&self, g: &LieAlgebra, y1: &[f64], y2: &[f64]) -> Vec<f64> {
        self.project_m(&g.bracket(&self.embed(y1), &self.embed(y2)))
    }

    fn reductivity_defect(&self, g: &LieAlgebra) -> f64 {
        let mut worst: f64 = 0.0;
        for z in &self.h {
            for x in &self.m {
                let b = g.bracket(z, x);
                for v in self.project_h(&b) {
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }
}

/// Outcome of an `ad(h)`-invariance test, with the worst basis triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub pass: bool,
    pub worst: f64,
    /// `(z in h-basis, x, y in m-basis)`.
    pub triple: Option<(usize, usize, usize)>,
}

/// Checks `<[z,x]_m, y> + <x, [z,y]_m> = 0` for an inner product on `m`.
pub fn ad_invariance_check(g: &LieAlgebra, split: &ReductiveSplit, inner: &DenseMatrix<f64>) -> InvarianceReport {
    let n = split.dim_m();
    let mut worst: f64 = 0.0;
    let mut triple = None;
    for (zi, z) in split.h_basis().iter().enumerate() {
        let adz = DenseMatrix::from_fn(n, n, |r, c| {
            split.project_m(&g.bracket(z, &split.m_basis()[c]))[r]
        });
        let s = inner.matmul(&adz);
        for x in 0..n {
            for y in 0..n {
                let v = (s[(y, x)] + s[(x, y)]).abs();
                if v > worst {
                    worst = v;
                    triple = Some((zi, x, y));
                }
            }
        }
    }
    InvarianceReport {
        pass: worst <= 1e-10,
        worst,
        triple,
    }
}

/// A root plane of `m` with its label `e_i - e_j` (0-based indices).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPlane {
    pub root: (usize, usize),
    /// Two `m`-coordinate vectors spanning the plane.
    pub basis: [Vec<f64>; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPlaneDecomp {
    /// `m`-coordinate basis of the toral part of `m`.
    pub m0: Vec<Vec<f64>>,
    pub planes: Vec<RootPlane>,
}

impl RootPlaneDecomp {
    /// Orthogonal projector (for the bi-invariant form) onto block `i`, where
    /// block 0 is `m0` and block `p + 1` is plane `p`.
    pub fn projector(&self, i: usize) -> DenseMatrix<f64> {
        let vecs: Vec<&Vec<f64>> = if i == 0 {
            self.m0.iter().collect()
        } else {
            self.planes[i - 1].basis.iter().collect()
        };
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |r, c| vecs.iter().map(|v| v[r] * v[c]).sum())
    }

    pub fn dim(&self) -> usize {
        self.m0
            .first()
            .map(|v| v.len())
            .or_else(|| self.planes.first().map(|p| p.basis[0].len()))
            .unwrap_or(0)
    }

    pub fn blocks(&self) -> usize {
        1 + self.planes.len()
    }
}

/// Decomposes `m` into its toral part and the root planes of `su(3)`/`u(3)`.
/// Requires an `m` basis orthonormal for the bi-invariant form.
pub fn root_plane_decomposition(
    g: &LieAlgebra,
    t: &Subalgebra,
    split: &ReductiveSplit,
) -> Result<RootPlaneDecomp> {
    let d = g.dim();
    let roots: Vec<usize> = (0..d)
        .filter(|&i| matches!(g.kinds()[i], BasisKind::Root(..)))
        .collect();
    if roots.is_empty() {
        return Err(Error::Precondition(format!(
            "{} has no root-labelled basis",
            g.name()
        )));
    }
    for x in t.basis() {
        if roots.iter().any(|&i| x[i].abs() > 1e-12) {
            return Err(Error::Precondition(
                "unsupported torus: generators must be diagonal".into(),
            ));
        }
    }
    let mut planes: Vec<RootPlane> = Vec::new();
    for &i in &roots {
        let BasisKind::Root(a, b) = g.kinds()[i] else { unreachable!() };
        if planes.iter().any(|p| p.root == (a, b)) {
            continue;
        }
        let pair: Vec<usize> = roots
            .iter()
            .copied()
            .filter(|&j| g.kinds()[j] == BasisKind::Root(a, b))
            .collect();
        if pair.len() != 2 {
            return Err(Error::Precondition("root spaces must be 2-dimensional".into()));
        }
        planes.push(RootPlane {
            root: (a, b),
            basis: [split.project_m(&unit(d, pair[0])), split.project_m(&unit(d, pair[1]))],
        });
    }
    let cartan: Vec<Vec<f64>> = (0..d)
        .filter(|&i| matches!(g.kinds()[i], BasisKind::Cartan))
        .map(|i| unit(d, i))
        .collect();
    let rows: Vec<Vec<f64>> = t.basis().to_vec();
    let m0: Vec<Vec<f64>> = if rows.is_empty() {
        cartan.clone()
    } else {
        // Cartan combinations orthogonal to t
        let a = DenseMatrix::from_fn(rows.len(), cartan.len(), |r, c| dot(&rows[r], &cartan[c]));
        let ns = nullspace(&a, 1e-10);
        (0..ns.cols())
            .map(|c| {
                let mut v = vec![0.0; d];
                for (k, cv) in cartan.iter().enumerate() {
                    v = axpy(ns[(k, c)], cv, &v);
                }
                v
            })
            .collect()
    };
    let m0 = orthonormalize(&m0, g.form(), 1e-10)
        .iter()
        .map(|v| split.project_m(v))
        .collect();
    Ok(RootPlaneDecomp { m0, planes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn su(n: usize) -> LieAlgebra {
        build_algebra(&AlgebraSpec::Su(n)).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(su(2).dim(), 3);
        assert_eq!(su(3).dim(), 8);
        assert_eq!(build_algebra(&AlgebraSpec::U(3)).unwrap().dim(), 9);
        assert_eq!(build_algebra(&AlgebraSpec::Sp(2)).unwrap().dim(), 10);
        assert_eq!(build_algebra(&AlgebraSpec::Sp(1)).unwrap().dim(), 3);
    }

    #[test]
    fn su2_is_cyclic() {
        let g = su(2);
        assert!((g.structure_constant(0, 1, 2) - 1.0).abs() < 1e-15);
        assert!((g.structure_constant(1, 2, 0) - 1.0).abs() < 1e-15);
        assert!((g.structure_constant(2, 0, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sp1_matches_su2() {
        let g = build_algebra(&AlgebraSpec::Sp(1)).unwrap();
        assert!((g.structure_constant(0, 1, 2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn center_of_u3() {
        let g = build_algebra(&AlgebraSpec::U(3)).unwrap();
        assert_eq!(g.center().len(), 1);
        assert_eq!(su(3).center().len(), 0);
    }

    #[test]
    fn parse_names() {
        assert_eq!(AlgebraSpec::parse("su(3)").unwrap(), AlgebraSpec::Su(3));
        assert_eq!(
            AlgebraSpec::parse("sp(2)+R").unwrap(),
            AlgebraSpec::Sum(vec![AlgebraSpec::Sp(2), AlgebraSpec::Abelian(1)])
        );
        assert!(matches!(
            build_algebra(&AlgebraSpec::parse("f4+R").unwrap()),
            Err(Error::NotRealized { .. })
        ));
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&su(3), 1), 2);
        assert_eq!(rank(&build_algebra(&AlgebraSpec::U(3)).unwrap(), 1), 3);
        assert_eq!(rank(&build_algebra(&AlgebraSpec::Sp(2)).unwrap(), 1), 2);
    }

    #[test]
    fn su3_over_su2_split() {
        let g = su(3);
        // upper-left su(2): root (0,1) pair and H1
        let h = Subalgebra::new(&g, &[unit(8, 0), unit(8, 1), unit(8, 6)]).unwrap();
        let split = ReductiveSplit::new(&g, &h, g.form()).unwrap();
        assert_eq!(split.dim_m(), 5);
    }

    #[test]
    fn ideals() {
        let g = su(2);
        let k = Subalgebra::new(&g, &[unit(3, 0)]).unwrap();
        assert!(maximal_ideal_in(&g, &k).is_empty());
        let g = build_algebra(&AlgebraSpec::parse("su(2)+R").unwrap()).unwrap();
        let k = Subalgebra::new(&g, &[unit(4, 3)]).unwrap();
        assert_eq!(maximal_ideal_in(&g, &k).len(), 1);
    }
}
