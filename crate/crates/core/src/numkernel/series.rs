use super::linalg::DenseMatrix;
use super::scalar::Scalar;
use crate::error::{Error, Result};
use crate::liealg::LieAlgebra;

/// Stop once the next term's largest coefficient falls below this.
pub const SERIES_TOL: f64 = 1e-14;
pub const SERIES_MAX_TERMS: usize = 60;

/// Applies `A(X) = sum_{k>=0} (-ad X)^k / (k+1)!` to the columns of `cols`.
///
/// `adx` is the matrix of `ad X` in algebra coordinates. The series is summed
/// term by term, `T_{k+1} = -ad X T_k / (k+2)`, so only matrix-times-block
/// products are formed.
pub fn transport_columns<S: Scalar>(
    adx: &DenseMatrix<S>,
    cols: &DenseMatrix<S>,
    tol: f64,
) -> Result<DenseMatrix<S>> {
    let mut term = cols.clone();
    let mut sum = cols.clone();
    for k in 0..SERIES_MAX_TERMS {
        term = adx.matmul(&term).scale(-1.0 / (k as f64 + 2.0));
        let norm = term.max_magnitude();
        if !norm.is_finite() {
            return Err(Error::Divergence {
                terms: k + 1,
                last_norm: norm,
            });
        }
        sum = sum.add(&term);
        if norm < tol {
            return Ok(sum);
        }
    }
    Err(Error::Divergence {
        terms: SERIES_MAX_TERMS,
        last_norm: term.max_magnitude(),
    })
}

/// `A(X)` as a full matrix on the algebra, for `X` in algebra coordinates.
pub fn ad_transport<S: Scalar>(x: &[S], algebra: &LieAlgebra, tol: f64) -> Result<DenseMatrix<S>> {
    if x.len() != algebra.dim() {
        return Err(Error::Dimension(format!(
            "element has {} coordinates, algebra {} has dimension {}",
            x.len(),
            algebra.name(),
            algebra.dim()
        )));
    }
    let adx = algebra.ad_matrix(x);
    transport_columns(&adx, &DenseMatrix::identity(algebra.dim()), tol)
}
