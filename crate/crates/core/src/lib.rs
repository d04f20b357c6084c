//! Flag curvature and S-curvature of invariant (α,β)-metrics on compact
//! homogeneous spaces, computed from first principles and cross-checked
//! against Lie-algebraic closed forms.
//!
//! The crate is layered bottom-up:
//!
//! * [`numkernel`]: jets, dense linear algebra, series, sphere quadrature and
//!   the flag minimizer.
//! * [`minkowski`]: (α,β)-norms on a single vector space.
//! * [`liealg`]: matrix realizations of `u(n)`, `su(n)`, `sp(n)` and sums.
//! * [`homspace`]: invariant metric data on coset spaces and the case catalog.
//! * [`chartcurv`]: spray, Riemann curvature and S-curvature in an
//!   exponential chart.
//! * [`harness`]: configs, reports and the command implementations behind the
//!   CLI.

// index loops mirror the tensor notation; `!(x > 0.0)` deliberately rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::suspicious_arithmetic_impl)]

pub mod chartcurv;
pub mod error;
pub mod harness;
pub mod homspace;
pub mod liealg;
pub mod minkowski;
pub mod numkernel;

pub use error::{Error, Result};
