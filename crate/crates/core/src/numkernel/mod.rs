//! Scalar arithmetic, jets, dense linear algebra, series and minimization.

pub mod jet;
pub mod linalg;
pub mod minimize;
pub mod par;
pub mod quadrature;
pub mod scalar;
pub mod series;

pub use jet::{jet_eval, layout, Jet, Layout};
pub use linalg::DenseMatrix;
pub use minimize::{minimize_on_spheres, minimize_over_flags, Flag, MinimizerConfig, SphereMin};
pub use par::map_indexed;
pub use quadrature::SphereRule;
pub use scalar::Scalar;
pub use series::{ad_transport, transport_columns};
