//! Exact differential geometry for generic 2-plane fields on 5-manifolds.

pub mod forms;
pub mod g2alg;
pub mod holonomy;
pub mod linalg;
pub mod models;
pub mod planefield;
pub mod riemann;
pub mod tensor;

pub use ambient_expr as expr;
