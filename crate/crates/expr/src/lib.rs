//! Exact symbolic arithmetic for jet-space computations.
//!
//! Coefficients live in the field generated over ℚ by rational powers of
//! 2, 3 and 5 ([`Scalar`]). Expressions ([`Expr`]) are rational functions in
//! coordinates, function symbols with their derivative towers, `exp` atoms,
//! antiderivative atoms and roots, normalized so that zero is recognized
//! structurally.

mod atom;
mod expr;
mod parse;
mod poly;
mod rules;
mod scalar;

pub use atom::{atom, intern, sym, var_id, Atom, Symbol};
pub use expr::{EvalError, Expr};
pub use parse::{parse, ParseContext, ParseError};
pub use poly::{Mono, Poly};
pub use rules::RuleSet;
pub use scalar::{Radical, Scalar};

pub use num_rational::Rational64;
