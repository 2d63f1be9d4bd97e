//! Computation over reals, continuous functions and planar sets, with every
//! object encoded as a regular string function and costs metered by
//! second-order polynomials.

pub mod catalog;
pub mod cfun;
pub mod complexity;
pub mod encoding;
pub mod error;
pub mod expr;
pub mod ivp;
pub mod names;
pub mod real;
pub mod sets;
pub mod sopoly;

pub use cfun::{CFunName, Domain, LipName};
pub use encoding::{decode_dyadic, encode_dyadic, Dyadic};
pub use error::{Result, SondaError};
pub use expr::{parse_expr, Expr};
pub use names::{Name, PredName, SizeFn};
pub use real::RealName;
pub use sets::ExactSet;
pub use sopoly::{CostMeter, Meter, SecondOrderPolynomial};
