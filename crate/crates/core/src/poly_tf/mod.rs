//! Polynomial and rational transfer-function algebra in the Laplace variable.
//!
//! Coefficients are always in ascending powers of `s`. Nothing in this module
//! cancels poles against zeros.

mod polynomial;
mod roots;
mod transfer;

pub use polynomial::Polynomial;
pub use transfer::{log_grid, FrequencyPoint, TransferFunction};
