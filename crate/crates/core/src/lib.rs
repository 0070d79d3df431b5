//! Numerics for the fourth moment of quadratic Dirichlet L-functions at the
//! central point: arithmetic tables, special functions, Gauss sums, Euler
//! products, residue bookkeeping and moment sweeps.

pub mod arith;
pub mod error;
pub mod euler;
pub mod gauss;
pub mod jet;
pub mod lfunc;
pub mod moments;
pub mod quad;
pub mod residue;
pub mod smooth;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
