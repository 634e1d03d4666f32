//! Exact componentwise calculus for free higher-spin gauge fields on flat
//! backgrounds: curvature operators, prepotentials, Hamiltonian forms and
//! boundary charge structures, all verified in rational arithmetic.

pub mod charges;
pub mod conformal3d;
pub mod diffop;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod io;
pub mod mixed22;
pub mod random;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
