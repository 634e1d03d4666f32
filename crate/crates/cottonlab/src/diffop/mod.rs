//! Linear differential operators, bilinear integrands and bounded-degree
//! linear solving.

pub mod bilin;
pub mod op;
pub mod solve;

pub use bilin::{BilinForm, QForm};
pub use op::{LinDiffOp, RowBuilder};
pub use solve::{ansatz_monos, preimage, LinearSystem, Solution};
