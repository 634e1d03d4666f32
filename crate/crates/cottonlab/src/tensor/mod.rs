//! Tensor shapes, fields, Young projectors and the primitive calculus.

pub mod calc;
pub mod field;
pub mod ops;
pub mod shape;
pub mod young;

pub use field::TensorField;
pub use shape::{Block, Idx, Metric, Symmetry, TensorShape};
