//! Field-level wrappers around the operator primitives.

use super::field::TensorField;
use super::ops;
use super::shape::{Metric, Symmetry, TensorShape};
use super::young;
use crate::error::{Error, Result};
use crate::exact::Coords;

/// Coordinates that carry tensor indices: all of them when the counts
/// match, otherwise the non-time coordinates in order.
pub fn index_vars(coords: &Coords, dim: usize) -> Result<Coords> {
    if coords.len() == dim {
        return Ok(coords.clone());
    }
    let v: Vec<String> = coords.iter().filter(|c| c.as_str() != "t").cloned().collect();
    if v.len() < dim {
        return Err(Error::Dimension(format!("{} spatial coordinates for dimension {dim}", v.len())));
    }
    let mut out = v[..dim].to_vec();
    let rest: Vec<String> = coords.iter().filter(|c| !out.contains(c)).cloned().collect();
    out.extend(rest);
    Ok(out.into())
}

fn vars(t: &TensorField) -> Result<Coords> {
    index_vars(t.coords(), t.shape().dim())
}

fn full_slot_shape(t: &TensorShape, slots: &[usize], alt: bool) -> TensorShape {
    if slots.len() == t.rank() && t.rank() > 1 {
        let sym = if alt {
            Symmetry::Blocks(vec![super::shape::Block::Anti(t.rank() as u8)])
        } else {
            Symmetry::Symmetric
        };
        TensorShape::new(t.dim(), t.metric(), sym, t.rank()).expect("valid")
    } else {
        TensorShape::new(t.dim(), t.metric(), Symmetry::None, t.rank()).expect("valid")
    }
}

pub fn symmetrize(t: &TensorField, slots: &[usize]) -> Result<TensorField> {
    let cod = full_slot_shape(t.shape(), slots, false);
    ops::symmetrize(t.shape(), slots, &cod, &vars(t)?)?.apply(t)
}

pub fn antisymmetrize(t: &TensorField, slots: &[usize]) -> Result<TensorField> {
    let cod = full_slot_shape(t.shape(), slots, true);
    ops::antisymmetrize(t.shape(), slots, &cod, &vars(t)?)?.apply(t)
}

/// Projection onto the Young diagram with the given row lengths (slots laid
/// out row after row).
pub fn young_project(t: &TensorField, rows: &[u8]) -> Result<TensorField> {
    let boxes: usize = rows.iter().map(|&r| r as usize).sum();
    if boxes != t.shape().rank() {
        return Err(Error::Shape(format!("diagram {rows:?} has {boxes} boxes, rank is {}", t.shape().rank())));
    }
    let cod = TensorShape::new(t.shape().dim(), t.shape().metric(), Symmetry::YoungRows(rows.to_vec()), boxes)?;
    let e = young::young_projector_rows(rows)?;
    ops::project(t.shape(), &e, &cod, &vars(t)?)?.apply(t)
}

/// Applies the projector of the field's own declared Young symmetry.
pub fn project_declared(t: &TensorField) -> Result<TensorField> {
    match young::shape_projector(t.shape())? {
        Some(e) => ops::project(t.shape(), &e, t.shape(), &vars(t)?)?.apply(t),
        None => Ok(t.clone()),
    }
}

pub fn grad(t: &TensorField) -> Result<TensorField> {
    ops::grad(t.shape(), &vars(t)?)?.apply(t)
}

pub fn div(t: &TensorField, slot: usize) -> Result<TensorField> {
    ops::div(t.shape(), slot, &vars(t)?)?.apply(t)
}

pub fn trace(t: &TensorField, a: usize, b: usize) -> Result<TensorField> {
    ops::trace(t.shape(), a, b, &vars(t)?)?.apply(t)
}

pub fn metric_insert(t: &TensorField) -> Result<TensorField> {
    ops::metric_insert(t.shape(), &vars(t)?)?.apply(t)
}

pub fn eps_contract(t: &TensorField, slots: &[usize]) -> Result<TensorField> {
    if t.shape().metric() != Metric::Euclidean {
        return Err(Error::Dimension("ε contraction is implemented for Euclidean shapes".into()));
    }
    ops::eps_contract(t.shape(), slots, &vars(t)?)?.apply(t)
}

pub fn gen_diff(t: &TensorField, n: usize) -> Result<TensorField> {
    ops::gen_diff(t.shape(), n, &vars(t)?)?.apply(t)
}
