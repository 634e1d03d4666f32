//! Polynomial-valued tensor fields with sparse component storage.

use std::collections::BTreeMap;

use super::shape::TensorShape;
use crate::error::{Error, Result};
use crate::exact::{Coords, Poly, Ring, Scalar};

#[derive(Clone, PartialEq, Eq)]
pub struct TensorField {
    shape: TensorShape,
    coords: Coords,
    comps: BTreeMap<usize, Poly>,
    ring: Ring,
}

impl TensorField {
    pub fn zero(shape: TensorShape, coords: Coords) -> TensorField {
        TensorField { shape, coords, comps: BTreeMap::new(), ring: Ring::Rational }
    }

    /// Builds a field from its value on each stored component.
    pub fn from_fn(shape: TensorShape, coords: Coords, mut f: impl FnMut(&[u8]) -> Poly) -> TensorField {
        let mut t = TensorField::zero(shape.clone(), coords);
        for (p, c) in shape.comps().iter().enumerate() {
            t.set(p, f(c));
        }
        t
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn set_ring(&mut self, ring: Ring) {
        self.ring = ring;
    }

    pub fn with_ring(mut self, ring: Ring) -> TensorField {
        self.ring = ring;
        self
    }

    /// Nonzero stored components.
    pub fn components(&self) -> &BTreeMap<usize, Poly> {
        &self.comps
    }

    pub fn get(&self, pos: usize) -> Poly {
        self.comps.get(&pos).cloned().unwrap_or_else(|| Poly::zero(self.coords.clone()))
    }

    pub fn get_ref(&self, pos: usize) -> Option<&Poly> {
        self.comps.get(&pos)
    }

    /// Value at an arbitrary full index, with the storage sign applied.
    pub fn get_full(&self, idx: &[u8]) -> Poly {
        match self.shape.canonicalize(idx) {
            Some((p, s)) => {
                let v = self.get(p);
                if s < 0 {
                    v.neg()
                } else {
                    v
                }
            }
            None => Poly::zero(self.coords.clone()),
        }
    }

    pub fn set(&mut self, pos: usize, p: Poly) {
        assert!(pos < self.shape.ncomps(), "component out of range");
        if p.is_zero() {
            self.comps.remove(&pos);
        } else {
            if self.ring == Ring::Rational && p.terms().values().any(|c| c.ring() == Ring::Sqrt3) {
                self.ring = Ring::Sqrt3;
            }
            self.comps.insert(pos, p);
        }
    }

    /// Sets the stored component for a full index (sign included).
    pub fn set_full(&mut self, idx: &[u8], p: Poly) -> Result<()> {
        let (pos, s) = self
            .shape
            .canonicalize(idx)
            .ok_or_else(|| Error::Shape(format!("index {idx:?} vanishes by antisymmetry")))?;
        self.set(pos, if s < 0 { p.neg() } else { p });
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.comps.values().filter_map(|p| p.degree()).max()
    }

    fn check_compatible(&self, o: &TensorField) -> Result<()> {
        if self.shape != o.shape {
            return Err(Error::Shape(format!("{:?} vs {:?}", self.shape, o.shape)));
        }
        if self.coords[..] != o.coords[..] {
            return Err(Error::Shape("coordinate lists differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &TensorField) -> Result<TensorField> {
        self.check_compatible(o)?;
        let mut t = self.clone();
        t.ring = self.ring.join(o.ring);
        for (p, v) in &o.comps {
            let nv = t.get(*p).add(v);
            t.set(*p, nv);
        }
        Ok(t)
    }

    pub fn sub(&self, o: &TensorField) -> Result<TensorField> {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    pub fn scale(&self, k: &Scalar) -> TensorField {
        let mut t = TensorField::zero(self.shape.clone(), self.coords.clone());
        t.ring = self.ring;
        for (p, v) in &self.comps {
            t.set(*p, v.scale(k));
        }
        t
    }

    /// Re-expresses all components over a different coordinate list.
    pub fn recoord(&self, coords: &Coords) -> Result<TensorField> {
        let mut t = TensorField::zero(self.shape.clone(), coords.clone());
        t.ring = self.ring;
        for (p, v) in &self.comps {
            t.set(*p, v.recoord(coords)?);
        }
        Ok(t)
    }

    /// Reinterprets the stored data under an equal-storage shape (for
    /// example to attach Young metadata).
    pub fn with_shape(&self, shape: TensorShape) -> Result<TensorField> {
        if shape != self.shape {
            return Err(Error::Shape(format!("{shape:?} has different storage than {:?}", self.shape)));
        }
        Ok(TensorField { shape, coords: self.coords.clone(), comps: self.comps.clone(), ring: self.ring })
    }

    pub fn map(&self, mut f: impl FnMut(&Poly) -> Poly) -> TensorField {
        let mut t = TensorField::zero(self.shape.clone(), self.coords.clone());
        t.ring = self.ring;
        for (p, v) in &self.comps {
            t.set(*p, f(v));
        }
        t
    }

    /// Partial derivative of every component.
    pub fn diff(&self, coord: &str) -> Result<TensorField> {
        let i = crate::exact::poly::index_of(&self.coords, coord)?;
        Ok(self.map(|p| p.diff_index(i)))
    }

    /// First nonzero component, for diagnostics.
    pub fn first_nonzero(&self) -> Option<(String, String)> {
        self.comps.iter().next().map(|(p, v)| {
            let idx: String = self.shape.comp(*p).iter().map(|i| i.to_string()).collect();
            (idx, v.to_string())
        })
    }
}

impl std::fmt::Debug for TensorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:?} over {:?}", self.shape, self.coords)?;
        for (p, v) in &self.comps {
            writeln!(f, "  {:?}: {}", self.shape.comp(*p).as_slice(), v)?;
        }
        Ok(())
    }
}
