//! Permutations and Young projectors as group-algebra elements acting on
//! index slots by `(g·T)(i) = T(i ∘ g)`.

use std::collections::HashMap;

use smallvec::SmallVec;

use super::shape::{conjugate, Symmetry, TensorShape};
use crate::error::{Error, Result};
use crate::exact::Rat;

pub type Perm = SmallVec<[u8; 12]>;

pub fn identity(n: usize) -> Perm {
    (0..n as u8).collect()
}

/// `(g ∘ h)[k] = g[h[k]]`.
pub fn compose(g: &[u8], h: &[u8]) -> Perm {
    h.iter().map(|&k| g[k as usize]).collect()
}

pub fn inverse(g: &[u8]) -> Perm {
    let mut out: Perm = SmallVec::from_elem(0, g.len());
    for (k, &v) in g.iter().enumerate() {
        out[v as usize] = k as u8;
    }
    out
}

pub fn sign(g: &[u8]) -> i64 {
    let mut seen = vec![false; g.len()];
    let mut s = 1;
    for i in 0..g.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = g[j] as usize;
            len += 1;
        }
        if len % 2 == 0 {
            s = -s;
        }
    }
    s
}

/// Applies `g` to a full index: `(i ∘ g)[k] = i[g[k]]`.
pub fn act(idx: &[u8], g: &[u8]) -> SmallVec<[u8; 12]> {
    g.iter().map(|&k| idx[k as usize]).collect()
}

/// All permutations of `n` slots that only move the positions in `slots`.
pub fn permutations_of(n: usize, slots: &[usize]) -> Vec<Perm> {
    fn rec(k: usize, vals: &mut Vec<usize>, slots: &[usize], base: &Perm, out: &mut Vec<Perm>) {
        if k == vals.len() {
            let mut p = base.clone();
            for (s, v) in slots.iter().zip(vals.iter()) {
                p[*s] = *v as u8;
            }
            out.push(p);
            return;
        }
        for j in k..vals.len() {
            vals.swap(k, j);
            rec(k + 1, vals, slots, base, out);
            vals.swap(k, j);
        }
    }
    let mut out = Vec::new();
    let mut vals = slots.to_vec();
    rec(0, &mut vals, slots, &identity(n), &mut out);
    out
}

/// Element of the group algebra of `S_n`.
#[derive(Clone, Debug, Default)]
pub struct GroupAlgebra {
    pub n: usize,
    pub terms: HashMap<Perm, Rat>,
}

impl GroupAlgebra {
    pub fn one(n: usize) -> GroupAlgebra {
        let mut terms = HashMap::new();
        terms.insert(identity(n), Rat::ONE);
        GroupAlgebra { n, terms }
    }

    /// Sum over the product of symmetric groups on each slot set, with signs
    /// when `alternating`.
    pub fn young_subgroup(n: usize, sets: &[Vec<usize>], alternating: bool) -> GroupAlgebra {
        let mut acc = GroupAlgebra::one(n);
        for set in sets {
            if set.len() < 2 {
                continue;
            }
            let mut e = GroupAlgebra { n, terms: HashMap::new() };
            for p in permutations_of(n, set) {
                let s = if alternating { sign(&p) } else { 1 };
                e.terms.insert(p, Rat::int(s));
            }
            acc = acc.mul(&e);
        }
        acc
    }

    pub fn mul(&self, o: &GroupAlgebra) -> GroupAlgebra {
        let mut terms: HashMap<Perm, Rat> = HashMap::new();
        for (g, a) in &self.terms {
            for (h, b) in &o.terms {
                let e = terms.entry(compose(g, h)).or_insert(Rat::ZERO);
                *e = e.add(&a.mul(b));
            }
        }
        terms.retain(|_, v| !v.is_zero());
        GroupAlgebra { n: self.n, terms }
    }

    pub fn scale(&self, k: &Rat) -> GroupAlgebra {
        GroupAlgebra { n: self.n, terms: self.terms.iter().map(|(g, c)| (g.clone(), c.mul(k))).collect() }
    }

    /// Coefficient of `g` in `self · o`.
    pub fn product_coeff(&self, o: &GroupAlgebra, g: &[u8]) -> Rat {
        let mut acc = Rat::ZERO;
        for (h, a) in &self.terms {
            let rest = compose(&inverse(h), g);
            if let Some(b) = o.terms.get(&rest) {
                acc = acc.add(&a.mul(b));
            }
        }
        acc
    }

    /// Rescales a quasi-idempotent element (`e² = c·e`) to an idempotent.
    pub fn normalized(&self) -> Result<GroupAlgebra> {
        let id = identity(self.n);
        let g0 = if self.terms.contains_key(&id) {
            id
        } else {
            self.terms.keys().min().cloned().ok_or_else(|| Error::Shape("zero projector".into()))?
        };
        let c = self.product_coeff(self, &g0).div(&self.terms[&g0]).expect("nonzero");
        let inv = c.inv().ok_or_else(|| Error::Shape("nilpotent group-algebra element".into()))?;
        Ok(self.scale(&inv))
    }

    /// Deterministic term list.
    pub fn sorted_terms(&self) -> Vec<(Perm, Rat)> {
        let mut v: Vec<_> = self.terms.iter().map(|(g, c)| (g.clone(), c.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

/// Slot sets of rows and columns for a diagram laid out row after row.
fn row_layout(rows: &[u8]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut at = 0;
    let mut row_sets = Vec::new();
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); rows.first().copied().unwrap_or(0) as usize];
    for &r in rows {
        let set: Vec<usize> = (at..at + r as usize).collect();
        for (j, &s) in set.iter().enumerate() {
            cols[j].push(s);
        }
        row_sets.push(set);
        at += r as usize;
    }
    (row_sets, cols)
}

/// Idempotent Young projector. In the row convention (slots grouped by
/// rows) it is `S·A·S`, in the column convention `A·S·A`, rescaled.
pub fn young_projector_rows(rows: &[u8]) -> Result<GroupAlgebra> {
    let n: usize = rows.iter().map(|&r| r as usize).sum();
    let (r, c) = row_layout(rows);
    let s = GroupAlgebra::young_subgroup(n, &r, false);
    let a = GroupAlgebra::young_subgroup(n, &c, true);
    s.mul(&a).mul(&s).normalized()
}

pub fn young_projector_cols(cols: &[u8]) -> Result<GroupAlgebra> {
    let n: usize = cols.iter().map(|&r| r as usize).sum();
    // columns laid out consecutively are the rows of the conjugate diagram
    let (c, r) = row_layout(cols);
    let s = GroupAlgebra::young_subgroup(n, &r, false);
    let a = GroupAlgebra::young_subgroup(n, &c, true);
    a.mul(&s).mul(&a).normalized()
}

/// The projector implied by a shape's declared Young symmetry, if any.
pub fn shape_projector(shape: &TensorShape) -> Result<Option<GroupAlgebra>> {
    match shape.symmetry() {
        Symmetry::YoungRows(rows) if rows.len() > 1 => young_projector_rows(rows).map(Some),
        Symmetry::YoungCols(cols) if conjugate(cols).len() > 1 && cols.iter().any(|&c| c > 1) => {
            young_projector_cols(cols).map(Some)
        }
        _ => Ok(None),
    }
}
