//! Bounded-degree linear systems `Σ_u A_{e,u} X_u = T_e` over polynomial
//! tensor fields, solved exactly.

use std::collections::HashMap;

use super::op::LinDiffOp;
use crate::error::{Error, Result};
use crate::exact::{Coords, Echelon, Mono, Poly, Scalar, SparseRow};
use crate::tensor::{TensorField, TensorShape};

/// Unknown field: every stored component ranges over the given monomials.
#[derive(Clone, Debug)]
pub struct Unknown {
    pub shape: TensorShape,
    pub monos: Vec<Mono>,
}

struct Equation {
    codomain: TensorShape,
    terms: Vec<(usize, LinDiffOp)>,
    target: Option<TensorField>,
}

pub struct LinearSystem {
    coords: Coords,
    unknowns: Vec<Unknown>,
    equations: Vec<Equation>,
}

/// Particular solution (free parameters zero) and a kernel basis.
#[derive(Clone, Debug)]
pub struct Solution {
    pub particular: Vec<TensorField>,
    pub kernel: Vec<Vec<TensorField>>,
}

impl LinearSystem {
    pub fn new(coords: Coords) -> LinearSystem {
        LinearSystem { coords, unknowns: Vec::new(), equations: Vec::new() }
    }

    pub fn unknown(&mut self, shape: TensorShape, monos: Vec<Mono>) -> usize {
        self.unknowns.push(Unknown { shape, monos });
        self.unknowns.len() - 1
    }

    pub fn ncols(&self) -> usize {
        self.unknowns.iter().map(|u| u.shape.ncomps() * u.monos.len()).sum()
    }

    pub fn equation(&mut self, terms: Vec<(usize, LinDiffOp)>, target: Option<TensorField>) -> Result<()> {
        let codomain = match (terms.first(), &target) {
            (Some((_, op)), _) => op.codomain().clone(),
            (None, Some(t)) => t.shape().clone(),
            (None, None) => return Ok(()),
        };
        for (u, op) in &terms {
            let un = self.unknowns.get(*u).ok_or_else(|| Error::Shape(format!("no unknown {u}")))?;
            if op.domain() != &un.shape || op.codomain() != &codomain {
                return Err(Error::Shape("equation operator does not match its unknown".into()));
            }
        }
        if let Some(t) = &target {
            if t.shape() != &codomain {
                return Err(Error::Shape("target shape differs from the equation codomain".into()));
            }
        }
        self.equations.push(Equation { codomain, terms, target });
        Ok(())
    }

    fn offsets(&self) -> Vec<usize> {
        let mut at = 0;
        self.unknowns
            .iter()
            .map(|u| {
                let o = at;
                at += u.shape.ncomps() * u.monos.len();
                o
            })
            .collect()
    }

    /// Sparse rows and right-hand sides.
    fn assemble(&self) -> Result<(Vec<SparseRow>, Vec<Scalar>)> {
        let offsets = self.offsets();
        let mut keys: HashMap<(usize, usize, Mono), usize> = HashMap::new();
        let mut rows: Vec<SparseRow> = Vec::new();
        let mut rhs: Vec<Scalar> = Vec::new();
        let mut row_of = |key: (usize, usize, Mono), rows: &mut Vec<SparseRow>, rhs: &mut Vec<Scalar>| -> usize {
            *keys.entry(key).or_insert_with(|| {
                rows.push(Vec::new());
                rhs.push(Scalar::ZERO);
                rows.len() - 1
            })
        };
        for (e, eq) in self.equations.iter().enumerate() {
            for (u, op) in &eq.terms {
                let un = &self.unknowns[*u];
                let map: Vec<Option<usize>> =
                    op.vars().iter().map(|v| self.coords.iter().position(|c| c == v)).collect();
                let nm = un.monos.len();
                for (o, row) in op.rows().iter().enumerate() {
                    for (i, sym) in row {
                        for (a, coef) in sym.terms() {
                            let mut am = Mono::ONE;
                            let mut ok = true;
                            for (k, &x) in a.0.iter().enumerate().take(op.vars().len()) {
                                if x == 0 {
                                    continue;
                                }
                                match map[k] {
                                    Some(j) => am.0[j] += x,
                                    None => ok = false,
                                }
                            }
                            if !ok {
                                continue;
                            }
                            for (k, m) in un.monos.iter().enumerate() {
                                if !am.divides(m) {
                                    continue;
                                }
                                let mut n = *m;
                                let mut f: i64 = 1;
                                for v in 0..crate::exact::MAX_VARS {
                                    for j in 0..am.0[v] {
                                        f *= (m.0[v] - j) as i64;
                                    }
                                    n.0[v] -= am.0[v];
                                }
                                let col = offsets[*u] + i * nm + k;
                                let r = row_of((e, o, n), &mut rows, &mut rhs);
                                rows[r].push((col, coef.mul_int(f)));
                            }
                        }
                    }
                }
            }
            if let Some(t) = &eq.target {
                let t = t.recoord(&self.coords)?;
                for (o, p) in t.components() {
                    for (m, c) in p.terms() {
                        let r = row_of((e, *o, *m), &mut rows, &mut rhs);
                        rhs[r] = rhs[r].add(c);
                    }
                }
            }
            let _ = &eq.codomain;
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|e| e.0);
            let mut merged: SparseRow = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 = last.1.add(&v),
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|e| !e.1.is_zero());
            *row = merged;
        }
        Ok((rows, rhs))
    }

    fn fields_from(&self, v: &[Scalar]) -> Vec<TensorField> {
        let offsets = self.offsets();
        self.unknowns
            .iter()
            .zip(offsets)
            .map(|(u, off)| {
                let nm = u.monos.len();
                let mut t = TensorField::zero(u.shape.clone(), self.coords.clone());
                for c in 0..u.shape.ncomps() {
                    let p = Poly::from_terms(
                        self.coords.clone(),
                        (0..nm).map(|k| (u.monos[k], v[off + c * nm + k].clone())),
                    );
                    t.set(c, p);
                }
                t
            })
            .collect()
    }

    pub fn solve(&self) -> Result<Solution> {
        let n = self.ncols();
        let (rows, rhs) = self.assemble()?;
        let mut ech = Echelon::new(n + 1);
        for (mut r, b) in rows.into_iter().zip(rhs) {
            if !b.is_zero() {
                r.push((n, b));
            }
            if !r.is_empty() {
                ech.insert(r);
            }
        }
        let rref = ech.into_rref();
        if rref.pivot_cols().any(|c| c == n) {
            return Err(Error::NoSolution("target outside the image at this degree".into()));
        }
        let mut x = vec![Scalar::ZERO; n];
        let kernel_full = rref.nullspace();
        // the augmented column is free; its kernel vector carries −x
        let mut kernel = Vec::new();
        for v in kernel_full {
            if !v[n].is_zero() {
                for (k, val) in v.iter().take(n).enumerate() {
                    x[k] = val.neg();
                }
            } else {
                kernel.push(self.fields_from(&v[..n]));
            }
        }
        Ok(Solution { particular: self.fields_from(&x), kernel })
    }

    /// Residual-free check of a candidate: returns the equations' left-hand
    /// sides minus targets.
    pub fn residuals(&self, xs: &[TensorField]) -> Result<Vec<TensorField>> {
        self.equations
            .iter()
            .map(|eq| {
                let mut acc = TensorField::zero(eq.codomain.clone(), self.coords.clone());
                for (u, op) in &eq.terms {
                    acc = acc.add(&op.apply(&xs[*u])?)?;
                }
                if let Some(t) = &eq.target {
                    acc = acc.sub(&t.recoord(&self.coords)?)?;
                }
                Ok(acc)
            })
            .collect()
    }
}

/// Monomials of the degrees a homogeneous operator of the given order needs
/// to reach every degree present in `target`; `extra > 0` widens this to the
/// full range up to `max + order + extra`.
pub fn ansatz_monos(target: &TensorField, order: u32, extra: u32, nvars: usize) -> Vec<Mono> {
    let mut degs = std::collections::BTreeSet::new();
    for p in target.components().values() {
        for m in p.terms().keys() {
            degs.insert(m.degree() + order);
        }
    }
    if extra > 0 {
        let top = degs.iter().next_back().copied().unwrap_or(order) + extra;
        degs.extend(order..=top);
    }
    degs.into_iter().flat_map(|d| Mono::all_of_degree(nvars, d)).collect()
}

/// Solves `op X = target` with `X` ranging over the given monomials.
pub fn preimage(op: &LinDiffOp, target: &TensorField, monos: Vec<Mono>) -> Result<Solution> {
    let mut sys = LinearSystem::new(target.coords().clone());
    let u = sys.unknown(op.domain().clone(), monos);
    sys.equation(vec![(u, op.clone())], Some(target.clone()))?;
    sys.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{coords, parse_poly};
    use crate::tensor::ops;

    #[test]
    fn laplace_preimage() {
        let c = coords(&["x1", "x2", "x3"]);
        let s = TensorShape::scalar(3);
        let lap = ops::laplacian(&s, &c).unwrap();
        let target = TensorField::from_fn(s.clone(), c.clone(), |_| parse_poly("x1*x2", &c).unwrap());
        let mut sys = LinearSystem::new(c.clone());
        let u = sys.unknown(s.clone(), Mono::all_of_degree(3, 4));
        sys.equation(vec![(u, lap.clone())], Some(target.clone())).unwrap();
        let sol = sys.solve().unwrap();
        assert_eq!(lap.apply(&sol.particular[0]).unwrap(), target);
        assert!(sys.residuals(&sol.particular).unwrap().iter().all(|r| r.is_zero()));
        // harmonic quartics: 15 − 6
        assert_eq!(sol.kernel.len(), 9);
    }

    #[test]
    fn inconsistent_system_reports_no_solution() {
        let c = coords(&["x1", "x2", "x3"]);
        let s = TensorShape::scalar(3);
        let d = ops::partial(&s, &c, "x1").unwrap();
        let target = TensorField::from_fn(s.clone(), c.clone(), |_| parse_poly("x2", &c).unwrap());
        let mut sys = LinearSystem::new(c.clone());
        let u = sys.unknown(s, Mono::all_of_degree(3, 1));
        sys.equation(vec![(u, d)], Some(target)).unwrap();
        // ∂₁(a x1 + b x2 + c x3) = a can never equal x2
        assert!(matches!(sys.solve(), Err(Error::NoSolution(_))));
    }
}
