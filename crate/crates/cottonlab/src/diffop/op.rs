//! Constant-coefficient linear differential operators between tensor
//! spaces, stored as sparse matrices of symbol polynomials in `∂`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{Coords, Mono, Poly, Rat, Scalar, MAX_VARS};
use crate::tensor::{TensorField, TensorShape};

#[derive(Clone, PartialEq, Eq)]
pub struct LinDiffOp {
    domain: TensorShape,
    codomain: TensorShape,
    vars: Coords,
    rows: Vec<BTreeMap<usize, Poly>>,
}

/// Row accumulator handed to [`LinDiffOp::from_fn`].
pub struct RowBuilder<'a> {
    domain: &'a TensorShape,
    vars: &'a Coords,
    row: &'a mut BTreeMap<usize, Poly>,
}

impl RowBuilder<'_> {
    /// Adds `c·∂^m` acting on the input entry at full index `idx`.
    pub fn add(&mut self, idx: &[u8], m: Mono, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        if let Some((p, s)) = self.domain.canonicalize(idx) {
            let c = if s < 0 { c.neg() } else { c.clone() };
            self.row
                .entry(p)
                .or_insert_with(|| Poly::zero(self.vars.clone()))
                .add_term(m, &c);
        }
    }

    /// Adds `c·σ(∂)` for a symbol polynomial over the operator variables.
    pub fn add_symbol(&mut self, idx: &[u8], sym: &Poly, c: &Scalar) {
        for (m, k) in sym.terms() {
            self.add(idx, *m, &k.mul(c));
        }
    }
}

fn unify(a: &Coords, b: &Coords) -> Coords {
    if a[..] == b[..] {
        return a.clone();
    }
    let mut v: Vec<String> = a.to_vec();
    for x in b.iter() {
        if !v.contains(x) {
            v.push(x.clone());
        }
    }
    assert!(v.len() <= MAX_VARS, "too many derivative variables");
    v.into()
}

impl LinDiffOp {
    pub fn zero(domain: TensorShape, codomain: TensorShape, vars: Coords) -> LinDiffOp {
        let rows = vec![BTreeMap::new(); codomain.ncomps()];
        LinDiffOp { domain, codomain, vars, rows }
    }

    /// Builds an operator row by row: `f` receives the canonical output index
    /// and records the input entries and derivatives it depends on.
    pub fn from_fn(
        domain: TensorShape,
        codomain: TensorShape,
        vars: Coords,
        mut f: impl FnMut(&[u8], &mut RowBuilder<'_>),
    ) -> LinDiffOp {
        let mut op = LinDiffOp::zero(domain, codomain, vars);
        for o in 0..op.codomain.ncomps() {
            let idx = op.codomain.comp(o).clone();
            let mut row = BTreeMap::new();
            let mut b = RowBuilder { domain: &op.domain, vars: &op.vars, row: &mut row };
            f(&idx, &mut b);
            row.retain(|_, p: &mut Poly| !p.is_zero());
            op.rows[o] = row;
        }
        op
    }

    pub fn domain(&self) -> &TensorShape {
        &self.domain
    }

    pub fn codomain(&self) -> &TensorShape {
        &self.codomain
    }

    pub fn vars(&self) -> &Coords {
        &self.vars
    }

    pub fn rows(&self) -> &[BTreeMap<usize, Poly>] {
        &self.rows
    }

    pub fn entry(&self, o: usize, i: usize) -> Option<&Poly> {
        self.rows[o].get(&i)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    /// Highest derivative order appearing; zero for the zero operator.
    pub fn order(&self) -> u32 {
        self.rows.iter().flat_map(|r| r.values()).filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    /// Number of `(out, in, ∂^α)` terms.
    pub fn term_count(&self) -> usize {
        self.rows.iter().flat_map(|r| r.values()).map(|p| p.len()).sum()
    }

    /// Every symbol homogeneous of the same degree.
    pub fn homogeneous_order(&self) -> Option<u32> {
        let mut d = None;
        for p in self.rows.iter().flat_map(|r| r.values()) {
            for m in p.terms().keys() {
                match d {
                    None => d = Some(m.degree()),
                    Some(e) if e != m.degree() => return None,
                    _ => {}
                }
            }
        }
        Some(d.unwrap_or(0))
    }

    /// Same operator with derivative variables re-expressed over `vars`.
    pub fn with_vars(&self, vars: &Coords) -> Result<LinDiffOp> {
        if self.vars[..] == vars[..] {
            return Ok(self.clone());
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|(i, p)| Ok((*i, p.recoord(vars)?))).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Ok(LinDiffOp { domain: self.domain.clone(), codomain: self.codomain.clone(), vars: vars.clone(), rows })
    }

    /// Sets `∂_var = 0`, then drops the variable.
    pub fn drop_var(&self, var: &str) -> Result<LinDiffOp> {
        let k = crate::exact::poly::index_of(&self.vars, var)?;
        let vars: Coords = self.vars.iter().filter(|v| *v != var).cloned().collect::<Vec<_>>().into();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .filter_map(|(i, p)| {
                        let q = Poly::from_terms(
                            p.coords().clone(),
                            p.terms().iter().filter(|(m, _)| m.0[k] == 0).map(|(m, c)| (*m, c.clone())),
                        );
                        if q.is_zero() {
                            None
                        } else {
                            Some((*i, q.recoord(&vars).expect("variable removed")))
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(LinDiffOp { domain: self.domain.clone(), codomain: self.codomain.clone(), vars, rows })
    }

    /// Attaches different metadata to a domain or codomain with identical storage.
    pub fn with_shapes(&self, domain: TensorShape, codomain: TensorShape) -> Result<LinDiffOp> {
        if domain != self.domain || codomain != self.codomain {
            return Err(Error::Shape("storage differs".into()));
        }
        Ok(LinDiffOp { domain, codomain, vars: self.vars.clone(), rows: self.rows.clone() })
    }

    fn check_same(&self, o: &LinDiffOp) -> Result<()> {
        if self.domain != o.domain || self.codomain != o.codomain {
            return Err(Error::Shape(format!(
                "operators {:?}→{:?} and {:?}→{:?}",
                self.domain, self.codomain, o.domain, o.codomain
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &LinDiffOp) -> Result<LinDiffOp> {
        self.add_scaled(o, &Scalar::ONE)
    }

    pub fn sub(&self, o: &LinDiffOp) -> Result<LinDiffOp> {
        self.add_scaled(o, &Scalar::int(-1))
    }

    pub fn add_scaled(&self, o: &LinDiffOp, k: &Scalar) -> Result<LinDiffOp> {
        self.check_same(o)?;
        let vars = unify(&self.vars, &o.vars);
        let mut a = self.with_vars(&vars)?;
        let b = o.with_vars(&vars)?;
        for (ra, rb) in a.rows.iter_mut().zip(b.rows.iter()) {
            for (i, p) in rb {
                let e = ra.entry(*i).or_insert_with(|| Poly::zero(vars.clone()));
                e.add_scaled(p, k);
                if e.is_zero() {
                    ra.remove(i);
                }
            }
        }
        Ok(a)
    }

    pub fn scale(&self, k: &Scalar) -> LinDiffOp {
        let mut a = self.clone();
        for r in a.rows.iter_mut() {
            for p in r.values_mut() {
                *p = p.scale(k);
            }
            r.retain(|_, p| !p.is_zero());
        }
        a
    }

    pub fn neg(&self) -> LinDiffOp {
        self.scale(&Scalar::int(-1))
    }

    /// Multiplies every symbol by a scalar operator `σ(∂)`.
    pub fn mul_symbol(&self, sym: &Poly) -> Result<LinDiffOp> {
        let vars = unify(&self.vars, sym.coords());
        let a = self.with_vars(&vars)?;
        let s = sym.recoord(&vars)?;
        let rows = a
            .rows
            .iter()
            .map(|r| r.iter().map(|(i, p)| (*i, p.mul(&s))).filter(|(_, p)| !p.is_zero()).collect())
            .collect();
        Ok(LinDiffOp { domain: a.domain, codomain: a.codomain, vars, rows })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinDiffOp) -> Result<LinDiffOp> {
        if self.domain != inner.codomain {
            return Err(Error::Shape(format!(
                "cannot compose {:?}→{:?} after {:?}→{:?}",
                self.domain, self.codomain, inner.domain, inner.codomain
            )));
        }
        let vars = unify(&self.vars, &inner.vars);
        let a = self.with_vars(&vars)?;
        let b = inner.with_vars(&vars)?;
        let mut rows = Vec::with_capacity(a.rows.len());
        for ra in &a.rows {
            let mut out: BTreeMap<usize, Poly> = BTreeMap::new();
            for (m, pa) in ra {
                for (i, pb) in &b.rows[*m] {
                    let prod = pa.mul(pb);
                    let e = out.entry(*i).or_insert_with(|| Poly::zero(vars.clone()));
                    e.add_assign(&prod);
                }
            }
            out.retain(|_, p| !p.is_zero());
            rows.push(out);
        }
        Ok(LinDiffOp { domain: b.domain, codomain: a.codomain, vars, rows })
    }

    /// Formal adjoint for the pairing `⟨F, G⟩ = Σ over all index tuples of
    /// F·G`, i.e. weighted by component multiplicities.
    pub fn adjoint(&self) -> LinDiffOp {
        let mut rows = vec![BTreeMap::new(); self.domain.ncomps()];
        for (o, r) in self.rows.iter().enumerate() {
            let mo = self.codomain.mult(o) as i64;
            for (i, p) in r {
                let mi = self.domain.mult(*i) as i64;
                let w = Scalar::rat(Rat::new(mo, mi));
                rows[*i].insert(o, p.reflect().scale(&w));
            }
        }
        LinDiffOp { domain: self.codomain.clone(), codomain: self.domain.clone(), vars: self.vars.clone(), rows }
    }

    /// Evaluates on a field. Derivative variables are matched to the field's
    /// coordinates by name; absent coordinates differentiate to zero.
    pub fn apply(&self, f: &TensorField) -> Result<TensorField> {
        if f.shape() != &self.domain {
            return Err(Error::Shape(format!("operator expects {:?}, got {:?}", self.domain, f.shape())));
        }
        let fc = f.coords().clone();
        let map: Vec<Option<usize>> = self.vars.iter().map(|v| fc.iter().position(|c| c == v)).collect();
        let to_field = |m: &Mono| -> Option<Mono> {
            let mut n = Mono::ONE;
            for (k, &e) in m.0.iter().enumerate().take(self.vars.len()) {
                if e == 0 {
                    continue;
                }
                n.0[map[k]?] += e;
            }
            Some(n)
        };
        let mut cache: HashMap<(usize, Mono), Poly> = HashMap::new();
        let mut out = TensorField::zero(self.codomain.clone(), fc.clone()).with_ring(f.ring());
        for (o, r) in self.rows.iter().enumerate() {
            let mut acc = Poly::zero(fc.clone());
            for (i, sym) in r {
                let Some(fi) = f.get_ref(*i) else { continue };
                for (m, c) in sym.terms() {
                    let Some(fm) = to_field(m) else { continue };
                    let d = cache.entry((*i, fm)).or_insert_with(|| fi.diff_mono(&fm));
                    acc.add_scaled(d, c);
                }
            }
            out.set(o, acc);
        }
        Ok(out)
    }

    /// First surviving term, formatted for failure witnesses.
    pub fn first_term(&self) -> Option<String> {
        for (o, r) in self.rows.iter().enumerate() {
            if let Some((i, p)) = r.iter().next() {
                return Some(format!(
                    "out {} <- in {}: {}",
                    idx_string(self.codomain.comp(o)),
                    idx_string(self.domain.comp(*i)),
                    p
                ));
            }
        }
        None
    }

    /// JSON listing of every term, ordered by (out, in, symbol).
    pub fn to_json(&self) -> Value {
        let mut terms = Vec::new();
        for (o, r) in self.rows.iter().enumerate() {
            for (i, p) in r {
                terms.push(json!({
                    "out": idx_string(self.codomain.comp(o)),
                    "in": idx_string(self.domain.comp(*i)),
                    "symbol": p.to_string(),
                }));
            }
        }
        json!({
            "domain": shape_summary(&self.domain),
            "codomain": shape_summary(&self.codomain),
            "vars": self.vars.to_vec(),
            "order": self.order(),
            "terms": terms,
        })
    }
}

fn idx_string(idx: &[u8]) -> String {
    idx.iter().map(|i| (b'0' + i) as char).collect()
}

fn shape_summary(s: &TensorShape) -> Value {
    json!({"dim": s.dim(), "rank": s.rank(), "symmetry": crate::io::symmetry_string(s.symmetry())})
}

impl fmt::Debug for LinDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LinDiffOp {:?} -> {:?} over {:?}", self.domain, self.codomain, self.vars)?;
        for (o, r) in self.rows.iter().enumerate() {
            for (i, p) in r {
                writeln!(f, "  {:?} <- {:?}: {}", self.codomain.comp(o).as_slice(), self.domain.comp(*i).as_slice(), p)?;
            }
        }
        Ok(())
    }
}
