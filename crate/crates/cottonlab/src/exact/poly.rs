//! Sparse multivariate polynomials over named coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Maximum number of coordinates a polynomial may carry.
pub const MAX_VARS: usize = 8;

pub type Coords = Arc<[String]>;

pub fn coords(names: &[&str]) -> Coords {
    names.iter().map(|s| s.to_string()).collect::<Vec<_>>().into()
}

/// Exponent vector. Entries past the coordinate count stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub [u8; MAX_VARS]);

impl Mono {
    pub const ONE: Mono = Mono([0; MAX_VARS]);

    pub fn var(i: usize) -> Mono {
        let mut m = Mono::ONE;
        m.0[i] = 1;
        m
    }

    pub fn from_exps(e: &[u8]) -> Mono {
        let mut m = Mono::ONE;
        m.0[..e.len()].copy_from_slice(e);
        m
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn checked_mul(&self, o: &Mono) -> Option<Mono> {
        let mut m = Mono::ONE;
        for k in 0..MAX_VARS {
            m.0[k] = self.0[k].checked_add(o.0[k])?;
        }
        Some(m)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        self.checked_mul(o).expect("exponent overflow")
    }

    pub fn divides(&self, o: &Mono) -> bool {
        self.0.iter().zip(o.0.iter()).all(|(a, b)| a <= b)
    }

    /// Sign of the monomial under `ξ → −ξ`.
    pub fn parity(&self) -> i64 {
        if self.degree().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Every monomial in `n` variables of total degree exactly `d`.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<Mono> {
        fn rec(n: usize, k: usize, left: u32, cur: &mut Mono, out: &mut Vec<Mono>) {
            if k + 1 == n {
                cur.0[k] = left as u8;
                out.push(*cur);
                cur.0[k] = 0;
                return;
            }
            for e in (0..=left).rev() {
                cur.0[k] = e as u8;
                rec(n, k + 1, left - e, cur, out);
            }
            cur.0[k] = 0;
        }
        let mut out = Vec::new();
        if n == 0 {
            if d == 0 {
                out.push(Mono::ONE);
            }
            return out;
        }
        let mut cur = Mono::ONE;
        rec(n, 0, d, &mut cur, &mut out);
        out
    }

    pub fn all_up_to(n: usize, d: u32) -> Vec<Mono> {
        (0..=d).flat_map(|k| Mono::all_of_degree(n, k)).collect()
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coords: Coords,
    terms: BTreeMap<Mono, Scalar>,
}

fn same_coords(a: &Coords, b: &Coords) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

impl Poly {
    pub fn zero(coords: Coords) -> Poly {
        assert!(coords.len() <= MAX_VARS, "too many coordinates");
        Poly { coords, terms: BTreeMap::new() }
    }

    pub fn constant(coords: Coords, c: Scalar) -> Poly {
        Poly::monomial(coords, Mono::ONE, c)
    }

    pub fn monomial(coords: Coords, m: Mono, c: Scalar) -> Poly {
        let mut p = Poly::zero(coords);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(coords: Coords, name: &str) -> Result<Poly> {
        let i = index_of(&coords, name)?;
        Ok(Poly::monomial(coords, Mono::var(i), Scalar::ONE))
    }

    pub fn from_terms(coords: Coords, it: impl IntoIterator<Item = (Mono, Scalar)>) -> Poly {
        let mut p = Poly::zero(coords);
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn nvars(&self) -> usize {
        self.coords.len()
    }

    pub fn terms(&self) -> &BTreeMap<Mono, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Mono, Scalar> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mono) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Exponents of `m` restricted to this polynomial's coordinates.
    pub fn exponents<'a>(&self, m: &'a Mono) -> &'a [u8] {
        &m.0[..self.coords.len()]
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn add_term(&mut self, m: Mono, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.add(c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, o: &Poly) {
        debug_assert!(same_coords(&self.coords, &o.coords));
        for (m, c) in &o.terms {
            self.add_term(*m, c);
        }
    }

    pub fn add_scaled(&mut self, o: &Poly, k: &Scalar) {
        if k.is_zero() {
            return;
        }
        for (m, c) in &o.terms {
            self.add_term(*m, &c.mul(k));
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        assert!(same_coords(&self.coords, &o.coords), "coordinate mismatch");
        let mut p = self.clone();
        p.add_assign(o);
        p
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        assert!(same_coords(&self.coords, &o.coords), "coordinate mismatch");
        let mut p = self.clone();
        p.add_scaled(o, &Scalar::int(-1));
        p
    }

    pub fn neg(&self) -> Poly {
        self.scale(&Scalar::int(-1))
    }

    pub fn scale(&self, k: &Scalar) -> Poly {
        if k.is_zero() {
            return Poly::zero(self.coords.clone());
        }
        Poly {
            coords: self.coords.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, c.mul(k))).collect(),
        }
    }

    pub fn checked_mul(&self, o: &Poly) -> Option<Poly> {
        assert!(same_coords(&self.coords, &o.coords), "coordinate mismatch");
        let mut p = Poly::zero(self.coords.clone());
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                p.add_term(a.checked_mul(b)?, &x.mul(y));
            }
        }
        Some(p)
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        self.checked_mul(o).expect("exponent overflow")
    }

    pub fn mul_mono(&self, m: &Mono, k: &Scalar) -> Poly {
        let mut p = Poly::zero(self.coords.clone());
        for (a, x) in &self.terms {
            p.add_term(a.mul(m), &x.mul(k));
        }
        p
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(self.coords.clone(), Scalar::ONE);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative by coordinate position.
    pub fn diff_index(&self, i: usize) -> Poly {
        let mut p = Poly::zero(self.coords.clone());
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut n = *m;
            n.0[i] = e - 1;
            p.add_term(n, &c.mul_int(e as i64));
        }
        p
    }

    pub fn diff(&self, coord: &str) -> Result<Poly> {
        Ok(self.diff_index(index_of(&self.coords, coord)?))
    }

    /// Applies `∂^α` where `α` indexes this polynomial's own coordinates.
    pub fn diff_mono(&self, a: &Mono) -> Poly {
        let mut p = Poly::zero(self.coords.clone());
        for (m, c) in &self.terms {
            if !a.divides(m) {
                continue;
            }
            let mut n = *m;
            let mut k: i64 = 1;
            let mut coef = c.clone();
            for v in 0..MAX_VARS {
                for j in 0..a.0[v] {
                    k *= (m.0[v] - j) as i64;
                    if k.abs() > 1 << 40 {
                        coef = coef.mul_int(k);
                        k = 1;
                    }
                }
                n.0[v] -= a.0[v];
            }
            p.add_term(n, &coef.mul_int(k));
        }
        p
    }

    /// Re-expresses the polynomial over `target`, which must contain every
    /// coordinate with nonzero exponent.
    pub fn recoord(&self, target: &Coords) -> Result<Poly> {
        if same_coords(&self.coords, target) {
            return Ok(Poly { coords: target.clone(), terms: self.terms.clone() });
        }
        let mut map = [usize::MAX; MAX_VARS];
        for (i, name) in self.coords.iter().enumerate() {
            if let Some(j) = target.iter().position(|t| t == name) {
                map[i] = j;
            }
        }
        let mut p = Poly::zero(target.clone());
        for (m, c) in &self.terms {
            let mut n = Mono::ONE;
            for (i, &j) in map.iter().enumerate().take(self.coords.len()) {
                if m.0[i] == 0 {
                    continue;
                }
                if j == usize::MAX {
                    return Err(Error::UnknownCoordinate(self.coords[i].clone()));
                }
                n.0[j] = m.0[i];
            }
            p.add_term(n, c);
        }
        Ok(p)
    }

    /// Replaces coordinate `coord` by the polynomial `by` (same coordinates).
    pub fn substitute(&self, coord: &str, by: &Poly) -> Result<Poly> {
        let i = index_of(&self.coords, coord)?;
        let mut pows: Vec<Poly> = vec![Poly::constant(self.coords.clone(), Scalar::ONE)];
        let mut out = Poly::zero(self.coords.clone());
        for (m, c) in &self.terms {
            let e = m.0[i] as usize;
            while pows.len() <= e {
                let next = pows.last().unwrap().mul(by);
                pows.push(next);
            }
            let mut rest = *m;
            rest.0[i] = 0;
            out.add_assign(&pows[e].mul_mono(&rest, c));
        }
        Ok(out)
    }

    /// Under `ξ → −ξ`.
    pub fn reflect(&self) -> Poly {
        Poly {
            coords: self.coords.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, c.mul_int(m.parity()))).collect(),
        }
    }

    pub fn depends_on(&self, coord: &str) -> bool {
        match self.coords.iter().position(|c| c == coord) {
            Some(i) => self.terms.keys().any(|m| m.0[i] != 0),
            None => false,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|m| m.degree());
        match it.next() {
            Some(d) => it.all(|e| e == d),
            None => true,
        }
    }
}

pub(crate) fn index_of(coords: &Coords, name: &str) -> Result<usize> {
    coords
        .iter()
        .position(|c| c == name)
        .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ts: Vec<(&Mono, &Scalar)> = self.terms.iter().collect();
        ts.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(b.0.cmp(a.0)));
        for (k, (m, c)) in ts.into_iter().enumerate() {
            let negative = c.root3().is_zero() && c.rational_part().signum() < 0;
            let c = if negative { c.neg() } else { c.clone() };
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            for (i, name) in self.coords.iter().enumerate() {
                match m.0[i] {
                    0 => {}
                    1 => factors.push(name.clone()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", c, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
