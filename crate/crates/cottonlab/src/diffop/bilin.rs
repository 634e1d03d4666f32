//! Bilinear differential integrands `Σ c·(∂^α A_p)(∂^β B_q)` and their
//! normal form modulo total derivatives.

use std::collections::BTreeMap;

use super::op::LinDiffOp;
use crate::error::{Error, Result};
use crate::exact::{Coords, Mono, Poly, Rat, Scalar};
use crate::tensor::TensorShape;

type Key = (usize, Mono, usize, Mono);

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BilinForm {
    a: TensorShape,
    b: TensorShape,
    vars: Coords,
    terms: BTreeMap<Key, Scalar>,
}

impl BilinForm {
    pub fn zero(a: TensorShape, b: TensorShape, vars: Coords) -> BilinForm {
        BilinForm { a, b, vars, terms: BTreeMap::new() }
    }

    pub fn slot_a(&self) -> &TensorShape {
        &self.a
    }

    pub fn slot_b(&self) -> &TensorShape {
        &self.b
    }

    pub fn vars(&self) -> &Coords {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Key, Scalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·(∂^α A_p)(∂^β B_q)`.
    pub fn add_term(&mut self, p: usize, alpha: Mono, q: usize, beta: Mono, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let k = (p, alpha, q, beta);
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v = v.add(c);
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c.clone());
            }
        }
    }

    /// `⟨P A, Q B⟩` summed over every index tuple of the common codomain.
    /// The result is already in normal form.
    pub fn from_ops(p: &LinDiffOp, q: &LinDiffOp) -> Result<BilinForm> {
        if p.codomain() != q.codomain() {
            return Err(Error::Shape("paired operators need a common codomain".into()));
        }
        let vars = if p.vars()[..] == q.vars()[..] {
            p.vars().clone()
        } else {
            let mut v = p.vars().to_vec();
            v.extend(q.vars().iter().filter(|x| !p.vars().contains(x)).cloned());
            Coords::from(v)
        };
        let p = p.with_vars(&vars)?;
        let q = q.with_vars(&vars)?;
        let cod = p.codomain().clone();
        let mut acc: BTreeMap<(usize, usize), Poly> = BTreeMap::new();
        for c in 0..cod.ncomps() {
            let w = Scalar::int(cod.mult(c) as i64);
            let (rp, rq) = (&p.rows()[c], &q.rows()[c]);
            if rp.is_empty() || rq.is_empty() {
                continue;
            }
            for (i, sp) in rp {
                let refl = sp.reflect();
                for (j, sq) in rq {
                    let e = acc.entry((*i, *j)).or_insert_with(|| Poly::zero(vars.clone()));
                    e.add_scaled(&refl.mul(sq), &w);
                }
            }
        }
        let mut f = BilinForm::zero(p.domain().clone(), q.domain().clone(), vars);
        for ((i, j), poly) in acc {
            for (m, c) in poly.terms() {
                f.add_term(i, Mono::ONE, j, *m, c);
            }
        }
        Ok(f)
    }

    /// Moves all derivatives onto the second slot: `(∂U)V ≡ −U(∂V)`.
    pub fn normal_form(&self) -> BilinForm {
        let mut out = BilinForm::zero(self.a.clone(), self.b.clone(), self.vars.clone());
        for ((p, a, q, b), c) in &self.terms {
            out.add_term(*p, Mono::ONE, *q, a.mul(b), &c.mul_int(a.parity()));
        }
        out
    }

    pub fn is_normal(&self) -> bool {
        self.terms.keys().all(|k| k.1 == Mono::ONE)
    }

    fn check_slots(&self, o: &BilinForm) -> Result<()> {
        if self.a != o.a || self.b != o.b {
            return Err(Error::Shape("bilinear forms on different slots".into()));
        }
        if self.vars[..] != o.vars[..] {
            return Err(Error::Shape("bilinear forms over different variables".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &BilinForm) -> Result<BilinForm> {
        self.add_scaled(o, &Scalar::ONE)
    }

    pub fn sub(&self, o: &BilinForm) -> Result<BilinForm> {
        self.add_scaled(o, &Scalar::int(-1))
    }

    pub fn add_scaled(&self, o: &BilinForm, k: &Scalar) -> Result<BilinForm> {
        self.check_slots(o)?;
        let mut f = self.clone();
        for ((p, a, q, b), c) in &o.terms {
            f.add_term(*p, *a, *q, *b, &c.mul(k));
        }
        Ok(f)
    }

    pub fn scale(&self, k: &Scalar) -> BilinForm {
        let mut f = BilinForm::zero(self.a.clone(), self.b.clone(), self.vars.clone());
        for ((p, a, q, b), c) in &self.terms {
            f.add_term(*p, *a, *q, *b, &c.mul(k));
        }
        f
    }

    /// Same integrand with the slots swapped.
    pub fn transpose(&self) -> BilinForm {
        let mut f = BilinForm::zero(self.b.clone(), self.a.clone(), self.vars.clone());
        for ((p, a, q, b), c) in &self.terms {
            f.add_term(*q, *b, *p, *a, c);
        }
        f
    }

    /// Normal form vanishes: the integrand is a total derivative.
    pub fn is_total_derivative(&self) -> bool {
        self.normal_form().terms.is_empty()
    }

    /// True iff both integrands agree modulo a total derivative.
    pub fn equal_mod_div(&self, o: &BilinForm) -> Result<bool> {
        self.check_slots(o)?;
        Ok(self.sub(o)?.is_total_derivative())
    }

    /// First surviving normal-form term, for witnesses.
    pub fn first_term(&self) -> Option<String> {
        self.normal_form().terms.iter().next().map(|((p, _, q, b), c)| {
            format!("{c} * A{:?} * d{:?} B{:?}", self.a.comp(*p).as_slice(), b, self.b.comp(*q).as_slice())
        })
    }
}

/// Quadratic form on a doublet `(Z¹, Z²)`: a 2×2 block of bilinear forms,
/// `Q(Z) = Σ_ab B_ab(Z^a, Z^b)`.
#[derive(Clone, Debug)]
pub struct QForm {
    pub blocks: [[BilinForm; 2]; 2],
}

impl QForm {
    /// Substitutes `Z^a = Σ_c R_ac Z'^c`.
    pub fn rotate(&self, r: [[Rat; 2]; 2]) -> Result<QForm> {
        let zero = || self.blocks[0][0].scale(&Scalar::ZERO);
        let mut out = [[zero(), zero()], [zero(), zero()]];
        for (c, row) in out.iter_mut().enumerate() {
            for (d, slot) in row.iter_mut().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        let k = Scalar::rat(r[a][c].mul(&r[b][d]));
                        if !k.is_zero() {
                            *slot = slot.add_scaled(&self.blocks[a][b], &k)?;
                        }
                    }
                }
            }
        }
        Ok(QForm { blocks: out })
    }

    /// Symmetric part `B + Bᵀ`, which determines the quadratic form mod
    /// total derivatives.
    fn symmetric_part(&self) -> Result<[[BilinForm; 2]; 2]> {
        let f = |a: usize, b: usize| -> Result<BilinForm> {
            Ok(self.blocks[a][b].add(&self.blocks[b][a].transpose())?.normal_form())
        };
        Ok([[f(0, 0)?, f(0, 1)?], [f(1, 0)?, f(1, 1)?]])
    }

    pub fn equal_mod_div(&self, o: &QForm) -> Result<bool> {
        let (x, y) = (self.symmetric_part()?, o.symmetric_part()?);
        for a in 0..2 {
            for b in 0..2 {
                if !x[a][b].equal_mod_div(&y[a][b])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::coords;
    use crate::tensor::ops;

    fn v3() -> Coords {
        coords(&["x1", "x2", "x3"])
    }

    #[test]
    fn one_ibp_step_and_idempotence() {
        let s = TensorShape::scalar(3);
        let mut f = BilinForm::zero(s.clone(), s.clone(), v3());
        f.add_term(0, Mono::var(0), 0, Mono::ONE, &Scalar::ONE);
        let nf = f.normal_form();
        let mut g = BilinForm::zero(s.clone(), s.clone(), v3());
        g.add_term(0, Mono::ONE, 0, Mono::var(0), &Scalar::int(-1));
        assert_eq!(nf, g);
        assert_eq!(nf.normal_form(), nf);
    }

    #[test]
    fn grad_pairing_is_minus_laplacian() {
        let s = TensorShape::scalar(3);
        let g = ops::grad(&s, &v3()).unwrap();
        let lhs = BilinForm::from_ops(&g, &g).unwrap();
        let lap = ops::laplacian(&s, &v3()).unwrap();
        let rhs = BilinForm::from_ops(&ops::identity(&s, &v3()), &lap).unwrap().scale(&Scalar::int(-1));
        assert!(lhs.equal_mod_div(&rhs).unwrap());
        // ⟨f, Δg⟩ ≡ ⟨Δf, g⟩
        let a = BilinForm::from_ops(&lap, &ops::identity(&s, &v3())).unwrap();
        assert!(a.equal_mod_div(&rhs.scale(&Scalar::int(-1))).unwrap());
        let d1 = ops::partial(&s, &v3(), "x1").unwrap();
        let d2 = ops::partial(&s, &v3(), "x2").unwrap();
        let id = ops::identity(&s, &v3());
        let x = BilinForm::from_ops(&id, &d1).unwrap();
        let y = BilinForm::from_ops(&id, &d2).unwrap();
        assert!(!x.equal_mod_div(&y).unwrap());
    }

    #[test]
    fn pure_divergence_is_invisible() {
        let s = TensorShape::scalar(3);
        let mut f = BilinForm::zero(s.clone(), s.clone(), v3());
        f.add_term(0, Mono::ONE, 0, Mono::var(1), &Scalar::int(2));
        let mut g = f.clone();
        // ∂_1(U V) = (∂_1 U)V + U ∂_1 V
        g.add_term(0, Mono::var(0), 0, Mono::ONE, &Scalar::ONE);
        g.add_term(0, Mono::ONE, 0, Mono::var(0), &Scalar::ONE);
        assert!(f.equal_mod_div(&g).unwrap());
    }
}
