//! Elements of Q(√3), written `q + r·√3`. Plain rationals have `r = 0`.

use std::fmt;

use num_bigint::BigInt;

use super::rat::Rat;

/// Which coefficient ring a field or computation declares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Ring {
    #[default]
    Rational,
    Sqrt3,
}

impl Ring {
    pub fn join(self, o: Ring) -> Ring {
        if self == Ring::Sqrt3 || o == Ring::Sqrt3 {
            Ring::Sqrt3
        } else {
            Ring::Rational
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    q: Rat,
    r: Rat,
}

impl Scalar {
    pub const ZERO: Scalar = Scalar { q: Rat::ZERO, r: Rat::ZERO };
    pub const ONE: Scalar = Scalar { q: Rat::ONE, r: Rat::ZERO };

    pub fn int(n: i64) -> Scalar {
        Scalar { q: Rat::int(n), r: Rat::ZERO }
    }

    pub fn frac(n: i64, d: i64) -> Scalar {
        Scalar { q: Rat::new(n, d), r: Rat::ZERO }
    }

    pub fn rat(q: Rat) -> Scalar {
        Scalar { q, r: Rat::ZERO }
    }

    pub fn quadratic(q: Rat, r: Rat) -> Scalar {
        Scalar { q, r }
    }

    /// √3 itself.
    pub fn sqrt3() -> Scalar {
        Scalar { q: Rat::ZERO, r: Rat::ONE }
    }

    pub fn rational_part(&self) -> &Rat {
        &self.q
    }

    /// Numerator of the rational part.
    pub fn num(&self) -> BigInt {
        self.q.numer()
    }

    /// Denominator of the rational part.
    pub fn den(&self) -> BigInt {
        self.q.denom()
    }

    /// Coefficient of √3.
    pub fn root3(&self) -> &Rat {
        &self.r
    }

    pub fn ring(&self) -> Ring {
        if self.r.is_zero() {
            Ring::Rational
        } else {
            Ring::Sqrt3
        }
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero() && self.r.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.q.is_one() && self.r.is_zero()
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        Scalar { q: self.q.add(&o.q), r: self.r.add(&o.r) }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        Scalar { q: self.q.sub(&o.q), r: self.r.sub(&o.r) }
    }

    pub fn neg(&self) -> Scalar {
        Scalar { q: self.q.neg(), r: self.r.neg() }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        if self.r.is_zero() && o.r.is_zero() {
            return Scalar { q: self.q.mul(&o.q), r: Rat::ZERO };
        }
        let q = self.q.mul(&o.q).add(&self.r.mul(&o.r).mul(&Rat::int(3)));
        let r = self.q.mul(&o.r).add(&self.r.mul(&o.q));
        Scalar { q, r }
    }

    pub fn mul_rat(&self, k: &Rat) -> Scalar {
        Scalar { q: self.q.mul(k), r: self.r.mul(k) }
    }

    pub fn mul_int(&self, k: i64) -> Scalar {
        self.mul_rat(&Rat::int(k))
    }

    /// Field norm `q² − 3r²`.
    pub fn norm(&self) -> Rat {
        self.q.mul(&self.q).sub(&self.r.mul(&self.r).mul(&Rat::int(3)))
    }

    pub fn conj(&self) -> Scalar {
        Scalar { q: self.q.clone(), r: self.r.neg() }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.r.is_zero() {
            return self.q.inv().map(Scalar::rat);
        }
        // √3 is irrational, so the norm vanishes only at zero.
        let n = self.norm().inv()?;
        Some(self.conj().mul_rat(&n))
    }

    pub fn div(&self, o: &Scalar) -> Option<Scalar> {
        o.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::ONE;
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::int(n)
    }
}

impl From<Rat> for Scalar {
    fn from(q: Rat) -> Scalar {
        Scalar::rat(q)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r.is_zero() {
            return write!(f, "{}", self.q);
        }
        let r = if self.r.is_one() { "sqrt3".to_string() } else { format!("{}*sqrt3", self.r) };
        if self.q.is_zero() {
            write!(f, "{r}")
        } else {
            write!(f, "({} + {})", self.q, r)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sc() -> impl Strategy<Value = Scalar> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20)
            .prop_map(|(a, b, c, d)| Scalar::quadratic(Rat::new(a, b), Rat::new(c, d)))
    }

    proptest! {
        #[test]
        fn field_axioms(a in sc(), b in sc(), c in sc()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            if !a.is_zero() {
                prop_assert!(a.mul(&a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn conjugate_product_is_norm(a in -40i64..40, b in -40i64..40) {
            let x = Scalar::quadratic(Rat::int(a), Rat::int(b));
            prop_assert_eq!(x.mul(&x.conj()), Scalar::int(a * a - 3 * b * b));
        }
    }

    #[test]
    fn sqrt3_squares_to_three() {
        assert_eq!(Scalar::sqrt3().mul(&Scalar::sqrt3()), Scalar::int(3));
        assert_eq!(Scalar::sqrt3().inv().unwrap(), Scalar::quadratic(Rat::ZERO, Rat::new(1, 3)));
    }

    #[test]
    fn accessors_are_normalized() {
        let x = Scalar::frac(6, -4);
        assert_eq!(x.num(), BigInt::from(-3));
        assert_eq!(x.den(), BigInt::from(2));
        assert_eq!(x.ring(), Ring::Rational);
    }
}
