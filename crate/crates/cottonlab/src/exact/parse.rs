//! Polynomial text syntax: integer literals, `+ - * / ^`, parentheses and
//! coordinate names. Division is only by constants.

use num_bigint::BigInt;

use super::poly::{Coords, Mono, Poly, MAX_VARS};
use super::rat::Rat;
use super::scalar::{Ring, Scalar};
use crate::error::{Error, Result};

const MAX_DEPTH: usize = 64;
const MAX_TERMS: usize = 20_000;
const MAX_WORK: usize = 4_000_000;
const MAX_DIGITS: usize = 400;

/// Parses over the rationals; `sqrt3` is rejected.
pub fn parse_poly(src: &str, coords: &Coords) -> Result<Poly> {
    parse_poly_in(src, coords, Ring::Rational)
}

pub fn parse_poly_in(src: &str, coords: &Coords, ring: Ring) -> Result<Poly> {
    if coords.len() > MAX_VARS {
        return Err(Error::Parse { pos: 0, msg: format!("more than {MAX_VARS} coordinates") });
    }
    let mut p = Parser { s: src.as_bytes(), pos: 0, coords, ring, depth: 0, work: 0 };
    let out = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    coords: &'a Coords,
    ring: Ring,
    depth: usize,
    work: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn mul(&mut self, a: &Poly, b: &Poly) -> Result<Poly> {
        let w = a.len().max(1) * b.len().max(1);
        self.work += w;
        if self.work > MAX_WORK || w > MAX_TERMS * 8 {
            return Err(self.err("expression too large"));
        }
        let out = a.checked_mul(b).ok_or_else(|| self.err("degree exceeds 255"))?;
        if out.len() > MAX_TERMS {
            return Err(self.err("too many terms"));
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<Poly> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        let mut acc = Poly::zero(self.coords.clone());
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                _ => break,
            };
            first = false;
            let t = self.term()?;
            acc.add_scaled(&t, &Scalar::int(sign));
            if acc.len() > MAX_TERMS {
                return Err(self.err("too many terms"));
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = self.mul(&acc, &f)?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let f = self.factor()?;
                    if f.degree().unwrap_or(0) > 0 {
                        return Err(Error::Parse { pos: at, msg: "division by a non-constant".into() });
                    }
                    let k = f.coeff(&Mono::ONE);
                    let inv = k.inv().ok_or(Error::Parse { pos: at, msg: "division by zero".into() })?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            self.depth += 1;
            if self.depth > MAX_DEPTH {
                return Err(self.err("nesting too deep"));
            }
            let f = self.factor()?;
            self.depth -= 1;
            return Ok(f.neg());
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.ws();
            let at = self.pos;
            let e = self.digits()?;
            let e: u32 = e
                .parse()
                .ok()
                .filter(|e| *e <= 255)
                .ok_or(Error::Parse { pos: at, msg: "exponent must be at most 255".into() })?;
            let mut acc = Poly::constant(self.coords.clone(), Scalar::ONE);
            for _ in 0..e {
                acc = self.mul(&acc, &base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn digits(&mut self) -> Result<&str> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        if self.pos - start > MAX_DIGITS {
            return Err(self.err("literal too long"));
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).expect("ascii"))
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits()?;
                let n: BigInt = d.parse().expect("digits");
                Ok(Poly::constant(self.coords.clone(), Scalar::rat(Rat::from_bigint(n))))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                if let Some(i) = self.coords.iter().position(|c| c == name) {
                    return Ok(Poly::monomial(self.coords.clone(), Mono::var(i), Scalar::ONE));
                }
                if name == "sqrt3" {
                    if self.ring != Ring::Sqrt3 {
                        return Err(Error::MixedRing(format!(
                            "`sqrt3` at byte {start} in a rational field"
                        )));
                    }
                    return Ok(Poly::constant(self.coords.clone(), Scalar::sqrt3()));
                }
                Err(Error::Parse { pos: start, msg: format!("unknown coordinate `{name}`") })
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
