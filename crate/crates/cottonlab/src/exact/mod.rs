//! Exact scalars, polynomials and linear algebra.

pub mod matrix;
pub mod parse;
pub mod poly;
pub mod rat;
pub mod scalar;

use num_bigint::BigInt;

pub use matrix::{Echelon, ExactMatrix, Rref, SparseRow};
pub use parse::{parse_poly, parse_poly_in};
pub use poly::{coords, Coords, Mono, Poly, MAX_VARS};
pub use rat::Rat;
pub use scalar::{Ring, Scalar};

/// `n!`; negative arguments are rejected.
pub fn factorial(n: i64) -> Rat {
    assert!(n >= 0, "factorial of a negative number");
    let mut acc = BigInt::from(1);
    for k in 2..=n {
        acc *= k;
    }
    Rat::from_bigint(acc)
}

/// `n!!` with `0!! = (−1)!! = 1`.
pub fn double_factorial(n: i64) -> Rat {
    assert!(n >= -1, "double factorial below -1");
    let mut acc = BigInt::from(1);
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    Rat::from_bigint(acc)
}

/// Binomial coefficient, zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: i64, k: i64) -> Rat {
    if k < 0 || n < 0 || k > n {
        return Rat::ZERO;
    }
    factorial(n).div(&factorial(k).mul(&factorial(n - k))).expect("nonzero")
}
