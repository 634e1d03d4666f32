//! Seeded random polynomial fields.

use rand::Rng;

use crate::exact::{Coords, Mono, Poly, Scalar};
use crate::tensor::{TensorField, TensorShape};

/// Each monomial of degree `≤ max_degree` in each stored component is
/// present with probability 1/3, with a coefficient drawn from `[−9, 9]`.
pub fn random_field<R: Rng>(shape: &TensorShape, coords: &Coords, max_degree: u32, rng: &mut R) -> TensorField {
    random_field_with(shape, coords, &Mono::all_up_to(coords.len(), max_degree), rng)
}

/// As [`random_field`] over an explicit monomial set.
pub fn random_field_with<R: Rng>(shape: &TensorShape, coords: &Coords, monos: &[Mono], rng: &mut R) -> TensorField {
    TensorField::from_fn(shape.clone(), coords.clone(), |_| random_poly(coords, monos, rng))
}

pub fn random_poly<R: Rng>(coords: &Coords, monos: &[Mono], rng: &mut R) -> Poly {
    let mut p = Poly::zero(coords.clone());
    for m in monos {
        if rng.gen_range(0..3) == 0 {
            p.add_term(*m, &Scalar::int(rng.gen_range(-9..=9)));
        }
    }
    p
}

/// Monomials in the first `n` coordinates only (the rest held at degree 0).
pub fn monos_in(n: usize, max_degree: u32) -> Vec<Mono> {
    Mono::all_up_to(n, max_degree)
}
