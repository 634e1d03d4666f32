//! Primitive tensor calculus realized as differential operators.
//!
//! Index `k` of a shape corresponds to derivative variable `vars[k]`; any
//! further variables (such as `t`) only enter through explicit symbols.

use smallvec::SmallVec;

use super::shape::{Block, Idx, TensorShape};
use super::young::{self, GroupAlgebra, Perm};
use crate::diffop::LinDiffOp;
use crate::error::{Error, Result};
use crate::exact::{Coords, Mono, Poly, Rat, Scalar};

fn d(k: u8) -> Mono {
    Mono::var(k as usize)
}

fn check_vars(shape: &TensorShape, vars: &Coords) -> Result<()> {
    if vars.len() < shape.dim() {
        return Err(Error::Dimension(format!("{} derivative variables for dimension {}", vars.len(), shape.dim())));
    }
    Ok(())
}

/// Levi-Civita symbol with `ε_{01…} = +1`.
pub fn levi_civita(idx: &[u8]) -> i64 {
    let n = idx.len();
    for i in 0..n {
        if idx[i] as usize >= n {
            return 0;
        }
        for j in 0..i {
            if idx[i] == idx[j] {
                return 0;
            }
        }
    }
    young::sign(idx)
}

/// Blocks left after deleting the given slots.
pub fn remove_slots(shape: &TensorShape, slots: &[usize]) -> Vec<Block> {
    shape
        .block_ranges()
        .into_iter()
        .filter_map(|(b, r)| {
            let left = r.clone().filter(|s| !slots.contains(s)).count() as u8;
            match (b, left) {
                (_, 0) => None,
                (Block::Free, _) => Some(Block::Free),
                (Block::Sym(_), k) => Some(Block::Sym(k)),
                (Block::Anti(_), k) => Some(Block::Anti(k)),
            }
        })
        .collect()
}

fn insert_at(idx: &[u8], slot: usize, v: u8) -> Idx {
    let mut out = Idx::with_capacity(idx.len() + 1);
    out.extend_from_slice(&idx[..slot]);
    out.push(v);
    out.extend_from_slice(&idx[slot..]);
    out
}

fn without(idx: &[u8], slots: &[usize]) -> Idx {
    idx.iter().enumerate().filter(|(k, _)| !slots.contains(k)).map(|(_, v)| *v).collect()
}

pub fn identity(shape: &TensorShape, vars: &Coords) -> LinDiffOp {
    reshape(shape, shape, vars)
}

/// Reads the input at the same full index; used to change storage once a
/// symmetry is known to hold.
pub fn reshape(domain: &TensorShape, codomain: &TensorShape, vars: &Coords) -> LinDiffOp {
    LinDiffOp::from_fn(domain.clone(), codomain.clone(), vars.clone(), |o, b| b.add(o, Mono::ONE, &Scalar::ONE))
}

/// `∂/∂var` applied to every component.
pub fn partial(shape: &TensorShape, vars: &Coords, var: &str) -> Result<LinDiffOp> {
    let k = crate::exact::poly::index_of(vars, var)?;
    Ok(LinDiffOp::from_fn(shape.clone(), shape.clone(), vars.clone(), |o, b| {
        b.add(o, Mono::var(k), &Scalar::ONE)
    }))
}

/// `∂^j ∂_j` with the shape's metric.
pub fn laplacian_symbol(shape: &TensorShape, vars: &Coords) -> Poly {
    let mut p = Poly::zero(vars.clone());
    for j in 0..shape.dim() as u8 {
        p.add_term(d(j).mul(&d(j)), &Scalar::int(shape.metric().diag(j)));
    }
    p
}

pub fn laplacian(shape: &TensorShape, vars: &Coords) -> Result<LinDiffOp> {
    check_vars(shape, vars)?;
    identity(shape, vars).mul_symbol(&laplacian_symbol(shape, vars))
}

/// `∂_i T_{…}` with the new index first.
pub fn grad(domain: &TensorShape, vars: &Coords) -> Result<LinDiffOp> {
    check_vars(domain, vars)?;
    let mut blocks = vec![Block::Free];
    blocks.extend_from_slice(domain.storage());
    let cod = TensorShape::blocks(domain.dim(), domain.metric(), blocks);
    Ok(LinDiffOp::from_fn(domain.clone(), cod, vars.clone(), |o, b| b.add(&o[1..], d(o[0]), &Scalar::ONE)))
}

/// Weight-one symmetrized gradient of a symmetric tensor.
pub fn sym_grad(domain: &TensorShape, vars: &Coords) -> Result<LinDiffOp> {
    check_vars(domain, vars)?;
    if !domain.is_symmetric() {
        return Err(Error::Shape("sym_grad needs a symmetric input".into()));
    }
    let r = domain.rank();
    let cod = TensorShape::symmetric(domain.dim(), r + 1).with_metric(domain.metric());
    let w = Scalar::frac(1, r as i64 + 1);
    Ok(LinDiffOp::from_fn(domain.clone(), cod, vars.clone(), |o, b| {
        for k in 0..o.len() {
            b.add(&without(o, &[k]), d(o[k]), &w);
        }
    }))
}

/// Divergence `∂^j T_{… j …}` on `slot`.
pub fn div(domain: &TensorShape, slot: usize, vars: &Coords) -> Result<LinDiffOp> {
    check_vars(domain, vars)?;
    if slot >= domain.rank() {
        return Err(Error::Slot(format!("slot {slot} of rank {}", domain.rank())));
    }
    let cod = TensorShape::blocks(domain.dim(), domain.metric(), remove_slots(domain, &[slot]));
    let metric = domain.metric();
    let dim = domain.dim() as u8;
    Ok(LinDiffOp::from_fn(domain.clone(), cod, vars.clone(), |o, b| {
        for j in 0..dim {
            b.add(&insert_at(o, slot, j), d(j), &Scalar::int(metric.diag(j)));
        }
    }))
}

/// Trace over two slots with the shape's metric.
pub fn trace(domain: &TensorShape, a: usize, c: usize, vars: &Coords) -> Result<LinDiffOp> {
    if a == c || a >= domain.rank() || c >= domain.rank() {
        return Err(Error::Slot(format!("trace slots ({a}, {c}) of rank {}", domain.rank())));
    }
    let (a, c) = (a.min(c), a.max(c));
    let cod = TensorShape::blocks(domain.dim(), domain.metric(), remove_slots(domain, &[a, c]));
    let metric = domain.metric();
    let dim = domain.dim() as u8;
    Ok(LinDiffOp::from_fn(domain.clone(), cod, vars.clone(), |o, b| {
        for j in 0..dim {
            let x = insert_at(o, a, j);
            let x = insert_at(&x, c, j);
            b.add(&x, Mono::ONE, &Scalar::int(metric.diag(j)));
        }
    }))
}

/// Trace of a symmetric tensor, returned as a symmetric tensor.
pub fn sym_trace(domain: &TensorShape, vars: &Coords) -> Result<LinDiffOp> {
    if !domain.is_symmetric() || domain.rank() < 2 {
        return Err(Error::Shape("sym_trace needs a symmetric tensor of rank at least 2".into()));
    }
    let t = trace(domain, 0, 1, vars)?;
    let cod = TensorShape::symmetric(domain.dim(), domain.rank() - 2).with_metric(domain.metric());
    t.with_shapes(domain.clone(), cod)
}

/// Divergence of a symmetric tensor, returned as a symmetric tensor.
pub fn sym_div(domain: &TensorShape, vars: &Coords) -> Result<LinDiffOp> {
    if !domain.is_symmetric() || domain.rank() < 1 {
        return Err(Error::Shape("sym_div needs a symmetric tensor".into()));
    }
    let t = div(domain, 0, vars)?;
    let cod = TensorShape::symmetric(domain.dim(), domain.rank() - 1).with_metric(domain.metric());
    t.with_shapes(domain.clone(), cod)
}

/// Weight-one symmetrized `δ_{(i₁i₂} T_{i₃…)}` (η in Minkowski signature).
pub fn metric_insert(domain: &TensorShape, vars: &Coords) -> Result<LinDiffOp> {
    if !domain.is_symmetric() {
        return Err(Error::Shape("metric_insert needs a symmetric input".into()));
    }
    let r = domain.rank();
    let cod = TensorShape::symmetric(domain.dim(), r + 2).with_metric(domain.metric());
    let pairs = ((r + 2) * (r + 1) / 2) as i64;
    let metric = domain.metric();
    Ok(LinDiffOp::from_fn(domain.clone(), cod, vars.clone(), |o, b| {
        for x in 0..o.len() {
            for y in x + 1..o.len() {
                if o[x] == o[y] {
                    b.add(&without(o, &[x, y]), Mono::ONE, &Scalar::frac(metric.diag(o[x]), pairs));
                }
            }
        }
    }))
}

/// `(P T)(i) = Σ c_g T(i ∘ g)` for a group-algebra element.
pub fn project(domain: &TensorShape, e: &GroupAlgebra, codomain: &TensorShape, vars: &Coords) -> Result<LinDiffOp> {
    if e.n != domain.rank() || codomain.rank() != domain.rank() {
        return Err(Error::Shape("projector rank mismatch".into()));
    }
    let terms: Vec<(Perm, Scalar)> = e.sorted_terms().into_iter().map(|(g, c)| (g, Scalar::rat(c))).collect();
    Ok(LinDiffOp::from_fn(domain.clone(), codomain.clone(), vars.clone(), |o, b| {
        for (g, c) in &terms {
            b.add(&young::act(o, g), Mono::ONE, c);
        }
    }))
}

fn slot_average(domain: &TensorShape, slots: &[usize], alternating: bool) -> Result<GroupAlgebra> {
    if slots.iter().any(|&s| s >= domain.rank()) {
        return Err(Error::Slot(format!("slots {slots:?} of rank {}", domain.rank())));
    }
    let n = domain.rank();
    let perms = young::permutations_of(n, slots);
    let w = Rat::new(1, perms.len() as i64);
    let mut e = GroupAlgebra { n, terms: Default::default() };
    for p in perms {
        let s = if alternating { young::sign(&p) } else { 1 };
        e.terms.insert(p, w.mul(&Rat::int(s)));
    }
    Ok(e)
}

/// Weight-one symmetrization over `slots`.
pub fn symmetrize(domain: &TensorShape, slots: &[usize], codomain: &TensorShape, vars: &Coords) -> Result<LinDiffOp> {
    project(domain, &slot_average(domain, slots, false)?, codomain, vars)
}

/// Weight-one antisymmetrization over `slots`.
pub fn antisymmetrize(
    domain: &TensorShape,
    slots: &[usize],
    codomain: &TensorShape,
    vars: &Coords,
) -> Result<LinDiffOp> {
    project(domain, &slot_average(domain, slots, true)?, codomain, vars)
}

/// Full weight-one symmetrization into a symmetric shape.
pub fn to_symmetric(domain: &TensorShape, vars: &Coords) -> Result<LinDiffOp> {
    let slots: Vec<usize> = (0..domain.rank()).collect();
    let cod = TensorShape::symmetric(domain.dim(), domain.rank()).with_metric(domain.metric());
    symmetrize(domain, &slots, &cod, vars)
}

/// `(T∘g)(i) = T(i ∘ g)`.
pub fn permute(domain: &TensorShape, g: &[u8], codomain: &TensorShape, vars: &Coords) -> Result<LinDiffOp> {
    let mut e = GroupAlgebra { n: domain.rank(), terms: Default::default() };
    e.terms.insert(SmallVec::from_slice(g), Rat::ONE);
    project(domain, &e, codomain, vars)
}

/// Contraction of `k` slots with `ε`, normalized by `1/k!`. The `D − k` free
/// ε indices come first, followed by the untouched slots.
pub fn eps_contract(domain: &TensorShape, slots: &[usize], vars: &Coords) -> Result<LinDiffOp> {
    let dim = domain.dim();
    let k = slots.len();
    if k == 0 || k > dim || slots.iter().any(|&s| s >= domain.rank()) {
        return Err(Error::Slot(format!("cannot dualize slots {slots:?} in dimension {dim}")));
    }
    let mut blocks = vec![Block::Anti((dim - k) as u8)];
    blocks.extend(remove_slots(domain, slots));
    let cod = TensorShape::blocks(dim, domain.metric(), blocks);
    let w = Rat::ONE.div(&crate::exact::factorial(k as i64)).expect("nonzero");
    let free = dim - k;
    let all: Vec<Vec<u8>> = young::permutations_of(dim, &(0..dim).collect::<Vec<_>>())
        .into_iter()
        .map(|p| p.to_vec())
        .collect();
    Ok(LinDiffOp::from_fn(domain.clone(), cod, vars.clone(), |o, b| {
        let (head, rest) = o.split_at(free);
        for p in &all {
            if &p[..free] != head {
                continue;
            }
            let s = levi_civita(p);
            let mut full: Idx = SmallVec::from_elem(0, domain.rank());
            let mut it = rest.iter();
            let mut jt = p[free..].iter();
            for slot in 0..domain.rank() {
                full[slot] = if slots.contains(&slot) {
                    *jt.next().expect("slot")
                } else {
                    *it.next().expect("rest")
                };
            }
            // slots are filled in the order given
            let mut ordered = full.clone();
            for (n, &slot) in slots.iter().enumerate() {
                ordered[slot] = p[free + n];
            }
            b.add(&ordered, Mono::ONE, &Scalar::rat(w.mul(&Rat::int(s))));
        }
    }))
}

/// The generalized differential `d_(N)` from `Y^p_N` to `Y^{p+1}_N`
/// (column convention). The new index closes column `l+1`, `p = N·k + l`.
pub fn gen_diff(domain: &TensorShape, n: usize, vars: &Coords) -> Result<LinDiffOp> {
    check_vars(domain, vars)?;
    let p = domain.rank();
    let expected = TensorShape::y_pn(domain.dim(), p, n);
    let symmetric_row = p <= n && domain.is_symmetric();
    if domain != &expected && !symmetric_row {
        return Err(Error::Shape(format!("{domain:?} is not of type Y^{p}_{n}")));
    }
    let (k, l) = (p / n, p % n);
    // last entry of column l in the output layout
    let new_slot = l * (k + 1) + k;
    let cod = TensorShape::y_pn(domain.dim(), p + 1, n);
    let e = young::young_projector_cols(&super::shape::y_pn_columns(p + 1, n))?;
    let terms: Vec<(Perm, Scalar)> = e.sorted_terms().into_iter().map(|(g, c)| (g, Scalar::rat(c))).collect();
    Ok(LinDiffOp::from_fn(domain.clone(), cod, vars.clone(), |o, b| {
        for (g, c) in &terms {
            let x = young::act(o, g);
            let rest = without(&x, &[new_slot]);
            b.add(&rest, d(x[new_slot]), c);
        }
    }))
}
