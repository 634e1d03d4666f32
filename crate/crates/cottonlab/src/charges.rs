//! Traceless conformal Killing tensors and conserved currents on a flat
//! Minkowski boundary, the charge current they build, and the chiral split
//! in two boundary dimensions.

use rand::Rng;

use crate::diffop::{LinDiffOp, LinearSystem};
use crate::error::{Error, Result};
use crate::exact::{Coords, ExactMatrix, Mono, Poly, Rat, Scalar};
use crate::tensor::{ops, Metric, TensorField, TensorShape};

/// Flat boundary of dimension `n = d − 1` with coordinates `x0 … x{n−1}`;
/// `x0` is time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySpace {
    n: usize,
    coords: Coords,
}

impl BoundarySpace {
    pub fn new(n: usize) -> Result<BoundarySpace> {
        if !(2..=8).contains(&n) {
            return Err(Error::Precondition(format!("boundary dimension {n} outside 2..=8")));
        }
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        Ok(BoundarySpace { n, coords: names.into() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Bulk dimension.
    pub fn d(&self) -> usize {
        self.n + 1
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn sym(&self, r: usize) -> TensorShape {
        TensorShape::symmetric(self.n, r).with_metric(Metric::Minkowski)
    }

    fn eta(&self, i: usize) -> i64 {
        Metric::Minkowski.diag(i as u8)
    }

    fn check(&self, f: &TensorField) -> Result<()> {
        if f.shape().dim() != self.n || f.shape().metric() != Metric::Minkowski || !f.shape().is_symmetric() {
            return Err(Error::Shape(format!("expected a symmetric Minkowski field of dimension {}", self.n)));
        }
        if f.coords()[..] != self.coords[..] {
            return Err(Error::UnknownCoordinate(format!("expected coordinates {:?}", &self.coords[..])));
        }
        Ok(())
    }
}

/// Exact basis of a bounded-degree polynomial solution space.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub space: BoundarySpace,
    pub rank: usize,
    pub max_degree: u32,
    pub basis: Vec<TensorField>,
}

impl SolutionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// `r/(n+2r−2)`, the trace coefficient of the rank-`r` equation.
pub fn killing_coefficient(r: usize, n: usize) -> Rat {
    Rat::new(r as i64, (n + 2 * r) as i64 - 2)
}

/// `∂_(I₁χ_{I₂…}) − c η_(I₁I₂ ∂·χ_{…})`.
pub fn killing_operator(r: usize, space: &BoundarySpace) -> Result<LinDiffOp> {
    if r == 0 {
        return Err(Error::Precondition("Killing tensors have rank at least 1".into()));
    }
    let sh = space.sym(r);
    let v = space.coords();
    let g = ops::sym_grad(&sh, v)?;
    let ed = ops::metric_insert(&space.sym(r - 1), v)?.compose(&ops::sym_div(&sh, v)?)?;
    g.add_scaled(&ed, &Scalar::rat(killing_coefficient(r, space.n()).neg()))
}

pub fn conformal_killing_solve(r: usize, space: &BoundarySpace, max_degree: u32) -> Result<SolutionSpace> {
    let sh = space.sym(r);
    let v = space.coords();
    let mut sys = LinearSystem::new(v.clone());
    let u = sys.unknown(sh.clone(), Mono::all_up_to(space.n(), max_degree));
    sys.equation(vec![(u, killing_operator(r, space)?)], None)?;
    if r >= 2 {
        sys.equation(vec![(u, ops::sym_trace(&sh, v)?)], None)?;
    }
    let basis = sys.solve()?.kernel.into_iter().map(|mut k| k.remove(0)).collect();
    Ok(SolutionSpace { space: space.clone(), rank: r, max_degree, basis })
}

pub fn current_solve(s: usize, space: &BoundarySpace, max_degree: u32) -> Result<SolutionSpace> {
    if s == 0 {
        return Err(Error::Precondition("currents have rank at least 1".into()));
    }
    let sh = space.sym(s);
    let v = space.coords();
    let mut sys = LinearSystem::new(v.clone());
    let u = sys.unknown(sh.clone(), Mono::all_up_to(space.n(), max_degree));
    sys.equation(vec![(u, ops::sym_div(&sh, v)?)], None)?;
    if s >= 2 {
        sys.equation(vec![(u, ops::sym_trace(&sh, v)?)], None)?;
    }
    let basis = sys.solve()?.kernel.into_iter().map(|mut k| k.remove(0)).collect();
    Ok(SolutionSpace { space: space.clone(), rank: s, max_degree, basis })
}

/// Residual of the traceless conformal Killing system: (equation, trace).
pub fn killing_residual(chi: &TensorField, space: &BoundarySpace) -> Result<(TensorField, Option<TensorField>)> {
    space.check(chi)?;
    let r = chi.shape().rank();
    let eq = killing_operator(r, space)?.apply(chi)?;
    let tr = if r >= 2 { Some(ops::sym_trace(chi.shape(), space.coords())?.apply(chi)?) } else { None };
    Ok((eq, tr))
}

pub fn is_killing(chi: &TensorField, space: &BoundarySpace) -> Result<bool> {
    let (eq, tr) = killing_residual(chi, space)?;
    Ok(eq.is_zero() && tr.is_none_or(|t| t.is_zero()))
}

fn for_each_index(n: usize, r: usize, mut f: impl FnMut(&[u8])) {
    let mut idx = vec![0u8; r];
    loop {
        f(&idx);
        let mut k = r;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if (idx[k] as usize) < n {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// `J_I = χ^{J…K} T_{IJ…K}`.
pub fn charge_current(chi: &TensorField, t: &TensorField, space: &BoundarySpace) -> Result<TensorField> {
    space.check(chi)?;
    space.check(t)?;
    let r = chi.shape().rank();
    if t.shape().rank() != r + 1 {
        return Err(Error::Shape(format!("Killing rank {r} needs a current of rank {}", r + 1)));
    }
    let n = space.n();
    Ok(TensorField::from_fn(space.sym(1), space.coords().clone(), |i| {
        let mut acc = Poly::zero(space.coords().clone());
        for_each_index(n, r, |js| {
            let sign: i64 = js.iter().map(|&j| space.eta(j as usize)).product();
            let mut full = vec![i[0]];
            full.extend_from_slice(js);
            let term = chi.get_full(js).mul(&t.get_full(&full));
            acc.add_scaled(&term, &Scalar::int(sign));
        });
        acc
    }))
}

/// `∂^I J_I`.
pub fn current_divergence(j: &TensorField, space: &BoundarySpace) -> Result<TensorField> {
    space.check(j)?;
    ops::sym_div(j.shape(), space.coords())?.apply(j)
}

/// `s(d+2s−5)`.
pub fn charge_normalization(s: usize, d: usize) -> Result<Rat> {
    if s == 0 || d < 3 {
        return Err(Error::Precondition(format!("need s ≥ 1 and d ≥ 3, got s={s}, d={d}")));
    }
    Ok(Rat::int(s as i64 * (d as i64 + 2 * s as i64 - 5)))
}

/// Light-cone split of a symmetric field in two boundary dimensions, with
/// `x^± = x0 ± x1`.
#[derive(Clone, Debug)]
pub struct ChiralSplit {
    /// `X^{+⋯+}` and `X^{−⋯−}` as fields on the boundary.
    pub upper_plus: Poly,
    pub upper_minus: Poly,
    /// Function of `x^+` (variable `u`) and of `x^−` (variable `u`).
    pub left: Poly,
    pub right: Poly,
}

fn light_cone_component(f: &TensorField, space: &BoundarySpace, plus: usize) -> Poly {
    let r = f.shape().rank();
    let mut acc = Poly::zero(space.coords().clone());
    for_each_index(2, r, |idx| {
        let mut sign = 1i64;
        for (k, &i) in idx.iter().enumerate() {
            sign *= space.eta(i as usize);
            if k >= plus && i == 1 {
                sign = -sign;
            }
        }
        acc.add_scaled(&f.get_full(idx), &Scalar::int(sign));
    });
    acc
}

/// `g(u)` with `p(x0, x1) = g(x0 + σ x1)`, or `None` when `p` is not of that form.
fn chiral_function(p: &Poly, sigma: i64) -> Result<Option<Poly>> {
    let dp = p.diff("x0")?.sub(&p.diff("x1")?.scale(&Scalar::int(sigma)));
    if !dp.is_zero() {
        return Ok(None);
    }
    let u = crate::exact::coords(&["u"]);
    let g = p.substitute("x1", &Poly::zero(p.coords().clone()))?;
    let mut out = Poly::zero(u.clone());
    for (m, c) in g.terms() {
        out.add_term(Mono::from_exps(&[m.0[0]]), c);
    }
    Ok(Some(out))
}

pub fn chiral_decompose(f: &TensorField, space: &BoundarySpace) -> Result<ChiralSplit> {
    if space.n() != 2 {
        return Err(Error::Precondition("the chiral split needs boundary dimension 2".into()));
    }
    space.check(f)?;
    let r = f.shape().rank();
    for a in 1..r {
        let mixed = light_cone_component(f, space, a);
        if !mixed.is_zero() {
            return Err(Error::Precondition(format!("mixed light-cone component with {a} plus indices is {mixed}")));
        }
    }
    let upper_plus = light_cone_component(f, space, r);
    let upper_minus = light_cone_component(f, space, 0);
    let zero = || Poly::zero(crate::exact::coords(&["u"]));
    let (left, right) = match (chiral_function(&upper_plus, 1)?, chiral_function(&upper_minus, -1)?) {
        (Some(l), Some(rt)) => (l, rt),
        _ => match (chiral_function(&upper_minus, 1)?, chiral_function(&upper_plus, -1)?) {
            (Some(l), Some(rt)) => (l, rt),
            _ if upper_plus.is_zero() && upper_minus.is_zero() => (zero(), zero()),
            _ => return Err(Error::Precondition("light-cone components are not chiral".into())),
        },
    };
    Ok(ChiralSplit { upper_plus, upper_minus, left, right })
}

/// Outcome of the derived identities for a rank-2 Killing tensor.
#[derive(Clone, Debug)]
pub struct KillingReport {
    pub d: usize,
    /// `∂_(I∂_J∂·χ_K) − (3/2d) η_(IJ∂_K)∂·∂·χ`
    pub kill1: TensorField,
    /// `□∂·∂·χ`, before the `(d−1)` factor.
    pub kill3: TensorField,
    /// `∂_I∂_J∂_K∂·∂·χ`, before the `(d−3)` factor.
    pub kill2: TensorField,
}

impl KillingReport {
    pub fn kill1_holds(&self) -> bool {
        self.kill1.is_zero()
    }

    pub fn kill3_holds(&self) -> bool {
        self.d == 1 || self.kill3.is_zero()
    }

    pub fn kill2_holds(&self) -> bool {
        self.d == 3 || self.kill2.is_zero()
    }

    pub fn all_hold(&self) -> bool {
        self.kill1_holds() && self.kill3_holds() && self.kill2_holds()
    }
}

pub fn killing_identity_check(chi: &TensorField, space: &BoundarySpace) -> Result<KillingReport> {
    space.check(chi)?;
    if chi.shape().rank() != 2 {
        return Err(Error::Shape("the identities concern rank-2 Killing tensors".into()));
    }
    if !is_killing(chi, space)? {
        return Err(Error::Precondition("input is not a traceless conformal Killing tensor".into()));
    }
    let v = space.coords();
    let d = space.d();
    let div1 = ops::sym_div(&space.sym(2), v)?.apply(chi)?;
    let div2 = ops::sym_div(&space.sym(1), v)?.apply(&div1)?;
    let g = |r: usize| ops::sym_grad(&space.sym(r), v);
    let ddd = g(2)?.compose(&g(1)?)?.apply(&div1)?;
    let eta_d = ops::metric_insert(&space.sym(1), v)?.compose(&g(0)?)?.apply(&div2)?;
    let kill1 = ddd.add(&eta_d.scale(&Scalar::frac(-3, 2 * d as i64)))?;
    let kill3 = ops::laplacian(&space.sym(0), v)?.apply(&div2)?;
    let kill2 = g(2)?.compose(&g(1)?)?.compose(&g(0)?)?.apply(&div2)?;
    let report = KillingReport { d, kill1, kill3, kill2 };
    if !report.all_hold() {
        return Err(Error::LemmaViolation(format!("Killing identity fails for d = {d}")));
    }
    Ok(report)
}

/// Irreducible parameter type of the rank-2 general solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Scalar,
    Vector,
    /// symmetric traceless `X_{IJ}`
    SymTraceless,
    /// `X_{K|I} = −X_{I|K}`
    Anti,
    /// `X_{IJ|K}`: symmetric in `IJ`, `X_{(IJ|K)} = 0`, traceless
    Hook,
    /// `X_{IJ|KL}`: symmetric in both pairs, `X_{(IJ|K)L} = 0`, traceless
    Window,
}

impl ParamKind {
    pub fn rank(self) -> usize {
        match self {
            ParamKind::Scalar => 0,
            ParamKind::Vector => 1,
            ParamKind::SymTraceless | ParamKind::Anti => 2,
            ParamKind::Hook => 3,
            ParamKind::Window => 4,
        }
    }

    /// Linear constraints on the `n^rank` row-major components.
    fn constraints(self, n: usize) -> Vec<Vec<(usize, i64)>> {
        let r = self.rank();
        let pos = |idx: &[u8]| idx.iter().fold(0usize, |a, &i| a * n + i as usize);
        let eta = |i: u8| Metric::Minkowski.diag(i);
        let mut out = Vec::new();
        let mut push = |terms: Vec<(usize, i64)>| {
            let mut t: Vec<(usize, i64)> = Vec::new();
            for (p, c) in terms {
                match t.iter_mut().find(|(q, _)| *q == p) {
                    Some(e) => e.1 += c,
                    None => t.push((p, c)),
                }
            }
            t.retain(|(_, c)| *c != 0);
            if !t.is_empty() {
                out.push(t);
            }
        };
        let swap = |idx: &[u8], a: usize, b: usize| {
            let mut j = idx.to_vec();
            j.swap(a, b);
            j
        };
        let traces = |slots: &[(usize, usize)], push: &mut dyn FnMut(Vec<(usize, i64)>)| {
            for &(a, b) in slots {
                for_each_index(n, r - 2, |rest| {
                    let mut terms = Vec::new();
                    for j in 0..n as u8 {
                        let mut idx = rest.to_vec();
                        idx.insert(a, j);
                        idx.insert(b, j);
                        terms.push((pos(&idx), eta(j)));
                    }
                    push(terms);
                });
            }
        };
        match self {
            ParamKind::Scalar | ParamKind::Vector => {}
            ParamKind::SymTraceless => {
                for_each_index(n, 2, |i| push(vec![(pos(i), 1), (pos(&swap(i, 0, 1)), -1)]));
                traces(&[(0, 1)], &mut push);
            }
            ParamKind::Anti => for_each_index(n, 2, |i| push(vec![(pos(i), 1), (pos(&swap(i, 0, 1)), 1)])),
            ParamKind::Hook => {
                for_each_index(n, 3, |i| {
                    push(vec![(pos(i), 1), (pos(&swap(i, 0, 1)), -1)]);
                    push(vec![(pos(i), 1), (pos(&[i[1], i[2], i[0]]), 1), (pos(&[i[2], i[0], i[1]]), 1)]);
                });
                traces(&[(0, 1), (0, 2)], &mut push);
            }
            ParamKind::Window => {
                for_each_index(n, 4, |i| {
                    push(vec![(pos(i), 1), (pos(&swap(i, 0, 1)), -1)]);
                    push(vec![(pos(i), 1), (pos(&swap(i, 2, 3)), -1)]);
                    push(vec![(pos(i), 1), (pos(&[i[1], i[2], i[0], i[3]]), 1), (pos(&[i[2], i[0], i[1], i[3]]), 1)]);
                });
                traces(&[(0, 1), (0, 2), (2, 3)], &mut push);
            }
        }
        out
    }

    /// Basis of the allowed component vectors.
    pub fn basis(self, n: usize) -> Vec<Vec<Rat>> {
        let size = n.pow(self.rank() as u32);
        let rows: Vec<Vec<Scalar>> = self
            .constraints(n)
            .into_iter()
            .map(|c| {
                let mut row = vec![Scalar::ZERO; size];
                for (p, k) in c {
                    row[p] = Scalar::int(k);
                }
                row
            })
            .collect();
        if rows.is_empty() {
            return (0..size).map(|i| (0..size).map(|j| Rat::int((i == j) as i64)).collect()).collect();
        }
        ExactMatrix::from_rows(rows)
            .expect("rectangular")
            .nullspace()
            .into_iter()
            .map(|v| v.into_iter().map(|s| s.rational_part().clone()).collect())
            .collect()
    }

    pub fn check(self, comps: &[Rat], n: usize) -> Result<()> {
        if comps.len() != n.pow(self.rank() as u32) {
            return Err(Error::Shape(format!("{self:?} parameter needs {} components", n.pow(self.rank() as u32))));
        }
        for c in self.constraints(n) {
            let v = c.iter().fold(Rat::ZERO, |a, (p, k)| a.add(&comps[*p].mul(&Rat::int(*k))));
            if !v.is_zero() {
                return Err(Error::Precondition(format!("{self:?} parameter is not irreducible-traceless")));
            }
        }
        Ok(())
    }
}

/// Constant parameters of the rank-2 general solution, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Rank2Pack {
    pub a: Vec<Rat>,
    pub b: Vec<Rat>,
    pub omega: Vec<Rat>,
    pub lambda: Rat,
    pub rho: Vec<Rat>,
    pub c: Vec<Rat>,
    pub big_omega: Vec<Rat>,
    pub b_tilde: Vec<Rat>,
    pub omega_tilde: Vec<Rat>,
    pub c_tilde: Vec<Rat>,
}

pub const PACK_KINDS: [(&str, ParamKind); 10] = [
    ("a", ParamKind::SymTraceless),
    ("b", ParamKind::Vector),
    ("omega", ParamKind::Hook),
    ("lambda", ParamKind::Scalar),
    ("rho", ParamKind::Anti),
    ("c", ParamKind::SymTraceless),
    ("big_omega", ParamKind::Window),
    ("b_tilde", ParamKind::Vector),
    ("omega_tilde", ParamKind::Hook),
    ("c_tilde", ParamKind::SymTraceless),
];

impl Rank2Pack {
    pub fn zero(n: usize) -> Rank2Pack {
        let z = |k: ParamKind| vec![Rat::ZERO; n.pow(k.rank() as u32)];
        let mut fields: Vec<Vec<Rat>> = PACK_KINDS.iter().map(|(_, k)| z(*k)).collect();
        Rank2Pack::from_parts(&mut fields)
    }

    fn from_parts(f: &mut [Vec<Rat>]) -> Rank2Pack {
        let mut take = |i: usize| std::mem::take(&mut f[i]);
        let lambda = take(3).into_iter().next().unwrap_or(Rat::ZERO);
        Rank2Pack {
            a: take(0),
            b: take(1),
            omega: take(2),
            lambda,
            rho: take(4),
            c: take(5),
            big_omega: take(6),
            b_tilde: take(7),
            omega_tilde: take(8),
            c_tilde: take(9),
        }
    }

    pub fn parts(&self) -> [&[Rat]; 10] {
        [
            &self.a,
            &self.b,
            &self.omega,
            std::slice::from_ref(&self.lambda),
            &self.rho,
            &self.c,
            &self.big_omega,
            &self.b_tilde,
            &self.omega_tilde,
            &self.c_tilde,
        ]
    }

    /// Random combination of each parameter's allowed basis, coefficients in `−3..=3`.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Rank2Pack {
        let mut fields: Vec<Vec<Rat>> = PACK_KINDS
            .iter()
            .map(|(_, k)| {
                let mut v = vec![Rat::ZERO; n.pow(k.rank() as u32)];
                for b in k.basis(n) {
                    let c = Rat::int(rng.gen_range(-3..=3));
                    for (x, y) in v.iter_mut().zip(&b) {
                        *x = x.add(&y.mul(&c));
                    }
                }
                v
            })
            .collect();
        Rank2Pack::from_parts(&mut fields)
    }

    /// Pack with one parameter set to `comps` and the rest zero.
    pub fn single(n: usize, name: &str, comps: Vec<Rat>) -> Result<Rank2Pack> {
        let i = PACK_KINDS
            .iter()
            .position(|(k, _)| *k == name)
            .ok_or_else(|| Error::Precondition(format!("unknown parameter `{name}`")))?;
        let mut fields: Vec<Vec<Rat>> = PACK_KINDS.iter().map(|(_, k)| vec![Rat::ZERO; n.pow(k.rank() as u32)]).collect();
        fields[i] = comps;
        Ok(Rank2Pack::from_parts(&mut fields))
    }

    pub fn check(&self, n: usize) -> Result<()> {
        for ((name, k), comps) in PACK_KINDS.iter().zip(self.parts()) {
            k.check(comps, n).map_err(|e| Error::Precondition(format!("parameter `{name}`: {e}")))?;
        }
        Ok(())
    }
}

/// Assembles `χ_{IJ}` from the ten irreducible parameters.
pub fn rank2_general_solution(space: &BoundarySpace, pack: &Rank2Pack) -> Result<TensorField> {
    let n = space.n();
    if n < 4 {
        return Err(Error::Precondition("the full parameter pack needs n ≥ 4".into()));
    }
    pack.check(n)?;
    let v = space.coords();
    let k = |r: &Rat| Scalar::rat(r.clone());
    let eta = |i: usize| space.eta(i);
    let xu: Vec<Poly> = v.iter().map(|c| Poly::var(v.clone(), c).expect("own coordinate")).collect();
    let xl: Vec<Poly> = (0..n).map(|i| xu[i].scale(&Scalar::int(eta(i)))).collect();
    let x2 = (0..n).fold(Poly::zero(v.clone()), |a, i| a.add(&xu[i].mul(&xl[i])));
    let x4 = x2.mul(&x2);
    let one = Poly::constant(v.clone(), Scalar::ONE);
    let inv_n = Scalar::frac(1, n as i64);
    let lin = |w: &[Rat]| (0..n).fold(Poly::zero(v.clone()), |a, i| a.add(&xu[i].scale(&k(&w[i]))));
    let quad = |w: &[Rat]| {
        let mut p = Poly::zero(v.clone());
        for i in 0..n {
            for j in 0..n {
                p.add_assign(&xu[i].mul(&xu[j]).scale(&k(&w[i * n + j])));
            }
        }
        p
    };
    let (a, b, om, rho, c) = (&pack.a, &pack.b, &pack.omega, &pack.rho, &pack.c);
    let (bo, bt, ot, ct) = (&pack.big_omega, &pack.b_tilde, &pack.omega_tilde, &pack.c_tilde);
    let bx = lin(b);
    let btx = lin(bt);
    let cxx = quad(c);
    let ctxx = quad(ct);
    let unsym = |i: usize, j: usize| -> Poly {
        let ij = i * n + j;
        let mut f = one.scale(&k(&a[ij]));
        let trace_part = |p: &Poly| if i == j { p.scale(&Scalar::int(eta(i))) } else { Poly::zero(v.clone()) };
        f.add_assign(&xl[j].scale(&k(&b[i])));
        f.add_assign(&trace_part(&bx).scale(&inv_n.neg()));
        f.add_assign(&lin(&om[ij * n..ij * n + n]));
        let xx = xl[i].mul(&xl[j]);
        f.add_assign(&xx.sub(&trace_part(&x2).scale(&inv_n)).scale(&k(&pack.lambda)));
        for kk in 0..n {
            f.add_assign(&xl[j].mul(&xu[kk]).scale(&k(&rho[kk * n + i])));
            f.add_assign(&xl[j].mul(&xu[kk]).scale(&k(&c[kk * n + i]).mul_int(2)));
        }
        f.add_assign(&x2.scale(&k(&c[ij]).neg()));
        f.add_assign(&trace_part(&cxx).scale(&inv_n.mul_int(-2)));
        f.add_assign(&quad(&bo[ij * n * n..(ij + 1) * n * n]));
        f.add_assign(&xx.mul(&btx).scale(&Scalar::int(2)));
        f.add_assign(&xl[j].mul(&x2).scale(&k(&bt[i]).neg()));
        f.add_assign(&trace_part(&btx.mul(&x2)).scale(&inv_n.neg()));
        for kk in 0..n {
            for l in 0..n {
                let w = &ot[(kk * n + l) * n + i];
                f.add_assign(&xl[j].mul(&xu[kk]).mul(&xu[l]).scale(&k(w).mul_int(2)));
            }
        }
        f.add_assign(&lin(&ot[ij * n..ij * n + n]).mul(&x2));
        f.add_assign(&xx.mul(&ctxx).scale(&Scalar::int(4)));
        for l in 0..n {
            f.add_assign(&xl[j].mul(&xu[l]).mul(&x2).scale(&k(&ct[i * n + l]).mul_int(-4)));
        }
        f.add_assign(&x4.scale(&k(&ct[ij])));
        f
    };
    let half = Scalar::frac(1, 2);
    Ok(TensorField::from_fn(space.sym(2), v.clone(), |idx| {
        let (i, j) = (idx[0] as usize, idx[1] as usize);
        unsym(i, j).add(&unsym(j, i)).scale(&half)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bs(n: usize) -> BoundarySpace {
        BoundarySpace::new(n).unwrap()
    }

    #[test]
    fn killing_dimensions() {
        assert_eq!(conformal_killing_solve(1, &bs(3), 2).unwrap().dim(), 10);
        assert_eq!(conformal_killing_solve(1, &bs(3), 3).unwrap().dim(), 10);
        assert_eq!(conformal_killing_solve(2, &bs(3), 4).unwrap().dim(), 35);
        assert_eq!(conformal_killing_solve(2, &bs(3), 5).unwrap().dim(), 35);
        for n in 0..4 {
            assert_eq!(conformal_killing_solve(2, &bs(2), n).unwrap().dim(), 2 * (n as usize + 1));
        }
    }

    #[test]
    fn killing_dimension_formula() {
        // (d−2)(d+1)(d+2)(d+3)/12
        let d = 5;
        let sp = conformal_killing_solve(2, &bs(d - 1), 4).unwrap();
        assert_eq!(sp.dim(), (d - 2) * (d + 1) * (d + 2) * (d + 3) / 12);
    }

    #[test]
    fn basis_elements_are_traceless_solutions() {
        let s = bs(3);
        for chi in conformal_killing_solve(2, &s, 4).unwrap().basis {
            assert!(is_killing(&chi, &s).unwrap());
        }
        for t in current_solve(3, &s, 2).unwrap().basis {
            assert!(ops::sym_div(t.shape(), s.coords()).unwrap().apply(&t).unwrap().is_zero());
            assert!(ops::sym_trace(t.shape(), s.coords()).unwrap().apply(&t).unwrap().is_zero());
        }
    }

    #[test]
    fn constant_currents() {
        assert_eq!(current_solve(2, &bs(3), 0).unwrap().dim(), 5);
    }

    #[test]
    fn charge_conservation() {
        for (s, n, nk, nc) in [(2, 3, 2, 2), (3, 3, 4, 2), (3, 2, 4, 3), (4, 3, 6, 1)] {
            let sp = bs(n);
            let ks = conformal_killing_solve(s - 1, &sp, nk).unwrap();
            let cs = current_solve(s, &sp, nc).unwrap();
            assert!(ks.dim() > 0 && cs.dim() > 0);
            for chi in &ks.basis {
                for t in &cs.basis {
                    let j = charge_current(chi, t, &sp).unwrap();
                    assert!(current_divergence(&j, &sp).unwrap().is_zero(), "s={s} n={n}");
                }
            }
        }
    }

    #[test]
    fn non_killing_control() {
        let sp = bs(3);
        let x0 = Poly::var(sp.coords().clone(), "x0").unwrap();
        // χ_{11} = −χ_{22} = x0² is traceless but not Killing
        let mut chi = TensorField::zero(sp.sym(2), sp.coords().clone());
        chi.set_full(&[1, 1], x0.mul(&x0)).unwrap();
        chi.set_full(&[2, 2], x0.mul(&x0).neg()).unwrap();
        assert!(!is_killing(&chi, &sp).unwrap());
        let ts = current_solve(3, &sp, 1).unwrap();
        let broken = ts.basis.iter().any(|t| {
            let j = charge_current(&chi, t, &sp).unwrap();
            !current_divergence(&j, &sp).unwrap().is_zero()
        });
        assert!(broken);
    }

    #[test]
    fn current_rank_mismatch() {
        let sp = bs(3);
        let chi = TensorField::zero(sp.sym(1), sp.coords().clone());
        let t = TensorField::zero(sp.sym(3), sp.coords().clone());
        assert!(matches!(charge_current(&chi, &t, &sp), Err(Error::Shape(_))));
    }

    #[test]
    fn normalization_values() {
        assert_eq!(charge_normalization(3, 4).unwrap(), Rat::int(15));
        assert_eq!(charge_normalization(2, 4).unwrap(), Rat::int(6));
        assert_eq!(charge_normalization(3, 3).unwrap(), Rat::int(12));
        for d in 3..10 {
            assert_eq!(charge_normalization(3, d).unwrap(), Rat::int(3 * (d as i64 + 1)));
        }
        assert!(charge_normalization(0, 4).is_err());
    }

    #[test]
    fn chiral_plus_square() {
        let sp = bs(2);
        let v = sp.coords().clone();
        let xp = Poly::var(v.clone(), "x0").unwrap().add(&Poly::var(v.clone(), "x1").unwrap());
        let f = xp.mul(&xp).scale(&Scalar::frac(1, 4));
        let mut chi = TensorField::zero(sp.sym(2), v);
        chi.set_full(&[0, 0], f.clone()).unwrap();
        chi.set_full(&[0, 1], f.neg()).unwrap();
        chi.set_full(&[1, 1], f).unwrap();
        assert!(is_killing(&chi, &sp).unwrap());
        let split = chiral_decompose(&chi, &sp).unwrap();
        assert_eq!(split.upper_plus, xp.mul(&xp));
        assert_eq!(split.left.degree(), Some(2));
        assert!(split.right.is_zero());
    }

    #[test]
    fn chiral_split_of_solver_bases() {
        let sp = bs(2);
        for chi in conformal_killing_solve(2, &sp, 3).unwrap().basis {
            chiral_decompose(&chi, &sp).unwrap();
        }
        for t in current_solve(3, &sp, 2).unwrap().basis {
            let split = chiral_decompose(&t, &sp).unwrap();
            assert!(!split.left.is_zero() || !split.right.is_zero());
        }
    }

    #[test]
    fn chiral_rejects_trace() {
        let sp = bs(2);
        let mut eta = TensorField::zero(sp.sym(2), sp.coords().clone());
        eta.set_full(&[0, 0], Poly::constant(sp.coords().clone(), Scalar::int(-1))).unwrap();
        eta.set_full(&[1, 1], Poly::constant(sp.coords().clone(), Scalar::ONE)).unwrap();
        assert!(matches!(chiral_decompose(&eta, &sp), Err(Error::Precondition(_))));
    }

    #[test]
    fn killing_identities_on_basis() {
        let sp = bs(3);
        let ks = conformal_killing_solve(2, &sp, 4).unwrap();
        let mut nontrivial = false;
        for chi in &ks.basis {
            let rep = killing_identity_check(chi, &sp).unwrap();
            assert!(rep.all_hold());
            let dd = ops::sym_div(&sp.sym(1), sp.coords())
                .unwrap()
                .apply(&ops::sym_div(&sp.sym(2), sp.coords()).unwrap().apply(chi).unwrap())
                .unwrap();
            nontrivial |= dd.degree().unwrap_or(0) > 0;
        }
        assert!(nontrivial);
    }

    #[test]
    fn kill2_unavailable_in_two_dimensions() {
        let sp = bs(2);
        let v = sp.coords().clone();
        let xp = Poly::var(v.clone(), "x0").unwrap().add(&Poly::var(v.clone(), "x1").unwrap());
        let f = xp.pow(5).scale(&Scalar::frac(1, 4));
        let mut chi = TensorField::zero(sp.sym(2), v);
        chi.set_full(&[0, 0], f.clone()).unwrap();
        chi.set_full(&[0, 1], f.neg()).unwrap();
        chi.set_full(&[1, 1], f).unwrap();
        let rep = killing_identity_check(&chi, &sp).unwrap();
        assert!(!rep.kill2.is_zero());
        assert!(rep.kill2_holds());
        assert!(rep.kill1_holds() && rep.kill3_holds());
    }

    #[test]
    fn param_basis_sizes() {
        // irreducible dimensions of o(n) tableaux at n = 4
        let n = 4;
        assert_eq!(ParamKind::SymTraceless.basis(n).len(), 9);
        assert_eq!(ParamKind::Anti.basis(n).len(), 6);
        assert_eq!(ParamKind::Hook.basis(n).len(), 16);
        assert_eq!(ParamKind::Window.basis(n).len(), 10);
    }

    #[test]
    fn lambda_and_a_terms() {
        let sp = bs(4);
        let p = Rank2Pack::single(4, "lambda", vec![Rat::int(1)]).unwrap();
        let chi = rank2_general_solution(&sp, &p).unwrap();
        assert!(is_killing(&chi, &sp).unwrap());
        let a = ParamKind::SymTraceless.basis(4)[0].clone();
        let chi = rank2_general_solution(&sp, &Rank2Pack::single(4, "a", a).unwrap()).unwrap();
        assert_eq!(chi.degree(), Some(0));
        assert!(is_killing(&chi, &sp).unwrap());
    }

    #[test]
    fn each_parameter_solves() {
        let sp = bs(4);
        for (name, kind) in PACK_KINDS {
            for b in kind.basis(4) {
                let chi = rank2_general_solution(&sp, &Rank2Pack::single(4, name, b).unwrap()).unwrap();
                let (eq, tr) = killing_residual(&chi, &sp).unwrap();
                assert!(tr.unwrap().is_zero(), "{name} trace");
                assert!(eq.is_zero(), "{name} equation");
            }
        }
    }

    #[test]
    fn random_pack_solves() {
        let sp = bs(4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let p = Rank2Pack::random(4, &mut rng);
            let chi = rank2_general_solution(&sp, &p).unwrap();
            assert!(is_killing(&chi, &sp).unwrap());
        }
    }

    #[test]
    fn pack_spans_solution_space() {
        let sp = bs(4);
        let mut fields = Vec::new();
        for (name, kind) in PACK_KINDS {
            for b in kind.basis(4) {
                fields.push(rank2_general_solution(&sp, &Rank2Pack::single(4, name, b).unwrap()).unwrap());
            }
        }
        let mut cols = std::collections::BTreeMap::new();
        let rows: Vec<Vec<(usize, Scalar)>> = fields
            .iter()
            .map(|f| {
                let mut row = Vec::new();
                for (pos, p) in f.components() {
                    for (m, c) in p.terms() {
                        let next = cols.len();
                        row.push((*cols.entry((*pos, *m)).or_insert(next), c.clone()));
                    }
                }
                row
            })
            .collect();
        let mut m = ExactMatrix::zeros(rows.len(), cols.len());
        for (i, r) in rows.into_iter().enumerate() {
            for (j, c) in r {
                m.set(i, j, c);
            }
        }
        assert_eq!(m.rank(), conformal_killing_solve(2, &sp, 4).unwrap().dim());
    }

    #[test]
    fn rejects_reducible_parameter() {
        let sp = bs(4);
        let mut a = vec![Rat::ZERO; 16];
        a[5] = Rat::int(1);
        assert!(matches!(
            rank2_general_solution(&sp, &Rank2Pack::single(4, "a", a).unwrap()),
            Err(Error::Precondition(_))
        ));
    }
}
