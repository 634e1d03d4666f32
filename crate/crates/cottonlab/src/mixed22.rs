//! The two-column (2,2) field in five spatial dimensions: curvature,
//! Einstein, Schouten and Cotton operators, the prepotential relation,
//! chiral equations of motion, Hamiltonian identities and the reduction to
//! four-dimensional gravitational prepotentials.

use crate::diffop::{BilinForm, LinDiffOp, LinearSystem, QForm};
use crate::error::{Error, Result};
use crate::exact::{coords, Coords, Mono, Poly, Rat, Scalar};
use crate::tensor::ops::{self, levi_civita};
use crate::random::random_field;
use crate::tensor::young::{young_projector_cols, GroupAlgebra};
use crate::tensor::{Block, Metric, Symmetry, TensorField, TensorShape};

/// `x1 … x5`.
pub fn space5() -> Coords {
    coords(&["x1", "x2", "x3", "x4", "x5"])
}

/// `t, x1 … x5`.
pub fn spacetime6() -> Coords {
    coords(&["t", "x1", "x2", "x3", "x4", "x5"])
}

fn vars_t() -> Coords {
    coords(&["x1", "x2", "x3", "x4", "x5", "t"])
}

fn young(dim: usize, cols: &[u8]) -> TensorShape {
    let rank = cols.iter().map(|&c| c as usize).sum();
    TensorShape::new(dim, Metric::Euclidean, Symmetry::YoungCols(cols.to_vec()), rank).expect("valid Young shape")
}

/// `T_{[ij][kl]}` with `T_{[ijk]l} = 0`, `D = 5`.
pub fn field22() -> TensorShape {
    young(5, &[2, 2])
}

/// `ξ_{[ij]k}` with `ξ_{[ijk]} = 0`, `D = 5`.
pub fn hook21() -> TensorShape {
    young(5, &[2, 1])
}

fn sym2() -> TensorShape {
    TensorShape::symmetric(5, 2)
}

fn blocks(dim: usize, b: Vec<Block>) -> TensorShape {
    TensorShape::blocks(dim, Metric::Euclidean, b)
}

/// Idempotent Young symmetrizer `(4/3)·A·S`: symmetrize the rows
/// `{0,2}`, `{1,3}`, then antisymmetrize the columns `{0,1}`, `{2,3}`.
pub fn symmetrizer22() -> Result<GroupAlgebra> {
    let a = GroupAlgebra::young_subgroup(4, &[vec![0, 1], vec![2, 3]], true);
    let s = GroupAlgebra::young_subgroup(4, &[vec![0, 2], vec![1, 3]], false);
    a.mul(&s).normalized()
}

/// `𝒫_{(2,2)}` from any rank-4 shape.
pub fn projector22(domain: &TensorShape) -> Result<LinDiffOp> {
    ops::project(domain, &symmetrizer22()?, &young(domain.dim(), &[2, 2]), &space5())
}

/// `R_{abc def} = ∂_{[a}T_{bc][de,f]}`, both antisymmetrizations of weight one.
pub fn riemann22() -> LinDiffOp {
    let cod = blocks(5, vec![Block::Anti(3), Block::Anti(3)]);
    let perms: [([usize; 3], i64); 6] =
        [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([1, 0, 2], -1), ([0, 2, 1], -1), ([2, 1, 0], -1)];
    let w = Scalar::frac(1, 36);
    LinDiffOp::from_fn(field22(), cod, space5(), |o, b| {
        for (p, sp) in &perms {
            for (q, sq) in &perms {
                let (a, bb, c) = (o[p[0]], o[p[1]], o[p[2]]);
                let (d, e, f) = (o[3 + q[0]], o[3 + q[1]], o[3 + q[2]]);
                let m = Mono::var(a as usize).mul(&Mono::var(f as usize));
                b.add(&[bb, c, d, e], m, &w.mul_int(sp * sq));
            }
        }
    })
}

fn pair_shape() -> TensorShape {
    blocks(5, vec![Block::Anti(2), Block::Anti(2)])
}

fn as22(op: &LinDiffOp) -> Result<LinDiffOp> {
    op.with_shapes(op.domain().clone(), field22())
}

/// `Σ_m X_{m j m l}` as an unsymmetrized rank-2 tensor.
fn trace02(domain: &TensorShape) -> LinDiffOp {
    LinDiffOp::from_fn(domain.clone(), TensorShape::none(5, 2), space5(), |o, b| {
        for m in 0..5u8 {
            b.add(&[m, o[0], m, o[1]], Mono::ONE, &Scalar::ONE);
        }
    })
}

/// `δ^{[i}_{[k} Y^{j]}_{l]}`.
fn insert1() -> LinDiffOp {
    LinDiffOp::from_fn(TensorShape::none(5, 2), field22(), space5(), |o, b| {
        let (i, j, k, l) = (o[0], o[1], o[2], o[3]);
        let q = Scalar::frac(1, 4);
        if i == k {
            b.add(&[j, l], Mono::ONE, &q);
        }
        if j == k {
            b.add(&[i, l], Mono::ONE, &q.neg());
        }
        if i == l {
            b.add(&[j, k], Mono::ONE, &q.neg());
        }
        if j == l {
            b.add(&[i, k], Mono::ONE, &q);
        }
    })
}

/// `δ^i_{[k}δ^j_{l]} Y`.
fn insert0() -> LinDiffOp {
    LinDiffOp::from_fn(TensorShape::scalar(5), field22(), space5(), |o, b| {
        let h = Scalar::frac(1, 2);
        if o[0] == o[2] && o[1] == o[3] {
            b.add(&[], Mono::ONE, &h);
        }
        if o[0] == o[3] && o[1] == o[2] {
            b.add(&[], Mono::ONE, &h.neg());
        }
    })
}

fn trace2() -> Result<LinDiffOp> {
    ops::trace(&TensorShape::none(5, 2), 0, 1, &space5())
}

/// `X − 2δ_{[}X̄_{]} + ⅓δδX̄̄` for an operator into `field22`.
fn trace_adjust(x: &LinDiffOp) -> Result<LinDiffOp> {
    let bar = trace02(&field22()).compose(x)?;
    let bbar = trace2()?.compose(&bar)?;
    x.add_scaled(&insert1().compose(&bar)?, &Scalar::int(-2))?
        .add_scaled(&insert0().compose(&bbar)?, &Scalar::frac(1, 3))
}

/// Double dual `(1/3!)² R^{abc def} ε_{abc ij} ε_{def kl}`.
pub fn einstein22() -> Result<LinDiffOp> {
    let r = riemann22();
    let v = space5();
    let e1 = ops::eps_contract(r.codomain(), &[0, 1, 2], &v)?.compose(&r)?;
    let e2 = ops::eps_contract(e1.codomain(), &[2, 3, 4], &v)?.compose(&e1)?;
    // the second dual's free pair comes first
    let swap = ops::permute(&pair_shape(), &[2, 3, 0, 1], &field22(), &v)?;
    swap.compose(&e2.with_shapes(field22(), pair_shape())?)
}

/// `R̄ − 2δ_{[}R̄̄_{]} + ⅓δδR̄̄̄`.
pub fn einstein22_traces() -> Result<LinDiffOp> {
    let r = riemann22();
    let tr = LinDiffOp::from_fn(r.codomain().clone(), field22(), space5(), |o, b| {
        for m in 0..5u8 {
            b.add(&[m, o[0], o[1], m, o[2], o[3]], Mono::ONE, &Scalar::ONE);
        }
    });
    trace_adjust(&tr.compose(&r)?)
}

pub fn schouten22() -> Result<LinDiffOp> {
    trace_adjust(&einstein22()?)
}

/// `(1/3!) ε_{ijabc} ∂^a X^{bc}{}_{kl}`.
fn dual_curl() -> Result<LinDiffOp> {
    let v = space5();
    let g = ops::grad(&field22(), &v)?;
    as22(&ops::eps_contract(g.codomain(), &[0, 1, 2], &v)?.compose(&g)?)
}

pub fn cotton22() -> Result<LinDiffOp> {
    dual_curl()?.compose(&schouten22()?)
}

/// `𝒫_{(2,2)}((1/3!) ε_{ij}{}^{kmn} ∂_k Z_{mnrs})`.
pub fn t_from_z() -> Result<LinDiffOp> {
    let v = space5();
    let g = ops::grad(&field22(), &v)?;
    let e = ops::eps_contract(g.codomain(), &[0, 1, 2], &v)?.compose(&g)?;
    projector22(e.codomain())?.compose(&e)
}

/// `λ_{ir} ↦ 𝒫_{(2,2)}(λ_{ir}δ_{js})`.
pub fn weyl22() -> Result<LinDiffOp> {
    let x = LinDiffOp::from_fn(sym2(), TensorShape::none(5, 4), space5(), |o, b| {
        if o[1] == o[3] {
            b.add(&[o[0], o[2]], Mono::ONE, &Scalar::ONE);
        }
    });
    projector22(x.codomain())?.compose(&x)
}

/// `ξ_{rsj} ↦ 𝒫_{(2,2)}(∂_i ξ_{rsj})`.
pub fn diffeo22() -> Result<LinDiffOp> {
    let x = LinDiffOp::from_fn(hook21(), TensorShape::none(5, 4), space5(), |o, b| {
        b.add(&[o[2], o[3], o[1]], Mono::var(o[0] as usize), &Scalar::ONE);
    });
    projector22(x.codomain())?.compose(&x)
}

/// Spatial restriction of the covariant gauge map, `𝒫_{(2,2)}(∂_l α_{ijk})`.
pub fn gauge22() -> Result<LinDiffOp> {
    let x = LinDiffOp::from_fn(hook21(), TensorShape::none(5, 4), space5(), |o, b| {
        b.add(&[o[0], o[1], o[2]], Mono::var(o[3] as usize), &Scalar::ONE);
    });
    projector22(x.codomain())?.compose(&x)
}

/// `½ ε^{mnijk} ∂_k X_{ij}{}^{rs}`.
pub fn curl22() -> Result<LinDiffOp> {
    let v = space5();
    let g = ops::grad(&field22(), &v)?;
    let e = ops::eps_contract(g.codomain(), &[1, 2, 0], &v)?.compose(&g)?;
    Ok(as22(&e)?.scale(&Scalar::int(3)))
}

fn in_time(op: &LinDiffOp) -> Result<LinDiffOp> {
    op.with_vars(&vars_t())
}

fn dt(shape: &TensorShape) -> Result<LinDiffOp> {
    ops::partial(shape, &vars_t(), "t")
}

/// `Ḃ[Z] − ½ ε^{mnijk}∂_k B_{ij}{}^{rs}[Z]`.
pub fn eom22_operator() -> Result<LinDiffOp> {
    let b = in_time(&cotton22()?)?;
    let k = in_time(&curl22()?)?;
    dt(&field22())?.compose(&b)?.sub(&k.compose(&b)?)
}

pub fn eom22_residual(z: &TensorField) -> Result<TensorField> {
    if z.shape() != &field22() {
        return Err(Error::Shape("expected a (2,2) field in five dimensions".into()));
    }
    if z.coords()[..] != spacetime6()[..] {
        return Err(Error::UnknownCoordinate("coordinates must be t, x1 … x5".into()));
    }
    eom22_operator()?.apply(z)
}

/// Bounded-degree solution of the chiral equation depending on `t, x1, x2`
/// only, with nonzero Cotton tensor.
pub fn eom22_solution(deg: u32) -> Result<TensorField> {
    let monos: Vec<Mono> = Mono::all_of_degree(3, deg).into_iter().map(|m| Mono::from_exps(&[m.0[0], m.0[1], m.0[2]])).collect();
    let mut sys = LinearSystem::new(spacetime6());
    let u = sys.unknown(field22(), monos);
    let p = in_time(&projector22(&field22())?)?;
    sys.equation(vec![(u, eom22_operator()?.compose(&p)?)], None)?;
    let sol = sys.solve()?;
    let b = in_time(&cotton22()?)?;
    for mut k in sol.kernel {
        let z = p.apply(&k.remove(0))?;
        if !b.apply(&z)?.is_zero() {
            return Ok(z);
        }
    }
    Err(Error::NoSolution(format!("no solution with nonzero Cotton tensor at degree {deg}")))
}

/// Outcome of the Hamiltonian identities, each an equality modulo total
/// derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ham22Report {
    /// `π·Ṫ ≡ 2 Z⁽¹⁾·Ḃ[Z⁽²⁾]` with `π = G[Z⁽¹⁾]`, `T = ⅓𝒫(ε∂Z⁽²⁾)`.
    pub kinetic: bool,
    /// `G[Z]·S[Z] ≡ (1/3!) Z·ε∂B[Z]`.
    pub potential: bool,
    /// `3(π·π − 2π̄·π̄ + ⅓π̄̄²) = 3 G·S` on `π = G[Z]`.
    pub h_pi: bool,
    /// The action equals `S⁺[Z⁺] − S⁻[Z⁻]`.
    pub split: bool,
    /// No `Z⁺Z⁻` terms survive.
    pub cross_terms_vanish: bool,
}

impl Ham22Report {
    pub fn all_hold(&self) -> bool {
        self.kinetic && self.potential && self.h_pi && self.split && self.cross_terms_vanish
    }
}

fn sym_form(f: &BilinForm) -> Result<BilinForm> {
    Ok(f.add(&f.transpose())?.normal_form())
}

/// `T = ⅓𝒫(ε∂Z)`, twice the prepotential map of the chiral theory.
pub fn t_from_z_hamiltonian() -> Result<LinDiffOp> {
    Ok(t_from_z()?.scale(&Scalar::int(2)))
}

/// `π·Ṫ − ℋ_π − ℋ_T` on the doublet `(Z⁽¹⁾, Z⁽²⁾)`.
pub fn action22_doublet() -> Result<QForm> {
    let p = in_time(&projector22(&field22())?)?;
    let g = in_time(&einstein22()?)?.compose(&p)?;
    let s = in_time(&schouten22()?)?.compose(&p)?;
    let t = in_time(&t_from_z_hamiltonian()?)?.compose(&p)?;
    let kin = BilinForm::from_ops(&g, &dt(&field22())?.compose(&t)?)?;
    let pot = BilinForm::from_ops(&g, &s)?.scale(&Scalar::int(-3));
    let z = kin.scale(&Scalar::ZERO);
    Ok(QForm { blocks: [[pot.clone(), kin], [z, pot]] })
}

/// `½ Z·(Ḃ[Z] ∓ ½ε∂B[Z])` for the chiral (`+`) and anti-chiral (`−`) actions.
pub fn chiral_action22(sign: i64) -> Result<BilinForm> {
    let p = in_time(&projector22(&field22())?)?;
    let b = in_time(&cotton22()?)?.compose(&p)?;
    let k = in_time(&curl22()?)?.compose(&b)?;
    let l = dt(&field22())?.compose(&b)?.add_scaled(&k, &Scalar::int(-sign))?;
    Ok(BilinForm::from_ops(&p, &l)?.scale(&Scalar::frac(1, 2)))
}

pub fn ham22_split_check() -> Result<Ham22Report> {
    let p = in_time(&projector22(&field22())?)?;
    let g = in_time(&einstein22()?)?.compose(&p)?;
    let s = in_time(&schouten22()?)?.compose(&p)?;
    let b = in_time(&cotton22()?)?.compose(&p)?;
    let t = in_time(&t_from_z_hamiltonian()?)?.compose(&p)?;
    let d_t = dt(&field22())?;

    let lhs = BilinForm::from_ops(&g, &d_t.compose(&t)?)?;
    let rhs = BilinForm::from_ops(&p, &d_t.compose(&b)?)?.scale(&Scalar::int(2));
    let kinetic = lhs.equal_mod_div(&rhs)?;

    let gs = BilinForm::from_ops(&g, &s)?;
    let zb = BilinForm::from_ops(&p, &in_time(&dual_curl()?)?.compose(&b)?)?;
    let potential = sym_form(&gs)?.equal_mod_div(&sym_form(&zb)?)?;

    let tr1 = in_time(&trace02(&field22()))?.compose(&g)?;
    let tr2 = in_time(&trace2()?)?.compose(&tr1)?;
    let hp = BilinForm::from_ops(&g, &g)?
        .add_scaled(&BilinForm::from_ops(&tr1, &tr1)?, &Scalar::int(-2))?
        .add_scaled(&BilinForm::from_ops(&tr2, &tr2)?, &Scalar::frac(1, 3))?;
    let h_pi = sym_form(&hp)?.equal_mod_div(&sym_form(&gs)?)?;

    let half = Rat::new(1, 2);
    let rot = [[half.clone(), half.clone()], [half.clone(), half.neg()]];
    let rotated = action22_doublet()?.rotate(rot)?;
    let z = rotated.blocks[0][0].scale(&Scalar::ZERO);
    let target = QForm {
        blocks: [[chiral_action22(1)?, z.clone()], [z.clone(), chiral_action22(-1)?.scale(&Scalar::int(-1))]],
    };
    let split = rotated.equal_mod_div(&target)?;
    let cross = rotated.blocks[0][1].add(&rotated.blocks[1][0].transpose())?;
    let cross_terms_vanish = cross.equal_mod_div(&z)?;
    Ok(Ham22Report { kinetic, potential, h_pi, split, cross_terms_vanish })
}

/// Four-dimensional (2,2) and (2,1) shapes.
pub fn field22_4d() -> TensorShape {
    young(4, &[2, 2])
}

pub fn hook21_4d() -> TensorShape {
    young(4, &[2, 1])
}

/// `x1 … x4`.
pub fn space4() -> Coords {
    coords(&["x1", "x2", "x3", "x4"])
}

/// Seeded four-dimensional prepotentials `(P, Φ)`, projected onto their
/// (2,2) and (2,1) shapes.
pub fn random_prepotentials4<R: rand::Rng>(deg: u32, rng: &mut R) -> Result<(TensorField, TensorField)> {
    let v = space4();
    let proj = |shape: &TensorShape, cols: &[u8]| -> Result<LinDiffOp> {
        ops::project(shape, &young_projector_cols(cols)?, shape, &v)
    };
    let p = proj(&field22_4d(), &[2, 2])?.apply(&random_field(&field22_4d(), &v, deg, rng))?;
    let f = proj(&hook21_4d(), &[2, 1])?.apply(&random_field(&hook21_4d(), &v, deg, rng))?;
    Ok((p, f))
}

/// `Z_{ijkl} = 12√3 P`, `Z_{ijk5} = −3√3 Φ`, `Z_{i5j5} = 0`.
pub fn embed(p: &TensorField, phi: &TensorField) -> Result<TensorField> {
    if p.shape() != &field22_4d() || phi.shape() != &hook21_4d() {
        return Err(Error::Shape("expected four-dimensional (2,2) and (2,1) prepotentials".into()));
    }
    let c = space5();
    let p = p.recoord(&c)?;
    let phi = phi.recoord(&c)?;
    let kp = Scalar::quadratic(Rat::ZERO, Rat::int(12));
    let kf = Scalar::quadratic(Rat::ZERO, Rat::int(-3));
    Ok(TensorField::from_fn(field22(), c.clone(), |o| match (o[1] == 4, o[3] == 4) {
        (false, false) => p.get_full(o).scale(&kp),
        (false, true) => phi.get_full(&o[..3]).scale(&kf),
        (true, false) => phi.get_full(&[o[2], o[3], o[0]]).scale(&kf),
        (true, true) => Poly::zero(c.clone()),
    }))
}

/// Prepotentials read off a gauge-fixed five-dimensional `Z`, and the three
/// reduction residuals (Cotton components minus their four-dimensional
/// expressions).
#[derive(Clone, Debug)]
pub struct Reduction {
    pub p: TensorField,
    pub phi: TensorField,
    /// `D_{ij}{}^{kl}`, `D_{ij}{}^{k5}`, `D_{i5}{}^{j5}` residuals.
    pub residuals: [TensorField; 3],
}

impl Reduction {
    pub fn holds(&self) -> bool {
        self.residuals.iter().all(|r| r.is_zero())
    }
}

fn complement(n: u8, fixed: &[u8]) -> Vec<u8> {
    (0..n).filter(|i| !fixed.contains(i)).collect()
}

/// Orderings of the indices not in `fixed`, with `ε(fixed, ordering)`.
fn eps_fill(fixed: &[u8]) -> Vec<(Vec<u8>, i64)> {
    let rest = complement(4, fixed);
    let mut out = Vec::new();
    for p in crate::tensor::young::permutations_of(rest.len(), &(0..rest.len()).collect::<Vec<_>>()) {
        let ord: Vec<u8> = p.iter().map(|&k| rest[k as usize]).collect();
        let mut full = fixed.to_vec();
        full.extend(&ord);
        let s = levi_civita(&full);
        if s != 0 {
            out.push((ord, s));
        }
    }
    out
}

fn d2(p: &Poly, a: u8, b: u8) -> Poly {
    p.diff_index(a as usize).diff_index(b as usize)
}

/// `R^{ij}[P] = (1/36) ε^{iabc}ε^{jdef} ∂_a∂_f P_{bcde}`.
pub fn ricci_p(p: &TensorField) -> Vec<Vec<Poly>> {
    let c = p.coords().clone();
    (0..4u8)
        .map(|i| {
            (0..4u8)
                .map(|j| {
                    let mut acc = Poly::zero(c.clone());
                    for (x, sx) in eps_fill(&[i]) {
                        for (y, sy) in eps_fill(&[j]) {
                            let t = d2(&p.get_full(&[x[1], x[2], y[0], y[1]]), x[0], y[2]);
                            acc.add_scaled(&t, &Scalar::frac(sx * sy, 36));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `E^{ijk}[Φ] = (1/12) ε^{ijde}ε^{kabc} ∂_a∂_e Φ_{bcd}`.
pub fn e_phi(phi: &TensorField) -> Vec<Vec<Vec<Poly>>> {
    let c = phi.coords().clone();
    (0..4u8)
        .map(|i| {
            (0..4u8)
                .map(|j| {
                    (0..4u8)
                        .map(|k| {
                            let mut acc = Poly::zero(c.clone());
                            if i == j {
                                return acc;
                            }
                            for (x, sx) in eps_fill(&[i, j]) {
                                for (y, sy) in eps_fill(&[k]) {
                                    let t = d2(&phi.get_full(&[y[1], y[2], x[0]]), y[0], x[1]);
                                    acc.add_scaled(&t, &Scalar::frac(sx * sy, 12));
                                }
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn dimreduce(z: &TensorField) -> Result<Reduction> {
    if z.shape() != &field22() || z.coords()[..] != space5()[..] {
        return Err(Error::Shape("expected a (2,2) field over x1 … x5".into()));
    }
    if z.components().values().any(|p| p.depends_on("x5")) {
        return Err(Error::Precondition("the field depends on x5".into()));
    }
    for i in 0..4u8 {
        for j in 0..4u8 {
            if !z.get_full(&[i, 4, j, 4]).is_zero() {
                return Err(Error::Precondition(format!("Z_{{{}5{}5}} is not gauge-fixed to zero", i + 1, j + 1)));
            }
        }
    }
    let c4 = space4();
    let zz = z.recoord(&space5())?;
    let dz = cotton22()?.apply(&zz)?;
    let down = |f: TensorField| f.recoord(&c4);
    let kp = Scalar::quadratic(Rat::ZERO, Rat::new(1, 36));
    let kf = Scalar::quadratic(Rat::ZERO, Rat::new(-1, 9));
    let p = down(TensorField::from_fn(field22_4d(), space5(), |o| zz.get_full(o).scale(&kp)))?;
    let phi = down(TensorField::from_fn(hook21_4d(), space5(), |o| zz.get_full(&[o[0], o[1], o[2], 4]).scale(&kf)))?;
    let r = ricci_p(&p);
    let e = e_phi(&phi);
    let rtr = (0..4).fold(Poly::zero(c4.clone()), |a, i| a.add(&r[i][i]));
    let ev: Vec<Poly> = (0..4).map(|i| (0..4).fold(Poly::zero(c4.clone()), |a, j| a.add(&e[i][j][j]))).collect();
    let delta = |a: u8, b: u8| a == b;

    let r1 = TensorField::from_fn(field22_4d(), c4.clone(), |o| {
        let (i, j, k, l) = (o[0], o[1], o[2], o[3]);
        let mut acc = Poly::zero(c4.clone());
        for (x, s) in eps_fill(&[i, j]) {
            let (a, b) = (x[0], x[1]);
            let mut inner = e[k as usize][l as usize][b as usize].clone();
            let h = Scalar::frac(1, 2);
            if delta(b, k) {
                inner.add_scaled(&ev[l as usize], &h);
            }
            if delta(b, l) {
                inner.add_scaled(&ev[k as usize], &h.neg());
            }
            acc.add_scaled(&inner.diff_index(a as usize), &Scalar::int(s));
        }
        let pred = acc.scale(&Scalar::quadratic(Rat::ZERO, Rat::new(-2, 3)));
        dz.get_full(o).recoord(&c4).expect("x5-free").sub(&pred)
    });
    let r2 = TensorField::from_fn(blocks(4, vec![Block::Anti(2), Block::Free]), c4.clone(), |o| {
        let (i, j, k) = (o[0], o[1], o[2]);
        let mut acc = Poly::zero(c4.clone());
        for (x, s) in eps_fill(&[i, j]) {
            let (a, b) = (x[0], x[1]);
            let mut inner = r[k as usize][b as usize].clone();
            if delta(k, b) {
                inner.add_scaled(&rtr, &Scalar::frac(-1, 3));
            }
            acc.add_scaled(&inner.diff_index(a as usize), &Scalar::int(s));
        }
        let pred = acc.scale(&Scalar::quadratic(Rat::ZERO, Rat::int(2)));
        dz.get_full(&[i, j, k, 4]).recoord(&c4).expect("x5-free").sub(&pred)
    });
    let r3 = TensorField::from_fn(TensorShape::none(4, 2), c4.clone(), |o| {
        let (i, j) = (o[0], o[1]);
        let mut acc = Poly::zero(c4.clone());
        for (x, s) in eps_fill(&[i]) {
            let (a, b, c) = (x[0], x[1], x[2]);
            let mut inner = e[b as usize][c as usize][j as usize].clone();
            if delta(j, b) {
                inner.add_assign(&ev[c as usize]);
            }
            acc.add_scaled(&inner.diff_index(a as usize), &Scalar::int(s));
        }
        let pred = acc.scale(&Scalar::quadratic(Rat::ZERO, Rat::new(1, 3)));
        dz.get_full(&[i, 4, j, 4]).recoord(&c4).expect("x5-free").sub(&pred)
    });
    Ok(Reduction { p, phi, residuals: [r1, r2, r3] })
}
