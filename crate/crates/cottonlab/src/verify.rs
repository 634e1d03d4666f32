//! Named verification suites shared by the command-line driver and the
//! acceptance tests.
//!
//! A suite is a list of exact checks. Each check produces a [`Record`]; a
//! failing record carries the first offending operator term or field
//! component as its witness.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::charges::{self, BoundarySpace};
use crate::conformal3d::{self as c3, space, sym};
use crate::diffop::LinDiffOp;
use crate::dynamics::{self as dy, PrepotentialPair, Spin3Variant};
use crate::error::{Error, Result};
use crate::exact::{Poly, Rat, Scalar};
use crate::mixed22 as m22;
use crate::random::random_field;
use crate::tensor::{ops, TensorField, TensorShape};

pub const MAX_SPIN: usize = 6;
pub const DEFAULT_MAX_DEGREE: u32 = 8;
pub const MAX_DEGREE_ENV: &str = "COTTONLAB_MAX_DEGREE";

/// Suite identifiers, in the order they are listed by the driver.
pub const SUITES: [&str; 17] = [
    "cotton-invariance",
    "cotton-tt",
    "bianchi",
    "preimage-roundtrip",
    "schouten-coefficients",
    "nilpotency",
    "prepotential-identity",
    "hamiltonian-weyl",
    "action-rewrite",
    "duality-so2",
    "spin3-constraints",
    "tsd-residual",
    "c22-invariance",
    "c22-prepotential",
    "c22-ham-split",
    "c22-dimred",
    "charges",
];

/// Short names accepted in place of a suite id.
pub const ALIASES: [(&str, &[&str]); 2] =
    [("cotton", &["cotton-invariance", "cotton-tt"]), ("prepotential", &["prepotential-identity"])];

/// The degree ceiling: `COTTONLAB_MAX_DEGREE` if set, else 8.
pub fn max_degree() -> Result<u32> {
    match std::env::var(MAX_DEGREE_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Unsupported(format!("{MAX_DEGREE_ENV}={v} is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_MAX_DEGREE),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub suite: String,
    pub spin: Option<usize>,
    pub rank: Option<usize>,
    pub bdim: Option<usize>,
    pub degree: Option<u32>,
    pub seed: u64,
    /// Number of random instances for seeded suites.
    pub instances: Option<usize>,
}

impl SuiteConfig {
    pub fn new(suite: &str) -> SuiteConfig {
        SuiteConfig { suite: suite.to_string(), spin: None, rank: None, bdim: None, degree: None, seed: 0, instances: None }
    }

    pub fn spin(mut self, s: usize) -> SuiteConfig {
        self.spin = Some(s);
        self
    }

    pub fn rank(mut self, r: usize) -> SuiteConfig {
        self.rank = Some(r);
        self
    }

    pub fn bdim(mut self, n: usize) -> SuiteConfig {
        self.bdim = Some(n);
        self
    }

    pub fn degree(mut self, d: u32) -> SuiteConfig {
        self.degree = Some(d);
        self
    }

    pub fn seed(mut self, k: u64) -> SuiteConfig {
        self.seed = k;
        self
    }

    pub fn instances(mut self, k: usize) -> SuiteConfig {
        self.instances = Some(k);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub id: String,
    pub params: Vec<(String, String)>,
    pub pass: bool,
    pub witness: Option<String>,
    /// Terms of the operator whose vanishing was checked, when there is one.
    pub terms: Option<usize>,
    pub elapsed_ms: u64,
    pub citation: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub records: Vec<Record>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.records.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0 && !self.records.is_empty()
    }

    pub fn first_failure(&self) -> Option<&Record> {
        self.records.iter().find(|r| !r.pass)
    }

    /// Zero every elapsed time, leaving a report that depends only on the
    /// configuration.
    pub fn without_timing(mut self) -> Report {
        for r in &mut self.records {
            r.elapsed_ms = 0;
        }
        self
    }

    pub fn to_json(&self) -> Value {
        let records: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                let params: serde_json::Map<String, Value> =
                    r.params.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
                json!({
                    "id": r.id,
                    "params": params,
                    "pass": r.pass,
                    "witness": r.witness,
                    "terms": r.terms,
                    "elapsed_ms": r.elapsed_ms,
                    "citation": r.citation,
                })
            })
            .collect();
        json!({
            "suite": self.suite,
            "seed": self.seed,
            "records": records,
            "summary": { "total": self.records.len(), "passed": self.passed(), "failed": self.failed() },
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!(
                "{} {} [{}] {}ms  {}\n",
                if r.pass { "PASS" } else { "FAIL" },
                r.id,
                params.join(" "),
                r.elapsed_ms,
                r.citation
            ));
            if let Some(w) = &r.witness {
                out.push_str(&format!("     witness: {w}\n"));
            }
        }
        out.push_str(&format!(
            "{}: {} checks, {} passed, {} failed\n",
            self.suite,
            self.records.len(),
            self.passed(),
            self.failed()
        ));
        out
    }
}

/// The outcome of one check: a witness if it failed.
struct Outcome {
    witness: Option<String>,
    terms: Option<usize>,
}

fn op_zero(op: &LinDiffOp) -> Outcome {
    Outcome { witness: op.first_term(), terms: Some(op.term_count()) }
}

fn op_eq(a: &LinDiffOp, b: &LinDiffOp) -> Result<Outcome> {
    Ok(op_zero(&a.sub(b)?))
}

fn field_zero(f: &TensorField) -> Outcome {
    Outcome { witness: f.first_nonzero().map(|(k, p)| format!("component {k}: {p}")), terms: None }
}

fn field_eq(a: &TensorField, b: &TensorField) -> Result<Outcome> {
    Ok(field_zero(&a.sub(b)?))
}

fn holds(ok: bool, witness: impl FnOnce() -> String) -> Outcome {
    Outcome { witness: if ok { None } else { Some(witness()) }, terms: None }
}

fn rat_eq(got: &[Rat], want: &[Rat]) -> Outcome {
    holds(got == want, || {
        let f = |v: &[Rat]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
        format!("got ({}), expected ({})", f(got), f(want))
    })
}

struct Runner {
    suite: String,
    records: Vec<Record>,
}

impl Runner {
    fn check(&mut self, id: String, params: &[(&str, String)], citation: &str, f: impl FnOnce() -> Result<Outcome>) {
        let start = Instant::now();
        let outcome = f().unwrap_or_else(|e| Outcome { witness: Some(format!("error: {e}")), terms: None });
        self.records.push(Record {
            id: format!("{}/{}", self.suite, id),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            pass: outcome.witness.is_none(),
            witness: outcome.witness,
            terms: outcome.terms,
            elapsed_ms: start.elapsed().as_millis() as u64,
            citation: citation.to_string(),
        });
    }
}

fn p_s(s: usize) -> Vec<(&'static str, String)> {
    vec![("spin", s.to_string())]
}

fn resolve(suite: &str) -> Result<Vec<&'static str>> {
    if let Some(s) = SUITES.iter().find(|s| **s == suite) {
        return Ok(vec![s]);
    }
    if let Some((_, v)) = ALIASES.iter().find(|(a, _)| *a == suite) {
        return Ok(v.to_vec());
    }
    Err(Error::Unsupported(format!("unknown suite `{suite}`")))
}

fn spins(cfg: &SuiteConfig, lo: usize, defaults: &[usize]) -> Result<Vec<usize>> {
    match cfg.spin {
        Some(s) if s < lo || s > MAX_SPIN => {
            Err(Error::Unsupported(format!("suite {} supports spin {lo}..={MAX_SPIN}, got {s}", cfg.suite)))
        }
        Some(s) => Ok(vec![s]),
        None => Ok(defaults.to_vec()),
    }
}

fn no_params(cfg: &SuiteConfig, id: &str) -> Result<()> {
    if cfg.spin.is_some() || cfg.rank.is_some() || cfg.bdim.is_some() {
        return Err(Error::Unsupported(format!("suite {id} takes no spin, rank or boundary dimension")));
    }
    Ok(())
}

fn degree(cfg: &SuiteConfig, default: u32) -> Result<u32> {
    let d = cfg.degree.unwrap_or(default);
    let ceiling = max_degree()?;
    if d > ceiling {
        return Err(Error::Unsupported(format!("degree {d} exceeds the ceiling {ceiling} (set {MAX_DEGREE_ENV})")));
    }
    Ok(d)
}

/// Run a suite, or every suite an alias names. Records are sorted by id.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    let ids = resolve(&cfg.suite)?;
    if let Some(r) = cfg.rank {
        if r > MAX_SPIN {
            return Err(Error::Unsupported(format!("rank {r} exceeds {MAX_SPIN}")));
        }
    }
    degree(cfg, 0)?;
    let mut records = Vec::new();
    for id in ids {
        let mut run = Runner { suite: id.to_string(), records: Vec::new() };
        match id {
            "cotton-invariance" => cotton_invariance(cfg, &mut run)?,
            "cotton-tt" => cotton_tt(cfg, &mut run)?,
            "bianchi" => bianchi(cfg, &mut run)?,
            "preimage-roundtrip" => preimage_roundtrip(cfg, &mut run)?,
            "schouten-coefficients" => schouten_coefficients(cfg, &mut run)?,
            "nilpotency" => nilpotency(cfg, &mut run)?,
            "prepotential-identity" => prepotential_identity(cfg, &mut run)?,
            "hamiltonian-weyl" => hamiltonian_weyl(cfg, &mut run)?,
            "action-rewrite" => action_rewrite(cfg, &mut run)?,
            "duality-so2" => duality_so2(cfg, &mut run)?,
            "spin3-constraints" => spin3_constraints(cfg, &mut run)?,
            "tsd-residual" => tsd_residual(cfg, &mut run)?,
            "c22-invariance" => c22_invariance(cfg, &mut run)?,
            "c22-prepotential" => c22_prepotential(cfg, &mut run)?,
            "c22-ham-split" => c22_ham_split(cfg, &mut run)?,
            "c22-dimred" => c22_dimred(cfg, &mut run)?,
            "charges" => charges_suite(cfg, &mut run)?,
            _ => unreachable!(),
        }
        records.extend(run.records);
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Report { suite: cfg.suite.clone(), seed: cfg.seed, records })
}

fn cotton_invariance(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    for s in spins(cfg, 2, &[2, 3, 4])? {
        let ps = p_s(s);
        run.check(format!("s{s}/diffeo"), &ps, "B[∂ξ] = 0", || op_zero(&c3::cotton(s)?.compose(&c3::gauge_diffeo(s)?)?).into_ok());
        run.check(format!("s{s}/weyl"), &ps, "B[δλ] = 0", || op_zero(&c3::cotton(s)?.compose(&c3::gauge_weyl(s)?)?).into_ok());
        run.check(format!("s{s}/symmetry"), &ps, "Cotton tensor symmetric in all indices", || {
            let raw = c3::cotton_unsymmetrized(s)?;
            Ok(holds(c3::cotton_symmetry_emerges(&raw)?, || "output is not symmetric in its last index".into()))
        });
    }
    Ok(())
}

trait IntoOk {
    fn into_ok(self) -> Result<Outcome>;
}

impl IntoOk for Outcome {
    fn into_ok(self) -> Result<Outcome> {
        Ok(self)
    }
}

fn cotton_tt(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    for s in spins(cfg, 2, &[2, 3, 4])? {
        let ps = p_s(s);
        run.check(format!("s{s}/trace"), &ps, "B^k_k i3…is = 0", || {
            op_zero(&ops::sym_trace(&sym(s), &space())?.compose(&c3::cotton(s)?)?).into_ok()
        });
        run.check(format!("s{s}/div"), &ps, "∂_k B^k i2…is = 0", || {
            op_zero(&ops::sym_div(&sym(s), &space())?.compose(&c3::cotton(s)?)?).into_ok()
        });
    }
    Ok(())
}

fn bianchi(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    let v = space();
    for s in spins(cfg, 1, &[1, 2, 3, 4])? {
        let ps = p_s(s);
        run.check(format!("s{s}/riemann"), &ps, "∂_[a R_bc]… = 0", || {
            let r = c3::riemann(s)?;
            let g = ops::grad(r.codomain(), &v)?.compose(&r)?;
            let cod = TensorShape::none(3, 2 * s + 1);
            op_zero(&ops::antisymmetrize(g.codomain(), &[0, 1, 2], &cod, &v)?.compose(&g)?).into_ok()
        });
        run.check(format!("s{s}/einstein"), &ps, "∂·G = 0", || {
            op_zero(&ops::sym_div(&sym(s), &v)?.compose(&c3::einstein(s)?)?).into_ok()
        });
        if s >= 2 {
            run.check(format!("s{s}/schouten"), &ps, "∂·S − (s−1) ∂S̄ = 0", || {
                let sch = c3::schouten(s)?;
                let dv = ops::sym_div(&sym(s), &v)?.compose(&sch)?;
                let tr = ops::sym_grad(&sym(s - 2), &v)?.compose(&ops::sym_trace(&sym(s), &v)?)?.compose(&sch)?;
                op_zero(&dv.add_scaled(&tr, &Scalar::int(1 - s as i64))?).into_ok()
            });
        }
    }
    Ok(())
}

fn preimage_roundtrip(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    let deg = degree(cfg, 2)?;
    let count = cfg.instances.unwrap_or(30);
    let v = space();
    for s in spins(cfg, 2, &[2])? {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let order = 2 * s as u32 - 1;
        for k in 0..count {
            let mut ps = p_s(s);
            ps.push(("degree", deg.to_string()));
            ps.push(("instance", k.to_string()));
            let h0 = random_field(&sym(s), &v, deg + order, &mut rng);
            run.check(format!("s{s}/cotton/{k:02}"), &ps, "B[h] = B for h = cotton_preimage(B)", || {
                let c = c3::cotton(s)?;
                let b = c.apply(&h0)?;
                let h = c3::cotton_preimage(&b, s)?;
                field_eq(&c.apply(&h)?, &b)
            });
            let p0 = random_field(&sym(s), &v, deg + s as u32, &mut rng);
            run.check(format!("s{s}/einstein/{k:02}"), &ps, "G[P] = Π for P = einstein_preimage(Π)", || {
                let g = c3::einstein(s)?;
                let pi = g.apply(&p0)?;
                let p = c3::einstein_preimage(&pi, s)?;
                field_eq(&g.apply(&p)?, &pi)
            });
            let xi = random_field(&sym(s - 1), &v, deg + 1, &mut rng);
            let lam = random_field(&sym(s - 2), &v, deg, &mut rng);
            run.check(format!("s{s}/decompose/{k:02}"), &ps, "h = ∂ξ + δλ for conformally flat h", || {
                let h = c3::gauge_diffeo(s)?.apply(&xi)?.add(&c3::gauge_weyl(s)?.apply(&lam)?)?;
                let (x, l) = c3::pure_gauge_decompose(&h, s)?;
                let back = c3::gauge_diffeo(s)?.apply(&x)?.add(&c3::gauge_weyl(s)?.apply(&l)?)?;
                field_eq(&back, &h)
            });
        }
    }
    Ok(())
}

fn schouten_coefficients(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    no_params(cfg, "schouten-coefficients")?;
    let table: [(usize, Vec<Rat>); 3] = [
        (2, vec![Rat::new(-1, 2)]),
        (3, vec![Rat::new(-3, 4)]),
        (4, vec![Rat::int(-1), Rat::new(1, 8)]),
    ];
    for (s, want) in table {
        run.check(format!("s{s}"), &p_s(s), "S = G + Σ a_k δ^k G^[k]", || Ok(rat_eq(&c3::schouten_coeffs(s)?.0, &want)));
    }
    Ok(())
}

fn nilpotency(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    if cfg.spin.is_some() || cfg.bdim.is_some() {
        return Err(Error::Unsupported("suite nilpotency takes --rank N only".into()));
    }
    let ns = match cfg.rank {
        Some(0) => return Err(Error::Unsupported("nilpotency needs N ≥ 1".into())),
        Some(n) => vec![n],
        None => vec![2, 3],
    };
    let v = space();
    for n in ns {
        let chain = |start: usize, len: usize| -> Result<LinDiffOp> {
            let mut op = ops::gen_diff(&TensorShape::y_pn(3, start, n), n, &v)?;
            for k in 1..len {
                let d = ops::gen_diff(&TensorShape::y_pn(3, start + k, n), n, &v)?;
                op = d.compose(&op)?;
            }
            Ok(op)
        };
        let ps = vec![("N", n.to_string())];
        for start in 0..n.min(2) {
            run.check(format!("N{n}/from{start}"), &ps, "d^(N+1) = 0", || op_zero(&chain(start, n + 1)?).into_ok());
        }
        run.check(format!("N{n}/order-N-nonzero"), &ps, "d^N ≠ 0", || {
            let op = chain(0, n)?;
            Ok(holds(!op.is_zero(), || "d^N vanishes".into()))
        });
    }
    Ok(())
}

fn prepotential_identity(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    for s in spins(cfg, 2, &[2, 3, 4])? {
        let ps = p_s(s);
        run.check(format!("s{s}/general"), &ps, "G[h[Φ]] = B[Φ]", || {
            op_eq(&c3::einstein(s)?.compose(&dy::h_from_prepotential(s)?)?, &c3::cotton(s)?)
        });
        if s == 3 {
            for (name, variant) in [("minimal", Spin3Variant::Minimal), ("weyl-inert", Spin3Variant::WeylInert)] {
                run.check(format!("s3/{name}"), &ps, "G[h[Φ]] = B[Φ]", || {
                    op_eq(&c3::einstein(3)?.compose(&dy::h_from_prepotential_spin3(variant)?)?, &c3::cotton(3)?)
                });
            }
        }
    }
    Ok(())
}

fn hamiltonian_weyl(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    let ss = spins(cfg, 1, &[2, 3, 4])?;
    let pins: [(usize, [Rat; 2]); 2] =
        [(2, [Rat::new(1, 2), Rat::new(-1, 4)]), (3, [Rat::new(1, 2), Rat::new(-3, 8)])];
    for (s, want) in pins {
        if ss.contains(&s) {
            run.check(format!("s{s}/coefficients"), &p_s(s), "H = Σ a_k (Φ^[k] · B^[k])", || {
                Ok(rat_eq(&dy::hamiltonian_coeffs(s)?, &want))
            });
        }
    }
    let rec: Vec<usize> = if cfg.spin.is_some() { ss.clone() } else { (1..=10).collect() };
    for s in rec {
        run.check(format!("s{s}/recursion"), &p_s(s), "a_k / a_(k−1) recursion", || {
            let a = dy::hamiltonian_coeffs(s)?;
            let bad = (1..a.len()).find(|&k| a[k] != a[k - 1].mul(&dy::hamiltonian_recursion_ratio(s, k)));
            Ok(holds(bad.is_none(), || format!("ratio fails at k = {}", bad.unwrap_or(0))))
        });
    }
    for s in ss.into_iter().filter(|s| *s >= 2) {
        run.check(format!("s{s}/weyl"), &p_s(s), "δ_λ H ≡ 0 mod ∂", || {
            let f = dy::hamiltonian_weyl_variation(s)?;
            Ok(holds(f.is_total_derivative(), || "Weyl variation is not a total derivative".into()))
        });
    }
    Ok(())
}

fn action_rewrite(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    for s in spins(cfg, 2, &[2, 3])? {
        run.check(format!("s{s}"), &p_s(s), "H ≡ ½ Z · curl B[Z] mod ∂", || {
            let h = dy::symmetrized(&dy::hamiltonian_form(s)?)?;
            let k = dy::symmetrized(&dy::curl_cotton_form(s)?)?.scale(&Scalar::frac(1, 2));
            Ok(holds(h.equal_mod_div(&k)?, || "forms differ beyond a total derivative".into()))
        });
    }
    Ok(())
}

fn duality_so2(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    let r = [[Rat::new(3, 5), Rat::new(4, 5)], [Rat::new(-4, 5), Rat::new(3, 5)]];
    for s in spins(cfg, 2, &[2, 3])? {
        let ps = p_s(s);
        run.check(format!("s{s}/hamiltonian"), &ps, "H[R Z] ≡ H[Z], R ∈ SO(2)", || {
            let q = dy::hamiltonian_doublet(s)?;
            Ok(holds(q.rotate(r.clone())?.equal_mod_div(&q)?, || "Hamiltonian not invariant".into()))
        });
        run.check(format!("s{s}/kinetic"), &ps, "ε_ab Z^a · Ḃ[Z^b] invariant under SO(2)", || {
            let k = dy::kinetic_doublet(s)?;
            Ok(holds(k.rotate(r.clone())?.equal_mod_div(&k)?, || "kinetic term not invariant".into()))
        });
    }
    Ok(())
}

fn spin3_constraints(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    let ss = spins(cfg, 3, &[3, 4])?;
    if ss.contains(&3) {
        let ps = p_s(3);
        run.check("s3/hamiltonian-gauge".into(), &ps, "δ_ξ C_i = 0", || {
            let c = dy::spin3_constraints()?;
            let g = dy::spin3_gauge()?;
            op_zero(&c.ham_h.compose(&g.h_xi)?.add(&c.ham_pi.compose(&g.pit_xi)?)?).into_ok()
        });
        run.check("s3/momentum-gauge".into(), &ps, "δ_θ C_ij = 0", || {
            let c = dy::spin3_constraints()?;
            let g = dy::spin3_gauge()?;
            op_zero(&c.mom_pi.compose(&g.pi_theta)?.add(&c.mom_alpha.compose(&g.alpha_theta)?)?).into_ok()
        });
        run.check("s3/hamiltonian-solution".into(), &ps, "C_i(h[Φ], Π̃[Φ]) = 0", || {
            let c = dy::spin3_constraints()?;
            let h = dy::h_from_prepotential_spin3(Spin3Variant::WeylInert)?;
            let pit = dy::pitilde_from_prepotential_spin3()?;
            op_zero(&c.ham_h.compose(&h)?.add(&c.ham_pi.compose(&pit)?)?).into_ok()
        });
        run.check("s3/momentum-solution".into(), &ps, "C_ij(Π = G[Ψ]) = 0", || {
            let c = dy::spin3_constraints()?;
            op_zero(&c.mom_pi.compose(&c3::einstein(3)?)?).into_ok()
        });
        run.check("s3/general-reduces".into(), &ps, "spin-s constraints at s = 3", || {
            let a = dy::spin_s_constraints(3)?;
            let b = dy::spin3_constraints()?;
            let g = dy::spin_s_gauge(3)?;
            let h = dy::spin3_gauge()?;
            let pairs = [
                (&a.ham_h, &b.ham_h),
                (&a.ham_pit, &b.ham_pi),
                (&a.mom_pi, &b.mom_pi),
                (&a.mom_alpha, &b.mom_alpha),
                (&g.alpha_theta, &h.alpha_theta),
                (&g.pi_theta, &h.pi_theta),
                (&g.pit_xi, &h.pit_xi),
                (&g.h_xi, &h.h_xi),
            ];
            for (x, y) in pairs {
                let o = op_eq(x, y)?;
                if o.witness.is_some() {
                    return Ok(o);
                }
            }
            Ok(Outcome { witness: None, terms: None })
        });
    }
    for s in ss {
        run.check(format!("s{s}/adjoint"), &p_s(s), "gauge transformations are adjoints of the constraints", || {
            let c = dy::spin_s_constraints(s)?;
            let g = dy::spin_s_gauge(s)?;
            let pairs = [
                (g.pi_theta.clone(), c.ham_h.adjoint().neg()),
                (g.pit_xi.clone(), c.mom_alpha.adjoint().neg()),
                (g.h_xi.clone(), c.mom_pi.adjoint()),
                (g.alpha_theta.clone(), c.ham_pit.adjoint()),
            ];
            for (x, y) in &pairs {
                let o = op_eq(x, y)?;
                if o.witness.is_some() {
                    return Ok(o);
                }
            }
            Ok(Outcome { witness: None, terms: None })
        });
        run.check(format!("s{s}/first-class"), &p_s(s), "δ C = 0 for the spin-s gauge transformations", || {
            let c = dy::spin_s_constraints(s)?;
            let g = dy::spin_s_gauge(s)?;
            let ham = c.ham_h.compose(&g.h_xi)?.add(&c.ham_pit.compose(&g.pit_xi)?)?;
            let o = op_zero(&ham);
            if o.witness.is_some() {
                return Ok(o);
            }
            op_zero(&c.mom_pi.compose(&g.pi_theta)?.add(&c.mom_alpha.compose(&g.alpha_theta)?)?).into_ok()
        });
    }
    Ok(())
}

fn tsd_residual(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    let deg = degree(cfg, 2)?;
    let st = dy::spacetime();
    for s in spins(cfg, 2, &[2, 3])? {
        let mut ps = p_s(s);
        ps.push(("degree", deg.to_string()));
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        run.check(format!("s{s}/solution"), &ps, "Ż¹ ↔ curl, twisted self-duality residual = 0", || {
            let pair = dy::tsd_solution(s, deg)?;
            let (a, b) = dy::eom_residual(&pair)?;
            let o = field_zero(&a);
            if o.witness.is_some() {
                return Ok(o);
            }
            Ok(field_zero(&b))
        });
        let xi = random_field(&sym(s - 1), &st, deg + 1, &mut rng);
        run.check(format!("s{s}/pure-gauge"), &ps, "residual vanishes on gauge data", || {
            let pair = PrepotentialPair { z1: c3::gauge_diffeo(s)?.apply(&xi)?, z2: TensorField::zero(sym(s), st.clone()) };
            let (a, b) = dy::eom_residual(&pair)?;
            let o = field_zero(&a);
            if o.witness.is_some() {
                return Ok(o);
            }
            Ok(field_zero(&b))
        });
        let phi = random_field(&sym(s), &space(), deg + 2 * s as u32, &mut rng);
        run.check(format!("s{s}/control"), &ps, "Z¹ = tΦ₀: residual is (B[Φ₀], t curl B[Φ₀])", || {
            let phi = phi.recoord(&st)?;
            let b0 = c3::cotton(s)?.apply(&phi)?;
            let t = Poly::var(st.clone(), "t")?;
            let pair = PrepotentialPair { z1: phi.map(|p| p.mul(&t)), z2: TensorField::zero(sym(s), st.clone()) };
            let (a, b) = dy::eom_residual(&pair)?;
            if b0.is_zero() {
                return Ok(holds(false, || "control prepotential has vanishing Cotton tensor".into()));
            }
            let o = field_eq(&a, &b0)?;
            if o.witness.is_some() {
                return Ok(o);
            }
            let want = dy::curl(s)?.apply(&b0)?.map(|p| p.mul(&t));
            field_eq(&b, &want)
        });
    }
    Ok(())
}

fn c22_invariance(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    no_params(cfg, "c22-invariance")?;
    let v = m22::space5();
    let f = m22::field22();
    let b = || -> Result<LinDiffOp> { m22::cotton22()?.compose(&m22::projector22(&f)?) };
    run.check("cotton-weyl".into(), &[], "B[δλ] = 0", || op_zero(&b()?.compose(&m22::weyl22()?)?).into_ok());
    run.check("cotton-diffeo".into(), &[], "B[∂ξ] = 0", || op_zero(&b()?.compose(&m22::diffeo22()?)?).into_ok());
    for slot in [0, 2] {
        run.check(format!("cotton-div{slot}"), &[], "∂·B = 0", || {
            op_zero(&ops::div(&f, slot, &v)?.compose(&b()?)?).into_ok()
        });
    }
    run.check("cotton-trace".into(), &[], "B^i_j i_l = 0", || op_zero(&ops::trace(&f, 1, 3, &v)?.compose(&b()?)?).into_ok());
    run.check("cotton-young".into(), &[], "𝒫 B = B", || {
        let b = b()?;
        op_eq(&m22::projector22(&f)?.compose(&b)?, &b)
    });
    run.check("einstein-gauge".into(), &[], "G[∂ξ] = 0", || op_zero(&m22::einstein22()?.compose(&m22::gauge22()?)?).into_ok());
    for slot in [0, 2] {
        run.check(format!("einstein-div{slot}"), &[], "∂·G = 0", || {
            op_zero(&ops::div(&f, slot, &v)?.compose(&m22::einstein22()?)?).into_ok()
        });
    }
    run.check("einstein-forms".into(), &[], "εεR = Ricci expansion of G", || {
        let p = m22::projector22(&f)?;
        op_eq(&m22::einstein22()?.compose(&p)?, &m22::einstein22_traces()?.compose(&p)?)
    });
    Ok(())
}

fn c22_prepotential(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    no_params(cfg, "c22-prepotential")?;
    let f = m22::field22();
    run.check("g-of-t".into(), &[], "G[T[Z]] = B[Z]", || {
        let p = m22::projector22(&f)?;
        let lhs = m22::einstein22()?.compose(&m22::t_from_z()?)?.compose(&p)?;
        op_eq(&lhs, &m22::cotton22()?.compose(&p)?)
    });
    run.check("t-diffeo".into(), &[], "G[T[∂ξ]] = 0", || {
        op_zero(&m22::einstein22()?.compose(&m22::t_from_z()?)?.compose(&m22::diffeo22()?)?).into_ok()
    });
    Ok(())
}

fn c22_ham_split(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    no_params(cfg, "c22-ham-split")?;
    let r = m22::ham22_split_check()?;
    let items = [
        ("kinetic", r.kinetic, "π · Ṫ ≡ 2 Z¹ · Ḃ[Z²] mod ∂"),
        ("potential", r.potential, "potential ≡ Z · curl B[Z] mod ∂"),
        ("h-pi", r.h_pi, "π-part of the Hamiltonian"),
        ("split", r.split, "action = chiral(+) + chiral(−)"),
        ("cross-terms", r.cross_terms_vanish, "chiral cross terms vanish mod ∂"),
    ];
    for (id, ok, cite) in items {
        run.check(id.into(), &[], cite, || Ok(holds(ok, || format!("{id} identity fails"))));
    }
    Ok(())
}

fn c22_dimred(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    no_params(cfg, "c22-dimred")?;
    let deg = degree(cfg, 3)?;
    let count = cfg.instances.unwrap_or(2);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let names = ["riemann", "einstein", "mixed"];
    let cites = ["Z-curvature ⊃ R[P]", "Z-curvature ⊃ E[Φ]", "mixed components ⊃ ∂Φ, ∂P"];
    for k in 0..count {
        let ps = vec![("degree", deg.to_string()), ("instance", k.to_string())];
        let data = m22::random_prepotentials4(deg, &mut rng);
        let red = data.and_then(|(p, phi)| {
            let z = m22::embed(&p, &phi)?;
            let red = m22::dimreduce(&z)?;
            if red.p != p || red.phi != phi {
                return Err(Error::LemmaViolation("embedding does not round-trip".into()));
            }
            Ok(red)
        });
        for (i, name) in names.iter().enumerate() {
            run.check(format!("{k:02}/{name}"), &ps, cites[i], || match &red {
                Ok(r) => Ok(field_zero(&r.residuals[i])),
                Err(e) => Err(e.clone()),
            });
        }
    }
    Ok(())
}

/// Killing-space dimensions with a closed form: `(rank, n) ↦ dim`.
const KILLING_DIMS: [(usize, usize, usize); 3] = [(1, 3, 10), (2, 3, 35), (2, 4, 84)];

fn charges_suite(cfg: &SuiteConfig, run: &mut Runner) -> Result<()> {
    if cfg.rank.is_some() {
        return Err(Error::Unsupported("suite charges takes --spin and --bdim".into()));
    }
    let pairs: Vec<(usize, usize)> = match (cfg.spin, cfg.bdim) {
        (None, None) => vec![(2, 3), (3, 3), (3, 2), (4, 3)],
        (s, n) => {
            let s = s.unwrap_or(3);
            let n = n.unwrap_or(3);
            if !(2..=MAX_SPIN).contains(&s) || !(2..=8).contains(&n) {
                return Err(Error::Unsupported(format!("charges needs 2 ≤ s ≤ {MAX_SPIN} and 2 ≤ n ≤ 8")));
            }
            vec![(s, n)]
        }
    };
    let current_deg = degree(cfg, 2)?;
    for &(s, n) in &pairs {
        let ps = vec![("spin", s.to_string()), ("bdim", n.to_string())];
        let sp = BoundarySpace::new(n)?;
        let r = s - 1;
        // n = 2 spaces are infinite dimensional; truncate at degree 2r
        let kdeg = 2 * r as u32;
        let ks = charges::conformal_killing_solve(r, &sp, kdeg);
        if let Some(&(_, _, want)) = KILLING_DIMS.iter().find(|(rr, nn, _)| *rr == r && *nn == n) {
            run.check(format!("s{s}-n{n}/killing-dim"), &ps, "dimension of traceless conformal Killing tensors", || {
                let got = ks.as_ref().map_err(|e| e.clone())?.dim();
                Ok(holds(got == want, || format!("dimension {got}, expected {want}")))
            });
        } else if n >= 3 {
            run.check(format!("s{s}-n{n}/killing-dim"), &ps, "Killing space closed under degree escalation", || {
                let got = ks.as_ref().map_err(|e| e.clone())?.dim();
                let more = charges::conformal_killing_solve(r, &sp, kdeg + 1)?.dim();
                Ok(holds(got == more && got > 0, || format!("dimension {got} at degree {kdeg}, {more} at {}", kdeg + 1)))
            });
        }
        run.check(format!("s{s}-n{n}/conservation"), &ps, "∂_I J^I = 0 for J = χ · 𝒯", || {
            let ks = ks.as_ref().map_err(|e| e.clone())?;
            let cs = charges::current_solve(s, &sp, current_deg)?;
            if ks.dim() == 0 || cs.dim() == 0 {
                return Ok(holds(false, || "empty Killing or current space".into()));
            }
            for (a, chi) in ks.basis.iter().enumerate() {
                for (b, t) in cs.basis.iter().enumerate() {
                    let j = charges::charge_current(chi, t, &sp)?;
                    let div = charges::current_divergence(&j, &sp)?;
                    if !div.is_zero() {
                        return Ok(holds(false, || format!("χ #{a}, 𝒯 #{b}: divergence {}", div.get(0))));
                    }
                }
            }
            Ok(holds(true, String::new))
        });
        if r == 2 && n >= 3 {
            run.check(format!("s{s}-n{n}/kill-identities"), &ps, "kill1, kill2, kill3 on every rank-2 solution", || {
                let ks = ks.as_ref().map_err(|e| e.clone())?;
                for (a, chi) in ks.basis.iter().enumerate() {
                    let rep = charges::killing_identity_check(chi, &sp)?;
                    if !rep.all_hold() {
                        return Ok(holds(false, || format!("basis element #{a}")));
                    }
                }
                Ok(holds(true, String::new))
            });
        }
        if r == 2 && n == 2 {
            run.check(format!("s{s}-n{n}/kill2-obstruction"), &ps, "(d−3) ∂∂∂ ∂·∂·χ = 0 is empty at d = 3", || {
                let v = sp.coords().clone();
                let xp = Poly::var(v.clone(), "x0")?.add(&Poly::var(v.clone(), "x1")?);
                let f = xp.pow(5);
                let mut chi = TensorField::zero(sp.sym(2), v);
                chi.set_full(&[0, 0], f.clone())?;
                chi.set_full(&[0, 1], f.neg())?;
                chi.set_full(&[1, 1], f)?;
                let rep = charges::killing_identity_check(&chi, &sp)?;
                Ok(holds(!rep.kill2.is_zero() && rep.kill1_holds() && rep.kill3_holds(), || {
                    "unfactored kill2 vanishes on the quintic".into()
                }))
            });
        }
        if n >= 2 {
            let d = n + 1;
            run.check(format!("s{s}-n{n}/normalization"), &ps, "charge normalization s(d + 2s − 5)", || {
                let got = charges::charge_normalization(s, d)?;
                let want = Rat::int(s as i64 * (d as i64 + 2 * s as i64 - 5));
                let mut ok = got == want;
                if s == 3 {
                    ok &= got == Rat::int(3 * (d as i64 + 1));
                }
                Ok(holds(ok, || format!("got {got}")))
            });
        }
    }
    if cfg.spin.is_none() && cfg.bdim.is_none() {
        run.check("normalization-s3-d3".into(), &[], "charge normalization at (s, d) = (3, 3)", || {
            Ok(rat_eq(&[charges::charge_normalization(3, 3)?], &[Rat::int(12)]))
        });
        run.check("killing-dim-r1-n3".into(), &[], "dimension of conformal Killing vectors", || {
            let got = charges::conformal_killing_solve(1, &BoundarySpace::new(3)?, 2)?.dim();
            Ok(holds(got == 10, || format!("dimension {got}, expected 10")))
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_and_ranges() {
        assert!(matches!(run_suite(&SuiteConfig::new("nope")), Err(Error::Unsupported(_))));
        assert!(run_suite(&SuiteConfig::new("cotton").spin(7)).is_err());
        assert!(run_suite(&SuiteConfig::new("cotton").spin(1)).is_err());
        assert!(run_suite(&SuiteConfig::new("tsd-residual").degree(9)).is_err());
        assert!(run_suite(&SuiteConfig::new("c22-invariance").spin(2)).is_err());
    }

    #[test]
    fn alias_runs_both_cotton_suites() {
        let r = run_suite(&SuiteConfig::new("cotton").spin(2)).unwrap();
        assert!(r.all_pass(), "{}", r.to_text());
        let ids: Vec<&str> = r.records.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(
            ids,
            [
                "cotton-invariance/s2/diffeo",
                "cotton-invariance/s2/symmetry",
                "cotton-invariance/s2/weyl",
                "cotton-tt/s2/div",
                "cotton-tt/s2/trace"
            ]
        );
    }

    #[test]
    fn small_suites_pass() {
        for cfg in [
            SuiteConfig::new("schouten-coefficients"),
            SuiteConfig::new("nilpotency").rank(2),
            SuiteConfig::new("bianchi").spin(2),
            SuiteConfig::new("prepotential").spin(2),
            SuiteConfig::new("preimage-roundtrip").instances(2).seed(5),
        ] {
            let r = run_suite(&cfg).unwrap();
            assert!(r.all_pass(), "{}", r.to_text());
        }
    }

    #[test]
    fn failures_carry_witnesses() {
        let mut run = Runner { suite: "t".into(), records: Vec::new() };
        let v = space();
        run.check("x".into(), &[], "", || op_zero(&ops::grad(&sym(0), &v)?).into_ok());
        run.check("y".into(), &[], "", || Err(Error::NoSolution("z".into())));
        assert!(!run.records[0].pass);
        assert_eq!(run.records[0].witness.as_deref(), Some("out 0 <- in : x1"));
        assert_eq!(run.records[1].witness.as_deref(), Some("error: no solution: z"));
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = SuiteConfig::new("preimage-roundtrip").instances(1).seed(9);
        let a = run_suite(&cfg).unwrap().without_timing();
        let b = run_suite(&cfg).unwrap().without_timing();
        assert_eq!(a, b);
        assert_eq!(a.to_json()["summary"]["failed"], 0);
    }
}
