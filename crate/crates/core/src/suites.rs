//! Built-in verification suites and the report they produce. There is one
//! suite per acceptance check group; each suite expands into independent checks.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cfcat::{CfMorphism, Context};
use crate::chain::{cone, hofib, ChainComplex, Graded};
use crate::crosseff::{
    comultiplication, counit, cross_effect, degeneracy, degree_test, double_cube_rows, doubled, excision_cube,
    functor_cube, iterated_cr2_and_crn, strongly_cocartesian_image,
};
use crate::cube::build_coproduct_cube;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::functor::FunctorSpec;
use crate::json::{context_from_json, context_to_json, object_to_json};
use crate::random::Gen;
use crate::session::{NodeId, Session};
use crate::tower::{
    skeleton_fiber_check, beta_tower, convergence_profile, perp_tn_ranks, gamma_tower, vertex_cube_check, pn_stage, WINDOW,
};

pub const SCHEMA: u32 = 1;
pub const DEFAULT_CAP: usize = 20_000;

/// Suite names with a one-line description, in report order.
pub const SUITES: [(&str, &str); 12] = [
    ("foundations", "random chain maps: d∘d = 0, long exact sequence, cone against fiber, Künneth"),
    ("cube-models", "total fiber against punctured holim; cartesian iff cocartesian"),
    ("cotriple-axioms", "counit, coassociativity, section and simplicial identities"),
    ("reducedness", "cross effects with a B slot, degree ladder, iterated cross effects"),
    ("degree-excision", "degree n against excision relative to A; double-cube rows"),
    ("excisive-cubes", "degree-2 functors on strongly cocartesian 3-cubes"),
    ("skeleton-fiber", "hofib(F(A) → T_n^{k+1}F(A)) against |sk_k ⊥_{n+1}^{*+1}F(A)|"),
    ("tower-agreement", "Goodwillie and cotriple towers stabilize at A and agree"),
    ("posthomology-towers", "a post-homology functor whose towers differ away from A"),
    ("perp-unit-zero", "H(⊥_{n+1}F(A)) → H(T_n⊥_{n+1}F(A)) vanishes"),
    ("beta-tower", "restricted-context skeleton against T_n^{k+1}F(X) fibers"),
    ("convergence", "connectivity bound against measured connectivity of γ_n"),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

pub fn suite_index(name: &str) -> Result<usize> {
    SUITES.iter().position(|(n, _)| *n == name).ok_or_else(|| {
        Error::Invalid(format!("unknown suite {name:?}; valid names: all, {}", suite_names().join(", ")))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    SkippedResource,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub params: Value,
    pub status: Status,
    pub tables: BTreeMap<String, Graded>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Inputs sufficient to rerun the check; kept for failures and skips.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<Value>,
    pub time_ms: u64,
}

/// What a check computed.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub ok: bool,
    pub tables: BTreeMap<String, Graded>,
    pub detail: Option<String>,
    pub inputs: Value,
}

impl Outcome {
    pub fn new(ok: bool) -> Self {
        Outcome { ok, ..Default::default() }
    }

    pub fn table(mut self, name: &str, g: Graded) -> Self {
        self.tables.insert(name.to_string(), g);
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn inputs(mut self, v: Value) -> Self {
        self.inputs = v;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldChoice {
    Prime(u32),
    Rational,
}

impl FieldChoice {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "p" => Ok(FieldChoice::Prime(crate::field::PrimeField::default().p())),
            "rational" | "q" | "Q" => Ok(FieldChoice::Rational),
            t => {
                let p: u32 = t.parse().map_err(|_| Error::Parse(format!("field must be p, rational or a prime, got {t:?}")))?;
                crate::field::PrimeField::new(p)?;
                Ok(FieldChoice::Prime(p))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            FieldChoice::Prime(p) => format!("F_{p}"),
            FieldChoice::Rational => "Q".into(),
        }
    }
}

/// Run-wide knobs. `None` keeps each suite's own default.
#[derive(Clone, Debug)]
pub struct Params {
    pub seed: u64,
    pub max_n: Option<usize>,
    pub max_k: Option<usize>,
    pub samples: Option<usize>,
    pub cap: usize,
    pub functors: Option<Vec<FunctorSpec>>,
    pub context: Option<Value>,
}

impl Default for Params {
    fn default() -> Self {
        Params { seed: 0, max_n: None, max_k: None, samples: None, cap: DEFAULT_CAP, functors: None, context: None }
    }
}

impl Params {
    fn n_max(&self, default: usize) -> usize {
        self.max_n.map_or(default, |m| m.min(default))
    }

    fn k_max(&self, default: usize) -> usize {
        self.max_k.map_or(default, |m| m.min(default))
    }

    fn samples(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn functors(&self, default: Vec<FunctorSpec>) -> Vec<FunctorSpec> {
        self.functors.clone().unwrap_or(default)
    }
}

pub type Task<'a> = Box<dyn Fn() -> CheckRecord + Send + Sync + 'a>;

fn task_seed(seed: u64, suite: usize, task: usize) -> u64 {
    let mut z = seed ^ ((suite as u64) << 40) ^ (task as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check<'a>(
    suite: usize,
    name: String,
    params: Value,
    body: impl Fn() -> Result<Outcome> + Send + Sync + 'a,
) -> Task<'a> {
    Box::new(move || {
        let t0 = Instant::now();
        let r = body();
        let time_ms = t0.elapsed().as_millis() as u64;
        let (status, tables, detail, replay) = match r {
            Ok(o) => {
                let status = if o.ok { Status::Pass } else { Status::Fail };
                let replay = (!o.ok).then(|| json!({"params": params.clone(), "inputs": o.inputs}));
                (status, o.tables, o.detail, replay)
            }
            Err(e @ Error::TooLarge { .. }) => {
                (Status::SkippedResource, BTreeMap::new(), Some(e.to_string()), Some(json!({"params": params.clone()})))
            }
            Err(e) => (Status::Fail, BTreeMap::new(), Some(e.to_string()), Some(json!({"params": params.clone()}))),
        };
        CheckRecord { suite: SUITES[suite].0.to_string(), check: name.clone(), params: params.clone(), status, tables, detail, replay, time_ms }
    })
}

fn tiny<F: Field>(field: F, seed: u64) -> Gen<F> {
    let mut g = Gen::new(field, seed);
    g.max_dim = 1;
    g.lo = 0;
    g.hi = 1;
    g
}

fn small<F: Field>(field: F, seed: u64) -> Gen<F> {
    let mut g = Gen::new(field, seed);
    g.max_dim = 2;
    g.hi = 1;
    g
}

fn named(name: &str) -> FunctorSpec {
    FunctorSpec::parse(name).expect("catalog name")
}

fn catalog() -> Vec<FunctorSpec> {
    FunctorSpec::catalog().into_iter().map(|(_, s)| s).collect()
}

/// The context a check evaluates "at A": the scenario's, or `fallback`.
fn base_context<F: Field>(field: F, p: &Params, mut fallback: impl FnMut() -> Arc<Context<F>>) -> Result<Arc<Context<F>>> {
    match &p.context {
        Some(v) => match v.get("generate") {
            Some(g) => generated_context(field, p.seed, g),
            None => context_from_json(field, v),
        },
        None => Ok(fallback()),
    }
}

/// A context from generator parameters `{cofibrant, max_dim, lo, hi}`.
pub fn generated_context<F: Field>(field: F, seed: u64, v: &Value) -> Result<Arc<Context<F>>> {
    let int = |k: &str, d: i64| -> Result<i64> {
        match v.get(k) {
            None => Ok(d),
            Some(x) => x.as_i64().ok_or_else(|| Error::Parse(format!("context.generate.{k} must be an integer"))),
        }
    };
    let mut g = Gen::new(field, seed);
    g.max_dim = int("max_dim", 1)?.max(0) as usize;
    g.lo = int("lo", 0)?;
    g.hi = int("hi", 1)?;
    if g.hi < g.lo {
        return Err(Error::Parse("context.generate: hi must be at least lo".into()));
    }
    let cofibrant = match v.get("cofibrant") {
        None => true,
        Some(b) => b.as_bool().ok_or_else(|| Error::Parse("context.generate.cofibrant must be a boolean".into()))?,
    };
    Ok(g.context(cofibrant))
}

fn objects_json<F: Field>(s: &Session<F>, xs: &[NodeId]) -> Result<Value> {
    Ok(Value::Array(xs.iter().map(|&x| s.object(x).map(|o| object_to_json(&o))).collect::<Result<_>>()?))
}

/// The checks of one suite.
pub fn tasks<'a, F: Field>(suite: usize, field: F, p: &'a Params) -> Vec<Task<'a>> {
    match suite {
        0 => foundations(field, p),
        1 => cube_models(field, p),
        2 => cotriple_axioms(field, p),
        3 => reducedness(field, p),
        4 => degree_excision(field, p),
        5 => excisive_cubes(field, p),
        6 => skeleton_fiber(field, p),
        7 => tower_agreement(field, p),
        8 => posthomology_towers(field, p),
        9 => perp_unit_zero(field, p),
        10 => beta(field, p),
        _ => convergence(field, p),
    }
}

fn d_squared_zero<F: Field>(c: &ChainComplex<F>) -> bool {
    c.is_zero() || (c.lo()..=c.hi() + 1).all(|n| c.d(n - 1).mul(&c.d(n)).is_zero())
}

fn foundations<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    const BATCH: usize = 25;
    let total = p.samples(500);
    (0..total.div_ceil(BATCH))
        .map(|b| {
            let count = BATCH.min(total - b * BATCH);
            let seed = task_seed(p.seed, 0, b);
            check(0, format!("chain maps batch {b}"), json!({"seed": seed, "count": count}), move || {
                let mut g = Gen::new(field, seed);
                for i in 0..count {
                    let x = Arc::new(g.complex());
                    let y = Arc::new(g.complex());
                    let f = g.chain_map(&x, &y);
                    let fib = hofib(&f);
                    let cof = cone(&f);
                    let (hx, hy, hf, hc) = (x.homology(), y.homology(), fib.homology(), cof.homology());
                    let (lo, hi) = (x.lo().min(y.lo()) - 2, x.hi().max(y.hi()) + 2);
                    let les = (lo..=hi).all(|n| {
                        let ker = hx.get(n) - f.homology_rank(n);
                        let coker = hy.get(n + 1) - f.homology_rank(n + 1);
                        hf.get(n) == ker + coker
                    });
                    let mut kunneth = BTreeMap::new();
                    for (a, da) in &hx.0 {
                        for (b, db) in &hy.0 {
                            *kunneth.entry(a + b).or_insert(0) += da * db;
                        }
                    }
                    let tensor = ChainComplex::tensor(&x, &y).homology();
                    let failures: Vec<&str> = [
                        (d_squared_zero(&fib) && d_squared_zero(&cof), "d∘d"),
                        (les, "long exact sequence"),
                        (hf.euler() == hx.euler() - hy.euler(), "Euler characteristic"),
                        (hc == hf.shifted(1), "cone against fiber"),
                        (tensor == Graded(kunneth), "Künneth"),
                    ]
                    .into_iter()
                    .filter(|(ok, _)| !ok)
                    .map(|(_, what)| what)
                    .collect();
                    if !failures.is_empty() {
                        let inputs = json!({"sample": i, "map": crate::json::map_to_json(&f),
                            "source": crate::json::complex_to_json(&x), "target": crate::json::complex_to_json(&y)});
                        return Ok(Outcome::new(false)
                            .table("hofib", hf)
                            .table("cone", hc)
                            .detail(format!("sample {i}: {}", failures.join(", ")))
                            .inputs(inputs));
                    }
                }
                Ok(Outcome::new(true))
            })
        })
        .collect()
}

fn cube_models<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    const BATCH: usize = 10;
    let total = p.samples(100);
    (0..total.div_ceil(BATCH))
        .map(|b| {
            let count = BATCH.min(total - b * BATCH);
            let seed = task_seed(p.seed, 1, b);
            check(1, format!("cubes batch {b}"), json!({"seed": seed, "count": count}), move || {
                let mut g = small(field, seed);
                let mut cartesian = 0;
                for i in 0..count {
                    let n = 2 + (b * BATCH + i) % 2;
                    let c = if i % 4 == 3 { g.degenerate_cube(n) } else { g.cube(n) };
                    let tf = c.tfiber().complex.homology();
                    let hl = c.holim_fiber().homology();
                    let (cart, cocart) = (c.is_cartesian(), c.is_cocartesian());
                    cartesian += cart as usize;
                    if tf != hl || cart != cocart {
                        return Ok(Outcome::new(false)
                            .table("tfiber", tf)
                            .table("holim fiber", hl)
                            .detail(format!("sample {i} (n = {n}): cartesian {cart}, cocartesian {cocart}"))
                            .inputs(crate::json::cube_to_json(&c)));
                    }
                }
                Ok(Outcome::new(true).detail(format!("{cartesian} of {count} cartesian")))
            })
        })
        .collect()
}

fn cotriple_axioms<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    let specs = p.functors(["const", "underlying", "tensor2", "tensor3", "sym2"].map(named).to_vec());
    let count = p.samples(20);
    let mut out = Vec::new();
    for (si, spec) in specs.into_iter().enumerate() {
        for n in 1..=p.n_max(2) {
            let seed = task_seed(p.seed, 2, si * 8 + n);
            let spec = spec.clone();
            let params = json!({"functor": spec.repr(), "n": n, "seed": seed, "count": count});
            out.push(check(2, format!("{} n={n}", spec.repr()), params, move || {
                let mut g = tiny(field, seed);
                for i in 0..count {
                    let ctx = if i % 4 == 3 { Context::pointed(field) } else { g.context(true) };
                    let s = Session::new(&ctx).with_cap(p.cap);
                    let xs: Vec<NodeId> = (0..n).map(|_| s.leaf(&g.object(&ctx))).collect();
                    let x = xs[0];
                    let delta = comultiplication(&s, &spec, n, x)?;
                    let d = |k: usize, j: usize| counit(&s, &spec, n, x, k, j);
                    let sd = |k: usize, j: usize| degeneracy(&s, &spec, n, x, k, j);
                    let mut bad = Vec::new();
                    if !delta.then(&d(2, 0)?).is_identity() || !delta.then(&d(2, 1)?).is_identity() {
                        bad.push("counit".to_string());
                    }
                    if delta.then(&sd(2, 0)?) != delta.then(&sd(2, 1)?) {
                        bad.push("coassociativity".into());
                    }
                    let h = functor_cube(&s, &spec, &build_coproduct_cube(&s, &xs))?;
                    let dbl = doubled(&h);
                    if !dbl.delta.then(&dbl.gamma).is_identity() {
                        bad.push("section".into());
                    }
                    if i < 3 {
                        for j in 0..3 {
                            for l in 0..j {
                                if d(3, j)?.then(&d(2, l)?) != d(3, l)?.then(&d(2, j - 1)?) {
                                    bad.push(format!("d_{l} d_{j}"));
                                }
                            }
                        }
                    }
                    if !bad.is_empty() {
                        let inputs = json!({"context": context_to_json(&ctx), "objects": objects_json(&s, &xs)?});
                        return Ok(Outcome::new(false).detail(format!("sample {i}: {}", bad.join(", "))).inputs(inputs));
                    }
                }
                Ok(Outcome::new(true))
            }));
        }
    }
    out
}

fn reducedness<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    let specs = p.functors(catalog());
    let count = p.samples(5);
    let mut out = Vec::new();
    for (si, spec) in specs.iter().cloned().enumerate() {
        let seed = task_seed(p.seed, 3, si);
        let params = json!({"functor": spec.repr(), "n_max": 3, "seed": seed, "count": count});
        let spec2 = spec.clone();
        out.push(check(3, format!("{} B slot", spec.repr()), params, move || {
            let spec = &spec2;
            let mut g = tiny(field, seed);
            for n in 1..=3 {
                for i in 0..count {
                    let ctx = g.context(true);
                    let s = Session::new(&ctx).with_cap(p.cap);
                    let mut xs: Vec<NodeId> = (0..n).map(|_| s.leaf(&g.object(&ctx))).collect();
                    xs[g.below(n)] = s.terminal();
                    let h = cross_effect(&s, &spec, &xs)?.complex.homology();
                    if !h.is_zero() {
                        let inputs = json!({"context": context_to_json(&ctx), "objects": objects_json(&s, &xs)?});
                        return Ok(Outcome::new(false).table("cr", h).detail(format!("n = {n}, sample {i}")).inputs(inputs));
                    }
                }
            }
            Ok(Outcome::new(true))
        }));
        let seed = task_seed(p.seed, 3, 100 + si);
        let params = json!({"functor": spec.repr(), "seed": seed, "count": count});
        let spec = spec.clone();
        out.push(check(3, format!("{} degree ladder", spec.repr()), params, move || {
            let mut g = tiny(field, seed);
            let mut ladder = Vec::new();
            for n in 0..=2 {
                let ctx = g.context(true);
                let s = Session::new(&ctx).with_cap(p.cap);
                let b = s.terminal();
                let (mut lower_all, mut upper_all) = (true, true);
                for _ in 0..count {
                    let xs: Vec<NodeId> = (0..n + 2).map(|_| s.leaf(&g.object(&ctx))).collect();
                    // cr_{n+2}F(X) is the cr_2 of cr_{n+1}F(X_1, …, X_n, −) at (X_{n+1}, X_{n+2})
                    let (u, v) = (xs[n], xs[n + 1]);
                    let lower: Vec<Vec<NodeId>> = [(u, v), (b, v), (u, b), (b, b)]
                        .iter()
                        .map(|&(l, r)| xs[..n].iter().copied().chain([s.coprod(&[l, r])]).collect())
                        .collect();
                    let lo = degree_test(&s, &spec, n, &lower)?;
                    let up = degree_test(&s, &spec, n + 1, &[xs.clone()])?;
                    if lo && !up {
                        let inputs = json!({"context": context_to_json(&ctx), "objects": objects_json(&s, &xs)?});
                        return Ok(Outcome::new(false).detail(format!("degree {n} but not degree {}", n + 1)).inputs(inputs));
                    }
                    lower_all &= lo;
                    upper_all &= up;
                }
                ladder.push(format!("{n}:{lower_all}/{upper_all}"));
            }
            Ok(Outcome::new(true).detail(ladder.join(" ")))
        }));
    }
    let seed = task_seed(p.seed, 3, 200);
    let params = json!({"functor": "tensor3", "n": 2, "seed": seed, "count": count});
    out.push(check(3, "iterated cross effect tensor3 n=2".into(), params, move || {
        let spec = FunctorSpec::tensor(3);
        let ctx = Context::pointed(field);
        let s = Session::new(&ctx).with_cap(p.cap);
        let k0 = Arc::new(ChainComplex::concentrated(field, 0, 1));
        let unit = crate::cfcat::CfObject::new(
            &ctx,
            k0,
            |_| crate::Matrix::zeros(field, 0, 0),
            |_| crate::Matrix::zeros(field, 0, 1),
        )?;
        let x = s.leaf(&unit);
        let (a, b) = iterated_cr2_and_crn(&s, &spec, &[x, x, x])?;
        if a != b || a != Graded::from_pairs(&[(0, 6)]) {
            return Ok(Outcome::new(false).table("iterated", a).table("direct", b).detail("unit object"));
        }
        let mut g = tiny(field, seed);
        for i in 0..count {
            let ctx = g.context(true);
            let s = Session::new(&ctx).with_cap(p.cap);
            let xs: Vec<NodeId> = (0..3).map(|_| s.leaf(&g.object(&ctx))).collect();
            let (a, b) = iterated_cr2_and_crn(&s, &spec, &xs)?;
            if a != b {
                let inputs = json!({"context": context_to_json(&ctx), "objects": objects_json(&s, &xs)?});
                return Ok(Outcome::new(false).table("iterated", a).table("direct", b).detail(format!("sample {i}")).inputs(inputs));
            }
        }
        Ok(Outcome::new(true).table("unit", Graded::from_pairs(&[(0, 6)])))
    }));
    out
}

fn degree_excision<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    let specs = p.functors(catalog());
    let count = p.samples(20);
    let rows = p.samples(5);
    let mut out = Vec::new();
    for (si, spec) in specs.iter().cloned().enumerate() {
        for n in 1..=p.n_max(2) {
            let seed = task_seed(p.seed, 4, si * 8 + n);
            let spec = spec.clone();
            let params = json!({"functor": spec.repr(), "n": n, "seed": seed, "count": count});
            out.push(check(4, format!("{} n={n}", spec.repr()), params, move || {
                let mut g = tiny(field, seed);
                let (mut degree, mut excisive) = (true, true);
                for _ in 0..count {
                    let ctx = g.context(true);
                    let s = Session::new(&ctx).with_cap(p.cap);
                    let xs: Vec<NodeId> = (0..=n).map(|_| s.leaf(&g.object(&ctx))).collect();
                    let subst = |mask: usize, o: NodeId| -> Vec<NodeId> {
                        xs.iter().enumerate().map(|(i, &x)| if mask >> i & 1 == 1 { o } else { x }).collect()
                    };
                    for mask in 0..1usize << (n + 1) {
                        degree &= degree_test(&s, &spec, n, &[subst(mask, s.initial())])?;
                        excisive &= excision_cube(&s, &spec, &subst(mask, s.terminal()))?.is_cartesian();
                    }
                }
                Ok(Outcome::new(degree == excisive).detail(format!("degree {n}: {degree}, excisive: {excisive}")))
            }));
        }
        let Some(deg) = spec.declared_degree().filter(|&d| d <= 2) else { continue };
        let seed = task_seed(p.seed, 4, 100 + si);
        let params = json!({"functor": spec.repr(), "arity": deg + 1, "seed": seed, "count": rows});
        out.push(check(4, format!("{} double cube", spec.repr()), params, move || {
            let mut g = tiny(field, seed);
            for i in 0..rows {
                let ctx = g.context(true);
                let s = Session::new(&ctx).with_cap(p.cap);
                let xs: Vec<NodeId> = (0..=deg).map(|_| s.leaf(&g.object(&ctx))).collect();
                let bad: Vec<usize> = double_cube_rows(&s, &spec, &xs)?.into_iter().filter(|r| !r.1).map(|r| r.0).collect();
                if !bad.is_empty() {
                    let inputs = json!({"context": context_to_json(&ctx), "objects": objects_json(&s, &xs)?});
                    return Ok(Outcome::new(false).detail(format!("sample {i}: rows {bad:?} not cartesian")).inputs(inputs));
                }
            }
            Ok(Outcome::new(true))
        }));
    }
    out
}

fn excisive_cubes<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    let specs: Vec<FunctorSpec> = p
        .functors(catalog())
        .into_iter()
        .filter(|s| s.commutes_with_realization() && s.declared_degree().is_some_and(|d| d <= 2))
        .collect();
    let count = p.samples(10);
    specs
        .into_iter()
        .enumerate()
        .map(|(si, spec)| {
            let seed = task_seed(p.seed, 5, si);
            let params = json!({"functor": spec.repr(), "seed": seed, "count": count});
            check(5, spec.repr(), params, move || {
                let mut g = tiny(field, seed);
                for i in 0..count {
                    let ctx = g.context(true);
                    let z = g.object(&ctx);
                    let ys: Vec<CfMorphism<F>> = (0..3).map(|_| g.cofibration_from(&z)).collect();
                    let s = Session::new(&ctx).with_cap(p.cap);
                    let (under, image) = strongly_cocartesian_image(&s, &spec, &z, &ys)?;
                    if !under.is_strongly_cocartesian() {
                        return Err(Error::Invalid("generated cube is not strongly cocartesian".into()));
                    }
                    if !image.is_cartesian() {
                        let inputs = json!({"context": context_to_json(&ctx), "cube": crate::json::cube_to_json(&under)});
                        return Ok(Outcome::new(false)
                            .table("tfiber", image.tfiber().complex.homology())
                            .detail(format!("sample {i}"))
                            .inputs(inputs));
                    }
                }
                Ok(Outcome::new(true))
            })
        })
        .collect()
}

fn skeleton_fiber<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    let specs = p.functors(catalog());
    let mut out = Vec::new();
    for spec in specs {
        for n in 1..=p.n_max(2) {
            for k in 0..=p.k_max(2) {
                let spec = spec.clone();
                let params = json!({"functor": spec.repr(), "n": n, "k": k});
                out.push(check(6, format!("{} n={n} k={k}", spec.repr()), params, move || {
                    let ctx = base_context(field, p, || Context::unit_target(field))?;
                    let s = Session::new(&ctx).with_cap(p.cap);
                    let r = skeleton_fiber_check(&s, &spec, n, s.initial(), k)?;
                    let mut o = Outcome::new(r.passed())
                        .table("skeleton", r.left.clone())
                        .table("fiber", r.fiber.clone())
                        .inputs(json!({"context": context_to_json(&ctx)}));
                    if k == 0 {
                        let cube = vertex_cube_check(&s, &spec, n)?;
                        o.ok &= cube;
                        o = o.detail(format!("vertexwise cube comparison: {cube}"));
                    }
                    Ok(o)
                }));
            }
        }
    }
    out
}

fn tower_agreement<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    let specs = p.functors(["tensor2", "linear_plus_tensor2"].map(named).to_vec());
    let contexts = if p.context.is_some() { 1 } else { 3 };
    let k_max = p.k_max(3);
    let mut out = Vec::new();
    for (ci, spec) in (0..contexts).flat_map(|c| specs.iter().map(move |s| (c, s.clone()))) {
        for n in 1..=p.n_max(2) {
            let seed = task_seed(p.seed, 7, ci);
            let spec = spec.clone();
            let label = if p.context.is_some() { "scenario".to_string() } else if ci == 0 { "unit".into() } else { format!("random {ci}") };
            let params = json!({"functor": spec.repr(), "n": n, "k_max": k_max, "context": label, "seed": seed});
            out.push(check(7, format!("{} n={n} {label}", spec.repr()), params, move || {
                let ctx = base_context(field, p, || {
                    if ci == 0 {
                        Context::unit_target(field)
                    } else {
                        let mut g = tiny(field, seed);
                        g.context(true)
                    }
                })?;
                let s = Session::new(&ctx).with_cap(p.cap);
                let pt = pn_stage(&s, &spec, n, s.initial(), k_max, WINDOW)?;
                let gt = gamma_tower(&s, &spec, n, s.initial(), k_max, WINDOW)?;
                let (ph, gh) = (pt.stable_homology(), gt.stable_homology());
                let ok = pt.stabilized() && gt.stabilized() && ph == gh;
                Ok(Outcome::new(ok)
                    .table("P", ph)
                    .table("Gamma", gh)
                    .detail(format!("P stable at {:?}, Gamma stable at {:?}", pt.stable_at, gt.stable_at))
                    .inputs(json!({"context": context_to_json(&ctx)})))
            }));
        }
    }
    out
}

fn posthomology_towers<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    let spec = p.functors(vec![named("h1")]).remove(0);
    let count = p.samples(20);
    let seed = task_seed(p.seed, 8, 0);
    let params = json!({"functor": spec.repr(), "n": 1, "seed": seed, "count": count});
    vec![check(8, format!("{} n=1", spec.repr()), params, move || {
        let ctx = base_context(field, p, || Context::pointed(field))?;
        let s = Session::new(&ctx).with_cap(p.cap);
        let towers = |x: NodeId| -> Result<(bool, Graded, Graded)> {
            let pt = pn_stage(&s, &spec, 1, x, 4, WINDOW)?;
            let gt = gamma_tower(&s, &spec, 1, x, 3, WINDOW)?;
            Ok((pt.stabilized() && gt.stabilized(), pt.stable_homology(), gt.stable_homology()))
        };
        let (stable_a, pa, ga) = towers(s.initial())?;
        let at_a = stable_a && pa == ga;
        let mut o = Outcome::new(false).table("P(A)", pa).table("Gamma(A)", ga);
        let mut g = small(field, seed);
        for i in 0..count {
            let xo = g.object(&ctx);
            let x = s.leaf(&xo);
            let (stable, px, gx) = towers(x)?;
            if stable && px != gx {
                o.ok = at_a;
                return Ok(o
                    .table("P(X)", px)
                    .table("Gamma(X)", gx)
                    .detail(format!("witness at sample {i}; agreement at A: {at_a}"))
                    .inputs(json!({"context": context_to_json(&ctx), "object": object_to_json(&xo)})));
            }
        }
        Ok(o.detail(format!("no witness among {count} samples; agreement at A: {at_a}"))
            .inputs(json!({"context": context_to_json(&ctx)})))
    })]
}

fn perp_unit_zero<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    let specs = p.functors(catalog());
    let mut out = Vec::new();
    for spec in specs {
        for n in 1..=p.n_max(2) {
            let spec = spec.clone();
            let params = json!({"functor": spec.repr(), "n": n});
            out.push(check(9, format!("{} n={n}", spec.repr()), params, move || {
                let ctx = base_context(field, p, || Context::unit_target(field))?;
                let s = Session::new(&ctx).with_cap(p.cap);
                let ranks = perp_tn_ranks(&s, &spec, n)?;
                Ok(Outcome::new(ranks.is_zero()).table("ranks", ranks).inputs(json!({"context": context_to_json(&ctx)})))
            }));
        }
    }
    out
}

fn beta<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    let spec = p.functors(vec![FunctorSpec::tensor(2)]).remove(0);
    let k_max = p.k_max(2);
    (0..p.samples(5))
        .map(|i| {
            let seed = task_seed(p.seed, 10, i);
            let spec = spec.clone();
            let params = json!({"functor": spec.repr(), "n": 1, "k_max": k_max, "seed": seed});
            check(10, format!("{} beta {i}", spec.repr()), params, move || {
                let mut g = tiny(field, seed);
                let ctx = base_context(field, p, || g.context(true))?;
                let b = g.object(&ctx);
                let s = Session::new(&ctx).with_cap(p.cap);
                let rows = beta_tower(&s, &spec, &b, 1, k_max)?;
                let mut o = Outcome::new(rows.iter().all(|r| r.agrees))
                    .inputs(json!({"context": context_to_json(&ctx), "beta": object_to_json(&b)}));
                for r in rows {
                    o = o.table(&format!("skeleton k={}", r.k), r.skeleton).table(&format!("fiber k={}", r.k), r.fiber);
                }
                Ok(o)
            })
        })
        .collect()
}

fn convergence<F: Field>(field: F, p: &Params) -> Vec<Task<'_>> {
    let specs = p.functors(catalog());
    let count = p.samples(3);
    let n_max = p.n_max(2);
    specs
        .into_iter()
        .enumerate()
        .map(|(si, spec)| {
            let seed = task_seed(p.seed, 11, si);
            let params = json!({"functor": spec.repr(), "n_max": n_max, "t_max": 2, "seed": seed, "count": count});
            check(11, spec.repr(), params, move || {
                let mut g = tiny(field, seed);
                let ctx = base_context(field, p, || g.context(true))?;
                let s = Session::new(&ctx).with_cap(p.cap);
                let mut o = Outcome::new(true);
                let mut lines = Vec::new();
                for i in 0..count {
                    let xo = g.object(&ctx);
                    let prof = convergence_profile(&s, &spec, n_max, 2, s.leaf(&xo))?;
                    for c in &prof.checks {
                        lines.push(format!("{i}/n={}: bound {} F_con {} measured {}", c.n, c.bound, c.f_con, c.measured));
                    }
                    if !prof.bound_holds() {
                        o.ok = false;
                        o = o.inputs(json!({"context": context_to_json(&ctx), "object": object_to_json(&xo)}));
                        break;
                    }
                }
                Ok(o.detail(lines.join(", ")))
            })
        })
        .collect()
}

/// Runs checks on a pool of `jobs` threads; records keep task order.
pub fn execute(tasks: Vec<Task<'_>>, jobs: usize) -> Vec<CheckRecord> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    pool.install(|| tasks.par_iter().map(|t| t()).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub field: String,
    pub seed: u64,
    pub cap: usize,
    pub strict: bool,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(field: FieldChoice, p: &Params, strict: bool, checks: Vec<CheckRecord>) -> Self {
        let count = |st: Status| checks.iter().filter(|c| c.status == st).count();
        let summary = Summary { pass: count(Status::Pass), fail: count(Status::Fail), skipped: count(Status::SkippedResource) };
        Report { schema: SCHEMA, field: field.label(), seed: p.seed, cap: p.cap, strict, checks, summary }
    }

    /// Failures, counting resource skips under `strict`.
    pub fn failures(&self) -> usize {
        self.summary.fail + if self.strict { self.summary.skipped } else { 0 }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width table of statuses and homology dimensions.
    pub fn to_text(&self) -> String {
        let mut out = format!("{:<20} {:<44} {:<8} homology\n", "suite", "check", "status");
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::SkippedResource => "skipped",
            };
            let tables: Vec<String> = c.tables.iter().map(|(k, g)| format!("{k}: {g}")).collect();
            out.push_str(&format!("{:<20} {:<44} {:<8} {}\n", c.suite, c.check, status, tables.join("; ")));
            if let Some(d) = &c.detail {
                out.push_str(&format!("{:<20} {:<44} {:<8} {d}\n", "", "", ""));
            }
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} skipped (resource cap {})\n",
            self.summary.pass, self.summary.fail, self.summary.skipped, self.cap
        ));
        out
    }
}

/// Runs `(suite, params)` pairs over `field` and assembles the report;
/// `base` supplies the report header.
pub fn run_plan(field: FieldChoice, plan: &[(usize, Params)], base: &Params, strict: bool, jobs: usize) -> Report {
    fn go<F: Field>(field: F, plan: &[(usize, Params)], jobs: usize) -> Vec<CheckRecord> {
        let all: Vec<Task<'_>> = plan.iter().flat_map(|(s, p)| tasks(*s, field, p)).collect();
        execute(all, jobs)
    }
    let checks = match field {
        FieldChoice::Prime(q) => go(crate::field::PrimeField::new(q).expect("validated prime"), plan, jobs),
        FieldChoice::Rational => go(crate::field::Rationals, plan, jobs),
    };
    Report::new(field, base, strict, checks)
}

/// One entry of a scenario's check list.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioCheck {
    pub suite: usize,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub samples: Option<usize>,
}

/// A scenario file: `{"schema": 1, "seed", "field", "cap", "context",
/// "functors", "checks": [{"name", "n", "k", "samples"}]}`; all but
/// `schema` and `checks` are optional.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub seed: Option<u64>,
    pub field: Option<FieldChoice>,
    pub cap: Option<usize>,
    pub context: Option<Value>,
    pub functors: Option<Vec<FunctorSpec>>,
    pub checks: Vec<ScenarioCheck>,
}

fn field_err(path: &str, msg: &str) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

fn opt_u64(v: &Value, key: &str, path: &str) -> Result<Option<u64>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => x.as_u64().map(Some).ok_or_else(|| field_err(&format!("{path}{key}"), "expected a non-negative integer")),
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("scenario is not valid JSON: {e}")))?;
        if !v.is_object() {
            return Err(field_err("scenario", "expected a JSON object"));
        }
        match v.get("schema").and_then(Value::as_u64) {
            Some(1) => {}
            Some(other) => return Err(field_err("schema", &format!("unsupported version {other}"))),
            None => return Err(field_err("schema", "missing; expected 1")),
        }
        let field = match v.get("field") {
            None | Some(Value::Null) => None,
            Some(Value::String(t)) => Some(FieldChoice::parse(t).map_err(|e| field_err("field", &e.to_string()))?),
            Some(Value::Number(n)) => Some(FieldChoice::parse(&n.to_string()).map_err(|e| field_err("field", &e.to_string()))?),
            Some(_) => return Err(field_err("field", "expected \"p\", \"rational\" or a prime")),
        };
        let functors = match v.get("functors") {
            None | Some(Value::Null) => None,
            Some(Value::Array(items)) => Some(
                items
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let parsed = match f {
                            Value::String(name) => FunctorSpec::parse(name),
                            other => serde_json::from_value(other.clone()).map_err(|e| Error::Parse(e.to_string())),
                        };
                        parsed.map_err(|e| field_err(&format!("functors[{i}]"), &e.to_string()))
                    })
                    .collect::<Result<_>>()?,
            ),
            Some(_) => return Err(field_err("functors", "expected an array")),
        };
        let context = match v.get("context") {
            None | Some(Value::Null) => None,
            Some(c) if c.is_object() => Some(c.clone()),
            Some(_) => return Err(field_err("context", "expected an object")),
        };
        let items = v.get("checks").and_then(Value::as_array).ok_or_else(|| field_err("checks", "missing or not an array"))?;
        let checks = items
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let path = format!("checks[{i}].");
                let name = c.get("name").and_then(Value::as_str).ok_or_else(|| field_err(&format!("{path}name"), "missing or not a string"))?;
                let suite = suite_index(name).map_err(|e| field_err(&format!("{path}name"), &e.to_string()))?;
                let us = |k: &str| opt_u64(c, k, &path).map(|o| o.map(|x| x as usize));
                Ok(ScenarioCheck { suite, n: us("n")?, k: us("k")?, samples: us("samples")? })
            })
            .collect::<Result<_>>()?;
        Ok(Scenario {
            seed: opt_u64(&v, "seed", "")?,
            field,
            cap: opt_u64(&v, "cap", "")?.map(|c| c as usize),
            context,
            functors,
            checks,
        })
    }

    /// Per-check parameters layered over `base`.
    pub fn plan(&self, base: &Params) -> Vec<(usize, Params)> {
        self.checks
            .iter()
            .map(|c| {
                let mut p = base.clone();
                p.max_n = c.n.or(p.max_n);
                p.max_k = c.k.or(p.max_k);
                p.samples = c.samples.or(p.samples);
                p.functors = self.functors.clone().or(p.functors);
                p.context = self.context.clone().or(p.context);
                (c.suite, p)
            })
            .collect()
    }
}
