//! Finite stages of the Goodwillie tower `T_n^k F` and of the cotriple tower
//! `Γ_n F`, the comparison maps between them, and the fiber-sequence checks.
//!
//! The `k`-skeleton of the resolution `⊥_{n+1}^{*+1}F(X)` is realized as the
//! homotopy colimit of the punctured `(k+1)`-cube `U ↦ ⊥^{|[k]∖U|}F(X)`,
//! whose edges are faces. Putting `F(X)` at the terminal vertex, the total
//! cofiber of the whole cube is the `Γ` stage.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::cfcat::CfObject;
use crate::chain::{cone, hofib, ChainComplex, ChainMap, Conn, Graded};
use crate::crosseff::{counit, functor_cube, perp};
use crate::cube::{build_coproduct_cube, popcount, total_map, Block, Cube, PosetDiagram, Total};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::functor::{map, tn_cube, tn_unit, value, FunctorSpec};
use crate::matrix::{Builder, Matrix};
use crate::session::{ArrowId, NodeId, Session};

/// Homological degrees in which stabilization is judged.
pub const WINDOW: (i64, i64) = (-2, 6);

/// One finite stage with its map from `F(X)`.
#[derive(Clone, Debug)]
pub struct TowerStage<F: Field> {
    pub n: usize,
    pub k: usize,
    pub value: Arc<ChainComplex<F>>,
    pub map: ChainMap<F>,
}

impl<F: Field> TowerStage<F> {
    pub fn homology(&self) -> Graded {
        self.value.homology()
    }
}

/// Stages `0..=k` of a tower, with the stabilization verdict.
#[derive(Clone, Debug)]
pub struct Tower<F: Field> {
    pub stages: Vec<TowerStage<F>>,
    pub homology: Vec<Graded>,
    /// First `k` at which stage `k−1 → k` is a homology isomorphism in the window.
    pub stable_at: Option<usize>,
    pub window: (i64, i64),
}

impl<F: Field> Tower<F> {
    pub fn last(&self) -> &TowerStage<F> {
        self.stages.last().expect("a tower has stage 0")
    }

    pub fn stabilized(&self) -> bool {
        self.stable_at.is_some()
    }

    pub fn stable_homology(&self) -> Graded {
        self.homology.last().unwrap().window(self.window.0, self.window.1)
    }
}

/// Whether `c` is an isomorphism on homology in every degree of the window.
pub fn iso_in_window<F: Field>(c: &ChainMap<F>, window: (i64, i64)) -> bool {
    let (hs, ht) = (c.source().homology(), c.target().homology());
    (window.0..=window.1).all(|d| hs.get(d) == ht.get(d) && c.homology_rank(d) == hs.get(d))
}

/// `T_n^k F` as a functor spec.
pub fn tn_power(spec: &FunctorSpec, n: usize, k: usize) -> FunctorSpec {
    (0..k).fold(spec.clone(), |g, _| FunctorSpec::tn(n, g))
}

/// `T_n F(X)` with its unit.
pub fn tn<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, x: NodeId) -> Result<TowerStage<F>> {
    tn_iterate(s, spec, n, x, 1)
}

/// `T_n^k F(X)` with the composite of units `F(X) → T_n^k F(X)`.
pub fn tn_iterate<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, x: NodeId, k: usize) -> Result<TowerStage<F>> {
    let base = value(s, spec, x)?;
    let mut stage = TowerStage { n, k: 0, value: base.clone(), map: ChainMap::identity(base) };
    for j in 1..=k {
        let c = tn_unit(s, n, &tn_power(spec, n, j - 1), x)?;
        stage = TowerStage { n, k: j, value: c.target().clone(), map: stage.map.then(&c) };
    }
    Ok(stage)
}

fn run_tower<F: Field>(
    k_max: usize,
    window: (i64, i64),
    mut stage: impl FnMut(usize) -> Result<(TowerStage<F>, Option<ChainMap<F>>)>,
) -> Result<Tower<F>> {
    let (first, _) = stage(0)?;
    let mut t = Tower { homology: vec![first.homology()], stages: vec![first], stable_at: None, window };
    for k in 1..=k_max {
        let (st, c) = stage(k)?;
        let c = c.expect("connecting map for k ≥ 1");
        t.homology.push(st.homology());
        t.stages.push(st);
        if iso_in_window(&c, window) {
            t.stable_at = Some(k);
            break;
        }
    }
    Ok(t)
}

/// The Goodwillie tower at `X` up to `k_max`, stopping once two consecutive
/// stages agree. The `P_n` stage is the last stage.
pub fn pn_stage<F: Field>(
    s: &Session<F>,
    spec: &FunctorSpec,
    n: usize,
    x: NodeId,
    k_max: usize,
    window: (i64, i64),
) -> Result<Tower<F>> {
    let mut prev: Option<ChainMap<F>> = None;
    run_tower(k_max, window, |k| {
        if k == 0 {
            let v = value(s, spec, x)?;
            let st = TowerStage { n, k, value: v.clone(), map: ChainMap::identity(v) };
            prev = Some(st.map.clone());
            return Ok((st, None));
        }
        let c = tn_unit(s, n, &tn_power(spec, n, k - 1), x)?;
        let m = prev.take().unwrap().then(&c);
        prev = Some(m.clone());
        Ok((TowerStage { n, k, value: c.target().clone(), map: m }, Some(c)))
    })
}

/// `|sk_k ⊥_{n+1}^{*+1} F|(X)` with the data of its cube model.
#[derive(Clone, Debug)]
pub struct SkeletonRealization<F: Field> {
    pub n: usize,
    pub k: usize,
    /// The augmented `(k+1)`-cube, `F(X)` at the terminal vertex.
    pub cube: Cube<F>,
    /// Its total cofiber, the `Γ_n` stage.
    pub full: Total<F>,
    pub value: Arc<ChainComplex<F>>,
    /// `|sk_k| → F(X)` induced by the counit; `cone(augmentation) = full`.
    pub augmentation: ChainMap<F>,
}

fn complement_size(k: usize, u: usize) -> usize {
    k + 1 - popcount(u)
}

/// The `(k+1)`-cube `U ↦ ⊥_{n+1}^{|[k]∖U|}F(X)` with face maps as edges.
pub fn skeleton_cube<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, x: NodeId, k: usize) -> Result<Cube<F>> {
    let dim = k + 1;
    let mut verts = Vec::with_capacity(1 << dim);
    for u in 0..1usize << dim {
        verts.push(perp(s, spec, n + 1, x, complement_size(k, u))?.complex().clone());
    }
    let total: usize = verts.iter().map(|v| v.total_dim()).sum();
    s.check_cap("skeleton cube", total)?;
    let mut faces: HashMap<(usize, usize), Arc<ChainMap<F>>> = HashMap::new();
    let mut edges = vec![vec![None; dim]; 1 << dim];
    for (u, row) in edges.iter_mut().enumerate() {
        for (i, e) in row.iter_mut().enumerate() {
            if u >> i & 1 == 1 {
                continue;
            }
            let j = complement_size(k, u);
            let pos = (0..i).filter(|&t| u >> t & 1 == 0).count();
            let face = match faces.get(&(j, pos)) {
                Some(m) => m.clone(),
                None => {
                    let m = Arc::new(counit(s, spec, n + 1, x, j, pos)?);
                    faces.insert((j, pos), m.clone());
                    m
                }
            };
            *e = Some(face);
        }
    }
    Ok(Cube::new(dim, verts, |u, i| edges[u][i].take().unwrap()))
}

/// The skeleton realization via the punctured-cube homotopy colimit.
pub fn skeleton_realization<F: Field>(
    s: &Session<F>,
    spec: &FunctorSpec,
    n: usize,
    x: NodeId,
    k: usize,
) -> Result<SkeletonRealization<F>> {
    let cube = skeleton_cube(s, spec, n, x, k)?;
    let full = cube.tcofiber();
    let last = (1usize << (k + 1)) - 1;
    let zero = Arc::new(ChainComplex::zero(s.field()));
    let mut verts = cube.vertices().to_vec();
    verts[last] = zero.clone();
    let punctured = Cube::new(k + 1, verts, |u, i| {
        if u | 1 << i == last {
            Arc::new(ChainMap::zero(cube.vertex(u).clone(), zero.clone()))
        } else {
            cube.edge(u, i).clone()
        }
    });
    let value = Arc::new(punctured.tcofiber().complex.shift(-1));
    let target = cube.vertex(last).clone();
    let augmentation = ChainMap::new(value.clone(), target.clone(), |e| {
        let (src, tgt) = (full.offsets(e + 1), full.offsets(e));
        let d = full.complex.d(e + 1);
        let rows: Vec<usize> = (tgt[last]..tgt[last + 1]).collect();
        let cols: Vec<usize> = (0..src[last]).collect();
        d.select_rows(&rows).select_cols(&cols)
    });
    Ok(SkeletonRealization { n, k, cube, full, value, augmentation })
}

/// The same realization as a bar-model homotopy colimit over nonempty
/// `S ⊆ {0, …, k}` under reverse inclusion.
pub fn skeleton_bar_hocolim<F: Field>(
    s: &Session<F>,
    spec: &FunctorSpec,
    n: usize,
    x: NodeId,
    k: usize,
) -> Result<ChainComplex<F>> {
    let elems: Vec<usize> = (1..1usize << (k + 1)).collect();
    let mut values = Vec::new();
    for &e in &elems {
        values.push(perp(s, spec, n + 1, x, popcount(e))?.complex().clone());
    }
    let mut faces: HashMap<(usize, usize), ChainMap<F>> = HashMap::new();
    let mut face = |j: usize, pos: usize| -> Result<ChainMap<F>> {
        if let Some(m) = faces.get(&(j, pos)) {
            return Ok(m.clone());
        }
        let m = counit(s, spec, n + 1, x, j, pos)?;
        faces.insert((j, pos), m.clone());
        Ok(m)
    };
    // removing elements from the top keeps the positions of the rest
    let mut maps: HashMap<(usize, usize), Arc<ChainMap<F>>> = HashMap::new();
    for (a, &sa) in elems.iter().enumerate() {
        for (b, &sb) in elems.iter().enumerate() {
            if sa == sb || sb & !sa != 0 {
                continue;
            }
            let mut cur = sa;
            let mut acc = ChainMap::identity(values[a].clone());
            for t in (0..=k).rev() {
                if sa >> t & 1 == 1 && sb >> t & 1 == 0 {
                    let pos = popcount(cur & ((1 << t) - 1));
                    acc = acc.then(&face(popcount(cur), pos)?);
                    cur &= !(1 << t);
                }
            }
            maps.insert((a, b), Arc::new(acc));
        }
    }
    let diagram = PosetDiagram::new(
        values,
        |a, b| elems[a] != elems[b] && elems[b] & !elems[a] == 0,
        |a, b| maps[&(a, b)].clone(),
    );
    Ok(diagram.hocolim())
}

/// Normalized Moore-complex oracle for `k ≤ 1`: `⊥F(X)` for `k = 0`, and
/// the totalization of `N_1 → N_0` with `N_1 = ⊥²F(X)/s_0` for `k = 1`.
pub fn skeleton_moore<F: Field>(
    s: &Session<F>,
    spec: &FunctorSpec,
    n: usize,
    x: NodeId,
    k: usize,
) -> Result<ChainComplex<F>> {
    let p1 = perp(s, spec, n + 1, x, 1)?;
    match k {
        0 => Ok(p1.complex().as_ref().clone()),
        1 => {
            let p2 = perp(s, spec, n + 1, x, 2)?;
            let s0 = crate::crosseff::degeneracy(s, spec, n + 1, x, 1, 0)?;
            let d = counit(s, spec, n + 1, x, 2, 0)?.add(&counit(s, spec, n + 1, x, 2, 1)?.scale(&s.field().neg(&s.field().one())));
            let c2 = p2.complex();
            let mut spans = std::collections::BTreeMap::new();
            if !c2.is_zero() {
                for e in c2.lo()..=c2.hi() {
                    spans.insert(e, s0.component(e).columns().into_iter().filter(|v| !v.is_empty()).collect());
                }
            }
            let (n1, qs) = c2.quotient(&spans)?;
            let n1 = Arc::new(n1);
            let f = s.field();
            // d_0 − d_1 kills the image of s_0, so it factors through N_1
            let dm = ChainMap::new(n1.clone(), p1.complex().clone(), |e| match qs.get(&e) {
                Some(q) => d.component(e).mul(&q.s),
                None => Matrix::zeros(f, p1.complex().dim(e), n1.dim(e)),
            });
            Ok(cone(&dm))
        }
        _ => Err(Error::Invalid("the Moore oracle covers k ≤ 1".into())),
    }
}

/// The `Γ_n` stage `k` with `γ: F(X) → Γ`.
pub fn gamma_stage<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, x: NodeId, k: usize) -> Result<TowerStage<F>> {
    let r = skeleton_realization(s, spec, n, x, k)?;
    Ok(TowerStage { n, k, value: r.full.complex.clone(), map: r.full.from_terminal() })
}

/// `Γ^{(k−1)} → Γ^{(k)}` induced by `sk_{k−1} ⊆ sk_k`: the stage-`(k−1)`
/// cube is the face of the stage-`k` cube where the last coordinate is set.
pub fn gamma_connecting<F: Field>(prev: &Total<F>, next: &Total<F>, k: usize) -> ChainMap<F> {
    let blocks: Vec<Block<F>> = (0..1usize << k)
        .map(|u| Block { from: u, to: u | 1 << k, negate: false, map: Arc::new(ChainMap::identity(prev.vertex(u).clone())) })
        .collect();
    total_map(prev, next, &blocks)
}

/// The cotriple tower at `X` up to `k_max`, stopping once two consecutive
/// stages agree.
pub fn gamma_tower<F: Field>(
    s: &Session<F>,
    spec: &FunctorSpec,
    n: usize,
    x: NodeId,
    k_max: usize,
    window: (i64, i64),
) -> Result<Tower<F>> {
    let mut prev: Option<Total<F>> = None;
    run_tower(k_max, window, |k| {
        let r = skeleton_realization(s, spec, n, x, k)?;
        let st = TowerStage { n, k, value: r.full.complex.clone(), map: r.full.from_terminal() };
        let c = prev.as_ref().map(|p| gamma_connecting(p, &r.full, k));
        prev = Some(r.full);
        Ok((st, c))
    })
}

fn full(n: usize) -> usize {
    (1 << n) - 1
}

/// Drops coordinate 1 of a set of `n+1` slots.
fn relabel(set: usize) -> usize {
    (set & 1) | (set >> 2) << 1
}

/// Level object for the sets `S_1, …, S_j` (innermost first).
fn level_vertex<F: Field>(s: &Session<F>, x: NodeId, n: usize, sets: &[usize]) -> NodeId {
    let b = s.terminal();
    sets.iter().fold(x, |v, &sj| s.coprod(&(0..n).map(|i| if sj >> i & 1 == 1 { b } else { v }).collect::<Vec<_>>()))
}

/// `ν_n^{(j)}: ⊥_{n+1}^j F(X) → ⊥_n^j F(X)`: restrict every level to sets
/// avoiding slot 1, then merge slot 1 into slot 0 at every level.
pub fn nu_power<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, x: NodeId, j: usize) -> Result<ChainMap<F>> {
    if n == 0 {
        return Err(Error::Invalid("ν_n needs n ≥ 1".into()));
    }
    let (src, tgt) = (perp(s, spec, n + 1, x, j)?, perp(s, spec, n, x, j)?);
    let b = s.terminal();
    let mut blocks = Vec::new();
    for m in 0..1usize << (j * (n + 1)) {
        let sets: Vec<usize> = (1..=j).map(|l| (m >> ((j - l) * (n + 1))) & full(n + 1)).collect();
        if sets.iter().any(|sl| sl >> 1 & 1 == 1) {
            continue;
        }
        let rs: Vec<usize> = sets.iter().map(|&sl| relabel(sl)).collect();
        let to = (1..=j).fold(0, |acc, l| acc | rs[l - 1] << ((j - l) * n));
        let mut a: ArrowId = s.id(x);
        for l in 1..=j {
            let sl = sets[l - 1];
            let (from_v, to_v) = (level_vertex(s, x, n + 1, &sets[..l]), level_vertex(s, x, n, &rs[..l]));
            let below = level_vertex(s, x, n + 1, &sets[..l - 1]);
            let kids: Vec<ArrowId> = (0..=n)
                .map(|c| match c {
                    0 => s.inject(to_v, 0, if sl & 1 == 1 { s.id(b) } else { a }),
                    1 => s.inject(to_v, 0, if sl & 1 == 1 { s.to_terminal(below) } else { a }),
                    _ => s.inject(to_v, c - 1, if sl >> c & 1 == 1 { s.id(b) } else { a }),
                })
                .collect();
            a = s.universal(from_v, to_v, &kids);
        }
        debug_assert_eq!((s.src(a), s.tgt(a)), (src.nodes[m], tgt.nodes[to]));
        blocks.push(Block { from: m, to, negate: false, map: map(s, spec, a)? });
    }
    Ok(total_map(&src.total, &tgt.total, &blocks))
}

/// `ν_n: ⊥_{n+1}F(X) → ⊥_nF(X)`.
pub fn nu_map<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, x: NodeId) -> Result<ChainMap<F>> {
    nu_power(s, spec, n, x, 1)
}

/// `q_n: Γ_n F(X) → Γ_{n−1} F(X)` at stage `k`, applying `ν_n` on every
/// vertex of the skeleton cube.
pub fn q_map<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, x: NodeId, k: usize) -> Result<ChainMap<F>> {
    if n == 0 {
        return Err(Error::Invalid("q_n needs n ≥ 1".into()));
    }
    let src = skeleton_realization(s, spec, n, x, k)?;
    let tgt = skeleton_realization(s, spec, n - 1, x, k)?;
    let mut nus: HashMap<usize, Arc<ChainMap<F>>> = HashMap::new();
    let mut blocks = Vec::new();
    for u in 0..1usize << (k + 1) {
        let j = complement_size(k, u);
        let m = match nus.get(&j) {
            Some(m) => m.clone(),
            None => {
                let m = Arc::new(nu_power(s, spec, n, x, j)?);
                nus.insert(j, m.clone());
                m
            }
        };
        blocks.push(Block { from: u, to: u, negate: false, map: m });
    }
    Ok(total_map(&src.full, &tgt.full, &blocks))
}

/// Comparison of `hofib(mid → right)` with `left`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub fiber: Graded,
    pub left: Graded,
    pub dims_equal: bool,
    pub euler_consistent: bool,
}

impl FiberReport {
    pub fn passed(&self) -> bool {
        self.dims_equal && self.euler_consistent
    }
}

pub fn verify_fiber_sequence<F: Field>(
    left: &ChainComplex<F>,
    mid: &ChainComplex<F>,
    right: &ChainComplex<F>,
    map_mid_right: &ChainMap<F>,
) -> FiberReport {
    assert_eq!(map_mid_right.source().as_ref(), mid, "map starts at mid");
    assert_eq!(map_mid_right.target().as_ref(), right, "map ends at right");
    let fib = hofib(map_mid_right);
    let (hf, hl) = (fib.homology(), left.homology());
    let euler = |c: &ChainComplex<F>| c.graded_dims().euler();
    let euler_consistent =
        hf.euler() == euler(mid) - euler(right) && hf.euler() == euler(&fib) && hl.euler() == euler(left);
    FiberReport { dims_equal: hf == hl, euler_consistent, fiber: hf, left: hl }
}

/// `hofib(F(X) → T_n^{k+1}F(X))` against `|sk_k ⊥_{n+1}^{*+1}F|(X)`.
pub fn skeleton_fiber_check<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, x: NodeId, k: usize) -> Result<FiberReport> {
    let t = tn_iterate(s, spec, n, x, k + 1)?;
    let sk = skeleton_realization(s, spec, n, x, k)?;
    Ok(verify_fiber_sequence(&sk.value, t.map.source(), &t.value, &t.map))
}

/// `B ⊗_A U → ⨿_{i ∈ U} B` over `A`: the `A` summand by the inclusion, the
/// copy of `B` at `t ∈ U` onto slot `t`, the gluing summands to zero.
fn collapse<F: Field>(s: &Session<F>, u: usize, slots: usize) -> Result<ArrowId> {
    let a = s.initial();
    let src = s.bar(a, popcount(u));
    let comps: Vec<NodeId> = (0..slots).map(|i| if u >> i & 1 == 1 { s.terminal() } else { a }).collect();
    let tgt = s.coprod(&comps);
    let f = s.field();
    let (sx, bc, ac) = (s.complex(src)?, s.ctx().b().clone(), s.ctx().a().clone());
    let tx = s.complex(tgt)?;
    let incl_a = s.object(tgt)?.incl().clone();
    let inclusions: Vec<ChainMap<F>> = if slots == 1 || comps.iter().all(|&c| c == a) {
        vec![]
    } else {
        s.coproduct(tgt)?.inclusions.clone()
    };
    let members: Vec<usize> = (0..slots).filter(|i| u >> i & 1 == 1).collect();
    let g = ChainMap::new(sx.clone(), tx.clone(), |d| {
        let mut m = Builder::new(f, tx.dim(d), sx.dim(d));
        m.block(0, 0, &incl_a.component(d));
        for (t, &i) in members.iter().enumerate() {
            let cs = ac.dim(d) + t * (bc.dim(d) + ac.dim(d - 1));
            let inj = if inclusions.is_empty() { Matrix::identity(f, bc.dim(d)) } else { inclusions[i].component(d) };
            m.block(0, cs, &inj);
        }
        m.build_sized(tx.dim(d))
    });
    s.register_between(src, tgt, g)
}

/// The vertex-wise comparison at `A`: `F(B ⊗_A U) → F(⨿_{i∈U} B)` is a
/// quasi-isomorphism at every vertex, commutes with the cube maps, and
/// induces a quasi-isomorphism from `hofib(F(A) → T_nF(A))` to `⊥_{n+1}F(A)`.
pub fn vertex_cube_check<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize) -> Result<bool> {
    let a = s.initial();
    let dim = n + 1;
    let bar_cube = tn_cube(s, n, spec, a, true)?;
    let cp_nodes = build_coproduct_cube(s, &vec![a; dim]);
    let cp_cube = functor_cube(s, spec, &cp_nodes)?;
    let mut maps = Vec::with_capacity(1 << dim);
    for u in 0..1usize << dim {
        let c = collapse(s, u, dim)?;
        debug_assert_eq!(s.tgt(c), cp_nodes.nodes[u]);
        let m = map(s, spec, c)?;
        if !m.is_quasi_iso() {
            return Ok(false);
        }
        maps.push(m);
    }
    for u in 0..1usize << dim {
        for i in 0..dim {
            if u >> i & 1 == 0 && bar_cube.edge(u, i).then(&maps[u | 1 << i]) != maps[u].then(cp_cube.edge(u, i)) {
                return Ok(false);
            }
        }
    }
    let (src, tgt) = (bar_cube.tfiber(), cp_cube.tfiber());
    let blocks: Vec<Block<F>> =
        maps.iter().enumerate().map(|(u, m)| Block { from: u, to: u, negate: false, map: m.clone() }).collect();
    Ok(total_map(&src, &tgt, &blocks).is_quasi_iso())
}

/// `H(⊥_{n+1}F(A)) → H(T_n ⊥_{n+1}F(A))`, which should vanish.
pub fn perp_tn_ranks<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize) -> Result<Graded> {
    let perp_spec = FunctorSpec::perp(n + 1, spec.clone());
    Ok(tn_unit(s, n, &perp_spec, s.initial())?.homology_ranks())
}

/// Per-`k` outcome of the restricted-context comparison.
#[derive(Clone, Debug, Serialize)]
pub struct BetaRow {
    pub k: usize,
    pub skeleton: Graded,
    pub fiber: Graded,
    pub agrees: bool,
}

/// Skeleton against fiber with `X` in place of `A`: the skeleton is computed in the context
/// `X → Cyl(β)` where `X` is initial, the Goodwillie side at `X` in the
/// original context.
pub fn beta_tower<F: Field>(
    s: &Session<F>,
    spec: &FunctorSpec,
    beta: &Arc<CfObject<F>>,
    n: usize,
    k_max: usize,
) -> Result<Vec<BetaRow>> {
    let x = s.leaf(beta);
    let restricted = crate::cfcat::Context::restrict_cofibrant(beta);
    let r = Session::new(&restricted).with_cap(s.cap);
    let mut rows = Vec::new();
    for k in 0..=k_max {
        let t = tn_iterate(s, spec, n, x, k + 1)?;
        let fiber = hofib(&t.map).homology();
        let skeleton = skeleton_realization(&r, spec, n, r.initial(), k)?.value.homology();
        rows.push(BetaRow { k, agrees: fiber == skeleton, skeleton, fiber });
    }
    Ok(rows)
}

/// Connectivity table for the convergence check.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `conn(⊥_n^t F(X))` for `t = 1..=t_max`
    pub conn: Vec<Conn>,
    /// `F_con(X, n)` over the computed range of `t`
    pub f_con: Conn,
    /// `min_t conn_t + (t − 1)` over the computed range
    pub bound: Conn,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceCheck {
    pub n: usize,
    /// `F_con(X, n+1)`
    pub f_con: Conn,
    /// the stage bound of row `n+1`
    pub bound: Conn,
    /// connectivity of `F(X) → Γ_n` at stage `t_max − 1`
    pub measured: Conn,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceProfile {
    pub rows: Vec<ConvergenceRow>,
    pub checks: Vec<ConvergenceCheck>,
}

impl ConvergenceProfile {
    /// The stage bound never exceeds the measured connectivity.
    pub fn bound_holds(&self) -> bool {
        self.checks.iter().all(|c| c.bound <= c.measured)
    }

    /// Same with `F_con`, whose range `1 ≤ t ≤ c` is empty for `c ≤ 0`.
    pub fn f_con_holds(&self) -> bool {
        self.checks.iter().all(|c| c.f_con <= c.measured)
    }
}

/// Largest `c` with `conn_t ≥ c − (t−1)` for `1 ≤ t ≤ min(c, conn.len())`.
/// Every `c ≤ 0` qualifies vacuously.
pub fn f_con(conn: &[Conn]) -> Conn {
    let finite: Vec<i64> = conn
        .iter()
        .enumerate()
        .filter_map(|(i, c)| if let Conn::Finite(v) = c { Some(v + i as i64) } else { None })
        .collect();
    let Some(&hi) = finite.iter().max() else {
        return Conn::Infinite;
    };
    let ok = |c: i64| conn.iter().enumerate().take(c.max(0) as usize).all(|(i, ct)| *ct >= Conn::Finite(c - i as i64));
    Conn::Finite((0..=hi.max(0) + conn.len() as i64).rev().find(|&c| ok(c)).unwrap_or(0))
}

/// Largest `c` with `conn_t ≥ c − (t−1)` for every computed `t`; the
/// realization of `sk_{T−1}` is then `c`-connected.
pub fn stage_bound(conn: &[Conn]) -> Conn {
    conn.iter().enumerate().map(|(i, c)| c.plus(i as i64)).min().unwrap_or(Conn::Infinite)
}

/// `conn(⊥_n^t F(X))` for `n ≤ n_max + 1`, `t ≤ t_max`, against the
/// connectivity of `F(X) → Γ_n` at stage `t_max − 1`.
pub fn convergence_profile<F: Field>(
    s: &Session<F>,
    spec: &FunctorSpec,
    n_max: usize,
    t_max: usize,
    x: NodeId,
) -> Result<ConvergenceProfile> {
    let mut rows = Vec::new();
    for n in 1..=n_max + 1 {
        let conn: Vec<Conn> = (1..=t_max).map(|t| Ok(perp(s, spec, n, x, t)?.complex().connectivity())).collect::<Result<_>>()?;
        rows.push(ConvergenceRow { n, f_con: f_con(&conn), bound: stage_bound(&conn), conn });
    }
    let mut checks = Vec::new();
    for n in 1..=n_max {
        let g = gamma_stage(s, spec, n, x, t_max - 1)?;
        checks.push(ConvergenceCheck { n, f_con: rows[n].f_con, bound: rows[n].bound, measured: g.map.connectivity() });
    }
    Ok(ConvergenceProfile { rows, checks })
}
