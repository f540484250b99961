//! Cross effects, the diagonal cotriple `⊥_n` with its counit and
//! comultiplication, and the degree and excision tests.
//!
//! `⊥_n^k F(X)` is the total fiber of one `kn`-cube. Level `j` (the `j`-th
//! coproduct applied to `X`, counting from the inside) uses coordinates
//! `(k−j)n .. (k−j+1)n`, so the innermost level sits in the highest bits.

use std::sync::Arc;

use crate::cfcat::{CfMorphism, CfObject};
use crate::chain::{ChainComplex, ChainMap, Graded};
use crate::cube::{
    build_coproduct_cube, build_double_cube, build_initial_cube, generate_strongly_cocartesian, total_map,
    Block, Cube, NodeCube, Total,
};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::functor::{map, value, FunctorSpec};
use crate::session::{ArrowId, NodeId, Session};

/// `cr_nF(X_1, …, X_n)` as the total fiber of `F` over the coproduct cube.
pub fn cross_effect<F: Field>(s: &Session<F>, spec: &FunctorSpec, xs: &[NodeId]) -> Result<Total<F>> {
    let cube = functor_cube(s, spec, &build_coproduct_cube(s, xs))?;
    Ok(cube.tfiber())
}

/// `F` applied to a cube of nodes, respecting the session cap.
pub fn functor_cube<F: Field>(s: &Session<F>, spec: &FunctorSpec, nc: &NodeCube) -> Result<Cube<F>> {
    let cube = nc.apply(|x| value(s, spec, x), |a| map(s, spec, a))?;
    s.check_cap("cube totalization", cube.total_dim())?;
    Ok(cube)
}

/// `⊥_n^k F(X)` with its vertex bookkeeping.
pub struct PerpValue<F: Field> {
    pub n: usize,
    pub k: usize,
    pub total: Total<F>,
    /// vertex object of every multi-index
    pub nodes: Vec<NodeId>,
}

impl<F: Field> PerpValue<F> {
    pub fn complex(&self) -> &Arc<ChainComplex<F>> {
        &self.total.complex
    }

    /// `S_j` of a multi-index, `1 ≤ j ≤ k`.
    pub fn level(&self, m: usize, j: usize) -> usize {
        level(self.n, self.k, m, j)
    }
}

fn full(n: usize) -> usize {
    (1 << n) - 1
}

fn level(n: usize, k: usize, m: usize, j: usize) -> usize {
    (m >> ((k - j) * n)) & full(n)
}

fn with_level(n: usize, k: usize, m: usize, j: usize, set: usize) -> usize {
    let off = (k - j) * n;
    (m & !(full(n) << off)) | set << off
}

/// Vertex object of level `j` for the sets `S_1, …, S_j`.
fn vertex<F: Field>(s: &Session<F>, x: NodeId, n: usize, sets: &[usize]) -> NodeId {
    let b = s.terminal();
    let mut v = x;
    for &sj in sets {
        let comps: Vec<NodeId> = (0..n).map(|i| if sj >> i & 1 == 1 { b } else { v }).collect();
        v = s.coprod(&comps);
    }
    v
}

fn sets(n: usize, k: usize, m: usize) -> Vec<usize> {
    (1..=k).map(|j| level(n, k, m, j)).collect()
}

/// Carries an arrow between level objects through the outer levels `higher`.
fn lift<F: Field>(s: &Session<F>, mut a: ArrowId, n: usize, higher: &[usize]) -> ArrowId {
    let b = s.id(s.terminal());
    for &sl in higher {
        let kids: Vec<ArrowId> = (0..n).map(|i| if sl >> i & 1 == 1 { b } else { a }).collect();
        a = s.coprod_map(&kids);
    }
    a
}

/// The `kn`-cube of vertex objects of `⊥_n^k`.
pub fn perp_node_cube<F: Field>(s: &Session<F>, n: usize, x: NodeId, k: usize) -> NodeCube {
    let nodes: Vec<NodeId> = (0..1usize << (k * n)).map(|m| vertex(s, x, n, &sets(n, k, m))).collect();
    NodeCube::new(k * n, nodes, |m, c| {
        let (j, i) = (k - c / n, c % n);
        let ss = sets(n, k, m);
        let below = vertex(s, x, n, &ss[..j - 1]);
        let sj = ss[j - 1];
        let kids: Vec<ArrowId> = (0..n)
            .map(|t| {
                if sj >> t & 1 == 1 {
                    s.id(s.terminal())
                } else if t == i {
                    s.to_terminal(below)
                } else {
                    s.id(below)
                }
            })
            .collect();
        lift(s, s.coprod_map(&kids), n, &ss[j..])
    })
}

fn perp_key<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, k: usize) -> usize {
    s.key(format!("perp:{n}:{k}:{}", spec.repr()))
}

/// `⊥_n^k F(X)`; `k = 0` gives `F(X)` as a 0-cube.
pub fn perp<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, x: NodeId, k: usize) -> Result<Arc<PerpValue<F>>> {
    if n == 0 {
        return Err(Error::Invalid("⊥_n needs n ≥ 1".into()));
    }
    let key = perp_key(s, spec, n, k);
    if let Some(p) = s.cached_aux::<PerpValue<F>>(key, x) {
        return Ok(p);
    }
    let nc = perp_node_cube(s, n, x, k);
    let cube = functor_cube(s, spec, &nc)?;
    let p = Arc::new(PerpValue { n, k, total: cube.tfiber(), nodes: nc.nodes });
    s.store_aux(key, x, p.clone());
    Ok(p)
}

/// The face `d_i = ⊥^i ε ⊥^{k−1−i}: ⊥^k F(X) → ⊥^{k−1} F(X)`: restrict to
/// `S_{i+1} = ∅`, then fold the coproduct of level `i+1`.
pub fn counit<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, x: NodeId, k: usize, i: usize) -> Result<ChainMap<F>> {
    if k == 0 || i >= k {
        return Err(Error::Invalid(format!("face d_{i} does not exist on ⊥^{k}")));
    }
    let (src, tgt) = (perp(s, spec, n, x, k)?, perp(s, spec, n, x, k - 1)?);
    let j = i + 1;
    let low = full((k - j) * n);
    let mut blocks = Vec::new();
    for m in 0..1usize << (k * n) {
        if level(n, k, m, j) != 0 {
            continue;
        }
        let to = (m & low) | (m >> ((k - j + 1) * n)) << ((k - j) * n);
        let ss = sets(n, k, m);
        let below = vertex(s, x, n, &ss[..j - 1]);
        let fold = s.universal(vertex(s, x, n, &ss[..j]), below, &vec![s.id(below); n]);
        let a = lift(s, fold, n, &ss[j..]);
        debug_assert_eq!((s.src(a), s.tgt(a)), (src.nodes[m], tgt.nodes[to]));
        blocks.push(Block { from: m, to, negate: false, map: map(s, spec, a)? });
    }
    Ok(total_map(&src.total, &tgt.total, &blocks))
}

/// The degeneracy `s_i = ⊥^i δ ⊥^{k−1−i}: ⊥^k F(X) → ⊥^{k+1} F(X)`: level
/// `i+1` splits as `S = S' ⊔ S''` with `S'` the new inner level.
pub fn degeneracy<F: Field>(
    s: &Session<F>,
    spec: &FunctorSpec,
    n: usize,
    x: NodeId,
    k: usize,
    i: usize,
) -> Result<ChainMap<F>> {
    if k == 0 || i >= k {
        return Err(Error::Invalid(format!("degeneracy s_{i} does not exist on ⊥^{k}")));
    }
    let (src, tgt) = (perp(s, spec, n, x, k)?, perp(s, spec, n, x, k + 1)?);
    let j = i + 1;
    let b = s.terminal();
    let mut blocks = Vec::new();
    for m in 0..1usize << (k * n) {
        let ss = sets(n, k, m);
        let whole = ss[j - 1];
        let w = vertex(s, x, n, &ss[..j - 1]);
        let from = vertex(s, x, n, &ss[..j]);
        let mut inner = whole;
        loop {
            let outer = whole & !inner;
            let mut ts = ss[..j - 1].to_vec();
            ts.push(inner);
            ts.push(outer);
            ts.extend_from_slice(&ss[j..]);
            let to = (1..=k + 1).fold(0, |acc, l| with_level(n, k + 1, acc, l, ts[l - 1]));
            let u = vertex(s, x, n, &ts[..j]);
            let t = vertex(s, x, n, &ts[..j + 1]);
            let kids: Vec<ArrowId> = (0..n)
                .map(|c| {
                    if outer >> c & 1 == 1 {
                        s.inject(t, c, s.id(b))
                    } else {
                        let comp = if inner >> c & 1 == 1 { b } else { w };
                        s.inject(t, c, s.inject(u, c, s.id(comp)))
                    }
                })
                .collect();
            let a = lift(s, s.universal(from, t, &kids), n, &ss[j..]);
            debug_assert_eq!((s.src(a), s.tgt(a)), (src.nodes[m], tgt.nodes[to]));
            let crossings: u32 = (0..n).filter(|&c| inner >> c & 1 == 1).map(|c| (outer >> (c + 1)).count_ones()).sum();
            blocks.push(Block { from: m, to, negate: crossings % 2 == 1, map: map(s, spec, a)? });
            if inner == 0 {
                break;
            }
            inner = (inner - 1) & whole;
        }
    }
    Ok(total_map(&src.total, &tgt.total, &blocks))
}

/// `δ: ⊥_nF(X) → ⊥_n^2 F(X)`.
pub fn comultiplication<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, x: NodeId) -> Result<ChainMap<F>> {
    degeneracy(s, spec, n, x, 1, 0)
}

/// The `2n`-cube `(S, T) ↦ H(S ∪ T)` of an `n`-cube `H`, with `S` in the
/// low bits, and the maps `Δ: tfiber H → tfiber H∘∪` and the projections
/// `γ` onto `T = ∅` and onto `S = ∅`.
pub struct Doubled<F: Field> {
    pub cube: Cube<F>,
    pub delta: ChainMap<F>,
    pub gamma: ChainMap<F>,
    pub gamma_other: ChainMap<F>,
}

pub fn doubled<F: Field>(h: &Cube<F>) -> Doubled<F> {
    let n = h.n();
    let verts: Vec<Arc<ChainComplex<F>>> = (0..1usize << (2 * n)).map(|m| h.vertex((m | m >> n) & full(n)).clone()).collect();
    let cube = Cube::new(2 * n, verts, |m, c| {
        let u = (m | m >> n) & full(n);
        let i = c % n;
        if u >> i & 1 == 1 {
            Arc::new(ChainMap::identity(h.vertex(u).clone()))
        } else {
            h.edge(u, i).clone()
        }
    });
    let (ht, dt) = (h.tfiber(), cube.tfiber());
    let ident = |m: usize| Arc::new(ChainMap::identity(h.vertex(m).clone()));
    let mut blocks = Vec::new();
    for u in 0..1usize << n {
        let mut t = u;
        loop {
            let sset = u & !t;
            let crossings: u32 = (0..n).filter(|&c| t >> c & 1 == 1).map(|c| (sset >> (c + 1)).count_ones()).sum();
            blocks.push(Block { from: u, to: sset | t << n, negate: crossings % 2 == 1, map: ident(u) });
            if t == 0 {
                break;
            }
            t = (t - 1) & u;
        }
    }
    let delta = total_map(&ht, &dt, &blocks);
    let proj = |keep: &dyn Fn(usize) -> Option<usize>| {
        let blocks: Vec<Block<F>> = (0..1usize << (2 * n))
            .filter_map(|m| keep(m).map(|to| Block { from: m, to, negate: false, map: ident(to) }))
            .collect();
        total_map(&dt, &ht, &blocks)
    };
    let gamma = proj(&|m| if m >> n == 0 { Some(m) } else { None });
    let gamma_other = proj(&|m| if m & full(n) == 0 { Some(m >> n) } else { None });
    Doubled { cube, delta, gamma, gamma_other }
}

/// True when `cr_{n+1}F` is acyclic on every sample tuple.
pub fn degree_test<F: Field>(s: &Session<F>, spec: &FunctorSpec, n: usize, samples: &[Vec<NodeId>]) -> Result<bool> {
    for xs in samples {
        if xs.len() != n + 1 {
            return Err(Error::Invalid(format!("degree {n} test needs {}-tuples", n + 1)));
        }
        if !cross_effect(s, spec, xs)?.complex.is_acyclic() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `cr_2[cr_nF(X_1, …, X_{n−1}, −)](X_n, X_{n+1})` and `cr_{n+1}F(X_1, …, X_{n+1})`.
pub fn iterated_cr2_and_crn<F: Field>(s: &Session<F>, spec: &FunctorSpec, xs: &[NodeId]) -> Result<(Graded, Graded)> {
    let n = xs.len() - 1;
    if n < 1 {
        return Err(Error::Invalid("need at least two objects".into()));
    }
    let b = s.terminal();
    let last = n - 1;
    // bits 0..n for the outer cross effect, bits n, n+1 for the inner one
    let comps = |m: usize| -> Vec<NodeId> {
        (0..n)
            .map(|i| {
                if m >> i & 1 == 1 {
                    b
                } else if i < last {
                    xs[i]
                } else {
                    let y: Vec<NodeId> = (0..2).map(|t| if m >> (n + t) & 1 == 1 { b } else { xs[last + t] }).collect();
                    s.coprod(&y)
                }
            })
            .collect()
    };
    let nodes: Vec<NodeId> = (0..1usize << (n + 2)).map(|m| s.coprod(&comps(m))).collect();
    let nc = NodeCube::new(n + 2, nodes, |m, c| {
        let cs = comps(m);
        let kids: Vec<ArrowId> = (0..n)
            .map(|i| {
                if c < n {
                    if i == c { s.to_terminal(cs[i]) } else { s.id(cs[i]) }
                } else if i == last && m >> last & 1 == 0 {
                    let t = c - n;
                    let inner: Vec<ArrowId> = (0..2)
                        .map(|u| {
                            let node = if m >> (n + u) & 1 == 1 { b } else { xs[last + u] };
                            if u == t { s.to_terminal(node) } else { s.id(node) }
                        })
                        .collect();
                    s.coprod_map(&inner)
                } else {
                    s.id(cs[i])
                }
            })
            .collect();
        s.coprod_map(&kids)
    });
    let iterated = functor_cube(s, spec, &nc)?.tfiber().complex.homology();
    let direct = cross_effect(s, spec, xs)?.complex.homology();
    Ok((iterated, direct))
}

/// `F((⨿_{n+1})^A_X)`, cartesian exactly when `F` is `n`-excisive relative to `A`.
pub fn excision_cube<F: Field>(s: &Session<F>, spec: &FunctorSpec, xs: &[NodeId]) -> Result<Cube<F>> {
    functor_cube(s, spec, &build_initial_cube(s, xs))
}

/// For each `S`, whether the `n`-cube `F(X̃(S, −))` is cartesian.
pub fn double_cube_rows<F: Field>(s: &Session<F>, spec: &FunctorSpec, xs: &[NodeId]) -> Result<Vec<(usize, bool)>> {
    let n = xs.len();
    let cube = functor_cube(s, spec, &build_double_cube(s, xs))?;
    let free: Vec<usize> = (n..2 * n).collect();
    Ok((0..1usize << n).map(|sm| (sm, cube.face(sm, &free).is_cartesian())).collect())
}

/// `F` of the strongly cocartesian cube generated by injective `z → y_i`.
pub fn strongly_cocartesian_image<F: Field>(
    s: &Session<F>,
    spec: &FunctorSpec,
    z: &Arc<CfObject<F>>,
    ys: &[CfMorphism<F>],
) -> Result<(Cube<F>, Cube<F>)> {
    let (objs, edges) = generate_strongly_cocartesian(z, ys)?;
    let n = ys.len();
    let nodes: Vec<NodeId> = objs.iter().map(|o| s.leaf(o)).collect();
    let mut arrows = vec![vec![usize::MAX; n]; 1 << n];
    for m in 0..1usize << n {
        for i in 0..n {
            if let Some(e) = &edges[m][i] {
                arrows[m][i] = s.register(e)?;
            }
        }
    }
    let nc = NodeCube::new(n, nodes, |m, i| arrows[m][i]);
    Ok((nc.underlying(s)?, functor_cube(s, spec, &nc)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfcat::Context;
    use crate::field::PrimeField;
    use crate::matrix::Matrix;
    use crate::random::Gen;

    fn unit_object<F: Field>(ctx: &Arc<Context<F>>) -> Arc<CfObject<F>> {
        let f = ctx.field();
        let k0 = Arc::new(ChainComplex::concentrated(f, 0, 1));
        CfObject::new(ctx, k0, |_| Matrix::zeros(f, 0, 0), |_| Matrix::zeros(f, 0, 1)).unwrap()
    }

    #[test]
    fn tensor_square_cross_effect() {
        let f = PrimeField::default();
        let ctx = Context::pointed(f);
        let s = Session::new(&ctx);
        let x = s.leaf(&unit_object(&ctx));
        let t2 = FunctorSpec::tensor(2);
        assert_eq!(cross_effect(&s, &t2, &[x, x]).unwrap().complex.homology(), Graded::from_pairs(&[(0, 2)]));
        assert_eq!(perp(&s, &t2, 2, x, 1).unwrap().complex().homology(), Graded::from_pairs(&[(0, 2)]));
        assert!(perp(&s, &FunctorSpec::Underlying, 2, x, 1).unwrap().complex().is_acyclic());
    }

    #[test]
    fn k1_matches_perp_functor() {
        let f = PrimeField::default();
        let mut g = Gen::new(f, 3);
        g.max_dim = 2;
        let ctx = g.context(true);
        let s = Session::new(&ctx);
        let x = s.leaf(&g.object(&ctx));
        let spec = FunctorSpec::tensor(2);
        let p = perp(&s, &spec, 2, x, 1).unwrap();
        assert_eq!(**p.complex(), *value(&s, &FunctorSpec::perp(2, spec), x).unwrap());
    }

    #[test]
    fn cotriple_identities_small() {
        let f = PrimeField::default();
        let ctx = Context::pointed(f);
        let s = Session::new(&ctx);
        let x = s.leaf(&unit_object(&ctx));
        let spec = FunctorSpec::tensor(2);
        let d = comultiplication(&s, &spec, 2, x).unwrap();
        for i in 0..2 {
            assert!(d.then(&counit(&s, &spec, 2, x, 2, i).unwrap()).is_identity(), "d_{i} δ");
        }
    }

    #[test]
    fn section_of_random_cube() {
        let f = PrimeField::default();
        let mut g = Gen::new(f, 5);
        for n in 1..=3 {
            let h = g.cube(n);
            let d = doubled(&h);
            assert!(d.delta.then(&d.gamma).is_identity());
            assert!(d.delta.then(&d.gamma_other).is_identity());
        }
    }
}
