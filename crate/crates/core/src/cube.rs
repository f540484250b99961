//! Cubical diagrams, total (co)fibers, and (co)limits over finite posets.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cfcat::{CfMorphism, CfObject, Context};
use crate::chain::{hofib, ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{Builder, Matrix};
use crate::session::{ArrowId, NodeId, Session};

/// A functor `P(n) → Ch`; vertices are indexed by bitmask, `edges[S][i]`
/// is the map `S → S ∪ {i}` for `i ∉ S`.
#[derive(Clone, Debug)]
pub struct Cube<F: Field> {
    n: usize,
    vertices: Vec<Arc<ChainComplex<F>>>,
    edges: Vec<Vec<Option<Arc<ChainMap<F>>>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Fiber,
    Cofiber,
}

/// A totalization of a cube together with its block layout.
#[derive(Clone, Debug)]
pub struct Total<F: Field> {
    pub complex: Arc<ChainComplex<F>>,
    pub kind: Kind,
    n: usize,
    vertices: Vec<Arc<ChainComplex<F>>>,
}

pub fn popcount(m: usize) -> usize {
    m.count_ones() as usize
}

impl<F: Field> Cube<F> {
    pub fn new(
        n: usize,
        vertices: Vec<Arc<ChainComplex<F>>>,
        mut edge: impl FnMut(usize, usize) -> Arc<ChainMap<F>>,
    ) -> Self {
        assert_eq!(vertices.len(), 1 << n, "one vertex per subset");
        let edges = (0..1usize << n)
            .map(|m| (0..n).map(|i| if m >> i & 1 == 0 { Some(edge(m, i)) } else { None }).collect())
            .collect();
        Cube { n, vertices, edges }
    }

    /// A 1-cube.
    pub fn arrow(f: &ChainMap<F>) -> Self {
        Cube::new(1, vec![f.source().clone(), f.target().clone()], |_, _| Arc::new(f.clone()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> F {
        self.vertices[0].field()
    }

    pub fn vertex(&self, m: usize) -> &Arc<ChainComplex<F>> {
        &self.vertices[m]
    }

    pub fn vertices(&self) -> &[Arc<ChainComplex<F>>] {
        &self.vertices
    }

    pub fn edge(&self, m: usize, i: usize) -> &Arc<ChainMap<F>> {
        self.edges[m][i].as_ref().expect("edge leaves the subset")
    }

    pub fn total_dim(&self) -> usize {
        self.vertices.iter().map(|v| v.total_dim()).sum()
    }

    /// Every square face commutes.
    pub fn commutes(&self) -> bool {
        (0..1usize << self.n).all(|m| {
            (0..self.n).all(|i| {
                (i + 1..self.n).all(|j| {
                    if m >> i & 1 == 1 || m >> j & 1 == 1 {
                        return true;
                    }
                    let a = self.edge(m, i).then(self.edge(m | 1 << i, j));
                    let b = self.edge(m, j).then(self.edge(m | 1 << j, i));
                    a == b
                })
            })
        })
    }

    /// Composite along any increasing path `from ⊆ to`.
    pub fn map_between(&self, from: usize, to: usize) -> ChainMap<F> {
        assert_eq!(from & !to, 0);
        let mut acc = ChainMap::identity(self.vertices[from].clone());
        let mut cur = from;
        for i in 0..self.n {
            if to >> i & 1 == 1 && cur >> i & 1 == 0 {
                acc = acc.then(self.edge(cur, i));
                cur |= 1 << i;
            }
        }
        acc
    }

    /// The sub-cube of vertices `base ∪ T` for `T ⊆ free` (coordinates
    /// renumbered in increasing order).
    pub fn face(&self, base: usize, free: &[usize]) -> Cube<F> {
        let embed = |t: usize| -> usize {
            let mut m = base;
            for (k, &c) in free.iter().enumerate() {
                if t >> k & 1 == 1 {
                    m |= 1 << c;
                }
            }
            m
        };
        let verts = (0..1usize << free.len()).map(|t| self.vertices[embed(t)].clone()).collect();
        Cube::new(free.len(), verts, |t, k| self.edges[embed(t)][free[k]].clone().unwrap())
    }

    /// Coordinate `i` of the result is coordinate `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Cube<F> {
        self.face(0, perm)
    }

    /// Total fiber: `x_S` in total degree `d` sits in internal degree
    /// `d + |S|`, and `D x_S = (-1)^{|S|} d x + Σ_{i∉S} (-1)^{#{j∈S, j>i}} f_i x`.
    /// This is the iterated homotopy fiber, last coordinate outermost.
    pub fn tfiber(&self) -> Total<F> {
        self.totalize(Kind::Fiber)
    }

    /// Total cofiber: `x_S` in internal degree `d − (n − |S|)`, with
    /// `D = (-1)^{n−|S|} d + Σ_{i∉S} (-1)^{#{j∉S, j>i}} f_i`.
    pub fn tcofiber(&self) -> Total<F> {
        self.totalize(Kind::Cofiber)
    }

    fn totalize(&self, kind: Kind) -> Total<F> {
        let f = self.field();
        let n = self.n;
        let shape = Total { complex: Arc::new(ChainComplex::zero(f)), kind, n, vertices: self.vertices.clone() };
        let (lo, hi) = shape.range();
        let c = ChainComplex::from_fn(
            f,
            lo,
            hi,
            |d| shape.dim(d),
            |d| {
                let (src, tgt) = (shape.offsets(d), shape.offsets(d - 1));
                let mut b = Builder::new(f, tgt[1 << n], src[1 << n]);
                for m in 0..1usize << n {
                    let deg = shape.internal(m, d);
                    let v = &self.vertices[m];
                    if v.dim(deg) == 0 {
                        continue;
                    }
                    let s = match kind {
                        Kind::Fiber => popcount(m) % 2 == 1,
                        Kind::Cofiber => (n - popcount(m)) % 2 == 1,
                    };
                    b.block_scaled(tgt[m], src[m], &v.d(deg), &f.sign(s));
                    for i in 0..n {
                        if m >> i & 1 == 1 {
                            continue;
                        }
                        let above = match kind {
                            Kind::Fiber => popcount(m >> (i + 1)),
                            Kind::Cofiber => popcount(!m & ((1 << n) - 1)) - popcount(!m & ((1 << (i + 1)) - 1)),
                        };
                        let t = m | 1 << i;
                        b.block_scaled(tgt[t], src[m], &self.edge(m, i).component(deg), &f.sign(above % 2 == 1));
                    }
                }
                b.build_sized(tgt[1 << n])
            },
        );
        Total { complex: Arc::new(c), ..shape }
    }

    pub fn is_cartesian(&self) -> bool {
        self.tfiber().complex.is_acyclic()
    }

    pub fn is_cocartesian(&self) -> bool {
        self.tcofiber().complex.is_acyclic()
    }

    pub fn is_strongly_cocartesian(&self) -> bool {
        let n = self.n;
        (0..1usize << n).all(|m| {
            (0..n).all(|i| {
                (i + 1..n).all(|j| m >> i & 1 == 1 || m >> j & 1 == 1 || self.face(m, &[i, j]).is_cocartesian())
            })
        })
    }

    /// The punctured diagram `S ≠ ∅` as a poset diagram.
    pub fn punctured(&self) -> PosetDiagram<F> {
        let elems: Vec<usize> = (1..1usize << self.n).collect();
        PosetDiagram::new(
            elems.iter().map(|&m| self.vertices[m].clone()).collect(),
            |a, b| elems[a] != elems[b] && elems[a] & !elems[b] == 0,
            |a, b| Arc::new(self.map_between(elems[a], elems[b])),
        )
    }

    /// `hofib(X_∅ → holim_{S≠∅} X_S)` with the normalized cosimplicial holim.
    pub fn holim_fiber(&self) -> ChainComplex<F> {
        let p = self.punctured();
        let holim = Arc::new(p.holim());
        let x0 = self.vertices[0].clone();
        let phi = p.cone_in(&x0, &holim, |e| self.map_between(0, e + 1));
        hofib(&phi)
    }
}

impl<F: Field> Total<F> {
    pub fn internal(&self, m: usize, d: i64) -> i64 {
        match self.kind {
            Kind::Fiber => d + popcount(m) as i64,
            Kind::Cofiber => d - (self.n - popcount(m)) as i64,
        }
    }

    fn range(&self) -> (i64, i64) {
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        for (m, v) in self.vertices.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let shift = self.internal(m, 0);
            lo = lo.min(v.lo() - shift);
            hi = hi.max(v.hi() - shift);
        }
        (lo, hi)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self, d: i64) -> usize {
        (0..self.vertices.len()).map(|m| self.vertices[m].dim(self.internal(m, d))).sum()
    }

    /// Block offsets in total degree `d`, one per vertex plus the total.
    pub fn offsets(&self, d: i64) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.vertices.len() + 1);
        let mut o = 0;
        for (m, v) in self.vertices.iter().enumerate() {
            out.push(o);
            o += v.dim(self.internal(m, d));
        }
        out.push(o);
        out
    }

    pub fn vertex(&self, m: usize) -> &Arc<ChainComplex<F>> {
        &self.vertices[m]
    }

    /// Fiber: projection onto the initial vertex.
    pub fn to_initial(&self) -> ChainMap<F> {
        assert_eq!(self.kind, Kind::Fiber);
        let f = self.complex.field();
        ChainMap::new(self.complex.clone(), self.vertices[0].clone(), |d| {
            let offs = self.offsets(d);
            let v = self.vertices[0].dim(d);
            let mut b = Builder::new(f, v, offs[offs.len() - 1]);
            b.block(0, 0, &Matrix::identity(f, v));
            b.build_sized(v)
        })
    }

    /// Cofiber: inclusion of the terminal vertex.
    pub fn from_terminal(&self) -> ChainMap<F> {
        assert_eq!(self.kind, Kind::Cofiber);
        let f = self.complex.field();
        let last = self.vertices.len() - 1;
        ChainMap::new(self.vertices[last].clone(), self.complex.clone(), |d| {
            let offs = self.offsets(d);
            let mut b = Builder::new(f, offs[last + 1], self.vertices[last].dim(d));
            b.block(offs[last], 0, &Matrix::identity(f, self.vertices[last].dim(d)));
            b.build_sized(offs[last + 1])
        })
    }
}

/// One block of a map between totalizations: `sign · map` from vertex
/// `from` of the source to vertex `to` of the target.
#[derive(Clone)]
pub struct Block<F: Field> {
    pub from: usize,
    pub to: usize,
    pub negate: bool,
    pub map: Arc<ChainMap<F>>,
}

/// Assembles a map of totalizations from vertex blocks. The blocks must
/// preserve the internal degree shift, which is checked.
pub fn total_map<F: Field>(src: &Total<F>, tgt: &Total<F>, blocks: &[Block<F>]) -> ChainMap<F> {
    for b in blocks {
        assert_eq!(src.internal(b.from, 0), tgt.internal(b.to, 0), "block changes the internal shift");
    }
    let f = src.complex.field();
    ChainMap::new(src.complex.clone(), tgt.complex.clone(), |d| {
        let (so, to) = (src.offsets(d), tgt.offsets(d));
        let mut m = Builder::new(f, to[to.len() - 1], so[so.len() - 1]);
        for b in blocks {
            let deg = src.internal(b.from, d);
            if src.vertices[b.from].dim(deg) == 0 || tgt.vertices[b.to].dim(deg) == 0 {
                continue;
            }
            m.block_scaled(to[b.to], so[b.from], &b.map.component(deg), &f.sign(b.negate));
        }
        m.build_sized(to[to.len() - 1])
    })
}

/// A diagram over a finite poset, with a map for every strict relation.
#[derive(Clone)]
pub struct PosetDiagram<F: Field> {
    values: Vec<Arc<ChainComplex<F>>>,
    less: Vec<Vec<bool>>,
    maps: BTreeMap<(usize, usize), Arc<ChainMap<F>>>,
}

impl<F: Field> PosetDiagram<F> {
    pub fn new(
        values: Vec<Arc<ChainComplex<F>>>,
        less: impl Fn(usize, usize) -> bool,
        mut map: impl FnMut(usize, usize) -> Arc<ChainMap<F>>,
    ) -> Self {
        let m = values.len();
        let less: Vec<Vec<bool>> = (0..m).map(|a| (0..m).map(|b| less(a, b)).collect()).collect();
        let mut maps = BTreeMap::new();
        for a in 0..m {
            for b in 0..m {
                if less[a][b] {
                    maps.insert((a, b), map(a, b));
                }
            }
        }
        PosetDiagram { values, less, maps }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_functorial(&self) -> bool {
        self.maps.iter().all(|(&(a, b), ab)| {
            (0..self.len()).all(|c| !self.less[b][c] || self.maps[&(a, c)].as_ref() == &ab.then(&self.maps[&(b, c)]))
        })
    }

    /// Strictly increasing chains, grouped by length, lexicographic.
    pub fn chains(&self) -> Vec<Vec<Vec<usize>>> {
        let m = self.len();
        let mut by_len: Vec<Vec<Vec<usize>>> = vec![(0..m).map(|a| vec![a]).collect()];
        loop {
            let last = by_len.last().unwrap();
            let next: Vec<Vec<usize>> = last
                .iter()
                .flat_map(|c| {
                    let top = *c.last().unwrap();
                    (0..m).filter(move |&b| self.less[top][b]).map(move |b| {
                        let mut d = c.clone();
                        d.push(b);
                        d
                    })
                })
                .collect();
            if next.is_empty() {
                break;
            }
            by_len.push(next);
        }
        by_len
    }

    /// Normalized cosimplicial model: `C^p = ⊕_{e_0<…<e_p} value(e_p)` in
    /// internal degree `n + p`, `D = δ + (-1)^p d`, the last coface applying
    /// the diagram map.
    pub fn holim(&self) -> ChainComplex<F> {
        self.totalize_chains(true)
    }

    /// Normalized bar model: `⊕_{e_0<…<e_p} value(e_0)` in internal degree
    /// `n − p`, `D = Σ (-1)^i d_i + (-1)^p d`, `d_0` pushing forward.
    pub fn hocolim(&self) -> ChainComplex<F> {
        self.totalize_chains(false)
    }

    fn totalize_chains(&self, lim: bool) -> ChainComplex<F> {
        let f = self.values[0].field();
        let chains: Vec<(usize, Vec<usize>)> =
            self.chains().into_iter().enumerate().flat_map(|(p, cs)| cs.into_iter().map(move |c| (p, c))).collect();
        let index: BTreeMap<&Vec<usize>, usize> = chains.iter().enumerate().map(|(k, (_, c))| (c, k)).collect();
        let value = |c: &Vec<usize>| if lim { *c.last().unwrap() } else { c[0] };
        let internal = |p: usize, d: i64| if lim { d + p as i64 } else { d - p as i64 };
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        for (p, c) in &chains {
            let v = &self.values[value(c)];
            if !v.is_zero() {
                let p = *p as i64;
                let (a, b) = if lim { (v.lo() - p, v.hi() - p) } else { (v.lo() + p, v.hi() + p) };
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        if lo > hi {
            return ChainComplex::zero(f);
        }
        let offsets = |d: i64| -> Vec<usize> {
            let mut out = Vec::with_capacity(chains.len() + 1);
            let mut o = 0;
            for (p, c) in &chains {
                out.push(o);
                o += self.values[value(c)].dim(internal(*p, d));
            }
            out.push(o);
            out
        };
        ChainComplex::from_fn(
            f,
            lo,
            hi,
            |d| *offsets(d).last().unwrap(),
            |d| {
                let (so, to) = (offsets(d), offsets(d - 1));
                let mut b = Builder::new(f, to[chains.len()], so[chains.len()]);
                for (k, (p, c)) in chains.iter().enumerate() {
                    let deg = internal(*p, d);
                    let v = &self.values[value(c)];
                    if v.dim(deg) == 0 {
                        continue;
                    }
                    b.block_scaled(to[k], so[k], &v.d(deg), &f.sign(p % 2 == 1));
                    if lim {
                        // cofaces: insert an element at position i
                        for (k2, (p2, c2)) in chains.iter().enumerate() {
                            if *p2 != p + 1 {
                                continue;
                            }
                            if let Some(i) = face_position(c2, c) {
                                if i <= *p {
                                    b.block_scaled(to[k2], so[k], &Matrix::identity(f, v.dim(deg)), &f.sign(i % 2 == 1));
                                } else {
                                    let g = self.maps[&(c[*p], c2[p + 1])].component(deg);
                                    b.block_scaled(to[k2], so[k], &g, &f.sign(i % 2 == 1));
                                }
                            }
                        }
                    } else if *p > 0 {
                        for i in 0..=*p {
                            let mut c2 = c.clone();
                            c2.remove(i);
                            let k2 = index[&c2];
                            if i == 0 {
                                let g = self.maps[&(c[0], c[1])].component(deg);
                                b.block(to[k2], so[k], &g);
                            } else {
                                b.block_scaled(to[k2], so[k], &Matrix::identity(f, v.dim(deg)), &f.sign(i % 2 == 1));
                            }
                        }
                    }
                }
                b.build_sized(to[chains.len()])
            },
        )
    }

    /// The map `x ↦ (g_e x)_e` from a cone point into `C^0` of the holim.
    pub fn cone_in(
        &self,
        x: &Arc<ChainComplex<F>>,
        holim: &Arc<ChainComplex<F>>,
        g: impl Fn(usize) -> ChainMap<F>,
    ) -> ChainMap<F> {
        let f = x.field();
        let gs: Vec<ChainMap<F>> = (0..self.len()).map(g).collect();
        ChainMap::new(x.clone(), holim.clone(), |d| {
            let mut b = Builder::new(f, holim.dim(d), x.dim(d));
            let mut o = 0;
            for (e, ge) in gs.iter().enumerate() {
                b.block(o, 0, &ge.component(d));
                o += self.values[e].dim(d);
            }
            b.build_sized(holim.dim(d))
        })
    }
}

/// If `short` is `long` with one element removed, the position removed.
fn face_position(long: &[usize], short: &[usize]) -> Option<usize> {
    if long.len() != short.len() + 1 {
        return None;
    }
    let i = (0..short.len()).find(|&i| long[i] != short[i]).unwrap_or(short.len());
    (long[i + 1..] == short[i..]).then_some(i)
}

/// A cube of session nodes and arrows.
#[derive(Clone, Debug)]
pub struct NodeCube {
    pub n: usize,
    pub nodes: Vec<NodeId>,
    /// `edges[S][i]`, meaningful for `i ∉ S`.
    pub edges: Vec<Vec<ArrowId>>,
}

impl NodeCube {
    pub fn new(n: usize, nodes: Vec<NodeId>, mut edge: impl FnMut(usize, usize) -> ArrowId) -> Self {
        let edges = (0..1usize << n)
            .map(|m| (0..n).map(|i| if m >> i & 1 == 0 { edge(m, i) } else { usize::MAX }).collect())
            .collect();
        NodeCube { n, nodes, edges }
    }

    /// Evaluates each vertex and edge through `value` and `map`.
    pub fn apply<F: Field>(
        &self,
        mut value: impl FnMut(NodeId) -> Result<Arc<ChainComplex<F>>>,
        mut map: impl FnMut(ArrowId) -> Result<Arc<ChainMap<F>>>,
    ) -> Result<Cube<F>> {
        let vertices: Vec<Arc<ChainComplex<F>>> = self.nodes.iter().map(|&x| value(x)).collect::<Result<_>>()?;
        let mut edges: Vec<Vec<Option<Arc<ChainMap<F>>>>> = vec![vec![None; self.n]; 1 << self.n];
        for (m, row) in edges.iter_mut().enumerate() {
            for (i, e) in row.iter_mut().enumerate() {
                if m >> i & 1 == 0 {
                    *e = Some(map(self.edges[m][i])?);
                }
            }
        }
        Ok(Cube::new(self.n, vertices, |m, i| edges[m][i].take().unwrap()))
    }

    /// Underlying complexes and maps.
    pub fn underlying<F: Field>(&self, s: &Session<F>) -> Result<Cube<F>> {
        self.apply(|x| s.complex(x), |a| s.matrix(a))
    }
}

/// `(⨿_n)^X_B`: component `i` of vertex `S` is `B` if `i ∈ S`, else `X_i`.
pub fn build_coproduct_cube<F: Field>(s: &Session<F>, xs: &[NodeId]) -> NodeCube {
    let n = xs.len();
    let b = s.terminal();
    let comps = |m: usize| -> Vec<NodeId> { (0..n).map(|i| if m >> i & 1 == 1 { b } else { xs[i] }).collect() };
    let nodes = (0..1usize << n).map(|m| s.coprod(&comps(m))).collect();
    NodeCube::new(n, nodes, |m, i| {
        let children: Vec<ArrowId> =
            comps(m).iter().enumerate().map(|(j, &c)| if j == i { s.to_terminal(c) } else { s.id(c) }).collect();
        s.coprod_map(&children)
    })
}

/// `(⨿_n)^A_X`: vertex `S` is the coproduct of `X_i, i ∈ S` (empty gives `A`).
pub fn build_initial_cube<F: Field>(s: &Session<F>, xs: &[NodeId]) -> NodeCube {
    let n = xs.len();
    let comps = |m: usize| -> Vec<NodeId> { (0..n).filter(|i| m >> i & 1 == 1).map(|i| xs[i]).collect() };
    let nodes: Vec<NodeId> = (0..1usize << n).map(|m| s.coprod(&comps(m))).collect();
    NodeCube::new(n, nodes.clone(), |m, i| {
        let t = m | 1 << i;
        let pos = |j: usize| popcount(t & ((1 << j) - 1));
        let children: Vec<ArrowId> =
            (0..n).filter(|j| m >> j & 1 == 1).map(|j| s.inject(nodes[t], pos(j), s.id(xs[j]))).collect();
        if m == 0 {
            s.from_initial(nodes[t])
        } else {
            s.universal(nodes[m], nodes[t], &children)
        }
    })
}

/// The double cube `X̃` as a `2n`-cube: bit `i` is `i ∈ S`, bit `n + i` is
/// `i ∈ T`. Entry `i` is `A` off `S ∪ T`, `X_i` on `S ∖ T`, `B` on `T`.
pub fn build_double_cube<F: Field>(s: &Session<F>, xs: &[NodeId]) -> NodeCube {
    let n = xs.len();
    let entry = |m: usize, i: usize| -> NodeId {
        if m >> (n + i) & 1 == 1 {
            s.terminal()
        } else if m >> i & 1 == 1 {
            xs[i]
        } else {
            s.initial()
        }
    };
    let nodes = (0..1usize << (2 * n)).map(|m| s.coprod(&(0..n).map(|i| entry(m, i)).collect::<Vec<_>>())).collect();
    NodeCube::new(2 * n, nodes, |m, c| {
        let t = m | 1 << c;
        let children: Vec<ArrowId> = (0..n)
            .map(|i| {
                let (a, b) = (entry(m, i), entry(t, i));
                if a == b {
                    s.id(a)
                } else if a == s.initial() {
                    s.from_initial(b)
                } else {
                    s.to_terminal(a)
                }
            })
            .collect();
        s.coprod_map(&children)
    })
}

/// The cube of iterated pushouts of injective `z → y_i` over `z`, as
/// objects of the ambient context. Built in the context restricted to `z`.
pub fn generate_strongly_cocartesian<F: Field>(
    z: &Arc<CfObject<F>>,
    ys: &[CfMorphism<F>],
) -> Result<(Vec<Arc<CfObject<F>>>, Vec<Vec<Option<CfMorphism<F>>>>)> {
    for y in ys {
        if !Arc::ptr_eq(&y.source, z) && !y.source.same_as(z) {
            return Err(Error::Invalid("edges must start at z".into()));
        }
        if !crate::cfcat::is_injective(&y.g) {
            return Err(Error::Invalid("edge z → y is not injective".into()));
        }
    }
    let ctx = z.ctx();
    let rctx = Context::restrict(z);
    let rs = Session::new(&rctx).with_cap(usize::MAX);
    let leaves: Vec<NodeId> = ys
        .iter()
        .map(|y| {
            let o = CfObject::from_maps(&rctx, y.g.clone(), y.target.proj().clone())?;
            Ok(rs.leaf(&o))
        })
        .collect::<Result<_>>()?;
    let cube = build_initial_cube(&rs, &leaves);
    let lift = |x: NodeId| -> Result<Arc<CfObject<F>>> {
        let o = rs.object(x)?;
        let incl = z.incl().then(o.incl());
        CfObject::from_maps(ctx, incl, o.proj().clone())
    };
    let objs: Vec<Arc<CfObject<F>>> = cube.nodes.iter().map(|&x| lift(x)).collect::<Result<_>>()?;
    let n = ys.len();
    let mut edges = vec![vec![None; n]; 1 << n];
    for m in 0..1usize << n {
        for i in 0..n {
            if m >> i & 1 == 0 {
                let g = rs.matrix(cube.edges[m][i])?.as_ref().clone();
                let g = g.rebase(objs[m].x().clone(), objs[m | 1 << i].x().clone());
                edges[m][i] = Some(CfMorphism::new(objs[m].clone(), objs[m | 1 << i].clone(), g)?);
            }
        }
    }
    Ok((objs, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{cone, Graded};
    use crate::field::PrimeField;
    use crate::random::Gen;

    #[test]
    fn one_cube_is_hofib_and_cone() {
        let f = PrimeField::default();
        let mut g = Gen::new(f, 2);
        for _ in 0..20 {
            let x = Arc::new(g.complex());
            let y = Arc::new(g.complex());
            let m = g.chain_map(&x, &y);
            let c = Cube::arrow(&m);
            assert_eq!(*c.tfiber().complex, hofib(&m));
            assert_eq!(*c.tcofiber().complex, cone(&m));
        }
    }

    #[test]
    fn holim_and_hocolim_small_cases() {
        let f = PrimeField::default();
        let z = Arc::new(ChainComplex::concentrated(f, 2, 1));
        let zero = Arc::new(ChainComplex::zero(f));
        let cospan = PosetDiagram::new(
            vec![zero.clone(), z.clone(), zero.clone()],
            |a, b| (a == 0 || a == 2) && b == 1,
            |a, b| Arc::new(ChainMap::zero(if a == 1 { z.clone() } else { zero.clone() }, if b == 1 { z.clone() } else { zero.clone() })),
        );
        assert_eq!(cospan.holim().homology(), Graded::from_pairs(&[(1, 1)]));
        let span = PosetDiagram::new(
            vec![z.clone(), zero.clone(), zero.clone()],
            |a, b| a == 0 && b > 0,
            |_, b| Arc::new(ChainMap::zero(z.clone(), if b == 0 { z.clone() } else { zero.clone() })),
        );
        assert_eq!(span.hocolim().homology(), Graded::from_pairs(&[(3, 1)]));
    }

    #[test]
    fn random_cubes_fiber_models_agree() {
        let f = PrimeField::default();
        let mut g = Gen::new(f, 9);
        for n in 2..=3 {
            let c = g.cube(n);
            assert!(c.commutes());
            assert_eq!(c.tfiber().complex.homology(), c.holim_fiber().homology());
        }
    }
}
