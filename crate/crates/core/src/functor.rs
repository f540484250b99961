//! The functor catalog: symbolic functors `C_f → Ch`, evaluated on session
//! nodes and arrows with memoization.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cfcat::{CfObject, Context};
use crate::chain::{cone, induced_homology_map, ChainComplex, ChainMap, Graded, HomologyBasis};
use crate::cube::{build_coproduct_cube, total_map, Block, Cube, Total};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::json::complex_from_json;
use crate::matrix::{Builder, Matrix, Quotient, SparseVec};
use crate::session::{ArrowId, NodeId, Session};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum FunctorSpec {
    Underlying,
    Const { complex: Value },
    TensorPower { m: usize },
    SymPower { m: usize },
    DirectSum { terms: Vec<FunctorSpec> },
    PostShift { k: i64, inner: Box<FunctorSpec> },
    /// `H_m` of the inner value, placed in degree 0.
    PostHomology { m: i64, inner: Box<FunctorSpec> },
    RelCofiber,
    PerpOf { n: usize, inner: Box<FunctorSpec> },
    TnOf { n: usize, inner: Box<FunctorSpec> },
}

use FunctorSpec::*;

fn k0() -> Value {
    serde_json::json!({"lo": 0, "hi": 0, "dims": [1], "d": [[]]})
}

impl FunctorSpec {
    pub fn constant(complex: Value) -> Self {
        Const { complex }
    }

    pub fn tensor(m: usize) -> Self {
        TensorPower { m }
    }

    pub fn sym(m: usize) -> Self {
        SymPower { m }
    }

    pub fn shift(k: i64, inner: FunctorSpec) -> Self {
        PostShift { k, inner: Box::new(inner) }
    }

    pub fn homology(m: i64, inner: FunctorSpec) -> Self {
        PostHomology { m, inner: Box::new(inner) }
    }

    pub fn perp(n: usize, inner: FunctorSpec) -> Self {
        PerpOf { n, inner: Box::new(inner) }
    }

    pub fn tn(n: usize, inner: FunctorSpec) -> Self {
        TnOf { n, inner: Box::new(inner) }
    }

    /// Named entries used by the CLI and the test suites.
    pub fn catalog() -> Vec<(&'static str, FunctorSpec)> {
        vec![
            ("const", Self::constant(k0())),
            ("underlying", Underlying),
            ("tensor2", Self::tensor(2)),
            ("tensor3", Self::tensor(3)),
            ("sym2", Self::sym(2)),
            ("linear_plus_tensor2", DirectSum { terms: vec![Underlying, Self::tensor(2)] }),
            ("shift_tensor2", Self::shift(1, Self::tensor(2))),
            ("relcofiber", RelCofiber),
            ("h0", Self::homology(0, Underlying)),
            ("h1", Self::homology(1, Underlying)),
        ]
    }

    /// A catalog name, or a JSON spec.
    pub fn parse(name: &str) -> Result<Self> {
        let t = name.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()));
        }
        Self::catalog().into_iter().find(|(n, _)| *n == t).map(|(_, s)| s).ok_or_else(|| {
            let names: Vec<&str> = Self::catalog().iter().map(|(n, _)| *n).collect();
            Error::Invalid(format!("unknown functor {t:?}; valid names: {}", names.join(", ")))
        })
    }

    pub fn repr(&self) -> String {
        serde_json::to_string(self).expect("specs serialize")
    }

    /// Declared flag; sampled by [`verify_realization_commutation`].
    pub fn commutes_with_realization(&self) -> bool {
        match self {
            Underlying | Const { .. } | TensorPower { .. } | SymPower { .. } | RelCofiber => true,
            DirectSum { terms } => terms.iter().all(|t| t.commutes_with_realization()),
            PostShift { inner, .. } | PerpOf { inner, .. } | TnOf { inner, .. } => inner.commutes_with_realization(),
            PostHomology { .. } => false,
        }
    }

    /// Declared polynomial degree, where one is known.
    pub fn declared_degree(&self) -> Option<usize> {
        match self {
            Const { .. } => Some(0),
            Underlying | RelCofiber => Some(1),
            TensorPower { m } | SymPower { m } => Some(*m),
            DirectSum { terms } => terms.iter().map(|t| t.declared_degree()).try_fold(0, |a, d| d.map(|d| a.max(d))),
            PostShift { inner, .. } => inner.declared_degree(),
            TnOf { n, inner } => inner.declared_degree().map(|d| d.min(*n)),
            PostHomology { .. } | PerpOf { .. } => None,
        }
    }

    /// Checks the spec against a coefficient field.
    pub fn validate<F: Field>(&self, field: F) -> Result<()> {
        match self {
            SymPower { m } => {
                let p = field.characteristic();
                if p != 0 && p <= *m as u64 {
                    return Err(Error::Characteristic { p, m: *m });
                }
                Ok(())
            }
            Const { complex } => complex_from_json(field, complex).map(|_| ()),
            DirectSum { terms } => terms.iter().try_for_each(|t| t.validate(field)),
            PostShift { inner, .. } | PostHomology { inner, .. } | PerpOf { inner, .. } | TnOf { inner, .. } => {
                inner.validate(field)
            }
            Underlying | TensorPower { .. } | RelCofiber => Ok(()),
        }
    }

    pub fn inner(&self) -> Option<&FunctorSpec> {
        match self {
            PostShift { inner, .. } | PostHomology { inner, .. } | PerpOf { inner, .. } | TnOf { inner, .. } => Some(inner),
            _ => None,
        }
    }
}

fn key<F: Field>(s: &Session<F>, spec: &FunctorSpec) -> usize {
    s.key(spec.repr())
}

/// `F(X)` for the object at node `x`.
pub fn value<F: Field>(s: &Session<F>, spec: &FunctorSpec, x: NodeId) -> Result<Arc<ChainComplex<F>>> {
    let k = key(s, spec);
    if let Some(v) = s.cached_value(k, x) {
        return Ok(v);
    }
    let field = s.field();
    let v: Arc<ChainComplex<F>> = match spec {
        Underlying => s.complex(x)?,
        Const { complex } => Arc::new(complex_from_json(field, complex)?),
        TensorPower { m: 0 } => Arc::new(ChainComplex::concentrated(field, 0, 1)),
        TensorPower { m: 1 } => s.complex(x)?,
        TensorPower { m } => {
            let prev = value(s, &FunctorSpec::tensor(m - 1), x)?;
            let base = s.complex(x)?;
            s.check_cap("tensor power", prev.total_dim() * base.total_dim())?;
            Arc::new(ChainComplex::tensor(&prev, &base))
        }
        SymPower { m } if *m <= 1 => value(s, &FunctorSpec::tensor(*m), x)?,
        SymPower { m } => {
            spec.validate(field)?;
            let t = value(s, &FunctorSpec::tensor(*m), x)?;
            let base = s.complex(x)?;
            let (c, qs) = t.quotient(&symmetrizer_spans(&base, *m))?;
            s.store_aux(k, x, Arc::new(qs));
            Arc::new(c)
        }
        DirectSum { terms } => {
            let vs: Vec<Arc<ChainComplex<F>>> = terms.iter().map(|t| value(s, t, x)).collect::<Result<_>>()?;
            let refs: Vec<&ChainComplex<F>> = vs.iter().map(|v| v.as_ref()).collect();
            Arc::new(ChainComplex::direct_sum(field, &refs))
        }
        PostShift { k: sh, inner } => Arc::new(value(s, inner, x)?.shift(*sh)),
        PostHomology { m, inner } => {
            let v = value(s, inner, x)?;
            Arc::new(ChainComplex::concentrated(field, 0, HomologyBasis::new(&v, *m).rank()))
        }
        RelCofiber => Arc::new(cone(s.object(x)?.incl())),
        PerpOf { n, inner } => {
            let t = perp_total(s, *n, inner, x)?;
            let c = t.complex.clone();
            s.store_aux(k, x, Arc::new(t));
            c
        }
        TnOf { n, inner } => {
            let t = tn_cube(s, *n, inner, x, false)?;
            s.check_cap("T_n holim", t.total_dim())?;
            let tot = t.tfiber();
            let c = Arc::new(tot.complex.shift(1));
            s.store_aux(k, x, Arc::new(tot));
            c
        }
    };
    s.check_cap("functor value", v.total_dim())?;
    s.store_value(k, x, v.clone());
    Ok(v)
}

/// `F(a)` for a session arrow.
pub fn map<F: Field>(s: &Session<F>, spec: &FunctorSpec, a: ArrowId) -> Result<Arc<ChainMap<F>>> {
    let k = key(s, spec);
    if let Some(m) = s.cached_map(k, a) {
        return Ok(m);
    }
    let (x, y) = (s.src(a), s.tgt(a));
    let (vx, vy) = (value(s, spec, x)?, value(s, spec, y)?);
    if s.is_id(a) {
        let m = Arc::new(ChainMap::identity(vx));
        s.store_map(k, a, m.clone());
        return Ok(m);
    }
    let field = s.field();
    let m: ChainMap<F> = match spec {
        Underlying | TensorPower { m: 1 } => s.matrix(a)?.as_ref().clone(),
        Const { .. } | TensorPower { m: 0 } => ChainMap::identity(vx.clone()).rebase(vx.clone(), vy.clone()),
        TensorPower { m } => {
            let prev = map(s, &FunctorSpec::tensor(m - 1), a)?;
            ChainMap::tensor(&prev, s.matrix(a)?.as_ref(), vx.clone(), vy.clone())
        }
        SymPower { m } if *m <= 1 => map(s, &FunctorSpec::tensor(*m), a)?.as_ref().clone().rebase(vx.clone(), vy.clone()),
        SymPower { m } => {
            let g = map(s, &FunctorSpec::tensor(*m), a)?;
            let qx = s.cached_aux::<BTreeMap<i64, Quotient<F>>>(k, x).expect("quotient cached with value");
            let qy = s.cached_aux::<BTreeMap<i64, Quotient<F>>>(k, y).expect("quotient cached with value");
            ChainMap::new(vx.clone(), vy.clone(), |n| {
                let (Some(a), Some(b)) = (qx.get(&n), qy.get(&n)) else {
                    return Matrix::zeros(field, vy.dim(n), vx.dim(n));
                };
                b.q.mul(&g.component(n)).mul(&a.s)
            })
        }
        DirectSum { terms } => {
            let ms: Vec<Arc<ChainMap<F>>> = terms.iter().map(|t| map(s, t, a)).collect::<Result<_>>()?;
            ChainMap::new(vx.clone(), vy.clone(), |n| {
                let comps: Vec<Matrix<F>> = ms.iter().map(|m| m.component(n)).collect();
                let refs: Vec<&Matrix<F>> = comps.iter().collect();
                Matrix::block_diag(field, &refs)
            })
        }
        PostShift { k: sh, inner } => map(s, inner, a)?.shift(*sh, vx.clone(), vy.clone()),
        PostHomology { m, inner } => {
            let h = induced_homology_map(map(s, inner, a)?.as_ref(), *m);
            ChainMap::new(vx.clone(), vy.clone(), |_| h.clone())
        }
        RelCofiber => {
            let g = s.matrix(a)?;
            let am = s.ctx().a().clone();
            ChainMap::new(vx.clone(), vy.clone(), |n| {
                Matrix::block_diag(field, &[&Matrix::identity(field, am.dim(n - 1)), &g.component(n)])
            })
        }
        PerpOf { n, inner } => {
            let (tx, ty) = (s.cached_aux::<Total<F>>(k, x).unwrap(), s.cached_aux::<Total<F>>(k, y).unwrap());
            let (cx, cy) = (build_coproduct_cube(s, &vec![x; *n]), build_coproduct_cube(s, &vec![y; *n]));
            let b = s.terminal();
            let mut blocks = Vec::with_capacity(1 << n);
            for m in 0..1usize << n {
                let kids: Vec<ArrowId> = (0..*n).map(|i| if m >> i & 1 == 1 { s.id(b) } else { a }).collect();
                let arr = s.coprod_map(&kids);
                debug_assert_eq!((s.src(arr), s.tgt(arr)), (cx.nodes[m], cy.nodes[m]));
                blocks.push(Block { from: m, to: m, negate: false, map: map(s, inner, arr)? });
            }
            total_map(&tx, &ty, &blocks)
        }
        TnOf { n, inner } => {
            let (tx, ty) = (s.cached_aux::<Total<F>>(k, x).unwrap(), s.cached_aux::<Total<F>>(k, y).unwrap());
            let mut blocks = Vec::new();
            for u in 1..1usize << (n + 1) {
                blocks.push(Block { from: u, to: u, negate: false, map: map(s, inner, s.bar_map(a, u, u))? });
            }
            total_map(&tx, &ty, &blocks).shift(1, vx.clone(), vy.clone())
        }
    };
    let m = Arc::new(m.rebase(vx, vy));
    s.store_map(k, a, m.clone());
    Ok(m)
}

/// Basis of the left-associated `X^{⊗m}` in degree `n`, as tuples of
/// (degree, index) in the layout order of [`ChainComplex::tensor`].
pub fn tensor_basis<F: Field>(x: &ChainComplex<F>, m: usize, n: i64) -> Vec<Vec<(i64, usize)>> {
    if x.is_zero() {
        return vec![];
    }
    if m == 1 {
        return (0..x.dim(n)).map(|i| vec![(n, i)]).collect();
    }
    let mut out = Vec::new();
    let (lo, hi) = ((m as i64 - 1) * x.lo(), (m as i64 - 1) * x.hi());
    for p in lo..=hi {
        let q = n - p;
        if x.dim(q) == 0 {
            continue;
        }
        for y in tensor_basis(x, m - 1, p) {
            for i in 0..x.dim(q) {
                let mut t = y.clone();
                t.push((q, i));
                out.push(t);
            }
        }
    }
    out
}

/// Spans of `b − τ b` over adjacent Koszul transpositions `τ`.
fn symmetrizer_spans<F: Field>(x: &ChainComplex<F>, m: usize) -> BTreeMap<i64, Vec<SparseVec<F::Elem>>> {
    let f = x.field();
    let mut out = BTreeMap::new();
    if x.is_zero() {
        return out;
    }
    for n in m as i64 * x.lo()..=m as i64 * x.hi() {
        let basis = tensor_basis(x, m, n);
        let index: HashMap<&Vec<(i64, usize)>, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut vs = Vec::new();
        for (i, b) in basis.iter().enumerate() {
            for j in 0..m - 1 {
                let mut t = b.clone();
                t.swap(j, j + 1);
                let odd = (b[j].0 * b[j + 1].0).rem_euclid(2) == 1;
                let k = index[&t];
                let mut v: BTreeMap<usize, F::Elem> = BTreeMap::new();
                v.insert(i, f.one());
                let e = v.entry(k).or_insert(f.zero());
                *e = f.sub(e, &f.sign(odd));
                let sv: SparseVec<F::Elem> =
                    v.into_iter().filter(|(_, e)| !f.is_zero(e)).map(|(j, e)| (j as u32, e)).collect();
                if !sv.is_empty() {
                    vs.push(sv);
                }
            }
        }
        out.insert(n, vs);
    }
    out
}

/// Total fiber of `F` over the coproduct cube of `n` copies of `x`.
fn perp_total<F: Field>(s: &Session<F>, n: usize, inner: &FunctorSpec, x: NodeId) -> Result<Total<F>> {
    let nc = build_coproduct_cube(s, &vec![x; n]);
    let cube = nc.apply(|v| value(s, inner, v), |a| map(s, inner, a))?;
    s.check_cap("cross effect", cube.total_dim())?;
    Ok(cube.tfiber())
}

/// The `(n+1)`-cube `U ↦ F(B ⊗_X U)`. The initial vertex is `F(X)` when
/// `with_base` is set, and zero otherwise.
pub fn tn_cube<F: Field>(s: &Session<F>, n: usize, inner: &FunctorSpec, x: NodeId, with_base: bool) -> Result<Cube<F>> {
    let dim = n + 1;
    let zero = Arc::new(ChainComplex::zero(s.field()));
    let id = s.id(x);
    let mut verts = Vec::with_capacity(1 << dim);
    for u in 0..1usize << dim {
        verts.push(if u == 0 && !with_base { zero.clone() } else { value(s, inner, s.bar(x, u.count_ones() as usize))? });
    }
    let mut edges = vec![vec![None; dim]; 1 << dim];
    for (u, row) in edges.iter_mut().enumerate() {
        for (i, e) in row.iter_mut().enumerate() {
            if u >> i & 1 == 0 {
                let v = u | 1 << i;
                *e = Some(if u == 0 && !with_base {
                    Arc::new(ChainMap::zero(zero.clone(), verts[v].clone()))
                } else {
                    map(s, inner, s.bar_map(id, u, v))?
                });
            }
        }
    }
    Ok(Cube::new(dim, verts.clone(), |u, i| edges[u][i].take().unwrap()))
}

/// The natural map `F(X) → T_nF(X)`.
pub fn tn_unit<F: Field>(s: &Session<F>, n: usize, inner: &FunctorSpec, x: NodeId) -> Result<ChainMap<F>> {
    let spec = FunctorSpec::tn(n, inner.clone());
    let target = value(s, &spec, x)?;
    let tot = s.cached_aux::<Total<F>>(key(s, &spec), x).expect("total cached with value");
    let source = value(s, inner, x)?;
    let field = s.field();
    let id = s.id(x);
    let legs: Vec<Arc<ChainMap<F>>> =
        (0..=n).map(|i| map(s, inner, s.bar_map(id, 0, 1 << i))).collect::<Result<_>>()?;
    Ok(ChainMap::new(source.clone(), target.clone(), |d| {
        let offs = tot.offsets(d - 1);
        let mut b = Builder::new(field, target.dim(d), source.dim(d));
        for (i, leg) in legs.iter().enumerate() {
            b.block(offs[1 << i], 0, &leg.component(d));
        }
        b.build_sized(target.dim(d))
    }))
}

/// Whether `η_Y ∘ F(g) = G(g) ∘ η_X`.
pub fn is_natural_square<F: Field>(
    eta_x: &ChainMap<F>,
    eta_y: &ChainMap<F>,
    fg: &ChainMap<F>,
    gg: &ChainMap<F>,
) -> bool {
    fg.then(eta_y) == eta_x.then(gg)
}

/// A simplicial object of `C_f` of the form `Γ(N → X_0)`: level `p` is
/// `X_0 ⊕ N^p`, with `∂: N → X_0` killed by the projection to `B`.
#[derive(Clone)]
pub struct SimplicialSample<F: Field> {
    pub x0: Arc<CfObject<F>>,
    pub n: Arc<ChainComplex<F>>,
    pub del: ChainMap<F>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizationReport {
    /// `H(F(|Y|))`
    pub of_realization: Graded,
    /// `H(|F(Y)|)`
    pub realization_of: Graded,
    /// degrees above this are affected by truncation and not compared
    pub window_hi: i64,
    pub agrees: bool,
}

impl<F: Field> SimplicialSample<F> {
    pub fn new(x0: Arc<CfObject<F>>, del: ChainMap<F>) -> Result<Self> {
        if !del.then(x0.proj()).is_zero() {
            return Err(Error::Invalid("∂ must be killed by the projection to B".into()));
        }
        let del = del.rebase(del.source().clone(), x0.x().clone());
        Ok(SimplicialSample { x0, n: del.source().clone(), del })
    }

    fn ctx(&self) -> &Arc<Context<F>> {
        self.x0.ctx()
    }

    fn level(&self, p: usize) -> Result<Arc<CfObject<F>>> {
        let f = self.x0.field();
        let x = self.x0.x();
        let mut parts: Vec<&ChainComplex<F>> = vec![x];
        parts.extend(std::iter::repeat(self.n.as_ref()).take(p));
        let y = Arc::new(ChainComplex::direct_sum(f, &parts));
        let ctx = self.ctx();
        let incl = ChainMap::new(ctx.a().clone(), y.clone(), |t| {
            let mut b = Builder::new(f, y.dim(t), ctx.a().dim(t));
            b.block(0, 0, &self.x0.incl().component(t));
            b.build_sized(y.dim(t))
        });
        let proj = ChainMap::new(y.clone(), ctx.b().clone(), |t| {
            let mut b = Builder::new(f, ctx.b().dim(t), y.dim(t));
            b.block(0, 0, &self.x0.proj().component(t));
            b.build_sized(ctx.b().dim(t))
        });
        CfObject::from_maps(ctx, incl, proj)
    }

    /// Face `d_i: Y_p → Y_{p−1}` as a block map. Summand `N_j` goes to
    /// `N_{j−1}` (or to `X_0` by `∂`) when `i < j`, to `N_j` when `i ≥ j`,
    /// and the last summand dies under the last face.
    fn face(&self, src: &Arc<CfObject<F>>, tgt: &Arc<CfObject<F>>, p: usize, i: usize) -> ChainMap<F> {
        let f = self.x0.field();
        ChainMap::new(src.x().clone(), tgt.x().clone(), |t| {
            let (xd, nd) = (self.x0.x().dim(t), self.n.dim(t));
            let mut b = Builder::new(f, tgt.x().dim(t), src.x().dim(t));
            b.block(0, 0, &Matrix::identity(f, xd));
            for j in 1..=p {
                let col = xd + (j - 1) * nd;
                if i < j {
                    if j >= 2 {
                        b.block(xd + (j - 2) * nd, col, &Matrix::identity(f, nd));
                    } else {
                        b.block(0, col, &self.del.component(t));
                    }
                } else if j < p {
                    b.block(xd + (j - 1) * nd, col, &Matrix::identity(f, nd));
                }
            }
            b.build_sized(tgt.x().dim(t))
        })
    }

    /// Degeneracy `s_i: Y_p → Y_{p+1}`.
    fn degeneracy(&self, src: &Arc<CfObject<F>>, tgt: &Arc<CfObject<F>>, p: usize, i: usize) -> ChainMap<F> {
        let f = self.x0.field();
        ChainMap::new(src.x().clone(), tgt.x().clone(), |t| {
            let (xd, nd) = (self.x0.x().dim(t), self.n.dim(t));
            let mut b = Builder::new(f, tgt.x().dim(t), src.x().dim(t));
            b.block(0, 0, &Matrix::identity(f, xd));
            for j in 1..=p {
                let to = if i < j { j + 1 } else { j };
                b.block(xd + (to - 1) * nd, xd + (j - 1) * nd, &Matrix::identity(f, nd));
            }
            b.build_sized(tgt.x().dim(t))
        })
    }

    /// `|Y| = X_0 ⊕ N[1]`, that is `cone(∂)`.
    fn realization(&self) -> Result<Arc<CfObject<F>>> {
        let f = self.x0.field();
        let c = Arc::new(cone(&self.del));
        let ctx = self.ctx();
        let n = self.n.clone();
        let incl = ChainMap::new(ctx.a().clone(), c.clone(), |t| {
            let mut b = Builder::new(f, c.dim(t), ctx.a().dim(t));
            b.block(n.dim(t - 1), 0, &self.x0.incl().component(t));
            b.build_sized(c.dim(t))
        });
        let proj = ChainMap::new(c.clone(), ctx.b().clone(), |t| {
            let mut b = Builder::new(f, ctx.b().dim(t), c.dim(t));
            b.block(0, n.dim(t - 1), &self.x0.proj().component(t));
            b.build_sized(ctx.b().dim(t))
        });
        CfObject::from_maps(ctx, incl, proj)
    }
}

/// Compares `F(|Y|)` with the normalized realization of `F(Y_•)` truncated
/// at simplicial level `levels`.
pub fn realization_check<F: Field>(
    s: &Session<F>,
    spec: &FunctorSpec,
    sample: &SimplicialSample<F>,
    levels: usize,
) -> Result<RealizationReport> {
    let field = s.field();
    let objs: Vec<Arc<CfObject<F>>> = (0..=levels).map(|p| sample.level(p)).collect::<Result<_>>()?;
    let nodes: Vec<NodeId> = objs.iter().map(|o| s.leaf(o)).collect();
    let vals: Vec<Arc<ChainComplex<F>>> = nodes.iter().map(|&x| value(s, spec, x)).collect::<Result<_>>()?;
    let mut faces: Vec<Vec<Arc<ChainMap<F>>>> = vec![vec![]];
    let mut quotients: Vec<(Arc<ChainComplex<F>>, BTreeMap<i64, Quotient<F>>)> = Vec::new();
    for p in 0..=levels {
        if p > 0 {
            let mut fs = Vec::with_capacity(p + 1);
            for i in 0..=p {
                let g = sample.face(&objs[p], &objs[p - 1], p, i);
                fs.push(map(s, spec, s.register_between(nodes[p], nodes[p - 1], g)?)?);
            }
            faces.push(fs);
        }
        let mut spans: BTreeMap<i64, Vec<SparseVec<F::Elem>>> = BTreeMap::new();
        if p > 0 {
            for i in 0..p {
                let g = sample.degeneracy(&objs[p - 1], &objs[p], p - 1, i);
                let fm = map(s, spec, s.register_between(nodes[p - 1], nodes[p], g)?)?;
                let src = fm.source();
                if src.is_zero() {
                    continue;
                }
                for t in src.lo()..=src.hi() {
                    spans.entry(t).or_default().extend(fm.component(t).columns());
                }
            }
        }
        let (c, qs) = vals[p].quotient(&spans)?;
        quotients.push((Arc::new(c), qs));
    }
    let qd = |p: usize, t: i64| quotients[p].0.dim(t);
    let live: Vec<usize> = (0..=levels).filter(|&p| !quotients[p].0.is_zero()).collect();
    let lhs_obj = sample.realization()?;
    let lhs = value(s, spec, s.leaf(&lhs_obj))?.homology();
    if live.is_empty() {
        return Ok(RealizationReport {
            agrees: lhs.is_zero(),
            of_realization: lhs,
            realization_of: Graded::default(),
            window_hi: i64::MAX,
        });
    }
    let lo = live.iter().map(|&p| quotients[p].0.lo() + p as i64).min().unwrap();
    let hi = live.iter().map(|&p| quotients[p].0.hi() + p as i64).max().unwrap();
    let min_internal = live.iter().map(|&p| quotients[p].0.lo()).min().unwrap();
    let offsets = |d: i64| -> Vec<usize> {
        let mut o = vec![0];
        for p in 0..=levels {
            o.push(o[p] + qd(p, d - p as i64));
        }
        o
    };
    let total = ChainComplex::from_fn(
        field,
        lo,
        hi,
        |d| offsets(d)[levels + 1],
        |d| {
            let (so, to) = (offsets(d), offsets(d - 1));
            let mut b = Builder::new(field, to[levels + 1], so[levels + 1]);
            for p in 0..=levels {
                let t = d - p as i64;
                if qd(p, t) == 0 {
                    continue;
                }
                let (c, qs) = &quotients[p];
                b.block_scaled(to[p], so[p], &c.d(t), &field.sign(p % 2 == 1));
                if p > 0 && qd(p - 1, t) > 0 {
                    let mut sum = Matrix::zeros(field, vals[p - 1].dim(t), vals[p].dim(t));
                    for (i, fm) in faces[p].iter().enumerate() {
                        sum = sum.axpy(&field.sign(i % 2 == 1), &fm.component(t));
                    }
                    let m = quotients[p - 1].1[&t].q.mul(&sum).mul(&qs[&t].s);
                    b.block(to[p - 1], so[p], &m);
                }
            }
            b.build_sized(to[levels + 1])
        },
    );
    let rhs = total.homology();
    let window_hi = levels as i64 + min_internal - 1;
    let agrees = lhs.window(i64::MIN, window_hi) == rhs.window(i64::MIN, window_hi);
    Ok(RealizationReport { of_realization: lhs, realization_of: rhs, window_hi, agrees })
}

/// True when every sample agrees.
pub fn verify_realization_commutation<F: Field>(
    ctx: &Arc<Context<F>>,
    spec: &FunctorSpec,
    samples: &[SimplicialSample<F>],
    levels: usize,
) -> Result<bool> {
    for sample in samples {
        let s = Session::new(ctx);
        if !realization_check(&s, spec, sample, levels)?.agrees {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfcat::fold;
    use crate::field::{PrimeField, Rationals};
    use crate::random::Gen;

    fn pointed_object<F: Field>(ctx: &Arc<Context<F>>, x: Arc<ChainComplex<F>>) -> Arc<CfObject<F>> {
        let f = ctx.field();
        let dims = x.clone();
        CfObject::new(ctx, x, |_| Matrix::zeros(f, 0, 0), move |n| Matrix::zeros(f, 0, dims.dim(n))).unwrap()
    }

    #[test]
    fn spec_json_shape() {
        let s = FunctorSpec::tensor(2);
        assert_eq!(s.repr(), r#"{"op":"tensor_power","m":2}"#);
        let p = FunctorSpec::parse(r#"{"op":"post_homology","m":1,"inner":{"op":"underlying"}}"#).unwrap();
        assert_eq!(p, FunctorSpec::homology(1, Underlying));
        let err = FunctorSpec::parse("nope").unwrap_err().to_string();
        assert!(err.contains("tensor2"));
    }

    #[test]
    fn tensor_square_of_fold() {
        let f = Rationals;
        let ctx = Context::pointed(f);
        let x = Arc::new(ChainComplex::concentrated(f, 0, 1));
        let obj = pointed_object(&ctx, x);
        let (_, fm) = fold(&obj, 2).unwrap();
        let s = Session::new(&ctx);
        let a = s.register(&fm).unwrap();
        let m = map(&s, &FunctorSpec::tensor(2), a).unwrap();
        assert_eq!(m.component(0), Matrix::from_i64_rows(f, &[&[1, 1, 1, 1]]));
    }

    #[test]
    fn sym_power_dimensions() {
        let f = Rationals;
        let ctx = Context::pointed(f);
        let s = Session::new(&ctx);
        let even = Arc::new(ChainComplex::concentrated(f, 0, 2));
        let odd = Arc::new(ChainComplex::concentrated(f, 1, 2));
        for (c, want) in [(even, 3), (odd, 1)] {
            let o = pointed_object(&ctx, c);
            let v = value(&s, &FunctorSpec::sym(2), s.leaf(&o)).unwrap();
            assert_eq!(v.total_dim(), want);
        }
        let small = PrimeField::new(2).unwrap();
        assert!(matches!(FunctorSpec::sym(2).validate(small), Err(Error::Characteristic { .. })));
    }

    #[test]
    fn unit_fiber_is_total_fiber() {
        let f = PrimeField::default();
        let mut g = Gen::new(f, 8);
        let ctx = g.context(true);
        let x = g.object(&ctx);
        let s = Session::new(&ctx);
        let node = s.leaf(&x);
        for spec in [Underlying, FunctorSpec::tensor(2)] {
            let phi = tn_unit(&s, 1, &spec, node).unwrap();
            let full = tn_cube(&s, 1, &spec, node, true).unwrap();
            assert_eq!(crate::chain::hofib(&phi), *full.tfiber().complex);
        }
    }
}
