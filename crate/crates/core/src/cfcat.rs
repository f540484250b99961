//! The category C_f of factorizations `A → X → B` of a fixed map `f`.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::chain::{ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{Builder, Matrix, SparseVec};

static NEXT_CONTEXT: AtomicU64 = AtomicU64::new(1);

#[derive(Debug)]
pub struct Context<F: Field> {
    id: u64,
    field: F,
    a: Arc<ChainComplex<F>>,
    b: Arc<ChainComplex<F>>,
    f: ChainMap<F>,
}

impl<F: Field> Context<F> {
    pub fn new(f: ChainMap<F>) -> Arc<Self> {
        f.assert_commutes();
        Arc::new(Context {
            id: NEXT_CONTEXT.fetch_add(1, Ordering::Relaxed),
            field: f.field(),
            a: f.source().clone(),
            b: f.target().clone(),
            f,
        })
    }

    /// `A = B = 0`.
    pub fn pointed(field: F) -> Arc<Self> {
        let z = Arc::new(ChainComplex::zero(field));
        Self::new(ChainMap::zero(z.clone(), z))
    }

    /// `0 → k[0]`.
    pub fn unit_target(field: F) -> Arc<Self> {
        let z = Arc::new(ChainComplex::zero(field));
        let k = Arc::new(ChainComplex::concentrated(field, 0, 1));
        Self::new(ChainMap::zero(z, k))
    }

    pub fn id(&self) -> u64 {
        self.id
    }
    pub fn field(&self) -> F {
        self.field
    }
    pub fn a(&self) -> &Arc<ChainComplex<F>> {
        &self.a
    }
    pub fn b(&self) -> &Arc<ChainComplex<F>> {
        &self.b
    }
    pub fn f(&self) -> &ChainMap<F> {
        &self.f
    }

    pub fn is_cofibrant(&self) -> bool {
        is_injective(&self.f)
    }

    pub fn initial(self: &Arc<Self>) -> Arc<CfObject<F>> {
        Arc::new(CfObject {
            ctx: self.clone(),
            x: self.a.clone(),
            incl: ChainMap::identity(self.a.clone()),
            proj: self.f.clone(),
        })
    }

    pub fn terminal(self: &Arc<Self>) -> Arc<CfObject<F>> {
        Arc::new(CfObject {
            ctx: self.clone(),
            x: self.b.clone(),
            incl: self.f.clone(),
            proj: ChainMap::identity(self.b.clone()),
        })
    }

    /// The context `X → B` whose initial object is `beta`'s complex.
    pub fn restrict(beta: &CfObject<F>) -> Arc<Self> {
        Self::new(beta.proj.clone())
    }

    /// The context `X → Cyl(β)`, which is cofibrant: `Cyl(β)_n = X_n ⊕ X_{n−1} ⊕ B_n`
    /// with `d(x, s, b) = (dx + s, −ds, db − βs)`, and `Cyl(β) ≃ B`.
    pub fn restrict_cofibrant(beta: &CfObject<F>) -> Arc<Self> {
        let f = beta.field();
        let (x, b) = (beta.x.clone(), beta.ctx.b.clone());
        let p = &beta.proj;
        let dim = |n: i64| x.dim(n) + x.dim(n - 1) + b.dim(n);
        let lo = x.lo().min(b.lo());
        let hi = (x.hi() + 1).max(b.hi());
        let cyl = Arc::new(ChainComplex::from_fn(f, lo, hi, dim, |n| {
            let (sx, ss) = (x.dim(n), x.dim(n - 1));
            let (tx, ts) = (x.dim(n - 1), x.dim(n - 2));
            let mut m = Builder::new(f, dim(n - 1), dim(n));
            m.block(0, 0, &x.d(n));
            m.block(0, sx, &Matrix::identity(f, ss));
            m.block(tx, sx, &x.d(n - 1).neg());
            m.block(tx + ts, sx, &p.component(n - 1).neg());
            m.block(tx + ts, sx + ss, &b.d(n));
            m.build_sized(dim(n - 1))
        }));
        let incl = ChainMap::new(x.clone(), cyl, |n| {
            let mut m = Builder::new(f, dim(n), x.dim(n));
            m.block(0, 0, &Matrix::identity(f, x.dim(n)));
            m.build_sized(dim(n))
        });
        Self::new(incl)
    }

    pub fn same(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

pub fn is_injective<F: Field>(m: &ChainMap<F>) -> bool {
    let s = m.source();
    s.is_zero() || (s.lo()..=s.hi()).all(|n| m.component(n).is_injective())
}

/// An object `A --incl--> X --proj--> B` with `proj ∘ incl = f`.
#[derive(Debug)]
pub struct CfObject<F: Field> {
    ctx: Arc<Context<F>>,
    x: Arc<ChainComplex<F>>,
    incl: ChainMap<F>,
    proj: ChainMap<F>,
}

impl<F: Field> CfObject<F> {
    pub fn new(
        ctx: &Arc<Context<F>>,
        x: Arc<ChainComplex<F>>,
        incl: impl Fn(i64) -> Matrix<F>,
        proj: impl Fn(i64) -> Matrix<F>,
    ) -> Result<Arc<Self>> {
        let incl = ChainMap::new(ctx.a.clone(), x.clone(), incl);
        let proj = ChainMap::new(x.clone(), ctx.b.clone(), proj);
        Self::from_maps(ctx, incl, proj)
    }

    pub fn from_maps(ctx: &Arc<Context<F>>, incl: ChainMap<F>, proj: ChainMap<F>) -> Result<Arc<Self>> {
        let composite = incl.then(&proj);
        if composite != ctx.f {
            return Err(Error::Invalid("proj ∘ incl ≠ f".into()));
        }
        if !is_injective(&incl) {
            return Err(Error::Invalid("incl is not degreewise injective".into()));
        }
        let x = incl.target().clone();
        Ok(Arc::new(CfObject { ctx: ctx.clone(), x, incl, proj }))
    }

    pub fn ctx(&self) -> &Arc<Context<F>> {
        &self.ctx
    }
    pub fn x(&self) -> &Arc<ChainComplex<F>> {
        &self.x
    }
    pub fn incl(&self) -> &ChainMap<F> {
        &self.incl
    }
    pub fn proj(&self) -> &ChainMap<F> {
        &self.proj
    }
    pub fn field(&self) -> F {
        self.ctx.field
    }

    /// Same complex and structure maps (context compared by identity).
    pub fn same_as(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && *self.x == *other.x && self.incl == other.incl && self.proj == other.proj
    }

    /// Reinterpret in another context with the same `B`, precomposing the
    /// inclusion with `pre: A' → A`-side data (used to lift objects of a
    /// restricted context back to the ambient one).
    pub fn with_incl(&self, ctx: &Arc<Context<F>>, incl: ChainMap<F>) -> Result<Arc<Self>> {
        let incl = incl.rebase(ctx.a.clone(), self.x.clone());
        let proj = self.proj.rebase(self.x.clone(), ctx.b.clone());
        Self::from_maps(ctx, incl, proj)
    }
}

/// A map under `A` and over `B`.
#[derive(Clone, Debug)]
pub struct CfMorphism<F: Field> {
    pub source: Arc<CfObject<F>>,
    pub target: Arc<CfObject<F>>,
    pub g: ChainMap<F>,
}

impl<F: Field> CfMorphism<F> {
    pub fn new(source: Arc<CfObject<F>>, target: Arc<CfObject<F>>, g: ChainMap<F>) -> Result<Self> {
        if !source.ctx.same(&target.ctx) {
            return Err(Error::ContextMismatch);
        }
        let g = g.rebase(source.x.clone(), target.x.clone());
        if source.incl.then(&g) != target.incl {
            return Err(Error::Invalid("g ∘ incl ≠ incl'".into()));
        }
        if g.then(&target.proj) != source.proj {
            return Err(Error::Invalid("proj' ∘ g ≠ proj".into()));
        }
        Ok(CfMorphism { source, target, g })
    }

    pub fn identity(x: &Arc<CfObject<F>>) -> Self {
        CfMorphism { source: x.clone(), target: x.clone(), g: ChainMap::identity(x.x.clone()) }
    }

    pub fn then(&self, other: &Self) -> Self {
        CfMorphism { source: self.source.clone(), target: other.target.clone(), g: self.g.then(&other.g) }
    }

    pub fn is_quasi_iso(&self) -> bool {
        self.g.is_quasi_iso()
    }
}

/// `X_1 ⨿_A … ⨿_A X_m`, computed in one step as `(⊕ X_k) / (ι_k i_k a − ι_1 i_1 a)`.
/// All of `X_1` survives as coordinates.
#[derive(Debug)]
pub struct Coproduct<F: Field> {
    pub object: Arc<CfObject<F>>,
    pub inclusions: Vec<ChainMap<F>>,
    parts: Vec<Arc<ChainComplex<F>>>,
    section: BTreeMap<i64, Matrix<F>>,
}

impl<F: Field> Coproduct<F> {
    pub fn new(ctx: &Arc<Context<F>>, xs: &[Arc<CfObject<F>>]) -> Result<Self> {
        let f = ctx.field;
        if xs.iter().any(|x| !x.ctx.same(ctx)) {
            return Err(Error::ContextMismatch);
        }
        if xs.is_empty() {
            let obj = ctx.initial();
            return Ok(Coproduct { object: obj, inclusions: vec![], parts: vec![], section: BTreeMap::new() });
        }
        let parts: Vec<Arc<ChainComplex<F>>> = xs.iter().map(|x| x.x.clone()).collect();
        let refs: Vec<&ChainComplex<F>> = parts.iter().map(|c| c.as_ref()).collect();
        let sum = ChainComplex::direct_sum(f, &refs);
        let a = ctx.a.clone();
        let mut spans: BTreeMap<i64, Vec<SparseVec<F::Elem>>> = BTreeMap::new();
        if !a.is_zero() {
            for n in a.lo()..=a.hi() {
                let offs = offsets(&parts, n);
                let i1 = xs[0].incl.component(n);
                let mut vecs = Vec::new();
                for (k, x) in xs.iter().enumerate().skip(1) {
                    let ik = x.incl.component(n);
                    for col in 0..a.dim(n) {
                        let mut v: SparseVec<F::Elem> = Vec::new();
                        for (i, e) in i1.column(col) {
                            v.push((i + offs[0] as u32, f.neg(&e)));
                        }
                        for (i, e) in ik.column(col) {
                            v.push((i + offs[k] as u32, e));
                        }
                        vecs.push(v);
                    }
                }
                spans.insert(n, vecs);
            }
        }
        let (qc, qs) = sum.quotient(&spans)?;
        let qc = Arc::new(qc);
        let q_of = |n: i64| qs.get(&n).map(|q| &q.q);
        let inclusions: Vec<ChainMap<F>> = (0..xs.len())
            .map(|k| {
                ChainMap::new_unchecked(parts[k].clone(), qc.clone(), |n| match q_of(n) {
                    Some(q) => {
                        let offs = offsets(&parts, n);
                        let total = offs[parts.len()];
                        let mut e = Builder::new(f, total, parts[k].dim(n));
                        e.block(offs[k], 0, &Matrix::identity(f, parts[k].dim(n)));
                        q.mul(&e.build_sized(total))
                    }
                    None => Matrix::zeros(f, qc.dim(n), parts[k].dim(n)),
                })
            })
            .collect();
        let section: BTreeMap<i64, Matrix<F>> = qs.into_iter().map(|(n, q)| (n, q.s)).collect();
        let incl = xs[0].incl.then(&inclusions[0]);
        let mut cp = Coproduct {
            object: ctx.initial(),
            inclusions,
            parts,
            section,
        };
        let projs: Vec<&ChainMap<F>> = xs.iter().map(|x| &x.proj).collect();
        let proj = cp.universal_raw(ctx.b.clone(), &projs);
        cp.object = Arc::new(CfObject { ctx: ctx.clone(), x: qc, incl, proj });
        Ok(cp)
    }

    pub fn arity(&self) -> usize {
        self.parts.len()
    }

    fn universal_raw(&self, target: Arc<ChainComplex<F>>, maps: &[&ChainMap<F>]) -> ChainMap<F> {
        assert_eq!(maps.len(), self.parts.len(), "one map per summand");
        let f = target.field();
        let src = self.inclusions.first().map(|m| m.target().clone());
        let src = src.unwrap_or_else(|| self.object.x.clone());
        ChainMap::new_unchecked(src.clone(), target.clone(), |n| {
            let blocks: Vec<Matrix<F>> = maps.iter().map(|m| m.component(n)).collect();
            let refs: Vec<&Matrix<F>> = blocks.iter().collect();
            let h = Matrix::hstack(f, target.dim(n), &refs);
            match self.section.get(&n) {
                Some(s) => h.mul(s),
                None => Matrix::zeros(f, target.dim(n), src.dim(n)),
            }
        })
    }

    /// The map out of the coproduct restricting to `maps[k]` on summand `k`.
    /// The maps must agree on `A`.
    pub fn universal(&self, target: Arc<ChainComplex<F>>, maps: &[&ChainMap<F>]) -> ChainMap<F> {
        if self.parts.is_empty() {
            return ChainMap::zero(self.object.x.clone(), target);
        }
        let m = self.universal_raw(target, maps);
        debug_assert!(m.commutation_defect().is_none());
        m.rebase(self.object.x.clone(), m.target().clone())
    }
}

fn offsets<F: Field>(parts: &[Arc<ChainComplex<F>>], n: i64) -> Vec<usize> {
    let mut out = Vec::with_capacity(parts.len() + 1);
    let mut o = 0;
    for p in parts {
        out.push(o);
        o += p.dim(n);
    }
    out.push(o);
    out
}

/// `+ : ⨿_n X → X`.
pub fn fold<F: Field>(x: &Arc<CfObject<F>>, n: usize) -> Result<(Coproduct<F>, CfMorphism<F>)> {
    let xs = vec![x.clone(); n];
    let cp = Coproduct::new(&x.ctx, &xs)?;
    let id = ChainMap::identity(x.x.clone());
    let refs: Vec<&ChainMap<F>> = (0..n).map(|_| &id).collect();
    let g = cp.universal(x.x.clone(), &refs);
    let m = CfMorphism::new(cp.object.clone(), x.clone(), g)?;
    Ok((cp, m))
}

/// `B ⊗_X U` for `U` given as a bitmask, via the normalized bar complex over
/// the poset `∅ < {t}`: degree n is `X_n ⊕ ⊕_{t ∈ U} (B_n ⊕ X_{n-1})`.
pub fn tensor_with_set<F: Field>(x: &Arc<CfObject<F>>, u: usize) -> Arc<CfObject<F>> {
    let f = x.field();
    let (xc, b) = (x.x.clone(), x.ctx.b.clone());
    let beta = &x.proj;
    if u == 0 {
        return x.clone();
    }
    let u = u.count_ones() as usize;
    let dim = |n: i64| xc.dim(n) + u * (b.dim(n) + xc.dim(n - 1));
    let lo = [xc.lo(), b.lo(), xc.lo() + 1].into_iter().min().unwrap();
    let hi = [xc.hi(), b.hi(), xc.hi() + 1].into_iter().max().unwrap();
    let c = Arc::new(ChainComplex::from_fn(f, lo, hi, dim, |n| {
        let (rows, cols) = (dim(n - 1), dim(n));
        let mut m = Builder::new(f, rows, cols);
        m.block(0, 0, &xc.d(n));
        let (sx, tx) = (xc.dim(n), xc.dim(n - 1));
        let (sb, tb) = (b.dim(n), b.dim(n - 1));
        let (sx1, tx1) = (xc.dim(n - 1), xc.dim(n - 2));
        for t in 0..u {
            let cs = sx + t * (sb + sx1);
            let rt = tx + t * (tb + tx1);
            m.block(rt, cs, &b.d(n));
            // chain (∅ < {t}): d_0 pushes to B, d_1 lands in X, internal d negated
            m.block(rt, cs + sb, &beta.component(n - 1));
            m.block(0, cs + sb, &Matrix::identity(f, sx1).neg());
            m.block(rt + tb, cs + sb, &xc.d(n - 1).neg());
        }
        m.build_sized(rows)
    }));
    let incl = {
        let c = c.clone();
        let xi = x.incl.clone();
        move |n: i64| {
            let mut m = Builder::new(f, c.dim(n), xi.source().dim(n));
            m.block(0, 0, &xi.component(n));
            m.build_sized(c.dim(n))
        }
    };
    let proj = {
        let c = c.clone();
        let (xc, b) = (xc.clone(), b.clone());
        move |n: i64| {
            let mut m = Builder::new(f, b.dim(n), c.dim(n));
            m.block(0, 0, &beta.component(n));
            for t in 0..u {
                let cs = xc.dim(n) + t * (b.dim(n) + xc.dim(n - 1));
                m.block(0, cs, &Matrix::identity(f, b.dim(n)));
            }
            m.build_sized(b.dim(n))
        }
    };
    CfObject::new(&x.ctx, c, incl, proj).expect("bar construction lies in C_f")
}

/// The map `B⊗_X U → B⊗_X V` for `U ⊆ V` (bitmasks), placing the block of
/// each `t ∈ U` at its position in `V`.
pub fn tensor_set_inclusion<F: Field>(
    x: &Arc<CfObject<F>>,
    src: &Arc<CfObject<F>>,
    tgt: &Arc<CfObject<F>>,
    u: usize,
    v: usize,
) -> ChainMap<F> {
    assert_eq!(u & !v, 0, "U ⊆ V");
    bar_map(x, x, src, tgt, u, v, &ChainMap::identity(x.x.clone()))
}

/// `B⊗_g U`, combined with the inclusion `U ⊆ V`.
pub fn bar_map<F: Field>(
    x: &Arc<CfObject<F>>,
    y: &Arc<CfObject<F>>,
    src: &Arc<CfObject<F>>,
    tgt: &Arc<CfObject<F>>,
    u: usize,
    v: usize,
    g: &ChainMap<F>,
) -> ChainMap<F> {
    let f = x.field();
    let b = x.ctx.b.clone();
    let (xc, yc) = (x.x.clone(), y.x.clone());
    let pos_u: Vec<usize> = (0..usize::BITS as usize).filter(|t| u >> t & 1 == 1).collect();
    let pos_v: Vec<usize> = (0..usize::BITS as usize).filter(|t| v >> t & 1 == 1).collect();
    ChainMap::new(src.x.clone(), tgt.x.clone(), |n| {
        let (rows, cols) = (tgt.x.dim(n), src.x.dim(n));
        let mut m = Builder::new(f, rows, cols);
        m.block(0, 0, &g.component(n));
        for (k, t) in pos_u.iter().enumerate() {
            let j = pos_v.iter().position(|s| s == t).unwrap();
            let cs = xc.dim(n) + k * (b.dim(n) + xc.dim(n - 1));
            let rt = yc.dim(n) + j * (b.dim(n) + yc.dim(n - 1));
            m.block(rt, cs, &Matrix::identity(f, b.dim(n)));
            m.block(rt + b.dim(n), cs + b.dim(n), &g.component(n - 1));
        }
        m.build_sized(rows)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Graded;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn initial_and_terminal() {
        let f = PrimeField::default();
        let ctx = Context::unit_target(f);
        assert!(ctx.initial().x().is_zero());
        assert_eq!(ctx.terminal().x().dim(0), 1);
        let p = Context::pointed(f);
        assert!(p.initial().x().is_zero() && p.terminal().x().is_zero());
    }

    #[test]
    fn coproduct_over_diagonal() {
        let f = Rationals;
        let a = Arc::new(ChainComplex::concentrated(f, 0, 1));
        let b = Arc::new(ChainComplex::concentrated(f, 0, 1));
        let ctx = Context::new(ChainMap::new(a.clone(), b.clone(), |_| Matrix::identity(f, 1)));
        let x2 = Arc::new(ChainComplex::concentrated(f, 0, 2));
        let x = CfObject::new(
            &ctx,
            x2,
            |_| Matrix::from_i64_rows(f, &[&[1], &[1]]),
            |_| Matrix::from_i64_rows(f, &[&[1, 0]]),
        )
        .unwrap();
        let cp = Coproduct::new(&ctx, &[x.clone(), x.clone()]).unwrap();
        assert_eq!(cp.object.x().dim(0), 3);
        for k in 0..2 {
            assert_eq!(cp.inclusions[k].then(cp.object.proj()), *x.proj());
        }
        let (_, fold2) = fold(&x, 2).unwrap();
        for k in 0..2 {
            assert!(cp.inclusions[k].then(&fold2.g).is_identity());
        }
    }

    #[test]
    fn pointed_fold_matrix() {
        let f = PrimeField::default();
        let ctx = Context::pointed(f);
        let k = Arc::new(ChainComplex::concentrated(f, 0, 1));
        let x = CfObject::new(&ctx, k, |_| Matrix::zeros(f, 1, 0), |_| Matrix::zeros(f, 0, 1)).unwrap();
        let (_, m) = fold(&x, 2).unwrap();
        assert_eq!(m.g.component(0), Matrix::from_i64_rows(f, &[&[1, 1]]));
    }

    #[test]
    fn tensor_set_small_cases() {
        let f = PrimeField::default();
        let ctx = Context::pointed(f);
        let k = Arc::new(ChainComplex::concentrated(f, 0, 1));
        let x = CfObject::new(&ctx, k, |_| Matrix::zeros(f, 1, 0), |_| Matrix::zeros(f, 0, 1)).unwrap();
        assert_eq!(tensor_with_set(&x, 0b11).x().homology(), Graded::from_pairs(&[(1, 1)]));
        assert!(tensor_with_set(&x, 0b1).x().is_acyclic());
    }
}
