//! Bounded chain complexes, chain maps and the homological toolkit.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::Result;
use crate::field::Field;
use crate::matrix::{quotient_by_span, Builder, Matrix, Quotient, SparseVec};

/// Differentials lower degree by one: `d_n : C_n → C_{n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex<F: Field> {
    field: F,
    lo: i64,
    dims: Vec<usize>,
    diffs: Vec<Matrix<F>>,
}

/// Connectivity: `Finite(c)` means homology vanishes in degrees `<= c`
/// and not in degree `c + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Conn {
    Finite(i64),
    Infinite,
}

impl Conn {
    pub fn plus(self, k: i64) -> Conn {
        match self {
            Conn::Finite(c) => Conn::Finite(c + k),
            Conn::Infinite => Conn::Infinite,
        }
    }
}

impl fmt::Display for Conn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conn::Finite(c) => write!(f, "{c}"),
            Conn::Infinite => write!(f, "inf"),
        }
    }
}

/// Graded dimensions, nonzero entries only.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graded(pub BTreeMap<i64, usize>);

impl Graded {
    pub fn get(&self, n: i64) -> usize {
        self.0.get(&n).copied().unwrap_or(0)
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn total(&self) -> usize {
        self.0.values().sum()
    }
    pub fn euler(&self) -> i64 {
        self.0.iter().map(|(n, d)| if n % 2 == 0 { *d as i64 } else { -(*d as i64) }).sum()
    }
    pub fn from_pairs(pairs: &[(i64, usize)]) -> Self {
        Graded(pairs.iter().filter(|p| p.1 > 0).cloned().collect())
    }
    pub fn shifted(&self, k: i64) -> Self {
        Graded(self.0.iter().map(|(n, d)| (n + k, *d)).collect())
    }
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        Graded(self.0.range(lo..=hi).map(|(n, d)| (*n, *d)).collect())
    }
    pub fn connectivity(&self) -> Conn {
        match self.0.keys().next() {
            Some(n) => Conn::Finite(n - 1),
            None => Conn::Infinite,
        }
    }
}

impl serde::Serialize for Conn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Conn::Finite(c) => s.serialize_i64(*c),
            Conn::Infinite => s.serialize_str("inf"),
        }
    }
}

/// As an object from degree to dimension.
impl serde::Serialize for Graded {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(n, d)| (n.to_string(), d)))
    }
}

impl fmt::Display for Graded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(n, d)| format!("H{n}={d}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl<F: Field> ChainComplex<F> {
    /// `diffs[i]` is `d_{lo+i}`; shapes and `d∘d = 0` are checked.
    pub fn new(field: F, lo: i64, dims: Vec<usize>, diffs: Vec<Matrix<F>>) -> Self {
        assert_eq!(dims.len(), diffs.len(), "one differential per degree");
        for (i, d) in diffs.iter().enumerate() {
            let below = if i == 0 { 0 } else { dims[i - 1] };
            assert_eq!(d.shape(), (below, dims[i]), "shape of d_{}", lo + i as i64);
        }
        let c = ChainComplex { field, lo, dims, diffs }.trimmed();
        c.assert_square_zero();
        c
    }

    fn assert_square_zero(&self) {
        let bad = (1..self.diffs.len())
            .into_par_iter()
            .find_any(|&i| !self.diffs[i - 1].mul(&self.diffs[i]).is_zero());
        if let Some(i) = bad {
            panic!("d∘d ≠ 0 at degree {}", self.lo + i as i64);
        }
    }

    fn trimmed(mut self) -> Self {
        while self.dims.last() == Some(&0) {
            self.dims.pop();
            self.diffs.pop();
        }
        let lead = self.dims.iter().take_while(|&&d| d == 0).count();
        if lead > 0 {
            self.dims.drain(..lead);
            self.diffs.drain(..lead);
            self.lo += lead as i64;
            if let Some(d0) = self.diffs.first_mut() {
                *d0 = Matrix::zeros(self.field, 0, self.dims[0]);
            }
        }
        if self.dims.is_empty() {
            self.lo = 0;
        }
        self
    }

    pub fn zero(field: F) -> Self {
        ChainComplex { field, lo: 0, dims: vec![], diffs: vec![] }
    }

    /// `k^dim` in degree `n`.
    pub fn concentrated(field: F, n: i64, dim: usize) -> Self {
        Self::new(field, n, vec![dim], vec![Matrix::zeros(field, 0, dim)])
    }

    /// Assemble from a degree range and a closure producing `d_n`.
    pub fn from_fn(
        field: F,
        lo: i64,
        hi: i64,
        dim: impl Fn(i64) -> usize,
        d: impl Fn(i64) -> Matrix<F>,
    ) -> Self {
        if hi < lo {
            return Self::zero(field);
        }
        let dims: Vec<usize> = (lo..=hi).map(&dim).collect();
        let diffs = (lo..=hi).map(d).collect();
        Self::new(field, lo, dims, diffs)
    }

    pub fn field(&self) -> F {
        self.field
    }
    pub fn lo(&self) -> i64 {
        self.lo
    }
    /// `lo - 1` for the zero complex.
    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }
    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn dim(&self, n: i64) -> usize {
        if n < self.lo || n > self.hi() {
            0
        } else {
            self.dims[(n - self.lo) as usize]
        }
    }
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
    pub fn d_ref(&self, n: i64) -> Option<&Matrix<F>> {
        if n < self.lo || n > self.hi() {
            None
        } else {
            Some(&self.diffs[(n - self.lo) as usize])
        }
    }
    pub fn d(&self, n: i64) -> Matrix<F> {
        match self.d_ref(n) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.field, self.dim(n - 1), self.dim(n)),
        }
    }
    fn rank_d(&self, n: i64) -> usize {
        self.d_ref(n).map_or(0, |m| m.rank())
    }

    pub fn graded_dims(&self) -> Graded {
        Graded((self.lo..=self.hi()).map(|n| (n, self.dim(n))).filter(|p| p.1 > 0).collect())
    }

    pub fn homology(&self) -> Graded {
        if self.is_zero() {
            return Graded::default();
        }
        let ranks: Vec<usize> = (self.lo..=self.hi() + 1)
            .into_par_iter()
            .map(|n| self.rank_d(n))
            .collect();
        let mut out = BTreeMap::new();
        for n in self.lo..=self.hi() {
            let i = (n - self.lo) as usize;
            let h = self.dim(n) - ranks[i] - ranks[i + 1];
            if h > 0 {
                out.insert(n, h);
            }
        }
        Graded(out)
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology().is_zero()
    }

    pub fn connectivity(&self) -> Conn {
        self.homology().connectivity()
    }

    pub fn direct_sum(field: F, parts: &[&Self]) -> Self {
        let live: Vec<&&Self> = parts.iter().filter(|c| !c.is_zero()).collect();
        if live.is_empty() {
            return Self::zero(field);
        }
        let lo = live.iter().map(|c| c.lo).min().unwrap();
        let hi = live.iter().map(|c| c.hi()).max().unwrap();
        Self::from_fn(
            field,
            lo,
            hi,
            |n| parts.iter().map(|c| c.dim(n)).sum(),
            |n| {
                let blocks: Vec<Matrix<F>> = parts.iter().map(|c| c.d(n)).collect();
                let refs: Vec<&Matrix<F>> = blocks.iter().collect();
                Matrix::block_diag(field, &refs)
            },
        )
    }

    /// `(Σ^k C)_n = C_{n-k}` with differential `(-1)^k d`.
    pub fn shift(&self, k: i64) -> Self {
        let s = self.field.sign(k.rem_euclid(2) == 1);
        ChainComplex {
            field: self.field,
            lo: if self.is_zero() { 0 } else { self.lo + k },
            dims: self.dims.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(&s)).collect(),
        }
    }

    /// Koszul-signed tensor product; in each degree the blocks `a_p ⊗ b_q`
    /// are ordered by ascending `p`, with Kronecker bases inside.
    pub fn tensor(a: &Self, b: &Self) -> Self {
        let f = a.field;
        if a.is_zero() || b.is_zero() {
            return Self::zero(f);
        }
        let lo = a.lo + b.lo;
        let hi = a.hi() + b.hi();
        Self::from_fn(
            f,
            lo,
            hi,
            |n| tensor_layout(a, b, n).1,
            |n| {
                let (src, sd) = tensor_layout(a, b, n);
                let (tgt, td) = tensor_layout(a, b, n - 1);
                let mut m = Builder::new(f, td, sd);
                for &(p, off) in &src {
                    let q = n - p;
                    let (ap, bq) = (a.dim(p), b.dim(q));
                    if let Some(&(_, t)) = tgt.iter().find(|e| e.0 == p - 1) {
                        let blk = a.d(p).kron(&Matrix::identity(f, bq));
                        m.block(t, off, &blk);
                    }
                    if let Some(&(_, t)) = tgt.iter().find(|e| e.0 == p) {
                        let blk = Matrix::identity(f, ap).kron(&b.d(q));
                        m.block_scaled(t, off, &blk, &f.sign(p.rem_euclid(2) == 1));
                    }
                }
                m.build_sized(td)
            },
        )
    }

    /// Basis of the quotient by a subcomplex spanned degreewise by `spans`.
    /// Pivots sit at the highest coordinates.
    pub fn quotient(
        &self,
        spans: &BTreeMap<i64, Vec<SparseVec<F::Elem>>>,
    ) -> Result<(Self, BTreeMap<i64, Quotient<F>>)> {
        let f = self.field;
        let mut qs = BTreeMap::new();
        for n in self.lo..=self.hi() {
            let empty = Vec::new();
            let v = spans.get(&n).unwrap_or(&empty);
            qs.insert(n, quotient_by_span(f, self.dim(n), v, false)?);
        }
        let c = Self::from_fn(
            f,
            self.lo,
            self.hi(),
            |n| qs[&n].kept.len(),
            |n| {
                let below = match qs.get(&(n - 1)) {
                    Some(q) => q.q.clone(),
                    None => Matrix::zeros(f, 0, 0),
                };
                below.mul(&self.d(n)).mul(&qs[&n].s)
            },
        );
        Ok((c, qs))
    }
}

fn tensor_layout<F: Field>(a: &ChainComplex<F>, b: &ChainComplex<F>, n: i64) -> (Vec<(i64, usize)>, usize) {
    let mut off = 0;
    let mut out = Vec::new();
    if a.is_zero() || b.is_zero() {
        return (out, 0);
    }
    for p in a.lo..=a.hi() {
        let q = n - p;
        let sz = a.dim(p) * b.dim(q);
        if sz > 0 {
            out.push((p, off));
            off += sz;
        }
    }
    (out, off)
}

/// A degree-zero chain map; components are stored over the source support.
#[derive(Clone, Debug)]
pub struct ChainMap<F: Field> {
    source: Arc<ChainComplex<F>>,
    target: Arc<ChainComplex<F>>,
    comps: Vec<Matrix<F>>,
}

impl<F: Field> PartialEq for ChainMap<F> {
    fn eq(&self, other: &Self) -> bool {
        *self.source == *other.source && *self.target == *other.target && self.comps == other.comps
    }
}

impl<F: Field> ChainMap<F> {
    /// Components for degrees outside the source support are ignored;
    /// missing ones are zero. Commutation with `d` is checked.
    pub fn new(
        source: Arc<ChainComplex<F>>,
        target: Arc<ChainComplex<F>>,
        comp: impl Fn(i64) -> Matrix<F>,
    ) -> Self {
        let m = Self::new_unchecked(source, target, comp);
        m.assert_commutes();
        m
    }

    pub fn new_unchecked(
        source: Arc<ChainComplex<F>>,
        target: Arc<ChainComplex<F>>,
        comp: impl Fn(i64) -> Matrix<F>,
    ) -> Self {
        let comps: Vec<Matrix<F>> = if source.is_zero() {
            vec![]
        } else {
            (source.lo()..=source.hi())
                .map(|n| {
                    let m = comp(n);
                    assert_eq!(m.shape(), (target.dim(n), source.dim(n)), "shape of component {n}");
                    m
                })
                .collect()
        };
        ChainMap { source, target, comps }
    }

    pub fn assert_commutes(&self) {
        if let Some(n) = self.commutation_defect() {
            panic!("chain map does not commute with d at degree {n}");
        }
    }

    /// First degree where `d f ≠ f d`, if any.
    pub fn commutation_defect(&self) -> Option<i64> {
        let s = &self.source;
        if s.is_zero() {
            return None;
        }
        (s.lo()..=s.hi() + 1).into_par_iter().find_first(|&n| {
            let lhs = self.target.d(n).mul(&self.component(n));
            let rhs = self.component(n - 1).mul(&s.d(n));
            lhs != rhs
        })
    }

    pub fn field(&self) -> F {
        self.source.field()
    }
    pub fn source(&self) -> &Arc<ChainComplex<F>> {
        &self.source
    }
    pub fn target(&self) -> &Arc<ChainComplex<F>> {
        &self.target
    }

    pub fn component(&self, n: i64) -> Matrix<F> {
        match self.comp_ref(n) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.field(), self.target.dim(n), self.source.dim(n)),
        }
    }

    pub fn comp_ref(&self, n: i64) -> Option<&Matrix<F>> {
        if self.source.is_zero() || n < self.source.lo() || n > self.source.hi() {
            None
        } else {
            Some(&self.comps[(n - self.source.lo()) as usize])
        }
    }

    pub fn identity(c: Arc<ChainComplex<F>>) -> Self {
        let f = c.field();
        ChainMap::new_unchecked(c.clone(), c.clone(), |n| Matrix::identity(f, c.dim(n)))
    }

    pub fn zero(source: Arc<ChainComplex<F>>, target: Arc<ChainComplex<F>>) -> Self {
        let f = source.field();
        let (s, t) = (source.clone(), target.clone());
        ChainMap::new_unchecked(source, target, |n| Matrix::zeros(f, t.dim(n), s.dim(n)))
    }

    pub fn is_identity(&self) -> bool {
        *self.source == *self.target && self.comps.iter().all(|m| m.is_identity())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|m| m.is_zero())
    }

    /// `other ∘ self`
    pub fn then(&self, other: &Self) -> Self {
        assert!(*self.target == *other.source, "composable maps");
        ChainMap::new_unchecked(self.source.clone(), other.target.clone(), |n| {
            other.component(n).mul(&self.component(n))
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(&self.field().one(), other)
    }

    pub fn axpy(&self, c: &F::Elem, other: &Self) -> Self {
        ChainMap::new_unchecked(self.source.clone(), self.target.clone(), |n| {
            self.component(n).axpy(c, &other.component(n))
        })
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        ChainMap::new_unchecked(self.source.clone(), self.target.clone(), |n| self.component(n).scale(c))
    }

    /// Same components, viewed between equal complexes held elsewhere.
    pub fn rebase(&self, source: Arc<ChainComplex<F>>, target: Arc<ChainComplex<F>>) -> Self {
        assert!(*source == *self.source && *target == *self.target, "rebase onto equal complexes");
        ChainMap { source, target, comps: self.comps.clone() }
    }

    pub fn shift(&self, k: i64, source: Arc<ChainComplex<F>>, target: Arc<ChainComplex<F>>) -> Self {
        ChainMap::new_unchecked(source, target, |n| self.component(n - k))
    }

    pub fn tensor(
        f1: &Self,
        f2: &Self,
        source: Arc<ChainComplex<F>>,
        target: Arc<ChainComplex<F>>,
    ) -> Self {
        let fld = f1.field();
        let (a, b) = (&f1.source, &f2.source);
        let (a2, b2) = (&f1.target, &f2.target);
        ChainMap::new_unchecked(source.clone(), target.clone(), |n| {
            let (sl, sd) = tensor_layout(a, b, n);
            let (tl, td) = tensor_layout(a2, b2, n);
            let mut m = Builder::new(fld, td, sd);
            for &(p, off) in &sl {
                if let Some(&(_, t)) = tl.iter().find(|e| e.0 == p) {
                    m.block(t, off, &f1.component(p).kron(&f2.component(n - p)));
                }
            }
            m.build_sized(td)
        })
    }

    /// Rank of `H_n(f)`.
    pub fn homology_rank(&self, n: i64) -> usize {
        let (x, y) = (&self.source, &self.target);
        let f = self.field();
        let dx = x.d(n);
        let dy = y.d(n + 1);
        let rows = x.dim(n - 1) + y.dim(n);
        let cols = x.dim(n) + y.dim(n + 1);
        let mut b = Builder::new(f, rows, cols);
        b.block(0, 0, &dx);
        b.block(x.dim(n - 1), 0, &self.component(n));
        b.block(x.dim(n - 1), x.dim(n), &dy);
        let m = b.build_sized(rows);
        m.rank() - dx.rank() - dy.rank()
    }

    /// Degrees where `H(f)` is nonzero, with ranks.
    pub fn homology_ranks(&self) -> Graded {
        let (x, y) = (&self.source, &self.target);
        if x.is_zero() || y.is_zero() {
            return Graded::default();
        }
        let lo = x.lo().max(y.lo());
        let hi = x.hi().min(y.hi());
        if hi < lo {
            return Graded::default();
        }
        Graded(
            (lo..=hi)
                .into_par_iter()
                .map(|n| (n, self.homology_rank(n)))
                .filter(|p| p.1 > 0)
                .collect(),
        )
    }

    pub fn is_homology_zero(&self) -> bool {
        self.homology_ranks().is_zero()
    }

    pub fn is_quasi_iso(&self) -> bool {
        cone(self).is_acyclic()
    }

    pub fn connectivity(&self) -> Conn {
        hofib(self).connectivity().plus(1)
    }
}

/// `X_n ⊕ Y_{n+1}`, `d(x, y) = (dx, f x − dy)`.
pub fn hofib<F: Field>(f: &ChainMap<F>) -> ChainComplex<F> {
    let (x, y) = (f.source.as_ref(), f.target.as_ref());
    let fld = f.field();
    if x.is_zero() && y.is_zero() {
        return ChainComplex::zero(fld);
    }
    let (lo, hi) = span(&[(x, 0), (y, -1)]);
    ChainComplex::from_fn(
        fld,
        lo,
        hi,
        |n| x.dim(n) + y.dim(n + 1),
        |n| {
            let rows = x.dim(n - 1) + y.dim(n);
            let mut b = Builder::new(fld, rows, x.dim(n) + y.dim(n + 1));
            b.block(0, 0, &x.d(n));
            b.block(x.dim(n - 1), 0, &f.component(n));
            b.block(x.dim(n - 1), x.dim(n), &y.d(n + 1).neg());
            b.build_sized(rows)
        },
    )
}

/// `X_{n-1} ⊕ Y_n`, `d(x, y) = (−dx, f x + dy)`.
pub fn cone<F: Field>(f: &ChainMap<F>) -> ChainComplex<F> {
    let (x, y) = (f.source.as_ref(), f.target.as_ref());
    let fld = f.field();
    if x.is_zero() && y.is_zero() {
        return ChainComplex::zero(fld);
    }
    let (lo, hi) = span(&[(x, 1), (y, 0)]);
    ChainComplex::from_fn(
        fld,
        lo,
        hi,
        |n| x.dim(n - 1) + y.dim(n),
        |n| {
            let rows = x.dim(n - 2) + y.dim(n - 1);
            let mut b = Builder::new(fld, rows, x.dim(n - 1) + y.dim(n));
            b.block(0, 0, &x.d(n - 1).neg());
            b.block(x.dim(n - 2), 0, &f.component(n - 1));
            b.block(x.dim(n - 2), x.dim(n - 1), &y.d(n));
            b.build_sized(rows)
        },
    )
}

/// Support of a family of shifted complexes.
fn span<F: Field>(parts: &[(&ChainComplex<F>, i64)]) -> (i64, i64) {
    let live: Vec<_> = parts.iter().filter(|p| !p.0.is_zero()).collect();
    let lo = live.iter().map(|(c, s)| c.lo() + s).min().unwrap_or(0);
    let hi = live.iter().map(|(c, s)| c.hi() + s).max().unwrap_or(-1);
    (lo, hi)
}

/// Projection `hofib(f) → X`.
pub fn hofib_projection<F: Field>(f: &ChainMap<F>, fib: Arc<ChainComplex<F>>) -> ChainMap<F> {
    let x = f.source.clone();
    let fld = f.field();
    ChainMap::new(fib.clone(), x.clone(), |n| {
        let mut b = Builder::new(fld, x.dim(n), fib.dim(n));
        b.block(0, 0, &Matrix::identity(fld, x.dim(n)));
        b.build_sized(x.dim(n))
    })
}

/// Strict pushout of `X ← A → Y` with its two structure maps.
pub struct Pushout<F: Field> {
    pub object: Arc<ChainComplex<F>>,
    pub from_x: ChainMap<F>,
    pub from_y: ChainMap<F>,
    /// false when neither leg is degreewise injective
    pub homotopy_invariant: bool,
}

pub fn pushout<F: Field>(i: &ChainMap<F>, j: &ChainMap<F>) -> Result<Pushout<F>> {
    assert!(*i.source == *j.source, "pushout legs share a source");
    let f = i.field();
    let (a, x, y) = (i.source.clone(), i.target.clone(), j.target.clone());
    let sum = ChainComplex::direct_sum(f, &[&x, &y]);
    let mut spans = BTreeMap::new();
    for n in a.lo()..=a.hi() {
        let (im, jm) = (i.component(n), j.component(n).neg());
        let stacked = Matrix::vstack(f, a.dim(n), &[&im, &jm]);
        spans.insert(n, stacked.columns());
    }
    let (p, qs) = sum.quotient(&spans)?;
    let p = Arc::new(p);
    let from = |c: &Arc<ChainComplex<F>>, off: usize| {
        ChainMap::new(c.clone(), p.clone(), |n| match qs.get(&n) {
            Some(q) => {
                let total = x.dim(n) + y.dim(n);
                let mut e = Builder::new(f, total, c.dim(n));
                let r0 = if off == 1 { x.dim(n) } else { 0 };
                e.block(r0, 0, &Matrix::identity(f, c.dim(n)));
                q.q.mul(&e.build_sized(total))
            }
            None => Matrix::zeros(f, p.dim(n), c.dim(n)),
        })
    };
    let from_x = from(&x, 0);
    let from_y = from(&y, 1);
    let inj = |m: &ChainMap<F>| {
        m.source.is_zero()
            || (m.source.lo()..=m.source.hi()).all(|n| m.component(n).is_injective())
    };
    let homotopy_invariant = inj(i) || inj(j);
    Ok(Pushout { object: p, from_x, from_y, homotopy_invariant })
}

/// Cycle representatives for `H_n` and a way to read off coordinates.
pub struct HomologyBasis<F: Field> {
    /// columns: cycles representing a basis of `H_n`
    pub reps: Matrix<F>,
    /// columns: basis of the boundaries `B_n`
    boundaries: Matrix<F>,
}

impl<F: Field> HomologyBasis<F> {
    pub fn new(c: &ChainComplex<F>, n: i64) -> Self {
        let f = c.field();
        let dim = c.dim(n);
        let z = c.d(n).kernel_basis();
        let b = c.d(n + 1);
        let m = Matrix::hstack(f, dim, &[&b, &z]);
        let piv = pivot_columns(&m);
        let bcols: Vec<usize> = piv.iter().copied().filter(|&j| j < b.cols()).collect();
        let zcols: Vec<usize> = piv.iter().copied().filter(|&j| j >= b.cols()).collect();
        HomologyBasis { reps: m.select_cols(&zcols), boundaries: m.select_cols(&bcols) }
    }

    pub fn rank(&self) -> usize {
        self.reps.cols()
    }

    /// Homology coordinates of cycles given as columns.
    pub fn coordinates(&self, cycles: &Matrix<F>) -> Matrix<F> {
        let f = cycles.field();
        let basis = Matrix::hstack(f, self.reps.rows(), &[&self.boundaries, &self.reps]);
        let sol = basis.solve(cycles).expect("columns are cycles");
        let nb = self.boundaries.cols();
        let idx: Vec<usize> = (nb..nb + self.rank()).collect();
        sol.select_rows(&idx)
    }
}

/// Indices of the first maximal independent set of columns.
pub fn pivot_columns<F: Field>(m: &Matrix<F>) -> Vec<usize> {
    use crate::matrix::Echelon;
    let rows: Vec<SparseVec<F::Elem>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let e = Echelon::reduce(m.field(), m.cols(), rows, m.cols(), None);
    e.pivots.iter().map(|(c, _)| *c as usize).collect()
}

/// Matrix of `H_n(f)` in the bases of [`HomologyBasis`].
pub fn induced_homology_map<F: Field>(f: &ChainMap<F>, n: i64) -> Matrix<F> {
    let hx = HomologyBasis::new(&f.source, n);
    let hy = HomologyBasis::new(&f.target, n);
    let images = f.component(n).mul(&hx.reps);
    hy.coordinates(&images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn k0<F: Field>(f: F) -> Arc<ChainComplex<F>> {
        Arc::new(ChainComplex::concentrated(f, 0, 1))
    }

    #[test]
    fn hofib_of_diagonal() {
        let f = Rationals;
        let x = k0(f);
        let y = Arc::new(ChainComplex::concentrated(f, 0, 2));
        let diag = ChainMap::new(x, y, |_| Matrix::from_i64_rows(f, &[&[1], &[1]]));
        // the surviving class is the cokernel of H_0(f), one degree down
        assert_eq!(hofib(&diag).homology(), Graded::from_pairs(&[(-1, 1)]));
        assert_eq!(cone(&diag).homology(), Graded::from_pairs(&[(0, 1)]));
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let f = PrimeField::default();
        let x = k0(f);
        let id = ChainMap::identity(x.clone());
        assert!(cone(&id).is_acyclic());
        assert!(hofib(&id).is_acyclic());
        assert!(id.is_quasi_iso());
        assert_eq!(id.connectivity(), Conn::Infinite);
    }

    #[test]
    fn suspension_and_loop() {
        let f = PrimeField::default();
        let x = k0(f);
        let z = Arc::new(ChainComplex::zero(f));
        let to_zero = ChainMap::zero(x.clone(), z.clone());
        assert_eq!(cone(&to_zero).homology(), Graded::from_pairs(&[(1, 1)]));
        let from_zero = ChainMap::zero(z, x);
        assert_eq!(hofib(&from_zero).homology(), Graded::from_pairs(&[(-1, 1)]));
    }

    #[test]
    fn kunneth_example() {
        let f = PrimeField::default();
        let c = ChainComplex::new(f, 0, vec![1, 1], vec![Matrix::zeros(f, 0, 1), Matrix::zeros(f, 1, 1)]);
        let t = ChainComplex::tensor(&c, &c);
        assert_eq!(t.graded_dims(), Graded::from_pairs(&[(0, 1), (1, 2), (2, 1)]));
        let unit = ChainComplex::tensor(&ChainComplex::concentrated(f, 0, 1), &c);
        assert_eq!(unit, c);
    }

    #[test]
    fn pushout_dimension() {
        let f = Rationals;
        let a = k0(f);
        let x = Arc::new(ChainComplex::concentrated(f, 0, 2));
        let i = ChainMap::new(a.clone(), x.clone(), |_| Matrix::from_i64_rows(f, &[&[1], &[0]]));
        let j = ChainMap::new(a.clone(), x.clone(), |_| Matrix::from_i64_rows(f, &[&[0], &[1]]));
        let p = pushout(&i, &j).unwrap();
        assert_eq!(p.object.dim(0), 3);
        assert!(p.homotopy_invariant);
        assert_eq!(i.then(&p.from_x), j.then(&p.from_y));
    }

    #[test]
    fn quasi_iso_into_cone_sum() {
        let f = PrimeField::default();
        let x = k0(f);
        let c = cone(&ChainMap::identity(x.clone()));
        let t = Arc::new(ChainComplex::direct_sum(f, &[&c, &x]));
        let inc = ChainMap::new(x.clone(), t.clone(), |n| {
            let mut b = Builder::new(f, t.dim(n), 1);
            if n == 0 {
                b.push(c.dim(0), 0, f.one());
            }
            b.build_sized(t.dim(n))
        });
        assert!(inc.is_quasi_iso());
        assert_eq!(induced_homology_map(&inc, 0).shape(), (1, 1));
    }

    #[test]
    fn connectivity_of_shift() {
        let f = PrimeField::default();
        assert_eq!(ChainComplex::concentrated(f, 3, 1).connectivity(), Conn::Finite(2));
        assert_eq!(ChainComplex::zero(f).connectivity(), Conn::Infinite);
    }
}
