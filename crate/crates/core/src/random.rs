//! Seeded generators for complexes, chain maps and objects of C_f.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cfcat::{CfMorphism, CfObject, Context};
use crate::chain::{cone, ChainComplex, ChainMap};
use crate::cube::Cube;
use crate::field::Field;
use crate::functor::SimplicialSample;
use crate::matrix::{Builder, Matrix};

/// Homogeneous linear system in matrix unknowns, with equations of the
/// form `Σ L·V·R = 0`.
pub struct LinSys<F: Field> {
    field: F,
    vars: Vec<(usize, usize, usize)>,
    width: usize,
    entries: Vec<(usize, usize, F::Elem)>,
    eqs: usize,
}

pub enum Side<'a, F: Field> {
    Id,
    M(&'a Matrix<F>),
}

impl<F: Field> LinSys<F> {
    pub fn new(field: F) -> Self {
        LinSys { field, vars: vec![], width: 0, entries: vec![], eqs: 0 }
    }

    pub fn var(&mut self, rows: usize, cols: usize) -> usize {
        self.vars.push((rows, cols, self.width));
        self.width += rows * cols;
        self.vars.len() - 1
    }

    /// Adds the `rows × cols` equation `Σ_t L_t · V_t · R_t = 0`.
    pub fn equation(&mut self, rows: usize, cols: usize, terms: &[(Side<F>, usize, Side<F>)]) {
        let f = self.field;
        let base = self.eqs;
        for (l, v, r) in terms {
            let (vr, vc, off) = self.vars[*v];
            let lrow = |i: usize| -> Vec<(usize, F::Elem)> {
                match l {
                    Side::Id => vec![(i, f.one())],
                    Side::M(m) => m.row(i).iter().map(|(a, x)| (*a as usize, x.clone())).collect(),
                }
            };
            // (L V R)_{ij} = Σ L_{ia} V_{ab} R_{bj}
            let rt: Vec<Vec<(usize, F::Elem)>> = match r {
                Side::Id => (0..vc).map(|b| vec![(b, f.one())]).collect(),
                Side::M(m) => (0..vc).map(|b| m.row(b).iter().map(|(j, x)| (*j as usize, x.clone())).collect()).collect(),
            };
            for i in 0..rows {
                for (a, la) in lrow(i) {
                    debug_assert!(a < vr);
                    for (b, rb) in rt.iter().enumerate() {
                        for (j, rj) in rb {
                            self.entries.push((base + i * cols + j, off + a * vc + b, f.mul(&la, rj)));
                        }
                    }
                }
            }
        }
        self.eqs += rows * cols;
    }

    pub fn solution_space(&self) -> Matrix<F> {
        let mut b = Builder::new(self.field, self.eqs, self.width);
        for (i, j, v) in &self.entries {
            b.push(*i, *j, v.clone());
        }
        b.build_sized(self.eqs).kernel_basis()
    }

    /// A uniformly mixed element of the solution space, split into the unknowns.
    pub fn random_solution<R: Rng>(&self, rng: &mut R) -> Vec<Matrix<F>> {
        let f = self.field;
        let k = self.solution_space();
        let coeffs: Vec<F::Elem> = (0..k.cols()).map(|_| f.random(rng)).collect();
        let v = k.mul_vec(&coeffs);
        self.vars
            .iter()
            .map(|&(r, c, off)| Matrix::from_fn(f, r, c, |i, j| v[off + i * c + j].clone()))
            .collect()
    }
}

pub struct Gen<F: Field> {
    field: F,
    rng: ChaCha8Rng,
    pub max_dim: usize,
    pub lo: i64,
    pub hi: i64,
}

impl<F: Field> Gen<F> {
    pub fn new(field: F, seed: u64) -> Self {
        Gen { field, rng: ChaCha8Rng::seed_from_u64(seed), max_dim: 3, lo: 0, hi: 2 }
    }

    pub fn field(&self) -> F {
        self.field
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix<F> {
        let f = self.field;
        let rng = &mut self.rng;
        let mut b = Builder::new(f, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                b.push(i, j, f.random(rng));
            }
        }
        b.build_sized(rows)
    }

    /// `(g, g⁻¹)`.
    pub fn invertible(&mut self, n: usize) -> (Matrix<F>, Matrix<F>) {
        let f = self.field;
        loop {
            let g = self.matrix(n, n);
            if g.rank() == n {
                let inv = g.solve(&Matrix::identity(f, n)).expect("invertible");
                return (g, inv);
            }
        }
    }

    pub fn dims(&mut self, lo: i64, hi: i64, max: usize) -> Vec<usize> {
        (lo..=hi).map(|_| self.rng.gen_range(0..=max)).collect()
    }

    /// `d_n` is a random combination of kernel vectors of `d_{n-1}`.
    pub fn complex_with_dims(&mut self, lo: i64, dims: &[usize]) -> ChainComplex<F> {
        let f = self.field;
        let mut diffs: Vec<Matrix<F>> = Vec::new();
        for (i, &dn) in dims.iter().enumerate() {
            let d = if i == 0 {
                Matrix::zeros(f, 0, dn)
            } else {
                let k = diffs[i - 1].kernel_basis();
                let coeffs = self.matrix(k.cols(), dn);
                k.mul(&coeffs)
            };
            diffs.push(d);
        }
        ChainComplex::new(f, lo, dims.to_vec(), diffs)
    }

    pub fn complex(&mut self) -> ChainComplex<F> {
        let (lo, hi, m) = (self.lo, self.hi, self.max_dim);
        let dims = self.dims(lo, hi, m);
        self.complex_with_dims(lo, &dims)
    }

    /// `cone(id_W)` for a random `W`, contractible.
    pub fn acyclic(&mut self) -> ChainComplex<F> {
        let (lo, hi) = (self.lo + 1, self.hi);
        let m = (self.max_dim / 2).max(1);
        let dims = self.dims(lo, hi, m);
        let w = Arc::new(self.complex_with_dims(lo, &dims));
        cone(&ChainMap::identity(w))
    }

    pub fn chain_map(&mut self, x: &Arc<ChainComplex<F>>, y: &Arc<ChainComplex<F>>) -> ChainMap<F> {
        self.chain_map_killed_by(x, y, None)
    }

    /// Random chain map `x → y`, with `kill ∘ f = 0` when `kill` is given.
    pub fn chain_map_killed_by(
        &mut self,
        x: &Arc<ChainComplex<F>>,
        y: &Arc<ChainComplex<F>>,
        kill: Option<&ChainMap<F>>,
    ) -> ChainMap<F> {
        let f = self.field;
        if x.is_zero() {
            return ChainMap::zero(x.clone(), y.clone());
        }
        let (lo, hi) = (x.lo(), x.hi());
        let mut sys = LinSys::new(f);
        let vars: Vec<usize> = (lo..=hi).map(|n| sys.var(y.dim(n), x.dim(n))).collect();
        let kills: Vec<Matrix<F>> = match kill {
            Some(k) => (lo..=hi).map(|n| k.component(n)).collect(),
            None => vec![],
        };
        for n in lo..=hi + 1 {
            // d_Y f_n − f_{n-1} d_X = 0
            let (dy, dx) = (y.d(n), x.d(n));
            let mut terms = Vec::new();
            let neg = dx.neg();
            if n <= hi {
                terms.push((Side::M(&dy), vars[(n - lo) as usize], Side::Id));
            }
            if n > lo {
                terms.push((Side::Id, vars[(n - 1 - lo) as usize], Side::M(&neg)));
            }
            sys.equation(y.dim(n - 1), x.dim(n), &terms);
            if n <= hi && !kills.is_empty() {
                let k = &kills[(n - lo) as usize];
                sys.equation(k.rows(), x.dim(n), &[(Side::M(k), vars[(n - lo) as usize], Side::Id)]);
            }
        }
        let sol = sys.random_solution(&mut self.rng);
        ChainMap::new(x.clone(), y.clone(), |n| sol[(n - lo) as usize].clone())
    }

    /// `Γ(N → X_0)` with small `N` and `∂` killed by the projection to `B`.
    pub fn simplicial_sample(&mut self, ctx: &Arc<Context<F>>) -> SimplicialSample<F> {
        let x0 = self.object(ctx);
        let (lo, hi) = (self.lo, self.hi);
        let dims = self.dims(lo, hi, 2);
        let n = Arc::new(self.complex_with_dims(lo, &dims));
        let del = self.chain_map_killed_by(&n, x0.x(), Some(x0.proj()));
        SimplicialSample::new(x0, del).expect("∂ is killed by the projection")
    }

    /// Random context; `f` is an injective extension `A ↪ A ⊕ E` when asked.
    pub fn context(&mut self, cofibrant: bool) -> Arc<Context<F>> {
        let a = Arc::new(self.complex());
        if cofibrant {
            let e = self.complex();
            let (b, incl, _) = self.twisted(&a, &e, None);
            return Context::new(incl.rebase(a.clone(), b));
        }
        let b = Arc::new(self.complex());
        let f = self.chain_map(&a, &b);
        Context::new(f)
    }

    /// `X ⊕ E` with `d = [[d_X, h], [0, d_E]]` for random `h`, and, if `over`
    /// is given as `proj_X : X → B`, a compatible `(proj_X, p)`.
    #[allow(clippy::type_complexity)]
    fn twisted(
        &mut self,
        x: &Arc<ChainComplex<F>>,
        e: &ChainComplex<F>,
        over: Option<&ChainMap<F>>,
    ) -> (Arc<ChainComplex<F>>, ChainMap<F>, Option<ChainMap<F>>) {
        let f = self.field;
        let (lo, hi) = {
            let ps = [x.as_ref(), e].into_iter().filter(|c| !c.is_zero());
            let (mut lo, mut hi) = (i64::MAX, i64::MIN);
            for c in ps {
                lo = lo.min(c.lo());
                hi = hi.max(c.hi());
            }
            (lo, hi)
        };
        if lo > hi {
            let z = x.clone();
            return (z.clone(), ChainMap::identity(z.clone()), over.cloned());
        }
        let mut sys = LinSys::new(f);
        let h: Vec<usize> = (lo..=hi).map(|n| sys.var(x.dim(n - 1), e.dim(n))).collect();
        let p: Vec<usize> = match over {
            Some(b) => (lo..=hi).map(|n| sys.var(b.target().dim(n), e.dim(n))).collect(),
            None => vec![],
        };
        let idx = |n: i64| (n - lo) as usize;
        let dxs: Vec<Matrix<F>> = (lo..=hi + 1).map(|n| x.d(n)).collect();
        let des: Vec<Matrix<F>> = (lo..=hi + 1).map(|n| e.d(n)).collect();
        for n in lo..=hi {
            // d_X h_n + h_{n-1} d_E = 0
            if n > lo {
                sys.equation(
                    x.dim(n - 2),
                    e.dim(n),
                    &[(Side::M(&dxs[idx(n - 1)]), h[idx(n)], Side::Id), (Side::Id, h[idx(n - 1)], Side::M(&des[idx(n)]))],
                );
            }
        }
        let extra: Vec<(Matrix<F>, Matrix<F>, Matrix<F>)>;
        if let Some(beta) = over {
            let b = beta.target();
            extra = (lo..=hi).map(|n| (b.d(n), beta.component(n - 1), e.d(n))).collect();
            for n in lo..=hi {
                // d_B p_n − β h_n − p_{n-1} d_E = 0
                let (db, bm, de) = &extra[idx(n)];
                let nb = bm.neg();
                let nde = de.neg();
                let mut terms = vec![(Side::M(db), p[idx(n)], Side::Id), (Side::M(&nb), h[idx(n)], Side::Id)];
                if n > lo {
                    terms.push((Side::Id, p[idx(n - 1)], Side::M(&nde)));
                }
                sys.equation(b.dim(n - 1), e.dim(n), &terms);
            }
        }
        let sol = sys.random_solution(&mut self.rng);
        let hs = |n: i64| -> Matrix<F> {
            if n < lo || n > hi {
                Matrix::zeros(f, x.dim(n - 1), e.dim(n))
            } else {
                sol[h[idx(n)]].clone()
            }
        };
        let y = Arc::new(ChainComplex::from_fn(
            f,
            lo,
            hi,
            |n| x.dim(n) + e.dim(n),
            |n| {
                let mut m = Builder::new(f, x.dim(n - 1) + e.dim(n - 1), x.dim(n) + e.dim(n));
                m.block(0, 0, &x.d(n));
                m.block(0, x.dim(n), &hs(n));
                m.block(x.dim(n - 1), x.dim(n), &e.d(n));
                m.build_sized(x.dim(n - 1) + e.dim(n - 1))
            },
        ));
        let incl = ChainMap::new(x.clone(), y.clone(), |n| {
            let mut m = Builder::new(f, y.dim(n), x.dim(n));
            m.block(0, 0, &Matrix::identity(f, x.dim(n)));
            m.build_sized(y.dim(n))
        });
        let proj = over.map(|beta| {
            ChainMap::new(y.clone(), beta.target().clone(), |n| {
                let b = beta.target();
                let mut m = Builder::new(f, b.dim(n), y.dim(n));
                m.block(0, 0, &beta.component(n));
                if n >= lo && n <= hi {
                    m.block(0, x.dim(n), &sol[p[idx(n)]]);
                }
                m.build_sized(b.dim(n))
            })
        });
        (y, incl, proj)
    }

    /// Random `X ↪ Y` in C_f with `Y/X ≅ E`, followed by a random change of basis.
    pub fn extension(&mut self, x: &Arc<CfObject<F>>, e: &ChainComplex<F>) -> CfMorphism<F> {
        let (y, incl, proj) = self.twisted(x.x(), e, Some(x.proj()));
        let proj = proj.unwrap();
        let (y2, g, ginv) = self.rebasis(&y);
        let yi = x.incl().then(&incl).then(&g);
        let yp = ginv.then(&proj);
        let yo = CfObject::from_maps(x.ctx(), yi, yp).expect("extension lies in C_f");
        let m = incl.then(&g).rebase(x.x().clone(), y2);
        CfMorphism::new(x.clone(), yo, m).expect("extension map")
    }

    /// An isomorphic copy of `y` under a random change of basis, with the
    /// isomorphism and its inverse.
    pub fn rebasis(&mut self, y: &Arc<ChainComplex<F>>) -> (Arc<ChainComplex<F>>, ChainMap<F>, ChainMap<F>) {
        let f = self.field;
        if y.is_zero() {
            return (y.clone(), ChainMap::identity(y.clone()), ChainMap::identity(y.clone()));
        }
        let gs: Vec<(Matrix<F>, Matrix<F>)> = (y.lo()..=y.hi()).map(|n| self.invertible(y.dim(n))).collect();
        let g = |n: i64| -> Option<&(Matrix<F>, Matrix<F>)> {
            if n < y.lo() || n > y.hi() {
                None
            } else {
                Some(&gs[(n - y.lo()) as usize])
            }
        };
        let y2 = Arc::new(ChainComplex::from_fn(f, y.lo(), y.hi(), |n| y.dim(n), |n| {
            let d = y.d(n);
            let left = g(n - 1).map(|p| p.0.mul(&d)).unwrap_or(d);
            left.mul(&g(n).unwrap().1)
        }));
        let to = ChainMap::new(y.clone(), y2.clone(), |n| g(n).unwrap().0.clone());
        let back = ChainMap::new(y2.clone(), y.clone(), |n| g(n).unwrap().1.clone());
        (y2, to, back)
    }

    pub fn object(&mut self, ctx: &Arc<Context<F>>) -> Arc<CfObject<F>> {
        let e = self.complex();
        self.extension(&ctx.initial(), &e).target
    }

    /// Adds to `m.g` a random chain map `k` with `k ∘ incl = 0` and `proj ∘ k = 0`.
    pub fn perturb(&mut self, m: &CfMorphism<F>) -> CfMorphism<F> {
        let f = self.field;
        let (x, y) = (m.source.x(), m.target.x());
        if x.is_zero() || y.is_zero() {
            return m.clone();
        }
        let (lo, hi) = (x.lo(), x.hi());
        let mut sys = LinSys::new(f);
        let vars: Vec<usize> = (lo..=hi).map(|n| sys.var(y.dim(n), x.dim(n))).collect();
        let a = m.source.ctx().a().clone();
        let b = m.source.ctx().b().clone();
        let mats: Vec<(Matrix<F>, Matrix<F>, Matrix<F>, Matrix<F>)> = (lo..=hi + 1)
            .map(|n| (y.d(n), x.d(n).neg(), m.source.incl().component(n), m.target.proj().component(n)))
            .collect();
        for n in lo..=hi + 1 {
            let i = (n - lo) as usize;
            let (dy, ndx, inc, pr) = &mats[i];
            let mut terms = Vec::new();
            if n <= hi {
                terms.push((Side::M(dy), vars[i], Side::Id));
            }
            if n > lo {
                terms.push((Side::Id, vars[i - 1], Side::M(ndx)));
            }
            sys.equation(y.dim(n - 1), x.dim(n), &terms);
            if n <= hi {
                sys.equation(y.dim(n), a.dim(n), &[(Side::Id, vars[i], Side::M(inc))]);
                sys.equation(b.dim(n), x.dim(n), &[(Side::M(pr), vars[i], Side::Id)]);
            }
        }
        let sol = sys.random_solution(&mut self.rng);
        let k = ChainMap::new(x.clone(), y.clone(), |n| sol[(n - lo) as usize].clone());
        CfMorphism::new(m.source.clone(), m.target.clone(), m.g.add(&k)).expect("perturbed morphism")
    }

    pub fn morphism_from(&mut self, x: &Arc<CfObject<F>>) -> CfMorphism<F> {
        let e = self.complex();
        let m = self.extension(x, &e);
        self.perturb(&m)
    }

    /// An injective map out of `x`.
    pub fn cofibration_from(&mut self, x: &Arc<CfObject<F>>) -> CfMorphism<F> {
        let e = self.complex();
        let m = self.extension(x, &e);
        let p = self.perturb(&m);
        if crate::cfcat::is_injective(&p.g) {
            p
        } else {
            m
        }
    }

    /// A quasi-isomorphism out of `x` (extension by a contractible complex,
    /// then perturbed while that keeps it a quasi-isomorphism).
    pub fn quasi_iso_from(&mut self, x: &Arc<CfObject<F>>) -> CfMorphism<F> {
        let e = self.acyclic();
        let m = self.extension(x, &e);
        let p = self.perturb(&m);
        if p.is_quasi_iso() {
            p
        } else {
            m
        }
    }

    /// A random commuting `n`-cube: two random `(n−1)`-cubes joined by a
    /// random natural map along the last coordinate.
    pub fn cube(&mut self, n: usize) -> Cube<F> {
        if n == 0 {
            return Cube::new(0, vec![Arc::new(self.complex())], |_, _| unreachable!());
        }
        let lower = self.cube(n - 1);
        let upper = self.cube(n - 1);
        let joins = self.cube_map(&lower, &upper);
        self.stack(lower, upper, joins)
    }

    /// A cube whose last direction is an identity (always cartesian).
    pub fn degenerate_cube(&mut self, n: usize) -> Cube<F> {
        let lower = self.cube(n - 1);
        let joins = lower.vertices().iter().map(|v| ChainMap::identity(v.clone())).collect();
        self.stack(lower.clone(), lower, joins)
    }

    fn stack(&mut self, lower: Cube<F>, upper: Cube<F>, joins: Vec<ChainMap<F>>) -> Cube<F> {
        let n = lower.n() + 1;
        let half = 1usize << (n - 1);
        let mut verts = lower.vertices().to_vec();
        verts.extend(upper.vertices().iter().cloned());
        Cube::new(n, verts, |m, i| {
            if i == n - 1 {
                Arc::new(joins[m].clone())
            } else if m < half {
                lower.edge(m, i).clone()
            } else {
                upper.edge(m - half, i).clone()
            }
        })
    }

    /// A random natural transformation between two cubes of equal size.
    pub fn cube_map(&mut self, src: &Cube<F>, tgt: &Cube<F>) -> Vec<ChainMap<F>> {
        let f = self.field;
        let n = src.n();
        let verts = 1usize << n;
        let (lo, hi) = src
            .vertices()
            .iter()
            .chain(tgt.vertices())
            .filter(|c| !c.is_zero())
            .fold((i64::MAX, i64::MIN), |(a, b), c| (a.min(c.lo()), b.max(c.hi())));
        if lo > hi {
            return (0..verts).map(|m| ChainMap::zero(src.vertex(m).clone(), tgt.vertex(m).clone())).collect();
        }
        let mut sys = LinSys::new(f);
        let idx = |m: usize, d: i64| m * ((hi - lo + 1) as usize) + (d - lo) as usize;
        for m in 0..verts {
            for d in lo..=hi {
                let v = sys.var(tgt.vertex(m).dim(d), src.vertex(m).dim(d));
                debug_assert_eq!(v, idx(m, d));
            }
        }
        let mut held: Vec<Matrix<F>> = Vec::new();
        for m in 0..verts {
            let (x, y) = (src.vertex(m), tgt.vertex(m));
            for d in lo..=hi + 1 {
                held.push(y.d(d));
                held.push(x.d(d).neg());
            }
            for i in 0..n {
                if m >> i & 1 == 0 {
                    for d in lo..=hi {
                        held.push(tgt.edge(m, i).component(d));
                        held.push(src.edge(m, i).component(d).neg());
                    }
                }
            }
        }
        let mut k = 0;
        for m in 0..verts {
            let (x, y) = (src.vertex(m), tgt.vertex(m));
            for d in lo..=hi + 1 {
                let (dy, ndx) = (&held[k], &held[k + 1]);
                k += 2;
                let mut terms = Vec::new();
                if d <= hi {
                    terms.push((Side::M(dy), idx(m, d), Side::Id));
                }
                if d > lo {
                    terms.push((Side::Id, idx(m, d - 1), Side::M(ndx)));
                }
                sys.equation(y.dim(d - 1), x.dim(d), &terms);
            }
            for i in 0..n {
                if m >> i & 1 == 0 {
                    let t = m | 1 << i;
                    for d in lo..=hi {
                        // g_t f_i − f'_i g_m = 0
                        let (fy, nfx) = (&held[k], &held[k + 1]);
                        k += 2;
                        sys.equation(
                            tgt.vertex(t).dim(d),
                            x.dim(d),
                            &[(Side::M(fy), idx(m, d), Side::Id), (Side::Id, idx(t, d), Side::M(nfx))],
                        );
                    }
                }
            }
        }
        let sol = sys.random_solution(&mut self.rng);
        (0..verts)
            .map(|m| ChainMap::new(src.vertex(m).clone(), tgt.vertex(m).clone(), |d| sol[idx(m, d)].clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn generated_data_is_valid() {
        let mut g = Gen::new(PrimeField::default(), 7);
        for _ in 0..10 {
            let ctx = g.context(true);
            assert!(ctx.is_cofibrant());
            let x = g.object(&ctx);
            let m = g.morphism_from(&x);
            assert!(m.g.commutation_defect().is_none());
            let q = g.quasi_iso_from(&m.target);
            assert!(q.is_quasi_iso());
            let c = Arc::new(g.complex());
            let d = Arc::new(g.complex());
            g.chain_map(&c, &d).assert_commutes();
        }
        let ctx = g.context(false);
        let x = g.object(&ctx);
        assert_eq!(x.incl().then(x.proj()), *ctx.f());
    }

    #[test]
    fn seeds_replay() {
        let f = PrimeField::default();
        let (mut a, mut b) = (Gen::new(f, 3), Gen::new(f, 3));
        assert_eq!(a.complex(), b.complex());
    }
}
