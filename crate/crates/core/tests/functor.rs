use std::sync::Arc;

use cfcalc::cfcat::{CfMorphism, Context};
use cfcalc::functor::{map, realization_check, value, FunctorSpec};
use cfcalc::random::Gen;
use cfcalc::session::Session;
use cfcalc::{ChainMap, PrimeField};

fn small_gen(seed: u64) -> Gen<PrimeField> {
    let mut g = Gen::new(PrimeField::default(), seed);
    g.max_dim = 2;
    g.hi = 1;
    g
}

fn laws(spec: &FunctorSpec, pairs: usize, seed: u64) {
    let mut g = small_gen(seed);
    for i in 0..pairs {
        let ctx = if i % 3 == 0 { Context::pointed(g.field()) } else { g.context(i % 2 == 0) };
        let s = Session::new(&ctx);
        let x = g.object(&ctx);
        let h = g.morphism_from(&x);
        let k = g.morphism_from(&h.target);
        let (ah, ak) = (s.register(&h).unwrap(), s.register(&k).unwrap());
        let composite = s.register(&h.then(&k)).unwrap();
        let fh = map(&s, spec, ah).unwrap();
        let fk = map(&s, spec, ak).unwrap();
        assert_eq!(*map(&s, spec, composite).unwrap(), fh.then(&fk), "{} composition, sample {i}", spec.repr());
        let id = s.register(&CfMorphism::identity(&x)).unwrap();
        assert!(map(&s, spec, id).unwrap().is_identity(), "{} identity, sample {i}", spec.repr());
    }
}

fn quasi_isos(spec: &FunctorSpec, count: usize, seed: u64) {
    let mut g = small_gen(seed);
    for i in 0..count {
        let ctx = g.context(i % 2 == 0);
        let s = Session::new(&ctx);
        let x = g.object(&ctx);
        let q = g.quasi_iso_from(&x);
        assert!(q.is_quasi_iso());
        let fq = map(&s, spec, s.register(&q).unwrap()).unwrap();
        assert!(fq.is_quasi_iso(), "{} does not preserve a quasi-isomorphism, sample {i}", spec.repr());
    }
}

#[test]
fn catalog_functor_laws() {
    for (k, (_, spec)) in FunctorSpec::catalog().iter().enumerate() {
        laws(spec, 50, 100 + k as u64);
    }
}

#[test]
fn composite_functor_laws() {
    laws(&FunctorSpec::perp(2, FunctorSpec::tensor(2)), 10, 7);
    laws(&FunctorSpec::tn(1, FunctorSpec::Underlying), 10, 8);
    laws(&FunctorSpec::tn(1, FunctorSpec::tensor(2)), 5, 9);
}

#[test]
fn catalog_preserves_quasi_isos() {
    for (k, (_, spec)) in FunctorSpec::catalog().iter().enumerate() {
        quasi_isos(spec, 20, 200 + k as u64);
    }
    quasi_isos(&FunctorSpec::perp(2, FunctorSpec::tensor(2)), 5, 11);
    quasi_isos(&FunctorSpec::tn(1, FunctorSpec::tensor(2)), 5, 12);
}

#[test]
fn evaluation_examples() {
    let f = PrimeField::default();
    let ctx = Context::pointed(f);
    let s = Session::new(&ctx);
    let mut g = Gen::new(f, 3);
    let x = g.object(&ctx);
    let node = s.leaf(&x);
    assert_eq!(value(&s, &FunctorSpec::Underlying, node).unwrap(), *x.x());
    let c = FunctorSpec::parse("const").unwrap();
    assert_eq!(value(&s, &c, node).unwrap().total_dim(), 1);
    let k0 = Arc::new(cfcalc::ChainComplex::concentrated(f, 0, 1));
    let unit = cfcalc::cfcat::CfObject::new(&ctx, k0.clone(), |_| cfcalc::Matrix::zeros(f, 0, 0), |_| cfcalc::Matrix::zeros(f, 0, 1)).unwrap();
    let t = value(&s, &FunctorSpec::tensor(2), s.leaf(&unit)).unwrap();
    assert_eq!(*t, *k0);
}

#[test]
fn post_homology_of_quasi_iso_is_invertible() {
    let mut g = small_gen(5);
    for _ in 0..10 {
        let ctx = g.context(true);
        let s = Session::new(&ctx);
        let x = g.object(&ctx);
        let q = g.quasi_iso_from(&x);
        let m = map(&s, &FunctorSpec::homology(0, FunctorSpec::Underlying), s.register(&q).unwrap()).unwrap();
        let c = m.component(0);
        assert_eq!(c.rows(), c.cols());
        assert_eq!(c.rank(), c.rows());
    }
}

#[test]
fn realization_commutation_on_samples() {
    let mut g = small_gen(21);
    g.max_dim = 1;
    for name in ["const", "underlying", "tensor2", "sym2", "relcofiber", "linear_plus_tensor2", "shift_tensor2"] {
        let spec = FunctorSpec::parse(name).unwrap();
        assert!(spec.commutes_with_realization());
        for i in 0..4 {
            let ctx = g.context(i % 2 == 0);
            let sample = g.simplicial_sample(&ctx);
            let s = Session::new(&ctx);
            let r = realization_check(&s, &spec, &sample, 3).unwrap();
            assert!(r.agrees, "{name} sample {i}: {r:?}");
        }
    }
}

#[test]
fn post_homology_fails_realization_commutation() {
    let mut g = small_gen(22);
    let spec = FunctorSpec::parse("h1").unwrap();
    let ctx = Context::pointed(g.field());
    let found = (0..40).any(|_| {
        let sample = g.simplicial_sample(&ctx);
        let s = Session::new(&ctx);
        !realization_check(&s, &spec, &sample, 3).unwrap().agrees
    });
    assert!(found);
}

#[test]
fn natural_unit_square() {
    let mut g = small_gen(30);
    let ctx = g.context(true);
    let s = Session::new(&ctx);
    let x = g.object(&ctx);
    let h = g.morphism_from(&x);
    let a = s.register(&h).unwrap();
    let spec = FunctorSpec::tensor(2);
    let (nx, ny) = (s.src(a), s.tgt(a));
    let ex: ChainMap<PrimeField> = cfcalc::functor::tn_unit(&s, 1, &spec, nx).unwrap();
    let ey = cfcalc::functor::tn_unit(&s, 1, &spec, ny).unwrap();
    let fa = map(&s, &spec, a).unwrap();
    let ta = map(&s, &FunctorSpec::tn(1, spec.clone()), a).unwrap();
    assert!(cfcalc::functor::is_natural_square(&ex, &ey, &fa, &ta));
}
