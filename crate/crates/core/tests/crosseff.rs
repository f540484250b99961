use std::sync::Arc;

use cfcalc::cfcat::{CfObject, Context};
use cfcalc::crosseff::*;
use cfcalc::functor::FunctorSpec;
use cfcalc::random::Gen;
use cfcalc::session::{NodeId, Session};
use cfcalc::{ChainComplex, ChainMap, Graded, Matrix, PrimeField};

fn tiny_gen(seed: u64) -> Gen<PrimeField> {
    let mut g = Gen::new(PrimeField::default(), seed);
    g.max_dim = 1;
    g.hi = 1;
    g
}

fn unit(ctx: &Arc<Context<PrimeField>>) -> Arc<CfObject<PrimeField>> {
    let f = ctx.field();
    let k0 = Arc::new(ChainComplex::concentrated(f, 0, 1));
    CfObject::new(ctx, k0, |_| Matrix::zeros(f, 0, 0), |_| Matrix::zeros(f, 0, 1)).unwrap()
}

#[test]
fn simplicial_identities_k3_n2_tensor2() {
    let mut g = tiny_gen(1);
    let ctx = g.context(true);
    let s = Session::new(&ctx);
    let x = s.leaf(&g.object(&ctx));
    let spec = FunctorSpec::tensor(2);
    let d = |k: usize, i: usize| counit(&s, &spec, 2, x, k, i).unwrap();
    let sd = |k: usize, i: usize| degeneracy(&s, &spec, 2, x, k, i).unwrap();
    for j in 0..3 {
        for i in 0..j {
            assert_eq!(d(3, j).then(&d(2, i)), d(3, i).then(&d(2, j - 1)), "d_{i} d_{j}");
        }
    }
    // on ⊥^2: all degeneracy relations into ⊥^3 and back
    for j in 0..2 {
        for i in 0..3 {
            let lhs = sd(2, j).then(&d(3, i));
            if i == j || i == j + 1 {
                assert!(lhs.is_identity(), "d_{i} s_{j}");
            } else if i < j {
                assert_eq!(lhs, d(2, i).then(&sd(1, j - 1)), "d_{i} s_{j}");
            } else {
                assert_eq!(lhs, d(2, i - 1).then(&sd(1, j)), "d_{i} s_{j}");
            }
        }
    }
    for j in 0..2 {
        for i in 0..=j {
            assert_eq!(sd(2, j).then(&sd(3, i)), sd(2, i).then(&sd(3, j + 1)), "s_{i} s_{j}");
        }
    }
}

#[test]
fn cotriple_axioms_on_samples() {
    let mut g = tiny_gen(2);
    for (k, (_, spec)) in FunctorSpec::catalog().iter().enumerate() {
        for n in 1..=2 {
            let ctx = if k % 2 == 0 { g.context(true) } else { Context::pointed(g.field()) };
            let s = Session::new(&ctx);
            let x = s.leaf(&g.object(&ctx));
            let delta = comultiplication(&s, spec, n, x).unwrap();
            assert!(delta.then(&counit(&s, spec, n, x, 2, 0).unwrap()).is_identity());
            assert!(delta.then(&counit(&s, spec, n, x, 2, 1).unwrap()).is_identity());
            let left = delta.then(&degeneracy(&s, spec, n, x, 2, 0).unwrap());
            let right = delta.then(&degeneracy(&s, spec, n, x, 2, 1).unwrap());
            assert_eq!(left, right, "coassociativity");
        }
    }
}

#[test]
fn counit_at_k1_and_const() {
    let f = PrimeField::default();
    let ctx = Context::pointed(f);
    let s = Session::new(&ctx);
    let x = s.leaf(&unit(&ctx));
    let e = counit(&s, &FunctorSpec::tensor(2), 2, x, 1, 0).unwrap();
    assert_eq!(e.target().total_dim(), 1);
    let c = FunctorSpec::parse("const").unwrap();
    assert!(perp(&s, &c, 1, x, 1).unwrap().complex().is_acyclic());
    assert!(counit(&s, &c, 2, x, 0, 0).is_err());
}

#[test]
fn reducedness_for_catalog() {
    let mut g = tiny_gen(3);
    for (_, spec) in FunctorSpec::catalog() {
        for n in 1..=3 {
            let ctx = g.context(true);
            let s = Session::new(&ctx);
            let mut xs: Vec<NodeId> = (0..n).map(|_| s.leaf(&g.object(&ctx))).collect();
            let slot = g.below(n);
            xs[slot] = s.terminal();
            assert!(cross_effect(&s, &spec, &xs).unwrap().complex.is_acyclic(), "{} n={n}", spec.repr());
        }
    }
}

#[test]
fn degree_facts_pointed() {
    let f = PrimeField::default();
    let ctx = Context::pointed(f);
    let s = Session::new(&ctx);
    let x = s.leaf(&unit(&ctx));
    let tuple = |n: usize| vec![vec![x; n + 1]];
    let c = FunctorSpec::parse("const").unwrap();
    assert!(degree_test(&s, &c, 0, &tuple(0)).unwrap());
    assert!(degree_test(&s, &FunctorSpec::Underlying, 1, &tuple(1)).unwrap());
    assert!(!degree_test(&s, &FunctorSpec::Underlying, 0, &tuple(0)).unwrap());
    for m in 1..=3 {
        let t = FunctorSpec::tensor(m);
        assert!(degree_test(&s, &t, m, &tuple(m)).unwrap(), "⊗{m} degree {m}");
        assert!(!degree_test(&s, &t, m - 1, &tuple(m - 1)).unwrap(), "⊗{m} not degree {}", m - 1);
        assert!(degree_test(&s, &t, m + 1, &tuple(m + 1)).unwrap());
    }
}

#[test]
fn iterated_second_cross_effect() {
    let f = PrimeField::default();
    let ctx = Context::pointed(f);
    let s = Session::new(&ctx);
    let x = s.leaf(&unit(&ctx));
    let (a, b) = iterated_cr2_and_crn(&s, &FunctorSpec::tensor(2), &[x, x, x]).unwrap();
    assert!(a.is_zero() && b.is_zero());
    let (a, b) = iterated_cr2_and_crn(&s, &FunctorSpec::tensor(3), &[x, x, x]).unwrap();
    assert_eq!(a, Graded::from_pairs(&[(0, 6)]));
    assert_eq!(a, b);
    let mut g = tiny_gen(4);
    for spec in [FunctorSpec::tensor(2), FunctorSpec::tensor(3), FunctorSpec::parse("relcofiber").unwrap()] {
        for n in 1..=2 {
            let ctx = g.context(true);
            let s = Session::new(&ctx);
            let xs: Vec<NodeId> = (0..=n).map(|_| s.leaf(&g.object(&ctx))).collect();
            let (a, b) = iterated_cr2_and_crn(&s, &spec, &xs).unwrap();
            assert_eq!(a, b, "{} n={n}", spec.repr());
            let mut with_b = xs.clone();
            with_b[n] = s.terminal();
            let (a, b) = iterated_cr2_and_crn(&s, &spec, &with_b).unwrap();
            assert!(a.is_zero() && b.is_zero());
        }
    }
}

#[test]
fn t_construction_is_idempotent_on_reduced_values() {
    let mut g = tiny_gen(5);
    for spec in [FunctorSpec::tensor(2), FunctorSpec::parse("h1").unwrap()] {
        for n in 1..=2 {
            let ctx = g.context(true);
            let s = Session::new(&ctx);
            let xs: Vec<NodeId> = (0..n).map(|_| s.leaf(&g.object(&ctx))).collect();
            let h = functor_cube(&s, &spec, &cfcalc::cube::build_coproduct_cube(&s, &xs)).unwrap();
            let d = doubled(&h);
            assert!(d.gamma.is_quasi_iso());
            assert!(d.delta.then(&d.gamma).is_identity());
        }
    }
}

#[test]
fn degree_agrees_with_relative_excision() {
    let mut g = tiny_gen(6);
    for (_, spec) in FunctorSpec::catalog() {
        for n in 1..=2 {
            let mut degree = true;
            let mut excisive = true;
            for _ in 0..3 {
                let ctx = g.context(true);
                let s = Session::new(&ctx);
                let xs: Vec<NodeId> = (0..=n).map(|_| s.leaf(&g.object(&ctx))).collect();
                degree &= degree_test(&s, &spec, n, &[xs.clone()]).unwrap();
                excisive &= excision_cube(&s, &spec, &xs).unwrap().is_cartesian();
            }
            assert_eq!(degree, excisive, "{} n={n}", spec.repr());
        }
    }
}

#[test]
fn double_cube_rows_are_cartesian_below_the_top() {
    let mut g = tiny_gen(7);
    for (spec, n) in [(FunctorSpec::Underlying, 2), (FunctorSpec::tensor(2), 3)] {
        let ctx = g.context(true);
        let s = Session::new(&ctx);
        let xs: Vec<NodeId> = (0..n).map(|_| s.leaf(&g.object(&ctx))).collect();
        for (sm, cart) in double_cube_rows(&s, &spec, &xs).unwrap() {
            assert!(cart, "{} S={sm:b}", spec.repr());
        }
    }
    // a degree-2 functor tested against 1-excision: the top row detects it
    let ctx = Context::pointed(PrimeField::default());
    let s = Session::new(&ctx);
    let x = s.leaf(&unit(&ctx));
    let rows = double_cube_rows(&s, &FunctorSpec::tensor(2), &[x, x]).unwrap();
    assert!(!rows[3].1);
}

#[test]
fn strongly_cocartesian_images_are_cartesian() {
    let mut g = tiny_gen(8);
    for spec in [FunctorSpec::Underlying, FunctorSpec::tensor(2), FunctorSpec::sym(2)] {
        let n = spec.declared_degree().unwrap();
        for _ in 0..3 {
            let ctx = g.context(true);
            let z = g.object(&ctx);
            let ys: Vec<_> = (0..=n).map(|_| g.morphism_from(&z)).collect();
            let s = Session::new(&ctx);
            let (under, image) = strongly_cocartesian_image(&s, &spec, &z, &ys).unwrap();
            assert!(under.is_strongly_cocartesian());
            assert!(image.is_cartesian(), "{}", spec.repr());
        }
    }
}

#[test]
fn faces_are_chain_maps_with_expected_ends() {
    let mut g = tiny_gen(9);
    let ctx = g.context(false);
    let s = Session::new(&ctx);
    let x = s.leaf(&g.object(&ctx));
    let spec = FunctorSpec::sym(2);
    let e: ChainMap<PrimeField> = counit(&s, &spec, 2, x, 2, 1).unwrap();
    assert_eq!(e.source(), perp(&s, &spec, 2, x, 2).unwrap().complex());
    assert_eq!(e.target(), perp(&s, &spec, 2, x, 1).unwrap().complex());
}
