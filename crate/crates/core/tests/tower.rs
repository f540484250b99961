use std::sync::Arc;

use cfcalc::cfcat::{CfObject, Context};
use cfcalc::chain::{cone, ChainComplex, ChainMap};
use cfcalc::functor::{map, FunctorSpec};
use cfcalc::random::Gen;
use cfcalc::session::Session;
use cfcalc::tower::*;
use cfcalc::{Conn, Graded, PrimeField};

fn tiny_gen(seed: u64) -> Gen<PrimeField> {
    let mut g = Gen::new(PrimeField::default(), seed);
    g.max_dim = 1;
    g.lo = 0;
    g.hi = 1;
    g
}

#[test]
fn skeleton_models_agree() {
    let mut g = tiny_gen(1);
    for spec in [FunctorSpec::Underlying, FunctorSpec::tensor(2)] {
        let ctx = g.context(true);
        let s = Session::new(&ctx);
        let x = s.leaf(&g.object(&ctx));
        for n in 1..=2 {
            for k in 0..=2 {
                let r = skeleton_realization(&s, &spec, n, x, k).unwrap();
                assert_eq!(cone(&r.augmentation), *r.full.complex, "{} n={n} k={k}", spec.repr());
                let bar = skeleton_bar_hocolim(&s, &spec, n, x, k).unwrap();
                assert_eq!(bar.homology(), r.value.homology(), "{} n={n} k={k}", spec.repr());
                if k <= 1 {
                    let moore = skeleton_moore(&s, &spec, n, x, k).unwrap();
                    assert_eq!(moore.homology(), r.value.homology(), "{} n={n} k={k}", spec.repr());
                }
            }
        }
    }
}

#[test]
fn skeleton_k0_is_perp() {
    let mut g = tiny_gen(2);
    let ctx = g.context(true);
    let s = Session::new(&ctx);
    let x = s.leaf(&g.object(&ctx));
    let spec = FunctorSpec::tensor(2);
    let r = skeleton_realization(&s, &spec, 1, x, 0).unwrap();
    let p = cfcalc::crosseff::perp(&s, &spec, 2, x, 1).unwrap();
    assert_eq!(r.value.homology(), p.complex().homology());
}

#[test]
fn skeleton_fiber_sequence_small() {
    let f = PrimeField::default();
    let mut g = tiny_gen(3);
    let contexts = [(Context::unit_target(f), 2), (g.context(true), 1)];
    for (ctx, n_max) in contexts {
        let s = Session::new(&ctx);
        for spec in [FunctorSpec::Underlying, FunctorSpec::tensor(2), FunctorSpec::parse("const").unwrap()] {
            for n in 1..=n_max {
                for k in 0..=1 {
                    let r = skeleton_fiber_check(&s, &spec, n, s.initial(), k).unwrap();
                    assert!(r.passed(), "{} n={n} k={k}: {r:?}", spec.repr());
                }
            }
        }
    }
}

#[test]
fn vertex_cube_comparison() {
    let f = PrimeField::default();
    let mut g = tiny_gen(4);
    for ctx in [Context::unit_target(f), g.context(true), g.context(true)] {
        let s = Session::new(&ctx);
        for spec in [FunctorSpec::Underlying, FunctorSpec::tensor(2), FunctorSpec::sym(2)] {
            for n in 1..=2 {
                assert!(vertex_cube_check(&s, &spec, n).unwrap(), "{} n={n}", spec.repr());
            }
        }
    }
}

#[test]
fn degree_n_functor_has_quasi_iso_gamma() {
    let mut g = tiny_gen(5);
    let ctx = g.context(true);
    let s = Session::new(&ctx);
    let x = s.leaf(&g.object(&ctx));
    for k in 0..=1 {
        assert!(gamma_stage(&s, &FunctorSpec::tensor(2), 2, x, k).unwrap().map.is_quasi_iso());
        assert!(gamma_stage(&s, &FunctorSpec::Underlying, 1, x, k).unwrap().map.is_quasi_iso());
    }
}

#[test]
fn nu_is_natural_and_compatible_with_gamma() {
    let mut g = tiny_gen(6);
    for spec in [FunctorSpec::tensor(2), FunctorSpec::Underlying, FunctorSpec::sym(2)] {
        for n in 1..=2 {
            let ctx = g.context(true);
            let s = Session::new(&ctx);
            let xo = g.object(&ctx);
            let h = g.morphism_from(&xo);
            let a = s.register(&h).unwrap();
            let (x, y) = (s.src(a), s.tgt(a));
            let (nx, ny) = (nu_map(&s, &spec, n, x).unwrap(), nu_map(&s, &spec, n, y).unwrap());
            let (p1, p0) = (FunctorSpec::perp(n + 1, spec.clone()), FunctorSpec::perp(n, spec.clone()));
            let (m1, m0) = (map(&s, &p1, a).unwrap(), map(&s, &p0, a).unwrap());
            assert_eq!(nx.then(&m0), m1.then(&ny), "{} n={n}", spec.repr());
            for k in 0..=1 {
                let q = q_map(&s, &spec, n, x, k).unwrap();
                let gn = gamma_stage(&s, &spec, n, x, k).unwrap().map;
                let gm = gamma_stage(&s, &spec, n - 1, x, k).unwrap().map;
                assert_eq!(gn.then(&q), gm, "{} n={n} k={k}", spec.repr());
            }
        }
    }
}

#[test]
fn pn_tower_stabilizes_for_excisive() {
    let mut g = tiny_gen(7);
    let ctx = g.context(true);
    let s = Session::new(&ctx);
    let x = s.leaf(&g.object(&ctx));
    let t = pn_stage(&s, &FunctorSpec::tensor(2), 2, x, 3, WINDOW).unwrap();
    assert_eq!(t.stable_at, Some(1));
    let t = pn_stage(&s, &FunctorSpec::Underlying, 1, x, 3, WINDOW).unwrap();
    assert_eq!(t.stable_at, Some(1));
}

#[test]
fn f_con_examples() {
    assert_eq!(f_con(&[Conn::Infinite, Conn::Infinite]), Conn::Infinite);
    assert_eq!(f_con(&[Conn::Finite(-1)]), Conn::Finite(0));
    assert_eq!(f_con(&[Conn::Finite(3), Conn::Finite(2)]), Conn::Finite(3));
    assert_eq!(f_con(&[Conn::Finite(3), Conn::Finite(0)]), Conn::Finite(1));
}

#[test]
fn stage_bound_examples() {
    assert_eq!(stage_bound(&[]), Conn::Infinite);
    assert_eq!(stage_bound(&[Conn::Finite(-3), Conn::Finite(-3)]), Conn::Finite(-3));
    assert_eq!(stage_bound(&[Conn::Finite(3), Conn::Finite(0)]), Conn::Finite(1));
    assert_eq!(stage_bound(&[Conn::Infinite, Conn::Finite(2)]), Conn::Finite(3));
}

#[test]
fn posthomology_towers_differ_away_from_a() {
    let f = PrimeField::default();
    let ctx = Context::pointed(f);
    let s = Session::new(&ctx);
    let x = Arc::new(ChainComplex::concentrated(f, 1, 1));
    let incl = ChainMap::zero(ctx.a().clone(), x.clone());
    let proj = ChainMap::zero(x, ctx.b().clone());
    let xo = CfObject::from_maps(&ctx, incl, proj).unwrap();
    let x = s.leaf(&xo);
    let spec = FunctorSpec::parse("h1").unwrap();
    let p = pn_stage(&s, &spec, 1, x, 4, WINDOW).unwrap();
    let g = gamma_tower(&s, &spec, 1, x, 3, WINDOW).unwrap();
    assert!(p.stabilized() && g.stabilized());
    assert!(p.stable_homology().is_zero());
    assert_eq!(g.stable_homology(), Graded::from_pairs(&[(0, 1)]));
    let p = pn_stage(&s, &spec, 1, s.initial(), 4, WINDOW).unwrap();
    let g = gamma_tower(&s, &spec, 1, s.initial(), 3, WINDOW).unwrap();
    assert_eq!(p.stable_homology(), g.stable_homology());
}

#[test]
fn perp_to_tn_is_zero_at_a() {
    let f = PrimeField::default();
    let ctx = Context::unit_target(f);
    let s = Session::new(&ctx);
    for spec in ["const", "underlying", "tensor2", "tensor3", "sym2", "h0"] {
        let spec = FunctorSpec::parse(spec).unwrap();
        for n in 1..=2 {
            assert!(perp_tn_ranks(&s, &spec, n).unwrap().is_zero(), "{} n={n}", spec.repr());
        }
    }
}

#[test]
fn beta_tower_agrees_for_tensor2() {
    let mut g = tiny_gen(8);
    for _ in 0..3 {
        let ctx = g.context(true);
        let s = Session::new(&ctx).with_cap(500_000);
        let beta = g.object(&ctx);
        for row in beta_tower(&s, &FunctorSpec::tensor(2), &beta, 1, 2).unwrap() {
            assert!(row.agrees, "k={}: {} vs {}", row.k, row.skeleton, row.fiber);
        }
    }
}

#[test]
fn convergence_bound_holds() {
    let mut g = tiny_gen(9);
    for spec in [FunctorSpec::tensor(2), FunctorSpec::sym(2), FunctorSpec::Underlying] {
        let ctx = g.context(true);
        let s = Session::new(&ctx);
        let x = s.leaf(&g.object(&ctx));
        let prof = convergence_profile(&s, &spec, 2, 2, x).unwrap();
        assert!(prof.bound_holds(), "{}: {:?}", spec.repr(), prof.checks);
    }
}

#[test]
fn f_con_overstates_non_connective_terms() {
    let f = PrimeField::default();
    let ctx = Context::unit_target(f);
    let s = Session::new(&ctx);
    let prof = convergence_profile(&s, &FunctorSpec::tensor(2), 1, 2, s.initial()).unwrap();
    let c = &prof.checks[0];
    assert_eq!(c.f_con, Conn::Finite(0));
    assert!(c.measured < c.f_con);
    assert!(prof.bound_holds());
}

#[test]
fn towers_agree_for_quadratic_at_n2() {
    let f = PrimeField::default();
    let mut g = tiny_gen(10);
    for ctx in [Context::unit_target(f), g.context(true)] {
        let s = Session::new(&ctx);
        for spec in [FunctorSpec::tensor(2), FunctorSpec::parse("linear_plus_tensor2").unwrap()] {
            let p = pn_stage(&s, &spec, 2, s.initial(), 3, WINDOW).unwrap();
            let gm = gamma_tower(&s, &spec, 2, s.initial(), 3, WINDOW).unwrap();
            assert_eq!(p.stable_at, Some(1), "{}", spec.repr());
            assert_eq!(gm.stable_at, Some(1), "{}", spec.repr());
            assert_eq!(p.stable_homology(), gm.stable_homology());
        }
    }
}
