use std::sync::Arc;

use proptest::prelude::*;

use cfcalc::chain::{cone, hofib, induced_homology_map, ChainComplex};
use cfcalc::crosseff::{cross_effect, excision_cube};
use cfcalc::functor::FunctorSpec;
use cfcalc::random::Gen;
use cfcalc::session::Session;
use cfcalc::tower::{f_con, stage_bound};
use cfcalc::{Conn, Graded, PrimeField, Rationals};

fn gen(seed: u64) -> Gen<PrimeField> {
    Gen::new(PrimeField::default(), seed)
}

fn small(seed: u64) -> Gen<PrimeField> {
    let mut g = gen(seed);
    g.max_dim = 1;
    g.lo = 0;
    g.hi = 1;
    g
}

fn d_squared_zero(c: &ChainComplex<PrimeField>) -> bool {
    (c.lo()..=c.hi()).all(|n| c.d(n - 1).mul(&c.d(n)).is_zero())
}

fn kunneth(a: &Graded, b: &Graded) -> Graded {
    let mut out = Graded::default();
    for (i, x) in &a.0 {
        for (j, y) in &b.0 {
            *out.0.entry(i + j).or_insert(0) += x * y;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differentials_square_to_zero(seed in any::<u64>()) {
        let mut g = gen(seed);
        let (x, y) = (Arc::new(g.complex()), Arc::new(g.complex()));
        let f = g.chain_map(&x, &y);
        prop_assert!(d_squared_zero(&x));
        prop_assert!(d_squared_zero(&hofib(&f)));
        prop_assert!(d_squared_zero(&cone(&f)));
        prop_assert!(d_squared_zero(&ChainComplex::tensor(&x, &y)));
    }

    #[test]
    fn hofib_long_exact_sequence(seed in any::<u64>()) {
        let mut g = gen(seed);
        let (x, y) = (Arc::new(g.complex()), Arc::new(g.complex()));
        let f = g.chain_map(&x, &y);
        let (hx, hy, hf) = (x.homology(), y.homology(), hofib(&f).homology());
        let lo = x.lo().min(y.lo()) - 2;
        let hi = x.hi().max(y.hi()) + 2;
        let rank = |n: i64| induced_homology_map(&f, n).rank();
        for n in lo..=hi {
            prop_assert_eq!(hf.get(n), hy.get(n + 1) - rank(n + 1) + hx.get(n) - rank(n), "degree {}", n);
        }
        prop_assert_eq!(hf.euler(), hx.euler() - hy.euler());
        prop_assert_eq!(cone(&f).homology(), hf.shifted(1));
    }

    #[test]
    fn kunneth_dims(seed in any::<u64>()) {
        let mut g = gen(seed);
        let (x, y) = (g.complex(), g.complex());
        prop_assert_eq!(ChainComplex::tensor(&x, &y).homology(), kunneth(&x.homology(), &y.homology()));
    }

    #[test]
    fn rank_nullity(seed in any::<u64>(), rows in 0usize..7, cols in 0usize..7) {
        let mut g = gen(seed);
        let m = g.matrix(rows, cols);
        let k = m.kernel_basis();
        prop_assert!(m.mul(&k).is_zero());
        prop_assert_eq!(k.rank(), k.cols());
        prop_assert_eq!(m.rank() + k.cols(), cols);
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn acyclic_generator_is_acyclic(seed in any::<u64>()) {
        prop_assert!(gen(seed).acyclic().is_acyclic());
    }

    #[test]
    fn cube_models_agree(seed in any::<u64>(), n in 1usize..=3) {
        let mut g = small(seed);
        let c = g.cube(n);
        prop_assert!(c.commutes());
        prop_assert_eq!(c.tfiber().complex.homology(), c.holim_fiber().homology());
        prop_assert_eq!(c.is_cartesian(), c.is_cocartesian());
        prop_assert!(g.degenerate_cube(n).is_cartesian());
    }

    #[test]
    fn tfiber_is_shifted_tcofiber(seed in any::<u64>(), n in 1usize..=3) {
        let c = small(seed).cube(n);
        prop_assert_eq!(c.tcofiber().complex.homology(), c.tfiber().complex.homology().shifted(n as i64));
    }

    #[test]
    fn cross_effect_with_b_slot_is_acyclic(seed in any::<u64>(), slot in 0usize..3) {
        let mut g = small(seed);
        let ctx = g.context(true);
        let s = Session::new(&ctx);
        let mut xs: Vec<_> = (0..3).map(|_| s.leaf(&g.object(&ctx))).collect();
        xs[slot] = s.terminal();
        for spec in [FunctorSpec::Underlying, FunctorSpec::tensor(2), FunctorSpec::sym(2)] {
            prop_assert!(cross_effect(&s, &spec, &xs).unwrap().complex.is_acyclic(), "{}", spec.repr());
        }
    }

    #[test]
    fn quadratic_functors_are_two_excisive(seed in any::<u64>()) {
        let mut g = small(seed);
        let ctx = g.context(true);
        let s = Session::new(&ctx);
        let xs: Vec<_> = (0..3).map(|_| s.leaf(&g.object(&ctx))).collect();
        for spec in [FunctorSpec::Underlying, FunctorSpec::tensor(2)] {
            prop_assert!(cross_effect(&s, &spec, &xs).unwrap().complex.is_acyclic());
            prop_assert!(excision_cube(&s, &spec, &xs).unwrap().is_cartesian());
        }
    }

    #[test]
    fn graded_shift_and_connectivity(pairs in prop::collection::vec((-5i64..5, 0usize..4), 0..6), k in -3i64..3) {
        let g = Graded(pairs.into_iter().filter(|p| p.1 > 0).collect());
        prop_assert_eq!(g.shifted(k).shifted(-k), g.clone());
        prop_assert_eq!(g.shifted(k).connectivity(), g.connectivity().plus(k));
        prop_assert_eq!(g.shifted(2).euler(), g.euler());
    }

    #[test]
    fn stage_bound_is_below_any_positive_f_con(conn in prop::collection::vec(-4i64..4, 1..4)) {
        let conn: Vec<Conn> = conn.into_iter().map(Conn::Finite).collect();
        let b = stage_bound(&conn);
        if b >= Conn::Finite(0) {
            prop_assert!(f_con(&conn) >= b);
        }
    }
}

#[test]
fn rationals_and_prime_field_agree_on_unimodular_data() {
    let p = PrimeField::default();
    let q = Rationals;
    let build = |rows: &[&[i64]]| {
        (
            cfcalc::matrix::Matrix::from_i64_rows(p, rows).rank(),
            cfcalc::matrix::Matrix::from_i64_rows(q, rows).rank(),
        )
    };
    let (a, b) = build(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
    assert_eq!((a, b), (2, 2));
    let (a, b) = build(&[&[1, 0], &[0, 1]]);
    assert_eq!((a, b), (2, 2));
}
