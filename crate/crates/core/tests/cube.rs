use std::sync::Arc;

use cfcalc::chain::{ChainComplex, ChainMap};
use cfcalc::cube::Cube;
use cfcalc::{Graded, Matrix, PrimeField};

type C = Arc<ChainComplex<PrimeField>>;

fn k(n: usize) -> C {
    Arc::new(ChainComplex::concentrated(PrimeField::default(), 0, n))
}

fn zero() -> C {
    Arc::new(ChainComplex::zero(PrimeField::default()))
}

fn map(src: &C, tgt: &C, rows: &[&[i64]]) -> Arc<ChainMap<PrimeField>> {
    let f = PrimeField::default();
    let m = if rows.is_empty() { Matrix::zeros(f, tgt.dim(0), src.dim(0)) } else { Matrix::from_i64_rows(f, rows) };
    Arc::new(ChainMap::new(src.clone(), tgt.clone(), |_| m.clone()))
}

#[test]
fn arrow_fibers() {
    let (z, one) = (zero(), k(1));
    let c = Cube::arrow(&map(&z, &one, &[]));
    assert_eq!(c.tfiber().complex.homology(), Graded::from_pairs(&[(-1, 1)]));
    assert_eq!(c.tcofiber().complex.homology(), Graded::from_pairs(&[(0, 1)]));
    assert!(Cube::arrow(&ChainMap::identity(one)).is_cartesian());
}

#[test]
fn sum_square_total_fiber() {
    // both edges out of k are the first inclusion, both edges into k are the sum
    let (a, b, s) = (k(1), k(2), k(1));
    let verts = vec![a.clone(), b.clone(), b.clone(), s.clone()];
    let c = Cube::new(2, verts, |m, i| match (m, i) {
        (0, 0) => map(&a, &b, &[&[1], &[0]]),
        (0, 1) => map(&a, &b, &[&[1], &[0]]),
        (1, 1) | (2, 0) => map(&b, &s, &[&[1, 1]]),
        _ => unreachable!(),
    });
    assert!(c.commutes());
    assert_eq!(c.tfiber().complex.homology(), Graded::from_pairs(&[(-1, 2)]));
    assert!(!c.is_cartesian());
    assert_eq!(c.tfiber().complex.homology(), c.holim_fiber().homology());
}

#[test]
fn pushout_square_of_points_is_cartesian() {
    // 0 → k, 0 → k, k → k⊕k: the coproduct square
    let (z, one, two) = (zero(), k(1), k(2));
    let verts = vec![z.clone(), one.clone(), one.clone(), two.clone()];
    let c = Cube::new(2, verts, |m, i| match (m, i) {
        (0, _) => map(&z, &one, &[]),
        (1, 1) => map(&one, &two, &[&[1], &[0]]),
        (2, 0) => map(&one, &two, &[&[0], &[1]]),
        _ => unreachable!(),
    });
    assert!(c.commutes());
    assert!(c.is_cocartesian());
    assert!(c.is_cartesian());
    assert!(c.is_strongly_cocartesian());
}

#[test]
fn faces_of_a_product_cube() {
    let (z, one) = (zero(), k(1));
    let verts = vec![one.clone(), z.clone(), one.clone(), z.clone()];
    let c = Cube::new(2, verts, |m, i| match (m, i) {
        (0, 0) => map(&one, &z, &[]),
        (0, 1) => Arc::new(ChainMap::identity(one.clone())),
        (1, 1) => Arc::new(ChainMap::identity(z.clone())),
        (2, 0) => map(&one, &z, &[]),
        _ => unreachable!(),
    });
    assert!(c.is_cartesian());
    assert!(!c.face(0, &[0]).is_cartesian());
    assert!(c.face(0, &[1]).is_cartesian());
}
