//! JSON forms of matrices, complexes, maps, objects and cubes.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::cfcat::{CfObject, Context};
use crate::chain::{ChainComplex, ChainMap};
use crate::cube::Cube;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

fn entry<F: Field>(f: F, e: &F::Elem) -> Value {
    match f.to_json(e) {
        Value::Number(n) => Value::String(n.to_string()),
        v => v,
    }
}

/// Row-major entries as strings.
pub fn matrix_to_json<F: Field>(m: &Matrix<F>) -> Value {
    let f = m.field();
    Value::Array(m.to_dense().iter().map(|e| entry(f, e)).collect())
}

pub fn matrix_from_json<F: Field>(f: F, rows: usize, cols: usize, v: &Value) -> Result<Matrix<F>> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array".into()))?;
    let flat: Vec<&Value> = if arr.iter().all(|r| r.is_array()) && !arr.is_empty() && rows > 0 {
        arr.iter().flat_map(|r| r.as_array().unwrap().iter()).collect()
    } else {
        arr.iter().collect()
    };
    if flat.len() != rows * cols {
        return Err(Error::Parse(format!("expected {rows}×{cols} entries, found {}", flat.len())));
    }
    let entries: Vec<F::Elem> = flat.iter().map(|e| f.from_json(e)).collect::<Result<_>>()?;
    Ok(Matrix::from_dense(f, rows, cols, &entries))
}

pub fn complex_to_json<F: Field>(c: &ChainComplex<F>) -> Value {
    if c.is_zero() {
        return json!({"lo": 0, "hi": -1, "dims": [], "d": []});
    }
    let d: Vec<Value> = (c.lo()..=c.hi()).map(|n| matrix_to_json(&c.d(n))).collect();
    json!({"lo": c.lo(), "hi": c.hi(), "dims": c.dims(), "d": d})
}

fn int(v: &Value, key: &str) -> Result<i64> {
    v.get(key).and_then(Value::as_i64).ok_or_else(|| Error::Parse(format!("missing integer field {key:?}")))
}

pub fn complex_from_json<F: Field>(f: F, v: &Value) -> Result<ChainComplex<F>> {
    let lo = int(v, "lo")?;
    let dims: Vec<usize> = v
        .get("dims")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing field \"dims\"".into()))?
        .iter()
        .map(|d| d.as_u64().map(|d| d as usize).ok_or_else(|| Error::Parse("dims must be non-negative integers".into())))
        .collect::<Result<_>>()?;
    if let Ok(hi) = int(v, "hi") {
        if hi - lo + 1 != dims.len() as i64 {
            return Err(Error::Parse("hi − lo + 1 must equal the number of dims".into()));
        }
    }
    let ds = v.get("d").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing field \"d\"".into()))?;
    if ds.len() != dims.len() {
        return Err(Error::Parse("one differential per degree expected".into()));
    }
    let diffs: Vec<Matrix<F>> = dims
        .iter()
        .enumerate()
        .map(|(i, &dn)| {
            let below = if i == 0 { 0 } else { dims[i - 1] };
            matrix_from_json(f, below, dn, &ds[i])
        })
        .collect::<Result<_>>()?;
    for i in 1..diffs.len() {
        if !diffs[i - 1].mul(&diffs[i]).is_zero() {
            return Err(Error::Invalid(format!("d∘d ≠ 0 at degree {}", lo + i as i64)));
        }
    }
    Ok(ChainComplex::new(f, lo, dims, diffs))
}

/// Components over the source support, lowest degree first.
pub fn map_to_json<F: Field>(m: &ChainMap<F>) -> Value {
    let s = m.source();
    if s.is_zero() {
        return Value::Array(vec![]);
    }
    Value::Array((s.lo()..=s.hi()).map(|n| matrix_to_json(&m.component(n))).collect())
}

pub fn map_from_json<F: Field>(
    source: &Arc<ChainComplex<F>>,
    target: &Arc<ChainComplex<F>>,
    v: &Value,
) -> Result<ChainMap<F>> {
    let f = source.field();
    let arr = v.as_array().ok_or_else(|| Error::Parse("map must be an array of matrices".into()))?;
    let expected = if source.is_zero() { 0 } else { (source.hi() - source.lo() + 1) as usize };
    if arr.len() != expected {
        return Err(Error::Parse(format!("expected {expected} components, found {}", arr.len())));
    }
    let comps: Vec<Matrix<F>> = arr
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let n = source.lo() + i as i64;
            matrix_from_json(f, target.dim(n), source.dim(n), m)
        })
        .collect::<Result<_>>()?;
    let m = ChainMap::new_unchecked(source.clone(), target.clone(), |n| comps[(n - source.lo()) as usize].clone());
    if let Some(n) = m.commutation_defect() {
        return Err(Error::Invalid(format!("map does not commute with d at degree {n}")));
    }
    Ok(m)
}

pub fn context_to_json<F: Field>(ctx: &Context<F>) -> Value {
    json!({"A": complex_to_json(ctx.a()), "B": complex_to_json(ctx.b()), "f": map_to_json(ctx.f())})
}

pub fn context_from_json<F: Field>(field: F, v: &Value) -> Result<Arc<Context<F>>> {
    let get = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("context is missing {k:?}")));
    let a = Arc::new(complex_from_json(field, get("A")?)?);
    let b = Arc::new(complex_from_json(field, get("B")?)?);
    let f = map_from_json(&a, &b, get("f")?)?;
    Ok(Context::new(f))
}

pub fn object_to_json<F: Field>(x: &CfObject<F>) -> Value {
    json!({"X": complex_to_json(x.x()), "incl": map_to_json(x.incl()), "proj": map_to_json(x.proj())})
}

pub fn object_from_json<F: Field>(ctx: &Arc<Context<F>>, v: &Value) -> Result<Arc<CfObject<F>>> {
    let get = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("object is missing {k:?}")));
    let x = Arc::new(complex_from_json(ctx.field(), get("X")?)?);
    let incl = map_from_json(ctx.a(), &x, get("incl")?)?;
    let proj = map_from_json(&x, ctx.b(), get("proj")?)?;
    CfObject::from_maps(ctx, incl, proj)
}

pub fn cube_to_json<F: Field>(c: &Cube<F>) -> Value {
    let mut verts = Map::new();
    let mut edges = Map::new();
    for m in 0..1usize << c.n() {
        verts.insert(m.to_string(), complex_to_json(c.vertex(m)));
        for i in 0..c.n() {
            if m >> i & 1 == 0 {
                edges.insert(format!("{}->{}", m, m | 1 << i), map_to_json(c.edge(m, i)));
            }
        }
    }
    json!({"n": c.n(), "vertices": verts, "edges": edges})
}

pub fn cube_from_json<F: Field>(f: F, v: &Value) -> Result<Cube<F>> {
    let n = int(v, "n")? as usize;
    let verts = v.get("vertices").and_then(Value::as_object).ok_or_else(|| Error::Parse("missing vertices".into()))?;
    let edges = v.get("edges").and_then(Value::as_object).ok_or_else(|| Error::Parse("missing edges".into()))?;
    let vs: Vec<Arc<ChainComplex<F>>> = (0..1usize << n)
        .map(|m| {
            let c = verts.get(&m.to_string()).ok_or_else(|| Error::Parse(format!("missing vertex {m}")))?;
            Ok(Arc::new(complex_from_json(f, c)?))
        })
        .collect::<Result<_>>()?;
    let mut es = vec![vec![None; n]; 1 << n];
    for (m, row) in es.iter_mut().enumerate() {
        for (i, e) in row.iter_mut().enumerate() {
            if m >> i & 1 == 0 {
                let key = format!("{}->{}", m, m | 1 << i);
                let j = edges.get(&key).ok_or_else(|| Error::Parse(format!("missing edge {key}")))?;
                *e = Some(Arc::new(map_from_json(&vs[m], &vs[m | 1 << i], j)?));
            }
        }
    }
    let c = Cube::new(n, vs, |m, i| es[m][i].take().unwrap());
    if !c.commutes() {
        return Err(Error::Invalid("cube faces do not commute".into()));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::random::Gen;

    #[test]
    fn roundtrips() {
        let f = PrimeField::default();
        let mut g = Gen::new(f, 4);
        let ctx = g.context(true);
        let x = g.object(&ctx);
        let v = context_to_json(&ctx);
        let ctx2 = context_from_json(f, &v).unwrap();
        assert_eq!(ctx2.f(), ctx.f());
        let y = object_from_json(&ctx2, &object_to_json(&x)).unwrap();
        assert_eq!(**y.x(), **x.x());
        let c = g.cube(2);
        let c2 = cube_from_json(f, &cube_to_json(&c)).unwrap();
        assert_eq!(*c2.tfiber().complex, *c.tfiber().complex);
    }

    #[test]
    fn rational_entries_are_strings() {
        let q = Rationals;
        let m = Matrix::from_i64_rows(q, &[&[1, -2]]).scale(&q.inv(&q.from_i64(3)));
        assert_eq!(matrix_to_json(&m), json!(["1/3", "-2/3"]));
        let p = PrimeField::default();
        assert_eq!(matrix_to_json(&Matrix::from_i64_rows(p, &[&[-1]])), json!(["32002"]));
    }
}
