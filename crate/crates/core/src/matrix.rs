//! Sparse row-major matrices over a [`Field`] with exact elimination.

use crate::error::{Error, Result};
use crate::field::Field;

pub type SparseVec<E> = Vec<(u32, E)>;

/// Rows are kept sorted by column with no stored zeros, so structural
/// equality is matrix equality.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<SparseVec<F::Elem>>,
}

/// Accumulates scaled blocks into a fixed-size matrix.
pub struct Builder<F: Field> {
    field: F,
    cols: usize,
    data: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> Builder<F> {
    pub fn new(field: F, rows: usize, cols: usize) -> Self {
        Builder { field, cols, data: vec![Vec::new(); rows] }
    }

    pub fn push(&mut self, i: usize, j: usize, v: F::Elem) {
        debug_assert!(j < self.cols);
        if !self.field.is_zero(&v) {
            self.data[i].push((j as u32, v));
        }
    }

    pub fn block(&mut self, r0: usize, c0: usize, m: &Matrix<F>) {
        debug_assert!(r0 + m.rows <= self.data.len() && c0 + m.cols <= self.cols);
        for (i, row) in m.data.iter().enumerate() {
            let dst = &mut self.data[r0 + i];
            dst.extend(row.iter().map(|(j, v)| (*j + c0 as u32, v.clone())));
        }
    }

    pub fn block_scaled(&mut self, r0: usize, c0: usize, m: &Matrix<F>, s: &F::Elem) {
        if self.field.is_one(s) {
            return self.block(r0, c0, m);
        }
        if self.field.is_zero(s) {
            return;
        }
        for (i, row) in m.data.iter().enumerate() {
            let dst = &mut self.data[r0 + i];
            dst.extend(row.iter().map(|(j, v)| (*j + c0 as u32, self.field.mul(v, s))));
        }
    }

    pub fn build(self) -> Matrix<F> {
        let f = self.field;
        let cols = self.cols;
        let data: Vec<SparseVec<F::Elem>> = self
            .data
            .into_iter()
            .map(|mut row| {
                if row.windows(2).all(|w| w[0].0 < w[1].0) {
                    return row;
                }
                row.sort_by_key(|e| e.0);
                let mut out: SparseVec<F::Elem> = Vec::with_capacity(row.len());
                for (j, v) in row {
                    match out.last_mut() {
                        Some(last) if last.0 == j => last.1 = f.add(&last.1, &v),
                        _ => out.push((j, v)),
                    }
                }
                out.retain(|(_, v)| !f.is_zero(v));
                out
            })
            .collect();
        let rows = data.len();
        Matrix { field: f, rows, cols, data }
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: F, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i as u32, field.one())]).collect();
        Matrix { field, rows: n, cols: n, data }
    }

    pub fn scalar(field: F, n: usize, s: F::Elem) -> Self {
        if field.is_zero(&s) {
            return Self::zeros(field, n, n);
        }
        let data = (0..n).map(|i| vec![(i as u32, s.clone())]).collect();
        Matrix { field, rows: n, cols: n, data }
    }

    /// Rows must be sorted and zero-free.
    pub fn from_sparse_rows(field: F, cols: usize, data: Vec<SparseVec<F::Elem>>) -> Self {
        debug_assert!(data.iter().all(|r| r.windows(2).all(|w| w[0].0 < w[1].0)
            && r.iter().all(|(j, v)| (*j as usize) < cols && !field.is_zero(v))));
        Matrix { field, rows: data.len(), cols, data }
    }

    pub fn from_dense(field: F, rows: usize, cols: usize, entries: &[F::Elem]) -> Self {
        assert_eq!(entries.len(), rows * cols, "dense entry count");
        let data = (0..rows)
            .map(|i| {
                (0..cols)
                    .filter_map(|j| {
                        let v = &entries[i * cols + j];
                        (!field.is_zero(v)).then(|| (j as u32, v.clone()))
                    })
                    .collect()
            })
            .collect();
        Matrix { field, rows, cols, data }
    }

    pub fn from_i64_rows(field: F, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let entries: Vec<F::Elem> =
            rows.iter().flat_map(|r| r.iter().map(|v| field.from_i64(*v))).collect();
        Self::from_dense(field, rows.len(), cols, &entries)
    }

    pub fn from_fn(field: F, rows: usize, cols: usize, f: impl Fn(usize, usize) -> F::Elem) -> Self {
        let mut b = Builder::new(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                b.push(i, j, f(i, j));
            }
        }
        b.build_sized(rows)
    }

    /// Columns given as sparse vectors of length `rows`.
    pub fn from_columns(field: F, rows: usize, columns: &[SparseVec<F::Elem>]) -> Self {
        let mut b = Builder::new(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, v) in c {
                b.push(*i as usize, j, v.clone());
            }
        }
        b.build_sized(rows)
    }

    pub fn field(&self) -> F {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    pub fn row(&self, i: usize) -> &[(u32, F::Elem)] {
        &self.data[i]
    }
    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn get(&self, i: usize, j: usize) -> F::Elem {
        match self.data[i].binary_search_by_key(&(j as u32), |e| e.0) {
            Ok(k) => self.data[i][k].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self
                .data
                .iter()
                .enumerate()
                .all(|(i, r)| r.len() == 1 && r[0].0 as usize == i && self.field.is_one(&r[0].1))
    }

    pub fn to_dense(&self) -> Vec<F::Elem> {
        let mut out = vec![self.field.zero(); self.rows * self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                out[i * self.cols + *j as usize] = v.clone();
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> SparseVec<F::Elem> {
        (0..self.rows)
            .filter_map(|i| {
                let v = self.get(i, j);
                (!self.field.is_zero(&v)).then_some((i as u32, v))
            })
            .collect()
    }

    pub fn columns(&self) -> Vec<SparseVec<F::Elem>> {
        self.transpose().data
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<SparseVec<F::Elem>> = vec![Vec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                data[*j as usize].push((i as u32, v.clone()));
            }
        }
        Matrix { field: self.field, rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape {:?}·{:?}", self.shape(), other.shape());
        let f = self.field;
        let n = other.cols;
        let mut acc: Vec<F::Elem> = vec![f.zero(); n];
        let mut touched: Vec<bool> = vec![false; n];
        let mut idx: Vec<u32> = Vec::new();
        let mut data = Vec::with_capacity(self.rows);
        for r in &self.data {
            if r.len() == 1 && f.is_one(&r[0].1) {
                data.push(other.data[r[0].0 as usize].clone());
                continue;
            }
            for (k, a) in r {
                for (j, b) in &other.data[*k as usize] {
                    let ju = *j as usize;
                    if !touched[ju] {
                        touched[ju] = true;
                        idx.push(*j);
                        acc[ju] = f.mul(a, b);
                    } else {
                        acc[ju] = f.mul_add(&acc[ju], a, b);
                    }
                }
            }
            idx.sort_unstable();
            let mut row = Vec::with_capacity(idx.len());
            for &j in &idx {
                let ju = j as usize;
                touched[ju] = false;
                let v = std::mem::replace(&mut acc[ju], f.zero());
                if !f.is_zero(&v) {
                    row.push((j, v));
                }
            }
            idx.clear();
            data.push(row);
        }
        Matrix { field: f, rows: self.rows, cols: n, data }
    }

    pub fn mul_vec(&self, x: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(x.len(), self.cols);
        let f = self.field;
        self.data
            .iter()
            .map(|r| r.iter().fold(f.zero(), |s, (j, v)| f.mul_add(&s, v, &x[*j as usize])))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(&self.field.one(), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(&self.field.neg(&self.field.one()), other)
    }

    /// self + c·other
    pub fn axpy(&self, c: &F::Elem, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "matrix sum shape");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| sparse_axpy(self.field, a, c, b))
            .collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.neg(&self.field.one()))
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        let f = self.field;
        if f.is_zero(s) {
            return Self::zeros(f, self.rows, self.cols);
        }
        let data = self
            .data
            .iter()
            .map(|r| r.iter().map(|(j, v)| (*j, f.mul(v, s))).collect())
            .collect();
        Matrix { field: f, rows: self.rows, cols: self.cols, data }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let f = self.field;
        let (r2, c2) = other.shape();
        let mut data = Vec::with_capacity(self.rows * r2);
        for ra in &self.data {
            for rb in &other.data {
                let mut row = Vec::with_capacity(ra.len() * rb.len());
                for (ja, va) in ra {
                    for (jb, vb) in rb {
                        row.push((*ja * c2 as u32 + *jb, f.mul(va, vb)));
                    }
                }
                data.push(row);
            }
        }
        Matrix { field: f, rows: self.rows * r2, cols: self.cols * c2, data }
    }

    pub fn hstack(field: F, rows: usize, parts: &[&Self]) -> Self {
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut b = Builder::new(field, rows, cols);
        let mut c0 = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack rows");
            b.block(0, c0, m);
            c0 += m.cols;
        }
        b.build_sized(rows)
    }

    pub fn vstack(field: F, cols: usize, parts: &[&Self]) -> Self {
        let mut data = Vec::new();
        for m in parts {
            assert_eq!(m.cols, cols, "vstack cols");
            data.extend(m.data.iter().cloned());
        }
        Matrix { field, rows: data.len(), cols, data }
    }

    pub fn block_diag(field: F, parts: &[&Self]) -> Self {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut b = Builder::new(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for m in parts {
            b.block(r0, c0, m);
            r0 += m.rows;
            c0 += m.cols;
        }
        b.build_sized(rows)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let data = idx.iter().map(|&i| self.data[i].clone()).collect();
        Matrix { field: self.field, rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut pos = vec![u32::MAX; self.cols];
        for (k, &j) in idx.iter().enumerate() {
            pos[j] = k as u32;
        }
        let mut b = Builder::new(self.field, self.rows, idx.len());
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                let p = pos[*j as usize];
                if p != u32::MAX {
                    b.push(i, p as usize, v.clone());
                }
            }
        }
        b.build_sized(self.rows)
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        if self.rows > self.cols {
            return self.transpose().rank();
        }
        elimination_rank(self.field, self.cols, self.data.clone())
    }

    /// Columns form a basis of the kernel.
    pub fn kernel_basis(&self) -> Self {
        let f = self.field;
        let ech = Echelon::reduce(f, self.cols, self.data.clone(), self.cols, None);
        let mut is_pivot = vec![false; self.cols];
        for (c, _) in &ech.pivots {
            is_pivot[*c as usize] = true;
        }
        let mut cols: Vec<SparseVec<F::Elem>> = Vec::new();
        let free: Vec<usize> = (0..self.cols).filter(|&j| !is_pivot[j]).collect();
        let mut free_pos = vec![usize::MAX; self.cols];
        for (k, &j) in free.iter().enumerate() {
            free_pos[j] = k;
            cols.push(vec![(j as u32, f.one())]);
        }
        for (c, row) in &ech.pivots {
            for (j, v) in row.iter().skip(1) {
                let k = free_pos[*j as usize];
                cols[k].push((*c, f.neg(v)));
            }
        }
        for c in cols.iter_mut() {
            c.sort_by_key(|e| e.0);
        }
        Self::from_columns(f, self.cols, &cols)
    }

    /// Solves self · X = rhs. `None` if some column is inconsistent.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "solve shape");
        let f = self.field;
        let n = self.cols;
        let aug: Vec<SparseVec<F::Elem>> = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.extend(b.iter().map(|(j, v)| (*j + n as u32, v.clone())));
                r
            })
            .collect();
        let ech = Echelon::reduce(f, n + rhs.cols, aug, n, None);
        if !ech.leftover.is_empty() {
            return None;
        }
        let mut b = Builder::new(f, n, rhs.cols);
        for (c, row) in &ech.pivots {
            for (j, v) in row {
                if *j as usize >= n {
                    b.push(*c as usize, *j as usize - n, v.clone());
                }
            }
        }
        Some(b.build_sized(n))
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }
}

impl<F: Field> Builder<F> {
    pub fn build_sized(self, rows: usize) -> Matrix<F> {
        debug_assert_eq!(rows, self.data.len());
        self.build()
    }
}

/// a + c·b on sorted sparse vectors.
pub fn sparse_axpy<F: Field>(
    f: F,
    a: &[(u32, F::Elem)],
    c: &F::Elem,
    b: &[(u32, F::Elem)],
) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut k) = (0, 0);
    while i < a.len() || k < b.len() {
        if k == b.len() || (i < a.len() && a[i].0 < b[k].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[k].0 < a[i].0 {
            out.push((b[k].0, f.mul(c, &b[k].1)));
            k += 1;
        } else {
            let v = f.mul_add(&a[i].1, c, &b[k].1);
            if !f.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            k += 1;
        }
    }
    out
}

fn normalize_lead<F: Field>(f: F, row: &mut SparseVec<F::Elem>) {
    let inv = f.inv(&row[0].1);
    if !f.is_one(&inv) {
        for e in row.iter_mut() {
            e.1 = f.mul(&e.1, &inv);
        }
    }
}

fn elimination_rank<F: Field>(f: F, cols: usize, mut rows: Vec<SparseVec<F::Elem>>) -> usize {
    // Relabel columns by ascending occupancy so sparse columns lead.
    let mut count = vec![0u32; cols];
    for r in &rows {
        for (j, _) in r {
            count[*j as usize] += 1;
        }
    }
    let mut order: Vec<u32> = (0..cols as u32).collect();
    order.sort_by_key(|&j| count[j as usize]);
    let mut relabel = vec![0u32; cols];
    for (k, &j) in order.iter().enumerate() {
        relabel[j as usize] = k as u32;
    }
    for r in rows.iter_mut() {
        for e in r.iter_mut() {
            e.0 = relabel[e.0 as usize];
        }
        r.sort_unstable_by_key(|e| e.0);
    }
    rows.retain(|r| !r.is_empty());
    rows.sort_by_key(|r| r.len());

    let mut pivot: Vec<Option<SparseVec<F::Elem>>> = vec![None; cols];
    let mut rank = 0;
    for mut r in rows {
        loop {
            if r.is_empty() {
                break;
            }
            let lead = r[0].0 as usize;
            match &pivot[lead] {
                Some(p) => {
                    let c = f.neg(&r[0].1);
                    r = sparse_axpy(f, &r[1..], &c, &p[1..]);
                }
                None => {
                    normalize_lead(f, &mut r);
                    pivot[lead] = Some(r);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// Row echelon data: fully reduced pivot rows keyed by their leading column.
/// Only columns `< eligible` may become pivots; rows whose eligible part
/// vanishes but which keep other entries land in `leftover`.
pub struct Echelon<F: Field> {
    pub pivots: Vec<(u32, SparseVec<F::Elem>)>,
    pub leftover: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> Echelon<F> {
    /// `relabel` maps original columns to elimination order (pivots lead in
    /// that order); the output is expressed in original column labels.
    pub fn reduce(
        f: F,
        cols: usize,
        rows: Vec<SparseVec<F::Elem>>,
        eligible: usize,
        relabel: Option<&[u32]>,
    ) -> Self {
        let mut rows = rows;
        let mut inverse: Vec<u32> = Vec::new();
        if let Some(map) = relabel {
            inverse = vec![0u32; cols];
            for (j, &k) in map.iter().enumerate() {
                inverse[k as usize] = j as u32;
            }
            for r in rows.iter_mut() {
                for e in r.iter_mut() {
                    e.0 = map[e.0 as usize];
                }
                r.sort_unstable_by_key(|e| e.0);
            }
        }
        rows.retain(|r| !r.is_empty());
        rows.sort_by_key(|r| r.len());
        let mut slot: Vec<Option<usize>> = vec![None; cols];
        let mut piv: Vec<SparseVec<F::Elem>> = Vec::new();
        let mut leftover = Vec::new();
        for mut r in rows {
            loop {
                if r.is_empty() {
                    break;
                }
                let lead = r[0].0 as usize;
                if lead >= eligible {
                    leftover.push(r);
                    break;
                }
                match slot[lead] {
                    Some(p) => {
                        let c = f.neg(&r[0].1);
                        r = sparse_axpy(f, &r[1..], &c, &piv[p][1..]);
                    }
                    None => {
                        normalize_lead(f, &mut r);
                        slot[lead] = Some(piv.len());
                        piv.push(r);
                        break;
                    }
                }
            }
        }
        // Back substitution, highest pivot first.
        let mut order: Vec<usize> = (0..piv.len()).collect();
        order.sort_by_key(|&p| std::cmp::Reverse(piv[p][0].0));
        for &p in &order {
            let mut r = std::mem::take(&mut piv[p]);
            let mut k = 1;
            while k < r.len() {
                let c = r[k].0 as usize;
                if c < eligible {
                    if let Some(q) = slot[c] {
                        let s = f.neg(&r[k].1);
                        let head: Vec<_> = r[..k].to_vec();
                        let tail = sparse_axpy(f, &r[k + 1..], &s, &piv[q][1..]);
                        r = head;
                        r.extend(tail);
                        continue;
                    }
                }
                k += 1;
            }
            piv[p] = r;
        }
        let mut pivots: Vec<(u32, SparseVec<F::Elem>)> =
            piv.into_iter().map(|r| (r[0].0, r)).collect();
        if relabel.is_some() {
            for (c, r) in pivots.iter_mut() {
                *c = inverse[*c as usize];
                for e in r.iter_mut() {
                    e.0 = inverse[e.0 as usize];
                }
                let lead = r[0].clone();
                r.sort_unstable_by_key(|e| e.0);
                // keep the pivot entry first
                let pos = r.iter().position(|e| e.0 == lead.0).unwrap();
                let pe = r.remove(pos);
                r.insert(0, pe);
            }
            for r in leftover.iter_mut() {
                for e in r.iter_mut() {
                    e.0 = inverse[e.0 as usize];
                }
                r.sort_unstable_by_key(|e| e.0);
            }
        }
        pivots.sort_by_key(|p| p.0);
        Echelon { pivots, leftover }
    }
}

/// Quotient of a coordinate space by a span, onto a complement coordinate
/// subspace. `q · s = id`, `ker q = span`.
#[derive(Clone, Debug)]
pub struct Quotient<F: Field> {
    pub q: Matrix<F>,
    pub s: Matrix<F>,
    /// ambient coordinates kept, ascending
    pub kept: Vec<usize>,
}

/// Pivots are taken at the highest coordinates, so low coordinates are kept
/// whenever possible.
pub fn quotient_by_span<F: Field>(
    f: F,
    ambient: usize,
    vectors: &[SparseVec<F::Elem>],
    require_independent: bool,
) -> Result<Quotient<F>> {
    let map: Vec<u32> = (0..ambient as u32).rev().collect();
    let ech = Echelon::reduce(f, ambient, vectors.to_vec(), ambient, Some(&map));
    if require_independent && ech.pivots.len() != vectors.len() {
        return Err(Error::DependentColumns);
    }
    let mut is_pivot = vec![false; ambient];
    for (c, _) in &ech.pivots {
        is_pivot[*c as usize] = true;
    }
    let kept: Vec<usize> = (0..ambient).filter(|&j| !is_pivot[j]).collect();
    let mut pos = vec![usize::MAX; ambient];
    for (k, &j) in kept.iter().enumerate() {
        pos[j] = k;
    }
    let r = kept.len();
    let mut qb = Builder::new(f, r, ambient);
    for &j in &kept {
        qb.push(pos[j], j, f.one());
    }
    for (c, row) in &ech.pivots {
        for (j, v) in row.iter().skip(1) {
            qb.push(pos[*j as usize], *c as usize, f.neg(v));
        }
    }
    let mut sb = Builder::new(f, ambient, r);
    for &j in &kept {
        sb.push(j, pos[j], f.one());
    }
    Ok(Quotient { q: qb.build_sized(r), s: sb.build_sized(ambient), kept })
}

/// Surjection killing the span of the (independent) columns of `basis`.
pub fn quotient_map<F: Field>(basis: &Matrix<F>, ambient: usize) -> Result<Matrix<F>> {
    assert_eq!(basis.rows(), ambient, "basis lives in the ambient space");
    let cols = basis.columns();
    Ok(quotient_by_span(basis.field(), ambient, &cols, true)?.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn rank_small() {
        let q = Rationals;
        assert_eq!(Matrix::from_i64_rows(q, &[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(Matrix::<Rationals>::identity(q, 2).rank(), 2);
        assert_eq!(Matrix::zeros(q, 3, 4).rank(), 0);
    }

    #[test]
    fn kernel_of_row() {
        let f = PrimeField::default();
        let k = Matrix::from_i64_rows(f, &[&[1, 1]]).kernel_basis();
        assert_eq!(k.shape(), (2, 1));
        assert_eq!(f.add(&k.get(0, 0), &k.get(1, 0)), 0);
        assert_ne!(k.get(0, 0), 0);
    }

    #[test]
    fn quotient_kills_span() {
        let f = PrimeField::default();
        let b = Matrix::from_i64_rows(f, &[&[1], &[1]]);
        let q = quotient_map(&b, 2).unwrap();
        assert_eq!(q.shape(), (1, 2));
        assert!(q.mul(&b).is_zero());
        assert_eq!(q.rank(), 1);
        let dep = Matrix::from_i64_rows(f, &[&[1, 2], &[1, 2]]);
        assert_eq!(quotient_map(&dep, 2), Err(Error::DependentColumns));
    }

    #[test]
    fn solve_roundtrip() {
        let f = PrimeField::default();
        let a = Matrix::from_i64_rows(f, &[&[1, 2, 0], &[0, 1, 1]]);
        let x = Matrix::from_i64_rows(f, &[&[3], &[1], &[2]]);
        let b = a.mul(&x);
        let y = a.solve(&b).unwrap();
        assert_eq!(a.mul(&y), b);
        let bad = Matrix::from_i64_rows(f, &[&[1, 0], &[2, 0]]);
        let rhs = Matrix::from_i64_rows(f, &[&[1], &[1]]);
        assert!(bad.solve(&rhs).is_none());
    }
}
