//! Exact linear algebra: dense matrices backed by sparse row elimination.

use std::collections::BTreeMap;
use std::fmt;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Sparse row with strictly increasing column indices and no zero entries.
pub type SparseRow = Vec<(usize, Scalar)>;

/// `a + k·b` for sparse rows.
fn axpy(a: &[(usize, Scalar)], k: &Scalar, b: &[(usize, Scalar)]) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cb = b.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            out.push((cb, k.mul(&b[j].1)));
            j += 1;
        } else {
            let v = a[i].1.add(&k.mul(&b[j].1));
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn entry(row: &[(usize, Scalar)], col: usize) -> Option<&Scalar> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|k| &row[k].1)
}

/// Row echelon form built one row at a time. Pivot rows are normalized so
/// that their leading entry is one.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Echelon {
        Echelon { ncols, pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the current pivots; returns the remainder.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let mut start = 0;
        while start < row.len() {
            let (c, v) = (row[start].0, row[start].1.clone());
            match self.pivots.get(&c) {
                Some(p) => {
                    let tail = axpy(&row[start..], &v.neg(), p);
                    row.truncate(start);
                    row.extend(tail);
                }
                None => start += 1,
            }
        }
        row
    }

    /// Adds a row; returns whether it was independent of the previous ones.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        debug_assert!(row.iter().all(|(c, v)| *c < self.ncols && !v.is_zero()));
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
        let mut row = self.reduce_leading(row);
        if row.is_empty() {
            return false;
        }
        let inv = row[0].1.inv().expect("nonzero pivot");
        for e in row.iter_mut() {
            e.1 = e.1.mul(&inv);
        }
        self.pivots.insert(row[0].0, row);
        true
    }

    /// Only clears entries until the leading column is not a pivot.
    fn reduce_leading(&self, mut row: SparseRow) -> SparseRow {
        while let Some((c, v)) = row.first().cloned() {
            match self.pivots.get(&c) {
                Some(p) => row = axpy(&row, &v.neg(), p),
                None => break,
            }
        }
        row
    }

    pub fn into_rref(self) -> Rref {
        let ncols = self.ncols;
        let mut done: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (c, row) in self.pivots.into_iter().rev() {
            // Entries of `row` right of `c` may hit later pivots, which are
            // already fully reduced.
            let mut out: SparseRow = vec![row[0].clone()];
            let mut rest: SparseRow = row[1..].to_vec();
            let mut k = 0;
            while k < rest.len() {
                let (col, v) = (rest[k].0, rest[k].1.clone());
                if let Some(p) = done.get(&col) {
                    let tail = axpy(&rest[k..], &v.neg(), p);
                    rest.truncate(k);
                    rest.extend(tail);
                } else {
                    k += 1;
                }
            }
            out.extend(rest);
            done.insert(c, out);
        }
        Rref { ncols, pivots: done }
    }
}

/// Reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    ncols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_cols(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Basis of the kernel restricted to the first `n` columns, one vector per
    /// free column in increasing order.
    pub fn nullspace_upto(&self, n: usize) -> Vec<Vec<Scalar>> {
        let mut out = Vec::new();
        for f in 0..n {
            if self.pivots.contains_key(&f) {
                continue;
            }
            let mut v = vec![Scalar::ZERO; n];
            v[f] = Scalar::ONE;
            for (&c, row) in &self.pivots {
                if c >= n {
                    continue;
                }
                if let Some(x) = entry(row, f) {
                    v[c] = x.neg();
                }
            }
            out.push(v);
        }
        out
    }

    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        self.nullspace_upto(self.ncols)
    }
}

/// Dense exact matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> ExactMatrix {
        ExactMatrix { rows, cols, entries: vec![Scalar::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<ExactMatrix> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(ExactMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_ints(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect(),
        )
        .expect("rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    fn sparse_row(&self, i: usize) -> SparseRow {
        self.row(i).iter().cloned().enumerate().filter(|(_, v)| !v.is_zero()).collect()
    }

    pub fn mul_vec(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Scalar::ZERO, |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect())
    }

    fn echelon(&self, extra: Option<&[Scalar]>) -> Echelon {
        let n = self.cols + extra.is_some() as usize;
        let mut e = Echelon::new(n);
        for i in 0..self.rows {
            let mut r = self.sparse_row(i);
            if let Some(b) = extra {
                if !b[i].is_zero() {
                    r.push((self.cols, b[i].clone()));
                }
            }
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.echelon(None).rank()
    }

    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        self.echelon(None).into_rref().nullspace()
    }

    /// Particular solution (free variables zero) and kernel basis.
    pub fn solve_linear(&self, b: &[Scalar]) -> Result<(Vec<Scalar>, Vec<Vec<Scalar>>)> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!("right-hand side of length {} for {} rows", b.len(), self.rows)));
        }
        let rref = self.echelon(Some(b)).into_rref();
        if rref.pivots.contains_key(&self.cols) {
            return Err(Error::NoSolution("right-hand side outside the column space".into()));
        }
        let mut x = vec![Scalar::ZERO; self.cols];
        for (&c, row) in &rref.pivots {
            if let Some(v) = entry(row, self.cols) {
                x[c] = v.clone();
            }
        }
        Ok((x, rref.nullspace_upto(self.cols)))
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}
