//! Tensor shapes: dimension, rank, metric and the block storage that
//! realizes index symmetries.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A full or canonical index tuple; entries are 0-based.
pub type Idx = SmallVec<[u8; 12]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    /// δ
    Euclidean,
    /// η = diag(−1, +1, …, +1)
    Minkowski,
}

impl Metric {
    /// Diagonal entry of the metric (and of its inverse).
    pub fn diag(self, i: u8) -> i64 {
        match self {
            Metric::Minkowski if i == 0 => -1,
            _ => 1,
        }
    }
}

/// One storage block of consecutive slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    Sym(u8),
    Anti(u8),
    Free,
}

impl Block {
    pub fn len(self) -> usize {
        match self {
            Block::Sym(k) | Block::Anti(k) => k as usize,
            Block::Free => 1,
        }
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    fn normalized(self) -> Option<Block> {
        match self {
            Block::Sym(0) | Block::Anti(0) => None,
            Block::Sym(1) | Block::Anti(1) => Some(Block::Free),
            b => Some(b),
        }
    }
}

/// Declared symmetry type. Storage follows from it; Young types are stored
/// in blocks that are only a superset of the irreducible subspace.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Symmetric,
    None,
    PairAntisymmetric,
    /// Young diagram given by row lengths, stored as symmetric rows.
    YoungRows(Vec<u8>),
    /// Young diagram given by column lengths, stored as antisymmetric columns.
    YoungCols(Vec<u8>),
    Blocks(Vec<Block>),
}

struct Inner {
    dim: u8,
    rank: u8,
    metric: Metric,
    symmetry: Symmetry,
    blocks: Vec<Block>,
    comps: Vec<Idx>,
    index: HashMap<Idx, usize>,
    mults: Vec<u64>,
}

#[derive(Clone)]
pub struct TensorShape(Arc<Inner>);

impl PartialEq for TensorShape {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0)
            || (self.0.dim == o.0.dim && self.0.metric == o.0.metric && self.0.blocks == o.0.blocks)
    }
}

impl Eq for TensorShape {}

impl Hash for TensorShape {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.0.dim.hash(h);
        self.0.metric.hash(h);
        self.0.blocks.hash(h);
    }
}

fn check_young(rows: &[u8]) -> Result<()> {
    if rows.windows(2).any(|w| w[0] < w[1]) || rows.contains(&0) {
        return Err(Error::Shape(format!("Young lengths {rows:?} must be positive and weakly decreasing")));
    }
    Ok(())
}

/// Transposes a Young diagram (rows ↔ columns).
pub fn conjugate(rows: &[u8]) -> Vec<u8> {
    let w = rows.first().copied().unwrap_or(0);
    (0..w).map(|j| rows.iter().filter(|&&r| r > j).count() as u8).collect()
}

/// Column lengths of `Y^p_N`: `k` full rows of `N` boxes and a last row of
/// `l` boxes, where `p = N·k + l`.
pub fn y_pn_columns(p: usize, n: usize) -> Vec<u8> {
    let (k, l) = (p / n, p % n);
    (0..n).map(|j| (k + (j < l) as usize) as u8).filter(|&c| c > 0).collect()
}

impl TensorShape {
    pub fn new(dim: usize, metric: Metric, symmetry: Symmetry, rank: usize) -> Result<TensorShape> {
        if dim == 0 || dim > 9 {
            return Err(Error::Shape(format!("dimension {dim} outside 1..=9")));
        }
        if rank > 12 {
            return Err(Error::Shape(format!("rank {rank} exceeds 12")));
        }
        let blocks: Vec<Block> = match &symmetry {
            Symmetry::Symmetric => vec![Block::Sym(rank as u8)],
            Symmetry::None => vec![Block::Free; rank],
            Symmetry::PairAntisymmetric => {
                if !rank.is_multiple_of(2) {
                    return Err(Error::Shape("pair-antisymmetric shapes need even rank".into()));
                }
                vec![Block::Anti(2); rank / 2]
            }
            Symmetry::YoungRows(rows) => {
                check_young(rows)?;
                rows.iter().map(|&r| Block::Sym(r)).collect()
            }
            Symmetry::YoungCols(cols) => {
                check_young(cols)?;
                cols.iter().map(|&c| Block::Anti(c)).collect()
            }
            Symmetry::Blocks(b) => b.clone(),
        };
        let blocks: Vec<Block> = blocks.into_iter().filter_map(Block::normalized).collect();
        let total: usize = blocks.iter().map(|b| b.len()).sum();
        if total != rank {
            return Err(Error::Shape(format!("blocks cover {total} slots, rank is {rank}")));
        }
        let symmetry = match symmetry {
            Symmetry::Blocks(_) if blocks.iter().all(|b| *b == Block::Free) => Symmetry::None,
            Symmetry::Blocks(_) if blocks.len() == 1 && matches!(blocks[0], Block::Sym(_)) => Symmetry::Symmetric,
            Symmetry::Blocks(_) => Symmetry::Blocks(blocks.clone()),
            Symmetry::Symmetric if rank <= 1 => Symmetry::Symmetric,
            s => s,
        };
        let mut comps: Vec<Idx> = vec![Idx::new()];
        for b in &blocks {
            let parts = block_tuples(*b, dim as u8);
            let mut next = Vec::with_capacity(comps.len() * parts.len());
            for c in &comps {
                for p in &parts {
                    let mut x = c.clone();
                    x.extend_from_slice(p);
                    next.push(x);
                }
            }
            comps = next;
        }
        let mults = comps.iter().map(|c| multiplicity(&blocks, c)).collect();
        let index = comps.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        Ok(TensorShape(Arc::new(Inner {
            dim: dim as u8,
            rank: rank as u8,
            metric,
            symmetry,
            blocks,
            comps,
            index,
            mults,
        })))
    }

    pub fn symmetric(dim: usize, rank: usize) -> TensorShape {
        TensorShape::new(dim, Metric::Euclidean, Symmetry::Symmetric, rank).expect("valid shape")
    }

    pub fn none(dim: usize, rank: usize) -> TensorShape {
        TensorShape::new(dim, Metric::Euclidean, Symmetry::None, rank).expect("valid shape")
    }

    pub fn scalar(dim: usize) -> TensorShape {
        TensorShape::symmetric(dim, 0)
    }

    pub fn blocks(dim: usize, metric: Metric, blocks: Vec<Block>) -> TensorShape {
        let rank = blocks.iter().map(|b| b.len()).sum();
        TensorShape::new(dim, metric, Symmetry::Blocks(blocks), rank).expect("valid shape")
    }

    /// Two-row diagram `(s, k)` in the symmetric convention.
    pub fn two_row(dim: usize, s: usize, k: usize) -> Result<TensorShape> {
        let rows: Vec<u8> = [s as u8, k as u8].into_iter().filter(|&r| r > 0).collect();
        TensorShape::new(dim, Metric::Euclidean, Symmetry::YoungRows(rows), s + k)
    }

    /// `Y^p_N` in the antisymmetric convention.
    pub fn y_pn(dim: usize, p: usize, n: usize) -> TensorShape {
        let cols = y_pn_columns(p, n);
        TensorShape::new(dim, Metric::Euclidean, Symmetry::YoungCols(cols), p).expect("valid shape")
    }

    pub fn with_metric(&self, metric: Metric) -> TensorShape {
        TensorShape::new(self.dim(), metric, self.0.symmetry.clone(), self.rank()).expect("valid shape")
    }

    pub fn with_symmetry(&self, symmetry: Symmetry) -> Result<TensorShape> {
        TensorShape::new(self.dim(), self.metric(), symmetry, self.rank())
    }

    pub fn dim(&self) -> usize {
        self.0.dim as usize
    }

    pub fn rank(&self) -> usize {
        self.0.rank as usize
    }

    pub fn metric(&self) -> Metric {
        self.0.metric
    }

    pub fn symmetry(&self) -> &Symmetry {
        &self.0.symmetry
    }

    pub fn storage(&self) -> &[Block] {
        &self.0.blocks
    }

    pub fn is_symmetric(&self) -> bool {
        self.rank() <= 1 || self.0.blocks == [Block::Sym(self.0.rank)]
    }

    pub fn ncomps(&self) -> usize {
        self.0.comps.len()
    }

    pub fn comps(&self) -> &[Idx] {
        &self.0.comps
    }

    pub fn comp(&self, pos: usize) -> &Idx {
        &self.0.comps[pos]
    }

    /// Number of full index tuples represented by a stored component.
    pub fn mult(&self, pos: usize) -> u64 {
        self.0.mults[pos]
    }

    pub fn position(&self, canonical: &[u8]) -> Option<usize> {
        self.0.index.get(canonical).copied()
    }

    /// Maps a full index tuple to its stored component and sign; `None` when
    /// the entry vanishes by antisymmetry.
    pub fn canonicalize(&self, full: &[u8]) -> Option<(usize, i64)> {
        debug_assert_eq!(full.len(), self.rank());
        let mut key: Idx = Idx::from_slice(full);
        let mut sign = 1;
        let mut at = 0;
        for b in &self.0.blocks {
            let n = b.len();
            let seg = &mut key[at..at + n];
            match b {
                Block::Free => {}
                Block::Sym(_) => seg.sort_unstable(),
                Block::Anti(_) => {
                    // insertion sort counting swaps
                    for i in 1..n {
                        let mut j = i;
                        while j > 0 && seg[j - 1] > seg[j] {
                            seg.swap(j - 1, j);
                            sign = -sign;
                            j -= 1;
                        }
                    }
                    if seg.windows(2).any(|w| w[0] == w[1]) {
                        return None;
                    }
                }
            }
            at += n;
        }
        self.position(&key).map(|p| (p, sign))
    }

    /// Slot ranges of the storage blocks.
    pub fn block_ranges(&self) -> Vec<(Block, std::ops::Range<usize>)> {
        let mut at = 0;
        self.0
            .blocks
            .iter()
            .map(|b| {
                let r = at..at + b.len();
                at += b.len();
                (*b, r)
            })
            .collect()
    }
}

fn block_tuples(b: Block, dim: u8) -> Vec<Idx> {
    fn rec(k: usize, lo: u8, dim: u8, strict: bool, cur: &mut Idx, out: &mut Vec<Idx>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for v in lo..dim {
            cur.push(v);
            rec(k - 1, if strict { v + 1 } else { v }, dim, strict, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    match b {
        Block::Free => rec(1, 0, dim, false, &mut Idx::new(), &mut out),
        Block::Sym(k) => rec(k as usize, 0, dim, false, &mut Idx::new(), &mut out),
        Block::Anti(k) => rec(k as usize, 0, dim, true, &mut Idx::new(), &mut out),
    }
    out
}

fn multiplicity(blocks: &[Block], c: &[u8]) -> u64 {
    let fact = |n: usize| (1..=n as u64).product::<u64>();
    let mut m = 1u64;
    let mut at = 0;
    for b in blocks {
        let n = b.len();
        let seg = &c[at..at + n];
        match b {
            Block::Free => {}
            Block::Anti(_) => m *= fact(n),
            Block::Sym(_) => {
                let mut d = 1u64;
                let mut i = 0;
                while i < n {
                    let mut j = i;
                    while j < n && seg[j] == seg[i] {
                        j += 1;
                    }
                    d *= fact(j - i);
                    i = j;
                }
                m *= fact(n) / d;
            }
        }
        at += n;
    }
    m
}

impl fmt::Debug for TensorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Shape(D={}, rank={}, {:?}, {:?})", self.dim(), self.rank(), self.0.symmetry, self.0.metric)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_counts() {
        assert_eq!(TensorShape::symmetric(3, 4).ncomps(), 15);
        assert_eq!(TensorShape::none(3, 2).ncomps(), 9);
        let w = TensorShape::new(5, Metric::Euclidean, Symmetry::YoungCols(vec![2, 2]), 4).unwrap();
        assert_eq!(w.ncomps(), 100);
        assert_eq!(TensorShape::scalar(3).ncomps(), 1);
    }

    #[test]
    fn multiplicities_sum_to_full_count() {
        for s in [
            TensorShape::symmetric(3, 4),
            TensorShape::y_pn(3, 5, 2),
            TensorShape::two_row(4, 3, 1).unwrap(),
        ] {
            let total: u64 = (0..s.ncomps()).map(|p| s.mult(p)).sum();
            let full = (s.dim() as u64).pow(s.rank() as u32);
            // antisymmetric blocks drop tuples with repeats
            assert!(total <= full);
        }
        let s = TensorShape::symmetric(3, 3);
        assert_eq!((0..s.ncomps()).map(|p| s.mult(p)).sum::<u64>(), 27);
    }

    #[test]
    fn canonical_lookup_signs() {
        let s = TensorShape::new(3, Metric::Euclidean, Symmetry::PairAntisymmetric, 4).unwrap();
        let (p, sg) = s.canonicalize(&[1, 0, 2, 0]).unwrap();
        assert_eq!(s.comp(p).as_slice(), &[0, 1, 0, 2]);
        assert_eq!(sg, 1);
        let (_, sg) = s.canonicalize(&[1, 0, 0, 2]).unwrap();
        assert_eq!(sg, -1);
        assert!(s.canonicalize(&[1, 1, 0, 2]).is_none());
    }

    #[test]
    fn young_helpers() {
        assert_eq!(conjugate(&[3, 3, 1]), vec![3, 2, 2]);
        assert_eq!(y_pn_columns(5, 2), vec![3, 2]);
        assert_eq!(y_pn_columns(3, 3), vec![1, 1, 1]);
        assert_eq!(y_pn_columns(0, 2), Vec::<u8>::new());
        assert!(TensorShape::new(3, Metric::Euclidean, Symmetry::YoungRows(vec![1, 2]), 3).is_err());
    }
}
