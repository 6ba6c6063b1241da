//! Exact sparse linear algebra over ℚ.
//!
//! Vectors are inserted one at a time into an [`Echelon`]; each insertion
//! either extends the basis of the span or produces a kernel relation among
//! the inserted vectors. Solving `Σ x_j v_j = b` reuses the stored basis, so
//! one factorization serves many right-hand sides.

use std::collections::{BTreeMap, HashMap};

use crate::ring::Scalar;

/// A sparse vector indexed by `usize`, without zero entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SparseVec(BTreeMap<usize, Scalar>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Self::new();
        v.0.insert(i, Scalar::one());
        v
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut v = Self::new();
        for (i, c) in entries {
            v.add_at(i, &c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.0.get(&i).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.0.iter().map(|(i, c)| (*i, c))
    }

    pub fn leading(&self) -> Option<usize> {
        self.0.keys().next().copied()
    }

    pub fn add_at(&mut self, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(i).or_default();
        *e += c;
        if e.is_zero() {
            self.0.remove(&i);
        }
    }

    /// `self += c·other`.
    pub fn axpy(&mut self, c: &Scalar, other: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (i, x) in &other.0 {
            self.add_at(*i, &(c * x));
        }
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|(i, x)| (*i, x * c)).collect())
    }

    /// Keeps only the entries whose index satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> SparseVec {
        SparseVec(
            self.0
                .iter()
                .filter(|(i, _)| keep(**i))
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
        )
    }
}

struct BasisVec {
    vec: SparseVec,
    combo: SparseVec,
}

/// Incremental column echelon form of a list of vectors.
#[derive(Default)]
pub struct Echelon {
    basis: Vec<BasisVec>,
    pivot_of: HashMap<usize, usize>,
    kernel: Vec<SparseVec>,
    inserted: usize,
    track: bool,
}

impl Echelon {
    /// An echelon form that records, for every basis vector and kernel
    /// relation, its expression in terms of the inserted vectors.
    pub fn tracking() -> Self {
        Echelon {
            track: true,
            ..Default::default()
        }
    }

    /// An echelon form that only records the span (cheaper).
    pub fn span_only() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Kernel relations: combinations of inserted vectors that vanish.
    pub fn kernel(&self) -> &[SparseVec] {
        &self.kernel
    }

    /// Reduces `v` against the basis; returns the residual (with no entries
    /// at pivot positions) and the combination of inserted vectors removed.
    fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut r = v.clone();
        let mut combo = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let next = r.0.range(cursor..).next().map(|(i, c)| (*i, c.clone()));
            let Some((i, c)) = next else { break };
            if let Some(&b) = self.pivot_of.get(&i) {
                let bv = &self.basis[b];
                let f = -c;
                r.axpy(&f, &bv.vec);
                if self.track {
                    combo.axpy(&f, &bv.combo);
                }
            }
            cursor = i + 1;
        }
        (r, combo)
    }

    /// Inserts a vector; returns whether it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let (r, mut combo) = self.reduce(v);
        // r = v + combo·(inserted), so v's own coefficient is 1
        if self.track {
            combo.add_at(idx, &Scalar::one());
        }
        match r.leading() {
            None => {
                if self.track {
                    self.kernel.push(combo);
                }
                false
            }
            Some(p) => {
                let inv = r.get(p).inv().expect("nonzero pivot");
                let vec = r.scale(&inv);
                let combo = if self.track { combo.scale(&inv) } else { combo };
                self.pivot_of.insert(p, self.basis.len());
                self.basis.push(BasisVec { vec, combo });
                true
            }
        }
    }

    /// Whether `v` lies in the span of the inserted vectors.
    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Coefficients `x` with `Σ x_j v_j = b`, if `b` is in the span.
    /// Requires a tracking echelon.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        assert!(self.track, "solve needs a tracking echelon");
        let (r, combo) = self.reduce(b);
        r.is_zero().then(|| combo.scale(&-Scalar::one()))
    }
}

/// Rank of a list of vectors.
pub fn rank<'a>(vectors: impl IntoIterator<Item = &'a SparseVec>) -> usize {
    let mut e = Echelon::span_only();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        SparseVec::from_entries(entries.iter().map(|&(i, c)| (i, Scalar::from_int(c))))
    }

    #[test]
    fn kernel_and_rank() {
        let mut e = Echelon::tracking();
        assert!(e.insert(&v(&[(0, 1), (1, 2)])));
        assert!(e.insert(&v(&[(1, 1), (2, 1)])));
        assert!(!e.insert(&v(&[(0, 1), (1, 4), (2, 2)])));
        assert_eq!(e.rank(), 2);
        let k = &e.kernel()[0];
        // v0 + 2 v1 - v2 = 0
        assert_eq!(k.get(0), Scalar::from_int(-1));
        assert_eq!(k.get(1), Scalar::from_int(-2));
        assert_eq!(k.get(2), Scalar::one());
    }

    #[test]
    fn solve_roundtrip() {
        let cols = [v(&[(0, 2), (3, 1)]), v(&[(1, 1), (3, -1)]), v(&[(2, 5)])];
        let mut e = Echelon::tracking();
        for c in &cols {
            e.insert(c);
        }
        let b = v(&[(0, 4), (1, 3), (2, 5), (3, -1)]);
        let x = e.solve(&b).unwrap();
        let mut acc = SparseVec::new();
        for (j, c) in x.iter() {
            acc.axpy(c, &cols[j]);
        }
        assert_eq!(acc, b);
        assert!(e.solve(&v(&[(4, 1)])).is_none());
    }
}
