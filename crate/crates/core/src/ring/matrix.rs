//! Dense matrices over a coordinate ring.

use std::fmt;

use super::element::{Ring, RingElem, RingRef};
use super::hom::RingHom;
use super::parse::parse_elem;
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: RingRef,
    rows: usize,
    cols: usize,
    data: Vec<RingElem>,
}

impl Matrix {
    pub fn zero(ring: &RingRef, rows: usize, cols: usize) -> Self {
        Matrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![RingElem::zero(ring); rows * cols],
        }
    }

    pub fn identity(ring: &RingRef, n: usize) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, RingElem::one(ring));
        }
        m
    }

    pub fn from_rows(ring: &RingRef, rows: Vec<Vec<RingElem>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::Dimension("ragged matrix rows".into()));
            }
            for e in row {
                if !Ring::same(e.ring(), ring) {
                    return Err(Error::RingMismatch(format!("entry {e} not in {}", ring.describe())));
                }
                data.push(e);
            }
        }
        Ok(Matrix {
            ring: ring.clone(),
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Parses a matrix given as rows of polynomial literals.
    pub fn parse<S: AsRef<str>>(ring: &RingRef, rows: &[Vec<S>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_elem(ring, s.as_ref()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(ring, parsed)
    }

    /// Diagonal matrix.
    pub fn diagonal(ring: &RingRef, entries: Vec<RingElem>) -> Self {
        let n = entries.len();
        let mut m = Self::zero(ring, n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    /// Matrix with a single entry `e` at `(i, j)`.
    pub fn unit(ring: &RingRef, n: usize, i: usize, j: usize, e: RingElem) -> Self {
        let mut m = Self::zero(ring, n, n);
        m.set(i, j, e);
        m
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: RingElem) {
        self.data[i * self.cols + j] = e;
    }

    pub fn entries(&self) -> &[RingElem] {
        &self.data
    }

    /// Positions and values of the nonzero entries.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, &RingElem)> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(move |(k, e)| (k / self.cols, k % self.cols, e))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RingElem::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(&self.ring, self.rows)
    }

    fn same_shape(&self, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if !Ring::same(&self.ring, &other.ring) {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                self.ring.describe(),
                other.ring.describe()
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&RingElem, &RingElem) -> RingElem) -> Result<Matrix> {
        self.same_shape(other)?;
        Ok(Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, RingElem::add_ref)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, RingElem::sub_ref)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if !Ring::same(&self.ring, &other.ring) {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                self.ring.describe(),
                other.ring.describe()
            )));
        }
        let mut out = Matrix::zero(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].add_ref(&a.mul_ref(b));
                }
            }
        }
        Ok(out)
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Matrix) -> Result<Matrix> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        self.map_entries(|e| e.scale(c))
    }

    pub fn scale_elem(&self, a: &RingElem) -> Matrix {
        self.map_entries(|e| a.mul_ref(e))
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&-Scalar::one())
    }

    pub fn map_entries(&self, f: impl Fn(&RingElem) -> RingElem) -> Matrix {
        Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Entrywise image under a ring homomorphism.
    pub fn apply_hom(&self, h: &RingHom) -> Result<Matrix> {
        if !Ring::same(&self.ring, h.source()) {
            return Err(Error::RingMismatch(format!(
                "matrix over {} but hom from {}",
                self.ring.describe(),
                h.source().describe()
            )));
        }
        Ok(Matrix {
            ring: h.target().clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| h.apply(e)).collect(),
        })
    }

    /// Entrywise embedding into a ring containing this one (by names).
    pub fn embed(&self, target: &RingRef) -> Result<Matrix> {
        Ok(Matrix {
            ring: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e.embed(target)).collect::<Result<_>>()?,
        })
    }

    /// Entrywise `∂/∂x_i`.
    pub fn partial(&self, i: usize) -> Matrix {
        self.map_entries(|e| e.partial(i))
    }

    /// Reduction modulo nilpotents, over the base ring.
    pub fn project(&self) -> Matrix {
        let base = self.ring.base();
        Matrix {
            ring: base.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| RingElem::from_poly(&base, e.body())).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Matrix {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != skip_row) {
            for j in (0..self.cols).filter(|&j| j != skip_col) {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            ring: self.ring.clone(),
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        }
    }

    /// Determinant by cofactor expansion (ranks here are small).
    pub fn det(&self) -> Result<RingElem> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        Ok(self.det_unchecked())
    }

    fn det_unchecked(&self) -> RingElem {
        match self.rows {
            0 => RingElem::one(&self.ring),
            1 => self.get(0, 0).clone(),
            2 => self
                .get(0, 0)
                .mul_ref(self.get(1, 1))
                .sub_ref(&self.get(0, 1).mul_ref(self.get(1, 0))),
            n => {
                let mut acc = RingElem::zero(&self.ring);
                for j in 0..n {
                    let a = self.get(0, j);
                    if a.is_zero() {
                        continue;
                    }
                    let term = a.mul_ref(&self.minor(0, j).det_unchecked());
                    acc = if j % 2 == 0 {
                        acc.add_ref(&term)
                    } else {
                        acc.sub_ref(&term)
                    };
                }
                acc
            }
        }
    }

    /// Inverse via the adjugate; requires a unit determinant.
    pub fn inverse(&self) -> Result<Matrix> {
        let det = self.det()?;
        let dinv = det
            .inverse()
            .map_err(|_| Error::NotInvertible(format!("matrix with determinant {det}")))?;
        let n = self.rows;
        let mut out = Matrix::zero(&self.ring, n, n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(j, i).det_unchecked().mul_ref(&dinv);
                out.set(i, j, if (i + j) % 2 == 0 { c } else { c.neg_ref() });
            }
        }
        Ok(out)
    }

    /// `self⁻¹ · m · self`.
    pub fn conjugate(&self, m: &Matrix) -> Result<Matrix> {
        self.inverse()?.mul(m)?.mul(self)
    }

    pub fn max_abs_exponent(&self) -> i32 {
        self.data.iter().map(RingElem::max_abs_exponent).max().unwrap_or(0)
    }

    /// Whether every entry lies in the ring (no forbidden negative powers).
    pub fn in_ring(&self) -> bool {
        self.data.iter().all(RingElem::in_ring)
    }

    /// Rows of entry literals, for reports.
    pub fn to_literals(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_transition_matrix() {
        let r = Ring::torus(&["u"]).with_dual("eps").unwrap();
        let g = Matrix::parse(&r, &[vec!["u", "1 + eps"], vec!["0", "u^-1"]]).unwrap();
        let gi = g.inverse().unwrap();
        assert!(g.mul(&gi).unwrap().is_identity());
        assert!(gi.mul(&g).unwrap().is_identity());
    }

    #[test]
    fn non_unit_determinant() {
        let r = Ring::polynomial(&["u"]);
        let g = Matrix::parse(&r, &[vec!["u", "0"], vec!["0", "1"]]).unwrap();
        assert!(g.inverse().is_err());
    }

    #[test]
    fn three_by_three_determinant() {
        let r = Ring::polynomial(&["x"]);
        let m = Matrix::parse(&r, &[vec!["1", "x", "0"], vec!["0", "1", "x"], vec!["x", "0", "1"]]).unwrap();
        assert_eq!(m.det().unwrap(), parse_elem(&r, "1 + x^3").unwrap());
    }
}
