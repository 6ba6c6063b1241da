use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ring::{Matrix, Ring, RingElem, RingRef, Scalar};

/// A λ-connection on the free module of rank `r` over a coordinate ring:
/// `∇_i(s) = λ∂_i(s) + A_i s` for column vectors `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaConnection {
    ring: RingRef,
    rank: usize,
    lambda: Scalar,
    mats: Vec<Matrix>,
}

impl LambdaConnection {
    pub fn new(ring: &RingRef, lambda: Scalar, mats: Vec<Matrix>) -> Result<Self> {
        if mats.len() != ring.nvars() {
            return Err(Error::Dimension(format!(
                "{} connection matrices for {} coordinates",
                mats.len(),
                ring.nvars()
            )));
        }
        let rank = mats.first().map_or(0, Matrix::rows);
        for m in &mats {
            if m.rows() != rank || m.cols() != rank {
                return Err(Error::Dimension(
                    "connection matrices must be square of equal size".into(),
                ));
            }
            if !Ring::same(m.ring(), ring) {
                return Err(Error::RingMismatch(format!(
                    "connection matrix over {} for ring {}",
                    m.ring().describe(),
                    ring.describe()
                )));
            }
        }
        Ok(LambdaConnection {
            ring: ring.clone(),
            rank,
            lambda,
            mats,
        })
    }

    /// `∇ = λd` on the free module of the given rank.
    pub fn trivial(ring: &RingRef, rank: usize, lambda: Scalar) -> Self {
        let mats = (0..ring.nvars()).map(|_| Matrix::zero(ring, rank, rank)).collect();
        LambdaConnection {
            ring: ring.clone(),
            rank,
            lambda,
            mats,
        }
    }

    /// Rank given explicitly, so rank 0 works on rings without coordinates.
    pub fn with_rank(ring: &RingRef, rank: usize, lambda: Scalar, mats: Vec<Matrix>) -> Result<Self> {
        let c = Self::new(ring, lambda, mats)?;
        if ring.nvars() > 0 && c.rank != rank {
            return Err(Error::Dimension(format!("expected rank {rank}, got {}", c.rank)));
        }
        Ok(LambdaConnection { rank, ..c })
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn matrix(&self, i: usize) -> &Matrix {
        &self.mats[i]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    /// `∇_i s` for a column vector `s` (an `r × 1` matrix).
    pub fn apply(&self, i: usize, s: &Matrix) -> Result<Matrix> {
        if s.rows() != self.rank || s.cols() != 1 {
            return Err(Error::Dimension("sections are r x 1 column vectors".into()));
        }
        s.partial(i).scale(&self.lambda).add(&self.mats[i].mul(s)?)
    }

    /// All components `(∇_1 s, …, ∇_n s)`.
    pub fn nabla(&self, s: &Matrix) -> Result<Vec<Matrix>> {
        (0..self.nvars()).map(|i| self.apply(i, s)).collect()
    }

    /// Components of `∇(fs) − s⊗λdf − f∇s`; all zero for a λ-connection.
    pub fn leibniz_defect(&self, f: &RingElem, s: &Matrix) -> Result<Vec<Matrix>> {
        let fs = s.scale_elem(f);
        let mut out = Vec::new();
        for i in 0..self.nvars() {
            let lhs = self.apply(i, &fs)?;
            let rhs = s
                .scale_elem(&f.partial(i).scale(&self.lambda))
                .add(&self.apply(i, s)?.scale_elem(f))?;
            out.push(lhs.sub(&rhs)?);
        }
        Ok(out)
    }
}

/// Curvature components `K_ij`, stored for `i < j`; `K_ji = −K_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    comps: BTreeMap<(usize, usize), Matrix>,
}

impl CurvatureTensor {
    pub fn get(&self, i: usize, j: usize) -> Option<Matrix> {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => self.comps.get(&(i, j)).cloned(),
            Ordering::Greater => self.comps.get(&(j, i)).map(Matrix::neg),
            Ordering::Equal => None,
        }
    }

    pub fn components(&self) -> impl Iterator<Item = ((usize, usize), &Matrix)> {
        self.comps.iter().map(|(k, m)| (*k, m))
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(Matrix::is_zero)
    }

    /// The first nonzero component, if any.
    pub fn first_nonzero(&self) -> Option<((usize, usize), &Matrix)> {
        self.comps.iter().find(|(_, m)| !m.is_zero()).map(|(k, m)| (*k, m))
    }
}

/// `K_ij = λ(∂_i A_j − ∂_j A_i) + [A_i, A_j]`.
pub fn curvature(conn: &LambdaConnection) -> CurvatureTensor {
    let n = conn.nvars();
    let mut comps = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let a_i = conn.matrix(i);
            let a_j = conn.matrix(j);
            let k = a_j
                .partial(i)
                .sub(&a_i.partial(j))
                .and_then(|d| d.scale(conn.lambda()).add(&a_i.commutator(a_j)?))
                .expect("shapes checked at construction");
            comps.insert((i, j), k);
        }
    }
    CurvatureTensor { n, comps }
}

pub fn is_integrable(conn: &LambdaConnection) -> bool {
    curvature(conn).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_elem;

    #[test]
    fn curvature_example() {
        let r = Ring::polynomial(&["x", "y"]);
        let a1 = Matrix::parse(&r, &[vec!["y"]]).unwrap();
        let a2 = Matrix::parse(&r, &[vec!["0"]]).unwrap();
        let c = LambdaConnection::new(&r, Scalar::one(), vec![a1, a2]).unwrap();
        let k = curvature(&c);
        assert_eq!(k.get(0, 1).unwrap(), Matrix::parse(&r, &[vec!["-1"]]).unwrap());
        assert_eq!(k.get(1, 0).unwrap(), Matrix::parse(&r, &[vec!["1"]]).unwrap());
        assert!(!k.is_zero());
    }

    #[test]
    fn curves_are_always_integrable() {
        let r = Ring::polynomial(&["x"]);
        let a = Matrix::parse(&r, &[vec!["x", "1"], vec!["x^2", "0"]]).unwrap();
        let c = LambdaConnection::new(&r, Scalar::ratio(1, 3), vec![a]).unwrap();
        assert!(is_integrable(&c));
    }

    #[test]
    fn leibniz_holds() {
        let r = Ring::polynomial(&["x", "y"]);
        let a1 = Matrix::parse(&r, &[vec!["x", "y"], vec!["1", "0"]]).unwrap();
        let a2 = Matrix::parse(&r, &[vec!["0", "x*y"], vec!["y", "2"]]).unwrap();
        let c = LambdaConnection::new(&r, Scalar::from_int(3), vec![a1, a2]).unwrap();
        let f = parse_elem(&r, "x^2*y - 1").unwrap();
        let s = Matrix::parse(&r, &[vec!["y"], vec!["x + 1"]]).unwrap();
        assert!(c.leibniz_defect(&f, &s).unwrap().iter().all(Matrix::is_zero));
    }

    #[test]
    fn rank_zero_is_accepted() {
        let r = Ring::polynomial(&["x", "y"]);
        let c = LambdaConnection::trivial(&r, 0, Scalar::one());
        assert_eq!(c.rank(), 0);
        assert!(is_integrable(&c));
    }
}
