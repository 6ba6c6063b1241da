//! Kähler differentials of coordinate rings with square-zero nilpotents.

use std::fmt;

use super::element::{Ring, RingElem, RingRef};
use crate::error::{Error, Result};

/// A 1-form `Σ a_i dx_i + Σ b_j dε_j` in normal form.
///
/// The relation `ε_j dε_j = 0` is used to drop every `ε_j`-multiple from the
/// coefficient of `dε_j`. When distinct nilpotents multiply to zero, the
/// relation `ε_i dε_j = −ε_j dε_i` moves `ε_i dε_j` with `i > j` onto `dε_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct KaehlerForm {
    ring: RingRef,
    dx: Vec<RingElem>,
    deps: Vec<RingElem>,
}

impl KaehlerForm {
    pub fn zero(ring: &RingRef) -> Self {
        KaehlerForm {
            ring: ring.clone(),
            dx: vec![RingElem::zero(ring); ring.nvars()],
            deps: vec![RingElem::zero(ring); ring.n_nil()],
        }
    }

    pub fn from_coefficients(ring: &RingRef, dx: Vec<RingElem>, deps: Vec<RingElem>) -> Result<Self> {
        if dx.len() != ring.nvars() || deps.len() != ring.n_nil() {
            return Err(Error::Dimension("wrong number of differential coefficients".into()));
        }
        let mut f = KaehlerForm {
            ring: ring.clone(),
            dx,
            deps,
        };
        f.normalize();
        Ok(f)
    }

    /// The exterior derivative of a function.
    pub fn d(a: &RingElem) -> Self {
        let ring = a.ring().clone();
        let dx = (0..ring.nvars()).map(|i| a.partial(i)).collect();
        let mut deps = Vec::with_capacity(ring.n_nil());
        for j in 0..ring.n_nil() {
            let bit = 1u32 << j;
            let parts = a
                .parts()
                .filter(|(m, _)| m & bit != 0)
                .map(|(m, p)| (m & !bit, p.clone()));
            deps.push(RingElem::from_parts(&ring, parts));
        }
        let mut f = KaehlerForm { ring, dx, deps };
        f.normalize();
        f
    }

    fn normalize(&mut self) {
        let n = self.ring.n_nil();
        let pairwise_zero = self.ring.nil_degree() == 1;
        for k in 0..n {
            let bit = 1u32 << k;
            let c = std::mem::replace(&mut self.deps[k], RingElem::zero(&self.ring));
            let mut keep = Vec::new();
            for (m, p) in c.parts() {
                if m & bit != 0 {
                    continue;
                }
                if pairwise_zero && m != 0 {
                    // m is a single generator ε_i
                    let i = m.trailing_zeros() as usize;
                    if i > k {
                        let moved = RingElem::from_parts(&self.ring, [(bit, -p)]);
                        self.deps[i] = self.deps[i].add_ref(&moved);
                        continue;
                    }
                }
                keep.push((m, p.clone()));
            }
            self.deps[k] = self.deps[k].add_ref(&RingElem::from_parts(&self.ring, keep));
        }
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    /// Coefficient of `dx_i`.
    pub fn dx(&self, i: usize) -> &RingElem {
        &self.dx[i]
    }

    /// Coefficient of `dε_j`.
    pub fn deps(&self, j: usize) -> &RingElem {
        &self.deps[j]
    }

    pub fn is_zero(&self) -> bool {
        self.dx.iter().chain(&self.deps).all(RingElem::is_zero)
    }

    pub fn add_ref(&self, other: &KaehlerForm) -> KaehlerForm {
        assert!(Ring::same(&self.ring, &other.ring));
        let dx = self.dx.iter().zip(&other.dx).map(|(a, b)| a.add_ref(b)).collect();
        let deps = self.deps.iter().zip(&other.deps).map(|(a, b)| a.add_ref(b)).collect();
        let mut f = KaehlerForm {
            ring: self.ring.clone(),
            dx,
            deps,
        };
        f.normalize();
        f
    }

    pub fn sub_ref(&self, other: &KaehlerForm) -> KaehlerForm {
        self.add_ref(&other.mul_elem(&RingElem::int(&self.ring, -1)))
    }

    /// Multiplies the form by a function.
    pub fn mul_elem(&self, a: &RingElem) -> KaehlerForm {
        let dx = self.dx.iter().map(|c| a.mul_ref(c)).collect();
        let deps = self.deps.iter().map(|c| a.mul_ref(c)).collect();
        let mut f = KaehlerForm {
            ring: self.ring.clone(),
            dx,
            deps,
        };
        f.normalize();
        f
    }
}

impl fmt::Display for KaehlerForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (c, name) in self.dx.iter().zip(self.ring.vars().iter()) {
            if !c.is_zero() {
                parts.push(format!("({c})*d{name}"));
            }
        }
        for (c, name) in self.deps.iter().zip(self.ring.nil_names().iter()) {
            if !c.is_zero() {
                parts.push(format!("({c})*d{name}"));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl fmt::Debug for KaehlerForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse::parse_elem;

    #[test]
    fn d_of_inverse() {
        let r = Ring::torus(&["x"]);
        let xinv = parse_elem(&r, "x^-1").unwrap();
        let expected = parse_elem(&r, "-x^-2").unwrap();
        assert_eq!(KaehlerForm::d(&xinv).dx(0), &expected);
    }

    #[test]
    fn eps_d_eps_vanishes() {
        let r = Ring::polynomial(&["x"]).with_dual("eps").unwrap();
        let e = RingElem::nil_gen(&r, 0);
        assert!(KaehlerForm::d(&e).mul_elem(&e).is_zero());
        // d(ε²) = 0 is consistent with 2ε dε = 0
        assert!(KaehlerForm::d(&e.mul_ref(&e)).is_zero());
    }

    #[test]
    fn cross_relation_for_pairwise_zero_nilpotents() {
        let r = Ring::polynomial(&["x", "y"]).first_order_diagonal().unwrap();
        let a = RingElem::nil_gen(&r, 0);
        let b = RingElem::nil_gen(&r, 1);
        let lhs = KaehlerForm::d(&a)
            .mul_elem(&b)
            .add_ref(&KaehlerForm::d(&b).mul_elem(&a));
        assert!(lhs.is_zero());
        assert!(!KaehlerForm::d(&a).mul_elem(&b).is_zero());
    }

    #[test]
    fn leibniz_in_two_parameter_ring() {
        let r = Ring::polynomial(&["x"]).with_two_parameters("e1", "e2").unwrap();
        let a = parse_elem(&r, "x^2 + x*e1 + 3*e1*e2").unwrap();
        let b = parse_elem(&r, "1 - e2 + x*e1").unwrap();
        let lhs = KaehlerForm::d(&a.mul_ref(&b));
        let rhs = KaehlerForm::d(&a)
            .mul_elem(&b)
            .add_ref(&KaehlerForm::d(&b).mul_elem(&a));
        assert_eq!(lhs, rhs);
    }
}
