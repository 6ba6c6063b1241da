//! Sparse multivariate Laurent polynomials over ℚ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Ordered variable names shared between a ring and its elements.
pub type Vars = Arc<[String]>;

/// Exponent vector; entries may be negative.
pub type Exponents = Vec<i32>;

pub fn vars_from<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

/// A finite ℚ-linear combination of Laurent monomials.
///
/// Zero coefficients are never stored and every exponent vector has one entry
/// per variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    vars: Vars,
    terms: BTreeMap<Exponents, Scalar>,
}

impl LaurentPoly {
    pub fn zero(vars: &Vars) -> Self {
        LaurentPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: Scalar) -> Self {
        Self::monomial(vars, c, vec![0; vars.len()])
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Scalar::one())
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, Scalar::one(), e)
    }

    pub fn monomial(vars: &Vars, c: Scalar, exps: Exponents) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly {
            vars: vars.clone(),
            terms,
        }
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Exponents, Scalar)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[i32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// The value if this is a constant polynomial.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// `(c, e)` if this is the single term `c·x^e`.
    pub fn as_monomial(&self) -> Option<(&Scalar, &Exponents)> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some((c, e))
        } else {
            None
        }
    }

    pub fn same_vars(&self, other: &LaurentPoly) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars
    }

    fn check_vars(&self, other: &LaurentPoly) {
        assert!(
            self.same_vars(other),
            "variable mismatch: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn add_term(&mut self, exps: Exponents, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(exps.len(), self.vars.len());
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &LaurentPoly) {
        self.check_vars(other);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c);
        }
    }

    pub fn sub_assign_ref(&mut self, other: &LaurentPoly) {
        self.check_vars(other);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), &-c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> LaurentPoly {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    /// Multiplies by `c·x^exps`.
    pub fn mul_monomial(&self, c: &Scalar, exps: &[i32]) -> LaurentPoly {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.iter().zip(exps).map(|(a, b)| a + b).collect(), k * c))
                .collect(),
        }
    }

    pub fn mul_ref(&self, other: &LaurentPoly) -> LaurentPoly {
        self.check_vars(other);
        let mut out = Self::zero(&self.vars);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> LaurentPoly {
        let mut result = Self::one(&self.vars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_ref(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_ref(&base);
            }
        }
        result
    }

    /// Inverse of a single-term polynomial `c·x^e`.
    pub fn monomial_inverse(&self) -> Result<LaurentPoly> {
        match self.as_monomial() {
            Some((c, e)) => Ok(LaurentPoly::monomial(
                &self.vars,
                c.inv()?,
                e.iter().map(|x| -x).collect(),
            )),
            None => Err(Error::NotInvertible(self.to_string())),
        }
    }

    /// ∂/∂(variable i).
    pub fn partial(&self, i: usize) -> LaurentPoly {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, &(c * &Scalar::from_int(e[i] as i64)));
            }
        }
        out
    }

    /// Largest absolute exponent appearing in any term.
    pub fn max_abs_exponent(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|e| e.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Re-expresses the polynomial over a different variable list, mapping
    /// variable `i` to position `map[i]` of `vars`.
    pub fn relabel(&self, vars: &Vars, map: &[usize]) -> LaurentPoly {
        let mut out = Self::zero(vars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; vars.len()];
            for (i, &x) in e.iter().enumerate() {
                e2[map[i]] += x;
            }
            out.add_term(e2, c);
        }
        out
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.mul_ref(rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-Scalar::one())
    }
}

/// Writes `c·x^e` in the literal grammar; `first` suppresses a leading `+`.
pub(crate) fn write_term(
    f: &mut fmt::Formatter<'_>,
    names: &[&str],
    exps: &[i32],
    c: &Scalar,
    first: bool,
) -> fmt::Result {
    let neg = c.is_negative();
    let abs = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let mut factors: Vec<String> = Vec::new();
    for (name, &e) in names.iter().zip(exps) {
        match e {
            0 => {}
            1 => factors.push(name.to_string()),
            _ => factors.push(format!("{name}^{e}")),
        }
    }
    if factors.is_empty() {
        write!(f, "{abs}")
    } else if abs.is_one() {
        write!(f, "{}", factors.join("*"))
    } else {
        write!(f, "{abs}*{}", factors.join("*"))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            write_term(f, &names, e, c, k == 0)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vars {
        vars_from(&["x", "y"])
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let v = xy();
        let x = LaurentPoly::var(&v, 0);
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d.len(), 0);
    }

    #[test]
    fn partial_of_inverse_power() {
        let v = xy();
        let xinv = LaurentPoly::monomial(&v, Scalar::one(), vec![-1, 0]);
        let expected = LaurentPoly::monomial(&v, Scalar::from_int(-1), vec![-2, 0]);
        assert_eq!(xinv.partial(0), expected);
        assert!(xinv.partial(1).is_zero());
    }

    #[test]
    fn display_uses_literal_grammar() {
        let v = xy();
        let p = LaurentPoly::from_terms(
            &v,
            [
                (vec![-2, 1], Scalar::ratio(3, 2)),
                (vec![0, 0], Scalar::one()),
                (vec![1, 0], Scalar::from_int(-1)),
            ],
        );
        assert_eq!(p.to_string(), "-x + 1 + 3/2*x^-2*y");
    }

    #[test]
    fn monomial_inverse() {
        let v = xy();
        let m = LaurentPoly::monomial(&v, Scalar::from_int(2), vec![1, -3]);
        let inv = m.monomial_inverse().unwrap();
        assert_eq!(&m * &inv, LaurentPoly::one(&v));
        let not_unit = &m + &LaurentPoly::one(&v);
        assert!(not_unit.monomial_inverse().is_err());
    }
}
