//! Coordinate rings (Laurent rings, optionally extended by square-zero
//! nilpotents) and their elements.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::laurent::{vars_from, write_term, Exponents, LaurentPoly, Vars};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Which nilpotent extension a ring carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilShape {
    /// No nilpotents: a plain Laurent ring.
    None,
    /// `R[ε]/(ε²)`.
    Dual,
    /// `R[ε₁,ε₂]/(ε₁², ε₂²)`; the mixed monomial `ε₁ε₂` survives.
    TwoParameter,
    /// `R ⊕ Ω_R` with free generators `dx_i` and `(dx_i)(dx_j) = 0`.
    FirstOrderDiagonal,
}

/// A coordinate ring: ℚ[x₁..xₙ] localized at some of the variables,
/// optionally tensored with a square-zero nilpotent extension.
///
/// Nilpotent monomials are subsets of the nilpotent generators, encoded as
/// bitmasks. A product of two generator monomials vanishes when they share a
/// generator or when the union has more than `nil_degree` generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring {
    vars: Vars,
    invertible: Vec<bool>,
    nil: Vars,
    nil_degree: u32,
    shape: NilShape,
}

pub type RingRef = Arc<Ring>;

fn check_names(names: &[String]) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        let valid = n.chars().next().map(|c| c.is_ascii_alphabetic()).unwrap_or(false)
            && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(Error::RingMismatch(format!("invalid variable name `{n}`")));
        }
        if names[..i].contains(n) {
            return Err(Error::RingMismatch(format!("duplicate variable `{n}`")));
        }
    }
    Ok(())
}

impl Ring {
    /// ℚ[vars] localized at the variables listed in `invertible`.
    pub fn laurent<S: AsRef<str>, T: AsRef<str>>(vars: &[S], invertible: &[T]) -> Result<RingRef> {
        let vars = vars_from(vars);
        check_names(&vars)?;
        let mut inv = vec![false; vars.len()];
        for name in invertible {
            let name = name.as_ref();
            let i = vars
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::RingMismatch(format!("unknown invertible variable `{name}`")))?;
            inv[i] = true;
        }
        Ok(Arc::new(Ring {
            vars,
            invertible: inv,
            nil: vars_from::<&str>(&[]),
            nil_degree: 0,
            shape: NilShape::None,
        }))
    }

    /// Polynomial ring ℚ[vars].
    pub fn polynomial<S: AsRef<str>>(vars: &[S]) -> RingRef {
        Self::laurent::<S, &str>(vars, &[]).expect("valid variable names")
    }

    /// Laurent ring with every variable invertible.
    pub fn torus<S: AsRef<str>>(vars: &[S]) -> RingRef {
        Self::laurent(vars, vars).expect("valid variable names")
    }

    fn extend(base: &Ring, nil: Vec<String>, nil_degree: u32, shape: NilShape) -> Result<RingRef> {
        if base.shape != NilShape::None {
            return Err(Error::RingMismatch("ring already carries nilpotents".into()));
        }
        let mut all: Vec<String> = base.vars.to_vec();
        all.extend(nil.iter().cloned());
        check_names(&all)?;
        Ok(Arc::new(Ring {
            vars: base.vars.clone(),
            invertible: base.invertible.clone(),
            nil: nil.into(),
            nil_degree,
            shape,
        }))
    }

    /// `R[ε]/(ε²)`.
    pub fn with_dual(&self, eps: &str) -> Result<RingRef> {
        Self::extend(self, vec![eps.to_string()], 1, NilShape::Dual)
    }

    /// `R[ε₁,ε₂]/(ε₁², ε₂²)`.
    pub fn with_two_parameters(&self, e1: &str, e2: &str) -> Result<RingRef> {
        Self::extend(self, vec![e1.to_string(), e2.to_string()], 2, NilShape::TwoParameter)
    }

    /// `P¹ = R ⊕ Ω_R`, with nilpotent generators `d<var>`.
    pub fn first_order_diagonal(&self) -> Result<RingRef> {
        let nil = self.vars.iter().map(|v| format!("d{v}")).collect();
        Self::extend(self, nil, 1, NilShape::FirstOrderDiagonal)
    }

    /// The ring with all nilpotents removed.
    pub fn base(&self) -> RingRef {
        Arc::new(Ring {
            vars: self.vars.clone(),
            invertible: self.invertible.clone(),
            nil: vars_from::<&str>(&[]),
            nil_degree: 0,
            shape: NilShape::None,
        })
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn nil_names(&self) -> &Vars {
        &self.nil
    }

    pub fn n_nil(&self) -> usize {
        self.nil.len()
    }

    pub fn shape(&self) -> NilShape {
        self.shape
    }

    pub fn nil_degree(&self) -> u32 {
        self.nil_degree
    }

    pub fn is_invertible_var(&self, i: usize) -> bool {
        self.invertible[i]
    }

    pub fn invertible_flags(&self) -> &[bool] {
        &self.invertible
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn nil_index(&self, name: &str) -> Option<usize> {
        self.nil.iter().position(|v| v == name)
    }

    /// Product of nilpotent monomials, or `None` when it vanishes.
    pub fn nil_product(&self, m1: u32, m2: u32) -> Option<u32> {
        if m1 & m2 != 0 {
            return None;
        }
        let m = m1 | m2;
        (m.count_ones() <= self.nil_degree).then_some(m)
    }

    /// All nonvanishing nilpotent monomials, starting with the empty one.
    pub fn nil_monomials(&self) -> Vec<u32> {
        (0u32..(1 << self.nil.len()))
            .filter(|m| m.count_ones() <= self.nil_degree)
            .collect()
    }

    /// Whether the polynomial has no negative powers of non-invertible variables.
    pub fn contains_poly(&self, p: &LaurentPoly) -> bool {
        p.terms()
            .all(|(e, _)| e.iter().zip(&self.invertible).all(|(&x, &inv)| inv || x >= 0))
    }

    pub fn same(a: &RingRef, b: &RingRef) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }

    /// A short human-readable description, e.g. `Q[u,u^-1][eps]`.
    pub fn describe(&self) -> String {
        let mut s = String::from("Q[");
        let mut parts = Vec::new();
        for (v, &inv) in self.vars.iter().zip(&self.invertible) {
            parts.push(v.clone());
            if inv {
                parts.push(format!("{v}^-1"));
            }
        }
        s.push_str(&parts.join(","));
        s.push(']');
        if !self.nil.is_empty() {
            s.push('[');
            s.push_str(&self.nil.join(","));
            s.push(']');
        }
        s
    }
}

/// An element of a [`Ring`]: a body in the Laurent ring plus coefficients on
/// each nonvanishing nilpotent monomial.
#[derive(Clone, PartialEq, Eq)]
pub struct RingElem {
    ring: RingRef,
    parts: BTreeMap<u32, LaurentPoly>,
}

impl RingElem {
    pub fn zero(ring: &RingRef) -> Self {
        RingElem {
            ring: ring.clone(),
            parts: BTreeMap::new(),
        }
    }

    pub fn one(ring: &RingRef) -> Self {
        Self::from_poly(ring, LaurentPoly::one(ring.vars()))
    }

    pub fn constant(ring: &RingRef, c: Scalar) -> Self {
        Self::from_poly(ring, LaurentPoly::constant(ring.vars(), c))
    }

    pub fn int(ring: &RingRef, n: i64) -> Self {
        Self::constant(ring, Scalar::from_int(n))
    }

    pub fn var(ring: &RingRef, i: usize) -> Self {
        Self::from_poly(ring, LaurentPoly::var(ring.vars(), i))
    }

    pub fn monomial(ring: &RingRef, c: Scalar, exps: Exponents) -> Self {
        Self::from_poly(ring, LaurentPoly::monomial(ring.vars(), c, exps))
    }

    /// The nilpotent generator `ε_j`.
    pub fn nil_gen(ring: &RingRef, j: usize) -> Self {
        Self::from_parts(ring, [(1u32 << j, LaurentPoly::one(ring.vars()))])
    }

    pub fn from_poly(ring: &RingRef, p: LaurentPoly) -> Self {
        assert!(
            p.same_vars(&LaurentPoly::zero(ring.vars())),
            "polynomial variables differ from ring"
        );
        let mut parts = BTreeMap::new();
        if !p.is_zero() {
            parts.insert(0, p);
        }
        RingElem {
            ring: ring.clone(),
            parts,
        }
    }

    /// Builds an element from `(nil monomial, coefficient)` pairs; vanishing
    /// monomials are discarded.
    pub fn from_parts(ring: &RingRef, parts: impl IntoIterator<Item = (u32, LaurentPoly)>) -> Self {
        let mut out = Self::zero(ring);
        for (m, p) in parts {
            if m.count_ones() > ring.nil_degree || m >> ring.n_nil() != 0 {
                continue;
            }
            out.add_part(m, &p);
        }
        out
    }

    fn add_part(&mut self, m: u32, p: &LaurentPoly) {
        if p.is_zero() {
            return;
        }
        match self.parts.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(p);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn parts(&self) -> impl Iterator<Item = (u32, &LaurentPoly)> {
        self.parts.iter().map(|(m, p)| (*m, p))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// The reduction modulo the nilpotent ideal, as a Laurent polynomial.
    pub fn body(&self) -> LaurentPoly {
        self.nil_part(0)
    }

    /// Coefficient of the nilpotent monomial `m`.
    pub fn nil_part(&self, m: u32) -> LaurentPoly {
        self.parts
            .get(&m)
            .cloned()
            .unwrap_or_else(|| LaurentPoly::zero(self.ring.vars()))
    }

    /// Whether the element lies in the nilpotent ideal.
    pub fn is_nilpotent(&self) -> bool {
        !self.parts.contains_key(&0)
    }

    /// The element with its body removed.
    pub fn nilpotent_part(&self) -> RingElem {
        let mut out = self.clone();
        out.parts.remove(&0);
        out
    }

    /// Reduction modulo the nilpotent ideal, as an element of the base ring.
    pub fn project(&self) -> RingElem {
        RingElem::from_poly(&self.ring.base(), self.body())
    }

    /// The same element viewed in a ring whose variables and nilpotents
    /// include this ring's, matched by name.
    pub fn embed(&self, target: &RingRef) -> Result<RingElem> {
        let mut vmap = Vec::new();
        for name in self.ring.vars().iter() {
            let i = target
                .var_index(name)
                .ok_or_else(|| Error::RingMismatch(format!("variable `{name}` missing in {}", target.describe())))?;
            vmap.push(i);
        }
        let mut nmap = Vec::new();
        for name in self.ring.nil_names().iter() {
            let j = target
                .nil_index(name)
                .ok_or_else(|| Error::RingMismatch(format!("nilpotent `{name}` missing in {}", target.describe())))?;
            nmap.push(j);
        }
        let mut out = RingElem::zero(target);
        for (m, p) in &self.parts {
            let mut m2 = 0u32;
            for (j, &k) in nmap.iter().enumerate() {
                if m & (1 << j) != 0 {
                    m2 |= 1 << k;
                }
            }
            if m2.count_ones() <= target.nil_degree() {
                out.add_part(m2, &p.relabel(target.vars(), &vmap));
            }
        }
        if !out.in_ring() {
            return Err(Error::NotInRing(format!("{self} in {}", target.describe())));
        }
        Ok(out)
    }

    fn check_ring(&self, other: &RingElem) {
        assert!(
            Ring::same(&self.ring, &other.ring),
            "ring mismatch: {} vs {}",
            self.ring.describe(),
            other.ring.describe()
        );
    }

    pub fn add_ref(&self, other: &RingElem) -> RingElem {
        self.check_ring(other);
        let mut out = self.clone();
        for (m, p) in &other.parts {
            out.add_part(*m, p);
        }
        out
    }

    pub fn sub_ref(&self, other: &RingElem) -> RingElem {
        self.check_ring(other);
        let mut out = self.clone();
        for (m, p) in &other.parts {
            out.add_part(*m, &-p);
        }
        out
    }

    pub fn mul_ref(&self, other: &RingElem) -> RingElem {
        self.check_ring(other);
        let mut out = RingElem::zero(&self.ring);
        for (m1, p1) in &self.parts {
            for (m2, p2) in &other.parts {
                if let Some(m) = self.ring.nil_product(*m1, *m2) {
                    out.add_part(m, &p1.mul_ref(p2));
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> RingElem {
        RingElem {
            ring: self.ring.clone(),
            parts: if c.is_zero() {
                BTreeMap::new()
            } else {
                self.parts.iter().map(|(m, p)| (*m, p.scale(c))).collect()
            },
        }
    }

    /// Multiplies by the nilpotent monomial `m` (zero if it vanishes).
    pub fn mul_nil(&self, m: u32) -> RingElem {
        let mut out = RingElem::zero(&self.ring);
        for (m1, p) in &self.parts {
            if let Some(k) = self.ring.nil_product(*m1, m) {
                out.add_part(k, p);
            }
        }
        out
    }

    /// Whether the body is a unit of the base ring: a single term whose
    /// variables are all invertible.
    pub fn is_unit(&self) -> bool {
        let body = self.body();
        match body.as_monomial() {
            Some((_, e)) => e
                .iter()
                .enumerate()
                .all(|(i, &x)| x == 0 || self.ring.is_invertible_var(i)),
            None => false,
        }
    }

    /// Inverse of a unit: `(b + n)⁻¹ = b⁻¹ Σ_k (−n b⁻¹)^k`, a finite sum
    /// because `n` is nilpotent.
    pub fn inverse(&self) -> Result<RingElem> {
        if !self.is_unit() {
            return Err(Error::NotInvertible(format!("{self} in {}", self.ring.describe())));
        }
        let binv = RingElem::from_poly(&self.ring, self.body().monomial_inverse()?);
        let n = self.nilpotent_part();
        let q = n.mul_ref(&binv).neg_ref();
        let mut term = RingElem::one(&self.ring);
        let mut sum = RingElem::one(&self.ring);
        for _ in 0..self.ring.nil_degree() {
            term = term.mul_ref(&q);
            if term.is_zero() {
                break;
            }
            sum = sum.add_ref(&term);
        }
        Ok(binv.mul_ref(&sum))
    }

    pub fn pow(&self, e: i32) -> Result<RingElem> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut result = RingElem::one(&self.ring);
        let mut base = self.clone();
        let mut n = e as u32;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_ref(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_ref(&base);
            }
        }
        Ok(result)
    }

    pub fn neg_ref(&self) -> RingElem {
        self.scale(&-Scalar::one())
    }

    /// ∂/∂x_i on base variables; nilpotent generators are constants.
    pub fn partial(&self, i: usize) -> RingElem {
        let mut out = RingElem::zero(&self.ring);
        for (m, p) in &self.parts {
            out.add_part(*m, &p.partial(i));
        }
        out
    }

    /// Applies `f` to every Laurent coefficient.
    pub fn map_parts(&self, mut f: impl FnMut(&LaurentPoly) -> LaurentPoly) -> RingElem {
        let mut out = RingElem::zero(&self.ring);
        for (m, p) in &self.parts {
            out.add_part(*m, &f(p));
        }
        out
    }

    pub fn max_abs_exponent(&self) -> i32 {
        self.parts.values().map(|p| p.max_abs_exponent()).max().unwrap_or(0)
    }

    /// Whether no non-invertible variable appears with a negative power.
    pub fn in_ring(&self) -> bool {
        self.parts.values().all(|p| self.ring.contains_poly(p))
    }
}

impl Add for &RingElem {
    type Output = RingElem;
    fn add(self, rhs: &RingElem) -> RingElem {
        self.add_ref(rhs)
    }
}

impl Sub for &RingElem {
    type Output = RingElem;
    fn sub(self, rhs: &RingElem) -> RingElem {
        self.sub_ref(rhs)
    }
}

impl Mul for &RingElem {
    type Output = RingElem;
    fn mul(self, rhs: &RingElem) -> RingElem {
        self.mul_ref(rhs)
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        self.neg_ref()
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<&str> = self
            .ring
            .vars()
            .iter()
            .chain(self.ring.nil_names().iter())
            .map(String::as_str)
            .collect();
        let nv = self.ring.nvars();
        let mut first = true;
        for (m, p) in &self.parts {
            for (e, c) in p.terms().collect::<Vec<_>>().into_iter().rev() {
                let mut exps = e.clone();
                for j in 0..self.ring.n_nil() {
                    exps.push(((m >> j) & 1) as i32);
                }
                debug_assert_eq!(exps.len(), nv + self.ring.n_nil());
                write_term(f, &names, &exps, c, first)?;
                first = false;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_numbers_square_to_zero() {
        let r = Ring::polynomial(&["x"]).with_dual("eps").unwrap();
        let e = RingElem::nil_gen(&r, 0);
        assert!(e.mul_ref(&e).is_zero());
        let x = RingElem::var(&r, 0);
        let a = x.add_ref(&e);
        // (x + ε)² = x² + 2xε
        let sq = a.mul_ref(&a);
        assert_eq!(sq.to_string(), "x^2 + 2*x*eps");
    }

    #[test]
    fn two_parameter_mixed_monomial_survives() {
        let r = Ring::polynomial(&["x"]).with_two_parameters("e1", "e2").unwrap();
        let e1 = RingElem::nil_gen(&r, 0);
        let e2 = RingElem::nil_gen(&r, 1);
        let p = e1.mul_ref(&e2);
        assert!(!p.is_zero());
        assert!(p.mul_ref(&p).is_zero());
        assert!(e1.mul_ref(&e1).is_zero());
    }

    #[test]
    fn first_order_diagonal_ideal_squares_to_zero() {
        let r = Ring::polynomial(&["x", "y"]).first_order_diagonal().unwrap();
        let dx = RingElem::nil_gen(&r, 0);
        let dy = RingElem::nil_gen(&r, 1);
        assert!(dx.mul_ref(&dy).is_zero());
        assert_eq!(r.nil_names().to_vec(), vec!["dx", "dy"]);
    }

    #[test]
    fn unit_inverse_over_dual_numbers() {
        let r = Ring::torus(&["u"]).with_dual("eps").unwrap();
        let u = RingElem::var(&r, 0);
        let e = RingElem::nil_gen(&r, 0);
        let a = u.scale(&Scalar::from_int(3)).add_ref(&e.mul_ref(&u).mul_ref(&u));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul_ref(&inv), RingElem::one(&r));
    }

    #[test]
    fn non_units_are_rejected() {
        let r = Ring::polynomial(&["u"]);
        assert!(RingElem::var(&r, 0).inverse().is_err());
        let t = Ring::torus(&["u"]);
        let s = RingElem::var(&t, 0).add_ref(&RingElem::one(&t));
        assert!(s.inverse().is_err());
    }

    #[test]
    fn projection_is_multiplicative() {
        let r = Ring::polynomial(&["x"]).with_dual("eps").unwrap();
        let x = RingElem::var(&r, 0);
        let e = RingElem::nil_gen(&r, 0);
        let a = x.add_ref(&e);
        let b = x.mul_ref(&x).sub_ref(&e.mul_ref(&x));
        assert_eq!(a.mul_ref(&b).project(), a.project().mul_ref(&b.project()));
    }
}
