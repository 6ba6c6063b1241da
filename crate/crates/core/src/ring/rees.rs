//! The first-order diagonal ring `P¹ = A ⊕ Ω_A`, its Rees family `P¹[t]`,
//! and the trivialization `P¹[t] ≅ Ω t⁻¹ ⊕ P¹[t]`.

use std::collections::BTreeMap;
use std::fmt;

use super::element::{NilShape, Ring, RingElem, RingRef};
use super::hom::RingHom;
use super::scalar::Scalar;
use crate::error::{Error, Result};

pub const DEFAULT_T_BOUND: i32 = 4;

/// Data attached to a base ring `A`: the ring `P¹` with nilpotents `dx_i`.
#[derive(Debug, Clone)]
pub struct FirstOrderDiagonal {
    base: RingRef,
    p1: RingRef,
}

impl FirstOrderDiagonal {
    pub fn new(base: &RingRef) -> Result<Self> {
        if base.shape() != NilShape::None {
            return Err(Error::RingMismatch("base ring must not carry nilpotents".into()));
        }
        Ok(FirstOrderDiagonal {
            base: base.clone(),
            p1: base.first_order_diagonal()?,
        })
    }

    pub fn base(&self) -> &RingRef {
        &self.base
    }

    pub fn p1(&self) -> &RingRef {
        &self.p1
    }

    /// `d₀ : a ↦ (a, 0)`.
    pub fn d0(&self) -> RingHom {
        let v = (0..self.base.nvars()).map(|i| RingElem::var(&self.p1, i)).collect();
        RingHom::new(&self.base, &self.p1, v, vec![]).expect("d0 is a homomorphism")
    }

    /// `d₁ : a ↦ (a, da)`.
    pub fn d1(&self) -> RingHom {
        let v = (0..self.base.nvars())
            .map(|i| RingElem::var(&self.p1, i).add_ref(&RingElem::nil_gen(&self.p1, i)))
            .collect();
        RingHom::new(&self.base, &self.p1, v, vec![]).expect("d1 is a homomorphism")
    }

    /// The diagonal restriction `r : P¹ → A`, returned inside `P¹`.
    pub fn r(&self, a: &RingElem) -> RingElem {
        RingElem::from_poly(&self.p1, a.body())
    }

    /// `da ∈ Ω ⊂ P¹`.
    pub fn differential(&self, a: &RingElem) -> RingElem {
        self.d1().apply(a).sub_ref(&self.d0().apply(a))
    }
}

/// A truncated element `Σ_k a_k t^k` with coefficients in `P¹`.
///
/// The same type holds trivialized elements, whose degree `−1` coefficient
/// lies in `Ω`.
#[derive(Clone, PartialEq, Eq)]
pub struct ReesElem {
    p1: RingRef,
    bound: i32,
    coeffs: BTreeMap<i32, RingElem>,
}

impl ReesElem {
    pub fn zero(p1: &RingRef, bound: i32) -> Self {
        ReesElem {
            p1: p1.clone(),
            bound,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs(p1: &RingRef, bound: i32, coeffs: impl IntoIterator<Item = (i32, RingElem)>) -> Result<Self> {
        let mut out = Self::zero(p1, bound);
        for (k, c) in coeffs {
            out.add_coeff(k, &c)?;
        }
        Ok(out)
    }

    fn add_coeff(&mut self, k: i32, c: &RingElem) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        if k > self.bound {
            return Err(Error::DegreeOverflow {
                degree: k as i64,
                bound: self.bound as i64,
            });
        }
        if k < -1 || (k == -1 && !c.is_nilpotent()) {
            return Err(Error::NotInRing(format!("{c} in t-degree {k}")));
        }
        let slot = self.coeffs.entry(k).or_insert_with(|| RingElem::zero(&self.p1));
        *slot = slot.add_ref(c);
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
        Ok(())
    }

    pub fn coeff(&self, k: i32) -> RingElem {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| RingElem::zero(&self.p1))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i32, &RingElem)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn bound(&self) -> i32 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_ref(&self, other: &ReesElem) -> Result<ReesElem> {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_coeff(*k, c)?;
        }
        Ok(out)
    }

    /// Product in `P¹[t, t⁻¹]`; fails with `DegreeOverflow` past the bound.
    pub fn mul_ref(&self, other: &ReesElem) -> Result<ReesElem> {
        let mut out = Self::zero(&self.p1, self.bound);
        for (k1, c1) in &self.coeffs {
            for (k2, c2) in &other.coeffs {
                let c = c1.mul_ref(c2);
                if !c.is_zero() {
                    out.add_coeff(k1 + k2, &c)?;
                }
            }
        }
        Ok(out)
    }

    /// Multiplies the degree-`k` coefficient by `λ^k`.
    pub fn rescale_t(&self, lambda: &Scalar) -> Result<ReesElem> {
        let mut out = Self::zero(&self.p1, self.bound);
        for (k, c) in &self.coeffs {
            out.add_coeff(*k, &c.scale(&lambda.pow(*k)?))?;
        }
        Ok(out)
    }
}

impl fmt::Display for ReesElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(k, c)| format!("({c})*t^{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for ReesElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `Σ a_k t^k ↦ Σ (a_{k+1} − r(a_{k+1}) + r(a_k)) t^k`.
pub fn rees_trivialize(a: &ReesElem) -> Result<ReesElem> {
    let mut out = ReesElem::zero(&a.p1, a.bound);
    for (k, c) in &a.coeffs {
        if *k < 0 {
            return Err(Error::NotInRing(format!("negative t-degree {k} in P1[t]")));
        }
        out.add_coeff(*k, &RingElem::from_poly(&a.p1, c.body()))?;
        out.add_coeff(k - 1, &c.nilpotent_part())?;
    }
    Ok(out)
}

/// `Σ a'_k t^k ↦ Σ (r(a'_k) + a'_{k−1} − r(a'_{k−1})) t^k`.
pub fn rees_untrivialize(a: &ReesElem) -> Result<ReesElem> {
    let mut out = ReesElem::zero(&a.p1, a.bound);
    for (k, c) in &a.coeffs {
        out.add_coeff(*k, &RingElem::from_poly(&a.p1, c.body()))?;
        out.add_coeff(k + 1, &c.nilpotent_part())?;
    }
    Ok(out)
}

/// `d₀(a) = a` and `p_t(a) = a + t·da` as elements of `P¹[t]`.
pub fn rees_diagonal_pair(diag: &FirstOrderDiagonal, a: &RingElem, bound: i32) -> Result<(ReesElem, ReesElem)> {
    let d0 = diag.d0().apply(a);
    let da = diag.differential(a);
    let first = ReesElem::from_coeffs(diag.p1(), bound, [(0, d0.clone())])?;
    let second = ReesElem::from_coeffs(diag.p1(), bound, [(0, d0), (1, da)])?;
    Ok((first, second))
}

/// Evaluates `Σ a_k t^k ↦ Σ F_μ(a_k) (c·b)^k`, where `F_μ : P¹ → C[ε]` sends
/// `x ↦ f(x)` and `dx ↦ μ·ε·D(x)`; `b` is the last variable of the target.
struct RealizeMap {
    f_mu: RingHom,
    b: RingElem,
}

impl RealizeMap {
    fn new(diag: &FirstOrderDiagonal, delta: &RingHom, target: &RingRef, mu: &Scalar, c: &Scalar) -> Result<Self> {
        let n = diag.base().nvars();
        let mut vars = Vec::with_capacity(n);
        let mut nil = Vec::with_capacity(n);
        for i in 0..n {
            let img = delta.var_image(i).embed(target)?;
            vars.push(RingElem::from_poly(target, img.body()));
            nil.push(img.nilpotent_part().scale(mu));
        }
        let f_mu = RingHom::new(diag.p1(), target, vars, nil)?;
        let b = RingElem::var(target, target.nvars() - 1).scale(c);
        Ok(RealizeMap { f_mu, b })
    }

    fn apply(&self, a: &ReesElem) -> Result<RingElem> {
        let mut out = RingElem::zero(self.f_mu.target());
        for (k, c) in a.coeffs() {
            if k < 0 {
                return Err(Error::NotInRing("negative t-degree".into()));
            }
            out = out.add_ref(&self.f_mu.apply(c).mul_ref(&self.b.pow(k)?));
        }
        Ok(out)
    }
}

/// Outcome of [`gm_twist_check`], with the first disagreeing test element.
#[derive(Debug, Clone)]
pub struct TwistReport {
    pub holds: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

/// Compares two ways of twisting a tangent vector `δ = f + εD : A → C[ε]` by
/// `λ ∈ 𝔾ₘ` on the Rees family: (1) trivialize, rescale `t` by `λ`,
/// untrivialize, and realize through `(ι, δ)`; (2) realize directly through
/// the pair with `b ↦ λb` and `D ↦ λ⁻¹D`.
///
/// `t` is realized by a fresh symbolic variable `b` adjoined to `C`. The
/// comparison runs over the monomials `x_i t^k`, `dx_i t^k` for `k ≤ bound`
/// and over `extra` test elements.
pub fn gm_twist_check(delta: &RingHom, lambda: &Scalar, bound: i32, extra: &[ReesElem]) -> Result<TwistReport> {
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    let (diag, target) = twist_rings(delta)?;
    let inv = lambda.inv()?;
    let route1 = RealizeMap::new(&diag, delta, &target, &Scalar::one(), &Scalar::one())?;
    let route2 = RealizeMap::new(&diag, delta, &target, &inv, lambda)?;
    let mut tests: Vec<ReesElem> = Vec::new();
    for k in 0..=bound {
        for i in 0..diag.base().nvars() {
            tests.push(ReesElem::from_coeffs(
                diag.p1(),
                bound,
                [(k, RingElem::var(diag.p1(), i))],
            )?);
            tests.push(ReesElem::from_coeffs(
                diag.p1(),
                bound,
                [(k, RingElem::nil_gen(diag.p1(), i))],
            )?);
        }
        tests.push(ReesElem::from_coeffs(
            diag.p1(),
            bound,
            [(k, RingElem::one(diag.p1()))],
        )?);
    }
    for e in extra {
        if !Ring::same(&e.p1, diag.p1()) {
            return Err(Error::RingMismatch("test element is not in P1[t]".into()));
        }
        tests.push(e.clone());
    }
    let mut checked = 0;
    for a in &tests {
        let scaled = rees_untrivialize(&rees_trivialize(a)?.rescale_t(lambda)?)?;
        let lhs = route1.apply(&scaled)?;
        let rhs = route2.apply(a)?;
        checked += 1;
        if lhs != rhs {
            return Ok(TwistReport {
                holds: false,
                checked,
                witness: Some(format!("{a}: {lhs} != {rhs}")),
            });
        }
    }
    Ok(TwistReport {
        holds: true,
        checked,
        witness: None,
    })
}

/// `P¹` over the source of `δ`, and `C[b][ε]` with `b` a fresh variable.
pub fn twist_rings(delta: &RingHom) -> Result<(FirstOrderDiagonal, RingRef)> {
    let diag = FirstOrderDiagonal::new(delta.source())?;
    let t = delta.target();
    if t.shape() != NilShape::Dual {
        return Err(Error::UnsupportedTarget(format!(
            "tangent vectors must land in dual numbers, got {}",
            t.describe()
        )));
    }
    let mut name = String::from("b");
    while t.var_index(&name).is_some() || t.nil_index(&name).is_some() {
        name.push('_');
    }
    let mut vars: Vec<String> = t.vars().to_vec();
    vars.push(name);
    let inv: Vec<String> = t
        .vars()
        .iter()
        .zip(t.invertible_flags())
        .filter(|(_, &f)| f)
        .map(|(v, _)| v.clone())
        .collect();
    let target = Ring::laurent(&vars, &inv)?.with_dual(&t.nil_names()[0])?;
    Ok((diag, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse::parse_elem;

    fn diag() -> FirstOrderDiagonal {
        FirstOrderDiagonal::new(&Ring::polynomial(&["x", "y"])).unwrap()
    }

    #[test]
    fn constants_trivialize_to_themselves() {
        let d = diag();
        let a = parse_elem(d.p1(), "x^2 + y").unwrap();
        let e = ReesElem::from_coeffs(d.p1(), 4, [(0, a.clone())]).unwrap();
        let t = rees_trivialize(&e).unwrap();
        assert!(t.coeff(-1).is_zero());
        assert_eq!(t.coeff(0), a);
    }

    #[test]
    fn diagonal_pair_becomes_t_independent() {
        let d = diag();
        let a = parse_elem(d.base(), "x*y^2 + 3").unwrap();
        let (p0, pt) = rees_diagonal_pair(&d, &a, 4).unwrap();
        let t0 = rees_trivialize(&p0).unwrap();
        let t1 = rees_trivialize(&pt).unwrap();
        assert_eq!(t0.coeffs().map(|(k, _)| k).collect::<Vec<_>>(), vec![0]);
        assert_eq!(t1.coeffs().map(|(k, _)| k).collect::<Vec<_>>(), vec![0]);
        assert_eq!(t1.coeff(0), d.d1().apply(&a));
    }

    #[test]
    fn overflow_is_an_error() {
        let d = diag();
        let x = RingElem::var(d.p1(), 0);
        let a = ReesElem::from_coeffs(d.p1(), 4, [(3, x.clone())]).unwrap();
        assert!(matches!(
            a.mul_ref(&a),
            Err(Error::DegreeOverflow { degree: 6, bound: 4 })
        ));
        let dx = RingElem::nil_gen(d.p1(), 0);
        let top = ReesElem::from_coeffs(d.p1(), 4, [(4, dx)]).unwrap();
        assert!(matches!(rees_untrivialize(&top), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn twist_example() {
        let a = Ring::polynomial(&["x"]);
        let c = Ring::polynomial(&["c"]).with_dual("eps").unwrap();
        let delta = RingHom::from_literals(&a, &c, &["c + eps"], &[]).unwrap();
        for l in [Scalar::from_int(2), Scalar::one(), Scalar::ratio(-1, 3)] {
            assert!(gm_twist_check(&delta, &l, 4, &[]).unwrap().holds);
        }
        assert_eq!(
            gm_twist_check(&delta, &Scalar::zero(), 4, &[]).unwrap_err(),
            Error::ZeroLambda
        );
    }
}
