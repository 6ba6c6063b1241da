use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cech::CoverRef;
use crate::error::{Error, Result};
use crate::ring::{Ring, RingElem, Scalar};
use crate::sampling;

/// A Čech 1-cocycle of vector fields on a curve cover:
/// `χ_{αβ} = c_{αβ} ∂/∂x_α` on each overlap `α < β`.
#[derive(Debug, Clone)]
pub struct TangentCocycle {
    cover: CoverRef,
    coeffs: BTreeMap<(usize, usize), RingElem>,
}

impl TangentCocycle {
    /// Checks rings and the triple-overlap condition.
    pub fn new(cover: &CoverRef, coeffs: BTreeMap<(usize, usize), RingElem>) -> Result<Self> {
        if !cover.is_curve() {
            return Err(Error::Unsupported(
                "tangent cocycles are implemented on curve covers".into(),
            ));
        }
        for (a, b) in cover.pairs() {
            let c = coeffs
                .get(&(a, b))
                .ok_or_else(|| Error::CocycleViolation(format!("no vector field on overlap ({a}, {b})")))?;
            if !Ring::same(c.ring(), &cover.overlap(a, b).ring) {
                return Err(Error::RingMismatch(format!(
                    "vector field over {} on overlap over {}",
                    c.ring().describe(),
                    cover.overlap(a, b).ring.describe()
                )));
            }
        }
        if coeffs.len() != cover.pairs().count() {
            return Err(Error::CocycleViolation("vector fields on unknown overlaps".into()));
        }
        let chi = TangentCocycle {
            cover: cover.clone(),
            coeffs,
        };
        chi.check_triple()?;
        Ok(chi)
    }

    pub fn zero(cover: &CoverRef) -> Self {
        TangentCocycle {
            cover: cover.clone(),
            coeffs: cover
                .pairs()
                .map(|(a, b)| ((a, b), RingElem::zero(&cover.overlap(a, b).ring)))
                .collect(),
        }
    }

    /// `q·x^k ∂/∂x_0` on the single overlap of a two-chart cover.
    pub fn monomial(cover: &CoverRef, q: Scalar, k: i32) -> Result<Self> {
        if cover.n_charts() != 2 {
            return Err(Error::Unsupported(
                "monomial cocycles are defined on two-chart covers".into(),
            ));
        }
        let ring = &cover.overlap(0, 1).ring;
        let mut exps = vec![0; ring.nvars()];
        exps[0] = k;
        let c = RingElem::monomial(ring, q, exps);
        if !c.in_ring() {
            return Err(Error::NotInRing(format!("{c}")));
        }
        Self::new(cover, BTreeMap::from([((0, 1), c)]))
    }

    /// `δv` for `v_α = a_α ∂/∂x_α`: `c_{αβ} = a_β·∂x_α/∂x_β − a_α`.
    pub fn coboundary(cover: &CoverRef, a: &[RingElem]) -> Result<Self> {
        if a.len() != cover.n_charts() {
            return Err(Error::Dimension(format!(
                "{} chart fields for {} charts",
                a.len(),
                cover.n_charts()
            )));
        }
        let mut coeffs = BTreeMap::new();
        for (x, y) in cover.pairs() {
            let ax = cover.restriction(x, y).apply(&a[x]);
            let ay = cover.restriction(y, x).apply(&a[y]);
            coeffs.insert((x, y), ay.mul_ref(&cover.jacobian(x, y)?).sub_ref(&ax));
        }
        Self::new(cover, coeffs)
    }

    /// A coboundary with random polynomial chart fields.
    pub fn random_coboundary(cover: &CoverRef, rng: &mut ChaCha8Rng, max_deg: i32) -> Result<Self> {
        let a: Vec<RingElem> = cover
            .charts()
            .iter()
            .map(|c| sampling::random_elem(rng, &c.ring, max_deg, 2))
            .collect();
        Self::coboundary(cover, &a)
    }

    pub fn cover(&self) -> &CoverRef {
        &self.cover
    }

    /// `c_{αβ}` for `α < β`.
    pub fn coefficient(&self, a: usize, b: usize) -> &RingElem {
        &self.coeffs[&(a, b)]
    }

    pub fn coefficients(&self) -> &BTreeMap<(usize, usize), RingElem> {
        &self.coeffs
    }

    pub fn add(&self, other: &TangentCocycle) -> Result<TangentCocycle> {
        if !self.cover.same_shape(&other.cover) {
            return Err(Error::RingMismatch("tangent cocycles on different covers".into()));
        }
        Ok(TangentCocycle {
            cover: self.cover.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (*k, c.add_ref(&other.coeffs[k])))
                .collect(),
        })
    }

    pub fn scale(&self, t: &Scalar) -> TangentCocycle {
        TangentCocycle {
            cover: self.cover.clone(),
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c.scale(t))).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(RingElem::is_zero)
    }

    pub fn max_abs_exponent(&self) -> i32 {
        self.coeffs.values().map(RingElem::max_abs_exponent).max().unwrap_or(0)
    }

    /// `c_{αβ}/j_{αγ} + c_{βγ}/j_{βγ} − c_{αγ}/j_{αγ} = 0`, all in the
    /// coordinate of the third chart.
    fn check_triple(&self) -> Result<()> {
        let Some(t) = self.cover.triple() else {
            return Ok(());
        };
        // c_{αβ} in the ∂/∂x_2 frame, using ∂x_α/∂x_2 from the overlap (α, 2)
        let in_third = |a: usize, b: usize| -> Result<RingElem> {
            let c = t.from_pairs[&(a, b)].apply(&self.coeffs[&(a, b)]);
            let j = t.from_pairs[&(a, 2)].apply(&self.cover.jacobian(a, 2)?);
            Ok(c.mul_ref(&j.inverse()?))
        };
        let (c01, c12, c02) = (in_third(0, 1)?, in_third(1, 2)?, in_third(0, 2)?);
        let defect = c01.add_ref(&c12).sub_ref(&c02);
        if !defect.is_zero() {
            return Err(Error::CocycleViolation(format!(
                "chi_01 + chi_12 - chi_02 = ({defect}) d/dx_2 on the triple overlap"
            )));
        }
        Ok(())
    }
}

impl PartialEq for TangentCocycle {
    fn eq(&self, other: &Self) -> bool {
        self.cover.same_shape(&other.cover) && self.coeffs == other.coeffs
    }
}

impl fmt::Display for TangentCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ((a, b), c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}{b}: ({c}) d/d{}", self.cover.chart(*a).ring.vars()[0])?;
        }
        Ok(())
    }
}

/// `n` cocycles `q·u^k ∂/∂u` with `k ∈ [−3, 4]` and small nonzero `q`.
pub fn seeded_family(cover: &CoverRef, seed: u64, n: usize) -> Result<Vec<TangentCocycle>> {
    let mut rng = sampling::sub_rng(seed, "tangent-family");
    (0..n)
        .map(|_| {
            let k = rng.gen_range(-3..=4);
            let q = sampling::random_nonzero_scalar(&mut rng);
            TangentCocycle::monomial(cover, q, k)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::Cover;
    use crate::ring::parse_elem;

    #[test]
    fn coboundaries_on_three_charts_are_cocycles() {
        let cover = Cover::projective_line_three();
        let mut rng = sampling::rng(2);
        for _ in 0..5 {
            TangentCocycle::random_coboundary(&cover, &mut rng, 3).unwrap();
        }
    }

    #[test]
    fn broken_triple_condition_is_reported() {
        let cover = Cover::projective_line_three();
        let e = |a: usize, b: usize, s: &str| ((a, b), parse_elem(&cover.overlap(a, b).ring, s).unwrap());
        let coeffs = BTreeMap::from([e(0, 1, "u"), e(1, 2, "0"), e(0, 2, "0")]);
        assert!(matches!(
            TangentCocycle::new(&cover, coeffs),
            Err(Error::CocycleViolation(_))
        ));
    }

    #[test]
    fn projective_line_coboundary_formula() {
        let cover = Cover::projective_line();
        let a = [
            parse_elem(&cover.chart(0).ring, "u").unwrap(),
            parse_elem(&cover.chart(1).ring, "v^2").unwrap(),
        ];
        let chi = TangentCocycle::coboundary(&cover, &a).unwrap();
        // v² ∂_v = u⁻² · (−u²) ∂_u = −∂_u, minus u ∂_u
        assert_eq!(
            chi.coefficient(0, 1),
            &parse_elem(&cover.overlap(0, 1).ring, "-1 - u").unwrap()
        );
    }

    #[test]
    fn family_is_deterministic() {
        let cover = Cover::projective_line();
        let f1 = seeded_family(&cover, 7, 50).unwrap();
        let f2 = seeded_family(&cover, 7, 50).unwrap();
        assert_eq!(f1, f2);
        assert!(f1.iter().all(|c| !c.is_zero()));
    }
}
