use std::collections::BTreeMap;

use crate::cech::{
    is_hyper_coboundary, validate_higgs, CheckStatus, Complex, DegreeWindow, HiggsBundleData, HiggsComplex,
    HyperCocycle, MThetaSign, VectorBundle,
};
use crate::error::{Error, Result};
use crate::ring::{Matrix, RingElem, RingRef, Scalar};

use super::tangent::TangentCocycle;

pub const EPS: &str = "eps";

fn check_cover(h: &HiggsBundleData, chi: &TangentCocycle) -> Result<()> {
    if !h.cover().same_shape(chi.cover()) {
        return Err(Error::CocycleViolation(
            "vector fields live on a different cover".into(),
        ));
    }
    Ok(())
}

/// `θ_χ` on each overlap `α < β`: the pairing `c_{αβ}·φ_α`, moved to the
/// `β`-frame. The same section computed from the `β` presentation
/// `c_{αβ}·(∂x_β/∂x_α)·φ_β` is required to agree.
pub fn contract(h: &HiggsBundleData, chi: &TangentCocycle) -> Result<BTreeMap<(usize, usize), Matrix>> {
    check_cover(h, chi)?;
    let cover = h.cover();
    let mut out = BTreeMap::new();
    for (a, b) in cover.pairs() {
        let c = chi.coefficient(a, b);
        let g = h.bundle().transition(a, b)?;
        let phi_a = h.field(a).apply_hom(cover.restriction(a, b))?;
        let phi_b = h.field(b).apply_hom(cover.restriction(b, a))?;
        let via_a = g.conjugate(&phi_a.scale_elem(c))?;
        let via_b = phi_b.scale_elem(&c.mul_ref(&cover.jacobian(a, b)?.inverse()?));
        if via_a != via_b {
            return Err(Error::CocycleViolation(format!(
                "contraction depends on the chart: {via_a} from `{}`, {via_b} from `{}`",
                cover.chart(a).name,
                cover.chart(b).name
            )));
        }
        out.insert((a, b), via_a);
    }
    Ok(out)
}

/// `(θ_χ, 0)`, with the hyper-cocycle conditions checked.
pub fn ks_cocycle(h: &HiggsBundleData, chi: &TangentCocycle) -> Result<HyperCocycle> {
    ks_cocycle_with(h, chi, MThetaSign::Standard)
}

pub fn ks_cocycle_with(h: &HiggsBundleData, chi: &TangentCocycle, sign: MThetaSign) -> Result<HyperCocycle> {
    let s = contract(h, chi)?;
    let mut c = HyperCocycle::zero(h);
    c.s = s;
    check_conditions(&HiggsComplex::with_sign(h, sign)?, &c)?;
    Ok(c)
}

/// Conditions (1)-(3) as an error carrying the first failing index.
pub fn check_conditions(cx: &HiggsComplex, c: &HyperCocycle) -> Result<()> {
    for (i, status) in cx.conditions(c)?.into_iter().enumerate() {
        if let CheckStatus::Fail(witness) = status {
            return Err(Error::ConditionFailed {
                index: i as u8 + 1,
                witness,
            });
        }
    }
    Ok(())
}

/// A Higgs bundle over `O[ε]` (or `O[ε₁, ε₂]`) together with the bundle it
/// deforms.
#[derive(Debug, Clone)]
pub struct DeformedHiggsBundle {
    pub base: HiggsBundleData,
    pub total: HiggsBundleData,
}

/// The coefficient of a nilpotent monomial, as a matrix over `base`.
pub fn nil_coefficient(m: &Matrix, mask: u32, base: &RingRef) -> Matrix {
    let mut out = Matrix::zero(base, m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, RingElem::from_poly(base, m.get(i, j).nil_part(mask)));
        }
    }
    out
}

impl DeformedHiggsBundle {
    /// Whether setting the nilpotents to zero recovers the base exactly.
    pub fn reduces_to_base(&self) -> bool {
        let cover = self.base.cover();
        cover.pairs().all(|(a, b)| {
            let r = &cover.overlap(a, b).ring;
            match (
                self.total.bundle().transition(a, b),
                self.base.bundle().transition(a, b),
            ) {
                (Ok(x), Ok(y)) => nil_coefficient(&x, 0, r) == y,
                _ => false,
            }
        }) && (0..cover.n_charts())
            .all(|a| nil_coefficient(self.total.field(a), 0, &cover.chart(a).ring) == *self.base.field(a))
    }

    /// The first-order data `(s, t)` with `ĝ = g(1 + εs)`, `φ̂ = φ + εt`.
    pub fn first_order(&self) -> Result<HyperCocycle> {
        let cover = self.base.cover();
        let mut c = HyperCocycle::zero(&self.base);
        for (a, b) in cover.pairs() {
            let r = &cover.overlap(a, b).ring;
            let ghat = self.total.bundle().transition(a, b)?;
            let g = self.base.bundle().transition(a, b)?;
            c.s.insert((a, b), g.inverse()?.mul(&nil_coefficient(&ghat, 1, r))?);
        }
        for a in 0..cover.n_charts() {
            c.t[a] = nil_coefficient(self.total.field(a), 1, &cover.chart(a).ring);
        }
        Ok(c)
    }

    /// The same bundle with every field multiplied by `t`.
    pub fn scale_fields(&self, t: &Scalar) -> DeformedHiggsBundle {
        DeformedHiggsBundle {
            base: self.base.scaled(t),
            total: self.total.scaled(t),
        }
    }
}

/// `ĝ_{αβ} = g_{αβ}(1 + εs_{αβ})`, `φ̂_α = φ_α + εt_α`; the conditions
/// are checked under `sign` and the result is validated as a Higgs bundle.
pub fn build_deformation(h: &HiggsBundleData, c: &HyperCocycle) -> Result<DeformedHiggsBundle> {
    build_deformation_with(h, c, MThetaSign::Standard)
}

pub fn build_deformation_with(h: &HiggsBundleData, c: &HyperCocycle, sign: MThetaSign) -> Result<DeformedHiggsBundle> {
    check_conditions(&HiggsComplex::with_sign(h, sign)?, c)?;
    let cover = h.cover().with_dual(EPS)?;
    let r = h.rank();
    let mut transitions = BTreeMap::new();
    for (a, b) in cover.pairs() {
        let ring = &cover.overlap(a, b).ring;
        let eps = RingElem::nil_gen(ring, 0);
        let g = h.bundle().transition(a, b)?.embed(ring)?;
        let one_plus = Matrix::identity(ring, r).add(&c.s[&(a, b)].embed(ring)?.scale_elem(&eps))?;
        transitions.insert((a, b), g.mul(&one_plus)?);
    }
    let fields = (0..cover.n_charts())
        .map(|a| {
            let ring = &cover.chart(a).ring;
            let eps = RingElem::nil_gen(ring, 0);
            Ok(vec![h
                .field(a)
                .embed(ring)?
                .add(&c.t[a].embed(ring)?.scale_elem(&eps))?])
        })
        .collect::<Result<_>>()?;
    let total = HiggsBundleData::new(VectorBundle::new(&cover, r, transitions)?, fields)?;
    let report = validate_higgs(&total);
    if let Some(w) = report.first_failure() {
        return Err(Error::ValidationFailed(w));
    }
    Ok(DeformedHiggsBundle { base: h.clone(), total })
}

/// Chart automorphisms `1 + εu_α` carrying `d1` to `d2`, checked by
/// substitution: `(1 − εu_α)ĝ¹_{αβ}(1 + εu_β) = ĝ²_{αβ}` and
/// `(1 − εu_α)φ̂¹_α(1 + εu_α) = φ̂²_α`.
pub fn deformations_equivalent(
    d1: &DeformedHiggsBundle,
    d2: &DeformedHiggsBundle,
    window: Option<DegreeWindow>,
) -> Result<Option<Vec<Matrix>>> {
    deformations_equivalent_with(d1, d2, window, MThetaSign::Standard)
}

pub fn deformations_equivalent_with(
    d1: &DeformedHiggsBundle,
    d2: &DeformedHiggsBundle,
    window: Option<DegreeWindow>,
    sign: MThetaSign,
) -> Result<Option<Vec<Matrix>>> {
    if !d1.total.cover().same_shape(d2.total.cover()) || d1.base.rank() != d2.base.rank() {
        return Err(Error::RingMismatch("deformations over different rings".into()));
    }
    for a in 0..d1.base.cover().n_charts() {
        if d1.base.field(a) != d2.base.field(a) {
            return Err(Error::PreconditionViolated(
                "deformations of different Higgs bundles".into(),
            ));
        }
    }
    let diff = d2.first_order()?.sub(&d1.first_order()?)?;
    let cx = HiggsComplex::with_sign(&d1.base, sign)?;
    let Some(u) = is_hyper_coboundary(&cx, &diff, window)? else {
        return Ok(None);
    };
    verify_witness(d1, d2, &u)?;
    Ok(Some(u))
}

fn verify_witness(d1: &DeformedHiggsBundle, d2: &DeformedHiggsBundle, u: &[Matrix]) -> Result<()> {
    let cover = d1.total.cover();
    let r = d1.base.rank();
    let auto = |ring: &RingRef, m: &Matrix, sign: i64| -> Result<Matrix> {
        let eps = RingElem::nil_gen(ring, 0);
        Matrix::identity(ring, r).add(&m.embed(ring)?.scale_elem(&eps).scale(&Scalar::from_int(sign)))
    };
    for (a, b) in cover.pairs() {
        let ring = &cover.overlap(a, b).ring;
        let ua = u[a].embed(&cover.chart(a).ring)?.apply_hom(cover.restriction(a, b))?;
        let ub = u[b].embed(&cover.chart(b).ring)?.apply_hom(cover.restriction(b, a))?;
        let lhs = auto(ring, &ua, -1)?
            .mul(&d1.total.bundle().transition(a, b)?)?
            .mul(&auto(ring, &ub, 1)?)?;
        if lhs != d2.total.bundle().transition(a, b)? {
            return Err(Error::ValidationFailed(format!(
                "witness does not intertwine the transitions on `{}`-`{}`: {lhs}",
                cover.chart(a).name,
                cover.chart(b).name
            )));
        }
    }
    for (a, ua) in u.iter().enumerate() {
        let ring = &cover.chart(a).ring;
        let lhs = auto(ring, ua, -1)?.mul(d1.total.field(a))?.mul(&auto(ring, ua, 1)?)?;
        if lhs != *d2.total.field(a) {
            return Err(Error::ValidationFailed(format!(
                "witness does not intertwine the fields on `{}`: {lhs}",
                cover.chart(a).name
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct GradednessReport {
    /// `ks(tθ, χ)` equals the image of `t·ks(θ, χ)` under `(s, t_α) ↦ (s, t·t_α)`.
    pub cocycle_level: bool,
    /// The deformation of `tθ` along `χ` is equivalent to the deformation
    /// of `θ` along `tχ` with its field scaled by `t`.
    pub class_level: bool,
    pub witness: Option<String>,
}

impl GradednessReport {
    pub fn holds(&self) -> bool {
        self.cocycle_level && self.class_level
    }
}

pub fn gradedness_check(h: &HiggsBundleData, chi: &TangentCocycle, t: &Scalar) -> Result<GradednessReport> {
    if t.is_zero() {
        return Err(Error::ZeroScalar);
    }
    let ht = h.scaled(t);
    let lhs = ks_cocycle(&ht, chi)?;
    let rhs = ks_cocycle(h, chi)?.scale(t).scale_fields(t);
    let cocycle_level = lhs == rhs;
    let mut witness = (!cocycle_level).then(|| format!("ks(t theta, chi) = {lhs} but t-image = {rhs}"));
    let d1 = build_deformation(&ht, &lhs)?;
    let d2 = build_deformation(h, &ks_cocycle(h, &chi.scale(t))?)?.scale_fields(t);
    let class_level = deformations_equivalent(&d1, &d2, None)?.is_some();
    if !class_level && witness.is_none() {
        witness = Some("no equivalence between the scaled deformations".into());
    }
    Ok(GradednessReport {
        cocycle_level,
        class_level,
        witness,
    })
}

/// A default window for the Higgs complex of `h` with extra data of the
/// given degree.
pub fn window_for(cx: &HiggsComplex, extra_degree: i32) -> DegreeWindow {
    DegreeWindow::default_for(cx.data_degree().max(extra_degree), cx.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::{Cover, CoverRef};
    use crate::ring::parse_elem;
    use crate::sampling;

    fn nilpotent(cover: &CoverRef) -> HiggsBundleData {
        let e = VectorBundle::split_on_projective_line(cover, &[1, -1]).unwrap();
        let f = |a: usize, s: &str| vec![Matrix::parse(&cover.chart(a).ring, &[vec!["0", s], vec!["0", "0"]]).unwrap()];
        HiggsBundleData::new(e, vec![f(0, "1"), f(1, "-1")]).unwrap()
    }

    #[test]
    fn contraction_of_monomial_fields() {
        let cover = Cover::projective_line();
        let h = nilpotent(&cover);
        let r = cover.overlap(0, 1).ring.clone();
        for k in -3..=4 {
            let chi = TangentCocycle::monomial(&cover, Scalar::one(), k).unwrap();
            let s = contract(&h, &chi).unwrap();
            // u^k E12 moved by diag(u, u⁻¹): entry (1,2) picks up u⁻¹·u⁻¹
            let expected = Matrix::unit(&r, 2, 0, 1, parse_elem(&r, &format!("u^{}", k - 2)).unwrap());
            assert_eq!(s[&(0, 1)], expected);
        }
    }

    #[test]
    fn zero_inputs() {
        let cover = Cover::projective_line();
        let h = nilpotent(&cover);
        assert!(ks_cocycle(&h, &TangentCocycle::zero(&cover)).unwrap().is_zero());
        let flat = HiggsBundleData::zero_field(h.bundle().clone());
        let chi = TangentCocycle::monomial(&cover, Scalar::from_int(3), 2).unwrap();
        assert!(ks_cocycle(&flat, &chi).unwrap().is_zero());
        let d = build_deformation(&h, &HyperCocycle::zero(&h)).unwrap();
        assert!(d.reduces_to_base());
        assert!(deformations_equivalent(&d, &d, None)
            .unwrap()
            .unwrap()
            .iter()
            .all(Matrix::is_zero));
    }

    #[test]
    fn coboundary_deformation_is_trivial() {
        let cover = Cover::projective_line();
        let h = nilpotent(&cover);
        let cx = HiggsComplex::new(&h).unwrap();
        let mut rng = sampling::rng(11);
        let u: Vec<Matrix> = cover
            .charts()
            .iter()
            .map(|c| sampling::random_matrix(&mut rng, &c.ring, 2, 2, 2, 2))
            .collect();
        let c = cx.d0(&u).unwrap();
        let d = build_deformation(&h, &c).unwrap();
        let constant = build_deformation(&h, &HyperCocycle::zero(&h)).unwrap();
        let w = deformations_equivalent(&constant, &d, None).unwrap().unwrap();
        assert_eq!(cx.d0(&w).unwrap(), c);
    }

    #[test]
    fn flipped_sign_breaks_coboundary_deformations() {
        let cover = Cover::projective_line();
        let h = nilpotent(&cover);
        let cx = HiggsComplex::with_sign(&h, MThetaSign::Flipped).unwrap();
        let r = &cover.chart(0).ring;
        let u = vec![
            Matrix::parse(r, &[vec!["u", "0"], vec!["0", "0"]]).unwrap(),
            Matrix::zero(&cover.chart(1).ring, 2, 2),
        ];
        let c = cx.d0(&u).unwrap();
        let err = build_deformation_with(&h, &c, MThetaSign::Flipped).unwrap_err();
        assert!(matches!(err, Error::ValidationFailed(_)), "{err}");
    }

    #[test]
    fn gradedness_example() {
        let cover = Cover::projective_line();
        let h = nilpotent(&cover);
        let chi = TangentCocycle::monomial(&cover, Scalar::one(), 1).unwrap();
        let rep = gradedness_check(&h, &chi, &Scalar::from_int(2)).unwrap();
        assert!(rep.holds(), "{rep:?}");
        let both = ks_cocycle(&h.scaled(&Scalar::from_int(2)), &chi).unwrap();
        let r = cover.overlap(0, 1).ring.clone();
        // 2u·φ_u in the v-frame
        assert_eq!(
            both.s[&(0, 1)],
            Matrix::unit(&r, 2, 0, 1, parse_elem(&r, "2*u^-1").unwrap())
        );
        assert!(matches!(
            gradedness_check(&h, &chi, &Scalar::zero()),
            Err(Error::ZeroScalar)
        ));
    }
}
