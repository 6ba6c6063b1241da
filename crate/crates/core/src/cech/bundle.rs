//! Vector bundles given by transition matrices, and Higgs fields on them.
//!
//! Coefficient vectors transform by `c_α = g_{αβ} c_β` on overlaps, so an
//! endomorphism in the `α`-frame becomes `g⁻¹ M g` in the `β`-frame.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Matrix, Ring, RingElem, Scalar};

use super::cover::CoverRef;

#[derive(Debug, Clone)]
pub struct VectorBundle {
    cover: CoverRef,
    rank: usize,
    transitions: BTreeMap<(usize, usize), Matrix>,
}

impl VectorBundle {
    /// Transitions `g_{αβ}` for `α < β`, each over the overlap ring.
    pub fn new(cover: &CoverRef, rank: usize, transitions: BTreeMap<(usize, usize), Matrix>) -> Result<Self> {
        for (a, b) in cover.pairs() {
            let g = transitions.get(&(a, b)).ok_or_else(|| {
                Error::Resolution(format!(
                    "missing transition for `{}`-`{}`",
                    cover.chart(a).name,
                    cover.chart(b).name
                ))
            })?;
            if g.rows() != rank || g.cols() != rank {
                return Err(Error::Dimension(format!("transition ({a}, {b}) is not {rank}x{rank}")));
            }
            if !Ring::same(g.ring(), &cover.overlap(a, b).ring) {
                return Err(Error::RingMismatch(format!(
                    "transition ({a}, {b}) over {} instead of {}",
                    g.ring().describe(),
                    cover.overlap(a, b).ring.describe()
                )));
            }
        }
        if transitions.len() != cover.pairs().count() {
            return Err(Error::Dimension("transitions given for unknown pairs".into()));
        }
        Ok(VectorBundle {
            cover: cover.clone(),
            rank,
            transitions,
        })
    }

    /// The trivial bundle of the given rank.
    pub fn trivial(cover: &CoverRef, rank: usize) -> Self {
        let transitions = cover
            .pairs()
            .map(|(a, b)| ((a, b), Matrix::identity(&cover.overlap(a, b).ring, rank)))
            .collect();
        VectorBundle {
            cover: cover.clone(),
            rank,
            transitions,
        }
    }

    /// `O(d₁) ⊕ … ⊕ O(d_r)` on one of the built-in projective line covers
    /// (overlap coordinate `u`, charts `U`, `V` and optionally the torus
    /// chart `W` with `w = u`).
    pub fn split_on_projective_line(cover: &CoverRef, degrees: &[i32]) -> Result<Self> {
        if !cover.is_curve() || cover.n_charts() < 2 {
            return Err(Error::Unsupported("split bundles need a projective line cover".into()));
        }
        let diag = |a: usize, b: usize, sign: i32| {
            let ring = &cover.overlap(a, b).ring;
            let entries = degrees
                .iter()
                .map(|&d| RingElem::monomial(ring, Scalar::one(), vec![sign * d]))
                .collect();
            Matrix::diagonal(ring, entries)
        };
        let mut transitions = BTreeMap::new();
        transitions.insert((0, 1), diag(0, 1, 1));
        if cover.n_charts() == 3 {
            transitions.insert((0, 2), diag(0, 2, 0));
            transitions.insert((1, 2), diag(1, 2, -1));
        }
        Self::new(cover, degrees.len(), transitions)
    }

    pub fn cover(&self) -> &CoverRef {
        &self.cover
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn transitions(&self) -> &BTreeMap<(usize, usize), Matrix> {
        &self.transitions
    }

    /// `g_{ab}` on the overlap; for `a > b` this is the inverse of `g_{ba}`.
    pub fn transition(&self, a: usize, b: usize) -> Result<Matrix> {
        if a < b {
            Ok(self.transitions[&(a, b)].clone())
        } else {
            self.transitions[&(b, a)].inverse()
        }
    }

    /// Checks invertibility of every transition and, on three-chart
    /// covers, `g_{αβ} g_{βγ} = g_{αγ}` on the triple overlap.
    pub fn check_cocycle(&self) -> std::result::Result<(), String> {
        for ((a, b), g) in &self.transitions {
            if let Err(e) = g.inverse() {
                return Err(format!("g_{a}{b} = {g} is not invertible: {e}"));
            }
        }
        if let Some(t) = self.cover.triple() {
            let r = |k: (usize, usize)| self.transitions[&k].apply_hom(&t.from_pairs[&k]);
            let lhs = r((0, 1)).and_then(|x| x.mul(&r((1, 2))?)).map_err(|e| e.to_string())?;
            let rhs = r((0, 2)).map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!("g_01 g_12 = {lhs} but g_02 = {rhs}"));
            }
        }
        Ok(())
    }

    pub fn max_abs_exponent(&self) -> i32 {
        let mut m = 0;
        for g in self.transitions.values() {
            m = m.max(g.max_abs_exponent());
            if let Ok(gi) = g.inverse() {
                m = m.max(gi.max_abs_exponent());
            }
        }
        m
    }
}

/// A Higgs field given chart-wise: `θ_α = Σ_i φ_α^{(i)} dx_α^{(i)}`.
#[derive(Debug, Clone)]
pub struct HiggsBundleData {
    bundle: VectorBundle,
    fields: Vec<Vec<Matrix>>,
}

impl HiggsBundleData {
    /// One matrix per chart coordinate on each chart. Shapes and rings are
    /// checked here; the Higgs conditions are checked by [`validate_higgs`].
    pub fn new(bundle: VectorBundle, fields: Vec<Vec<Matrix>>) -> Result<Self> {
        let cover = bundle.cover().clone();
        if fields.len() != cover.n_charts() {
            return Err(Error::Dimension(format!(
                "{} field lists for {} charts",
                fields.len(),
                cover.n_charts()
            )));
        }
        for (a, fs) in fields.iter().enumerate() {
            let ring = &cover.chart(a).ring;
            if fs.len() != ring.nvars() {
                return Err(Error::Dimension(format!(
                    "chart `{}` has {} coordinates but {} field matrices",
                    cover.chart(a).name,
                    ring.nvars(),
                    fs.len()
                )));
            }
            for m in fs {
                if m.rows() != bundle.rank() || m.cols() != bundle.rank() {
                    return Err(Error::Dimension("Higgs matrices must be rank x rank".into()));
                }
                if !Ring::same(m.ring(), ring) {
                    return Err(Error::RingMismatch(format!(
                        "Higgs matrix over {} on chart over {}",
                        m.ring().describe(),
                        ring.describe()
                    )));
                }
            }
        }
        Ok(HiggsBundleData { bundle, fields })
    }

    /// The bundle with the zero Higgs field.
    pub fn zero_field(bundle: VectorBundle) -> Self {
        let cover = bundle.cover().clone();
        let fields = cover
            .charts()
            .iter()
            .map(|c| {
                (0..c.ring.nvars())
                    .map(|_| Matrix::zero(&c.ring, bundle.rank(), bundle.rank()))
                    .collect()
            })
            .collect();
        HiggsBundleData { bundle, fields }
    }

    pub fn bundle(&self) -> &VectorBundle {
        &self.bundle
    }

    pub fn cover(&self) -> &CoverRef {
        self.bundle.cover()
    }

    pub fn rank(&self) -> usize {
        self.bundle.rank()
    }

    pub fn fields(&self) -> &[Vec<Matrix>] {
        &self.fields
    }

    /// `φ_α` on a curve chart.
    pub fn field(&self, a: usize) -> &Matrix {
        &self.fields[a][0]
    }

    /// `(E, tθ)`.
    pub fn scaled(&self, t: &Scalar) -> Self {
        HiggsBundleData {
            bundle: self.bundle.clone(),
            fields: self
                .fields
                .iter()
                .map(|fs| fs.iter().map(|m| m.scale(t)).collect())
                .collect(),
        }
    }

    pub fn max_abs_exponent(&self) -> i32 {
        let f = self
            .fields
            .iter()
            .flatten()
            .map(Matrix::max_abs_exponent)
            .max()
            .unwrap_or(0);
        f.max(self.bundle.max_abs_exponent())
            .max(self.cover().max_abs_exponent())
    }

    /// The coefficients of `θ_a` along the overlap coordinates `dw_k`:
    /// `Σ_i ρ(φ_a^{(i)}) ∂ρ(x_a^{(i)})/∂w_k`.
    pub fn overlap_components(&self, a: usize, b: usize) -> Result<Vec<Matrix>> {
        let cover = self.cover();
        let rho = cover.restriction(a, b);
        let ring = rho.target();
        let r = self.rank();
        let pulled: Vec<Matrix> = self.fields[a].iter().map(|m| m.apply_hom(rho)).collect::<Result<_>>()?;
        let mut out = Vec::new();
        for k in 0..ring.nvars() {
            let mut acc = Matrix::zero(ring, r, r);
            for (i, m) in pulled.iter().enumerate() {
                let jac = rho.var_image(i).partial(k);
                if !jac.is_zero() {
                    acc = acc.add(&m.scale_elem(&jac))?;
                }
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    /// Holds for lack of anything to check.
    Vacuous,
    Fail(String),
}

impl CheckStatus {
    pub fn passed(&self) -> bool {
        !matches!(self, CheckStatus::Fail(_))
    }
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckStatus::Pass => write!(f, "pass"),
            CheckStatus::Vacuous => write!(f, "pass (vacuous)"),
            CheckStatus::Fail(w) => write!(f, "fail: {w}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<(&'static str, CheckStatus)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, s)| s.passed())
    }

    pub fn first_failure(&self) -> Option<String> {
        self.checks.iter().find_map(|(n, s)| match s {
            CheckStatus::Fail(w) => Some(format!("{n}: {w}")),
            _ => None,
        })
    }
}

/// Checks the bundle cocycle, compatibility of the chart fields on
/// overlaps, and `[φ^{(i)}, φ^{(j)}] = 0` on every chart.
pub fn validate_higgs(h: &HiggsBundleData) -> ValidationReport {
    let cover = h.cover();
    let cocycle = match h.bundle.check_cocycle() {
        Ok(()) if cover.n_charts() == 1 => CheckStatus::Vacuous,
        Ok(()) => CheckStatus::Pass,
        Err(w) => CheckStatus::Fail(w),
    };
    let compat = if cover.n_charts() == 1 {
        CheckStatus::Vacuous
    } else {
        let mut status = CheckStatus::Pass;
        for (a, b) in cover.pairs() {
            let res = (|| -> Result<Option<String>> {
                let g = h.bundle.transition(a, b)?;
                let lhs = h.overlap_components(a, b)?;
                let rhs = h.overlap_components(b, a)?;
                for (k, (x, y)) in lhs.iter().zip(&rhs).enumerate() {
                    let conv = g.conjugate(x)?;
                    if conv != *y {
                        return Ok(Some(format!(
                            "on `{}`-`{}` along coordinate {k}: transported {conv} but found {y}",
                            cover.chart(a).name,
                            cover.chart(b).name
                        )));
                    }
                }
                Ok(None)
            })();
            match res {
                Ok(None) => {}
                Ok(Some(w)) => {
                    status = CheckStatus::Fail(w);
                    break;
                }
                Err(e) => {
                    status = CheckStatus::Fail(e.to_string());
                    break;
                }
            }
        }
        status
    };
    let mut integrable = CheckStatus::Vacuous;
    'charts: for (a, fs) in h.fields.iter().enumerate() {
        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                integrable = CheckStatus::Pass;
                let c = fs[i].commutator(&fs[j]).expect("shapes checked");
                if !c.is_zero() {
                    integrable = CheckStatus::Fail(format!("[phi_{i}, phi_{j}] = {c} on `{}`", cover.chart(a).name));
                    break 'charts;
                }
            }
        }
    }
    ValidationReport {
        checks: vec![
            ("bundle cocycle", cocycle),
            ("overlap compatibility", compat),
            ("integrability", integrable),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::cover::Cover;

    fn nilpotent() -> HiggsBundleData {
        let cover = Cover::projective_line();
        let e = VectorBundle::split_on_projective_line(&cover, &[1, -1]).unwrap();
        let fu = Matrix::parse(&cover.chart(0).ring, &[vec!["0", "1"], vec!["0", "0"]]).unwrap();
        let fv = Matrix::parse(&cover.chart(1).ring, &[vec!["0", "-1"], vec!["0", "0"]]).unwrap();
        HiggsBundleData::new(e, vec![vec![fu], vec![fv]]).unwrap()
    }

    #[test]
    fn nilpotent_example_is_valid() {
        let r = validate_higgs(&nilpotent());
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checks[2].1, CheckStatus::Vacuous);
    }

    #[test]
    fn untransformed_field_fails() {
        let h = nilpotent();
        let cover = h.cover().clone();
        let fv = Matrix::parse(&cover.chart(1).ring, &[vec!["0", "1"], vec!["0", "0"]]).unwrap();
        let bad = HiggsBundleData::new(h.bundle().clone(), vec![h.fields()[0].clone(), vec![fv]]).unwrap();
        let r = validate_higgs(&bad);
        assert!(matches!(r.checks[1].1, CheckStatus::Fail(_)));
    }

    #[test]
    fn lower_triangular_field_has_no_polynomial_transform() {
        let h = nilpotent();
        let cover = h.cover().clone();
        let fu = Matrix::parse(&cover.chart(0).ring, &[vec!["0", "0"], vec!["1", "0"]]).unwrap();
        let g = h.bundle().transition(0, 1).unwrap();
        let phi = HiggsBundleData::new(
            h.bundle().clone(),
            vec![vec![fu], vec![Matrix::zero(&cover.chart(1).ring, 2, 2)]],
        )
        .unwrap();
        let x = &phi.overlap_components(0, 1).unwrap()[0];
        let moved = g.conjugate(x).unwrap();
        // dividing by dv/du = -u^-2 gives -v^-4 on V, which is not polynomial
        assert_eq!(moved.get(1, 0).to_string(), "u^2");
    }

    #[test]
    fn three_chart_split_bundle_is_a_cocycle() {
        let cover = Cover::projective_line_three();
        let e = VectorBundle::split_on_projective_line(&cover, &[2, -1]).unwrap();
        assert!(e.check_cocycle().is_ok());
    }
}
