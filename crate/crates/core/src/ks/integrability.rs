//! Order-2 commutation of first-order deformations.
//!
//! Over `O[ε₁, ε₂]` the composites `g(1 + ε₁s_a)(1 + ε₂s_b)` and
//! `g(1 + ε₂s_b)(1 + ε₁s_a)` are compared by searching for chart
//! automorphisms `h_α = 1 + ε₁u_α + ε₂v_α + ε₁ε₂w_α` with
//! `h_α⁻¹ĝ¹_{αβ}h_β = ĝ²_{αβ}` and `h_α⁻¹φ_αh_α = φ_α`. The `ε₁` part of
//! the equations does not involve the data, so `u = 0` is taken. The
//! `ε₂` and `ε₁ε₂` parts are linear in `(v, w)`:
//! `d⁰v = 0` and `d⁰w + ([s_a, v_β], 0) = (−[s_a, s_b], 0)`.
//! The `w`-only system does not depend on the pair and is eliminated once.

use std::collections::BTreeMap;

use crate::cech::cohomology::{cochain_of, window_basis, BasisElem, Indexer};
use crate::cech::{
    Cochain, Complex, CoverRef, DegreeWindow, HiggsBundleData, HiggsComplex, HyperCocycle, PrimitiveSolver,
    VectorBundle,
};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseVec};
use crate::ring::{Matrix, RingElem, RingRef};

use super::deform::contract;
use super::tangent::TangentCocycle;

pub const EPS1: &str = "e1";
pub const EPS2: &str = "e2";

/// Eliminations reused across pairs for one Higgs bundle.
pub struct Order2Solver {
    h: HiggsBundleData,
    cx: HiggsComplex,
    cover2: CoverRef,
    window: DegreeWindow,
    narrow: PrimitiveSolver,
    wide: PrimitiveSolver,
}

#[derive(Debug, Clone)]
pub struct IntegrabilityReport {
    pub equivalent: bool,
    /// `(v_α, w_α)` for each chart when a witness was found.
    pub witness: Option<Vec<(Matrix, Matrix)>>,
    /// Whether the `w`-only system sufficed.
    pub fast_path: bool,
}

impl Order2Solver {
    /// `extra_degree` bounds the exponents of the cocycles to be compared.
    pub fn new(h: &HiggsBundleData, extra_degree: i32) -> Result<Self> {
        let cx = HiggsComplex::new(h)?;
        let window = DegreeWindow::default_for(cx.data_degree().max(2 * extra_degree), cx.rank());
        let narrow = PrimitiveSolver::new(&cx, 1, &window)?;
        let wide = PrimitiveSolver::new(&cx, 1, &window.widen(2))?;
        Ok(Order2Solver {
            h: h.clone(),
            cover2: h.cover().with_two_parameters(EPS1, EPS2)?,
            cx,
            window,
            narrow,
            wide,
        })
    }

    pub fn with_window(h: &HiggsBundleData, window: DegreeWindow) -> Result<Self> {
        let cx = HiggsComplex::new(h)?;
        let narrow = PrimitiveSolver::new(&cx, 1, &window)?;
        let wide = PrimitiveSolver::new(&cx, 1, &window.widen(2))?;
        Ok(Order2Solver {
            h: h.clone(),
            cover2: h.cover().with_two_parameters(EPS1, EPS2)?,
            cx,
            window,
            narrow,
            wide,
        })
    }

    pub fn window(&self) -> DegreeWindow {
        self.window
    }

    /// Runs the comparison for one pair of overlap data.
    pub fn check(
        &self,
        sa: &BTreeMap<(usize, usize), Matrix>,
        sb: &BTreeMap<(usize, usize), Matrix>,
    ) -> Result<IntegrabilityReport> {
        let h = &self.h;
        let cover2 = &self.cover2;
        let g1 = composite(h, cover2, sa, sb, false)?;
        let g2 = composite(h, cover2, sa, sb, true)?;
        let mut target = HyperCocycle::zero(h);
        for (k, m) in &mut target.s {
            *m = sa[k].commutator(&sb[k])?.neg();
        }
        let target = target.to_cochain();
        let zero_v = || -> Vec<Matrix> {
            h.cover()
                .charts()
                .iter()
                .map(|c| Matrix::zero(&c.ring, h.rank(), h.rank()))
                .collect()
        };
        if let Some(w) = self.narrow.solve(&self.cx, &target)? {
            let witness: Vec<(Matrix, Matrix)> = zero_v().into_iter().zip(w.0).collect();
            verify(h, cover2, &g1, &g2, &witness)?;
            return Ok(IntegrabilityReport {
                equivalent: true,
                witness: Some(witness),
                fast_path: true,
            });
        }
        if let Some(witness) = self.solve_with_v(sa, &target, &self.window)? {
            verify(h, cover2, &g1, &g2, &witness)?;
            return Ok(IntegrabilityReport {
                equivalent: true,
                witness: Some(witness),
                fast_path: false,
            });
        }
        let wider = self.window.widen(2);
        if self.wide.solve(&self.cx, &target)?.is_some() || self.solve_with_v(sa, &target, &wider)?.is_some() {
            return Err(Error::WindowNotSaturated { narrow: 0, wide: 1 });
        }
        Ok(IntegrabilityReport {
            equivalent: false,
            witness: None,
            fast_path: false,
        })
    }

    /// The full system in `(v, w)`.
    fn solve_with_v(
        &self,
        sa: &BTreeMap<(usize, usize), Matrix>,
        target: &Cochain,
        w: &DegreeWindow,
    ) -> Result<Option<Vec<(Matrix, Matrix)>>> {
        let group = &self.cx.groups()[0];
        let basis = window_basis(group, w);
        let n = basis.len();
        let zero = Cochain::zero(&self.cx.groups()[1]);
        let mut coords = Indexer::new();
        let mut ech = Echelon::tracking();
        // coordinates: (ε₂ block, ε₁ε₂ block), one block per copy of C¹
        let column = |coords: &mut Indexer, b: &BasisElem, is_v: bool| -> Result<SparseVec> {
            let x = cochain_of(group, std::slice::from_ref(b), &SparseVec::unit(0));
            let dx = self.cx.differential(0, &x)?;
            let (e2, e12) = if is_v {
                let mut cross = HyperCocycle::zero(&self.h);
                for ((a, bb), m) in &mut cross.s {
                    let vb = x.0[*bb].apply_hom(self.h.cover().restriction(*bb, *a))?;
                    *m = sa[&(*a, *bb)].commutator(&vb)?;
                }
                (dx, cross.to_cochain())
            } else {
                (zero.clone(), dx)
            };
            let mut all = e2.0;
            all.extend(e12.0);
            Ok(coords.flatten(&all))
        };
        for b in &basis {
            ech.insert(&column(&mut coords, b, true)?);
        }
        for b in &basis {
            ech.insert(&column(&mut coords, b, false)?);
        }
        let mut rhs = zero.0.clone();
        rhs.extend(target.0.iter().cloned());
        let Some(rhs) = coords.flatten_existing(&rhs) else {
            return Ok(None);
        };
        let Some(x) = ech.solve(&rhs) else {
            return Ok(None);
        };
        let v = cochain_of(group, &basis, &x.filter(|i| i < n));
        let w_part = SparseVec::from_entries(x.iter().filter(|(i, _)| *i >= n).map(|(i, c)| (i - n, c.clone())));
        let wv = cochain_of(group, &basis, &w_part);
        Ok(Some(v.0.into_iter().zip(wv.0).collect()))
    }
}

/// `g(1 + ε₁s_a)(1 + ε₂s_b)`, or the opposite order.
fn composite(
    h: &HiggsBundleData,
    cover2: &CoverRef,
    sa: &BTreeMap<(usize, usize), Matrix>,
    sb: &BTreeMap<(usize, usize), Matrix>,
    reversed: bool,
) -> Result<BTreeMap<(usize, usize), Matrix>> {
    let r = h.rank();
    let mut out = BTreeMap::new();
    for (a, b) in cover2.pairs() {
        let ring = &cover2.overlap(a, b).ring;
        let factor = |s: &Matrix, j: usize| -> Result<Matrix> {
            Matrix::identity(ring, r).add(&s.embed(ring)?.scale_elem(&RingElem::nil_gen(ring, j)))
        };
        let (fa, fb) = (factor(&sa[&(a, b)], 0)?, factor(&sb[&(a, b)], 1)?);
        let g = h.bundle().transition(a, b)?.embed(ring)?;
        let m = if reversed {
            g.mul(&fb)?.mul(&fa)?
        } else {
            g.mul(&fa)?.mul(&fb)?
        };
        out.insert((a, b), m);
    }
    Ok(out)
}

fn automorphism(ring: &RingRef, v: &Matrix, w: &Matrix) -> Result<Matrix> {
    let r = v.rows();
    let e2 = RingElem::nil_gen(ring, 1);
    let e12 = e2.mul_ref(&RingElem::nil_gen(ring, 0));
    Matrix::identity(ring, r)
        .add(&v.embed(ring)?.scale_elem(&e2))?
        .add(&w.embed(ring)?.scale_elem(&e12))
}

/// Substitutes the witness into both intertwining equations.
fn verify(
    h: &HiggsBundleData,
    cover2: &CoverRef,
    g1: &BTreeMap<(usize, usize), Matrix>,
    g2: &BTreeMap<(usize, usize), Matrix>,
    witness: &[(Matrix, Matrix)],
) -> Result<()> {
    let autos: Vec<Matrix> = witness
        .iter()
        .enumerate()
        .map(|(a, (v, w))| automorphism(&cover2.chart(a).ring, v, w))
        .collect::<Result<_>>()?;
    for (a, b) in cover2.pairs() {
        let ha = autos[a].apply_hom(cover2.restriction(a, b))?;
        let hb = autos[b].apply_hom(cover2.restriction(b, a))?;
        if ha.inverse()?.mul(&g1[&(a, b)])?.mul(&hb)? != g2[&(a, b)] {
            return Err(Error::ValidationFailed(format!(
                "order-2 witness fails on overlap ({a}, {b})"
            )));
        }
    }
    for (a, ha) in autos.iter().enumerate() {
        let phi = h.field(a).embed(&cover2.chart(a).ring)?;
        if ha.inverse()?.mul(&phi)?.mul(ha)? != phi {
            return Err(Error::ValidationFailed(format!(
                "order-2 witness moves the field on chart {a}"
            )));
        }
    }
    // the composites themselves must be Higgs bundles over the two-parameter ring
    for g in [g1, g2] {
        let bundle = VectorBundle::new(cover2, h.rank(), g.clone())?;
        bundle.check_cocycle().map_err(Error::ValidationFailed)?;
    }
    Ok(())
}

/// Whether the deformations along `chi_a` then `chi_b` and in the opposite
/// order are equivalent over `O[ε₁, ε₂]`.
pub fn integrability_check(
    h: &HiggsBundleData,
    chi_a: &TangentCocycle,
    chi_b: &TangentCocycle,
    window: Option<DegreeWindow>,
) -> Result<IntegrabilityReport> {
    let degree = chi_a.max_abs_exponent().max(chi_b.max_abs_exponent()) + h.max_abs_exponent();
    let solver = match window {
        Some(w) => Order2Solver::with_window(h, w)?,
        None => Order2Solver::new(h, degree)?,
    };
    solver.check(&contract(h, chi_a)?, &contract(h, chi_b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::Cover;
    use crate::ring::Scalar;

    fn nilpotent() -> HiggsBundleData {
        let cover = Cover::projective_line();
        let e = VectorBundle::split_on_projective_line(&cover, &[1, -1]).unwrap();
        let f = |a: usize, s: &str| vec![Matrix::parse(&cover.chart(a).ring, &[vec!["0", s], vec!["0", "0"]]).unwrap()];
        HiggsBundleData::new(e, vec![f(0, "1"), f(1, "-1")]).unwrap()
    }

    #[test]
    fn ks_pairs_commute() {
        let h = nilpotent();
        let cover = h.cover().clone();
        let a = TangentCocycle::monomial(&cover, Scalar::one(), 1).unwrap();
        let b = TangentCocycle::monomial(&cover, Scalar::one(), 2).unwrap();
        for (x, y) in [(&a, &b), (&a, &a), (&a, &TangentCocycle::zero(&cover))] {
            let rep = integrability_check(&h, x, y, None).unwrap();
            assert!(rep.equivalent && rep.fast_path);
            assert!(rep.witness.unwrap().iter().all(|(v, w)| v.is_zero() && w.is_zero()));
        }
    }

    #[test]
    fn noncommuting_data_needs_a_correction() {
        // φ = 0 on O(1)⊕O(−1); s_a, s_b arbitrary with [s_a, s_b] a coboundary
        let cover = Cover::projective_line();
        let e = VectorBundle::split_on_projective_line(&cover, &[1, -1]).unwrap();
        let h = HiggsBundleData::zero_field(e);
        let r = cover.overlap(0, 1).ring.clone();
        let sa = BTreeMap::from([((0, 1), Matrix::parse(&r, &[vec!["0", "1"], vec!["0", "0"]]).unwrap())]);
        let sb = BTreeMap::from([((0, 1), Matrix::parse(&r, &[vec!["0", "0"], vec!["1", "0"]]).unwrap())]);
        let solver = Order2Solver::new(&h, 2).unwrap();
        let rep = solver.check(&sa, &sb).unwrap();
        assert!(rep.equivalent);
        let (_, w) = &rep.witness.unwrap()[0];
        assert!(!w.is_zero());
    }
}
