//! Cohomology of Čech complexes inside a finite window of exponents.
//!
//! `C^p_W` is spanned by monomial entries whose exponents lie in the window
//! `W`. Images of the differential are computed exactly (not truncated). A
//! class count in degree `p` inserts the coboundaries of a wider window
//! first and then the cocycles of `W`; the cocycles that still enlarge the
//! span are class representatives. The count is re-done with the window
//! widened by 2, and a change is reported as an error.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseVec};
use crate::ring::{Matrix, RingElem};

use super::complex::{Cochain, Complex, Component, HiggsComplex, HyperCocycle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeWindow {
    pub lo: i32,
    pub hi: i32,
}

impl DegreeWindow {
    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Dimension(format!("empty window {lo}:{hi}")));
        }
        Ok(DegreeWindow { lo, hi })
    }

    /// `[−(D + r + 4), D + r + 4]`.
    pub fn default_for(data_degree: i32, rank: usize) -> Self {
        let m = data_degree + rank as i32 + 4;
        DegreeWindow { lo: -m, hi: m }
    }

    pub fn for_complex(cx: &dyn Complex) -> Self {
        Self::default_for(cx.data_degree(), cx.rank())
    }

    pub fn widen(&self, by: i32) -> Self {
        DegreeWindow {
            lo: self.lo - by,
            hi: self.hi + by,
        }
    }

    pub fn width(&self) -> i32 {
        self.hi - self.lo
    }

    /// The smallest window containing both.
    pub fn union(&self, other: &DegreeWindow) -> Self {
        DegreeWindow {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

impl fmt::Display for DegreeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for DegreeWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 1,
            column: 1,
            message: format!("expected a window LO:HI, got `{s}`"),
        };
        let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        DegreeWindow::new(lo, hi)
    }
}

/// Coordinates `(component, entry, nilpotent monomial, exponents)`, numbered
/// in order of first appearance.
#[derive(Debug, Clone, Default)]
pub struct Indexer {
    map: HashMap<(usize, usize, u32, Vec<i32>), usize>,
}

impl Indexer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn index(&mut self, key: (usize, usize, u32, Vec<i32>)) -> usize {
        let n = self.map.len();
        *self.map.entry(key).or_insert(n)
    }

    /// Flattens matrices, assigning new coordinates as needed.
    pub fn flatten(&mut self, mats: &[Matrix]) -> SparseVec {
        let mut v = SparseVec::new();
        for (c, m) in mats.iter().enumerate() {
            for (k, e) in m.entries().iter().enumerate() {
                for (mask, p) in e.parts() {
                    for (exps, coef) in p.terms() {
                        let i = self.index((c, k, mask, exps.clone()));
                        v.add_at(i, coef);
                    }
                }
            }
        }
        v
    }

    /// Flattens without adding coordinates; `None` if some monomial has no
    /// coordinate yet (so the vector is outside every span built so far).
    pub fn flatten_existing(&self, mats: &[Matrix]) -> Option<SparseVec> {
        let mut v = SparseVec::new();
        for (c, m) in mats.iter().enumerate() {
            for (k, e) in m.entries().iter().enumerate() {
                for (mask, p) in e.parts() {
                    for (exps, coef) in p.terms() {
                        let i = *self.map.get(&(c, k, mask, exps.clone()))?;
                        v.add_at(i, coef);
                    }
                }
            }
        }
        Some(v)
    }
}

/// One monomial basis element of a windowed cochain group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElem {
    pub component: usize,
    pub entry: usize,
    pub exps: Vec<i32>,
}

fn exponent_boxes(comp: &Component, w: &DegreeWindow) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for i in 0..comp.ring.nvars() {
        let lo = if comp.ring.is_invertible_var(i) {
            w.lo
        } else {
            w.lo.max(0)
        };
        let mut next = Vec::new();
        for prefix in &out {
            for e in lo..=w.hi {
                let mut p = prefix.clone();
                p.push(e);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// The monomial basis of `C^p_W`.
pub fn window_basis(group: &[Component], w: &DegreeWindow) -> Vec<BasisElem> {
    let mut out = Vec::new();
    for (c, comp) in group.iter().enumerate() {
        let boxes = exponent_boxes(comp, w);
        for entry in 0..comp.rows * comp.cols {
            for exps in &boxes {
                out.push(BasisElem {
                    component: c,
                    entry,
                    exps: exps.clone(),
                });
            }
        }
    }
    out
}

/// The cochain of a combination of basis elements.
pub fn cochain_of(group: &[Component], basis: &[BasisElem], coeffs: &SparseVec) -> Cochain {
    let mut mats: Vec<Matrix> = group.iter().map(|c| Matrix::zero(&c.ring, c.rows, c.cols)).collect();
    for (i, c) in coeffs.iter() {
        let b = &basis[i];
        let comp = &group[b.component];
        let (r, col) = (b.entry / comp.cols, b.entry % comp.cols);
        let m = RingElem::monomial(&comp.ring, c.clone(), b.exps.clone());
        let cur = mats[b.component].get(r, col).add_ref(&m);
        mats[b.component].set(r, col, cur);
    }
    Cochain(mats)
}

fn unit_cochain(group: &[Component], b: &BasisElem) -> Cochain {
    cochain_of(group, std::slice::from_ref(b), &SparseVec::unit(0))
}

/// A cohomology group computed in a window.
#[derive(Debug, Clone)]
pub struct CohomologyGroup {
    pub degree: usize,
    pub dim: usize,
    /// Dimension of the cocycles with exponents in the window.
    pub cocycle_dim: usize,
    pub window: DegreeWindow,
    /// Cocycles whose classes form a basis.
    pub representatives: Vec<Cochain>,
}

/// Cohomology in degree `p` from the window `w` alone, without the
/// saturation re-check.
pub fn cohomology_in_window(cx: &dyn Complex, p: usize, w: &DegreeWindow) -> Result<CohomologyGroup> {
    let groups = cx.groups();
    if p >= groups.len() {
        return Err(Error::Dimension(format!("no cochain group in degree {p}")));
    }
    let group = &groups[p];
    let basis = window_basis(group, w);
    // cocycles of the window
    let cocycles: Vec<SparseVec> = if p < cx.top() {
        let mut target = Indexer::new();
        let mut ech = Echelon::tracking();
        for b in &basis {
            let img = cx.differential(p, &unit_cochain(group, b))?;
            ech.insert(&target.flatten(&img.0));
        }
        ech.kernel().to_vec()
    } else {
        (0..basis.len()).map(SparseVec::unit).collect()
    };
    let cocycle_dim = cocycles.len();
    // coboundaries from a wider window, in the coordinates of C^p
    let mut coords = Indexer::new();
    let mut span = Echelon::span_only();
    if p > 0 {
        let wide = w.widen(w.width() + cx.data_degree());
        let prev = &groups[p - 1];
        for b in window_basis(prev, &wide) {
            let img = cx.differential(p - 1, &unit_cochain(prev, &b))?;
            span.insert(&coords.flatten(&img.0));
        }
    }
    let mut representatives = Vec::new();
    for z in &cocycles {
        let c = cochain_of(group, &basis, z);
        if span.insert(&coords.flatten(&c.0)) {
            representatives.push(c);
        }
    }
    Ok(CohomologyGroup {
        degree: p,
        dim: representatives.len(),
        cocycle_dim,
        window: *w,
        representatives,
    })
}

/// Cohomology in degree `p`; errors if widening the window by 2 changes
/// the dimension.
pub fn cohomology(cx: &dyn Complex, p: usize, w: &DegreeWindow) -> Result<CohomologyGroup> {
    let narrow = cohomology_in_window(cx, p, w)?;
    let wide = cohomology_in_window(cx, p, &w.widen(2))?;
    if narrow.dim != wide.dim {
        return Err(Error::WindowNotSaturated {
            narrow: narrow.dim,
            wide: wide.dim,
        });
    }
    Ok(narrow)
}

/// `dim H¹`, saturation-checked.
pub fn cech_h1(cx: &dyn Complex, w: &DegreeWindow) -> Result<CohomologyGroup> {
    cohomology(cx, 1, w)
}

/// `Σ (−1)^p dim H^p` over all degrees.
pub fn euler_characteristic(cx: &dyn Complex, w: &DegreeWindow) -> Result<(i64, Vec<usize>)> {
    let mut chi = 0i64;
    let mut dims = Vec::new();
    for p in 0..=cx.top() {
        let d = cohomology(cx, p, w)?.dim;
        chi += if p % 2 == 0 { d as i64 } else { -(d as i64) };
        dims.push(d);
    }
    Ok((chi, dims))
}

/// Solves `d^{p−1} x = c` for `x` with exponents in a window, reusing one
/// elimination for many right-hand sides.
pub struct PrimitiveSolver {
    p: usize,
    window: DegreeWindow,
    basis: Vec<BasisElem>,
    coords: Indexer,
    echelon: Echelon,
}

impl PrimitiveSolver {
    pub fn new(cx: &dyn Complex, p: usize, w: &DegreeWindow) -> Result<Self> {
        if p == 0 || p > cx.top() {
            return Err(Error::Dimension(format!("no differential into degree {p}")));
        }
        let prev = &cx.groups()[p - 1];
        let basis = window_basis(prev, w);
        let mut coords = Indexer::new();
        let mut echelon = Echelon::tracking();
        for b in &basis {
            let img = cx.differential(p - 1, &unit_cochain(prev, b))?;
            echelon.insert(&coords.flatten(&img.0));
        }
        Ok(PrimitiveSolver {
            p,
            window: *w,
            basis,
            coords,
            echelon,
        })
    }

    pub fn window(&self) -> DegreeWindow {
        self.window
    }

    /// A primitive of `c`, verified by applying the differential.
    pub fn solve(&self, cx: &dyn Complex, c: &Cochain) -> Result<Option<Cochain>> {
        let Some(v) = self.coords.flatten_existing(&c.0) else {
            return Ok(None);
        };
        let Some(x) = self.echelon.solve(&v) else {
            return Ok(None);
        };
        let prim = cochain_of(&cx.groups()[self.p - 1], &self.basis, &x);
        let check = cx.differential(self.p - 1, &prim)?;
        if check != *c {
            return Err(Error::ValidationFailed(format!(
                "primitive does not reproduce the cochain: {check:?}"
            )));
        }
        Ok(Some(prim))
    }
}

/// A primitive of `c` in the window; if none exists there but one exists
/// after widening by 2, the window is reported as not saturated.
pub fn find_primitive(cx: &dyn Complex, p: usize, c: &Cochain, w: &DegreeWindow) -> Result<Option<Cochain>> {
    if let Some(x) = PrimitiveSolver::new(cx, p, w)?.solve(cx, c)? {
        return Ok(Some(x));
    }
    match PrimitiveSolver::new(cx, p, &w.widen(2))?.solve(cx, c)? {
        Some(_) => Err(Error::WindowNotSaturated { narrow: 0, wide: 1 }),
        None => Ok(None),
    }
}

/// A primitive `u` with `d⁰u = c` for a Higgs hyper-cocycle, verified by
/// substitution. The window defaults to one sized for `h` and `c`.
pub fn is_hyper_coboundary(
    cx: &HiggsComplex,
    c: &HyperCocycle,
    window: Option<DegreeWindow>,
) -> Result<Option<Vec<Matrix>>> {
    let w = window.unwrap_or_else(|| DegreeWindow::default_for(cx.data_degree().max(c.max_abs_exponent()), cx.rank()));
    let Some(u) = find_primitive(cx, 1, &c.to_cochain(), &w)? else {
        return Ok(None);
    };
    if cx.d0(&u.0)? != *c {
        return Err(Error::ValidationFailed(
            "primitive does not reproduce the hyper-cocycle".into(),
        ));
    }
    Ok(Some(u.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::complex::SheafComplex;
    use crate::cech::cover::Cover;

    #[test]
    fn window_parsing() {
        assert_eq!("-3:5".parse::<DegreeWindow>().unwrap(), DegreeWindow { lo: -3, hi: 5 });
        assert!("5:-3".parse::<DegreeWindow>().is_err());
        assert!("x".parse::<DegreeWindow>().is_err());
    }

    #[test]
    fn line_bundles_on_the_projective_line() {
        let cover = Cover::projective_line();
        for d in [-4, -2, -1, 0, 3] {
            let cx = SheafComplex::line_bundle(&cover, d).unwrap();
            let w = DegreeWindow::for_complex(&cx);
            assert_eq!(cech_h1(&cx, &w).unwrap().dim, (-d - 1).max(0) as usize, "d = {d}");
            assert_eq!(cohomology(&cx, 0, &w).unwrap().dim, (d + 1).max(0) as usize);
        }
    }

    #[test]
    fn too_narrow_window_is_detected() {
        let cover = Cover::projective_line();
        let cx = SheafComplex::line_bundle(&cover, 3).unwrap();
        let w = DegreeWindow::new(-1, 1).unwrap();
        assert!(matches!(
            cohomology(&cx, 0, &w),
            Err(Error::WindowNotSaturated { narrow: 0, wide: 4 })
        ));
    }

    fn nilpotent(cover: &crate::cech::cover::CoverRef) -> crate::cech::bundle::HiggsBundleData {
        use crate::cech::bundle::{HiggsBundleData, VectorBundle};
        let e = VectorBundle::split_on_projective_line(cover, &[1, -1]).unwrap();
        let signs = ["1", "-1", "1"];
        let fields = (0..cover.n_charts())
            .map(|a| vec![Matrix::parse(&cover.chart(a).ring, &[vec!["0", signs[a]], vec!["0", "0"]]).unwrap()])
            .collect();
        HiggsBundleData::new(e, fields).unwrap()
    }

    // χ(O(d)) = d + 1 summed over End E = ⊕ O(d_i − d_j), and the same
    // twisted by Ω = O(−2).
    fn euler_oracle(degrees: &[i32]) -> i64 {
        let mut chi = 0i64;
        for a in degrees {
            for b in degrees {
                chi += (a - b + 1) as i64 - (a - b - 2 + 1) as i64;
            }
        }
        chi
    }

    #[test]
    fn tangent_sheaf_has_no_h1() {
        let cover = Cover::projective_line();
        let cx = SheafComplex::tangent(&cover).unwrap();
        let w = DegreeWindow::for_complex(&cx);
        assert_eq!(cech_h1(&cx, &w).unwrap().dim, 0);
        assert_eq!(cohomology(&cx, 0, &w).unwrap().dim, 3);
    }

    #[test]
    fn euler_characteristic_of_the_nilpotent_example() {
        assert_eq!(euler_oracle(&[1, -1]), 8);
        for cover in [Cover::projective_line(), Cover::projective_line_three()] {
            let h = nilpotent(&cover);
            let cx = HiggsComplex::new(&h).unwrap();
            let w = DegreeWindow::for_complex(&cx);
            let (chi, dims) = euler_characteristic(&cx, &w).unwrap();
            assert_eq!(chi, 8, "dims {dims:?}");
            assert_eq!(dims[..3], [4, 0, 4]);
        }
    }

    #[test]
    fn coboundaries_are_recognized_and_classes_are_not() {
        let cover = Cover::projective_line();
        let h = nilpotent(&cover);
        let cx = HiggsComplex::new(&h).unwrap();
        let mut rng = crate::sampling::rng(5);
        let u: Vec<Matrix> = cover
            .charts()
            .iter()
            .map(|c| crate::sampling::random_matrix(&mut rng, &c.ring, 2, 2, 2, 2))
            .collect();
        let c = cx.d0(&u).unwrap();
        let found = is_hyper_coboundary(&cx, &c, None).unwrap().unwrap();
        assert_eq!(cx.d0(&found).unwrap(), c);
        let zero = HyperCocycle::zero(&h);
        assert!(is_hyper_coboundary(&cx, &zero, None).unwrap().is_some());
        // ℍ¹ = H¹(O(−4)) ⊕ H⁰(O(2)) ⊕ H⁰(O(−2)): 3 + 3 + 0
        let e = crate::cech::bundle::VectorBundle::split_on_projective_line(&cover, &[2, -2]).unwrap();
        let h = crate::cech::bundle::HiggsBundleData::zero_field(e);
        let cx = HiggsComplex::new(&h).unwrap();
        let w = DegreeWindow::for_complex(&cx);
        let h1 = cech_h1(&cx, &w).unwrap();
        assert_eq!(h1.dim, 6);
        for rep in &h1.representatives {
            let rep = HyperCocycle::from_cochain(&cover, rep);
            assert!(cx.conditions(&rep).unwrap().iter().all(|s| s.passed()));
            assert!(is_hyper_coboundary(&cx, &rep, Some(w)).unwrap().is_none());
        }
    }
}
