//! Built-in examples, loadable by name.

use std::fmt;
use std::str::FromStr;

use crate::cech::{Cover, CoverRef, HiggsBundleData, VectorBundle};
use crate::conn::LambdaConnection;
use crate::error::{Error, Result};
use crate::ring::{FirstOrderDiagonal, Matrix, ReesElem, Ring, RingElem, RingHom, RingRef, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Example {
    P1Trivial,
    P1Nilpotent,
    InterpDemo,
    ReesDemo,
}

impl Example {
    pub const ALL: [Example; 4] = [
        Example::P1Trivial,
        Example::P1Nilpotent,
        Example::InterpDemo,
        Example::ReesDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Example::P1Trivial => "p1-trivial",
            Example::P1Nilpotent => "p1-nilpotent",
            Example::InterpDemo => "interp-demo",
            Example::ReesDemo => "rees-demo",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Example::P1Trivial => "trivial line bundle on P^1 with zero Higgs field",
            Example::P1Nilpotent => "O(1) + O(-1) on P^1 with nilpotent Higgs field E12",
            Example::InterpDemo => "interpolated homomorphisms and a transport triangle over Q[x]",
            Example::ReesDemo => "Rees trivialization over Q[x] with a sample tangent vector",
        }
    }

    /// The Higgs bundle of the example, on the standard two-chart cover.
    pub fn higgs(self) -> Option<HiggsBundleData> {
        match self {
            Example::P1Trivial => Some(p1_trivial(&Cover::projective_line())),
            Example::P1Nilpotent => Some(p1_nilpotent(&Cover::projective_line())),
            _ => None,
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Example::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Example::ALL.iter().map(|e| e.name()).collect();
            Error::Resolution(format!("unknown example `{s}` (known: {})", names.join(", ")))
        })
    }
}

pub fn p1_trivial(cover: &CoverRef) -> HiggsBundleData {
    HiggsBundleData::zero_field(VectorBundle::trivial(cover, 1))
}

/// `O(1) ⊕ O(−1)` with `φ = ±E12 du`; the sign alternates so that the
/// field is compatible with `g = diag(u, u⁻¹)` on every overlap.
pub fn p1_nilpotent(cover: &CoverRef) -> HiggsBundleData {
    let e = VectorBundle::split_on_projective_line(cover, &[1, -1]).expect("split bundle on P^1");
    let signs = ["1", "-1", "1"];
    let fields = (0..cover.n_charts())
        .map(|a| vec![Matrix::parse(&cover.chart(a).ring, &[vec!["0", signs[a]], vec!["0", "0"]]).expect("literal")])
        .collect();
    HiggsBundleData::new(e, fields).expect("compatible field")
}

/// Interpolation and triangle data: homomorphisms `ℚ[x] → ℚ[c][ε]`.
#[derive(Debug, Clone)]
pub struct InterpDemo {
    pub source: RingRef,
    pub target: RingRef,
    pub lambda: Scalar,
    pub conn: LambdaConnection,
    /// Endpoints for interpolation.
    pub f0: RingHom,
    pub f1: RingHom,
    /// `(f0, f1, f2, f01, f12, f20)` satisfying the triangle relations.
    pub triangle: [RingHom; 6],
}

pub fn interp_demo() -> InterpDemo {
    let source = Ring::polynomial(&["x"]);
    let target = Ring::polynomial(&["c"]).with_dual("eps").expect("fresh name");
    let lambda = Scalar::ratio(2, 3);
    let hom = |s: &str| RingHom::from_literals(&source, &target, &[s], &[]).expect("literal");
    let conn = LambdaConnection::with_rank(
        &source,
        2,
        lambda.clone(),
        vec![Matrix::parse(&source, &[vec!["x", "1"], vec!["0", "2*x^2"]]).expect("literal")],
    )
    .expect("rank 2");
    // f01 = f0 + η, f2 = f0 + ξ, then everything else is forced
    let f0 = hom("c^2");
    let f01 = hom("c^2 + (c + 1)*eps");
    let f1 = hom("c^2 + 2/3*(c + 1)*eps");
    let f2 = hom("c^2 + c^3*eps");
    let f12 = hom("c^2 + (3/2*c^3 - 1/3*c - 1/3)*eps");
    let f20 = hom("c^2 - 1/2*c^3*eps");
    InterpDemo {
        source,
        target,
        lambda,
        conn,
        f0: f0.clone(),
        f1: f01.clone(),
        triangle: [f0, f1, f2, f01, f12, f20],
    }
}

/// A tangent vector `δ : ℚ[x] → ℚ[c][ε]` and a sample Rees element.
#[derive(Debug, Clone)]
pub struct ReesDemo {
    pub diag: FirstOrderDiagonal,
    pub delta: RingHom,
    pub bound: i32,
    pub sample: ReesElem,
}

pub fn rees_demo() -> ReesDemo {
    let base = Ring::polynomial(&["x"]);
    let target = Ring::polynomial(&["c"]).with_dual("eps").expect("fresh name");
    let delta = RingHom::from_literals(&base, &target, &["c + c^2*eps"], &[]).expect("literal");
    let diag = FirstOrderDiagonal::new(&base).expect("plain base");
    let p1 = diag.p1().clone();
    let x = RingElem::var(&p1, 0);
    let dx = RingElem::nil_gen(&p1, 0);
    let sample = ReesElem::from_coeffs(
        &p1,
        4,
        [
            (0, x.mul_ref(&x)),
            (1, dx.clone()),
            (2, x.mul_ref(&dx).add_ref(&RingElem::int(&p1, 3))),
        ],
    )
    .expect("within bound");
    ReesDemo {
        diag,
        delta,
        bound: 4,
        sample,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::validate_higgs;
    use crate::conn::verify_triangle;

    #[test]
    fn names_roundtrip() {
        for e in Example::ALL {
            assert_eq!(e.name().parse::<Example>().unwrap(), e);
        }
        assert!(matches!("p2".parse::<Example>(), Err(Error::Resolution(_))));
    }

    #[test]
    fn higgs_examples_validate() {
        for cover in [Cover::projective_line(), Cover::projective_line_three()] {
            assert!(validate_higgs(&p1_trivial(&cover)).passed());
            assert!(validate_higgs(&p1_nilpotent(&cover)).passed());
        }
    }

    #[test]
    fn demo_triangle_closes() {
        let d = interp_demo();
        let [f0, f1, f2, f01, f12, f20] = &d.triangle;
        assert!(verify_triangle(&d.conn, f0, f1, f2, f01, f12, f20).unwrap());
    }

    #[test]
    fn rees_demo_roundtrips() {
        let d = rees_demo();
        let t = crate::ring::rees_trivialize(&d.sample).unwrap();
        assert_eq!(crate::ring::rees_untrivialize(&t).unwrap(), d.sample);
    }
}
