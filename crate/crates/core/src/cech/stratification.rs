//! The order-2 truncation of the Higgs stratification.
//!
//! On a chart with coordinates `x^i`, the coaction to second order is
//! `s ↦ s⊗1 + θ_i s⊗dx^i + Θ_{ij} s⊗dx^i dx^j`. Composing the first-order
//! coaction with itself along the two orders of the coordinates gives
//! `Θ_{ij} = θ_iθ_j` and `Θ_{ji} = θ_jθ_i`; since `dx^i dx^j` is symmetric
//! the square commutes iff these agree.

use super::bundle::{CheckStatus, HiggsBundleData};

/// `Θ_{ij}` built as `θ_iθ_j` on each chart, and whether it is symmetric.
pub fn stratification_order2_status(h: &HiggsBundleData) -> CheckStatus {
    let mut status = CheckStatus::Vacuous;
    for (a, fs) in h.fields().iter().enumerate() {
        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                status = CheckStatus::Pass;
                let theta_ij = fs[i].mul(&fs[j]).expect("square fields");
                let theta_ji = fs[j].mul(&fs[i]).expect("square fields");
                if theta_ij != theta_ji {
                    return CheckStatus::Fail(format!(
                        "Theta_{i}{j} = {theta_ij} but Theta_{j}{i} = {theta_ji} on `{}`",
                        h.cover().chart(a).name
                    ));
                }
            }
        }
    }
    status
}

pub fn stratification_order2(h: &HiggsBundleData) -> bool {
    stratification_order2_status(h).passed()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::bundle::VectorBundle;
    use crate::cech::cover::Cover;
    use crate::ring::Matrix;

    fn plane(second: &[Vec<&str>]) -> HiggsBundleData {
        let cover = Cover::affine(&["x", "y"]);
        let r = cover.chart(0).ring.clone();
        let first = Matrix::parse(&r, &[vec!["0", "1"], vec!["0", "0"]]).unwrap();
        let second = Matrix::parse(&r, second).unwrap();
        HiggsBundleData::new(VectorBundle::trivial(&cover, 2), vec![vec![first, second]]).unwrap()
    }

    #[test]
    fn commuting_and_noncommuting_fields() {
        assert!(stratification_order2(&plane(&[vec!["0", "x"], vec!["0", "0"]])));
        let bad = plane(&[vec!["0", "0"], vec!["1", "0"]]);
        assert!(!stratification_order2(&bad));
        assert!(matches!(stratification_order2_status(&bad), CheckStatus::Fail(_)));
    }

    #[test]
    fn curves_are_vacuous() {
        let e = VectorBundle::trivial(&Cover::projective_line(), 1);
        let h = HiggsBundleData::zero_field(e);
        assert_eq!(stratification_order2_status(&h), CheckStatus::Vacuous);
        assert!(stratification_order2(&h));
    }
}
