//! Gluing of first-order thickenings `X_λ` by ε-transport along `1 + λD`.
//!
//! Each overlap carries a derivation `D_{αβ}` into the square-zero ideal
//! `(ε)`, given by its values on the overlap coordinates. The transport
//! `ε_{αβ}` compares the pullbacks of the chart connection along the
//! inclusion and along `x ↦ x + λεD_{αβ}(x)`.

use std::collections::BTreeMap;

use crate::conn::{epsilon_transport, is_integrable, pullback_connection, LambdaConnection};
use crate::error::{Error, Result};
use crate::ring::{Matrix, RingElem, RingHom, RingRef, Scalar};

use super::cover::CoverRef;

pub const EPS: &str = "eps";

/// `x_i ↦ x_i + λεD(x_i)` from `R` to `R[ε]`.
pub fn shifted_hom(ring: &RingRef, values: &[RingElem], lambda: &Scalar) -> Result<(RingRef, RingHom, RingHom)> {
    if values.len() != ring.nvars() {
        return Err(Error::Dimension(format!(
            "derivation given on {} of {} coordinates",
            values.len(),
            ring.nvars()
        )));
    }
    let thick = ring.with_dual(EPS)?;
    let f0 = RingHom::inclusion(ring, &thick)?;
    let eps = RingElem::nil_gen(&thick, 0);
    let imgs = values
        .iter()
        .enumerate()
        .map(|(i, d)| Ok(f0.var_image(i).add_ref(&d.embed(&thick)?.mul_ref(&eps).scale(lambda))))
        .collect::<Result<Vec<_>>>()?;
    let f1 = RingHom::new(ring, &thick, imgs, Vec::new())?;
    Ok((thick, f0, f1))
}

/// `ε` for one derivation: the transport from the pullback along
/// `1 + λεD` to the pullback along the inclusion.
pub fn overlap_transport(conn: &LambdaConnection, values: &[RingElem], lambda: &Scalar) -> Result<Matrix> {
    if !is_integrable(conn) {
        return Err(Error::NotIntegrable("connection on the overlap".into()));
    }
    let (_, f0, f1) = shifted_hom(conn.ring(), values, lambda)?;
    Ok(epsilon_transport(conn, &f0, &f1)?.matrix)
}

#[derive(Debug, Clone)]
pub struct ThickeningData {
    pub cover: CoverRef,
    /// A λ-connection on each chart, in the chart coordinates.
    pub connections: Vec<LambdaConnection>,
    /// `D_{αβ}(w_k)` for the coordinates `w_k` of each overlap, `α < β`.
    pub derivations: BTreeMap<(usize, usize), Vec<RingElem>>,
    pub lambda: Scalar,
}

#[derive(Debug, Clone)]
pub struct Thickening {
    /// `ε_{αβ}` over `O_{αβ}[ε]`, `α < β`.
    pub transports: BTreeMap<(usize, usize), Matrix>,
    /// `ε_{βα}`, computed from `D_{βα} = −D_{αβ}`.
    pub reverse: BTreeMap<(usize, usize), Matrix>,
}

/// Values of the derivation `D` of an overlap ring on the coordinate `y`
/// of a localization `ρ`: `D(y) = ρ(D(w)) / ∂ρ(w)/∂y` on curves.
fn push_derivation(rho: &RingHom, values: &[RingElem]) -> Result<RingElem> {
    let target = rho.target();
    if rho.source().nvars() != 1 || target.nvars() != 1 {
        return Err(Error::Unsupported(
            "triple-overlap derivations are implemented on curves".into(),
        ));
    }
    let jac = rho.var_image(0).partial(0);
    Ok(rho.apply(&values[0]).mul_ref(&jac.inverse()?))
}

/// `(1 + λD_12)*(ε_12) · ε_01 = ε_02` for derivations of a curve ring.
fn check_triple(conn: &LambdaConnection, d: [&RingElem; 3], lambda: &Scalar) -> Result<()> {
    let eps = |x: &RingElem| overlap_transport(conn, std::slice::from_ref(x), lambda);
    let (e01, e12, e02) = (eps(d[0])?, eps(d[1])?, eps(d[2])?);
    let (thick, _, shift) = shifted_hom(conn.ring(), std::slice::from_ref(d[1]), lambda)?;
    let on_thick = RingHom::new(
        &thick,
        &thick,
        shift.var_images().to_vec(),
        vec![RingElem::nil_gen(&thick, 0)],
    )?;
    let lhs = e12.apply_hom(&on_thick)?.mul(&e01)?;
    if lhs != e02 {
        return Err(Error::NotCocycle(format!(
            "(1 + λD_12)*(ε_12)·ε_01 = {lhs} but ε_02 = {e02}"
        )));
    }
    Ok(())
}

/// Builds `ε_{αβ}` on every overlap and checks the gluing identities:
/// `ε_{βα} = ε_{αβ}⁻¹` on pairs and
/// `(1 + λD_{βγ})*(ε_{βγ}) · ε_{αβ} = ε_{αγ}` on the triple overlap.
pub fn interpolate_thickening(data: &ThickeningData) -> Result<Thickening> {
    let cover = &data.cover;
    if data.connections.len() != cover.n_charts() {
        return Err(Error::Dimension(format!(
            "{} connections for {} charts",
            data.connections.len(),
            cover.n_charts()
        )));
    }
    for (a, c) in data.connections.iter().enumerate() {
        if !is_integrable(c) {
            return Err(Error::NotIntegrable(format!("chart `{}`", cover.chart(a).name)));
        }
    }
    let mut on_pairs = BTreeMap::new();
    for (a, b) in cover.pairs() {
        let ca = pullback_connection(&data.connections[a], cover.restriction(a, b))?;
        let cb = pullback_connection(&data.connections[b], cover.restriction(b, a))?;
        if ca.matrices() != cb.matrices() {
            return Err(Error::PreconditionViolated(format!(
                "chart connections disagree on the overlap `{}`-`{}`",
                cover.chart(a).name,
                cover.chart(b).name
            )));
        }
        on_pairs.insert((a, b), ca);
    }
    let mut transports = BTreeMap::new();
    let mut reverse = BTreeMap::new();
    for (a, b) in cover.pairs() {
        let d = data
            .derivations
            .get(&(a, b))
            .ok_or_else(|| Error::Resolution(format!("no derivation on overlap ({a}, {b})")))?;
        let conn = &on_pairs[&(a, b)];
        let fwd = overlap_transport(conn, d, &data.lambda)?;
        let neg: Vec<RingElem> = d.iter().map(RingElem::neg_ref).collect();
        let back = overlap_transport(conn, &neg, &data.lambda)?;
        if fwd.mul(&back)? != Matrix::identity(fwd.ring(), fwd.rows()) {
            return Err(Error::NotCocycle(format!("ε_{b}{a} is not the inverse of ε_{a}{b}")));
        }
        transports.insert((a, b), fwd);
        reverse.insert((a, b), back);
    }
    if let Some(t) = cover.triple() {
        let push = |a: usize, b: usize| push_derivation(&t.from_pairs[&(a, b)], &data.derivations[&(a, b)]);
        let (d01, d12, d02) = (push(0, 1)?, push(1, 2)?, push(0, 2)?);
        let defect = d01.add_ref(&d12).sub_ref(&d02);
        if !defect.is_zero() {
            return Err(Error::NotCocycle(format!(
                "D_01 + D_12 - D_02 = {defect} on the triple overlap"
            )));
        }
        let conn = pullback_connection(&on_pairs[&(0, 1)], &t.from_pairs[&(0, 1)])?;
        check_triple(&conn, [&d01, &d12, &d02], &data.lambda)?;
    }
    Ok(Thickening { transports, reverse })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::cover::Cover;
    use crate::ring::{parse_elem, Ring};

    fn elem(ring: &RingRef, s: &str) -> RingElem {
        parse_elem(ring, s).unwrap()
    }

    #[test]
    fn projective_line_overlap_example() {
        let cover = Cover::projective_line();
        let r = cover.overlap(0, 1).ring.clone();
        let a = "3*u^2 - u^-1";
        let conn = LambdaConnection::new(&r, Scalar::one(), vec![Matrix::diagonal(&r, vec![elem(&r, a)])]).unwrap();
        for k in -2..=3 {
            let d = vec![elem(&r, &format!("u^{k}"))];
            let t = overlap_transport(&conn, &d, &Scalar::one()).unwrap();
            let thick = t.ring().clone();
            // 1 + a(u)·λεu^k, expanded by hand
            let expected = elem(&thick, &format!("1 + 3*u^{}*eps - u^{}*eps", k + 2, k - 1));
            assert_eq!(t.get(0, 0), &expected, "k = {k}");
        }
    }

    #[test]
    fn trivial_cases_give_identity() {
        let cover = Cover::punctured_affine(&["x", "y"]).unwrap();
        let conns: Vec<LambdaConnection> = cover
            .charts()
            .iter()
            .map(|c| LambdaConnection::trivial(&c.ring, 2, Scalar::one()))
            .collect();
        let r = cover.overlap(0, 1).ring.clone();
        let data = |lambda: i64, d: Vec<RingElem>| ThickeningData {
            cover: cover.clone(),
            connections: conns.clone(),
            derivations: BTreeMap::from([((0, 1), d)]),
            lambda: Scalar::from_int(lambda),
        };
        let d = vec![elem(&r, "x^2*y^-1"), elem(&r, "x")];
        for th in [
            interpolate_thickening(&data(0, d.clone())).unwrap(),
            interpolate_thickening(&data(1, vec![RingElem::zero(&r), RingElem::zero(&r)])).unwrap(),
        ] {
            assert!(th.transports[&(0, 1)].is_identity());
        }
    }

    #[test]
    fn punctured_plane_with_a_flat_connection() {
        let cover = Cover::punctured_affine(&["x", "y"]).unwrap();
        let r = cover.overlap(0, 1).ring.clone();
        let conns: Vec<LambdaConnection> = cover
            .charts()
            .iter()
            .map(|c| {
                let m = |s: &str| Matrix::diagonal(&c.ring, vec![parse_elem(&c.ring, s).unwrap()]);
                LambdaConnection::new(&c.ring, Scalar::from_int(2), vec![m("y"), m("x")]).unwrap()
            })
            .collect();
        let data = ThickeningData {
            cover: cover.clone(),
            connections: conns,
            derivations: BTreeMap::from([((0, 1), vec![elem(&r, "x*y^-1"), elem(&r, "1")])]),
            lambda: Scalar::from_int(3),
        };
        let th = interpolate_thickening(&data).unwrap();
        let t = &th.transports[&(0, 1)];
        let expected = elem(t.ring(), "1 + 3*x*eps + 3*x*eps");
        assert_eq!(t.get(0, 0), &expected);
        let mut bad = data.clone();
        let c0 = cover.chart(0).ring.clone();
        let m = |s: &str| Matrix::diagonal(&c0, vec![elem(&c0, s)]);
        bad.connections[0] = LambdaConnection::new(&c0, Scalar::one(), vec![m("y"), m("0")]).unwrap();
        assert!(matches!(interpolate_thickening(&bad), Err(Error::NotIntegrable(_))));
    }

    #[test]
    fn three_chart_cocycle() {
        let cover = Cover::projective_line_three();
        // only the trivial connection extends over all of ℙ¹
        let mut conns: Vec<LambdaConnection> = cover
            .charts()
            .iter()
            .map(|c| LambdaConnection::trivial(&c.ring, 1, Scalar::one()))
            .collect();
        let r = |a: usize, b: usize| cover.overlap(a, b).ring.clone();
        let good = BTreeMap::from([
            ((0, 1), vec![elem(&r(0, 1), "u^2")]),
            ((1, 2), vec![elem(&r(1, 2), "u^3")]),
            ((0, 2), vec![elem(&r(0, 2), "u^2 + u^3")]),
        ]);
        let data = ThickeningData {
            cover: cover.clone(),
            connections: conns.clone(),
            derivations: good.clone(),
            lambda: Scalar::from_int(2),
        };
        interpolate_thickening(&data).unwrap();
        let mut bad = data.clone();
        bad.derivations.insert((0, 2), vec![elem(&r(0, 2), "u^2")]);
        assert!(matches!(interpolate_thickening(&bad), Err(Error::NotCocycle(_))));
        conns.truncate(2);
        let short = ThickeningData {
            connections: conns,
            ..data
        };
        assert!(interpolate_thickening(&short).is_err());
    }

    #[test]
    fn triple_identity_with_a_nonzero_connection() {
        let r = Ring::torus(&["u"]);
        let conn = LambdaConnection::new(
            &r,
            Scalar::one(),
            vec![Matrix::parse(&r, &[vec!["u", "1"], vec!["u^-2", "0"]]).unwrap()],
        )
        .unwrap();
        let (d01, d12) = (elem(&r, "u^2 - 1"), elem(&r, "1/2*u^-3"));
        let d02 = d01.add_ref(&d12);
        check_triple(&conn, [&d01, &d12, &d02], &Scalar::from_int(5)).unwrap();
        assert!(check_triple(&conn, [&d01, &d12, &d01], &Scalar::from_int(5)).is_err());
    }
}
