use crate::error::{Error, Result};
use crate::ring::{
    hom_square_zero_close, interpolate_homs, KaehlerForm, Matrix, NilShape, Ring, RingElem, RingHom, Scalar,
};

use super::connection::{curvature, LambdaConnection};

/// The isomorphism `f_λ*E → f0*E` attached to a λ-connection and two
/// homomorphisms whose difference is square-zero.
#[derive(Debug, Clone)]
pub struct EpsilonTransport {
    pub f0: RingHom,
    pub f1: RingHom,
    /// `f_λ = (1−λ)f0 + λf1`.
    pub f_lambda: RingHom,
    pub matrix: Matrix,
}

impl EpsilonTransport {
    /// The transport in the opposite direction `f0*E → f_λ*E`.
    pub fn inverse_matrix(&self) -> Result<Matrix> {
        self.matrix.inverse()
    }

    /// Whether the matrix reduces to the identity modulo nilpotents.
    pub fn reduces_to_identity(&self) -> bool {
        self.matrix.project().is_identity()
    }
}

fn check_source(conn: &LambdaConnection, f: &RingHom) -> Result<()> {
    if !Ring::same(conn.ring(), f.source()) {
        return Err(Error::RingMismatch(format!(
            "connection over {} but hom from {}",
            conn.ring().describe(),
            f.source().describe()
        )));
    }
    Ok(())
}

/// `η_i = f1(x_i) − f0(x_i)`, checked to lie in a square-zero ideal.
pub fn generator_offsets(f0: &RingHom, f1: &RingHom) -> Result<Vec<RingElem>> {
    if !hom_square_zero_close(f0, f1)? {
        return Err(Error::SquareZeroViolation(
            "generator differences have nonzero body".into(),
        ));
    }
    let eta: Vec<RingElem> = f1
        .var_images()
        .iter()
        .zip(f0.var_images())
        .map(|(a, b)| a.sub_ref(b))
        .collect();
    for a in &eta {
        for b in &eta {
            if !a.mul_ref(b).is_zero() {
                return Err(Error::SquareZeroViolation(format!(
                    "offsets {a} and {b} have nonzero product"
                )));
            }
        }
    }
    Ok(eta)
}

/// `T = I + Σ_i f0(A_i)·η_i`.
///
/// The same matrix is computed with `f_λ` in place of `f0`; the two agree
/// because every `η_i η_j` vanishes, and a disagreement is reported as an
/// error.
pub fn epsilon_transport(conn: &LambdaConnection, f0: &RingHom, f1: &RingHom) -> Result<EpsilonTransport> {
    check_source(conn, f0)?;
    check_source(conn, f1)?;
    let eta = generator_offsets(f0, f1)?;
    let f_lambda = interpolate_homs(f0, f1, conn.lambda())?;
    let target = f0.target();
    let r = conn.rank();
    let mut t0 = Matrix::identity(target, r);
    let mut tl = Matrix::identity(target, r);
    for (i, e) in eta.iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        t0 = t0.add(&conn.matrix(i).apply_hom(f0)?.scale_elem(e))?;
        tl = tl.add(&conn.matrix(i).apply_hom(&f_lambda)?.scale_elem(e))?;
    }
    if t0 != tl {
        return Err(Error::SquareZeroViolation(
            "transport depends on the choice of pullback".into(),
        ));
    }
    Ok(EpsilonTransport {
        f0: f0.clone(),
        f1: f1.clone(),
        f_lambda,
        matrix: t0,
    })
}

fn relation_holds(lhs: &RingHom, a: &RingHom, b: &RingHom, lambda: &Scalar) -> Result<bool> {
    let one_minus = &Scalar::one() - lambda;
    Ok(lhs
        .var_images()
        .iter()
        .zip(a.var_images().iter().zip(b.var_images()))
        .all(|(l, (x, y))| *l == x.scale(&one_minus).add_ref(&y.scale(lambda))))
}

/// Checks that `ε_{f2,f20} ∘ ε_{f1,f12} ∘ ε_{f0,f01}` is the identity.
///
/// The six homomorphisms must be pairwise square-zero close and satisfy
/// `f1 = (1−λ)f0 + λf01`, `f2 = (1−λ)f1 + λf12`, `f0 = (1−λ)f2 + λf20` and
/// `f0 + f1 + f2 = f01 + f12 + f20` on generators.
pub fn verify_triangle(
    conn: &LambdaConnection,
    f0: &RingHom,
    f1: &RingHom,
    f2: &RingHom,
    f01: &RingHom,
    f12: &RingHom,
    f20: &RingHom,
) -> Result<bool> {
    let named = [
        ("f0", f0),
        ("f1", f1),
        ("f2", f2),
        ("f01", f01),
        ("f12", f12),
        ("f20", f20),
    ];
    for (n, f) in &named {
        check_source(conn, f).map_err(|e| Error::PreconditionViolated(format!("{n}: {e}")))?;
    }
    for (a, (na, fa)) in named.iter().enumerate() {
        for (nb, fb) in &named[a + 1..] {
            let close =
                hom_square_zero_close(fa, fb).map_err(|e| Error::PreconditionViolated(format!("{na}, {nb}: {e}")))?;
            if !close {
                return Err(Error::PreconditionViolated(format!(
                    "{na} and {nb} are not square-zero close"
                )));
            }
        }
    }
    let l = conn.lambda();
    let relations = [
        ("f1 = (1-l)f0 + l*f01", f1, f0, f01),
        ("f2 = (1-l)f1 + l*f12", f2, f1, f12),
        ("f0 = (1-l)f2 + l*f20", f0, f2, f20),
    ];
    for (name, lhs, a, b) in relations {
        if !relation_holds(lhs, a, b, l)? {
            return Err(Error::PreconditionViolated(format!("relation {name} fails")));
        }
    }
    let sums_agree = (0..conn.nvars()).all(|i| {
        let s1 = f0.var_image(i).add_ref(f1.var_image(i)).add_ref(f2.var_image(i));
        let s2 = f01.var_image(i).add_ref(f12.var_image(i)).add_ref(f20.var_image(i));
        s1 == s2
    });
    if !sums_agree {
        return Err(Error::PreconditionViolated(
            "relation f0 + f1 + f2 = f01 + f12 + f20 fails".into(),
        ));
    }
    let e01 = epsilon_transport(conn, f0, f01)?;
    let e12 = epsilon_transport(conn, f1, f12)?;
    let e20 = epsilon_transport(conn, f2, f20)?;
    // f1*E → f0*E, f2*E → f1*E, f0*E → f2*E
    let composite = e01.matrix.mul(&e12.matrix)?.mul(&e20.matrix)?;
    Ok(composite.is_identity())
}

/// `B_k = Σ_i f(A_i)·∂f(x_i)/∂y_k` over the target coordinates `y_k`;
/// nilpotent parameters of the target are constants for `∂/∂y_k`.
pub fn pullback_connection(conn: &LambdaConnection, f: &RingHom) -> Result<LambdaConnection> {
    check_source(conn, f)?;
    let target = f.target();
    if !matches!(target.shape(), NilShape::None | NilShape::Dual) {
        return Err(Error::UnsupportedTarget(format!(
            "pullback to {} is not supported",
            target.describe()
        )));
    }
    let r = conn.rank();
    let pulled: Vec<Matrix> = conn.matrices().iter().map(|a| a.apply_hom(f)).collect::<Result<_>>()?;
    let mut mats = Vec::with_capacity(target.nvars());
    for k in 0..target.nvars() {
        let mut b = Matrix::zero(target, r, r);
        for (i, a) in pulled.iter().enumerate() {
            let jac = f.var_image(i).partial(k);
            if !jac.is_zero() {
                b = b.add(&a.scale_elem(&jac))?;
            }
        }
        mats.push(b);
    }
    LambdaConnection::with_rank(target, r, conn.lambda().clone(), mats)
}

/// Result of comparing `ε ∘ (f_λ*∇)` with `(f0*∇) ∘ ε`.
#[derive(Debug, Clone)]
pub struct IntertwiningReport {
    /// `λ∂_k T + B⁰_k T − T B^λ_k` for each target coordinate.
    pub defects: Vec<Matrix>,
    /// Whether `η_j dη_i + η_i dη_j = 0` for all `i, j`.
    pub offsets_symmetric_vanish: bool,
}

impl IntertwiningReport {
    pub fn holds(&self) -> bool {
        self.offsets_symmetric_vanish && self.defects.iter().all(Matrix::is_zero)
    }
}

/// Compares the two composites on the standard basis. For an integrable
/// connection all defects vanish.
pub fn intertwining(conn: &LambdaConnection, f0: &RingHom, f1: &RingHom) -> Result<IntertwiningReport> {
    let t = epsilon_transport(conn, f0, f1)?;
    let p0 = pullback_connection(conn, f0)?;
    let pl = pullback_connection(conn, &t.f_lambda)?;
    let lambda = conn.lambda();
    let mut defects = Vec::new();
    for k in 0..f0.target().nvars() {
        let lhs = t.matrix.partial(k).scale(lambda).add(&p0.matrix(k).mul(&t.matrix)?)?;
        let rhs = t.matrix.mul(pl.matrix(k))?;
        defects.push(lhs.sub(&rhs)?);
    }
    let eta = generator_offsets(f0, f1)?;
    let mut sym = true;
    for a in &eta {
        for b in &eta {
            let s = KaehlerForm::d(b).mul_elem(a).add_ref(&KaehlerForm::d(a).mul_elem(b));
            sym &= s.is_zero();
        }
    }
    Ok(IntertwiningReport {
        defects,
        offsets_symmetric_vanish: sym,
    })
}

/// The defect predicted by curvature: `Σ_{i,j} ∂_k f0(x_j)·η_i·f0(K_ji)`.
pub fn predicted_intertwining_defect(conn: &LambdaConnection, f0: &RingHom, f1: &RingHom, k: usize) -> Result<Matrix> {
    let eta = generator_offsets(f0, f1)?;
    let curv = curvature(conn);
    let r = conn.rank();
    let mut out = Matrix::zero(f0.target(), r, r);
    for (i, e) in eta.iter().enumerate() {
        for j in 0..conn.nvars() {
            if let Some(kji) = curv.get(j, i) {
                let coef = f0.var_image(j).partial(k).mul_ref(e);
                out = out.add(&kji.apply_hom(f0)?.scale_elem(&coef))?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_elem;

    fn rings() -> (crate::ring::RingRef, crate::ring::RingRef) {
        let a = Ring::polynomial(&["x"]);
        let t = Ring::polynomial(&["c"]).with_dual("eps").unwrap();
        (a, t)
    }

    #[test]
    fn transport_example() {
        let (a, t) = rings();
        let conn =
            LambdaConnection::new(&a, Scalar::one(), vec![Matrix::parse(&a, &[vec!["x^2 + 1"]]).unwrap()]).unwrap();
        let f0 = RingHom::from_literals(&a, &t, &["c"], &[]).unwrap();
        let f1 = RingHom::from_literals(&a, &t, &["c + eps"], &[]).unwrap();
        let e = epsilon_transport(&conn, &f0, &f1).unwrap();
        assert_eq!(e.matrix, Matrix::parse(&t, &[vec!["1 + (c^2 + 1)*eps"]]).unwrap());
        assert!(e.reduces_to_identity());
        let same = epsilon_transport(&conn, &f0, &f0).unwrap();
        assert!(same.matrix.is_identity());
    }

    #[test]
    fn degenerate_triangle() {
        let (a, t) = rings();
        let conn = LambdaConnection::new(&a, Scalar::one(), vec![Matrix::parse(&a, &[vec!["x"]]).unwrap()]).unwrap();
        let f0 = RingHom::from_literals(&a, &t, &["c"], &[]).unwrap();
        let f1 = RingHom::from_literals(&a, &t, &["c + eps"], &[]).unwrap();
        let f2 = RingHom::from_literals(&a, &t, &["c - 3*c*eps"], &[]).unwrap();
        assert!(verify_triangle(&conn, &f0, &f1, &f2, &f1, &f2, &f0).unwrap());
        let bad = RingHom::from_literals(&a, &t, &["c + 2*eps"], &[]).unwrap();
        assert!(matches!(
            verify_triangle(&conn, &f0, &f1, &f2, &bad, &f2, &f0),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn pullback_along_identity_and_constants() {
        let a = Ring::polynomial(&["x", "y"]);
        let m1 = Matrix::parse(&a, &[vec!["x", "1"], vec!["0", "y"]]).unwrap();
        let m2 = Matrix::parse(&a, &[vec!["y", "0"], vec!["x", "1"]]).unwrap();
        let conn = LambdaConnection::new(&a, Scalar::from_int(2), vec![m1, m2]).unwrap();
        assert_eq!(pullback_connection(&conn, &RingHom::identity(&a)).unwrap(), conn);
        let t = Ring::polynomial(&["c"]);
        let k = RingHom::from_literals(&a, &t, &["2", "3"], &[]).unwrap();
        let p = pullback_connection(&conn, &k).unwrap();
        assert!(p.matrix(0).is_zero());
        let two = Ring::polynomial(&["c"]).with_two_parameters("e1", "e2").unwrap();
        let h = RingHom::new(
            &a,
            &two,
            vec![parse_elem(&two, "c").unwrap(), parse_elem(&two, "c").unwrap()],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            pullback_connection(&conn, &h),
            Err(Error::UnsupportedTarget(_))
        ));
    }
}
