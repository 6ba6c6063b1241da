use rand::Rng as _;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ring::{interpolate_homs, KaehlerForm, NilShape, Ring, RingElem, RingHom, RingRef, Scalar};
use crate::sampling;

/// A λ-connection on `B` regarded as an `A`-module through a structure
/// homomorphism `s : A → B`:
/// `∇_i(b) = Σ_k ∂b/∂y_k · ∇_i(y_k) + p_i·b`.
///
/// It is a λ-transversal distribution when it is multiplicative, which
/// happens exactly when every potential `p_i` vanishes.
#[derive(Debug, Clone)]
pub struct Distribution {
    structure: RingHom,
    lambda: Scalar,
    /// `values[i][k] = ∇_i(y_k)`.
    values: Vec<Vec<RingElem>>,
    potential: Vec<RingElem>,
}

impl Distribution {
    pub fn new(structure: RingHom, lambda: Scalar, values: Vec<Vec<RingElem>>) -> Result<Self> {
        let b = structure.target().clone();
        let potential = vec![RingElem::zero(&b); structure.source().nvars()];
        Self::with_potential(structure, lambda, values, potential)
    }

    pub fn with_potential(
        structure: RingHom,
        lambda: Scalar,
        values: Vec<Vec<RingElem>>,
        potential: Vec<RingElem>,
    ) -> Result<Self> {
        let a = structure.source();
        let b = structure.target();
        if a.shape() != NilShape::None || b.shape() != NilShape::None {
            return Err(Error::UnsupportedTarget(
                "distributions live on plain coordinate rings".into(),
            ));
        }
        if values.len() != a.nvars() || potential.len() != a.nvars() {
            return Err(Error::Dimension("one row of values per base coordinate".into()));
        }
        for row in &values {
            if row.len() != b.nvars() {
                return Err(Error::Dimension("one value per fibre coordinate".into()));
            }
            for v in row {
                if !Ring::same(v.ring(), b) {
                    return Err(Error::RingMismatch(format!("value {v} not in {}", b.describe())));
                }
            }
        }
        Ok(Distribution {
            structure,
            lambda,
            values,
            potential,
        })
    }

    /// `B = A` with `∇ = λd`.
    pub fn identity(a: &RingRef, lambda: Scalar) -> Result<Self> {
        let n = a.nvars();
        let values = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        if i == k {
                            RingElem::constant(a, lambda.clone())
                        } else {
                            RingElem::zero(a)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(RingHom::identity(a), lambda, values)
    }

    pub fn structure(&self) -> &RingHom {
        &self.structure
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn base(&self) -> &RingRef {
        self.structure.source()
    }

    pub fn total(&self) -> &RingRef {
        self.structure.target()
    }

    pub fn apply(&self, i: usize, b: &RingElem) -> RingElem {
        let mut out = b.mul_ref(&self.potential[i]);
        for (k, v) in self.values[i].iter().enumerate() {
            let db = b.partial(k);
            if !db.is_zero() {
                out = out.add_ref(&db.mul_ref(v));
            }
        }
        out
    }

    /// The image of `db` under the splitting `dy_k ↦ Σ_i ∇_i(y_k) dx_i`,
    /// returned as coefficients of the `dx_i`.
    pub fn split_differential(&self, b: &RingElem) -> Vec<RingElem> {
        let db = KaehlerForm::d(b);
        (0..self.base().nvars())
            .map(|i| {
                let mut acc = RingElem::zero(self.total());
                for k in 0..self.total().nvars() {
                    acc = acc.add_ref(&db.dx(k).mul_ref(&self.values[i][k]));
                }
                acc
            })
            .collect()
    }

    /// Samples pairs `(b, b')` and checks `∇(bb') = b∇b' + b'∇b`.
    pub fn check_multiplicative(&self, rng: &mut ChaCha8Rng, samples: usize) -> Result<()> {
        let b_ring = self.total();
        for _ in 0..samples {
            let x = sampling::random_elem(rng, b_ring, 2, 3);
            let y = sampling::random_elem(rng, b_ring, 2, 3);
            for i in 0..self.base().nvars() {
                let lhs = self.apply(i, &x.mul_ref(&y));
                let rhs = x.mul_ref(&self.apply(i, &y)).add_ref(&y.mul_ref(&self.apply(i, &x)));
                if lhs != rhs {
                    return Err(Error::NotMultiplicative(format!("component {i} on ({x}) * ({y})")));
                }
            }
        }
        Ok(())
    }

    /// Checks the normalization `∇_i(s(x_j)) = λδ_ij`.
    pub fn check_splitting(&self) -> Result<()> {
        let n = self.base().nvars();
        for i in 0..n {
            for j in 0..n {
                let sx = self.structure.var_image(j);
                let got = self.apply(i, sx);
                let want = if i == j {
                    RingElem::constant(self.total(), self.lambda.clone())
                } else {
                    RingElem::zero(self.total())
                };
                if got != want {
                    return Err(Error::NotMultiplicative(format!(
                        "component {i} on the base coordinate {j} gives {got}, expected {want}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A tangent vector `δ = g + εD : A → C[ε]`, split into body and derivation.
#[derive(Debug, Clone)]
pub struct Tangent {
    pub hom: RingHom,
    /// `g(x_i)` inside `C[ε]`.
    pub body: Vec<RingElem>,
    /// `ε·D(x_i)` inside `C[ε]`.
    pub eps_part: Vec<RingElem>,
}

impl Tangent {
    pub fn new(hom: RingHom) -> Result<Self> {
        if hom.target().shape() != NilShape::Dual {
            return Err(Error::UnsupportedTarget(format!(
                "tangent vectors land in dual numbers, got {}",
                hom.target().describe()
            )));
        }
        let t = hom.target().clone();
        let body = hom
            .var_images()
            .iter()
            .map(|v| RingElem::from_poly(&t, v.body()))
            .collect();
        let eps_part = hom.var_images().iter().map(RingElem::nilpotent_part).collect();
        Ok(Tangent { hom, body, eps_part })
    }

    /// The constant map `ι = g` composed into `C[ε]`.
    pub fn constant(&self) -> Result<RingHom> {
        RingHom::new(self.hom.source(), self.hom.target(), self.body.clone(), vec![])
    }
}

/// The ingredients of a horizontal lift after validation.
pub struct LiftSetup<'a> {
    dist: &'a Distribution,
    t_eps: RingHom,
    tangent: Tangent,
}

impl LiftSetup<'_> {
    /// `t(b) + ε Σ_i t(∇_i b) D(x_i)`, through the splitting of `db`.
    pub fn route_splitting(&self, b: &RingElem) -> RingElem {
        let coeffs = self.dist.split_differential(b);
        let mut out = self.t_eps.apply(b);
        for (c, e) in coeffs.iter().zip(&self.tangent.eps_part) {
            out = out.add_ref(&self.t_eps.apply(c).mul_ref(e));
        }
        out
    }

    /// `t[ε](b ⊗ 1 + Σ_i ∇_i b ⊗ η_i)` with `η_i = δ(x_i) − ι(x_i)`: the
    /// transport of `b` between the pullbacks along `ι` and `δ`.
    pub fn route_transport(&self, b: &RingElem) -> Result<RingElem> {
        let iota = self.tangent.constant()?;
        let mut out = self.t_eps.apply(b);
        for i in 0..self.dist.base().nvars() {
            let eta = self.tangent.hom.var_image(i).sub_ref(iota.var_image(i));
            out = out.add_ref(&self.t_eps.apply(&self.dist.apply(i, b)).mul_ref(&eta));
        }
        Ok(out)
    }
}

fn setup<'a>(dist: &'a Distribution, t: &RingHom, tangent: &RingHom) -> Result<LiftSetup<'a>> {
    if !Ring::same(t.source(), dist.total()) || !Ring::same(tangent.source(), dist.base()) {
        return Err(Error::RingMismatch("lift data over different rings".into()));
    }
    let tangent = Tangent::new(tangent.clone())?;
    let c_eps = tangent.hom.target().clone();
    if c_eps.vars() != t.target().vars() || t.target().shape() != NilShape::None {
        return Err(Error::RingMismatch(format!(
            "tangent lands in {} but the point lands in {}",
            c_eps.describe(),
            t.target().describe()
        )));
    }
    let images = t
        .var_images()
        .iter()
        .map(|v| v.embed(&c_eps))
        .collect::<Result<Vec<_>>>()?;
    let t_eps = RingHom::new(t.source(), &c_eps, images, vec![])?;
    for j in 0..dist.base().nvars() {
        let via_t = t_eps.apply(dist.structure().var_image(j));
        if via_t != tangent.body[j] {
            return Err(Error::BodyMismatch(format!(
                "g(x_{j}) = {} but t(s(x_{j})) = {via_t}",
                tangent.body[j]
            )));
        }
    }
    Ok(LiftSetup { dist, t_eps, tangent })
}

/// The first-order horizontal lift `y_k ↦ t(y_k) + ε Σ_i t(∇_i y_k) D(x_i)`.
///
/// The distribution is checked to be multiplicative on `samples` seeded
/// random pairs and to split the structure map.
pub fn horizontal_lift(
    dist: &Distribution,
    t: &RingHom,
    tangent: &RingHom,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<RingHom> {
    dist.check_multiplicative(rng, samples)?;
    dist.check_splitting()?;
    let s = setup(dist, t, tangent)?;
    let images = (0..dist.total().nvars())
        .map(|k| s.route_splitting(&RingElem::var(dist.total(), k)))
        .collect();
    RingHom::new(dist.total(), s.tangent.hom.target(), images, vec![])
}

/// Everything checked about one lift.
#[derive(Debug, Clone)]
pub struct LiftReport {
    pub lift: RingHom,
    pub samples: usize,
    /// First element on which the three routes disagree.
    pub route_mismatch: Option<String>,
    /// First pair on which the lift is not multiplicative.
    pub product_mismatch: Option<String>,
    pub reduces_to_point: bool,
    /// Restriction to `A` equals `(1−λ)ι + λδ`.
    pub restricts_to_interpolation: bool,
}

impl LiftReport {
    pub fn holds(&self) -> bool {
        self.route_mismatch.is_none()
            && self.product_mismatch.is_none()
            && self.reduces_to_point
            && self.restricts_to_interpolation
    }
}

/// Builds the lift and compares it with the splitting and transport routes
/// on random elements of `B`.
pub fn check_lift(
    dist: &Distribution,
    t: &RingHom,
    tangent: &RingHom,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<LiftReport> {
    let lift = horizontal_lift(dist, t, tangent, rng, samples)?;
    let s = setup(dist, t, tangent)?;
    let b_ring = dist.total();
    let mut route_mismatch = None;
    let mut product_mismatch = None;
    let mut reduces_to_point = true;
    for _ in 0..samples {
        let terms = 1 + rng.gen_range(0..4);
        let x = sampling::random_elem(rng, b_ring, 2, terms);
        let y = sampling::random_elem(rng, b_ring, 2, 3);
        let via_hom = lift.apply(&x);
        let via_split = s.route_splitting(&x);
        let via_transport = s.route_transport(&x)?;
        if route_mismatch.is_none() && (via_hom != via_split || via_hom != via_transport) {
            route_mismatch = Some(format!("{x}: {via_hom} | {via_split} | {via_transport}"));
        }
        if product_mismatch.is_none() && lift.apply(&x.mul_ref(&y)) != via_hom.mul_ref(&lift.apply(&y)) {
            product_mismatch = Some(format!("({x}) * ({y})"));
        }
        if via_hom.body() != t.apply(&x).body() {
            reduces_to_point = false;
        }
    }
    let iota = s.tangent.constant()?;
    let expected = interpolate_homs(&iota, &s.tangent.hom, dist.lambda())?;
    let restricted = lift.compose(dist.structure())?;
    Ok(LiftReport {
        lift,
        samples,
        route_mismatch,
        product_mismatch,
        reduces_to_point,
        restricts_to_interpolation: restricted == expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_elem;
    use rand::SeedableRng;

    #[test]
    fn identity_fibration_lift() {
        let a = Ring::polynomial(&["x"]);
        let c = Ring::polynomial(&["c"]);
        let ce = c.with_dual("eps").unwrap();
        let lambda = Scalar::ratio(2, 3);
        let dist = Distribution::identity(&a, lambda).unwrap();
        let t = RingHom::from_literals(&a, &c, &["c^2"], &[]).unwrap();
        let tangent = RingHom::from_literals(&a, &ce, &["c^2 + (c + 1)*eps"], &[]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lift = horizontal_lift(&dist, &t, &tangent, &mut rng, 20).unwrap();
        assert_eq!(lift.var_image(0), &parse_elem(&ce, "c^2 + 2/3*(c + 1)*eps").unwrap());
    }

    #[test]
    fn zero_tangent_gives_constant_lift() {
        let a = Ring::polynomial(&["x"]);
        let b = Ring::polynomial(&["x", "z"]);
        let s = RingHom::from_literals(&a, &b, &["x"], &[]).unwrap();
        let values = vec![vec![RingElem::one(&b), parse_elem(&b, "z^2 + x").unwrap()]];
        let dist = Distribution::new(s, Scalar::one(), values).unwrap();
        let c = Ring::polynomial(&["c"]);
        let ce = c.with_dual("eps").unwrap();
        let t = RingHom::from_literals(&b, &c, &["c", "2*c"], &[]).unwrap();
        let tangent = RingHom::from_literals(&a, &ce, &["c"], &[]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let report = check_lift(&dist, &t, &tangent, &mut rng, 30).unwrap();
        assert!(report.holds());
        let ce_t = RingHom::from_literals(&b, &ce, &["c", "2*c"], &[]).unwrap();
        assert_eq!(report.lift, ce_t);
    }

    #[test]
    fn potentials_are_not_multiplicative() {
        let a = Ring::polynomial(&["x"]);
        let s = RingHom::identity(&a);
        let values = vec![vec![RingElem::one(&a)]];
        let dist = Distribution::with_potential(s, Scalar::one(), values, vec![RingElem::var(&a, 0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            dist.check_multiplicative(&mut rng, 100),
            Err(Error::NotMultiplicative(_))
        ));
    }

    #[test]
    fn body_mismatch_is_reported() {
        let a = Ring::polynomial(&["x"]);
        let c = Ring::polynomial(&["c"]);
        let ce = c.with_dual("eps").unwrap();
        let dist = Distribution::identity(&a, Scalar::one()).unwrap();
        let t = RingHom::from_literals(&a, &c, &["c"], &[]).unwrap();
        let tangent = RingHom::from_literals(&a, &ce, &["c + 1 + eps"], &[]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(matches!(
            horizontal_lift(&dist, &t, &tangent, &mut rng, 10),
            Err(Error::BodyMismatch(_))
        ));
    }
}
