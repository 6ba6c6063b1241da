//! The seeded property suite behind `verify-paper`.
//!
//! Each proposition draws its inputs from a generator keyed by the seed and
//! its own label, so propositions can be run alone or in any order.

use std::time::Instant;

use rand::Rng as _;
use rand_chacha::ChaCha8Rng;

use crate::builtin::{p1_nilpotent, p1_trivial};
use crate::cech::{
    cech_h1, euler_characteristic, is_hyper_coboundary, Cover, CoverRef, DegreeWindow, HiggsBundleData, HiggsComplex,
    HyperCocycle, MThetaSign, SheafComplex,
};
use crate::conn::{check_lift, intertwining, verify_triangle, Distribution};
use crate::error::Result;
use crate::ks::{
    build_deformation_with, check_conditions, contract, deformations_equivalent_with, gradedness_check,
    ks_cocycle_with, seeded_family, Order2Solver, TangentCocycle,
};
use crate::report::{Report, TaskRecord};
use crate::ring::{
    gm_twist_check, interpolate_homs, rees::rees_diagonal_pair, rees_trivialize, rees_untrivialize, FirstOrderDiagonal,
    Matrix, ReesElem, Ring, RingElem, RingHom, RingRef, Scalar,
};
use crate::sampling::{self, random_elem, random_integrable_connection, random_nilpotent, random_scalar, sub_rng};

pub const DEFAULT_SEED: u64 = 20240611;
pub const FAMILY_SIZE: usize = 50;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    /// `Flipped` runs the suite against the wrong sign of `m_θ`.
    pub sign: MThetaSign,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: DEFAULT_SEED,
            sign: MThetaSign::Standard,
        }
    }
}

pub struct Proposition {
    pub id: u8,
    pub name: &'static str,
    pub claim: &'static str,
    run: fn(&VerifyOptions) -> Result<Outcome>,
}

/// What a proposition run found: the number of cases checked and the first
/// counterexample, if any.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub cases: usize,
    pub witness: Option<String>,
}

impl Outcome {
    fn case(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }
}

pub const PROPOSITIONS: [Proposition; 10] = [
    Proposition {
        id: 1,
        name: "interpolation-is-a-ring-homomorphism",
        claim: "(1-l)f0 + l*f1 is multiplicative and f0 = (1-l)f_l + l*f_(l-1)",
        run: interpolation,
    },
    Proposition {
        id: 2,
        name: "transport-triangle-is-identity",
        claim: "the composite of three epsilon-transports around a triangle is the identity",
        run: triangle,
    },
    Proposition {
        id: 3,
        name: "transport-intertwines-pullbacks",
        claim: "eps o f_l*(nabla) = f0*(nabla) o eps for integrable connections",
        run: intertwines,
    },
    Proposition {
        id: 4,
        name: "horizontal-lift-routes-agree",
        claim: "splitting and transport lifts agree, are ring homomorphisms and reduce to the point",
        run: lifts,
    },
    Proposition {
        id: 5,
        name: "rees-trivialization",
        claim: "trivialization inverts untrivialization and the Gm twist is realized by the diagonal pair",
        run: rees,
    },
    Proposition {
        id: 6,
        name: "line-bundle-cohomology",
        claim: "dim H^1(O(d)) = max(0, -d-1) on P^1 for -6 <= d <= 6",
        run: line_bundles,
    },
    Proposition {
        id: 7,
        name: "hypercohomology-euler-characteristic",
        claim: "the Higgs complex of p1-nilpotent has Euler characteristic 8",
        run: euler,
    },
    Proposition {
        id: 8,
        name: "ks-pipeline",
        claim: "ks cocycles satisfy the hyper-cocycle conditions, deform to Higgs bundles and send coboundaries to coboundaries",
        run: ks_pipeline,
    },
    Proposition {
        id: 9,
        name: "ks-gradedness",
        claim: "ks(t*theta, chi) is the t-image of ks(theta, chi), at cocycle and class level",
        run: gradedness,
    },
    Proposition {
        id: 10,
        name: "ks-order2-integrability",
        claim: "deforming along two tangent cocycles in either order gives equivalent bundles",
        run: integrability,
    },
];

impl Proposition {
    pub fn by_id(id: u8) -> Option<&'static Proposition> {
        PROPOSITIONS.iter().find(|p| p.id == id)
    }

    pub fn run(&self, opts: &VerifyOptions) -> TaskRecord {
        let start = Instant::now();
        let mut rec = TaskRecord::new(self.id.to_string(), self.name);
        rec.value("claim", self.claim);
        match (self.run)(opts) {
            Ok(out) => {
                rec.value("cases", out.cases);
                if let Some(w) = out.witness {
                    rec.fail(w);
                }
            }
            Err(e) => {
                rec.fail(format!("error: {e}"));
            }
        }
        rec.elapsed = start.elapsed();
        rec
    }
}

pub fn verify_paper(opts: &VerifyOptions) -> Report {
    let mut report = Report::new("verify-paper", opts.seed);
    if opts.sign == MThetaSign::Flipped {
        report.source.push_str(" [m_theta sign flipped]");
    }
    report.tasks = PROPOSITIONS.iter().map(|p| p.run(opts)).collect();
    report
}

fn dual_target() -> RingRef {
    Ring::polynomial(&["c"]).with_dual("eps").expect("fresh name")
}

fn random_hom(rng: &mut ChaCha8Rng, source: &RingRef, target: &RingRef) -> RingHom {
    let images = (0..source.nvars()).map(|_| random_elem(rng, target, 3, 3)).collect();
    RingHom::new(source, target, images, vec![]).expect("polynomial source")
}

/// `f + η` with `η` a random `ε`-multiple on each generator.
fn shifted(rng: &mut ChaCha8Rng, f: &RingHom) -> RingHom {
    let images = f
        .var_images()
        .iter()
        .map(|v| v.add_ref(&random_nilpotent(rng, f.target(), 3, 2)))
        .collect();
    RingHom::new(f.source(), f.target(), images, vec![]).expect("same rings")
}

fn combine(a: &RingHom, b: &RingHom, ca: &Scalar, cb: &Scalar) -> RingHom {
    let images = a
        .var_images()
        .iter()
        .zip(b.var_images())
        .map(|(x, y)| x.scale(ca).add_ref(&y.scale(cb)))
        .collect();
    RingHom::new(a.source(), a.target(), images, vec![]).expect("same rings")
}

fn interpolation(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rng = sub_rng(opts.seed, "interpolation");
    let a = Ring::polynomial(&["x", "y"]);
    let t = dual_target();
    let mut out = Outcome::default();
    for case in 0..100 {
        let f0 = random_hom(&mut rng, &a, &t);
        let f1 = shifted(&mut rng, &f0);
        let lambda = random_scalar(&mut rng);
        let fl = interpolate_homs(&f0, &f1, &lambda)?;
        let flm1 = interpolate_homs(&f0, &f1, &(&lambda - &Scalar::one()))?;
        let one_minus = &Scalar::one() - &lambda;
        let back = combine(&fl, &flm1, &one_minus, &lambda);
        out.case(back == f0, || {
            format!("case {case}: (1-l)f_l + l*f_(l-1) != f0 at l = {lambda}")
        });
        for _ in 0..3 {
            let p = random_elem(&mut rng, &a, 3, 4);
            let q = random_elem(&mut rng, &a, 3, 3);
            let lhs = fl.apply(&p.mul_ref(&q));
            out.case(lhs == fl.apply(&p).mul_ref(&fl.apply(&q)), || {
                format!("case {case}: f_l(({p})({q})) is not the product at l = {lambda}")
            });
            let pointwise = f0.apply(&p).scale(&one_minus).add_ref(&f1.apply(&p).scale(&lambda));
            out.case(fl.apply(&p) == pointwise, || {
                format!("case {case}: f_l({p}) != (1-l)f0 + l*f1 at l = {lambda}")
            });
        }
    }
    Ok(out)
}

fn triangle(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rng = sub_rng(opts.seed, "triangle");
    let a = Ring::polynomial(&["x", "y"]);
    let t = dual_target();
    let mut out = Outcome::default();
    for case in 0..50 {
        let lambda = sampling::random_nonzero_scalar(&mut rng);
        let conn = random_integrable_connection(&mut rng, &a, 2, &lambda, 2);
        let f0 = random_hom(&mut rng, &a, &t);
        let f01 = shifted(&mut rng, &f0);
        let f2 = shifted(&mut rng, &f0);
        let one = Scalar::one();
        let inv = lambda.inv()?;
        let f1 = combine(&f0, &f01, &(&one - &lambda), &lambda);
        // f12 = f1 + (f2 − f1)/λ, f20 = f2 + (f0 − f2)/λ
        let f12 = combine(&f1, &f2, &(&one - &inv), &inv);
        let f20 = combine(&f2, &f0, &(&one - &inv), &inv);
        let closes = verify_triangle(&conn, &f0, &f1, &f2, &f01, &f12, &f20)?;
        out.case(closes, || {
            format!("case {case}: triangle composite is not the identity at l = {lambda}")
        });
    }
    Ok(out)
}

fn intertwines(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rng = sub_rng(opts.seed, "intertwining");
    let a = Ring::polynomial(&["x", "y"]);
    let t = dual_target();
    let mut out = Outcome::default();
    for case in 0..50 {
        let lambda = random_scalar(&mut rng);
        let conn = random_integrable_connection(&mut rng, &a, 2, &lambda, 2);
        let f0 = random_hom(&mut rng, &a, &t);
        let f1 = shifted(&mut rng, &f0);
        let report = intertwining(&conn, &f0, &f1)?;
        out.case(report.holds(), || {
            let d = report
                .defects
                .iter()
                .find(|m| !m.is_zero())
                .map(|m| m.to_string())
                .unwrap_or_default();
            format!("case {case}: defect {d} at l = {lambda}")
        });
    }
    Ok(out)
}

fn lifts(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rng = sub_rng(opts.seed, "lifts");
    let a = Ring::polynomial(&["x"]);
    let b = Ring::polynomial(&["x", "z"]);
    let c = Ring::polynomial(&["c"]);
    let ce = c.with_dual("eps")?;
    let s = RingHom::from_literals(&a, &b, &["x"], &[])?;
    let mut out = Outcome::default();
    for case in 0..100 {
        let lambda = random_scalar(&mut rng);
        let values = vec![vec![
            RingElem::constant(&b, lambda.clone()),
            random_elem(&mut rng, &b, 2, 3),
        ]];
        let dist = Distribution::new(s.clone(), lambda.clone(), values)?;
        let t = random_hom(&mut rng, &b, &c);
        let body = t.apply(&RingElem::var(&b, 0)).embed(&ce)?;
        let d = random_nilpotent(&mut rng, &ce, 2, 2);
        let tangent = RingHom::new(&a, &ce, vec![body.add_ref(&d)], vec![])?;
        let report = check_lift(&dist, &t, &tangent, &mut rng, 4)?;
        out.case(report.holds(), || {
            format!(
                "case {case}: routes {:?}, products {:?}, reduces {}, restricts {}",
                report.route_mismatch,
                report.product_mismatch,
                report.reduces_to_point,
                report.restricts_to_interpolation
            )
        });
    }
    Ok(out)
}

fn random_rees(rng: &mut ChaCha8Rng, diag: &FirstOrderDiagonal, bound: i32) -> Result<ReesElem> {
    let top = rng.gen_range(0..=bound);
    let coeffs: Vec<(i32, RingElem)> = (0..=top).map(|k| (k, random_elem(rng, diag.p1(), 2, 2))).collect();
    ReesElem::from_coeffs(diag.p1(), bound, coeffs)
}

fn rees(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rng = sub_rng(opts.seed, "rees");
    let base = Ring::polynomial(&["x", "y"]);
    let diag = FirstOrderDiagonal::new(&base)?;
    let target = dual_target();
    let mut out = Outcome::default();
    for bound in 1..=4 {
        for _ in 0..8 {
            let e = random_rees(&mut rng, &diag, bound)?;
            let triv = rees_trivialize(&e)?;
            let back = rees_untrivialize(&triv)?;
            out.case(back == e, || format!("untrivialize(trivialize({e})) = {back}"));
            out.case(rees_trivialize(&back)? == triv, || {
                format!("trivialize is not stable on {e}")
            });
        }
        let a = random_elem(&mut rng, &base, 3, 3);
        let (p0, p1) = rees_diagonal_pair(&diag, &a, bound)?;
        for p in [p0, p1] {
            let t = rees_trivialize(&p)?;
            out.case(t.coeffs().all(|(k, _)| k == 0), || {
                format!("diagonal image of {a} is not t-constant: {t}")
            });
        }
    }
    let lambdas = [
        Scalar::one(),
        Scalar::from_int(2),
        Scalar::from_int(-1),
        Scalar::ratio(1, 2),
    ];
    for case in 0..10 {
        let g = random_hom(&mut rng, &base, &target);
        let delta = shifted(&mut rng, &g);
        let extra = (0..3)
            .map(|_| random_rees(&mut rng, &diag, 2))
            .collect::<Result<Vec<_>>>()?;
        for l in &lambdas {
            let r = gm_twist_check(&delta, l, 2, &extra)?;
            out.case(r.holds, || {
                format!("case {case}, l = {l}: {}", r.witness.clone().unwrap_or_default())
            });
        }
    }
    Ok(out)
}

/// Laurent monomials `u^k` outside `ℚ[u⁻¹] + u^{−d}ℚ[u]`.
pub fn h1_monomial_count(d: i32) -> usize {
    let span = d.abs() + 2;
    (-span..=span).filter(|&k| k > 0 && k < -d).count()
}

fn line_bundles(_: &VerifyOptions) -> Result<Outcome> {
    let mut out = Outcome::default();
    for cover in [Cover::projective_line(), Cover::projective_line_three()] {
        for d in -6..=6 {
            let cx = SheafComplex::line_bundle(&cover, d)?;
            let w = DegreeWindow::for_complex(&cx);
            let dim = cech_h1(&cx, &w)?.dim;
            let expected = h1_monomial_count(d);
            out.case(dim == expected, || {
                format!(
                    "{} charts, d = {d}: solver {dim}, monomial count {expected}",
                    cover.n_charts()
                )
            });
        }
    }
    Ok(out)
}

/// `χ(End E) − χ(End E ⊗ Ω)` from `χ(O(d)) = d + 1` on the summands.
pub fn euler_oracle(degrees: &[i32]) -> i64 {
    let mut chi = 0i64;
    for &a in degrees {
        for &b in degrees {
            let d = (a - b) as i64;
            chi += (d + 1) - (d - 2 + 1);
        }
    }
    chi
}

fn euler(_: &VerifyOptions) -> Result<Outcome> {
    let mut out = Outcome::default();
    let expected = euler_oracle(&[1, -1]);
    out.case(expected == 8, || format!("summand count gives {expected}"));
    for cover in [Cover::projective_line(), Cover::projective_line_three()] {
        let h = p1_nilpotent(&cover);
        let cx = HiggsComplex::new(&h)?;
        let w = DegreeWindow::for_complex(&cx);
        let (chi, dims) = euler_characteristic(&cx, &w)?;
        out.case(chi == expected, || {
            format!("{} charts: solver gives {chi} from {dims:?}", cover.n_charts())
        });
    }
    Ok(out)
}

fn examples() -> Vec<(&'static str, HiggsBundleData)> {
    let cover = Cover::projective_line();
    vec![
        ("p1-trivial", p1_trivial(&cover)),
        ("p1-nilpotent", p1_nilpotent(&cover)),
    ]
}

fn family(cover: &CoverRef, opts: &VerifyOptions) -> Result<Vec<TangentCocycle>> {
    seeded_family(cover, opts.seed, FAMILY_SIZE)
}

fn ks_pipeline(opts: &VerifyOptions) -> Result<Outcome> {
    let sign = opts.sign;
    let mut rng = sub_rng(opts.seed, "ks-pipeline");
    let mut out = Outcome::default();
    for (name, h) in examples() {
        let cx = HiggsComplex::with_sign(&h, sign)?;
        let cover = h.cover().clone();
        for (i, chi) in family(&cover, opts)?.iter().enumerate() {
            let c = ks_cocycle_with(&h, chi, sign)?;
            let ok = check_conditions(&cx, &c);
            out.case(ok.is_ok(), || {
                format!("{name}, family #{i}: {}", ok.clone().unwrap_err())
            });
            match build_deformation_with(&h, &c, sign) {
                Ok(d) => {
                    out.case(d.reduces_to_base(), || {
                        format!("{name}, family #{i}: deformation does not reduce")
                    });
                    out.case(d.first_order()? == c, || {
                        format!("{name}, family #{i}: first-order part differs")
                    });
                }
                Err(e) => out.case(false, || format!("{name}, family #{i}: build_deformation: {e}")),
            }
        }
        // δv with v_α = a_α ∂ goes to d⁰(a_α φ_α)
        for i in 0..10 {
            let a: Vec<RingElem> = cover
                .charts()
                .iter()
                .map(|ch| random_elem(&mut rng, &ch.ring, 3, 2))
                .collect();
            let chi = TangentCocycle::coboundary(&cover, &a)?;
            let c = ks_cocycle_with(&h, &chi, sign)?;
            let u: Vec<Matrix> = a.iter().enumerate().map(|(k, ak)| h.field(k).scale_elem(ak)).collect();
            out.case(cx.d0(&u)? == c, || {
                format!("{name}, coboundary #{i}: ks(dv) != d0(v.phi)")
            });
            let found = is_hyper_coboundary(&cx, &c, None)?;
            out.case(found.is_some(), || {
                format!("{name}, coboundary #{i}: no primitive for ks(dv)")
            });
        }
        // deformations along d⁰u are trivial
        let base = build_deformation_with(&h, &HyperCocycle::zero(&h), sign)?;
        for i in 0..10 {
            let u: Vec<Matrix> = cover
                .charts()
                .iter()
                .map(|ch| sampling::random_matrix(&mut rng, &ch.ring, h.rank(), h.rank(), 2, 2))
                .collect();
            let c = cx.d0(&u)?;
            match build_deformation_with(&h, &c, sign) {
                Ok(d) => {
                    let eq = deformations_equivalent_with(&base, &d, None, sign)?;
                    out.case(eq.is_some(), || {
                        format!("{name}, d0(u) #{i}: not equivalent to the trivial deformation")
                    });
                }
                Err(e) => out.case(false, || format!("{name}, build_deformation(d0(u) #{i}): {e}")),
            }
        }
    }
    Ok(out)
}

fn gradedness(opts: &VerifyOptions) -> Result<Outcome> {
    let ts = [Scalar::from_int(2), Scalar::from_int(-1), Scalar::ratio(1, 3)];
    let mut out = Outcome::default();
    for (name, h) in examples() {
        for (i, chi) in family(h.cover(), opts)?.iter().enumerate() {
            for t in &ts {
                let r = gradedness_check(&h, chi, t)?;
                out.case(r.holds(), || {
                    format!(
                        "{name}, family #{i}, t = {t}: cocycle {}, class {}: {}",
                        r.cocycle_level,
                        r.class_level,
                        r.witness.clone().unwrap_or_default()
                    )
                });
            }
        }
    }
    Ok(out)
}

fn integrability(opts: &VerifyOptions) -> Result<Outcome> {
    let mut out = Outcome::default();
    for (name, h) in examples() {
        let fam = family(h.cover(), opts)?;
        let degree = fam.iter().map(TangentCocycle::max_abs_exponent).max().unwrap_or(0) + h.max_abs_exponent();
        let solver = Order2Solver::new(&h, degree)?;
        let s: Vec<_> = fam.iter().map(|chi| contract(&h, chi)).collect::<Result<_>>()?;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                let r = solver.check(&s[i], &s[j])?;
                out.case(r.equivalent, || {
                    format!("{name}, family #{i} and #{j}: no equivalence found")
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_count_matches_formula() {
        for d in -6..=6 {
            assert_eq!(h1_monomial_count(d), (-d - 1).max(0) as usize);
        }
    }

    #[test]
    fn euler_oracle_values() {
        assert_eq!(euler_oracle(&[0]), 2);
        assert_eq!(euler_oracle(&[1, -1]), 8);
    }

    #[test]
    fn cheap_propositions_pass() {
        let opts = VerifyOptions {
            seed: 3,
            ..Default::default()
        };
        for id in [5, 6, 7] {
            let r = Proposition::by_id(id).unwrap().run(&opts);
            assert_eq!(r.status, crate::report::Status::Pass, "{:?}", r.message);
        }
    }

    #[test]
    fn flipped_sign_fails_the_pipeline() {
        let opts = VerifyOptions {
            seed: 3,
            sign: MThetaSign::Flipped,
        };
        let r = Proposition::by_id(8).unwrap().run(&opts);
        assert_eq!(r.status, crate::report::Status::Fail);
        assert!(r.message.unwrap().contains("p1-nilpotent"));
    }
}
