use higgs_ks::builtin::{p1_nilpotent, p1_trivial};
use higgs_ks::cech::{
    cech_h1, is_hyper_coboundary, Cochain, Complex, Cover, CoverRef, DegreeWindow, HiggsBundleData, HiggsComplex,
    SheafComplex,
};
use higgs_ks::ks::{build_deformation, check_conditions, gradedness_check, ks_cocycle, TangentCocycle};
use higgs_ks::ring::{
    parse_elem, rees_trivialize, rees_untrivialize, FirstOrderDiagonal, Matrix, ReesElem, Ring, RingElem, Scalar,
};
use higgs_ks::sampling;
use proptest::prelude::*;

fn cover(three: bool) -> CoverRef {
    if three {
        Cover::projective_line_three()
    } else {
        Cover::projective_line()
    }
}

fn bundle(nilpotent: bool, c: &CoverRef) -> HiggsBundleData {
    if nilpotent {
        p1_nilpotent(c)
    } else {
        p1_trivial(c)
    }
}

fn random_cochain(cx: &dyn Complex, p: usize, seed: u64) -> Cochain {
    let mut rng = sampling::rng(seed);
    Cochain(
        cx.groups()[p]
            .iter()
            .map(|c| sampling::random_matrix(&mut rng, &c.ring, c.rows, c.cols, 3, 2))
            .collect(),
    )
}

/// `q·u^k ∂/∂u` on two charts; monomial cocycles need a single overlap, so
/// three-chart covers get a seeded coboundary instead.
fn monomial(c: &CoverRef, q: i64, k: i32) -> TangentCocycle {
    if c.n_charts() == 2 {
        TangentCocycle::monomial(c, Scalar::from_int(q), k).unwrap()
    } else {
        let mut rng = sampling::rng(((q as u64) << 8) ^ k as u64);
        TangentCocycle::random_coboundary(c, &mut rng, 3)
            .unwrap()
            .scale(&Scalar::from_int(q))
    }
}

fn scalar(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ks_is_linear(three: bool, q1 in -5i64..=5, k1 in -3i32..=4, q2 in -5i64..=5, k2 in -3i32..=4) {
        let c = cover(three);
        let h = p1_nilpotent(&c);
        let a = monomial(&c, q1, k1);
        let b = monomial(&c, q2, k2);
        let sum = ks_cocycle(&h, &a.add(&b).unwrap()).unwrap();
        let parts = ks_cocycle(&h, &a).unwrap().add(&ks_cocycle(&h, &b).unwrap()).unwrap();
        prop_assert_eq!(sum, parts);
    }

    #[test]
    fn ks_cocycles_satisfy_the_conditions(three: bool, nil: bool, q in 1i64..=7, k in -3i32..=4) {
        let c = cover(three);
        let h = bundle(nil, &c);
        let ks = ks_cocycle(&h, &monomial(&c, q, k)).unwrap();
        prop_assert!(check_conditions(&HiggsComplex::new(&h).unwrap(), &ks).is_ok());
        let def = build_deformation(&h, &ks).unwrap();
        prop_assert!(def.reduces_to_base());
        prop_assert_eq!(def.first_order().unwrap(), ks);
    }

    #[test]
    fn tangent_coboundaries_give_hyper_coboundaries(three: bool, seed in any::<u64>()) {
        let c = cover(three);
        let h = p1_nilpotent(&c);
        let mut rng = sampling::rng(seed);
        let chi = TangentCocycle::coboundary(
            &c,
            &c.charts().iter().map(|ch| sampling::random_elem(&mut rng, &ch.ring, 3, 2)).collect::<Vec<_>>(),
        )
        .unwrap();
        let cx = HiggsComplex::new(&h).unwrap();
        let ks = ks_cocycle(&h, &chi).unwrap();
        let u = is_hyper_coboundary(&cx, &ks, None).unwrap();
        prop_assert!(u.is_some());
        prop_assert_eq!(cx.d0(&u.unwrap()).unwrap(), ks);
    }

    #[test]
    fn differential_squares_to_zero(three: bool, nil: bool, seed in any::<u64>()) {
        let c = cover(three);
        let cx = HiggsComplex::new(&bundle(nil, &c)).unwrap();
        for p in 0..cx.top().saturating_sub(1) {
            let x = random_cochain(&cx, p, seed);
            let dd = cx.differential(p + 1, &cx.differential(p, &x).unwrap()).unwrap();
            prop_assert!(dd.is_zero());
        }
    }

    #[test]
    fn h1_is_stable_under_widening(d in -6i32..=6, extra in 0i32..=4) {
        let cx = SheafComplex::line_bundle(&Cover::projective_line(), d).unwrap();
        let w = DegreeWindow::for_complex(&cx);
        let narrow = cech_h1(&cx, &w).unwrap().dim;
        let wide = cech_h1(&cx, &w.widen(extra)).unwrap().dim;
        prop_assert_eq!(narrow, wide);
    }

    #[test]
    fn gradedness_holds(q in 1i64..=5, k in -3i32..=4, n in -4i64..=4, m in 1i64..=4) {
        prop_assume!(n != 0);
        let c = Cover::projective_line();
        let r = gradedness_check(&p1_nilpotent(&c), &monomial(&c, q, k), &scalar(n, m)).unwrap();
        prop_assert!(r.holds());
    }

    #[test]
    fn literals_roundtrip(seed in any::<u64>(), terms in 0usize..6, laurent: bool) {
        let ring = if laurent {
            Ring::laurent(&["x", "y"], &["x"]).unwrap().with_dual("eps").unwrap()
        } else {
            Ring::polynomial(&["x", "y"]).with_two_parameters("e1", "e2").unwrap()
        };
        let mut rng = sampling::rng(seed);
        let a = sampling::random_elem(&mut rng, &ring, 3, terms).add_ref(&sampling::random_nilpotent(&mut rng, &ring, 2, terms));
        let back = parse_elem(&ring, &a.to_string()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn matrix_literals_roundtrip(seed in any::<u64>()) {
        let ring = Ring::laurent(&["u"], &["u"]).unwrap().with_dual("eps").unwrap();
        let mut rng = sampling::rng(seed);
        let m = sampling::random_matrix(&mut rng, &ring, 2, 3, 3, 3);
        let lits = m.to_literals();
        let refs: Vec<Vec<&str>> = lits.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        prop_assert_eq!(Matrix::parse(&ring, &refs).unwrap(), m);
    }

    #[test]
    fn rees_roundtrip(seed in any::<u64>(), bound in 1i32..=4) {
        let base = Ring::polynomial(&["x"]);
        let diag = FirstOrderDiagonal::new(&base).unwrap();
        let p1 = diag.p1().clone();
        let mut rng = sampling::rng(seed);
        let coeffs: Vec<(i32, RingElem)> =
            (0..=bound).map(|k| (k, sampling::random_elem(&mut rng, &p1, 2, 2))).collect();
        // the top coefficient must have no nilpotent part to stay within the bound
        let mut coeffs = coeffs;
        let top = coeffs.last_mut().unwrap();
        top.1 = RingElem::from_poly(&p1, top.1.body());
        let a = ReesElem::from_coeffs(&p1, bound, coeffs).unwrap();
        let triv = rees_trivialize(&a).unwrap();
        prop_assert_eq!(rees_untrivialize(&triv).unwrap(), a);
    }
}
