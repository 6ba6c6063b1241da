use higgs_ks::conn::{epsilon_transport, intertwining, is_integrable, verify_triangle, LambdaConnection};
use higgs_ks::ring::{interpolate_homs, Matrix, Ring, RingHom, RingRef, Scalar};
use higgs_ks::sampling::{self, random_elem, random_integrable_connection, random_nilpotent};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn source() -> RingRef {
    Ring::polynomial(&["x", "y"])
}

fn target() -> RingRef {
    Ring::polynomial(&["c"]).with_dual("eps").unwrap()
}

fn hom(rng: &mut ChaCha8Rng, s: &RingRef, t: &RingRef) -> RingHom {
    let images = (0..s.nvars()).map(|_| random_elem(rng, t, 3, 3)).collect();
    RingHom::new(s, t, images, vec![]).unwrap()
}

fn shift(rng: &mut ChaCha8Rng, f: &RingHom) -> RingHom {
    let images = f
        .var_images()
        .iter()
        .map(|v| v.add_ref(&random_nilpotent(rng, f.target(), 3, 2)))
        .collect();
    RingHom::new(f.source(), f.target(), images, vec![]).unwrap()
}

/// `a·f + b·g` on generators.
fn affine(f: &RingHom, g: &RingHom, a: &Scalar, b: &Scalar) -> RingHom {
    let images = f
        .var_images()
        .iter()
        .zip(g.var_images())
        .map(|(x, y)| x.scale(a).add_ref(&y.scale(b)))
        .collect();
    RingHom::new(f.source(), f.target(), images, vec![]).unwrap()
}

fn lambda(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn flat(rng: &mut ChaCha8Rng, l: &Scalar) -> LambdaConnection {
    random_integrable_connection(rng, &source(), 2, l, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn interpolation_is_multiplicative_and_affine(seed in any::<u64>(), n in -6i64..=6, d in 1i64..=5) {
        let mut rng = sampling::rng(seed);
        let (a, t) = (source(), target());
        let f0 = hom(&mut rng, &a, &t);
        let f1 = shift(&mut rng, &f0);
        let l = lambda(n, d);
        let fl = interpolate_homs(&f0, &f1, &l).unwrap();
        let p = random_elem(&mut rng, &a, 3, 3);
        let q = random_elem(&mut rng, &a, 2, 3);
        prop_assert_eq!(fl.apply(&p.mul_ref(&q)), fl.apply(&p).mul_ref(&fl.apply(&q)));
        let one = Scalar::one();
        let pointwise = f0.apply(&p).scale(&(&one - &l)).add_ref(&f1.apply(&p).scale(&l));
        prop_assert_eq!(fl.apply(&p), pointwise);
        let flm1 = interpolate_homs(&f0, &f1, &(&l - &one)).unwrap();
        prop_assert_eq!(affine(&fl, &flm1, &(&one - &l), &l), f0);
    }

    #[test]
    fn generated_connections_are_flat(seed in any::<u64>(), n in -4i64..=4) {
        let mut rng = sampling::rng(seed);
        prop_assert!(is_integrable(&flat(&mut rng, &lambda(n, 3))));
    }

    #[test]
    fn transport_is_unipotent(seed in any::<u64>(), n in -4i64..=4) {
        let mut rng = sampling::rng(seed);
        let conn = flat(&mut rng, &lambda(n, 2));
        let f0 = hom(&mut rng, &source(), &target());
        let f1 = shift(&mut rng, &f0);
        let t = epsilon_transport(&conn, &f0, &f1).unwrap();
        prop_assert!(t.reduces_to_identity());
        let id = Matrix::identity(&target(), 2);
        prop_assert_eq!(t.matrix.mul(&t.inverse_matrix().unwrap()).unwrap(), id);
        // transporting between a hom and itself does nothing
        prop_assert!(epsilon_transport(&conn, &f0, &f0).unwrap().matrix.is_identity());
    }

    #[test]
    fn triangles_close(seed in any::<u64>(), n in 1i64..=5, d in 1i64..=4, neg: bool) {
        let mut rng = sampling::rng(seed);
        let l = if neg { lambda(-n, d) } else { lambda(n, d) };
        let conn = flat(&mut rng, &l);
        let f0 = hom(&mut rng, &source(), &target());
        let f01 = shift(&mut rng, &f0);
        let f2 = shift(&mut rng, &f0);
        let one = Scalar::one();
        let inv = l.inv().unwrap();
        let f1 = affine(&f0, &f01, &(&one - &l), &l);
        let f12 = affine(&f1, &f2, &(&one - &inv), &inv);
        let f20 = affine(&f2, &f0, &(&one - &inv), &inv);
        prop_assert!(verify_triangle(&conn, &f0, &f1, &f2, &f01, &f12, &f20).unwrap());
    }

    #[test]
    fn transport_intertwines_pullbacks(seed in any::<u64>(), n in -4i64..=4) {
        let mut rng = sampling::rng(seed);
        let conn = flat(&mut rng, &lambda(n, 3));
        let f0 = hom(&mut rng, &source(), &target());
        let f1 = shift(&mut rng, &f0);
        prop_assert!(intertwining(&conn, &f0, &f1).unwrap().holds());
    }
}
