//! Seeded generators of random test data.

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ring::{LaurentPoly, Matrix, RingElem, RingRef, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for a named sub-task.
pub fn sub_rng(seed: u64, label: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

/// A small rational `p/q` with `|p| ≤ 5`, `1 ≤ q ≤ 3`.
pub fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3))
}

pub fn random_nonzero_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let s = random_scalar(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// A random Laurent polynomial in the ring's base variables with at most
/// `terms` terms and exponents bounded by `max_deg` (nonnegative for
/// non-invertible variables).
pub fn random_poly(rng: &mut ChaCha8Rng, ring: &RingRef, max_deg: i32, terms: usize) -> LaurentPoly {
    let n = ring.nvars();
    let mut p = LaurentPoly::zero(ring.vars());
    for _ in 0..terms {
        let e: Vec<i32> = (0..n)
            .map(|i| {
                let lo = if ring.is_invertible_var(i) { -max_deg } else { 0 };
                rng.gen_range(lo..=max_deg)
            })
            .collect();
        p.add_term(e, &random_scalar(rng));
    }
    p
}

/// A random element with a random body and random nilpotent parts.
pub fn random_elem(rng: &mut ChaCha8Rng, ring: &RingRef, max_deg: i32, terms: usize) -> RingElem {
    let parts: Vec<_> = ring
        .nil_monomials()
        .into_iter()
        .map(|m| (m, random_poly(rng, ring, max_deg, terms)))
        .collect();
    RingElem::from_parts(ring, parts)
}

/// A random element of the nilpotent ideal.
pub fn random_nilpotent(rng: &mut ChaCha8Rng, ring: &RingRef, max_deg: i32, terms: usize) -> RingElem {
    random_elem(rng, ring, max_deg, terms).nilpotent_part()
}

pub fn random_matrix(
    rng: &mut ChaCha8Rng,
    ring: &RingRef,
    rows: usize,
    cols: usize,
    max_deg: i32,
    terms: usize,
) -> Matrix {
    let mut m = Matrix::zero(ring, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, random_elem(rng, ring, max_deg, terms));
        }
    }
    m
}

/// A flat λ-connection: the diagonal `λ·dF_k` gauge-transformed by
/// `G = 1 + N`, with `N` strictly upper triangular.
pub fn random_integrable_connection(
    rng: &mut ChaCha8Rng,
    ring: &RingRef,
    rank: usize,
    lambda: &Scalar,
    max_deg: i32,
) -> crate::conn::LambdaConnection {
    let n = ring.nvars();
    let potentials: Vec<RingElem> = (0..rank).map(|_| random_elem(rng, ring, max_deg, 2)).collect();
    let mut g = Matrix::identity(ring, rank);
    for i in 0..rank {
        for j in i + 1..rank {
            g.set(i, j, random_elem(rng, ring, max_deg.min(2), 1));
        }
    }
    let gi = g.inverse().expect("unipotent");
    let mats = (0..n)
        .map(|k| {
            let diag = Matrix::diagonal(ring, potentials.iter().map(|f| f.partial(k).scale(lambda)).collect());
            let conj = gi.mul(&diag).and_then(|m| m.mul(&g)).expect("square");
            conj.add(&gi.mul(&g.partial(k)).expect("square").scale(lambda))
                .expect("square")
        })
        .collect();
    crate::conn::LambdaConnection::with_rank(ring, rank, lambda.clone(), mats).expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conn::is_integrable;
    use crate::ring::Ring;

    #[test]
    fn generated_connections_are_flat() {
        let ring = Ring::polynomial(&["x", "y"]);
        let mut r = rng(1);
        for _ in 0..10 {
            let lambda = random_nonzero_scalar(&mut r);
            assert!(is_integrable(&random_integrable_connection(
                &mut r, &ring, 2, &lambda, 3
            )));
        }
    }
}
