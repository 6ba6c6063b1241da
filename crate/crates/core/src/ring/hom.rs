//! Ring homomorphisms between coordinate rings, given on generators.

use std::collections::HashMap;
use std::fmt;

use super::element::{Ring, RingElem, RingRef};
use super::laurent::LaurentPoly;
use super::parse::parse_elem;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// A homomorphism determined by the images of the base variables and of the
/// nilpotent generators of its source.
///
/// Construction checks that invertible variables map to units and that the
/// images of nilpotent generators satisfy the source's nilpotency relations,
/// so the extension to the whole source is well defined.
#[derive(Clone)]
pub struct RingHom {
    source: RingRef,
    target: RingRef,
    var_images: Vec<RingElem>,
    nil_images: Vec<RingElem>,
    var_inverses: Vec<Option<RingElem>>,
}

impl PartialEq for RingHom {
    fn eq(&self, other: &Self) -> bool {
        Ring::same(&self.source, &other.source)
            && Ring::same(&self.target, &other.target)
            && self.var_images == other.var_images
            && self.nil_images == other.nil_images
    }
}

impl RingHom {
    pub fn new(
        source: &RingRef,
        target: &RingRef,
        var_images: Vec<RingElem>,
        nil_images: Vec<RingElem>,
    ) -> Result<Self> {
        if var_images.len() != source.nvars() || nil_images.len() != source.n_nil() {
            return Err(Error::InvalidHom(format!(
                "expected {} variable and {} nilpotent images, got {} and {}",
                source.nvars(),
                source.n_nil(),
                var_images.len(),
                nil_images.len()
            )));
        }
        for img in var_images.iter().chain(&nil_images) {
            if !Ring::same(img.ring(), target) {
                return Err(Error::InvalidHom(format!(
                    "image {img} is not an element of {}",
                    target.describe()
                )));
            }
        }
        let mut var_inverses = Vec::with_capacity(var_images.len());
        for (i, img) in var_images.iter().enumerate() {
            if source.is_invertible_var(i) {
                let inv = img.inverse().map_err(|_| {
                    Error::InvalidHom(format!(
                        "invertible variable `{}` maps to non-unit {img}",
                        source.vars()[i]
                    ))
                })?;
                var_inverses.push(Some(inv));
            } else {
                var_inverses.push(None);
            }
        }
        for (j, img) in nil_images.iter().enumerate() {
            if !img.is_nilpotent() {
                return Err(Error::InvalidHom(format!(
                    "nilpotent `{}` maps to {img}, which has a nonzero body",
                    source.nil_names()[j]
                )));
            }
            if !img.mul_ref(img).is_zero() {
                return Err(Error::InvalidHom(format!(
                    "image of `{}` does not square to zero",
                    source.nil_names()[j]
                )));
            }
        }
        // monomials that vanish in the source must vanish in the target
        let n = source.n_nil();
        for m in 0u32..(1 << n) {
            if m.count_ones() == source.nil_degree() + 1 {
                let mut prod = RingElem::one(target);
                for (j, img) in nil_images.iter().enumerate() {
                    if m & (1 << j) != 0 {
                        prod = prod.mul_ref(img);
                    }
                }
                if !prod.is_zero() {
                    return Err(Error::InvalidHom("nilpotent relations are not preserved".into()));
                }
            }
        }
        Ok(RingHom {
            source: source.clone(),
            target: target.clone(),
            var_images,
            nil_images,
            var_inverses,
        })
    }

    /// Parses generator images from literals over the target ring.
    pub fn from_literals(source: &RingRef, target: &RingRef, vars: &[&str], nil: &[&str]) -> Result<Self> {
        let v = vars.iter().map(|s| parse_elem(target, s)).collect::<Result<Vec<_>>>()?;
        let e = nil.iter().map(|s| parse_elem(target, s)).collect::<Result<Vec<_>>>()?;
        Self::new(source, target, v, e)
    }

    pub fn identity(ring: &RingRef) -> Self {
        let v = (0..ring.nvars()).map(|i| RingElem::var(ring, i)).collect();
        let e = (0..ring.n_nil()).map(|j| RingElem::nil_gen(ring, j)).collect();
        Self::new(ring, ring, v, e).expect("identity is a homomorphism")
    }

    /// The map sending each generator to the generator of the same name in
    /// `target` (base variables and nilpotents).
    pub fn inclusion(source: &RingRef, target: &RingRef) -> Result<Self> {
        let mut v = Vec::new();
        for name in source.vars().iter() {
            let i = target
                .var_index(name)
                .ok_or_else(|| Error::RingMismatch(format!("`{name}` missing in target")))?;
            v.push(RingElem::var(target, i));
        }
        let mut e = Vec::new();
        for name in source.nil_names().iter() {
            let j = target
                .nil_index(name)
                .ok_or_else(|| Error::RingMismatch(format!("`{name}` missing in target")))?;
            e.push(RingElem::nil_gen(target, j));
        }
        Self::new(source, target, v, e)
    }

    pub fn source(&self) -> &RingRef {
        &self.source
    }

    pub fn target(&self) -> &RingRef {
        &self.target
    }

    pub fn var_image(&self, i: usize) -> &RingElem {
        &self.var_images[i]
    }

    pub fn var_images(&self) -> &[RingElem] {
        &self.var_images
    }

    pub fn nil_images(&self) -> &[RingElem] {
        &self.nil_images
    }

    /// Images of all generators: base variables first, then nilpotents.
    pub fn generator_images(&self) -> impl Iterator<Item = &RingElem> {
        self.var_images.iter().chain(&self.nil_images)
    }

    fn var_power(&self, cache: &mut HashMap<(usize, i32), RingElem>, i: usize, e: i32) -> RingElem {
        if e == 0 {
            return RingElem::one(&self.target);
        }
        if let Some(v) = cache.get(&(i, e)) {
            return v.clone();
        }
        let step = if e > 0 {
            self.var_images[i].clone()
        } else {
            self.var_inverses[i]
                .clone()
                .expect("negative exponents only occur on invertible variables")
        };
        let prev = self.var_power(cache, i, e - e.signum());
        let v = prev.mul_ref(&step);
        cache.insert((i, e), v.clone());
        v
    }

    fn apply_poly_cached(&self, p: &LaurentPoly, cache: &mut HashMap<(usize, i32), RingElem>) -> RingElem {
        let mut out = RingElem::zero(&self.target);
        for (e, c) in p.terms() {
            let mut term = RingElem::constant(&self.target, c.clone());
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    term = term.mul_ref(&self.var_power(cache, i, x));
                }
            }
            out = out.add_ref(&term);
        }
        out
    }

    /// Applies the homomorphism to an element of the source.
    pub fn apply(&self, a: &RingElem) -> RingElem {
        assert!(
            Ring::same(a.ring(), &self.source),
            "element of {} applied to hom with source {}",
            a.ring().describe(),
            self.source.describe()
        );
        let mut cache = HashMap::new();
        let mut out = RingElem::zero(&self.target);
        for (m, p) in a.parts() {
            let mut v = self.apply_poly_cached(p, &mut cache);
            for (j, img) in self.nil_images.iter().enumerate() {
                if m & (1 << j) != 0 {
                    v = v.mul_ref(img);
                }
            }
            out = out.add_ref(&v);
        }
        out
    }

    /// Applies the homomorphism to a Laurent polynomial in the source's base
    /// variables.
    pub fn apply_poly(&self, p: &LaurentPoly) -> RingElem {
        let mut cache = HashMap::new();
        self.apply_poly_cached(p, &mut cache)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &RingHom) -> Result<RingHom> {
        if !Ring::same(first.target(), &self.source) {
            return Err(Error::RingMismatch(format!(
                "cannot compose: {} vs {}",
                first.target().describe(),
                self.source.describe()
            )));
        }
        let v = first.var_images.iter().map(|x| self.apply(x)).collect();
        let e = first.nil_images.iter().map(|x| self.apply(x)).collect();
        RingHom::new(&first.source, &self.target, v, e)
    }

    /// Generator-wise differences `self(g) − other(g)`.
    pub fn generator_differences(&self, other: &RingHom) -> Result<Vec<RingElem>> {
        if !Ring::same(&self.source, &other.source) || !Ring::same(&self.target, &other.target) {
            return Err(Error::SourceMismatch);
        }
        Ok(self
            .generator_images()
            .zip(other.generator_images())
            .map(|(a, b)| a.sub_ref(b))
            .collect())
    }
}

impl fmt::Debug for RingHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingHom[")?;
        let names = self.source.vars().iter().chain(self.source.nil_names().iter());
        for (k, (name, img)) in names.zip(self.generator_images()).enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name} -> {img}")?;
        }
        write!(f, "]")
    }
}

/// Whether `f1 − f0` takes every generator into the nilpotent ideal.
pub fn hom_square_zero_close(f0: &RingHom, f1: &RingHom) -> Result<bool> {
    Ok(f1.generator_differences(f0)?.iter().all(RingElem::is_nilpotent))
}

/// The homomorphism `x ↦ (1−λ)f0(x) + λf1(x)` on generators.
///
/// Because `f1 − f0` lands in a square-zero ideal, this extension agrees with
/// `(1−λ)f0 + λf1` on every element.
pub fn interpolate_homs(f0: &RingHom, f1: &RingHom, lambda: &Scalar) -> Result<RingHom> {
    let diffs = f1.generator_differences(f0)?;
    let names: Vec<&String> = f0.source.vars().iter().chain(f0.source.nil_names().iter()).collect();
    for (d, name) in diffs.iter().zip(&names) {
        if !d.is_nilpotent() {
            return Err(Error::SquareZeroViolation(format!(
                "f1({name}) - f0({name}) = {d} has a nonzero body"
            )));
        }
    }
    // (f1 − f0)(x)(f1 − f0)(y) must vanish for the interpolation to be a hom
    for (a, da) in diffs.iter().enumerate() {
        for db in &diffs[a..] {
            let p = da.mul_ref(db);
            if !p.is_zero() {
                return Err(Error::SquareZeroViolation(format!(
                    "generator differences {da} and {db} have nonzero product"
                )));
            }
        }
    }
    let one_minus = &Scalar::one() - lambda;
    let interp = |a: &RingElem, b: &RingElem| a.scale(&one_minus).add_ref(&b.scale(lambda));
    let v = f0
        .var_images
        .iter()
        .zip(&f1.var_images)
        .map(|(a, b)| interp(a, b))
        .collect();
    let e = f0
        .nil_images
        .iter()
        .zip(&f1.nil_images)
        .map(|(a, b)| interp(a, b))
        .collect();
    RingHom::new(&f0.source, &f0.target, v, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_composition() {
        let r = Ring::torus(&["u"]);
        let inv = RingHom::from_literals(&r, &r, &["u^-1"], &[]).unwrap();
        let id = inv.compose(&inv).unwrap();
        assert_eq!(id, RingHom::identity(&r));
        let a = parse_elem(&r, "u^3 - 2*u^-1").unwrap();
        assert_eq!(inv.apply(&a), parse_elem(&r, "u^-3 - 2*u").unwrap());
    }

    #[test]
    fn invertible_generators_need_unit_images() {
        let r = Ring::torus(&["u"]);
        let p = Ring::polynomial(&["u"]);
        assert!(RingHom::from_literals(&r, &p, &["u"], &[]).is_err());
        assert!(RingHom::from_literals(&r, &r, &["u + 1"], &[]).is_err());
        let d = r.with_dual("eps").unwrap();
        assert!(RingHom::from_literals(&r, &d, &["2*u + u^5*eps"], &[]).is_ok());
    }

    #[test]
    fn interpolation_example() {
        let a = Ring::polynomial(&["x"]);
        let t = Ring::polynomial(&["c"]).with_dual("eps").unwrap();
        let f0 = RingHom::from_literals(&a, &t, &["c"], &[]).unwrap();
        let f1 = RingHom::from_literals(&a, &t, &["c + eps"], &[]).unwrap();
        let h = interpolate_homs(&f0, &f1, &Scalar::ratio(1, 2)).unwrap();
        let x2 = parse_elem(&a, "x^2").unwrap();
        assert_eq!(h.apply(&x2), parse_elem(&t, "c^2 + c*eps").unwrap());
        assert!(hom_square_zero_close(&f0, &f1).unwrap());
        let g = RingHom::from_literals(&a, &t, &["c + 1"], &[]).unwrap();
        assert!(!hom_square_zero_close(&f0, &g).unwrap());
        assert!(matches!(
            interpolate_homs(&f0, &g, &Scalar::one()),
            Err(Error::SquareZeroViolation(_))
        ));
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let a = Ring::polynomial(&["x"]);
        let b = Ring::polynomial(&["y"]);
        let t = Ring::polynomial(&["c"]).with_dual("eps").unwrap();
        let f0 = RingHom::from_literals(&a, &t, &["c"], &[]).unwrap();
        let f1 = RingHom::from_literals(&b, &t, &["c"], &[]).unwrap();
        assert_eq!(hom_square_zero_close(&f0, &f1), Err(Error::SourceMismatch));
    }
}
