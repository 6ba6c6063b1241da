//! Covers by at most three affine charts with explicit overlap rings.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElem, RingHom, RingRef};

#[derive(Debug, Clone)]
pub struct Chart {
    pub name: String,
    pub ring: RingRef,
}

/// The overlap of charts `alpha < beta` with restriction maps from both.
#[derive(Debug, Clone)]
pub struct Overlap {
    pub alpha: usize,
    pub beta: usize,
    pub ring: RingRef,
    pub from_alpha: RingHom,
    pub from_beta: RingHom,
}

/// The triple overlap of a three-chart cover.
#[derive(Debug, Clone)]
pub struct Triple {
    pub ring: RingRef,
    /// Restrictions from the pair overlaps, keyed by `(α, β)` with `α < β`.
    pub from_pairs: BTreeMap<(usize, usize), RingHom>,
    /// Restrictions from the charts (composites through any pair).
    pub from_charts: Vec<RingHom>,
}

/// A triple-overlap ring with its maps from the pair overlaps.
pub type TripleMaps = (RingRef, BTreeMap<(usize, usize), RingHom>);

#[derive(Debug, Clone)]
pub struct Cover {
    charts: Vec<Chart>,
    overlaps: BTreeMap<(usize, usize), Overlap>,
    triple: Option<Triple>,
}

pub type CoverRef = Arc<Cover>;

fn same_hom_check(h: &RingHom, source: &RingRef, target: &RingRef, what: &str) -> Result<()> {
    if !Ring::same(h.source(), source) || !Ring::same(h.target(), target) {
        return Err(Error::RingMismatch(format!(
            "{what}: expected a map {} -> {}",
            source.describe(),
            target.describe()
        )));
    }
    Ok(())
}

impl Cover {
    /// Validates the charts, one overlap per unordered pair and, for three
    /// charts, the triple overlap whose chart restrictions must agree along
    /// every pair.
    pub fn new(charts: Vec<Chart>, overlaps: Vec<Overlap>, triple: Option<TripleMaps>) -> Result<CoverRef> {
        let n = charts.len();
        if !(1..=3).contains(&n) {
            return Err(Error::Unsupported(format!("covers have 1 to 3 charts, got {n}")));
        }
        for (i, c) in charts.iter().enumerate() {
            if charts[..i].iter().any(|d| d.name == c.name) {
                return Err(Error::Resolution(format!("duplicate chart `{}`", c.name)));
            }
        }
        let mut map = BTreeMap::new();
        for o in overlaps {
            if o.alpha >= o.beta || o.beta >= n {
                return Err(Error::Dimension(format!("bad overlap index ({}, {})", o.alpha, o.beta)));
            }
            same_hom_check(&o.from_alpha, &charts[o.alpha].ring, &o.ring, "overlap restriction")?;
            same_hom_check(&o.from_beta, &charts[o.beta].ring, &o.ring, "overlap restriction")?;
            if map.insert((o.alpha, o.beta), o).is_some() {
                return Err(Error::Dimension("overlap declared twice".into()));
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if !map.contains_key(&(a, b)) {
                    return Err(Error::Resolution(format!(
                        "missing overlap of `{}` and `{}`",
                        charts[a].name, charts[b].name
                    )));
                }
            }
        }
        let triple = match (n, triple) {
            (3, Some((ring, from_pairs))) => {
                for (k, h) in &from_pairs {
                    let o = map
                        .get(k)
                        .ok_or_else(|| Error::Dimension(format!("triple restriction from unknown pair {k:?}")))?;
                    same_hom_check(h, &o.ring, &ring, "triple restriction")?;
                }
                if from_pairs.len() != 3 {
                    return Err(Error::Resolution(
                        "the triple overlap needs a restriction from every pair".into(),
                    ));
                }
                let mut from_charts: Vec<Option<RingHom>> = vec![None; 3];
                for ((a, b), o) in &map {
                    let r = &from_pairs[&(*a, *b)];
                    for (c, h) in [(*a, &o.from_alpha), (*b, &o.from_beta)] {
                        let comp = r.compose(h)?;
                        match &from_charts[c] {
                            None => from_charts[c] = Some(comp),
                            Some(prev) if *prev == comp => {}
                            Some(_) => {
                                return Err(Error::NotCocycle(format!(
                                    "restrictions of chart `{}` to the triple overlap disagree",
                                    charts[c].name
                                )))
                            }
                        }
                    }
                }
                Some(Triple {
                    ring,
                    from_pairs,
                    from_charts: from_charts
                        .into_iter()
                        .map(|h| h.expect("every chart lies in a pair"))
                        .collect(),
                })
            }
            (3, None) => return Err(Error::Resolution("three-chart covers need a triple overlap".into())),
            (_, Some(_)) => return Err(Error::Dimension("triple overlap given for fewer than 3 charts".into())),
            (_, None) => None,
        };
        Ok(Arc::new(Cover {
            charts,
            overlaps: map,
            triple,
        }))
    }

    /// `ℙ¹` as `ℚ[u] ∪ ℚ[v]` glued along `ℚ[u, u⁻¹]` by `v = u⁻¹`.
    pub fn projective_line() -> CoverRef {
        let u = Ring::polynomial(&["u"]);
        let v = Ring::polynomial(&["v"]);
        let o = Ring::torus(&["u"]);
        let overlap = Overlap {
            alpha: 0,
            beta: 1,
            ring: o.clone(),
            from_alpha: RingHom::from_literals(&u, &o, &["u"], &[]).expect("valid"),
            from_beta: RingHom::from_literals(&v, &o, &["u^-1"], &[]).expect("valid"),
        };
        let charts = vec![
            Chart {
                name: "U".into(),
                ring: u,
            },
            Chart {
                name: "V".into(),
                ring: v,
            },
        ];
        Self::new(charts, vec![overlap], None).expect("valid cover")
    }

    /// `ℙ¹` covered by `ℚ[u]`, `ℚ[v]` and the torus `ℚ[w, w⁻¹]` with
    /// `w = u`; every overlap, and the triple overlap, is `ℚ[u, u⁻¹]`.
    pub fn projective_line_three() -> CoverRef {
        let u = Ring::polynomial(&["u"]);
        let v = Ring::polynomial(&["v"]);
        let w = Ring::torus(&["w"]);
        let o = Ring::torus(&["u"]);
        let hom = |src: &RingRef, img: &str| RingHom::from_literals(src, &o, &[img], &[]).expect("valid");
        let overlaps = vec![
            Overlap {
                alpha: 0,
                beta: 1,
                ring: o.clone(),
                from_alpha: hom(&u, "u"),
                from_beta: hom(&v, "u^-1"),
            },
            Overlap {
                alpha: 0,
                beta: 2,
                ring: o.clone(),
                from_alpha: hom(&u, "u"),
                from_beta: hom(&w, "u"),
            },
            Overlap {
                alpha: 1,
                beta: 2,
                ring: o.clone(),
                from_alpha: hom(&v, "u^-1"),
                from_beta: hom(&w, "u"),
            },
        ];
        let id = RingHom::identity(&o);
        let from_pairs = [(0, 1), (0, 2), (1, 2)].into_iter().map(|k| (k, id.clone())).collect();
        let charts = vec![
            Chart {
                name: "U".into(),
                ring: u,
            },
            Chart {
                name: "V".into(),
                ring: v,
            },
            Chart {
                name: "W".into(),
                ring: w,
            },
        ];
        Self::new(charts, overlaps, Some((o, from_pairs))).expect("valid cover")
    }

    /// A single affine chart `ℚ[vars]`.
    pub fn affine<S: AsRef<str>>(vars: &[S]) -> CoverRef {
        let chart = Chart {
            name: "A".into(),
            ring: Ring::polynomial(vars),
        };
        Self::new(vec![chart], vec![], None).expect("valid cover")
    }

    /// Affine space minus the origin (2 or 3 variables), covered by the
    /// principal opens `D(x_i)`.
    pub fn punctured_affine<S: AsRef<str>>(vars: &[S]) -> Result<CoverRef> {
        let n = vars.len();
        if !(2..=3).contains(&n) {
            return Err(Error::Unsupported("punctured affine space of dimension 2 or 3".into()));
        }
        let names: Vec<&str> = vars.iter().map(AsRef::as_ref).collect();
        let charts: Vec<Chart> = (0..n)
            .map(|i| {
                Ok(Chart {
                    name: format!("D{}", names[i]),
                    ring: Ring::laurent(&names, &[names[i]])?,
                })
            })
            .collect::<Result<_>>()?;
        let mut overlaps = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let ring = Ring::laurent(&names, &[names[a], names[b]])?;
                overlaps.push(Overlap {
                    alpha: a,
                    beta: b,
                    from_alpha: RingHom::inclusion(&charts[a].ring, &ring)?,
                    from_beta: RingHom::inclusion(&charts[b].ring, &ring)?,
                    ring,
                });
            }
        }
        let triple = if n == 3 {
            let t = Ring::torus(&names);
            let mut from_pairs = BTreeMap::new();
            for o in &overlaps {
                from_pairs.insert((o.alpha, o.beta), RingHom::inclusion(&o.ring, &t)?);
            }
            Some((t, from_pairs))
        } else {
            None
        };
        Self::new(charts, overlaps, triple)
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn n_charts(&self) -> usize {
        self.charts.len()
    }

    pub fn chart(&self, a: usize) -> &Chart {
        &self.charts[a]
    }

    pub fn chart_index(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.name == name)
    }

    /// Pairs `(α, β)` with `α < β`, in order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.overlaps.keys().copied()
    }

    pub fn overlap(&self, a: usize, b: usize) -> &Overlap {
        &self.overlaps[&(a.min(b), a.max(b))]
    }

    pub fn triple(&self) -> Option<&Triple> {
        self.triple.as_ref()
    }

    /// Whether every chart and overlap has a single coordinate.
    pub fn is_curve(&self) -> bool {
        self.charts.iter().all(|c| c.ring.nvars() == 1) && self.overlaps.values().all(|o| o.ring.nvars() == 1)
    }

    /// Restriction of chart `a` to the overlap with `b`.
    pub fn restriction(&self, a: usize, b: usize) -> &RingHom {
        let o = self.overlap(a, b);
        if a == o.alpha {
            &o.from_alpha
        } else {
            &o.from_beta
        }
    }

    /// `∂x_a/∂x_b = ρ'_a/ρ'_b` on the overlap of `a` and `b`, where `ρ'` is
    /// the derivative of the restricted chart coordinate with respect to the
    /// overlap coordinate. Only for curves, and the quotient must be a unit.
    pub fn jacobian(&self, a: usize, b: usize) -> Result<RingElem> {
        if !self.is_curve() {
            return Err(Error::Unsupported("Jacobians are implemented for curves".into()));
        }
        let da = self.restriction(a, b).var_image(0).partial(0);
        let db = self.restriction(b, a).var_image(0).partial(0);
        let inv = db
            .inverse()
            .map_err(|_| Error::Unsupported(format!("chart derivative {db} is not a unit on the overlap")))?;
        Ok(da.mul_ref(&inv))
    }

    /// The same cover with every ring replaced by `extend(ring)`, which must
    /// keep the base variables and add nilpotents; restriction maps fix the
    /// nilpotents.
    pub fn extend(&self, extend: impl Fn(&Ring) -> Result<RingRef>) -> Result<CoverRef> {
        let lift = |h: &RingHom, src: &RingRef, tgt: &RingRef| -> Result<RingHom> {
            let v = h
                .var_images()
                .iter()
                .map(|e| e.embed(tgt))
                .collect::<Result<Vec<_>>>()?;
            let e = (0..src.n_nil()).map(|j| RingElem::nil_gen(tgt, j)).collect();
            RingHom::new(src, tgt, v, e)
        };
        let charts: Vec<Chart> = self
            .charts
            .iter()
            .map(|c| {
                Ok(Chart {
                    name: c.name.clone(),
                    ring: extend(&c.ring)?,
                })
            })
            .collect::<Result<_>>()?;
        let mut overlaps = Vec::new();
        let mut rings = BTreeMap::new();
        for (&(a, b), o) in &self.overlaps {
            let ring = extend(&o.ring)?;
            rings.insert((a, b), ring.clone());
            overlaps.push(Overlap {
                alpha: a,
                beta: b,
                from_alpha: lift(&o.from_alpha, &charts[a].ring, &ring)?,
                from_beta: lift(&o.from_beta, &charts[b].ring, &ring)?,
                ring,
            });
        }
        let triple = match &self.triple {
            None => None,
            Some(t) => {
                let ring = extend(&t.ring)?;
                let mut from_pairs = BTreeMap::new();
                for (k, h) in &t.from_pairs {
                    from_pairs.insert(*k, lift(h, &rings[k], &ring)?);
                }
                Some((ring, from_pairs))
            }
        };
        Self::new(charts, overlaps, triple)
    }

    /// The cover over dual numbers `R[ε]`.
    pub fn with_dual(&self, eps: &str) -> Result<CoverRef> {
        self.extend(|r| r.with_dual(eps))
    }

    /// The cover over `R[ε₁, ε₂]/(ε₁², ε₂²)`.
    pub fn with_two_parameters(&self, e1: &str, e2: &str) -> Result<CoverRef> {
        self.extend(|r| r.with_two_parameters(e1, e2))
    }

    /// The cover with all nilpotents removed.
    pub fn base(&self) -> Result<CoverRef> {
        let strip = |h: &RingHom, src: &RingRef, tgt: &RingRef| -> Result<RingHom> {
            let v = h
                .var_images()
                .iter()
                .map(|e| RingElem::from_poly(tgt, e.body()))
                .collect();
            RingHom::new(src, tgt, v, vec![])
        };
        let charts: Vec<Chart> = self
            .charts
            .iter()
            .map(|c| Chart {
                name: c.name.clone(),
                ring: c.ring.base(),
            })
            .collect();
        let mut overlaps = Vec::new();
        let mut rings = BTreeMap::new();
        for (&(a, b), o) in &self.overlaps {
            let ring = o.ring.base();
            rings.insert((a, b), ring.clone());
            overlaps.push(Overlap {
                alpha: a,
                beta: b,
                from_alpha: strip(&o.from_alpha, &charts[a].ring, &ring)?,
                from_beta: strip(&o.from_beta, &charts[b].ring, &ring)?,
                ring,
            });
        }
        let triple = match &self.triple {
            None => None,
            Some(t) => {
                let ring = t.ring.base();
                let mut from_pairs = BTreeMap::new();
                for (k, h) in &t.from_pairs {
                    from_pairs.insert(*k, strip(h, &rings[k], &ring)?);
                }
                Some((ring, from_pairs))
            }
        };
        Self::new(charts, overlaps, triple)
    }

    /// Largest absolute exponent in any restriction map.
    pub fn max_abs_exponent(&self) -> i32 {
        let mut m = 0;
        for o in self.overlaps.values() {
            for h in [&o.from_alpha, &o.from_beta] {
                m = m.max(h.var_images().iter().map(RingElem::max_abs_exponent).max().unwrap_or(0));
            }
        }
        m
    }

    /// Whether two covers have the same chart and overlap rings.
    pub fn same_shape(&self, other: &Cover) -> bool {
        self.charts.len() == other.charts.len()
            && self
                .charts
                .iter()
                .zip(&other.charts)
                .all(|(a, b)| Ring::same(&a.ring, &b.ring))
            && self
                .overlaps
                .values()
                .zip(other.overlaps.values())
                .all(|(a, b)| Ring::same(&a.ring, &b.ring))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_elem;

    #[test]
    fn projective_line_jacobian() {
        let c = Cover::projective_line();
        let o = &c.overlap(0, 1).ring;
        assert_eq!(c.jacobian(0, 1).unwrap(), parse_elem(o, "-u^2").unwrap());
        assert_eq!(c.jacobian(1, 0).unwrap(), parse_elem(o, "-u^-2").unwrap());
    }

    #[test]
    fn three_chart_cover_is_consistent() {
        let c = Cover::projective_line_three();
        assert_eq!(c.pairs().count(), 3);
        let t = c.triple().unwrap();
        assert_eq!(t.from_charts[1].var_image(0), &parse_elem(&t.ring, "u^-1").unwrap());
        let j01 = c.jacobian(0, 1).unwrap();
        let j12 = c.jacobian(1, 2).unwrap();
        assert_eq!(j01.mul_ref(&j12), c.jacobian(0, 2).unwrap());
    }

    #[test]
    fn inconsistent_triple_is_rejected() {
        let c = Cover::projective_line_three();
        let o = c.overlap(0, 1).ring.clone();
        let mut from_pairs = BTreeMap::new();
        from_pairs.insert((0, 1), RingHom::identity(&o));
        from_pairs.insert((0, 2), RingHom::identity(&o));
        from_pairs.insert((1, 2), RingHom::from_literals(&o, &o, &["2*u"], &[]).unwrap());
        let overlaps = c.pairs().map(|(a, b)| c.overlap(a, b).clone()).collect();
        let err = Cover::new(c.charts().to_vec(), overlaps, Some((o, from_pairs))).unwrap_err();
        assert!(matches!(err, Error::NotCocycle(_)));
    }

    #[test]
    fn extension_by_dual_numbers() {
        let c = Cover::projective_line().with_dual("eps").unwrap();
        assert_eq!(c.chart(1).ring.describe(), "Q[v][eps]");
        assert_eq!(c.overlap(0, 1).from_beta.nil_images().len(), 1);
        let b = c.base().unwrap();
        assert!(b.same_shape(&Cover::projective_line()));
        let p = Cover::punctured_affine(&["x", "y", "z"]).unwrap();
        assert!(p.triple().is_some());
        assert!(!p.is_curve());
    }
}
