//! Scenario files: declarations of rings, covers, bundles and cocycles plus
//! an ordered task list.
//!
//! Loading happens in two phases. Parsing turns TOML into raw tables and
//! reports syntax errors with a line and column. Resolution builds the
//! algebraic objects and checks every task against the registry, so a
//! scenario that loads is one whose tasks can all be attempted.

mod run;
mod task;

use std::collections::BTreeMap;

use serde::Deserialize;
use toml::Spanned;

use crate::builtin::{self, Example};
use crate::cech::{Chart, Cover, CoverRef, HiggsBundleData, HyperCocycle, Overlap, VectorBundle};
use crate::conn::LambdaConnection;
use crate::error::{Error, Result};
use crate::ks::TangentCocycle;
use crate::ring::{parse_elem, Matrix, Ring, RingElem, RingHom, RingRef, Scalar};

pub use run::{run_scenario, RunOptions};
pub use task::{CocycleRef, Op, Sheaf, Task};

pub const SCENARIO_FORMAT_VERSION: u32 = 1;

type Lit = Spanned<String>;
type LitMatrix = Vec<Vec<Lit>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    format_version: Spanned<u32>,
    #[serde(default)]
    description: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    example: Option<Spanned<String>>,
    #[serde(default)]
    rings: BTreeMap<String, RawRing>,
    #[serde(default)]
    homs: BTreeMap<String, RawHom>,
    #[serde(default)]
    connections: BTreeMap<String, RawConnection>,
    #[serde(default)]
    cover: Option<Spanned<RawCover>>,
    #[serde(default)]
    bundle: Option<Spanned<RawBundle>>,
    #[serde(default)]
    higgs: Option<BTreeMap<String, LitMatrix>>,
    #[serde(default)]
    cocycles: BTreeMap<String, Spanned<RawCocycle>>,
    #[serde(default)]
    tasks: Vec<Spanned<toml::Table>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRing {
    vars: Vec<String>,
    #[serde(default)]
    invertible: Vec<String>,
    #[serde(default)]
    nilpotents: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHom {
    source: Spanned<String>,
    target: Spanned<String>,
    images: Vec<Lit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConnection {
    ring: Spanned<String>,
    lambda: Lit,
    rank: usize,
    matrices: Vec<LitMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCover {
    #[serde(default)]
    builtin: Option<String>,
    #[serde(default)]
    charts: Vec<RawChart>,
    #[serde(default)]
    overlaps: Vec<RawOverlap>,
    #[serde(default)]
    triple: Option<RawTriple>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    name: String,
    vars: Vec<String>,
    #[serde(default)]
    invertible: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverlap {
    charts: [Spanned<String>; 2],
    vars: Vec<String>,
    #[serde(default)]
    invertible: Vec<String>,
    /// Images of each chart's coordinates, keyed by chart name.
    maps: BTreeMap<String, Vec<Lit>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTriple {
    vars: Vec<String>,
    #[serde(default)]
    invertible: Vec<String>,
    /// Images of each pair overlap's coordinates, keyed by `"A-B"`.
    maps: BTreeMap<String, Vec<Lit>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    #[serde(default)]
    rank: Option<usize>,
    /// Splitting type on the projective line.
    #[serde(default)]
    degrees: Option<Vec<i32>>,
    #[serde(default)]
    transitions: BTreeMap<String, LitMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCocycle {
    kind: String,
    /// Tangent cocycles: `c_{αβ}` keyed by `"A-B"`.
    #[serde(default)]
    fields: BTreeMap<String, Lit>,
    /// Hyper-cocycles: overlap part keyed by `"A-B"`, chart part by chart.
    #[serde(default)]
    s: BTreeMap<String, LitMatrix>,
    #[serde(default)]
    t: BTreeMap<String, LitMatrix>,
}

/// A resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: Option<String>,
    pub seed: Option<u64>,
    pub example: Option<Example>,
    pub rings: BTreeMap<String, RingRef>,
    pub homs: BTreeMap<String, RingHom>,
    pub connections: BTreeMap<String, LambdaConnection>,
    pub higgs: Option<HiggsBundleData>,
    pub tangent: BTreeMap<String, TangentCocycle>,
    pub hyper: BTreeMap<String, HyperCocycle>,
    pub tasks: Vec<Task>,
}

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

struct Resolver<'a> {
    src: &'a str,
}

impl Resolver<'_> {
    fn at(&self, span: std::ops::Range<usize>, msg: impl std::fmt::Display) -> Error {
        let (l, c) = line_col(self.src, span.start);
        Error::Resolution(format!("line {l}, column {c}: {msg}"))
    }

    fn at_err(&self, span: std::ops::Range<usize>, e: Error) -> Error {
        match e {
            Error::Resolution(m) => self.at(span, m),
            other => self.at(span, other),
        }
    }

    /// Parses a literal, moving parse positions from the literal into the file.
    fn elem(&self, ring: &RingRef, lit: &Lit) -> Result<RingElem> {
        parse_elem(ring, lit.get_ref()).map_err(|e| self.relocate(lit, e))
    }

    fn relocate(&self, lit: &Lit, e: Error) -> Error {
        match e {
            Error::Parse { line, column, message } => {
                let (l0, c0) = line_col(self.src, lit.span().start + 1);
                let (line, column) = if line == 1 {
                    (l0, c0 + column - 1)
                } else {
                    (l0 + line - 1, column)
                };
                Error::Parse { line, column, message }
            }
            other => self.at(lit.span(), other),
        }
    }

    fn scalar(&self, lit: &Lit) -> Result<Scalar> {
        lit.get_ref().parse().map_err(|e| self.relocate(lit, e))
    }

    fn matrix(&self, ring: &RingRef, rows: &LitMatrix) -> Result<Matrix> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|l| self.elem(ring, l)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(ring, rows)
    }

    fn ring(&self, rings: &BTreeMap<String, RingRef>, name: &Spanned<String>) -> Result<RingRef> {
        rings
            .get(name.get_ref())
            .cloned()
            .ok_or_else(|| self.at(name.span(), format!("undeclared ring `{}`", name.get_ref())))
    }
}

fn pair_key(cover: &CoverRef, key: &str) -> Result<(usize, usize)> {
    let (a, b) = key
        .split_once('-')
        .ok_or_else(|| Error::Resolution(format!("overlap key `{key}` is not of the form `A-B`")))?;
    let idx = |n: &str| {
        cover
            .chart_index(n.trim())
            .ok_or_else(|| Error::Resolution(format!("undeclared chart `{}` in `{key}`", n.trim())))
    };
    let (a, b) = (idx(a)?, idx(b)?);
    if a >= b {
        return Err(Error::Resolution(format!(
            "overlap key `{key}` must list charts in declaration order"
        )));
    }
    Ok((a, b))
}

fn pair_name(cover: &CoverRef, a: usize, b: usize) -> String {
    format!("{}-{}", cover.chart(a).name, cover.chart(b).name)
}

fn make_ring(vars: &[String], invertible: &[String], nilpotents: &[String]) -> Result<RingRef> {
    let base = Ring::laurent(vars, invertible)?;
    match nilpotents {
        [] => Ok(base),
        [e] => base.with_dual(e),
        [e1, e2] => base.with_two_parameters(e1, e2),
        _ => Err(Error::Unsupported("at most two nilpotent parameters".into())),
    }
}

impl Scenario {
    /// Parses and resolves a scenario. `fallback` is used as the example
    /// when the file names none.
    pub fn from_toml(name: &str, src: &str, fallback: Option<Example>) -> Result<Scenario> {
        let raw: RawScenario = toml::from_str(src).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_col(src, s.start));
            Error::Parse {
                line,
                column,
                message: e.message().trim().to_string(),
            }
        })?;
        let r = Resolver { src };
        if *raw.format_version.get_ref() != SCENARIO_FORMAT_VERSION {
            return Err(r.at(
                raw.format_version.span(),
                format!(
                    "unsupported format_version {} (expected {SCENARIO_FORMAT_VERSION})",
                    raw.format_version.get_ref()
                ),
            ));
        }
        let example = match &raw.example {
            Some(e) => Some(e.get_ref().parse::<Example>().map_err(|err| r.at_err(e.span(), err))?),
            None => fallback,
        };
        let mut sc = match example {
            Some(ex) => Scenario::builtin(ex),
            None => Scenario::empty(name),
        };
        sc.name = name.to_string();
        sc.description = raw.description.clone();
        sc.seed = raw.seed;

        for (n, ring) in &raw.rings {
            if sc.rings.contains_key(n) {
                return Err(Error::Resolution(format!("ring `{n}` is already declared")));
            }
            sc.rings
                .insert(n.clone(), make_ring(&ring.vars, &ring.invertible, &ring.nilpotents)?);
        }
        for (n, h) in &raw.homs {
            let source = r.ring(&sc.rings, &h.source)?;
            let target = r.ring(&sc.rings, &h.target)?;
            let images = h
                .images
                .iter()
                .map(|l| r.elem(&target, l))
                .collect::<Result<Vec<_>>>()?;
            let hom = RingHom::new(&source, &target, images, vec![])
                .map_err(|e| r.at(h.source.span(), format!("hom `{n}`: {e}")))?;
            sc.homs.insert(n.clone(), hom);
        }
        for (n, c) in &raw.connections {
            let ring = r.ring(&sc.rings, &c.ring)?;
            let lambda = r.scalar(&c.lambda)?;
            let mats = c
                .matrices
                .iter()
                .map(|m| r.matrix(&ring, m))
                .collect::<Result<Vec<_>>>()?;
            let conn = LambdaConnection::with_rank(&ring, c.rank, lambda, mats)
                .map_err(|e| r.at(c.ring.span(), format!("connection `{n}`: {e}")))?;
            sc.connections.insert(n.clone(), conn);
        }

        let declares_geometry = raw.cover.is_some() || raw.bundle.is_some() || raw.higgs.is_some();
        if declares_geometry && sc.higgs.is_some() {
            return Err(Error::Resolution(format!(
                "example `{}` already provides the cover, bundle and Higgs field",
                example.map(Example::name).unwrap_or_default()
            )));
        }
        if declares_geometry {
            sc.higgs = Some(resolve_geometry(&r, &raw)?);
        }

        for (n, c) in &raw.cocycles {
            let h = sc
                .higgs
                .as_ref()
                .ok_or_else(|| r.at(c.span(), format!("cocycle `{n}` needs a cover")))?;
            let cover = h.cover();
            let raw_c = c.get_ref();
            match raw_c.kind.as_str() {
                "tangent" => {
                    if !raw_c.s.is_empty() || !raw_c.t.is_empty() {
                        return Err(r.at(c.span(), format!("tangent cocycle `{n}` takes `fields` only")));
                    }
                    let mut coeffs = BTreeMap::new();
                    for (k, lit) in &raw_c.fields {
                        let (a, b) = pair_key(cover, k).map_err(|e| r.at_err(c.span(), e))?;
                        coeffs.insert((a, b), r.elem(&cover.overlap(a, b).ring, lit)?);
                    }
                    for (a, b) in cover.pairs() {
                        coeffs
                            .entry((a, b))
                            .or_insert_with(|| RingElem::zero(&cover.overlap(a, b).ring));
                    }
                    let chi = TangentCocycle::new(cover, coeffs).map_err(|e| r.at(c.span(), format!("`{n}`: {e}")))?;
                    sc.tangent.insert(n.clone(), chi);
                }
                "hyper" => {
                    if !raw_c.fields.is_empty() {
                        return Err(r.at(c.span(), format!("hyper-cocycle `{n}` takes `s` and `t` only")));
                    }
                    let mut hc = HyperCocycle::zero(h);
                    for (k, m) in &raw_c.s {
                        let (a, b) = pair_key(cover, k).map_err(|e| r.at_err(c.span(), e))?;
                        hc.s.insert((a, b), r.matrix(&cover.overlap(a, b).ring, m)?);
                    }
                    for (k, m) in &raw_c.t {
                        let a = cover
                            .chart_index(k)
                            .ok_or_else(|| r.at(c.span(), format!("undeclared chart `{k}` in `{n}`")))?;
                        hc.t[a] = r.matrix(&cover.chart(a).ring, m)?;
                    }
                    let shapes_ok =
                        hc.s.values()
                            .chain(&hc.t)
                            .all(|m| m.rows() == h.rank() && m.cols() == h.rank());
                    if !shapes_ok {
                        return Err(r.at(c.span(), format!("`{n}`: matrices must be {0}x{0}", h.rank())));
                    }
                    sc.hyper.insert(n.clone(), hc);
                }
                other => {
                    return Err(r.at(
                        c.span(),
                        format!("cocycle kind must be `tangent` or `hyper`, got `{other}`"),
                    ));
                }
            }
            if sc.tangent.contains_key(n) && sc.hyper.contains_key(n) {
                return Err(r.at(c.span(), format!("cocycle `{n}` declared twice")));
            }
        }

        let mut tasks = Vec::new();
        for (i, t) in raw.tasks.iter().enumerate() {
            let task = Task::resolve(&sc, i, t.get_ref()).map_err(|e| r.at_err(t.span(), e))?;
            if tasks.iter().any(|p: &Task| p.id == task.id) {
                return Err(r.at(t.span(), format!("duplicate task id `{}`", task.id)));
            }
            tasks.push(task);
        }
        sc.tasks = tasks;
        Ok(sc)
    }

    fn empty(name: &str) -> Scenario {
        Scenario {
            name: name.to_string(),
            description: None,
            seed: None,
            example: None,
            rings: BTreeMap::new(),
            homs: BTreeMap::new(),
            connections: BTreeMap::new(),
            higgs: None,
            tangent: BTreeMap::new(),
            hyper: BTreeMap::new(),
            tasks: Vec::new(),
        }
    }

    /// The declarations of a built-in example, without tasks.
    pub fn builtin(ex: Example) -> Scenario {
        let mut sc = Scenario::empty(ex.name());
        sc.example = Some(ex);
        sc.higgs = ex.higgs();
        match ex {
            Example::InterpDemo => {
                let d = builtin::interp_demo();
                sc.rings.insert("A".into(), d.source.clone());
                sc.rings.insert("T".into(), d.target.clone());
                sc.connections.insert("nabla".into(), d.conn.clone());
                for (n, f) in ["f0", "f1", "f2", "f01", "f12", "f20"].into_iter().zip(d.triangle) {
                    sc.homs.insert(n.into(), f);
                }
            }
            Example::ReesDemo => {
                let d = builtin::rees_demo();
                sc.rings.insert("A".into(), d.delta.source().clone());
                sc.rings.insert("T".into(), d.delta.target().clone());
                sc.homs.insert("delta".into(), d.delta);
            }
            Example::P1Trivial | Example::P1Nilpotent => {}
        }
        sc
    }

    /// The scenario run by `check --example NAME` without a file.
    pub fn builtin_default(ex: Example) -> Scenario {
        let src = match ex {
            Example::P1Trivial => include_str!("../../scenarios/p1-trivial.toml"),
            Example::P1Nilpotent => include_str!("../../scenarios/p1-nilpotent.toml"),
            Example::InterpDemo => include_str!("../../scenarios/interp-demo.toml"),
            Example::ReesDemo => include_str!("../../scenarios/rees-demo.toml"),
        };
        Scenario::from_toml(ex.name(), src, None).expect("built-in scenarios resolve")
    }

    /// Resolves one more task given as a TOML table.
    pub fn push_task(&mut self, table: &toml::Table) -> Result<()> {
        let task = Task::resolve(self, self.tasks.len(), table)?;
        if self.tasks.iter().any(|t| t.id == task.id) {
            return Err(Error::Resolution(format!("duplicate task id `{}`", task.id)));
        }
        self.tasks.push(task);
        Ok(())
    }

    /// Declares `name` as the tangent cocycle `c ∂/∂x` on the single
    /// overlap of a two-chart cover.
    pub fn add_tangent_literal(&mut self, name: &str, literal: &str) -> Result<()> {
        let cover = self.require_higgs()?.cover().clone();
        if cover.n_charts() != 2 {
            return Err(Error::Unsupported(
                "a single literal defines a cocycle on two-chart covers only".into(),
            ));
        }
        let c = parse_elem(&cover.overlap(0, 1).ring, literal)?;
        let chi = TangentCocycle::new(&cover, BTreeMap::from([((0, 1), c)]))?;
        self.tangent.insert(name.to_string(), chi);
        Ok(())
    }

    pub fn require_higgs(&self) -> Result<&HiggsBundleData> {
        self.higgs
            .as_ref()
            .ok_or_else(|| Error::Resolution("this task needs a cover, bundle and Higgs field".into()))
    }

    pub fn cocycle(&self, name: &str) -> Result<CocycleRef> {
        if self.tangent.contains_key(name) {
            Ok(CocycleRef::Tangent(name.to_string()))
        } else if self.hyper.contains_key(name) {
            Ok(CocycleRef::Hyper(name.to_string()))
        } else {
            Err(Error::Resolution(format!("undeclared cocycle `{name}`")))
        }
    }
}

fn resolve_geometry(r: &Resolver<'_>, raw: &RawScenario) -> Result<HiggsBundleData> {
    let cover_raw = raw
        .cover
        .as_ref()
        .ok_or_else(|| Error::Resolution("a bundle or Higgs field needs a `[cover]`".into()))?;
    let cover = resolve_cover(r, cover_raw)?;
    let bundle = match &raw.bundle {
        None => VectorBundle::trivial(&cover, 1),
        Some(b) => {
            let rb = b.get_ref();
            match (&rb.degrees, rb.transitions.is_empty()) {
                (Some(d), true) => {
                    if rb.rank.is_some_and(|k| k != d.len()) {
                        return Err(r.at(b.span(), "rank disagrees with the number of degrees"));
                    }
                    VectorBundle::split_on_projective_line(&cover, d).map_err(|e| r.at_err(b.span(), e))?
                }
                (None, false) => {
                    let rank = rb
                        .rank
                        .ok_or_else(|| r.at(b.span(), "`rank` is required with `transitions`"))?;
                    let mut tr = BTreeMap::new();
                    for (k, m) in &rb.transitions {
                        let (a, bb) = pair_key(&cover, k).map_err(|e| r.at_err(b.span(), e))?;
                        tr.insert((a, bb), r.matrix(&cover.overlap(a, bb).ring, m)?);
                    }
                    for (a, bb) in cover.pairs() {
                        if !tr.contains_key(&(a, bb)) {
                            return Err(r.at(b.span(), format!("missing transition `{}`", pair_name(&cover, a, bb))));
                        }
                    }
                    VectorBundle::new(&cover, rank, tr).map_err(|e| r.at_err(b.span(), e))?
                }
                (None, true) => match rb.rank {
                    Some(k) => VectorBundle::trivial(&cover, k),
                    None => return Err(r.at(b.span(), "give `degrees`, `transitions` or a `rank`")),
                },
                (Some(_), false) => return Err(r.at(b.span(), "give either `degrees` or `transitions`")),
            }
        }
    };
    match &raw.higgs {
        None => Ok(HiggsBundleData::zero_field(bundle)),
        Some(fields) => {
            let mut out: Vec<Option<Matrix>> = vec![None; cover.n_charts()];
            for (k, m) in fields {
                let a = cover
                    .chart_index(k)
                    .ok_or_else(|| Error::Resolution(format!("undeclared chart `{k}` in [higgs]")))?;
                out[a] = Some(r.matrix(&cover.chart(a).ring, m)?);
            }
            let fields = out
                .into_iter()
                .enumerate()
                .map(|(a, m)| {
                    let ring = &cover.chart(a).ring;
                    let k = bundle.rank();
                    match m {
                        Some(m) if ring.nvars() == 1 => Ok(vec![m]),
                        Some(_) => Err(Error::Unsupported("Higgs fields are entered on curve charts".into())),
                        None => Ok(vec![Matrix::zero(ring, k, k); ring.nvars()]),
                    }
                })
                .collect::<Result<_>>()?;
            HiggsBundleData::new(bundle, fields)
        }
    }
}

fn resolve_cover(r: &Resolver<'_>, raw: &Spanned<RawCover>) -> Result<CoverRef> {
    let c = raw.get_ref();
    if let Some(b) = &c.builtin {
        if !c.charts.is_empty() || !c.overlaps.is_empty() || c.triple.is_some() {
            return Err(r.at(raw.span(), "a built-in cover takes no charts"));
        }
        return match b.as_str() {
            "projective-line" => Ok(Cover::projective_line()),
            "projective-line-3" => Ok(Cover::projective_line_three()),
            other => Err(r.at(
                raw.span(),
                format!("unknown built-in cover `{other}` (known: projective-line, projective-line-3)"),
            )),
        };
    }
    let charts: Vec<Chart> = c
        .charts
        .iter()
        .map(|ch| {
            if ch.name.contains('-') {
                return Err(r.at(raw.span(), format!("chart name `{}` may not contain `-`", ch.name)));
            }
            Ok(Chart {
                name: ch.name.clone(),
                ring: Ring::laurent(&ch.vars, &ch.invertible)?,
            })
        })
        .collect::<Result<_>>()?;
    let index = |n: &Spanned<String>| {
        charts
            .iter()
            .position(|ch| ch.name == *n.get_ref())
            .ok_or_else(|| r.at(n.span(), format!("undeclared chart `{}`", n.get_ref())))
    };
    let mut overlaps = Vec::new();
    for o in &c.overlaps {
        let (mut a, mut b) = (index(&o.charts[0])?, index(&o.charts[1])?);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let ring = Ring::laurent(&o.vars, &o.invertible)?;
        let hom = |k: usize| -> Result<RingHom> {
            let name = &charts[k].name;
            let lits = o
                .maps
                .get(name)
                .ok_or_else(|| r.at(o.charts[0].span(), format!("overlap has no map from `{name}`")))?;
            let images = lits.iter().map(|l| r.elem(&ring, l)).collect::<Result<Vec<_>>>()?;
            RingHom::new(&charts[k].ring, &ring, images, vec![]).map_err(|e| r.at(o.charts[0].span(), e))
        };
        overlaps.push(Overlap {
            alpha: a,
            beta: b,
            from_alpha: hom(a)?,
            from_beta: hom(b)?,
            ring,
        });
    }
    let triple = match &c.triple {
        None => None,
        Some(t) => {
            let ring = Ring::laurent(&t.vars, &t.invertible)?;
            let mut from_pairs = BTreeMap::new();
            for (k, lits) in &t.maps {
                let (a, b) = k
                    .split_once('-')
                    .and_then(|(x, y)| {
                        let i = charts.iter().position(|ch| ch.name == x.trim())?;
                        let j = charts.iter().position(|ch| ch.name == y.trim())?;
                        Some((i.min(j), i.max(j)))
                    })
                    .ok_or_else(|| r.at(raw.span(), format!("bad triple map key `{k}`")))?;
                let o = overlaps
                    .iter()
                    .find(|o| o.alpha == a && o.beta == b)
                    .ok_or_else(|| r.at(raw.span(), format!("no overlap `{k}` declared")))?;
                let images = lits.iter().map(|l| r.elem(&ring, l)).collect::<Result<Vec<_>>>()?;
                from_pairs.insert((a, b), RingHom::new(&o.ring, &ring, images, vec![])?);
            }
            Some((ring, from_pairs))
        }
    };
    Cover::new(charts, overlaps, triple).map_err(|e| r.at_err(raw.span(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions() {
        assert_eq!(line_col("ab\ncd", 0), (1, 1));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = Scenario::from_toml("t", "format_version = 1\nseed = = 3\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn literal_errors_point_into_the_file() {
        let src = "format_version = 1\n[cover]\nbuiltin = \"projective-line\"\n[higgs]\nU = [[\"u +* 1\"]]\n";
        match Scenario::from_toml("t", src, None).unwrap_err() {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 5);
                assert!(column > 8, "column {column}");
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn version_is_checked() {
        let err = Scenario::from_toml("t", "format_version = 2\n", None).unwrap_err();
        assert!(matches!(err, Error::Resolution(_)));
    }

    #[test]
    fn custom_cover_matches_the_builtin() {
        let src = r#"
format_version = 1
[cover]
charts = [{ name = "U", vars = ["u"] }, { name = "V", vars = ["v"] }]
overlaps = [{ charts = ["U", "V"], vars = ["u"], invertible = ["u"], maps = { U = ["u"], V = ["u^-1"] } }]
[bundle]
rank = 2
transitions = { "U-V" = [["u", "0"], ["0", "u^-1"]] }
[higgs]
U = [["0", "1"], ["0", "0"]]
V = [["0", "-1"], ["0", "0"]]
"#;
        let sc = Scenario::from_toml("t", src, None).unwrap();
        let h = sc.higgs.unwrap();
        let b = builtin::p1_nilpotent(&Cover::projective_line());
        assert!(h.cover().same_shape(b.cover()));
        assert_eq!(h.fields(), b.fields());
    }

    #[test]
    fn builtin_defaults_resolve() {
        for ex in Example::ALL {
            assert!(!Scenario::builtin_default(ex).tasks.is_empty());
        }
    }

    #[test]
    fn builtin_defaults_pass() {
        for ex in Example::ALL {
            let report = run_scenario(&Scenario::builtin_default(ex), &RunOptions::default());
            assert!(report.all_passed(), "{}", report.to_text(false));
        }
    }

    #[test]
    fn undeclared_cocycle_is_a_resolution_error() {
        let src =
            "format_version = 1\nexample = \"p1-nilpotent\"\n[[tasks]]\nop = \"ks_cocycle\"\ncocycle = \"nope\"\n";
        match Scenario::from_toml("t", src, None).unwrap_err() {
            Error::Resolution(m) => assert!(m.contains("undeclared cocycle `nope`") && m.contains("line 3"), "{m}"),
            e => panic!("{e:?}"),
        }
    }
}
