use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng as _;
use serde_json::Value;

use crate::cech::complex::SheafKind;
use crate::cech::{
    cohomology, euler_characteristic, is_hyper_coboundary, stratification_order2_status, validate_higgs, CheckStatus,
    Complex, CoverRef, DegreeWindow, HiggsBundleData, HiggsComplex, HyperCocycle, SheafComplex,
};
use crate::conn::{epsilon_transport, intertwining, verify_triangle};
use crate::error::{Error, Result};
use crate::ks::{
    build_deformation, check_conditions, deformations_equivalent, gradedness_check, integrability_check, ks_cocycle,
    DeformedHiggsBundle,
};
use crate::report::{Report, TaskRecord};
use crate::ring::{
    gm_twist_check, interpolate_homs, rees_trivialize, rees_untrivialize, FirstOrderDiagonal, Matrix, ReesElem,
};
use crate::sampling::{random_elem, sub_rng};
use crate::verify::DEFAULT_SEED;

use super::task::{CocycleRef, Op, Sheaf, Task};
use super::Scenario;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Overrides the scenario's seed.
    pub seed: Option<u64>,
    /// Window for tasks that do not set their own.
    pub window: Option<DegreeWindow>,
}

/// Runs every task in order; a failing or erroring task does not stop the
/// ones after it.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Report {
    let seed = opts.seed.or(sc.seed).unwrap_or(DEFAULT_SEED);
    let mut report = Report::new(sc.name.clone(), seed);
    for task in &sc.tasks {
        let start = Instant::now();
        let mut rec = TaskRecord::new(task.id.clone(), task.op_name.clone());
        let mut cx = Ctx {
            sc,
            seed,
            window: opts.window,
            rec: &mut rec,
        };
        if let Err(e) = cx.run(task) {
            rec.error(e.to_string());
        }
        rec.elapsed = start.elapsed();
        report.tasks.push(rec);
    }
    report
}

struct Ctx<'a> {
    sc: &'a Scenario,
    seed: u64,
    window: Option<DegreeWindow>,
    rec: &'a mut TaskRecord,
}

fn matrix_value(m: &Matrix) -> Value {
    Value::from(m.to_literals())
}

fn pair_map(cover: &CoverRef, s: &BTreeMap<(usize, usize), Matrix>) -> Value {
    let map: serde_json::Map<String, Value> = s
        .iter()
        .map(|((a, b), m)| {
            (
                format!("{}-{}", cover.chart(*a).name, cover.chart(*b).name),
                matrix_value(m),
            )
        })
        .collect();
    Value::Object(map)
}

fn chart_map(cover: &CoverRef, ms: &[Matrix]) -> Value {
    let map: serde_json::Map<String, Value> = ms
        .iter()
        .enumerate()
        .map(|(a, m)| (cover.chart(a).name.clone(), matrix_value(m)))
        .collect();
    Value::Object(map)
}

fn status_str(s: &CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Vacuous => "vacuous",
        CheckStatus::Fail(_) => "fail",
    }
}

impl Ctx<'_> {
    fn higgs(&self) -> Result<&HiggsBundleData> {
        self.sc.require_higgs()
    }

    fn hyper(&self, c: &CocycleRef) -> Result<HyperCocycle> {
        let h = self.higgs()?;
        match c {
            CocycleRef::Tangent(n) => ks_cocycle(h, &self.sc.tangent[n]),
            CocycleRef::Hyper(n) => Ok(self.sc.hyper[n].clone()),
        }
    }

    fn window(&self, own: Option<DegreeWindow>) -> Option<DegreeWindow> {
        own.or(self.window)
    }

    fn expect<T: PartialEq + std::fmt::Display + Clone + Into<Value>>(&mut self, got: T, want: Option<T>) {
        if let Some(w) = want {
            self.rec.value("expected", w.clone());
            if got != w {
                self.rec.fail(format!("expected {w}, got {got}"));
            }
        }
    }

    fn hyper_value(&mut self, c: &HyperCocycle) -> Result<()> {
        let cover = self.higgs()?.cover().clone();
        self.rec.value("s", pair_map(&cover, &c.s));
        self.rec.value("t", chart_map(&cover, &c.t));
        Ok(())
    }

    fn deformation_value(&mut self, d: &DeformedHiggsBundle) -> Result<()> {
        let cover = d.total.cover().clone();
        self.rec
            .value("transitions", pair_map(&cover, d.total.bundle().transitions()));
        let fields: Vec<Matrix> = d.total.fields().iter().map(|f| f[0].clone()).collect();
        self.rec.value("fields", chart_map(&cover, &fields));
        self.rec.value("reduces_to_base", d.reduces_to_base());
        Ok(())
    }

    fn complex(&self, sheaf: Sheaf) -> Result<Box<dyn Complex>> {
        let h = self.higgs()?;
        Ok(match sheaf {
            Sheaf::Line(d) => Box::new(SheafComplex::line_bundle(h.cover(), d)?),
            Sheaf::Bundle => Box::new(SheafComplex::new(h.bundle(), SheafKind::Sections, 0)?),
            Sheaf::End => Box::new(SheafComplex::new(h.bundle(), SheafKind::Endomorphisms, 0)?),
            Sheaf::EndOmega => Box::new(SheafComplex::new(h.bundle(), SheafKind::Endomorphisms, 1)?),
            Sheaf::Tangent => Box::new(SheafComplex::tangent(h.cover())?),
            Sheaf::Higgs => Box::new(HiggsComplex::new(h)?),
        })
    }

    fn run(&mut self, task: &Task) -> Result<()> {
        let sc = self.sc;
        match &task.op {
            Op::ValidateHiggs => {
                let r = validate_higgs(self.higgs()?);
                for (name, s) in &r.checks {
                    self.rec.value(name, status_str(s));
                }
                if let Some(w) = r.first_failure() {
                    self.rec.fail(w);
                }
            }
            Op::Stratification => {
                let s = stratification_order2_status(self.higgs()?);
                self.rec.value("status", status_str(&s));
                if let CheckStatus::Fail(w) = s {
                    self.rec.fail(w);
                }
            }
            Op::Cohomology {
                sheaf,
                degree,
                window,
                expect,
            } => {
                let cx = self.complex(*sheaf)?;
                if *degree > cx.top() {
                    return Err(Error::Resolution(format!(
                        "degree {degree} exceeds the top degree {}",
                        cx.top()
                    )));
                }
                let w = self
                    .window(*window)
                    .unwrap_or_else(|| DegreeWindow::for_complex(cx.as_ref()));
                let g = cohomology(cx.as_ref(), *degree, &w)?;
                self.rec.value("sheaf", sheaf.to_string());
                self.rec.value("degree", *degree);
                self.rec.value("dim", g.dim);
                self.rec.value("window", w.to_string());
                self.expect(g.dim, *expect);
            }
            Op::EulerCharacteristic { sheaf, window, expect } => {
                let cx = self.complex(*sheaf)?;
                let w = self
                    .window(*window)
                    .unwrap_or_else(|| DegreeWindow::for_complex(cx.as_ref()));
                let (chi, dims) = euler_characteristic(cx.as_ref(), &w)?;
                self.rec.value("sheaf", sheaf.to_string());
                self.rec.value("dims", dims);
                self.rec.value("chi", chi);
                self.rec.value("window", w.to_string());
                self.expect(chi, *expect);
            }
            Op::KsCocycle { cocycle } => {
                let h = sc.require_higgs()?;
                let c = ks_cocycle(h, &sc.tangent[cocycle])?;
                self.hyper_value(&c)?;
                if let Err(e) = check_conditions(&HiggsComplex::new(h)?, &c) {
                    self.rec.fail(e.to_string());
                }
            }
            Op::CheckConditions { cocycle } => {
                let c = self.hyper(cocycle)?;
                let conds = HiggsComplex::new(self.higgs()?)?.conditions(&c)?;
                for (i, s) in conds.iter().enumerate() {
                    self.rec.value(&format!("condition_{}", i + 1), status_str(s));
                }
                if let Err(e) = check_conditions(&HiggsComplex::new(self.higgs()?)?, &c) {
                    self.rec.fail(e.to_string());
                }
            }
            Op::BuildDeformation { cocycle } => {
                let c = self.hyper(cocycle)?;
                match build_deformation(self.higgs()?, &c) {
                    Ok(d) => self.deformation_value(&d)?,
                    Err(e @ (Error::ValidationFailed(_) | Error::ConditionFailed { .. })) => {
                        self.rec.fail(e.to_string());
                    }
                    Err(e) => return Err(e),
                }
            }
            Op::IsHyperCoboundary {
                cocycle,
                window,
                expect,
            } => {
                let h = sc.require_higgs()?;
                let c = self.hyper(cocycle)?;
                let u = is_hyper_coboundary(&HiggsComplex::new(h)?, &c, self.window(*window))?;
                self.rec.value("coboundary", u.is_some());
                if let Some(u) = &u {
                    self.rec.value("primitive", chart_map(h.cover(), u));
                }
                self.expect(u.is_some(), *expect);
            }
            Op::DeformationsEquivalent { a, b, window, expect } => {
                let h = sc.require_higgs()?;
                let d1 = build_deformation(h, &self.hyper(a)?)?;
                let d2 = build_deformation(h, &self.hyper(b)?)?;
                let u = deformations_equivalent(&d1, &d2, self.window(*window))?;
                self.rec.value("equivalent", u.is_some());
                if let Some(u) = &u {
                    self.rec.value("witness", chart_map(h.cover(), u));
                }
                self.expect(u.is_some(), *expect);
            }
            Op::Gradedness { cocycle, t } => {
                let r = gradedness_check(self.higgs()?, &sc.tangent[cocycle], t)?;
                self.rec.value("t", t.to_string());
                self.rec.value("cocycle_level", r.cocycle_level);
                self.rec.value("class_level", r.class_level);
                if !r.holds() {
                    self.rec.fail(r.witness.unwrap_or_else(|| "gradedness fails".into()));
                }
            }
            Op::Integrability { a, b, window } => {
                let h = sc.require_higgs()?;
                let r = integrability_check(h, &sc.tangent[a], &sc.tangent[b], self.window(*window))?;
                self.rec.value("equivalent", r.equivalent);
                self.rec.value("fast_path", r.fast_path);
                if let Some(w) = &r.witness {
                    let v: Vec<Matrix> = w.iter().map(|(v, _)| v.clone()).collect();
                    let ww: Vec<Matrix> = w.iter().map(|(_, w)| w.clone()).collect();
                    self.rec.value("witness_v", chart_map(h.cover(), &v));
                    self.rec.value("witness_w", chart_map(h.cover(), &ww));
                }
                if !r.equivalent {
                    self.rec.fail("the two second-order deformations are not equivalent");
                }
            }
            Op::Interpolate {
                f0,
                f1,
                lambda,
                samples,
            } => {
                let (f0, f1) = (&sc.homs[f0], &sc.homs[f1]);
                let fl = interpolate_homs(f0, f1, lambda)?;
                let images: Vec<String> = fl.var_images().iter().map(|e| e.to_string()).collect();
                self.rec.value("images", images);
                let mut rng = sub_rng(self.seed, &format!("task:{}", task.id));
                let one_minus = &crate::ring::Scalar::one() - lambda;
                for _ in 0..*samples {
                    let p = random_elem(&mut rng, f0.source(), 3, 3);
                    let q = random_elem(&mut rng, f0.source(), 3, 3);
                    if fl.apply(&p.mul_ref(&q)) != fl.apply(&p).mul_ref(&fl.apply(&q)) {
                        self.rec.fail(format!("not multiplicative on ({p}) * ({q})"));
                        break;
                    }
                    let pointwise = f0.apply(&p).scale(&one_minus).add_ref(&f1.apply(&p).scale(lambda));
                    if fl.apply(&p) != pointwise {
                        self.rec.fail(format!("f_l({p}) differs from (1-l)f0 + l*f1"));
                        break;
                    }
                }
                self.rec.value("samples", *samples);
            }
            Op::Transport { connection, f0, f1 } => {
                let t = epsilon_transport(&sc.connections[connection], &sc.homs[f0], &sc.homs[f1])?;
                self.rec.value("matrix", matrix_value(&t.matrix));
                self.rec.value("reduces_to_identity", t.reduces_to_identity());
                if !t.reduces_to_identity() {
                    self.rec.fail("transport does not reduce to the identity");
                }
            }
            Op::Triangle { connection, homs } => {
                let f: Vec<_> = homs.iter().map(|n| &sc.homs[n]).collect();
                let closes = verify_triangle(&sc.connections[connection], f[0], f[1], f[2], f[3], f[4], f[5])?;
                self.rec.value("identity", closes);
                if !closes {
                    self.rec.fail("the composite transport is not the identity");
                }
            }
            Op::Intertwining { connection, f0, f1 } => {
                let r = intertwining(&sc.connections[connection], &sc.homs[f0], &sc.homs[f1])?;
                self.rec.value("holds", r.holds());
                self.rec.value("offsets_symmetric_vanish", r.offsets_symmetric_vanish);
                if let Some(d) = r.defects.iter().find(|m| !m.is_zero()) {
                    self.rec.value("defect", matrix_value(d));
                }
                if !r.holds() {
                    self.rec
                        .fail("transport does not intertwine the pulled-back connections");
                }
            }
            Op::ReesRoundtrip { ring, bound, samples } => {
                let diag = FirstOrderDiagonal::new(&sc.rings[ring])?;
                let mut rng = sub_rng(self.seed, &format!("task:{}", task.id));
                for _ in 0..*samples {
                    let top = rng.gen_range(0..=*bound);
                    let coeffs: Vec<_> = (0..=top).map(|k| (k, random_elem(&mut rng, diag.p1(), 2, 2))).collect();
                    let e = ReesElem::from_coeffs(diag.p1(), *bound, coeffs)?;
                    let back = rees_untrivialize(&rees_trivialize(&e)?)?;
                    if back != e {
                        self.rec.fail(format!("untrivialize(trivialize({e})) = {back}"));
                        break;
                    }
                }
                self.rec.value("bound", *bound);
                self.rec.value("samples", *samples);
            }
            Op::GmTwist { delta, lambda, bound } => {
                let r = gm_twist_check(&sc.homs[delta], lambda, *bound, &[])?;
                self.rec.value("lambda", lambda.to_string());
                self.rec.value("checked", r.checked);
                if !r.holds {
                    self.rec.fail(r.witness.unwrap_or_default());
                }
            }
        }
        Ok(())
    }
}
