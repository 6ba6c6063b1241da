//! The operation registry: task names, their parameters and checks.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use toml::{Table, Value};

use crate::cech::DegreeWindow;
use crate::error::{Error, Result};
use crate::ring::Scalar;

use super::Scenario;

/// A sheaf or complex on the scenario's cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheaf {
    Line(i32),
    /// `E` itself.
    Bundle,
    End,
    /// `End E ⊗ Ω`.
    EndOmega,
    Tangent,
    /// The Higgs complex `End E → End E ⊗ Ω`.
    Higgs,
}

impl FromStr for Sheaf {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(d) = s.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
            return d
                .trim()
                .parse()
                .map(Sheaf::Line)
                .map_err(|_| Error::Resolution(format!("bad twist in `{s}`")));
        }
        match s {
            "O" => Ok(Sheaf::Line(0)),
            "E" => Ok(Sheaf::Bundle),
            "end" => Ok(Sheaf::End),
            "end-omega" => Ok(Sheaf::EndOmega),
            "tangent" => Ok(Sheaf::Tangent),
            "higgs" => Ok(Sheaf::Higgs),
            _ => Err(Error::Resolution(format!(
                "unknown sheaf `{s}` (known: O(d), E, end, end-omega, tangent, higgs)"
            ))),
        }
    }
}

impl fmt::Display for Sheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sheaf::Line(d) => write!(f, "O({d})"),
            Sheaf::Bundle => f.write_str("E"),
            Sheaf::End => f.write_str("end"),
            Sheaf::EndOmega => f.write_str("end-omega"),
            Sheaf::Tangent => f.write_str("tangent"),
            Sheaf::Higgs => f.write_str("higgs"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CocycleRef {
    Tangent(String),
    Hyper(String),
}

impl CocycleRef {
    pub fn name(&self) -> &str {
        match self {
            CocycleRef::Tangent(n) | CocycleRef::Hyper(n) => n,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Op {
    ValidateHiggs,
    Stratification,
    Cohomology {
        sheaf: Sheaf,
        degree: usize,
        window: Option<DegreeWindow>,
        expect: Option<usize>,
    },
    EulerCharacteristic {
        sheaf: Sheaf,
        window: Option<DegreeWindow>,
        expect: Option<i64>,
    },
    KsCocycle {
        cocycle: String,
    },
    CheckConditions {
        cocycle: CocycleRef,
    },
    BuildDeformation {
        cocycle: CocycleRef,
    },
    IsHyperCoboundary {
        cocycle: CocycleRef,
        window: Option<DegreeWindow>,
        expect: Option<bool>,
    },
    DeformationsEquivalent {
        a: CocycleRef,
        b: CocycleRef,
        window: Option<DegreeWindow>,
        expect: Option<bool>,
    },
    Gradedness {
        cocycle: String,
        t: Scalar,
    },
    Integrability {
        a: String,
        b: String,
        window: Option<DegreeWindow>,
    },
    Interpolate {
        f0: String,
        f1: String,
        lambda: Scalar,
        samples: usize,
    },
    Transport {
        connection: String,
        f0: String,
        f1: String,
    },
    Triangle {
        connection: String,
        homs: [String; 6],
    },
    Intertwining {
        connection: String,
        f0: String,
        f1: String,
    },
    ReesRoundtrip {
        ring: String,
        bound: i32,
        samples: usize,
    },
    GmTwist {
        delta: String,
        lambda: Scalar,
        bound: i32,
    },
}

impl Op {
    pub const NAMES: [&'static str; 18] = [
        "validate_higgs",
        "stratification",
        "cech_h1",
        "cohomology",
        "euler_characteristic",
        "ks_cocycle",
        "check_conditions",
        "build_deformation",
        "is_hyper_coboundary",
        "deformations_equivalent",
        "gradedness",
        "integrability",
        "interpolate",
        "transport",
        "triangle",
        "intertwining",
        "rees_roundtrip",
        "gm_twist",
    ];
}

#[derive(Debug, Clone)]
pub struct Task {
    pub id: String,
    pub op_name: String,
    pub op: Op,
}

/// Typed access to a task table; every key must be consumed.
struct Params<'a> {
    table: &'a Table,
    used: BTreeSet<&'static str>,
}

impl<'a> Params<'a> {
    fn get(&mut self, key: &'static str) -> Option<&'a Value> {
        self.used.insert(key);
        self.table.get(key)
    }

    fn string(&mut self, key: &'static str) -> Result<Option<String>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(Error::Resolution(format!(
                "`{key}` must be a string, got {}",
                v.type_str()
            ))),
        }
    }

    fn req_string(&mut self, key: &'static str) -> Result<String> {
        self.string(key)?
            .ok_or_else(|| Error::Resolution(format!("missing parameter `{key}`")))
    }

    fn int(&mut self, key: &'static str) -> Result<Option<i64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(n)) => Ok(Some(*n)),
            Some(v) => Err(Error::Resolution(format!(
                "`{key}` must be an integer, got {}",
                v.type_str()
            ))),
        }
    }

    fn usize(&mut self, key: &'static str) -> Result<Option<usize>> {
        self.int(key)?
            .map(|n| usize::try_from(n).map_err(|_| Error::Resolution(format!("`{key}` must be nonnegative"))))
            .transpose()
    }

    fn small(&mut self, key: &'static str, default: i32, max: i32) -> Result<i32> {
        match self.int(key)? {
            None => Ok(default),
            Some(n) if (0..=max as i64).contains(&n) => Ok(n as i32),
            Some(n) => Err(Error::Resolution(format!("`{key}` = {n} is outside 0..={max}"))),
        }
    }

    fn bool(&mut self, key: &'static str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(Error::Resolution(format!(
                "`{key}` must be a boolean, got {}",
                v.type_str()
            ))),
        }
    }

    /// A rational given as an integer or as a string like `"2/3"`.
    fn scalar(&mut self, key: &'static str) -> Result<Option<Scalar>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(n)) => Ok(Some(Scalar::from_int(*n))),
            Some(Value::String(s)) => s
                .parse()
                .map(Some)
                .map_err(|_| Error::Resolution(format!("`{key}` = \"{s}\" is not a rational number"))),
            Some(v) => Err(Error::Resolution(format!(
                "`{key}` must be a rational, got {}",
                v.type_str()
            ))),
        }
    }

    fn req_scalar(&mut self, key: &'static str) -> Result<Scalar> {
        self.scalar(key)?
            .ok_or_else(|| Error::Resolution(format!("missing parameter `{key}`")))
    }

    fn window(&mut self) -> Result<Option<DegreeWindow>> {
        self.string("window")?
            .map(|s| s.parse().map_err(|e| Error::Resolution(format!("`window`: {e}"))))
            .transpose()
    }

    fn sheaf(&mut self, default: Option<Sheaf>) -> Result<Sheaf> {
        match (self.string("sheaf")?, default) {
            (Some(s), _) => s.parse(),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::Resolution("missing parameter `sheaf`".into())),
        }
    }

    fn finish(self) -> Result<()> {
        for k in self.table.keys() {
            if !self.used.contains(k.as_str()) {
                return Err(Error::Resolution(format!("unknown parameter `{k}`")));
            }
        }
        Ok(())
    }
}

fn need<'s, T>(map: &'s std::collections::BTreeMap<String, T>, what: &str, name: &str) -> Result<&'s T> {
    map.get(name)
        .ok_or_else(|| Error::Resolution(format!("undeclared {what} `{name}`")))
}

impl Task {
    pub(super) fn resolve(sc: &Scenario, index: usize, table: &Table) -> Result<Task> {
        let mut p = Params {
            table,
            used: BTreeSet::new(),
        };
        let op_name = p.req_string("op")?;
        let id = p.string("id")?.unwrap_or_else(|| format!("task-{}", index + 1));
        let ctx = |e: Error| match e {
            Error::Resolution(m) => Error::Resolution(format!("task `{id}` ({op_name}): {m}")),
            other => Error::Resolution(format!("task `{id}` ({op_name}): {other}")),
        };
        let op = Self::resolve_op(sc, &op_name, &mut p).map_err(ctx)?;
        p.finish().map_err(ctx)?;
        Ok(Task { id, op_name, op })
    }

    fn resolve_op(sc: &Scenario, op: &str, p: &mut Params<'_>) -> Result<Op> {
        let tangent = |n: String| -> Result<String> {
            if sc.tangent.contains_key(&n) {
                Ok(n)
            } else if sc.hyper.contains_key(&n) {
                Err(Error::Resolution(format!(
                    "`{n}` is a hyper-cocycle; a tangent cocycle is required"
                )))
            } else {
                Err(Error::Resolution(format!("undeclared cocycle `{n}`")))
            }
        };
        let higgs = || sc.require_higgs().map(|_| ());
        let hom = |n: String| need(&sc.homs, "hom", &n).map(|_| n);
        let connection = |n: String| need(&sc.connections, "connection", &n).map(|_| n);
        Ok(match op {
            "validate_higgs" => {
                higgs()?;
                Op::ValidateHiggs
            }
            "stratification" => {
                higgs()?;
                Op::Stratification
            }
            "cech_h1" | "cohomology" => {
                higgs()?;
                let sheaf = p.sheaf(None)?;
                let degree = if op == "cech_h1" {
                    1
                } else {
                    p.usize("degree")?
                        .ok_or_else(|| Error::Resolution("missing parameter `degree`".into()))?
                };
                Op::Cohomology {
                    sheaf,
                    degree,
                    window: p.window()?,
                    expect: p.usize("expect")?,
                }
            }
            "euler_characteristic" => {
                higgs()?;
                Op::EulerCharacteristic {
                    sheaf: p.sheaf(Some(Sheaf::Higgs))?,
                    window: p.window()?,
                    expect: p.int("expect")?,
                }
            }
            "ks_cocycle" => {
                higgs()?;
                Op::KsCocycle {
                    cocycle: tangent(p.req_string("cocycle")?)?,
                }
            }
            "check_conditions" | "build_deformation" => {
                higgs()?;
                let cocycle = sc.cocycle(&p.req_string("cocycle")?)?;
                if op == "check_conditions" {
                    Op::CheckConditions { cocycle }
                } else {
                    Op::BuildDeformation { cocycle }
                }
            }
            "is_hyper_coboundary" => {
                higgs()?;
                Op::IsHyperCoboundary {
                    cocycle: sc.cocycle(&p.req_string("cocycle")?)?,
                    window: p.window()?,
                    expect: p.bool("expect")?,
                }
            }
            "deformations_equivalent" => {
                higgs()?;
                Op::DeformationsEquivalent {
                    a: sc.cocycle(&p.req_string("a")?)?,
                    b: sc.cocycle(&p.req_string("b")?)?,
                    window: p.window()?,
                    expect: p.bool("expect")?,
                }
            }
            "gradedness" => {
                higgs()?;
                let cocycle = tangent(p.req_string("cocycle")?)?;
                let t = p.req_scalar("t")?;
                if t.is_zero() {
                    return Err(Error::Resolution("`t` must be nonzero".into()));
                }
                Op::Gradedness { cocycle, t }
            }
            "integrability" => {
                higgs()?;
                Op::Integrability {
                    a: tangent(p.req_string("a")?)?,
                    b: tangent(p.req_string("b")?)?,
                    window: p.window()?,
                }
            }
            "interpolate" => Op::Interpolate {
                f0: hom(p.req_string("f0")?)?,
                f1: hom(p.req_string("f1")?)?,
                lambda: p.req_scalar("lambda")?,
                samples: p.usize("samples")?.unwrap_or(20),
            },
            "transport" | "intertwining" => {
                let connection = connection(p.req_string("connection")?)?;
                let f0 = hom(p.req_string("f0")?)?;
                let f1 = hom(p.req_string("f1")?)?;
                if op == "transport" {
                    Op::Transport { connection, f0, f1 }
                } else {
                    Op::Intertwining { connection, f0, f1 }
                }
            }
            "triangle" => {
                let connection = connection(p.req_string("connection")?)?;
                let names = match p.get("homs") {
                    Some(Value::Array(a)) if a.len() == 6 => a
                        .iter()
                        .map(|v| match v {
                            Value::String(s) => hom(s.clone()),
                            _ => Err(Error::Resolution("`homs` must list six hom names".into())),
                        })
                        .collect::<Result<Vec<_>>>()?,
                    _ => return Err(Error::Resolution("`homs` must list six hom names".into())),
                };
                Op::Triangle {
                    connection,
                    homs: names.try_into().expect("six names"),
                }
            }
            "rees_roundtrip" => {
                let ring = p.req_string("ring")?;
                need(&sc.rings, "ring", &ring)?;
                Op::ReesRoundtrip {
                    ring,
                    bound: p.small("bound", 4, 16)?,
                    samples: p.usize("samples")?.unwrap_or(20),
                }
            }
            "gm_twist" => {
                let lambda = p.req_scalar("lambda")?;
                if lambda.is_zero() {
                    return Err(Error::Resolution("`lambda` must be nonzero".into()));
                }
                Op::GmTwist {
                    delta: hom(p.req_string("delta")?)?,
                    lambda,
                    bound: p.small("bound", 4, 16)?,
                }
            }
            other => {
                return Err(Error::Resolution(format!(
                    "unknown operation `{other}` (known: {})",
                    Op::NAMES.join(", ")
                )))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sheaf_names() {
        assert_eq!("O(-2)".parse::<Sheaf>().unwrap(), Sheaf::Line(-2));
        assert_eq!("higgs".parse::<Sheaf>().unwrap(), Sheaf::Higgs);
        assert!("O(x)".parse::<Sheaf>().is_err());
        for s in [
            Sheaf::Line(3),
            Sheaf::Bundle,
            Sheaf::End,
            Sheaf::EndOmega,
            Sheaf::Tangent,
            Sheaf::Higgs,
        ] {
            assert_eq!(s.to_string().parse::<Sheaf>().unwrap(), s);
        }
    }
}
