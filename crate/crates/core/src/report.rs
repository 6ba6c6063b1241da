//! Task reports in text and structured form.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskRecord {
    pub id: String,
    pub op: String,
    pub status: Status,
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl TaskRecord {
    pub fn new(id: impl Into<String>, op: impl Into<String>) -> Self {
        TaskRecord {
            id: id.into(),
            op: op.into(),
            status: Status::Pass,
            values: BTreeMap::new(),
            message: None,
            elapsed: Duration::ZERO,
        }
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.values.insert(key.to_string(), v.into());
        self
    }

    pub fn fail(&mut self, msg: impl Into<String>) -> &mut Self {
        self.status = Status::Fail;
        self.message = Some(msg.into());
        self
    }

    pub fn error(&mut self, msg: impl Into<String>) -> &mut Self {
        self.status = Status::Error;
        self.message = Some(msg.into());
        self
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub format_version: u32,
    pub source: String,
    pub seed: u64,
    pub tasks: Vec<TaskRecord>,
}

impl Report {
    pub fn new(source: impl Into<String>, seed: u64) -> Self {
        Report {
            format_version: FORMAT_VERSION,
            source: source.into(),
            seed,
            tasks: Vec::new(),
        }
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for t in &self.tasks {
            match t.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Error => s.error += 1,
            }
        }
        s
    }

    pub fn all_passed(&self) -> bool {
        self.tasks.iter().all(|t| t.status == Status::Pass)
    }

    /// Exit status: 0 when every task passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_text(&self, timing: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} (seed {})", self.source, self.seed);
        for t in &self.tasks {
            let _ = write!(out, "  [{}] {} {}", t.status.as_str(), t.id, t.op);
            if timing {
                let _ = write!(out, " ({:.3}s)", t.elapsed.as_secs_f64());
            }
            out.push('\n');
            for (k, v) in &t.values {
                let shown = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                let _ = writeln!(out, "      {k}: {shown}");
            }
            if let Some(m) = &t.message {
                let _ = writeln!(
                    out,
                    "      {}: {m}",
                    if t.status == Status::Pass { "note" } else { "witness" }
                );
            }
        }
        let s = self.summary();
        let _ = writeln!(out, "  summary: {} pass, {} fail, {} error", s.pass, s.fail, s.error);
        out
    }

    /// JSON with sorted keys; timings are left out so that equal inputs
    /// give equal bytes.
    pub fn to_structured(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            report: &'a Report,
            summary: Summary,
        }
        let mut s = serde_json::to_string_pretty(&Out {
            report: self,
            summary: self.summary(),
        })
        .expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_output_has_no_timing() {
        let mut r = Report::new("demo", 3);
        let mut t = TaskRecord::new("1", "noop");
        t.value("dim", 2).elapsed = Duration::from_millis(17);
        r.tasks.push(t);
        let s = r.to_structured();
        assert!(!s.contains("elapsed"));
        assert!(s.contains("\"status\": \"pass\""));
        assert_eq!(r.exit_code(), 0);
        r.tasks[0].fail("bad");
        assert_eq!(r.exit_code(), 1);
        assert!(r.to_text(false).contains("witness: bad"));
    }
}
