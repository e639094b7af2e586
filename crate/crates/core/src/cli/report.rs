//! Verification report: data model and text/JSON rendering.

use std::fmt::Write;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::check::Outcome;
use crate::definition::CheckKind;
use crate::expr::{SamplePoint, Sampling};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        }
    }

    fn color(self) -> &'static str {
        match self {
            Status::Pass => "\x1b[32m",
            Status::Fail => "\x1b[31m",
            Status::Skipped => "\x1b[33m",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: CheckKind,
    pub status: Status,
    /// False when the check only ran as a prerequisite of a requested one.
    pub requested: bool,
    pub outcome: Option<Outcome>,
    pub note: Option<String>,
}

impl CheckReport {
    pub fn max_residual(&self) -> Option<f64> {
        self.outcome.as_ref().map(|o| o.max_residual)
    }

    pub fn witness(&self) -> Option<&SamplePoint> {
        self.outcome.as_ref().and_then(|o| o.witness.as_ref())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Named {
    pub name: String,
    pub value: String,
}

impl Named {
    pub fn new(name: impl Into<String>, value: impl ToString) -> Self {
        Named {
            name: name.into(),
            value: value.to_string(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    pub w_hat: String,
    pub conserved: Vec<Named>,
    pub secular_polynomial: Option<String>,
    pub lax_entries: Vec<Named>,
    pub spectral_multiplicity: Option<usize>,
    pub traces: Vec<Named>,
    pub d_tilde: Vec<Named>,
    pub r_e: Option<String>,
    /// `ω = Φ_W^{-1}(W)`, normalized so that `Φ_W(ω) = W`.
    pub omega: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub system: String,
    pub coordinates: Vec<String>,
    pub sampling: Sampling,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
    pub artifacts: Artifacts,
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn check(&self, kind: CheckKind) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.check == kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Wall-clock time per check. Kept out of the report so that JSON output
/// depends only on the input and the seed.
#[derive(Clone, Debug, Default)]
pub struct Timings {
    pub checks: Vec<(CheckKind, Duration)>,
    pub total: Duration,
}

fn witness_text(w: &SamplePoint, names: &[String]) -> String {
    let mut s: Vec<String> = names
        .iter()
        .zip(&w.coords)
        .map(|(n, v)| format!("{n}={v:.6}"))
        .collect();
    s.push(format!("t={:.6}", w.time));
    s.join(", ")
}

fn paint(text: &str, code: &str, color: bool) -> String {
    if color {
        format!("{code}{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

pub fn render_text(report: &VerificationReport, timings: Option<&Timings>, color: bool) -> String {
    let mut out = String::new();
    let s = &report.sampling;
    let _ = writeln!(
        out,
        "system {} ({})",
        report.system,
        report.coordinates.join(", ")
    );
    let _ = writeln!(
        out,
        "sampling: {} points, seed {}, tol {:e}",
        s.count, s.seed, s.tol
    );
    out.push('\n');
    let width = CheckKind::ALL
        .iter()
        .map(|k| k.name().len())
        .max()
        .unwrap_or(0);
    for c in &report.checks {
        let label = paint(c.status.label(), c.status.color(), color);
        let mut line = format!("{label}  {:<width$}", c.check.name());
        if let Some(r) = c.max_residual() {
            let _ = write!(line, "  max residual {r:.3e}");
        }
        if let Some((_, d)) = timings.and_then(|t| t.checks.iter().find(|(k, _)| *k == c.check)) {
            let _ = write!(line, "  ({:.1} ms)", d.as_secs_f64() * 1e3);
        }
        if !c.requested {
            line.push_str("  [prerequisite]");
        }
        let _ = writeln!(out, "{}", line.trim_end());
        if let Some(note) = &c.note {
            let _ = writeln!(out, "      {note}");
        }
        if let Some(o) = &c.outcome {
            for p in &o.parts {
                let mark = if p.passed { "ok  " } else { "FAIL" };
                let _ = writeln!(out, "      {mark} {}  {:.3e}", p.name, p.max_residual);
                if !p.passed {
                    if let Some(w) = &p.witness {
                        let _ = writeln!(
                            out,
                            "           at {}",
                            witness_text(w, &report.coordinates)
                        );
                    }
                }
            }
        }
    }
    let a = &report.artifacts;
    out.push_str("\nartifacts\n");
    let _ = writeln!(out, "  W_hat = {}", a.w_hat);
    let groups = [&a.conserved, &a.lax_entries, &a.traces, &a.d_tilde];
    for (i, group) in groups.iter().enumerate() {
        for n in group.iter() {
            let _ = writeln!(out, "  {} = {}", n.name, n.value);
        }
        if i == 0 {
            if let Some(p) = &a.secular_polynomial {
                let _ = writeln!(out, "  secular polynomial: {p}");
            }
        }
        if i == 1 {
            if let Some(m) = a.spectral_multiplicity {
                let _ = writeln!(out, "  spectral multiplicity = {m}");
            }
        }
    }
    if let Some(r) = &a.r_e {
        let _ = writeln!(out, "  R_E = {r}");
    }
    if let Some(w) = &a.omega {
        let _ = writeln!(out, "  omega = {w}   (Phi_W(omega) = W)");
    }
    if !report.warnings.is_empty() {
        out.push_str("\nwarnings\n");
        for w in &report.warnings {
            let _ = writeln!(out, "  {w}");
        }
    }
    let count = |s: Status| report.checks.iter().filter(|c| c.status == s).count();
    let _ = write!(
        out,
        "\n{} passed, {} failed, {} skipped",
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Skipped)
    );
    if let Some(t) = timings {
        let _ = write!(out, " in {:.2} s", t.total.as_secs_f64());
    }
    out.push('\n');
    out
}
