//! Runs the requested checks in dependency order and assembles the report.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::bicomplex::{self, Bicomplex};
use crate::check::{Outcome, Part};
use crate::definition::{CheckKind, FlowConfig, SystemDefinition};
use crate::expr::{Expr, SamplePoint};
use crate::flow::{conservation_drift, integrate, isospectral_drift, Drift, Trajectory};
use crate::lax::{self, LaxPair};
use crate::nijenhuis;
use crate::symcheck::{self, PhaseSystem, SystemError};

use super::report::{Artifacts, CheckReport, Named, Status, Timings, VerificationReport};

/// Pointwise tolerance for identities that go through a numeric root solve
/// or eigendecomposition.
pub const NUMERIC_TOL: f64 = 1e-8;
/// Largest drift accepted along an integrated trajectory.
pub const DRIFT_TOL: f64 = 1e-6;
/// Required energy-drift reduction when the step is halved.
pub const ORDER_FACTOR: f64 = 8.0;
pub const RANDOM_PAIRS: usize = 20;

pub struct Run {
    pub report: VerificationReport,
    pub timings: Timings,
}

/// Requested checks plus everything they depend on, with a warning for
/// each dependency that was not requested.
pub fn plan(requested: &[CheckKind]) -> (Vec<CheckKind>, Vec<String>) {
    let mut all: BTreeSet<CheckKind> = requested.iter().copied().collect();
    let mut warnings = Vec::new();
    let mut stack: Vec<CheckKind> = requested.to_vec();
    while let Some(k) = stack.pop() {
        for &p in k.prerequisites() {
            if all.insert(p) {
                stack.push(p);
            }
        }
    }
    for k in requested {
        for p in k.prerequisites() {
            if !requested.contains(p) {
                warnings.push(format!(
                    "{k} depends on {p}, which was not requested; running it first"
                ));
            }
        }
    }
    (all.into_iter().collect(), warnings)
}

struct Context<'a> {
    sys: &'a PhaseSystem,
    def: &'a SystemDefinition,
    ys: Option<Result<Vec<Expr>, String>>,
    lax: Option<LaxPair>,
    traces: Option<Vec<Expr>>,
    bicomplex: Option<Bicomplex<'a>>,
    artifacts: Artifacts,
}

impl<'a> Context<'a> {
    fn ys(&mut self) -> Result<Vec<Expr>, String> {
        let sys = self.sys;
        self.ys
            .get_or_insert_with(|| symcheck::conserved_quantities(sys).map_err(|e| e.to_string()))
            .clone()
    }

    fn lax(&mut self) -> &LaxPair {
        let sys = self.sys;
        self.lax.get_or_insert_with(|| lax::build_lax(sys))
    }

    fn traces(&mut self) -> Vec<Expr> {
        if self.traces.is_none() {
            let k = self.sys.dim();
            self.traces = Some(lax::lax_traces(self.lax(), k));
        }
        self.traces.clone().unwrap_or_default()
    }

    fn bicomplex(&mut self) -> &Bicomplex<'a> {
        let sys = self.sys;
        self.bicomplex.get_or_insert_with(|| Bicomplex::new(sys))
    }
}

fn merge(outcomes: impl IntoIterator<Item = Outcome>) -> Outcome {
    Outcome::from_parts(outcomes.into_iter().flat_map(|o| o.parts).collect())
}

fn failure(name: &str) -> Part {
    Part::scalar(name, f64::INFINITY, 0.0, None)
}

fn execute(kind: CheckKind, cx: &mut Context) -> Result<Outcome, String> {
    let sys = cx.sys;
    let chart = sys.chart();
    Ok(match kind {
        CheckKind::Symmetry => symcheck::check_symmetry(sys).outcome,
        CheckKind::NonNoether => symcheck::check_non_noether(sys),
        CheckKind::Conserved => {
            let ys = cx.ys()?;
            cx.artifacts.conserved = ys
                .iter()
                .enumerate()
                .map(|(k, y)| Named::new(format!("Y{}", k + 1), y.display(chart)))
                .collect();
            cx.artifacts.secular_polynomial = Some(symcheck::secular_polynomial_text(&ys, chart));
            let named: Vec<(String, Expr)> = ys
                .iter()
                .enumerate()
                .map(|(k, y)| (format!("Y{}", k + 1), y.clone()))
                .collect();
            merge([
                symcheck::check_conservation(sys, &named),
                symcheck::check_root_reconstruction(sys, &ys, NUMERIC_TOL),
            ])
        }
        CheckKind::Involution => symcheck::check_involutivity(sys, &cx.ys()?),
        CheckKind::YangBaxter => symcheck::check_yang_baxter(sys),
        CheckKind::Bihamiltonian => symcheck::check_bihamiltonian(sys, 5),
        CheckKind::Lax => lax_check(cx)?,
        CheckKind::Bicomplex => {
            cx.artifacts.d_tilde = cx
                .bicomplex()
                .table()
                .iter()
                .enumerate()
                .map(|(a, f)| Named::new(format!("d~{}", chart.name(a)), f.display(chart)))
                .collect();
            let forms = bicomplex::test_forms(sys, 3);
            let bc = cx.bicomplex();
            merge([
                bicomplex::check_bicomplex(bc, &forms),
                bicomplex::check_invariance(bc, &forms),
            ])
        }
        CheckKind::Lenard => {
            let traces = cx.traces();
            bicomplex::check_lenard(cx.bicomplex(), &traces)
        }
        CheckKind::Nijenhuis => {
            let r = nijenhuis::build_r_e(sys);
            let forms = nijenhuis::auxiliary_forms(sys, &r);
            cx.artifacts.r_e = Some(r.display(chart).to_string());
            cx.artifacts.omega = Some(forms.omega.display(chart).to_string());
            let l = cx.lax().l.clone();
            merge([
                nijenhuis::check_torsion(sys, &r, RANDOM_PAIRS),
                nijenhuis::check_transpose(sys, &r, RANDOM_PAIRS),
                nijenhuis::check_auxiliary(sys, &forms),
                nijenhuis::check_invariance(sys, &r, &l, 4),
            ])
        }
        CheckKind::Flow => {
            let cfg = cx
                .def
                .flow
                .clone()
                .ok_or("no [flow] settings in the definition")?;
            let ys = cx.ys().unwrap_or_default();
            let traces = cx.traces();
            let lp = cx.lax().clone();
            Outcome::from_parts(flow_parts(
                sys,
                &cfg,
                &ys,
                &traces[..traces.len().min(2)],
                &lp,
            )?)
        }
    })
}

fn lax_check(cx: &mut Context) -> Result<Outcome, String> {
    let sys = cx.sys;
    let chart = sys.chart();
    let traces = cx.traces();
    let lp = cx.lax().clone();
    cx.artifacts.lax_entries =
        lp.l.nonzero()
            .into_iter()
            .map(|(a, b, e)| Named::new(format!("L[{},{}]", a + 1, b + 1), e.display(chart)))
            .collect();
    cx.artifacts.traces = traces
        .iter()
        .enumerate()
        .map(|(k, t)| Named::new(format!("I{}", k + 1), t.display(chart)))
        .collect();
    let named: Vec<(String, Expr)> = traces
        .iter()
        .enumerate()
        .map(|(k, t)| (format!("I{}", k + 1), t.clone()))
        .collect();
    let mut outcomes = vec![
        lax::check_lax_equation(&lp, sys, lax::Commutator::LP),
        symcheck::check_conservation(sys, &named),
    ];
    let ys = cx.ys()?;
    match lax::spectral_multiplicity(sys, &lp, &ys) {
        Ok(m) => {
            cx.artifacts.spectral_multiplicity = Some(m);
            outcomes.push(lax::check_trace_roots(sys, &ys, &traces, m, NUMERIC_TOL));
            outcomes.push(lax::check_spectrum(sys, &lp, &ys, m, NUMERIC_TOL));
        }
        Err(e) => {
            outcomes.push(Outcome::from_parts(vec![failure(&format!(
                "spectral multiplicity: {e}"
            ))]));
        }
    }
    Ok(merge(outcomes))
}

fn drift_part(name: &str, d: Drift, traj: &Trajectory) -> Part {
    let witness = SamplePoint {
        coords: traj.states[d.step].clone(),
        time: traj.times[d.step],
    };
    Part::scalar(name, d.value, DRIFT_TOL, Some(witness))
}

/// Drifts of `h`, the given integrals and traces, and the spectrum of `L`
/// along one trajectory, and the energy-drift reduction when `dt` is halved.
pub fn flow_parts(
    sys: &PhaseSystem,
    cfg: &FlowConfig,
    ys: &[Expr],
    traces: &[Expr],
    lp: &LaxPair,
) -> Result<Vec<Part>, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let traj = integrate(sys, &cfg.z0, cfg.t_end, cfg.dt).map_err(|e| err(&e))?;
    let half = integrate(sys, &cfg.z0, cfg.t_end, cfg.dt / 2.0).map_err(|e| err(&e))?;
    let h_full = conservation_drift(&traj, sys.h()).map_err(|e| err(&e))?;
    let h_half = conservation_drift(&half, sys.h()).map_err(|e| err(&e))?;
    let mut parts = vec![drift_part("h drift", h_full, &traj)];
    for (k, y) in ys.iter().enumerate() {
        parts.push(drift_part(
            &format!("Y{} drift", k + 1),
            conservation_drift(&traj, y).map_err(|e| err(&e))?,
            &traj,
        ));
    }
    for (k, t) in traces.iter().enumerate() {
        parts.push(drift_part(
            &format!("I{} drift", k + 1),
            conservation_drift(&traj, t).map_err(|e| err(&e))?,
            &traj,
        ));
    }
    parts.push(drift_part(
        "spectrum of L drift",
        isospectral_drift(&traj, lp).map_err(|e| err(&e))?,
        &traj,
    ));
    let ratio = if h_half.value == 0.0 {
        0.0
    } else {
        h_half.value / h_full.value
    };
    parts.push(Part::scalar(
        "h drift(dt/2) / h drift(dt)",
        ratio,
        1.0 / ORDER_FACTOR,
        None,
    ));
    Ok(parts)
}

pub fn run(def: &SystemDefinition) -> Result<Run, SystemError> {
    let start = Instant::now();
    let sys = def.system()?;
    let (order, mut warnings) = plan(&def.checks);
    let mut cx = Context {
        sys: &sys,
        def,
        ys: None,
        lax: None,
        traces: None,
        bicomplex: None,
        artifacts: Artifacts {
            w_hat: sys.w_hat().display(sys.chart()).to_string(),
            ..Artifacts::default()
        },
    };
    let mut checks: Vec<CheckReport> = Vec::new();
    let mut timings = Timings::default();
    for kind in order {
        let requested = def.checks.contains(&kind);
        let blocked = kind.prerequisites().iter().find(|p| {
            checks
                .iter()
                .any(|c| c.check == **p && c.status != Status::Pass)
        });
        if let Some(p) = blocked {
            checks.push(CheckReport {
                check: kind,
                status: Status::Skipped,
                requested,
                outcome: None,
                note: Some(format!("skipped: {p} did not pass")),
            });
            continue;
        }
        let t0 = Instant::now();
        let report = match execute(kind, &mut cx) {
            Ok(o) => {
                let status = if o.passed { Status::Pass } else { Status::Fail };
                CheckReport {
                    check: kind,
                    status,
                    requested,
                    outcome: Some(o),
                    note: None,
                }
            }
            Err(e) => {
                warnings.push(format!("{kind}: {e}"));
                CheckReport {
                    check: kind,
                    status: Status::Fail,
                    requested,
                    outcome: None,
                    note: Some(e),
                }
            }
        };
        timings.checks.push((kind, t0.elapsed()));
        checks.push(report);
    }
    timings.total = start.elapsed();
    let passed = checks.iter().all(|c| c.status == Status::Pass);
    let report = VerificationReport {
        system: def.name.clone(),
        coordinates: sys.chart().names().to_vec(),
        sampling: def.sampling.clone(),
        passed,
        checks,
        artifacts: cx.artifacts,
        warnings,
    };
    Ok(Run { report, timings })
}
