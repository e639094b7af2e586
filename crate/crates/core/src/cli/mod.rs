//! Command-line front end: `verify`, `demo` and `flow`.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails or a
//! trajectory diverges, 2 for unreadable or invalid input.

mod pipeline;
mod report;

use std::io::{IsTerminal, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::definition::{validate_flow, validate_sampling, FlowConfig, SystemDefinition};
use crate::flow::{conservation_drift, integrate, isospectral_drift};
use crate::lax::{build_lax, lax_traces};
use crate::symcheck::conserved_quantities;

pub use pipeline::{flow_parts, plan, run, Run, DRIFT_TOL, NUMERIC_TOL, ORDER_FACTOR};
pub use report::{render_text, Artifacts, CheckReport, Named, Status, Timings, VerificationReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "symgeom",
    version,
    about = "Verify the geometry induced by a non-Noether symmetry"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the checks listed in a system definition file.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        opts: ReportOpts,
    },
    /// Run a built-in system.
    Demo {
        #[arg(value_parser = ["toda"])]
        system: String,
        #[command(flatten)]
        opts: ReportOpts,
    },
    /// Integrate Hamilton's equations and report drifts.
    Flow {
        file: PathBuf,
        /// Initial point, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        z0: Option<Vec<f64>>,
        /// Time horizon.
        #[arg(long = "T")]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Write the trajectory to stdout; the summary goes to stderr.
        #[arg(long, value_enum)]
        dump: Option<Dump>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ReportOpts {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub report: Format,
    /// Number of sample points.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dump {
    Csv,
}

fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stdout().is_terminal()
}

fn apply_overrides(def: &mut SystemDefinition, opts: &ReportOpts) -> Result<(), String> {
    if let Some(n) = opts.points {
        def.sampling.count = n;
    }
    if let Some(s) = opts.seed {
        def.sampling.seed = s;
    }
    if let Some(t) = opts.tol {
        def.sampling.tol = t;
    }
    validate_sampling(&def.sampling, def.chart.dim()).map_err(|e| e.to_string())
}

fn verify(
    mut def: SystemDefinition,
    opts: &ReportOpts,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if let Err(e) = apply_overrides(&mut def, opts) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INPUT;
    }
    let run = match run(&def) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let text = match opts.report {
        Format::Json => run.report.to_json() + "\n",
        Format::Text => render_text(&run.report, Some(&run.timings), color_enabled()),
    };
    let _ = out.write_all(text.as_bytes());
    if run.report.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn flow(
    def: SystemDefinition,
    z0: Option<Vec<f64>>,
    t_end: Option<f64>,
    dt: Option<f64>,
    dump: Option<Dump>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let base = def.flow.clone();
    let cfg = match (
        z0.or(base.as_ref().map(|f| f.z0.clone())),
        t_end.or(base.as_ref().map(|f| f.t_end)),
        dt.or(base.as_ref().map(|f| f.dt)),
    ) {
        (Some(z0), Some(t_end), Some(dt)) => FlowConfig { z0, t_end, dt },
        _ => {
            let _ = writeln!(
                err,
                "error: --z0, --T and --dt are required when the file has no [flow] section"
            );
            return EXIT_INPUT;
        }
    };
    if let Err(e) = validate_flow(&cfg, def.chart.dim()) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INPUT;
    }
    let sys = match def.system() {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let traj = match integrate(&sys, &cfg.z0, cfg.t_end, cfg.dt) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_FAIL;
        }
    };
    let (summary, data): (&mut dyn Write, bool) = match dump {
        Some(Dump::Csv) => (err, true),
        None => (out, false),
    };
    let _ = writeln!(
        summary,
        "{} steps of {} with dt = {:e}, T = {}",
        traj.len() - 1,
        traj.integrator(),
        cfg.dt,
        cfg.t_end
    );
    let names = sys.chart().names();
    let last: Vec<String> = names
        .iter()
        .zip(traj.last())
        .map(|(n, v)| format!("{n}={v:.10}"))
        .collect();
    let _ = writeln!(summary, "final state: {}", last.join(", "));
    let mut observables = vec![("h".to_string(), sys.h().clone())];
    if let Ok(ys) = conserved_quantities(&sys) {
        observables.extend(
            ys.into_iter()
                .enumerate()
                .map(|(k, y)| (format!("Y{}", k + 1), y)),
        );
    }
    let lp = build_lax(&sys);
    observables.extend(
        lax_traces(&lp, 2)
            .into_iter()
            .enumerate()
            .map(|(k, t)| (format!("I{}", k + 1), t)),
    );
    for (name, q) in &observables {
        match conservation_drift(&traj, q) {
            Ok(d) => {
                let _ = writeln!(summary, "drift {name}: {:.3e}", d.value);
            }
            Err(e) => {
                let _ = writeln!(summary, "drift {name}: not evaluable ({e})");
            }
        }
    }
    if let Ok(d) = isospectral_drift(&traj, &lp) {
        let _ = writeln!(summary, "drift spectrum of L: {:.3e}", d.value);
    }
    if data && traj.write_csv(names, &mut *out).is_err() {
        return EXIT_FAIL;
    }
    EXIT_PASS
}

/// Runs a parsed command line, writing to the given streams.
pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let load = |path: &PathBuf| SystemDefinition::load(path);
    match cli.command {
        Command::Verify { file, opts } => match load(&file) {
            Ok(def) => verify(def, &opts, out, err),
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", file.display());
                EXIT_INPUT
            }
        },
        Command::Demo { system, opts } => match SystemDefinition::builtin(&system) {
            Ok(def) => verify(def, &opts, out, err),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_INPUT
            }
        },
        Command::Flow {
            file,
            z0,
            t_end,
            dt,
            dump,
        } => match load(&file) {
            Ok(def) => flow(def, z0, t_end, dt, dump, out, err),
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", file.display());
                EXIT_INPUT
            }
        },
    }
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    execute(cli, &mut stdout.lock(), &mut stderr.lock())
}
