//! Acceptance criteria for the built-in Toda sample. Prints one line per
//! criterion and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symgeom::bicomplex::{self, Bicomplex};
use symgeom::check::Outcome;
use symgeom::cli;
use symgeom::definition::{CheckKind, SystemDefinition};
use symgeom::expr::{is_zero_all, parse, Expr, Sampling};
use symgeom::flow::{conservation_drift, integrate, isospectral_drift};
use symgeom::lax::{build_lax, check_lax_equation, lax_traces, spectral_multiplicity, Commutator};
use symgeom::matrix::ExprMatrix;
use symgeom::multifield::{
    exterior_d, interior_product, lie_bracket, lie_derivative_form, phi_w, schouten, Field, Form,
    Kind, Multivector,
};
use symgeom::nijenhuis::{auxiliary_forms, build_r_e, check_auxiliary, check_torsion};
use symgeom::random;
use symgeom::symcheck::{
    check_involutivity, check_non_noether, check_root_reconstruction, check_symmetry,
    check_yang_baxter, conserved_quantities, PhaseSystem,
};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn toda() -> PhaseSystem {
    SystemDefinition::builtin("toda").unwrap().system().unwrap()
}

/// Named residuals checked against their bounds.
struct Tally {
    lines: Vec<String>,
    failed: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            lines: Vec::new(),
            failed: Vec::new(),
        }
    }

    fn residual(&mut self, name: &str, value: f64, bound: f64) {
        if value < bound {
            self.lines.push(format!("{name} {value:.1e}"));
        } else {
            self.failed
                .push(format!("{name} = {value:.3e} (bound {bound:.0e})"));
        }
    }

    fn outcome(&mut self, name: &str, o: &Outcome, bound: f64) {
        for p in &o.parts {
            self.residual(&format!("{name}/{}", p.name), p.max_residual, bound);
        }
    }

    fn require(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            self.lines.push(name.to_string());
        } else {
            self.failed.push(format!("{name}: {}", detail()));
        }
    }

    fn verdict(self) -> Verdict {
        if self.failed.is_empty() {
            Ok(format!("{} items", self.lines.len()))
        } else {
            Err(self.failed.join("; "))
        }
    }
}

fn matches(tally: &mut Tally, name: &str, got: &[Expr], want: &[Expr], sys: &PhaseSystem) {
    let diff: Vec<Expr> = got.iter().zip(want).map(|(a, b)| a - b).collect();
    let test = is_zero_all(&diff, sys.samples(), 1e-9);
    tally.require(name, got.len() == want.len() && test.passed, || {
        format!("residual {:.3e}", test.max_residual)
    });
}

fn sample_reproduction() -> Verdict {
    let start = Instant::now();
    let mut def = SystemDefinition::builtin("toda").unwrap();
    def.checks.retain(|c| *c != CheckKind::Flow);
    let run = cli::run(&def).map_err(|e| e.to_string())?;
    let sys = def.system().unwrap();
    let e = |s: &str| parse(s, sys.chart()).unwrap();
    let mut l = Tally::new();
    l.require("symbolic checks pass", run.report.passed, || {
        format!("{:?}", run.report.checks)
    });

    let w_hat = Multivector::from_terms(
        4,
        2,
        [
            (vec![0, 2], e("z1")),
            (vec![1, 3], e("z2")),
            (vec![0, 1], e("exp(z3 - z4)")),
            (vec![2, 3], e("1")),
        ],
    );
    matches(
        &mut l,
        "W_hat",
        &sys.w_hat().coefficients(),
        &w_hat.coefficients(),
        &sys,
    );
    let ys = conserved_quantities(&sys).map_err(|e| e.to_string())?;
    matches(
        &mut l,
        "Y",
        &ys,
        &[e("(z1 + z2)/2"), e("z1*z2 - exp(z3 - z4)")],
        &sys,
    );

    let lp = build_lax(&sys);
    let entries = [
        (0, 0, "z1"),
        (2, 2, "z1"),
        (1, 1, "z2"),
        (3, 3, "z2"),
        (2, 1, "exp(z3 - z4)"),
        (3, 0, "-exp(z3 - z4)"),
        (1, 2, "1"),
        (0, 3, "-1"),
    ];
    let expected = ExprMatrix::from_fn(4, |a, b| {
        entries
            .iter()
            .find(|t| (t.0, t.1) == (a, b))
            .map_or(Expr::zero(), |t| e(t.2))
    });
    matches(
        &mut l,
        "L entries",
        lp.l.entries(),
        expected.entries(),
        &sys,
    );
    l.require(
        "L has eight nonzero entries",
        lp.l.nonzero().len() == 8,
        || format!("{}", lp.l.nonzero().len()),
    );
    let traces = lax_traces(&lp, 2);
    matches(
        &mut l,
        "I",
        &traces,
        &[e("2*(z1 + z2)"), e("2*z1^2 + 2*z2^2 + 4*exp(z3 - z4)")],
        &sys,
    );

    let bc = Bicomplex::new(&sys);
    let one_form = |c: [&str; 4]| Form::from_components(c.iter().map(|s| e(s)).collect());
    let table = [
        one_form(["z1", "0", "0", "-exp(z3 - z4)"]),
        one_form(["0", "z2", "exp(z3 - z4)", "0"]),
        one_form(["0", "1", "z1", "0"]),
        one_form(["-1", "0", "0", "z2"]),
    ];
    let got: Vec<Expr> = bc.table().iter().flat_map(|f| f.components()).collect();
    let want: Vec<Expr> = table.iter().flat_map(|f| f.components()).collect();
    matches(&mut l, "d~ table", &got, &want, &sys);

    let r = build_r_e(&sys);
    let r_terms = [
        (0, 0, "z1"),
        (0, 3, "-1"),
        (1, 1, "z2"),
        (1, 2, "1"),
        (2, 2, "z1"),
        (2, 1, "exp(z3 - z4)"),
        (3, 3, "z2"),
        (3, 0, "-exp(z3 - z4)"),
    ];
    let r_expected = ExprMatrix::from_fn(4, |a, b| {
        r_terms
            .iter()
            .find(|t| (t.0, t.1) == (a, b))
            .map_or(Expr::zero(), |t| e(t.2))
    });
    matches(
        &mut l,
        "R_E",
        r.matrix().entries(),
        r_expected.entries(),
        &sys,
    );

    let elapsed = start.elapsed();
    l.require("runtime < 10 s", elapsed < Duration::from_secs(10), || {
        format!("{elapsed:?}")
    });
    l.verdict()
        .map(|s| format!("{s}, {:.2} s", elapsed.as_secs_f64()))
}

fn identity_suite() -> Verdict {
    let sys = toda();
    let tol = 1e-9;
    let mut l = Tally::new();
    let ww = is_zero_all(
        &schouten(sys.w(), sys.w()).coefficients(),
        sys.samples(),
        tol,
    );
    l.residual("[W,W]", ww.max_residual, tol);
    l.outcome("symmetry", &check_symmetry(&sys).outcome, tol);
    l.outcome("yang-baxter", &check_yang_baxter(&sys), tol);
    let bc = Bicomplex::new(&sys);
    let o = bicomplex::check_bicomplex(&bc, &bicomplex::test_forms(&sys, 3));
    for name in ["d^2", "d~^2", "d d~ + d~ d"] {
        l.residual(
            name,
            o.part(name).map_or(f64::INFINITY, |p| p.max_residual),
            tol,
        );
    }
    let r = build_r_e(&sys);
    let aux = check_auxiliary(&sys, &auxiliary_forms(&sys, &r));
    for name in ["d omega", "d omega*", "d omega**"] {
        l.residual(
            name,
            aux.part(name).map_or(f64::INFINITY, |p| p.max_residual),
            tol,
        );
    }
    let torsion = check_torsion(&sys, &r, 20);
    for name in ["T(d_a, d_b)", "T(X, Y)"] {
        l.residual(
            name,
            torsion.part(name).map_or(f64::INFINITY, |p| p.max_residual),
            tol,
        );
    }
    l.verdict()
}

fn involutivity() -> Verdict {
    let sys = toda();
    let ys = conserved_quantities(&sys).map_err(|e| e.to_string())?;
    let mut l = Tally::new();
    l.outcome("involution", &check_involutivity(&sys, &ys), 1e-9);
    l.verdict()
}

fn cross_oracles() -> Verdict {
    let sys = toda();
    let ys = conserved_quantities(&sys).map_err(|e| e.to_string())?;
    let lp = build_lax(&sys);
    let traces = lax_traces(&lp, 4);
    let mut l = Tally::new();
    l.outcome(
        "reconstruction",
        &check_root_reconstruction(&sys, &ys, 1e-8),
        1e-8,
    );
    let m = spectral_multiplicity(&sys, &lp, &ys)?;
    l.outcome(
        "traces",
        &symgeom::lax::check_trace_roots(&sys, &ys, &traces, m, 1e-8),
        1e-8,
    );
    l.outcome(
        "lenard",
        &bicomplex::check_lenard(&Bicomplex::new(&sys), &traces[..2]),
        1e-9,
    );
    l.verdict().map(|s| format!("{s}, multiplicity {m}"))
}

fn dynamics() -> Verdict {
    let start = Instant::now();
    let sys = toda();
    let z0 = [1.0, -1.0, 0.0, 0.0];
    let traj = integrate(&sys, &z0, 10.0, 1e-3).map_err(|e| e.to_string())?;
    let half = integrate(&sys, &z0, 10.0, 5e-4).map_err(|e| e.to_string())?;
    let ys = conserved_quantities(&sys).map_err(|e| e.to_string())?;
    let lp = build_lax(&sys);
    let traces = lax_traces(&lp, 2);
    let mut l = Tally::new();
    let drift = |q: &Expr| {
        conservation_drift(&traj, q)
            .map(|d| d.value)
            .unwrap_or(f64::INFINITY)
    };
    let h_drift = drift(sys.h());
    l.residual("h", h_drift, 1e-6);
    l.residual("Y1", drift(&ys[0]), 1e-6);
    l.residual("Y2", drift(&ys[1]), 1e-6);
    l.residual("Tr L", drift(&traces[0]), 1e-6);
    l.residual("Tr L^2", drift(&traces[1]), 1e-6);
    l.residual(
        "spectrum",
        isospectral_drift(&traj, &lp)
            .map(|d| d.value)
            .unwrap_or(f64::INFINITY),
        1e-6,
    );
    let h_half = conservation_drift(&half, sys.h())
        .map(|d| d.value)
        .unwrap_or(f64::INFINITY);
    let reduction = h_drift / h_half;
    l.require(
        "h drift reduction >= 8 when dt is halved",
        reduction >= 8.0,
        || format!("{h_drift:.3e} -> {h_half:.3e}, factor {reduction:.2}"),
    );
    let elapsed = start.elapsed();
    l.require("runtime < 30 s", elapsed < Duration::from_secs(30), || {
        format!("{elapsed:?}")
    });
    l.verdict().map(|s| {
        format!(
            "{s}, h drift {h_drift:.1e}, reduction {reduction:.1}x, {:.2} s",
            elapsed.as_secs_f64()
        )
    })
}

fn negative_controls() -> Verdict {
    let sys = toda();
    let mut l = Tally::new();
    let zero = sys
        .with_generator(Multivector::zero(4, 1))
        .map_err(|e| e.to_string())?;
    l.require(
        "E = 0 fails non_noether",
        !check_non_noether(&zero).passed,
        || "passed".into(),
    );
    let quad = Multivector::from_components(vec![
        parse("z1^2", sys.chart()).unwrap(),
        Expr::zero(),
        Expr::zero(),
        Expr::zero(),
    ]);
    let quad = sys.with_generator(quad).map_err(|e| e.to_string())?;
    let s = check_symmetry(&quad).outcome;
    l.require(
        "E = z1^2 d/dz1 fails symmetry with a witness",
        !s.passed && s.witness.is_some() && s.max_residual > 0.0,
        || format!("{s:?}"),
    );
    let flipped = check_lax_equation(&build_lax(&sys), &sys, Commutator::PL);
    l.require("flipped Lax commutator fails", !flipped.passed, || {
        "passed".into()
    });
    l.verdict()
}

const INSTANCES: usize = 50;
const DIM: usize = 4;

fn gen<K: Kind>(r: &mut ChaCha8Rng, degree: usize) -> Field<K> {
    random::field(r, DIM, degree, 0.5, 2)
}

fn sign(odd: usize) -> Expr {
    Expr::int(if odd % 2 == 1 { -1 } else { 1 })
}

fn property<F, K: Kind>(l: &mut Tally, name: &str, seed: u64, mut residual: F)
where
    F: FnMut(&mut ChaCha8Rng, usize) -> Field<K>,
{
    let samples = Sampling::new(DIM).points();
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..INSTANCES {
        let f = residual(&mut r, i);
        worst = worst.max(is_zero_all(&f.coefficients(), &samples, 1e-8).max_residual);
    }
    l.residual(name, worst, 1e-8);
}

fn property_suite() -> Verdict {
    let mut l = Tally::new();
    property(&mut l, "graded antisymmetry", 1, |r, i| {
        let (p, q) = (1 + i % 3, i / 3 % 3);
        let (a, b): (Multivector, Multivector) = (gen(r, p), gen(r, q));
        schouten(&a, &b) - schouten(&b, &a).scale(&sign((p + 1) * (q + 1) + 1))
    });
    property(&mut l, "Leibniz", 2, |r, i| {
        let (p, q, s) = (1 + i % 2, i / 2 % 2, i / 4 % 2);
        let (a, b, c): (Multivector, Multivector, Multivector) = (gen(r, p), gen(r, q), gen(r, s));
        schouten(&a, &b.wedge(&c))
            - schouten(&a, &b).wedge(&c)
            - b.wedge(&schouten(&a, &c)).scale(&sign((p - 1) * q))
    });
    property(&mut l, "Jacobi", 3, |r, i| {
        let (p, q, s) = (1 + i % 2, 1 + i / 2 % 2, 1 + i / 4 % 2);
        let (a, b, c): (Multivector, Multivector, Multivector) = (gen(r, p), gen(r, q), gen(r, s));
        schouten(&a, &schouten(&b, &c)).scale(&sign((p - 1) * (s - 1)))
            + schouten(&b, &schouten(&c, &a)).scale(&sign((q - 1) * (p - 1)))
            + schouten(&c, &schouten(&a, &b)).scale(&sign((s - 1) * (q - 1)))
    });
    property(&mut l, "wedge associativity", 4, |r, i| {
        let (a, b, c): (Form, Form, Form) = (gen(r, i % 3), gen(r, i / 3 % 2), gen(r, 1));
        a.wedge(&b).wedge(&c) - a.wedge(&b.wedge(&c))
    });
    property(&mut l, "Phi_W homomorphism", 5, |r, i| {
        let w: Multivector = gen(r, 2);
        let (u, v): (Form, Form) = (gen(r, i % 3), gen(r, i / 3 % 3));
        phi_w(&w, &u.wedge(&v)) - phi_w(&w, &u).wedge(&phi_w(&w, &v))
    });
    property(&mut l, "d nilpotency", 6, |r, i| {
        let u: Form = gen(r, i % 3);
        exterior_d(&exterior_d(&u))
    });
    property(&mut l, "interior/Lie identity", 7, |r, i| {
        let (x, y): (Multivector, Multivector) = (gen(r, 1), gen(r, 1));
        let u: Form = gen(r, 1 + i % 3);
        lie_derivative_form(&x, &interior_product(&y, &u))
            - interior_product(&y, &lie_derivative_form(&x, &u))
            - interior_product(&lie_bracket(&x, &y), &u)
    });
    l.verdict()
        .map(|s| format!("{s}, {INSTANCES} instances each"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("sample reproduction", sample_reproduction),
        ("identity suite", identity_suite),
        ("involutivity", involutivity),
        ("cross-oracles", cross_oracles),
        ("dynamics", dynamics),
        ("negative controls", negative_controls),
        ("property suite", property_suite),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
