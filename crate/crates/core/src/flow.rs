//! Fixed-step RK4 integration of Hamilton's equations `ż = X_h(z, t)` and
//! drift measurements along the resulting trajectory.

use std::io::Write;

use nalgebra::Complex;
use thiserror::Error;

use crate::expr::{EvalError, EvalErrorKind, Expr};
use crate::lax::{spectrum, LaxPair};
use crate::symcheck::PhaseSystem;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("invalid step or horizon: dt = {dt}, T = {t_end}")]
    Step { dt: f64, t_end: f64 },
    #[error("initial point has {actual} coordinates, expected {expected}")]
    Dimension { expected: usize, actual: usize },
    #[error("non-finite state at t = {time} (step {step}): {state:?}")]
    Diverged {
        step: usize,
        time: f64,
        state: Vec<f64>,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn integrator(&self) -> &'static str {
        "rk4"
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// CSV with header `t,<coordinate names>`.
    pub fn write_csv<W: Write>(&self, names: &[String], mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,{}", names.join(","))?;
        for (t, z) in self.times.iter().zip(&self.states) {
            let row: Vec<String> = z.iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{t:e},{}", row.join(","))?;
        }
        Ok(())
    }
}

fn field(rhs: &[Expr], z: &[f64], t: f64, out: &mut [f64]) -> Result<(), EvalError> {
    for (o, e) in out.iter_mut().zip(rhs) {
        *o = e.eval(z, t)?;
    }
    Ok(())
}

fn axpy(z: &[f64], k: &[f64], h: f64) -> Vec<f64> {
    z.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// `floor(T/dt) + 1` states on the grid `t_k = k dt`.
pub fn integrate(
    sys: &PhaseSystem,
    z0: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, FlowError> {
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(FlowError::Step { dt, t_end });
    }
    let n = sys.dim();
    if z0.len() != n {
        return Err(FlowError::Dimension {
            expected: n,
            actual: z0.len(),
        });
    }
    let rhs = sys.x_h().components();
    let steps = (t_end / dt + 1e-9).floor() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut z = z0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    // compensated summation of the increments
    let mut carry = vec![0.0; n];
    times.push(0.0);
    states.push(z.clone());
    for step in 1..=steps {
        let t = (step - 1) as f64 * dt;
        let stages = field(&rhs, &z, t, &mut k1)
            .and_then(|_| field(&rhs, &axpy(&z, &k1, dt / 2.0), t + dt / 2.0, &mut k2))
            .and_then(|_| field(&rhs, &axpy(&z, &k2, dt / 2.0), t + dt / 2.0, &mut k3))
            .and_then(|_| field(&rhs, &axpy(&z, &k3, dt), t + dt, &mut k4));
        match stages {
            Err(e) if e.kind == EvalErrorKind::NonFinite => {
                return Err(FlowError::Diverged {
                    step,
                    time: t,
                    state: z,
                });
            }
            other => other?,
        }
        for i in 0..n {
            let inc = dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) - carry[i];
            let next = z[i] + inc;
            carry[i] = (next - z[i]) - inc;
            z[i] = next;
        }
        let time = step as f64 * dt;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(FlowError::Diverged {
                step,
                time,
                state: z,
            });
        }
        times.push(time);
        states.push(z.clone());
    }
    Ok(Trajectory { dt, times, states })
}

/// Largest deviation along a trajectory and the grid index where it occurs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Drift {
    pub value: f64,
    pub step: usize,
}

impl Drift {
    fn record(&mut self, value: f64, step: usize) {
        if value > self.value || value.is_nan() {
            *self = Drift { value, step };
        }
    }
}

/// `max_t |q(z(t), t) − q(z0, 0)|`.
pub fn conservation_drift(traj: &Trajectory, q: &Expr) -> Result<Drift, EvalError> {
    let q0 = q.eval(&traj.states[0], traj.times[0])?;
    let mut worst = Drift {
        value: 0.0,
        step: 0,
    };
    for (i, (t, z)) in traj.times.iter().zip(&traj.states).enumerate() {
        worst.record((q.eval(z, *t)? - q0).abs(), i);
    }
    Ok(worst)
}

/// Largest displacement of the sorted spectrum of `L` from its initial value.
pub fn isospectral_drift(traj: &Trajectory, lp: &LaxPair) -> Result<Drift, EvalError> {
    let first = spectrum(&lp.l, &traj.states[0], traj.times[0])?;
    let mut worst = Drift {
        value: 0.0,
        step: 0,
    };
    for (i, (t, z)) in traj.times.iter().zip(&traj.states).enumerate() {
        let ev = spectrum(&lp.l, z, *t)?;
        let d = ev
            .iter()
            .zip(&first)
            .map(|(a, b): (&Complex<f64>, _)| (a - b).norm())
            .fold(0.0, f64::max);
        worst.record(d, i);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definition::SystemDefinition;
    use crate::expr::parse;
    use crate::lax::build_lax;
    use crate::multifield::Multivector;

    fn toda() -> PhaseSystem {
        SystemDefinition::builtin("toda").unwrap().system().unwrap()
    }

    #[test]
    fn grid_and_energy() {
        let sys = toda();
        let traj = integrate(&sys, &[1.0, -1.0, 0.0, 0.0], 1.0, 0.01).unwrap();
        assert_eq!(traj.len(), 101);
        assert!((traj.times[100] - 1.0).abs() < 1e-12);
        assert!(conservation_drift(&traj, sys.h()).unwrap().value < 1e-9);
        assert_eq!(conservation_drift(&traj, &Expr::int(3)).unwrap().value, 0.0);
        assert!(conservation_drift(&traj, &Expr::coord(0)).unwrap().value > 1e-2);
        assert!(isospectral_drift(&traj, &build_lax(&sys)).unwrap().value < 1e-8);
    }

    #[test]
    fn hamilton_equations_direction() {
        // h = z1^2/2 with z3 conjugate to z1: z3 moves with velocity z1
        let sys = toda();
        let h = parse("z1^2/2", sys.chart()).unwrap();
        let free = crate::symcheck::PhaseSystem::new(
            sys.chart().clone(),
            sys.w().clone(),
            h,
            Multivector::zero(4, 1),
            &crate::expr::Sampling::new(4),
        )
        .unwrap();
        let traj = integrate(&free, &[2.0, 0.0, 0.0, 0.0], 1.0, 0.1).unwrap();
        let z = traj.last();
        assert!((z[0] - 2.0).abs() < 1e-12);
        assert!((z[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_hamiltonian_is_stationary() {
        let sys = toda();
        let still = crate::symcheck::PhaseSystem::new(
            sys.chart().clone(),
            sys.w().clone(),
            Expr::int(5),
            Multivector::zero(4, 1),
            &crate::expr::Sampling::new(4),
        )
        .unwrap();
        let traj = integrate(&still, &[0.3, 0.1, -0.2, 0.4], 1.0, 0.25).unwrap();
        assert_eq!(traj.last(), &[0.3, 0.1, -0.2, 0.4]);
    }

    #[test]
    fn rejects_bad_steps_and_divergence() {
        let sys = toda();
        assert!(matches!(
            integrate(&sys, &[0.0; 4], 1.0, 0.0),
            Err(FlowError::Step { .. })
        ));
        assert!(matches!(
            integrate(&sys, &[0.0; 3], 1.0, 0.1),
            Err(FlowError::Dimension { .. })
        ));
        let blow = crate::symcheck::PhaseSystem::new(
            sys.chart().clone(),
            sys.w().clone(),
            parse("z1^2*z3", sys.chart()).unwrap(),
            Multivector::zero(4, 1),
            &crate::expr::Sampling::new(4),
        )
        .unwrap();
        let r = integrate(&blow, &[-5.0, 0.0, 1.0, 0.0], 1.0, 0.01);
        assert!(matches!(r, Err(FlowError::Diverged { .. })), "{r:?}");
    }

    #[test]
    fn csv_dump() {
        let sys = toda();
        let traj = integrate(&sys, &[1.0, -1.0, 0.0, 0.0], 0.2, 0.1).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(sys.chart().names(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,z1,z2,z3,z4\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
