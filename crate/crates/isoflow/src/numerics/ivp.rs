//! Adaptive initial-value solving for complex-valued states.
//!
//! Dormand-Prince 5(4) embedded pair with PI step-size control. Output at
//! user-requested sample times is obtained by clamping steps onto the sample
//! grid, so sampled states carry no interpolation error beyond the local
//! tolerance.

use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerances and budget for the initial-value solver.
#[derive(Debug, Clone, Copy)]
pub struct IvpSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for IvpSpec {
    fn default() -> Self {
        IvpSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            initial_step: 1e-3,
            max_steps: 100_000,
        }
    }
}

impl IvpSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidSpec("IVP tolerances must be > 0".into()));
        }
        // negated form also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.initial_step > 0.0) {
            return Err(Error::InvalidSpec("initial_step must be > 0".into()));
        }
        Ok(())
    }
}

/// Sampled solution of an initial-value problem.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evals: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &[Complex64] {
        self.states.last().expect("non-empty trajectory")
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
// b - b_hat (5th minus embedded 4th order weights)
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `state' = rhs(t, state)` from `t0` to `t1`, recording the state
/// at every time in `samples` (which must be sorted, strictly inside
/// `[t0, t1]` or equal to the endpoints).
///
/// The returned trajectory always contains `t0` and `t1`.
pub fn solve_ivp<F>(
    mut rhs: F,
    t0: f64,
    state0: &[Complex64],
    t1: f64,
    spec: &IvpSpec,
    samples: &[f64],
) -> Result<Trajectory>
where
    F: FnMut(f64, &[Complex64]) -> Result<Vec<Complex64>>,
{
    spec.validate()?;
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    if span == 0.0 {
        return Ok(Trajectory {
            times: vec![t0],
            states: vec![state0.to_vec()],
            steps_accepted: 0,
            steps_rejected: 0,
            rhs_evals: 0,
        });
    }

    let mut stops: Vec<f64> = samples
        .iter()
        .copied()
        .filter(|&s| dir * (s - t0) > 1e-15 * span && dir * (t1 - s) > 1e-15 * span)
        .collect();
    stops.push(t1);

    let dim = state0.len();
    let mut t = t0;
    let mut y = state0.to_vec();
    let mut traj = Trajectory {
        times: vec![t0],
        states: vec![y.clone()],
        steps_accepted: 0,
        steps_rejected: 0,
        rhs_evals: 0,
    };

    let wrap = |t: f64, e: Error| Error::RhsEvaluation {
        t,
        source: Box::new(e),
    };

    let mut k0 = rhs(t, &y).map_err(|e| wrap(t, e))?;
    traj.rhs_evals += 1;
    let mut h = spec.initial_step.min(span);
    let mut err_prev: f64 = 1.0;
    let mut stop_idx = 0usize;

    let mut steps = 0usize;
    while dir * (t1 - t) > 1e-15 * span {
        if steps >= spec.max_steps {
            return Err(Error::MaxStepsExceeded {
                t,
                max_steps: spec.max_steps,
            });
        }
        steps += 1;

        // clamp onto the next requested output time
        while stop_idx < stops.len() && dir * (stops[stop_idx] - t) <= 1e-15 * span {
            stop_idx += 1;
        }
        let next_stop = stops[stop_idx.min(stops.len() - 1)];
        let mut hitting_stop = false;
        if h >= dir * (next_stop - t) {
            h = dir * (next_stop - t);
            hitting_stop = true;
        }
        if h < 1e-15 * span {
            return Err(Error::StepSizeUnderflow { t, step: h });
        }

        // DOPRI5 stages
        let hs = dir * h;
        let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(7);
        k.push(k0.clone());
        for s in 0..6 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..dim {
                        ys[i] += kj[i] * (hs * a);
                    }
                }
            }
            let ts = t + hs * C[s];
            k.push(rhs(ts, &ys).map_err(|e| wrap(ts, e))?);
            traj.rhs_evals += 1;
        }
        // 5th-order solution: stage 6 increments already use the b-weights (FSAL)
        let mut y_new = y.clone();
        for (j, kj) in k.iter().enumerate().take(6) {
            let b = A[5][j];
            if b != 0.0 {
                for i in 0..dim {
                    y_new[i] += kj[i] * (hs * b);
                }
            }
        }

        // embedded error estimate
        let mut err: f64 = 0.0;
        for i in 0..dim {
            let mut e = Complex64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * (hs * E[j]);
                }
            }
            let scale = spec.abs_tol + spec.rel_tol * y[i].norm().max(y_new[i].norm());
            err += (e.norm() / scale).powi(2);
        }
        err = (err / dim as f64).sqrt().max(1e-30);

        if err <= 1.0 {
            t = if hitting_stop { next_stop } else { t + hs };
            y = y_new;
            k0 = k.pop().expect("stage 7"); // FSAL
            traj.steps_accepted += 1;
            if hitting_stop {
                traj.times.push(t);
                traj.states.push(y.clone());
                stop_idx += 1;
            }
            // PI controller
            let fac = 0.9 * err.powf(-0.2) * err_prev.powf(0.08);
            h *= fac.clamp(0.2, 5.0);
            err_prev = err;
        } else {
            traj.steps_rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
        h = h.min(span);
    }
    Ok(traj)
}
