//! Isoperiodic deformation flows: the b-period B of the second-kind
//! differential with a single pole of order n+2 at Q0 and prescribed a-period
//! A, the slope dy0/dx keeping B constant, the rational second-order ODE the
//! pole position satisfies, and flow integration with per-sample B monitoring.

use num_complex::Complex64;

use crate::bell::{ratio_derivative, BellTable};
use crate::curve::{sqrt_near, Curve, CurveFamilyPoint, CycleBasis, Region, SheetedPoint};
use crate::numerics::{solve_ivp, IvpSpec, QuadratureSpec};
use crate::{Error, Result};

/// Largest supported pole-order parameter (pole order is n + 2).
pub const MAX_N: usize = 8;

/// Clearance at which a trajectory's y0 is considered to collide with
/// {0, 1, x} and integration halts.
pub const FLOW_POLE_CLEARANCE: f64 = 1e-6;

fn factorial(m: usize) -> f64 {
    (1..=m).map(|v| v as f64).product()
}

const TWO_PI_I: Complex64 = Complex64::new(0.0, std::f64::consts::TAU);

/// B = (2 pi i / (n+1)!) omega(Q0) L_n + A tau.
pub fn b_period(curve: &Curve, q0: &SheetedPoint, n: usize, a: Complex64) -> Result<Complex64> {
    let bell = BellTable::at(curve.x(), q0.y0, n)?;
    Ok(TWO_PI_I / factorial(n + 1) * curve.omega_q0(q0)? * bell.l(n) + a * curve.periods.tau)
}

/// The slope dy0/dx along which B stays constant:
///
/// y0' = -(1 / (2 L_{n+1} omega(Q0))) [ omega(Px) W(Q0,Px) L_n
///        - (n/(x-y0)) omega(Q0) D_{n-1} + A (n+1)! omega^2(Px) ].
///
/// Computed in the sheet-free form (W/omega(Q0) is rational); the sheet enters
/// only through the A-term.
pub fn initial_slope(curve: &Curve, q0: &SheetedPoint, n: usize, a: Complex64) -> Result<Complex64> {
    let x = curve.x();
    let y0 = q0.y0;
    let bell = BellTable::at(x, y0, n + 1)?;
    let l_next = bell.l(n + 1);
    let scale = (bell.l(n).norm() / (x - y0).norm()).max(1.0);
    if l_next.norm() < 1e-12 * scale {
        return Err(Error::DegenerateDeformation {
            magnitude: l_next.norm(),
        });
    }
    let om_px = curve.omega_px();
    // W(Q0, Px) / omega(Q0), rational in (x, y0)
    let w_ratio = 1.0 / (om_px * (y0 - x)) + curve.periods.ix;
    let mut term = om_px * w_ratio * bell.l(n);
    if n >= 1 {
        term -= n as f64 / (x - y0) * ratio_derivative(n - 1, x, y0, &bell)?;
    }
    if a.norm() > 0.0 {
        term += a * factorial(n + 1) * om_px * om_px / curve.omega_q0(q0)?;
    }
    Ok(-term / (2.0 * l_next))
}

/// Right-hand side y0'' of the second-order rational ODE for the pole
/// position. Pure rational arithmetic in (x, y0, y0'); performs no quadrature.
pub fn ode_rhs(n: usize, x: Complex64, y0: Complex64, y0p: Complex64) -> Result<Complex64> {
    if n > MAX_N {
        return Err(Error::InvalidSpec(format!("n = {n} exceeds cap {MAX_N}")));
    }
    let bell = BellTable::at(x, y0, n + 2)?;
    let l_next = bell.l(n + 1);
    if l_next.norm() < 1e-10 * bell.l(n).norm() / (x - y0).norm() {
        return Err(Error::BellSingularity { x, y0 });
    }
    let d = x - y0;
    // partial sums of L_s d^s / s!
    let taylorish = |upto: usize| -> Complex64 {
        let mut dpow = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for s in 0..=upto {
            sum += bell.l(s) * dpow / factorial(s);
            dpow *= d;
        }
        sum
    };
    let drift = 1.0 / x + 1.0 / (x - 1.0) + 1.0 / (y0 - x);

    let mut r = -y0p * y0p * bell.l(n + 2) / l_next;
    r -= y0p * drift;
    r += y0p * factorial(n + 1) / (d.powu(n as u32 + 2) * l_next) * taylorish(n);
    if n >= 1 {
        let fnn = factorial(n);
        r += fnn * (1.0 / x + 1.0 / (x - 1.0) + 2.0 / (y0 - x))
            / (2.0 * d.powu(n as u32 + 1) * l_next)
            * taylorish(n - 1);
        let mut weighted = Complex64::new(0.0, 0.0);
        let mut dpow = Complex64::new(1.0, 0.0);
        for s in 0..n {
            weighted += (n - s) as f64 * bell.l(s) * dpow / factorial(s);
            dpow *= d;
        }
        r -= fnn / (2.0 * d.powu(n as u32 + 2) * l_next) * weighted;
        let mut double = Complex64::new(0.0, 0.0);
        for s in 1..n {
            double += taylorish(s - 1);
        }
        r -= fnn / (4.0 * d.powu(n as u32 + 2) * l_next) * double;
    }
    r -= bell.l(n) / (4.0 * l_next)
        * (2.0 / (y0 - x) * (1.0 / x + 1.0 / (x - 1.0)) + 3.0 / ((y0 - x) * (y0 - x))
            + 1.0 / (x - 1.0)
            - 1.0 / x);
    Ok(r)
}

/// Independently derived closed form of [`ode_rhs`] for n = 0 (cross-check
/// oracle only).
pub fn ode_rhs_closed_n0(x: Complex64, y0: Complex64, y0p: Complex64) -> Complex64 {
    let s1 = 1.0 / y0 + 1.0 / (y0 - 1.0) + 1.0 / (y0 - x);
    let s2 = 1.0 / (y0 * y0)
        + 1.0 / ((y0 - 1.0) * (y0 - 1.0))
        + 1.0 / ((y0 - x) * (y0 - x));
    y0p * y0p / 2.0 * s1 + y0p * y0p * s2 / s1
        - y0p * (1.0 / x + 1.0 / (x - 1.0) + 1.0 / (y0 - x))
        - 2.0 * y0p / (s1 * (y0 - x) * (y0 - x))
        + (2.0 / (x * (y0 - x)) + 2.0 / ((x - 1.0) * (y0 - x)) + 1.0 / (x - 1.0) - 1.0 / x
            + 3.0 / ((y0 - x) * (y0 - x)))
            / (2.0 * s1)
}

/// Independently derived closed form of [`ode_rhs`] for n = 1 (cross-check
/// oracle only).
pub fn ode_rhs_closed_n1(x: Complex64, y0: Complex64, y0p: Complex64) -> Complex64 {
    let s1 = 1.0 / y0 + 1.0 / (y0 - 1.0) + 1.0 / (y0 - x);
    let s2 = 1.0 / (y0 * y0)
        + 1.0 / ((y0 - 1.0) * (y0 - 1.0))
        + 1.0 / ((y0 - x) * (y0 - x));
    let s3 = 1.0 / (y0 * y0 * y0)
        + 1.0 / ((y0 - 1.0) * (y0 - 1.0) * (y0 - 1.0))
        + 1.0 / ((y0 - x) * (y0 - x) * (y0 - x));
    let den = s1 * s1 + 2.0 * s2;
    let dxy = y0 - x;
    let mut bracket = 2.0 * y0p * y0p * (s1 * s2 + 2.0 * s3);
    bracket += 4.0 * y0p / (dxy * dxy * dxy) * (x / y0 + (x - 1.0) / (y0 - 1.0) - 5.0);
    bracket += 2.0 / (dxy * dxy) * (1.0 / x + 1.0 / (x - 1.0) + 3.0 / dxy);
    bracket += s1 / 2.0
        * (2.0 / dxy * (1.0 / x + 1.0 / (x - 1.0)) + 3.0 / (dxy * dxy) + 1.0 / (x - 1.0)
            - 1.0 / x);
    y0p * y0p / 2.0 * s1 - y0p * (1.0 / x + 1.0 / (x - 1.0) + 1.0 / dxy) + bracket / den
}

/// Which equation drives the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMode {
    /// Integrate dy0/dx = slope(x, y0) (transcendental right-hand side).
    FirstOrder,
    /// Integrate the rational second-order ODE from the computed initial slope.
    SecondOrder,
    /// Run both and report the trajectory gap.
    Both,
}

/// Flow setup: pole data, deformation segment and solver settings.
#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub n: usize,
    pub a: Complex64,
    pub x0: Complex64,
    pub x1: Complex64,
    pub q0: SheetedPoint,
    pub mode: FlowMode,
    pub samples: usize,
    pub ivp: IvpSpec,
    pub quad: QuadratureSpec,
    /// Replaces the computed initial slope in second-order integration
    /// (used to demonstrate that wrong slopes break B-constancy).
    pub initial_slope_override: Option<Complex64>,
}

impl FlowConfig {
    pub fn new(n: usize, a: Complex64, x0: Complex64, x1: Complex64, q0: SheetedPoint) -> Self {
        FlowConfig {
            n,
            a,
            x0,
            x1,
            q0,
            mode: FlowMode::FirstOrder,
            samples: 21,
            ivp: IvpSpec::default(),
            quad: QuadratureSpec::default(),
            initial_slope_override: None,
        }
    }

    fn validate(&self, region: Region) -> Result<()> {
        if self.n > MAX_N {
            return Err(Error::InvalidSpec(format!(
                "n = {} exceeds cap {MAX_N}",
                self.n
            )));
        }
        if self.samples < 2 {
            return Err(Error::InvalidSpec("need at least 2 samples".into()));
        }
        // the region is convex, so the segment stays inside iff its endpoints do
        for x in [self.x0, self.x1] {
            if !region.contains(x) {
                return Err(Error::RegionExit { x });
            }
        }
        self.q0.validate_at(self.x0)
    }
}

/// One sampled state of a flow.
#[derive(Debug, Clone, Copy)]
pub struct FlowSample {
    pub x: Complex64,
    pub y0: Complex64,
    pub y0p: Complex64,
    pub b: Complex64,
    /// omega(Q0) on the continued sheet; -U of the wave data.
    pub omega_q0: Complex64,
}

/// Sampled trajectory with per-sample b-periods.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub samples: Vec<FlowSample>,
    pub b0: Complex64,
    pub max_b_drift: f64,
    /// Sup-norm gap between first- and second-order trajectories (mode Both).
    pub mode_gap: Option<f64>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

struct FlowContext {
    basis: CycleBasis,
    region: Region,
    quad: QuadratureSpec,
}

impl FlowContext {
    fn curve_at(&self, x: Complex64) -> Result<Curve> {
        let point = CurveFamilyPoint::in_region(x, self.region)?;
        Curve::with_basis(point, &self.basis, &self.quad)
    }
}

fn check_pole_clearance(x: Complex64, y0: Complex64) -> Result<()> {
    if y0.norm() < FLOW_POLE_CLEARANCE
        || (y0 - 1.0).norm() < FLOW_POLE_CLEARANCE
        || (y0 - x).norm() < FLOW_POLE_CLEARANCE
    {
        return Err(Error::PoleAtRamification { y0 });
    }
    Ok(())
}

/// Integrates the configured flow over x = x0 + t (x1 - x0), t in [0, 1].
pub fn integrate_flow(config: &FlowConfig) -> Result<FlowResult> {
    let region = Region::default_region();
    config.validate(region)?;
    let ctx = FlowContext {
        basis: CycleBasis::for_region(region)?,
        region,
        quad: config.quad,
    };
    let dx = config.x1 - config.x0;
    let x_at = |t: f64| config.x0 + dx * t;
    let times: Vec<f64> = (0..config.samples)
        .map(|j| j as f64 / (config.samples - 1) as f64)
        .collect();

    let first = |traj_out: &mut Option<crate::numerics::Trajectory>| -> Result<()> {
        let traj = solve_ivp(
            |t, state| {
                let x = x_at(t);
                let y0 = state[0];
                check_pole_clearance(x, y0)?;
                let curve = ctx.curve_at(x)?;
                let q0 = SheetedPoint::new(y0, config.q0.sheet)?;
                Ok(vec![initial_slope(&curve, &q0, config.n, config.a)? * dx])
            },
            0.0,
            &[config.q0.y0],
            1.0,
            &config.ivp,
            &times,
        )?;
        *traj_out = Some(traj);
        Ok(())
    };

    let second = |traj_out: &mut Option<crate::numerics::Trajectory>| -> Result<()> {
        let curve0 = ctx.curve_at(config.x0)?;
        let slope0 = match config.initial_slope_override {
            Some(s) => s,
            None => initial_slope(&curve0, &config.q0, config.n, config.a)?,
        };
        let traj = solve_ivp(
            |t, state| {
                let x = x_at(t);
                let (y0, y0p) = (state[0], state[1]);
                check_pole_clearance(x, y0)?;
                Ok(vec![y0p * dx, ode_rhs(config.n, x, y0, y0p)? * dx])
            },
            0.0,
            &[config.q0.y0, slope0],
            1.0,
            &config.ivp,
            &times,
        )?;
        *traj_out = Some(traj);
        Ok(())
    };

    let mut traj_first = None;
    let mut traj_second = None;
    match config.mode {
        FlowMode::FirstOrder => first(&mut traj_first)?,
        FlowMode::SecondOrder => second(&mut traj_second)?,
        FlowMode::Both => {
            first(&mut traj_first)?;
            second(&mut traj_second)?;
        }
    }

    let mode_gap = match (&traj_first, &traj_second) {
        (Some(f), Some(s)) => {
            let gap = f
                .times
                .iter()
                .zip(&f.states)
                .zip(&s.states)
                .map(|((_, a), b)| (a[0] - b[0]).norm())
                .fold(0.0, f64::max);
            Some(gap)
        }
        _ => None,
    };

    // sample the primary trajectory: second-order y0' is part of the state,
    // first-order y0' is recomputed from the slope formula
    let primary = traj_first.as_ref().or(traj_second.as_ref()).expect("trajectory");
    let use_state_slope = traj_first.is_none();

    let mut samples = Vec::with_capacity(primary.times.len());
    let mut v_ref = config.q0.v(config.x0)?;
    for (t, state) in primary.times.iter().zip(&primary.states) {
        let x = x_at(*t);
        let y0 = state[0];
        let curve = ctx.curve_at(x)?;
        // sheet continuity along the trajectory: follow the branch nearest the
        // previous sample
        let v = sqrt_near(y0 * (y0 - 1.0) * (y0 - x), v_ref);
        v_ref = v;
        let omega_q0 = 1.0 / (curve.periods.i0 * v);
        let bell = BellTable::at(x, y0, config.n)?;
        let b = TWO_PI_I / factorial(config.n + 1) * omega_q0 * bell.l(config.n)
            + config.a * curve.periods.tau;
        let q0 = SheetedPoint::new(y0, config.q0.sheet)?;
        let y0p = if use_state_slope {
            state[1]
        } else {
            initial_slope(&curve, &q0, config.n, config.a)?
        };
        samples.push(FlowSample {
            x,
            y0,
            y0p,
            b,
            omega_q0,
        });
    }

    let b0 = samples[0].b;
    let max_b_drift = samples
        .iter()
        .map(|s| (s.b - b0).norm())
        .fold(0.0, f64::max);
    Ok(FlowResult {
        samples,
        b0,
        max_b_drift,
        mode_gap,
        steps_accepted: primary.steps_accepted,
        steps_rejected: primary.steps_rejected,
    })
}

/// Pass/fail verification of a flow result.
#[derive(Debug, Clone, Copy)]
pub struct IsoperiodicReport {
    pub pass: bool,
    pub relative_b_drift: f64,
    pub max_slope_residual: f64,
}

/// Passes iff the b-period drift stays below `tol` relative to |B0| and each
/// sampled slope agrees with the slope formula at its own (x, y0).
pub fn verify_isoperiodic(result: &FlowResult, n: usize, a: Complex64, tol: f64) -> Result<IsoperiodicReport> {
    if result.samples.is_empty() {
        return Err(Error::InvalidSpec("empty flow result".into()));
    }
    let relative_b_drift = result.max_b_drift / result.b0.norm();
    let mut max_slope_residual: f64 = 0.0;
    for s in &result.samples {
        let curve = Curve::new(s.x)?;
        // reconstruct the sheet of the sample from its stored omega(Q0)
        let v = 1.0 / (curve.periods.i0 * s.omega_q0);
        let principal = (s.y0 * (s.y0 - 1.0) * (s.y0 - s.x)).sqrt();
        let sheet = if (v - principal).norm() <= (v + principal).norm() {
            1
        } else {
            -1
        };
        let q0 = SheetedPoint::new(s.y0, sheet)?;
        let slope = initial_slope(&curve, &q0, n, a)?;
        let scale = slope.norm().max(1.0);
        max_slope_residual = max_slope_residual.max((s.y0p - slope).norm() / scale);
    }
    Ok(IsoperiodicReport {
        pass: relative_b_drift <= tol && max_slope_residual <= tol,
        relative_b_drift,
        max_slope_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::Ordering;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn b_period_reduces_for_n0() {
        let curve = Curve::new(c(0.5, 0.0)).unwrap();
        let q0 = SheetedPoint::new(c(2.0, 0.0), 1).unwrap();
        let b = b_period(&curve, &q0, 0, c(0.0, 0.0)).unwrap();
        let expected = TWO_PI_I * curve.omega_q0(&q0).unwrap();
        assert!((b - expected).norm() < 1e-14 * expected.norm());
        // linearity in A
        let b1 = b_period(&curve, &q0, 0, c(1.0, 0.0)).unwrap();
        assert!((b1 - expected - curve.periods.tau).norm() < 1e-14);
    }

    #[test]
    fn b_period_n1_exact_l1() {
        // L_1 = -(1/2)(1/2 + 1 + 1/(3/2)) = -13/12 at x=1/2, y0=2
        let curve = Curve::new(c(0.5, 0.0)).unwrap();
        let q0 = SheetedPoint::new(c(2.0, 0.0), 1).unwrap();
        let b = b_period(&curve, &q0, 1, c(0.0, 0.0)).unwrap();
        let expected = Complex64::new(0.0, std::f64::consts::PI)
            * curve.omega_q0(&q0).unwrap()
            * (-13.0 / 12.0);
        assert!((b - expected).norm() < 1e-13 * expected.norm());
    }

    #[test]
    fn slope_sheet_invariant_at_a_zero() {
        let curve = Curve::new(c(0.5, 0.0)).unwrap();
        let q0 = SheetedPoint::new(c(2.0, 0.0), 1).unwrap();
        for n in 0..=2 {
            let s1 = initial_slope(&curve, &q0, n, c(0.0, 0.0)).unwrap();
            let s2 = initial_slope(&curve, &q0.flipped(), n, c(0.0, 0.0)).unwrap();
            assert!((s1 - s2).norm() < 1e-14 * s1.norm().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn ode_rhs_matches_closed_forms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
        };
        for _ in 0..100 {
            let (x, y0, y0p) = (sample(&mut rng), sample(&mut rng), sample(&mut rng));
            let g0 = ode_rhs(0, x, y0, y0p).unwrap();
            let e0 = ode_rhs_closed_n0(x, y0, y0p);
            assert!((g0 - e0).norm() < 1e-12 * e0.norm().max(1.0), "n=0 at {x} {y0} {y0p}");
            let g1 = ode_rhs(1, x, y0, y0p).unwrap();
            let e1 = ode_rhs_closed_n1(x, y0, y0p);
            assert!((g1 - e1).norm() < 1e-12 * e1.norm().max(1.0), "n=1 at {x} {y0} {y0p}");
        }
    }

    #[test]
    fn ode_rhs_performs_no_quadrature() {
        let before = crate::numerics::quadrature::QUADRATURE_CALLS.load(Ordering::Relaxed);
        for n in 0..=4 {
            ode_rhs(n, c(0.45, 0.1), c(1.8, -0.3), c(0.2, 0.05)).unwrap();
        }
        let after = crate::numerics::quadrature::QUADRATURE_CALLS.load(Ordering::Relaxed);
        assert_eq!(before, after);
    }

    #[test]
    fn short_flow_keeps_b_constant() {
        // a cheap smoke test; the full-length flows live in the acceptance suite
        let q0 = SheetedPoint::new(c(2.0, 0.0), 1).unwrap();
        let mut config = FlowConfig::new(0, c(0.0, 0.0), c(0.48, 0.0), c(0.52, 0.0), q0);
        config.samples = 5;
        let result = integrate_flow(&config).unwrap();
        assert!(result.max_b_drift < 1e-8 * result.b0.norm());
        // the trajectory must actually move
        let moved = (result.samples.last().unwrap().y0 - q0.y0).norm();
        assert!(moved > 1e-5, "trajectory stayed put ({moved:.3e})");
        let report = verify_isoperiodic(&result, 0, c(0.0, 0.0), 1e-7).unwrap();
        assert!(report.pass, "{report:?}");
    }
}
