//! Genus-one theta-function solutions of the Boussinesq equation
//! 3 u_YY + (6 u u_X + u_XXX)_X = 0 built from the curve's wave data
//! U = -omega(Q0), V = -omega(Q0) L_1, with residual verification,
//! periodicity lattice checks and the effectivization diagnostic.
//!
//! Theta convention: theta(z|tau) = sum_m exp(pi i m^2 tau + 2 pi i m z),
//! 1-periodic in z with period lattice Z + tau Z, matching the a-normalized
//! differential.

use num_complex::Complex64;

use crate::bell::BellTable;
use crate::curve::{Curve, SheetedPoint};
use crate::{Error, Result};

use std::f64::consts::{PI, TAU};

/// Highest z-derivative of theta needed (u_XXXX takes six).
pub const MAX_THETA_ORDER: usize = 6;

/// Truncation setup for the theta series.
#[derive(Debug, Clone, Copy)]
pub struct ThetaParams {
    pub tau: Complex64,
    pub term_bound: usize,
}

impl ThetaParams {
    /// Chooses the half-width so that the tail of the order-6 derivative
    /// series is below 1e-17, with a hard floor of 8.
    pub fn for_tau(tau: Complex64) -> Result<Self> {
        if tau.im <= 0.0 {
            return Err(Error::InvalidSpec("theta needs Im(tau) > 0".into()));
        }
        let q_abs = (-PI * tau.im).exp();
        let mut term_bound = 8;
        loop {
            let m = term_bound as f64;
            let tail = q_abs.powf(m * m) * (TAU * m).powi(MAX_THETA_ORDER as i32);
            if tail < 1e-17 {
                return Ok(ThetaParams { tau, term_bound });
            }
            term_bound += 1;
            if term_bound > 400 {
                return Err(Error::TruncationInsufficient { tail });
            }
        }
    }
}

fn theta_with_scale(z: Complex64, params: &ThetaParams, dz_order: usize) -> (Complex64, f64) {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let m_max = params.term_bound as i64;
    for m in -m_max..=m_max {
        let mf = m as f64;
        let exponent = Complex64::new(0.0, PI) * (mf * mf * params.tau + 2.0 * mf * z);
        let factor = Complex64::new(0.0, TAU * mf).powu(dz_order as u32);
        let term = factor * exponent.exp();
        sum += term;
        scale += term.norm();
    }
    (sum, scale)
}

/// The dz_order-th z-derivative of theta(z|tau).
pub fn theta(z: Complex64, params: &ThetaParams, dz_order: usize) -> Result<Complex64> {
    if dz_order > MAX_THETA_ORDER {
        return Err(Error::InvalidSpec(format!(
            "theta derivative order {dz_order} exceeds {MAX_THETA_ORDER}"
        )));
    }
    let (sum, scale) = theta_with_scale(z, params, dz_order);
    // crude tail estimate: the first omitted term
    let m = params.term_bound as f64 + 1.0;
    let tail = 2.0
        * (TAU * m).powi(dz_order as i32)
        * ((-PI * params.tau.im) * m * m + TAU * m * z.im.abs()).exp();
    if tail > 1e-13 * scale.max(1e-300) {
        return Err(Error::TruncationInsufficient { tail });
    }
    Ok(sum)
}

/// The dz_order-th z-derivative of the odd theta function
/// theta_1(z|tau) = -sum_m exp(pi i (m+1/2)^2 tau + 2 pi i (m+1/2)(z+1/2)).
pub fn theta1(z: Complex64, params: &ThetaParams, dz_order: usize) -> Result<Complex64> {
    if dz_order > 3 {
        return Err(Error::InvalidSpec(
            "theta1 derivative order exceeds 3".into(),
        ));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let m_max = params.term_bound as i64;
    for m in -m_max..=m_max {
        let h = m as f64 + 0.5;
        let exponent = Complex64::new(0.0, PI) * (h * h * params.tau + 2.0 * h * (z + 0.5));
        let factor = Complex64::new(0.0, TAU * h).powu(dz_order as u32);
        sum += factor * exponent.exp();
    }
    Ok(-sum)
}

/// Logarithmic derivatives lambda_k = (d/dz)^k ln theta(z|tau) for
/// k = 1..=up_to, via c_k = theta^(k)/theta and
/// lambda_k = c_k - sum_{i=1}^{k-1} C(k-1, i) c_i lambda_{k-i}.
fn log_derivatives(z: Complex64, params: &ThetaParams, up_to: usize) -> Result<Vec<Complex64>> {
    let (th, scale) = theta_with_scale(z, params, 0);
    if th.norm() < 1e-8 * scale {
        return Err(Error::ThetaDivisorProximity {
            magnitude: th.norm(),
        });
    }
    let binom = |n: usize, k: usize| -> f64 {
        let mut b = 1.0;
        for j in 0..k {
            b = b * (n - j) as f64 / (j + 1) as f64;
        }
        b
    };
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for k in 1..=up_to {
        c.push(theta(z, params, k)? / th);
    }
    let mut lambda = vec![Complex64::new(0.0, 0.0); up_to + 1]; // lambda[0] unused
    for k in 1..=up_to {
        let mut l = c[k];
        for i in 1..k {
            l -= binom(k - 1, i) * c[i] * lambda[k - i];
        }
        lambda[k] = l;
    }
    Ok(lambda)
}

/// Boussinesq wave data attached to a curve and pole.
#[derive(Debug, Clone, Copy)]
pub struct WaveData {
    pub u: Complex64,
    pub v: Complex64,
    pub z0: Complex64,
    pub c: Option<Complex64>,
    pub tau: Complex64,
}

/// U = -omega(Q0), V = -omega(Q0) L_1; c left unset until solved.
pub fn compute_wave_data(curve: &Curve, q0: &SheetedPoint, z0: Complex64) -> Result<WaveData> {
    let omega_q0 = curve.omega_q0(q0)?;
    let bell = BellTable::at(curve.x(), q0.y0, 1)?;
    Ok(WaveData {
        u: -omega_q0,
        v: -omega_q0 * bell.l(1),
        z0,
        c: None,
        tau: curve.periods.tau,
    })
}

/// The solution u_hat(X, Y) = 2 d^2/dX^2 ln theta(XU + YV + z0) + c and its
/// partial derivatives: d^a/dX^a d^b/dY^b u_hat = 2 U^2 lambda_{2+a+b} U^a V^b.
pub fn u_hat(
    x_coord: f64,
    y_coord: f64,
    wave: &WaveData,
    params: &ThetaParams,
    dx_order: usize,
    dy_order: usize,
) -> Result<Complex64> {
    if dx_order > 4 || dy_order > 2 {
        return Err(Error::InvalidSpec(
            "u_hat derivative orders capped at X^4, Y^2".into(),
        ));
    }
    let z = wave.z0 + wave.u * x_coord + wave.v * y_coord;
    let k = 2 + dx_order + dy_order;
    let lambda = log_derivatives(z, params, k)?;
    let mut value =
        2.0 * wave.u * wave.u * lambda[k] * wave.u.powu(dx_order as u32) * wave.v.powu(dy_order as u32);
    if dx_order == 0 && dy_order == 0 {
        value += wave.c.unwrap_or_default();
    }
    Ok(value)
}

/// Rectangular sampling grid in the (X, Y) plane.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(Error::InvalidSpec("grid counts must be >= 8".into()));
        }
        if !(x_max > x_min && y_max > y_min) {
            return Err(Error::InvalidSpec("grid ranges must be non-empty".into()));
        }
        Ok(GridSpec {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        })
    }

    /// One X-period by one Y-period, the natural validation window.
    pub fn one_period(wave: &WaveData, nx: usize, ny: usize) -> Result<Self> {
        Self::new(
            0.0,
            1.0 / wave.u.norm().max(1e-300),
            0.0,
            1.0 / wave.v.norm().max(1e-300),
            nx,
            ny,
        )
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let dx = (self.x_max - self.x_min) / self.nx as f64;
        let dy = (self.y_max - self.y_min) / self.ny as f64;
        (0..self.nx).flat_map(move |i| {
            (0..self.ny).map(move |j| {
                (
                    self.x_min + dx * i as f64,
                    self.y_min + dy * j as f64,
                )
            })
        })
    }
}

/// The PDE residual 3 u_YY + 6 u_X^2 + 6 u u_XX + u_XXXX at one grid point,
/// split as (residual at c = 0, coefficient of c) — the residual is affine in
/// c with slope 6 u_XX.
fn residual_parts(
    x_coord: f64,
    y_coord: f64,
    wave: &WaveData,
    params: &ThetaParams,
) -> Result<(Complex64, Complex64, f64)> {
    let base = WaveData { c: None, ..*wave };
    let u0 = u_hat(x_coord, y_coord, &base, params, 0, 0)?;
    let ux = u_hat(x_coord, y_coord, &base, params, 1, 0)?;
    let uxx = u_hat(x_coord, y_coord, &base, params, 2, 0)?;
    let uxxxx = u_hat(x_coord, y_coord, &base, params, 4, 0)?;
    let uyy = u_hat(x_coord, y_coord, &base, params, 0, 2)?;
    let r0 = 3.0 * uyy + 6.0 * ux * ux + 6.0 * u0 * uxx + uxxxx;
    let scale = (3.0 * uyy)
        .norm()
        .max((6.0 * ux * ux).norm())
        .max((6.0 * u0 * uxx).norm())
        .max(uxxxx.norm());
    Ok((r0, 6.0 * uxx, scale))
}

/// Least-squares solution constant c over the grid, with the spread of the
/// pointwise solutions as the fit residual.
pub fn solve_c(wave: &WaveData, params: &ThetaParams, grid: &GridSpec) -> Result<(Complex64, f64)> {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    let mut pointwise = Vec::new();
    let mut slope_scale: f64 = 0.0;
    for (gx, gy) in grid.points() {
        let (r0, slope, _) = residual_parts(gx, gy, wave, params)?;
        num += -r0 * slope.conj();
        den += slope.norm_sqr();
        slope_scale = slope_scale.max(slope.norm());
        pointwise.push((r0, slope));
    }
    if den.sqrt() < 1e-10 * slope_scale.max(1.0) {
        return Err(Error::IllConditioned(
            "u_XX vanishes on the whole grid".into(),
        ));
    }
    let c = num / den;
    let mut spread: f64 = 0.0;
    for (r0, slope) in pointwise {
        if slope.norm() > 1e-6 * slope_scale {
            spread = spread.max((-r0 / slope - c).norm());
        }
    }
    Ok((c, spread))
}

/// Max relative PDE residual over the grid (c must be solved). Grid points
/// within the theta-divisor guard are skipped.
pub fn boussinesq_residual(wave: &WaveData, params: &ThetaParams, grid: &GridSpec) -> Result<f64> {
    let c = wave
        .c
        .ok_or_else(|| Error::InvalidSpec("solve c before computing the residual".into()))?;
    let mut worst: f64 = 0.0;
    let mut skipped = 0usize;
    let mut total = 0usize;
    for (gx, gy) in grid.points() {
        total += 1;
        match residual_parts(gx, gy, wave, params) {
            Ok((r0, slope, scale)) => {
                let r = r0 + c * slope;
                worst = worst.max(r.norm() / scale.max(1e-300));
            }
            Err(Error::ThetaDivisorProximity { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if skipped * 2 > total {
        return Err(Error::ThetaDivisorProximity { magnitude: 0.0 });
    }
    Ok(worst)
}

/// Result of a periodicity lattice decomposition.
#[derive(Debug, Clone, Copy)]
pub struct LatticeCheck {
    pub pass: bool,
    pub m: i64,
    pub n: i64,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

/// Checks whether T*U (direction X) or T*V (direction Y) lies on the period
/// lattice Z + tau Z.
pub fn periodicity_lattice_check(wave: &WaveData, t: f64, direction: Direction) -> Result<LatticeCheck> {
    // negated form also rejects NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(t > 0.0) {
        return Err(Error::InvalidSpec("lattice check needs T > 0".into()));
    }
    let w = t * match direction {
        Direction::X => wave.u,
        Direction::Y => wave.v,
    };
    let n = (w.im / wave.tau.im).round();
    let m = (w.re - n * wave.tau.re).round();
    let nearest = m + n * wave.tau;
    let distance = (w - nearest).norm();
    Ok(LatticeCheck {
        pass: distance < 1e-8,
        m: m as i64,
        n: n as i64,
        distance,
    })
}

/// The dispersion-relation diagnostic ratio
/// rho = V / ((4 pi i sqrt(3)/3) U^2 sqrt(theta1'''(0)/theta1'(0)))
/// for both branches of the square root. Reported, not asserted.
pub fn effectivization_diagnostic(
    wave: &WaveData,
    params: &ThetaParams,
) -> Result<(Complex64, Complex64)> {
    if wave.u.norm() == 0.0 {
        return Err(Error::InvalidSpec("effectivization needs U != 0".into()));
    }
    let ratio = theta1(Complex64::default(), params, 3)? / theta1(Complex64::default(), params, 1)?;
    let root = ratio.sqrt();
    let prefactor = Complex64::new(0.0, 4.0 * PI * 3f64.sqrt() / 3.0) * wave.u * wave.u;
    let rho = wave.v / (prefactor * root);
    Ok((rho, -rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params_i() -> ThetaParams {
        ThetaParams::for_tau(c(0.0, 1.0)).unwrap()
    }

    #[test]
    fn theta_classical_value_at_origin() {
        // theta(0 | i) = pi^{1/4} / Gamma(3/4)
        let v = theta(c(0.0, 0.0), &params_i(), 0).unwrap();
        assert!((v - c(1.086_434_811_213_308, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn theta_periodic_and_even() {
        let p = params_i();
        let z = c(0.31, 0.12);
        let a = theta(z, &p, 0).unwrap();
        let b = theta(z + 1.0, &p, 0).unwrap();
        assert!((a - b).norm() < 1e-13 * a.norm());
        let m = theta(-z, &p, 0).unwrap();
        assert!((a - m).norm() < 1e-13 * a.norm());
        assert!(theta(c(0.0, 0.0), &p, 1).unwrap().norm() < 1e-14);
    }

    #[test]
    fn theta_second_derivative_matches_differences() {
        let p = params_i();
        let z = c(0.2, 0.05);
        let exact = theta(z, &p, 2).unwrap();
        let quot = |h: f64| {
            (theta(z + h, &p, 0).unwrap() - 2.0 * theta(z, &p, 0).unwrap()
                + theta(z - h, &p, 0).unwrap())
                / (h * h)
        };
        let h = 1e-3;
        let coarse = (quot(h) - exact).norm();
        let fine = (quot(0.5 * h) - exact).norm();
        assert!(coarse < 1e-4 * exact.norm());
        let ratio = coarse / fine;
        assert!((ratio - 4.0).abs() < 0.6, "ratio {ratio:.3}");
    }

    #[test]
    fn theta1_is_odd() {
        let p = params_i();
        assert!(theta1(c(0.0, 0.0), &p, 0).unwrap().norm() < 1e-14);
        let z = c(0.17, -0.08);
        let a = theta1(z, &p, 0).unwrap();
        let b = theta1(-z, &p, 0).unwrap();
        assert!((a + b).norm() < 1e-13 * a.norm().max(1e-3));
    }

    fn real_case_wave() -> (WaveData, ThetaParams) {
        let curve = Curve::new(c(0.5, 0.0)).unwrap();
        let q0 = SheetedPoint::new(c(2.0, 0.0), 1).unwrap();
        let wave = compute_wave_data(&curve, &q0, c(0.3, 0.0)).unwrap();
        let params = ThetaParams::for_tau(wave.tau).unwrap();
        (wave, params)
    }

    #[test]
    fn wave_data_is_real_and_sheet_odd() {
        let (wave, _) = real_case_wave();
        assert!(wave.u.im.abs() < 1e-10 * wave.u.norm());
        assert!(wave.v.im.abs() < 1e-10 * wave.v.norm());
        // V = U * L1 with L1 = -13/12 here
        assert!((wave.v + wave.u * 13.0 / 12.0).norm() < 1e-12 * wave.v.norm());

        let curve = Curve::new(c(0.5, 0.0)).unwrap();
        let q0 = SheetedPoint::new(c(2.0, 0.0), -1).unwrap();
        let flipped = compute_wave_data(&curve, &q0, c(0.3, 0.0)).unwrap();
        assert!((flipped.u + wave.u).norm() < 1e-14);
        assert!((flipped.v + wave.v).norm() < 1e-14);
    }

    #[test]
    fn u_hat_periodicity_and_derivative() {
        let (wave, params) = real_case_wave();
        let t = 1.0 / wave.u.re;
        let a = u_hat(0.4, 0.7, &wave, &params, 0, 0).unwrap();
        let b = u_hat(0.4 + t, 0.7, &wave, &params, 0, 0).unwrap();
        assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
        // analytic u_X against a central difference
        let exact = u_hat(0.4, 0.7, &wave, &params, 1, 0).unwrap();
        let h = 1e-4;
        let quot = (u_hat(0.4 + h, 0.7, &wave, &params, 0, 0).unwrap()
            - u_hat(0.4 - h, 0.7, &wave, &params, 0, 0).unwrap())
            / (2.0 * h);
        assert!((quot - exact).norm() < 1e-6 * exact.norm().max(1e-6));
    }

    #[test]
    fn pde_residual_vanishes_with_solved_c() {
        let (mut wave, params) = real_case_wave();
        let grid = GridSpec::one_period(&wave, 16, 16).unwrap();
        let (cc, spread) = solve_c(&wave, &params, &grid).unwrap();
        assert!(spread < 1e-8 * cc.norm().max(1.0), "spread {spread:.3e}");
        wave.c = Some(cc);
        let r = boussinesq_residual(&wave, &params, &grid).unwrap();
        assert!(r < 1e-8, "residual {r:.3e}");
        // u_hat should be real on the real grid
        let v = u_hat(0.3, 0.9, &wave, &params, 0, 0).unwrap();
        assert!(v.im.abs() < 1e-11 * v.norm().max(1.0));
        // a scrambled frequency with the stale c must be detected (re-solving c
        // would absorb the change: the genus-one ansatz is exact for any U, V)
        let bad = WaveData {
            v: wave.v * 1.1,
            ..wave
        };
        let rb = boussinesq_residual(&bad, &params, &grid).unwrap();
        assert!(rb > 1e2 * r.max(1e-12), "scrambled residual {rb:.3e}");
    }

    #[test]
    fn lattice_check_basics() {
        let (wave, _) = real_case_wave();
        let t = 1.0 / wave.u.re.abs();
        let l1 = periodicity_lattice_check(&wave, t, Direction::X).unwrap();
        assert!(l1.pass);
        assert_eq!((l1.m.abs(), l1.n), (1, 0));
        let l2 = periodicity_lattice_check(&wave, 2.0 * t, Direction::X).unwrap();
        assert!(l2.pass);
        assert_eq!((l2.m.abs(), l2.n), (2, 0));
        let generic = periodicity_lattice_check(&wave, 0.37, Direction::X).unwrap();
        assert!(!generic.pass);
        assert!(generic.distance > 1e-4);
    }

    #[test]
    fn effectivization_reports_finite_ratio() {
        let (wave, params) = real_case_wave();
        let (rho_p, rho_m) = effectivization_diagnostic(&wave, &params).unwrap();
        assert!(rho_p.norm().is_finite() && rho_p.norm() > 0.0);
        assert!((rho_p + rho_m).norm() < 1e-15);
        // independent of z0
        let shifted = WaveData {
            z0: wave.z0 + c(0.2, 0.1),
            ..wave
        };
        let (rho_s, _) = effectivization_diagnostic(&shifted, &params).unwrap();
        assert!((rho_s - rho_p).norm() < 1e-14 * rho_p.norm());
    }
}
