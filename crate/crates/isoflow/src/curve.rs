//! The elliptic family v^2 = u(u-1)(u-x): working region, fixed homology
//! cycles, period computation, and evaluations of the normalized holomorphic
//! differential at the marked points.
//!
//! Conventions:
//! - omega = du / (I0 v) with I0 = the a-period of du/v, so the a-period of
//!   omega is 1 by construction (and re-verified at a refined discretization).
//! - Loop orientation is chosen so Im(tau) > 0; if the b-loop had to be
//!   reversed for that, the flip is recorded in [`PeriodData::b_flipped`].
//! - Square roots at ramification points use the principal branch; every
//!   published quantity is branch-sign invariant (squares and ratios), and the
//!   sheet of v at the pole Q0 is tracked explicitly via [`SheetedPoint`].

use num_complex::Complex64;

use crate::numerics::{integrate_path_param, PathSpec, QuadratureSpec};
use crate::{Error, Result};

/// Clearance below which y0 is considered to collide with {0, 1, x}.
pub const POLE_CLEARANCE: f64 = 1e-8;

/// A disk in the x-plane avoiding the degenerate moduli 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub center: Complex64,
    pub radius: f64,
}

impl Region {
    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        let r = Region { center, radius };
        // negated form also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(radius > 0.0) {
            return Err(Error::InvalidSpec("region radius must be > 0".into()));
        }
        if r.clearance_to_degenerate() <= 0.0 {
            return Err(Error::InvalidSpec(
                "region must avoid 0 and 1 by a positive clearance".into(),
            ));
        }
        Ok(r)
    }

    /// The default validated working region.
    pub fn default_region() -> Self {
        Region {
            center: Complex64::new(0.5, 0.0),
            radius: 0.32,
        }
    }

    pub fn contains(&self, x: Complex64) -> bool {
        (x - self.center).norm() <= self.radius
    }

    /// Distance from the region to the nearer of the degenerate moduli 0, 1.
    pub fn clearance_to_degenerate(&self) -> f64 {
        let d0 = self.center.norm() - self.radius;
        let d1 = (self.center - Complex64::new(1.0, 0.0)).norm() - self.radius;
        d0.min(d1)
    }
}

/// The modulus x together with its validated working region.
#[derive(Debug, Clone, Copy)]
pub struct CurveFamilyPoint {
    pub x: Complex64,
    pub region: Region,
}

impl CurveFamilyPoint {
    pub fn new(x: Complex64) -> Result<Self> {
        Self::in_region(x, Region::default_region())
    }

    pub fn in_region(x: Complex64, region: Region) -> Result<Self> {
        if !region.contains(x) {
            return Err(Error::RegionExit { x });
        }
        if x.norm() < POLE_CLEARANCE || (x - 1.0).norm() < POLE_CLEARANCE {
            return Err(Error::DegenerateCurve { x });
        }
        Ok(CurveFamilyPoint { x, region })
    }
}

/// Pole position y0 = u(Q0) plus the sheet sign fixing v(Q0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetedPoint {
    pub y0: Complex64,
    pub sheet: i8,
}

impl SheetedPoint {
    pub fn new(y0: Complex64, sheet: i8) -> Result<Self> {
        if sheet != 1 && sheet != -1 {
            return Err(Error::InvalidSpec("sheet must be +1 or -1".into()));
        }
        Ok(SheetedPoint { y0, sheet })
    }

    pub fn validate_at(&self, x: Complex64) -> Result<()> {
        let y0 = self.y0;
        if y0.norm() < POLE_CLEARANCE
            || (y0 - 1.0).norm() < POLE_CLEARANCE
            || (y0 - x).norm() < POLE_CLEARANCE
        {
            return Err(Error::PoleAtRamification { y0 });
        }
        Ok(())
    }

    /// v(Q0) = sheet * principal sqrt of y0(y0-1)(y0-x).
    pub fn v(&self, x: Complex64) -> Result<Complex64> {
        self.validate_at(x)?;
        Ok(f64::from(self.sheet) * (self.y0 * (self.y0 - 1.0) * (self.y0 - x)).sqrt())
    }

    pub fn flipped(&self) -> Self {
        SheetedPoint {
            y0: self.y0,
            sheet: -self.sheet,
        }
    }
}

/// Fixed (x-independent) realization of the homology basis as rectangle loops
/// in the u-plane.
///
/// The a-loop encloses {0} union the region and excludes 1; the b-loop
/// encloses the region union {1} and excludes 0. Both are validated by winding
/// numbers and clearance checks at construction.
#[derive(Debug, Clone)]
pub struct CycleBasis {
    pub a_loop: PathSpec,
    pub b_loop: PathSpec,
    pub clearance: f64,
}

impl CycleBasis {
    pub fn for_region(region: Region) -> Result<Self> {
        let margin = 0.09;
        let c = region.center.re;
        let r = region.radius;
        let h = region.radius + margin + region.center.im.abs();
        let a_loop = PathSpec::rectangle(-margin, c + r + margin, h, 64)?;
        let b_loop = PathSpec::rectangle(c - r - margin, 1.0 + margin, h, 64)?;
        let clearance = 0.05 * region.clearance_to_degenerate();
        let basis = CycleBasis {
            a_loop,
            b_loop,
            clearance,
        };
        basis.validate(region)?;
        Ok(basis)
    }

    fn validate(&self, region: Region) -> Result<()> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let probes = [
            region.center,
            region.center + Complex64::new(region.radius, 0.0),
            region.center - Complex64::new(region.radius, 0.0),
            region.center + Complex64::new(0.0, region.radius),
            region.center - Complex64::new(0.0, region.radius),
        ];
        let enclosed = |p: &PathSpec, z: Complex64| p.winding_number(z).abs() == 1;
        if !enclosed(&self.a_loop, zero)
            || enclosed(&self.a_loop, one)
            || !probes.iter().all(|&z| enclosed(&self.a_loop, z))
        {
            return Err(Error::InvalidPath(
                "a-loop must enclose {0} and the region but not 1".into(),
            ));
        }
        if !enclosed(&self.b_loop, one)
            || enclosed(&self.b_loop, zero)
            || !probes.iter().all(|&z| enclosed(&self.b_loop, z))
        {
            return Err(Error::InvalidPath(
                "b-loop must enclose {1} and the region but not 0".into(),
            ));
        }
        for p in [&self.a_loop, &self.b_loop] {
            for z in [zero, one] {
                if p.distance_to(z) < self.clearance {
                    return Err(Error::BranchPointCollision {
                        point: z,
                        clearance: self.clearance,
                    });
                }
            }
        }
        Ok(())
    }

    /// Check the loops are usable at a specific modulus x: both wind once
    /// around x and keep clearance from it.
    pub fn validate_at(&self, x: Complex64) -> Result<()> {
        for p in [&self.a_loop, &self.b_loop] {
            if p.winding_number(x).abs() != 1 {
                return Err(Error::InvalidPath(format!(
                    "loop does not wind once around x = {x}"
                )));
            }
            if p.distance_to(x) < self.clearance {
                return Err(Error::BranchPointCollision {
                    point: x,
                    clearance: self.clearance,
                });
            }
        }
        Ok(())
    }
}

/// v = sqrt(u(u-1)(u-x)) continued along a path by the nearest-of-± rule on a
/// reference grid fine enough that consecutive values never jump by a relative
/// 0.5.
#[derive(Debug, Clone)]
pub struct LiftedSqrt {
    path: PathSpec,
    x: Complex64,
    grid: Vec<Complex64>,
    per_segment: usize,
}

fn cubic(u: Complex64, x: Complex64) -> Complex64 {
    u * (u - 1.0) * (u - x)
}

/// The ± principal square root of `w` nearer to `reference`.
pub fn sqrt_near(w: Complex64, reference: Complex64) -> Complex64 {
    let r = w.sqrt();
    if (r - reference).norm() <= (-r - reference).norm() {
        r
    } else {
        -r
    }
}

impl LiftedSqrt {
    /// Continues v along `path` starting from `v_start` (principal root at the
    /// path start when `None`).
    pub fn along_path(
        x: Complex64,
        path: &PathSpec,
        v_start: Option<Complex64>,
        clearance: f64,
    ) -> Result<Self> {
        for bp in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), x] {
            let d = path.distance_to(bp);
            if d < clearance {
                return Err(Error::BranchPointCollision {
                    point: bp,
                    clearance,
                });
            }
        }
        let v0 = v_start.unwrap_or_else(|| cubic(path.point(0.0), x).sqrt());
        let n_seg = path.segment_count();
        let mut per_segment = 256;
        loop {
            let n = n_seg * per_segment;
            let mut grid = Vec::with_capacity(n + 1);
            grid.push(v0);
            let mut prev = v0;
            let mut worst = 0.0_f64;
            let mut worst_t = 0.0;
            for k in 1..=n {
                let t = k as f64 / per_segment as f64;
                let w = sqrt_near(cubic(path.point(t), x), prev);
                let jump = (w - prev).norm() / prev.norm().max(1e-300);
                if jump > worst {
                    worst = jump;
                    worst_t = t;
                }
                grid.push(w);
                prev = w;
            }
            if worst < 0.5 {
                return Ok(LiftedSqrt {
                    path: path.clone(),
                    x,
                    grid,
                    per_segment,
                });
            }
            if per_segment >= 8192 {
                return Err(Error::ContinuationAmbiguity {
                    t: worst_t,
                    jump: worst,
                });
            }
            per_segment *= 2;
        }
    }

    /// Branch-consistent v at path parameter `t` with path point `u`.
    pub fn eval(&self, t: f64, u: Complex64) -> Complex64 {
        let idx = ((t * self.per_segment as f64).round() as usize).min(self.grid.len() - 1);
        sqrt_near(cubic(u, self.x), self.grid[idx])
    }

    pub fn v_start(&self) -> Complex64 {
        self.grid[0]
    }

    /// Ratio v(end)/v(start): +1 for loops enclosing an even number of branch
    /// points, -1 for an odd number.
    pub fn monodromy(&self) -> Complex64 {
        self.grid[self.grid.len() - 1] / self.grid[0]
    }

    pub fn path(&self) -> &PathSpec {
        &self.path
    }
}

/// Integrate `f(u, v) du` along a lifted loop.
pub fn integrate_lifted<F>(f: F, lift: &LiftedSqrt, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(Complex64, Complex64) -> Result<Complex64>,
{
    integrate_path_param(|t, u| f(u, lift.eval(t, u)), lift.path(), spec)
}

/// Periods and the second-kind normalization constant of the curve.
#[derive(Debug, Clone, Copy)]
pub struct PeriodData {
    /// a-period of du/v.
    pub i0: Complex64,
    /// b-period of omega = du/(I0 v); Im(tau) > 0.
    pub tau: Complex64,
    /// Normalization constant of W(., Px): Ix = -(1/omega(Px)) * a-period of
    /// omega/(u - x).
    pub ix: Complex64,
    /// Whether the b-loop was reversed to achieve Im(tau) > 0.
    pub b_flipped: bool,
}

/// Values of omega at the marked points, in the standard local parameters.
#[derive(Debug, Clone, Copy)]
pub struct DifferentialEvaluations {
    pub omega_p0: Complex64,
    pub omega_p1: Complex64,
    pub omega_px: Complex64,
    pub omega_q0: Complex64,
}

/// A curve of the family with its periods computed.
#[derive(Debug, Clone)]
pub struct Curve {
    pub point: CurveFamilyPoint,
    pub periods: PeriodData,
    lift_a: LiftedSqrt,
    quad: QuadratureSpec,
}

impl Curve {
    /// Curve over the default region, basis and tolerances.
    pub fn new(x: Complex64) -> Result<Self> {
        let point = CurveFamilyPoint::new(x)?;
        let basis = CycleBasis::for_region(point.region)?;
        Self::with_basis(point, &basis, &QuadratureSpec::default())
    }

    pub fn with_basis(
        point: CurveFamilyPoint,
        basis: &CycleBasis,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        basis.validate_at(point.x)?;
        let x = point.x;
        let lift_a = LiftedSqrt::along_path(x, &basis.a_loop, None, basis.clearance)?;
        let lift_b = LiftedSqrt::along_path(x, &basis.b_loop, None, basis.clearance)?;

        for lift in [&lift_a, &lift_b] {
            let closure = (lift.monodromy() - 1.0).norm();
            if closure > 1e-10 {
                return Err(Error::ContinuationAmbiguity {
                    t: 0.0,
                    jump: closure,
                });
            }
        }

        let i0 = integrate_lifted(|_, v| Ok(1.0 / v), &lift_a, quad)?;
        let mut tau = integrate_lifted(|_, v| Ok(1.0 / v), &lift_b, quad)? / i0;
        let mut b_flipped = false;
        if tau.im <= 0.0 {
            // reversing the b-loop negates its period
            tau = -tau;
            b_flipped = true;
        }
        if tau.im <= 0.0 {
            return Err(Error::OrientationError { tau });
        }

        // re-verify the a-normalization of omega at a tightened tolerance
        let tight = quad.tightened(1e-2);
        let a_omega = integrate_lifted(|_, v| Ok(1.0 / (i0 * v)), &lift_a, &tight)?;
        let defect = (a_omega - 1.0).norm();
        if defect > 1e-9 {
            return Err(Error::Evaluation(format!(
                "a-period of omega deviates from 1 by {defect:.3e}"
            )));
        }

        let omega_px = 2.0 / (i0 * (x * (x - 1.0)).sqrt());
        let ix = -integrate_lifted(|u, v| Ok(1.0 / (i0 * v * (u - x))), &lift_a, quad)? / omega_px;

        Ok(Curve {
            point,
            periods: PeriodData {
                i0,
                tau,
                ix,
                b_flipped,
            },
            lift_a,
            quad: *quad,
        })
    }

    pub fn x(&self) -> Complex64 {
        self.point.x
    }

    pub fn omega_p0(&self) -> Complex64 {
        2.0 / (self.periods.i0 * self.x().sqrt())
    }

    pub fn omega_p1(&self) -> Complex64 {
        2.0 / (self.periods.i0 * (1.0 - self.x()).sqrt())
    }

    pub fn omega_px(&self) -> Complex64 {
        2.0 / (self.periods.i0 * (self.x() * (self.x() - 1.0)).sqrt())
    }

    pub fn omega_q0(&self, q0: &SheetedPoint) -> Result<Complex64> {
        Ok(1.0 / (self.periods.i0 * q0.v(self.x())?))
    }

    pub fn eval_omega(&self, q0: &SheetedPoint) -> Result<DifferentialEvaluations> {
        Ok(DifferentialEvaluations {
            omega_p0: self.omega_p0(),
            omega_p1: self.omega_p1(),
            omega_px: self.omega_px(),
            omega_q0: self.omega_q0(q0)?,
        })
    }

    /// W(Q0, Px) = (1/(omega(Px)(y0 - x)) + Ix) * omega(Q0).
    pub fn w_q0_px(&self, q0: &SheetedPoint) -> Result<Complex64> {
        let dist = (q0.y0 - self.x()).norm();
        if dist < POLE_CLEARANCE {
            return Err(Error::PoleCollision { dist });
        }
        Ok((1.0 / (self.omega_px() * (q0.y0 - self.x())) + self.periods.ix)
            * self.omega_q0(q0)?)
    }

    /// Normalization constants I0 and I1 computed independently by quadrature
    /// (the production path derives them from Ix via the period relations).
    pub fn compute_i01(&self) -> Result<(Complex64, Complex64)> {
        let i0p = self.periods.i0;
        let iz = -integrate_lifted(|u, v| Ok(1.0 / (i0p * v * u)), &self.lift_a, &self.quad)?
            / self.omega_p0();
        let i1 = -integrate_lifted(
            |u, v| Ok(1.0 / (i0p * v * (u - 1.0))),
            &self.lift_a,
            &self.quad,
        )? / self.omega_p1();
        Ok((iz, i1))
    }

    /// I0 and I1 derived from Ix through the period relations.
    pub fn i01_from_relations(&self) -> (Complex64, Complex64) {
        let ratio = self.periods.ix / self.omega_px();
        let i0sq = self.periods.i0 * self.periods.i0;
        let iz = self.omega_p0() * (ratio - self.x() * i0sq / 4.0);
        let i1 = self.omega_p1() * (ratio - (self.x() - 1.0) * i0sq / 4.0);
        (iz, i1)
    }
}

/// One finite-difference verification of a variational formula.
#[derive(Debug, Clone)]
pub struct RauchResidual {
    pub name: &'static str,
    /// |quotient(h) - analytic| / |analytic|.
    pub relative_residual: f64,
    /// |err(h)| / |err(h/2)|; close to 4 for clean second-order differencing.
    pub half_step_ratio: f64,
}

/// Finite-difference check of the variational formulas for tau, omega(Q0)
/// (y0 fixed), omega(Px) and W(Q0, Px) (y0 fixed) against their closed forms.
pub fn rauch_check(x: Complex64, q0: &SheetedPoint, h: f64) -> Result<Vec<RauchResidual>> {
    let point = CurveFamilyPoint::new(x)?;
    let basis = CycleBasis::for_region(point.region)?;
    // difference quotients of O(1) quantities at h ~ 1e-4 need quadrature noise
    // well below h^3
    let quad = QuadratureSpec::default().tightened(1e-3);

    let center = Curve::with_basis(point, &basis, &quad)?;
    let eval = |t: f64| -> Result<(Complex64, Complex64, Complex64, Complex64)> {
        let xi = x + t;
        let c = Curve::with_basis(CurveFamilyPoint::in_region(xi, point.region)?, &basis, &quad)?;
        // align branch signs with the center curve so quotients see a single
        // analytic branch
        let root_px = sqrt_near(xi * (xi - 1.0), (x * (x - 1.0)).sqrt());
        let om_px = 2.0 / (c.periods.i0 * root_px);
        let vq = sqrt_near(q0.y0 * (q0.y0 - 1.0) * (q0.y0 - xi), q0.v(x)?);
        let om_q0 = 1.0 / (c.periods.i0 * vq);
        let w = (1.0 / (om_px * (q0.y0 - xi)) + c.periods.ix) * om_q0;
        Ok((c.periods.tau, om_q0, om_px, w))
    };

    let (tau_p, q_p, px_p, w_p) = eval(h)?;
    let (tau_m, q_m, px_m, w_m) = eval(-h)?;
    let (tau_p2, q_p2, px_p2, w_p2) = eval(0.5 * h)?;
    let (tau_m2, q_m2, px_m2, w_m2) = eval(-0.5 * h)?;

    let om_px = center.omega_px();
    let om_q0 = center.omega_q0(q0)?;
    let ix = center.periods.ix;
    let w0 = center.w_q0_px(q0)?;
    let y0 = q0.y0;
    let pi_i = Complex64::new(0.0, std::f64::consts::PI);

    let d_tau = pi_i * om_px * om_px;
    let d_omega_q0 = 0.5 * om_px * w0;
    let d_omega_px = 0.5 * om_px * (ix * om_px - 1.0 / x - 1.0 / (x - 1.0));
    // full derivative of W(Q0, Px) in x at fixed y0 (slope term dropped)
    let l1 = -0.5 * (1.0 / y0 + 1.0 / (y0 - 1.0) + 1.0 / (y0 - x));
    let d_w = -om_q0 / (2.0 * om_px)
        * ((1.0 / (y0 - x)) * (1.0 / y0 + 1.0 / (y0 - 1.0) - 1.0 / x - 1.0 / (x - 1.0))
            + 1.0 / x
            - 1.0 / (x - 1.0))
        + 0.5 * ix * ix * om_q0 * om_px
        - 0.5 * om_q0 * ix * (1.0 / y0 + 1.0 / (y0 - 1.0) + 1.0 / x + 1.0 / (x - 1.0))
        - (-om_q0 / (om_px * (y0 - x) * (y0 - x)) + w0 * l1);

    let residual = |name: &'static str,
                    fp: Complex64,
                    fm: Complex64,
                    fp2: Complex64,
                    fm2: Complex64,
                    analytic: Complex64| {
        let coarse = (fp - fm) / (2.0 * h);
        let fine = (fp2 - fm2) / h;
        let e_coarse = (coarse - analytic).norm();
        let e_fine = (fine - analytic).norm();
        RauchResidual {
            name,
            relative_residual: e_coarse / analytic.norm(),
            half_step_ratio: e_coarse / e_fine.max(1e-300),
        }
    };

    Ok(vec![
        residual("dtau/dx", tau_p, tau_m, tau_p2, tau_m2, d_tau),
        residual("domega(Q0)/dx", q_p, q_m, q_p2, q_m2, d_omega_q0),
        residual("domega(Px)/dx", px_p, px_m, px_p2, px_m2, d_omega_px),
        residual("dW(Q0,Px)/dx", w_p, w_m, w_p2, w_m2, d_w),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // 4K(1/sqrt(2)), the classical lemniscatic value of |I0(1/2)|
    const FOUR_K: f64 = 7.416_298_709_205_487;

    #[test]
    fn periods_at_half_match_lemniscatic_values() {
        let curve = Curve::new(c(0.5, 0.0)).unwrap();
        assert!((curve.periods.i0.norm() - FOUR_K).abs() < 1e-8);
        assert!((curve.periods.tau - c(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn omega_square_identity() {
        for x in [c(0.5, 0.0), c(0.35, 0.1), c(0.62, -0.15)] {
            let curve = Curve::new(x).unwrap();
            let p0 = curve.omega_p0();
            let p1 = curve.omega_p1();
            let px = curve.omega_px();
            let sum = p0 * p0 + p1 * p1 + px * px;
            let scale = p0.norm_sqr() + p1.norm_sqr() + px.norm_sqr();
            assert!(sum.norm() < 1e-12 * scale, "x = {x}: {sum}");
        }
    }

    #[test]
    fn normalization_relations() {
        for x in [c(0.5, 0.0), c(0.4, 0.12)] {
            let curve = Curve::new(x).unwrap();
            let (iz, i1) = curve.compute_i01().unwrap();
            let ratio_x = curve.periods.ix / curve.omega_px();
            let ratio_0 = iz / curve.omega_p0();
            let ratio_1 = i1 / curve.omega_p1();
            let i0sq = curve.periods.i0 * curve.periods.i0;
            let scale = ratio_x.norm().max(1.0);
            assert!((ratio_0 - ratio_x + x * i0sq / 4.0).norm() < 1e-10 * scale);
            assert!((ratio_1 - ratio_x + (x - 1.0) * i0sq / 4.0).norm() < 1e-10 * scale);
            assert!((ratio_0 - ratio_1 + i0sq / 4.0).norm() < 1e-10 * scale);
            // the relation-derived values must agree with the quadrature ones
            let (iz_r, i1_r) = curve.i01_from_relations();
            assert!((iz - iz_r).norm() < 1e-9 * iz.norm().max(1.0));
            assert!((i1 - i1_r).norm() < 1e-9 * i1.norm().max(1.0));
        }
    }

    #[test]
    fn lift_closure_and_monodromy() {
        let x = c(0.5, 0.0);
        let basis = CycleBasis::for_region(Region::default_region()).unwrap();
        let lift = LiftedSqrt::along_path(x, &basis.a_loop, None, basis.clearance).unwrap();
        assert!((lift.monodromy() - 1.0).norm() < 1e-10);

        // a loop around 0 only: odd monodromy
        let small = PathSpec::rectangle(-0.05, 0.05, 0.05, 16).unwrap();
        let lift0 = LiftedSqrt::along_path(x, &small, None, 0.01).unwrap();
        assert!((lift0.monodromy() + 1.0).norm() < 1e-10);
    }

    #[test]
    fn sheet_flip_negates_omega_q0() {
        let curve = Curve::new(c(0.5, 0.0)).unwrap();
        let q0 = SheetedPoint::new(c(2.0, 0.0), 1).unwrap();
        let a = curve.omega_q0(&q0).unwrap();
        let b = curve.omega_q0(&q0.flipped()).unwrap();
        assert!((a + b).norm() < 1e-15);
        let wa = curve.w_q0_px(&q0).unwrap();
        let wb = curve.w_q0_px(&q0.flipped()).unwrap();
        assert!((wa + wb).norm() < 1e-15);
    }

    #[test]
    fn w_pole_coefficient_limit() {
        // as y0 -> x, W(Q0,Px)*(y0-x) -> omega(Q0)/omega(Px)
        let curve = Curve::new(c(0.5, 0.0)).unwrap();
        let probe = |eps: f64| {
            let q0 = SheetedPoint::new(c(0.5 + eps, 0.0), 1).unwrap();
            let w = curve.w_q0_px(&q0).unwrap();
            let lead = curve.omega_q0(&q0).unwrap() / curve.omega_px();
            (w * c(eps, 0.0) - lead).norm() / lead.norm()
        };
        let coarse = probe(1e-2);
        let fine = probe(1e-3);
        assert!(fine < 0.2 * coarse, "coarse {coarse:.2e} fine {fine:.2e}");
    }

    #[test]
    fn rejects_pole_at_ramification() {
        let curve = Curve::new(c(0.5, 0.0)).unwrap();
        for bad in [c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)] {
            let q0 = SheetedPoint::new(bad, 1).unwrap();
            assert!(matches!(
                curve.omega_q0(&q0),
                Err(Error::PoleAtRamification { .. })
            ));
        }
    }

    #[test]
    fn rauch_residuals_small_with_second_order_ratio() {
        let q0 = SheetedPoint::new(c(2.0, 0.0), 1).unwrap();
        let report = rauch_check(c(0.5, 0.0), &q0, 1e-4).unwrap();
        for r in &report {
            assert!(
                r.relative_residual < 1e-6,
                "{}: residual {:.3e}",
                r.name,
                r.relative_residual
            );
            assert!(
                (r.half_step_ratio - 4.0).abs() < 0.5,
                "{}: ratio {:.3}",
                r.name,
                r.half_step_ratio
            );
        }
    }
}
