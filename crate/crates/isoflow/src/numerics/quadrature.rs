//! Adaptive contour quadrature on the path parameter.
//!
//! Gauss-Kronrod 7-15 panels with bisection on the parameter interval of each
//! path segment. The integrand is a complex-valued function of the complex
//! path point; a parameter-aware variant exists for integrands that need to
//! know where along the path they are evaluated (branch-tracked square roots).

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::{Error, Result};

use super::path::PathSpec;

/// Total number of `integrate_path`/`integrate_path_param` invocations.
///
/// Used by tests to assert that rational code paths perform no quadrature.
pub static QUADRATURE_CALLS: AtomicU64 = AtomicU64::new(0);

/// Tolerances and subdivision budget for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidSpec("quadrature tolerances must be > 0".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidSpec("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }

    /// A tighter copy for difference-quotient work.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadratureSpec {
            rel_tol: (self.rel_tol * factor).max(1e-15),
            abs_tol: (self.abs_tol * factor).max(1e-16),
            max_subdivisions: self.max_subdivisions * 2,
        }
    }
}

// Gauss-Kronrod 7-15 nodes on [-1, 1] (positive half; symmetric).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of one Gauss-Kronrod panel.
struct Panel {
    integral: Complex64,
    error: f64,
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (j, &xj) in XGK.iter().enumerate() {
        if xj == 0.0 {
            let v = f(center)?;
            kronrod += WGK[j] * v;
            gauss += WG[3] * v;
        } else {
            let v1 = f(center - half * xj)?;
            let v2 = f(center + half * xj)?;
            kronrod += WGK[j] * (v1 + v2);
            if j % 2 == 1 {
                gauss += WG[j / 2] * (v1 + v2);
            }
        }
    }
    kronrod *= half;
    gauss *= half;
    Ok(Panel {
        integral: kronrod,
        error: (kronrod - gauss).norm(),
    })
}

/// Integrates `f(u) du` along `path` adaptively.
///
/// The achieved error estimate is bounded by `max(abs_tol, rel_tol * |result|)`
/// on success.
pub fn integrate_path<F>(f: F, path: &PathSpec, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    integrate_path_param(|_, u| f(u), path, spec)
}

/// Like [`integrate_path`] but the integrand also receives the path parameter
/// `t in [0, segment_count]`, for integrands carrying path-dependent branch
/// choices.
pub fn integrate_path_param<F>(f: F, path: &PathSpec, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64, Complex64) -> Result<Complex64>,
{
    QUADRATURE_CALLS.fetch_add(1, Ordering::Relaxed);
    spec.validate()?;

    // integrand on the path parameter: f(t, u(t)) * u'(t)
    let mut g = |t: f64| -> Result<Complex64> {
        let i = (t.floor() as usize).min(path.segment_count() - 1);
        let (a, b) = path.segment(i);
        let u = a + (b - a) * (t - i as f64);
        Ok(f(t, u)? * (b - a))
    };

    // work list of (a, b, panel); refine the worst panel until tolerances hold
    let mut intervals: Vec<(f64, f64, Panel)> = Vec::new();
    for i in 0..path.segment_count() {
        let (a, b) = (i as f64, (i + 1) as f64);
        let p = gk15(&mut g, a, b)?;
        intervals.push((a, b, p));
    }

    let mut subdivisions = 0usize;
    loop {
        let total: Complex64 = intervals.iter().map(|(_, _, p)| p.integral).sum();
        let err: f64 = intervals.iter().map(|(_, _, p)| p.error).sum();
        let target = spec.abs_tol.max(spec.rel_tol * total.norm());
        if err <= target {
            return Ok(total);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                achieved: err,
                target,
                subdivisions,
            });
        }
        // split the interval with the largest error estimate
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .2.error.total_cmp(&b.1 .2.error))
            .map(|(i, _)| i)
            .expect("non-empty interval list");
        let (a, b, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid - a < 1e-14 {
            return Err(Error::NonConvergence {
                achieved: err,
                target,
                subdivisions,
            });
        }
        intervals.push((a, mid, gk15(&mut g, a, mid)?));
        intervals.push((mid, b, gk15(&mut g, mid, b)?));
        subdivisions += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn residue_of_simple_pole() {
        // square contour around the origin; residue theorem gives 2*pi*i
        let path = PathSpec::rectangle(-1.0, 1.0, 1.0, 16).unwrap();
        let v = integrate_path(|u| Ok(1.0 / u), &path, &spec()).unwrap();
        assert!((v - c(0.0, 2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn polynomial_antiderivative() {
        let path = PathSpec::polyline(vec![c(0.0, 0.0), c(1.0, 0.0)], 16).unwrap();
        let v = integrate_path(Ok, &path, &spec()).unwrap();
        assert!((v - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn beta_integral_with_endpoint_substitution() {
        // int_0^1 du / sqrt(u(1-u)) = pi. Endpoint singularities are removed by
        // splitting at 1/2 and substituting u = s^2 (resp. 1-u = s^2), which
        // turns each half into int_0^{1/sqrt 2} 2 ds / sqrt(1 - s^2).
        let s_max = 1.0 / 2f64.sqrt();
        let path = PathSpec::polyline(vec![c(0.0, 0.0), c(s_max, 0.0)], 16).unwrap();
        let half = integrate_path(
            |s| Ok(2.0 / (1.0 - s * s).sqrt()),
            &path,
            &spec(),
        )
        .unwrap();
        let v = half * 2.0;
        assert!((v - c(PI, 0.0)).norm() < 1e-10, "got {v}");
    }

    #[test]
    fn path_additivity() {
        let whole = PathSpec::polyline(vec![c(0.0, 0.0), c(1.0, 1.0)], 16).unwrap();
        let first = PathSpec::polyline(vec![c(0.0, 0.0), c(0.5, 0.5)], 16).unwrap();
        let second = PathSpec::polyline(vec![c(0.5, 0.5), c(1.0, 1.0)], 16).unwrap();
        let f = |u: Complex64| Ok((u * u).exp());
        let a = integrate_path(f, &whole, &spec()).unwrap();
        let b = integrate_path(f, &first, &spec()).unwrap()
            + integrate_path(f, &second, &spec()).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn orientation_negates() {
        let path = PathSpec::rectangle(-1.0, 1.0, 1.0, 16).unwrap();
        let f = |u: Complex64| Ok(1.0 / (u - c(0.2, 0.1)));
        let a = integrate_path(f, &path, &spec()).unwrap();
        let b = integrate_path(f, &path.reversed(), &spec()).unwrap();
        assert!((a + b).norm() < 1e-10);
    }

    #[test]
    fn analytic_closed_loop_vanishes() {
        let path = PathSpec::rectangle(-1.0, 1.0, 1.0, 16).unwrap();
        let v = integrate_path(|u| Ok(u.exp() + u * u), &path, &spec()).unwrap();
        assert!(v.norm() < spec().abs_tol * 10.0);
    }

    #[test]
    fn nonconvergence_is_reported() {
        // genuine non-integrable singularity on the path
        let path = PathSpec::polyline(vec![c(-1.0, 0.0), c(1.0, 0.0)], 16).unwrap();
        let tight = QuadratureSpec {
            max_subdivisions: 20,
            ..spec()
        };
        let r = integrate_path(|u| Ok(1.0 / (u * u)), &path, &tight);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
