//! Difference-quotient derivatives with convergence diagnostics.

use num_complex::Complex64;

use crate::Result;

/// A central difference quotient at two step sizes plus the Richardson
/// extrapolation of the pair.
///
/// For a function with a convergent h^2 error expansion the half-step quotient
/// is about four times closer to the derivative than the full-step one;
/// [`CentralDifference::convergence_ratio`] exposes that ratio so callers can
/// verify the differencing regime is clean (noise-free and asymptotic).
#[derive(Debug, Clone, Copy)]
pub struct CentralDifference {
    /// Quotient (f(x+h) - f(x-h)) / 2h.
    pub coarse: Complex64,
    /// Quotient at step h/2.
    pub fine: Complex64,
    /// Richardson extrapolation (4*fine - coarse) / 3, accurate to O(h^4).
    pub extrapolated: Complex64,
    pub step: f64,
}

impl CentralDifference {
    /// |coarse - d| / |fine - d| against the extrapolated value; close to 4
    /// when the h^2 term dominates.
    pub fn convergence_ratio(&self) -> f64 {
        let e_coarse = (self.coarse - self.extrapolated).norm();
        let e_fine = (self.fine - self.extrapolated).norm();
        if e_fine == 0.0 {
            f64::INFINITY
        } else {
            e_coarse / e_fine
        }
    }
}

/// Central difference of `f` at `x` with step `h`, evaluated at `h` and `h/2`.
pub fn central_difference<F>(mut f: F, x: f64, h: f64) -> Result<CentralDifference>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let quot = |f: &mut F, h: f64| -> Result<Complex64> {
        Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
    };
    let coarse = quot(&mut f, h)?;
    let fine = quot(&mut f, 0.5 * h)?;
    Ok(CentralDifference {
        coarse,
        fine,
        extrapolated: (4.0 * fine - coarse) / 3.0,
        step: h,
    })
}
