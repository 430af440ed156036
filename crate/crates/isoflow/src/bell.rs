//! Power sums Sigma_k over the finite branch points and the Bell-type
//! polynomials L_l built from them, with the recursion as the production path
//! and the explicit partition sum as the cross-check oracle.

use num_complex::Complex64;

use crate::curve::POLE_CLEARANCE;
use crate::{Error, Result};

/// Hard bound on the partition enumeration in [`bell_explicit`].
pub const PARTITION_BOUND: usize = 12;

/// Sigma_1..Sigma_N at a given (x, y0).
#[derive(Debug, Clone)]
pub struct SigmaVector {
    values: Vec<Complex64>,
    pub x: Complex64,
    pub y0: Complex64,
}

impl SigmaVector {
    /// Sigma_k = (-y0)^{-k} + (1-y0)^{-k} + (x-y0)^{-k} for k = 1..=n.
    pub fn new(x: Complex64, y0: Complex64, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidSpec("sigma vector needs N >= 1".into()));
        }
        if y0.norm() < POLE_CLEARANCE
            || (y0 - 1.0).norm() < POLE_CLEARANCE
            || (y0 - x).norm() < POLE_CLEARANCE
        {
            return Err(Error::PoleAtRamification { y0 });
        }
        let bases = [-y0, 1.0 - y0, x - y0];
        let mut powers = [Complex64::new(1.0, 0.0); 3];
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            for (p, b) in powers.iter_mut().zip(bases) {
                *p /= b;
            }
            values.push(powers.iter().sum());
        }
        Ok(SigmaVector { values, x, y0 })
    }

    /// Direct construction from arbitrary values (test oracles).
    pub fn from_values(values: Vec<Complex64>) -> Self {
        SigmaVector {
            values,
            x: Complex64::default(),
            y0: Complex64::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sigma_k, 1-based.
    pub fn get(&self, k: usize) -> Complex64 {
        self.values[k - 1]
    }
}

/// L_0..L_N for a given Sigma vector.
#[derive(Debug, Clone)]
pub struct BellTable {
    values: Vec<Complex64>,
    pub sigma: SigmaVector,
}

impl BellTable {
    /// Builds the table through the recursion
    /// L_{n+1} = sum_{k=0}^{n} n!/(2 (n-k)!) L_{n-k} Sigma_{k+1}.
    pub fn recursive(sigma: SigmaVector, n: usize) -> Result<Self> {
        if sigma.len() < n {
            return Err(Error::InvalidSpec(format!(
                "sigma vector too short: {} < {}",
                sigma.len(),
                n
            )));
        }
        let mut values = vec![Complex64::new(1.0, 0.0)];
        for m in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            // n!/(n-k)! accumulated as a falling factorial
            let mut fall = 1.0;
            for k in 0..=m {
                s += fall / 2.0 * values[m - k] * sigma.get(k + 1);
                fall *= (m - k) as f64;
            }
            values.push(s);
        }
        Ok(BellTable { values, sigma })
    }

    /// Table at (x, y0) up to L_n.
    pub fn at(x: Complex64, y0: Complex64, n: usize) -> Result<Self> {
        Self::recursive(SigmaVector::new(x, y0, n.max(1))?, n)
    }

    /// L_k, 0-based; panics when k exceeds the table.
    pub fn l(&self, k: usize) -> Complex64 {
        self.values[k]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// L_l by explicit enumeration of the partitions p_1 + 2 p_2 + ... + l p_l = l:
///
/// L_l = l! * sum over partitions of
///       prod_k Sigma_k^{p_k} / (2^{sum p_k} * prod_k p_k! * prod_k k^{p_k}).
pub fn bell_explicit(l: usize, sigma: &SigmaVector) -> Result<Complex64> {
    if l > PARTITION_BOUND {
        return Err(Error::PartitionBoundExceeded { l });
    }
    if l == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if sigma.len() < l {
        return Err(Error::InvalidSpec("sigma vector shorter than l".into()));
    }
    let factorial = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();

    let mut total = Complex64::new(0.0, 0.0);
    // parts[k-1] = p_k; enumerate by assigning p_k for k = l down to 1
    let mut parts = vec![0usize; l];
    fn walk(
        k: usize,
        remaining: usize,
        parts: &mut Vec<usize>,
        sigma: &SigmaVector,
        factorial: &dyn Fn(usize) -> f64,
        total: &mut Complex64,
    ) {
        if k == 0 {
            if remaining != 0 {
                return;
            }
            let mut term = Complex64::new(1.0, 0.0);
            let mut weight = 1.0;
            let mut count = 0usize;
            for (idx, &p) in parts.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let kk = idx + 1;
                term *= sigma.get(kk).powu(p as u32);
                weight *= factorial(p) * (kk as f64).powi(p as i32);
                count += p;
            }
            *total += term / (weight * 2f64.powi(count as i32));
            return;
        }
        for p in 0..=(remaining / k) {
            parts[k - 1] = p;
            walk(k - 1, remaining - k * p, parts, sigma, factorial, total);
        }
        parts[k - 1] = 0;
    }
    walk(l, l, &mut parts, sigma, &factorial, &mut total);
    Ok(factorial(l) * total)
}

/// D_n = (1/omega(Q0)) d^n/dy0^n { omega(Q0)/(x - y0) }
///     = sum_{k=0}^{n} n!/(n-k)! L_{n-k} / (x - y0)^{k+1},
/// a pure rational function of (x, y0) — the omega factor cancels.
pub fn ratio_derivative(n: usize, x: Complex64, y0: Complex64, bell: &BellTable) -> Result<Complex64> {
    let dist = (x - y0).norm();
    if dist < POLE_CLEARANCE {
        return Err(Error::PoleCollision { dist });
    }
    if bell.len() <= n {
        return Err(Error::InvalidSpec("bell table shorter than n".into()));
    }
    let d = x - y0;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut fall = 1.0; // n!/(n-k)!
    let mut dpow = d;
    for k in 0..=n {
        sum += fall * bell.l(n - k) / dpow;
        fall *= (n - k) as f64;
        dpow *= d;
    }
    Ok(sum)
}
