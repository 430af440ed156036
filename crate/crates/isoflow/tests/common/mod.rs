//! Shared oracles for the integration suites: complete elliptic integrals via
//! the arithmetic-geometric mean, independent of the contour quadrature used
//! by the library.

#![allow(dead_code)]

use num_complex::Complex64;

/// Complete elliptic integral K(k) (modulus convention) through the AGM:
/// K(k) = pi / (2 AGM(1, sqrt(1 - k^2))).
pub fn elliptic_k(k: f64) -> f64 {
    assert!((0.0..1.0).contains(&k));
    let mut a = 1.0f64;
    let mut b = (1.0 - k * k).sqrt();
    for _ in 0..64 {
        if (a - b).abs() < 1e-17 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    std::f64::consts::PI / (2.0 * a)
}

/// Oracle for the modulus of the lattice of v^2 = u(u-1)(u-x) at real
/// 0 < x < 1: tau = i K(sqrt(1-x)) / K(sqrt(x)).
pub fn tau_oracle(x: f64) -> Complex64 {
    assert!(0.0 < x && x < 1.0);
    Complex64::new(0.0, elliptic_k((1.0 - x).sqrt()) / elliptic_k(x.sqrt()))
}

/// |I0| at x = 1/2: 4 K(1/sqrt(2)).
pub fn four_k_half() -> f64 {
    4.0 * elliptic_k(0.5f64.sqrt())
}
