//! Periods and normalized differential data across a sweep of moduli.
//!
//! For each x in a small sweep the example prints I0 (the a-period of du/v),
//! the modulus tau of the normalized holomorphic differential, and the values
//! of omega at the finite ramification points, then checks the quadratic
//! identity omega^2(P0) + omega^2(P1) + omega^2(Px) = 0.

use num_complex::Complex64;

use isoflow::curve::{Curve, SheetedPoint};

fn main() -> Result<(), isoflow::Error> {
    let q0 = SheetedPoint::new(Complex64::new(2.0, 0.0), 1)?;

    println!("{:>24} {:>24} {:>24} {:>12}", "x", "I0", "tau", "identity");
    for k in 0..5 {
        let x = Complex64::new(0.3 + 0.1 * k as f64, 0.02 * k as f64);
        let curve = Curve::new(x)?;
        let p = &curve.periods;

        let e = curve.eval_omega(&q0)?;
        let identity = e.omega_p0 * e.omega_p0 + e.omega_p1 * e.omega_p1 + e.omega_px * e.omega_px;

        println!(
            "{:>11.4}{:+.4}i {:>11.6}{:+.6}i {:>11.6}{:+.6}i {:>12.2e}",
            x.re,
            x.im,
            p.i0.re,
            p.i0.im,
            p.tau.re,
            p.tau.im,
            identity.norm()
        );
    }

    // at x = 1/2 the curve has the square period lattice: tau = i
    let lemniscatic = Curve::new(Complex64::new(0.5, 0.0))?;
    println!(
        "\nx = 1/2: tau = {:.12}{:+.12}i (expected i), |I0| = {:.12}",
        lemniscatic.periods.tau.re,
        lemniscatic.periods.tau.im,
        lemniscatic.periods.i0.norm()
    );

    // the independent a-periods of omega/(u - e) agree with the rational
    // relations that tie them to Ix
    let (i0e, i1e) = lemniscatic.compute_i01()?;
    let (i0r, i1r) = lemniscatic.i01_from_relations();
    println!(
        "I^0 quadrature vs relation: {:.2e}, I^1: {:.2e}",
        (i0e - i0r).norm(),
        (i1e - i1r).norm()
    );
    Ok(())
}
