//! Theta-functional solution of the Boussinesq equation from curve data.
//!
//! Builds the wave numbers U = -omega(Q0), V = -omega(Q0) L_1 from a curve and
//! pole, solves for the additive constant c by least squares over a grid, and
//! verifies that u_hat(X, Y) = 2 d^2/dX^2 ln theta(XU + YV + z0) + c satisfies
//! 3 u_YY + 6 u_X^2 + 6 u u_XX + u_XXXX = 0 to near machine precision.

use num_complex::Complex64;

use isoflow::boussinesq::{
    boussinesq_residual, compute_wave_data, effectivization_diagnostic,
    periodicity_lattice_check, solve_c, u_hat, Direction, GridSpec, ThetaParams,
};
use isoflow::curve::{Curve, SheetedPoint};

fn main() -> Result<(), isoflow::Error> {
    let curve = Curve::new(Complex64::new(0.5, 0.0))?;
    let q0 = SheetedPoint::new(Complex64::new(2.0, 0.0), 1)?;
    let mut wave = compute_wave_data(&curve, &q0, Complex64::new(0.3, 0.0))?;
    let params = ThetaParams::for_tau(wave.tau)?;

    println!("U = {:.12}{:+.12}i", wave.u.re, wave.u.im);
    println!("V = {:.12}{:+.12}i", wave.v.re, wave.v.im);
    println!("tau = {:.12}{:+.12}i", wave.tau.re, wave.tau.im);

    let grid = GridSpec::one_period(&wave, 64, 64)?;
    let (c, spread) = solve_c(&wave, &params, &grid)?;
    wave.c = Some(c);
    println!("c = {:.12}{:+.12}i (pointwise spread {:.2e})", c.re, c.im, spread);

    let residual = boussinesq_residual(&wave, &params, &grid)?;
    println!("max PDE residual on 64x64 grid: {:.2e}", residual);

    // u_hat is X-periodic with period 1/|Re U| on this real curve; the shift
    // T U must land on the lattice Z + tau Z
    let t = 1.0 / wave.u.re.abs();
    let lattice = periodicity_lattice_check(&wave, t, Direction::X)?;
    println!(
        "T = {t:.6}: T*U = {}{:+}tau + {:.2e}, pass = {}",
        lattice.m, lattice.n, lattice.distance, lattice.pass
    );

    let (rho_plus, rho_minus) = effectivization_diagnostic(&wave, &params)?;
    println!(
        "dispersion diagnostic rho = {:.8}{:+.8}i / {:.8}{:+.8}i",
        rho_plus.re, rho_plus.im, rho_minus.re, rho_minus.im
    );

    println!("\nsample values on one period:");
    for k in 0..5 {
        let xx = k as f64 * t / 4.0;
        let v = u_hat(xx, 0.0, &wave, &params, 0, 0)?;
        println!("  u_hat({xx:>9.5}, 0) = {:>12.8}{:+.2e}i", v.re, v.im);
    }
    Ok(())
}
