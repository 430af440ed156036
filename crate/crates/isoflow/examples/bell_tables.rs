//! Bell-type polynomial tables over the branch-point power sums.
//!
//! Prints L_0..L_8 at a sample (x, y0) computed by the production recursion,
//! cross-checks each entry against the explicit partition sum, and evaluates
//! the rational derivative combination D_n that drives the flow equations.

use num_complex::Complex64;

use isoflow::bell::{bell_explicit, ratio_derivative, BellTable};

fn main() -> Result<(), isoflow::Error> {
    let x = Complex64::new(0.5, 0.0);
    let y0 = Complex64::new(2.0, 0.0);
    let top = 8;

    let table = BellTable::at(x, y0, top)?;
    println!("L_l at x = {x}, y0 = {y0}:");
    println!("{:>3} {:>28} {:>14}", "l", "L_l (recursion)", "vs partition");
    for l in 0..=top {
        let recursive = table.l(l);
        let explicit = bell_explicit(l, &table.sigma)?;
        println!(
            "{:>3} {:>14.8}{:+.8}i {:>14.2e}",
            l,
            recursive.re,
            recursive.im,
            (recursive - explicit).norm()
        );
    }

    println!("\nD_n = sum_k n!/(n-k)! L_(n-k) / (x - y0)^(k+1):");
    for n in 0..4 {
        let d = ratio_derivative(n, x, y0, &table)?;
        println!("  D_{n} = {:.10}{:+.10}i", d.re, d.im);
    }
    Ok(())
}
