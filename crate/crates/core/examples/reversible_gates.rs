//! NOT, square root of NOT and the Toffoli-based AND/OR gates, in exact
//! Gaussian-rational arithmetic and in floating point.
//!
//! `cargo run --example reversible_gates`

use lq::hilbert::{and_gate, gate_apply, or_gate, sqrt_not_gate, ExactComplex, Gate, StateVector};
use num_rational::Ratio;

fn basis(n: u32, i: usize) -> Vec<ExactComplex> {
    let mut v = vec![ExactComplex::new(Ratio::from_integer(0), Ratio::from_integer(0)); 1 << n];
    v[i] = ExactComplex::new(Ratio::from_integer(1), Ratio::from_integer(0));
    v
}

fn show(v: &[ExactComplex]) -> String {
    v.iter().map(|z| format!("({} + {}i)", z.re, z.im)).collect::<Vec<_>>().join(", ")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let half = sqrt_not_gate(&basis(1, 0))?;
    println!("sqrt(NOT)|0>       = {}", show(&half));
    println!("sqrt(NOT)^2 |0>    = {}", show(&sqrt_not_gate(&half)?));

    println!("\n x y | AND out      | OR out");
    for x in 0..2 {
        for y in 0..2 {
            let a = and_gate(&basis(1, x), &basis(1, y))?;
            let o = or_gate(&basis(1, x), &basis(1, y))?;
            let idx = |v: &[ExactComplex]| v.iter().position(|z| z.re == Ratio::from_integer(1)).unwrap_or(usize::MAX);
            println!(" {x} {y} | |{:03b}>       | |{:03b}>", idx(&a), idx(&o));
        }
    }

    let out = gate_apply(Gate::And, &[StateVector::cat(), StateVector::cat()])?;
    println!("\nAND(|+>, |+>) = {:?}", out.amplitudes());
    Ok(())
}
