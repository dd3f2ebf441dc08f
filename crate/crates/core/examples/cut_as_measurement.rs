//! Interprets graded formulas as operators and states, and compares the
//! probability of a quantum cut with a projective measurement.
//!
//! `cargo run --example cut_as_measurement`

use lq::evaluation::{GradeEnv, MdMode};
use lq::hilbert::{cut_probability, interpret_operator, interpret_state, measure, weak_expectation};
use lq::syntax::{parse_formula, DeclarationSet};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let decls = DeclarationSet::new().with_atoms(&["p0", "p1", "A", "B"]).with_grades(&["z0", "z1"]);
    let env = GradeEnv::qubit(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), MdMode::Norm);

    let qubit = parse_formula("p0 &[z0,z1] p1", &decls)?;
    let state = interpret_state(&qubit, &env)?;
    println!("{qubit}  ~>  {:?}", state.amplitudes());
    println!("as operator: {}", interpret_operator(&qubit, &env)?.matrix());

    for i in 0..2 {
        let cut = cut_probability(i, &env)?;
        let (m, _) = measure(&state, i)?;
        println!("p{i}: cut {cut:.6}  measurement {m:.6}  weak expectation {:.6}", weak_expectation(i, &env)?);
    }

    for text in ["Q_A @ Q_B", "Q_A @ (B^ & B)", "(A par B^) & (A^ par B)"] {
        let f = parse_formula(text, &decls)?;
        println!("{text:<26} ~>  {:?}", interpret_state(&f, &env)?.amplitudes());
    }
    Ok(())
}
