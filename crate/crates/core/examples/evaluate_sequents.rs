//! Truth values of graded sequents, the Meta Data check, and the
//! comparison between T-norms and the combination used for qubits.
//!
//! `cargo run --example evaluate_sequents`

use lq::evaluation::{evaluate, h_combine, md_check, t_norm, GradeEnv, MdMode, TNorm};
use lq::syntax::{parse_sequent, DeclarationSet};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let decls = DeclarationSet::new().with_atoms(&["p0", "p1"]).with_grades(&["z0", "z1"]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let env = GradeEnv::qubit(Complex64::new(h, 0.0), Complex64::new(0.0, h), MdMode::Strict);
    println!("{:?}", md_check(&env)?);

    for text in ["p0 |- p0", "p0 &[z0,z1] p1 |- p0", "p0 &[z0,z1] p1 |- p0 &[z0,z1] p1", "p0 |- p1"] {
        let s = parse_sequent(text, &decls)?;
        println!("{text:<36} {:.12}", evaluate(&s, &env)?);
    }

    let lopsided = GradeEnv::qubit(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), MdMode::Norm);
    let s = parse_sequent("p0 &[z0,z1] p1 |- p1", &decls)?;
    println!("with z = (0.6, 0.8i): {}", evaluate(&s, &lopsided)?);

    let (v0, v1) = (0.5, 0.5);
    for k in TNorm::ALL {
        println!("{k:?}({v0}, {v1}) = {}", t_norm(k, v0, v1)?);
    }
    let (v, regime) = h_combine(v0, v1)?;
    println!("h({v0}, {v1}) = {v} ({regime:?})");
    Ok(())
}
