//! Builds the projector and weak-operator lattices, audits their laws and
//! writes Hasse diagrams.
//!
//! `cargo run --example lattice_audit [out_dir]`

use lq::evaluation::{GradeEnv, MdMode};
use lq::lattice::{
    benzene_default, check_laws, cross_validate, hasse_dot, l2q4, lm2, lq2, proj2, proj_closure_qubit, Law,
};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::args().nth(1);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cat = GradeEnv::qubit(Complex64::new(h, 0.0), Complex64::new(h, 0.0), MdMode::Norm);
    let wide = GradeEnv::qubit(Complex64::new(0.8, 0.0), Complex64::new(0.6, 0.0), MdMode::Norm);
    let narrow = GradeEnv::qubit(Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0), MdMode::Norm);

    let lattices = [proj2()?, proj_closure_qubit()?, benzene_default()?, lq2(&cat)?, lm2(&cat)?, l2q4(&wide, &narrow)?];
    for l in &lattices {
        let labels: Vec<&str> = l.elements().iter().map(|e| e.label.as_str()).collect();
        println!("{} {labels:?}", l.name());
        let report = check_laws(l);
        for law in Law::ALL {
            let v = report.get(law);
            match (&v.note, &v.first) {
                (Some(note), _) => println!("  {:<18} n/a: {note}", law.name()),
                (None, None) => println!("  {:<18} pass", law.name()),
                (None, Some(ce)) => println!(
                    "  {:<18} fail at {:?}: {} vs {} ({} counterexamples)",
                    law.name(),
                    ce.labels,
                    ce.lhs.as_deref().unwrap_or("-"),
                    ce.rhs.as_deref().unwrap_or("-"),
                    v.counterexample_count
                ),
            }
        }
        let checks = cross_validate(l);
        if !checks.is_empty() {
            println!("  payload meets agree: {}/{}", checks.iter().filter(|c| c.ok).count(), checks.len());
        }
        if let Some(dir) = &out_dir {
            let path = std::path::Path::new(dir).join(format!("{}.dot", l.name()));
            std::fs::write(&path, hasse_dot(l))?;
            println!("  wrote {}", path.display());
        }
    }
    Ok(())
}
