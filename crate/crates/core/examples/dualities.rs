//! The three dualities on sequents.
//!
//! `cargo run --example dualities`

use lq::calculus::{perp_dual_sequent, perp_prime_dual_sequent, star_dual};
use lq::syntax::{parse_sequent, DeclarationSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let decls = DeclarationSet::new().with_atoms(&["p0", "p1", "A", "B"]).with_grades(&["z0", "z1"]);

    let s = parse_sequent("|-{z0} p0", &decls)?;
    let d = star_dual(&s)?;
    println!("star:      {s}  ~>  {d}  ~>  {}", star_dual(&d)?);

    let s = parse_sequent("A & B^ |- Q_A @ Q_B, A par B", &decls)?;
    println!("perp:      {s}  ~>  {}", perp_dual_sequent(&s)?);

    let s = parse_sequent("|-{z0} p0", &decls)?;
    println!("perpprime: {s}  ~>  {}", perp_prime_dual_sequent(&s, &decls)?);

    let s = parse_sequent("|- p0 &[z0,z1] p1", &decls)?;
    let d = perp_prime_dual_sequent(&s, &decls)?;
    println!("perpprime: {s}  ~>  {d}  ~>  {}", perp_prime_dual_sequent(&d, &decls)?);
    Ok(())
}
