//! Bounded backward proof search, used to look for derivations of the
//! idempotence sequents of `@`.
//!
//! `cargo run --example proof_search`

use lq::calculus::{bounded_search, make_ruleset, SearchOutcome};
use lq::syntax::{parse_sequent, render_derivation, DeclarationSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let decls = DeclarationSet::new().with_atoms(&["A"]);
    for goal in ["Q_A @ Q_A |- Q_A", "Q_A |- Q_A @ Q_A", "A & A^ |- A"] {
        let g = parse_sequent(goal, &decls)?;
        for rs in ["L2q", "L2q+weakening+contraction"] {
            match bounded_search(&make_ruleset(rs)?, &g, 8) {
                SearchOutcome::Found(d) => println!("{goal}  under {rs}: found\n{}", render_derivation(&d)),
                SearchOutcome::Exhausted(n) => println!("{goal}  under {rs}: nothing up to height {n}"),
            }
        }
    }
    Ok(())
}
