//! Checks a hand-written derivation under a few rulesets.
//!
//! `cargo run --example check_proof`

use lq::calculus::{check_derivation, make_ruleset};
use lq::syntax::parse_script;

const SCRIPT: &str = "\
atom A, B;
qubit Q_A = A;
qubit Q_B = B;

proof swap in L2q {
  1: A |- A by id-axiom();
  2: B |- B by id-axiom();
  3: Q_A @ Q_B |- A, B by at-refl(1, 2);
  4: Q_A @ Q_B |- B, A by exch-r(3);
  5: A^ |- A^ by id-axiom();
  6: B^ |- B^ by id-axiom();
  7: Q_A @ Q_B |- A^, B^ by at-refl(5, 6);
  8: Q_A @ Q_B |- B^, A^ by exch-r(7);
  9: Q_A @ Q_B |- Q_B @ Q_A by at-form(4, 8);
}
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let script = parse_script(SCRIPT)?;
    let d = &script.derivations[0];
    for name in ["L2q", "L2q+exchange", "BS"] {
        let rs = make_ruleset(name)?;
        let report = check_derivation(&rs, d);
        println!("{name:>14}: {:?}", report.verdict);
        for node in report.failures() {
            println!("{:>16}{}: {} ({:?}) {}", "", node.id, node.rule, node.status, node.message);
        }
    }
    Ok(())
}
