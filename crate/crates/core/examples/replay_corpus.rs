//! Replays the built-in corpus and prints each verdict next to the expected one.
//!
//! `cargo run --example replay_corpus`

use lq::calculus::{corpus, make_ruleset};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for entry in corpus() {
        let r = entry.replay()?;
        let mark = if r.matches { "ok" } else { "MISMATCH" };
        println!("{:<36} {:<9?} {mark:<8} {}", entry.name, r.report.verdict, entry.summary);
        if let Some(rule) = r.report.first_failing_rule() {
            println!("{:<36} first failure at `{rule}`", "");
        }
        if let Some(v) = r.report.root_evaluation {
            println!("{:<36} root evaluates to {v}", "");
        }
    }

    let rescued = lq::calculus::corpus_entry("at_idempotence_by_weakening")?;
    let r = rescued.replay_under(&make_ruleset("L2q+weakening")?)?;
    println!("\nat_idempotence_by_weakening under L2q+weakening: {:?}", r.report.verdict);
    Ok(())
}
