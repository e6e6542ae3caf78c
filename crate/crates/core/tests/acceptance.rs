//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in KNOWN_RED are expected to fail for reasons recorded in the
//! project notes; the run fails if any other criterion fails or a listed one passes.

use gl2moments::verify::criteria;
use std::process::ExitCode;

const KNOWN_RED: &[u32] = &[4, 8, 11];

fn main() -> ExitCode {
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut unexpected = Vec::new();
    for criterion in criteria() {
        if filter.is_some_and(|id| id != criterion.id) {
            continue;
        }
        let outcome = criterion.run();
        println!("{}", outcome.line());
        for note in &outcome.notes {
            println!("       note: {note}");
        }
        let expected_red = KNOWN_RED.contains(&outcome.id);
        if outcome.passed == expected_red {
            unexpected.push(outcome.id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all outcomes as expected (known red: {KNOWN_RED:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
