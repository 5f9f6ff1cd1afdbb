//! Run every verification suite and print a one-line report per suite.
//! The same suites back `qbracket verify all`.
//!
//! Run with: cargo run --release -p qbracket --example verify_all

use qbracket::verify::{run_suite, SUITE_NAMES};

fn main() {
    let mut all_ok = true;
    for name in SUITE_NAMES {
        let report = run_suite(name).expect("known suite");
        println!("{report}");
        all_ok &= report.passed();
    }
    std::process::exit(if all_ok { 0 } else { 1 });
}
