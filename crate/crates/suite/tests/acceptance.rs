//! Runs the acceptance suite and prints one PASS/FAIL line per criterion.

use std::process::ExitCode;

use ifs_shadow::acceptance::{run_all, DEFAULT_SEED};

fn main() -> ExitCode {
    // `cargo test -- --list` and filters still invoke the binary
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let results = run_all(DEFAULT_SEED);
    for r in &results {
        println!("{}", r.line());
        for d in &r.details {
            println!("    {d}");
        }
    }
    if results.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
