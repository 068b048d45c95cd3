//! Runs every acceptance check and prints one line per check.

use std::process::ExitCode;

use tamefill::suite::run_all;

fn main() -> ExitCode {
    let outcomes = run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
