//! Acceptance criteria at the default parameters. Runs without the libtest
//! harness so the PASS/FAIL line of every criterion is always printed.

use std::process::ExitCode;

use biphoton_cli::checks;

fn main() -> ExitCode {
    let results = checks::run_all();
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
