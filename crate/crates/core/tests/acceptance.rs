//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Exits nonzero if any criterion fails or exceeds its time limit.

use std::process::ExitCode;

use curvlab::verify::{render_report, render_timings, run_suite, SuiteConfig};

fn main() -> ExitCode {
    let outcomes = run_suite(&SuiteConfig::default());
    print!("{}", render_report(&outcomes));
    eprint!("{}", render_timings(&outcomes));
    let late: Vec<String> = outcomes.iter().filter(|o| o.pass && !o.within_limit).map(|o| format!("[{}] {}", o.id, o.name)).collect();
    for l in &late {
        println!("FAIL {l}: exceeded its time limit");
    }
    if outcomes.len() == 14 && outcomes.iter().all(|o| o.ok()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
