//! Runs every acceptance criterion in sequence, printing one PASS/FAIL line
//! each. Built without the libtest harness so the lines are never captured;
//! the process fails if any criterion does.

use std::process::ExitCode;

use coupled_doubling::acceptance;

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, criterion) in acceptance::CRITERIA.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let report = criterion();
        println!("{report}");
        ran += 1;
        if !report.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
