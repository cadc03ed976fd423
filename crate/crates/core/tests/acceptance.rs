//! Runs acceptance criteria 1 to 10 and prints one line per criterion.
//!
//! `cargo test --test acceptance -- 3 5` runs a subset.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use genus2::verify::{criterion, CRITERIA};

// wall-clock budgets in seconds; None where no budget applies
const BUDGETS: [Option<u64>; 10] = [Some(1), Some(30), Some(60), Some(60), None, None, Some(120), Some(120), None, None];

fn main() -> ExitCode {
    let picked: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let verbose = std::env::var_os("ACCEPTANCE_VERBOSE").is_some();
    let mut failed = 0;
    for n in 1..=10 {
        if !picked.is_empty() && !picked.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let report = criterion(n).expect("criterion index in range");
        let took = start.elapsed();
        let over = BUDGETS[n - 1].is_some_and(|b| took > Duration::from_secs(b));
        let ok = report.pass && !over;
        if !ok {
            failed += 1;
        }
        let mut line = format!(
            "criterion {n:>2} {:<26} {} ({} checks, {:.2}s)",
            CRITERIA[n - 1],
            if ok { "PASS" } else { "FAIL" },
            report.items.len(),
            took.as_secs_f64()
        );
        if over {
            line.push_str(&format!(" over the {}s budget", BUDGETS[n - 1].unwrap()));
        }
        println!("{line}");
        for item in &report.items {
            if !item.pass || verbose {
                println!(
                    "    {} {}: expected {:?}, got {:?}, residual {:.3e}",
                    if item.pass { "ok  " } else { "FAIL" },
                    item.name,
                    item.expected,
                    item.got,
                    item.residual
                );
            }
        }
    }
    println!("acceptance: {failed} criteria failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
