//! Runs every acceptance criterion and prints one line each. Plain `main` so the
//! lines show up in `cargo test` output without `--nocapture`.

use std::process::ExitCode;

use cartan_adelic::verify::{run, CRITERIA, DEFAULT_SEED};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let outcome = run(id, DEFAULT_SEED);
        println!("{}", outcome.line());
        if !outcome.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed", CRITERIA.len(), CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
