use std::process::ExitCode;

use casimir_cli::verify;

const SEED: u64 = 7;

fn main() -> ExitCode {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut failed = 0;
    for id in 1..=8 {
        let outcome = verify::criterion(id, SEED, threads);
        println!("{}", outcome.line());
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
