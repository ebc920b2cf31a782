//! Acceptance suite: one verdict line per criterion.
//!
//! `cargo test -p xband-cli --test acceptance [-- 2 7]` runs all criteria or
//! only the listed ids.

use std::process::ExitCode;

use xband_cli::reproduce::{self, ReproduceOptions};

const SEED: u64 = 20_240_601;
/// Full trial count for the spectrum comparisons.
const SPECTRUM_TRIALS: usize = 10_000;
/// Reduced count for the packet searches.
const PACKET_TRIALS: usize = 2_000;

fn main() -> ExitCode {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids = if ids.is_empty() { (1..=10).collect() } else { ids };
    let opts = ReproduceOptions {
        seed: SEED,
        trials: SPECTRUM_TRIALS,
        throughput_trials: PACKET_TRIALS,
        determinism_trials: 200,
    };
    let mut failed = Vec::new();
    for id in ids {
        match reproduce::criterion(id, &opts) {
            Ok(r) => {
                println!("{}", r.summary());
                if !r.passed {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("[FAIL] criterion {id}: error: {e}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
