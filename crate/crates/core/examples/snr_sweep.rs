//! Mean bounds versus SNR for a ULA and a UCyA with the same element count,
//! written as CSV to stdout.
//!
//!     cargo run --release --example snr_sweep -- [trials] > snr.csv

use mimo_crb::experiments::{sweep_snr, ArrayDims, ScenarioConfig};
use mimo_crb::report::write_csv_to;

fn main() -> mimo_crb::Result<()> {
    let trials: usize = std::env::args().nth(1).map_or(20, |s| s.parse().expect("trials"));
    let config = ScenarioConfig {
        trials,
        master_seed: 1,
        arrays: ArrayDims { n_ula: 24, n_uca: 8, n_3d: 3, ..ArrayDims::default() },
        ..ScenarioConfig::default()
    };
    let snrs: Vec<f64> = (-2..=6).map(|i| 5.0 * i as f64).collect();
    let result = sweep_snr(&config, &snrs)?;
    write_csv_to(&result, std::io::stdout().lock()).expect("stdout");
    Ok(())
}
