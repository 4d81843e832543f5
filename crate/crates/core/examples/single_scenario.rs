//! Mean bounds of the four estimator/model combinations for one setup,
//! evaluated on a ULA and a UCyA with the same channel draws.
//!
//!     cargo run --release --example single_scenario -- [snr_db] [trials]

use mimo_crb::experiments::{run_paired, ArrayDims, Method, Model, ScenarioConfig, CELLS};
use mimo_crb::DerivativeConvention;

fn main() -> mimo_crb::Result<()> {
    let mut args = std::env::args().skip(1);
    let snr_db: f64 = args.next().map_or(10.0, |s| s.parse().expect("snr_db"));
    let trials: usize = args.next().map_or(50, |s| s.parse().expect("trials"));

    for convention in [DerivativeConvention::Paper, DerivativeConvention::Wirtinger] {
        let config = ScenarioConfig {
            snr_db,
            trials,
            master_seed: 1,
            derivative_convention: convention,
            arrays: ArrayDims { n_ula: 24, n_uca: 8, n_3d: 3, ..ArrayDims::default() },
            ..ScenarioConfig::default()
        };
        let geometries = config.arrays.both()?;
        let summaries = run_paired(&config, &geometries)?;
        println!("convention = {}, SNR = {snr_db} dB, {trials} trials", convention.as_str());
        for s in &summaries {
            for (model, method) in CELLS {
                let cell = s.cell(model, method);
                println!(
                    "  {:>4} {:>12} {}  mean CRB {:.4e}  (rank-deficient trials: {})",
                    s.geometry.label(),
                    model.as_str(),
                    method.as_str(),
                    cell.mean_crb,
                    cell.deficient_rank_trials
                );
            }
            let ratio = s.cell(Model::Structured, Method::Op).mean_crb
                / s.cell(Model::Unstructured, Method::Op).mean_crb;
            println!("  {:>4} structured/unstructured (OP) = {ratio:.4}", s.geometry.label());
        }
    }
    Ok(())
}
