//! Structured semi-blind bound as the cylinder grows, either by stacking
//! layers or by widening the ring. The ULA always has the same element
//! count as the UCyA.
//!
//!     cargo run --release --example array_scaling -- [trials]

use mimo_crb::experiments::{sweep_layers, sweep_ring, ArrayDims, Method, Model, ScenarioConfig, SweepResult};
use mimo_crb::GeometryKind;

fn print(title: &str, result: &SweepResult) {
    println!("{title}");
    let ula = result.series(GeometryKind::Ula, Model::Structured, Method::Sb);
    let ucya = result.series(GeometryKind::Ucya, Model::Structured, Method::Sb);
    for ((v, u), (_, c)) in ula.iter().zip(&ucya) {
        println!("  {:>3}: ULA {u:.4e}  UCyA {c:.4e}", v);
    }
}

fn main() -> mimo_crb::Result<()> {
    let trials: usize = std::env::args().nth(1).map_or(10, |s| s.parse().expect("trials"));
    let base = ScenarioConfig {
        trials,
        master_seed: 2,
        num_subcarriers: 32,
        num_pilots: 8,
        num_data: 24,
        arrays: ArrayDims { n_uca: 8, n_3d: 2, ..ArrayDims::default() },
        ..ScenarioConfig::default()
    };
    print("layers (ring of 8):", &sweep_layers(&base, &[1, 2, 3, 4])?);
    print("ring size (2 layers):", &sweep_ring(&base, &[4, 8, 12, 16])?);
    Ok(())
}
