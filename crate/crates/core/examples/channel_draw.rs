//! Draws specular path parameters and assembles the stacked channel for a
//! cylindrical array.
//!
//!     cargo run --example channel_draw -- [seed]

use mimo_crb::{assemble_channel, build_ucya, draw_path_parameters, AngleUnit};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> mimo_crb::Result<()> {
    let seed: u64 = std::env::args().nth(1).map_or(3, |s| s.parse().expect("seed"));
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let geometry = build_ucya(6, 2, 0.5, 0.5)?;
    let params = draw_path_parameters(&mut rng, 3, 2, AngleUnit::Radians)?;

    for j in 0..params.num_tx() {
        println!("tx {j}:");
        for l in 0..params.num_paths() {
            println!(
                "  path {l}: β = {:+.3}{:+.3}i  θ = {:+.3} rad  φ = {:+.3} rad",
                params.gains()[(l, j)].re,
                params.gains()[(l, j)].im,
                params.zeniths()[(l, j)],
                params.azimuths()[(l, j)]
            );
        }
    }

    let h = assemble_channel(&params, &geometry)?;
    println!("\nH ({} x {}), |h_rj|:", h.num_rx(), h.num_tx());
    let m = h.as_matrix();
    for r in 0..m.nrows() {
        let row: Vec<String> = m.row(r).iter().map(|z| format!("{:6.3}", z.norm())).collect();
        println!("  rx {r:2}: {}", row.join("  "));
    }
    // each |h_rj| is at most the sum of the gain magnitudes of transmitter j
    for j in 0..h.num_tx() {
        let bound: f64 = params.gains().column(j).iter().map(|b| b.norm()).sum();
        let worst = m.column(j).iter().map(|z| z.norm()).fold(0.0, f64::max);
        println!("tx {j}: max |h| = {worst:.3} <= Σ|β| = {bound:.3}");
    }
    Ok(())
}
