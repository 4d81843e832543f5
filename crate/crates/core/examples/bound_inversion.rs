//! Turns Fisher matrices into bounds: plain inversion for the unstructured
//! channel, pseudo-inversion and projection for the structured one.
//!
//!     cargo run --release --example bound_inversion -- [snr_db]

use mimo_crb::crb::DEFAULT_TOLERANCE;
use mimo_crb::fim::data_fim_from_statistics;
use mimo_crb::{
    assemble_channel, build_ucya, channel_jacobian, crb_scalar, draw_path_parameters, invert_fim,
    pilot_fim_unstructured, semi_blind_fim, structured_crb_on_h, structured_fim, AngleUnit,
    DerivativeConvention, PilotConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> mimo_crb::Result<()> {
    let snr_db: f64 = std::env::args().nth(1).map_or(10.0, |s| s.parse().expect("snr_db"));
    let noise = 10f64.powf(-snr_db / 10.0);
    let (n_t, n_l, k, k_p, k_d) = (2, 3, 32, 8, 24);
    let geometry = build_ucya(8, 2, 0.5, 0.5)?;
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let params = draw_path_parameters(&mut rng, n_l, n_t, AngleUnit::Radians)?;
    let h = assemble_channel(&params, &geometry)?;

    let pilots = PilotConfig::orthogonal(k, k_p, n_t, noise, vec![1.0; n_t])?;
    let pilot = pilot_fim_unstructured(&pilots, geometry.len())?;
    let sb = semi_blind_fim(&pilot, &data_fim_from_statistics(&h, pilots.signal_variances(), noise, k, k_d)?)?;
    let jac = channel_jacobian(&params, &geometry, DerivativeConvention::Paper)?;

    println!("SNR {snr_db} dB, σ²/(K·K_p) = {:.4e}", noise / (k * k_p) as f64);
    for (name, fim) in [("OP", &pilot), ("SB", &sb)] {
        let unstructured = invert_fim(fim, DEFAULT_TOLERANCE)?;
        let sfim = structured_fim(fim, &jac)?;
        let structured = structured_crb_on_h(&sfim, &jac, DEFAULT_TOLERANCE)?;
        println!(
            "{name}: unstructured {:.4e} (rank {}/{}), structured {:.4e} (rank {}/{})",
            crb_scalar(&unstructured),
            unstructured.rank_used(),
            unstructured.dim(),
            crb_scalar(&structured),
            invert_fim(&sfim, DEFAULT_TOLERANCE)?.rank_used(),
            sfim.dim()
        );
    }
    Ok(())
}
