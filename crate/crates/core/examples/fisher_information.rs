//! Pilot, data and semi-blind Fisher matrices for one channel draw, and
//! their structured counterparts through the channel Jacobian.
//!
//!     cargo run --release --example fisher_information

use mimo_crb::fim::data_fim_from_statistics;
use mimo_crb::linalg::{eigen_range, hermitian_rank};
use mimo_crb::{
    assemble_channel, build_ula, channel_jacobian, draw_path_parameters, pilot_fim_unstructured,
    semi_blind_fim, structured_fim, AngleUnit, DerivativeConvention, FisherMatrix, PilotConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn show(name: &str, fim: &FisherMatrix) {
    let (min, max) = eigen_range(fim.matrix());
    println!(
        "{name:<22} dim {:3}  rank {:3}  eig [{min:.3e}, {max:.3e}]  hermitian err {:.1e}",
        fim.dim(),
        hermitian_rank(fim.matrix(), 1e-10),
        fim.hermitian_error()
    );
}

fn main() -> mimo_crb::Result<()> {
    let (n_t, n_l, k, k_p, k_d) = (2, 2, 16, 4, 12);
    let noise = 10f64.powf(-10.0 / 10.0);
    let geometry = build_ula(8, 0.5)?;
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let params = draw_path_parameters(&mut rng, n_l, n_t, AngleUnit::Radians)?;
    let h = assemble_channel(&params, &geometry)?;

    let pilots = PilotConfig::orthogonal(k, k_p, n_t, noise, vec![1.0; n_t])?;
    let pilot = pilot_fim_unstructured(&pilots, geometry.len())?;
    let data = data_fim_from_statistics(&h, pilots.signal_variances(), noise, k, k_d)?;
    let sb = semi_blind_fim(&pilot, &data)?;
    show("pilot (h, h*)", &pilot);
    show("data (h, h*)", &data);
    show("semi-blind (h, h*)", &sb);

    for convention in [DerivativeConvention::Paper, DerivativeConvention::Wirtinger] {
        let jac = channel_jacobian(&params, &geometry, convention)?;
        println!("\n{} derivatives, Jacobian rank {}", convention.as_str(), jac.numerical_rank(1e-10));
        show("pilot (Θ)", &structured_fim(&pilot, &jac)?);
        show("semi-blind (Θ)", &structured_fim(&sb, &jac)?);
    }
    Ok(())
}
