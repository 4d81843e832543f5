//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//!     cargo test -p mimo-crb --test acceptance [-- A3 A7]

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use mimo_crb::experiments::{
    evaluate_fims, evaluate_trial, run_paired, run_sweep, sweep_layers, sweep_snr, trial_fims,
    ArrayDims, Method, Model, PilotKind, ScenarioConfig, SweepVariable, CELLS,
};
use mimo_crb::fim::{data_fim_from_statistics, ParameterBlock};
use mimo_crb::linalg;
use mimo_crb::report::write_csv_to;
use mimo_crb::{
    build_uca, build_ucya, build_ula, channel_jacobian, draw_path_parameters, AngleUnit, ArrayGeometry,
    DerivativeConvention, FisherMatrix, GeometryKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use common::{angle_finite_difference, naive_data_fim, relative_frobenius};

const SEED: u64 = 20230;
const HERMITIAN_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// N_t=2, L=4, K=64, K_p=16, K_d=48, SNR=10 dB, ULA(24) and UCyA(8×3).
fn reference_config(trials: usize) -> ScenarioConfig {
    ScenarioConfig {
        snr_db: 10.0,
        trials,
        master_seed: SEED,
        arrays: ArrayDims { n_ula: 24, n_uca: 8, n_3d: 3, spacing_2d: 0.5, spacing_3d: 0.5 },
        ..ScenarioConfig::default()
    }
}

fn fim_ok(fim: &FisherMatrix) -> bool {
    let (min, max) = linalg::eigen_range(fim.matrix());
    fim.hermitian_error() <= HERMITIAN_TOL && min >= -PSD_TOL * max.max(0.0)
}

/// Structured OP bound at least two orders of magnitude below unstructured OP.
fn a1() -> Outcome {
    let config = reference_config(50);
    let geometries = config.arrays.both().unwrap();
    let summaries = run_paired(&config, &geometries).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for s in &summaries {
        let structured = s.cell(Model::Structured, Method::Op).mean_crb;
        let unstructured = s.cell(Model::Unstructured, Method::Op).mean_crb;
        let ratio = structured / unstructured;
        pass &= structured <= 1e-2 * unstructured;
        detail.push(format!(
            "{}: structured-OP {structured:.3e} / unstructured-OP {unstructured:.3e} = {ratio:.3}",
            s.geometry
        ));
    }
    Outcome::new(pass, format!("{} (required <= 1e-2)", detail.join("; ")))
}

/// SB ≤ OP per trial, both models, and J_SB − J_p ⪰ −1e−10‖J_p‖.
fn a2() -> Outcome {
    let config = reference_config(50);
    let geometries = config.arrays.both().unwrap();
    let pilots = config.pilots().unwrap();
    let mut violations = 0;
    let mut worst_loewner = f64::INFINITY;
    let mut checked = 0;
    for trial in 0..config.trials {
        let params = config.draw_trial(trial).unwrap();
        for g in &geometries {
            let fims = trial_fims(&config, &params, g, &pilots).unwrap();
            let outcome = evaluate_fims(&config, &fims);
            for model in [Model::Unstructured, Model::Structured] {
                let op = outcome.get(model, Method::Op).unwrap().value;
                let sb = outcome.get(model, Method::Sb).unwrap().value;
                violations += usize::from(sb > op);
                checked += 1;
            }
            for (sb, p) in [
                (&fims.semi_blind, &fims.pilot),
                (&fims.structured_semi_blind, &fims.structured_pilot),
            ] {
                let (min, _) = linalg::eigen_range(&(sb.matrix() - p.matrix()));
                let (_, norm) = linalg::eigen_range(p.matrix());
                worst_loewner = worst_loewner.min(min / norm);
            }
        }
    }
    let pass = violations == 0 && worst_loewner >= -1e-10;
    Outcome::new(
        pass,
        format!(
            "{violations} SB>OP violations in {checked} comparisons; min eig(J_SB - J_p)/||J_p|| = {worst_loewner:.3e}"
        ),
    )
}

const A3_SNRS: [f64; 7] = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0];

/// Every one of the eight curves is non-increasing in SNR.
fn a3() -> Outcome {
    let config = reference_config(20);
    let result = sweep_snr(&config, &A3_SNRS).unwrap();
    let mut bad = Vec::new();
    let mut curves = 0;
    for geometry in [GeometryKind::Ula, GeometryKind::Ucya] {
        for (model, method) in CELLS {
            let series = result.series(geometry, model, method);
            assert_eq!(series.len(), A3_SNRS.len());
            curves += 1;
            if series.windows(2).any(|w| w[1].1 > w[0].1) {
                bad.push(format!("{geometry}/{model}/{method}"));
            }
        }
    }
    Outcome::new(
        bad.is_empty() && curves == 8,
        format!("{curves} curves over {} SNR points, increasing: {:?}", A3_SNRS.len(), bad),
    )
}

/// Unstructured OP bound depends only on the element count.
fn a4() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_sb = 0.0f64;
    let mut compared = 0;
    for pilot_kind in [PilotKind::Orthogonal, PilotKind::RandomQpsk] {
        let config = ScenarioConfig { pilot_kind, ..reference_config(50) };
        let ula = build_ula(24, 0.5).unwrap();
        let ucya = build_ucya(8, 3, 0.5, 0.5).unwrap();
        let pilots = config.pilots().unwrap();
        for trial in 0..config.trials {
            let params = config.draw_trial(trial).unwrap();
            let a = evaluate_trial(&config, &params, &ula, &pilots);
            let b = evaluate_trial(&config, &params, &ucya, &pilots);
            let rel = |model, method| {
                let x = a.get(model, method).unwrap().value;
                let y = b.get(model, method).unwrap().value;
                (x - y).abs() / x.abs().max(y.abs())
            };
            worst = worst.max(rel(Model::Unstructured, Method::Op));
            worst_sb = worst_sb.max(rel(Model::Unstructured, Method::Sb));
            compared += 1;
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!(
            "{compared} paired trials, max relative OP difference {worst:.2e} (required <= 1e-12); \
             SB for reference {worst_sb:.2e}"
        ),
    )
}

/// UCyA structured-SB ≤ ULA structured-SB over N_3D ∈ {2, 3, 4}.
fn a5() -> Outcome {
    let base = ScenarioConfig {
        snr_db: 5.0,
        trials: 100,
        master_seed: SEED,
        arrays: ArrayDims { n_uca: 12, ..ArrayDims::default() },
        ..ScenarioConfig::default()
    };
    let result = sweep_layers(&base, &[2, 3, 4]).unwrap();
    let ula = result.series(GeometryKind::Ula, Model::Structured, Method::Sb);
    let ucya = result.series(GeometryKind::Ucya, Model::Structured, Method::Sb);
    let mut pass = true;
    let mut detail = Vec::new();
    for ((n3d, u), (_, c)) in ula.iter().zip(&ucya) {
        pass &= c <= u;
        detail.push(format!("N_3D={n3d}: UCyA {c:.3e} vs ULA {u:.3e}"));
    }
    Outcome::new(pass, detail.join("; "))
}

fn random_small_geometry(rng: &mut ChaCha20Rng) -> ArrayGeometry {
    match rng.random_range(0..3) {
        0 => build_ula(rng.random_range(1..=8), 0.5),
        1 => build_uca(rng.random_range(2..=8), 0.5),
        _ => {
            let ring = rng.random_range(2..=4);
            let layers = rng.random_range(1..=8 / ring);
            build_ucya(ring, layers, 0.5, 0.5)
        }
    }
    .unwrap()
}

/// Column-wise `max|fd − analytic| / max|analytic|`.
fn column_error(analytic: &[num_complex::Complex64], fd: &[num_complex::Complex64]) -> f64 {
    let scale = analytic.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = analytic.iter().zip(fd).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if scale < 1e-12 {
        // column vanishes analytically (element at the phase centre)
        if diff <= 1e-8 { 0.0 } else { f64::INFINITY }
    } else {
        diff / scale
    }
}

/// Jacobian angle columns against central differences.
fn a6() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(SEED ^ 6);
    let step = 1e-6;
    let mut worst_wirtinger = 0.0f64;
    let mut worst_paper_theta = 0.0f64;
    let mut worst_paper_phi = 0.0f64;
    for _ in 0..100 {
        let geometry = random_small_geometry(&mut rng);
        let n_t = rng.random_range(1..=2);
        let n_l = rng.random_range(1..=3);
        let params = draw_path_parameters(&mut rng, n_l, n_t, AngleUnit::Radians).unwrap();
        let wirtinger = channel_jacobian(&params, &geometry, DerivativeConvention::Wirtinger).unwrap();
        let paper = channel_jacobian(&params, &geometry, DerivativeConvention::Paper).unwrap();
        for j in 0..n_t {
            for l in 0..n_l {
                for (block, zenith) in [(ParameterBlock::Zenith, true), (ParameterBlock::Azimuth, false)] {
                    let fd = angle_finite_difference(&params, &geometry, l, j, zenith, step);
                    let col = |jac: &mimo_crb::JacobianMatrix| -> Vec<_> {
                        jac.matrix().column(jac.column(block, l, j).unwrap()).iter().copied().collect()
                    };
                    worst_wirtinger = worst_wirtinger.max(column_error(&col(&wirtinger), &fd));
                    let e = column_error(&col(&paper), &fd);
                    if zenith {
                        worst_paper_theta = worst_paper_theta.max(e);
                    } else {
                        worst_paper_phi = worst_paper_phi.max(e);
                    }
                }
            }
        }
    }
    Outcome::new(
        worst_wirtinger <= 1e-5 && worst_paper_theta <= 1e-5,
        format!(
            "100 configs: wirtinger θ/φ max rel err {worst_wirtinger:.2e}, paper θ {worst_paper_theta:.2e} \
             (required <= 1e-5); paper φ for reference {worst_paper_phi:.2e}"
        ),
    )
}

fn random_a7_config(rng: &mut ChaCha20Rng) -> (ScenarioConfig, ArrayGeometry) {
    let num_tx = rng.random_range(1..=3);
    let config = ScenarioConfig {
        num_tx,
        num_paths: rng.random_range(1..=3),
        num_subcarriers: rng.random_range(num_tx..=16),
        num_pilots: rng.random_range(1..=4),
        num_data: rng.random_range(0..=8),
        snr_db: rng.random_range(-10.0..20.0),
        trials: 1,
        master_seed: rng.random(),
        ..ScenarioConfig::default()
    };
    (config, random_small_geometry(rng))
}

/// Unstructured OP bound equals σ_v²/(K·K_p) with orthogonal pilots.
fn a7() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(SEED ^ 7);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (config, geometry) = random_a7_config(&mut rng);
        let pilots = config.pilots().unwrap();
        let params = config.draw_trial(0).unwrap();
        let outcome = evaluate_trial(&config, &params, &geometry, &pilots);
        let got = outcome.get(Model::Unstructured, Method::Op).unwrap().value;
        let expected = config.noise_variance() / (config.num_subcarriers * config.num_pilots) as f64;
        worst = worst.max((got - expected).abs() / expected);
    }
    Outcome::new(worst <= 1e-10, format!("20 configs, max relative error {worst:.2e} (required <= 1e-10)"))
}

struct DataFimInstance {
    channel: mimo_crb::ChannelVector,
    signal: Vec<f64>,
    noise: f64,
    k: usize,
    num_data: usize,
}

fn a8_instances() -> Vec<DataFimInstance> {
    let mut rng = ChaCha20Rng::seed_from_u64(SEED ^ 8);
    (0..20)
        .map(|_| {
            let n_t = rng.random_range(1..=2);
            let n_r = rng.random_range(1..=2);
            let geometry = if n_r == 2 && rng.random::<bool>() { build_uca(2, 0.5) } else { build_ula(n_r, 0.5) }.unwrap();
            let n_l = rng.random_range(1..=3);
            let params = draw_path_parameters(&mut rng, n_l, n_t, AngleUnit::Radians).unwrap();
            DataFimInstance {
                channel: mimo_crb::assemble_channel(&params, &geometry).unwrap(),
                signal: (0..n_t).map(|_| rng.random_range(0.5..2.0)).collect(),
                noise: rng.random_range(0.1..2.0),
                k: rng.random_range(1..=4),
                num_data: rng.random_range(1..=5),
            }
        })
        .collect()
}

/// Structure-exploiting data FIM against the full-covariance construction.
fn a8() -> Outcome {
    let mut worst = 0.0f64;
    for inst in a8_instances() {
        let fast = data_fim_from_statistics(&inst.channel, &inst.signal, inst.noise, inst.k, inst.num_data).unwrap();
        let naive = naive_data_fim(&inst.channel, &inst.signal, inst.noise, inst.k, inst.num_data);
        worst = worst.max(relative_frobenius(fast.matrix(), &naive));
    }
    Outcome::new(worst <= 1e-8, format!("20 instances, max relative difference {worst:.2e} (required <= 1e-8)"))
}

/// Hermitian and PSD checks on the Fisher matrices of the A1–A8 setups.
fn a9() -> Outcome {
    let mut checked = 0usize;
    let mut failed = 0usize;
    let mut audit = |fim: &FisherMatrix| {
        checked += 1;
        failed += usize::from(!fim_ok(fim));
    };

    let mut setups: Vec<(ScenarioConfig, Vec<ArrayGeometry>)> = Vec::new();
    let a1 = reference_config(50);
    setups.push((a1.clone(), a1.arrays.both().unwrap()));
    setups.push((ScenarioConfig { pilot_kind: PilotKind::RandomQpsk, ..a1.clone() }, a1.arrays.both().unwrap()));
    for snr in A3_SNRS {
        let c = ScenarioConfig { snr_db: snr, trials: 5, ..a1.clone() };
        setups.push((c.clone(), c.arrays.both().unwrap()));
    }
    for n3d in [2, 3, 4] {
        let c = ScenarioConfig {
            snr_db: 5.0,
            trials: 10,
            master_seed: SEED,
            arrays: ArrayDims { n_uca: 12, n_3d: n3d, n_ula: 12 * n3d, ..ArrayDims::default() },
            ..ScenarioConfig::default()
        };
        setups.push((c.clone(), c.arrays.both().unwrap()));
    }
    for convention in [DerivativeConvention::Paper, DerivativeConvention::Wirtinger] {
        let c = ScenarioConfig { derivative_convention: convention, trials: 10, ..a1.clone() };
        setups.push((c.clone(), c.arrays.both().unwrap()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(SEED ^ 7);
    for _ in 0..20 {
        let (c, g) = random_a7_config(&mut rng);
        setups.push((c, vec![g]));
    }

    for (config, geometries) in &setups {
        let pilots = config.pilots().unwrap();
        for trial in 0..config.trials {
            let params = config.draw_trial(trial).unwrap();
            for g in geometries {
                let fims = trial_fims(config, &params, g, &pilots).unwrap();
                fims.all().into_iter().for_each(&mut audit);
            }
        }
    }
    for inst in a8_instances() {
        audit(&data_fim_from_statistics(&inst.channel, &inst.signal, inst.noise, inst.k, inst.num_data).unwrap());
    }
    Outcome::new(failed == 0, format!("{checked} Fisher matrices checked, {failed} violate Hermitian/PSD"))
}

/// Byte-identical CSV across re-runs and thread counts.
fn a10() -> Outcome {
    let render = |threads: Option<usize>| {
        let config = ScenarioConfig { threads, ..reference_config(8) };
        let result = run_sweep(&config, SweepVariable::SnrDb, &[0.0, 10.0], |_, _| {}).unwrap();
        let mut buf = Vec::new();
        write_csv_to(&result, &mut buf).unwrap();
        buf
    };
    let reference = render(None);
    let runs = [render(None), render(Some(1)), render(Some(2)), render(Some(4))];
    let identical = runs.iter().filter(|r| **r == reference).count();
    Outcome::new(
        identical == runs.len(),
        format!("{identical}/{} re-runs byte-identical ({} bytes)", runs.len(), reference.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("A1", a1),
        ("A2", a2),
        ("A3", a3),
        ("A4", a4),
        ("A5", a5),
        ("A6", a6),
        ("A7", a7),
        ("A8", a8),
        ("A9", a9),
        ("A10", a10),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = Vec::new();
    for (name, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| f == name) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Outcome::new(false, format!("panicked: {msg}"))
            });
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{name:<4} {status}  {}  [{:.1}s]", outcome.detail, start.elapsed().as_secs_f64());
        if !outcome.pass {
            failures.push(name);
        }
    }
    if !failures.is_empty() {
        println!("failed criteria: {}", failures.join(", "));
        std::process::exit(1);
    }
}
