//! Seeded Monte-Carlo trials and the three parameter sweeps.
//!
//! Trial `t` draws its path parameters from a ChaCha20 stream keyed by
//! `(master_seed, t)`, so results do not depend on how trials are scheduled
//! across threads. Within a trial the same draw is evaluated on every
//! geometry of a sweep point, and the same trial index gives the same draw at
//! every sweep point; comparisons are therefore paired.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::channel::{assemble_channel, draw_path_parameters, AngleUnit, ChannelVector, PathParameterSet};
use crate::crb::{crb_scalar_with, invert_fim, structured_crb_on_h, ScalarReduction, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::fim::{
    channel_jacobian, data_fim_unstructured, pilot_fim_unstructured, semi_blind_fim, structured_fim,
    DerivativeConvention, FisherMatrix, JacobianMatrix, PilotConfig,
};
use crate::geometry::{build_ucya, build_ula, ArrayGeometry, GeometryKind};

/// Stream id reserved for random pilot symbols.
const PILOT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PilotKind {
    /// Unit-modulus phase ramps, orthogonal across transmit antennas.
    #[default]
    Orthogonal,
    /// Seeded uniform QPSK.
    RandomQpsk,
}

impl PilotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PilotKind::Orthogonal => "orthogonal",
            PilotKind::RandomQpsk => "qpsk",
        }
    }
}

impl std::str::FromStr for PilotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthogonal" => Ok(PilotKind::Orthogonal),
            "qpsk" => Ok(PilotKind::RandomQpsk),
            other => Err(Error::InvalidConfig(format!("unknown pilot kind `{other}`"))),
        }
    }
}

/// Array sizes shared by a ULA and a UCyA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayDims {
    pub n_ula: usize,
    pub n_uca: usize,
    pub n_3d: usize,
    pub spacing_2d: f64,
    pub spacing_3d: f64,
}

impl Default for ArrayDims {
    fn default() -> Self {
        Self { n_ula: 96, n_uca: 24, n_3d: 4, spacing_2d: 0.5, spacing_3d: 0.5 }
    }
}

impl ArrayDims {
    pub fn ula(&self) -> Result<ArrayGeometry> {
        build_ula(self.n_ula, self.spacing_2d)
    }

    pub fn ucya(&self) -> Result<ArrayGeometry> {
        build_ucya(self.n_uca, self.n_3d, self.spacing_2d, self.spacing_3d)
    }

    /// `[ULA, UCyA]`.
    pub fn both(&self) -> Result<Vec<ArrayGeometry>> {
        Ok(vec![self.ula()?, self.ucya()?])
    }
}

/// Everything that determines a Monte-Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub num_tx: usize,
    pub num_paths: usize,
    pub num_subcarriers: usize,
    pub num_pilots: usize,
    pub num_data: usize,
    /// `σ_x² = 1` per transmit antenna and `σ_v² = 10^(−SNR/10)`.
    pub snr_db: f64,
    pub arrays: ArrayDims,
    pub trials: usize,
    pub master_seed: u64,
    pub derivative_convention: DerivativeConvention,
    pub angle_unit: AngleUnit,
    pub pilot_kind: PilotKind,
    pub pinv_tolerance: f64,
    pub reduction: ScalarReduction,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_tx: 2,
            num_paths: 4,
            num_subcarriers: 64,
            num_pilots: 16,
            num_data: 48,
            snr_db: 5.0,
            arrays: ArrayDims::default(),
            trials: 50,
            master_seed: 0,
            derivative_convention: DerivativeConvention::Paper,
            angle_unit: AngleUnit::Radians,
            pilot_kind: PilotKind::Orthogonal,
            pinv_tolerance: DEFAULT_TOLERANCE,
            reduction: ScalarReduction::MeanTrace,
            threads: None,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.num_tx == 0 {
            return fail("n-tx must be at least 1".into());
        }
        if self.num_paths == 0 {
            return fail("n-paths must be at least 1".into());
        }
        if self.num_subcarriers == 0 {
            return fail("k must be at least 1".into());
        }
        if self.num_pilots == 0 {
            return fail("k-pilot must be at least 1 for the pilot-only bound to exist".into());
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if !self.snr_db.is_finite() {
            return fail(format!("snr-db must be finite, got {}", self.snr_db));
        }
        if !(self.pinv_tolerance.is_finite() && self.pinv_tolerance >= 0.0) {
            return fail(format!("pinv tolerance must be >= 0, got {}", self.pinv_tolerance));
        }
        if self.pilot_kind == PilotKind::Orthogonal && self.num_tx > self.num_subcarriers {
            return fail("orthogonal pilots need n-tx <= k".into());
        }
        if self.threads == Some(0) {
            return fail("threads must be at least 1".into());
        }
        Ok(())
    }

    pub fn noise_variance(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }

    pub fn pilots(&self) -> Result<PilotConfig> {
        let signal = vec![1.0; self.num_tx];
        match self.pilot_kind {
            PilotKind::Orthogonal => PilotConfig::orthogonal(
                self.num_subcarriers,
                self.num_pilots,
                self.num_tx,
                self.noise_variance(),
                signal,
            ),
            PilotKind::RandomQpsk => {
                let mut rng = self.stream(PILOT_STREAM);
                PilotConfig::random_qpsk(
                    &mut rng,
                    self.num_subcarriers,
                    self.num_pilots,
                    self.num_tx,
                    self.noise_variance(),
                    signal,
                )
            }
        }
    }

    fn stream(&self, id: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(id);
        rng
    }

    /// Independent random stream of trial `trial`.
    pub fn trial_rng(&self, trial: usize) -> ChaCha20Rng {
        self.stream(trial as u64)
    }

    pub fn draw_trial(&self, trial: usize) -> Result<PathParameterSet> {
        draw_path_parameters(&mut self.trial_rng(trial), self.num_paths, self.num_tx, self.angle_unit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Structured,
    Unstructured,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Structured => "structured",
            Model::Unstructured => "unstructured",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Pilot-only.
    Op,
    /// Semi-blind.
    Sb,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Op => "OP",
            Method::Sb => "SB",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The four (model, method) combinations in a fixed order.
pub const CELLS: [(Model, Method); 4] = [
    (Model::Unstructured, Method::Op),
    (Model::Unstructured, Method::Sb),
    (Model::Structured, Method::Op),
    (Model::Structured, Method::Sb),
];

fn cell_index(model: Model, method: Method) -> usize {
    CELLS.iter().position(|&c| c == (model, method)).expect("all cells listed")
}

/// One scalar per (model, method).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrbQuad {
    pub unstructured_op: f64,
    pub unstructured_sb: f64,
    pub structured_op: f64,
    pub structured_sb: f64,
}

impl CrbQuad {
    pub fn get(&self, model: Model, method: Method) -> f64 {
        match (model, method) {
            (Model::Unstructured, Method::Op) => self.unstructured_op,
            (Model::Unstructured, Method::Sb) => self.unstructured_sb,
            (Model::Structured, Method::Op) => self.structured_op,
            (Model::Structured, Method::Sb) => self.structured_sb,
        }
    }

    fn from_cells(values: [f64; 4]) -> Self {
        Self {
            unstructured_op: values[0],
            unstructured_sb: values[1],
            structured_op: values[2],
            structured_sb: values[3],
        }
    }
}

/// Every intermediate of one (draw, geometry) evaluation.
#[derive(Debug, Clone)]
pub struct TrialFims {
    pub channel: ChannelVector,
    pub pilot: FisherMatrix,
    pub data: FisherMatrix,
    pub semi_blind: FisherMatrix,
    pub jacobian: JacobianMatrix,
    pub structured_pilot: FisherMatrix,
    pub structured_semi_blind: FisherMatrix,
}

impl TrialFims {
    /// All Fisher matrices, unstructured first.
    pub fn all(&self) -> [&FisherMatrix; 5] {
        [&self.pilot, &self.data, &self.semi_blind, &self.structured_pilot, &self.structured_semi_blind]
    }
}

pub fn trial_fims(
    config: &ScenarioConfig,
    params: &PathParameterSet,
    geometry: &ArrayGeometry,
    pilots: &PilotConfig,
) -> Result<TrialFims> {
    let num_rx = geometry.len();
    let channel = assemble_channel(params, geometry)?;
    let pilot = pilot_fim_unstructured(pilots, num_rx)?;
    let data = data_fim_unstructured(&channel, pilots, config.num_data, num_rx)?;
    let semi_blind = semi_blind_fim(&pilot, &data)?;
    let jacobian = channel_jacobian(params, geometry, config.derivative_convention)?;
    let structured_pilot = structured_fim(&pilot, &jacobian)?;
    let structured_semi_blind = structured_fim(&semi_blind, &jacobian)?;
    Ok(TrialFims {
        channel,
        pilot,
        data,
        semi_blind,
        jacobian,
        structured_pilot,
        structured_semi_blind,
    })
}

/// Scalar bound of one (model, method) on one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOutcome {
    pub value: f64,
    /// The pseudo-inverse dropped directions beyond those the model cannot
    /// identify by construction (the Jacobian's own rank for structured
    /// bounds, the full dimension for unstructured ones).
    pub rank_deficient: bool,
}

/// The four cells of one trial on one geometry, in [`CELLS`] order.
#[derive(Debug)]
pub struct TrialOutcome {
    pub cells: [Result<CellOutcome>; 4],
}

impl TrialOutcome {
    pub fn get(&self, model: Model, method: Method) -> Option<&CellOutcome> {
        self.cells[cell_index(model, method)].as_ref().ok()
    }

    fn failed(err: Error) -> Self {
        let msg = err.to_string();
        let mut first = Some(err);
        let cells = std::array::from_fn(|_| {
            Err(first.take().unwrap_or_else(|| Error::InvalidConfig(msg.clone())))
        });
        Self { cells }
    }
}

pub fn evaluate_fims(config: &ScenarioConfig, fims: &TrialFims) -> TrialOutcome {
    let tol = config.pinv_tolerance;
    let reduce = |crb: &crate::crb::CrbMatrix| crb_scalar_with(crb, config.reduction);
    let unstructured = |fim: &FisherMatrix| {
        invert_fim(fim, tol).map(|crb| CellOutcome {
            value: reduce(&crb),
            rank_deficient: crb.is_rank_deficient(),
        })
    };
    let inherent_rank = fims.jacobian.numerical_rank(tol);
    let structured = |fim: &FisherMatrix| {
        structured_crb_on_h(fim, &fims.jacobian, tol).map(|crb| CellOutcome {
            value: reduce(&crb),
            rank_deficient: crb.rank_used() < inherent_rank,
        })
    };
    TrialOutcome {
        cells: [
            unstructured(&fims.pilot),
            unstructured(&fims.semi_blind),
            structured(&fims.structured_pilot),
            structured(&fims.structured_semi_blind),
        ],
    }
}

pub fn evaluate_trial(
    config: &ScenarioConfig,
    params: &PathParameterSet,
    geometry: &ArrayGeometry,
    pilots: &PilotConfig,
) -> TrialOutcome {
    match trial_fims(config, params, geometry, pilots) {
        Ok(fims) => evaluate_fims(config, &fims),
        Err(err) => TrialOutcome::failed(err),
    }
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Per-trial outcomes, indexed `[trial][geometry]`.
pub fn run_trials(
    config: &ScenarioConfig,
    geometries: &[ArrayGeometry],
) -> Result<Vec<Vec<TrialOutcome>>> {
    config.validate()?;
    let pilots = config.pilots()?;
    with_pool(config.threads, || {
        (0..config.trials)
            .into_par_iter()
            .map(|trial| match config.draw_trial(trial) {
                Ok(params) => geometries
                    .iter()
                    .map(|g| evaluate_trial(config, &params, g, &pilots))
                    .collect(),
                Err(err) => {
                    let msg = err.to_string();
                    geometries
                        .iter()
                        .map(|_| TrialOutcome::failed(Error::InvalidConfig(msg.clone())))
                        .collect()
                }
            })
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSummary {
    pub model: Model,
    pub method: Method,
    pub mean_crb: f64,
    pub trials_used: usize,
    pub deficient_rank_trials: usize,
}

/// Trial-averaged bounds for one geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSummary {
    pub geometry: GeometryKind,
    pub num_rx: usize,
    pub cells: [CellSummary; 4],
}

impl ScenarioSummary {
    pub fn cell(&self, model: Model, method: Method) -> &CellSummary {
        &self.cells[cell_index(model, method)]
    }

    pub fn means(&self) -> CrbQuad {
        CrbQuad::from_cells(self.cells.map(|c| c.mean_crb))
    }
}

/// Averages per-trial outcomes in trial order. A cell fails only when every
/// trial failed for it; failed trials are otherwise skipped and not counted
/// in `trials_used`.
pub fn summarize(geometry: &ArrayGeometry, outcomes: Vec<TrialOutcome>) -> Result<ScenarioSummary> {
    let mut sums = [0.0f64; 4];
    let mut used = [0usize; 4];
    let mut deficient = [0usize; 4];
    let mut first_error: [Option<Error>; 4] = Default::default();
    for outcome in outcomes {
        for (i, cell) in outcome.cells.into_iter().enumerate() {
            match cell {
                Ok(c) => {
                    sums[i] += c.value;
                    used[i] += 1;
                    deficient[i] += usize::from(c.rank_deficient);
                }
                Err(e) => {
                    first_error[i].get_or_insert(e);
                }
            }
        }
    }
    let mut cells = Vec::with_capacity(4);
    for (i, &(model, method)) in CELLS.iter().enumerate() {
        if used[i] == 0 {
            return Err(first_error[i].take().unwrap_or(Error::DegenerateInformation));
        }
        cells.push(CellSummary {
            model,
            method,
            mean_crb: sums[i] / used[i] as f64,
            trials_used: used[i],
            deficient_rank_trials: deficient[i],
        });
    }
    Ok(ScenarioSummary {
        geometry: geometry.kind(),
        num_rx: geometry.len(),
        cells: cells.try_into().expect("four cells"),
    })
}

/// Runs all trials of `config` on each geometry with paired draws.
pub fn run_paired(config: &ScenarioConfig, geometries: &[ArrayGeometry]) -> Result<Vec<ScenarioSummary>> {
    let per_trial = run_trials(config, geometries)?;
    let mut by_geometry: Vec<Vec<TrialOutcome>> = geometries.iter().map(|_| Vec::new()).collect();
    for trial in per_trial {
        for (slot, outcome) in by_geometry.iter_mut().zip(trial) {
            slot.push(outcome);
        }
    }
    geometries
        .iter()
        .zip(by_geometry)
        .map(|(g, outcomes)| summarize(g, outcomes))
        .collect()
}

/// Mean bounds for one geometry over `config.trials` draws.
pub fn run_single(config: &ScenarioConfig, geometry: &ArrayGeometry) -> Result<ScenarioSummary> {
    let mut summaries = run_paired(config, std::slice::from_ref(geometry))?;
    Ok(summaries.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    SnrDb,
    Layers,
    RingSize,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::SnrDb => "snr_db",
            SweepVariable::Layers => "n_3d",
            SweepVariable::RingSize => "n_uca",
        }
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr_db" => Ok(SweepVariable::SnrDb),
            "n_3d" => Ok(SweepVariable::Layers),
            "n_uca" => Ok(SweepVariable::RingSize),
            other => Err(Error::InvalidConfig(format!("unknown sweep variable `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub geometry: GeometryKind,
    pub model: Model,
    pub method: Method,
    pub mean_crb: f64,
    pub trials_used: usize,
    pub deficient_rank_trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub sweep_var: SweepVariable,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn empty(sweep_var: SweepVariable) -> Self {
        Self { sweep_var, rows: Vec::new() }
    }

    /// Orders rows by sweep value, then geometry, model and method labels.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.sweep_value
                .total_cmp(&b.sweep_value)
                .then_with(|| a.geometry.label().cmp(b.geometry.label()))
                .then_with(|| a.model.as_str().cmp(b.model.as_str()))
                .then_with(|| a.method.as_str().cmp(b.method.as_str()))
        });
    }

    /// `(sweep value, mean)` points of one curve, in row order.
    pub fn series(&self, geometry: GeometryKind, model: Model, method: Method) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.geometry == geometry && r.model == model && r.method == method)
            .map(|r| (r.sweep_value, r.mean_crb))
            .collect()
    }
}

/// Configuration and `[ULA, UCyA]` pair for one sweep point.
///
/// * SNR: both arrays from `base.arrays`, SNR set to the point.
/// * Layers: UCyA with `N_3D = v`, ULA with `N_UCA · v` elements.
/// * Ring size: UCyA with `N_UCA = v`, ULA with `v · N_3D` elements.
pub fn point_setup(
    base: &ScenarioConfig,
    var: SweepVariable,
    value: f64,
) -> Result<(ScenarioConfig, Vec<ArrayGeometry>)> {
    let mut config = base.clone();
    let as_count = |v: f64| -> Result<usize> {
        if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            Ok(v as usize)
        } else {
            Err(Error::InvalidConfig(format!("{} value must be a positive integer, got {v}", var.as_str())))
        }
    };
    match var {
        SweepVariable::SnrDb => config.snr_db = value,
        SweepVariable::Layers => {
            let v = as_count(value)?;
            config.arrays.n_3d = v;
            config.arrays.n_ula = config.arrays.n_uca * v;
        }
        SweepVariable::RingSize => {
            let v = as_count(value)?;
            config.arrays.n_uca = v;
            config.arrays.n_ula = v * config.arrays.n_3d;
        }
    }
    let geometries = config.arrays.both()?;
    Ok((config, geometries))
}

/// Runs a sweep, calling `on_point` with the rows of each point as soon as
/// it is done.
pub fn run_sweep(
    base: &ScenarioConfig,
    var: SweepVariable,
    values: &[f64],
    mut on_point: impl FnMut(f64, &[SweepRow]),
) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one value".into()));
    }
    base.validate()?;
    let mut result = SweepResult::empty(var);
    for &value in values {
        let (config, geometries) = point_setup(base, var, value)?;
        let summaries = run_paired(&config, &geometries)?;
        let mut rows: Vec<SweepRow> = summaries
            .iter()
            .flat_map(|s| {
                s.cells.iter().map(move |c| SweepRow {
                    sweep_value: value,
                    geometry: s.geometry,
                    model: c.model,
                    method: c.method,
                    mean_crb: c.mean_crb,
                    trials_used: c.trials_used,
                    deficient_rank_trials: c.deficient_rank_trials,
                    seed: config.master_seed,
                })
            })
            .collect();
        let mut point = SweepResult { sweep_var: var, rows: std::mem::take(&mut rows) };
        point.sort();
        on_point(value, &point.rows);
        result.rows.extend(point.rows);
    }
    result.sort();
    Ok(result)
}

pub fn sweep_snr(base: &ScenarioConfig, snr_values: &[f64]) -> Result<SweepResult> {
    run_sweep(base, SweepVariable::SnrDb, snr_values, |_, _| {})
}

pub fn sweep_layers(base: &ScenarioConfig, n3d_values: &[usize]) -> Result<SweepResult> {
    let values: Vec<f64> = n3d_values.iter().map(|&v| v as f64).collect();
    run_sweep(base, SweepVariable::Layers, &values, |_, _| {})
}

pub fn sweep_ring(base: &ScenarioConfig, nuca_values: &[usize]) -> Result<SweepResult> {
    let values: Vec<f64> = nuca_values.iter().map(|&v| v as f64).collect();
    run_sweep(base, SweepVariable::RingSize, &values, |_, _| {})
}
