//! Fisher information for the channel vector.
//!
//! Unstructured matrices are always kept in augmented form over `(h, h*)`:
//! for a channel of length `n = N_t·N_r` they are `2n × 2n` with the `(h, h)`
//! block in the top-left corner. Structured matrices live in the parameter
//! space `Θ = [β, β*, θ, φ]` of size `4·N_t·L`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{steering_term, ChannelVector, PathParameterSet};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::linalg::{self, CMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parametrization {
    /// Augmented channel `[h; h*]`.
    UnstructuredH,
    /// Path parameters `[β; β*; θ; φ]`.
    StructuredTheta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InformationSource {
    Pilot,
    Data,
    SemiBlind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    matrix: CMatrix,
    parametrization: Parametrization,
    source: InformationSource,
}

impl FisherMatrix {
    pub fn new(
        matrix: CMatrix,
        parametrization: Parametrization,
        source: InformationSource,
    ) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!("FIM must be square, got {:?}", matrix.shape())));
        }
        if parametrization == Parametrization::UnstructuredH && matrix.nrows() % 2 != 0 {
            return Err(Error::Shape("augmented channel FIM must have even dimension".into()));
        }
        Ok(Self { matrix, parametrization, source })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn parametrization(&self) -> Parametrization {
        self.parametrization
    }

    pub fn source(&self) -> InformationSource {
        self.source
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermitian_error(&self) -> f64 {
        linalg::hermitian_error(&self.matrix)
    }

    /// Hermitian to `tol` relative and `λ_min ≥ −tol·λ_max`.
    pub fn satisfies_invariants(&self, tol: f64) -> bool {
        self.hermitian_error() <= tol && linalg::is_psd(&self.matrix, tol)
    }
}

/// Known pilot blocks and the second-order statistics of data and noise.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotConfig {
    /// One `K × N_t` block per pilot OFDM symbol; column `j` is what transmit
    /// antenna `j` sends.
    blocks: Vec<CMatrix>,
    noise_variance: f64,
    signal_variances: Vec<f64>,
}

impl PilotConfig {
    pub fn from_blocks(
        blocks: Vec<CMatrix>,
        noise_variance: f64,
        signal_variances: Vec<f64>,
    ) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidConfig("need at least one pilot block".into()))?;
        let shape = first.shape();
        if shape.0 == 0 || shape.1 == 0 {
            return Err(Error::InvalidConfig("pilot blocks must be non-empty".into()));
        }
        if blocks.iter().any(|b| b.shape() != shape) {
            return Err(Error::Shape("pilot blocks differ in shape".into()));
        }
        if signal_variances.len() != shape.1 {
            return Err(Error::Shape(format!(
                "{} signal variances for {} transmit antennas",
                signal_variances.len(),
                shape.1
            )));
        }
        if blocks.iter().flat_map(|b| b.iter()).any(|x| (x.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidConfig("pilot symbols must have unit modulus".into()));
        }
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "noise variance must be positive, got {noise_variance}"
            )));
        }
        if signal_variances.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidConfig("signal variances must be non-negative".into()));
        }
        Ok(Self { blocks, noise_variance, signal_variances })
    }

    /// Phase-ramp pilots `x_j[k] = exp(2πi·j·k/K)`: unit modulus and mutually
    /// orthogonal across transmit antennas, so `Σ XᴴX = K·K_p·I`.
    pub fn orthogonal(
        num_subcarriers: usize,
        num_pilots: usize,
        num_tx: usize,
        noise_variance: f64,
        signal_variances: Vec<f64>,
    ) -> Result<Self> {
        if num_tx > num_subcarriers {
            return Err(Error::InvalidConfig(format!(
                "orthogonal pilots need N_t <= K, got N_t = {num_tx}, K = {num_subcarriers}"
            )));
        }
        let block = DMatrix::from_fn(num_subcarriers, num_tx, |k, j| {
            let turns = ((j * k) % num_subcarriers) as f64 / num_subcarriers as f64;
            Complex64::from_polar(1.0, 2.0 * PI * turns)
        });
        Self::from_blocks(vec![block; num_pilots], noise_variance, signal_variances)
    }

    /// Independent uniform QPSK pilots.
    pub fn random_qpsk<R: Rng + ?Sized>(
        rng: &mut R,
        num_subcarriers: usize,
        num_pilots: usize,
        num_tx: usize,
        noise_variance: f64,
        signal_variances: Vec<f64>,
    ) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let blocks = (0..num_pilots)
            .map(|_| {
                DMatrix::from_fn(num_subcarriers, num_tx, |_, _| {
                    let re = if rng.random::<bool>() { s } else { -s };
                    let im = if rng.random::<bool>() { s } else { -s };
                    Complex64::new(re, im)
                })
            })
            .collect();
        Self::from_blocks(blocks, noise_variance, signal_variances)
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn num_pilots(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_subcarriers(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn num_tx(&self) -> usize {
        self.blocks[0].ncols()
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn signal_variances(&self) -> &[f64] {
        &self.signal_variances
    }

    pub fn with_noise_variance(&self, noise_variance: f64) -> Result<Self> {
        Self::from_blocks(self.blocks.clone(), noise_variance, self.signal_variances.clone())
    }

    pub fn with_signal_variances(&self, signal_variances: Vec<f64>) -> Result<Self> {
        Self::from_blocks(self.blocks.clone(), self.noise_variance, signal_variances)
    }

    /// `Σ_i X(i)ᴴ X(i) / σ_v²`, the per-receive-antenna `N_t × N_t` block.
    pub fn per_antenna_information(&self) -> CMatrix {
        let n_t = self.num_tx();
        let gram = self
            .blocks
            .iter()
            .fold(CMatrix::zeros(n_t, n_t), |acc, x| acc + x.adjoint() * x);
        gram.unscale(self.noise_variance)
    }
}

fn augmented(top_left: &CMatrix, top_right: &CMatrix) -> CMatrix {
    let n = top_left.nrows();
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(top_left);
    out.view_mut((0, n), (n, n)).copy_from(top_right);
    out.view_mut((n, 0), (n, n)).copy_from(&top_right.map(|z| z.conj()));
    out.view_mut((n, n), (n, n)).copy_from(&top_left.map(|z| z.conj()));
    out
}

/// Pilot-only FIM of the augmented channel. Noise is i.i.d. across receive
/// antennas, so the `(h, h)` block is `I_{N_r} ⊗ Σ_i X(i)ᴴX(i) / σ_v²` and the
/// cross blocks vanish.
pub fn pilot_fim_unstructured(pilots: &PilotConfig, num_rx: usize) -> Result<FisherMatrix> {
    if num_rx == 0 {
        return Err(Error::Shape("need at least one receive antenna".into()));
    }
    let per_antenna = pilots.per_antenna_information();
    let n_t = pilots.num_tx();
    let n = n_t * num_rx;
    let mut hh = CMatrix::zeros(n, n);
    for r in 0..num_rx {
        hh.view_mut((r * n_t, r * n_t), (n_t, n_t)).copy_from(&per_antenna);
    }
    FisherMatrix::new(
        augmented(&hh, &CMatrix::zeros(n, n)),
        Parametrization::UnstructuredH,
        InformationSource::Pilot,
    )
}

/// Data FIM of the augmented channel from `K_d` i.i.d. zero-mean data
/// symbols, taking the pilot block size `K`, noise and data variances from
/// `pilots`.
pub fn data_fim_unstructured(
    h: &ChannelVector,
    pilots: &PilotConfig,
    num_data: usize,
    num_rx: usize,
) -> Result<FisherMatrix> {
    if h.num_tx() != pilots.num_tx() || h.num_rx() != num_rx {
        return Err(Error::Shape(format!(
            "channel is {}x{} (N_r x N_t), expected {}x{}",
            h.num_rx(),
            h.num_tx(),
            num_rx,
            pilots.num_tx()
        )));
    }
    data_fim_from_statistics(
        h,
        pilots.signal_variances(),
        pilots.noise_variance(),
        pilots.num_subcarriers(),
        num_data,
    )
}

/// Data FIM with explicit second-order statistics.
///
/// The received covariance over one data OFDM symbol is
/// `C_y = R ⊗ I_K` with `R = H C_x Hᴴ + σ_v² I_{N_r}`, because every
/// `λ_{r,j} = h_{r,j}·I_K`. Each trace `tr{C_y⁻¹ ∂C_y C_y⁻¹ ∂C_yᴴ}` then
/// factors into `K` times a product of entries of `Q = R⁻¹`, `QH` and
/// `HᴴQH`, so nothing larger than `N_r × N_r` is ever inverted.
pub fn data_fim_from_statistics(
    h: &ChannelVector,
    signal_variances: &[f64],
    noise_variance: f64,
    num_subcarriers: usize,
    num_data: usize,
) -> Result<FisherMatrix> {
    let n_t = h.num_tx();
    let n_r = h.num_rx();
    if signal_variances.len() != n_t {
        return Err(Error::Shape(format!(
            "{} signal variances for N_t = {n_t}",
            signal_variances.len()
        )));
    }
    let n = n_t * n_r;
    if num_data == 0 || signal_variances.iter().all(|&v| v == 0.0) {
        return FisherMatrix::new(
            CMatrix::zeros(2 * n, 2 * n),
            Parametrization::UnstructuredH,
            InformationSource::Data,
        );
    }

    let channel = h.as_matrix();
    let cx = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n_t,
        signal_variances.iter().map(|&v| Complex64::new(v, 0.0)),
    ));
    let covariance = &channel * &cx * channel.adjoint()
        + CMatrix::identity(n_r, n_r).scale(noise_variance);
    let q = covariance
        .cholesky()
        .ok_or(Error::SingularCovariance)?
        .inverse();
    let qh = &q * &channel;
    let m = channel.adjoint() * &qh;

    let scale = (num_subcarriers * num_data) as f64;
    let mut hh = CMatrix::zeros(n, n);
    let mut hhc = CMatrix::zeros(n, n);
    for r in 0..n_r {
        for j in 0..n_t {
            let row = r * n_t + j;
            for s in 0..n_r {
                for k in 0..n_t {
                    let col = s * n_t + k;
                    let w = scale * signal_variances[j] * signal_variances[k];
                    hh[(row, col)] = q[(r, s)] * m[(k, j)] * w;
                    hhc[(row, col)] = qh[(r, k)] * qh[(s, j)] * w;
                }
            }
        }
    }
    FisherMatrix::new(
        augmented(&hh, &hhc),
        Parametrization::UnstructuredH,
        InformationSource::Data,
    )
}

/// `J_SB = J_p + J_d`.
pub fn semi_blind_fim(pilot_fim: &FisherMatrix, data_fim: &FisherMatrix) -> Result<FisherMatrix> {
    if pilot_fim.source != InformationSource::Pilot || data_fim.source != InformationSource::Data {
        return Err(Error::Shape(format!(
            "expected (Pilot, Data) sources, got ({:?}, {:?})",
            pilot_fim.source, data_fim.source
        )));
    }
    if pilot_fim.parametrization != data_fim.parametrization || pilot_fim.dim() != data_fim.dim() {
        return Err(Error::Shape(format!(
            "cannot add {:?} FIM of dim {} to {:?} FIM of dim {}",
            pilot_fim.parametrization,
            pilot_fim.dim(),
            data_fim.parametrization,
            data_fim.dim()
        )));
    }
    FisherMatrix::new(
        &pilot_fim.matrix + &data_fim.matrix,
        pilot_fim.parametrization,
        InformationSource::SemiBlind,
    )
}

/// How the gain derivatives are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeConvention {
    /// `∂h/∂β = ½(1−i)e`, `∂h/∂β* = ½(1+i)e`, and a `+cosθ·z` term in the
    /// azimuth derivative.
    #[default]
    Paper,
    /// Wirtinger calculus: `∂h/∂β = e`, `∂h/∂β* = 0`, and the azimuth
    /// derivative of the steering phase without a z term.
    Wirtinger,
}

impl DerivativeConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            DerivativeConvention::Paper => "paper",
            DerivativeConvention::Wirtinger => "wirtinger",
        }
    }
}

impl std::str::FromStr for DerivativeConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(DerivativeConvention::Paper),
            "wirtinger" => Ok(DerivativeConvention::Wirtinger),
            other => Err(Error::InvalidConfig(format!("unknown derivative convention `{other}`"))),
        }
    }
}

/// One of the four column blocks of `∂h/∂Θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParameterBlock {
    Gain,
    ConjugateGain,
    Zenith,
    Azimuth,
}

impl ParameterBlock {
    pub const ALL: [ParameterBlock; 4] = [
        ParameterBlock::Gain,
        ParameterBlock::ConjugateGain,
        ParameterBlock::Zenith,
        ParameterBlock::Azimuth,
    ];
}

/// `∂h/∂Θ` together with `∂h*/∂Θ`.
///
/// Columns are grouped by [`ParameterBlock`]; inside a block the column for
/// path `l` of transmit antenna `j` is `j·L + l`, so each transmit antenna
/// owns a contiguous run of `L` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianMatrix {
    channel: CMatrix,
    conjugate: CMatrix,
    blocks: Vec<ParameterBlock>,
    num_tx: usize,
    num_paths: usize,
    convention: DerivativeConvention,
}

impl JacobianMatrix {
    /// `∂h/∂Θ`, `N_t·N_r × (blocks · N_t·L)`.
    pub fn matrix(&self) -> &CMatrix {
        &self.channel
    }

    /// `∂h*/∂Θ`.
    pub fn conjugate_matrix(&self) -> &CMatrix {
        &self.conjugate
    }

    /// `[∂h/∂Θ; ∂h*/∂Θ]`.
    pub fn augmented(&self) -> CMatrix {
        let (rows, cols) = self.channel.shape();
        let mut out = CMatrix::zeros(2 * rows, cols);
        out.view_mut((0, 0), (rows, cols)).copy_from(&self.channel);
        out.view_mut((rows, 0), (rows, cols)).copy_from(&self.conjugate);
        out
    }

    pub fn blocks(&self) -> &[ParameterBlock] {
        &self.blocks
    }

    pub fn num_tx(&self) -> usize {
        self.num_tx
    }

    pub fn num_paths(&self) -> usize {
        self.num_paths
    }

    pub fn convention(&self) -> DerivativeConvention {
        self.convention
    }

    /// Column index of parameter `(l, j)` inside `block`.
    pub fn column(&self, block: ParameterBlock, path: usize, tx: usize) -> Option<usize> {
        let offset = self.blocks.iter().position(|&b| b == block)?;
        Some(offset * self.num_tx * self.num_paths + tx * self.num_paths + path)
    }

    /// Keeps only the given parameter blocks, in the given order.
    pub fn restrict(&self, blocks: &[ParameterBlock]) -> Result<Self> {
        let width = self.num_tx * self.num_paths;
        let mut cols = Vec::with_capacity(blocks.len() * width);
        for &block in blocks {
            let offset = self
                .blocks
                .iter()
                .position(|&b| b == block)
                .ok_or_else(|| Error::Shape(format!("block {block:?} not present")))?;
            cols.extend(offset * width..(offset + 1) * width);
        }
        Ok(Self {
            channel: self.channel.select_columns(&cols),
            conjugate: self.conjugate.select_columns(&cols),
            blocks: blocks.to_vec(),
            num_tx: self.num_tx,
            num_paths: self.num_paths,
            convention: self.convention,
        })
    }

    /// Numerical rank of the augmented Jacobian, thresholding the eigenvalues
    /// of `GᴴG` at `tol` relative to the largest.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        let g = self.augmented();
        linalg::hermitian_rank(&(g.adjoint() * g), tol)
    }
}

/// Analytic Jacobian of the stacked channel with respect to the structured
/// parameters. With positions in wavelengths, `k_c = 2π`.
pub fn channel_jacobian(
    params: &PathParameterSet,
    geometry: &ArrayGeometry,
    convention: DerivativeConvention,
) -> Result<JacobianMatrix> {
    if geometry.is_empty() {
        return Err(Error::InvalidGeometry("empty receive array".into()));
    }
    let n_t = params.num_tx();
    let n_l = params.num_paths();
    let width = n_t * n_l;
    let rows = n_t * geometry.len();
    let mut channel = CMatrix::zeros(rows, 4 * width);
    let mut conjugate = CMatrix::zeros(rows, 4 * width);

    let (gain_factor, conj_gain_factor) = match convention {
        DerivativeConvention::Paper => ((ONE - I) * 0.5, (ONE + I) * 0.5),
        DerivativeConvention::Wirtinger => (ONE, ZERO),
    };
    let k_c = 2.0 * PI;

    for (r, p) in geometry.elements().iter().enumerate() {
        for j in 0..n_t {
            let row = r * n_t + j;
            for l in 0..n_l {
                let beta = params.gains()[(l, j)];
                let theta = params.zeniths()[(l, j)];
                let phi = params.azimuths()[(l, j)];
                let (sin_t, cos_t) = theta.sin_cos();
                let (sin_p, cos_p) = phi.sin_cos();
                let e = steering_term(theta, phi, p);

                let ds_dtheta = cos_t * cos_p * p.x + cos_t * sin_p * p.y - sin_t * p.z;
                let mut ds_dphi = -sin_t * sin_p * p.x + sin_t * cos_p * p.y;
                if convention == DerivativeConvention::Paper {
                    ds_dphi += cos_t * p.z;
                }

                let col = j * n_l + l;
                let d_gain = gain_factor * e;
                let d_conj_gain = conj_gain_factor * e;
                let d_theta = beta * Complex64::new(0.0, -k_c * ds_dtheta) * e;
                let d_phi = beta * Complex64::new(0.0, -k_c * ds_dphi) * e;

                channel[(row, col)] = d_gain;
                channel[(row, width + col)] = d_conj_gain;
                channel[(row, 2 * width + col)] = d_theta;
                channel[(row, 3 * width + col)] = d_phi;

                // ∂h*/∂β = (∂h/∂β*)*, ∂h*/∂β* = (∂h/∂β)*, angles are real.
                conjugate[(row, col)] = d_conj_gain.conj();
                conjugate[(row, width + col)] = d_gain.conj();
                conjugate[(row, 2 * width + col)] = d_theta.conj();
                conjugate[(row, 3 * width + col)] = d_phi.conj();
            }
        }
    }
    Ok(JacobianMatrix {
        channel,
        conjugate,
        blocks: ParameterBlock::ALL.to_vec(),
        num_tx: n_t,
        num_paths: n_l,
        convention,
    })
}

/// Reparametrizes an augmented channel FIM: `J_ΘΘ = Gᴴ J_hh G` with
/// `G = [∂h/∂Θ; ∂h*/∂Θ]`.
pub fn structured_fim(
    unstructured_fim: &FisherMatrix,
    jacobian: &JacobianMatrix,
) -> Result<FisherMatrix> {
    if unstructured_fim.parametrization != Parametrization::UnstructuredH {
        return Err(Error::Shape("structured_fim needs an unstructured FIM".into()));
    }
    let g = jacobian.augmented();
    if g.nrows() != unstructured_fim.dim() {
        return Err(Error::Shape(format!(
            "Jacobian has {} augmented rows, FIM has dimension {}",
            g.nrows(),
            unstructured_fim.dim()
        )));
    }
    let projected = g.adjoint() * (&unstructured_fim.matrix * &g);
    FisherMatrix::new(
        linalg::hermitian_part(&projected),
        Parametrization::StructuredTheta,
        unstructured_fim.source,
    )
}
