//! Structured (specular) channel model: `L` paths per transmit antenna, each
//! with a complex gain and a direction of arrival, projected onto the receive
//! array.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, ElementPosition};

/// How the `(-π/2, π/2)` angle range is read when drawing directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleUnit {
    /// Angles uniform on (-π/2, π/2) radians.
    #[default]
    Radians,
    /// Angles uniform on (-π/2, π/2) *degrees*, converted to radians.
    Degrees,
}

impl AngleUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            AngleUnit::Radians => "radians",
            AngleUnit::Degrees => "degrees",
        }
    }
}

impl std::str::FromStr for AngleUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radians" => Ok(AngleUnit::Radians),
            "degrees" => Ok(AngleUnit::Degrees),
            other => Err(Error::InvalidConfig(format!("unknown angle unit `{other}`"))),
        }
    }
}

/// Per-(path, transmit antenna) gains and arrival angles. All matrices are
/// `num_paths × num_tx`, indexed `(l, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathParameterSet {
    gains: DMatrix<Complex64>,
    zeniths: DMatrix<f64>,
    azimuths: DMatrix<f64>,
}

impl PathParameterSet {
    pub fn new(
        gains: DMatrix<Complex64>,
        zeniths: DMatrix<f64>,
        azimuths: DMatrix<f64>,
    ) -> Result<Self> {
        let shape = gains.shape();
        if zeniths.shape() != shape || azimuths.shape() != shape {
            return Err(Error::Shape(format!(
                "gains {shape:?}, zeniths {:?}, azimuths {:?}",
                zeniths.shape(),
                azimuths.shape()
            )));
        }
        if shape.0 == 0 || shape.1 == 0 {
            return Err(Error::Shape("need at least one path and one transmit antenna".into()));
        }
        let finite = gains.iter().all(|g| g.re.is_finite() && g.im.is_finite())
            && zeniths.iter().chain(azimuths.iter()).all(|a| a.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("path parameters must be finite".into()));
        }
        Ok(Self { gains, zeniths, azimuths })
    }

    /// Single path for a single transmit antenna.
    pub fn single(gain: Complex64, zenith: f64, azimuth: f64) -> Self {
        Self::new(
            DMatrix::from_element(1, 1, gain),
            DMatrix::from_element(1, 1, zenith),
            DMatrix::from_element(1, 1, azimuth),
        )
        .expect("1x1 parameters are well formed")
    }

    pub fn num_paths(&self) -> usize {
        self.gains.nrows()
    }

    pub fn num_tx(&self) -> usize {
        self.gains.ncols()
    }

    pub fn gains(&self) -> &DMatrix<Complex64> {
        &self.gains
    }

    pub fn zeniths(&self) -> &DMatrix<f64> {
        &self.zeniths
    }

    pub fn azimuths(&self) -> &DMatrix<f64> {
        &self.azimuths
    }

    pub fn gains_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.gains
    }

    pub fn zeniths_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.zeniths
    }

    pub fn azimuths_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.azimuths
    }
}

/// Stacked channel `h = [h_0ᵀ, …, h_{N_r-1}ᵀ]ᵀ`, `h_r = [h_{r,0}, …, h_{r,N_t-1}]ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    entries: DVector<Complex64>,
    num_tx: usize,
}

impl ChannelVector {
    pub fn new(entries: DVector<Complex64>, num_tx: usize) -> Result<Self> {
        if num_tx == 0 || entries.is_empty() || entries.len() % num_tx != 0 {
            return Err(Error::Shape(format!(
                "channel of length {} is not a multiple of N_t = {num_tx}",
                entries.len()
            )));
        }
        Ok(Self { entries, num_tx })
    }

    pub fn entries(&self) -> &DVector<Complex64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_tx(&self) -> usize {
        self.num_tx
    }

    pub fn num_rx(&self) -> usize {
        self.entries.len() / self.num_tx
    }

    /// `h_{r,j}`.
    pub fn coefficient(&self, rx: usize, tx: usize) -> Complex64 {
        self.entries[rx * self.num_tx + tx]
    }

    /// The channel as an `N_r × N_t` matrix with entry `(r, j) = h_{r,j}`.
    pub fn as_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.num_rx(), self.num_tx, |r, j| self.coefficient(r, j))
    }
}

/// Projection `ŝ(θ, φ) · s_p` of an element position on the arrival
/// direction, in wavelengths.
pub fn steering_phase(zenith: f64, azimuth: f64, position: &ElementPosition) -> f64 {
    let (sin_t, cos_t) = zenith.sin_cos();
    let (sin_p, cos_p) = azimuth.sin_cos();
    sin_t * cos_p * position.x + sin_t * sin_p * position.y + cos_t * position.z
}

/// Unit-modulus steering term `exp(-i·2π·s)`.
pub fn steering_term(zenith: f64, azimuth: f64, position: &ElementPosition) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * PI * steering_phase(zenith, azimuth, position))
}

/// `h_{r,j} = Σ_l β_{l,j} · exp(-i·2π·s(θ_{l,j}, φ_{l,j}))` at the given
/// receive element.
pub fn channel_coefficient(
    params: &PathParameterSet,
    tx_index: usize,
    position: &ElementPosition,
) -> Result<Complex64> {
    if tx_index >= params.num_tx() {
        return Err(Error::Index { index: tx_index, len: params.num_tx() });
    }
    Ok((0..params.num_paths())
        .map(|l| {
            params.gains[(l, tx_index)]
                * steering_term(params.zeniths[(l, tx_index)], params.azimuths[(l, tx_index)], position)
        })
        .sum())
}

pub fn assemble_channel(params: &PathParameterSet, geometry: &ArrayGeometry) -> Result<ChannelVector> {
    if geometry.is_empty() {
        return Err(Error::InvalidGeometry("empty receive array".into()));
    }
    let num_tx = params.num_tx();
    let mut entries = DVector::zeros(num_tx * geometry.len());
    for (r, position) in geometry.elements().iter().enumerate() {
        for j in 0..num_tx {
            entries[r * num_tx + j] = channel_coefficient(params, j, position)?;
        }
    }
    ChannelVector::new(entries, num_tx)
}

/// Draws gains i.i.d. `CN(0, 1)` and zenith/azimuth angles i.i.d. uniform on
/// `(-π/2, π/2)` (interpreted in `unit`), independently per `(l, j)`.
pub fn draw_path_parameters<R: Rng + ?Sized>(
    rng: &mut R,
    num_paths: usize,
    num_tx: usize,
    unit: AngleUnit,
) -> Result<PathParameterSet> {
    if num_paths == 0 || num_tx == 0 {
        return Err(Error::InvalidConfig("need L >= 1 and N_t >= 1".into()));
    }
    let scale = match unit {
        AngleUnit::Radians => 1.0,
        AngleUnit::Degrees => PI / 180.0,
    };
    let angle = Uniform::new(-FRAC_PI_2, FRAC_PI_2).expect("non-empty range");
    let half = std::f64::consts::FRAC_1_SQRT_2;

    let mut gains = DMatrix::zeros(num_paths, num_tx);
    let mut zeniths = DMatrix::zeros(num_paths, num_tx);
    let mut azimuths = DMatrix::zeros(num_paths, num_tx);
    // Column-major draw order: (l, j) with l fastest.
    for j in 0..num_tx {
        for l in 0..num_paths {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            gains[(l, j)] = Complex64::new(re * half, im * half);
            // The open interval: Uniform is half-open, reject the lower end.
            zeniths[(l, j)] = open_sample(&angle, rng) * scale;
            azimuths[(l, j)] = open_sample(&angle, rng) * scale;
        }
    }
    PathParameterSet::new(gains, zeniths, azimuths)
}

fn open_sample<R: Rng + ?Sized>(dist: &Uniform<f64>, rng: &mut R) -> f64 {
    loop {
        let v = dist.sample(rng);
        if v > -FRAC_PI_2 {
            return v;
        }
    }
}
