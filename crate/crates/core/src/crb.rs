//! Cramér-Rao bounds from Fisher matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fim::{FisherMatrix, JacobianMatrix, Parametrization};
use crate::linalg::{self, CMatrix};

/// Default relative eigenvalue cut-off for the pseudo-inverse.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CrbMatrix {
    matrix: CMatrix,
    parametrization: Parametrization,
    rank_used: usize,
    tolerance_used: f64,
    channel_block: usize,
}

impl CrbMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn parametrization(&self) -> Parametrization {
        self.parametrization
    }

    /// Eigen-directions retained by the pseudo-inverse.
    pub fn rank_used(&self) -> usize {
        self.rank_used
    }

    pub fn tolerance_used(&self) -> f64 {
        self.tolerance_used
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Size of the leading block that bounds the channel coefficients: half
    /// the dimension for augmented channel bounds, the full dimension
    /// otherwise.
    pub fn channel_block(&self) -> usize {
        self.channel_block
    }

    pub fn is_rank_deficient(&self) -> bool {
        self.rank_used < self.dim()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { matrix: self.matrix.scale(factor), ..self.clone() }
    }
}

/// Eigen-decomposition pseudo-inverse of a Fisher matrix. Eigenvalues at or
/// below `tolerance · λ_max` are dropped.
pub fn invert_fim(fim: &FisherMatrix, tolerance: f64) -> Result<CrbMatrix> {
    let (matrix, rank_used) = pseudo_inverse(fim.matrix(), tolerance)?;
    let channel_block = match fim.parametrization() {
        Parametrization::UnstructuredH => fim.dim() / 2,
        Parametrization::StructuredTheta => fim.dim(),
    };
    Ok(CrbMatrix {
        matrix,
        parametrization: fim.parametrization(),
        rank_used,
        tolerance_used: tolerance,
        channel_block,
    })
}

fn pseudo_inverse(m: &CMatrix, tolerance: f64) -> Result<(CMatrix, usize)> {
    let n = m.nrows();
    if n == 0 {
        return Err(Error::DegenerateInformation);
    }
    let eig = linalg::hermitian_eigen(m);
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 || !max.is_finite() {
        return Err(Error::DegenerateInformation);
    }
    let cutoff = tolerance.max(0.0) * max;
    let kept: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > cutoff).collect();
    let basis = eig.eigenvectors.select_columns(&kept);
    let mut scaled = basis.clone();
    for (c, &i) in kept.iter().enumerate() {
        scaled.column_mut(c).unscale_mut(eig.eigenvalues[i]);
    }
    let out = scaled * basis.adjoint();
    let rank = kept.len();
    Ok((linalg::hermitian_part(&out), rank))
}

/// Bound on the channel implied by the structured model:
/// `(∂h/∂Θ) · J_ΘΘ⁺ · (∂h/∂Θ)ᴴ`, the `(h, h)` block of the mapped bound.
pub fn structured_crb_on_h(
    structured_fim: &FisherMatrix,
    jacobian: &JacobianMatrix,
    tolerance: f64,
) -> Result<CrbMatrix> {
    if structured_fim.parametrization() != Parametrization::StructuredTheta {
        return Err(Error::Shape("structured_crb_on_h needs a structured FIM".into()));
    }
    let g = jacobian.matrix();
    if g.ncols() != structured_fim.dim() {
        return Err(Error::Shape(format!(
            "Jacobian has {} columns, structured FIM has dimension {}",
            g.ncols(),
            structured_fim.dim()
        )));
    }
    let n = g.nrows();
    if g.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(CrbMatrix {
            matrix: CMatrix::zeros(n, n),
            parametrization: Parametrization::StructuredTheta,
            rank_used: 0,
            tolerance_used: tolerance,
            channel_block: n,
        });
    }
    let (inverse, rank_used) = pseudo_inverse(structured_fim.matrix(), tolerance)?;
    let mapped = g * inverse * g.adjoint();
    Ok(CrbMatrix {
        matrix: linalg::hermitian_part(&mapped),
        parametrization: Parametrization::StructuredTheta,
        rank_used,
        tolerance_used: tolerance,
        channel_block: n,
    })
}

/// How a bound matrix is collapsed to one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScalarReduction {
    /// Trace of the channel block divided by its size (per-coefficient bound).
    #[default]
    MeanTrace,
    /// Trace of the channel block.
    SumTrace,
}

impl ScalarReduction {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarReduction::MeanTrace => "mean-trace",
            ScalarReduction::SumTrace => "sum-trace",
        }
    }
}

impl std::str::FromStr for ScalarReduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean-trace" => Ok(ScalarReduction::MeanTrace),
            "sum-trace" => Ok(ScalarReduction::SumTrace),
            other => Err(Error::InvalidConfig(format!("unknown scalar reduction `{other}`"))),
        }
    }
}

/// `tr(CRB_hh) / (N_t·N_r)`.
pub fn crb_scalar(crb: &CrbMatrix) -> f64 {
    crb_scalar_with(crb, ScalarReduction::MeanTrace)
}

pub fn crb_scalar_with(crb: &CrbMatrix, reduction: ScalarReduction) -> f64 {
    let n = crb.channel_block;
    let trace = linalg::leading_trace(&crb.matrix, n).max(0.0);
    match reduction {
        ScalarReduction::MeanTrace => trace / n as f64,
        ScalarReduction::SumTrace => trace,
    }
}
