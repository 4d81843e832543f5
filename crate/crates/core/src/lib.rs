//! Cramér-Rao bounds for channel estimation in massive MIMO-OFDM uplinks.
//!
//! The crate compares pilot-only (OP) and semi-blind (SB) estimation, under
//! an unstructured channel model (every antenna pair is a free complex gain)
//! and a structured model (a few specular paths with complex gains and
//! directions of arrival), for uniform linear and uniform cylindrical
//! receive arrays.
//!
//! The pipeline for one channel draw is
//!
//! 1. build a receive array ([`geometry`]),
//! 2. draw path parameters and assemble the stacked channel ([`channel`]),
//! 3. form pilot, data and semi-blind Fisher matrices and reparametrize them
//!    through the channel Jacobian ([`fim`]),
//! 4. invert into bounds and reduce to a scalar ([`crb`]).
//!
//! [`experiments`] runs seeded Monte-Carlo trials of that pipeline and the
//! three sweeps (SNR, number of layers, ring size); [`report`] and [`cli`]
//! serialize and drive them.

pub mod channel;
pub mod cli;
pub mod crb;
pub mod error;
pub mod experiments;
pub mod fim;
pub mod geometry;
pub mod linalg;
pub mod report;

pub use channel::{assemble_channel, draw_path_parameters, AngleUnit, ChannelVector, PathParameterSet};
pub use crb::{crb_scalar, invert_fim, structured_crb_on_h, CrbMatrix, ScalarReduction};
pub use error::{Error, Result};
pub use fim::{
    channel_jacobian, data_fim_unstructured, pilot_fim_unstructured, semi_blind_fim, structured_fim,
    DerivativeConvention, FisherMatrix, InformationSource, JacobianMatrix, Parametrization, PilotConfig,
};
pub use geometry::{build_uca, build_ucya, build_ula, uca_radius, ArrayGeometry, ElementPosition, GeometryKind};
