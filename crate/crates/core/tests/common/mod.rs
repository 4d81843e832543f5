//! Reference computations used as independent oracles by the integration
//! tests. Nothing here calls into the structure-exploiting code paths.

#![allow(dead_code)]

use mimo_crb::{assemble_channel, ArrayGeometry, ChannelVector, PathParameterSet};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Data FIM on the full `K·N_r` received covariance:
///
/// * `λ_{r,j} = diag(F_0 · h_{r,j})` with `F_0` the all-ones first DFT column,
/// * `C_y = Σ_j σ_j² λ_j λ_jᴴ + σ_v² I`,
/// * `∂C_y/∂h_m* = λ C_x ∂λᴴ/∂h_m*` and `∂C_y/∂h_m = ∂λ/∂h_m C_x λᴴ`,
/// * `J_ab = K_d · tr{C_y⁻¹ D_a C_y⁻¹ D_bᴴ}` over the augmented `[h; h*]`.
pub fn naive_data_fim(
    h: &ChannelVector,
    signal_variances: &[f64],
    noise_variance: f64,
    k: usize,
    num_data: usize,
) -> CMatrix {
    let n_t = h.num_tx();
    let n_r = h.num_rx();
    let n = n_t * n_r;
    let first_dft_column = vec![Complex64::new(1.0, 0.0); k];

    // λ: (K·N_r) × (K·N_t), block (r, j) = diag(F_0 h_{r,j})
    let lambda_of = |entry: &dyn Fn(usize, usize) -> Complex64| {
        let mut lambda = CMatrix::zeros(k * n_r, k * n_t);
        for r in 0..n_r {
            for j in 0..n_t {
                for kk in 0..k {
                    lambda[(r * k + kk, j * k + kk)] = first_dft_column[kk] * entry(r, j);
                }
            }
        }
        lambda
    };
    let lambda = lambda_of(&|r, j| h.coefficient(r, j));
    let mut cx = CMatrix::zeros(k * n_t, k * n_t);
    for j in 0..n_t {
        for kk in 0..k {
            cx[(j * k + kk, j * k + kk)] = Complex64::new(signal_variances[j], 0.0);
        }
    }
    let cy = &lambda * &cx * lambda.adjoint()
        + CMatrix::identity(k * n_r, k * n_r).scale(noise_variance);
    let cy_inv = cy.try_inverse().expect("covariance invertible");

    let mut derivatives = Vec::with_capacity(2 * n);
    // ∂/∂h_m*: only λᴴ depends on h*, ∂λᴴ/∂h*_{r,j} = (∂λ/∂h_{r,j})ᴴ
    for m in 0..n {
        let (r0, j0) = (m / n_t, m % n_t);
        let d_lambda = lambda_of(&|r, j| {
            if (r, j) == (r0, j0) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        derivatives.push(&lambda * &cx * d_lambda.adjoint());
    }
    // ∂/∂h_m: only λ depends on h
    for m in 0..n {
        let (r0, j0) = (m / n_t, m % n_t);
        let d_lambda = lambda_of(&|r, j| {
            if (r, j) == (r0, j0) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        derivatives.push(&d_lambda * &cx * lambda.adjoint());
    }
    let left: Vec<CMatrix> = derivatives.iter().map(|d| &cy_inv * d * &cy_inv).collect();
    CMatrix::from_fn(2 * n, 2 * n, |a, b| {
        (&left[a] * derivatives[b].adjoint()).trace() * num_data as f64
    })
}

/// Central difference of the assembled channel with respect to one real
/// angle parameter `(l, j)`; `zenith` selects θ, otherwise φ.
pub fn angle_finite_difference(
    params: &PathParameterSet,
    geometry: &ArrayGeometry,
    path: usize,
    tx: usize,
    zenith: bool,
    step: f64,
) -> Vec<Complex64> {
    let shifted = |delta: f64| {
        let mut p = params.clone();
        if zenith {
            p.zeniths_mut()[(path, tx)] += delta;
        } else {
            p.azimuths_mut()[(path, tx)] += delta;
        }
        assemble_channel(&p, geometry).expect("valid channel")
    };
    let plus = shifted(step);
    let minus = shifted(-step);
    plus.entries()
        .iter()
        .zip(minus.entries().iter())
        .map(|(a, b)| (a - b) / (2.0 * step))
        .collect()
}

pub fn relative_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
