//! Channel models mapping an `n x t` input block to an `n x r` output
//! block, plus analytic Gaussian mutual-information references.
//!
//! The rate machinery makes no assumption about how the output was
//! produced, so this zoo deliberately mixes linear Gaussian, non-Gaussian,
//! signal-dependent, and fully deterministic maps. Stochastic variants act
//! row-wise i.i.d. in time; time-varying behaviour is representable by
//! storing a pre-generated output.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{log_det_pd, Matrix};
use crate::rng::RngStream;

/// Additive noise families beyond the Gaussian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFamily {
    /// Laplace with the given scale parameter.
    Laplace,
    /// Uniform on `[-scale, scale]`.
    Uniform,
}

/// A channel specification, serializable in experiment configs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ChannelSpec {
    /// `y = H x + v` with white Gaussian noise of the given variance.
    AwgnMimo { h: Matrix, noise_variance: f64 },
    /// `y = H x + v` with non-Gaussian additive noise.
    AdditiveNonGaussian {
        h: Matrix,
        family: NoiseFamily,
        scale: f64,
    },
    /// Gaussian noise whose per-entry standard deviation grows with the
    /// noiseless output: `sigma * (1 + |Hx|)^exponent`.
    SignalDependent {
        h: Matrix,
        noise_std: f64,
        exponent: f64,
    },
    /// Noiseless fixed linear map `y = H x`.
    LinearMap { h: Matrix },
    /// Ignores the input and returns a stored output block; `input_dims`
    /// declares the transmit width the channel is wired for.
    StoredOutput { y: Matrix, input_dims: usize },
    /// `y = x`; requires matching antenna counts.
    Identity { antennas: usize },
}

impl ChannelSpec {
    /// Transmit dimension the spec expects.
    pub fn input_dims(&self) -> usize {
        match self {
            ChannelSpec::AwgnMimo { h, .. }
            | ChannelSpec::AdditiveNonGaussian { h, .. }
            | ChannelSpec::SignalDependent { h, .. }
            | ChannelSpec::LinearMap { h } => h.cols(),
            ChannelSpec::StoredOutput { input_dims, .. } => *input_dims,
            ChannelSpec::Identity { antennas } => *antennas,
        }
    }

    /// Receive dimension the spec produces.
    pub fn output_dims(&self) -> usize {
        match self {
            ChannelSpec::AwgnMimo { h, .. }
            | ChannelSpec::AdditiveNonGaussian { h, .. }
            | ChannelSpec::SignalDependent { h, .. }
            | ChannelSpec::LinearMap { h } => h.rows(),
            ChannelSpec::StoredOutput { y, .. } => y.cols(),
            ChannelSpec::Identity { antennas } => *antennas,
        }
    }

    /// True when the output does not consume the random stream.
    pub fn is_deterministic(&self) -> bool {
        matches!(
            self,
            ChannelSpec::LinearMap { .. }
                | ChannelSpec::StoredOutput { .. }
                | ChannelSpec::Identity { .. }
        )
    }
}

fn laplace_sample(rng: &mut impl Rng, scale: f64) -> f64 {
    // Inverse-CDF from a centered uniform; the clamp keeps ln() finite at
    // the (probability ~2^-53) endpoint.
    let u: f64 = rng.random::<f64>() - 0.5;
    let magnitude = (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE);
    -scale * u.signum() * magnitude.ln()
}

/// Passes the input block through the channel, drawing any randomness
/// from `stream`.
pub fn apply_channel(spec: &ChannelSpec, x: &Matrix, stream: &RngStream) -> Result<Matrix> {
    if x.cols() != spec.input_dims() {
        return Err(Error::DimensionMismatch(format!(
            "channel expects {} input columns, got {}",
            spec.input_dims(),
            x.cols()
        )));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    match spec {
        ChannelSpec::Identity { .. } => Ok(x.clone()),
        ChannelSpec::LinearMap { h } => x.matmul(&h.transpose()),
        ChannelSpec::StoredOutput { y, .. } => {
            if y.rows() != x.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "stored output has {} rows, input has {}",
                    y.rows(),
                    x.rows()
                )));
            }
            Ok(y.clone())
        }
        ChannelSpec::AwgnMimo { h, noise_variance } => {
            if *noise_variance < 0.0 {
                return Err(Error::InvalidParams(
                    "noise variance must be non-negative".to_string(),
                ));
            }
            let mut y = x.matmul(&h.transpose())?;
            let sigma = noise_variance.sqrt();
            if sigma > 0.0 {
                let mut rng = stream.rng();
                for i in 0..y.rows() {
                    for j in 0..y.cols() {
                        let v: f64 = rng.sample(StandardNormal);
                        y.set(i, j, y.get(i, j) + sigma * v);
                    }
                }
            }
            Ok(y)
        }
        ChannelSpec::AdditiveNonGaussian { h, family, scale } => {
            let mut y = x.matmul(&h.transpose())?;
            let mut rng = stream.rng();
            for i in 0..y.rows() {
                for j in 0..y.cols() {
                    let noise = match family {
                        NoiseFamily::Laplace => laplace_sample(&mut rng, *scale),
                        NoiseFamily::Uniform => (2.0 * rng.random::<f64>() - 1.0) * scale,
                    };
                    y.set(i, j, y.get(i, j) + noise);
                }
            }
            Ok(y)
        }
        ChannelSpec::SignalDependent {
            h,
            noise_std,
            exponent,
        } => {
            let mut y = x.matmul(&h.transpose())?;
            let mut rng = stream.rng();
            for i in 0..y.rows() {
                for j in 0..y.cols() {
                    let mean = y.get(i, j);
                    let sigma = noise_std * (1.0 + mean.abs()).powf(*exponent);
                    let v: f64 = rng.sample(StandardNormal);
                    y.set(i, j, mean + sigma * v);
                }
            }
            Ok(y)
        }
    }
}

/// Mutual information of `y = Hx + v` under white Gaussian input and
/// noise: `0.5 ln det(I + HᵀH / noise_variance)` nats per use.
pub fn gaussian_mi_open_loop(h: &Matrix, noise_variance: f64) -> Result<f64> {
    if noise_variance <= 0.0 {
        return Err(Error::InvalidParams(
            "noise variance must be positive".to_string(),
        ));
    }
    let t = h.cols();
    let gram = h.transpose().matmul(h)?;
    let mut m = Matrix::identity(t);
    for i in 0..t {
        for j in 0..t {
            m.set(i, j, m.get(i, j) + gram.get(i, j) / noise_variance);
        }
    }
    Ok(0.5 * log_det_pd(&m)?)
}

/// Mutual information of jointly Gaussian vectors from their joint
/// covariance: `0.5 (ln det cov_x + ln det cov_y - ln det cov_joint)`.
///
/// The marginal blocks must be positive definite; a singular joint
/// covariance with sound margins means one vector determines the other
/// and yields `+inf`.
pub fn gaussian_mi_general(joint_cov: &Matrix, t: usize, r: usize) -> Result<f64> {
    if joint_cov.rows() != t + r || joint_cov.cols() != t + r {
        return Err(Error::DimensionMismatch(format!(
            "joint covariance must be {}x{}, got {}x{}",
            t + r,
            t + r,
            joint_cov.rows(),
            joint_cov.cols()
        )));
    }
    let block = |r0: usize, c0: usize, size_r: usize, size_c: usize| {
        let mut b = Matrix::zeros(size_r, size_c);
        for i in 0..size_r {
            for j in 0..size_c {
                b.set(i, j, joint_cov.get(r0 + i, c0 + j));
            }
        }
        b
    };
    let log_det_x = log_det_pd(&block(0, 0, t, t))?;
    let log_det_y = log_det_pd(&block(t, t, r, r))?;
    match log_det_pd(joint_cov) {
        Ok(log_det_joint) => Ok(0.5 * (log_det_x + log_det_y - log_det_joint)),
        Err(Error::NotPositiveDefinite) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Joint covariance of `(x, y)` induced by `y = Hx + v`:
///
/// ```text
/// [ Λ      Λ Hᵀ          ]
/// [ H Λ    H Λ Hᵀ + σ² I ]
/// ```
pub fn awgn_joint_covariance(
    h: &Matrix,
    noise_variance: f64,
    input_covariance: &Matrix,
) -> Result<Matrix> {
    let t = h.cols();
    let r = h.rows();
    if input_covariance.rows() != t || input_covariance.cols() != t {
        return Err(Error::DimensionMismatch(format!(
            "input covariance must be {t}x{t}"
        )));
    }
    let cross = input_covariance.matmul(&h.transpose())?; // t x r
    let out = h.matmul(input_covariance)?.matmul(&h.transpose())?; // r x r
    let mut joint = Matrix::zeros(t + r, t + r);
    for i in 0..t {
        for j in 0..t {
            joint.set(i, j, input_covariance.get(i, j));
        }
        for j in 0..r {
            joint.set(i, t + j, cross.get(i, j));
            joint.set(t + j, i, cross.get(i, j));
        }
    }
    for i in 0..r {
        for j in 0..r {
            let extra = if i == j { noise_variance } else { 0.0 };
            joint.set(t + i, t + j, out.get(i, j) + extra);
        }
    }
    Ok(joint)
}
