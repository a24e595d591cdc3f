//! Random Gaussian codebook and the maximum-empirical-rate decoder.
//!
//! The codebook is the shared randomness between encoder and decoder: all
//! `M = round(exp(nR))` codewords are deterministic functions of the seed,
//! each reproducible in isolation from its own substream, so nothing has
//! to be stored. The decoder factors the received block once and scores
//! every codeword by its empirical rate against that fixed basis, picking
//! the smallest index attaining the maximum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky_factor, modified_gram_schmidt, Coloring, Matrix, DEFAULT_RANK_TOL};
use crate::rate::{rate_given_output_basis, RateValue};
use crate::rng::{sample_gaussian_matrix, RngStream, StreamRole};

/// Default ceiling on the codebook size; keeps experiments desk-scale.
pub const DEFAULT_CODEWORD_CAP: u64 = 1 << 24;

/// Two rates closer than this are reported as a decoding tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

// Experiment id reserved for codeword substreams.
const CODEBOOK_DOMAIN: u32 = 0xC0DE;

fn default_cap() -> u64 {
    DEFAULT_CODEWORD_CAP
}

/// Parameters of a seeded Gaussian codebook.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodebookConfig {
    /// Block length `n`.
    pub block_length: usize,
    /// Transmit dimension `t`.
    pub input_dims: usize,
    /// Nominal code rate in nats per channel use.
    pub rate_nats: f64,
    /// Input covariance, `t x t` positive definite.
    pub input_covariance: Matrix,
    /// Master seed of the common randomness.
    pub seed: u64,
    /// Hard cap on the codeword count.
    #[serde(default = "default_cap")]
    pub codeword_cap: u64,
}

impl CodebookConfig {
    /// `round(exp(n * rate))`, validated against the cap and the two-word
    /// minimum.
    pub fn message_count(&self) -> Result<u64> {
        let exact = (self.block_length as f64 * self.rate_nats).exp();
        if !exact.is_finite() || exact >= u64::MAX as f64 {
            return Err(Error::CapExceeded {
                requested: u64::MAX,
                cap: self.codeword_cap,
            });
        }
        let count = exact.round() as u64;
        if count > self.codeword_cap {
            return Err(Error::CapExceeded {
                requested: count,
                cap: self.codeword_cap,
            });
        }
        if count < 2 {
            return Err(Error::InvalidParams(format!(
                "rate {} over {} uses gives {count} codeword(s); need at least 2",
                self.rate_nats, self.block_length
            )));
        }
        Ok(count)
    }
}

enum CodewordSource {
    Seeded {
        config: CodebookConfig,
        coloring: Coloring,
    },
    Fixed(Vec<Matrix>),
}

/// A family of codewords addressable by 1-based message index.
pub struct Codebook {
    source: CodewordSource,
    message_count: u64,
    block_length: usize,
    input_dims: usize,
}

impl Codebook {
    /// Builds the seeded codebook described by `config`.
    pub fn generate(config: CodebookConfig) -> Result<Self> {
        if config.block_length == 0 || config.input_dims == 0 {
            return Err(Error::InvalidParams(
                "block length and input dims must be positive".to_string(),
            ));
        }
        let message_count = config.message_count()?;
        let coloring = cholesky_factor(&config.input_covariance)?;
        if coloring.dim() != config.input_dims {
            return Err(Error::DimensionMismatch(format!(
                "input covariance is {}x{} but input dims = {}",
                config.input_covariance.rows(),
                config.input_covariance.cols(),
                config.input_dims
            )));
        }
        Ok(Codebook {
            block_length: config.block_length,
            input_dims: config.input_dims,
            message_count,
            source: CodewordSource::Seeded { config, coloring },
        })
    }

    /// Wraps an explicit list of codewords (fixture codebooks in tests,
    /// materialized copies).
    pub fn from_codewords(codewords: Vec<Matrix>) -> Result<Self> {
        let first = codewords.first().ok_or_else(|| {
            Error::InvalidParams("codebook needs at least one codeword".to_string())
        })?;
        let (rows, cols) = (first.rows(), first.cols());
        if codewords.iter().any(|c| c.rows() != rows || c.cols() != cols) {
            return Err(Error::DimensionMismatch(
                "codewords have inconsistent shapes".to_string(),
            ));
        }
        Ok(Codebook {
            message_count: codewords.len() as u64,
            block_length: rows,
            input_dims: cols,
            source: CodewordSource::Fixed(codewords),
        })
    }

    pub fn message_count(&self) -> u64 {
        self.message_count
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn input_dims(&self) -> usize {
        self.input_dims
    }

    /// Codeword `w` (1-based), generated on demand for seeded codebooks.
    pub fn codeword(&self, w: u64) -> Result<Matrix> {
        if w == 0 || w > self.message_count {
            return Err(Error::IndexOutOfRange {
                index: w,
                count: self.message_count,
            });
        }
        match &self.source {
            CodewordSource::Fixed(list) => Ok(list[(w - 1) as usize].clone()),
            CodewordSource::Seeded { config, coloring } => {
                let stream = RngStream::new(config.seed)
                    .with_experiment(CODEBOOK_DOMAIN)
                    .with_role(StreamRole::Codeword(w));
                sample_gaussian_matrix(self.block_length, self.input_dims, coloring, &stream)
            }
        }
    }

    /// The encoder: sends codeword `w`.
    pub fn encode(&self, w: u64) -> Result<Matrix> {
        self.codeword(w)
    }

    /// Fully materialized copy with identical codewords.
    pub fn materialize(&self) -> Result<Codebook> {
        let codewords: Result<Vec<Matrix>> =
            (1..=self.message_count).map(|w| self.codeword(w)).collect();
        Codebook::from_codewords(codewords?)
    }

    /// Maximum-empirical-rate decoding of the received block.
    pub fn decode(&self, y: &Matrix) -> Result<DecodeResult> {
        self.decode_with_tol(y, DEFAULT_RANK_TOL)
    }

    /// [`Codebook::decode`] with an explicit rank tolerance.
    ///
    /// The received block is factored once; each codeword is scored by
    /// [`rate_given_output_basis`] against that shared basis. Infinite
    /// rates dominate finite ones, and among equal rates the smallest
    /// message index wins, so the result does not depend on evaluation
    /// order.
    pub fn decode_with_tol(&self, y: &Matrix, rank_tol: f64) -> Result<DecodeResult> {
        if y.rows() != self.block_length {
            return Err(Error::DimensionMismatch(format!(
                "received block has {} rows, codebook uses {}",
                y.rows(),
                self.block_length
            )));
        }
        if !y.is_finite() {
            return Err(Error::NonFinite);
        }
        let output_qr = modified_gram_schmidt(y, rank_tol);

        let mut best: Option<(u64, RateValue)> = None;
        let mut runner_up: Option<RateValue> = None;
        for w in 1..=self.message_count {
            let x = self.codeword(w)?;
            let rate = rate_given_output_basis(&x, &output_qr, rank_tol)?;
            match &best {
                Some((_, current)) if rate.nats() <= current.nats() => {
                    if runner_up.is_none_or(|r| rate.nats() > r.nats()) {
                        runner_up = Some(rate);
                    }
                }
                _ => {
                    runner_up = best.map(|(_, r)| r).or(runner_up);
                    best = Some((w, rate));
                }
            }
        }
        let (message, best_rate) = best.expect("codebook has at least one codeword");
        let tie = match runner_up {
            Some(r) if r.is_infinite() && best_rate.is_infinite() => true,
            Some(r) => (best_rate.nats() - r.nats()).abs() <= TIE_TOLERANCE,
            None => false,
        };
        Ok(DecodeResult {
            message,
            best_rate,
            runner_up_rate: runner_up,
            tie,
        })
    }
}

/// Outcome of decoding one received block.
#[derive(Clone, Copy, Debug)]
pub struct DecodeResult {
    /// Selected message (smallest index attaining the maximum rate).
    pub message: u64,
    pub best_rate: RateValue,
    /// Highest rate among the other codewords.
    pub runner_up_rate: Option<RateValue>,
    /// Whether best and runner-up rates agree within [`TIE_TOLERANCE`].
    pub tie: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{apply_channel, ChannelSpec};
    use crate::rate::empirical_rate;

    fn scalar_config(seed: u64) -> CodebookConfig {
        CodebookConfig {
            block_length: 48,
            input_dims: 1,
            rate_nats: (256.0_f64).ln() / 48.0,
            input_covariance: Matrix::identity(1),
            seed,
            codeword_cap: DEFAULT_CODEWORD_CAP,
        }
    }

    #[test]
    fn message_count_rounds_the_exponential() {
        assert_eq!(scalar_config(1).message_count().unwrap(), 256);
    }

    #[test]
    fn message_count_enforces_cap_and_minimum() {
        let mut cfg = scalar_config(1);
        cfg.rate_nats = 1.0;
        cfg.block_length = 100;
        assert!(matches!(
            cfg.message_count(),
            Err(Error::CapExceeded { .. })
        ));
        cfg.rate_nats = 0.001;
        cfg.block_length = 10;
        assert!(matches!(cfg.message_count(), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn codewords_are_reproducible_in_isolation() {
        let a = Codebook::generate(scalar_config(7)).unwrap();
        let b = Codebook::generate(scalar_config(7)).unwrap();
        assert_eq!(a.codeword(17).unwrap(), b.codeword(17).unwrap());
        assert_ne!(a.codeword(17).unwrap(), a.codeword(18).unwrap());
        let other = Codebook::generate(scalar_config(8)).unwrap();
        assert_ne!(a.codeword(17).unwrap(), other.codeword(17).unwrap());
    }

    #[test]
    fn encode_is_pure_and_bounds_checked() {
        let cb = Codebook::generate(scalar_config(3)).unwrap();
        assert_eq!(cb.encode(1).unwrap(), cb.codeword(1).unwrap());
        assert!(matches!(
            cb.encode(0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            cb.encode(257),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn codeword_variance_follows_the_covariance() {
        let mut cfg = scalar_config(11);
        cfg.input_covariance = Matrix::from_rows(vec![vec![4.0]]).unwrap();
        cfg.block_length = 500;
        cfg.rate_nats = (256.0_f64).ln() / 500.0;
        let cb = Codebook::generate(cfg).unwrap();
        let mut pooled = 0.0;
        let mut count = 0usize;
        for w in 1..=200 {
            let x = cb.codeword(w).unwrap();
            pooled += x.column(0).iter().map(|v| v * v).sum::<f64>();
            count += x.rows();
        }
        let variance = pooled / count as f64;
        assert!(
            (variance / 4.0 - 1.0).abs() <= 0.05,
            "pooled variance {variance}"
        );
    }

    #[test]
    fn decoder_prefers_exact_match() {
        let cb = Codebook::from_codewords(vec![
            Matrix::column_vector(&[1.0, 0.0]).unwrap(),
            Matrix::column_vector(&[0.0, 1.0]).unwrap(),
        ])
        .unwrap();
        let result = cb
            .decode(&Matrix::column_vector(&[1.0, 0.0]).unwrap())
            .unwrap();
        assert_eq!(result.message, 1);
        assert!(result.best_rate.is_infinite());
        assert!(!result.tie);
    }

    #[test]
    fn decoder_breaks_ties_towards_the_smallest_index() {
        let cb = Codebook::from_codewords(vec![
            Matrix::column_vector(&[1.0, 0.0]).unwrap(),
            Matrix::column_vector(&[0.0, 1.0]).unwrap(),
        ])
        .unwrap();
        let result = cb
            .decode(&Matrix::column_vector(&[1.0, 1.0]).unwrap())
            .unwrap();
        assert_eq!(result.message, 1);
        assert!(result.tie);
        let expected = 0.5 * std::f64::consts::LN_2;
        assert!((result.best_rate.nats() - expected).abs() <= 1e-9);
    }

    #[test]
    fn decoding_matches_direct_rate_maximization() {
        let cb = Codebook::generate(scalar_config(21)).unwrap();
        let y = apply_channel(
            &ChannelSpec::AwgnMimo {
                h: Matrix::identity(1),
                noise_variance: 0.5,
            },
            &cb.encode(99).unwrap(),
            &RngStream::new(500).with_role(StreamRole::Noise),
        )
        .unwrap();
        let result = cb.decode(&y).unwrap();
        let mut best = (0u64, f64::NEG_INFINITY);
        for w in 1..=cb.message_count() {
            let r = empirical_rate(&cb.codeword(w).unwrap(), &y).unwrap();
            if r.nats() > best.1 {
                best = (w, r.nats());
            }
        }
        assert_eq!(result.message, best.0);
        assert!((result.best_rate.nats() - best.1).abs() <= 1e-8);
    }

    #[test]
    fn lazy_and_materialized_codebooks_decode_identically() {
        let cb = Codebook::generate(scalar_config(31)).unwrap();
        let full = cb.materialize().unwrap();
        let y = apply_channel(
            &ChannelSpec::AwgnMimo {
                h: Matrix::identity(1),
                noise_variance: 0.25,
            },
            &cb.encode(42).unwrap(),
            &RngStream::new(600).with_role(StreamRole::Noise),
        )
        .unwrap();
        let a = cb.decode(&y).unwrap();
        let b = full.decode(&y).unwrap();
        assert_eq!(a.message, b.message);
        assert_eq!(a.best_rate.nats(), b.best_rate.nats());
        assert_eq!(a.tie, b.tie);
    }

    #[test]
    fn permuting_codewords_permutes_the_decision() {
        let cb = Codebook::generate(scalar_config(41)).unwrap();
        let y = apply_channel(
            &ChannelSpec::AwgnMimo {
                h: Matrix::identity(1),
                noise_variance: 0.25,
            },
            &cb.encode(10).unwrap(),
            &RngStream::new(700).with_role(StreamRole::Noise),
        )
        .unwrap();
        let baseline = cb.decode(&y).unwrap();
        assert!(!baseline.tie, "fixture should decode without a tie");

        let mut reversed: Vec<Matrix> = Vec::new();
        for w in (1..=cb.message_count()).rev() {
            reversed.push(cb.codeword(w).unwrap());
        }
        let permuted = Codebook::from_codewords(reversed).unwrap();
        let mapped = permuted.decode(&y).unwrap();
        assert_eq!(mapped.message, cb.message_count() + 1 - baseline.message);
    }

    #[test]
    fn scaling_the_output_leaves_the_decision_unchanged() {
        let cb = Codebook::generate(scalar_config(51)).unwrap();
        let y = apply_channel(
            &ChannelSpec::AwgnMimo {
                h: Matrix::identity(1),
                noise_variance: 0.25,
            },
            &cb.encode(5).unwrap(),
            &RngStream::new(800).with_role(StreamRole::Noise),
        )
        .unwrap();
        let base = cb.decode(&y).unwrap();
        for scale in [1e-3, 0.5, 42.0] {
            let scaled = cb.decode(&y.scaled(scale)).unwrap();
            assert_eq!(scaled.message, base.message);
            assert_eq!(scaled.tie, base.tie);
        }
    }

    #[test]
    fn high_snr_loop_recovers_messages() {
        let mut correct = 0u32;
        let trials = 1000u64;
        let cfg = CodebookConfig {
            block_length: 64,
            input_dims: 1,
            rate_nats: (16.0_f64).ln() / 64.0,
            input_covariance: Matrix::identity(1),
            seed: 0,
            codeword_cap: DEFAULT_CODEWORD_CAP,
        };
        for trial in 0..trials {
            let mut cfg = cfg.clone();
            cfg.seed = RngStream::new(909).with_trial(trial).derive_seed();
            let cb = Codebook::generate(cfg).unwrap();
            let w = trial % 16 + 1;
            let y = apply_channel(
                &ChannelSpec::AwgnMimo {
                    h: Matrix::identity(1),
                    noise_variance: 0.01,
                },
                &cb.encode(w).unwrap(),
                &RngStream::new(909)
                    .with_trial(trial)
                    .with_role(StreamRole::Noise),
            )
            .unwrap();
            if cb.decode(&y).unwrap().message == w {
                correct += 1;
            }
        }
        assert!(
            correct >= 990,
            "only {correct}/{trials} decoded correctly at high SNR"
        );
    }
}
