//! Closed-form constants and thresholds for the random-coding analysis.
//!
//! For an `n x r` output block and input drawn `N^n(0, Λ)`, the tail of
//! the empirical rate obeys
//!
//! ```text
//! Pr{ rate >= T } <= C * n^(t*ceil(r/2)) * exp(-gamma * n * T)
//! ```
//!
//! for any exponent fraction `gamma < 1 - (t+r-1)/n`, with the constant
//!
//! ```text
//! C = [ Gamma(r/2)^t * 2^(t*ceil(r/2)) ]^-1
//!     * ( 2/((1-gamma)n - t - r + 1) + 2/r )^t
//! ```
//!
//! independent of the input covariance. Combining the tail bound with the
//! union bound over a codebook of `exp(nR)` codewords gives the rate
//! threshold of [`rate_threshold`]: decoding a given input/output pair
//! fails with probability at most `target_error` whenever the code rate
//! stays below it.
//!
//! All Gamma-function work runs through `ln Γ`, so nothing here overflows
//! for block lengths up to 1e6.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest admissible Chernoff exponent fraction, `1 - (t+r-1)/n`.
///
/// May be zero or negative, meaning no admissible exponent exists at this
/// block length.
pub fn gamma_limit(n: usize, t: usize, r: usize) -> f64 {
    1.0 - (t + r - 1) as f64 / n as f64
}

/// Validated parameter set for the tail bound.
///
/// Construction enforces `n >= t + r` and `0 <= gamma < gamma_limit`;
/// every derived quantity can therefore assume validity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChernoffParams {
    n: usize,
    t: usize,
    r: usize,
    gamma: f64,
}

impl ChernoffParams {
    pub fn new(n: usize, t: usize, r: usize, gamma: f64) -> Result<Self> {
        if n == 0 || t == 0 || r == 0 {
            return Err(Error::InvalidParams(
                "n, t, r must all be at least 1".to_string(),
            ));
        }
        if n < t + r {
            return Err(Error::InvalidParams(format!(
                "block length n = {n} must be at least t + r = {}",
                t + r
            )));
        }
        let limit = gamma_limit(n, t, r);
        if !(0.0..1.0).contains(&gamma) || gamma >= limit {
            return Err(Error::InvalidParams(format!(
                "gamma = {gamma} outside the admissible range [0, {limit}) = [0, 1 - (t+r-1)/n)"
            )));
        }
        Ok(ChernoffParams { n, t, r, gamma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Exponent of the polynomial factor: `t * ceil(r/2)`, exact integer.
    pub fn poly_exponent(&self) -> u32 {
        (self.t * self.r.div_ceil(2)) as u32
    }

    /// `ln C` for the tail-bound constant.
    pub fn log_constant(&self) -> f64 {
        let t = self.t as f64;
        let r = self.r as f64;
        let bracket = self.moment_bracket();
        -t * ln_gamma(r / 2.0) - f64::from(self.poly_exponent()) * std::f64::consts::LN_2
            + t * bracket.ln()
    }

    /// The tail-bound constant itself.
    pub fn constant(&self) -> f64 {
        self.log_constant().exp()
    }

    /// `2/((1-gamma)n - t - r + 1) + 2/r`, positive for valid parameters.
    fn moment_bracket(&self) -> f64 {
        let denom = (1.0 - self.gamma) * self.n as f64 - (self.t + self.r) as f64 + 1.0;
        2.0 / denom + 2.0 / self.r as f64
    }
}

/// Tail bound evaluated at one threshold, with its factors kept apart.
#[derive(Clone, Copy, Debug)]
pub struct BoundReport {
    /// Rate threshold `T` in nats per use.
    pub threshold: f64,
    /// The probability bound `C * n^(t*ceil(r/2)) * exp(-gamma n T)`.
    /// Values above 1 are reported as-is; the bound is then vacuous.
    pub bound: f64,
    /// `gamma * n * T`.
    pub decay_exponent: f64,
    /// `t * ceil(r/2) * ln n`.
    pub poly_log_factor: f64,
    /// `ln C`.
    pub log_constant: f64,
}

/// Probability bound on `Pr{ rate >= threshold }` for a fixed output block
/// and Gaussian input.
pub fn tail_bound(params: &ChernoffParams, threshold: f64) -> Result<BoundReport> {
    if !threshold.is_finite() || threshold < 0.0 {
        return Err(Error::InvalidParams(format!(
            "threshold must be finite and non-negative, got {threshold}"
        )));
    }
    let log_constant = params.log_constant();
    let poly_log_factor = f64::from(params.poly_exponent()) * (params.n as f64).ln();
    let decay_exponent = params.gamma * params.n as f64 * threshold;
    Ok(BoundReport {
        threshold,
        bound: (log_constant + poly_log_factor - decay_exponent).exp(),
        decay_exponent,
        poly_log_factor,
        log_constant,
    })
}

/// Largest code rate guaranteed to decode with error at most
/// `target_error`, given the realized empirical rate:
///
/// ```text
/// gamma * rate + ln(Pe)/n - t*ceil(r/2)*ln(n)/n - ln(C)/n
/// ```
///
/// An infinite empirical rate yields an infinite threshold.
pub fn rate_threshold(
    params: &ChernoffParams,
    empirical_rate: f64,
    target_error: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&target_error) || target_error == 0.0 {
        return Err(Error::InvalidParams(format!(
            "target error must lie in (0, 1), got {target_error}"
        )));
    }
    if empirical_rate.is_nan() || empirical_rate < 0.0 {
        return Err(Error::InvalidParams(format!(
            "empirical rate must be non-negative, got {empirical_rate}"
        )));
    }
    if empirical_rate.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let n = params.n as f64;
    Ok(params.gamma * empirical_rate + target_error.ln() / n
        - f64::from(params.poly_exponent()) * n.ln() / n
        - params.log_constant() / n)
}

fn check_column_args(n: usize, i: usize, t: usize, r: usize, gamma: f64) -> Result<()> {
    if n == 0 || t == 0 || r == 0 || i == 0 || i > t {
        return Err(Error::InvalidParams(format!(
            "need 1 <= i <= t and positive dimensions, got n={n}, i={i}, t={t}, r={r}"
        )));
    }
    let limit = 1.0 - (i + r - 1) as f64 / n as f64;
    if !(0.0..1.0).contains(&gamma) || gamma >= limit {
        return Err(Error::InvalidParams(format!(
            "gamma = {gamma} outside [0, {limit}) for column {i}"
        )));
    }
    if n + 1 <= i + r {
        return Err(Error::InvalidParams(format!(
            "need n - i - r + 1 >= 1, got n={n}, i={i}, r={r}"
        )));
    }
    // The bracket term carries t even for column i < t, so it must stay
    // positive as well.
    if (1.0 - gamma) * n as f64 - (t + r) as f64 + 1.0 <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "need (1-gamma)n - t - r + 1 > 0, got n={n}, t={t}, r={r}, gamma={gamma}"
        )));
    }
    Ok(())
}

/// Upper bound on the tilted moment of one column's innovation ratio,
///
/// ```text
/// E[(a/d)^(gamma n)] < Gamma((n-i+1)/2)
///                      / ( Gamma(r/2) * Gamma((n-i-r+1)/2) )
///                      * ( 2/((1-gamma)n - t - r + 1) + 2/r )
/// ```
///
/// where `a` and `d` are the innovation norms of input column `i` against
/// the previous input columns alone and against those plus the output
/// block. Valid for `gamma < 1 - (i+r-1)/n`.
pub fn column_moment_bound(n: usize, i: usize, t: usize, r: usize, gamma: f64) -> Result<f64> {
    check_column_args(n, i, t, r, gamma)?;
    let nf = n as f64;
    let rf = r as f64;
    let i_f = i as f64;
    let log_ratio = ln_gamma((nf - i_f + 1.0) / 2.0)
        - ln_gamma(rf / 2.0)
        - ln_gamma((nf - i_f - rf + 1.0) / 2.0);
    let denom = (1.0 - gamma) * nf - (t + r) as f64 + 1.0;
    let bracket = 2.0 / denom + 2.0 / rf;
    Ok((log_ratio + bracket.ln()).exp())
}

/// Polynomial loosening of [`column_moment_bound`]: the Gamma ratio is
/// replaced by `(n/2)^ceil(r/2)`, making the block-length dependence
/// explicit. Always at least as large as the tight form.
pub fn column_moment_bound_poly(
    n: usize,
    i: usize,
    t: usize,
    r: usize,
    gamma: f64,
) -> Result<f64> {
    check_column_args(n, i, t, r, gamma)?;
    let nf = n as f64;
    let rf = r as f64;
    let log_poly = r.div_ceil(2) as f64 * (nf / 2.0).ln() - ln_gamma(rf / 2.0);
    let denom = (1.0 - gamma) * nf - (t + r) as f64 + 1.0;
    let bracket = 2.0 / denom + 2.0 / rf;
    Ok((log_poly + bracket.ln()).exp())
}
