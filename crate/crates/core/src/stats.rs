//! Small statistical toolbox for the Monte Carlo experiments: one- and
//! two-sample Kolmogorov-Smirnov tests, the chi-squared CDF, binomial
//! confidence half-widths, and log-domain accumulation.

use statrs::function::gamma::gamma_lr;

/// Numerically safe `ln(sum(exp(x)))`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// CDF of the chi-squared distribution with `dof` degrees of freedom.
pub fn chi_squared_cdf(dof: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    gamma_lr(dof / 2.0, x / 2.0)
}

/// `z` standard errors of a binomial proportion estimate.
pub fn binomial_halfwidth(successes: u64, trials: u64, z: f64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    let p = successes as f64 / trials as f64;
    z * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Result of a Kolmogorov-Smirnov test.
#[derive(Clone, Copy, Debug)]
pub struct KsTest {
    /// Supremum distance between the compared distribution functions.
    pub statistic: f64,
    /// Asymptotic p-value with the usual finite-sample correction.
    pub p_value: f64,
    /// Effective sample size entering the p-value.
    pub effective_n: f64,
}

/// Complement of the Kolmogorov distribution CDF, `Q(z) = 1 - F(z)`,
/// via the two power series of Numerical Recipes 3rd ed.
fn ks_complement_cdf(z: f64) -> f64 {
    assert!(z >= 0.0, "statistic must be non-negative");
    if z == 0.0 {
        1.0
    } else if z < 1.18 {
        let factor = (2.0 * std::f64::consts::PI).sqrt() / z;
        let term = (-std::f64::consts::PI.powi(2) / (8.0 * z * z)).exp();
        1.0 - factor * (term + term.powi(9) + term.powi(25) + term.powi(49))
    } else {
        let term = (-2.0 * z * z).exp();
        2.0 * (term - term.powi(4) + term.powi(9))
    }
}

fn ks_p_value(statistic: f64, effective_n: f64) -> f64 {
    let sqrt_n = effective_n.sqrt();
    ks_complement_cdf((sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic)
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("samples must not contain NaN"));
    s
}

/// One-sample KS test of `samples` against the distribution function `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsTest {
    assert!(!samples.is_empty(), "KS test needs samples");
    let s = sorted(samples);
    let n = s.len() as f64;
    let mut statistic: f64 = 0.0;
    for (index, value) in s.iter().enumerate() {
        let model = cdf(*value);
        let below = index as f64 / n;
        let above = (index + 1) as f64 / n;
        statistic = statistic.max((model - below).abs()).max((model - above).abs());
    }
    KsTest {
        statistic,
        p_value: ks_p_value(statistic, n),
        effective_n: n,
    }
}

/// Two-sample KS test comparing the empirical distributions of `a` and `b`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsTest {
    assert!(!a.is_empty() && !b.is_empty(), "KS test needs samples");
    let sa = sorted(a);
    let sb = sorted(b);
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let mut ia = 0usize;
    let mut ib = 0usize;
    let mut statistic: f64 = 0.0;
    while ia < sa.len() && ib < sb.len() {
        let va = sa[ia];
        let vb = sb[ib];
        if va <= vb {
            ia += 1;
        }
        if vb <= va {
            ib += 1;
        }
        statistic = statistic.max((ia as f64 / na - ib as f64 / nb).abs());
    }
    let effective_n = na * nb / (na + nb);
    KsTest {
        statistic,
        p_value: ks_p_value(statistic, effective_n),
        effective_n,
    }
}
