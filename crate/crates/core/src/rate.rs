//! Empirical mutual-information rate of a realized input/output pair.
//!
//! Given an input block `X` (`n x t`) and an output block `Y` (`n x r`),
//! the rate in nats per channel use is
//!
//! ```text
//! 0.5 * ( ln det Rxx + ln det Ryy - ln det Rjoint )
//! ```
//!
//! with `Rxx = (1/n) XᵀX`, `Ryy = (1/n) YᵀY` and `Rjoint` the joint
//! empirical correlation of `[X Y]`. It equals the mutual information of
//! jointly Gaussian vectors whose covariance matches the empirical
//! statistics, and it is what the maximum-rate decoder in [`crate::codec`]
//! maximizes.
//!
//! Two independent computation routes are provided. [`empirical_rate`]
//! evaluates the three determinants separately; [`empirical_rate_qr`] runs
//! a single sequential orthogonalization of `[Y X]` and reduces the whole
//! expression to the product of per-column innovation ratios, using the
//! fact that the output-block diagonals cancel between numerator and
//! denominator. The two agree to fine tolerance on every full-rank input,
//! which is exercised heavily in the tests.
//!
//! Degenerate inputs follow fixed rules: an all-zero (or zero-column)
//! side yields rate 0; linearly dependent columns are pruned side by side
//! until the marginal determinants are positive; and a rank-deficient
//! joint matrix with full-rank margins (the output determines the input,
//! or vice versa) yields `+inf`.

use crate::error::{Error, Result};
use crate::linalg::{
    log_det_from_diag, modified_gram_schmidt, Matrix, OrthonormalBasis, QrFactors,
    DEFAULT_RANK_TOL,
};

/// Degeneracies encountered while evaluating a rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DegenerateFlags {
    /// Input columns were dropped as linearly dependent.
    pub pruned_input: bool,
    /// Output columns were dropped as linearly dependent.
    pub pruned_output: bool,
    /// Joint matrix was rank-deficient while both margins were full rank.
    pub joint_rank_deficient: bool,
}

/// An extended-real rate in nats per channel use.
///
/// Finite values are non-negative up to floating-point slack;
/// `+inf` records exact deterministic dependence between the blocks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateValue {
    nats: f64,
    pub flags: DegenerateFlags,
}

impl RateValue {
    pub(crate) fn finite(nats: f64, flags: DegenerateFlags) -> Self {
        RateValue { nats, flags }
    }

    pub(crate) fn infinite(flags: DegenerateFlags) -> Self {
        RateValue {
            nats: f64::INFINITY,
            flags,
        }
    }

    pub(crate) fn zero(flags: DegenerateFlags) -> Self {
        RateValue { nats: 0.0, flags }
    }

    /// Rate in nats per use (`+inf` for deterministic dependence).
    pub fn nats(&self) -> f64 {
        self.nats
    }

    /// Presentation-only conversion to bits per use.
    pub fn bits(&self) -> f64 {
        self.nats / std::f64::consts::LN_2
    }

    pub fn is_infinite(&self) -> bool {
        self.nats.is_infinite()
    }
}

/// Empirical correlation matrices of a pruned input/output pair, with
/// their log-determinants.
#[derive(Clone, Debug)]
pub struct EmpiricalGram {
    /// `(1/n) X'ᵀX'` over the kept input columns.
    pub input: Matrix,
    /// `(1/n) Y'ᵀY'` over the kept output columns.
    pub output: Matrix,
    /// Joint correlation of `[X' Y']`.
    pub joint: Matrix,
    pub log_det_input: f64,
    pub log_det_output: f64,
    /// `-inf` when the joint matrix is rank-deficient.
    pub log_det_joint: f64,
    pub input_kept: Vec<usize>,
    pub output_kept: Vec<usize>,
}

impl EmpiricalGram {
    /// Prunes dependent columns of each side independently and assembles
    /// the correlation matrices. Requires both sides to keep at least one
    /// column.
    pub fn compute(x: &Matrix, y: &Matrix, rank_tol: f64) -> Result<Self> {
        check_pair(x, y)?;
        let qx = modified_gram_schmidt(x, rank_tol);
        let qy = modified_gram_schmidt(y, rank_tol);
        if qx.rank == 0 || qy.rank == 0 {
            return Err(Error::InvalidParams(
                "empirical gram requires both blocks to have positive rank".to_string(),
            ));
        }
        let xk = x.select_columns(&qx.kept_columns);
        let yk = y.select_columns(&qy.kept_columns);
        let joint_matrix = xk.hstack(&yk)?;
        let qj = modified_gram_schmidt(&joint_matrix, rank_tol);
        let log_det_joint = if qj.rank < qx.rank + qy.rank {
            f64::NEG_INFINITY
        } else {
            log_det_from_diag(&qj.diag, x.rows())
        };
        Ok(EmpiricalGram {
            input: xk.empirical_correlation()?,
            output: yk.empirical_correlation()?,
            joint: joint_matrix.empirical_correlation()?,
            log_det_input: log_det_from_diag(&qx.diag, x.rows()),
            log_det_output: log_det_from_diag(&qy.diag, y.rows()),
            log_det_joint,
            input_kept: qx.kept_columns,
            output_kept: qy.kept_columns,
        })
    }
}

fn check_pair(x: &Matrix, y: &Matrix) -> Result<()> {
    if x.rows() != y.rows() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} rows, output has {}",
            x.rows(),
            y.rows()
        )));
    }
    if x.rows() == 0 {
        return Err(Error::DimensionMismatch(
            "rate requires at least one sample".to_string(),
        ));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Determinant-route rate at an explicit rank tolerance.
pub fn empirical_rate_with_tol(x: &Matrix, y: &Matrix, rank_tol: f64) -> Result<RateValue> {
    check_pair(x, y)?;
    let qx = modified_gram_schmidt(x, rank_tol);
    let qy = modified_gram_schmidt(y, rank_tol);
    let mut flags = DegenerateFlags {
        pruned_input: qx.pruned(),
        pruned_output: qy.pruned(),
        joint_rank_deficient: false,
    };
    if qx.rank == 0 || qy.rank == 0 {
        return Ok(RateValue::zero(flags));
    }
    let xk = x.select_columns(&qx.kept_columns);
    let yk = y.select_columns(&qy.kept_columns);
    let joint = xk.hstack(&yk)?;
    let qj = modified_gram_schmidt(&joint, rank_tol);
    if qj.rank < qx.rank + qy.rank {
        flags.joint_rank_deficient = true;
        return Ok(RateValue::infinite(flags));
    }
    let n = x.rows();
    let log_det_x = log_det_from_diag(&qx.diag, n);
    let log_det_y = log_det_from_diag(&qy.diag, n);
    let log_det_joint = log_det_from_diag(&qj.diag, n);
    Ok(RateValue::finite(
        0.5 * (log_det_x + log_det_y - log_det_joint),
        flags,
    ))
}

/// Determinant-route rate at the default rank tolerance.
pub fn empirical_rate(x: &Matrix, y: &Matrix) -> Result<RateValue> {
    empirical_rate_with_tol(x, y, DEFAULT_RANK_TOL)
}

/// Innovation pair of one kept input column: residual norm against the
/// previous input columns alone, and against those plus the output block.
#[derive(Clone, Debug)]
pub struct JointInnovations {
    /// `(input_only, joint)` residual norms per kept input column.
    /// The joint entry is never larger than the input-only entry beyond
    /// floating-point noise.
    pub pairs: Vec<(f64, f64)>,
    /// Source indices of the kept input columns.
    pub kept_columns: Vec<usize>,
    pub pruned_input: bool,
    /// Some kept column had (numerically) zero residual against the
    /// output-extended span.
    pub joint_rank_deficient: bool,
}

/// Feeds the input columns through two growing orthonormal bases: one over
/// the input columns alone and one seeded with the output block's basis.
///
/// Columns dependent on earlier input columns are pruned and contribute no
/// pair. The output basis should come from [`modified_gram_schmidt`] over
/// the output block with the same tolerance.
pub fn joint_innovations(x: &Matrix, output_qr: &QrFactors, rank_tol: f64) -> JointInnovations {
    let mut input_basis = OrthonormalBasis::new(x.rows());
    let mut joint_basis = OrthonormalBasis::from_qr(output_qr);
    let mut pairs = Vec::with_capacity(x.cols());
    let mut kept_columns = Vec::with_capacity(x.cols());
    let mut pruned_input = false;
    let mut joint_rank_deficient = false;

    for j in 0..x.cols() {
        let column = x.column(j);
        let alone = input_basis.insert(&column, rank_tol);
        if !alone.accepted {
            pruned_input = true;
            continue;
        }
        let joint = joint_basis.insert(&column, rank_tol);
        if !joint.accepted {
            joint_rank_deficient = true;
        }
        pairs.push((alone.norm, joint.norm));
        kept_columns.push(j);
    }

    JointInnovations {
        pairs,
        kept_columns,
        pruned_input,
        joint_rank_deficient,
    }
}

/// QR-route rate given a precomputed decomposition of the output block.
///
/// This is the decoder's inner loop: the output basis is factored once and
/// reused across every candidate input.
pub fn rate_given_output_basis(
    x: &Matrix,
    output_qr: &QrFactors,
    rank_tol: f64,
) -> Result<RateValue> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if x.rows() != output_qr.q.rows() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} rows, output basis has {}",
            x.rows(),
            output_qr.q.rows()
        )));
    }
    let inner = joint_innovations(x, output_qr, rank_tol);
    let mut flags = DegenerateFlags {
        pruned_input: inner.pruned_input,
        pruned_output: output_qr.pruned(),
        joint_rank_deficient: false,
    };
    if output_qr.rank == 0 || inner.pairs.is_empty() {
        return Ok(RateValue::zero(flags));
    }
    if inner.joint_rank_deficient {
        flags.joint_rank_deficient = true;
        return Ok(RateValue::infinite(flags));
    }
    let nats: f64 = inner
        .pairs
        .iter()
        .map(|(alone, joint)| alone.ln() - joint.ln())
        .sum();
    Ok(RateValue::finite(nats, flags))
}

/// QR-route rate: one pass over `[Y X]` instead of three determinants.
pub fn empirical_rate_qr_with_tol(x: &Matrix, y: &Matrix, rank_tol: f64) -> Result<RateValue> {
    check_pair(x, y)?;
    let output_qr = modified_gram_schmidt(y, rank_tol);
    rate_given_output_basis(x, &output_qr, rank_tol)
}

/// [`empirical_rate_qr_with_tol`] at the default tolerance.
pub fn empirical_rate_qr(x: &Matrix, y: &Matrix) -> Result<RateValue> {
    empirical_rate_qr_with_tol(x, y, DEFAULT_RANK_TOL)
}

/// Covariance-variant rate: per-column means are removed before the rate
/// is evaluated, equivalent to prepending the all-ones direction to the
/// orthogonalization. Requires at least two samples.
pub fn empirical_rate_covariance_with_tol(
    x: &Matrix,
    y: &Matrix,
    rank_tol: f64,
) -> Result<RateValue> {
    check_pair(x, y)?;
    if x.rows() < 2 {
        return Err(Error::InvalidParams(
            "covariance variant requires n >= 2".to_string(),
        ));
    }
    empirical_rate_with_tol(&x.centered(), &y.centered(), rank_tol)
}

/// [`empirical_rate_covariance_with_tol`] at the default tolerance.
pub fn empirical_rate_covariance(x: &Matrix, y: &Matrix) -> Result<RateValue> {
    empirical_rate_covariance_with_tol(x, y, DEFAULT_RANK_TOL)
}

/// Scalar shortcut: `0.5 ln(1 / (1 - rho^2))` for the empirical
/// correlation coefficient `rho` of the two sequences.
///
/// Returns 0 when either sequence is zero, `+inf` when they are exactly
/// proportional.
pub fn siso_rate(x: &[f64], y: &[f64]) -> Result<RateValue> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "sequences of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::DimensionMismatch(
            "rate requires at least one sample".to_string(),
        ));
    }
    if !x.iter().all(|v| v.is_finite()) || !y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let xx: f64 = x.iter().map(|v| v * v).sum();
    let yy: f64 = y.iter().map(|v| v * v).sum();
    let flags = DegenerateFlags::default();
    if xx == 0.0 || yy == 0.0 {
        return Ok(RateValue::zero(flags));
    }
    let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let rho_sq = (xy * xy) / (xx * yy);
    if rho_sq >= 1.0 {
        return Ok(RateValue::infinite(DegenerateFlags {
            joint_rank_deficient: true,
            ..flags
        }));
    }
    Ok(RateValue::finite(-0.5 * (1.0 - rho_sq).ln(), flags))
}
