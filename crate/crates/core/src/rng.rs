//! Seeded, splittable random streams.
//!
//! Every random draw in the library flows through an [`RngStream`]: an
//! immutable descriptor holding a master seed plus a structured substream
//! label (experiment id, trial index, role). The descriptor packs exactly
//! into a 256-bit ChaCha seed, so distinct labels map to distinct cipher
//! keys and hence statistically independent streams, while identical
//! labels reproduce identical draws on every run. Trial-level parallelism
//! therefore cannot change any result.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{Coloring, Matrix};

/// What a substream's draws are used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamRole {
    /// Input samples (codeword material, test sources).
    Input,
    /// Channel noise realizations.
    Noise,
    /// Channel-side fixtures such as a fixed output block.
    Channel,
    /// Codeword `m` of a seeded codebook.
    Codeword(u64),
}

impl StreamRole {
    fn encode(self) -> (u32, u64) {
        match self {
            StreamRole::Input => (1, 0),
            StreamRole::Noise => (2, 0),
            StreamRole::Channel => (3, 0),
            StreamRole::Codeword(m) => (4, m),
        }
    }
}

/// Immutable descriptor of one random substream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStream {
    master: u64,
    experiment: u32,
    trial: u64,
    role: StreamRole,
}

impl RngStream {
    /// Root stream for a master seed (experiment 0, trial 0, input role).
    pub fn new(master: u64) -> Self {
        RngStream {
            master,
            experiment: 0,
            trial: 0,
            role: StreamRole::Input,
        }
    }

    pub fn with_experiment(mut self, experiment: u32) -> Self {
        self.experiment = experiment;
        self
    }

    pub fn with_trial(mut self, trial: u64) -> Self {
        self.trial = trial;
        self
    }

    pub fn with_role(mut self, role: StreamRole) -> Self {
        self.role = role;
        self
    }

    /// Derives the generator for this descriptor.
    ///
    /// The label fields fill the 32-byte seed exactly, so the mapping from
    /// descriptor to key is injective.
    pub fn rng(&self) -> ChaCha8Rng {
        let (tag, arg) = self.role.encode();
        let mut seed = [0u8; 32];
        seed[0..8].copy_from_slice(&self.master.to_le_bytes());
        seed[8..12].copy_from_slice(&self.experiment.to_le_bytes());
        seed[12..20].copy_from_slice(&self.trial.to_le_bytes());
        seed[20..24].copy_from_slice(&tag.to_le_bytes());
        seed[24..32].copy_from_slice(&arg.to_le_bytes());
        ChaCha8Rng::from_seed(seed)
    }

    /// One deterministic `u64`, handy for deriving nested master seeds.
    pub fn derive_seed(&self) -> u64 {
        self.rng().random()
    }
}

/// Draws an `n x k` matrix with i.i.d. `N(0, covariance)` rows.
///
/// White standard-normal entries are generated row by row and multiplied
/// by the triangular coloring factor, so the draw sequence depends only on
/// `(n, k)` and the stream descriptor, not on the covariance.
pub fn sample_gaussian_matrix(
    n: usize,
    k: usize,
    coloring: &Coloring,
    stream: &RngStream,
) -> Result<Matrix> {
    if n == 0 || k == 0 {
        return Err(Error::DimensionMismatch(
            "sampling requires n >= 1 and k >= 1".to_string(),
        ));
    }
    if coloring.dim() != k {
        return Err(Error::DimensionMismatch(format!(
            "coloring dimension {} does not match k = {k}",
            coloring.dim()
        )));
    }
    let mut rng = stream.rng();
    let mut white = Matrix::zeros(n, k);
    for i in 0..n {
        for j in 0..k {
            white.set(i, j, rng.sample(StandardNormal));
        }
    }
    white.matmul(&coloring.factor)
}
