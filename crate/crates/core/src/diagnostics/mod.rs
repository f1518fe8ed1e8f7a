//! Explainability and residual checks: occlusion, partial dependence,
//! permutation importance, residual ACF / histogram / Q–Q, and k-means
//! regime clustering.

pub mod kmeans;
pub mod occlusion;
pub mod pdp;
pub mod permutation;
pub mod residuals;

pub use kmeans::{kmeans, kmeans_regimes, KMeans, Regimes};
pub use occlusion::{occlusion_sensitivity, OcclusionRow};
pub use pdp::{partial_dependence, PdpCurve};
pub use permutation::{permutation_importance, ranking_agreement, PermutationRow};
pub use residuals::{residual_diagnostics, ResidualDiagnostics};

use crate::error::Result;
use crate::model::Architecture;
use crate::numeric::{Bound, ParamSet, Rng, Tape, Var};

/// A fixed linear read-out of the last timestep, `ŷ = w·x_L + b`. Handy as a
/// known-answer model for the diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSurrogate {
    pub lookback: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Architecture for LinearSurrogate {
    fn lookback(&self) -> usize {
        self.lookback
    }

    fn input_dim(&self) -> usize {
        self.weights.len()
    }

    fn init_params(&self, _seed: u64) -> Result<ParamSet> {
        Ok(ParamSet::new())
    }

    fn build(&self, tape: &mut Tape, _params: &Bound, x: Var, _batch: usize, _dropout: Option<&mut Rng>) -> Result<Var> {
        let last = tape.timestep(x, self.lookback, self.lookback - 1);
        let w = tape.constant(1, self.weights.len(), self.weights.clone());
        let out = tape.matmul_bt(last, w);
        Ok(tape.affine(out, 1.0, self.bias))
    }
}
