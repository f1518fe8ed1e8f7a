use crate::error::{Error, Result};
use crate::model::Architecture;
use crate::numeric::{Bound, ParamSet, Rng, Tape, Var};

/// Tomorrow equals today: the last scaled target value in the window.
#[derive(Clone, Debug, PartialEq)]
pub struct Persistence {
    pub lookback: usize,
    pub input_dim: usize,
    pub target_index: usize,
}

impl Persistence {
    pub fn new(feature_names: &[String], target: &str, lookback: usize) -> Result<Self> {
        let target_index = feature_names
            .iter()
            .position(|n| n == target)
            .ok_or_else(|| Error::Data(format!("persistence needs the `{target}` feature in every window")))?;
        Ok(Self {
            lookback,
            input_dim: feature_names.len(),
            target_index,
        })
    }

    /// Plain-slice version of the forward pass.
    pub fn forecast(&self, x: &[f64]) -> Vec<f64> {
        let stride = self.lookback * self.input_dim;
        x.chunks(stride)
            .map(|w| w[(self.lookback - 1) * self.input_dim + self.target_index])
            .collect()
    }
}

impl Architecture for Persistence {
    fn lookback(&self) -> usize {
        self.lookback
    }

    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn init_params(&self, _seed: u64) -> Result<ParamSet> {
        Ok(ParamSet::new())
    }

    fn build(&self, tape: &mut Tape, _params: &Bound, x: Var, _batch: usize, _dropout: Option<&mut Rng>) -> Result<Var> {
        let last = tape.timestep(x, self.lookback, self.lookback - 1);
        Ok(tape.slice_cols(last, self.target_index, self.target_index + 1))
    }
}
