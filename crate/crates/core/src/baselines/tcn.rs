use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::layers::dropout;
use crate::model::Architecture;
use crate::numeric::{Bound, ParamSet, Rng, Tape, Tensor, Var};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TcnConfig {
    /// Filled from the dataset when 0.
    pub input_dim: usize,
    pub lookback: usize,
    pub blocks: usize,
    pub filters: Vec<usize>,
    pub kernel: usize,
    pub dilations: Vec<usize>,
    pub dropout: f64,
}

impl Default for TcnConfig {
    fn default() -> Self {
        Self {
            input_dim: 0,
            lookback: 30,
            blocks: 3,
            filters: vec![16, 32, 64],
            kernel: 3,
            dilations: vec![1, 2, 4],
            dropout: 0.2,
        }
    }
}

impl TcnConfig {
    /// Full-width filters (64, 128, 256).
    pub fn full_width() -> Self {
        Self {
            filters: vec![64, 128, 256],
            ..Self::default()
        }
    }

    pub fn tiny(input_dim: usize, lookback: usize) -> Self {
        Self {
            input_dim,
            lookback,
            blocks: 2,
            filters: vec![4, 6],
            kernel: 2,
            dilations: vec![1, 2],
            ..Self::default()
        }
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if self.blocks < 1 || self.filters.len() != self.blocks || self.dilations.len() != self.blocks {
            return Err(Error::config(format!("{path}.blocks"), "need blocks >= 1 and one filter count and dilation per block"));
        }
        if self.filters.contains(&0) || self.dilations.contains(&0) {
            return Err(Error::config(format!("{path}.filters"), "filters and dilations must be >= 1"));
        }
        if self.kernel < 1 || self.lookback < 1 || self.input_dim < 1 {
            return Err(Error::config(format!("{path}.kernel"), "kernel, lookback and input_dim must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::config(format!("{path}.dropout"), "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Stacked causal dilated convolutions with residual connections.
///
/// Each block: causal conv (left padding `(kernel − 1)·dilation`), per-timestep
/// layer normalization, GELU, dropout, then the residual (a bias-free 1×1
/// projection when the channel count changes). The head reads the last step.
#[derive(Clone, Debug, PartialEq)]
pub struct Tcn {
    pub config: TcnConfig,
}

impl Tcn {
    pub fn new(config: TcnConfig) -> Result<Self> {
        config.validate("tcn")?;
        Ok(Self { config })
    }

    fn channels_in(&self, block: usize) -> usize {
        if block == 0 {
            self.config.input_dim
        } else {
            self.config.filters[block - 1]
        }
    }

    fn blocks(&self, tape: &mut Tape, p: &Bound, x: Var, mut rng: Option<&mut Rng>) -> Vec<Var> {
        let c = &self.config;
        let mut h = x;
        let mut outs = Vec::with_capacity(c.blocks);
        for b in 0..c.blocks {
            let taps: Vec<Var> = (0..c.kernel)
                .map(|j| {
                    if j == 0 {
                        h
                    } else {
                        tape.shift_time(h, c.lookback, j * c.dilations[b], 0.0)
                    }
                })
                .collect();
            let stacked = if taps.len() == 1 { taps[0] } else { tape.concat_cols(&taps) };
            let conv = tape.linear(stacked, p.var(&format!("tcn.b{b}.conv.w")), p.var(&format!("tcn.b{b}.conv.b")));
            let normed = tape.layer_norm_rows(conv, 1e-5);
            let act = tape.gelu(normed);
            let act = dropout(tape, act, c.dropout, rng.as_deref_mut());
            let res = if self.channels_in(b) == c.filters[b] {
                h
            } else {
                tape.matmul_bt(h, p.var(&format!("tcn.b{b}.res.w")))
            };
            h = tape.add(act, res);
            outs.push(h);
        }
        outs
    }

    /// Evaluation-mode block outputs, each `[batch·lookback × filters]`.
    pub fn activations(&self, params: &ParamSet, x: &[f64], batch: usize) -> Result<Vec<Tensor>> {
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape);
        let xv = tape.constant(batch * self.config.lookback, self.config.input_dim, x.to_vec());
        let outs = self.blocks(&mut tape, &bound, xv, None);
        Ok(outs.into_iter().map(|v| tape.value(v).clone()).collect())
    }
}

impl Architecture for Tcn {
    fn lookback(&self) -> usize {
        self.config.lookback
    }

    fn input_dim(&self) -> usize {
        self.config.input_dim
    }

    fn init_params(&self, seed: u64) -> Result<ParamSet> {
        self.config.validate("tcn")?;
        let c = &self.config;
        let mut rng = Rng::new(seed, "init");
        let mut ps = ParamSet::new();
        for b in 0..c.blocks {
            let (cin, cout) = (self.channels_in(b), c.filters[b]);
            ps.init_weight(&format!("tcn.b{b}.conv.w"), cout, c.kernel * cin, &mut rng);
            ps.init_bias(&format!("tcn.b{b}.conv.b"), cout);
            if cin != cout {
                ps.init_weight(&format!("tcn.b{b}.res.w"), cout, cin, &mut rng);
            }
        }
        ps.init_weight("tcn.out.w", 1, c.filters[c.blocks - 1], &mut rng);
        ps.init_bias("tcn.out.b", 1);
        Ok(ps)
    }

    fn build(&self, tape: &mut Tape, params: &Bound, x: Var, _batch: usize, dropout: Option<&mut Rng>) -> Result<Var> {
        let outs = self.blocks(tape, params, x, dropout);
        let last = tape.timestep(*outs.last().expect("at least one block"), self.config.lookback, self.config.lookback - 1);
        let pred = tape.linear(last, params.var("tcn.out.w"), params.var("tcn.out.b"));
        if !tape.value(pred).is_finite() {
            return Err(Error::NonFinite("stage `tcn head`".into()));
        }
        Ok(pred)
    }
}
