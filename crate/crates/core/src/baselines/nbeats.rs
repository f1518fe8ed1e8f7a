use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Architecture;
use crate::numeric::{Bound, ParamSet, Rng, Tape, Var};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NBeatsConfig {
    pub stacks: usize,
    pub fc_layers: usize,
    pub fc_units: usize,
    /// Filled from the dataset: window length, feature count and the column
    /// holding the scaled target.
    pub lookback: usize,
    pub input_dim: usize,
    pub target_index: usize,
}

impl Default for NBeatsConfig {
    fn default() -> Self {
        Self {
            stacks: 4,
            fc_layers: 2,
            fc_units: 64,
            lookback: 30,
            input_dim: 0,
            target_index: 0,
        }
    }
}

impl NBeatsConfig {
    pub fn tiny(input_dim: usize, lookback: usize, target_index: usize) -> Self {
        Self {
            stacks: 2,
            fc_layers: 2,
            fc_units: 5,
            lookback,
            input_dim,
            target_index,
        }
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if self.stacks < 1 {
            return Err(Error::config(format!("{path}.stacks"), "must be >= 1"));
        }
        if self.fc_layers < 1 || self.fc_units < 1 {
            return Err(Error::config(format!("{path}.fc_units"), "fc_layers and fc_units must be >= 1"));
        }
        if self.lookback < 1 || self.target_index >= self.input_dim {
            return Err(Error::config(format!("{path}.target_index"), "target column must lie inside the window"));
        }
        Ok(())
    }
}

/// Univariate backcast/forecast stacks over the target history.
///
/// Stack `s` maps its residual input `r_s` through GELU layers to a backcast
/// (length `lookback`) and a one-step forecast; `r_{s+1} = r_s − backcast`
/// and the prediction is the sum of the stack forecasts.
#[derive(Clone, Debug, PartialEq)]
pub struct NBeats {
    pub config: NBeatsConfig,
}

impl NBeats {
    pub fn new(config: NBeatsConfig) -> Result<Self> {
        config.validate("nbeats")?;
        Ok(Self { config })
    }

    fn stacks(&self, tape: &mut Tape, p: &Bound, x: Var) -> Vec<Var> {
        let c = &self.config;
        let col = tape.slice_cols(x, c.target_index, c.target_index + 1);
        let steps: Vec<Var> = (0..c.lookback).map(|t| tape.timestep(col, c.lookback, t)).collect();
        let mut r = if steps.len() == 1 { steps[0] } else { tape.concat_cols(&steps) };
        let mut forecasts = Vec::with_capacity(c.stacks);
        for s in 0..c.stacks {
            let mut h = r;
            for j in 0..c.fc_layers {
                let z = tape.linear(h, p.var(&format!("nbeats.s{s}.fc{j}.w")), p.var(&format!("nbeats.s{s}.fc{j}.b")));
                h = tape.gelu(z);
            }
            let back = tape.linear(h, p.var(&format!("nbeats.s{s}.backcast.w")), p.var(&format!("nbeats.s{s}.backcast.b")));
            forecasts.push(tape.linear(h, p.var(&format!("nbeats.s{s}.forecast.w")), p.var(&format!("nbeats.s{s}.forecast.b"))));
            r = tape.sub(r, back);
        }
        forecasts
    }

    /// Per-stack one-step forecasts in evaluation mode, `[stack][sample]`.
    pub fn stack_forecasts(&self, params: &ParamSet, x: &[f64], batch: usize) -> Vec<Vec<f64>> {
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape);
        let xv = tape.constant(batch * self.config.lookback, self.config.input_dim, x.to_vec());
        let f = self.stacks(&mut tape, &bound, xv);
        f.into_iter().map(|v| tape.value(v).data().to_vec()).collect()
    }
}

impl Architecture for NBeats {
    fn lookback(&self) -> usize {
        self.config.lookback
    }

    fn input_dim(&self) -> usize {
        self.config.input_dim
    }

    fn init_params(&self, seed: u64) -> Result<ParamSet> {
        self.config.validate("nbeats")?;
        let c = &self.config;
        let mut rng = Rng::new(seed, "init");
        let mut ps = ParamSet::new();
        for s in 0..c.stacks {
            for j in 0..c.fc_layers {
                let inp = if j == 0 { c.lookback } else { c.fc_units };
                ps.init_weight(&format!("nbeats.s{s}.fc{j}.w"), c.fc_units, inp, &mut rng);
                ps.init_bias(&format!("nbeats.s{s}.fc{j}.b"), c.fc_units);
            }
            ps.init_weight(&format!("nbeats.s{s}.backcast.w"), c.lookback, c.fc_units, &mut rng);
            ps.init_bias(&format!("nbeats.s{s}.backcast.b"), c.lookback);
            ps.init_weight(&format!("nbeats.s{s}.forecast.w"), 1, c.fc_units, &mut rng);
            ps.init_bias(&format!("nbeats.s{s}.forecast.b"), 1);
        }
        Ok(ps)
    }

    /// No dropout inside the stacks.
    fn build(&self, tape: &mut Tape, params: &Bound, x: Var, _batch: usize, _dropout: Option<&mut Rng>) -> Result<Var> {
        let f = self.stacks(tape, params, x);
        let pred = f[1..].iter().fold(f[0], |acc, &v| tape.add(acc, v));
        if !tape.value(pred).is_finite() {
            return Err(Error::NonFinite("stage `nbeats output`".into()));
        }
        Ok(pred)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::{LossConfig, LossKind};
    use crate::model::{forward, loss_value};
    use crate::numeric::grad_check;

    fn inputs(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = Rng::new(seed, "inputs");
        (0..n).map(|_| rng.standard_normal()).collect()
    }

    #[test]
    fn zero_single_stack_returns_forecast_bias() {
        let m = NBeats::new(NBeatsConfig {
            stacks: 1,
            ..NBeatsConfig::tiny(2, 5, 1)
        })
        .unwrap();
        let mut ps = m.init_params(0).unwrap();
        ps.set_all(0.0);
        ps.get_mut("nbeats.s0.forecast.b").unwrap().data_mut()[0] = -0.4;
        let pass = forward(&m, &ps, &inputs(3 * 10, 1), 3, None).unwrap();
        assert_eq!(pass.pred, vec![-0.4; 3]);
    }

    #[test]
    fn backcast_bias_reaches_the_next_stack() {
        let m = NBeats::new(NBeatsConfig::tiny(1, 3, 0)).unwrap();
        let mut ps = m.init_params(0).unwrap();
        ps.set_all(0.0);
        ps.get_mut("nbeats.s0.backcast.b").unwrap().data_mut().copy_from_slice(&[1.0, 2.0, 3.0]);
        // second stack: forecast = Σ r, via one unit with identity-ish weights
        ps.get_mut("nbeats.s1.fc0.w").unwrap().data_mut()[..3].copy_from_slice(&[1.0, 1.0, 1.0]);
        ps.get_mut("nbeats.s1.fc0.b").unwrap().data_mut()[0] = 100.0;
        ps.get_mut("nbeats.s1.fc1.w").unwrap().data_mut()[0] = 1.0;
        ps.get_mut("nbeats.s1.forecast.w").unwrap().data_mut()[0] = 1.0;
        let x = [10.0, 20.0, 30.0];
        let f = m.stack_forecasts(&ps, &x, 1);
        assert_eq!(f[0], vec![0.0]);
        // r = x − (1, 2, 3) → Σ r = 54; plus 100 keeps GELU in its linear regime
        assert!((f[1][0] - 154.0).abs() < 1e-9);
    }

    #[test]
    fn zero_extra_stacks_change_nothing() {
        let small = NBeats::new(NBeatsConfig::tiny(3, 6, 2)).unwrap();
        let big = NBeats::new(NBeatsConfig {
            stacks: 4,
            ..NBeatsConfig::tiny(3, 6, 2)
        })
        .unwrap();
        let ps = small.init_params(3).unwrap();
        let mut pb = big.init_params(9).unwrap();
        pb.set_all(0.0);
        for (name, p) in ps.iter() {
            *pb.get_mut(name).unwrap() = p.value.clone();
        }
        let x = inputs(4 * 18, 4);
        let a = forward(&small, &ps, &x, 4, None).unwrap().pred;
        let b = forward(&big, &pb, &x, 4, None).unwrap().pred;
        assert_eq!(a, b);
    }

    #[test]
    fn stack_forecasts_sum_to_the_output() {
        let m = NBeats::new(NBeatsConfig {
            stacks: 4,
            ..NBeatsConfig::tiny(3, 6, 1)
        })
        .unwrap();
        let ps = m.init_params(5).unwrap();
        let x = inputs(5 * 18, 6);
        let out = forward(&m, &ps, &x, 5, None).unwrap().pred;
        let f = m.stack_forecasts(&ps, &x, 5);
        for (i, o) in out.iter().enumerate() {
            let sum = f[1..].iter().fold(f[0][i], |acc, s| acc + s[i]);
            assert_eq!(sum, *o);
        }
    }

    #[test]
    fn ignores_other_columns() {
        let m = NBeats::new(NBeatsConfig::tiny(3, 4, 0)).unwrap();
        let ps = m.init_params(1).unwrap();
        let x = inputs(12, 2);
        let mut y = x.clone();
        for t in 0..4 {
            y[t * 3 + 1] += 1.0;
            y[t * 3 + 2] -= 2.0;
        }
        assert_eq!(forward(&m, &ps, &x, 1, None).unwrap().pred, forward(&m, &ps, &y, 1, None).unwrap().pred);
    }

    #[test]
    fn tiny_config_gradients_match_central_differences() {
        let m = NBeats::new(NBeatsConfig::tiny(6, 8, 2)).unwrap();
        let mut ps = m.init_params(7).unwrap();
        let mut rng = Rng::new(8, "perturb");
        for (_, p) in ps.iter_mut().filter(|(_, p)| !p.decay) {
            p.value.data_mut().iter_mut().for_each(|v| *v = rng.uniform(-0.5, 0.5));
        }
        let x = inputs(4 * 48, 9);
        let cfg = LossConfig::default();
        let mut pass = forward(&m, &ps, &x, 4, None).unwrap();
        let noise = inputs(4, 10);
        let target: Vec<f64> = pass.pred.iter().zip(&noise).map(|(p, n)| p + 0.05 * n).collect();
        let (_, analytic) = pass.loss_backward(&ps, LossKind::Huber, &cfg, &target).unwrap();
        let report = grad_check(&ps, &analytic, 1e-5, |p| loss_value(&m, p, &x, 4, None, LossKind::Huber, &cfg, &target)).unwrap();
        assert!(report.passes(1e-4), "{:?}", report.worst());
    }
}
