use serde::{Deserialize, Serialize};

use super::layers::{dropout, gru_direction, lstm_direction, multi_head_attention, RecurrentWeights};
use super::Architecture;
use crate::error::{Error, Result};
use crate::numeric::{Bound, ParamSet, Rng, Tape, Tensor, Var};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedActivation {
    #[default]
    Sigmoid,
    Tanh,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// Set from the prepared dataset when left at 0.
    pub input_dim: usize,
    pub embed_dim: usize,
    pub lstm_hidden: usize,
    pub gru_hidden: usize,
    pub n_states: usize,
    pub n_heads: usize,
    pub stream_dim: usize,
    pub dropout: f64,
    pub amp_gain: f64,
    pub lookback: usize,
    pub embed_activation: EmbedActivation,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            input_dim: 0,
            embed_dim: 32,
            lstm_hidden: 32,
            gru_hidden: 32,
            n_states: 9,
            n_heads: 4,
            stream_dim: 32,
            dropout: 0.2,
            amp_gain: 1.0,
            lookback: 30,
            embed_activation: EmbedActivation::Sigmoid,
        }
    }
}

impl ModelConfig {
    /// The small configuration used for gradient checks.
    pub fn tiny(input_dim: usize, lookback: usize) -> Self {
        Self {
            input_dim,
            embed_dim: 8,
            lstm_hidden: 4,
            gru_hidden: 4,
            n_states: 3,
            n_heads: 2,
            stream_dim: 8,
            lookback,
            ..Self::default()
        }
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        let dims = [
            ("input_dim", self.input_dim),
            ("embed_dim", self.embed_dim),
            ("lstm_hidden", self.lstm_hidden),
            ("gru_hidden", self.gru_hidden),
            ("n_heads", self.n_heads),
            ("stream_dim", self.stream_dim),
            ("lookback", self.lookback),
        ];
        for (name, v) in dims {
            if v < 1 {
                return Err(Error::config(format!("{path}.{name}"), "must be >= 1"));
            }
        }
        if self.n_states < 2 {
            return Err(Error::config(format!("{path}.n_states"), "must be >= 2"));
        }
        if self.embed_dim % self.n_heads != 0 {
            return Err(Error::config(format!("{path}.n_heads"), "must divide embed_dim"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::config(format!("{path}.dropout"), "must lie in [0, 1)"));
        }
        if !(self.amp_gain >= 0.0) {
            return Err(Error::config(format!("{path}.amp_gain"), "must be >= 0"));
        }
        Ok(())
    }

    pub fn anomaly_hidden(&self) -> usize {
        (self.embed_dim / 2).max(1)
    }
}

/// The dual-stream network: a regime stream (embedding, BiLSTM, latent-state
/// emission with a learned Markov transition) and an anomaly stream (self
/// attention, learned amplification, BiGRU), fused by an elementwise gate.
#[derive(Clone, Debug, PartialEq)]
pub struct DualStream {
    pub config: ModelConfig,
}

/// Handles to the recorded intermediate values of one batch.
#[derive(Clone, Debug)]
pub struct Graph {
    pub batch: usize,
    pub embedding: Var,
    /// emission probabilities `[B·L × N]`
    pub p: Var,
    /// transition-adjusted priors `[B·L × N]`
    pub q: Var,
    /// row-stochastic transition matrix `[N × N]`
    pub transition: Var,
    pub attention: Vec<Var>,
    /// amplification factors `[B·L × 1]`
    pub alpha: Var,
    pub o_m: Var,
    pub o_a: Var,
    /// fusion gate `[B × d_s]`
    pub gamma: Var,
    pub fused: Var,
    pub pred: Var,
}

/// Per-sample diagnostic matrices from one evaluation pass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Introspection {
    /// `[L][N]` emission probabilities per sample
    pub p: Vec<Vec<Vec<f64>>>,
    pub q: Vec<Vec<Vec<f64>>>,
    pub transition: Vec<Vec<f64>>,
    /// head-averaged `[L][L]` attention per sample
    pub attention: Vec<Vec<Vec<f64>>>,
    /// `[L]` amplification factors per sample
    pub alpha: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
    pub o_m: Vec<Vec<f64>>,
    pub o_a: Vec<Vec<f64>>,
    pub fused: Vec<Vec<f64>>,
    pub pred: Vec<f64>,
}

fn lstm_names(layer: usize, dir: &str) -> [String; 3] {
    let p = format!("lstm.l{layer}.{dir}");
    [format!("{p}.w_ih"), format!("{p}.w_hh"), format!("{p}.b")]
}

fn gru_names(layer: usize, dir: &str) -> [String; 4] {
    let p = format!("gru.l{layer}.{dir}");
    [format!("{p}.w_ih"), format!("{p}.w_hh"), format!("{p}.b_ih"), format!("{p}.b_hh")]
}

const DIRS: [&str; 2] = ["fwd", "bwd"];

fn finite(tape: &Tape, v: Var, stage: &str) -> Result<()> {
    if tape.value(v).is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("stage `{stage}`")))
    }
}

impl DualStream {
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate("model")?;
        Ok(Self { config })
    }

    /// Record the full forward pass, returning every intermediate handle.
    pub fn graph(&self, tape: &mut Tape, p: &Bound, x: Var, batch: usize, mut rng: Option<&mut Rng>) -> Result<Graph> {
        let c = &self.config;
        let len = c.lookback;

        let pre = tape.linear(x, p.var("emb.w"), p.var("emb.b"));
        let e = match c.embed_activation {
            EmbedActivation::Sigmoid => tape.sigmoid(pre),
            EmbedActivation::Tanh => tape.tanh(pre),
        };
        let e = dropout(tape, e, c.dropout, rng.as_deref_mut());
        finite(tape, e, "embedding")?;

        // regime stream
        let mut seq = e;
        for layer in 0..2 {
            let mut halves = Vec::with_capacity(2);
            for (d, dir) in DIRS.iter().enumerate() {
                let [wi, wh, b] = lstm_names(layer, dir);
                let w = RecurrentWeights {
                    w_ih: p.var(&wi),
                    w_hh: p.var(&wh),
                    b: p.var(&b),
                    b_hh: None,
                };
                halves.push(lstm_direction(tape, seq, batch, len, w, d == 1));
            }
            seq = tape.concat_cols(&halves);
        }
        let h = seq;
        finite(tape, h, "bilstm")?;
        let logits = tape.linear(h, p.var("emission.w"), p.var("emission.b"));
        let probs = tape.softmax_rows(logits);
        let transition = tape.softmax_rows(p.var("transition.logits"));
        let prev = tape.shift_time(probs, len, 1, 1.0 / c.n_states as f64);
        let q = tape.matmul(prev, transition);
        finite(tape, q, "latent state")?;
        let h_last = tape.timestep(h, len, len - 1);
        let q_last = tape.timestep(q, len, len - 1);
        let hq = tape.concat_cols(&[h_last, q_last]);
        let o_m = tape.linear(hq, p.var("mm_out.w"), p.var("mm_out.b"));

        // anomaly stream
        let attn = multi_head_attention(
            tape,
            e,
            batch,
            c.n_heads,
            [p.var("attn.w_q"), p.var("attn.w_k"), p.var("attn.w_v"), p.var("attn.w_o")],
        );
        finite(tape, attn.z, "attention")?;
        let hid = tape.linear(attn.z, p.var("anom.w1"), p.var("anom.b1"));
        let hid = tape.tanh(hid);
        let hid = dropout(tape, hid, c.dropout, rng.as_deref_mut());
        let s = tape.linear(hid, p.var("anom.w2"), p.var("anom.b2"));
        let s = tape.sigmoid(s);
        let alpha = tape.affine(s, c.amp_gain, 1.0);
        let amplified = tape.mul_col(attn.z, alpha);
        finite(tape, amplified, "amplification")?;
        let mut seq = amplified;
        let mut last = (seq, seq);
        for layer in 0..2 {
            let mut halves = Vec::with_capacity(2);
            for (d, dir) in DIRS.iter().enumerate() {
                let [wi, wh, bi, bh] = gru_names(layer, dir);
                let w = RecurrentWeights {
                    w_ih: p.var(&wi),
                    w_hh: p.var(&wh),
                    b: p.var(&bi),
                    b_hh: Some(p.var(&bh)),
                };
                halves.push(gru_direction(tape, seq, batch, len, w, d == 1));
            }
            last = (halves[0], halves[1]);
            seq = tape.concat_cols(&halves);
        }
        finite(tape, seq, "bigru")?;
        let h_fwd = tape.timestep(last.0, len, len - 1);
        let h_bwd = tape.timestep(last.1, len, 0);
        let hb = tape.concat_cols(&[h_fwd, h_bwd]);
        let o_a = tape.linear(hb, p.var("ad_out.w"), p.var("ad_out.b"));

        // fusion and head
        let both = tape.concat_cols(&[o_m, o_a]);
        let g = tape.linear(both, p.var("fuse.w"), p.var("fuse.b"));
        let gamma = tape.sigmoid(g);
        let one_minus = tape.affine(gamma, -1.0, 1.0);
        let ga = tape.mul(gamma, o_a);
        let gm = tape.mul(one_minus, o_m);
        let fused = tape.add(ga, gm);
        finite(tape, fused, "fusion")?;
        let pred = tape.linear(fused, p.var("out.w"), p.var("out.b"));
        finite(tape, pred, "output")?;
        Ok(Graph {
            batch,
            embedding: e,
            p: probs,
            q,
            transition,
            attention: attn.weights,
            alpha,
            o_m,
            o_a,
            gamma,
            fused,
            pred,
        })
    }

    /// Evaluation-mode pass exporting the diagnostic matrices.
    pub fn introspect(&self, params: &ParamSet, x: &[f64], batch: usize) -> Result<Introspection> {
        super::check_input(self, x, batch)?;
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape);
        let xv = tape.constant(batch * self.config.lookback, self.config.input_dim, x.to_vec());
        let g = self.graph(&mut tape, &bound, xv, batch, None)?;
        let len = self.config.lookback;
        let blocks = |v: Var| -> Vec<Vec<Vec<f64>>> {
            let t = tape.value(v);
            (0..batch)
                .map(|b| (0..len).map(|i| t.row(b * len + i).to_vec()).collect())
                .collect()
        };
        let per_row = |v: Var| -> Vec<Vec<f64>> {
            let t = tape.value(v);
            (0..t.rows()).map(|r| t.row(r).to_vec()).collect()
        };
        let heads: Vec<Vec<Vec<Vec<f64>>>> = g.attention.iter().map(|&a| blocks(a)).collect();
        let nh = heads.len() as f64;
        let attention = (0..batch)
            .map(|b| {
                (0..len)
                    .map(|i| (0..len).map(|j| heads.iter().map(|h| h[b][i][j]).sum::<f64>() / nh).collect())
                    .collect()
            })
            .collect();
        let alpha_t = tape.value(g.alpha);
        Ok(Introspection {
            p: blocks(g.p),
            q: blocks(g.q),
            transition: per_row(g.transition),
            attention,
            alpha: (0..batch).map(|b| (0..len).map(|i| alpha_t.data()[b * len + i]).collect()).collect(),
            gamma: per_row(g.gamma),
            o_m: per_row(g.o_m),
            o_a: per_row(g.o_a),
            fused: per_row(g.fused),
            pred: tape.value(g.pred).data().to_vec(),
        })
    }
}

impl Architecture for DualStream {
    fn lookback(&self) -> usize {
        self.config.lookback
    }

    fn input_dim(&self) -> usize {
        self.config.input_dim
    }

    /// Weights from U(±1/√fan_in) on the `"init"` stream; biases and
    /// transition logits start at zero.
    fn init_params(&self, seed: u64) -> Result<ParamSet> {
        let c = &self.config;
        c.validate("model")?;
        let mut rng = Rng::new(seed, "init");
        let mut ps = ParamSet::new();
        let (f, d, hl, hg, n, ds) = (c.input_dim, c.embed_dim, c.lstm_hidden, c.gru_hidden, c.n_states, c.stream_dim);
        ps.init_weight("emb.w", d, f, &mut rng);
        ps.init_bias("emb.b", d);
        for layer in 0..2 {
            let inp = if layer == 0 { d } else { 2 * hl };
            for dir in DIRS {
                let [wi, wh, b] = lstm_names(layer, dir);
                ps.init_weight(&wi, 4 * hl, inp, &mut rng);
                ps.init_weight(&wh, 4 * hl, hl, &mut rng);
                ps.init_bias(&b, 4 * hl);
            }
        }
        ps.init_weight("emission.w", n, 2 * hl, &mut rng);
        ps.init_bias("emission.b", n);
        ps.insert("transition.logits", Tensor::zeros(&[n, n]), false);
        ps.init_weight("mm_out.w", ds, 2 * hl + n, &mut rng);
        ps.init_bias("mm_out.b", ds);
        for w in ["attn.w_q", "attn.w_k", "attn.w_v", "attn.w_o"] {
            ps.init_weight(w, d, d, &mut rng);
        }
        let ah = c.anomaly_hidden();
        ps.init_weight("anom.w1", ah, d, &mut rng);
        ps.init_bias("anom.b1", ah);
        ps.init_weight("anom.w2", 1, ah, &mut rng);
        ps.init_bias("anom.b2", 1);
        for layer in 0..2 {
            let inp = if layer == 0 { d } else { 2 * hg };
            for dir in DIRS {
                let [wi, wh, bi, bh] = gru_names(layer, dir);
                ps.init_weight(&wi, 3 * hg, inp, &mut rng);
                ps.init_weight(&wh, 3 * hg, hg, &mut rng);
                ps.init_bias(&bi, 3 * hg);
                ps.init_bias(&bh, 3 * hg);
            }
        }
        ps.init_weight("ad_out.w", ds, 2 * hg, &mut rng);
        ps.init_bias("ad_out.b", ds);
        ps.init_weight("fuse.w", ds, 2 * ds, &mut rng);
        ps.init_bias("fuse.b", ds);
        ps.init_weight("out.w", 1, ds, &mut rng);
        ps.init_bias("out.b", 1);
        Ok(ps)
    }

    fn build(&self, tape: &mut Tape, params: &Bound, x: Var, batch: usize, dropout: Option<&mut Rng>) -> Result<Var> {
        Ok(self.graph(tape, params, x, batch, dropout)?.pred)
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
        (0..n).map(|_| rng.gaussian(0.0, 1.0).unwrap()).collect()
    }

    fn tiny() -> DualStream {
        DualStream::new(ModelConfig::tiny(6, 8)).unwrap()
    }

    #[test]
    fn zero_parameters_predict_zero() {
        let m = tiny();
        let mut ps = m.init_params(0).unwrap();
        ps.set_all(0.0);
        let x = inputs(2 * 8 * 6, 1);
        let pass = forward(&m, &ps, &x, 2, None).unwrap();
        assert_eq!(pass.pred, vec![0.0, 0.0]);
        let intro = m.introspect(&ps, &x, 2).unwrap();
        for row in intro.q[0].iter().chain(&intro.p[1]) {
            for v in row {
                assert!((v - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn eval_mode_is_deterministic() {
        let m = tiny();
        let ps = m.init_params(3).unwrap();
        let x = inputs(3 * 48, 2);
        let a = forward(&m, &ps, &x, 3, None).unwrap().pred;
        let b = forward(&m, &ps, &x, 3, None).unwrap().pred;
        assert_eq!(a, b);
    }

    #[test]
    fn identity_transition_copies_previous_emission() {
        let m = tiny();
        let mut ps = m.init_params(4).unwrap();
        let t = ps.get_mut("transition.logits").unwrap();
        for i in 0..3 {
            t.data_mut()[i * 3 + i] = 50.0;
        }
        let intro = m.introspect(&ps, &inputs(48, 5), 1).unwrap();
        for t in 1..8 {
            for s in 0..3 {
                assert!((intro.q[0][t][s] - intro.p[0][t - 1][s]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn zero_gain_leaves_anomaly_mlp_untouched() {
        let m = DualStream::new(ModelConfig {
            amp_gain: 0.0,
            ..ModelConfig::tiny(6, 8)
        })
        .unwrap();
        let ps = m.init_params(6).unwrap();
        let x = inputs(4 * 48, 7);
        let target = inputs(4, 8);
        let mut pass = forward(&m, &ps, &x, 4, None).unwrap();
        let (_, g) = pass
            .loss_backward(&ps, LossKind::Extreme, &LossConfig::default(), &target)
            .unwrap();
        for name in ["anom.w1", "anom.b1", "anom.w2", "anom.b2"] {
            assert!(g.get(name).unwrap().data().iter().all(|&v| v == 0.0), "{name}");
        }
        let intro = m.introspect(&ps, &x, 4).unwrap();
        assert!(intro.alpha.iter().flatten().all(|&a| a == 1.0));
    }

    #[test]
    fn zero_upstream_gradient_and_released_cache() {
        let m = tiny();
        let ps = m.init_params(9).unwrap();
        let x = inputs(2 * 48, 10);
        let mut pass = forward(&m, &ps, &x, 2, None).unwrap();
        let g = pass.backward(&ps, &[0.0, 0.0]).unwrap();
        assert_eq!(g.global_norm(), 0.0);
        pass.release();
        let err = pass.backward(&ps, &[1.0, 1.0]).unwrap_err();
        assert!(err.to_string().contains("missing cache"));
    }

    #[test]
    fn tiny_config_gradients_match_central_differences() {
        let m = tiny();
        let mut ps = m.init_params(11).unwrap();
        // non-trivial transition logits and biases so every path is exercised
        let mut rng = Rng::new(12, "perturb");
        for (name, p) in ps.iter_mut() {
            if !p.decay || name.contains(".b") {
                for v in p.value.data_mut() {
                    *v = rng.uniform(-0.5, 0.5);
                }
            }
        }
        let x = inputs(4 * 48, 13);
        let cfg = LossConfig::default();
        let seed = 15;
        let mut pass = forward(&m, &ps, &x, 4, Some(&mut Rng::new(seed, "dropout"))).unwrap();
        // small residuals keep finite-difference roundoff below the smallest gradients
        let noise = inputs(4, 14);
        let target: Vec<f64> = pass.pred.iter().zip(&noise).map(|(p, n)| p + 0.05 * n).collect();
        let (_, analytic) = pass.loss_backward(&ps, LossKind::Extreme, &cfg, &target).unwrap();
        let report = grad_check(&ps, &analytic, 1e-5, |p| {
            loss_value(&m, p, &x, 4, Some(&mut Rng::new(seed, "dropout")), LossKind::Extreme, &cfg, &target)
        })
        .unwrap();
        assert!(report.passes(1e-4), "{:?}", report.worst());
    }
}
