//! Recurrent, attention and dropout building blocks on the tape.
//!
//! Sequences are `[batch·len × width]` with row `b·len + t`.

use crate::numeric::{Rng, Tape, Var};

/// Inverted dropout; identity when `rng` is `None` or `p == 0`.
pub fn dropout(tape: &mut Tape, x: Var, p: f64, rng: Option<&mut Rng>) -> Var {
    let Some(rng) = rng else { return x };
    if p <= 0.0 {
        return x;
    }
    let keep = 1.0 / (1.0 - p);
    let mask = (0..tape.value(x).len())
        .map(|_| if rng.uniform01() < p { 0.0 } else { keep })
        .collect();
    tape.mul_const(x, mask)
}

/// Weights of one recurrent direction. LSTM uses `b` only (gates i, f, g, o);
/// GRU uses both `b` (input side) and `b_hh` (gates r, z, n).
#[derive(Clone, Copy, Debug)]
pub struct RecurrentWeights {
    pub w_ih: Var,
    pub w_hh: Var,
    pub b: Var,
    pub b_hh: Option<Var>,
}

fn step_order(len: usize, reverse: bool) -> Vec<usize> {
    if reverse {
        (0..len).rev().collect()
    } else {
        (0..len).collect()
    }
}

/// One LSTM pass over `seq`; returns the hidden sequence in time order.
pub fn lstm_direction(tape: &mut Tape, seq: Var, batch: usize, len: usize, w: RecurrentWeights, reverse: bool) -> Var {
    let hidden = tape.value(w.w_hh).cols();
    let xw = tape.linear(seq, w.w_ih, w.b);
    let mut h = tape.constant(batch, hidden, vec![0.0; batch * hidden]);
    let mut c = h;
    let mut outs = vec![h; len];
    for t in step_order(len, reverse) {
        let xt = tape.timestep(xw, len, t);
        let hh = tape.matmul_bt(h, w.w_hh);
        let pre = tape.add(xt, hh);
        let i = tape.slice_cols(pre, 0, hidden);
        let f = tape.slice_cols(pre, hidden, 2 * hidden);
        let g = tape.slice_cols(pre, 2 * hidden, 3 * hidden);
        let o = tape.slice_cols(pre, 3 * hidden, 4 * hidden);
        let (i, f, g, o) = (tape.sigmoid(i), tape.sigmoid(f), tape.tanh(g), tape.sigmoid(o));
        let fc = tape.mul(f, c);
        let ig = tape.mul(i, g);
        c = tape.add(fc, ig);
        let tc = tape.tanh(c);
        h = tape.mul(o, tc);
        outs[t] = h;
    }
    tape.interleave_time(&outs)
}

/// One GRU pass (r, z, n gates with separate input and hidden biases).
/// Returns the hidden sequence in time order.
pub fn gru_direction(tape: &mut Tape, seq: Var, batch: usize, len: usize, w: RecurrentWeights, reverse: bool) -> Var {
    let hidden = tape.value(w.w_hh).cols();
    let b_hh = w.b_hh.expect("GRU needs a hidden bias");
    let xw = tape.linear(seq, w.w_ih, w.b);
    let mut h = tape.constant(batch, hidden, vec![0.0; batch * hidden]);
    let mut outs = vec![h; len];
    for t in step_order(len, reverse) {
        let xt = tape.timestep(xw, len, t);
        let hw = tape.linear(h, w.w_hh, b_hh);
        let (xr, xz, xn) = (
            tape.slice_cols(xt, 0, hidden),
            tape.slice_cols(xt, hidden, 2 * hidden),
            tape.slice_cols(xt, 2 * hidden, 3 * hidden),
        );
        let (hr, hz, hn) = (
            tape.slice_cols(hw, 0, hidden),
            tape.slice_cols(hw, hidden, 2 * hidden),
            tape.slice_cols(hw, 2 * hidden, 3 * hidden),
        );
        let r = tape.add(xr, hr);
        let r = tape.sigmoid(r);
        let z = tape.add(xz, hz);
        let z = tape.sigmoid(z);
        let rh = tape.mul(r, hn);
        let n = tape.add(xn, rh);
        let n = tape.tanh(n);
        // h' = (1 − z)·n + z·h = n + z·(h − n)
        let d = tape.sub(h, n);
        let zd = tape.mul(z, d);
        h = tape.add(n, zd);
        outs[t] = h;
    }
    tape.interleave_time(&outs)
}

/// Output of multi-head self-attention.
#[derive(Clone, Debug)]
pub struct Attention {
    /// `[batch·len × width]`
    pub z: Var,
    /// Per-head attention weights, each `[batch·len × len]` (row `b·len + i` holds query `i`).
    pub weights: Vec<Var>,
}

/// Unmasked scaled dot-product attention with `heads` heads and no positional
/// encoding. All projections are `[width × width]` without biases.
pub fn multi_head_attention(tape: &mut Tape, e: Var, batch: usize, heads: usize, proj: [Var; 4]) -> Attention {
    let [wq, wk, wv, wo] = proj;
    let width = tape.value(wq).rows();
    let dh = width / heads;
    let q = tape.matmul_bt(e, wq);
    let k = tape.matmul_bt(e, wk);
    let v = tape.matmul_bt(e, wv);
    let scale = 1.0 / (dh as f64).sqrt();
    let mut parts = Vec::with_capacity(heads);
    let mut weights = Vec::with_capacity(heads);
    for h in 0..heads {
        let (lo, hi) = (h * dh, (h + 1) * dh);
        let qh = tape.slice_cols(q, lo, hi);
        let kh = tape.slice_cols(k, lo, hi);
        let vh = tape.slice_cols(v, lo, hi);
        let s = tape.block_matmul_bt(qh, kh, batch);
        let s = tape.affine(s, scale, 0.0);
        let a = tape.softmax_rows(s);
        parts.push(tape.block_matmul(a, vh, batch));
        weights.push(a);
    }
    let cat = if heads == 1 { parts[0] } else { tape.concat_cols(&parts) };
    let z = tape.matmul_bt(cat, wo);
    Attention { z, weights }
}
