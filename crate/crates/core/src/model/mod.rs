//! Tape-built forecasters and the dual-stream regime/anomaly network.

pub mod layers;
mod network;

use crate::error::{Error, Result};
use crate::loss::{loss_on_tape, LossConfig, LossKind};
use crate::numeric::{Bound, ParamSet, Rng, Tape, Var};

pub use network::{DualStream, EmbedActivation, Graph, Introspection, ModelConfig};

/// A network whose forward pass is recorded on a [`Tape`].
///
/// `x` holds `batch` windows of `[lookback × input_dim]`, sample-major.
pub trait Architecture {
    fn lookback(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn init_params(&self, seed: u64) -> Result<ParamSet>;
    /// Record the forward pass; returns predictions `[batch × 1]`.
    /// `dropout` is `None` in evaluation mode.
    fn build(&self, tape: &mut Tape, params: &Bound, x: Var, batch: usize, dropout: Option<&mut Rng>) -> Result<Var>;
}

/// A recorded forward pass that can be differentiated.
pub struct ForwardPass {
    pub pred: Vec<f64>,
    cache: Option<(Tape, Bound, Var)>,
}

impl ForwardPass {
    /// Drop the cached activations; later `backward` calls fail.
    pub fn release(&mut self) {
        self.cache = None;
    }

    /// Parameter gradients for an upstream gradient `d loss / d pred`.
    pub fn backward(&self, params: &ParamSet, dpred: &[f64]) -> Result<ParamSet> {
        let (tape, bound, out) = self.cache.as_ref().ok_or_else(missing_cache)?;
        if dpred.len() != self.pred.len() {
            return Err(Error::Shape(format!("loss gradient has {} entries for {} predictions", dpred.len(), self.pred.len())));
        }
        let mut g = tape.backward_with(*out, dpred.to_vec());
        Ok(bound.collect(&mut g, params))
    }

    /// Loss on the cached predictions and its parameter gradients.
    pub fn loss_backward(&mut self, params: &ParamSet, kind: LossKind, cfg: &LossConfig, target: &[f64]) -> Result<(f64, ParamSet)> {
        let (tape, bound, out) = self.cache.as_mut().ok_or_else(missing_cache)?;
        if target.len() != self.pred.len() {
            return Err(Error::Shape(format!("{} targets for {} predictions", target.len(), self.pred.len())));
        }
        let loss = loss_on_tape(tape, kind, cfg, *out, target)?;
        let value = tape.value(loss).data()[0];
        let mut g = tape.backward(loss);
        Ok((value, bound.collect(&mut g, params)))
    }
}

fn missing_cache() -> Error {
    Error::invalid("backward needs the cached activations of a forward pass (missing cache)")
}

fn check_input<A: Architecture + ?Sized>(arch: &A, x: &[f64], batch: usize) -> Result<()> {
    let want = batch * arch.lookback() * arch.input_dim();
    if batch == 0 || x.len() != want {
        return Err(Error::Shape(format!(
            "input has {} values, expected batch {batch} × lookback {} × features {}",
            x.len(),
            arch.lookback(),
            arch.input_dim()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("input window".into()));
    }
    Ok(())
}

/// Run a forward pass, keeping the tape for a later backward pass.
pub fn forward<A: Architecture + ?Sized>(
    arch: &A,
    params: &ParamSet,
    x: &[f64],
    batch: usize,
    dropout: Option<&mut Rng>,
) -> Result<ForwardPass> {
    check_input(arch, x, batch)?;
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let xv = tape.constant(batch * arch.lookback(), arch.input_dim(), x.to_vec());
    let out = arch.build(&mut tape, &bound, xv, batch, dropout)?;
    let pred = tape.value(out).data().to_vec();
    if pred.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("prediction".into()));
    }
    Ok(ForwardPass {
        pred,
        cache: Some((tape, bound, out)),
    })
}

/// Deterministic evaluation-mode predictions, in chunks of `chunk` windows.
pub fn predict<A: Architecture + ?Sized>(arch: &A, params: &ParamSet, x: &[f64], n: usize, chunk: usize) -> Result<Vec<f64>> {
    let stride = arch.lookback() * arch.input_dim();
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let end = (start + chunk.max(1)).min(n);
        let mut pass = forward(arch, params, &x[start * stride..end * stride], end - start, None)?;
        pass.release();
        out.extend(pass.pred);
        start = end;
    }
    Ok(out)
}

/// Loss of an evaluation-mode (or fixed-dropout) pass, for finite-difference checks.
pub fn loss_value<A: Architecture + ?Sized>(
    arch: &A,
    params: &ParamSet,
    x: &[f64],
    batch: usize,
    dropout: Option<&mut Rng>,
    kind: LossKind,
    cfg: &LossConfig,
    target: &[f64],
) -> Result<f64> {
    let pass = forward(arch, params, x, batch, dropout)?;
    crate::loss::evaluate_loss(kind, cfg, &pass.pred, target)
}
