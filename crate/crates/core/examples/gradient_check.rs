//! Finite differences against the tape gradients for each network.

use extremecast::baselines::{NBeats, NBeatsConfig, Tcn, TcnConfig};
use extremecast::loss::{LossConfig, LossKind};
use extremecast::model::{forward, loss_value, Architecture, DualStream, ModelConfig};
use extremecast::numeric::{grad_check, Rng};

fn check(name: &str, arch: &dyn Architecture) -> extremecast::Result<()> {
    let ps = arch.init_params(1)?;
    let mut rng = Rng::new(1, "x");
    let batch = 4;
    let x: Vec<f64> = (0..batch * arch.lookback() * arch.input_dim()).map(|_| rng.standard_normal()).collect();
    let cfg = LossConfig::default();
    let mut pass = forward(arch, &ps, &x, batch, None)?;
    let target: Vec<f64> = pass.pred.iter().map(|p| p + 0.1 * rng.standard_normal()).collect();
    let (loss, grads) = pass.loss_backward(&ps, LossKind::Extreme, &cfg, &target)?;
    let report = grad_check(&ps, &grads, 1e-5, |p| loss_value(arch, p, &x, batch, None, LossKind::Extreme, &cfg, &target))?;
    let worst = report.worst().map(|w| w.param.clone()).unwrap_or_default();
    println!("{name:<12} loss {loss:.5}  max rel err {:.2e} at {worst}", report.max_rel_error);
    Ok(())
}

fn main() -> extremecast::Result<()> {
    check("dual_stream", &DualStream::new(ModelConfig::tiny(6, 8))?)?;
    check("tcn", &Tcn::new(TcnConfig::tiny(6, 8))?)?;
    check("nbeats", &NBeats::new(NBeatsConfig::tiny(6, 8, 0))?)?;
    Ok(())
}
