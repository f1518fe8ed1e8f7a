//! Central-difference verification of analytic gradients.

use serde::Serialize;

use super::params::ParamSet;
use crate::error::{Error, Result};

pub const DEFAULT_EPS: f64 = 1e-5;

#[derive(Clone, Debug, Serialize)]
pub struct EntryReport {
    pub param: String,
    pub max_rel_error: f64,
    pub worst_index: usize,
    pub analytic: f64,
    pub numeric: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GradReport {
    pub entries: Vec<EntryReport>,
    pub max_rel_error: f64,
    pub checked: usize,
}

impl GradReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_error <= tol
    }

    pub fn worst(&self) -> Option<&EntryReport> {
        self.entries
            .iter()
            .max_by(|a, b| a.max_rel_error.total_cmp(&b.max_rel_error))
    }
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compare `analytic` against `(f(θ+eps) − f(θ−eps)) / (2 eps)` for every scalar in `params`.
pub fn grad_check<F>(params: &ParamSet, analytic: &ParamSet, eps: f64, mut loss: F) -> Result<GradReport>
where
    F: FnMut(&ParamSet) -> Result<f64>,
{
    if !(eps > 0.0) {
        return Err(Error::invalid("grad_check eps must be > 0"));
    }
    params.check_compatible(analytic)?;
    let mut report = GradReport::default();
    let mut probe = params.clone();
    for (name, p) in params.iter() {
        let ana = analytic.get(name).expect("compatible sets");
        let mut entry = EntryReport {
            param: name.clone(),
            max_rel_error: 0.0,
            worst_index: 0,
            analytic: 0.0,
            numeric: 0.0,
        };
        for i in 0..p.value.len() {
            let orig = p.value.data()[i];
            probe.get_mut(name).unwrap().data_mut()[i] = orig + eps;
            let plus = loss(&probe)?;
            probe.get_mut(name).unwrap().data_mut()[i] = orig - eps;
            let minus = loss(&probe)?;
            probe.get_mut(name).unwrap().data_mut()[i] = orig;
            if !plus.is_finite() || !minus.is_finite() {
                return Err(Error::NonFinite(format!("loss at perturbed `{name}`[{i}]")));
            }
            let numeric = (plus - minus) / (2.0 * eps);
            let a = ana.data()[i];
            let rel = relative_error(a, numeric);
            if rel > entry.max_rel_error || i == 0 {
                entry.max_rel_error = rel;
                entry.worst_index = i;
                entry.analytic = a;
                entry.numeric = numeric;
            }
            report.checked += 1;
        }
        report.max_rel_error = report.max_rel_error.max(entry.max_rel_error);
        report.entries.push(entry);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::tensor::Tensor;

    #[test]
    fn square_of_single_weight() {
        let mut p = ParamSet::new();
        p.insert("w", Tensor::matrix(1, 1, vec![3.0]), true);
        let mut g = p.zeros_like();
        g.get_mut("w").unwrap().data_mut()[0] = 6.0;
        let r = grad_check(&p, &g, DEFAULT_EPS, |q| Ok(q.get("w").unwrap().data()[0].powi(2))).unwrap();
        assert!(r.max_rel_error < 1e-9);
        assert!((r.entries[0].numeric - 6.0).abs() < 1e-9);
    }

    #[test]
    fn empty_parameter_set() {
        let p = ParamSet::new();
        let r = grad_check(&p, &p, DEFAULT_EPS, |_| Ok(1.0)).unwrap();
        assert!(r.entries.is_empty());
        assert_eq!(r.checked, 0);
    }

    #[test]
    fn non_finite_loss_names_parameter() {
        let mut p = ParamSet::new();
        p.insert("bad", Tensor::matrix(1, 1, vec![0.0]), true);
        let g = p.zeros_like();
        let err = grad_check(&p, &g, 1e-5, |q| Ok(1.0 / (q.get("bad").unwrap().data()[0] - 1e-5))).unwrap_err();
        assert!(err.to_string().contains("bad"));
    }
}
