use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rng::Rng;
use super::tape::{Gradients, Tape, Var};
use super::tensor::Tensor;
use crate::error::{Error, Result};

/// A named learnable tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub value: Tensor,
    /// Whether decoupled weight decay applies (false for biases and transition logits).
    pub decay: bool,
}

/// Ordered collection of named parameters; iteration order is lexicographic by name.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    params: BTreeMap<String, Param>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Tensor, decay: bool) {
        self.params.insert(name.into(), Param { value, decay });
    }

    /// Weight matrix `[out × in]` drawn from U(−1/√in, 1/√in).
    pub fn init_weight(&mut self, name: &str, out: usize, inp: usize, rng: &mut Rng) {
        let bound = 1.0 / (inp as f64).sqrt();
        let data = (0..out * inp).map(|_| rng.uniform(-bound, bound)).collect();
        self.insert(name, Tensor::matrix(out, inp, data), true);
    }

    pub fn init_bias(&mut self, name: &str, n: usize) {
        self.insert(name, Tensor::zeros(&[1, n]), false);
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.params.get(name).map(|p| &p.value)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.params.get_mut(name).map(|p| &mut p.value)
    }

    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Param)> {
        self.params.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&String, &mut Param)> {
        self.params.iter_mut()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.params.keys()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn num_scalars(&self) -> usize {
        self.params.values().map(|p| p.value.len()).sum()
    }

    /// Same names and shapes, all zeros.
    pub fn zeros_like(&self) -> ParamSet {
        let params = self
            .params
            .iter()
            .map(|(k, p)| {
                (
                    k.clone(),
                    Param {
                        value: Tensor::zeros(p.value.shape()),
                        decay: p.decay,
                    },
                )
            })
            .collect();
        Self { params }
    }

    pub fn set_all(&mut self, value: f64) {
        for p in self.params.values_mut() {
            p.value.data_mut().iter_mut().for_each(|v| *v = value);
        }
    }

    pub fn global_norm(&self) -> f64 {
        self.params.values().map(|p| p.value.norm_sq()).sum::<f64>().sqrt()
    }

    /// Ensure `other` has exactly the same names and shapes.
    pub fn check_compatible(&self, other: &ParamSet) -> Result<()> {
        if self.params.len() != other.params.len() {
            return Err(Error::Compat(format!(
                "parameter count {} vs {}",
                self.params.len(),
                other.params.len()
            )));
        }
        for ((ka, pa), (kb, pb)) in self.params.iter().zip(&other.params) {
            if ka != kb || pa.value.shape() != pb.value.shape() {
                return Err(Error::Compat(format!("parameter `{ka}` vs `{kb}`")));
            }
        }
        Ok(())
    }

    /// Register every parameter as a tape leaf.
    pub fn bind(&self, tape: &mut Tape) -> Bound {
        let vars = self
            .params
            .iter()
            .map(|(k, p)| (k.clone(), tape.leaf(p.value.clone())))
            .collect();
        Bound { vars }
    }
}

/// Parameters registered on a tape.
pub struct Bound {
    vars: BTreeMap<String, Var>,
}

impl Bound {
    /// Panics if `name` was never registered; model code only asks for names it created.
    pub fn var(&self, name: &str) -> Var {
        match self.vars.get(name) {
            Some(v) => *v,
            None => panic!("unknown parameter `{name}`"),
        }
    }

    /// Gather gradients into a [`ParamSet`] shaped like `like`; untouched parameters get zeros.
    pub fn collect(&self, grads: &mut Gradients, like: &ParamSet) -> ParamSet {
        let mut out = like.zeros_like();
        for (name, p) in out.iter_mut() {
            if let Some(g) = grads.take(self.vars[name]) {
                p.value.data_mut().copy_from_slice(&g);
            }
        }
        out
    }
}
