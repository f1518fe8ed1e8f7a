//! Deterministic numeric substrate: tensors, a reverse-mode tape, the PRNG,
//! and gradient verification.

pub mod gradcheck;
pub mod params;
pub mod rng;
pub mod spline;
pub mod stats;
pub mod tape;
pub mod tensor;

pub use gradcheck::{grad_check, GradReport};
pub use params::{Bound, Param, ParamSet};
pub use rng::Rng;
pub use tape::{Gradients, Tape, Var};
pub use tensor::{sigmoid, sigmoid_scalar, softmax, Tensor};
