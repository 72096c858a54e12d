//! Dense Q-network with hand-rolled reverse-mode gradients.
//!
//! The network is a plain MLP (ReLU hidden layers, linear output) over the
//! flattened ground-truth state. `forward_cached` keeps per-layer
//! activations so `backward` can push an output-side gradient down to every
//! weight; the training losses live in [`loss`] and the optimizer in
//! [`optim`].

pub mod loss;
pub mod optim;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("input has length {got}, network expects {expected}")]
    InputDim { got: usize, expected: usize },
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer<S> {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major `out_dim x in_dim`.
    pub w: Vec<S>,
    pub b: Vec<S>,
}

/// Multi-layer perceptron; also serves as the shape-carrier for gradients
/// and optimizer moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp<S> {
    layers: Vec<DenseLayer<S>>,
}

/// Per-layer activations of one forward pass (inputs of each layer plus the
/// final output).
pub struct MlpCache<S> {
    inputs: Vec<Vec<S>>,
    output: Vec<S>,
}

impl<S: Scalar> MlpCache<S> {
    pub fn output(&self) -> &[S] {
        &self.output
    }
}

impl<S: Scalar> Mlp<S> {
    /// Build a network with the given layer widths (`dims[0]` inputs,
    /// `dims.last()` outputs), weights uniform in +-1/sqrt(fan_in).
    pub fn new<R: Rng>(dims: &[usize], rng: &mut R) -> Mlp<S> {
        assert!(dims.len() >= 2, "need at least input and output dims");
        let layers = dims
            .windows(2)
            .map(|d| {
                let (in_dim, out_dim) = (d[0], d[1]);
                let bound = 1.0 / (in_dim as f64).sqrt();
                let w = (0..in_dim * out_dim)
                    .map(|_| S::from_f64(rng.gen_range(-bound..bound)))
                    .collect();
                let b = vec![S::zero(); out_dim];
                DenseLayer {
                    in_dim,
                    out_dim,
                    w,
                    b,
                }
            })
            .collect();
        Mlp { layers }
    }

    pub fn from_layers(layers: Vec<DenseLayer<S>>) -> Mlp<S> {
        assert!(!layers.is_empty());
        for pair in layers.windows(2) {
            assert_eq!(pair[0].out_dim, pair[1].in_dim, "layer shapes must chain");
        }
        Mlp { layers }
    }

    pub fn layers(&self) -> &[DenseLayer<S>] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").out_dim
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.input_dim()];
        dims.extend(self.layers.iter().map(|l| l.out_dim));
        dims
    }

    /// Q-values for one state vector.
    pub fn forward(&self, x: &[S]) -> Vec<S> {
        self.forward_cached(x).output
    }

    pub fn try_forward(&self, x: &[S]) -> Result<Vec<S>, NeuralError> {
        if x.len() != self.input_dim() {
            return Err(NeuralError::InputDim {
                got: x.len(),
                expected: self.input_dim(),
            });
        }
        Ok(self.forward(x))
    }

    /// Forward pass retaining the per-layer inputs needed by `backward`.
    pub fn forward_cached(&self, x: &[S]) -> MlpCache<S> {
        assert_eq!(x.len(), self.input_dim(), "input dimension mismatch");
        let n = self.layers.len();
        let mut inputs = Vec::with_capacity(n);
        let mut cur = x.to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = layer.b.clone();
            for r in 0..layer.out_dim {
                let row = &layer.w[r * layer.in_dim..(r + 1) * layer.in_dim];
                let mut acc = S::zero();
                for (w, xi) in row.iter().zip(cur.iter()) {
                    acc = acc + *w * *xi;
                }
                out[r] = out[r] + acc;
            }
            // ReLU on hidden layers only.
            if i + 1 < n {
                for v in out.iter_mut() {
                    if *v < S::zero() {
                        *v = S::zero();
                    }
                }
            }
            inputs.push(cur);
            cur = out;
        }
        MlpCache {
            inputs,
            output: cur,
        }
    }

    /// Accumulate into `grads` the parameter gradients of a scalar loss
    /// whose gradient w.r.t. the network output is `upstream`.
    pub fn backward(&self, cache: &MlpCache<S>, upstream: &[S], grads: &mut Gradients<S>) {
        assert_eq!(upstream.len(), self.output_dim());
        let mut delta = upstream.to_vec();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let input = &cache.inputs[i];
            let gl = &mut grads.layers[i];
            for r in 0..layer.out_dim {
                let d = delta[r];
                if d != S::zero() {
                    gl.b[r] = gl.b[r] + d;
                    let row = &mut gl.w[r * layer.in_dim..(r + 1) * layer.in_dim];
                    for (g, xi) in row.iter_mut().zip(input.iter()) {
                        *g = *g + d * *xi;
                    }
                }
            }
            if i == 0 {
                break;
            }
            // Propagate through the weights, then through the previous
            // layer's ReLU (its output is this layer's input).
            let mut prev = vec![S::zero(); layer.in_dim];
            for r in 0..layer.out_dim {
                let d = delta[r];
                if d != S::zero() {
                    let row = &layer.w[r * layer.in_dim..(r + 1) * layer.in_dim];
                    for (p, w) in prev.iter_mut().zip(row.iter()) {
                        *p = *p + d * *w;
                    }
                }
            }
            for (p, v) in prev.iter_mut().zip(input.iter()) {
                if *v <= S::zero() {
                    *p = S::zero();
                }
            }
            delta = prev;
        }
    }

    pub fn check_finite(&self) -> Result<(), NeuralError> {
        for layer in &self.layers {
            if layer.w.iter().chain(layer.b.iter()).any(|v| !v.is_finite()) {
                return Err(NeuralError::NonFinite {
                    context: "network parameters",
                });
            }
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// Visit every parameter mutably, paired with the matching gradient
    /// slot. Iteration order is stable.
    pub fn zip_params_mut<'a>(
        &'a mut self,
        grads: &'a Gradients<S>,
    ) -> impl Iterator<Item = (&'a mut S, &'a S)> {
        self.layers
            .iter_mut()
            .zip(grads.layers.iter())
            .flat_map(|(l, g)| {
                l.w.iter_mut()
                    .zip(g.w.iter())
                    .chain(l.b.iter_mut().zip(g.b.iter()))
            })
    }
}

/// Gradient (or moment) storage shaped like an [`Mlp`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gradients<S> {
    layers: Vec<GradLayer<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GradLayer<S> {
    w: Vec<S>,
    b: Vec<S>,
}

impl<S: Scalar> Gradients<S> {
    pub fn zeros_like(net: &Mlp<S>) -> Gradients<S> {
        Gradients {
            layers: net
                .layers
                .iter()
                .map(|l| GradLayer {
                    w: vec![S::zero(); l.w.len()],
                    b: vec![S::zero(); l.b.len()],
                })
                .collect(),
        }
    }

    pub fn scale(&mut self, factor: S) {
        for l in &mut self.layers {
            for v in l.w.iter_mut().chain(l.b.iter_mut()) {
                *v = *v * factor;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &S> {
        self.layers.iter().flat_map(|l| l.w.iter().chain(l.b.iter()))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut S> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.w.iter_mut().chain(l.b.iter_mut()))
    }

    pub fn check_finite(&self) -> Result<(), NeuralError> {
        if self.iter().any(|v| !v.is_finite()) {
            return Err(NeuralError::NonFinite {
                context: "gradients",
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
