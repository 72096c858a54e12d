//! Adam with the standard bias-corrected moment updates.

use serde::{Deserialize, Serialize};

use super::{Gradients, Mlp};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam<S> {
    pub config: AdamConfig,
    m: Gradients<S>,
    v: Gradients<S>,
    step: u64,
}

impl<S: Scalar> Adam<S> {
    pub fn new(net: &Mlp<S>, config: AdamConfig) -> Adam<S> {
        Adam {
            config,
            m: Gradients::zeros_like(net),
            v: Gradients::zeros_like(net),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub(crate) fn state(&self) -> (&Gradients<S>, &Gradients<S>) {
        (&self.m, &self.v)
    }

    pub(crate) fn from_state(config: AdamConfig, m: Gradients<S>, v: Gradients<S>, step: u64) -> Adam<S> {
        Adam { config, m, v, step }
    }

    /// One update of `params` in place. Deterministic: identical inputs
    /// produce identical parameters and moments.
    pub fn apply(&mut self, params: &mut Mlp<S>, grads: &Gradients<S>) {
        self.step += 1;
        let b1 = S::from_f64(self.config.beta1);
        let b2 = S::from_f64(self.config.beta2);
        let lr = S::from_f64(self.config.learning_rate);
        let eps = S::from_f64(self.config.epsilon);
        let one = S::one();
        let corr1 = one - b1.powi(self.step as i32);
        let corr2 = one - b2.powi(self.step as i32);

        for ((m, v), (p, g)) in self
            .m
            .iter_mut()
            .zip(self.v.iter_mut())
            .zip(params.zip_params_mut(grads))
        {
            *m = b1 * *m + (one - b1) * *g;
            *v = b2 * *v + (one - b2) * *g * *g;
            let m_hat = *m / corr1;
            let v_hat = *v / corr2;
            *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}
