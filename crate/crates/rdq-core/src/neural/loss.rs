//! Policy distributions and the training losses: smooth-L1 (with a squared
//! alternative) for the Q-target error and a floored KL divergence for
//! distillation toward the teacher policy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("probability vector must be non-empty")]
    Empty,
    #[error("negative probability at index {0}")]
    Negative(usize),
    #[error("probabilities sum to {sum}, expected 1 within {tol}")]
    NotNormalized { sum: f64, tol: f64 },
}

/// A probability vector over the action set: entries >= 0, sum 1 within
/// 1e-9.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyDist<S> {
    probs: Vec<S>,
}

impl<S: Scalar> PolicyDist<S> {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(probs: Vec<S>) -> Result<PolicyDist<S>, PolicyError> {
        if probs.is_empty() {
            return Err(PolicyError::Empty);
        }
        for (i, p) in probs.iter().enumerate() {
            if *p < S::zero() || !p.is_finite() {
                return Err(PolicyError::Negative(i));
            }
        }
        let sum: f64 = probs.iter().map(|p| p.into_f64()).sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(PolicyError::NotNormalized {
                sum,
                tol: Self::SUM_TOLERANCE,
            });
        }
        Ok(PolicyDist { probs })
    }

    /// Normalize a non-negative weight vector into a distribution.
    pub(crate) fn from_weights(mut weights: Vec<S>) -> PolicyDist<S> {
        let sum: S = weights.iter().copied().sum();
        debug_assert!(sum > S::zero());
        for w in weights.iter_mut() {
            *w = *w / sum;
        }
        PolicyDist { probs: weights }
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn uniform(n: usize) -> PolicyDist<S> {
        assert!(n > 0);
        PolicyDist {
            probs: vec![S::one() / S::from_f64(n as f64); n],
        }
    }
}

/// Temperature softmax with max-subtraction for stability. Valid for any
/// finite input, including extreme magnitudes.
pub fn softmax<S: Scalar>(values: &[S], temperature: S) -> PolicyDist<S> {
    assert!(!values.is_empty());
    assert!(temperature > S::zero(), "temperature must be positive");
    let max = values
        .iter()
        .copied()
        .fold(S::neg_infinity(), |a, b| if b > a { b } else { a });
    let weights: Vec<S> = values
        .iter()
        .map(|v| ((*v - max) / temperature).exp())
        .collect();
    PolicyDist::from_weights(weights)
}

/// Smooth-L1 (Huber with unit transition): `0.5 d^2` for `|d| < 1`, else
/// `|d| - 0.5`.
pub fn smooth_l1<S: Scalar>(pred: S, target: S) -> S {
    let d = pred - target;
    if d.abs() < S::one() {
        S::c(0.5) * d * d
    } else {
        d.abs() - S::c(0.5)
    }
}

/// d(smooth_l1)/d(pred): the error clamped to [-1, 1].
pub fn smooth_l1_grad<S: Scalar>(pred: S, target: S) -> S {
    let d = pred - target;
    if d.abs() < S::one() {
        d
    } else {
        d.signum()
    }
}

/// Squared error `d^2`, selectable in place of smooth-L1 for ablation.
pub fn squared_error<S: Scalar>(pred: S, target: S) -> S {
    let d = pred - target;
    d * d
}

pub fn squared_error_grad<S: Scalar>(pred: S, target: S) -> S {
    S::c(2.0) * (pred - target)
}

/// Floor the teacher's entries at `floor` and renormalize. Teacher policies
/// assign exact zeros to unsafe actions; the floor keeps the divergence (and
/// its gradient) finite while the student still carries mass there.
pub fn floor_renormalize<S: Scalar>(teacher: &PolicyDist<S>, floor: S) -> Vec<S> {
    let mut t: Vec<S> = teacher
        .probs()
        .iter()
        .map(|&p| if p < floor { floor } else { p })
        .collect();
    let sum: S = t.iter().copied().sum();
    for v in t.iter_mut() {
        *v = *v / sum;
    }
    t
}

/// `KL(student || teacher)` with the teacher floored and renormalized.
/// Terms with zero student mass contribute nothing.
pub fn kl_divergence<S: Scalar>(student: &PolicyDist<S>, teacher: &PolicyDist<S>, floor: S) -> S {
    assert_eq!(student.len(), teacher.len());
    let t = floor_renormalize(teacher, floor);
    student
        .probs()
        .iter()
        .zip(t.iter())
        .map(|(&s, &t)| {
            if s > S::zero() {
                s * (s / t).ln()
            } else {
                S::zero()
            }
        })
        .sum()
}

/// Gradient of `KL(softmax(z / tau) || teacher)` w.r.t. the logits `z`.
///
/// With `s = softmax(z / tau)` and floored teacher `t`:
/// `dKL/dz_j = s_j * (ln(s_j / t_j) - KL) / tau`.
pub fn kl_grad_wrt_logits<S: Scalar>(
    student: &PolicyDist<S>,
    teacher: &PolicyDist<S>,
    floor: S,
    temperature: S,
) -> Vec<S> {
    let t = floor_renormalize(teacher, floor);
    let s = student.probs();
    let kl: S = s
        .iter()
        .zip(t.iter())
        .map(|(&s, &t)| if s > S::zero() { s * (s / t).ln() } else { S::zero() })
        .sum();
    s.iter()
        .zip(t.iter())
        .map(|(&sj, &tj)| {
            if sj > S::zero() {
                sj * ((sj / tj).ln() - kl) / temperature
            } else {
                S::zero()
            }
        })
        .collect()
}
