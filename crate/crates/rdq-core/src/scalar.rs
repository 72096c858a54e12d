//! Scalar abstraction for the numeric parts of the crate.
//!
//! Network weights, policies and losses are generic over [`Scalar`] so the
//! same trainer runs in `f32` or `f64`. Environments, metrics and CSV logs
//! stay in `f64`; values cross the boundary through [`Scalar::from_f64`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::Float;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Scalar:
    Float + Sum + Debug + Display + Default + Serialize + DeserializeOwned + Send + Sync + 'static
{
    fn from_f64(v: f64) -> Self;
    /// Widening (never lossy) conversion back to `f64`. Named apart from
    /// `ToPrimitive::to_f64` to avoid the `Option` variant.
    fn into_f64(self) -> f64;

    /// Shorthand for `from_f64` in constant-heavy expressions.
    fn c(v: f64) -> Self {
        Self::from_f64(v)
    }
}

impl Scalar for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn into_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn into_f64(self) -> f64 {
        self
    }
}
