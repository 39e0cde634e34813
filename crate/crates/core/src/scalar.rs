//! Scalar abstraction for fitness values.
//!
//! The engine never assumes a concrete float type. Objective values, penalty
//! weights and violations are all carried in a [`Scalar`], so the same code
//! runs on `f32` for memory-lean experiments and on `f64` by default.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// A real number usable as a fitness value.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to every Scalar")
    }

    #[inline]
    fn of_count(v: usize) -> Self {
        Self::from_usize(v).expect("count converts to every Scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Optimization direction of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// Orders `a` before `b` when `a` is better. NaNs sort last.
    #[inline]
    pub fn compare<F: Scalar>(self, a: F, b: F) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let ord = match (a.is_nan(), b.is_nan()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            _ => a.partial_cmp(&b).unwrap_or(Ordering::Equal),
        };
        match self {
            Sense::Minimize => ord,
            Sense::Maximize => ord.reverse(),
        }
    }

    /// `true` if `a` is strictly better than `b`.
    #[inline]
    pub fn better<F: Scalar>(self, a: F, b: F) -> bool {
        self.compare(a, b) == std::cmp::Ordering::Less
    }

    /// The better of two values (`a` on ties).
    #[inline]
    pub fn best_of<F: Scalar>(self, a: F, b: F) -> F {
        if self.better(b, a) {
            b
        } else {
            a
        }
    }

    /// Applies the penalty in the direction that makes the value worse.
    #[inline]
    pub fn penalize<F: Scalar>(self, raw: F, weight: F, violation: F) -> F {
        match self {
            Sense::Minimize => raw + weight * violation,
            Sense::Maximize => raw - weight * violation,
        }
    }
}
