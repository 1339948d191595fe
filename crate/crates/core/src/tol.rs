//! Centralized numeric tolerances.
//!
//! The underlying theory is exact; floating point needs explicit slack.
//! Every check in the crate takes its threshold from a [`Tolerances`]
//! value so a run can be tightened or loosened as a whole.

use serde::{Deserialize, Serialize};

/// Tolerance profile used by every verification routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Normalization and marginal checks (sums that must equal 1).
    pub sum: f64,
    /// Support / orthogonality checks (values that must equal 0).
    pub zero: f64,
    /// KKT residual for cone projections and Jordan splits.
    pub kkt: f64,
    /// Invariance of inner products under group elements.
    pub inv: f64,
    /// "Constant across the orbit" checks in the outcome embedding.
    pub constancy: f64,
    /// Entropy gap |H - S| for the monoentropy verdict.
    pub entropy: f64,
    /// Residual for constructed order-automorphisms (T(a) vs b).
    pub map: f64,
    /// Strict interiority margin (pairing with every pure state).
    pub interior: f64,
    /// Residual when fitting a bilinear form to the one-parameter family.
    pub fit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sum: 1e-9,
            zero: 1e-10,
            kkt: 1e-9,
            inv: 1e-8,
            constancy: 1e-8,
            entropy: 1e-9,
            map: 1e-9,
            interior: 1e-7,
            fit: 1e-7,
        }
    }
}

impl Tolerances {
    /// Named profile lookup; used by the CLI's environment override.
    pub fn profile(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::default()),
            "strict" => Some(Self {
                sum: 1e-12,
                zero: 1e-12,
                kkt: 1e-11,
                inv: 1e-10,
                constancy: 1e-10,
                entropy: 1e-11,
                map: 1e-11,
                interior: 1e-9,
                fit: 1e-9,
            }),
            "loose" => Some(Self {
                sum: 1e-6,
                zero: 1e-7,
                kkt: 1e-6,
                inv: 1e-5,
                constancy: 1e-5,
                entropy: 1e-6,
                map: 1e-6,
                interior: 1e-5,
                fit: 1e-4,
            }),
            _ => None,
        }
    }
}
