//! Canonical representatives of preference classes.
//!
//! Two utility vectors represent the same preferences exactly when one is a
//! positive affine transform of the other. [`NormalizationConfig::normalize`]
//! removes the affine degrees of freedom: it subtracts an affine-equivariant
//! shift `c(u)` and divides by a norm `m(u - c(u))`, leaving a unit direction
//! (or the zero vector when `u` is constant). The same norm measures distances
//! between directions, which is what every alignment measure is built on.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::game::UtilityVector;

/// Magnitudes at or below this fraction of the vector's scale count as zero.
const ZERO_MAGNITUDE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum ShiftKind {
    /// (Weighted) average of the entries.
    #[default]
    Mean,
    /// `(max + min) / 2`.
    Midrange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum NormKind {
    /// Euclidean norm.
    #[default]
    L2,
    /// `sqrt(Σ d(s) x(s)²)` for a full-support distribution `d` over outcomes.
    WeightedL2,
    /// Maximum absolute entry. Not strictly convex.
    Linf,
}

/// Choice of shift function and norm used for normalization and distances.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalizationConfig {
    pub shift: ShiftKind,
    pub norm: NormKind,
    pub weights: Option<Vec<f64>>,
}

/// `u = magnitude * direction + shift * 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedUtility {
    pub direction: UtilityVector,
    pub magnitude: f64,
    pub shift: f64,
}

impl NormalizedUtility {
    pub fn is_zero(&self) -> bool {
        self.magnitude == 0.0
    }

    /// Rebuild the utility vector this was normalized from.
    pub fn reconstruct(&self) -> UtilityVector {
        self.direction.affine(self.magnitude, self.shift)
    }
}

impl NormalizationConfig {
    pub fn new(shift: ShiftKind, norm: NormKind, weights: Option<Vec<f64>>) -> Result<Self> {
        let cfg = Self { shift, norm, weights };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The ℓ∞ norm with the midrange shift.
    pub fn linf_midrange() -> Self {
        Self { shift: ShiftKind::Midrange, norm: NormKind::Linf, weights: None }
    }

    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        Self::new(ShiftKind::Mean, NormKind::WeightedL2, Some(weights))
    }

    /// Weighted ℓ2 with the uniform distribution over `outcome_count` outcomes.
    pub fn uniform_weighted(outcome_count: usize) -> Result<Self> {
        if outcome_count == 0 {
            return Err(invalid("outcome count must be positive"));
        }
        Self::weighted(vec![1.0 / outcome_count as f64; outcome_count])
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.norm, &self.weights) {
            (NormKind::WeightedL2, None) => {
                Err(invalid("weighted_l2 requires a weight vector"))
            }
            (NormKind::WeightedL2, Some(w)) => {
                if w.is_empty() {
                    return Err(invalid("weight vector is empty"));
                }
                if w.iter().any(|&x| !x.is_finite() || x <= 0.0) {
                    return Err(invalid("weights must be finite and strictly positive"));
                }
                let total: f64 = w.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid(format!("weights sum to {total}, expected 1")));
                }
                Ok(())
            }
            (_, Some(_)) => Err(invalid("weights are only meaningful for weighted_l2")),
            _ => Ok(()),
        }
    }

    /// Whether the norm is strictly convex; ℓ∞ is not, and some alignment properties fail under it.
    pub fn is_strictly_convex(&self) -> bool {
        !matches!(self.norm, NormKind::Linf)
    }

    /// Whether distances come from an inner product (needed for angle-based generation).
    pub fn is_inner_product(&self) -> bool {
        matches!(self.norm, NormKind::L2 | NormKind::WeightedL2)
    }

    fn weights_for(&self, len: usize) -> Result<Option<&[f64]>> {
        match (&self.norm, &self.weights) {
            (NormKind::WeightedL2, Some(w)) => {
                if w.len() != len {
                    return Err(invalid(format!(
                        "weight vector has {} entries, utility has {len}",
                        w.len()
                    )));
                }
                Ok(Some(w))
            }
            (NormKind::WeightedL2, None) => Err(invalid("weighted_l2 requires a weight vector")),
            _ => Ok(None),
        }
    }

    /// The affine-equivariant shift `c(u)`.
    pub fn shift(&self, u: &[f64]) -> Result<f64> {
        if u.is_empty() {
            return Err(invalid("utility vector is empty"));
        }
        Ok(match self.shift {
            ShiftKind::Mean => match self.weights_for(u.len())? {
                Some(w) => u.iter().zip(w).map(|(x, d)| x * d).sum(),
                None => u.iter().sum::<f64>() / u.len() as f64,
            },
            ShiftKind::Midrange => {
                let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let min = u.iter().copied().fold(f64::INFINITY, f64::min);
                (max + min) / 2.0
            }
        })
    }

    /// `m(v)` under the configured norm.
    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        Ok(match self.norm {
            NormKind::L2 => libm::sqrt(v.iter().map(|x| x * x).sum()),
            NormKind::WeightedL2 => {
                let w = self.weights_for(v.len())?.unwrap_or_default();
                libm::sqrt(v.iter().zip(w).map(|(x, d)| d * x * x).sum())
            }
            NormKind::Linf => v.iter().fold(0.0, |acc, x| f64::max(acc, x.abs())),
        })
    }

    /// Inner product inducing the norm; only defined for the ℓ2 family.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(invalid("inner product of vectors with different lengths"));
        }
        match self.norm {
            NormKind::L2 => Ok(a.iter().zip(b).map(|(x, y)| x * y).sum()),
            NormKind::WeightedL2 => {
                let w = self.weights_for(a.len())?.unwrap_or_default();
                Ok(a.iter().zip(b).zip(w).map(|((x, y), d)| d * x * y).sum())
            }
            NormKind::Linf => Err(Error::UnsupportedNorm(
                "the l-infinity norm has no inner product".into(),
            )),
        }
    }

    pub fn normalize(&self, u: &[f64]) -> Result<NormalizedUtility> {
        let shift = self.shift(u)?;
        let centered: Vec<f64> = u.iter().map(|x| x - shift).collect();
        let magnitude = self.norm(&centered)?;
        let scale = u.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()));
        if magnitude <= ZERO_MAGNITUDE_TOL * scale || magnitude == 0.0 {
            return Ok(NormalizedUtility {
                direction: UtilityVector::zeros(u.len()),
                magnitude: 0.0,
                shift,
            });
        }
        Ok(NormalizedUtility {
            direction: UtilityVector(centered.iter().map(|x| x / magnitude).collect()),
            magnitude,
            shift,
        })
    }

    /// `m(a - b)`.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(invalid(format!(
                "length mismatch: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.norm(&diff)
    }

    /// Smallest `K` with `‖x‖∞ ≤ K · m(x)` for every `x`.
    pub fn equivalence_constant(&self, outcome_count: usize) -> Result<f64> {
        if outcome_count == 0 {
            return Err(invalid("outcome count must be positive"));
        }
        match self.norm {
            NormKind::L2 | NormKind::Linf => Ok(1.0),
            NormKind::WeightedL2 => {
                let w = self.weights_for(outcome_count)?.unwrap_or_default();
                let min = w.iter().copied().fold(f64::INFINITY, f64::min);
                Ok(1.0 / libm::sqrt(min))
            }
        }
    }

    /// The same shift and norm kind, re-weighted uniformly over `len` outcomes when weighted.
    pub fn restricted_uniform(&self, len: usize) -> Result<Self> {
        match self.norm {
            NormKind::WeightedL2 => {
                let mut cfg = Self::uniform_weighted(len)?;
                cfg.shift = self.shift;
                Ok(cfg)
            }
            _ => Ok(Self { shift: self.shift, norm: self.norm, weights: None }),
        }
    }
}

/// Normalize each vector in a list.
pub fn normalize_all(
    cfg: &NormalizationConfig,
    utilities: &[UtilityVector],
) -> Result<Vec<NormalizedUtility>> {
    utilities.iter().map(|u| cfg.normalize(u)).collect()
}
