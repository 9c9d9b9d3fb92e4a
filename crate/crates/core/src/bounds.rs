//! Upper bounds on the principals' welfare regret `ŵ⋆ - ŵ(s)`.
//!
//! All bounds are in raw (average) welfare units and depend on the
//! normalization config through its equivalence constant `K`.

use alloc::format;
use alloc::vec::Vec;

use crate::equilibria::{admissible_indices, check_eps, equilibrium_welfares};
use crate::error::{invalid, Error, Result};
use crate::game::{welfare_at, welfare_landmarks, DelegationGame, StrategyProfile, UtilityVector};
use crate::measures::{alignment_from, calibration_from, proxy_distances, collective_from, NormalizedGame};
use crate::norm::{normalize_all, NormalizationConfig};

/// Flat index of the first outcome maximizing principal welfare.
pub(crate) fn principal_optimum_index(game: &DelegationGame) -> usize {
    let principals = game.principal_utilities();
    let mut best = 0;
    let mut best_w = f64::NEG_INFINITY;
    for s in 0..game.outcome_count() {
        let w = welfare_at(principals, s);
        if w > best_w {
            best = s;
            best_w = w;
        }
    }
    best
}

/// The lexicographically first pure profile maximizing principal welfare.
pub fn principal_optimum(game: &DelegationGame) -> StrategyProfile {
    game.space().profile_at(principal_optimum_index(game))
}

/// Quantities shared by every bound on one game.
struct Context {
    normalized: NormalizedGame,
    n: f64,
    k: f64,
    optimum: usize,
    ia: Vec<f64>,
    ratios: Vec<f64>,
    r_star: f64,
}

impl Context {
    fn new(game: &DelegationGame, cfg: &NormalizationConfig) -> Result<Self> {
        let normalized = NormalizedGame::new(game, cfg)?;
        let ia = alignment_from(&normalized, cfg)?;
        let calibration = calibration_from(&normalized);
        Ok(Self {
            k: cfg.equivalence_constant(game.outcome_count())?,
            n: game.players() as f64,
            optimum: principal_optimum_index(game),
            ia,
            ratios: calibration.ratios,
            r_star: calibration.r_star,
            normalized,
        })
    }

    /// `(4K/n) Σ m̂ⁱ(1 - IAⁱ)`.
    fn misalignment_term(&self) -> f64 {
        let total: f64 = self
            .normalized
            .principals
            .iter()
            .zip(&self.ia)
            .map(|(p, ia)| p.magnitude * (1.0 - ia))
            .sum();
        4.0 * self.k / self.n * total
    }

    fn finite_r_star(&self) -> Result<f64> {
        if self.r_star.is_finite() {
            Ok(self.r_star)
        } else {
            Err(Error::Degenerate("every agent utility is constant".into()))
        }
    }

    /// `R(s) = (1/n) Σ (rⁱ - r*) mⁱ (uνⁱ(ŝ⋆) - uνⁱ(s))`.
    fn remainder_at(&self, index: usize) -> Result<f64> {
        let r_star = self.finite_r_star()?;
        let mut total = 0.0;
        for (a, r) in self.normalized.agents.iter().zip(&self.ratios) {
            // a constant agent utility has a zero direction, so its term vanishes
            if a.magnitude > 0.0 {
                total += (r - r_star) * a.magnitude * (a.direction[self.optimum] - a.direction[index]);
            }
        }
        Ok(total / self.n)
    }
}

/// Regret bound from individual alignment alone, at one profile.
///
/// `(1/n) Σ rⁱ(uⁱ(ŝ⋆) - uⁱ(s)) + (4K/n) Σ m̂ⁱ(1 - IAⁱ)`, with `ŝ⋆` from [`principal_optimum`].
pub fn alignment_regret_bound(
    game: &DelegationGame,
    profile: &StrategyProfile,
    cfg: &NormalizationConfig,
) -> Result<f64> {
    let index = game.space().index_of(profile)?;
    let ctx = Context::new(game, cfg)?;
    if let Some(i) = ctx.ratios.iter().position(|r| !r.is_finite()) {
        return Err(Error::Degenerate(format!("agent {i} has a constant utility")));
    }
    let gain: f64 = game
        .agent_utilities()
        .iter()
        .zip(&ctx.ratios)
        .map(|(u, r)| r * (u[ctx.optimum] - u[index]))
        .sum();
    Ok(gain / ctx.n + ctx.misalignment_term())
}

/// How the remainder term of the capabilities bound is evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Remainder {
    /// The exact `R(s)` at a given profile.
    Exact(StrategyProfile),
    /// The profile-independent upper bound from [`remainder_bound`].
    Bounded,
}

/// Regret bound from all four measures.
///
/// `(4K/n) Σ m̂ⁱ(1 - IAⁱ) + r*((w₀ - w_ε) + (1 - cc)(w⋆ - w₀)) + R` with `r* = Σm̂/Σm`.
pub fn capabilities_regret_bound(
    game: &DelegationGame,
    eps: &[f64],
    cc: f64,
    cfg: &NormalizationConfig,
    remainder: &Remainder,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&cc) {
        return Err(invalid(format!("cc = {cc} outside [0, 1]")));
    }
    check_eps(eps, game.players())?;
    let ctx = Context::new(game, cfg)?;
    let r = match remainder {
        Remainder::Exact(profile) => ctx.remainder_at(game.space().index_of(profile)?)?,
        Remainder::Bounded => remainder_from(&ctx, cfg)?,
    };
    Ok(capabilities_from(&ctx, game, eps, cc)? + r)
}

fn capabilities_from(ctx: &Context, game: &DelegationGame, eps: &[f64], cc: f64) -> Result<f64> {
    let ew = equilibrium_welfares(game, eps)?;
    let w_star = welfare_landmarks(game.agent_utilities())?.w_star;
    let r_star = ctx.finite_r_star()?;
    let shortfall = (ew.w_zero - ew.w_eps) + (1.0 - cc) * (w_star - ew.w_zero);
    Ok(ctx.misalignment_term() + r_star * shortfall)
}

/// The capabilities bound with exact remainder, maximized over every admissible outcome.
///
/// Returns the bound together with the admissible outcome attaining it.
pub fn worst_admissible_bound(
    game: &DelegationGame,
    eps: &[f64],
    cc: f64,
    cfg: &NormalizationConfig,
) -> Result<(f64, StrategyProfile)> {
    let ctx = Context::new(game, cfg)?;
    let base = capabilities_from(&ctx, game, eps, cc)?;
    let mut best: Option<(f64, usize)> = None;
    for s in admissible_indices(game, eps, cc)? {
        let b = base + ctx.remainder_at(s)?;
        if best.is_none_or(|(v, _)| b > v) {
            best = Some((b, s));
        }
    }
    let (bound, s) = best.ok_or_else(|| Error::NoEquilibrium("no admissible outcome".into()))?;
    Ok((bound, game.space().profile_at(s)))
}

/// `R(s)` with `r* = Σm̂/Σm` and the same `ŝ⋆` as [`alignment_regret_bound`].
pub fn exact_remainder(
    game: &DelegationGame,
    profile: &StrategyProfile,
    cfg: &NormalizationConfig,
) -> Result<f64> {
    let index = game.space().index_of(profile)?;
    Context::new(game, cfg)?.remainder_at(index)
}

fn remainder_from(ctx: &Context, cfg: &NormalizationConfig) -> Result<f64> {
    let r_star = ctx.finite_r_star()?;
    let (_, d) = proxy_distances(&ctx.normalized.agents, cfg)?;
    let total: f64 = ctx
        .normalized
        .principals
        .iter()
        .zip(&ctx.normalized.agents)
        .zip(&d)
        .map(|((p, a), d)| libm::fabs(p.magnitude - r_star * a.magnitude) * d)
        .sum();
    Ok(2.0 * ctx.k / ctx.n * total)
}

/// Profile-independent bound `(2K/n) Σ |m̂ⁱ - r*mⁱ| · m(uνⁱ - μʷ)` on `R(s)`.
pub fn remainder_bound(game: &DelegationGame, cfg: &NormalizationConfig) -> Result<f64> {
    remainder_from(&Context::new(game, cfg)?, cfg)
}

/// `w₊ - w⋆ ≤ (K Σmⁱ / n)(1 - CA)`.
pub fn ideal_gap_bound(utilities: &[UtilityVector], cfg: &NormalizationConfig) -> Result<f64> {
    let first = utilities.first().ok_or_else(|| invalid("empty utility list"))?;
    let normalized = normalize_all(cfg, utilities)?;
    let ca = collective_from(&normalized, cfg)?;
    let total: f64 = normalized.iter().map(|n| n.magnitude).sum();
    let k = cfg.equivalence_constant(first.len())?;
    Ok((k * total / utilities.len() as f64 * (1.0 - ca)).max(0.0))
}

/// `(2Δ/n) Σᵢ (max uⁱ - min uⁱ)`: how far worst ε-equilibrium welfare can fall
/// below worst equilibrium welfare when every ε-equilibrium lies within `Δ` of one.
pub fn robustness_gap_bound(game: &DelegationGame, delta: f64) -> Result<f64> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(invalid(format!("delta = {delta} must be finite and nonnegative")));
    }
    let ranges: f64 = game.agent_utilities().iter().map(|u| u.max() - u.min()).sum();
    Ok(2.0 * delta / game.players() as f64 * ranges)
}

/// All bounds for one profile of play.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    pub alignment_bound: f64,
    /// Capabilities bound using [`remainder_bound`] for the remainder.
    pub capabilities_bound: f64,
    /// Capabilities bound using the exact remainder at the profile.
    pub capabilities_bound_exact: f64,
    /// Principal-side ideal gap bound.
    pub ideal_gap_bound: f64,
    pub remainder_exact: f64,
    pub remainder_bound: f64,
    pub robustness_gap: Option<f64>,
    /// Principal welfare regret `ŵ⋆ - ŵ(s)` at the profile.
    pub principal_regret: f64,
}

pub fn bound_report(
    game: &DelegationGame,
    profile: &StrategyProfile,
    eps: &[f64],
    cc: f64,
    cfg: &NormalizationConfig,
    delta: Option<f64>,
) -> Result<BoundReport> {
    let index = game.space().index_of(profile)?;
    let ctx = Context::new(game, cfg)?;
    let base = capabilities_from(&ctx, game, eps, cc)?;
    let remainder_exact = ctx.remainder_at(index)?;
    let remainder_bound = remainder_from(&ctx, cfg)?;
    let principals = game.principal_utilities();
    Ok(BoundReport {
        alignment_bound: alignment_regret_bound(game, profile, cfg)?,
        capabilities_bound: base + remainder_bound,
        capabilities_bound_exact: base + remainder_exact,
        ideal_gap_bound: ideal_gap_bound(principals, cfg)?,
        remainder_exact,
        remainder_bound,
        robustness_gap: delta.map(|d| robustness_gap_bound(game, d)).transpose()?,
        principal_regret: welfare_at(principals, ctx.optimum) - welfare_at(principals, index),
    })
}
