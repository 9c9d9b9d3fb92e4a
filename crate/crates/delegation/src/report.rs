//! One-shot analysis of a game and a set of plays.

use delegation_core::bounds::{bound_report, BoundReport};
use delegation_core::equilibria::pure_eps_nash;
use delegation_core::game::{welfare, welfare_landmarks};
use delegation_core::measures::{full_report, MeasureReport};
use delegation_core::{DelegationGame, Error, NormalizationConfig, StrategyProfile};
use serde::Serialize;

/// Principal-welfare quantities mapped onto `[ŵ₋, ŵ₊]`.
///
/// Bounds on regret appear as the welfare level they guarantee: `ŵ⋆ - bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedWelfare {
    pub mean_principal_welfare: f64,
    pub w_hat_star: f64,
    pub w_hat_bullet: f64,
    pub alignment_bound: f64,
    pub capabilities_bound: f64,
    pub ideal_gap_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub measures: MeasureReport,
    /// Bounds evaluated at the played profile with the lowest principal welfare.
    pub bounds: BoundReport,
    pub bound_profile: StrategyProfile,
    pub played: Vec<StrategyProfile>,
    pub normalized: NormalizedWelfare,
}

/// Measures and bounds for `played`, or for the pure Nash equilibria when `played` is empty.
pub fn analyze(
    game: &DelegationGame,
    played: &[StrategyProfile],
    cfg: &NormalizationConfig,
    delta: Option<f64>,
) -> Result<Analysis, Error> {
    let played = if played.is_empty() {
        let ne = pure_eps_nash(game, &vec![0.0; game.players()])?;
        if ne.is_empty() {
            return Err(Error::NoEquilibrium(
                "no plays given and the agent game has no pure Nash equilibrium".into(),
            ));
        }
        ne.profiles
    } else {
        played.to_vec()
    };
    let measures = full_report(game, &played, cfg)?;
    let eps: Vec<f64> = measures.ic.iter().map(|c| (1.0 - c).clamp(0.0, 1.0)).collect();

    let principals = game.principal_utilities();
    let mut worst = (f64::INFINITY, played[0].clone());
    let mut total = 0.0;
    for s in &played {
        let w = welfare(principals, game.space(), s)?;
        total += w;
        if w < worst.0 {
            worst = (w, s.clone());
        }
    }
    let bounds = bound_report(game, &worst.1, &eps, measures.cc, cfg, delta)?;

    let lm = welfare_landmarks(principals)?;
    let normalized = NormalizedWelfare {
        mean_principal_welfare: lm.normalize(total / played.len() as f64),
        w_hat_star: lm.normalize(lm.w_star),
        w_hat_bullet: lm.normalize(lm.w_bullet),
        alignment_bound: lm.normalize(lm.w_star - bounds.alignment_bound),
        capabilities_bound: lm.normalize(lm.w_star - bounds.capabilities_bound_exact),
        ideal_gap_bound: lm.normalize(lm.w_plus - bounds.ideal_gap_bound),
    };
    Ok(Analysis { measures, bounds, bound_profile: worst.1, played, normalized })
}
