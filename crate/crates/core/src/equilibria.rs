//! Pure Nash and ε-Nash equilibria of the agent game.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::game::{welfare_at, welfare_landmarks, DelegationGame, StrategyProfile, StrategySpace, UtilityVector};
use crate::MEMBERSHIP_TOL;

/// Smallest ε for which the outcome at `index` is an ε-best response of `player`.
///
/// `(max - u(s)) / (max - min)` over the player's unilateral deviations, or 0
/// when every deviation pays the same.
pub fn player_epsilon(
    utilities: &[UtilityVector],
    space: &StrategySpace,
    index: usize,
    player: usize,
) -> f64 {
    let u = &utilities[player];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in space.deviations(index, player) {
        lo = lo.min(u[j]);
        hi = hi.max(u[j]);
    }
    if hi == lo {
        0.0
    } else {
        (hi - u[index]) / (hi - lo)
    }
}

pub(crate) fn check_eps(eps: &[f64], players: usize) -> Result<()> {
    if eps.len() != players {
        return Err(invalid(format!(
            "eps has {} entries, game has {players} players",
            eps.len()
        )));
    }
    if let Some(e) = eps.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(invalid(format!("eps entry {e} outside [0, 1]")));
    }
    Ok(())
}

/// The strategies of `player` maximizing its payoff against the other entries of `profile`.
///
/// The player's own entry in `profile` is ignored. Ties are all returned, in index order.
pub fn pure_best_responses(
    game: &DelegationGame,
    player: usize,
    profile: &StrategyProfile,
) -> Result<Vec<usize>> {
    if player >= game.players() {
        return Err(Error::Index(format!("player {player} out of range")));
    }
    let index = game.space().index_of(profile)?;
    let u = &game.agent_utilities()[player];
    let payoffs: Vec<f64> = game.space().deviations(index, player).map(|j| u[j]).collect();
    let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(payoffs
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == best)
        .map(|(s, _)| s)
        .collect())
}

/// All pure ε-Nash equilibria of the agent game for one ε vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    /// Members in flat outcome order.
    pub profiles: Vec<StrategyProfile>,
    pub indices: Vec<usize>,
    pub eps: Vec<f64>,
    /// Agent welfare of the worst member; `None` when the set is empty.
    pub min_welfare: Option<f64>,
}

impl EquilibriumSet {
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }
}

pub(crate) fn eps_nash_indices(
    utilities: &[UtilityVector],
    space: &StrategySpace,
    eps: &[f64],
) -> Vec<usize> {
    (0..space.outcome_count())
        .filter(|&s| {
            (0..space.players())
                .all(|p| player_epsilon(utilities, space, s, p) <= eps[p] + MEMBERSHIP_TOL)
        })
        .collect()
}

/// Every pure profile at which each player `i` plays an `eps[i]`-best response.
pub fn pure_eps_nash(game: &DelegationGame, eps: &[f64]) -> Result<EquilibriumSet> {
    check_eps(eps, game.players())?;
    let utilities = game.agent_utilities();
    let indices = eps_nash_indices(utilities, game.space(), eps);
    let min_welfare = indices
        .iter()
        .map(|&s| welfare_at(utilities, s))
        .reduce(f64::min);
    Ok(EquilibriumSet {
        profiles: indices.iter().map(|&s| game.space().profile_at(s)).collect(),
        indices,
        eps: eps.to_vec(),
        min_welfare,
    })
}

/// Worst agent welfare over pure Nash equilibria (`w_zero`) and over pure ε-Nash equilibria (`w_eps`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquilibriumWelfares {
    pub w_zero: f64,
    pub w_eps: f64,
}

pub fn equilibrium_welfares(game: &DelegationGame, eps: &[f64]) -> Result<EquilibriumWelfares> {
    check_eps(eps, game.players())?;
    let zeros = alloc::vec![0.0; game.players()];
    let w_zero = pure_eps_nash(game, &zeros)?
        .min_welfare
        .ok_or_else(|| Error::NoEquilibrium("the agent game has no pure Nash equilibrium".into()))?;
    // every Nash equilibrium is an ε-Nash equilibrium, so this set is nonempty
    let w_eps = pure_eps_nash(game, eps)?
        .min_welfare
        .ok_or_else(|| Error::NoEquilibrium("no pure ε-Nash equilibrium".into()))?;
    Ok(EquilibriumWelfares { w_zero, w_eps })
}

/// Closed agent-welfare interval consistent with capabilities `eps` and collective capability `cc`.
pub fn admissible_interval(game: &DelegationGame, eps: &[f64], cc: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&cc) {
        return Err(invalid(format!("cc = {cc} outside [0, 1]")));
    }
    let ew = equilibrium_welfares(game, eps)?;
    let w_star = welfare_landmarks(game.agent_utilities())?.w_star;
    let span = w_star - ew.w_zero;
    Ok((ew.w_eps + cc * span, ew.w_eps + span))
}

pub(crate) fn admissible_indices(game: &DelegationGame, eps: &[f64], cc: f64) -> Result<Vec<usize>> {
    let (lo, hi) = admissible_interval(game, eps, cc)?;
    let utilities = game.agent_utilities();
    Ok((0..game.outcome_count())
        .filter(|&s| {
            let w = welfare_at(utilities, s);
            w >= lo - MEMBERSHIP_TOL && w <= hi + MEMBERSHIP_TOL
        })
        .collect())
}

/// Pure profiles whose agent welfare is achievable by agents with capabilities `1 - eps` and `cc`.
pub fn admissible_outcomes(
    game: &DelegationGame,
    eps: &[f64],
    cc: f64,
) -> Result<Vec<StrategyProfile>> {
    Ok(admissible_indices(game, eps, cc)?
        .into_iter()
        .map(|s| game.space().profile_at(s))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{make_fragile_game, make_prisoners_dilemma, make_worked_example};
    use alloc::vec;

    fn p(v: &[usize]) -> StrategyProfile {
        StrategyProfile(v.to_vec())
    }

    #[test]
    fn best_responses() {
        let g = make_worked_example();
        assert_eq!(pure_best_responses(&g, 0, &p(&[0, 0])).unwrap(), vec![0]);
        assert_eq!(pure_best_responses(&g, 0, &p(&[1, 1])).unwrap(), vec![0]);
        let flat = crate::game::DelegationGame::with_identical_principals(
            vec![3, 2],
            vec![UtilityVector(vec![1.0; 6]), UtilityVector(vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0])],
        )
        .unwrap();
        assert_eq!(pure_best_responses(&flat, 0, &p(&[0, 1])).unwrap(), vec![0, 1, 2]);
        assert!(pure_best_responses(&flat, 2, &p(&[0, 1])).is_err());
    }

    #[test]
    fn worked_example_equilibria() {
        let g = make_worked_example();
        let ne = pure_eps_nash(&g, &[0.0, 0.0]).unwrap();
        assert_eq!(ne.profiles, vec![p(&[0, 0])]);
        let e = pure_eps_nash(&g, &[0.1, 0.3]).unwrap();
        assert_eq!(e.profiles, vec![p(&[0, 0])]);
        assert_eq!(e.min_welfare, Some(3.0));
        let ew = equilibrium_welfares(&g, &[0.1, 0.3]).unwrap();
        assert_eq!((ew.w_zero, ew.w_eps), (3.0, 3.0));
        assert_eq!(pure_eps_nash(&g, &[1.0, 1.0]).unwrap().len(), 4);
    }

    #[test]
    fn fragile_game_equilibria() {
        let g = make_fragile_game(0.2, 0.2, 0.5).unwrap();
        let e = pure_eps_nash(&g, &[0.2, 0.2]).unwrap();
        for member in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            assert!(e.profiles.contains(&p(&member)), "{member:?}");
        }
        assert!((e.min_welfare.unwrap() - 0.4).abs() < 1e-12);
        let ew = equilibrium_welfares(&g, &[0.2, 0.2]).unwrap();
        assert!((ew.w_zero - 1.0).abs() < 1e-15 && (ew.w_eps - 0.4).abs() < 1e-12);
    }

    #[test]
    fn prisoners_dilemma_welfares() {
        let g = make_prisoners_dilemma(0.1).unwrap();
        assert_eq!(pure_eps_nash(&g, &[0.0, 0.0]).unwrap().profiles, vec![p(&[1, 1])]);
        let ew = equilibrium_welfares(&g, &[0.0, 0.0]).unwrap();
        assert_eq!((ew.w_zero, ew.w_eps), (0.05, 0.05));
    }

    #[test]
    fn admissible_sets() {
        let g = make_worked_example();
        assert_eq!(admissible_outcomes(&g, &[0.0, 0.0], 1.0).unwrap(), vec![p(&[0, 1]), p(&[1, 0])]);
        assert_eq!(
            admissible_outcomes(&g, &[0.0, 0.0], 0.0).unwrap(),
            vec![p(&[0, 0]), p(&[0, 1]), p(&[1, 0])]
        );
        assert!(admissible_outcomes(&g, &[0.0, 0.0], 1.5).is_err());
    }

    #[test]
    fn no_pure_equilibrium_is_an_error() {
        // matching pennies
        let g = DelegationGame::with_identical_principals(
            vec![2, 2],
            vec![UtilityVector(vec![1.0, -1.0, -1.0, 1.0]), UtilityVector(vec![-1.0, 1.0, 1.0, -1.0])],
        )
        .unwrap();
        assert!(pure_eps_nash(&g, &[0.0, 0.0]).unwrap().is_empty());
        assert!(matches!(equilibrium_welfares(&g, &[0.5, 0.5]), Err(Error::NoEquilibrium(_))));
        assert!(matches!(admissible_outcomes(&g, &[0.5, 0.5], 0.5), Err(Error::NoEquilibrium(_))));
    }

    #[test]
    fn eps_is_checked() {
        let g = make_worked_example();
        assert!(pure_eps_nash(&g, &[0.0]).is_err());
        assert!(pure_eps_nash(&g, &[0.0, 1.2]).is_err());
    }
}
