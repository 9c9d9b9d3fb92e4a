//! Estimating the measures from observed play.
//!
//! Alignment is estimated by restricting every utility to the outcomes seen in
//! the data. Capabilities cannot be pinned down from play alone, but when all
//! payoffs are nonnegative the ratios below are upper bounds on IC and CC for
//! every sample, and they tighten as the data grows.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::equilibria::admissible_indices;
use crate::error::{invalid, Error, Result};
use crate::game::{DelegationGame, StrategyProfile, StrategySpace, UtilityVector};
use crate::measures::{alignment_from, collective_from, NormalizedGame};
use crate::norm::{normalize_all, NormalizationConfig};

/// Payoff agreement required between repeated observations of one profile.
pub const REPEAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum PlayMode {
    /// All agents acting together.
    Joint,
    /// One agent responding to fixed behaviour of the others.
    Solo,
}

/// One observed outcome with the payoffs it produced.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Observation {
    pub profile: StrategyProfile,
    pub agent_payoffs: Vec<f64>,
    pub principal_payoffs: Vec<f64>,
    pub mode: PlayMode,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub solo_player: Option<usize>,
}

impl Observation {
    /// The observation `game` produces at `profile`.
    pub fn from_game(
        game: &DelegationGame,
        profile: StrategyProfile,
        mode: PlayMode,
        solo_player: Option<usize>,
    ) -> Result<Self> {
        let index = game.space().index_of(&profile)?;
        Ok(Self {
            agent_payoffs: game.agent_utilities().iter().map(|u| u[index]).collect(),
            principal_payoffs: game.principal_utilities().iter().map(|u| u[index]).collect(),
            profile,
            mode,
            solo_player,
        })
    }

    fn agent_welfare(&self) -> f64 {
        self.agent_payoffs.iter().sum::<f64>() / self.agent_payoffs.len() as f64
    }
}

/// Observations over one declared strategy space.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationDataset {
    space: StrategySpace,
    observations: Vec<Observation>,
}

impl ObservationDataset {
    pub fn new(strategy_counts: Vec<usize>, observations: Vec<Observation>) -> Result<Self> {
        let mut data = Self { space: StrategySpace::new(strategy_counts)?, observations: Vec::new() };
        for o in observations {
            data.push(o)?;
        }
        Ok(data)
    }

    /// Append one observation after checking it against the space and earlier observations.
    pub fn push(&mut self, o: Observation) -> Result<()> {
        let n = self.space.players();
        self.space.check_profile(&o.profile)?;
        if o.agent_payoffs.len() != n || o.principal_payoffs.len() != n {
            return Err(invalid(format!("observation payoffs must have {n} entries")));
        }
        if o.agent_payoffs.iter().chain(&o.principal_payoffs).any(|x| !x.is_finite()) {
            return Err(invalid("non-finite payoff in observation"));
        }
        match (o.mode, o.solo_player) {
            (PlayMode::Solo, Some(p)) if p < n => {}
            (PlayMode::Solo, Some(p)) => return Err(Error::Index(format!("solo player {p} out of range"))),
            (PlayMode::Solo, None) => return Err(invalid("solo observation without solo_player")),
            (PlayMode::Joint, Some(_)) => return Err(invalid("joint observation with solo_player")),
            (PlayMode::Joint, None) => {}
        }
        if let Some(prev) = self.observations.iter().find(|p| p.profile == o.profile) {
            let agree = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= REPEAT_TOL);
            if !agree(&prev.agent_payoffs, &o.agent_payoffs)
                || !agree(&prev.principal_payoffs, &o.principal_payoffs)
            {
                return Err(invalid(format!(
                    "payoffs at profile {:?} differ between observations",
                    o.profile.0
                )));
            }
        }
        self.observations.push(o);
        Ok(())
    }

    pub fn space(&self) -> &StrategySpace {
        &self.space
    }

    pub fn players(&self) -> usize {
        self.space.players()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// One representative observation per distinct profile, in flat outcome order.
    fn distinct(&self) -> BTreeMap<usize, &Observation> {
        let mut seen = BTreeMap::new();
        for o in &self.observations {
            let index = self.space.index_of(&o.profile).expect("validated on insertion");
            seen.entry(index).or_insert(o);
        }
        seen
    }

    fn check_nonnegative(&self, modes: &[PlayMode]) -> Result<()> {
        let bad = self
            .observations
            .iter()
            .filter(|o| modes.contains(&o.mode))
            .flat_map(|o| o.agent_payoffs.iter())
            .find(|&&x| x < 0.0);
        match bad {
            Some(x) => Err(Error::Precondition(format!(
                "capability estimates need nonnegative payoffs, found {x}"
            ))),
            None => Ok(()),
        }
    }
}

/// Alignment measures computed on the observed outcomes only.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlignmentEstimate {
    pub ia: Vec<f64>,
    pub ca_agents: f64,
    pub ca_principals: f64,
    pub distinct_profiles: usize,
}

/// Restrict every utility to the distinct observed profiles and compute IA and
/// CA there, re-weighting a weighted norm uniformly over those profiles.
pub fn estimate_alignment(
    data: &ObservationDataset,
    cfg: &NormalizationConfig,
) -> Result<AlignmentEstimate> {
    let distinct = data.distinct();
    if distinct.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} distinct profile(s) observed, need at least 2",
            distinct.len()
        )));
    }
    let restricted = cfg.restricted_uniform(distinct.len())?;
    let column = |payoffs: fn(&Observation) -> &Vec<f64>, i: usize| {
        UtilityVector(distinct.values().map(|o| payoffs(o)[i]).collect())
    };
    let agents: Vec<_> = (0..data.players()).map(|i| column(|o| &o.agent_payoffs, i)).collect();
    let principals: Vec<_> = (0..data.players()).map(|i| column(|o| &o.principal_payoffs, i)).collect();
    let normalized = NormalizedGame {
        agents: normalize_all(&restricted, &agents)?,
        principals: normalize_all(&restricted, &principals)?,
    };
    Ok(AlignmentEstimate {
        ia: alignment_from(&normalized, &restricted)?,
        ca_agents: collective_from(&normalized.agents, &restricted)?,
        ca_principals: collective_from(&normalized.principals, &restricted)?,
        distinct_profiles: distinct.len(),
    })
}

/// `min / max` of agent welfare over joint observations: an upper bound on CC.
pub fn estimate_cc_upper(data: &ObservationDataset) -> Result<f64> {
    data.check_nonnegative(&[PlayMode::Joint])?;
    let welfares: Vec<f64> = data
        .observations
        .iter()
        .filter(|o| o.mode == PlayMode::Joint)
        .map(Observation::agent_welfare)
        .collect();
    if welfares.is_empty() {
        return Err(Error::InsufficientData("no joint observations".into()));
    }
    let lo = welfares.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = welfares.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > 0.0) {
        return Err(Error::Degenerate("maximum observed joint welfare is zero".into()));
    }
    Ok(lo / hi)
}

/// Upper bounds on each ICⁱ, with a flag for players the data says nothing about.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CapabilityEstimate {
    pub upper: Vec<f64>,
    /// True where no counter-profile was seen with two own strategies, so the bound is vacuous.
    pub low_coverage: Vec<bool>,
}

/// For each player, the smallest `uⁱ(s) / max uⁱ(s⁻ⁱ, s̃ⁱ)` over its solo observations.
///
/// The maximum runs over every observation sharing the counter-profile `s⁻ⁱ`,
/// and only counter-profiles seen with at least two distinct own strategies count.
pub fn estimate_ic_upper(data: &ObservationDataset) -> Result<CapabilityEstimate> {
    data.check_nonnegative(&[PlayMode::Joint, PlayMode::Solo])?;
    let n = data.players();
    let mut upper = alloc::vec![1.0f64; n];
    let mut low_coverage = alloc::vec![true; n];
    for (i, (bound, low)) in upper.iter_mut().zip(low_coverage.iter_mut()).enumerate() {
        // counter-profile → (own strategies seen, best payoff seen)
        let mut groups: BTreeMap<Vec<usize>, (Vec<usize>, f64)> = BTreeMap::new();
        for o in &data.observations {
            let entry = groups.entry(counter(&o.profile, i)).or_insert((Vec::new(), 0.0));
            if !entry.0.contains(&o.profile[i]) {
                entry.0.push(o.profile[i]);
            }
            entry.1 = entry.1.max(o.agent_payoffs[i]);
        }
        for o in data.observations.iter().filter(|o| o.solo_player == Some(i)) {
            let (own, best) = &groups[&counter(&o.profile, i)];
            if own.len() < 2 {
                continue;
            }
            *low = false;
            if *best > 0.0 {
                *bound = bound.min(o.agent_payoffs[i] / best);
            }
        }
    }
    Ok(CapabilityEstimate { upper, low_coverage })
}

fn counter(profile: &StrategyProfile, player: usize) -> Vec<usize> {
    profile
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != player)
        .map(|(_, &s)| s)
        .collect()
}

/// Sample `count` observations of agents with capabilities `ic` and collective capability `cc`.
///
/// Each observation is joint with probability `mode_mix`. Joint outcomes are
/// uniform over the admissible outcomes; a solo observation picks a uniform
/// player and counter-profile and a uniform `(1 - icⁱ)`-best response.
pub fn simulate_play<R: Rng + ?Sized>(
    game: &DelegationGame,
    ic: &[f64],
    cc: f64,
    count: usize,
    mode_mix: f64,
    rng: &mut R,
) -> Result<ObservationDataset> {
    if count == 0 {
        return Err(invalid("count must be positive"));
    }
    if !(0.0..=1.0).contains(&mode_mix) {
        return Err(invalid(format!("mode_mix = {mode_mix} outside [0, 1]")));
    }
    if ic.len() != game.players() || ic.iter().any(|c| !(0.0..=1.0).contains(c)) {
        return Err(invalid("ic must hold one value in [0, 1] per player"));
    }
    let eps: Vec<f64> = ic.iter().map(|c| 1.0 - c).collect();
    let admissible = admissible_indices(game, &eps, cc)?;
    if admissible.is_empty() {
        return Err(Error::Simulation("no admissible outcome".into()));
    }
    let space = game.space();
    let n = game.players();
    let mut observations = Vec::with_capacity(count);
    for _ in 0..count {
        let o = if rng.random_bool(mode_mix) {
            let s = admissible[rng.random_range(0..admissible.len())];
            Observation::from_game(game, space.profile_at(s), PlayMode::Joint, None)?
        } else {
            let player = rng.random_range(0..n);
            let base = rng.random_range(0..space.outcome_count());
            let responses: Vec<usize> = space
                .deviations(base, player)
                .filter(|&j| {
                    crate::equilibria::player_epsilon(game.agent_utilities(), space, j, player)
                        <= eps[player] + crate::MEMBERSHIP_TOL
                })
                .collect();
            let s = responses[rng.random_range(0..responses.len())];
            Observation::from_game(game, space.profile_at(s), PlayMode::Solo, Some(player))?
        };
        observations.push(o);
    }
    Ok(ObservationDataset { space: space.clone(), observations })
}
