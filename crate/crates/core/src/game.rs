//! Strategic-form delegation games over pure strategy profiles.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::error::{invalid, Error, Result};

/// One pure strategy index per player, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct StrategyProfile(pub Vec<usize>);

impl StrategyProfile {
    pub fn new(indices: Vec<usize>) -> Self {
        Self(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for StrategyProfile {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl Deref for StrategyProfile {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// A payoff for every outcome, in flat lexicographic order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct UtilityVector(pub Vec<f64>);

impl UtilityVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `a * self + b` entrywise.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        Self(self.0.iter().map(|x| a * x + b).collect())
    }
}

impl From<Vec<f64>> for UtilityVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl Deref for UtilityVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// The product of the players' pure strategy sets, with flat index arithmetic.
///
/// Player 0 varies slowest, so the stride of the last player is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategySpace {
    counts: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl StrategySpace {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(invalid("a game needs at least one player"));
        }
        if let Some(p) = counts.iter().position(|&k| k == 0) {
            return Err(invalid(format!("player {p} has no strategies")));
        }
        let mut strides = vec![1usize; counts.len()];
        let mut len = 1usize;
        for p in (0..counts.len()).rev() {
            strides[p] = len;
            len = len
                .checked_mul(counts[p])
                .ok_or_else(|| invalid("outcome count overflows usize"))?;
        }
        Ok(Self { counts, strides, len })
    }

    pub fn players(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn outcome_count(&self) -> usize {
        self.len
    }

    pub fn check_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.len() != self.counts.len() {
            return Err(Error::Index(format!(
                "profile has {} entries, game has {} players",
                profile.len(),
                self.counts.len()
            )));
        }
        for (p, (&s, &k)) in profile.iter().zip(&self.counts).enumerate() {
            if s >= k {
                return Err(Error::Index(format!(
                    "player {p} strategy {s} out of range (has {k})"
                )));
            }
        }
        Ok(())
    }

    pub fn index_of(&self, profile: &StrategyProfile) -> Result<usize> {
        self.check_profile(profile)?;
        Ok(profile.iter().zip(&self.strides).map(|(s, st)| s * st).sum())
    }

    pub fn profile_at(&self, index: usize) -> StrategyProfile {
        debug_assert!(index < self.len);
        StrategyProfile(
            (0..self.counts.len())
                .map(|p| self.strategy_of(index, p))
                .collect(),
        )
    }

    /// Strategy played by `player` in the outcome at `index`.
    pub fn strategy_of(&self, index: usize, player: usize) -> usize {
        (index / self.strides[player]) % self.counts[player]
    }

    /// Index of the outcome reached when `player` switches to `strategy`.
    pub fn deviation(&self, index: usize, player: usize, strategy: usize) -> usize {
        let own = self.strategy_of(index, player);
        index - own * self.strides[player] + strategy * self.strides[player]
    }

    /// Indices of every outcome `player` can reach by unilateral deviation, in strategy order.
    pub fn deviations(&self, index: usize, player: usize) -> impl Iterator<Item = usize> + '_ {
        let base = index - self.strategy_of(index, player) * self.strides[player];
        let stride = self.strides[player];
        (0..self.counts[player]).map(move |s| base + s * stride)
    }

    pub fn profiles(&self) -> impl Iterator<Item = StrategyProfile> + '_ {
        (0..self.len).map(|i| self.profile_at(i))
    }
}

/// Which half of a delegation game a payoff belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Side {
    Agent,
    Principal,
}

/// An invariant violation found by [`validate_game`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoPlayers,
    EmptyStrategySet { player: usize },
    TensorCountMismatch { side: Side, expected: usize, found: usize },
    TensorLengthMismatch { side: Side, player: usize, expected: usize, found: usize },
    NonFiniteEntry { side: Side, player: usize, outcome: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPlayers => write!(f, "no players"),
            Violation::EmptyStrategySet { player } => {
                write!(f, "player {player} has an empty strategy set")
            }
            Violation::TensorCountMismatch { side, expected, found } => write!(
                f,
                "tensor count mismatch: {side:?} side has {found} payoff tensors, expected {expected}"
            ),
            Violation::TensorLengthMismatch { side, player, expected, found } => write!(
                f,
                "tensor length mismatch: {side:?} {player} has {found} entries, expected {expected}"
            ),
            Violation::NonFiniteEntry { side, player, outcome } => write!(
                f,
                "non-finite entry: {side:?} {player} at outcome {outcome}"
            ),
        }
    }
}

/// Check raw game parts against every structural invariant, returning all violations found.
pub fn validate_game(
    strategy_counts: &[usize],
    agent_utilities: &[UtilityVector],
    principal_utilities: &[UtilityVector],
) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = strategy_counts.len();
    if n == 0 {
        out.push(Violation::NoPlayers);
    }
    for (player, &k) in strategy_counts.iter().enumerate() {
        if k == 0 {
            out.push(Violation::EmptyStrategySet { player });
        }
    }
    let expected_len = strategy_counts
        .iter()
        .try_fold(1usize, |acc, &k| acc.checked_mul(k));
    for (side, tensors) in [(Side::Agent, agent_utilities), (Side::Principal, principal_utilities)] {
        if tensors.len() != n {
            out.push(Violation::TensorCountMismatch { side, expected: n, found: tensors.len() });
        }
        for (player, u) in tensors.iter().enumerate() {
            if let Some(expected) = expected_len {
                if u.len() != expected {
                    out.push(Violation::TensorLengthMismatch {
                        side,
                        player,
                        expected,
                        found: u.len(),
                    });
                }
            }
            if let Some(outcome) = u.iter().position(|x| !x.is_finite()) {
                out.push(Violation::NonFiniteEntry { side, player, outcome });
            }
        }
    }
    out
}

/// A game played by `n` agents together with the payoffs of the `n` principals they act for.
#[derive(Debug, Clone, PartialEq)]
pub struct DelegationGame {
    space: StrategySpace,
    agents: Vec<UtilityVector>,
    principals: Vec<UtilityVector>,
}

impl DelegationGame {
    pub fn new(
        strategy_counts: Vec<usize>,
        agent_utilities: Vec<UtilityVector>,
        principal_utilities: Vec<UtilityVector>,
    ) -> Result<Self> {
        let violations = validate_game(&strategy_counts, &agent_utilities, &principal_utilities);
        if !violations.is_empty() {
            return Err(Error::InvalidGame(violations));
        }
        Ok(Self {
            space: StrategySpace::new(strategy_counts)?,
            agents: agent_utilities,
            principals: principal_utilities,
        })
    }

    /// A game in which every principal has exactly its agent's utility.
    pub fn with_identical_principals(
        strategy_counts: Vec<usize>,
        utilities: Vec<UtilityVector>,
    ) -> Result<Self> {
        let principals = utilities.clone();
        Self::new(strategy_counts, utilities, principals)
    }

    pub fn players(&self) -> usize {
        self.space.players()
    }

    pub fn space(&self) -> &StrategySpace {
        &self.space
    }

    pub fn strategy_counts(&self) -> &[usize] {
        self.space.counts()
    }

    pub fn outcome_count(&self) -> usize {
        self.space.outcome_count()
    }

    pub fn agent_utilities(&self) -> &[UtilityVector] {
        &self.agents
    }

    pub fn principal_utilities(&self) -> &[UtilityVector] {
        &self.principals
    }

    pub fn utilities(&self, side: Side) -> &[UtilityVector] {
        match side {
            Side::Agent => &self.agents,
            Side::Principal => &self.principals,
        }
    }

    pub fn payoff(&self, side: Side, player: usize, profile: &StrategyProfile) -> Result<f64> {
        let u = self.utilities(side).get(player).ok_or_else(|| {
            Error::Index(format!("player {player} out of range ({} players)", self.players()))
        })?;
        Ok(u[self.space.index_of(profile)?])
    }

    /// Add `offset` to every payoff on both sides.
    pub fn shifted(&self, offset: f64) -> Self {
        let shift = |us: &[UtilityVector]| us.iter().map(|u| u.affine(1.0, offset)).collect();
        Self {
            space: self.space.clone(),
            agents: shift(&self.agents),
            principals: shift(&self.principals),
        }
    }

    /// Smallest payoff of any player on either side.
    pub fn min_payoff(&self) -> f64 {
        self.agents
            .iter()
            .chain(&self.principals)
            .map(UtilityVector::min)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Average utilitarian welfare at a flat outcome index.
pub(crate) fn welfare_at(utilities: &[UtilityVector], index: usize) -> f64 {
    utilities.iter().map(|u| u[index]).sum::<f64>() / utilities.len() as f64
}

/// Welfare of every outcome, in flat order.
pub fn welfare_vector(utilities: &[UtilityVector]) -> Result<Vec<f64>> {
    let first = utilities.first().ok_or_else(|| invalid("empty utility list"))?;
    Ok((0..first.len()).map(|i| welfare_at(utilities, i)).collect())
}

/// Average utilitarian welfare `(1/n) Σ uⁱ(s)` at `profile`.
pub fn welfare(
    utilities: &[UtilityVector],
    space: &StrategySpace,
    profile: &StrategyProfile,
) -> Result<f64> {
    if utilities.is_empty() {
        return Err(invalid("empty utility list"));
    }
    let index = space.index_of(profile)?;
    if let Some(u) = utilities.iter().find(|u| u.len() != space.outcome_count()) {
        return Err(invalid(format!(
            "utility vector has {} entries, space has {} outcomes",
            u.len(),
            space.outcome_count()
        )));
    }
    Ok(welfare_at(utilities, index))
}

/// Reference points on the welfare line of one side of a game.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WelfareLandmarks {
    /// Maximal welfare over outcomes.
    pub w_star: f64,
    /// Minimal welfare over outcomes.
    pub w_bullet: f64,
    /// Ideal welfare: the mean of each player's own maximum.
    pub w_plus: f64,
    /// Mean of each player's own minimum.
    pub w_minus: f64,
}

impl WelfareLandmarks {
    /// Map a welfare value onto `[w_minus, w_plus]` as `[0, 1]`.
    ///
    /// Returns 0 when the range is degenerate.
    pub fn normalize(&self, w: f64) -> f64 {
        let span = self.w_plus - self.w_minus;
        if span > 0.0 {
            (w - self.w_minus) / span
        } else {
            0.0
        }
    }
}

/// Exhaustive scan of all pure outcomes. Mixed profiles cannot exceed these extremes.
pub fn welfare_landmarks(utilities: &[UtilityVector]) -> Result<WelfareLandmarks> {
    let welfares = welfare_vector(utilities)?;
    if welfares.is_empty() {
        return Err(invalid("utility vectors are empty"));
    }
    let n = utilities.len() as f64;
    Ok(WelfareLandmarks {
        w_star: welfares.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        w_bullet: welfares.iter().copied().fold(f64::INFINITY, f64::min),
        w_plus: utilities.iter().map(UtilityVector::max).sum::<f64>() / n,
        w_minus: utilities.iter().map(UtilityVector::min).sum::<f64>() / n,
    })
}
