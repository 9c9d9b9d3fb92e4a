//! Individual and collective alignment and capability.
//!
//! Alignment is a property of the game: how close two normalized utilities
//! are ([`individual_alignment`]), or how close each player's normalized
//! utility is to the welfare proxy μʷ ([`collective_alignment`]).
//! Capability is a property of play: how close the observed responses are to
//! best responses ([`individual_capability`]), and how much of the welfare
//! span between the worst ε-equilibrium and the optimum the agents achieve
//! ([`collective_capability`]).

use alloc::vec::Vec;

use crate::equilibria::{check_eps, equilibrium_welfares, player_epsilon};
use crate::error::{invalid, Error, Result};
use crate::game::{
    welfare_at, welfare_landmarks, DelegationGame, Side, StrategyProfile, UtilityVector,
    WelfareLandmarks,
};
use crate::norm::{normalize_all, NormalizationConfig, NormalizedUtility};

/// Normalized agent and principal utilities of one game under one configuration.
#[derive(Debug, Clone)]
pub struct NormalizedGame {
    pub agents: Vec<NormalizedUtility>,
    pub principals: Vec<NormalizedUtility>,
}

impl NormalizedGame {
    pub fn new(game: &DelegationGame, cfg: &NormalizationConfig) -> Result<Self> {
        Ok(Self {
            agents: normalize_all(cfg, game.agent_utilities())?,
            principals: normalize_all(cfg, game.principal_utilities())?,
        })
    }

    pub fn side(&self, side: Side) -> &[NormalizedUtility] {
        match side {
            Side::Agent => &self.agents,
            Side::Principal => &self.principals,
        }
    }

    pub fn agent_magnitudes(&self) -> Vec<f64> {
        self.agents.iter().map(|n| n.magnitude).collect()
    }

    pub fn principal_magnitudes(&self) -> Vec<f64> {
        self.principals.iter().map(|n| n.magnitude).collect()
    }
}

pub(crate) fn alignment_from(
    normalized: &NormalizedGame,
    cfg: &NormalizationConfig,
) -> Result<Vec<f64>> {
    normalized
        .principals
        .iter()
        .zip(&normalized.agents)
        .map(|(p, a)| Ok(1.0 - 0.5 * cfg.distance(&p.direction, &a.direction)?))
        .collect()
}

/// `IAⁱ = 1 - ½ m(ûνⁱ - uνⁱ)` for every principal-agent pair.
pub fn individual_alignment(game: &DelegationGame, cfg: &NormalizationConfig) -> Result<Vec<f64>> {
    alignment_from(&NormalizedGame::new(game, cfg)?, cfg)
}

pub(crate) fn proxy_from(normalized: &[NormalizedUtility]) -> Result<UtilityVector> {
    let total: f64 = normalized.iter().map(|n| n.magnitude).sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate("every utility is constant".into()));
    }
    let len = normalized.first().map_or(0, |n| n.direction.len());
    let mut mu = alloc::vec![0.0; len];
    for n in normalized {
        for (acc, d) in mu.iter_mut().zip(n.direction.iter()) {
            *acc += n.magnitude * d;
        }
    }
    mu.iter_mut().for_each(|x| *x /= total);
    Ok(UtilityVector(mu))
}

/// The welfare proxy `μʷ = Σ(uⁱ - cⁱ) / Σmⁱ`, which orders outcomes exactly as welfare does.
pub fn welfare_proxy(utilities: &[UtilityVector], cfg: &NormalizationConfig) -> Result<UtilityVector> {
    if utilities.is_empty() {
        return Err(invalid("empty utility list"));
    }
    proxy_from(&normalize_all(cfg, utilities)?)
}

/// Distance of every player's normalized utility from the welfare proxy.
pub(crate) fn proxy_distances(
    normalized: &[NormalizedUtility],
    cfg: &NormalizationConfig,
) -> Result<(UtilityVector, Vec<f64>)> {
    let mu = proxy_from(normalized)?;
    let d = normalized
        .iter()
        .map(|n| cfg.distance(&mu, &n.direction))
        .collect::<Result<Vec<_>>>()?;
    Ok((mu, d))
}

pub(crate) fn collective_from(
    normalized: &[NormalizedUtility],
    cfg: &NormalizationConfig,
) -> Result<f64> {
    let (_, d) = proxy_distances(normalized, cfg)?;
    let total: f64 = normalized.iter().map(|n| n.magnitude).sum();
    let weighted: f64 = normalized.iter().zip(&d).map(|(n, d)| n.magnitude * d).sum();
    Ok(1.0 - weighted / total)
}

/// `CA = 1 - Σᵢ (mⁱ/Σⱼmʲ) · m(μʷ - uνⁱ)`.
pub fn collective_alignment(utilities: &[UtilityVector], cfg: &NormalizationConfig) -> Result<f64> {
    if utilities.is_empty() {
        return Err(invalid("empty utility list"));
    }
    collective_from(&normalize_all(cfg, utilities)?, cfg)
}

/// For each agent, the smallest ε making its strategy in `profile` an ε-best response.
pub fn profile_epsilons(game: &DelegationGame, profile: &StrategyProfile) -> Result<Vec<f64>> {
    let index = game.space().index_of(profile)?;
    Ok((0..game.players())
        .map(|p| player_epsilon(game.agent_utilities(), game.space(), index, p))
        .collect())
}

/// `ICⁱ = 1 - max over played profiles of εⁱ(s)`: the worst observed lapse governs.
pub fn individual_capability(game: &DelegationGame, played: &[StrategyProfile]) -> Result<Vec<f64>> {
    if played.is_empty() {
        return Err(invalid("no played profiles"));
    }
    let mut worst = alloc::vec![0.0f64; game.players()];
    for profile in played {
        for (w, e) in worst.iter_mut().zip(profile_epsilons(game, profile)?) {
            *w = w.max(e);
        }
    }
    Ok(worst.into_iter().map(|e| 1.0 - e).collect())
}

/// `δ = (achieved - w_ε) / (w⋆ - w₀)` clamped to `[0, 1]`.
///
/// When `w⋆ = w₀` there is nothing left to cooperate over: the result is 1 if
/// `achieved ≥ w_ε` and 0 otherwise.
pub fn collective_capability(game: &DelegationGame, achieved_welfare: f64, eps: &[f64]) -> Result<f64> {
    check_eps(eps, game.players())?;
    let ew = equilibrium_welfares(game, eps)?;
    let w_star = welfare_landmarks(game.agent_utilities())?.w_star;
    let span = w_star - ew.w_zero;
    if span <= 0.0 {
        return Ok(if achieved_welfare >= ew.w_eps { 1.0 } else { 0.0 });
    }
    Ok(((achieved_welfare - ew.w_eps) / span).clamp(0.0, 1.0))
}

/// Calibration between principal and agent magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// `rⁱ = m̂ⁱ / mⁱ`; `+∞` where the agent utility is constant.
    pub ratios: Vec<f64>,
    /// `Σm̂ⁱ / Σmⁱ`.
    pub r_star: f64,
    /// Players whose ratio is infinite.
    pub infinite: Vec<usize>,
}

pub(crate) fn calibration_from(normalized: &NormalizedGame) -> Calibration {
    let mut infinite = Vec::new();
    let ratios = normalized
        .principals
        .iter()
        .zip(&normalized.agents)
        .enumerate()
        .map(|(i, (p, a))| {
            if a.magnitude > 0.0 {
                p.magnitude / a.magnitude
            } else {
                infinite.push(i);
                f64::INFINITY
            }
        })
        .collect();
    let agent_total: f64 = normalized.agents.iter().map(|a| a.magnitude).sum();
    let principal_total: f64 = normalized.principals.iter().map(|p| p.magnitude).sum();
    let r_star = if agent_total > 0.0 { principal_total / agent_total } else { f64::INFINITY };
    Calibration { ratios, r_star, infinite }
}

pub fn calibration_ratios(game: &DelegationGame, cfg: &NormalizationConfig) -> Result<Calibration> {
    Ok(calibration_from(&NormalizedGame::new(game, cfg)?))
}

/// Conditions worth surfacing alongside otherwise valid results.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum Warning {
    /// The norm is not strictly convex, so alignment extremes are not characterized.
    NonStrictlyConvexNorm,
    /// An agent utility is constant, so its calibration ratio is infinite.
    InfiniteRatio { player: usize },
    /// The requested collective alignment could not be reached.
    UnreachableCollectiveAlignment { target: f64, achieved: f64 },
}

/// Welfare landmarks of the agent and the principal game.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LandmarkPair {
    pub agents: WelfareLandmarks,
    pub principals: WelfareLandmarks,
}

/// Everything the measures module knows about one game and one set of plays.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasureReport {
    pub ia: Vec<f64>,
    pub ic: Vec<f64>,
    pub ca_agents: f64,
    pub ca_principals: f64,
    pub cc: f64,
    pub ratios: Vec<f64>,
    pub r_star: f64,
    pub welfare_proxy: UtilityVector,
    pub landmarks: LandmarkPair,
    pub warnings: Vec<Warning>,
}

/// Compute every measure. CC uses the mean agent welfare of `played` against `eps = 1 - IC`.
pub fn full_report(
    game: &DelegationGame,
    played: &[StrategyProfile],
    cfg: &NormalizationConfig,
) -> Result<MeasureReport> {
    if played.is_empty() {
        return Err(invalid("no played profiles"));
    }
    let normalized = NormalizedGame::new(game, cfg)?;
    let ia = alignment_from(&normalized, cfg)?;
    let ca_agents = collective_from(&normalized.agents, cfg)?;
    let ca_principals = collective_from(&normalized.principals, cfg)?;
    let welfare_proxy = proxy_from(&normalized.agents)?;
    let ic = individual_capability(game, played)?;
    let eps: Vec<f64> = ic.iter().map(|c| (1.0 - c).clamp(0.0, 1.0)).collect();
    let mut achieved = 0.0;
    for profile in played {
        achieved += welfare_at(game.agent_utilities(), game.space().index_of(profile)?);
    }
    achieved /= played.len() as f64;
    let cc = collective_capability(game, achieved, &eps)?;
    let calibration = calibration_from(&normalized);

    let mut warnings = Vec::new();
    if !cfg.is_strictly_convex() {
        warnings.push(Warning::NonStrictlyConvexNorm);
    }
    warnings.extend(calibration.infinite.iter().map(|&player| Warning::InfiniteRatio { player }));

    Ok(MeasureReport {
        ia,
        ic,
        ca_agents,
        ca_principals,
        cc,
        ratios: calibration.ratios,
        r_star: calibration.r_star,
        welfare_proxy,
        landmarks: LandmarkPair {
            agents: welfare_landmarks(game.agent_utilities())?,
            principals: welfare_landmarks(game.principal_utilities())?,
        },
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{make_prisoners_dilemma, make_worked_example};
    use crate::equilibria::pure_eps_nash;
    use alloc::vec;

    fn p(v: &[usize]) -> StrategyProfile {
        StrategyProfile(v.to_vec())
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn worked_example_alignment() {
        let g = make_worked_example();
        let cfg = NormalizationConfig::linf_midrange();
        let ia = individual_alignment(&g, &cfg).unwrap();
        assert!(close(ia[0], 1.0 / 3.0) && close(ia[1], 5.0 / 6.0));
        let mu = welfare_proxy(g.agent_utilities(), &cfg).unwrap();
        for (x, y) in mu.iter().zip([0.0, 1.0 / 3.0, 1.0 / 3.0, -1.0]) {
            assert!(close(*x, y));
        }
        assert!(close(collective_alignment(g.agent_utilities(), &cfg).unwrap(), 1.0 / 3.0));
    }

    #[test]
    fn alignment_extremes() {
        let cfg = NormalizationConfig::default();
        let u = vec![UtilityVector(vec![1.0, 4.0, -2.0, 0.5]), UtilityVector(vec![0.0, 1.0, 3.0, 2.0])];
        let same = DelegationGame::new(vec![2, 2], u.clone(), u.clone()).unwrap();
        assert!(individual_alignment(&same, &cfg).unwrap().iter().all(|&x| close(x, 1.0)));
        let neg: Vec<_> = u.iter().map(|v| v.affine(-1.0, 0.0)).collect();
        let opposite = DelegationGame::new(vec![2, 2], u.clone(), neg.clone()).unwrap();
        assert!(individual_alignment(&opposite, &cfg).unwrap().iter().all(|&x| close(x, 0.0)));

        let identical = vec![u[0].clone(), u[0].affine(2.0, 1.0), u[0].affine(0.5, -3.0)];
        assert!(close(collective_alignment(&identical, &cfg).unwrap(), 1.0));
        let nu = cfg.normalize(&u[0]).unwrap();
        let mu = welfare_proxy(&identical, &cfg).unwrap();
        for (x, y) in mu.iter().zip(nu.direction.iter()) {
            assert!(close(*x, *y));
        }

        let opposed = vec![u[0].clone(), u[0].affine(-1.0, 0.0)];
        assert!(welfare_proxy(&opposed, &cfg).unwrap().iter().all(|x| x.abs() < 1e-12));
        assert!(close(collective_alignment(&opposed, &cfg).unwrap(), 0.0));
    }

    #[test]
    fn degenerate_proxy() {
        let cfg = NormalizationConfig::default();
        let zeros = vec![UtilityVector::zeros(4), UtilityVector::zeros(4)];
        assert!(matches!(welfare_proxy(&zeros, &cfg), Err(Error::Degenerate(_))));
        assert!(matches!(collective_alignment(&zeros, &cfg), Err(Error::Degenerate(_))));
        let g = DelegationGame::with_identical_principals(vec![2, 2], zeros).unwrap();
        assert!(matches!(full_report(&g, &[p(&[0, 0])], &cfg), Err(Error::Degenerate(_))));
    }

    #[test]
    fn epsilons_and_capability() {
        let g = make_worked_example();
        assert_eq!(profile_epsilons(&g, &p(&[0, 0])).unwrap(), vec![0.0, 0.0]);
        assert_eq!(profile_epsilons(&g, &p(&[1, 1])).unwrap(), vec![1.0, 1.0]);
        assert_eq!(individual_capability(&g, &[p(&[0, 0])]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(individual_capability(&g, &[p(&[0, 1])]).unwrap(), vec![1.0, 0.0]);
        assert!(individual_capability(&g, &[]).is_err());

        let single = DelegationGame::with_identical_principals(
            vec![1, 1],
            vec![UtilityVector(vec![2.0]), UtilityVector(vec![-1.0])],
        )
        .unwrap();
        assert_eq!(profile_epsilons(&single, &p(&[0, 0])).unwrap(), vec![0.0, 0.0]);

        let constant = DelegationGame::with_identical_principals(
            vec![2, 3],
            vec![UtilityVector(vec![1.0; 6]), UtilityVector(vec![-2.0; 6])],
        )
        .unwrap();
        let all: Vec<_> = constant.space().profiles().collect();
        assert_eq!(individual_capability(&constant, &all).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn collective_capability_examples() {
        let g = make_worked_example();
        assert!(close(collective_capability(&g, 3.5, &[0.1, 0.3]).unwrap(), 0.5));
        assert_eq!(collective_capability(&g, 3.0, &[0.1, 0.3]).unwrap(), 0.0);
        assert_eq!(collective_capability(&g, 4.0, &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(collective_capability(&g, 10.0, &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(collective_capability(&g, -1.0, &[0.0, 0.0]).unwrap(), 0.0);

        // the Prisoner's Dilemma with w⋆ > w₀ has a proper span; a common-interest game does not
        let pd = make_prisoners_dilemma(0.2).unwrap();
        assert!(close(collective_capability(&pd, 0.5, &[0.0, 0.0]).unwrap(), 0.4 / 0.8));
        let common = DelegationGame::with_identical_principals(
            vec![2, 2],
            vec![UtilityVector(vec![1.0, 0.0, 0.0, 0.0]), UtilityVector(vec![1.0, 0.0, 0.0, 0.0])],
        )
        .unwrap();
        assert_eq!(collective_capability(&common, 1.0, &[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn calibration_examples() {
        let g = make_worked_example();
        let c = calibration_ratios(&g, &NormalizationConfig::linf_midrange()).unwrap();
        assert!(close(c.ratios[0], 1.0 / 3.0) && close(c.ratios[1], 1.0));
        assert!(close(c.r_star, 2.0 / 3.0));

        let cfg = NormalizationConfig::default();
        let u = vec![UtilityVector(vec![1.0, 4.0, -2.0, 0.5]), UtilityVector(vec![0.0, 1.0, 3.0, 2.0])];
        let same = DelegationGame::new(vec![2, 2], u.clone(), u.clone()).unwrap();
        let c = calibration_ratios(&same, &cfg).unwrap();
        assert!(c.ratios.iter().all(|&r| close(r, 1.0)) && close(c.r_star, 1.0));
        let doubled: Vec<_> = u.iter().map(|v| v.affine(2.0, 0.0)).collect();
        let twice = DelegationGame::new(vec![2, 2], u.clone(), doubled).unwrap();
        assert!(calibration_ratios(&twice, &cfg).unwrap().ratios.iter().all(|&r| close(r, 2.0)));

        let flat = DelegationGame::new(vec![2, 2], vec![u[0].clone(), UtilityVector(vec![1.0; 4])], u).unwrap();
        let c = calibration_ratios(&flat, &cfg).unwrap();
        assert_eq!(c.ratios[1], f64::INFINITY);
        assert_eq!(c.infinite, vec![1]);
    }

    #[test]
    fn full_report_worked_example() {
        let g = make_worked_example();
        let cfg = NormalizationConfig::linf_midrange();
        let r = full_report(&g, &[p(&[0, 0])], &cfg).unwrap();
        assert!(close(r.ia[0], 1.0 / 3.0) && close(r.ia[1], 5.0 / 6.0));
        assert_eq!(r.ic, vec![1.0, 1.0]);
        assert!(close(r.ca_agents, 1.0 / 3.0));
        assert_eq!(r.cc, 0.0);
        assert_eq!(r.warnings, vec![Warning::NonStrictlyConvexNorm]);
    }

    #[test]
    fn full_report_identity_at_worst_equilibrium() {
        let pd = make_prisoners_dilemma(0.3).unwrap();
        let ne = pure_eps_nash(&pd, &[0.0, 0.0]).unwrap();
        let r = full_report(&pd, &ne.profiles, &NormalizationConfig::default()).unwrap();
        assert!(r.ia.iter().all(|&x| close(x, 1.0)));
        assert_eq!(r.cc, 0.0);
        assert!(r.warnings.is_empty());
    }
}
