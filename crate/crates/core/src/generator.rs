//! Random delegation games with prescribed individual alignment and
//! principal-side collective alignment.
//!
//! Principals get random directions which are then pulled towards (or pushed
//! away from) their common mean until the collective alignment hits its
//! target. Each agent direction is then placed at the distance from its
//! principal's direction that yields the target individual alignment.
//! Directions are manipulated on the unit sphere of the centered hyperplane,
//! which needs an inner-product norm and the matching mean shift.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::equilibria::eps_nash_indices;
use crate::error::{invalid, Error, Result};
use crate::game::{DelegationGame, StrategySpace, UtilityVector};
use crate::measures::{collective_from, Warning};
use crate::norm::{NormalizationConfig, NormalizedUtility, ShiftKind};

const UNIT_TOL: f64 = 1e-9;
const DRAW_ATTEMPTS: usize = 1000;

fn check_generation_norm(cfg: &NormalizationConfig) -> Result<()> {
    if !cfg.is_inner_product() {
        return Err(Error::UnsupportedNorm(
            "generation needs an inner-product norm (l2 or weighted l2)".into(),
        ));
    }
    if cfg.shift != ShiftKind::Mean {
        return Err(Error::UnsupportedNorm(
            "generation needs the mean shift, which matches the inner product".into(),
        ));
    }
    Ok(())
}

fn gaussian<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// A uniformly random direction: zero shift and unit norm under `cfg`.
pub fn sample_direction<R: Rng + ?Sized>(
    outcome_count: usize,
    cfg: &NormalizationConfig,
    rng: &mut R,
) -> Result<UtilityVector> {
    if outcome_count < 2 {
        return Err(invalid("a direction needs at least two outcomes"));
    }
    for _ in 0..DRAW_ATTEMPTS {
        let n = cfg.normalize(&gaussian(outcome_count, rng))?;
        if !n.is_zero() {
            return Ok(n.direction);
        }
    }
    Err(Error::Simulation("could not draw a nonconstant vector".into()))
}

fn check_direction(cfg: &NormalizationConfig, v: &[f64]) -> Result<()> {
    let norm = cfg.norm(v)?;
    let shift = cfg.shift(v)?;
    if (norm - 1.0).abs() > UNIT_TOL || shift.abs() > UNIT_TOL {
        return Err(invalid(format!(
            "reference is not a direction (norm {norm}, shift {shift})"
        )));
    }
    Ok(())
}

/// A random direction at distance `target_distance ∈ [0, 2]` from `reference`.
///
/// Rotates `reference` by the angle `θ` with `cos θ = 1 - t²/2` towards a
/// random centered direction orthogonal to it.
pub fn direction_at_distance<R: Rng + ?Sized>(
    reference: &UtilityVector,
    target_distance: f64,
    cfg: &NormalizationConfig,
    rng: &mut R,
) -> Result<UtilityVector> {
    check_generation_norm(cfg)?;
    if !(0.0..=2.0).contains(&target_distance) {
        return Err(invalid(format!("target distance {target_distance} outside [0, 2]")));
    }
    check_direction(cfg, reference)?;
    let cos = 1.0 - target_distance * target_distance / 2.0;
    let sin = libm::sqrt((1.0 - cos * cos).max(0.0));
    if sin == 0.0 {
        return Ok(reference.affine(cos.signum(), 0.0));
    }
    if reference.len() < 3 {
        return Err(invalid(
            "with two outcomes only distances 0 and 2 are attainable",
        ));
    }
    for _ in 0..DRAW_ATTEMPTS {
        let g = gaussian(reference.len(), rng);
        let shift = cfg.shift(&g)?;
        let mut o: Vec<f64> = g.iter().map(|x| x - shift).collect();
        let along = cfg.inner(&o, reference)?;
        o.iter_mut().zip(reference.iter()).for_each(|(x, r)| *x -= along * r);
        let norm = cfg.norm(&o)?;
        if norm > 1e-9 * cfg.norm(&g)? {
            return Ok(UtilityVector(
                reference.iter().zip(&o).map(|(r, x)| cos * r + sin * x / norm).collect(),
            ));
        }
    }
    Err(Error::Simulation("could not draw an orthogonal direction".into()))
}

/// Result of [`adjust_collective_alignment`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedDirections {
    pub directions: Vec<UtilityVector>,
    /// The shared interpolation parameter; 0 collapses onto the mean, 1 is the input.
    pub t: f64,
    pub achieved: f64,
    /// Set when the target lies outside the reachable range.
    pub warning: Option<Warning>,
}

fn ca_of(directions: &[UtilityVector], magnitudes: &[f64], cfg: &NormalizationConfig) -> Result<f64> {
    let normalized: Vec<NormalizedUtility> = directions
        .iter()
        .zip(magnitudes)
        .map(|(d, &m)| NormalizedUtility { direction: d.clone(), magnitude: m, shift: 0.0 })
        .collect();
    collective_from(&normalized, cfg)
}

/// Move every direction along `μ + t(dᵢ - μ)`, re-normalized, where `μ` is the
/// magnitude-weighted mean direction, with one shared `t` chosen by bisection
/// so that collective alignment equals `target` within `tol`.
///
/// `t` may exceed 1, pushing directions apart beyond their input spread. When
/// no `t` reaches the target the nearest value found is returned with a warning.
pub fn adjust_collective_alignment(
    directions: &[UtilityVector],
    magnitudes: &[f64],
    target: f64,
    cfg: &NormalizationConfig,
    tol: f64,
) -> Result<AdjustedDirections> {
    check_generation_norm(cfg)?;
    if directions.is_empty() || directions.len() != magnitudes.len() {
        return Err(invalid("need one magnitude per direction"));
    }
    if !(0.0..=1.0).contains(&target) {
        return Err(invalid(format!("target {target} outside [0, 1]")));
    }
    if magnitudes.iter().any(|&m| !(m > 0.0)) {
        return Err(invalid("magnitudes must be positive"));
    }
    for d in directions {
        check_direction(cfg, d)?;
    }
    let len = directions[0].len();
    let total: f64 = magnitudes.iter().sum();
    let mut mean = alloc::vec![0.0; len];
    for (d, m) in directions.iter().zip(magnitudes) {
        mean.iter_mut().zip(d.iter()).for_each(|(acc, x)| *acc += m * x / total);
    }

    let at = |t: f64| -> Result<Vec<UtilityVector>> {
        directions
            .iter()
            .map(|d| {
                let v: Vec<f64> = mean.iter().zip(d.iter()).map(|(c, x)| c + t * (x - c)).collect();
                let n = cfg.normalize(&v)?;
                Ok(if n.is_zero() { d.clone() } else { n.direction })
            })
            .collect()
    };
    let finish = |t: f64, dirs: Vec<UtilityVector>| -> Result<AdjustedDirections> {
        let achieved = ca_of(&dirs, magnitudes, cfg)?;
        let warning = ((achieved - target).abs() > tol)
            .then_some(Warning::UnreachableCollectiveAlignment { target, achieved });
        Ok(AdjustedDirections { directions: dirs, t, achieved, warning })
    };

    let ca_one = ca_of(directions, magnitudes, cfg)?;
    if (ca_one - target).abs() <= tol {
        return finish(1.0, directions.to_vec());
    }
    let collapsed = at(0.0)?;
    if 1.0 - target <= tol || ca_of(&collapsed, magnitudes, cfg)? <= target {
        return finish(0.0, collapsed);
    }

    // CA(0) = 1 > target; look for an upper end with CA at or below the target
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut ca_hi = ca_one;
    while ca_hi > target && hi < 1e6 {
        lo = hi;
        hi *= 2.0;
        ca_hi = ca_of(&at(hi)?, magnitudes, cfg)?;
    }
    if ca_hi > target {
        return finish(hi, at(hi)?);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let ca = ca_of(&at(mid)?, magnitudes, cfg)?;
        if (ca - target).abs() <= tol * 1e-3 {
            return finish(mid, at(mid)?);
        }
        if ca > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (ca_lo, ca_hi) = (ca_of(&at(lo)?, magnitudes, cfg)?, ca_of(&at(hi)?, magnitudes, cfg)?);
    let t = if (ca_lo - target).abs() <= (ca_hi - target).abs() { lo } else { hi };
    finish(t, at(t)?)
}

/// Parameters of [`random_delegation_game`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub strategy_counts: Vec<usize>,
    pub target_ia: Vec<f64>,
    pub target_principal_ca: f64,
    pub magnitude_range: (f64, f64),
    pub shift_range: (f64, f64),
    pub seed: u64,
    pub norm_cfg: NormalizationConfig,
    /// Give each agent its principal's magnitude, so every calibration ratio is 1.
    pub calibrated: bool,
    pub max_attempts: usize,
    pub ca_tol: f64,
}

impl GeneratorSpec {
    /// Uniform targets for every player, with magnitudes in `[0.5, 1.5]`,
    /// shifts in `[-1, 1]` and the plain l2 norm.
    pub fn new(strategy_counts: Vec<usize>, ia: f64, principal_ca: f64, seed: u64) -> Self {
        let n = strategy_counts.len();
        Self {
            strategy_counts,
            target_ia: alloc::vec![ia; n],
            target_principal_ca: principal_ca,
            magnitude_range: (0.5, 1.5),
            shift_range: (-1.0, 1.0),
            seed,
            norm_cfg: NormalizationConfig::default(),
            calibrated: false,
            max_attempts: 100,
            ca_tol: 1e-6,
        }
    }

    pub fn players(&self) -> usize {
        self.strategy_counts.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.players() < 2 {
            return Err(invalid("need at least two players"));
        }
        let space = StrategySpace::new(self.strategy_counts.clone())?;
        if space.outcome_count() < 2 {
            return Err(invalid("need at least two outcomes"));
        }
        if self.target_ia.len() != self.players() {
            return Err(invalid(format!(
                "{} individual alignment targets for {} players",
                self.target_ia.len(),
                self.players()
            )));
        }
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        if !self.target_ia.iter().all(|&x| in_unit(x)) || !in_unit(self.target_principal_ca) {
            return Err(invalid("alignment targets must lie in [0, 1]"));
        }
        for (name, (lo, hi)) in [("magnitude", self.magnitude_range), ("shift", self.shift_range)] {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(invalid(format!("{name} range ({lo}, {hi}) is empty")));
            }
        }
        if !(self.magnitude_range.0 > 0.0) {
            return Err(invalid("magnitudes must be positive"));
        }
        if self.max_attempts == 0 {
            return Err(invalid("max_attempts must be positive"));
        }
        self.norm_cfg.validate()?;
        check_generation_norm(&self.norm_cfg)
    }
}

/// A generated game with the conditions met along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedGame {
    pub game: DelegationGame,
    pub attempts: usize,
    pub warnings: Vec<Warning>,
}

/// Draw a game matching `spec`, resampling until the agent game has a pure Nash equilibrium.
pub fn generate(spec: &GeneratorSpec) -> Result<GeneratedGame> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let space = StrategySpace::new(spec.strategy_counts.clone())?;
    for attempt in 1..=spec.max_attempts {
        let (game, warnings) = draw(spec, &space, &mut rng)?;
        let zeros = alloc::vec![0.0; spec.players()];
        if !eps_nash_indices(game.agent_utilities(), &space, &zeros).is_empty() {
            return Ok(GeneratedGame { game, attempts: attempt, warnings });
        }
    }
    Err(Error::GenerationFailed {
        attempts: spec.max_attempts,
        reason: "no draw had a pure Nash equilibrium".into(),
    })
}

/// [`generate`] without the bookkeeping.
pub fn random_delegation_game(spec: &GeneratorSpec) -> Result<DelegationGame> {
    generate(spec).map(|g| g.game)
}

fn draw<R: Rng + ?Sized>(
    spec: &GeneratorSpec,
    space: &StrategySpace,
    rng: &mut R,
) -> Result<(DelegationGame, Vec<Warning>)> {
    let cfg = &spec.norm_cfg;
    let len = space.outcome_count();
    let n = spec.players();
    let (m_lo, m_hi) = spec.magnitude_range;
    let (c_lo, c_hi) = spec.shift_range;

    let mut principal_dirs = Vec::with_capacity(n);
    let mut principal_mags = Vec::with_capacity(n);
    for _ in 0..n {
        principal_dirs.push(sample_direction(len, cfg, rng)?);
        principal_mags.push(rng.random_range(m_lo..m_hi));
    }
    let adjusted = adjust_collective_alignment(
        &principal_dirs,
        &principal_mags,
        spec.target_principal_ca,
        cfg,
        spec.ca_tol,
    )?;

    let mut agents = Vec::with_capacity(n);
    let mut principals = Vec::with_capacity(n);
    for i in 0..n {
        let d = &adjusted.directions[i];
        principals.push(d.affine(principal_mags[i], rng.random_range(c_lo..c_hi)));
        let v = direction_at_distance(d, 2.0 * (1.0 - spec.target_ia[i]), cfg, rng)?;
        let m = if spec.calibrated { principal_mags[i] } else { rng.random_range(m_lo..m_hi) };
        agents.push(v.affine(m, rng.random_range(c_lo..c_hi)));
    }
    let game = DelegationGame::new(spec.strategy_counts.clone(), agents, principals)?;
    Ok((game, adjusted.warning.into_iter().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{collective_alignment, individual_alignment};
    use alloc::vec;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn sampled_directions_are_unit_and_centered() {
        let cfg = NormalizationConfig::default();
        let mut r = rng(1);
        let a = sample_direction(6, &cfg, &mut r).unwrap();
        let b = sample_direction(6, &cfg, &mut r).unwrap();
        assert!((cfg.norm(&a).unwrap() - 1.0).abs() < 1e-9);
        assert!(cfg.shift(&a).unwrap().abs() < 1e-9);
        assert!(cfg.distance(&a, &b).unwrap() > 0.0);
        assert!(sample_direction(1, &cfg, &mut r).is_err());
    }

    #[test]
    fn direction_at_distance_examples() {
        let cfg = NormalizationConfig::default();
        let mut r = rng(2);
        let reference = sample_direction(5, &cfg, &mut r).unwrap();
        assert_eq!(direction_at_distance(&reference, 0.0, &cfg, &mut r).unwrap(), reference);
        let opposite = direction_at_distance(&reference, 2.0, &cfg, &mut r).unwrap();
        assert_eq!(opposite, reference.affine(-1.0, 0.0));
        let side = direction_at_distance(&reference, libm::sqrt(2.0), &cfg, &mut r).unwrap();
        assert!(cfg.inner(&side, &reference).unwrap().abs() < 1e-9);
        assert!((cfg.distance(&side, &reference).unwrap() - libm::sqrt(2.0)).abs() < 1e-9);

        let linf = NormalizationConfig::linf_midrange();
        assert!(matches!(
            direction_at_distance(&reference, 1.0, &linf, &mut r),
            Err(Error::UnsupportedNorm(_))
        ));
        let midrange = NormalizationConfig { shift: ShiftKind::Midrange, ..Default::default() };
        assert!(matches!(
            direction_at_distance(&reference, 1.0, &midrange, &mut r),
            Err(Error::UnsupportedNorm(_))
        ));
        assert!(direction_at_distance(&reference, 2.5, &cfg, &mut r).is_err());
        assert!(direction_at_distance(&reference.affine(2.0, 0.0), 1.0, &cfg, &mut r).is_err());
    }

    #[test]
    fn weighted_directions() {
        let cfg = NormalizationConfig::weighted(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let mut r = rng(3);
        let reference = sample_direction(4, &cfg, &mut r).unwrap();
        let v = direction_at_distance(&reference, 0.7, &cfg, &mut r).unwrap();
        assert!((cfg.distance(&v, &reference).unwrap() - 0.7).abs() < 1e-9);
        assert!(cfg.shift(&v).unwrap().abs() < 1e-9);
    }

    #[test]
    fn adjust_examples() {
        let cfg = NormalizationConfig::default();
        let mut r = rng(4);
        let dirs: Vec<_> = (0..2).map(|_| sample_direction(8, &cfg, &mut r).unwrap()).collect();
        let mags = [0.8, 1.2];

        let full = adjust_collective_alignment(&dirs, &mags, 1.0, &cfg, 1e-6).unwrap();
        assert!(full.directions.windows(2).all(|w| cfg.distance(&w[0], &w[1]).unwrap() < 1e-12));
        assert!((full.achieved - 1.0).abs() < 1e-12);

        let original = ca_of(&dirs, &mags, &cfg).unwrap();
        let same = adjust_collective_alignment(&dirs, &mags, original, &cfg, 1e-6).unwrap();
        assert_eq!(same.t, 1.0);
        assert_eq!(same.directions, dirs);

        let half = adjust_collective_alignment(&dirs, &mags, 0.5, &cfg, 1e-6).unwrap();
        let utilities: Vec<_> = half.directions.iter().zip(mags).map(|(d, m)| d.affine(m, 0.0)).collect();
        assert!((collective_alignment(&utilities, &cfg).unwrap() - 0.5).abs() < 1e-6);
        assert!(half.warning.is_none());
    }

    #[test]
    fn unreachable_target_is_flagged() {
        let cfg = NormalizationConfig::default();
        let mut r = rng(5);
        let dirs: Vec<_> = (0..2).map(|_| sample_direction(8, &cfg, &mut r).unwrap()).collect();
        // with magnitudes 1 and 3, CA never drops below 1 - 4·3/16 = 1/4
        let adjusted = adjust_collective_alignment(&dirs, &[1.0, 3.0], 0.0, &cfg, 1e-6).unwrap();
        assert!(matches!(adjusted.warning, Some(Warning::UnreachableCollectiveAlignment { .. })));
        assert!(adjusted.achieved >= 0.25 - 1e-9);
    }

    #[test]
    fn generated_game_hits_targets() {
        let spec = GeneratorSpec::new(vec![2, 5], 0.9, 0.9, 11);
        let g = generate(&spec).unwrap();
        let cfg = NormalizationConfig::default();
        for ia in individual_alignment(&g.game, &cfg).unwrap() {
            assert!((ia - 0.9).abs() < 1e-6);
        }
        let ca = collective_alignment(g.game.principal_utilities(), &cfg).unwrap();
        assert!((ca - 0.9).abs() < 1e-3);
        assert_eq!(random_delegation_game(&spec).unwrap(), g.game);
        assert_ne!(random_delegation_game(&GeneratorSpec { seed: 12, ..spec }).unwrap(), g.game);
    }

    #[test]
    fn perfect_individual_alignment() {
        let spec = GeneratorSpec::new(vec![3, 3], 1.0, 0.6, 7);
        let g = random_delegation_game(&spec).unwrap();
        let ia = individual_alignment(&g, &NormalizationConfig::default()).unwrap();
        assert!(ia.iter().all(|x| (x - 1.0).abs() < 1e-9));
    }

    #[test]
    fn calibrated_games_have_equal_ratios() {
        let spec = GeneratorSpec { calibrated: true, ..GeneratorSpec::new(vec![2, 3], 0.5, 0.8, 9) };
        let g = random_delegation_game(&spec).unwrap();
        let c = crate::measures::calibration_ratios(&g, &spec.norm_cfg).unwrap();
        assert!(c.ratios.iter().all(|r| (r - 1.0).abs() < 1e-9));
    }

    #[test]
    fn spec_is_validated() {
        let base = GeneratorSpec::new(vec![2, 2], 0.5, 0.5, 0);
        assert!(generate(&GeneratorSpec { strategy_counts: vec![4], target_ia: vec![0.5], ..base.clone() }).is_err());
        assert!(generate(&GeneratorSpec { target_principal_ca: 1.5, ..base.clone() }).is_err());
        assert!(generate(&GeneratorSpec { magnitude_range: (1.0, 1.0), ..base.clone() }).is_err());
        assert!(matches!(
            generate(&GeneratorSpec { norm_cfg: NormalizationConfig::linf_midrange(), ..base }),
            Err(Error::UnsupportedNorm(_))
        ));
    }

    #[test]
    fn retries_are_bounded() {
        // every draw of a 2×2 game with fully opposed agents has some chance of
        // lacking a pure equilibrium; a budget of one makes failure observable
        let mut failures = 0;
        for seed in 0..50 {
            let spec = GeneratorSpec { max_attempts: 1, ..GeneratorSpec::new(vec![2, 2], 0.5, 0.2, seed) };
            match generate(&spec) {
                Ok(g) => assert_eq!(g.attempts, 1),
                Err(Error::GenerationFailed { attempts, .. }) => {
                    assert_eq!(attempts, 1);
                    failures += 1;
                }
                Err(e) => panic!("{e}"),
            }
        }
        assert!(failures > 0);
    }
}
