//! Estimator error against ground truth over freshly generated games.

use delegation_core::equilibria::admissible_outcomes;
use delegation_core::generator::{generate, GeneratorSpec};
use delegation_core::inference::{estimate_alignment, estimate_cc_upper, estimate_ic_upper, simulate_play};
use delegation_core::measures::{collective_alignment, individual_alignment};
use delegation_core::{DelegationGame, Error, NormalizationConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{mean_ci, stream_seed};

pub const MEASURES: [&str; 4] = ["ia", "ic", "ca", "cc"];

#[derive(Debug, Clone, PartialEq)]
pub struct MaeConfig {
    pub games: usize,
    pub players: usize,
    /// Outcome counts are drawn from this inclusive range.
    pub outcome_range: (usize, usize),
    /// Ascending dataset sizes.
    pub sample_sizes: Vec<usize>,
    /// Probability that an observation is of joint play.
    pub mode_mix: f64,
    pub seed: u64,
    pub norm_cfg: NormalizationConfig,
}

impl Default for MaeConfig {
    fn default() -> Self {
        Self {
            games: 100,
            players: 2,
            outcome_range: (10, 100),
            sample_sizes: vec![10, 30, 100, 300, 1000],
            mode_mix: 0.5,
            seed: 0,
            norm_cfg: NormalizationConfig::default(),
        }
    }
}

/// Ground truth and estimates for one game at one dataset size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trial {
    pub game_index: usize,
    pub sample_size: usize,
    pub ia: Vec<f64>,
    pub ca: f64,
    pub ic: Vec<f64>,
    pub cc: f64,
    pub ia_hat: Option<Vec<f64>>,
    pub ca_hat: Option<f64>,
    pub ic_hat: Option<Vec<f64>>,
    pub cc_hat: Option<f64>,
}

impl Trial {
    /// Absolute error per measure, `None` where the estimator had too little data.
    pub fn errors(&self) -> [Option<f64>; 4] {
        let mean_abs = |a: &[f64], b: &[f64]| {
            a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
        };
        [
            self.ia_hat.as_ref().map(|h| mean_abs(h, &self.ia)),
            self.ic_hat.as_ref().map(|h| mean_abs(h, &self.ic)),
            self.ca_hat.map(|h| (h - self.ca).abs()),
            self.cc_hat.map(|h| (h - self.cc).abs()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaeRow {
    pub measure: &'static str,
    pub sample_size: usize,
    pub mae: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaeReport {
    pub rows: Vec<MaeRow>,
    pub trials: Vec<Trial>,
    /// Games skipped because no usable instance could be drawn.
    pub skipped_games: Vec<usize>,
}

fn draw_counts(players: usize, range: (usize, usize), rng: &mut ChaCha8Rng) -> Vec<usize> {
    loop {
        let counts: Vec<usize> = (0..players).map(|_| rng.random_range(2..=range.1.max(2))).collect();
        let outcomes: usize = counts.iter().product();
        if (range.0..=range.1).contains(&outcomes) {
            return counts;
        }
    }
}

/// A nonnegative game together with capability parameters that admit at least one outcome.
fn draw_instance(config: &MaeConfig, rng: &mut ChaCha8Rng) -> Result<(DelegationGame, Vec<f64>, f64), Error> {
    for _ in 0..100 {
        let counts = draw_counts(config.players, config.outcome_range, rng);
        let spec = GeneratorSpec {
            target_ia: (0..config.players).map(|_| rng.random()).collect(),
            ..GeneratorSpec::new(counts, 0.0, rng.random_range(0.3..1.0), rng.random())
        };
        let raw = generate(&spec)?.game;
        let game = raw.shifted(-raw.min_payoff().min(0.0));
        let ic: Vec<f64> = (0..config.players).map(|_| rng.random()).collect();
        let eps: Vec<f64> = ic.iter().map(|c| 1.0 - c).collect();
        for _ in 0..100 {
            let cc: f64 = rng.random();
            if !admissible_outcomes(&game, &eps, cc)?.is_empty() {
                return Ok((game, ic, cc));
            }
        }
    }
    Err(Error::Simulation("no instance with a nonempty admissible set".into()))
}

fn run_game(config: &MaeConfig, game_index: usize) -> Result<Vec<Trial>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, 0, game_index as u64));
    let (game, ic, cc) = draw_instance(config, &mut rng)?;
    let cfg = &config.norm_cfg;
    let ia = individual_alignment(&game, cfg)?;
    let ca = collective_alignment(game.agent_utilities(), cfg)?;
    config
        .sample_sizes
        .iter()
        .enumerate()
        .map(|(k, &size)| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, 1 + k as u64, game_index as u64));
            let data = simulate_play(&game, &ic, cc, size, config.mode_mix, &mut rng)?;
            let alignment = estimate_alignment(&data, cfg).ok();
            Ok(Trial {
                game_index,
                sample_size: size,
                ia: ia.clone(),
                ca,
                ic: ic.clone(),
                cc,
                ia_hat: alignment.as_ref().map(|a| a.ia.clone()),
                ca_hat: alignment.map(|a| a.ca_agents),
                ic_hat: Some(estimate_ic_upper(&data)?.upper),
                cc_hat: estimate_cc_upper(&data).ok(),
            })
        })
        .collect()
}

/// Mean absolute error of each estimator at each dataset size, with 90% intervals across games.
pub fn mae_curve(config: &MaeConfig) -> Result<MaeReport, Error> {
    if config.games == 0 || config.sample_sizes.is_empty() {
        return Err(Error::InvalidArgument("need at least one game and one sample size".into()));
    }
    if config.sample_sizes.windows(2).any(|w| w[0] >= w[1]) || config.sample_sizes[0] == 0 {
        return Err(Error::InvalidArgument("sample sizes must be positive and ascending".into()));
    }
    if config.players < 2 || config.outcome_range.0 > config.outcome_range.1 {
        return Err(Error::InvalidArgument("need two players and a nonempty outcome range".into()));
    }
    let per_game: Vec<Result<Vec<Trial>, Error>> =
        (0..config.games).into_par_iter().map(|g| run_game(config, g)).collect();

    let mut trials = Vec::new();
    let mut skipped_games = Vec::new();
    for (g, result) in per_game.into_iter().enumerate() {
        match result {
            Ok(t) => trials.extend(t),
            Err(Error::Simulation(_) | Error::GenerationFailed { .. }) => skipped_games.push(g),
            Err(e) => return Err(e),
        }
    }

    let mut rows = Vec::new();
    for (m, measure) in MEASURES.iter().enumerate() {
        for &size in &config.sample_sizes {
            let errors: Vec<f64> = trials
                .iter()
                .filter(|t| t.sample_size == size)
                .filter_map(|t| t.errors()[m])
                .collect();
            let (mae, ci_lo, ci_hi) = mean_ci(&errors);
            rows.push(MaeRow { measure, sample_size: size, mae, ci_lo, ci_hi });
        }
    }
    Ok(MaeReport { rows, trials, skipped_games })
}

pub fn write_mae_csv<W: std::io::Write>(rows: &[MaeRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["measure", "sample_size", "mae", "ci_lo", "ci_hi"])?;
    for r in rows {
        w.write_record([
            r.measure.to_string(),
            r.sample_size.to_string(),
            format!("{:.16e}", r.mae),
            format!("{:.16e}", r.ci_lo),
            format!("{:.16e}", r.ci_hi),
        ])?;
    }
    w.flush()?;
    Ok(())
}
