//! Vary one measure across `[0, 1]` with the other three pinned, and record
//! principal welfare over the admissible outcomes against the landmarks and
//! regret bounds.

use std::fmt;

use delegation_core::bounds::{ideal_gap_bound, worst_admissible_bound};
use delegation_core::equilibria::admissible_outcomes;
use delegation_core::game::{welfare, welfare_landmarks};
use delegation_core::generator::{generate, GeneratorSpec};
use delegation_core::{DelegationGame, Error, NormalizationConfig, StrategyProfile};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{mean_ci, stream_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Ia,
    Ic,
    Ca,
    Cc,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Ia => "ia",
            Measure::Ic => "ic",
            Measure::Ca => "ca",
            Measure::Cc => "cc",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub varied: Measure,
    pub fixed: f64,
    pub steps: usize,
    pub games_per_step: usize,
    pub strategy_counts: Vec<usize>,
    pub seed: u64,
    pub norm_cfg: NormalizationConfig,
    /// Generate games whose calibration ratios are all equal.
    pub calibrated: bool,
    /// Draws per (step, game) slot before it is recorded as missing.
    pub max_attempts: usize,
}

impl SweepConfig {
    pub fn new(varied: Measure, fixed: f64, seed: u64) -> Self {
        Self {
            varied,
            fixed,
            steps: 11,
            games_per_step: 25,
            strategy_counts: vec![2, 5],
            seed,
            norm_cfg: NormalizationConfig::default(),
            calibrated: false,
            max_attempts: 100,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if !(0.0..=1.0).contains(&self.fixed) {
            return bad("fixed value must lie in [0, 1]");
        }
        if self.steps < 2 || self.games_per_step == 0 || self.max_attempts == 0 {
            return bad("need at least two steps, one game per step and one attempt");
        }
        GeneratorSpec::new(self.strategy_counts.clone(), self.fixed, self.fixed, 0).validate()
    }

    /// The varied measure's value at each step.
    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| i as f64 / (self.steps - 1) as f64).collect()
    }
}

/// One generated game at one step. Welfare columns are mapped onto `[ŵ₋, ŵ₊]`;
/// bound columns hold the welfare level each bound guarantees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub varied_measure: Measure,
    pub value: f64,
    pub game_index: usize,
    pub mean_principal_welfare_norm: f64,
    pub w_hat_star_norm: f64,
    pub w_hat_bullet_norm: f64,
    pub thm1_bound_norm: f64,
    pub prop4_bound_norm: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// `(step, game_index)` slots where no usable game was drawn.
    pub missing: Vec<(usize, usize)>,
}

struct Cell {
    mean_welfare: f64,
    star: f64,
    bullet: f64,
    thm1: f64,
    prop4: f64,
}

fn targets(config: &SweepConfig, value: f64) -> (f64, f64, f64, f64) {
    let f = config.fixed;
    match config.varied {
        Measure::Ia => (value, f, f, f),
        Measure::Ca => (f, value, f, f),
        Measure::Ic => (f, f, value, f),
        Measure::Cc => (f, f, f, value),
    }
}

fn evaluate(game: &DelegationGame, admissible: &[StrategyProfile], eps: &[f64], cc: f64, cfg: &NormalizationConfig) -> Result<Cell, Error> {
    let u = game.principal_utilities();
    let lm = welfare_landmarks(u)?;
    let mut total = 0.0;
    for s in admissible {
        total += welfare(u, game.space(), s)?;
    }
    let (thm1, _) = worst_admissible_bound(game, eps, cc, cfg)?;
    let prop4 = ideal_gap_bound(u, cfg)?;
    Ok(Cell {
        mean_welfare: lm.normalize(total / admissible.len() as f64),
        star: lm.normalize(lm.w_star),
        bullet: lm.normalize(lm.w_bullet),
        thm1: lm.normalize(lm.w_star - thm1),
        prop4: lm.normalize(lm.w_plus - prop4),
    })
}

fn run_cell(config: &SweepConfig, step: usize, game_index: usize, value: f64) -> Result<Option<Cell>, Error> {
    let (ia, ca, ic, cc) = targets(config, value);
    let eps = vec![1.0 - ic; config.strategy_counts.len()];
    let base = stream_seed(config.seed, step as u64, game_index as u64);
    for attempt in 0..config.max_attempts {
        let spec = GeneratorSpec {
            norm_cfg: config.norm_cfg.clone(),
            calibrated: config.calibrated,
            ..GeneratorSpec::new(config.strategy_counts.clone(), ia, ca, stream_seed(base, attempt as u64, 0))
        };
        let game = match generate(&spec) {
            Ok(g) => g.game,
            Err(Error::GenerationFailed { .. }) => continue,
            Err(e) => return Err(e),
        };
        let admissible = admissible_outcomes(&game, &eps, cc)?;
        if !admissible.is_empty() {
            return evaluate(&game, &admissible, &eps, cc, &config.norm_cfg).map(Some);
        }
    }
    Ok(None)
}

pub fn sweep(config: &SweepConfig) -> Result<SweepOutput, Error> {
    config.validate()?;
    let values = config.values();
    let slots: Vec<(usize, usize)> = (0..config.steps)
        .flat_map(|s| (0..config.games_per_step).map(move |g| (s, g)))
        .collect();
    let cells: Vec<Result<Option<Cell>, Error>> = slots
        .par_iter()
        .map(|&(s, g)| run_cell(config, s, g, values[s]))
        .collect();

    let mut rows = Vec::new();
    let mut missing = Vec::new();
    let mut cells = cells.into_iter();
    for (step, &value) in values.iter().enumerate() {
        let mut done = Vec::new();
        for g in 0..config.games_per_step {
            match cells.next().expect("one cell per slot")? {
                Some(cell) => done.push((g, cell)),
                None => missing.push((step, g)),
            }
        }
        let means: Vec<f64> = done.iter().map(|(_, c)| c.mean_welfare).collect();
        let (_, ci_lo, ci_hi) = mean_ci(&means);
        rows.extend(done.into_iter().map(|(game_index, c)| SweepRow {
            varied_measure: config.varied,
            value,
            game_index,
            mean_principal_welfare_norm: c.mean_welfare,
            w_hat_star_norm: c.star,
            w_hat_bullet_norm: c.bullet,
            thm1_bound_norm: c.thm1,
            prop4_bound_norm: c.prop4,
            ci_lo,
            ci_hi,
        }));
    }
    Ok(SweepOutput { rows, missing })
}

/// Mean of the welfare column at each step value, in step order.
pub fn step_means(rows: &[SweepRow]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some((v, total, n)) if *v == r.value => {
                *total += r.mean_principal_welfare_norm;
                *n += 1;
            }
            _ => out.push((r.value, r.mean_principal_welfare_norm, 1)),
        }
    }
    out.into_iter().map(|(v, t, n)| (v, t / n as f64)).collect()
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "varied_measure",
        "value",
        "game_index",
        "mean_principal_welfare_norm",
        "w_hat_star_norm",
        "w_hat_bullet_norm",
        "thm1_bound_norm",
        "prop4_bound_norm",
        "ci_lo",
        "ci_hi",
    ])?;
    for r in rows {
        w.write_record([
            r.varied_measure.to_string(),
            fmt_f64(r.value),
            r.game_index.to_string(),
            fmt_f64(r.mean_principal_welfare_norm),
            fmt_f64(r.w_hat_star_norm),
            fmt_f64(r.w_hat_bullet_norm),
            fmt_f64(r.thm1_bound_norm),
            fmt_f64(r.prop4_bound_norm),
            fmt_f64(r.ci_lo),
            fmt_f64(r.ci_hi),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
