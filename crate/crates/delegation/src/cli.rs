//! The `delegation` command line.
//!
//! Exit status is 0 on success, 1 on a usage error and 2 when input data or
//! preconditions are rejected.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use delegation_core::constructions::make_worked_example;
use delegation_core::equilibria::pure_eps_nash;
use delegation_core::generator::{generate, GeneratorSpec};
use delegation_core::inference::{estimate_alignment, estimate_cc_upper, estimate_ic_upper};
use delegation_core::measures::{calibration_ratios, collective_capability, welfare_proxy, NormalizedGame};
use delegation_core::{NormKind, NormalizationConfig, ShiftKind};
use serde_json::json;

use crate::evaluation::{mae_curve, write_mae_csv, MaeConfig};
use crate::io::{game_to_json, read_game, read_header, read_observations, read_profiles, read_weights};
use crate::report::analyze;
use crate::sweep::{sweep, write_sweep_csv, Measure, SweepConfig};

pub const SEED_ENV: &str = "DELEGATION_SEED";

#[derive(Debug, Parser)]
#[command(name = "delegation", version, about = "Alignment and capability measures for delegation games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measures and regret bounds for a game and its observed plays.
    Analyze(AnalyzeArgs),
    /// Write a random game with the requested alignment.
    Generate(GenerateArgs),
    /// Vary one measure and record principal welfare as CSV.
    Sweep(SweepArgs),
    /// Estimate measures from an observation file.
    Infer(InferArgs),
    /// Estimator error against dataset size, as CSV.
    InferEval(InferEvalArgs),
    /// Walk through the two-vehicle worked example.
    Demo,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormChoice {
    L2,
    Linf,
    Wl2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ShiftChoice {
    Mean,
    Midrange,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long, value_enum, default_value = "l2")]
    pub norm: NormChoice,
    #[arg(long, value_enum, default_value = "mean")]
    pub shift: ShiftChoice,
    /// JSON array of outcome weights for `wl2`; uniform when omitted.
    #[arg(long)]
    pub weights: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub game: PathBuf,
    #[command(flatten)]
    pub norm: NormArgs,
    /// Played profiles, one JSON array per line. Defaults to the pure Nash equilibria.
    #[arg(long)]
    pub played: Option<PathBuf>,
    /// Payoff perturbation for the robustness gap.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub ia: f64,
    #[arg(long)]
    pub ca: f64,
    #[arg(long, default_value_t = 2)]
    pub players: usize,
    /// One count for every player, or one per player separated by commas.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub strategies: Vec<usize>,
    #[arg(long)]
    pub calibrated: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub vary: Measure,
    #[arg(long, default_value_t = 0.9)]
    pub fixed: f64,
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    #[arg(long, default_value_t = 25)]
    pub games: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "2,5")]
    pub strategies: Vec<usize>,
    #[arg(long)]
    pub calibrated: bool,
    #[command(flatten)]
    pub norm: NormArgs,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    /// Observations as JSON lines.
    pub data: PathBuf,
    /// JSON object with the `strategies` of the game observed.
    #[arg(long)]
    pub header: PathBuf,
    #[command(flatten)]
    pub norm: NormArgs,
}

#[derive(Debug, Args)]
pub struct InferEvalArgs {
    #[arg(long, default_value_t = 100)]
    pub games: usize,
    #[arg(long, value_delimiter = ',', default_value = "10,30,100,300,1000")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probability that an observation is of joint play.
    #[arg(long, default_value_t = 0.5)]
    pub mix: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

type Failure = Box<dyn std::error::Error>;

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let seed_override = match std::env::var(SEED_ENV) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(s) => Some(s),
            Err(_) => {
                let _ = writeln!(err, "error: {SEED_ENV} must be an unsigned integer, got {v:?}");
                return 1;
            }
        },
        Err(_) => None,
    };
    match dispatch(cli.command, seed_override, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(command: Command, seed_override: Option<u64>, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Analyze(a) => {
            let game = read_game(&a.game)?;
            let cfg = norm_config(&a.norm, game.outcome_count())?;
            let played = match &a.played {
                Some(p) => read_profiles(p)?,
                None => Vec::new(),
            };
            let analysis = analyze(&game, &played, &cfg, a.delta)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&analysis)?)?;
        }
        Command::Generate(a) => {
            let counts = expand_counts(&a.strategies, a.players)?;
            let spec = GeneratorSpec {
                calibrated: a.calibrated,
                ..GeneratorSpec::new(counts, a.ia, a.ca, seed_override.unwrap_or(a.seed))
            };
            let generated = generate(&spec)?;
            for w in &generated.warnings {
                writeln!(err, "warning: {}", serde_json::to_string(w)?)?;
            }
            writeln!(out, "{}", game_to_json(&generated.game))?;
        }
        Command::Sweep(a) => {
            let outcomes = a.strategies.iter().product();
            let config = SweepConfig {
                steps: a.steps,
                games_per_step: a.games,
                strategy_counts: a.strategies.clone(),
                norm_cfg: norm_config(&a.norm, outcomes)?,
                calibrated: a.calibrated,
                ..SweepConfig::new(a.vary, a.fixed, seed_override.unwrap_or(a.seed))
            };
            let result = sweep(&config)?;
            if !result.missing.is_empty() {
                writeln!(err, "warning: {} slot(s) missing: {:?}", result.missing.len(), result.missing)?;
            }
            emit_csv(a.out.as_ref(), out, |w| write_sweep_csv(&result.rows, w))?;
        }
        Command::Infer(a) => {
            let header = read_header(&a.header)?;
            let data = read_observations(&a.data, &header.strategies)?;
            let outcomes = header.strategies.iter().product();
            let cfg = norm_config(&a.norm, outcomes)?;
            let failed = |e: delegation_core::Error| json!({ "error": e.to_string() });
            let alignment = estimate_alignment(&data, &cfg).map_or_else(failed, |v| json!(v));
            let cc_upper = estimate_cc_upper(&data).map_or_else(failed, |v| json!(v));
            let ic = estimate_ic_upper(&data)?;
            let report = json!({
                "observations": data.len(),
                "alignment": alignment,
                "cc_upper": cc_upper,
                "ic_upper": ic.upper,
                "low_coverage": ic.low_coverage,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        Command::InferEval(a) => {
            let config = MaeConfig {
                games: a.games,
                sample_sizes: a.sizes.clone(),
                mode_mix: a.mix,
                seed: seed_override.unwrap_or(a.seed),
                ..Default::default()
            };
            let report = mae_curve(&config)?;
            if !report.skipped_games.is_empty() {
                writeln!(err, "warning: skipped games {:?}", report.skipped_games)?;
            }
            emit_csv(a.out.as_ref(), out, |w| write_mae_csv(&report.rows, w))?;
        }
        Command::Demo => demo(out)?,
    }
    Ok(())
}

fn norm_config(args: &NormArgs, outcome_count: usize) -> Result<NormalizationConfig, Failure> {
    let shift = match args.shift {
        ShiftChoice::Mean => ShiftKind::Mean,
        ShiftChoice::Midrange => ShiftKind::Midrange,
    };
    let (norm, weights) = match args.norm {
        NormChoice::L2 => (NormKind::L2, None),
        NormChoice::Linf => (NormKind::Linf, None),
        NormChoice::Wl2 => {
            let w = match &args.weights {
                Some(p) => read_weights(p)?,
                None => vec![1.0 / outcome_count as f64; outcome_count],
            };
            (NormKind::WeightedL2, Some(w))
        }
    };
    if args.weights.is_some() && !matches!(args.norm, NormChoice::Wl2) {
        return Err("--weights only applies to --norm wl2".into());
    }
    let cfg = NormalizationConfig::new(shift, norm, weights)?;
    if let Some(w) = &cfg.weights {
        if w.len() != outcome_count {
            return Err(format!("{} weights given for {outcome_count} outcomes", w.len()).into());
        }
    }
    Ok(cfg)
}

fn expand_counts(strategies: &[usize], players: usize) -> Result<Vec<usize>, Failure> {
    match strategies.len() {
        1 => Ok(vec![strategies[0]; players]),
        n if n == players => Ok(strategies.to_vec()),
        n => Err(format!("{n} strategy counts given for {players} players").into()),
    }
}

fn emit_csv<F>(path: Option<&PathBuf>, out: &mut dyn Write, write: F) -> Result<(), Failure>
where
    F: FnOnce(&mut Vec<u8>) -> Result<(), csv::Error>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    match path {
        Some(p) => fs::write(p, buf).map_err(|e| format!("cannot write {}: {e}", p.display()))?,
        None => out.write_all(&buf)?,
    }
    Ok(())
}

/// `x` as a fraction with denominator at most 100 when one matches, else a decimal.
pub fn fraction(x: f64) -> String {
    for q in 1..=100i64 {
        let p = (x * q as f64).round();
        if (x * q as f64 - p).abs() < 1e-9 {
            let p = p as i64;
            return if q == 1 { format!("{p}") } else { format!("{p}/{q}") };
        }
    }
    format!("{x:.6}")
}

fn tuple(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| fraction(*x)).collect();
    format!("({})", parts.join(", "))
}

fn demo(out: &mut dyn Write) -> Result<(), Failure> {
    let game = make_worked_example();
    let cfg = NormalizationConfig::linf_midrange();
    let labels = ["(A,A)", "(A,B)", "(B,A)", "(B,B)"];
    writeln!(out, "Worked example: two vehicles, roads A and B, l-infinity norm with midrange shift")?;
    writeln!(out, "outcomes {}", labels.join(" "))?;
    for (side, utils) in [("agent", game.agent_utilities()), ("principal", game.principal_utilities())] {
        for (i, u) in utils.iter().enumerate() {
            writeln!(out, "  {side} {} payoffs {}", i + 1, tuple(u))?;
        }
    }

    let normalized = NormalizedGame::new(&game, &cfg)?;
    writeln!(out, "\nNormalized utilities")?;
    for (i, (a, p)) in normalized.agents.iter().zip(&normalized.principals).enumerate() {
        writeln!(out, "  agent {}     uν = {}", i + 1, tuple(&a.direction))?;
        writeln!(out, "  principal {} uν = {}", i + 1, tuple(&p.direction))?;
    }
    writeln!(out, "m = {}", tuple(&normalized.agent_magnitudes()))?;
    writeln!(out, "m̂ = {}", tuple(&normalized.principal_magnitudes()))?;
    writeln!(out, "μʷ = {}", tuple(&welfare_proxy(game.agent_utilities(), &cfg)?))?;

    let ne = pure_eps_nash(&game, &[0.0, 0.0])?;
    let eps = [0.1, 0.3];
    let cc = collective_capability(&game, 3.5, &eps)?;
    let calibration = calibration_ratios(&game, &cfg)?;
    let analysis = analyze(&game, &[], &cfg, None)?;
    let m = &analysis.measures;

    writeln!(out, "\nMeasures")?;
    writeln!(out, "IA = {}", tuple(&m.ia))?;
    writeln!(out, "CA = {}", fraction(m.ca_agents))?;
    writeln!(out, "CA (principals) = {}", fraction(m.ca_principals))?;
    writeln!(out, "r = {}, r* = {}", tuple(&calibration.ratios), fraction(calibration.r_star))?;
    let ne_labels: Vec<&str> = ne.indices.iter().map(|&i| labels[i]).collect();
    writeln!(out, "pure Nash equilibria: {}", ne_labels.join(" "))?;
    writeln!(out, "CC at eps = {} with achieved welfare 7/2: {}", tuple(&eps), fraction(cc))?;

    let lm = &m.landmarks;
    writeln!(
        out,
        "\nAgent welfare:     w⋆ = {}, w₊ = {}, w• = {}, w₋ = {}",
        fraction(lm.agents.w_star),
        fraction(lm.agents.w_plus),
        fraction(lm.agents.w_bullet),
        fraction(lm.agents.w_minus)
    )?;
    writeln!(
        out,
        "Principal welfare: ŵ⋆ = {}, ŵ₊ = {}, ŵ• = {}, ŵ₋ = {}",
        fraction(lm.principals.w_star),
        fraction(lm.principals.w_plus),
        fraction(lm.principals.w_bullet),
        fraction(lm.principals.w_minus)
    )?;

    let b = &analysis.bounds;
    writeln!(out, "\nAt the equilibrium (A,A)")?;
    writeln!(out, "principal regret = {}", fraction(b.principal_regret))?;
    writeln!(out, "alignment bound = {}", fraction(b.alignment_bound))?;
    writeln!(out, "capabilities bound = {} (exact remainder {})", fraction(b.capabilities_bound_exact), fraction(b.remainder_exact))?;
    writeln!(out, "capabilities bound with bounded remainder = {}", fraction(b.capabilities_bound))?;
    writeln!(out, "ideal gap ŵ₊ - ŵ⋆ = {} <= {}", fraction(lm.principals.w_plus - lm.principals.w_star), fraction(b.ideal_gap_bound))?;
    Ok(())
}
