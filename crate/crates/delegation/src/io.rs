//! Game JSON, observation JSON-lines, weight vectors and played-profile lists.

use std::fs;
use std::path::{Path, PathBuf};

use delegation_core::inference::{Observation, ObservationDataset};
use delegation_core::{DelegationGame, StrategyProfile, UtilityVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Json { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("{path}: {message}")]
    Content { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Game { path: PathBuf, source: delegation_core::Error },
}

/// On-disk form of a delegation game. Payoff arrays are flat, first player slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub players: usize,
    pub strategies: Vec<usize>,
    pub agent_payoffs: Vec<Vec<f64>>,
    pub principal_payoffs: Vec<Vec<f64>>,
}

impl From<&DelegationGame> for GameFile {
    fn from(game: &DelegationGame) -> Self {
        let flat = |u: &[UtilityVector]| u.iter().map(|v| v.values().to_vec()).collect();
        Self {
            players: game.players(),
            strategies: game.strategy_counts().to_vec(),
            agent_payoffs: flat(game.agent_utilities()),
            principal_payoffs: flat(game.principal_utilities()),
        }
    }
}

impl GameFile {
    pub fn into_game(self) -> Result<DelegationGame, delegation_core::Error> {
        if self.players != self.strategies.len() {
            return Err(delegation_core::Error::InvalidArgument(format!(
                "players = {} but {} strategy counts given",
                self.players,
                self.strategies.len()
            )));
        }
        let wrap = |v: Vec<Vec<f64>>| v.into_iter().map(UtilityVector).collect();
        DelegationGame::new(self.strategies, wrap(self.agent_payoffs), wrap(self.principal_payoffs))
    }
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.into(), source })
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str, line: usize) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|source| FormatError::Json { path: path.into(), line, source })
}

pub fn read_game(path: &Path) -> Result<DelegationGame, FormatError> {
    let file: GameFile = parse_json(path, &read(path)?, 0)?;
    file.into_game().map_err(|source| FormatError::Game { path: path.into(), source })
}

pub fn game_to_json(game: &DelegationGame) -> String {
    serde_json::to_string_pretty(&GameFile::from(game)).expect("game files always serialize")
}

/// A JSON array of guide-distribution weights.
pub fn read_weights(path: &Path) -> Result<Vec<f64>, FormatError> {
    parse_json(path, &read(path)?, 0)
}

fn jsonl_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PlayedLine {
    Bare(Vec<usize>),
    Tagged { profile: Vec<usize> },
}

/// Played profiles, one per line, either as a bare array or an object with a `profile` key.
pub fn read_profiles(path: &Path) -> Result<Vec<StrategyProfile>, FormatError> {
    let text = read(path)?;
    jsonl_lines(&text)
        .map(|(line, l)| {
            let p: PlayedLine = parse_json(path, l, line)?;
            Ok(StrategyProfile(match p {
                PlayedLine::Bare(v) | PlayedLine::Tagged { profile: v } => v,
            }))
        })
        .collect()
}

/// The strategy space an observation file refers to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    #[serde(default)]
    pub players: Option<usize>,
    pub strategies: Vec<usize>,
}

pub fn read_header(path: &Path) -> Result<DatasetHeader, FormatError> {
    let header: DatasetHeader = parse_json(path, &read(path)?, 0)?;
    if header.players.is_some_and(|n| n != header.strategies.len()) {
        return Err(FormatError::Content {
            path: path.into(),
            message: "players disagrees with the strategy counts".into(),
        });
    }
    Ok(header)
}

pub fn read_observations(path: &Path, strategies: &[usize]) -> Result<ObservationDataset, FormatError> {
    let text = read(path)?;
    let observations = jsonl_lines(&text)
        .map(|(line, l)| parse_json::<Observation>(path, l, line))
        .collect::<Result<Vec<_>, _>>()?;
    ObservationDataset::new(strategies.to_vec(), observations)
        .map_err(|source| FormatError::Game { path: path.into(), source })
}

pub fn observations_to_jsonl(data: &ObservationDataset) -> String {
    let mut out = String::new();
    for o in data.observations() {
        out.push_str(&serde_json::to_string(o).expect("observations always serialize"));
        out.push('\n');
    }
    out
}
