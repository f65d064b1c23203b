//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain::{ChainMode, ChainSpec};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}`, expected json or csv")),
        }
    }
}

/// Representation used for the links of the DFT chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    Column,
    Row,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    /// Sweep dimensions.
    pub dims: Vec<usize>,
    /// Chain length.
    pub m: usize,
    pub mode: ChainMode,
    /// Per-link `s_k`; a single entry is repeated. Empty means drawn from the default grid (suite only).
    pub s: Vec<Exponent>,
    /// Per-link `r_k` for SR chains, same conventions as `s`.
    pub r: Vec<Exponent>,
    pub t_grid: Vec<Exponent>,
    pub seed: u64,
    /// Number of random chains in a suite.
    pub count: usize,
    /// Largest space dimension drawn by the suite.
    pub max_dim: usize,
    /// Largest number of representation terms drawn by the suite.
    pub max_terms: usize,
    /// Admissibility slack of the splits.
    pub eps: f64,
    /// Fraction of suite chains with `X_1 = X_(m+1)`.
    pub square_fraction: f64,
    pub format: Format,
    /// Not echoed into outputs, so runs differing only in destination stay byte-identical.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    /// Explicit chain for `factorize` and `spectrum`.
    pub chain: Option<ChainSpec>,
    /// Explicit square matrix for `spectrum`.
    pub matrix: Option<Matrix>,
    /// Rerun a single suite chain from its replay seed.
    pub replay: Option<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            dims: vec![8, 16, 32, 64, 128],
            m: 2,
            mode: ChainMode::S2,
            s: vec![],
            r: vec![],
            t_grid: vec![Exponent::ratio(1, 2)],
            seed: 0,
            count: 100,
            max_dim: 10,
            max_terms: 8,
            eps: 0.0,
            square_fraction: 0.5,
            format: Format::Json,
            out: None,
            chain: None,
            matrix: None,
            replay: None,
        }
    }
}

fn broadcast(v: &[Exponent], m: usize, what: &str) -> Result<Vec<Exponent>> {
    match v.len() {
        1 => Ok(vec![v[0]; m]),
        n if n == m => Ok(v.to_vec()),
        n => Err(Error::InvalidParams(format!("{what} has {n} entries, chain length is {m}"))),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParams("chain length m must be at least 1".into()));
        }
        if let Some(&n) = self.dims.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidParams(format!("dimensions must be >= 2, got {n}")));
        }
        if self.max_dim == 0 || self.max_terms == 0 {
            return Err(Error::InvalidParams("max_dim and max_terms must be positive".into()));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParams(format!("eps must be finite and >= 0, got {}", self.eps)));
        }
        if !(0.0..=1.0).contains(&self.square_fraction) {
            return Err(Error::InvalidParams(format!(
                "square_fraction must lie in [0, 1], got {}",
                self.square_fraction
            )));
        }
        if self.t_grid.iter().any(|t| t.is_infinite()) {
            return Err(Error::InvalidParams("t grid entries must be finite".into()));
        }
        for (s, r) in self.s_list()?.into_iter().zip(self.r_list()?) {
            match self.mode {
                ChainMode::Sr => {
                    let (s, r) = (s.value(), r.value());
                    if !(r <= s && s <= 1.0) {
                        return Err(Error::Regime(format!("SR links need 0 < r <= s <= 1, got ({s}, {r})")));
                    }
                }
                ChainMode::S2 => {
                    if s.value() > 2.0 {
                        return Err(Error::Regime(format!("S2 links need 0 < s <= 2, got {s}")));
                    }
                }
            }
        }
        if let Some(chain) = &self.chain {
            chain.validate()?;
        }
        if let Some(m) = &self.matrix {
            if !m.is_square() {
                return Err(Error::InvalidParams(format!("matrix must be square, got {}x{}", m.rows(), m.cols())));
            }
        }
        Ok(())
    }

    /// Per-link `s_k`, or empty when they are to be drawn at random.
    pub fn s_list(&self) -> Result<Vec<Exponent>> {
        if self.s.is_empty() {
            return Ok(vec![]);
        }
        broadcast(&self.s, self.m, "s")
    }

    /// Per-link `r_k`; defaults to `s_k` when `r` is empty.
    pub fn r_list(&self) -> Result<Vec<Exponent>> {
        if self.r.is_empty() || self.mode == ChainMode::S2 {
            return self.s_list();
        }
        if self.s.is_empty() {
            return Err(Error::InvalidParams("r given without s".into()));
        }
        broadcast(&self.r, self.m, "r")
    }

    /// `s_k`, with `1` filled in when none are given (sweeps).
    pub fn s_or_ones(&self) -> Result<Vec<Exponent>> {
        let s = self.s_list()?;
        Ok(if s.is_empty() { vec![Exponent::int(1); self.m] } else { s })
    }

    pub fn r_or_s(&self) -> Result<Vec<Exponent>> {
        let r = self.r_list()?;
        Ok(if r.is_empty() { self.s_or_ones()? } else { r })
    }
}
