//! Outcome of a single inequality check.

use serde::{Deserialize, Serialize};

/// Relative slack allowed on every checked inequality.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub anchor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    /// `lhs ≤ rhs·(1 + SLACK)`.
    pub fn le(name: impl Into<String>, anchor: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Verdict {
            name: name.into(),
            lhs,
            rhs,
            holds: lhs.is_finite() && rhs.is_finite() && lhs <= rhs * (1.0 + SLACK),
            anchor: anchor.into(),
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// `lhs / rhs`, with `0/0 = 0`.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Writes verdicts as CSV with columns `name, lhs, rhs, ratio, holds, anchor`.
pub fn write_verdicts_csv<W: std::io::Write>(verdicts: &[Verdict], out: W) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "lhs", "rhs", "ratio", "holds", "anchor"])?;
    for v in verdicts {
        w.write_record([
            v.name.clone(),
            format!("{:e}", v.lhs),
            format!("{:e}", v.rhs),
            format!("{:e}", v.ratio()),
            v.holds.to_string(),
            v.anchor.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
