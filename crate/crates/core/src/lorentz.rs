//! Decreasing rearrangements and Lorentz sequence quasinorms `‖·‖_{p,q}`.
//!
//! For a finite sequence with decreasing rearrangement `α*`,
//!
//! ```text
//! ‖α‖_{p,q} = (Σ_n α*_n^q · n^{q/p − 1})^{1/q}      (q < ∞)
//! ‖α‖_{p,∞} = max_n α*_n · n^{1/p}
//! ```
//!
//! `p = q` gives the plain `l_p` quasinorm. A finite `q` with `p = ∞` is
//! accepted and evaluated with weights `n^{-1}`; the diagonal splits of
//! `(1, r)`-nuclear representations produce exactly that index pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent pair `(p, q)` of a Lorentz space `l_{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzParams {
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub p: f64,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub q: f64,
}

impl LorentzParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let params = LorentzParams { p, q };
        params.validate()?;
        Ok(params)
    }

    /// The diagonal pair `(p, p)`.
    pub fn lp(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0) || !(self.q > 0.0) {
            return Err(Error::InvalidParams(format!(
                "Lorentz exponents must be positive, got (p, q) = ({}, {})",
                self.p, self.q
            )));
        }
        Ok(())
    }

    pub fn is_diagonal(&self) -> bool {
        self.p == self.q
    }
}

/// Moduli of a sequence sorted non-increasingly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangedSeq {
    pub values: Vec<f64>,
    pub original_length: usize,
}

impl RearrangedSeq {
    pub fn from_moduli(moduli: &[f64]) -> Self {
        let mut idx: Vec<usize> = (0..moduli.len()).collect();
        // stable: ties keep original index order
        idx.sort_by(|&a, &b| moduli[b].total_cmp(&moduli[a]));
        RearrangedSeq { values: idx.into_iter().map(|i| moduli[i].abs()).collect(), original_length: moduli.len() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn decreasing_rearrangement(seq: &[Complex64]) -> RearrangedSeq {
    let moduli: Vec<f64> = seq.iter().map(|z| z.norm()).collect();
    RearrangedSeq::from_moduli(&moduli)
}

pub fn lorentz_quasinorm(seq: &[Complex64], params: LorentzParams) -> Result<f64> {
    params.validate()?;
    Ok(quasinorm_of_sorted(&decreasing_rearrangement(seq).values, params))
}

/// Quasinorm of a sequence of nonnegative reals (rearranged internally).
pub fn lorentz_quasinorm_real(seq: &[f64], params: LorentzParams) -> Result<f64> {
    params.validate()?;
    Ok(quasinorm_of_sorted(&RearrangedSeq::from_moduli(seq).values, params))
}

/// Evaluates the quasinorm on values already sorted non-increasingly.
///
/// Entries are scaled by the leading value before powering so that small
/// `q` does not overflow.
pub fn quasinorm_of_sorted(sorted: &[f64], params: LorentzParams) -> f64 {
    let LorentzParams { p, q } = params;
    let top = sorted.first().copied().unwrap_or(0.0);
    if top == 0.0 || !top.is_finite() {
        return if top.is_finite() { 0.0 } else { top };
    }
    if q.is_infinite() {
        let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
        return sorted.iter().enumerate().map(|(i, &v)| v * ((i + 1) as f64).powf(inv_p)).fold(0.0, f64::max);
    }
    let weight_exp = if p.is_infinite() { -1.0 } else { q / p - 1.0 };
    let sum: f64 = sorted
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, &v)| (v / top).powf(q) * ((i + 1) as f64).powf(weight_exp))
        .sum();
    top * sum.powf(1.0 / q)
}
