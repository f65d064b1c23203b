//! The DFT witness matrices and their chains.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::chain::{ChainLink, ChainMode, ChainSpec};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::matrix::{DenseOperator, Matrix, SeqSpace};
use crate::nuclear::{canonical_rep_from_matrix, row_rep_from_matrix, NuclearRep, S2Rep};

use super::config::RepKind;

/// `A[j][l] = n^{-1/2} exp(2πi·j·l/n)` with `j, l = 1..n`, on `l_1^n`.
pub fn dft_matrix(n: usize) -> Result<DenseOperator> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("DFT dimension must be >= 2, got {n}")));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let entries = Matrix::from_fn(n, n, |j, l| {
        // reduce j·l mod n before the division to keep the phase exact
        let k = ((j + 1) * (l + 1)) % n;
        Complex64::from_polar(scale, 2.0 * PI * k as f64 / n as f64)
    });
    DenseOperator::new(entries, SeqSpace::l1(n), SeqSpace::l1(n))
}

fn rep_of(op: &DenseOperator, kind: RepKind) -> Result<NuclearRep> {
    match kind {
        RepKind::Column => canonical_rep_from_matrix(op),
        RepKind::Row => row_rep_from_matrix(op),
    }
}

/// The `m`-fold chain `A_n, …, A_n` with per-link exponents.
pub fn dft_chain(n: usize, mode: ChainMode, s: &[Exponent], r: &[Exponent], kind: RepKind) -> Result<ChainSpec> {
    let op = dft_matrix(n)?;
    let rep = rep_of(&op, kind)?;
    let links = match mode {
        ChainMode::Sr => s.iter().zip(r).map(|(&s, &r)| ChainLink::Sr { rep: rep.clone(), s, r }).collect(),
        ChainMode::S2 => {
            let rep = S2Rep::from_nuclear_rep(&rep)?;
            s.iter().map(|&s| ChainLink::S2 { rep: rep.clone(), s }).collect()
        }
    };
    ChainSpec::new(links)
}

/// Predicted log-log slope of one link's representation value.
pub fn link_value_slope(mode: ChainMode, kind: RepKind, s: Exponent) -> f64 {
    let inv = s.recip().to_f64();
    match (mode, kind) {
        (_, RepKind::Column) => 0.5 + inv,
        (ChainMode::S2, RepKind::Row) => inv,
        (ChainMode::Sr, RepKind::Row) => inv - 0.5,
    }
}
