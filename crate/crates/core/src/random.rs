//! Seeded random draws for tests, suites and sweeps.
//!
//! Functionals and vectors are normalized Gaussian draws; coefficient lists
//! are sorted exponential draws.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::Result;
use crate::matrix::{dual_exponent, vector_norm, Matrix, SeqSpace};
use crate::norms::weak_l2_norm;
use crate::nuclear::{NuclearRep, S2Rep};

fn gaussian<R: Rng + ?Sized>(rng: &mut R, real: bool) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = if real { 0.0 } else { StandardNormal.sample(rng) };
    Complex64::new(re, im)
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_complex_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng, false))
}

pub fn random_real_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng, true))
}

/// Gaussian vector scaled to unit `p`-norm.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize, p: f64, real: bool) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng, real)).collect();
        let norm = vector_norm(&v, p);
        if norm > 0.0 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// `n` positive coefficients in non-increasing order.
pub fn random_coefficients<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut a: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    a.sort_by(|x: &f64, y| y.total_cmp(x));
    a
}

/// Representation with `terms` unit functionals on `source` and unit vectors in `target`.
pub fn random_nuclear_rep<R: Rng + ?Sized>(
    rng: &mut R,
    source: SeqSpace,
    target: SeqSpace,
    terms: usize,
    real: bool,
) -> NuclearRep {
    let dual = dual_exponent(source.p);
    let a = random_coefficients(rng, terms);
    let xprime = (0..terms).map(|_| random_unit_vector(rng, source.dim, dual, real)).collect();
    let y = (0..terms).map(|_| random_unit_vector(rng, target.dim, target.p, real)).collect();
    NuclearRep::new(source, target, a, xprime, y).expect("generated representation is valid")
}

/// Representation with unit functionals and a Gaussian vector family scaled to unit weak-l2 norm.
///
/// Fails with `Unsupported` where the weak-l2 norm of the target is not computed.
pub fn random_s2_rep<R: Rng + ?Sized>(
    rng: &mut R,
    source: SeqSpace,
    target: SeqSpace,
    terms: usize,
    real: bool,
) -> Result<S2Rep> {
    let dual = dual_exponent(source.p);
    let a = random_coefficients(rng, terms);
    let xprime = (0..terms).map(|_| random_unit_vector(rng, source.dim, dual, real)).collect();
    let y: Vec<Vec<Complex64>> = (0..terms).map(|_| random_unit_vector(rng, target.dim, 2.0, real)).collect();
    if terms == 0 {
        return S2Rep::new(source, target, a, xprime, y);
    }
    let w = weak_l2_norm(&y, target)?;
    let y = y.into_iter().map(|v| v.into_iter().map(|z| z / w).collect()).collect();
    S2Rep::new(source, target, a, xprime, y)
}
