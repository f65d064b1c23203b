//! Schatten–Lorentz quasinorms, Hölder composition, Weyl checks and the
//! finite-rank index downgrade.

use serde::{Deserialize, Serialize};

use crate::eigen::significant_eigenvalues;
use crate::error::{Error, Result};
use crate::lorentz::{lorentz_quasinorm, quasinorm_of_sorted, LorentzParams};
use crate::matrix::Matrix;
use crate::svd::singular_values;
use crate::verdict::Verdict;

pub type SchattenParams = LorentzParams;

/// Singular values below this fraction of `μ_1` are rounding noise and count as zero.
pub const SINGULAR_ZERO_REL: f64 = 1e-12;

/// Singular values of `m`, non-increasing, with the noise floor zeroed.
pub fn significant_singular_values(m: &Matrix) -> Result<Vec<f64>> {
    let mut mu = singular_values(m)?;
    let floor = SINGULAR_ZERO_REL * mu.first().copied().unwrap_or(0.0);
    for v in mu.iter_mut() {
        if *v <= floor {
            *v = 0.0;
        }
    }
    Ok(mu)
}

/// `σ_{p,q}(M) = ‖(μ_n(M))‖_{p,q}`.
pub fn schatten_lorentz_quasinorm(m: &Matrix, params: SchattenParams) -> Result<f64> {
    params.validate()?;
    Ok(quasinorm_of_sorted(&significant_singular_values(m)?, params))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderComposition {
    pub left: SchattenParams,
    pub right: SchattenParams,
    pub result: SchattenParams,
    pub constant: f64,
}

fn recip(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

fn from_recip(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}

/// `S_{left} ∘ S_{right} ⊂ S_{result}` with `σ(UV) ≤ constant·σ(U)·σ(V)`.
pub fn holder_compose(left: SchattenParams, right: SchattenParams) -> Result<HolderComposition> {
    left.validate()?;
    right.validate()?;
    let result =
        LorentzParams::new(from_recip(recip(left.p) + recip(right.p)), from_recip(recip(left.q) + recip(right.q)))?;
    let constant = if left.is_diagonal() && right.is_diagonal() { 1.0 } else { 2f64.powf(recip(result.p)) };
    Ok(HolderComposition { left, right, result, constant })
}

/// `‖λ(M)‖_{p,q} ≤ σ_{p,q}(M)` for `q ≤ p`.
pub fn weyl_check(m: &Matrix, params: SchattenParams) -> Result<Verdict> {
    params.validate()?;
    if params.q > params.p {
        return Err(Error::Regime(format!("Weyl check needs q <= p, got ({}, {})", params.p, params.q)));
    }
    let lhs = lorentz_quasinorm(&significant_eigenvalues(m)?, params)?;
    let rhs = schatten_lorentz_quasinorm(m, params)?;
    Ok(Verdict::le("weyl", "Weyl inequality", lhs, rhs))
}

/// `‖μ‖_{p,t} ≤ n^{1/t − 1/q}·‖μ‖_{p,q}` for a non-increasing sequence with at most `n` nonzero terms.
pub fn downgrade_check_values(mu: &[f64], p: f64, q: f64, t: f64, n: usize) -> Result<Verdict> {
    if !(t > 0.0 && t <= q && q <= p) {
        return Err(Error::Regime(format!("downgrade needs 0 < t <= q <= p, got t={t}, q={q}, p={p}")));
    }
    let rank = mu.iter().filter(|&&v| v > 0.0).count();
    if rank > n {
        return Err(Error::RankPrecondition { rank, bound: n });
    }
    let lhs = quasinorm_of_sorted(mu, LorentzParams::new(p, t)?);
    let factor = (n as f64).powf(recip(t) - recip(q));
    let rhs = factor * quasinorm_of_sorted(mu, LorentzParams::new(p, q)?);
    Ok(Verdict::le("finite-rank downgrade", "corollary 1", lhs, rhs))
}

/// `σ_{p,t}(M) ≤ N^{1/t − 1/q}·σ_{p,q}(M)` when `rank M ≤ N`.
pub fn finite_rank_downgrade_check(m: &Matrix, p: f64, q: f64, t: f64, n: usize) -> Result<Verdict> {
    let mu: Vec<f64> = {
        let mut mu = singular_values(m)?;
        let floor = 1e-10 * mu.first().copied().unwrap_or(0.0);
        mu.iter_mut().filter(|v| **v <= floor).for_each(|v| *v = 0.0);
        mu
    };
    downgrade_check_values(&mu, p, q, t, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_complex_matrix;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lp(p: f64, q: f64) -> LorentzParams {
        LorentzParams::new(p, q).unwrap()
    }

    #[test]
    fn identity_and_rank_one() {
        let v = schatten_lorentz_quasinorm(&Matrix::identity(5), lp(2.0, 2.0)).unwrap();
        assert!((v - 5f64.sqrt()).abs() < 1e-12);
        let x = [1.0, -2.0, 0.5];
        let rank1 = Matrix::from_fn(3, 3, |i, j| Complex64::new(x[i] * x[j], 0.0));
        let c = x.iter().map(|t| t * t).sum::<f64>();
        for params in [lp(1.0, 1.0), lp(0.5, 0.25), lp(2.0, f64::INFINITY)] {
            let v = schatten_lorentz_quasinorm(&rank1, params).unwrap();
            assert!((v - c).abs() < 1e-12 * c);
        }
    }

    #[test]
    fn weak_trace_of_geometric_diagonal() {
        let v = schatten_lorentz_quasinorm(&Matrix::from_diag(&[1.0, 0.5, 0.25]), lp(1.0, f64::INFINITY)).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn holder_exponents_and_constants() {
        let h = holder_compose(lp(2.0, 2.0), lp(2.0, 2.0)).unwrap();
        assert_eq!(h.result, lp(1.0, 1.0));
        assert_eq!(h.constant, 1.0);
        let h = holder_compose(lp(3.0, f64::INFINITY), lp(3.0, f64::INFINITY)).unwrap();
        assert!((h.result.p - 1.5).abs() < 1e-15);
        assert!(h.result.q.is_infinite());
        assert!((h.constant - 2f64.powf(2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn holder_numeric_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let grid = [lp(1.0, 1.0), lp(2.0, 1.0), lp(1.0, 0.5), lp(2.0, 2.0), lp(0.5, 0.5)];
        for k in 0..60 {
            let u = random_complex_matrix(&mut rng, 8, 8);
            let v = random_complex_matrix(&mut rng, 8, 8);
            let (l, r) = (grid[k % grid.len()], grid[(k / grid.len()) % grid.len()]);
            let h = holder_compose(l, r).unwrap();
            let lhs = schatten_lorentz_quasinorm(&u.matmul(&v), h.result).unwrap();
            let rhs =
                h.constant * schatten_lorentz_quasinorm(&u, l).unwrap() * schatten_lorentz_quasinorm(&v, r).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-9), "{l:?} {r:?}");
        }
    }

    #[test]
    fn weyl_is_equality_for_normal_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let q = crate::svd::svd(&random_complex_matrix(&mut rng, 6, 6)).unwrap().u.unwrap();
        let d: Vec<Complex64> = (0..6).map(|k| Complex64::new(k as f64 - 2.5, 0.3 * k as f64)).collect();
        let m = q.matmul(&Matrix::from_diag_complex(&d)).matmul(&q.adjoint());
        let v = weyl_check(&m, lp(1.0, 0.5)).unwrap();
        assert!(v.holds);
        assert!((v.lhs - v.rhs).abs() < 1e-9 * v.rhs);
    }

    #[test]
    fn weyl_on_jordan_block_and_regime() {
        let j =
            Matrix::from_fn(5, 5, |i, k| if k == i + 1 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        let v = weyl_check(&j, lp(1.0, 1.0)).unwrap();
        assert_eq!(v.lhs, 0.0);
        assert!(v.holds);
        assert!(matches!(weyl_check(&j, lp(1.0, 2.0)), Err(Error::Regime(_))));
    }

    #[test]
    fn downgrade_examples() {
        let ones = vec![1.0; 10];
        let v = downgrade_check_values(&ones, 1.0, 1.0, 1.0, 10).unwrap();
        assert_eq!(v.lhs, v.rhs);
        let v = downgrade_check_values(&ones, 1.0, 1.0, 0.5, 10).unwrap();
        assert!(v.holds);
        assert!((v.rhs - 100.0).abs() < 1e-9);
        assert!(matches!(
            downgrade_check_values(&ones, 1.0, 1.0, 0.5, 5),
            Err(Error::RankPrecondition { rank: 10, bound: 5 })
        ));
        assert!(downgrade_check_values(&ones, 1.0, 0.5, 1.0, 10).is_err());
    }

    #[test]
    fn matrix_downgrade_uses_rank() {
        let m = Matrix::from_diag(&[2.0, 1.0, 0.0, 0.0]);
        let v = finite_rank_downgrade_check(&m, 1.0, 1.0, 0.5, 2).unwrap();
        assert!(v.holds);
    }
}
