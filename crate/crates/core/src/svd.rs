//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! Columns of a working copy of `A` are orthogonalized pairwise by complex
//! plane rotations accumulated into `V`, so that `A·V = G` with mutually
//! orthogonal columns. Then `σ_i = ‖g_i‖` and `u_i = g_i / σ_i`. Wide
//! matrices are handled through their adjoint.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, ONE, ZERO};

#[derive(Debug, Clone, Copy)]
pub struct SvdConfig {
    /// Columns count as orthogonal once `|g_i^* g_j| ≤ tol · ‖g_i‖‖g_j‖`.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for SvdConfig {
    fn default() -> Self {
        SvdConfig { tol: 1e-15, max_sweeps: 60 }
    }
}

/// Singular values (non-increasing) with optional thin factors
/// `A = U · diag(values) · V^*`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
    pub u: Option<Matrix>,
    pub v: Option<Matrix>,
}

impl SingularSpectrum {
    pub fn reconstruct(&self) -> Option<Matrix> {
        let (u, v) = (self.u.as_ref()?, self.v.as_ref()?);
        Some(u.scale_cols(&self.values).matmul(&v.adjoint()))
    }

    pub fn top(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `rel_tol · σ_1`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let top = self.top();
        if top == 0.0 {
            return 0;
        }
        self.values.iter().filter(|&&s| s > rel_tol * top).count()
    }
}

pub fn svd(m: &Matrix) -> Result<SingularSpectrum> {
    svd_with(m, SvdConfig::default(), true)
}

pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    Ok(svd_with(m, SvdConfig::default(), false)?.values)
}

pub fn svd_with(m: &Matrix, config: SvdConfig, factors: bool) -> Result<SingularSpectrum> {
    if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParams("svd input has non-finite entries".into()));
    }
    if m.rows() >= m.cols() {
        tall_svd(m, config, factors)
    } else {
        let t = tall_svd(&m.adjoint(), config, factors)?;
        Ok(SingularSpectrum { values: t.values, u: t.v, v: t.u })
    }
}

fn tall_svd(a: &Matrix, config: SvdConfig, factors: bool) -> Result<SingularSpectrum> {
    let (m, n) = (a.rows(), a.cols());
    let mut g: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = if factors {
        (0..n).map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect()).collect()
    } else {
        Vec::new()
    };

    // columns below this are rounding noise of a rank-deficient input
    let floor = {
        let fro = a.frobenius_norm();
        (f64::EPSILON * fro).powi(2)
    };
    let mut converged = n < 2;
    let mut last_off = 0.0;
    for _ in 0..config.max_sweeps {
        let mut rotated = false;
        last_off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha: f64 = g[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = g[j].iter().map(|z| z.norm_sqr()).sum();
                if alpha <= floor || beta <= floor {
                    continue;
                }
                let gamma: Complex64 = g[i].iter().zip(&g[j]).map(|(x, y)| x.conj() * y).sum();
                let gabs = gamma.norm();
                let rel = gabs / (alpha * beta).sqrt();
                last_off = f64::max(last_off, rel);
                if rel <= config.tol {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / gabs).conj();
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (gi, gj) = split_pair(&mut g, i, j);
                rotate(gi, gj, c, s, phase_conj);
                if factors {
                    let (vi, vj) = split_pair(&mut v, i, j);
                    rotate(vi, vj, c, s, phase_conj);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            routine: "one-sided Jacobi SVD",
            detail: format!(
                "{}x{} input still has relative column coupling {:e} after {} sweeps",
                m, n, last_off, config.max_sweeps
            ),
        });
    }

    let norms: Vec<f64> = g.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let values: Vec<f64> = order.iter().map(|&k| norms[k]).collect();

    if !factors {
        return Ok(SingularSpectrum { values, u: None, v: None });
    }

    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (pos, &k) in order.iter().enumerate() {
        let sigma = norms[k];
        if sigma > 0.0 && sigma > values[0] * 1e-300 {
            u_cols.push(g[k].iter().map(|z| z / sigma).collect());
        } else {
            u_cols.push(vec![ZERO; m]);
            missing.push(pos);
        }
    }
    for pos in missing {
        u_cols[pos] = orthogonal_completion(&u_cols, m);
    }
    let u = Matrix::from_fn(m, n, |i, j| u_cols[j][i]);
    let vm = Matrix::from_fn(n, n, |i, j| v[order[j]][i]);
    Ok(SingularSpectrum { values, u: Some(u), v: Some(vm) })
}

fn split_pair<T>(cols: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    debug_assert!(i < j);
    let (left, right) = cols.split_at_mut(j);
    (&mut left[i], &mut right[0])
}

fn rotate(x: &mut [Complex64], y: &mut [Complex64], c: f64, s: f64, phase_conj: Complex64) {
    for (xk, yk) in x.iter_mut().zip(y.iter_mut()) {
        let a = *xk;
        let b = phase_conj * *yk;
        *xk = a * c - b * s;
        *yk = a * s + b * c;
    }
}

/// A unit vector orthogonal to every nonzero column in `cols`.
fn orthogonal_completion(cols: &[Vec<Complex64>], m: usize) -> Vec<Complex64> {
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for k in 0..m {
        let mut w = vec![ZERO; m];
        w[k] = ONE;
        for _ in 0..2 {
            for c in cols.iter().filter(|c| c.iter().any(|z| *z != ZERO)) {
                let proj: Complex64 = c.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, ci) in w.iter_mut().zip(c) {
                    *wi -= proj * ci;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|(b, _)| norm > *b) {
            best = Some((norm, w));
        }
        if norm > 0.5 {
            break;
        }
    }
    let (norm, w) = best.expect("completion requested for a zero-dimensional space");
    w.into_iter().map(|z| z / norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_complex_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unitary_defect(q: &Matrix) -> f64 {
        q.adjoint().matmul(q).sub(&Matrix::identity(q.cols())).frobenius_norm()
    }

    #[test]
    fn diagonal_gives_sorted_moduli() {
        let s = svd(&Matrix::from_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(s.values.len(), 3);
        for (got, want) in s.values.iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn reconstruction_and_unitary_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(r, c) in &[(6, 4), (4, 6), (5, 5), (1, 3), (3, 1)] {
            let a = random_complex_matrix(&mut rng, r, c);
            let s = svd(&a).unwrap();
            assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
            assert!(s.reconstruct().unwrap().relative_error(&a) < 1e-12);
            assert!(unitary_defect(s.u.as_ref().unwrap()) < 1e-12);
            assert!(unitary_defect(s.v.as_ref().unwrap()) < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_gets_trailing_zeros_and_complete_basis() {
        let col = [1.0, 2.0, -1.0];
        let a = Matrix::from_fn(3, 3, |i, j| Complex64::new(col[i] * (j as f64 + 1.0), 0.0));
        let s = svd(&a).unwrap();
        assert!(s.values[1] < 1e-12 * s.values[0]);
        assert_eq!(s.numerical_rank(1e-10), 1);
        assert!(unitary_defect(s.u.as_ref().unwrap()) < 1e-12);
        assert!(s.reconstruct().unwrap().relative_error(&a) < 1e-12);
    }

    #[test]
    fn zero_and_empty_inputs() {
        let s = svd(&Matrix::zeros(3, 2)).unwrap();
        assert_eq!(s.values, vec![0.0, 0.0]);
        assert!(unitary_defect(s.u.as_ref().unwrap()) < 1e-14);
        assert!(svd(&Matrix::zeros(0, 4)).unwrap().values.is_empty());
    }

    #[test]
    fn non_finite_input_rejected() {
        let mut a = Matrix::identity(2);
        a[(0, 1)] = Complex64::new(f64::NAN, 0.0);
        assert!(svd(&a).is_err());
    }

    #[test]
    fn sweep_budget_exhaustion_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_complex_matrix(&mut rng, 8, 8);
        let cfg = SvdConfig { tol: 0.0, max_sweeps: 1 };
        match svd_with(&a, cfg, false) {
            Err(Error::NonConvergence { detail, .. }) => assert!(detail.contains("8x8")),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
