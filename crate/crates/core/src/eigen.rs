//! Eigenvalues of dense complex matrices.
//!
//! Householder reduction to upper Hessenberg form, then single-shift
//! complex QR iteration (Wilkinson shifts, an exceptional shift every tenth
//! iteration on a stalled window) with deflation of negligible subdiagonal
//! entries. Only eigenvalues are produced; the transformations are not
//! accumulated.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, ZERO};

#[derive(Debug, Clone, Copy)]
pub struct EigenConfig {
    /// A subdiagonal entry is negligible once it falls below `tol` times the
    /// moduli of its two diagonal neighbours.
    pub tol: f64,
    /// QR iterations allowed per deflated eigenvalue.
    pub max_iter_per_eigenvalue: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig { tol: 1e-12, max_iter_per_eigenvalue: 60 }
    }
}

/// Eigenvalues with algebraic multiplicity, ordered by [`sort_eigenvalues`].
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Complex64>> {
    eigenvalues_with(m, EigenConfig::default())
}

pub fn eigenvalues_with(m: &Matrix, config: EigenConfig) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Misuse(format!("eigenvalues need a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParams("eigenvalue input has non-finite entries".into()));
    }
    let mut h = m.clone();
    hessenberg_in_place(&mut h);
    let mut lambdas = hessenberg_qr(&mut h, config)?;
    sort_eigenvalues(&mut lambdas);
    Ok(lambdas)
}

/// Orders by non-increasing modulus; moduli equal up to a relative `1e-9`
/// form a tie group ordered by decreasing real, then decreasing imaginary part.
pub fn sort_eigenvalues(lambdas: &mut [Complex64]) {
    lambdas.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let mut start = 0;
    while start < lambdas.len() {
        let lead = lambdas[start].norm();
        let mut end = start + 1;
        while end < lambdas.len() && lead - lambdas[end].norm() <= 1e-9 * lead.max(1e-300) {
            end += 1;
        }
        lambdas[start..end].sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        start = end;
    }
}

/// Relative size below which an eigenvalue is treated as zero in quasinorms.
pub const EIGEN_ZERO_REL: f64 = 1e-11;

/// Eigenvalues of `m` with those of modulus `≤ EIGEN_ZERO_REL·‖m‖_F` set to zero.
///
/// Zero eigenvalues of defective matrices come back as clusters of size
/// `~ε^{1/k}`; at small exponents such noise would dominate a quasinorm.
pub fn significant_eigenvalues(m: &Matrix) -> Result<Vec<Complex64>> {
    let floor = EIGEN_ZERO_REL * m.frobenius_norm();
    let mut lambdas = eigenvalues(m)?;
    for z in lambdas.iter_mut() {
        if z.norm() <= floor {
            *z = ZERO;
        }
    }
    sort_eigenvalues(&mut lambdas);
    Ok(lambdas)
}

/// Reduces `h` to upper Hessenberg form by unitary similarity.
pub fn hessenberg_in_place(h: &mut Matrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0] == ZERO { Complex64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2vv*) H
        for j in k..n {
            let s: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= 2.0 * vi * s;
            }
        }
        // H <- H (I - 2vv*)
        for i in 0..n {
            let s: Complex64 = v.iter().enumerate().map(|(l, vl)| h[(i, k + 1 + l)] * vl).sum();
            for (l, vl) in v.iter().enumerate() {
                h[(i, k + 1 + l)] -= 2.0 * s * vl.conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Complex Givens rotation `(c, s)` with `[c s; -s̄ c]·[a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let (an, bn) = (a.norm(), b.norm());
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

fn two_by_two_eigs(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    let e1 = half_tr + disc;
    let e2 = half_tr - disc;
    // recompute the smaller root from the determinant to avoid cancellation
    let det = a * d - b * c;
    if e1.norm() >= e2.norm() {
        if e1 != ZERO {
            (e1, det / e1)
        } else {
            (e1, e2)
        }
    } else if e2 != ZERO {
        (det / e2, e2)
    } else {
        (e1, e2)
    }
}

fn hessenberg_qr(h: &mut Matrix, config: EigenConfig) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let scale = h.frobenius_norm();
    let floor = 4.0 * f64::EPSILON * scale;
    let mut hi = n - 1;
    let mut iter = 0usize;
    loop {
        if hi == 0 {
            out.push(h[(0, 0)]);
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= config.tol * diag || sub <= floor {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        if lo + 1 == hi {
            let (e1, e2) = two_by_two_eigs(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            out.push(e1);
            out.push(e2);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            iter = 0;
            continue;
        }

        iter += 1;
        if iter > config.max_iter_per_eigenvalue {
            return Err(Error::NonConvergence {
                routine: "Hessenberg QR",
                detail: format!(
                    "deflation window [{lo}, {hi}] of a {n}x{n} matrix stalled after {} iterations \
                     (last subdiagonal modulus {:e})",
                    config.max_iter_per_eigenvalue,
                    h[(hi, hi - 1)].norm()
                ),
            });
        }

        let shift = if iter % 10 == 0 {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let (a, b, c, d) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
            let (e1, e2) = two_by_two_eigs(a, b, c, d);
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        qr_step(h, lo, hi, shift);
    }
    Ok(out)
}

/// One explicit shifted QR step `H − μI = QR`, `H ← RQ + μI` on the window `lo..=hi`.
fn qr_step(h: &mut Matrix, lo: usize, hi: usize, shift: Complex64) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        h[(k + 1, k)] = ZERO;
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_complex_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_eigenvalues() {
        let d = [c(1.0, 0.0), c(-3.0, 0.5), c(0.0, 2.0), c(0.25, 0.0)];
        let ev = eigenvalues(&Matrix::from_diag_complex(&d)).unwrap();
        let mut want = d.to_vec();
        sort_eigenvalues(&mut want);
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn companion_of_z3_minus_1_gives_cube_roots() {
        // companion matrix of z^3 - 1
        let m = Matrix::from_real_rows(&[vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let ev = eigenvalues(&m).unwrap();
        let s3 = 3f64.sqrt() / 2.0;
        let want = [c(1.0, 0.0), c(-0.5, s3), c(-0.5, -s3)];
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn trace_and_determinant_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=12 {
            let a = random_complex_matrix(&mut rng, n, n);
            let ev = eigenvalues(&a).unwrap();
            assert_eq!(ev.len(), n);
            let tr = a.trace();
            let sum: Complex64 = ev.iter().sum();
            assert!((sum - tr).norm() <= 1e-8 * (1.0 + tr.norm()));
        }
    }

    #[test]
    fn nilpotent_upper_jordan_block() {
        let n = 6;
        let j = Matrix::from_fn(n, n, |i, k| if k == i + 1 { c(1.0, 0.0) } else { ZERO });
        let ev = eigenvalues(&j).unwrap();
        assert!(ev.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn cyclic_permutation_converges() {
        for n in [2, 3, 5, 8, 16, 31] {
            let p = Matrix::from_fn(n, n, |i, k| if (k + 1) % n == i { c(1.0, 0.0) } else { ZERO });
            let ev = eigenvalues(&p).unwrap();
            assert!(ev.iter().all(|z| (z.norm() - 1.0).abs() < 1e-10));
            let sum: Complex64 = ev.iter().sum();
            assert!(sum.norm() < 1e-9);
        }
    }

    #[test]
    fn ordering_convention() {
        let mut v = vec![c(0.0, 1.0), c(-1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)];
        sort_eigenvalues(&mut v);
        assert_eq!(v, vec![c(2.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(-1.0, 0.0)]);
    }

    #[test]
    fn non_square_is_misuse() {
        assert!(matches!(eigenvalues(&Matrix::zeros(2, 3)), Err(Error::Misuse(_))));
    }

    #[test]
    fn stalled_window_is_named() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_complex_matrix(&mut rng, 6, 6);
        let cfg = EigenConfig { tol: 0.0, max_iter_per_eigenvalue: 1 };
        match eigenvalues_with(&a, cfg) {
            Err(Error::NonConvergence { detail, .. }) => assert!(detail.contains("window")),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
