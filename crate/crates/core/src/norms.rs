//! Space-aware operator norms, 2-summing norms and weak-l2 norms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{dual_exponent, vector_norm, DenseOperator, Matrix, SeqSpace, ONE};
use crate::svd::singular_values;

/// Norm of `op` as a map `source → target`.
///
/// Exact for sources `l_1`, targets `l_∞`, the Hilbert pair, and diagonal
/// matrices between any two `l_p` spaces. Everything else is refused.
pub fn operator_norm(op: &DenseOperator) -> Result<f64> {
    let m = &op.entries;
    let (p, q) = (op.source.p, op.target.p);
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    if m.is_square() && m.is_diagonal() {
        let d: Vec<f64> = m.diagonal().iter().map(|z| z.norm()).collect();
        return Ok(diagonal_operator_norm(&d, p, q));
    }
    if p == 1.0 {
        return Ok((0..m.cols()).map(|j| vector_norm(&m.column(j), q)).fold(0.0, f64::max));
    }
    if q.is_infinite() {
        let dual = dual_exponent(p);
        return Ok((0..m.rows()).map(|i| vector_norm(m.row(i), dual)).fold(0.0, f64::max));
    }
    if p == 2.0 && q == 2.0 {
        return Ok(singular_values(m)?.first().copied().unwrap_or(0.0));
    }
    Err(Error::Unsupported(format!("dense operator norm {} -> {} is not computed exactly", op.source, op.target)))
}

/// Norm of `diag(d): l_p → l_q`: `max |d_n|` when `p ≤ q`, else `‖d‖_r` with
/// `1/r = 1/q − 1/p`.
pub fn diagonal_operator_norm(d: &[f64], p: f64, q: f64) -> f64 {
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let gap = inv(q) - inv(p);
    let moduli: Vec<Complex64> = d.iter().map(|&x| Complex64::new(x.abs(), 0.0)).collect();
    if gap <= 0.0 {
        vector_norm(&moduli, f64::INFINITY)
    } else {
        vector_norm(&moduli, 1.0 / gap)
    }
}

/// `π_2` of an operator between Hilbert spaces, i.e. its Hilbert–Schmidt norm.
pub fn pi2_hilbert(op: &DenseOperator) -> Result<f64> {
    if !op.source.is_hilbert() || !op.target.is_hilbert() {
        return Err(Error::Misuse(format!("pi_2 = sigma_2 needs Hilbert spaces, got {} -> {}", op.source, op.target)));
    }
    Ok(op.entries.frobenius_norm())
}

/// `π_2` of a diagonal map `l_∞ → l_2`, which is `‖d‖_2`.
pub fn pi2_diagonal_from_sup(d: &[f64]) -> Result<f64> {
    if d.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::Misuse("diagonal entries must be nonnegative".into()));
    }
    Ok(d.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Weak-l2 norm together with whether the value is exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakL2 {
    pub value: f64,
    pub exact: bool,
}

/// Largest real dimension handled by sign enumeration.
pub const REAL_VERTEX_LIMIT: usize = 20;
/// Largest complex dimension handled by the phase grid.
pub const COMPLEX_GRID_LIMIT: usize = 8;
/// Phase grid resolution per coordinate.
pub const PHASE_GRID: usize = 8;

/// `sup_{‖y'‖ ≤ 1} (Σ |⟨y', y_n⟩|²)^{1/2}` over the dual ball of `space`.
///
/// For real data on `l_1` the scalar field is taken to be real.
pub fn weak_l2_norm(vectors: &[Vec<Complex64>], space: SeqSpace) -> Result<f64> {
    Ok(weak_l2_detailed(vectors, space)?.value)
}

pub fn weak_l2_detailed(vectors: &[Vec<Complex64>], space: SeqSpace) -> Result<WeakL2> {
    space.validate()?;
    if let Some(bad) = vectors.iter().find(|v| v.len() != space.dim) {
        return Err(Error::SpaceMismatch(format!("vector of length {} does not live in {}", bad.len(), space)));
    }
    let exact = |value| Ok(WeakL2 { value, exact: true });
    if vectors.is_empty() {
        return exact(0.0);
    }
    if space.p == 2.0 {
        let cols = Matrix::from_columns(space.dim, vectors)?;
        return exact(singular_values(&cols)?[0]);
    }
    if space.p.is_infinite() {
        // dual ball is the l_1 ball; extreme points are unimodular multiples of e_j
        let best = (0..space.dim).map(|j| vectors.iter().map(|v| v[j].norm_sqr()).sum::<f64>()).fold(0.0, f64::max);
        return exact(best.sqrt());
    }
    if space.p != 1.0 {
        return Err(Error::Unsupported(format!("weak-l2 norm on {space}")));
    }

    // sup over the unit cube of ‖M z‖_2, M having rows y_n^T
    let m = Matrix::from_rows(vectors)?;
    if let Some(c) = scalar_gram(&m) {
        return exact((c * space.dim as f64).sqrt());
    }
    if m.is_real() {
        if space.dim > REAL_VERTEX_LIMIT {
            return Err(Error::Unsupported(format!("weak-l2 on real {space}: dimension above {REAL_VERTEX_LIMIT}")));
        }
        return exact(sign_vertex_max(&m));
    }
    if space.dim > COMPLEX_GRID_LIMIT {
        return Err(Error::Unsupported(format!("weak-l2 on complex {space}: dimension above {COMPLEX_GRID_LIMIT}")));
    }
    Ok(WeakL2 { value: phase_grid_max(&m), exact: false })
}

/// `Some(c)` when `M^* M = c·I`; then `‖M z‖² = c·dim` on every vertex.
fn scalar_gram(m: &Matrix) -> Option<f64> {
    let g = m.adjoint().matmul(m);
    let n = g.rows();
    let c = g[(0, 0)].re;
    if !(c > 0.0) {
        return None;
    }
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { c } else { 0.0 };
            if (g[(i, j)] - want).norm() > 1e-13 * c {
                return None;
            }
        }
    }
    Some(c)
}

/// Max of `‖M z‖_2` over `z ∈ {±1}^dim` with `z_0 = +1`, by Gray-code walk.
fn sign_vertex_max(m: &Matrix) -> f64 {
    let dim = m.cols();
    let mut w: Vec<Complex64> = (0..m.rows()).map(|i| m.row(i).iter().sum()).collect();
    let mut signs = vec![1.0; dim];
    let mut best: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    for step in 1u64..(1u64 << (dim - 1)) {
        let j = 1 + step.trailing_zeros() as usize;
        signs[j] = -signs[j];
        for (i, wi) in w.iter_mut().enumerate() {
            *wi += 2.0 * signs[j] * m[(i, j)];
        }
        best = best.max(w.iter().map(|z| z.norm_sqr()).sum());
    }
    best.sqrt()
}

/// Phase grid over unimodular `z` with `z_0 = 1`, then coordinate ascent from the best node.
fn phase_grid_max(m: &Matrix) -> f64 {
    let dim = m.cols();
    let roots: Vec<Complex64> = (0..PHASE_GRID)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / PHASE_GRID as f64))
        .collect();
    let eval = |z: &[Complex64]| -> f64 {
        (0..m.rows()).map(|i| m.row(i).iter().zip(z).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr()).sum()
    };
    let mut idx = vec![0usize; dim];
    let mut z = vec![ONE; dim];
    let mut best = (eval(&z), z.clone());
    'grid: loop {
        let mut j = 1;
        loop {
            if j >= dim {
                break 'grid;
            }
            idx[j] += 1;
            if idx[j] < PHASE_GRID {
                z[j] = roots[idx[j]];
                break;
            }
            idx[j] = 0;
            z[j] = roots[0];
            j += 1;
        }
        let val = eval(&z);
        if val > best.0 {
            best = (val, z.clone());
        }
    }
    let (mut val, mut z) = best;
    for _ in 0..200 {
        let mut improved = false;
        for j in 1..dim {
            // w_{-j} = M z − z_j m_j; the optimal z_j aligns z_j m_j with w_{-j}
            let mut inner = Complex64::new(0.0, 0.0);
            for i in 0..m.rows() {
                let row = m.row(i);
                let w: Complex64 = row.iter().zip(&z).map(|(a, b)| a * b).sum::<Complex64>() - row[j] * z[j];
                inner += row[j].conj() * w;
            }
            if inner.norm() > 0.0 {
                z[j] = inner / inner.norm();
            }
        }
        let next = eval(&z);
        if next > val * (1.0 + 1e-15) {
            improved = true;
        }
        val = val.max(next);
        if !improved {
            break;
        }
    }
    val.sqrt()
}
