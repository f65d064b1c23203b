//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use nuclear_factor::lorentz::{lorentz_quasinorm, LorentzParams};
use nuclear_factor::matrix::Matrix;

/// `α*_n = inf { sup_{k ∉ J} |α_k| : card J < n }`, by enumerating every `J`.
pub fn literal_rearrangement(alpha: &[Complex64]) -> Vec<f64> {
    let len = alpha.len();
    (1..=len)
        .map(|n| {
            let mut best = f64::INFINITY;
            for mask in 0u32..(1 << len) {
                if (mask.count_ones() as usize) < n {
                    let sup = (0..len).filter(|k| mask & (1 << k) == 0).map(|k| alpha[k].norm()).fold(0.0, f64::max);
                    best = best.min(sup);
                }
            }
            best
        })
        .collect()
}

pub fn literal_quasinorm(alpha: &[Complex64], p: f64, q: f64) -> f64 {
    let star = literal_rearrangement(alpha);
    if q.is_infinite() {
        return star.iter().enumerate().map(|(i, v)| v * ((i + 1) as f64).powf(1.0 / p)).fold(0.0, f64::max);
    }
    star.iter().enumerate().map(|(i, v)| v.powf(q) * ((i + 1) as f64).powf(q / p - 1.0)).sum::<f64>().powf(1.0 / q)
}

/// Coefficients `c_0..c_n` of `det(zI − A) = Σ c_k z^k` by Faddeev–LeVerrier.
pub fn char_poly(a: &Matrix) -> Vec<Complex64> {
    let n = a.rows();
    let mut coeffs = vec![c(0.0, 0.0); n + 1];
    coeffs[n] = c(1.0, 0.0);
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = a.matmul(&m);
        for i in 0..n {
            next = add_diag(&next, i, coeffs[n - k + 1]);
        }
        m = next;
        let am = a.matmul(&m);
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

pub fn add_diag(m: &Matrix, i: usize, z: Complex64) -> Matrix {
    let mut out = m.clone();
    let d = Matrix::from_fn(m.rows(), m.cols(), |r, s| if r == i && s == i { z } else { c(0.0, 0.0) });
    out = out.add(&d);
    out
}

pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = c(0.0, 0.0);
    let mut dp = c(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Durand–Kerner iteration, then Newton polishing.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let bound = 1.0 + coeffs[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = c(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound * 0.5).collect();
    for _ in 0..2000 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let (p, _) = horner(coeffs, roots[i]);
            let mut denom = c(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = p / denom;
            roots[i] -= step;
            change = change.max(step.norm());
        }
        if change < 1e-15 * bound {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let (p, dp) = horner(coeffs, *r);
            if dp.norm() > 0.0 {
                *r -= p / dp;
            }
        }
    }
    roots
}

/// Smallest `max_k |a_k − b_π(k)|` over all permutations.
pub fn bottleneck(a: &[Complex64], b: &[Complex64]) -> f64 {
    fn go(a: &[Complex64], b: &[Complex64], used: &mut Vec<bool>, i: usize, cur: f64, best: &mut f64) {
        if cur >= *best {
            return;
        }
        if i == a.len() {
            *best = cur;
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(a, b, used, i + 1, cur.max((a[i] - b[j]).norm()), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(a, b, &mut vec![false; b.len()], 0, 0.0, &mut best);
    best
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Minimum over zero padding of both sides to `len` and all permutations.
pub fn brute_distance(a: &[Complex64], b: &[Complex64], len: usize, params: LorentzParams) -> f64 {
    let pad = |v: &[Complex64]| {
        let mut v = v.to_vec();
        v.resize(len, c(0.0, 0.0));
        v
    };
    let (a, b) = (pad(a), pad(b));
    permutations(len)
        .iter()
        .map(|perm| {
            let d: Vec<Complex64> = (0..len).map(|k| a[perm[k]] - b[k]).collect();
            lorentz_quasinorm(&d, params).unwrap()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn sign_enumeration(vectors: &[Vec<Complex64>], dim: usize) -> f64 {
    let mut best: f64 = 0.0;
    for mask in 0u32..(1 << dim) {
        let z: Vec<f64> = (0..dim).map(|j| if mask & (1 << j) != 0 { -1.0 } else { 1.0 }).collect();
        let s: f64 = vectors.iter().map(|v| v.iter().zip(&z).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr()).sum();
        best = best.max(s);
    }
    best.sqrt()
}

pub fn gauss(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
