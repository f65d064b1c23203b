//! Library routines against independent brute-force oracles.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

mod common;

use common::*;
use nuclear_factor::eigen::eigenvalues;
use nuclear_factor::experiments::dft_matrix;
use nuclear_factor::lorentz::{decreasing_rearrangement, lorentz_quasinorm, LorentzParams};
use nuclear_factor::matrix::{Matrix, SeqSpace};
use nuclear_factor::norms::{diagonal_operator_norm, pi2_diagonal_from_sup, weak_l2_detailed};
use nuclear_factor::schatten::downgrade_check_values;
use nuclear_factor::spectral::unordered_distance;

// ---------- rearrangement ----------

#[test]
fn rearrangement_matches_literal_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for len in 0..=10 {
        for _ in 0..5 {
            let mut alpha: Vec<Complex64> = (0..len).map(|_| gauss(&mut rng)).collect();
            if len > 3 {
                // ties and zeros
                alpha[1] = alpha[0] * c(0.0, 1.0);
                alpha[2] = c(0.0, 0.0);
            }
            let lit = literal_rearrangement(&alpha);
            let got = decreasing_rearrangement(&alpha).values;
            assert_eq!(got.len(), lit.len());
            for (a, b) in got.iter().zip(&lit) {
                assert!((a - b).abs() <= 1e-15 * b.max(1.0));
            }
            for (p, q) in [(1.0, 1.0), (2.0, 1.0), (0.5, 0.25), (1.0, f64::INFINITY), (2.0 / 3.0, 1.0 / 3.0)] {
                let want = literal_quasinorm(&alpha, p, q);
                let have = lorentz_quasinorm(&alpha, LorentzParams::new(p, q).unwrap()).unwrap();
                assert!((want - have).abs() <= 1e-12 * want.max(1e-300), "len {len} ({p},{q}): {want} vs {have}");
            }
        }
    }
}

// ---------- eigenvalues against characteristic-polynomial roots ----------

#[test]
fn eigenvalues_match_characteristic_polynomial_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for n in 1..=8 {
        for _ in 0..6 {
            let a = Matrix::from_fn(n, n, |_, _| gauss(&mut rng));
            let want = poly_roots(&char_poly(&a));
            let have = eigenvalues(&a).unwrap();
            let scale = a.frobenius_norm();
            let d = bottleneck(&have, &want);
            assert!(d <= 1e-8 * scale, "n = {n}: distance {d:e}");
        }
    }
}

#[test]
fn char_poly_oracle_sanity() {
    // companion of (z − 1)(z − 2)(z + 3) = z³ − 7z + 6
    let a = Matrix::from_real_rows(&[vec![0.0, 0.0, -6.0], vec![1.0, 0.0, 7.0], vec![0.0, 1.0, 0.0]]).unwrap();
    let p = char_poly(&a);
    let want = [6.0, -7.0, 0.0, 1.0];
    for (x, w) in p.iter().zip(want) {
        assert!((x - c(w, 0.0)).norm() < 1e-12);
    }
    let roots = poly_roots(&p);
    assert!(bottleneck(&roots, &[c(1.0, 0.0), c(2.0, 0.0), c(-3.0, 0.0)]) < 1e-12);
}

// ---------- DFT multiplicities from traces of powers ----------

#[test]
fn dft_multiplicities_match_trace_powers() {
    let fourth_roots = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
    for n in 2..=16 {
        let a = dft_matrix(n).unwrap().entries;
        let mut power = Matrix::identity(n);
        let mut traces = Vec::new();
        for _ in 0..4 {
            traces.push(power.trace());
            power = power.matmul(&a);
        }
        // A^4 = I, so multiplicity of i^k is (1/4) Σ_j i^{-kj} tr(A^j)
        let expected: Vec<usize> = (0..4)
            .map(|k| {
                let m: Complex64 =
                    (0..4).map(|j| fourth_roots[(4 - (k * j) % 4) % 4] * traces[j]).sum::<Complex64>() / 4.0;
                assert!((m.re - m.re.round()).abs() < 1e-9 && m.im.abs() < 1e-9);
                m.re.round() as usize
            })
            .collect();
        let eig = eigenvalues(&a).unwrap();
        let counts: Vec<usize> =
            fourth_roots.iter().map(|r| eig.iter().filter(|z| (*z - r).norm() < 1e-9).count()).collect();
        assert_eq!(counts, expected, "n = {n}");
    }
}

// ---------- unordered distance against brute force ----------

#[test]
fn distance_matches_factorial_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let l1 = LorentzParams::new(1.0, 1.0).unwrap();
    for _ in 0..10 {
        let a: Vec<Complex64> = (0..5).map(|_| gauss(&mut rng)).collect();
        let b: Vec<Complex64> = (0..5).map(|_| gauss(&mut rng)).collect();
        // in l_1, |a − b| <= |a| + |b|, so the 5! full pairings already attain the infimum
        let want = brute_distance(&a, &b, 5, l1);
        let have = unordered_distance(&a, &b, l1).unwrap();
        assert!(have.exact);
        assert!((want - have.value).abs() <= 1e-12 * want, "{want} vs {}", have.value);
        // elsewhere unmatched zeros can do better than any full pairing
        for params in [LorentzParams::new(2.0, 2.0).unwrap(), LorentzParams::new(2.0, 1.0).unwrap()] {
            let pairing = brute_distance(&a, &b, 5, params);
            assert!(unordered_distance(&a, &b, params).unwrap().value <= pairing * (1.0 + 1e-12));
        }
    }
}

#[test]
fn distance_matches_padded_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let params = [
        LorentzParams::new(0.5, 0.5).unwrap(),
        LorentzParams::new(1.0, 0.5).unwrap(),
        LorentzParams::new(2.0, 2.0).unwrap(),
        LorentzParams::new(2.0, 1.0).unwrap(),
    ];
    for (la, lb) in [(3, 2), (4, 4), (5, 2), (1, 0)] {
        for _ in 0..3 {
            let a: Vec<Complex64> = (0..la).map(|_| gauss(&mut rng)).collect();
            let b: Vec<Complex64> = (0..lb).map(|_| gauss(&mut rng)).collect();
            for p in params {
                let want = brute_distance(&a, &b, la + lb, p);
                let have = unordered_distance(&a, &b, p).unwrap();
                assert!((want - have.value).abs() <= 1e-12 * want.max(1e-300));
            }
        }
    }
}

// ---------- weak-l2 on l_1^n ----------

#[test]
fn weak_l2_on_l1_matches_sign_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for dim in 1..=10 {
        for terms in [1, 3, 7] {
            let vectors: Vec<Vec<Complex64>> =
                (0..terms).map(|_| (0..dim).map(|_| c(rng.sample(StandardNormal), 0.0)).collect()).collect();
            let w = weak_l2_detailed(&vectors, SeqSpace::l1(dim)).unwrap();
            let want = sign_enumeration(&vectors, dim);
            assert!(w.exact);
            assert!((w.value - want).abs() <= 1e-12 * want, "dim {dim}: {} vs {want}", w.value);
        }
        // orthogonal rows take the Gram shortcut
        let eye: Vec<Vec<Complex64>> =
            (0..dim).map(|i| (0..dim).map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
        let w = weak_l2_detailed(&eye, SeqSpace::l1(dim)).unwrap();
        assert!((w.value - sign_enumeration(&eye, dim)).abs() < 1e-12);
    }
}

// ---------- diagonal maps out of l_∞ ----------

#[test]
fn sup_to_l2_diagonal_matches_sign_patterns() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for n in 1..=10 {
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut best: f64 = 0.0;
        for mask in 0u32..(1 << n) {
            let v: f64 = (0..n)
                .map(|j| {
                    let z = if mask & (1 << j) != 0 { -1.0 } else { 1.0 };
                    (d[j] * z).powi(2)
                })
                .sum();
            best = best.max(v.sqrt());
        }
        let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
        let op = diagonal_operator_norm(&abs, f64::INFINITY, 2.0);
        let pi2 = pi2_diagonal_from_sup(&abs).unwrap();
        assert!((op - best).abs() <= 1e-13 * best.max(1.0));
        assert!((pi2 - best).abs() <= 1e-13 * best.max(1.0));
    }
}

// ---------- finite-rank downgrade exponent ----------

#[test]
fn downgrade_exponent_holds_and_is_attained_by_flat_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let cases = [(1.0, 1.0, 0.5), (2.0, 1.0, 0.5), (1.0, 0.5, 0.25), (2.0, 2.0, 1.0)];
    for &(p, q, t) in &cases {
        for n in [1usize, 2, 5, 17, 64] {
            for _ in 0..20 {
                let mut mu: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                mu.sort_by(|a, b| b.total_cmp(a));
                let v = downgrade_check_values(&mu, p, q, t, n).unwrap();
                let lhs = literal_quasinorm(&mu.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>()[..n.min(10)], p, t);
                assert!(v.holds);
                if n <= 10 {
                    assert!((lhs - v.lhs).abs() <= 1e-12 * lhs);
                }
            }
        }
        // flat sequences attain the factor for plain l_t against l_q
        for n in [3usize, 40, 500] {
            let ones = vec![c(1.0, 0.0); n];
            let lt = lorentz_quasinorm(&ones, LorentzParams::new(t, t).unwrap()).unwrap();
            let lq = lorentz_quasinorm(&ones, LorentzParams::new(q, q).unwrap()).unwrap();
            let factor = (n as f64).powf(1.0 / t - 1.0 / q);
            assert!((lt - factor * lq).abs() <= 1e-9 * lt);
        }
        // with the first index held at p the flat ratio stays bounded, so the factor is not attained there
        let ratio = |n: usize| {
            let v = downgrade_check_values(&vec![1.0; n], p, q, t, n).unwrap();
            v.lhs / (v.rhs / (n as f64).powf(1.0 / t - 1.0 / q))
        };
        let growth = (ratio(4096) / ratio(64)).ln() / (64f64).ln();
        assert!(growth.abs() < 0.25 * (1.0 / t - 1.0 / q), "({p},{q},{t}): growth {growth}");
    }
}
