use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nuclear_factor::chain::{compose_theorem1, ChainLink, ChainSpec};
use nuclear_factor::eigen::significant_eigenvalues;
use nuclear_factor::exponent::Exponent;
use nuclear_factor::lorentz::{lorentz_quasinorm, lorentz_quasinorm_real, LorentzParams};
use nuclear_factor::matrix::{Matrix, SeqSpace};
use nuclear_factor::random::{random_complex_matrix, random_nuclear_rep};
use nuclear_factor::schatten::{holder_compose, schatten_lorentz_quasinorm, weyl_check};
use nuclear_factor::spectral::unordered_distance;

fn complex_vec(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b)| Complex64::new(a, b)), 0..max)
}

fn params() -> impl Strategy<Value = LorentzParams> {
    prop::sample::select(vec![
        (1.0, 1.0),
        (2.0, 1.0),
        (0.5, 0.5),
        (1.0, 0.5),
        (2.0, f64::INFINITY),
        (2.0 / 3.0, 1.0 / 3.0),
    ])
    .prop_map(|(p, q)| LorentzParams::new(p, q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quasinorm_ignores_order_and_phase(v in complex_vec(12), p in params(), shift in 0usize..12) {
        let base = lorentz_quasinorm(&v, p).unwrap();
        let mut w: Vec<Complex64> = v.iter().map(|z| z * Complex64::from_polar(1.0, 0.7)).collect();
        if !w.is_empty() {
            let k = shift % w.len();
            w.rotate_left(k);
        }
        w.push(Complex64::new(0.0, 0.0));
        let other = lorentz_quasinorm(&w, p).unwrap();
        prop_assert!((base - other).abs() <= 1e-12 * base.max(1e-300));
    }

    #[test]
    fn quasinorm_is_homogeneous(v in complex_vec(12), p in params(), c in 0.01f64..100.0) {
        let scaled: Vec<Complex64> = v.iter().map(|z| z * c).collect();
        let a = lorentz_quasinorm(&scaled, p).unwrap();
        let b = c * lorentz_quasinorm(&v, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn diagonal_pair_is_plain_lp(v in prop::collection::vec(0.0f64..3.0, 1..15), p in 0.3f64..4.0) {
        let direct = v.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p);
        let have = lorentz_quasinorm_real(&v, LorentzParams::lp(p).unwrap()).unwrap();
        prop_assert!((direct - have).abs() <= 1e-12 * direct.max(1e-300));
    }

    #[test]
    fn distance_is_symmetric_and_separates(a in complex_vec(5), b in complex_vec(5), p in params()) {
        let d1 = unordered_distance(&a, &b, p).unwrap().value;
        let d2 = unordered_distance(&b, &a, p).unwrap().value;
        prop_assert!((d1 - d2).abs() <= 1e-12 * d1.max(1e-300));
        let mut shuffled = a.clone();
        shuffled.reverse();
        shuffled.push(Complex64::new(0.0, 0.0));
        prop_assert_eq!(unordered_distance(&a, &shuffled, p).unwrap().value, 0.0);
    }

    #[test]
    fn distance_triangle_for_norms(a in complex_vec(3), b in complex_vec(3), c in complex_vec(3)) {
        for p in [LorentzParams::new(1.0, 1.0).unwrap(), LorentzParams::new(2.0, 2.0).unwrap(), LorentzParams::new(2.0, 1.0).unwrap()] {
            let ab = unordered_distance(&a, &b, p).unwrap().value;
            let bc = unordered_distance(&b, &c, p).unwrap().value;
            let ac = unordered_distance(&a, &c, p).unwrap().value;
            prop_assert!(ac <= (ab + bc) * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn weyl_and_holder_on_random_matrices(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_complex_matrix(&mut rng, n, n);
        let b = random_complex_matrix(&mut rng, n, n);
        for (p, q) in [(1.0, 1.0), (1.0, 0.5), (2.0, 1.0), (2.0 / 3.0, 0.5)] {
            let params = LorentzParams::new(p, q).unwrap();
            prop_assert!(weyl_check(&a, params).unwrap().holds);
        }
        let l = LorentzParams::new(2.0, 2.0).unwrap();
        let r = LorentzParams::new(1.0, 0.5).unwrap();
        let h = holder_compose(l, r).unwrap();
        let lhs = schatten_lorentz_quasinorm(&a.matmul(&b), h.result).unwrap();
        let rhs = h.constant * schatten_lorentz_quasinorm(&a, l).unwrap() * schatten_lorentz_quasinorm(&b, r).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `λ(B·U·A)` and `λ(U·A·B)` agree as unordered sequences.
    #[test]
    fn cyclic_similarity_of_factors(seed in any::<u64>(), dim in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sp = SeqSpace::l2(dim);
        let one = Exponent::int(1);
        let links = (0..2)
            .map(|_| ChainLink::Sr { rep: random_nuclear_rep(&mut rng, sp, sp, dim, false), s: one, r: one })
            .collect();
        let chain = ChainSpec::new(links).unwrap();
        let ft = compose_theorem1(&chain, 0.0).unwrap();
        let outer = significant_eigenvalues(&ft.b.matmul(&ft.u).matmul(&ft.a)).unwrap();
        let inner = significant_eigenvalues(&ft.u.matmul(&ft.a).matmul(&ft.b)).unwrap();
        let strip = |v: Vec<Complex64>| -> Vec<Complex64> { v.into_iter().filter(|z| z.norm() > 0.0).take(8).collect() };
        let (outer, inner) = (strip(outer), strip(inner));
        let d = unordered_distance(&outer, &inner, LorentzParams::new(1.0, 1.0).unwrap()).unwrap();
        let scale = chain.product().frobenius_norm().max(1.0);
        prop_assert!(d.value <= 1e-7 * scale, "distance {}", d.value);
    }
}

#[test]
fn identity_quasinorms() {
    let v = schatten_lorentz_quasinorm(&Matrix::identity(4), LorentzParams::new(1.0, 1.0).unwrap()).unwrap();
    assert!((v - 4.0).abs() < 1e-12);
}
