//! Eigenvalue sequences of chain products and the eigenvalue-distribution checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainMode, ChainSpec, FactorTriple};
use crate::eigen::significant_eigenvalues;
use crate::error::{Error, Result};
use crate::exponent::{Exponent, Recip};
use crate::lorentz::{lorentz_quasinorm, LorentzParams};
use crate::matrix::Matrix;
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasinormEntry {
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub p: f64,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub q: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Non-increasing modulus, with algebraic multiplicity.
    pub lambdas: Vec<Complex64>,
    pub quasinorm_table: Vec<QuasinormEntry>,
    pub verdicts: Vec<Verdict>,
}

impl SpectralReport {
    /// `‖λ‖_{p,q}`, recorded in the table.
    pub fn quasinorm(&mut self, params: LorentzParams) -> Result<f64> {
        let value = lorentz_quasinorm(&self.lambdas, params)?;
        if !self.quasinorm_table.iter().any(|e| e.p == params.p && e.q == params.q) {
            self.quasinorm_table.push(QuasinormEntry { p: params.p, q: params.q, value });
        }
        Ok(value)
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

/// Eigenvalues of a square matrix, ordered, with numerical zeros cleaned.
pub fn eigen_sequence(m: &Matrix) -> Result<SpectralReport> {
    if !m.is_square() {
        return Err(Error::Misuse(format!("eigenvalues need a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    Ok(SpectralReport { lambdas: significant_eigenvalues(m)?, quasinorm_table: Vec::new(), verdicts: Vec::new() })
}

fn square_chain(chain: &ChainSpec) -> Result<()> {
    if !chain.is_square() {
        return Err(Error::Misuse(format!(
            "eigenvalue checks need X_1 = X_(m+1), got {} and {}",
            chain.source(),
            chain.target()
        )));
    }
    Ok(())
}

fn lp(e: Exponent) -> Result<LorentzParams> {
    LorentzParams::lp(e.value())
}

/// `‖λ‖_{s̃,r̃} ≤ 2^{1/s+1/s̃} c̃ ∏ ν_k` with `1/s̃ = 1/2 + 1/s`, `1/r̃ = 1/2 + 1/r`.
///
/// The right side is computed as `c·gamma_upper` with `c = 2^{1/s̃}` (or 1
/// when the certified class is diagonal), which is the same product read
/// off the ledger.
pub fn check_corollary3(chain: &ChainSpec, ft: &FactorTriple, report: &mut SpectralReport) -> Result<Verdict> {
    square_chain(chain)?;
    if chain.mode() != ChainMode::Sr || ft.mode != ChainMode::Sr {
        return Err(Error::Misuse("corollary 3 applies to SR chains".into()));
    }
    let half = Recip::ratio(1, 2);
    let st = (half + ft.s.recip()).exponent();
    let rt = (half + ft.r.recip()).exponent();
    let params = LorentzParams::new(st.value(), rt.value())?;
    let lhs = report.quasinorm(params)?;
    let join = if ft.s == ft.r { 1.0 } else { 2f64.powf(st.recip().to_f64()) };
    let rhs = join * ft.gamma_upper;
    let v = Verdict::le("eigenvalues in l_(s~,r~)", "corollary 3", lhs, rhs)
        .with_detail(format!("s~ = {st}, r~ = {rt}, c~ = {:e}, final constant {:e}", ft.c_tilde, ft.final_constant));
    report.verdicts.push(v.clone());
    Ok(v)
}

/// `‖λ‖_q ≤ ∏ ν_{r_k}` with `1/q = Σ 1/r_k − m/2`, all `s_k = r_k`.
pub fn check_theorem2(chain: &ChainSpec, report: &mut SpectralReport) -> Result<Verdict> {
    square_chain(chain)?;
    if chain.mode() != ChainMode::Sr || chain.s_list() != chain.r_list() {
        return Err(Error::Regime("theorem 2 needs an SR chain with s_k = r_k".into()));
    }
    let m = chain.len() as i64;
    let sum: Recip = chain.r_list().iter().map(|e| e.recip()).sum();
    let shift = Recip::ratio(m, 2);
    if !(sum > shift) {
        return Err(Error::Regime(format!("need sum 1/r_k above m/2, got {}", sum.to_f64())));
    }
    let q = (sum - shift).exponent();
    let lhs = report.quasinorm(lp(q)?)?;
    let rhs: f64 = chain.rep_values()?.iter().product();
    let v = Verdict::le("eigenvalues in l_q", "theorem 2", lhs, rhs).with_detail(format!("q = {q}"));
    report.verdicts.push(v.clone());
    Ok(v)
}

/// `1/s̄ = Σ 1/s_k`.
pub fn s_bar(chain: &ChainSpec) -> Exponent {
    chain.s_list().iter().map(|e| e.recip()).sum::<Recip>().exponent()
}

/// `‖λ‖_{s̄} ≤ ∏ ν_{s_k;2}`.
pub fn check_corollary5(chain: &ChainSpec, report: &mut SpectralReport) -> Result<Verdict> {
    square_chain(chain)?;
    if chain.mode() != ChainMode::S2 {
        return Err(Error::Regime("corollary 5 applies to S2 chains".into()));
    }
    let sb = s_bar(chain);
    let lhs = report.quasinorm(lp(sb)?)?;
    let rhs: f64 = chain.rep_values()?.iter().product();
    let v = Verdict::le("eigenvalues in l_(s~)", "corollary 5", lhs, rhs).with_detail(format!("s~ = {sb}"));
    report.verdicts.push(v.clone());
    Ok(v)
}

/// `‖λ‖_t ≤ (dim T(X))^{1/t − 1/s̄} ∏ ν_{s_k;2}` for `t ≤ s̄`.
pub fn check_corollary7(chain: &ChainSpec, t: Exponent, report: &mut SpectralReport) -> Result<Verdict> {
    square_chain(chain)?;
    if chain.mode() != ChainMode::S2 {
        return Err(Error::Regime("corollary 7 applies to S2 chains".into()));
    }
    let sb = s_bar(chain);
    if t.value() > sb.value() {
        return Err(Error::Regime(format!("need t <= s~ = {sb}, got {t}")));
    }
    let product = chain.product();
    let rank = crate::svd::svd(&product)?.numerical_rank(crate::chain::RANK_TOL);
    let lhs = report.quasinorm(lp(t)?)?;
    let at_sbar = report.quasinorm(lp(sb)?)?;
    let gap = (t.recip() - sb.recip()).to_f64();
    let factor = if rank == 0 { 1.0 } else { (rank as f64).powf(gap) };
    let rhs = factor * chain.rep_values()?.iter().product::<f64>();
    let v = Verdict::le("eigenvalues in l_t after downgrade", "corollary 7", lhs, rhs)
        .with_detail(format!("t = {t}, s~ = {sb}, rank {rank}, ||lambda||_(s~) = {at_sbar:e}"));
    report.verdicts.push(v.clone());
    Ok(v)
}

/// `‖λ‖_{p,q}` at `1/p = Σ 1/s_k − m/2`, `1/q = Σ 1/r_k`. Reported, not asserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipRow {
    pub p: Exponent,
    pub q: Exponent,
    pub value: f64,
    pub rep_product: f64,
    pub ratio: f64,
}

pub fn check_proposition2(chain: &ChainSpec, report: &mut SpectralReport) -> Result<MembershipRow> {
    square_chain(chain)?;
    if chain.mode() != ChainMode::Sr {
        return Err(Error::Regime("proposition 2 applies to SR chains".into()));
    }
    let m = chain.len() as i64;
    let ss: Recip = chain.s_list().iter().map(|e| e.recip()).sum();
    let shift = Recip::ratio(m, 2);
    if !(ss > shift) {
        return Err(Error::Regime(format!("need sum 1/s_k above m/2, got {}", ss.to_f64())));
    }
    let p = (ss - shift).exponent();
    let q = chain.r_list().iter().map(|e| e.recip()).sum::<Recip>().exponent();
    let value = report.quasinorm(LorentzParams::new(p.value(), q.value())?)?;
    let rep_product: f64 = chain.rep_values()?.iter().product();
    Ok(MembershipRow { p, q, value, rep_product, ratio: if value == 0.0 { 0.0 } else { value / rep_product } })
}

/// `‖λ(T)‖_t`, a lower bound for `γ_{S_t}(T)`.
pub fn gamma_lower_bound_eigen(t_matrix: &Matrix, t: f64) -> Result<f64> {
    gamma_lower_bound_eigen_lorentz(t_matrix, LorentzParams::lp(t)?)
}

/// `‖λ(T)‖_{p,q}` for `q ≤ p`, a lower bound for `γ_{S_{p,q}}(T)`.
pub fn gamma_lower_bound_eigen_lorentz(t_matrix: &Matrix, params: LorentzParams) -> Result<f64> {
    if params.q > params.p {
        return Err(Error::Regime(format!("lower bound needs q <= p, got {params:?}")));
    }
    lorentz_quasinorm(&eigen_sequence(t_matrix)?.lambdas, params)
}

/// `ρ_{p,q}` value and whether it was found by exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub value: f64,
    pub exact: bool,
}

/// Largest input length searched exhaustively.
pub const EXACT_DISTANCE_LIMIT: usize = 8;

/// `inf ‖(α_k − β_{π(k)})‖_{p,q}` over pairings with zero padding.
///
/// Exhaustive over partial matchings (unmatched entries are paired with 0)
/// while both lengths are at most [`EXACT_DISTANCE_LIMIT`]; otherwise both
/// are sorted by modulus, padded and paired in order, and flagged inexact.
pub fn unordered_distance(alpha: &[Complex64], beta: &[Complex64], params: LorentzParams) -> Result<Distance> {
    params.validate()?;
    if alpha.len().max(beta.len()) <= EXACT_DISTANCE_LIMIT {
        let mut used = vec![false; beta.len()];
        let mut diffs = Vec::with_capacity(alpha.len() + beta.len());
        let mut best = f64::INFINITY;
        search(alpha, beta, params, 0, &mut used, &mut diffs, &mut best);
        return Ok(Distance { value: best, exact: true });
    }
    let sorted = |v: &[Complex64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        v
    };
    let (a, b) = (sorted(alpha), sorted(beta));
    let n = a.len().max(b.len());
    let zero = Complex64::new(0.0, 0.0);
    let diffs: Vec<Complex64> =
        (0..n).map(|k| a.get(k).copied().unwrap_or(zero) - b.get(k).copied().unwrap_or(zero)).collect();
    Ok(Distance { value: lorentz_quasinorm(&diffs, params)?, exact: false })
}

fn search(
    alpha: &[Complex64],
    beta: &[Complex64],
    params: LorentzParams,
    i: usize,
    used: &mut [bool],
    diffs: &mut Vec<Complex64>,
    best: &mut f64,
) {
    if i == alpha.len() {
        let mut all = diffs.clone();
        all.extend(beta.iter().zip(used.iter()).filter(|(_, u)| !**u).map(|(b, _)| -*b));
        let v = lorentz_quasinorm(&all, params).expect("params validated");
        if v < *best {
            *best = v;
        }
        return;
    }
    diffs.push(alpha[i]);
    search(alpha, beta, params, i + 1, used, diffs, best);
    diffs.pop();
    for j in 0..beta.len() {
        if !used[j] {
            used[j] = true;
            diffs.push(alpha[i] - beta[j]);
            search(alpha, beta, params, i + 1, used, diffs, best);
            diffs.pop();
            used[j] = false;
        }
    }
}

/// Default `t` for S2 checks: `1/t = 1/s̄ + 1/2`, which always satisfies `t ≤ s̄`.
pub fn default_t(chain: &ChainSpec) -> Exponent {
    (s_bar(chain).recip() + Recip::ratio(1, 2)).exponent()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{compose_theorem1, compose_theorem3, ChainLink};
    use crate::matrix::{SeqSpace, ZERO};
    use crate::random::{random_complex_matrix, random_nuclear_rep, random_s2_rep};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_nilpotent_sequences() {
        let r = eigen_sequence(&Matrix::identity(4)).unwrap();
        assert!(r.lambdas.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-14));
        let j = Matrix::from_fn(4, 4, |i, k| if k == i + 1 { c(1.0, 0.0) } else { ZERO });
        assert!(eigen_sequence(&j).unwrap().lambdas.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn lower_bound_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let q = crate::svd::svd(&random_complex_matrix(&mut rng, 5, 5)).unwrap().u.unwrap();
        let v = gamma_lower_bound_eigen(&q, 0.5).unwrap();
        assert!((v - 25.0).abs() < 1e-8);
    }

    #[test]
    fn nuclear_pair_eigenvalues_absolutely_summable() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let sp = SeqSpace::l1(5);
        let one = Exponent::int(1);
        let links = (0..2)
            .map(|_| ChainLink::Sr { rep: random_nuclear_rep(&mut rng, sp, sp, 5, false), s: one, r: one })
            .collect();
        let chain = ChainSpec::new(links).unwrap();
        let ft = compose_theorem1(&chain, 0.0).unwrap();
        let mut report = eigen_sequence(&chain.product()).unwrap();
        let v3 = check_corollary3(&chain, &ft, &mut report).unwrap();
        let v2 = check_theorem2(&chain, &mut report).unwrap();
        assert!(v3.holds && v2.holds);
        assert!((v3.lhs - v2.lhs).abs() < 1e-12 * v2.lhs.max(1e-300));
        let row = check_proposition2(&chain, &mut report).unwrap();
        assert!(row.value.is_finite());
    }

    #[test]
    fn s2_checks_on_random_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let sp = SeqSpace::l2(4);
        let one = Exponent::int(1);
        let links =
            (0..2).map(|_| ChainLink::S2 { rep: random_s2_rep(&mut rng, sp, sp, 4, false).unwrap(), s: one }).collect();
        let chain = ChainSpec::new(links).unwrap();
        let ft = compose_theorem3(&chain, 0.0).unwrap();
        let mut report = eigen_sequence(&chain.product()).unwrap();
        assert!(check_corollary5(&chain, &mut report).unwrap().holds);
        let sb = s_bar(&chain);
        let same = check_corollary7(&chain, sb, &mut report).unwrap();
        assert!((same.rhs - chain.rep_values().unwrap().iter().product::<f64>()).abs() < 1e-12 * same.rhs);
        assert!(check_corollary7(&chain, Exponent::ratio(1, 4), &mut report).unwrap().holds);
        assert!(check_corollary7(&chain, Exponent::int(1), &mut report).is_err());
        let low = gamma_lower_bound_eigen(&chain.product(), ft.s.value()).unwrap();
        assert!(low <= ft.gamma_upper * (1.0 + 1e-9));
        assert!(report.all_hold());
    }

    #[test]
    fn distance_basics() {
        let p = LorentzParams::new(1.0, 1.0).unwrap();
        let a = [c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
        let b = [c(-1.0, 1.0), c(1.0, 0.0), c(0.0, 2.0)];
        assert_eq!(unordered_distance(&a, &b, p).unwrap().value, 0.0);
        let d = unordered_distance(&[c(1.0, 0.0)], &[], p).unwrap();
        assert_eq!(d, Distance { value: 1.0, exact: true });
        let d1 = unordered_distance(&a, &[c(1.0, 0.1)], p).unwrap();
        let d2 = unordered_distance(&[c(1.0, 0.1)], &a, p).unwrap();
        assert!((d1.value - d2.value).abs() < 1e-15);
        let long: Vec<Complex64> = (0..9).map(|k| c(k as f64, 0.0)).collect();
        assert!(!unordered_distance(&long, &long, p).unwrap().exact);
    }

    #[test]
    fn non_square_chain_refused() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let one = Exponent::int(1);
        let chain = ChainSpec::new(vec![ChainLink::S2 {
            rep: random_s2_rep(&mut rng, SeqSpace::l2(3), SeqSpace::l2(4), 2, false).unwrap(),
            s: one,
        }])
        .unwrap();
        let mut report = SpectralReport { lambdas: vec![], quasinorm_table: vec![], verdicts: vec![] };
        assert!(check_corollary5(&chain, &mut report).is_err());
    }
}
