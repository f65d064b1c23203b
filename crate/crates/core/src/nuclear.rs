//! Finite nuclear representations `T = Σ a_n ⟨x'_n, ·⟩ y_n` and their
//! diagonal splits.
//!
//! The pairing `⟨x', x⟩ = Σ_j x'_j x_j` is bilinear, so the represented
//! matrix is `Σ_n a_n · y_n x'_nᵀ`.
//!
//! An `(s, r)` split writes `T = V·Δ2·Δ0·Δ1·W` with
//!
//! ```text
//! Δ1 = Δ2 = diag(√(n^{r/s−1} d_n^r))      l_∞ → l_2,  l_2 → l_1
//! Δ0      = diag(n^{1−r/s} d_n^{1−r})     in S_{q,v},  1/q = 1/s − 1, 1/v = 1/r − 1
//! ```
//!
//! and an `(s; 2)` split writes `T = V·Δ0·Δ1·W` with `Δ1 = diag(d^{s/2})`,
//! `Δ0 = diag(d^{s/q})`, `1/q = 1/s − 1/2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{lorentz_quasinorm_real, quasinorm_of_sorted, LorentzParams, RearrangedSeq};
use crate::matrix::{DenseOperator, Matrix, SeqSpace, ZERO};
use crate::norms::{weak_l2_detailed, weak_l2_norm};
use crate::svd::svd;
use crate::verdict::SLACK;

/// Tolerance on the unit-norm invariants of functionals and vectors.
pub const UNIT_TOL: f64 = 1e-12;
/// Tolerance on the weak-l2 normalization of `(s; 2)` vector families.
pub const WEAK_TOL: f64 = 1e-10;

/// Representation with unit functionals and unit vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuclearRep {
    pub source: SeqSpace,
    pub target: SeqSpace,
    pub a: Vec<f64>,
    pub xprime: Vec<Vec<Complex64>>,
    pub y: Vec<Vec<Complex64>>,
}

/// Representation with unit functionals and a vector family of unit weak-l2 norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S2Rep {
    pub source: SeqSpace,
    pub target: SeqSpace,
    pub a: Vec<f64>,
    pub xprime: Vec<Vec<Complex64>>,
    pub y: Vec<Vec<Complex64>>,
}

fn check_common(
    source: &SeqSpace,
    target: &SeqSpace,
    a: &[f64],
    xprime: &[Vec<Complex64>],
    y: &[Vec<Complex64>],
) -> Result<()> {
    source.validate()?;
    target.validate()?;
    if xprime.len() != a.len() || y.len() != a.len() {
        return Err(Error::InvalidRepresentation(format!(
            "{} coefficients, {} functionals, {} vectors",
            a.len(),
            xprime.len(),
            y.len()
        )));
    }
    if let Some(bad) = a.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::InvalidRepresentation(format!("coefficient {bad} is not a finite nonnegative number")));
    }
    if let Some(k) = a.windows(2).position(|w| w[0] < w[1]) {
        return Err(Error::InvalidRepresentation(format!(
            "coefficients increase at position {}: {} < {}",
            k + 1,
            a[k],
            a[k + 1]
        )));
    }
    for (n, f) in xprime.iter().enumerate() {
        if f.len() != source.dim {
            return Err(Error::SpaceMismatch(format!("functional {n} has length {}, source is {source}", f.len())));
        }
        let norm = source.dual_norm(f);
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidRepresentation(format!("functional {n} has dual norm {norm}")));
        }
    }
    for (n, v) in y.iter().enumerate() {
        if v.len() != target.dim {
            return Err(Error::SpaceMismatch(format!("vector {n} has length {}, target is {target}", v.len())));
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidRepresentation(format!("vector {n} has non-finite entries")));
        }
    }
    Ok(())
}

fn represented(
    target: &SeqSpace,
    source: &SeqSpace,
    a: &[f64],
    xprime: &[Vec<Complex64>],
    y: &[Vec<Complex64>],
) -> Matrix {
    let mut m = Matrix::zeros(target.dim, source.dim);
    for ((an, f), v) in a.iter().zip(xprime).zip(y) {
        if *an == 0.0 {
            continue;
        }
        for (i, vi) in v.iter().enumerate() {
            let c = vi * *an;
            for (j, fj) in f.iter().enumerate() {
                m[(i, j)] += c * fj;
            }
        }
    }
    m
}

/// Stable reorder of terms by non-increasing coefficient.
fn sort_terms(
    a: Vec<f64>,
    xprime: Vec<Vec<Complex64>>,
    y: Vec<Vec<Complex64>>,
) -> (Vec<f64>, Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&i, &j| a[j].total_cmp(&a[i]));
    (
        idx.iter().map(|&i| a[i]).collect(),
        idx.iter().map(|&i| xprime[i].clone()).collect(),
        idx.iter().map(|&i| y[i].clone()).collect(),
    )
}

/// A vector of unit `p`-norm for any `p`: the first coordinate vector.
fn first_unit(dim: usize) -> Vec<Complex64> {
    let mut e = vec![ZERO; dim];
    e[0] = Complex64::new(1.0, 0.0);
    e
}

macro_rules! rep_accessors {
    () => {
        pub fn len(&self) -> usize {
            self.a.len()
        }

        pub fn is_empty(&self) -> bool {
            self.a.is_empty()
        }

        /// The represented matrix `Σ a_n y_n x'_nᵀ`.
        pub fn to_matrix(&self) -> Matrix {
            represented(&self.target, &self.source, &self.a, &self.xprime, &self.y)
        }

        pub fn to_operator(&self) -> DenseOperator {
            DenseOperator { entries: self.to_matrix(), source: self.source, target: self.target }
        }

        /// `W`: rows are the functionals.
        pub fn functional_matrix(&self) -> Matrix {
            Matrix::from_fn(self.len(), self.source.dim, |n, j| self.xprime[n][j])
        }

        /// `V`: columns are the vectors.
        pub fn vector_matrix(&self) -> Matrix {
            Matrix::from_fn(self.target.dim, self.len(), |i, n| self.y[n][i])
        }
    };
}

impl NuclearRep {
    pub fn new(
        source: SeqSpace,
        target: SeqSpace,
        a: Vec<f64>,
        xprime: Vec<Vec<Complex64>>,
        y: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let rep = NuclearRep { source, target, a, xprime, y };
        rep.validate()?;
        Ok(rep)
    }

    pub fn validate(&self) -> Result<()> {
        check_common(&self.source, &self.target, &self.a, &self.xprime, &self.y)?;
        for (n, v) in self.y.iter().enumerate() {
            let norm = self.target.norm(v);
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidRepresentation(format!("vector {n} has norm {norm}")));
            }
        }
        Ok(())
    }

    rep_accessors!();
}

impl S2Rep {
    pub fn new(
        source: SeqSpace,
        target: SeqSpace,
        a: Vec<f64>,
        xprime: Vec<Vec<Complex64>>,
        y: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let rep = S2Rep { source, target, a, xprime, y };
        rep.validate()?;
        Ok(rep)
    }

    pub fn validate(&self) -> Result<()> {
        check_common(&self.source, &self.target, &self.a, &self.xprime, &self.y)?;
        if !self.is_empty() {
            let w = weak_l2_norm(&self.y, self.target)?;
            if (w - 1.0).abs() > WEAK_TOL {
                return Err(Error::InvalidRepresentation(format!("vector family has weak-l2 norm {w}")));
            }
        }
        Ok(())
    }

    /// Moves the weak-l2 norm of the unit vectors into the coefficients.
    pub fn from_nuclear_rep(rep: &NuclearRep) -> Result<S2Rep> {
        rep.validate()?;
        if rep.is_empty() {
            return S2Rep::new(rep.source, rep.target, vec![], vec![], vec![]);
        }
        let w = weak_l2_norm(&rep.y, rep.target)?;
        Ok(S2Rep {
            source: rep.source,
            target: rep.target,
            a: rep.a.iter().map(|x| x * w).collect(),
            xprime: rep.xprime.clone(),
            y: rep.y.iter().map(|v| v.iter().map(|z| z / w).collect()).collect(),
        })
    }

    rep_accessors!();
}

/// `‖a‖_{s,r}` for `0 < r ≤ s ≤ 1`.
pub fn rep_quasinorm(rep: &NuclearRep, s: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= s && s <= 1.0) {
        return Err(Error::Regime(format!("(s, r)-nuclear value needs 0 < r <= s <= 1, got ({s}, {r})")));
    }
    lorentz_quasinorm_real(&rep.a, LorentzParams::new(s, r)?)
}

/// `‖a‖_s` for `0 < s ≤ 2`.
pub fn s2_rep_quasinorm(rep: &S2Rep, s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 2.0) {
        return Err(Error::Regime(format!("(s;2)-nuclear value needs 0 < s <= 2, got {s}")));
    }
    lorentz_quasinorm_real(&rep.a, LorentzParams::lp(s)?)
}

/// SVD representation between Hilbert spaces, column representation from `l_1`.
pub fn canonical_rep_from_matrix(op: &DenseOperator) -> Result<NuclearRep> {
    let (source, target) = (op.source, op.target);
    let m = &op.entries;
    if source.is_hilbert() && target.is_hilbert() {
        let s = svd(m)?;
        let (u, v) = (s.u.expect("factors requested"), s.v.expect("factors requested"));
        let k = s.values.len();
        let xprime = (0..k).map(|n| v.column(n).iter().map(|z| z.conj()).collect()).collect();
        let y = (0..k).map(|n| u.column(n)).collect();
        return NuclearRep::new(source, target, s.values, xprime, y);
    }
    if source.p == 1.0 {
        let mut a = Vec::with_capacity(source.dim);
        let mut xprime = Vec::with_capacity(source.dim);
        let mut y = Vec::with_capacity(source.dim);
        for j in 0..source.dim {
            let col = m.column(j);
            let norm = target.norm(&col);
            let mut e = vec![ZERO; source.dim];
            e[j] = Complex64::new(1.0, 0.0);
            xprime.push(e);
            if norm > 0.0 {
                y.push(col.iter().map(|z| z / norm).collect());
            } else {
                y.push(first_unit(target.dim));
            }
            a.push(norm);
        }
        let (a, xprime, y) = sort_terms(a, xprime, y);
        return NuclearRep::new(source, target, a, xprime, y);
    }
    Err(Error::Unsupported(format!("no canonical representation for {source} -> {target}")))
}

/// Row representation: `y_j = e_j`, `x'_j` the `j`-th row scaled to unit dual norm.
pub fn row_rep_from_matrix(op: &DenseOperator) -> Result<NuclearRep> {
    let (source, target) = (op.source, op.target);
    let m = &op.entries;
    let mut a = Vec::with_capacity(target.dim);
    let mut xprime = Vec::with_capacity(target.dim);
    let mut y = Vec::with_capacity(target.dim);
    for i in 0..target.dim {
        let row = m.row(i);
        let norm = source.dual_norm(row);
        if norm > 0.0 {
            xprime.push(row.iter().map(|z| z / norm).collect());
        } else {
            xprime.push(first_unit(source.dim));
        }
        let mut e = vec![ZERO; target.dim];
        e[i] = Complex64::new(1.0, 0.0);
        y.push(e);
        a.push(norm);
    }
    let (a, xprime, y) = sort_terms(a, xprime, y);
    NuclearRep::new(source, target, a, xprime, y)
}

/// Splits `a_n = b_n c_n` with `b = a^{p/s}`, `c = a^{p/2}` and absorbs `c` into the vectors.
pub fn convert_p_to_s2(rep: &NuclearRep, p: f64, s: f64) -> Result<S2Rep> {
    rep.validate()?;
    if !(p > 0.0 && s > 0.0) || ((1.0 / p) - (1.0 / s + 0.5)).abs() > 1e-12 * (1.0 / p) {
        return Err(Error::Regime(format!("need 1/p = 1/s + 1/2, got p = {p}, s = {s}")));
    }
    let b: Vec<f64> = rep.a.iter().map(|x| x.powf(p / s)).collect();
    let c: Vec<f64> = rep.a.iter().map(|x| x.powf(p / 2.0)).collect();
    let scaled: Vec<Vec<Complex64>> = rep.y.iter().zip(&c).map(|(v, cn)| v.iter().map(|z| z * *cn).collect()).collect();
    if rep.is_empty() || c.iter().all(|&x| x == 0.0) {
        return S2Rep::from_nuclear_rep(&NuclearRep { a: vec![0.0; rep.len()], ..rep.clone() });
    }
    let w = weak_l2_norm(&scaled, rep.target)?;
    Ok(S2Rep {
        source: rep.source,
        target: rep.target,
        a: b.iter().map(|x| x * w).collect(),
        xprime: rep.xprime.clone(),
        y: scaled.into_iter().map(|v| v.into_iter().map(|z| z / w).collect()).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SplitKind {
    Sr { s: f64, r: f64 },
    S2 { s: f64 },
}

/// Measured factor sizes next to the certified bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitBounds {
    /// `‖d‖_{s,r}` (or `‖d‖_s`).
    pub rep_value: f64,
    pub norm_w: f64,
    pub norm_v: f64,
    /// `‖Δ1‖_{l_∞ → l_2} = π_2(Δ1)`.
    pub norm_delta1: f64,
    pub norm_delta1_bound: f64,
    /// `‖Δ2‖_{l_2 → l_1}`; absent for `(s; 2)` splits.
    pub norm_delta2: Option<f64>,
    pub norm_delta2_bound: Option<f64>,
    pub delta0_params: LorentzParams,
    /// Quasinorm of the rearranged diagonal of `Δ0`, i.e. the true singular-value quantity.
    pub sigma_delta0: f64,
    /// The same weighted sum taken in index order.
    pub sigma_delta0_index_order: f64,
    pub sigma_delta0_bound: f64,
    /// `max(1, sigma_delta0 / sigma_delta0_bound)`.
    pub kappa: f64,
}

impl SplitBounds {
    pub fn delta1_holds(&self) -> bool {
        self.norm_delta1 <= self.norm_delta1_bound * (1.0 + SLACK)
            && match (self.norm_delta2, self.norm_delta2_bound) {
                (Some(m), Some(b)) => m <= b * (1.0 + SLACK),
                _ => true,
            }
    }

    pub fn delta0_holds(&self) -> bool {
        self.sigma_delta0 <= self.sigma_delta0_bound * (1.0 + SLACK)
    }

    pub fn index_order_holds(&self) -> bool {
        self.sigma_delta0_index_order <= self.sigma_delta0_bound * (1.0 + SLACK)
    }
}

/// `T = V·Δ2·Δ0·Δ1·W` (`Δ2` empty for `(s; 2)` splits).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitFactorization {
    pub kind: SplitKind,
    pub eps: f64,
    pub source: SeqSpace,
    pub target: SeqSpace,
    /// Coefficients kept after dropping zeros.
    pub d: Vec<f64>,
    pub w: Matrix,
    pub delta1: Vec<f64>,
    pub delta0: Vec<f64>,
    pub delta2: Vec<f64>,
    pub v: Matrix,
    pub bounds: SplitBounds,
}

impl SplitFactorization {
    pub fn terms(&self) -> usize {
        self.d.len()
    }

    /// Entrywise product of the diagonals; equals `d`.
    pub fn diagonal_product(&self) -> Vec<f64> {
        (0..self.terms())
            .map(|n| {
                let d2 = if self.delta2.is_empty() { 1.0 } else { self.delta2[n] };
                d2 * self.delta0[n] * self.delta1[n]
            })
            .collect()
    }

    pub fn reconstruct(&self) -> Matrix {
        self.v.scale_cols(&self.diagonal_product()).matmul(&self.w)
    }
}

fn recip(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

fn from_recip(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}

/// The Lorentz weighted sum evaluated on `values` in the given order.
pub fn index_order_quasinorm(values: &[f64], params: LorentzParams) -> f64 {
    let top = values.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    let inv_p = recip(params.p);
    if params.q.is_infinite() {
        return values.iter().enumerate().map(|(i, v)| v * ((i + 1) as f64).powf(inv_p)).fold(0.0, f64::max);
    }
    let q = params.q;
    let sum: f64 = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, &v)| (v / top).powf(q) * ((i + 1) as f64).powf(q * inv_p - 1.0))
        .sum();
    top * sum.powf(1.0 / q)
}

fn kept_terms(a: &[f64]) -> Vec<usize> {
    (0..a.len()).filter(|&n| a[n] > 0.0).collect()
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParams(format!("eps must be finite and >= 0, got {eps}")));
    }
    Ok(())
}

fn certify(what: &str, measured: f64, bound: f64) -> Result<()> {
    if measured <= bound * (1.0 + SLACK) {
        Ok(())
    } else {
        Err(Error::Certification { what: what.to_string(), measured, bound })
    }
}

/// Diagonal split of an `(s, r)`-nuclear representation, `0 < r ≤ s ≤ 1`.
///
/// The `Δ1`, `Δ2` bounds and the index-order `Δ0` sum are certified (an
/// excess is a bug). The rearranged `Δ0` quantity can exceed its bound when
/// `n^{1−r/s} d_n^{1−r}` is not monotone; that excess is recorded in `kappa`.
pub fn split_factorization_sr(rep: &NuclearRep, s: f64, r: f64, eps: f64) -> Result<SplitFactorization> {
    check_eps(eps)?;
    let value = rep_quasinorm(rep, s, r)?;
    let kept = kept_terms(&rep.a);
    let d: Vec<f64> = kept.iter().map(|&n| rep.a[n]).collect();
    let idx = |n: usize| (n + 1) as f64;
    let delta1: Vec<f64> = d.iter().enumerate().map(|(n, dn)| (idx(n).powf(r / s - 1.0) * dn.powf(r)).sqrt()).collect();
    let delta0: Vec<f64> = d.iter().enumerate().map(|(n, dn)| idx(n).powf(1.0 - r / s) * dn.powf(1.0 - r)).collect();
    let delta2 = delta1.clone();

    let scaled = (1.0 + eps) * value;
    let params = LorentzParams::new(from_recip(1.0 / s - 1.0), from_recip(1.0 / r - 1.0))?;
    let inv_v = 1.0 / r - 1.0;
    let norm_delta1 = delta1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let norm_delta1_bound = scaled.powf(r / 2.0);
    let sigma_delta0_bound = scaled.powf(r * inv_v);
    let sigma_delta0 = quasinorm_of_sorted(&RearrangedSeq::from_moduli(&delta0).values, params);
    let sigma_delta0_index_order = index_order_quasinorm(&delta0, params);

    let w = Matrix::from_fn(d.len(), rep.source.dim, |n, j| rep.xprime[kept[n]][j]);
    let v = Matrix::from_fn(rep.target.dim, d.len(), |i, n| rep.y[kept[n]][i]);
    let norm_w = (0..d.len()).map(|n| rep.source.dual_norm(w.row(n))).fold(0.0, f64::max);
    let norm_v = (0..d.len()).map(|n| rep.target.norm(&v.column(n))).fold(0.0, f64::max);

    let bounds = SplitBounds {
        rep_value: value,
        norm_w,
        norm_v,
        norm_delta1,
        norm_delta1_bound,
        norm_delta2: Some(norm_delta1),
        norm_delta2_bound: Some(norm_delta1_bound),
        delta0_params: params,
        sigma_delta0,
        sigma_delta0_index_order,
        sigma_delta0_bound,
        kappa: kappa(sigma_delta0, sigma_delta0_bound),
    };
    certify("norm of Delta1 (l_inf -> l_2)", norm_delta1, norm_delta1_bound)?;
    certify("index-order sum of Delta0", sigma_delta0_index_order, sigma_delta0_bound)?;
    Ok(SplitFactorization {
        kind: SplitKind::Sr { s, r },
        eps,
        source: rep.source,
        target: rep.target,
        d,
        w,
        delta1,
        delta0,
        delta2,
        v,
        bounds,
    })
}

fn kappa(measured: f64, bound: f64) -> f64 {
    if bound > 0.0 && measured > bound * (1.0 + crate::verdict::SLACK) {
        measured / bound
    } else {
        1.0
    }
}

/// Diagonal split of an `(s; 2)`-nuclear representation, `0 < s ≤ 2`.
pub fn split_factorization_s2(rep: &S2Rep, s: f64, eps: f64) -> Result<SplitFactorization> {
    check_eps(eps)?;
    let value = s2_rep_quasinorm(rep, s)?;
    let kept = kept_terms(&rep.a);
    let d: Vec<f64> = kept.iter().map(|&n| rep.a[n]).collect();
    let inv_q = 1.0 / s - 0.5;
    let delta1: Vec<f64> = d.iter().map(|dn| dn.powf(s / 2.0)).collect();
    let delta0: Vec<f64> = d.iter().map(|dn| dn.powf(s * inv_q)).collect();

    let scaled = (1.0 + eps) * value;
    let q = from_recip(inv_q);
    let params = LorentzParams::lp(q)?;
    let norm_delta1 = delta1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let norm_delta1_bound = scaled.powf(s / 2.0);
    let sigma_delta0_bound = scaled.powf(s * inv_q);
    let sigma_delta0 = quasinorm_of_sorted(&RearrangedSeq::from_moduli(&delta0).values, params);
    let sigma_delta0_index_order = index_order_quasinorm(&delta0, params);

    let w = Matrix::from_fn(d.len(), rep.source.dim, |n, j| rep.xprime[kept[n]][j]);
    let kept_y: Vec<Vec<Complex64>> = kept.iter().map(|&n| rep.y[n].clone()).collect();
    let v = Matrix::from_fn(rep.target.dim, d.len(), |i, n| kept_y[n][i]);
    let norm_w = (0..d.len()).map(|n| rep.source.dual_norm(w.row(n))).fold(0.0, f64::max);
    let norm_v = if kept_y.is_empty() { 0.0 } else { weak_l2_detailed(&kept_y, rep.target)?.value };

    let bounds = SplitBounds {
        rep_value: value,
        norm_w,
        norm_v,
        norm_delta1,
        norm_delta1_bound,
        norm_delta2: None,
        norm_delta2_bound: None,
        delta0_params: params,
        sigma_delta0,
        sigma_delta0_index_order,
        sigma_delta0_bound,
        kappa: kappa(sigma_delta0, sigma_delta0_bound),
    };
    certify("pi_2 of Delta1", norm_delta1, norm_delta1_bound)?;
    certify("sigma_q of Delta0", sigma_delta0, sigma_delta0_bound)?;
    Ok(SplitFactorization {
        kind: SplitKind::S2 { s },
        eps,
        source: rep.source,
        target: rep.target,
        d,
        w,
        delta1,
        delta0,
        delta2: Vec::new(),
        v,
        bounds,
    })
}
