//! Certified factorizations `T_m ⋯ T_1 = B·U·A` of products of nuclear operators.
//!
//! Every link is split into diagonal pieces; the pieces meeting at each seam
//! are multiplied into a Hilbert–Schmidt operator, and the middle operator `U`
//! collects the seams and the `Δ0` factors. Each certified quantity goes into
//! an ordered ledger. The product of `constant · factor` over the ledger is
//! `gamma_upper`, and every record's measured value is checked against its
//! bound as it is written.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{Exponent, Recip};
use crate::lorentz::quasinorm_of_sorted;
use crate::lorentz::LorentzParams;
use crate::matrix::{Matrix, SeqSpace};
use crate::nuclear::{
    rep_quasinorm, s2_rep_quasinorm, split_factorization_s2, split_factorization_sr, NuclearRep, S2Rep,
    SplitFactorization,
};
use crate::schatten::{holder_compose, schatten_lorentz_quasinorm, significant_singular_values};
use crate::svd::svd;
use crate::verdict::{Verdict, SLACK};

/// Relative threshold for numerical ranks and subspaces.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainMode {
    Sr,
    S2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ChainLink {
    Sr { rep: NuclearRep, s: Exponent, r: Exponent },
    S2 { rep: S2Rep, s: Exponent },
}

impl ChainLink {
    pub fn mode(&self) -> ChainMode {
        match self {
            ChainLink::Sr { .. } => ChainMode::Sr,
            ChainLink::S2 { .. } => ChainMode::S2,
        }
    }

    pub fn source(&self) -> SeqSpace {
        match self {
            ChainLink::Sr { rep, .. } => rep.source,
            ChainLink::S2 { rep, .. } => rep.source,
        }
    }

    pub fn target(&self) -> SeqSpace {
        match self {
            ChainLink::Sr { rep, .. } => rep.target,
            ChainLink::S2 { rep, .. } => rep.target,
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        match self {
            ChainLink::Sr { rep, .. } => rep.to_matrix(),
            ChainLink::S2 { rep, .. } => rep.to_matrix(),
        }
    }

    pub fn s(&self) -> Exponent {
        match self {
            ChainLink::Sr { s, .. } | ChainLink::S2 { s, .. } => *s,
        }
    }

    /// `‖a‖_{s,r}` or `‖a‖_s` of the link's representation.
    pub fn rep_value(&self) -> Result<f64> {
        match self {
            ChainLink::Sr { rep, s, r } => rep_quasinorm(rep, s.value(), r.value()),
            ChainLink::S2 { rep, s } => s2_rep_quasinorm(rep, s.value()),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ChainLink::Sr { rep, s, r } => {
                let (s, r) = (s.value(), r.value());
                if !(r > 0.0 && r <= s && s <= 1.0) {
                    return Err(Error::Regime(format!("SR link needs 0 < r <= s <= 1, got ({s}, {r})")));
                }
                rep.validate()
            }
            ChainLink::S2 { rep, s } => {
                let s = s.value();
                if !(s > 0.0 && s <= 2.0) {
                    return Err(Error::Regime(format!("S2 link needs 0 < s <= 2, got {s}")));
                }
                rep.validate()
            }
        }
    }
}

/// Links in application order: `T = T_m ⋯ T_1` with `links[0] = T_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub links: Vec<ChainLink>,
}

impl ChainSpec {
    pub fn new(links: Vec<ChainLink>) -> Result<Self> {
        let chain = ChainSpec { links };
        chain.validate()?;
        Ok(chain)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self.links.first().ok_or_else(|| Error::InvalidParams("a chain needs at least one link".into()))?;
        if self.links.iter().any(|l| l.mode() != first.mode()) {
            return Err(Error::InvalidParams("SR and S2 links cannot be mixed in one chain".into()));
        }
        for (k, pair) in self.links.windows(2).enumerate() {
            if pair[0].target() != pair[1].source() {
                return Err(Error::SpaceMismatch(format!(
                    "link {} ends in {} but link {} starts in {}",
                    k + 1,
                    pair[0].target(),
                    k + 2,
                    pair[1].source()
                )));
            }
        }
        self.links.iter().try_for_each(ChainLink::validate)
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn mode(&self) -> ChainMode {
        self.links[0].mode()
    }

    pub fn source(&self) -> SeqSpace {
        self.links[0].source()
    }

    pub fn target(&self) -> SeqSpace {
        self.links[self.links.len() - 1].target()
    }

    /// `X_1 = X_{m+1}`, so eigenvalues make sense.
    pub fn is_square(&self) -> bool {
        self.source() == self.target()
    }

    /// `T_m ⋯ T_1`.
    pub fn product(&self) -> Matrix {
        let mut p = self.links[0].to_matrix();
        for link in &self.links[1..] {
            p = link.to_matrix().matmul(&p);
        }
        p
    }

    pub fn rep_values(&self) -> Result<Vec<f64>> {
        self.links.iter().map(ChainLink::rep_value).collect()
    }

    pub fn s_list(&self) -> Vec<Exponent> {
        self.links.iter().map(ChainLink::s).collect()
    }

    /// `r_k` for SR chains, `s_k` for S2 chains.
    pub fn r_list(&self) -> Vec<Exponent> {
        self.links
            .iter()
            .map(|l| match l {
                ChainLink::Sr { r, .. } => *r,
                ChainLink::S2 { s, .. } => *s,
            })
            .collect()
    }
}

fn sum_recip(list: &[Exponent]) -> Recip {
    list.iter().map(|e| e.recip()).sum()
}

/// Class indices of the middle operator of an `(s_k, r_k)` chain:
/// `1/s = Σ 1/s_k − (m+1)/2`, likewise for `r`.
pub fn exponents_theorem1(s_list: &[Exponent], r_list: &[Exponent]) -> Result<(Exponent, Exponent)> {
    let m = s_list.len();
    if m == 0 || r_list.len() != m {
        return Err(Error::InvalidParams(format!("{} s-exponents and {} r-exponents", m, r_list.len())));
    }
    let shift = Recip::ratio(m as i64 + 1, 2);
    let (ss, rs) = (sum_recip(s_list), sum_recip(r_list));
    if !(ss > shift && rs > shift) {
        return Err(Error::Regime(format!(
            "need sum 1/s_k and sum 1/r_k above (m+1)/2 = {}, got {} and {}",
            shift.to_f64(),
            ss.to_f64(),
            rs.to_f64()
        )));
    }
    Ok(((ss - shift).exponent(), (rs - shift).exponent()))
}

/// `1/s = Σ 1/s_k − 1/2`.
pub fn exponents_theorem3(s_list: &[Exponent]) -> Result<Exponent> {
    if s_list.is_empty() {
        return Err(Error::InvalidParams("no exponents".into()));
    }
    let half = Recip::ratio(1, 2);
    let ss = sum_recip(s_list);
    if !(ss > half) {
        return Err(Error::Regime(format!("need sum 1/s_k above 1/2, got {}", ss.to_f64())));
    }
    Ok((ss - half).exponent())
}

/// One certified quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub desc: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<LorentzParams>,
    /// Composition or rearrangement constant introduced here.
    pub constant: f64,
    /// Power of a link's representation value contributed to `gamma_upper`.
    pub factor: f64,
    pub measured: Option<f64>,
    pub bound: Option<f64>,
}

impl LedgerRecord {
    fn check(desc: impl Into<String>, params: Option<LorentzParams>, measured: f64, bound: f64) -> Self {
        LedgerRecord {
            desc: desc.into(),
            params,
            constant: 1.0,
            factor: 1.0,
            measured: Some(measured),
            bound: Some(bound),
        }
    }

    fn with(mut self, constant: f64, factor: f64) -> Self {
        self.constant = constant;
        self.factor = factor;
        self
    }

    pub fn holds(&self) -> bool {
        match (self.measured, self.bound) {
            (Some(m), Some(b)) => m <= b * (1.0 + SLACK),
            _ => true,
        }
    }
}

/// `T = B·U·A` with `A: X_1 → l_2`, `U: l_2 → l_2`, `B: l_2 → X_{m+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorTriple {
    pub mode: ChainMode,
    pub source: SeqSpace,
    pub target: SeqSpace,
    pub a: Matrix,
    pub u: Matrix,
    pub b: Matrix,
    pub s: Exponent,
    pub r: Exponent,
    /// Certified class of `U`.
    pub params: LorentzParams,
    pub sigma_u: f64,
    pub a_cert: f64,
    pub u_bound: f64,
    pub b_cert: f64,
    /// Product of seam, join and rearrangement constants.
    pub c_tilde: f64,
    /// Constant of the last composition into `U`.
    pub final_constant: f64,
    pub rep_values: Vec<f64>,
    pub eps: f64,
    pub gamma_upper: f64,
    pub ledger: Vec<LedgerRecord>,
    pub normalized: bool,
    pub b_injective: bool,
}

impl FactorTriple {
    pub fn product(&self) -> Matrix {
        self.b.matmul(&self.u).matmul(&self.a)
    }

    /// `‖B·U·A − T‖_F / (1 + ‖T‖_F)`.
    pub fn reconstruction_error(&self, t: &Matrix) -> f64 {
        self.product().sub(t).frobenius_norm() / (1.0 + t.frobenius_norm())
    }

    pub fn ledger_product(&self) -> f64 {
        self.ledger.iter().map(|r| r.constant * r.factor).product()
    }

    pub fn all_records_hold(&self) -> bool {
        self.ledger.iter().all(LedgerRecord::holds)
    }

    /// `final_constant · c̃ · ∏ (1+ε) ν_k`.
    pub fn claimed_bound(&self) -> f64 {
        self.final_constant * self.c_tilde * self.rep_values.iter().map(|v| (1.0 + self.eps) * v).product::<f64>()
    }
}

struct Ledger(Vec<LedgerRecord>);

impl Ledger {
    fn push(&mut self, rec: LedgerRecord) -> Result<()> {
        let ok = rec.holds();
        let (what, measured, bound) = (rec.desc.clone(), rec.measured, rec.bound);
        self.0.push(rec);
        if ok {
            Ok(())
        } else {
            Err(Error::Certification { what, measured: measured.unwrap_or(f64::NAN), bound: bound.unwrap_or(f64::NAN) })
        }
    }
}

fn hilbert_schmidt() -> LorentzParams {
    LorentzParams { p: 2.0, q: 2.0 }
}

fn lorentz_of(s: Exponent, r: Exponent) -> LorentzParams {
    LorentzParams { p: s.value(), q: r.value() }
}

fn sigma(m: &Matrix, params: LorentzParams) -> Result<f64> {
    schatten_lorentz_quasinorm(m, params)
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Per-link records for an SR split; returns `(b1, b0 incl. κ, b2)`.
fn record_sr_link(ledger: &mut Ledger, k: usize, sp: &SplitFactorization) -> Result<(f64, f64, f64)> {
    let b = &sp.bounds;
    let b2 = b.norm_delta2_bound.unwrap_or(b.norm_delta1_bound);
    ledger.push(
        LedgerRecord::check(format!("link {k}: Delta1 l_inf -> l_2"), None, b.norm_delta1, b.norm_delta1_bound)
            .with(1.0, b.norm_delta1_bound),
    )?;
    ledger.push(
        LedgerRecord::check(format!("link {k}: Delta2 l_2 -> l_1"), None, b.norm_delta2.unwrap_or(b.norm_delta1), b2)
            .with(1.0, b2),
    )?;
    let b0 = b.kappa * b.sigma_delta0_bound;
    ledger.push(
        LedgerRecord::check(
            format!("link {k}: Delta0 (rearrangement factor {:.6})", b.kappa),
            Some(b.delta0_params),
            b.sigma_delta0,
            b0,
        )
        .with(b.kappa, b.sigma_delta0_bound),
    )?;
    Ok((b.norm_delta1_bound, b0, b2))
}

fn rep_exponents(chain: &ChainSpec) -> (Vec<Exponent>, Vec<Exponent>) {
    (chain.s_list(), chain.r_list())
}

/// Certified factorization of an `(s_k, r_k)` chain.
///
/// Seams are `U_{k−1} = Δ1^{(k)} W_k V_{k−1} Δ2^{(k−1)} Δ0^{(k−1)}`; the middle
/// operator is `U = Δ0^{(m)} U_{m−1} ⋯ U_1`, `A = Δ1^{(1)} W_1` and
/// `B = V_m Δ2^{(m)}`. A one-link chain goes to [`compose_single`].
pub fn compose_theorem1(chain: &ChainSpec, eps: f64) -> Result<FactorTriple> {
    chain.validate()?;
    if chain.mode() != ChainMode::Sr {
        return Err(Error::Misuse("compose_theorem1 needs an SR chain".into()));
    }
    if chain.len() == 1 {
        if let ChainLink::Sr { rep, s, r } = &chain.links[0] {
            return compose_single(rep, *s, *r, eps);
        }
    }
    let (s_list, r_list) = rep_exponents(chain);
    let (s, r) = exponents_theorem1(&s_list, &r_list)?;
    let m = chain.len();
    let splits: Vec<SplitFactorization> = chain
        .links
        .iter()
        .map(|l| match l {
            ChainLink::Sr { rep, s, r } => split_factorization_sr(rep, s.value(), r.value(), eps),
            ChainLink::S2 { .. } => unreachable!("mode checked"),
        })
        .collect::<Result<_>>()?;

    let mut ledger = Ledger(Vec::new());
    let mut certs = Vec::with_capacity(m);
    for (k, sp) in splits.iter().enumerate() {
        certs.push(record_sr_link(&mut ledger, k + 1, sp)?);
    }
    let mut c_tilde: f64 = splits.iter().map(|sp| sp.bounds.kappa).product();

    // seams
    let mut seams: Vec<(Matrix, LorentzParams, f64)> = Vec::with_capacity(m - 1);
    for k in 1..m {
        let (prev, next) = (&splits[k - 1], &splits[k]);
        let bracket = next.w.matmul(&prev.v).scale_rows(&next.delta1).scale_cols(&prev.delta2);
        let hs_bound = certs[k].0 * certs[k - 1].2;
        ledger.push(LedgerRecord::check(
            format!("seam {k}: sigma_2 of Delta1 W V Delta2"),
            Some(hilbert_schmidt()),
            bracket.frobenius_norm(),
            hs_bound,
        ))?;
        let seam = bracket.scale_cols(&prev.delta0);
        let h = holder_compose(hilbert_schmidt(), prev.bounds.delta0_params)?;
        let bound = h.constant * hs_bound * certs[k - 1].1;
        ledger.push(
            LedgerRecord::check(format!("seam {k}: U_{k} in S_(u,w)"), Some(h.result), sigma(&seam, h.result)?, bound)
                .with(h.constant, 1.0),
        )?;
        c_tilde *= h.constant;
        seams.push((seam, h.result, bound));
    }

    // left fold over seams
    let mut iter = seams.into_iter();
    let (mut p, mut p_class, mut p_bound) = iter.next().expect("m >= 2");
    for (j, (seam, class, bound)) in iter.enumerate() {
        let h = holder_compose(class, p_class)?;
        p = seam.matmul(&p);
        p_bound *= h.constant * bound;
        p_class = h.result;
        ledger.push(
            LedgerRecord::check(format!("join seams 1..{}", j + 2), Some(p_class), sigma(&p, p_class)?, p_bound)
                .with(h.constant, 1.0),
        )?;
        c_tilde *= h.constant;
    }

    let last = &splits[m - 1];
    let h = holder_compose(last.bounds.delta0_params, p_class)?;
    let u = p.scale_rows(&last.delta0);
    let params = lorentz_of(s, r);
    check_class(h.result, params)?;
    let u_bound = h.constant * certs[m - 1].1 * p_bound;
    let sigma_u = sigma(&u, params)?;
    ledger.push(
        LedgerRecord::check("U = Delta0^(m) U_(m-1) ... U_1", Some(params), sigma_u, u_bound).with(h.constant, 1.0),
    )?;

    let first = &splits[0];
    let a = first.w.scale_rows(&first.delta1);
    let b = last.v.scale_cols(&last.delta2);
    let (a_cert, b_cert) = (certs[0].0, certs[m - 1].2);
    ledger.push(LedgerRecord::check("A = Delta1^(1) W_1", None, l2(&first.delta1) * first.bounds.norm_w, a_cert))?;
    ledger.push(LedgerRecord::check("B = V_m Delta2^(m)", None, l2(&last.delta2) * last.bounds.norm_v, b_cert))?;

    Ok(FactorTriple {
        mode: ChainMode::Sr,
        source: chain.source(),
        target: chain.target(),
        a,
        u,
        b,
        s,
        r,
        params,
        sigma_u,
        a_cert,
        u_bound,
        b_cert,
        c_tilde,
        final_constant: h.constant,
        rep_values: chain.rep_values()?,
        eps,
        gamma_upper: a_cert * u_bound * b_cert,
        ledger: ledger.0,
        normalized: false,
        b_injective: false,
    })
}

fn check_class(got: LorentzParams, want: LorentzParams) -> Result<()> {
    let close = |x: f64, y: f64| (x.is_infinite() && y.is_infinite()) || (x - y).abs() <= 1e-9 * x.abs().max(y.abs());
    if close(got.p, want.p) && close(got.q, want.q) {
        Ok(())
    } else {
        Err(Error::Misuse(format!("composition produced class {got:?}, exponent law gives {want:?}")))
    }
}

/// One link: `A = Δ1 W`, `U = Δ0`, `B = V Δ2`, with `U` in `S_{q,v}`,
/// `1/q = 1/s − 1`, `1/v = 1/r − 1`.
pub fn compose_single(rep: &NuclearRep, s: Exponent, r: Exponent, eps: f64) -> Result<FactorTriple> {
    let link = ChainLink::Sr { rep: rep.clone(), s, r };
    link.validate()?;
    let sp = split_factorization_sr(rep, s.value(), r.value(), eps)?;
    let mut ledger = Ledger(Vec::new());
    let (b1, b0, b2) = record_sr_link(&mut ledger, 1, &sp)?;
    let one = Recip::int(1);
    let (cs, cr) = ((s.recip() - one).exponent(), (r.recip() - one).exponent());
    let params = sp.bounds.delta0_params;
    check_class(params, lorentz_of(cs, cr))?;
    let u = Matrix::from_diag(&sp.delta0);
    let sigma_u = sigma(&u, params)?;
    ledger.push(LedgerRecord::check("U = Delta0", Some(params), sigma_u, b0))?;
    ledger.push(LedgerRecord::check("A = Delta1 W", None, l2(&sp.delta1) * sp.bounds.norm_w, b1))?;
    ledger.push(LedgerRecord::check("B = V Delta2", None, l2(&sp.delta2) * sp.bounds.norm_v, b2))?;
    Ok(FactorTriple {
        mode: ChainMode::Sr,
        source: rep.source,
        target: rep.target,
        a: sp.w.scale_rows(&sp.delta1),
        u,
        b: sp.v.scale_cols(&sp.delta2),
        s: cs,
        r: cr,
        params,
        sigma_u,
        a_cert: b1,
        u_bound: b0,
        b_cert: b2,
        c_tilde: sp.bounds.kappa,
        final_constant: 1.0,
        rep_values: vec![sp.bounds.rep_value],
        eps,
        gamma_upper: b1 * b0 * b2,
        ledger: ledger.0,
        normalized: false,
        b_injective: false,
    })
}

/// Certified factorization of an `(s_k; 2)` chain.
///
/// Seams are `Δ1^{(k+1)} W_{k+1} V_k` (Hilbert–Schmidt); `U` alternates the
/// `Δ0` factors with the seams, `A = Δ1^{(1)} W_1`, `B = V_m`. All classes
/// are plain Schatten classes, so every constant is 1.
pub fn compose_theorem3(chain: &ChainSpec, eps: f64) -> Result<FactorTriple> {
    chain.validate()?;
    if chain.mode() != ChainMode::S2 {
        return Err(Error::Misuse("compose_theorem3 needs an S2 chain".into()));
    }
    let s = exponents_theorem3(&chain.s_list())?;
    let m = chain.len();
    let splits: Vec<SplitFactorization> = chain
        .links
        .iter()
        .map(|l| match l {
            ChainLink::S2 { rep, s } => split_factorization_s2(rep, s.value(), eps),
            ChainLink::Sr { .. } => unreachable!("mode checked"),
        })
        .collect::<Result<_>>()?;

    let mut ledger = Ledger(Vec::new());
    let mut b1 = Vec::with_capacity(m);
    let mut b0 = Vec::with_capacity(m);
    for (k, sp) in splits.iter().enumerate() {
        let b = &sp.bounds;
        ledger.push(
            LedgerRecord::check(format!("link {}: pi_2 of Delta1", k + 1), None, b.norm_delta1, b.norm_delta1_bound)
                .with(1.0, b.norm_delta1_bound),
        )?;
        ledger.push(
            LedgerRecord::check(
                format!("link {}: Delta0", k + 1),
                Some(b.delta0_params),
                b.sigma_delta0,
                b.sigma_delta0_bound,
            )
            .with(1.0, b.sigma_delta0_bound),
        )?;
        b1.push(b.norm_delta1_bound);
        b0.push(b.sigma_delta0_bound);
    }

    let mut p = Matrix::from_diag(&splits[0].delta0);
    let mut p_class = splits[0].bounds.delta0_params;
    let mut p_bound = b0[0];
    for k in 1..m {
        let (prev, next) = (&splits[k - 1], &splits[k]);
        let seam = next.w.matmul(&prev.v).scale_rows(&next.delta1);
        ledger.push(LedgerRecord::check(
            format!("seam {k}: sigma_2 of Delta1 W V"),
            Some(hilbert_schmidt()),
            seam.frobenius_norm(),
            b1[k],
        ))?;
        let h = holder_compose(hilbert_schmidt(), p_class)?;
        p = seam.matmul(&p);
        p_bound *= b1[k];
        let h2 = holder_compose(next.bounds.delta0_params, h.result)?;
        p = p.scale_rows(&next.delta0);
        p_bound *= b0[k];
        p_class = h2.result;
        debug_assert_eq!(h.constant * h2.constant, 1.0);
        ledger.push(LedgerRecord::check(
            format!("partial product through link {}", k + 1),
            Some(p_class),
            sigma(&p, p_class)?,
            p_bound,
        ))?;
    }
    let params = lorentz_of(s, s);
    check_class(p_class, params)?;
    let sigma_u = sigma(&p, params)?;
    ledger.push(LedgerRecord::check("U", Some(params), sigma_u, p_bound))?;

    let first = &splits[0];
    let last = &splits[m - 1];
    let a = first.w.scale_rows(&first.delta1);
    let a_cert = b1[0];
    ledger.push(LedgerRecord::check("A = Delta1^(1) W_1", None, l2(&first.delta1) * first.bounds.norm_w, a_cert))?;
    ledger.push(LedgerRecord::check("B = V_m", None, last.bounds.norm_v, 1.0))?;

    Ok(FactorTriple {
        mode: ChainMode::S2,
        source: chain.source(),
        target: chain.target(),
        a,
        u: p,
        b: last.v.clone(),
        s,
        r: s,
        params,
        sigma_u,
        a_cert,
        u_bound: p_bound,
        b_cert: 1.0,
        c_tilde: 1.0,
        final_constant: 1.0,
        rep_values: chain.rep_values()?,
        eps,
        gamma_upper: a_cert * p_bound,
        ledger: ledger.0,
        normalized: false,
        b_injective: false,
    })
}

/// Scales `A` and `B` to certified norm 1 and moves the scalars into `U`.
pub fn normalize_factorization(ft: &FactorTriple, delta: f64) -> Result<FactorTriple> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParams(format!("delta must be >= 0, got {delta}")));
    }
    if ft.a_cert == 0.0 || ft.b_cert == 0.0 {
        return Err(Error::Degenerate("a factor has zero certified norm".into()));
    }
    let scale = ft.a_cert * ft.b_cert;
    let mut out = ft.clone();
    out.a = ft.a.scale(1.0 / ft.a_cert);
    out.b = ft.b.scale(1.0 / ft.b_cert);
    out.u = ft.u.scale(scale);
    out.sigma_u = sigma(&out.u, ft.params)?;
    out.u_bound = ft.u_bound * scale;
    out.a_cert = 1.0;
    out.b_cert = 1.0;
    out.normalized = true;
    let mut ledger = Ledger(out.ledger);
    ledger.push(LedgerRecord::check("normalized U", Some(ft.params), out.sigma_u, (1.0 + delta) * ft.gamma_upper))?;
    out.ledger = ledger.0;
    Ok(out)
}

/// Orthonormal basis of the span of the singular vectors above [`RANK_TOL`].
fn dominant_basis(m: &Matrix, left: bool) -> Result<Matrix> {
    let s = svd(m)?;
    let rank = s.numerical_rank(RANK_TOL);
    let f = if left { s.u } else { s.v }.expect("factors requested");
    Ok(Matrix::from_fn(f.rows(), rank, |i, j| f[(i, j)]))
}

/// Restricts the factorization so that `B` is injective with range `T(X)`.
pub fn make_b_injective(ft: &FactorTriple) -> Result<FactorTriple> {
    let ua = ft.u.matmul(&ft.a);
    let q = dominant_basis(&ua, true)?;
    let b1 = ft.b.matmul(&q);
    let u1 = q.adjoint().matmul(&ft.u);
    let rr = dominant_basis(&b1, false)?;
    let mut out = ft.clone();
    out.b = b1.matmul(&rr);
    out.u = rr.adjoint().matmul(&u1);
    out.sigma_u = sigma(&out.u, ft.params)?;
    out.b_injective = true;
    let mut ledger = Ledger(out.ledger);
    ledger.push(LedgerRecord::check("U restricted to injective B", Some(ft.params), out.sigma_u, ft.u_bound))?;
    out.ledger = ledger.0;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DowngradeReport {
    pub t: f64,
    /// `dim T(X)`, read off the compressed middle operator.
    pub rank: usize,
    pub factor: f64,
    /// `rank^{1/t − 1/q} · gamma_upper`.
    pub bound: f64,
    /// `‖A‖·σ_{p,t}(U')·‖B‖` for the compressed `U'`.
    pub measured: f64,
    pub verdict: Verdict,
}

/// Index downgrade from the class `(p, q)` of `ft` to `(p, t)`.
///
/// `U' = P_2 U P_1` with `P_1` onto the range of `A` and `P_2` onto the
/// orthogonal complement of the kernel of `B` still factors `T`, and its rank
/// is `dim T(X)`.
pub fn finite_dim_gamma_downgrade(ft: &FactorTriple, t: f64) -> Result<DowngradeReport> {
    let (p, q) = (ft.params.p, ft.params.q);
    if !(t > 0.0 && t <= q) {
        return Err(Error::Regime(format!("downgrade needs 0 < t <= {q}, got {t}")));
    }
    let q1 = dominant_basis(&ft.a, true)?;
    let q2 = dominant_basis(&ft.b, false)?;
    let compressed = q2.matmul(&q2.adjoint()).matmul(&ft.u).matmul(&q1).matmul(&q1.adjoint());
    let mu = {
        let mut mu = significant_singular_values(&compressed)?;
        let floor = RANK_TOL * mu.first().copied().unwrap_or(0.0);
        mu.iter_mut().filter(|v| **v <= floor).for_each(|v| *v = 0.0);
        mu
    };
    let rank = mu.iter().filter(|&&v| v > 0.0).count();
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let factor = if rank == 0 { 1.0 } else { (rank as f64).powf(inv(t) - inv(q)) };
    let bound = factor * ft.gamma_upper;
    let measured = ft.a_cert * quasinorm_of_sorted(&mu, LorentzParams::new(p, t)?) * ft.b_cert;
    let verdict = Verdict::le("finite-dimensional downgrade", "corollary 6", measured, bound)
        .with_detail(format!("rank {rank}, factor {factor:e}"));
    Ok(DowngradeReport { t, rank, factor, bound, measured, verdict })
}
