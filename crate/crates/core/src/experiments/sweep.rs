//! DFT sharpness sweep: measured quantities against `n` and their log-log slopes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{
    compose_theorem1, compose_theorem3, finite_dim_gamma_downgrade, ChainMode, ChainSpec, FactorTriple,
};
use crate::error::{Error, Result};
use crate::exponent::{Exponent, Recip};
use crate::lorentz::{lorentz_quasinorm, LorentzParams};
use crate::spectral::eigen_sequence;

use super::config::{ExperimentConfig, RepKind};
use super::dft::{dft_chain, link_value_slope};

/// Fitted slopes further than this from the prediction are flagged.
pub const SLOPE_TOL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub t: Exponent,
    /// `‖λ(A_n^m)‖` at the sharp eigenvalue exponent (`s̄` for S2 chains, Theorem 2's `q` for SR).
    pub eig_sharp: f64,
    /// `‖λ(A_n^m)‖_t`, a lower bound for the `S_t` factorization quality.
    pub eig_t: f64,
    /// `‖λ(A_n^m)‖` in the class of the middle factor, a lower bound for `gamma_upper`.
    pub eig_class: f64,
    /// Largest `| |λ| − 1 |`.
    pub modulus_deviation: f64,
    pub rep_product_col: f64,
    pub rep_product_row: f64,
    pub gamma_upper_col: f64,
    pub gamma_upper_row: f64,
    /// `rank^{1/t − 1/q} · gamma_upper`.
    pub downgraded_col: f64,
    pub downgraded_row: f64,
    pub rank: usize,
    pub reconstruction_error: f64,
    pub lower_le_upper: bool,
}

impl SweepRow {
    pub const COLUMNS: [&'static str; 15] = [
        "n",
        "t",
        "eig_sharp",
        "eig_t",
        "eig_class",
        "modulus_deviation",
        "rep_product_col",
        "rep_product_row",
        "gamma_upper_col",
        "gamma_upper_row",
        "downgraded_col",
        "downgraded_row",
        "rank",
        "reconstruction_error",
        "lower_le_upper",
    ];

    pub fn record(&self) -> Vec<String> {
        let f = |x: f64| format!("{x:e}");
        vec![
            self.n.to_string(),
            self.t.to_string(),
            f(self.eig_sharp),
            f(self.eig_t),
            f(self.eig_class),
            f(self.modulus_deviation),
            f(self.rep_product_col),
            f(self.rep_product_row),
            f(self.gamma_upper_col),
            f(self.gamma_upper_row),
            f(self.downgraded_col),
            f(self.downgraded_row),
            self.rank.to_string(),
            f(self.reconstruction_error),
            self.lower_le_upper.to_string(),
        ]
    }

    fn value(&self, column: &str) -> f64 {
        match column {
            "eig_sharp" => self.eig_sharp,
            "eig_t" => self.eig_t,
            "eig_class" => self.eig_class,
            "rep_product_col" => self.rep_product_col,
            "rep_product_row" => self.rep_product_row,
            "gamma_upper_col" => self.gamma_upper_col,
            "gamma_upper_row" => self.gamma_upper_row,
            "downgraded_col" => self.downgraded_col,
            "downgraded_row" => self.downgraded_row,
            other => panic!("no fitted column `{other}`"),
        }
    }

    fn all_finite(&self) -> bool {
        [
            self.eig_sharp,
            self.eig_t,
            self.eig_class,
            self.rep_product_col,
            self.rep_product_row,
            self.gamma_upper_col,
            self.gamma_upper_row,
            self.downgraded_col,
            self.downgraded_row,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnFit {
    pub column: String,
    pub t: Exponent,
    pub predicted: f64,
    pub fitted: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub mode: ChainMode,
    pub m: usize,
    pub s: Vec<Exponent>,
    pub r: Vec<Exponent>,
    /// Exponent of `eig_sharp`.
    pub sharp_exponent: Exponent,
    /// Class `(p, q)` of the middle factor.
    pub class: LorentzParams,
    pub rows: Vec<SweepRow>,
    pub fits: Vec<ColumnFit>,
}

impl SweepTable {
    pub fn all_lower_le_upper(&self) -> bool {
        self.rows.iter().all(|r| r.lower_le_upper)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &ColumnFit> {
        self.fits.iter().filter(|f| f.flagged)
    }

    pub fn fit(&self, column: &str, t: Exponent) -> Option<&ColumnFit> {
        self.fits.iter().find(|f| f.column == column && f.t == t)
    }
}

/// Least-squares slope and RMS residual of `(ln x, ln y)`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    (slope, (rss / k).sqrt())
}

fn sharp_exponent(mode: ChainMode, s: &[Exponent], r: &[Exponent]) -> Result<Exponent> {
    match mode {
        ChainMode::S2 => Ok(s.iter().map(|e| e.recip()).sum::<Recip>().exponent()),
        ChainMode::Sr => {
            if s != r {
                return Err(Error::Regime("SR sweeps need s_k = r_k".into()));
            }
            let sum: Recip = r.iter().map(|e| e.recip()).sum();
            Ok((sum - Recip::ratio(s.len() as i64, 2)).exponent())
        }
    }
}

fn compose(chain: &ChainSpec, eps: f64) -> Result<FactorTriple> {
    match chain.mode() {
        ChainMode::Sr => compose_theorem1(chain, eps),
        ChainMode::S2 => compose_theorem3(chain, eps),
    }
}

struct PerN {
    rows: Vec<SweepRow>,
    class: LorentzParams,
}

fn sweep_one(cfg: &ExperimentConfig, n: usize, s: &[Exponent], r: &[Exponent], sharp: Exponent) -> Result<PerN> {
    let col_chain = dft_chain(n, cfg.mode, s, r, RepKind::Column)?;
    let row_chain = dft_chain(n, cfg.mode, s, r, RepKind::Row)?;
    let product = col_chain.product();
    let col = compose(&col_chain, cfg.eps).map_err(|e| at_n(n, e))?;
    let row = compose(&row_chain, cfg.eps).map_err(|e| at_n(n, e))?;
    if !col.params.is_diagonal() {
        return Err(Error::Regime(format!("sweep needs a diagonal class, got {:?}", col.params)));
    }
    let report = eigen_sequence(&product)?;
    let lambdas = &report.lambdas;
    let modulus_deviation = lambdas.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let eig_sharp = lorentz_quasinorm(lambdas, LorentzParams::lp(sharp.value())?)?;
    let eig_class = lorentz_quasinorm(lambdas, col.params)?;
    let reconstruction_error = col.reconstruction_error(&product).max(row.reconstruction_error(&product));
    let prod = |c: &ChainSpec| -> Result<f64> { Ok(c.rep_values()?.iter().product()) };
    let (rep_product_col, rep_product_row) = (prod(&col_chain)?, prod(&row_chain)?);

    let mut rows = Vec::with_capacity(cfg.t_grid.len());
    for &t in &cfg.t_grid {
        let dc = finite_dim_gamma_downgrade(&col, t.value()).map_err(|e| at_n(n, e))?;
        let dr = finite_dim_gamma_downgrade(&row, t.value()).map_err(|e| at_n(n, e))?;
        let eig_t = lorentz_quasinorm(lambdas, LorentzParams::lp(t.value())?)?;
        let le = |a: f64, b: f64| a <= b * (1.0 + crate::verdict::SLACK);
        let lower_le_upper = le(eig_t, dc.bound)
            && le(eig_t, dr.bound)
            && le(eig_class, col.gamma_upper)
            && le(eig_class, row.gamma_upper)
            && (cfg.mode == ChainMode::Sr || (le(eig_sharp, rep_product_col) && le(eig_sharp, rep_product_row)))
            && dc.verdict.holds
            && dr.verdict.holds;
        let row = SweepRow {
            n,
            t,
            eig_sharp,
            eig_t,
            eig_class,
            modulus_deviation,
            rep_product_col,
            rep_product_row,
            gamma_upper_col: col.gamma_upper,
            gamma_upper_row: row.gamma_upper,
            downgraded_col: dc.bound,
            downgraded_row: dr.bound,
            rank: dc.rank,
            reconstruction_error,
            lower_le_upper,
        };
        if !row.all_finite() {
            return Err(Error::NonConvergence {
                routine: "sharpness_sweep",
                detail: format!("non-finite quantity at n = {n}"),
            });
        }
        rows.push(row);
    }
    Ok(PerN { rows, class: col.params })
}

fn at_n(n: usize, e: Error) -> Error {
    match e {
        Error::Certification { what, measured, bound } => {
            Error::Certification { what: format!("{what} (n = {n})"), measured, bound }
        }
        Error::NonConvergence { routine, detail } => {
            Error::NonConvergence { routine, detail: format!("{detail} (n = {n})") }
        }
        other => other,
    }
}

/// Runs the DFT chain over `cfg.dims` and fits every bound column.
pub fn sharpness_sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    cfg.validate()?;
    if cfg.dims.is_empty() || cfg.t_grid.is_empty() {
        return Err(Error::InvalidParams("sweep needs at least one dimension and one t".into()));
    }
    let s = cfg.s_or_ones()?;
    let r = cfg.r_or_s()?;
    let sharp = sharp_exponent(cfg.mode, &s, &r)?;
    let per_n: Vec<PerN> = cfg.dims.par_iter().map(|&n| sweep_one(cfg, n, &s, &r, sharp)).collect::<Result<_>>()?;
    let class = per_n[0].class;
    let class_inv = 1.0 / class.p;
    let q_inv = 1.0 / class.q;
    let col_slope: f64 = s.iter().map(|&e| link_value_slope(cfg.mode, RepKind::Column, e)).sum();
    let row_slope: f64 = s.iter().map(|&e| link_value_slope(cfg.mode, RepKind::Row, e)).sum();

    let mut fits = Vec::new();
    for (ti, &t) in cfg.t_grid.iter().enumerate() {
        let t_inv = t.recip().to_f64();
        if t_inv < q_inv {
            return Err(Error::Regime(format!("t = {t} exceeds the class exponent {}", class.q)));
        }
        let lift = t_inv - q_inv;
        let predicted = [
            ("eig_sharp", sharp.recip().to_f64()),
            ("eig_t", t_inv),
            ("eig_class", class_inv),
            ("rep_product_col", col_slope),
            ("rep_product_row", row_slope),
            ("gamma_upper_col", col_slope),
            ("gamma_upper_row", row_slope),
            ("downgraded_col", col_slope + lift),
            ("downgraded_row", row_slope + lift),
        ];
        let rows: Vec<&SweepRow> = per_n.iter().map(|p| &p.rows[ti]).collect();
        let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        for (column, predicted) in predicted {
            let y: Vec<f64> = rows.iter().map(|r| r.value(column)).collect();
            let (fitted, residual) = if x.len() >= 2 { loglog_fit(&x, &y) } else { (f64::NAN, f64::NAN) };
            fits.push(ColumnFit {
                column: column.to_string(),
                t,
                predicted,
                fitted,
                residual,
                flagged: !((fitted - predicted).abs() <= SLOPE_TOL),
            });
        }
    }
    Ok(SweepTable {
        mode: cfg.mode,
        m: cfg.m,
        s,
        r,
        sharp_exponent: sharp,
        class,
        rows: per_n.into_iter().flat_map(|p| p.rows).collect(),
        fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_exact_power() {
        let x = [2.0, 4.0, 8.0, 16.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        let (slope, res) = loglog_fit(&x, &y);
        assert!((slope - 1.5).abs() < 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn small_s2_sweep() {
        let cfg = ExperimentConfig { dims: vec![4, 8, 16], ..Default::default() };
        let table = sharpness_sweep(&cfg).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert!(table.all_lower_le_upper());
        let flagged: Vec<_> = table.flagged().collect();
        assert!(flagged.is_empty(), "{flagged:?}");
        for row in &table.rows {
            let n = row.n as f64;
            assert!((row.eig_sharp - n * n).abs() < 1e-6 * n * n);
        }
    }

    #[test]
    fn small_sr_sweep() {
        let cfg = ExperimentConfig {
            dims: vec![4, 8],
            mode: ChainMode::Sr,
            t_grid: vec![Exponent::ratio(1, 2)],
            ..Default::default()
        };
        let table = sharpness_sweep(&cfg).unwrap();
        assert!(table.all_lower_le_upper());
    }
}
