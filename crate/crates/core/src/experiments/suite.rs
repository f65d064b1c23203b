//! Randomized certification suite over random chains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{
    compose_theorem1, compose_theorem3, finite_dim_gamma_downgrade, ChainLink, ChainMode, ChainSpec, FactorTriple,
};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::matrix::SeqSpace;
use crate::random::{random_nuclear_rep, random_s2_rep};
use crate::spectral::{
    check_corollary3, check_corollary5, check_corollary7, check_proposition2, check_theorem2, default_t,
    eigen_sequence, gamma_lower_bound_eigen_lorentz, s_bar,
};
use crate::verdict::{Verdict, SLACK};

use super::config::ExperimentConfig;

/// Reconstruction tolerance relative to `1 + ‖T‖_F`.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Largest `l_1` target dimension in S2 chains (weak-l2 norms there are found by vertex enumeration).
pub const S2_L1_DIM_LIMIT: usize = 10;

pub fn sr_grid() -> Vec<(Exponent, Exponent)> {
    let e = Exponent::ratio;
    vec![(e(1, 1), e(1, 1)), (e(1, 1), e(1, 2)), (e(1, 2), e(1, 2)), (e(1, 2), e(1, 3)), (e(2, 3), e(1, 3))]
}

pub fn s2_grid() -> Vec<Exponent> {
    let e = Exponent::ratio;
    vec![e(1, 2), e(1, 1), e(3, 2), e(2, 1)]
}

/// Seed of the `index`-th chain of a suite.
pub fn replay_seed(seed: u64, index: usize) -> u64 {
    // splitmix64
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Reported quantities are tracked but never fail the suite.
    pub asserted: bool,
}

impl Observation {
    fn from_verdict(check: &str, v: &Verdict) -> Self {
        Observation { check: check.to_string(), lhs: v.lhs, rhs: v.rhs, holds: v.holds, asserted: true }
    }

    fn le(check: &str, lhs: f64, rhs: f64) -> Self {
        Self::from_verdict(check, &Verdict::le(check, "", lhs, rhs))
    }

    fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainError {
    pub check: String,
    pub message: String,
    pub numerical: bool,
}

/// Everything measured on one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainOutcome {
    pub index: usize,
    pub replay_seed: u64,
    pub m: usize,
    pub square: bool,
    pub observations: Vec<Observation>,
    pub error: Option<ChainError>,
    #[serde(skip)]
    pub triple: Option<FactorTriple>,
}

impl ChainOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.observations.iter().all(|o| o.holds || !o.asserted)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub asserted: bool,
    pub runs: usize,
    pub failures: usize,
    pub worst_ratio: f64,
    pub worst_index: usize,
    pub worst_replay_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteFailure {
    pub index: usize,
    pub replay_seed: u64,
    pub check: String,
    pub message: String,
    pub numerical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub mode: ChainMode,
    pub count: usize,
    pub square_chains: usize,
    pub passed: usize,
    pub checks: Vec<CheckSummary>,
    pub failures: Vec<SuiteFailure>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn any_numerical(&self) -> bool {
        self.failures.iter().any(|f| f.numerical)
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.check == name)
    }
}

fn pick<T: Copy, R: Rng>(rng: &mut R, items: &[T]) -> T {
    items[rng.random_range(0..items.len())]
}

/// Draws the chain of one suite entry.
pub fn random_chain(cfg: &ExperimentConfig, seed: u64) -> Result<ChainSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = cfg.m;
    let square = rng.random_bool(cfg.square_fraction);
    let (s_cfg, r_cfg) = (cfg.s_list()?, cfg.r_list()?);
    let ps = [1.0, 2.0, f64::INFINITY];
    let mut spaces: Vec<SeqSpace> = Vec::with_capacity(m + 1);
    for _ in 0..=m {
        let dim = rng.random_range(1..=cfg.max_dim);
        spaces.push(SeqSpace { dim, p: pick(&mut rng, &ps) });
    }
    if cfg.mode == ChainMode::S2 {
        for sp in spaces.iter_mut() {
            if sp.p == 1.0 {
                sp.dim = sp.dim.min(S2_L1_DIM_LIMIT);
            }
        }
    }
    if square {
        spaces[m] = spaces[0];
    }
    let real = cfg.mode == ChainMode::S2 && spaces[1..].iter().any(|sp| sp.p == 1.0);
    let mut links = Vec::with_capacity(m);
    for k in 0..m {
        let terms = rng.random_range(1..=cfg.max_terms);
        let (src, tgt) = (spaces[k], spaces[k + 1]);
        match cfg.mode {
            ChainMode::Sr => {
                let (s, r) = if s_cfg.is_empty() { pick(&mut rng, &sr_grid()) } else { (s_cfg[k], r_cfg[k]) };
                let real = rng.random_bool(0.25);
                links.push(ChainLink::Sr { rep: random_nuclear_rep(&mut rng, src, tgt, terms, real), s, r });
            }
            ChainMode::S2 => {
                let s = if s_cfg.is_empty() { pick(&mut rng, &s2_grid()) } else { s_cfg[k] };
                links.push(ChainLink::S2 { rep: random_s2_rep(&mut rng, src, tgt, terms, real)?, s });
            }
        }
    }
    ChainSpec::new(links)
}

fn compose(chain: &ChainSpec, eps: f64) -> Result<FactorTriple> {
    match chain.mode() {
        ChainMode::Sr => compose_theorem1(chain, eps),
        ChainMode::S2 => compose_theorem3(chain, eps),
    }
}

fn fail(check: &str, e: &Error) -> ChainError {
    ChainError { check: check.to_string(), message: e.to_string(), numerical: e.is_numerical() }
}

/// Composition, certification and every applicable eigenvalue check on one chain.
pub fn check_chain(chain: &ChainSpec, eps: f64, index: usize, seed: u64) -> ChainOutcome {
    let mut out = ChainOutcome {
        index,
        replay_seed: seed,
        m: chain.len(),
        square: chain.is_square(),
        observations: Vec::new(),
        error: None,
        triple: None,
    };
    if let Err(e) = run_checks(chain, eps, &mut out) {
        let check = match &e {
            Error::Certification { .. } => "certification",
            _ => "evaluation",
        };
        out.error = Some(fail(check, &e));
    }
    out
}

fn run_checks(chain: &ChainSpec, eps: f64, out: &mut ChainOutcome) -> Result<()> {
    let ft = compose(chain, eps)?;
    let t = chain.product();
    let obs = &mut out.observations;
    obs.push(Observation::le("reconstruction", ft.reconstruction_error(&t), RECONSTRUCTION_TOL));
    obs.push(Observation::le("sigma_u vs ledger", ft.sigma_u, ft.u_bound));
    obs.push(Observation {
        check: "ledger records".into(),
        lhs: ft.ledger.iter().filter(|r| !r.holds()).count() as f64,
        rhs: 0.0,
        holds: ft.all_records_hold(),
        asserted: true,
    });
    let prod: f64 = ft.rep_values.iter().map(|v| (1.0 + eps) * v).product();
    let diagonal_chain = chain.s_list() == chain.r_list();
    match ft.mode {
        ChainMode::Sr => {
            let cap = 2f64.powf(ft.s.recip().to_f64()) * ft.c_tilde * prod;
            obs.push(Observation::le("gamma_upper vs 2^(1/s) c~ prod", ft.gamma_upper, cap));
        }
        ChainMode::S2 => obs.push(Observation::le("gamma_upper vs prod", ft.gamma_upper, prod)),
    }
    if ft.mode == ChainMode::S2 || diagonal_chain {
        let c = ft.c_tilde * ft.final_constant;
        obs.push(Observation { check: "constant exactly 1".into(), lhs: c, rhs: 1.0, holds: c == 1.0, asserted: true });
    }
    let down = finite_dim_gamma_downgrade(&ft, ft.params.q / 2.0)?;
    obs.push(Observation::from_verdict("downgrade", &down.verdict));

    if chain.is_square() {
        let lower = gamma_lower_bound_eigen_lorentz(&t, ft.params)?;
        obs.push(Observation::le("eigen lower bound vs gamma_upper", lower, ft.gamma_upper));
        let mut report = eigen_sequence(&t)?;
        match chain.mode() {
            ChainMode::Sr => {
                obs.push(Observation::from_verdict("corollary 3", &check_corollary3(chain, &ft, &mut report)?));
                if diagonal_chain {
                    obs.push(Observation::from_verdict("theorem 2", &check_theorem2(chain, &mut report)?));
                }
                let row = check_proposition2(chain, &mut report)?;
                obs.push(Observation {
                    check: "proposition 2 (reported)".into(),
                    lhs: row.value,
                    rhs: row.rep_product,
                    holds: true,
                    asserted: false,
                });
            }
            ChainMode::S2 => {
                obs.push(Observation::from_verdict("corollary 5", &check_corollary5(chain, &mut report)?));
                let t7 = default_t(chain);
                obs.push(Observation::from_verdict("corollary 7", &check_corollary7(chain, t7, &mut report)?));
                obs.push(Observation::from_verdict(
                    "corollary 7 at s~",
                    &check_corollary7(chain, s_bar(chain), &mut report)?,
                ));
            }
        }
    }
    out.triple = Some(ft);
    Ok(())
}

/// Outcomes of every chain, in index order.
pub fn run_suite_chains(cfg: &ExperimentConfig) -> Result<Vec<ChainOutcome>> {
    cfg.validate()?;
    let seeds: Vec<(usize, u64)> = match cfg.replay {
        Some(seed) => vec![(0, seed)],
        None => (0..cfg.count).map(|i| (i, replay_seed(cfg.seed, i))).collect(),
    };
    Ok(seeds
        .into_par_iter()
        .map(|(index, seed)| match random_chain(cfg, seed) {
            Ok(chain) => check_chain(&chain, cfg.eps, index, seed),
            Err(e) => ChainOutcome {
                index,
                replay_seed: seed,
                m: cfg.m,
                square: false,
                observations: vec![],
                error: Some(fail("generation", &e)),
                triple: None,
            },
        })
        .collect())
}

/// Counts and worst ratios per check.
pub fn summarize(mode: ChainMode, outcomes: &[ChainOutcome]) -> SuiteReport {
    let mut checks: Vec<CheckSummary> = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        if let Some(e) = &o.error {
            failures.push(SuiteFailure {
                index: o.index,
                replay_seed: o.replay_seed,
                check: e.check.clone(),
                message: e.message.clone(),
                numerical: e.numerical,
            });
        }
        for ob in &o.observations {
            let pos = match checks.iter().position(|c| c.check == ob.check) {
                Some(p) => p,
                None => {
                    checks.push(CheckSummary {
                        check: ob.check.clone(),
                        asserted: ob.asserted,
                        runs: 0,
                        failures: 0,
                        worst_ratio: 0.0,
                        worst_index: o.index,
                        worst_replay_seed: o.replay_seed,
                    });
                    checks.len() - 1
                }
            };
            let c = &mut checks[pos];
            c.runs += 1;
            let ratio = ob.ratio();
            if ratio > c.worst_ratio {
                c.worst_ratio = ratio;
                c.worst_index = o.index;
                c.worst_replay_seed = o.replay_seed;
            }
            if ob.asserted && !ob.holds {
                c.failures += 1;
                failures.push(SuiteFailure {
                    index: o.index,
                    replay_seed: o.replay_seed,
                    check: ob.check.clone(),
                    message: format!("lhs {:e} exceeds rhs {:e} (slack {SLACK:e})", ob.lhs, ob.rhs),
                    numerical: false,
                });
            }
        }
    }
    SuiteReport {
        mode,
        count: outcomes.len(),
        square_chains: outcomes.iter().filter(|o| o.square).count(),
        passed: outcomes.iter().filter(|o| o.passed()).count(),
        checks,
        failures,
    }
}

pub fn random_chain_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let outcomes = run_suite_chains(cfg)?;
    Ok(summarize(cfg.mode, &outcomes))
}
