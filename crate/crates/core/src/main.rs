use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nuclear_factor::chain::{compose_theorem1, compose_theorem3, ChainMode, ChainSpec, FactorTriple};
use nuclear_factor::experiments::suite::random_chain;
use nuclear_factor::experiments::{
    emit, random_chain_suite, sharpness_sweep, Envelope, ExperimentConfig, Format, Metadata,
};
use nuclear_factor::spectral::{
    check_corollary3, check_corollary5, check_corollary7, check_theorem2, default_t, eigen_sequence, SpectralReport,
};
use nuclear_factor::{Error, Result};

#[derive(Parser)]
#[command(name = "nuclear-factor", version, about = "Certified factorizations of nuclear operator chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// DFT sharpness sweep over the configured dimensions.
    Sweep(Common),
    /// Randomized certification suite.
    Suite(Common),
    /// Factor one chain (from the config, or drawn from the seed).
    Factorize(Common),
    /// Eigenvalue report and checks for a matrix or chain.
    Spectrum(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv.
    #[arg(long)]
    format: Option<Format>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Pass,
    VerdictFailure,
}

fn write<T: serde::Serialize + nuclear_factor::experiments::Tabular>(
    command: &str,
    cfg: &ExperimentConfig,
    result: T,
) -> Result<()> {
    let env = Envelope { metadata: Metadata::new(command, cfg), result };
    emit(&env, cfg.format, cfg.out.as_deref())
}

fn chain_of(cfg: &ExperimentConfig) -> Result<ChainSpec> {
    match &cfg.chain {
        Some(c) => Ok(c.clone()),
        None => random_chain(cfg, cfg.replay.unwrap_or(cfg.seed)),
    }
}

fn compose(chain: &ChainSpec, eps: f64) -> Result<FactorTriple> {
    match chain.mode() {
        ChainMode::Sr => compose_theorem1(chain, eps),
        ChainMode::S2 => compose_theorem3(chain, eps),
    }
}

fn spectrum(cfg: &ExperimentConfig) -> Result<SpectralReport> {
    if let Some(m) = &cfg.matrix {
        return eigen_sequence(m);
    }
    let chain = chain_of(cfg)?;
    let mut report = eigen_sequence(&chain.product())?;
    if !chain.is_square() {
        return Ok(report);
    }
    match chain.mode() {
        ChainMode::Sr => {
            let ft = compose(&chain, cfg.eps)?;
            check_corollary3(&chain, &ft, &mut report)?;
            if chain.s_list() == chain.r_list() {
                check_theorem2(&chain, &mut report)?;
            }
        }
        ChainMode::S2 => {
            check_corollary5(&chain, &mut report)?;
            check_corollary7(&chain, default_t(&chain), &mut report)?;
            for &t in &cfg.t_grid {
                if t.value() <= nuclear_factor::spectral::s_bar(&chain).value() {
                    check_corollary7(&chain, t, &mut report)?;
                }
            }
        }
    }
    Ok(report)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Sweep(c) => {
            let cfg = c.config()?;
            let table = sharpness_sweep(&cfg)?;
            let ok = table.all_lower_le_upper() && table.flagged().next().is_none();
            for f in table.flagged() {
                eprintln!("flagged: {} at t = {}: fitted {:.4}, predicted {:.4}", f.column, f.t, f.fitted, f.predicted);
            }
            write("sweep", &cfg, table)?;
            Ok(if ok { Outcome::Pass } else { Outcome::VerdictFailure })
        }
        Command::Suite(c) => {
            let cfg = c.config()?;
            let report = random_chain_suite(&cfg)?;
            for f in &report.failures {
                eprintln!("chain {} (replay {}): {}: {}", f.index, f.replay_seed, f.check, f.message);
            }
            if report.any_numerical() {
                let first = report.failures.iter().find(|f| f.numerical).expect("checked").message.clone();
                write("suite", &cfg, report)?;
                return Err(Error::NonConvergence { routine: "suite", detail: first });
            }
            let ok = report.all_pass();
            write("suite", &cfg, report)?;
            Ok(if ok { Outcome::Pass } else { Outcome::VerdictFailure })
        }
        Command::Factorize(c) => {
            let cfg = c.config()?;
            let chain = chain_of(&cfg)?;
            let ft = compose(&chain, cfg.eps)?;
            let ok = ft.all_records_hold();
            write("factorize", &cfg, ft)?;
            Ok(if ok { Outcome::Pass } else { Outcome::VerdictFailure })
        }
        Command::Spectrum(c) => {
            let cfg = c.config()?;
            let report = spectrum(&cfg)?;
            let ok = report.all_hold();
            write("spectrum", &cfg, report)?;
            Ok(if ok { Outcome::Pass } else { Outcome::VerdictFailure })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors would otherwise take exit code 2, which is reserved for numerical failures
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::VerdictFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
