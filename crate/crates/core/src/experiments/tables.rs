use crate::chain::FactorTriple;
use crate::spectral::SpectralReport;

use super::emit::Tabular;
use super::suite::SuiteReport;
use super::sweep::{SweepRow, SweepTable};

fn e(x: f64) -> String {
    format!("{x:e}")
}

fn strings(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

impl Tabular for SweepTable {
    fn columns(&self) -> Vec<String> {
        strings(&SweepRow::COLUMNS)
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(SweepRow::record).collect()
    }

    fn notes(&self) -> Vec<String> {
        self.fits
            .iter()
            .map(|f| {
                format!(
                    "fit column={} t={} predicted={} fitted={} residual={:e} flagged={}",
                    f.column, f.t, f.predicted, f.fitted, f.residual, f.flagged
                )
            })
            .collect()
    }
}

impl Tabular for SuiteReport {
    fn columns(&self) -> Vec<String> {
        strings(&["check", "asserted", "runs", "failures", "worst_ratio", "worst_index", "worst_replay_seed"])
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.checks
            .iter()
            .map(|c| {
                vec![
                    c.check.clone(),
                    c.asserted.to_string(),
                    c.runs.to_string(),
                    c.failures.to_string(),
                    e(c.worst_ratio),
                    c.worst_index.to_string(),
                    c.worst_replay_seed.to_string(),
                ]
            })
            .collect()
    }

    fn notes(&self) -> Vec<String> {
        let mut notes = vec![format!(
            "chains={} square={} passed={} failures={}",
            self.count,
            self.square_chains,
            self.passed,
            self.failures.len()
        )];
        notes.extend(
            self.failures.iter().map(|f| {
                format!("failure index={} replay={} check={}: {}", f.index, f.replay_seed, f.check, f.message)
            }),
        );
        notes
    }
}

impl Tabular for FactorTriple {
    fn columns(&self) -> Vec<String> {
        strings(&["desc", "p", "q", "constant", "factor", "measured", "bound", "holds"])
    }

    fn records(&self) -> Vec<Vec<String>> {
        let opt = |x: Option<f64>| x.map(e).unwrap_or_default();
        self.ledger
            .iter()
            .map(|r| {
                vec![
                    r.desc.clone(),
                    r.params.map(|p| e(p.p)).unwrap_or_default(),
                    r.params.map(|p| e(p.q)).unwrap_or_default(),
                    e(r.constant),
                    e(r.factor),
                    opt(r.measured),
                    opt(r.bound),
                    r.holds().to_string(),
                ]
            })
            .collect()
    }

    fn notes(&self) -> Vec<String> {
        vec![format!(
            "class=({}, {}) sigma_u={:e} gamma_upper={:e} c_tilde={:e} final_constant={:e}",
            self.params.p, self.params.q, self.sigma_u, self.gamma_upper, self.c_tilde, self.final_constant
        )]
    }
}

impl Tabular for SpectralReport {
    fn columns(&self) -> Vec<String> {
        strings(&["name", "lhs", "rhs", "ratio", "holds", "anchor"])
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.verdicts
            .iter()
            .map(|v| vec![v.name.clone(), e(v.lhs), e(v.rhs), e(v.ratio()), v.holds.to_string(), v.anchor.clone()])
            .collect()
    }

    fn notes(&self) -> Vec<String> {
        let mut notes: Vec<String> = self
            .lambdas
            .iter()
            .enumerate()
            .map(|(k, z)| format!("lambda_{}=[{:e}, {:e}]", k + 1, z.re, z.im))
            .collect();
        notes.extend(self.quasinorm_table.iter().map(|q| format!("quasinorm p={} q={} value={:e}", q.p, q.q, q.value)));
        notes
    }
}
