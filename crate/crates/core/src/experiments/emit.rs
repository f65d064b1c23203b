//! JSON and CSV output with an echoed seed and config.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::config::{ExperimentConfig, Format};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    /// Excluded from determinism comparisons.
    pub generated_unix_s: u64,
}

impl Metadata {
    pub fn new(command: &str, cfg: &ExperimentConfig) -> Self {
        Metadata {
            command: command.to_string(),
            seed: cfg.seed,
            config: cfg.clone(),
            generated_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub metadata: Metadata,
    pub result: T,
}

/// A result that also has a flat tabular form.
pub trait Tabular {
    fn columns(&self) -> Vec<String>;
    fn records(&self) -> Vec<Vec<String>>;
    /// Extra `#` lines written after the metadata.
    fn notes(&self) -> Vec<String> {
        Vec::new()
    }
}

pub fn write_json<T: Serialize, W: Write>(env: &Envelope<T>, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, env)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_csv<T: Tabular, W: Write>(env: &Envelope<T>, mut out: W) -> Result<()> {
    writeln!(out, "# command={}", env.metadata.command)?;
    writeln!(out, "# seed={}", env.metadata.seed)?;
    writeln!(out, "# config={}", serde_json::to_string(&env.metadata.config)?)?;
    writeln!(out, "# generated_unix_s={}", env.metadata.generated_unix_s)?;
    for note in env.result.notes() {
        writeln!(out, "# {note}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(env.result.columns())?;
    for rec in env.result.records() {
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit<T: Serialize + Tabular>(env: &Envelope<T>, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::io::BufWriter::new(std::fs::File::create(p)?);
            emit_to(env, format, file)
        }
        None => emit_to(env, format, std::io::stdout().lock()),
    }
}

pub fn emit_to<T: Serialize + Tabular, W: Write>(env: &Envelope<T>, format: Format, out: W) -> Result<()> {
    match format {
        Format::Json => write_json(env, out),
        Format::Csv => write_csv(env, out),
    }
}

/// Strips `generated_unix_s` so two outputs can be compared.
pub fn without_timestamp(json: &str) -> Result<serde_json::Value> {
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    if let Some(meta) = v.get_mut("metadata").and_then(|m| m.as_object_mut()) {
        meta.remove("generated_unix_s");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Empty;

    impl Tabular for Empty {
        fn columns(&self) -> Vec<String> {
            vec!["a".into(), "b".into()]
        }
        fn records(&self) -> Vec<Vec<String>> {
            vec![]
        }
    }

    impl Serialize for Empty {
        fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            s.serialize_unit()
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let env = Envelope { metadata: Metadata::new("test", &ExperimentConfig::default()), result: Empty };
        let mut buf = Vec::new();
        write_csv(&env, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec!["a,b"]);
        assert!(text.contains("# seed=0"));
    }
}
