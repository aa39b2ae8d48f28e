use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use minsurf4::mesh::sha256_hex;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Tolerances a run actually used; only the relevant ones are filled.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Tolerances {
    pub root_cluster: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue_real: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_difference_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature_agreement: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit_circle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sandwich_slack: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    pub inputs: Value,
    pub verdict: String,
    pub exit_code: u8,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, config_text: &str, inputs: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: sha256_hex(config_text),
            seed: None,
            tolerances: Tolerances { root_cluster: minsurf4::algebra::DEFAULT_CLUSTER_TOL, ..Default::default() },
            inputs,
            verdict: String::new(),
            exit_code: 0,
            result: Value::Null,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Where a run puts its files. Without an output directory the report goes
/// to stdout and side artifacts are not written.
pub struct Sink {
    pub out: Option<PathBuf>,
}

impl Sink {
    pub fn artifact(&self, name: &str, contents: &[u8]) -> Result<()> {
        match &self.out {
            Some(dir) => {
                let p = dir.join(name);
                write_atomic(&p, contents)?;
                eprintln!("wrote {}", p.display());
            }
            None => log::warn!("no --out directory given; {name} not written"),
        }
        Ok(())
    }

    pub fn report(&self, r: &Report) -> Result<()> {
        let text = r.to_json();
        match &self.out {
            Some(dir) => {
                let p = dir.join(format!("{}.json", r.command));
                write_atomic(&p, text.as_bytes())?;
                eprintln!("wrote {}", p.display());
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nested/r.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn envelope_carries_hash_and_schema() {
        let r = Report::new("verify-main", "abc", Value::Null);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["config_sha256"], sha256_hex("abc"));
        assert_eq!(v["tolerances"]["root_cluster"], 1e-8);
    }
}
