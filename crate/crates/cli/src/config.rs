use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// On-disk run description. Every key is optional; flags override it.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile<P> {
    subcommand: Option<String>,
    params: Option<P>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    deterministic: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct RunConfig<P> {
    pub subcommand: &'static str,
    pub params: P,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: usize,
}

#[derive(Serialize)]
struct Hashed<'a, P> {
    subcommand: &'a str,
    params: &'a P,
    seed: u64,
}

impl<P: Serialize> RunConfig<P> {
    /// SHA-256 of the canonical JSON of subcommand, params and seed; the
    /// output directory and thread count do not enter.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(&Hashed {
            subcommand: self.subcommand,
            params: &self.params,
            seed: self.seed,
        })
        .expect("params serialize");
        hex::encode(Sha256::digest(json))
    }
}

pub struct Overrides {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 7;

pub fn load<P>(subcommand: &'static str, over: &Overrides) -> Result<RunConfig<P>, CliError>
where
    P: DeserializeOwned + Default,
{
    let file = match &over.config {
        Some(path) => read(path)?,
        None => RunFile {
            subcommand: None,
            params: None,
            out: None,
            seed: None,
            deterministic: None,
        },
    };
    if let Some(name) = &file.subcommand {
        if name != subcommand {
            return Err(CliError::Validation(format!(
                "config is for subcommand `{name}`, invoked as `{subcommand}`"
            )));
        }
    }
    let jobs = if file.deterministic == Some(true) { 1 } else { over.jobs.unwrap_or(1) };
    if jobs == 0 {
        return Err(CliError::Validation("--jobs must be at least 1".into()));
    }
    Ok(RunConfig {
        subcommand,
        params: file.params.unwrap_or_default(),
        out: over.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        seed: over.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        jobs,
    })
}

fn read<P: DeserializeOwned>(path: &Path) -> Result<RunFile<P>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    // serde_json reports the offending key together with line and column.
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}
