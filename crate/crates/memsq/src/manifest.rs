//! Run metadata embedded in every output file.

use memsq_core::experiments::CHUNK_SIZE;
use memsq_core::sampler::{SeedSpec, GENERATOR_ID};
use serde::Serialize;

/// Output layout version; bump when columns or JSON keys change.
pub const FORMAT_VERSION: &str = "memsq-output/1";

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "MEMSQ_SEED";

pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Flag,
    Env,
    Default,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SeedRecord {
    pub master_seed: u64,
    pub stream_index: u32,
    pub source: SeedSource,
}

impl SeedRecord {
    pub fn spec(&self) -> SeedSpec {
        SeedSpec { master_seed: self.master_seed, stream_index: self.stream_index }
    }
}

/// Everything needed to rerun a command. `wall_time_s` is left out of data
/// files so that reruns reproduce them byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub format: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedRecord>,
    pub generator: &'static str,
    pub chunk_size: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<SeedRecord>) -> Self {
        RunManifest {
            format: FORMAT_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_owned(),
            config,
            seed,
            generator: GENERATOR_ID,
            chunk_size: CHUNK_SIZE,
            wall_time_s: None,
        }
    }

    pub fn with_wall_time(&self, seconds: f64) -> Self {
        RunManifest { wall_time_s: Some(seconds), ..self.clone() }
    }
}

/// Seed from the flag, else from `MEMSQ_SEED`, else [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>, stream_index: u32, env: Option<&str>) -> Result<SeedRecord, String> {
    let (master_seed, source) = match (flag, env) {
        (Some(s), _) => (s, SeedSource::Flag),
        (None, Some(v)) => {
            let s = v.trim().parse().map_err(|_| format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer"))?;
            (s, SeedSource::Env)
        }
        (None, None) => (DEFAULT_SEED, SeedSource::Default),
    };
    Ok(SeedRecord { master_seed, stream_index, source })
}
