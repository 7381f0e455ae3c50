use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use witness_vqe::bench::SweepConfig;

/// Provenance record written next to a sweep's results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub created_unix: u64,
    pub master_seed: u64,
    pub config: SweepConfig,
    /// `sha256:` digest of the canonical config framed as a git blob.
    pub content_hash: String,
    pub results_sha256: String,
    pub records: usize,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Hash of every result-affecting config field. Formatting of the input file
/// and the thread count do not enter.
pub fn content_hash(config: &SweepConfig) -> String {
    let mut canonical = config.clone();
    canonical.parallelism = 0;
    let body = serde_json::to_string(&canonical).expect("config serializes");
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", body.len()).as_bytes());
    h.update(body.as_bytes());
    format!("sha256:{}", hex(&h.finalize()))
}

impl RunManifest {
    pub fn new(config: &SweepConfig, results: &[u8], records: usize) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            master_seed: config.master_seed,
            config: config.clone(),
            content_hash: content_hash(config),
            results_sha256: sha256_hex(results),
            records,
        }
    }
}
