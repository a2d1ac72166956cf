use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::Path;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub wall_ms: u64,
}

/// Every JSON artifact the CLI writes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub tool_version: String,
    pub kind: String,
    /// Resolved command inputs (flags merged over the config file, plus hashes of input files).
    pub inputs: Value,
    /// sha256 of the compact JSON of `inputs`.
    pub input_hash: String,
    pub payload: Value,
    pub stats: Stats,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_inputs(inputs: &Value) -> String {
    sha256_hex(serde_json::to_string(inputs).expect("json value serializes").as_bytes())
}

impl Envelope {
    pub fn new(kind: &str, inputs: Value, payload: Value, wall_ms: u64) -> Self {
        Envelope {
            tool_version: TOOL_VERSION.into(),
            kind: kind.into(),
            input_hash: hash_inputs(&inputs),
            inputs,
            payload,
            stats: Stats { wall_ms },
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("{} is not a toral artifact", path.display()))
    }

    pub fn payload_as<T: for<'de> Deserialize<'de>>(&self, want: &str) -> Result<T> {
        anyhow::ensure!(self.kind == want, "expected a `{want}` artifact, found `{}`", self.kind);
        serde_json::from_value(self.payload.clone()).with_context(|| format!("malformed `{want}` payload"))
    }
}
