//! Run manifests: what was run, with which parameters, and digests of every
//! file written.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_SCHEMA: &str = "seqrac.manifest/1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub version: String,
    pub rng_algorithm: Option<String>,
    /// RFC 3339, UTC. The only field that changes between identical runs.
    pub timestamp: String,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn now() -> String {
    time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_else(|_| "unknown".into())
}

impl RunManifest {
    pub fn new(command: &str, params: BTreeMap<String, String>, rng_algorithm: Option<&str>) -> Self {
        Self {
            schema: MANIFEST_SCHEMA.into(),
            command: command.into(),
            params,
            version: env!("CARGO_PKG_VERSION").into(),
            rng_algorithm: rng_algorithm.map(Into::into),
            timestamp: now(),
            outputs: Vec::new(),
        }
    }

    /// Writes `bytes` to `dir/name` and records its digest.
    pub fn write_output(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> io::Result<()> {
        fs::write(dir.join(name), bytes)?;
        self.outputs.push(OutputDigest { file: name.into(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::write(dir.join(MANIFEST_FILE), crate::emit::to_json(self))
    }

    /// Checks every listed output against its recorded digest.
    pub fn verify_outputs(&self, dir: &Path) -> io::Result<Vec<String>> {
        let mut mismatched = Vec::new();
        for out in &self.outputs {
            if sha256_hex(&fs::read(dir.join(&out.file))?) != out.sha256 {
                mismatched.push(out.file.clone());
            }
        }
        Ok(mismatched)
    }
}
