use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct Outcome {
    pub exit_code: u8,
    pub summary: String,
}

/// Record of one invocation: enough to rerun it and check the output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub seeds: BTreeMap<String, u64>,
    pub tool_version: String,
    /// SHA-256 of every input file, keyed by path as given.
    pub input_hashes: BTreeMap<String, String>,
    pub outcome: Option<Outcome>,
}

impl RunManifest {
    pub fn new(argv: &[String]) -> Self {
        RunManifest {
            command: argv.get(1).cloned().unwrap_or_default(),
            arguments: argv.iter().skip(1).cloned().collect(),
            seeds: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_hashes: BTreeMap::new(),
            outcome: None,
        }
    }

    pub fn record_seed(&mut self, name: &str, seed: u64) {
        self.seeds.insert(name.to_string(), seed);
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        self.input_hashes
            .insert(path.display().to_string(), hex::encode(Sha256::digest(bytes)));
    }

    pub fn finish(&mut self, exit_code: u8, summary: &str) {
        self.outcome = Some(Outcome {
            exit_code,
            summary: summary.to_string(),
        });
    }

    pub fn emit(&self, path: Option<&Path>) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        match path {
            Some(p) => std::fs::write(p, text + "\n"),
            None => {
                eprintln!("{text}");
                Ok(())
            }
        }
    }
}
