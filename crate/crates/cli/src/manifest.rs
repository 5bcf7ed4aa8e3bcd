//! Reproducibility manifest accompanying every output.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// What produced an output: the subcommand, its parsed flags, a digest of
/// the input bytes when the command read a file, the seed, and the tool
/// version. Written as JSON next to file outputs and echoed as a single
/// line in stdout reports.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub input_sha256: Option<String>,
    pub seed: u64,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.into(),
            flags: BTreeMap::new(),
            input_sha256: None,
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn flag(mut self, name: &str, value: impl ToString) -> Self {
        self.flags.insert(name.into(), value.to_string());
        self
    }

    pub fn digest(mut self, input: &[u8]) -> Self {
        self.input_sha256 = Some(sha256_hex(input));
        self
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("string fields serialize");
        text.push('\n');
        text
    }

    /// One-line form for reports printed to stdout.
    pub fn summary_line(&self) -> String {
        let digest = match &self.input_sha256 {
            Some(hex) => format!(", input sha256 {}", &hex[..12]),
            None => String::new(),
        };
        format!("manifest: {} v{}, seed {}{digest}", self.command, self.version, self.seed)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
