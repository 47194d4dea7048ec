use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use otima_core::constants::PhysicalConstants;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::job::{Job, SCHEMA_VERSION};

/// Provenance record written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub timestamp_unix: u64,
    pub argv: Vec<String>,
    pub constants: serde_json::Value,
    pub job: Job,
}

impl Manifest {
    pub fn new(job: Job, argv: Vec<String>) -> Self {
        let timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            schema_version: SCHEMA_VERSION,
            timestamp_unix,
            argv,
            constants: serde_json::to_value(PhysicalConstants::SI).expect("constants serialize"),
            job,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| {
            CliError::Config(format!("{}: not a valid manifest: {e}", path.display()))
        })?;
        if manifest.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "{}: schema version {} is not supported (expected {SCHEMA_VERSION})",
                path.display(),
                manifest.schema_version
            )));
        }
        Ok(manifest)
    }
}
