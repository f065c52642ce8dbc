//! `manifest.json`: the resolved configuration of a run, sufficient to
//! reproduce every output file with `optsample replay`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::format::write_json;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TOOL: &str = "optsample";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
    /// Fully resolved configuration of `subcommand`.
    pub config: Value,
    /// Files written next to the manifest.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new<C: Serialize>(subcommand: &str, seed: u64, config: &C, outputs: &[&str]) -> CliResult<Self> {
        let mut outputs: Vec<String> = outputs.iter().map(|s| s.to_string()).collect();
        outputs.push(MANIFEST_FILE.to_string());
        Ok(Self {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            seed,
            config: serde_json::to_value(config).map_err(|e| CliError::failure(e.to_string()))?,
            outputs,
        })
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        write_json(&dir.join(MANIFEST_FILE), self)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let m: Self = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        if m.tool != TOOL {
            return Err(CliError::usage(format!("{}: not an {TOOL} manifest", path.display())));
        }
        Ok(m)
    }

    pub fn config_as<C: for<'de> Deserialize<'de>>(&self) -> CliResult<C> {
        serde_json::from_value(self.config.clone())
            .map_err(|e| CliError::usage(format!("manifest config for `{}`: {e}", self.subcommand)))
    }
}
