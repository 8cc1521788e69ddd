//! Run manifests: every output file gets a sibling `<out>.manifest` holding
//! the command, resolved configuration, and seed needed to reproduce it
//! byte-for-byte.

use std::path::{Path, PathBuf};

use crate::error::{io_err, CliError};

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: &'static str,
    /// Resolved flag values; sorted by key at serialization time.
    pub config: Vec<(String, String)>,
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &'static str) -> Self {
        RunManifest {
            command,
            config: Vec::new(),
            seed: None,
        }
    }

    pub fn arg(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        out.push_str(&format!("command,{}\n", self.command));
        out.push_str(&format!("tool_version,{}\n", env!("CARGO_PKG_VERSION")));
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed,{seed}\n"));
        }
        let mut config = self.config.clone();
        config.sort();
        for (k, v) in config {
            out.push_str(&format!("arg.{k},{v}\n"));
        }
        out
    }

    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest");
        out.with_file_name(name)
    }

    /// Write the output file and its manifest side by side.
    pub fn write_with_output(&self, out: &Path, contents: &str) -> Result<(), CliError> {
        std::fs::write(out, contents).map_err(|e| io_err(out, e))?;
        let mpath = Self::path_for(out);
        std::fs::write(&mpath, self.to_csv()).map_err(|e| io_err(&mpath, e))?;
        Ok(())
    }
}
