//! `--config` documents: a flat TOML table whose keys are the long flag names
//! of the subcommand (`gamma-rho = 3.0`, `energies = [4.5e5, 9e5]`). Values in
//! the document replace the flags; keys that name no flag are rejected.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::Table;

use crate::error::{CliError, CliResult};

/// Flags that steer the run itself and cannot be set from a document.
const RESERVED: [&str; 3] = ["config", "overwrite", "help"];

pub fn read_document(path: &Path) -> CliResult<Table> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    text.parse::<Table>().map_err(|e| CliError::Config { path: path.to_owned(), message: e.message().to_owned() })
}

/// Overlays `doc` on the parsed flags of `command`.
pub fn overlay<T: Serialize + DeserializeOwned>(flags: &T, command: &clap::Command, doc: Table, path: &Path) -> CliResult<T> {
    let err = |message: String| CliError::Config { path: path.to_owned(), message };
    let known: Vec<&str> = command.get_arguments().filter_map(|a| a.get_long()).filter(|l| !RESERVED.contains(l)).collect();
    if let Some(bad) = doc.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(err(format!("unknown key `{bad}`")));
    }
    let mut merged = Table::try_from(flags).map_err(|e| err(e.to_string()))?;
    merged.extend(doc);
    merged.try_into().map_err(|e: toml::de::Error| err(e.message().to_owned()))
}

/// Resolved flags as a table, for the manifest.
pub fn resolved<T: Serialize>(flags: &T) -> Table {
    Table::try_from(flags).unwrap_or_default()
}
