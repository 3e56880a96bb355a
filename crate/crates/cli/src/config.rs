//! JSON run configuration merged with command-line flags.
//!
//! A config file is one JSON object. Its keys are the long flag names of the
//! chosen subcommand (snake_case) plus the output options. Flags given on the
//! command line replace file values; keys no subcommand field claims are
//! rejected.

use std::collections::BTreeSet;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

/// Output destination, shared by every subcommand.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct OutputArgs {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<std::path::PathBuf>,
    /// Directory for result files (nothing is written when omitted)
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Stem of the records file, `<name>.csv` or `<name>.json`
    #[arg(long, global = true)]
    pub name: Option<String>,
    /// Records format: csv or json
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Worker threads (default: $MPJC_WORKERS, else 1)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

fn object_of<T: Serialize>(value: &T) -> Result<Map<String, Value>, CliError> {
    match serde_json::to_value(value).map_err(|e| CliError::Validation(e.to_string()))? {
        Value::Object(map) => Ok(map),
        _ => Err(CliError::Validation("internal: argument struct is not an object".into())),
    }
}

fn read_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))? {
        Value::Object(map) => Ok(map),
        _ => Err(CliError::Validation(format!("config {} must be a JSON object", path.display()))),
    }
}

fn pick<T: DeserializeOwned>(merged: &Map<String, Value>, keys: &BTreeSet<String>) -> Result<T, CliError> {
    let part: Map<String, Value> = merged.iter().filter(|(k, _)| keys.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect();
    serde_json::from_value(Value::Object(part)).map_err(|e| CliError::Validation(format!("config: {e}")))
}

/// Layers `flags` over the config file named by `output.config`.
pub fn resolve<A>(output: &OutputArgs, flags: &A) -> Result<(OutputArgs, A), CliError>
where
    A: Serialize + DeserializeOwned + Default,
{
    let out_keys: BTreeSet<String> = object_of(&OutputArgs::default())?.keys().cloned().collect();
    let arg_keys: BTreeSet<String> = object_of(&A::default())?.keys().cloned().collect();
    let mut merged = match &output.config {
        Some(path) => read_file(path)?,
        None => Map::new(),
    };
    if let Some(bad) = merged.keys().find(|k| !out_keys.contains(*k) && !arg_keys.contains(*k)) {
        return Err(CliError::Validation(format!("unknown config key `{bad}`")));
    }
    for (k, v) in object_of(output)?.into_iter().chain(object_of(flags)?) {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    let mut out: OutputArgs = pick(&merged, &out_keys)?;
    out.config = output.config.clone();
    Ok((out, pick(&merged, &arg_keys)?))
}

/// `--workers`, else `$MPJC_WORKERS`, else 1.
pub fn worker_count(out: &OutputArgs) -> Result<usize, CliError> {
    if let Some(w) = out.workers {
        return if w == 0 { Err(CliError::Validation("workers must be at least 1".into())) } else { Ok(w) };
    }
    match std::env::var("MPJC_WORKERS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&w| w > 0)
            .ok_or_else(|| CliError::Validation(format!("MPJC_WORKERS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(1),
    }
}
