use std::path::{Path, PathBuf};

use anyhow::Context;
use parkscan_core::LotConfig;

use crate::exit::{self, CliResult, Code};

pub const ENV_VAR: &str = "PARKSCAN_CONFIG";

/// Loads the lot config from `path`, else from `$PARKSCAN_CONFIG`, else the
/// built-in defaults.
pub fn load(path: Option<&Path>) -> CliResult<LotConfig> {
    let path = path
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from));
    match path {
        Some(p) => LotConfig::load(&p)
            .with_context(|| format!("loading config {}", p.display()))
            .code(exit::CONFIG),
        None => {
            log::info!("no config given, using defaults");
            Ok(LotConfig::default())
        }
    }
}
