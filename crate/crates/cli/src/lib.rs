//! Batch experiments and command implementations for the `lowrand` binary.

pub mod commands;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lowrand::formats::game_from_json;
use lowrand::game::example_game;
use lowrand::{Scalar, StageGame};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "LOWRAND_OUT";

/// A bundled game by name, or a game file.
pub fn load_game<T: Scalar>(name_or_path: &str) -> Result<StageGame<T>> {
    let path = Path::new(name_or_path);
    if path.extension().is_some_and(|e| e == "json") || path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(game_from_json(&text)?);
    }
    Ok(example_game(name_or_path)?)
}

/// Comma-separated scalars such as `1/4,1/2`.
pub fn parse_list<T: Scalar>(text: &str) -> Result<Vec<T>> {
    text.split(',').map(|s| T::parse_scalar(s.trim()).map_err(Into::into)).collect()
}

pub fn default_out() -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("results"))
}
