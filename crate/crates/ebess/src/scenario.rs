//! TOML scenario files and bundled-scenario lookup.

use std::fs;
use std::path::{Path, PathBuf};

use ebess_core::{ModelError, Scenario};
use thiserror::Error;

pub const SCENARIO_DIR_ENV: &str = "EBESS_SCENARIO_DIR";

const BUNDLED: &[(&str, &str)] = &[
    ("la_route_ac_paper", include_str!("../scenarios/la_route_ac_paper.toml")),
    ("la_route_ac_physics", include_str!("../scenarios/la_route_ac_physics.toml")),
];

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}: {source}")]
    Invalid { origin: String, source: ModelError },
    #[error("no scenario file or bundled scenario named `{name}` (bundled: {})", bundled_scenarios().join(", "))]
    NotFound { name: String },
    #[error("cannot serialize scenario: {0}")]
    Serialize(#[from] toml::ser::Error),
}

/// A parsed, defaulted and validated scenario plus the directory relative paths resolve against.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub base_dir: Option<PathBuf>,
}

pub fn bundled_scenarios() -> Vec<&'static str> {
    BUNDLED.iter().map(|(name, _)| *name).collect()
}

/// Parses TOML text; `origin` labels error messages (usually the file path).
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario, ScenarioError> {
    let mut scenario: Scenario = toml::from_str(text)
        .map_err(|e| ScenarioError::Parse { origin: origin.to_string(), message: e.to_string().trim_end().to_string() })?;
    scenario.apply_defaults();
    scenario
        .validate()
        .map_err(|source| ScenarioError::Invalid { origin: origin.to_string(), source })?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    let scenario = parse_scenario(&text, &path.display().to_string())?;
    Ok(LoadedScenario { scenario, base_dir: path.parent().map(Path::to_path_buf) })
}

pub fn scenario_to_toml(scenario: &Scenario) -> Result<String, ScenarioError> {
    Ok(toml::to_string_pretty(scenario)?)
}

/// An existing file path wins, then `<$EBESS_SCENARIO_DIR>/<name>.toml`, then the
/// scenarios compiled into the binary.
pub fn resolve_scenario(arg: &str) -> Result<LoadedScenario, ScenarioError> {
    let path = Path::new(arg);
    if path.is_file() {
        return load_scenario(path);
    }
    let name = arg.strip_suffix(".toml").unwrap_or(arg);
    if let Some(dir) = std::env::var_os(SCENARIO_DIR_ENV) {
        let candidate = Path::new(&dir).join(format!("{name}.toml"));
        if candidate.is_file() {
            return load_scenario(&candidate);
        }
    }
    match BUNDLED.iter().find(|(n, _)| *n == name) {
        Some((n, text)) => Ok(LoadedScenario { scenario: parse_scenario(text, &format!("bundled:{n}"))?, base_dir: None }),
        None => Err(ScenarioError::NotFound { name: arg.to_string() }),
    }
}
