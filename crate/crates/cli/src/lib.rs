//! Scenario files, runs, comparisons and golden references for `cavelast`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compare;
pub mod config;
pub mod error;
pub mod golden;
pub mod run;
pub mod svg;

pub use compare::{compare_runs, CompareReport};
pub use config::ScenarioConfig;
pub use error::CliError;
pub use run::{run_scenario, RunOptions, RunOutcome, Summary};

/// Scenarios shipped with the binary, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("radial_iso_lambda1.5", include_str!("../scenarios/radial_iso_lambda1.5.cfg")),
    ("radial_elliptic_lambda1.5", include_str!("../scenarios/radial_elliptic_lambda1.5.cfg")),
    ("identity_eval", include_str!("../scenarios/identity_eval.cfg")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Reads a scenario from a file, or by name from [`BUNDLED`]. Returns the
/// configuration and the directory relative input paths refer to.
pub fn load_scenario(spec: &str) -> Result<(ScenarioConfig, std::path::PathBuf), CliError> {
    let path = std::path::Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Read { path: path.into(), source: e })?;
        let base = path.parent().map(|p| p.to_path_buf()).unwrap_or_default();
        return Ok((ScenarioConfig::parse(&text)?, base));
    }
    match bundled(spec) {
        Some(text) => Ok((ScenarioConfig::parse(text)?, std::path::PathBuf::new())),
        None => Err(CliError::Invalid(format!(
            "'{spec}' is neither a file nor a bundled scenario ({})",
            BUNDLED.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
        ))),
    }
}
