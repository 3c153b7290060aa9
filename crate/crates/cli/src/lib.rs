//! Scenario runner for the polar-split laboratory.
//!
//! `run` executes one config and writes its CSV artifacts plus a JSON
//! summary; `run_suite` executes every `.conf` in a directory in id
//! order and aggregates `suite.json`. Exit-status contract for the
//! binary: 0 when every check passes, 1 when a check fails, 2 on
//! configuration or execution errors.

// negated comparisons like `!(x > 0.0)` are guards that must also
// reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod scenario;
pub mod summary;

/// The guide chapter covering the runner; its code blocks compile as
/// doctests of this crate.
#[doc = include_str!("../../../book/src/scenario-lab.md")]
pub mod guide {}

use std::fs;
use std::path::Path;

pub use config::ConfigError;
pub use scenario::{load, RunError, Scenario};
pub use summary::{Check, RunSummary, SuiteSummary};

/// Run one scenario config; writes `<id>.json` and field CSVs under
/// `out_dir`.
pub fn run(config_path: &Path, out_dir: &Path, tol_scale: f64) -> Result<RunSummary, RunError> {
    let scenario = load(config_path)?;
    let summary = scenario.run(out_dir, tol_scale)?;
    write_json(out_dir, &format!("{}.json", summary.scenario), &summary)?;
    Ok(summary)
}

/// Run every `*.conf` under `dir` (sorted by scenario id), writing
/// per-scenario JSON plus the aggregate `suite.json`. Any config error
/// aborts the whole suite.
pub fn run_suite(dir: &Path, out_dir: &Path, tol_scale: f64) -> Result<SuiteSummary, RunError> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| {
            RunError::Config(ConfigError {
                path: dir.display().to_string(),
                line: None,
                message: format!("cannot list directory: {e}"),
            })
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "conf"))
        .collect();
    paths.sort();

    // parse everything first: a bad config aborts before any run
    let mut scenarios = Vec::new();
    for path in &paths {
        scenarios.push(load(path)?);
    }
    scenarios.sort_by(|a, b| a.id.cmp(&b.id));

    let start = std::time::Instant::now();
    let mut results = Vec::new();
    for scenario in scenarios {
        let summary = scenario.run(out_dir, tol_scale)?;
        write_json(out_dir, &format!("{}.json", summary.scenario), &summary)?;
        results.push(summary);
    }
    let mut suite = SuiteSummary::new(results);
    suite.wall_time_s = start.elapsed().as_secs_f64();
    write_json(out_dir, "suite.json", &suite)?;
    Ok(suite)
}

fn write_json<T: serde::Serialize>(
    out_dir: &Path,
    name: &str,
    value: &T,
) -> Result<(), RunError> {
    fs::create_dir_all(out_dir)?;
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(out_dir.join(name), text)?;
    Ok(())
}
