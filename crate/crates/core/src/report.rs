//! Run configuration and the structured report envelope.
//!
//! A report is a JSON document with the fields `tool`, `version`, `command`,
//! `config` and `result`. Field order is fixed and every map inside is
//! ordered, so the same configuration always renders to the same bytes.

use std::path::PathBuf;

use serde::Serialize;

use crate::model::HyperModel;
use crate::omega::{ScanMode, ScanOptions, DEFAULT_ARITY_CAP, DEFAULT_BUDGET};
use crate::reals::DEFAULT_DEPTH;

pub const TOOL: &str = "hyperproc";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Doc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub model: HyperModel,
    pub mode: Mode,
    pub seed: u64,
    /// Sample count in sampled mode.
    pub samples: usize,
    /// Precision depth for real comparisons.
    pub depth: u64,
    /// Evaluation budget for exhaustive scans.
    pub budget: u64,
    pub report: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: HyperModel::default_model(),
            mode: Mode::Exhaustive,
            seed: 0,
            samples: 4096,
            depth: DEFAULT_DEPTH,
            budget: DEFAULT_BUDGET,
            report: None,
            format: Format::Text,
        }
    }
}

impl RunConfig {
    pub fn scan_options(&self) -> ScanOptions {
        let mode = match self.mode {
            Mode::Exhaustive => ScanMode::Exhaustive,
            Mode::Sampled => ScanMode::Sampled { count: self.samples, seed: self.seed },
        };
        ScanOptions { mode, budget: self.budget, arity_cap: DEFAULT_ARITY_CAP }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    result: &'a T,
}

/// Pretty-printed JSON report, newline-terminated.
pub fn render(command: &str, config: &RunConfig, result: &impl Serialize) -> Result<String, serde_json::Error> {
    let env = Envelope { tool: TOOL, version: VERSION, command, config, result };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_fields() {
        let cfg = RunConfig::default();
        let s = render("eval", &cfg, &true).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["tool"], TOOL);
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["config"]["model"]["max_element"], 2048);
        assert_eq!(v["config"]["model"]["thresholds"], serde_json::json!([16, 128]));
        assert_eq!(v["config"]["seed"], 0);
        assert_eq!(v["result"], true);
        assert_eq!(s, render("eval", &cfg, &true).unwrap());
    }
}
