//! Serializable description of one experiment. Command-line flags and
//! `run --config` both go through this type.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use cocked_hat::estimators::{Formulation, Quantity};
use cocked_hat::scenarios::{CounterexampleId, ModelKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Simulate,
    Exact,
    Special,
    Counterexample,
    Regions,
    Gen,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum QuantityArg {
    /// Target inside the cocked hat.
    Hat,
    /// Target in an unbounded cell of the line arrangement.
    Unbounded,
}

impl From<QuantityArg> for Quantity {
    fn from(q: QuantityArg) -> Self {
        match q {
            QuantityArg::Hat => Quantity::Hat,
            QuantityArg::Unbounded => Quantity::Unbounded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FormulationArg {
    Conjunction,
    Conditional,
    Lines,
    Constrained,
}

impl From<FormulationArg> for Formulation {
    fn from(f: FormulationArg) -> Self {
        match f {
            FormulationArg::Conjunction => Formulation::Conjunction,
            FormulationArg::Conditional => Formulation::Conditional,
            FormulationArg::Lines => Formulation::Lines,
            FormulationArg::Constrained => Formulation::Constrained,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Interval,
    Tworay,
}

impl From<KindArg> for ModelKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Interval => ModelKind::Interval,
            KindArg::Tworay => ModelKind::TwoRay,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum CounterexampleArg {
    #[serde(rename = "CE1")]
    Ce1,
    #[serde(rename = "CE2")]
    Ce2,
    #[serde(rename = "CE3")]
    Ce3,
}

impl From<CounterexampleArg> for CounterexampleId {
    fn from(c: CounterexampleArg) -> Self {
        match c {
            CounterexampleArg::Ce1 => CounterexampleId::Ce1,
            CounterexampleArg::Ce2 => CounterexampleId::Ce2,
            CounterexampleArg::Ce3 => CounterexampleId::Ce3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ScenarioSource {
    File(PathBuf),
    Inline {
        points: Vec<[f64; 2]>,
        target: [f64; 2],
    },
}

/// A line through `(x, y)` at an angle in radians.
pub type LineSpec = [f64; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<QuantityArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formulation: Option<FormulationArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<KindArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleArg>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lines: Vec<LineSpec>,
}

impl ExperimentConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            scenario: None,
            model: None,
            quantity: None,
            formulation: None,
            trials: None,
            seed: None,
            output: None,
            cap: None,
            n: None,
            kind: None,
            case: None,
            counterexample: None,
            lines: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str, origin: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|source| CliError::Config {
            path: origin.to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let shown = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: shown.clone(),
            source,
        })?;
        Self::from_json(&text, &shown)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.to_json() + "\n").map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_field_names() {
        let mut c = ExperimentConfig::new(CommandKind::Exact);
        c.scenario = Some(ScenarioSource::File("eq3.scn".into()));
        c.model = Some("tworay:±10deg".into());
        c.formulation = Some(FormulationArg::Constrained);
        c.counterexample = Some(CounterexampleArg::Ce2);
        c.seed = Some(u64::MAX);
        let json = c.to_json();
        assert!(json.contains("\"command\": \"exact\""));
        assert!(json.contains("\"file\": \"eq3.scn\""));
        assert!(json.contains("\"counterexample\": \"CE2\""));
        assert!(json.contains("18446744073709551615"));
        assert_eq!(ExperimentConfig::from_json(&json, "mem").unwrap(), c);
    }

    #[test]
    fn malformed_config_reports_position() {
        let err = ExperimentConfig::from_json(
            "{\n  \"command\": \"exact\",\n  \"trails\": 5\n}",
            "cfg.json",
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let text = err.to_string();
        assert!(text.contains("trails") && text.contains("line 3"), "{text}");
    }
}
