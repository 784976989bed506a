use std::path::Path;

use biphoton_core::{ExperimentParams, Grid1D, ScenarioKind};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error("invalid parameters: {0}")]
    Params(#[from] biphoton_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Csv,
    Svg,
    Report,
    /// Oracle screen field in the binary debug format.
    Snapshot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Sigma,
    OmegaBig,
    SlitSep,
    SlitWidth,
    DistSourceSlit,
    DistSlitScreen,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] = [
        SweepParam::Sigma,
        SweepParam::OmegaBig,
        SweepParam::SlitSep,
        SweepParam::SlitWidth,
        SweepParam::DistSourceSlit,
        SweepParam::DistSlitScreen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Sigma => "sigma",
            SweepParam::OmegaBig => "omega_big",
            SweepParam::SlitSep => "slit_sep",
            SweepParam::SlitWidth => "slit_width",
            SweepParam::DistSourceSlit => "dist_source_slit",
            SweepParam::DistSlitScreen => "dist_slit_screen",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    fn slot(self, p: &mut ExperimentParams) -> &mut f64 {
        match self {
            SweepParam::Sigma => &mut p.sigma,
            SweepParam::OmegaBig => &mut p.omega_big,
            SweepParam::SlitSep => &mut p.slit_sep,
            SweepParam::SlitWidth => &mut p.slit_width,
            SweepParam::DistSourceSlit => &mut p.dist_source_slit,
            SweepParam::DistSlitScreen => &mut p.dist_slit_screen,
        }
    }

    pub fn apply(self, base: &ExperimentParams, value: f64) -> ExperimentParams {
        let mut p = *base;
        *self.slot(&mut p) = value;
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepSpec {
    /// Parses `name=v1,v2,...`.
    pub fn parse(arg: &str) -> Result<Self, ConfigError> {
        let (name, values) = arg
            .split_once('=')
            .ok_or_else(|| ConfigError::Sweep(format!("expected name=v1,v2,..., got {arg:?}")))?;
        let param = SweepParam::from_name(name.trim()).ok_or_else(|| {
            ConfigError::Sweep(format!(
                "unknown parameter {name:?}; expected one of {}",
                SweepParam::ALL.map(SweepParam::name).join(", ")
            ))
        })?;
        let values = values
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| ConfigError::Sweep(format!("bad value {v:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let spec = Self { param, values };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.values.len() < 2 {
            return Err(ConfigError::Sweep(format!(
                "a sweep needs at least 2 values, got {}",
                self.values.len()
            )));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(ConfigError::Sweep(format!("non-finite value {v}")));
        }
        Ok(())
    }
}

fn default_scenario() -> ScenarioKind {
    ScenarioKind::BiphotonCoincidence
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Csv, OutputKind::Svg, OutputKind::Report]
}

/// One config file. Omitted parameters take their defaults; unknown keys are
/// rejected at every level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub schema_version: u32,
    #[serde(default = "default_scenario")]
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub params: ExperimentParams,
    /// Screen grid; planned from the parameters when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid1D>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: default_scenario(),
            params: ExperimentParams::default(),
            grid: None,
            outputs: default_outputs(),
            sweep: None,
        }
    }
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::SchemaVersion {
                found: self.schema_version,
            });
        }
        self.params.validate()?;
        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
        }
        Ok(())
    }

    pub fn with_scenario_name(mut self, name: &str) -> Result<Self, ConfigError> {
        self.scenario =
            ScenarioKind::from_name(name).ok_or_else(|| ConfigError::UnknownScenario(name.into()))?;
        Ok(self)
    }
}
