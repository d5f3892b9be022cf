//! Scenario configuration (TOML).
//!
//! ```toml
//! [[occupants]]
//! ideal_temp = 17.0
//! sensitivity = 3.0
//! tolerance = 0.0        # optional, default 0
//!
//! [sweep]
//! delta_min = 0.0
//! delta_max = 3.0
//! step = 0.03
//!
//! [simulation]
//! seed = 42
//! days = 7
//!
//! [simulation.thermal]
//! heat_exchange = 0.1
//!
//! [[simulation.segments]]
//! start_day = 0
//! end_day = 2
//! delta = 0.0
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::comfort::Occupant;
use crate::error::{Error, Result};
use crate::policy::tolerance_grid;
use crate::thermal::{OutdoorProfile, ThermalParams, ToleranceSchedule, ToleranceSegment};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OccupantSpec {
    /// Defaults to the 1-based position in the list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u32>,
    pub ideal_temp: f64,
    pub sensitivity: f64,
    #[serde(default)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerConfig {
    pub mu: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig { mu: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub delta_min: f64,
    pub delta_max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub seed: u64,
    pub days: u32,
    pub samples_per_day: u32,
    pub daily_min_range: [f64; 2],
    pub daily_max_range: [f64; 2],
    /// Defaults to the first outdoor sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_room_temp: Option<f64>,
    pub thermal: ThermalParams,
    /// Per-segment common tolerance. Empty means the occupants' own
    /// tolerances apply throughout.
    pub segments: Vec<ToleranceSegment>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        let profile = OutdoorProfile::default();
        SimulationConfig {
            seed: profile.seed,
            days: profile.days,
            samples_per_day: profile.samples_per_day,
            daily_min_range: profile.daily_min_range,
            daily_max_range: profile.daily_max_range,
            initial_room_temp: None,
            thermal: ThermalParams::default(),
            segments: Vec::new(),
        }
    }
}

impl SimulationConfig {
    pub fn profile(&self) -> OutdoorProfile {
        OutdoorProfile {
            seed: self.seed,
            days: self.days,
            daily_min_range: self.daily_min_range,
            daily_max_range: self.daily_max_range,
            samples_per_day: self.samples_per_day,
        }
    }

    pub fn schedule(&self) -> Result<ToleranceSchedule> {
        ToleranceSchedule::new(self.segments.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub occupants: Vec<OccupantSpec>,
    #[serde(default)]
    pub power: PowerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Parses and validates a TOML scenario.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

fn named(field: String, err: Error) -> Error {
    match err {
        Error::InvalidInput {
            field: inner,
            reason,
        } => Error::InvalidInput {
            field: format!("{field}.{inner}"),
            reason,
        },
        other => other,
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.occupants.is_empty() {
            return Err(Error::invalid(
                "occupants",
                "at least one occupant is required",
            ));
        }
        self.occupants()?;
        if !(self.power.mu.is_finite() && self.power.mu >= 0.0) {
            return Err(Error::invalid("power.mu", "must be finite and >= 0"));
        }
        if let Some(s) = &self.sweep {
            tolerance_grid(s.delta_min, s.delta_max, s.step)
                .map_err(|e| named("sweep".into(), e))?;
        }
        if let Some(sim) = &self.simulation {
            sim.profile()
                .validate()
                .map_err(|e| named("simulation".into(), e))?;
            sim.thermal
                .validate()
                .map_err(|e| named("simulation.thermal".into(), e))?;
            sim.schedule().map_err(|e| named("simulation".into(), e))?;
            if let Some(t) = sim.initial_room_temp {
                if !t.is_finite() {
                    return Err(Error::invalid(
                        "simulation.initial_room_temp",
                        "must be finite",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn occupants(&self) -> Result<Vec<Occupant>> {
        self.occupants
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let id = o.id.unwrap_or(i as u32 + 1);
                Occupant::new(id, o.ideal_temp, o.sensitivity, o.tolerance)
                    .map_err(|e| named(format!("occupants[{i}]"), e))
            })
            .collect()
    }

    /// Occupants with every tolerance replaced by `delta`.
    pub fn occupants_with_tolerance(&self, delta: f64) -> Result<Vec<Occupant>> {
        self.occupants()?
            .iter()
            .map(|o| o.with_tolerance(delta))
            .collect()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}
