//! Run configuration: a flat TOML document, every field optional with
//! defaults matching the shipped datasets.

use crate::engine::SeedStrategy;
use crate::error::{Error, Result};
use crate::io::ExportFormat;
use crate::survival::CdfMode;
use crate::types::{BuildingType, EconomyId, ScenarioKind, Year};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable naming a directory with default input files.
pub const DATA_DIR_ENV: &str = "BUILDSTOCK_DATA_DIR";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Economies to simulate; empty means every economy in the demand data.
    pub economies: Vec<String>,
    pub building_types: Vec<String>,
    pub scenarios: Vec<String>,
    pub start_year: i32,
    pub end_year: i32,
    /// First and last year of the renovation rate ramps.
    pub ramp_start_year: i32,
    pub ramp_end_year: i32,
    /// `uniform` spreads the opening stock over pre-start vintages;
    /// `single_vintage` books it all at the start year.
    pub seed_strategy: String,
    /// Evaluate lifetime CDFs truncated at age zero (renormalised).
    pub truncate_cdf_at_zero: bool,
    /// Input file locations; empty string selects the built-in dataset
    /// (or a file of the same name under `BUILDSTOCK_DATA_DIR`).
    pub population_file: String,
    pub floorspace_file: String,
    pub policy_file: String,
    pub output_dir: String,
    pub format: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            economies: Vec::new(),
            building_types: vec!["residential".into(), "non_residential".into()],
            scenarios: vec!["NR".into(), "BAU".into(), "TEP".into()],
            start_year: 2000,
            end_year: 2070,
            ramp_start_year: 2021,
            ramp_end_year: 2070,
            seed_strategy: "uniform".into(),
            truncate_cdf_at_zero: false,
            population_file: String::new(),
            floorspace_file: String::new(),
            policy_file: String::new(),
            output_dir: "out".into(),
            format: "csv".into(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(content: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(content)
            .map_err(|e| Error::Configuration(format!("config parse error: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        RunConfig::from_toml_str(&content)
    }

    pub fn validate(&self) -> Result<()> {
        if self.start_year >= self.end_year {
            return Err(Error::Configuration(format!(
                "start_year {} must precede end_year {}",
                self.start_year, self.end_year
            )));
        }
        Year::new(self.start_year)?;
        Year::new(self.end_year)?;
        if self.building_types.is_empty() {
            return Err(Error::Configuration("building_types must be non-empty".into()));
        }
        if self.scenarios.is_empty() {
            return Err(Error::Configuration("scenarios must be non-empty".into()));
        }
        self.span()?;
        self.ramp_window()?;
        self.scenario_kinds()?;
        self.building_type_kinds()?;
        self.seed()?;
        self.export_format()?;
        Ok(())
    }

    pub fn span(&self) -> Result<(Year, Year)> {
        Ok((Year::new(self.start_year)?, Year::new(self.end_year)?))
    }

    pub fn ramp_window(&self) -> Result<(Year, Year)> {
        let window = (Year::new(self.ramp_start_year)?, Year::new(self.ramp_end_year)?);
        if window.0 >= window.1 {
            return Err(Error::Configuration(format!(
                "ramp_start_year {} must precede ramp_end_year {}",
                self.ramp_start_year, self.ramp_end_year
            )));
        }
        Ok(window)
    }

    pub fn scenario_kinds(&self) -> Result<Vec<ScenarioKind>> {
        self.scenarios.iter().map(|s| ScenarioKind::parse(s)).collect()
    }

    pub fn building_type_kinds(&self) -> Result<Vec<BuildingType>> {
        self.building_types
            .iter()
            .map(|s| BuildingType::parse(s))
            .collect()
    }

    pub fn economy_ids(&self) -> Result<Vec<EconomyId>> {
        self.economies.iter().map(EconomyId::new).collect()
    }

    pub fn seed(&self) -> Result<SeedStrategy> {
        match self.seed_strategy.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(SeedStrategy::UniformSpread),
            "single_vintage" => Ok(SeedStrategy::SingleVintage),
            other => Err(Error::Configuration(format!(
                "unknown seed_strategy '{other}' (expected uniform or single_vintage)"
            ))),
        }
    }

    pub fn cdf_mode(&self) -> CdfMode {
        if self.truncate_cdf_at_zero {
            CdfMode::TruncatedAtZero
        } else {
            CdfMode::Untruncated
        }
    }

    pub fn export_format(&self) -> Result<ExportFormat> {
        ExportFormat::parse(&self.format)
    }

    /// Resolves an input path: explicit value wins, then a file of the given
    /// name under `BUILDSTOCK_DATA_DIR`, then the built-in dataset (`None`).
    pub fn resolve_input(&self, explicit: &str, default_name: &str) -> Option<PathBuf> {
        if !explicit.is_empty() {
            return Some(PathBuf::from(explicit));
        }
        if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
            let candidate = Path::new(&dir).join(default_name);
            if candidate.exists() {
                return Some(candidate);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_round_trip_with_overrides() {
        let config = RunConfig::from_toml_str(
            r#"
economies = ["US", "CN"]
scenarios = ["NR", "TEP"]
start_year = 2000
end_year = 2060
seed_strategy = "single_vintage"
truncate_cdf_at_zero = true
format = "json"
"#,
        )
        .unwrap();
        assert_eq!(config.economies, vec!["US", "CN"]);
        assert_eq!(config.seed().unwrap(), crate::engine::SeedStrategy::SingleVintage);
        assert_eq!(config.cdf_mode(), CdfMode::TruncatedAtZero);
        assert_eq!(config.export_format().unwrap(), ExportFormat::Json);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(RunConfig::from_toml_str("start_year = 2070\nend_year = 2000\n").is_err());
        assert!(RunConfig::from_toml_str("scenarios = []\n").is_err());
        assert!(RunConfig::from_toml_str("format = \"xml\"\n").is_err());
        assert!(RunConfig::from_toml_str("seed_strategy = \"fancy\"\n").is_err());
        assert!(RunConfig::from_toml_str("unknown_key = 1\n").is_err());
    }
}
