//! Domain types shared by every other module: identifiers, calendar years,
//! lifetime distributions, cohorts, and the per-run stock ledger.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Short identifier for an economy, e.g. `US`, `CN`, `EU27`, `LAC`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EconomyId(String);

impl EconomyId {
    pub fn new(code: impl Into<String>) -> Result<Self> {
        let code = code.into();
        if code.trim().is_empty() {
            return Err(Error::Configuration("economy code must be non-empty".into()));
        }
        Ok(EconomyId(code))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EconomyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Residential or non-residential floorspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildingType {
    Residential,
    NonResidential,
}

impl BuildingType {
    pub const ALL: [BuildingType; 2] = [BuildingType::Residential, BuildingType::NonResidential];

    pub fn parse(token: &str) -> Result<Self> {
        match token.trim().to_ascii_lowercase().as_str() {
            "residential" | "res" | "r" => Ok(BuildingType::Residential),
            "non_residential" | "non-residential" | "nonresidential" | "nonres" | "n" => {
                Ok(BuildingType::NonResidential)
            }
            other => Err(Error::Configuration(format!(
                "unknown building type token '{other}'"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BuildingType::Residential => "residential",
            BuildingType::NonResidential => "non_residential",
        }
    }
}

impl fmt::Display for BuildingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The three scenarios: no renovation, business-as-usual renovation, and
/// techno-economic-potential renovation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScenarioKind {
    NR,
    BAU,
    TEP,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [ScenarioKind::NR, ScenarioKind::BAU, ScenarioKind::TEP];

    pub fn parse(token: &str) -> Result<Self> {
        match token.trim().to_ascii_uppercase().as_str() {
            "NR" => Ok(ScenarioKind::NR),
            "BAU" => Ok(ScenarioKind::BAU),
            "TEP" => Ok(ScenarioKind::TEP),
            other => Err(Error::Configuration(format!(
                "unknown scenario token '{other}'"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::NR => "NR",
            ScenarioKind::BAU => "BAU",
            ScenarioKind::TEP => "TEP",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Calendar year. Simulation inputs must lie in [1900, 2100]; synthetic seed
/// vintages before the simulation start are allowed within the same range.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Year(pub i32);

impl Year {
    pub const MIN: Year = Year(1900);
    pub const MAX: Year = Year(2100);

    pub fn new(year: i32) -> Result<Self> {
        if !(Year::MIN.0..=Year::MAX.0).contains(&year) {
            return Err(Error::invalid(
                "year",
                "outside supported range [1900, 2100]",
                year as f64,
            ));
        }
        Ok(Year(year))
    }

    pub fn get(self) -> i32 {
        self.0
    }

    /// Whole years elapsed since `other` (may be negative).
    pub fn since(self, other: Year) -> i32 {
        self.0 - other.0
    }
}

impl fmt::Display for Year {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Normal building-lifetime distribution, mean and standard deviation in years.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifetimeDistribution {
    mean: f64,
    std_dev: f64,
}

impl LifetimeDistribution {
    pub fn new(mean: f64, std_dev: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::invalid("mean", "must be positive and finite", mean));
        }
        if !(std_dev.is_finite() && std_dev > 0.0) {
            return Err(Error::invalid(
                "std_dev",
                "must be positive and finite",
                std_dev,
            ));
        }
        Ok(LifetimeDistribution { mean, std_dev })
    }

    /// Default construction rule: standard deviation of one third of the mean.
    pub fn with_default_std_dev(mean: f64) -> Result<Self> {
        LifetimeDistribution::new(mean, mean / 3.0)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std_dev(&self) -> f64 {
        self.std_dev
    }

    /// Bit-level key for caching hazard tables per distribution.
    pub fn key(&self) -> (u64, u64) {
        (self.mean.to_bits(), self.std_dev.to_bits())
    }
}

/// Origin of a cohort: initial construction or a renovation generation (1 or 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    NewBuild,
    Renovated { generation: u8 },
}

impl Provenance {
    pub fn is_renovated(&self) -> bool {
        matches!(self, Provenance::Renovated { .. })
    }
}

/// Floorspace of one construction (or renovation) vintage, tracked as a unit
/// until demolition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cohort {
    pub vintage: Year,
    pub floorspace: f64,
    pub lifetime: LifetimeDistribution,
    pub provenance: Provenance,
}

impl Cohort {
    pub fn new(
        vintage: Year,
        floorspace: f64,
        lifetime: LifetimeDistribution,
        provenance: Provenance,
    ) -> Result<Self> {
        if !(floorspace.is_finite() && floorspace >= 0.0) {
            return Err(Error::invalid(
                "floorspace",
                "must be non-negative and finite",
                floorspace,
            ));
        }
        if let Provenance::Renovated { generation } = provenance {
            if !(1..=2).contains(&generation) {
                return Err(Error::invalid(
                    "generation",
                    "renovation generation must be 1 or 2",
                    generation as f64,
                ));
            }
        }
        Ok(Cohort {
            vintage,
            floorspace,
            lifetime,
            provenance,
        })
    }

    /// Age in whole years at `year`.
    pub fn age_at(&self, year: Year) -> i32 {
        year.since(self.vintage)
    }
}

/// One year of stock accounting for a single (economy, type, scenario) run.
///
/// `stock_total` is the floorspace in service (the sum of all live cohorts);
/// `renovated_stock` is the part of it currently on a renovation lifetime.
/// The headline scenario stock is their difference, see
/// [`LedgerRow::building_stock`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub year: Year,
    /// Total floorspace in service at end of year (sum of cohorts), m².
    pub stock_total: f64,
    /// Surviving renovated floorspace at end of year, m².
    pub renovated_stock: f64,
    /// Floorspace leaving new-build cohorts through lifetime hazard this year, m².
    pub demolished: f64,
    /// Floorspace renovated this year (fraction of `demolished` returned to
    /// service on a renovation-cycle lifetime), m².
    pub renovated: f64,
    /// Renovated floorspace retiring for good this year (net of any second
    /// renovation re-entry), m².
    pub demolished_renovated: f64,
    /// New construction required to meet demand after demolition and
    /// renovation flows, m².
    pub new_construction: f64,
    /// Stock exceeding demand when implied construction would be negative
    /// (demand decline); zero in ordinary years.
    pub surplus: f64,
}

impl LedgerRow {
    /// Reported scenario building stock: floorspace in service on its original
    /// construction basis, i.e. total minus surviving renovated floorspace.
    pub fn building_stock(&self) -> f64 {
        self.stock_total - self.renovated_stock
    }
}

/// Full per-year accounting for one (economy, building type, scenario) run,
/// with end-of-year cohort snapshots for invariant checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StockLedger {
    pub economy: EconomyId,
    pub building_type: BuildingType,
    pub scenario: ScenarioKind,
    pub rows: Vec<LedgerRow>,
    /// Live cohorts (new-build and renovated) at the end of each row's year.
    pub cohorts: Vec<Vec<Cohort>>,
}

impl StockLedger {
    pub fn start_year(&self) -> Year {
        self.rows.first().map(|r| r.year).unwrap_or(Year(0))
    }

    pub fn end_year(&self) -> Year {
        self.rows.last().map(|r| r.year).unwrap_or(Year(0))
    }

    pub fn row(&self, year: Year) -> Option<&LedgerRow> {
        let idx = year.since(self.start_year());
        if idx < 0 {
            return None;
        }
        self.rows.get(idx as usize)
    }

    pub fn cohorts_at(&self, year: Year) -> Option<&[Cohort]> {
        let idx = year.since(self.start_year());
        if idx < 0 {
            return None;
        }
        self.cohorts.get(idx as usize).map(|v| v.as_slice())
    }

    /// Reported building stock at `year`, if covered.
    pub fn building_stock(&self, year: Year) -> Option<f64> {
        self.row(year).map(|r| r.building_stock())
    }
}
