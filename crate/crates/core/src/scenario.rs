//! Scenario policy construction: renovation-rate ramps, per-economy policy
//! rows, and the exogenous demand series (population x per-capita floorspace).

use crate::error::{Error, Result};
use crate::series::DenseSeries;
use crate::types::{BuildingType, EconomyId, LifetimeDistribution, ScenarioKind, Year};
use std::collections::BTreeMap;

/// Default projection window over which table rate ranges ramp from their
/// minimum to their maximum.
pub const DEFAULT_RAMP_WINDOW: (Year, Year) = (Year(2021), Year(2070));

/// Vintage year from which the second lifetime segment applies.
pub const LIFETIME_BREAK_VINTAGE: Year = Year(2031);

/// Time path of a renovation rate between a start and an end level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RampShape {
    /// Straight line from start to end rate across the window.
    Linear,
    /// Fixed percentage-point increment per year, capped at the end rate.
    AnnualIncrement { step_per_year: f64 },
}

/// A renovation-rate schedule. Rates are fractions in [0, 1]; evaluation is
/// clamped to [start_rate, end_rate] outside the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenovationRamp {
    pub start_year: Year,
    pub end_year: Year,
    pub start_rate: f64,
    pub end_rate: f64,
    pub shape: RampShape,
}

impl RenovationRamp {
    pub fn new(
        start_year: Year,
        end_year: Year,
        start_rate: f64,
        end_rate: f64,
        shape: RampShape,
    ) -> Result<Self> {
        if start_year >= end_year {
            return Err(Error::Configuration(format!(
                "ramp start year {start_year} must precede end year {end_year}"
            )));
        }
        if !(0.0..=1.0).contains(&start_rate) {
            return Err(Error::invalid("start_rate", "must lie in [0, 1]", start_rate));
        }
        if !(start_rate..=1.0).contains(&end_rate) {
            return Err(Error::invalid(
                "end_rate",
                "must lie in [start_rate, 1]",
                end_rate,
            ));
        }
        if let RampShape::AnnualIncrement { step_per_year } = shape {
            if !(step_per_year.is_finite() && step_per_year >= 0.0) {
                return Err(Error::invalid(
                    "step_per_year",
                    "must be non-negative",
                    step_per_year,
                ));
            }
        }
        Ok(RenovationRamp {
            start_year,
            end_year,
            start_rate,
            end_rate,
            shape,
        })
    }

    /// Renovation rate applying in `year`, clamped into [start_rate, end_rate].
    pub fn rate_at(&self, year: Year) -> f64 {
        let elapsed = year.since(self.start_year) as f64;
        let raw = match self.shape {
            RampShape::Linear => {
                let window = self.end_year.since(self.start_year) as f64;
                self.start_rate + (self.end_rate - self.start_rate) * elapsed / window
            }
            RampShape::AnnualIncrement { step_per_year } => {
                self.start_rate + step_per_year * elapsed
            }
        };
        raw.clamp(self.start_rate, self.end_rate)
    }
}

/// Construction lifetime by cohort vintage: an ordered list of
/// (first applicable vintage, distribution) segments.
#[derive(Debug, Clone, PartialEq)]
pub struct VintageLifetimes {
    segments: Vec<(Year, LifetimeDistribution)>,
}

impl VintageLifetimes {
    pub fn uniform(dist: LifetimeDistribution) -> Self {
        VintageLifetimes {
            segments: vec![(Year::MIN, dist)],
        }
    }

    /// Two-segment rule: `early` for vintages before `break_vintage`, `late`
    /// from it onward. Collapses to a single segment when both match.
    pub fn split(early: LifetimeDistribution, late: LifetimeDistribution, break_vintage: Year) -> Self {
        if early == late {
            return VintageLifetimes::uniform(early);
        }
        VintageLifetimes {
            segments: vec![(Year::MIN, early), (break_vintage, late)],
        }
    }

    pub fn for_vintage(&self, vintage: Year) -> LifetimeDistribution {
        let mut current = self.segments[0].1;
        for (from, dist) in &self.segments {
            if vintage >= *from {
                current = *dist;
            }
        }
        current
    }

    pub fn distributions(&self) -> impl Iterator<Item = LifetimeDistribution> + '_ {
        self.segments.iter().map(|(_, d)| *d)
    }
}

/// Complete renovation and lifetime rules for one (scenario, economy, type).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPolicy {
    pub scenario: ScenarioKind,
    pub economy: EconomyId,
    pub building_type: BuildingType,
    /// Hazard basis for new-build cohorts, by construction vintage. This is
    /// the service life a building reaches without any renovation.
    pub construction_lifetime: VintageLifetimes,
    /// Total lifetime reached with the full renovation sequence, by vintage
    /// (pre/post break). Carried for reporting and validation only.
    pub average_lifetime: (f64, f64),
    /// Service-life extension granted by one renovation; hazard basis for
    /// renovated cohorts.
    pub renovation_cycle: Option<LifetimeDistribution>,
    pub first_renovation: Option<RenovationRamp>,
    pub second_renovation: Option<RenovationRamp>,
}

impl ScenarioPolicy {
    pub fn has_renovation(&self) -> bool {
        self.first_renovation.is_some()
    }

    pub fn first_rate_at(&self, year: Year) -> f64 {
        self.first_renovation.map_or(0.0, |r| r.rate_at(year))
    }

    pub fn second_rate_at(&self, year: Year) -> f64 {
        self.second_renovation.map_or(0.0, |r| r.rate_at(year))
    }

    fn validate(&self) -> Result<()> {
        if self.scenario == ScenarioKind::NR && self.first_renovation.is_some() {
            return Err(Error::Configuration(format!(
                "NR policy for {}/{} must not carry renovation rates",
                self.economy, self.building_type
            )));
        }
        if self.second_renovation.is_some() && self.first_renovation.is_none() {
            return Err(Error::Configuration(format!(
                "policy for {}/{}/{} has a second renovation without a first",
                self.scenario, self.economy, self.building_type
            )));
        }
        if self.first_renovation.is_some() && self.renovation_cycle.is_none() {
            return Err(Error::Configuration(format!(
                "policy for {}/{}/{} has renovation rates but no renovation cycle",
                self.scenario, self.economy, self.building_type
            )));
        }
        Ok(())
    }
}

/// Ramp parameters as stored in a policy table row (window applied later).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampSpec {
    pub start_rate: f64,
    pub end_rate: f64,
    pub shape: RampShape,
}

/// One parsed policy-table row.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRow {
    pub scenario: ScenarioKind,
    pub economy: EconomyId,
    pub building_type: BuildingType,
    /// (vintages before the break year, vintages from it on)
    pub average_lifetime: (f64, f64),
    pub initial_lifetime: (f64, f64),
    pub renovation_cycle: Option<f64>,
    pub first_renovation: Option<RampSpec>,
    pub second_renovation: Option<RampSpec>,
}

/// Parameter table holding rows for every configured
/// (scenario, economy, building type) tuple.
#[derive(Debug, Clone, Default)]
pub struct PolicyTable {
    rows: Vec<PolicyRow>,
}

impl PolicyTable {
    pub fn new(rows: Vec<PolicyRow>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for row in &rows {
            let key = (row.scenario, row.economy.clone(), row.building_type);
            if seen.insert(key.clone(), ()).is_some() {
                return Err(Error::Configuration(format!(
                    "duplicate policy row for {}/{}/{}",
                    key.0, key.1, key.2
                )));
            }
        }
        Ok(PolicyTable { rows })
    }

    pub fn rows(&self) -> &[PolicyRow] {
        &self.rows
    }

    pub fn find(
        &self,
        scenario: ScenarioKind,
        economy: &EconomyId,
        building_type: BuildingType,
    ) -> Option<&PolicyRow> {
        self.rows.iter().find(|r| {
            r.scenario == scenario && &r.economy == economy && r.building_type == building_type
        })
    }

    /// Economies for which any scenario row carries a renovation ramp.
    pub fn renovating_economies(&self) -> Vec<EconomyId> {
        let mut out: Vec<EconomyId> = self
            .rows
            .iter()
            .filter(|r| r.first_renovation.is_some())
            .map(|r| r.economy.clone())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn economies(&self) -> Vec<EconomyId> {
        let mut out: Vec<EconomyId> = self.rows.iter().map(|r| r.economy.clone()).collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Builds the executable policy for one tuple from the parameter table.
///
/// The table lists rate ranges only; the range is anchored to `window`
/// (minimum at the window start, maximum at the end).
pub fn build_policy(
    scenario: ScenarioKind,
    economy: &EconomyId,
    building_type: BuildingType,
    table: &PolicyTable,
    window: (Year, Year),
) -> Result<ScenarioPolicy> {
    let row = table.find(scenario, economy, building_type).ok_or_else(|| {
        Error::Configuration(format!(
            "no policy row for {scenario}/{economy}/{building_type}"
        ))
    })?;

    let early = LifetimeDistribution::with_default_std_dev(row.initial_lifetime.0)?;
    let late = LifetimeDistribution::with_default_std_dev(row.initial_lifetime.1)?;
    let construction_lifetime = VintageLifetimes::split(early, late, LIFETIME_BREAK_VINTAGE);

    let renovation_cycle = row
        .renovation_cycle
        .map(LifetimeDistribution::with_default_std_dev)
        .transpose()?;

    let make_ramp = |spec: &RampSpec| {
        RenovationRamp::new(window.0, window.1, spec.start_rate, spec.end_rate, spec.shape)
    };
    let first_renovation = row.first_renovation.as_ref().map(&make_ramp).transpose()?;
    let second_renovation = row.second_renovation.as_ref().map(&make_ramp).transpose()?;

    let policy = ScenarioPolicy {
        scenario,
        economy: economy.clone(),
        building_type,
        construction_lifetime,
        average_lifetime: row.average_lifetime,
        renovation_cycle,
        first_renovation,
        second_renovation,
    };
    policy.validate()?;
    Ok(policy)
}

/// Exogenous demand inputs: population and per-capita floorspace per
/// (economy, building type), dense over the simulation span.
#[derive(Debug, Clone, Default)]
pub struct DemandSeries {
    population: BTreeMap<(EconomyId, BuildingType), DenseSeries>,
    per_capita: BTreeMap<(EconomyId, BuildingType), DenseSeries>,
}

impl DemandSeries {
    pub fn new() -> Self {
        DemandSeries::default()
    }

    pub fn insert(
        &mut self,
        economy: EconomyId,
        building_type: BuildingType,
        population: DenseSeries,
        per_capita: DenseSeries,
    ) {
        self.population
            .insert((economy.clone(), building_type), population);
        self.per_capita.insert((economy, building_type), per_capita);
    }

    pub fn keys(&self) -> impl Iterator<Item = &(EconomyId, BuildingType)> {
        self.population.keys()
    }

    pub fn economies(&self) -> Vec<EconomyId> {
        let mut out: Vec<EconomyId> = self.population.keys().map(|(e, _)| e.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn covers(&self, economy: &EconomyId, building_type: BuildingType) -> bool {
        self.population
            .contains_key(&(economy.clone(), building_type))
    }

    /// The dense (population, per-capita) pair for one tuple, if covered.
    pub fn series(
        &self,
        economy: &EconomyId,
        building_type: BuildingType,
    ) -> Option<(&DenseSeries, &DenseSeries)> {
        let key = (economy.clone(), building_type);
        Some((self.population.get(&key)?, self.per_capita.get(&key)?))
    }

    pub fn population_at(
        &self,
        economy: &EconomyId,
        building_type: BuildingType,
        year: Year,
    ) -> Result<f64> {
        lookup(&self.population, "population", economy, building_type, year)
    }

    pub fn per_capita_at(
        &self,
        economy: &EconomyId,
        building_type: BuildingType,
        year: Year,
    ) -> Result<f64> {
        lookup(
            &self.per_capita,
            "per-capita floorspace",
            economy,
            building_type,
            year,
        )
    }

    /// Floorspace demand in m²: population times per-capita floorspace,
    /// with no smoothing applied.
    pub fn demand_at(
        &self,
        economy: &EconomyId,
        building_type: BuildingType,
        year: Year,
    ) -> Result<f64> {
        Ok(self.population_at(economy, building_type, year)?
            * self.per_capita_at(economy, building_type, year)?)
    }
}

fn lookup(
    map: &BTreeMap<(EconomyId, BuildingType), DenseSeries>,
    what: &'static str,
    economy: &EconomyId,
    building_type: BuildingType,
    year: Year,
) -> Result<f64> {
    let series = map
        .get(&(economy.clone(), building_type))
        .ok_or_else(|| Error::Coverage(format!("no {what} data for {economy}/{building_type}")))?;
    series.get(year).ok_or_else(|| Error::DataGap {
        what,
        economy: economy.to_string(),
        building_type: building_type.to_string(),
        year: year.get(),
    })
}
