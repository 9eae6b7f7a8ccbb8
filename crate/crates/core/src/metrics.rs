//! Derived outputs: scenario stock deltas, avoided construction, and
//! embodied-carbon accounting over new-construction flows.

use crate::engine::SimulationResult;
use crate::error::{Error, Result};
use crate::types::{BuildingType, EconomyId, ScenarioKind, Year};
use std::collections::BTreeMap;

/// Stock difference between two scenarios for one (economy, type, year).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDelta {
    pub economy: EconomyId,
    pub building_type: BuildingType,
    pub year: Year,
    pub baseline: ScenarioKind,
    pub variant: ScenarioKind,
    /// baseline stock minus variant stock, m².
    pub absolute: f64,
    /// `absolute / baseline stock`; `None` when the baseline stock is zero.
    pub relative: Option<f64>,
}

/// Difference in reported building stock at `year`:
/// baseline minus variant, relative to the baseline's same-year stock.
pub fn scenario_delta(
    baseline: &SimulationResult,
    variant: &SimulationResult,
    year: Year,
) -> Result<ScenarioDelta> {
    if !baseline.same_tuple(variant) {
        return Err(Error::InvalidComparison(format!(
            "cannot compare {}/{} against {}/{}",
            baseline.ledger.economy,
            baseline.ledger.building_type,
            variant.ledger.economy,
            variant.ledger.building_type
        )));
    }
    let base = baseline.ledger.building_stock(year).ok_or_else(|| {
        Error::InvalidComparison(format!("baseline does not cover year {year}"))
    })?;
    let var = variant
        .ledger
        .building_stock(year)
        .ok_or_else(|| Error::InvalidComparison(format!("variant does not cover year {year}")))?;
    let absolute = base - var;
    Ok(ScenarioDelta {
        economy: baseline.ledger.economy.clone(),
        building_type: baseline.ledger.building_type,
        year,
        baseline: baseline.ledger.scenario,
        variant: variant.ledger.scenario,
        absolute,
        relative: (base > 0.0).then(|| absolute / base),
    })
}

/// Per-year construction avoided by a renovation scenario relative to the
/// no-renovation run: `NC_baseline - NC_scenario`. When both runs share
/// construction lifetimes, the cumulative series equals the scenario's
/// cumulative net renovated flow exactly.
pub fn avoided_construction(
    baseline: &SimulationResult,
    scenario: &SimulationResult,
) -> Result<BTreeMap<Year, f64>> {
    if !baseline.same_tuple(scenario) {
        return Err(Error::InvalidComparison(
            "avoided construction requires matching economy and building type".into(),
        ));
    }
    let (b, s) = (&baseline.ledger, &scenario.ledger);
    if b.start_year() != s.start_year() || b.rows.len() != s.rows.len() {
        return Err(Error::InvalidComparison(format!(
            "span mismatch: [{}, {}] vs [{}, {}]",
            b.start_year(),
            b.end_year(),
            s.start_year(),
            s.end_year()
        )));
    }
    Ok(b.rows
        .iter()
        .zip(&s.rows)
        .map(|(rb, rs)| (rb.year, rb.new_construction - rs.new_construction))
        .collect())
}

/// Embodied carbon of a new-construction series under a (user-supplied,
/// possibly time-varying) intensity, in MtCO₂ per year.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbodiedCarbonSeries {
    /// MtCO₂ attributed to new construction, per year.
    pub emissions: BTreeMap<Year, f64>,
}

impl EmbodiedCarbonSeries {
    pub fn cumulative(&self) -> f64 {
        self.emissions.values().sum()
    }
}

const KG_PER_MEGATONNE: f64 = 1e9;

/// Multiplies a new-construction series (m² per year) by carbon intensity
/// (kgCO₂ per m²) and converts to MtCO₂. Intensities must be non-negative
/// and cover every construction year.
pub fn embodied_carbon(
    new_construction: &BTreeMap<Year, f64>,
    intensity: &BTreeMap<Year, f64>,
) -> Result<EmbodiedCarbonSeries> {
    for (year, kg_per_m2) in intensity {
        if !(kg_per_m2.is_finite() && *kg_per_m2 >= 0.0) {
            return Err(Error::invalid(
                "intensity",
                "must be non-negative and finite",
                *kg_per_m2,
            ));
        }
        let _ = year;
    }
    let mut emissions = BTreeMap::new();
    for (year, area) in new_construction {
        let kg_per_m2 = intensity.get(year).ok_or_else(|| Error::DataGap {
            what: "carbon intensity",
            economy: String::new(),
            building_type: String::new(),
            year: year.get(),
        })?;
        emissions.insert(*year, area * kg_per_m2 / KG_PER_MEGATONNE);
    }
    Ok(EmbodiedCarbonSeries { emissions })
}

/// Convenience: the new-construction series of a result as a year map.
pub fn new_construction_series(result: &SimulationResult) -> BTreeMap<Year, f64> {
    result
        .ledger
        .rows
        .iter()
        .map(|r| (r.year, r.new_construction))
        .collect()
}
