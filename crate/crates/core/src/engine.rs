//! The yearly cohort-turnover loop.
//!
//! Each (economy, building type, scenario) run advances one year at a time:
//!
//! 1. every new-build cohort sheds floorspace through its lifetime hazard
//!    (demolition, `DB`);
//! 2. every renovated cohort sheds floorspace through the renovation-cycle
//!    hazard (`DRB`); generation-1 retirements re-enter at the second
//!    renovation rate where the policy allows, generation-2 always exits;
//! 3. the first-renovation rate diverts a fraction of this year's demolition
//!    into a fresh renovated cohort (`RB`);
//! 4. new construction closes the new-build ledger to the exogenous demand
//!    target (population x per-capita floorspace).
//!
//! The new-build ledger is driven by demand alone, so demolition flows are
//! identical across scenarios that share construction lifetimes. Renovation
//! is layered on top: surviving renovated floorspace substitutes for new
//! construction one-for-one, which makes the reported scenario stock exactly
//! `stock(no-renovation) - surviving renovated floorspace` and keeps the
//! stock ordering between any two rate schedules a strict algebraic
//! consequence of pointwise rate dominance.

use crate::error::{Error, Result};
use crate::scenario::{DemandSeries, ScenarioPolicy};
use crate::survival::{CdfMode, HazardTable};
use crate::types::{
    Cohort, LedgerRow, LifetimeDistribution, Provenance, StockLedger, Year,
};
use std::collections::HashMap;

/// How the opening stock is distributed over synthetic pre-start vintages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedStrategy {
    /// Spread uniformly over the construction-lifetime mean preceding the
    /// start year, so the opening stock carries a full age mix.
    #[default]
    UniformSpread,
    /// Single cohort dated at the start year (sensitivity alternative).
    SingleVintage,
}

/// Cache of hazard tables keyed by lifetime distribution. Tables registered
/// through [`HazardCache::insert_override`] take precedence over freshly
/// built ones, which lets tests and diagnostics inject hand-specified
/// hazard sequences.
#[derive(Debug, Default)]
pub struct HazardCache {
    mode: CdfMode,
    tables: HashMap<(u64, u64), HazardTable>,
}

impl HazardCache {
    pub fn new(mode: CdfMode) -> Self {
        HazardCache {
            mode,
            tables: HashMap::new(),
        }
    }

    pub fn insert_override(&mut self, table: HazardTable) {
        self.tables.insert(table.distribution().key(), table);
    }

    pub fn get_or_build(&mut self, dist: LifetimeDistribution) -> &HazardTable {
        self.tables
            .entry(dist.key())
            .or_insert_with(|| HazardTable::build_with(dist, self.mode))
    }
}

/// Run-level options independent of the policy.
#[derive(Debug, Default)]
pub struct EngineOptions {
    pub seed_strategy: SeedStrategy,
    pub cdf_mode: CdfMode,
    hazard_overrides: Vec<HazardTable>,
}

impl EngineOptions {
    /// Replaces the computed hazard table for the table's distribution.
    pub fn with_hazard_override(mut self, table: HazardTable) -> Self {
        self.hazard_overrides.push(table);
        self
    }
}

/// Floorspace a single cohort loses to demolition in `year`, per its own
/// lifetime hazard. The caller is responsible for reducing the cohort.
pub fn demolish_vintage(cohort: &Cohort, year: Year, cache: &mut HazardCache) -> Result<f64> {
    let age = cohort.age_at(year);
    if age < 0 {
        return Err(Error::invalid(
            "year",
            "demolition year precedes cohort vintage",
            year.get() as f64,
        ));
    }
    let hazard = cache.get_or_build(cohort.lifetime).hazard(age);
    Ok(cohort.floorspace * hazard)
}

/// Total demolition in `year` across the new-build cohorts of a stock.
pub fn total_demolition(cohorts: &[Cohort], year: Year, cache: &mut HazardCache) -> Result<f64> {
    let mut total = 0.0;
    for cohort in cohorts
        .iter()
        .filter(|c| c.provenance == Provenance::NewBuild)
    {
        total += demolish_vintage(cohort, year, cache)?;
    }
    Ok(total)
}

/// Floorspace returned to service by renovation: `rate` times the demolition
/// flow. The engine books the result as a renovated cohort dated this year.
pub fn renovate(demolished: f64, rate: f64) -> Result<f64> {
    if !(demolished.is_finite() && demolished >= 0.0) {
        return Err(Error::invalid(
            "demolished",
            "must be non-negative",
            demolished,
        ));
    }
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::invalid("rate", "must lie in [0, 1]", rate));
    }
    Ok(rate * demolished)
}

/// Total retirement in `year` across renovated cohorts, with age measured
/// from the renovation year and the renovation-cycle lifetime as hazard.
pub fn demolish_renovated(cohorts: &[Cohort], year: Year, cache: &mut HazardCache) -> Result<f64> {
    let mut total = 0.0;
    for cohort in cohorts.iter().filter(|c| c.provenance.is_renovated()) {
        total += demolish_vintage(cohort, year, cache)?;
    }
    Ok(total)
}

/// Result of one scenario run: the complete stock ledger.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub ledger: StockLedger,
}

impl SimulationResult {
    pub fn same_tuple(&self, other: &SimulationResult) -> bool {
        self.ledger.economy == other.ledger.economy
            && self.ledger.building_type == other.ledger.building_type
    }
}

fn seed_cohorts(
    policy: &ScenarioPolicy,
    start: Year,
    opening_stock: f64,
    strategy: SeedStrategy,
) -> Result<Vec<Cohort>> {
    if opening_stock == 0.0 {
        return Ok(Vec::new());
    }
    match strategy {
        SeedStrategy::SingleVintage => Ok(vec![Cohort::new(
            start,
            opening_stock,
            policy.construction_lifetime.for_vintage(start),
            Provenance::NewBuild,
        )?]),
        SeedStrategy::UniformSpread => {
            let span = policy
                .construction_lifetime
                .for_vintage(Year(start.0 - 1))
                .mean()
                .round()
                .max(1.0) as i32;
            let share = opening_stock / span as f64;
            let mut cohorts = Vec::with_capacity(span as usize);
            let mut allocated = 0.0;
            for offset in (1..=span).rev() {
                let vintage = Year::new(start.0 - offset)?;
                // last cohort takes the residual so the seed sums exactly
                let size = if offset == 1 {
                    opening_stock - allocated
                } else {
                    allocated += share;
                    share
                };
                cohorts.push(Cohort::new(
                    vintage,
                    size,
                    policy.construction_lifetime.for_vintage(vintage),
                    Provenance::NewBuild,
                )?);
            }
            Ok(cohorts)
        }
    }
}

/// Runs one (economy, building type, scenario) simulation over
/// `[start, end]`, seeding the opening stock at `start` and stepping each
/// subsequent year. Deterministic: identical inputs give identical ledgers.
pub fn run_simulation(
    policy: &ScenarioPolicy,
    demand: &DemandSeries,
    start: Year,
    end: Year,
    options: &EngineOptions,
) -> Result<SimulationResult> {
    if start >= end {
        return Err(Error::Configuration(format!(
            "start year {start} must precede end year {end}"
        )));
    }
    let mut cache = HazardCache::new(options.cdf_mode);
    for table in &options.hazard_overrides {
        cache.insert_override(table.clone());
    }

    let demand_at =
        |year: Year| demand.demand_at(&policy.economy, policy.building_type, year);

    let opening = demand_at(start)?;
    let mut newbuild = seed_cohorts(policy, start, opening, options.seed_strategy)?;
    let mut renovated: Vec<Cohort> = Vec::new();

    let n_years = (end.since(start) + 1) as usize;
    let mut rows = Vec::with_capacity(n_years);
    let mut snapshots = Vec::with_capacity(n_years);
    let opening_total: f64 = newbuild.iter().map(|c| c.floorspace).sum();
    rows.push(LedgerRow {
        year: start,
        stock_total: opening_total,
        renovated_stock: 0.0,
        demolished: 0.0,
        renovated: 0.0,
        demolished_renovated: 0.0,
        new_construction: 0.0,
        surplus: 0.0,
    });
    snapshots.push(newbuild.clone());

    for y in (start.0 + 1)..=end.0 {
        let year = Year(y);
        let target = demand_at(year)?;

        // 1. lifetime demolition of new-build cohorts
        let mut demolished = 0.0;
        for cohort in &mut newbuild {
            let loss = demolish_vintage(cohort, year, &mut cache)?;
            cohort.floorspace -= loss;
            demolished += loss;
        }
        newbuild.retain(|c| c.floorspace > 0.0);

        // 2. retirement of renovated cohorts, by generation
        let mut retired_gen1 = 0.0;
        let mut retired_gen2 = 0.0;
        for cohort in &mut renovated {
            let loss = demolish_vintage(cohort, year, &mut cache)?;
            cohort.floorspace -= loss;
            match cohort.provenance {
                Provenance::Renovated { generation: 1 } => retired_gen1 += loss,
                _ => retired_gen2 += loss,
            }
        }
        renovated.retain(|c| c.floorspace > 0.0);

        // 3. second renovation re-entry, then first renovation of this
        //    year's demolition; both cohorts enter the hazard pool next year
        let cycle = policy.renovation_cycle;
        let second_flow = renovate(retired_gen1, policy.second_rate_at(year))?;
        if second_flow > 0.0 {
            renovated.push(Cohort::new(
                year,
                second_flow,
                cycle.expect("second renovation implies a cycle"),
                Provenance::Renovated { generation: 2 },
            )?);
        }
        let renovated_flow = renovate(demolished, policy.first_rate_at(year))?;
        if renovated_flow > 0.0 {
            renovated.push(Cohort::new(
                year,
                renovated_flow,
                cycle.expect("first renovation implies a cycle"),
                Provenance::Renovated { generation: 1 },
            )?);
        }
        let retired_renovated = retired_gen1 + retired_gen2 - second_flow;

        // 4. demand closure: the new-build ledger tops up to the demand
        //    target; reported construction nets out renovation substitution
        let n_after: f64 = newbuild.iter().map(|c| c.floorspace).sum();
        let gross_construction = (target - n_after).max(0.0);
        if gross_construction > 0.0 {
            newbuild.push(Cohort::new(
                year,
                gross_construction,
                policy.construction_lifetime.for_vintage(year),
                Provenance::NewBuild,
            )?);
        }
        let stock_total = n_after + gross_construction;
        let renovated_stock: f64 = renovated.iter().map(|c| c.floorspace).sum();

        let implied_construction = gross_construction - renovated_flow + retired_renovated;
        let new_construction = implied_construction.max(0.0);
        let surplus = (-implied_construction).max(0.0);

        rows.push(LedgerRow {
            year,
            stock_total,
            renovated_stock,
            demolished,
            renovated: renovated_flow,
            demolished_renovated: retired_renovated,
            new_construction,
            surplus,
        });
        let mut snapshot = newbuild.clone();
        snapshot.extend(renovated.iter().cloned());
        snapshots.push(snapshot);
    }

    Ok(SimulationResult {
        ledger: StockLedger {
            economy: policy.economy.clone(),
            building_type: policy.building_type,
            scenario: policy.scenario,
            rows,
            cohorts: snapshots,
        },
    })
}
