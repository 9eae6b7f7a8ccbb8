//! Cohort-based building-stock turnover simulator.
//!
//! Floorspace demand per economy and building type is exogenous (population
//! times per-capita floorspace). Buildings retire through a normal-lifetime
//! hazard; a scenario's renovation rates divert part of each year's
//! demolition back into service on a renovation-cycle lifetime, substituting
//! for new construction. Three scenarios are shipped: no renovation (NR),
//! business-as-usual (BAU), and techno-economic potential (TEP).

pub mod config;
pub mod defaults;
pub mod engine;
pub mod error;
pub mod io;
pub mod metrics;
pub mod scenario;
pub mod series;
pub mod survival;
pub mod types;

pub use config::RunConfig;
pub use engine::{run_simulation, EngineOptions, SeedStrategy, SimulationResult};
pub use error::{Error, Result};
pub use metrics::{avoided_construction, embodied_carbon, scenario_delta, ScenarioDelta};
pub use scenario::{
    build_policy, DemandSeries, PolicyTable, RenovationRamp, ScenarioPolicy,
    DEFAULT_RAMP_WINDOW,
};
pub use series::interpolate_endpoint_series;
pub use survival::{
    demolition_hazard, lifetime_cdf, monte_carlo_survival, CdfMode, HazardTable,
};
pub use types::{
    BuildingType, Cohort, EconomyId, LedgerRow, LifetimeDistribution, Provenance, ScenarioKind,
    StockLedger, Year,
};
