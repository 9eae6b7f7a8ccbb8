//! Built-in default datasets: the renovation parameter table and the demand
//! anchors (population and per-capita floorspace) for the fourteen covered
//! economies. Embedded copies of the files shipped under `data/`.

use crate::error::Result;
use crate::io::{parse_demand, parse_policy_table};
use crate::scenario::{DemandSeries, PolicyTable};
use crate::types::Year;

pub const POLICIES_CSV: &str = include_str!("../data/policies.csv");
pub const POPULATION_CSV: &str = include_str!("../data/population.csv");
pub const FLOORSPACE_CSV: &str = include_str!("../data/floorspace.csv");

/// Default simulation span.
pub const DEFAULT_SPAN: (Year, Year) = (Year(2000), Year(2070));

/// The shipped renovation parameter table.
pub fn policy_table() -> PolicyTable {
    parse_policy_table("builtin:policies.csv", POLICIES_CSV)
        .expect("embedded policy table parses")
}

/// The shipped demand anchors, densified over `span`.
pub fn demand(span: (Year, Year)) -> Result<DemandSeries> {
    parse_demand(
        "builtin:population.csv",
        POPULATION_CSV,
        "builtin:floorspace.csv",
        FLOORSPACE_CSV,
        span,
    )
}
