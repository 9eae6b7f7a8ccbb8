//! Normal-distribution lifetime mathematics: the lifetime CDF, the
//! conditional demolition hazard, precomputed hazard tables, and a
//! Monte-Carlo estimator used as an independent cross-check.

use crate::error::{Error, Result};
use crate::types::LifetimeDistribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::SQRT_2;

/// Largest representable CDF value below 1. Keeping the cumulative strictly
/// below one leaves the "everything remaining retires" case to the explicit
/// terminal-hazard rule instead of a division by zero.
const CDF_CEILING: f64 = 1.0 - f64::EPSILON / 2.0;

/// Denominator threshold below which the conditional hazard saturates at 1.
const SURVIVAL_FLOOR: f64 = 1e-12;

/// How the lifetime CDF treats the distribution's mass below age zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CdfMode {
    /// Plain normal CDF. With the default sigma = mean/3 rule the mass below
    /// zero is about 1.35e-3, well under every model tolerance.
    #[default]
    Untruncated,
    /// Normal CDF truncated at zero and renormalised so that cdf(0) = 0.
    TruncatedAtZero,
}

fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / SQRT_2))
}

/// Probability that a building with lifetime `dist` has retired by age `age`
/// (years, fractional ages allowed). Clamped to [0, 1).
pub fn lifetime_cdf(age: f64, dist: LifetimeDistribution) -> Result<f64> {
    lifetime_cdf_with_mode(age, dist, CdfMode::Untruncated)
}

/// As [`lifetime_cdf`], with an explicit handling mode for the below-zero mass.
pub fn lifetime_cdf_with_mode(age: f64, dist: LifetimeDistribution, mode: CdfMode) -> Result<f64> {
    if !(age.is_finite() && age >= 0.0) {
        return Err(Error::invalid("age", "must be non-negative", age));
    }
    let raw = standard_normal_cdf((age - dist.mean()) / dist.std_dev());
    let p = match mode {
        CdfMode::Untruncated => raw,
        CdfMode::TruncatedAtZero => {
            let at_zero = standard_normal_cdf(-dist.mean() / dist.std_dev());
            ((raw - at_zero) / (1.0 - at_zero)).max(0.0)
        }
    };
    Ok(p.clamp(0.0, CDF_CEILING))
}

/// Conditional probability that a building aged `age` retires this year given
/// survival to `age - 1`: (P_age - P_{age-1}) / (1 - P_{age-1}).
///
/// Saturates at 1 when the survival probability at `age - 1` is numerically
/// exhausted; that signals terminal age, not an error.
pub fn demolition_hazard(age: u32, dist: LifetimeDistribution) -> Result<f64> {
    demolition_hazard_with_mode(age, dist, CdfMode::Untruncated)
}

pub fn demolition_hazard_with_mode(
    age: u32,
    dist: LifetimeDistribution,
    mode: CdfMode,
) -> Result<f64> {
    if age < 1 {
        return Err(Error::invalid("age", "hazard defined for age >= 1", age as f64));
    }
    let prev = lifetime_cdf_with_mode((age - 1) as f64, dist, mode)?;
    let cur = lifetime_cdf_with_mode(age as f64, dist, mode)?;
    let survival = 1.0 - prev;
    if survival <= SURVIVAL_FLOOR {
        return Ok(1.0);
    }
    Ok(((cur - prev) / survival).clamp(0.0, 1.0))
}

/// Precomputed cumulative retirement probabilities and conditional hazards
/// for integer ages 0..=max_age. Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct HazardTable {
    distribution: LifetimeDistribution,
    cumulative: Vec<f64>,
    hazards: Vec<f64>,
}

impl HazardTable {
    /// Builds the table over ages 0..=ceil(mean + 5 sigma). The terminal
    /// hazard is forced to 1 so any cohort reaching the horizon retires fully.
    pub fn build(dist: LifetimeDistribution) -> HazardTable {
        HazardTable::build_with(dist, CdfMode::Untruncated)
    }

    pub fn build_with(dist: LifetimeDistribution, mode: CdfMode) -> HazardTable {
        let max_age = (dist.mean() + 5.0 * dist.std_dev()).ceil() as usize;
        let mut cumulative = Vec::with_capacity(max_age + 1);
        let mut hazards = Vec::with_capacity(max_age + 1);
        cumulative.push(lifetime_cdf_with_mode(0.0, dist, mode).expect("age 0 valid"));
        hazards.push(0.0);
        for age in 1..=max_age {
            cumulative.push(lifetime_cdf_with_mode(age as f64, dist, mode).expect("age valid"));
            hazards.push(
                demolition_hazard_with_mode(age as u32, dist, mode).expect("age >= 1"),
            );
        }
        hazards[max_age] = 1.0;
        HazardTable {
            distribution: dist,
            cumulative,
            hazards,
        }
    }

    /// Builds a table directly from per-age hazards (ages 1..=n in order).
    /// The cumulative sequence is derived by telescoping. Intended for
    /// synthetic fixtures and diagnostics; the final hazard must be 1.
    pub fn from_hazards(dist: LifetimeDistribution, hazards_by_age: &[f64]) -> Result<HazardTable> {
        if hazards_by_age.is_empty() {
            return Err(Error::Configuration("hazard list must be non-empty".into()));
        }
        for (i, h) in hazards_by_age.iter().enumerate() {
            if !(0.0..=1.0).contains(h) {
                return Err(Error::invalid("hazard", "must lie in [0, 1]", *h));
            }
            if i + 1 == hazards_by_age.len() && *h != 1.0 {
                return Err(Error::Configuration(
                    "terminal hazard must be 1 so the cohort fully retires".into(),
                ));
            }
        }
        let mut hazards = vec![0.0];
        hazards.extend_from_slice(hazards_by_age);
        let mut cumulative = Vec::with_capacity(hazards.len());
        let mut survival = 1.0;
        cumulative.push(0.0);
        for h in &hazards[1..] {
            survival *= 1.0 - h;
            cumulative.push((1.0 - survival).min(CDF_CEILING));
        }
        Ok(HazardTable {
            distribution: dist,
            cumulative,
            hazards,
        })
    }

    pub fn distribution(&self) -> LifetimeDistribution {
        self.distribution
    }

    /// Highest tabulated age; the hazard there is 1 by construction.
    pub fn max_age(&self) -> u32 {
        (self.hazards.len() - 1) as u32
    }

    /// Conditional retirement hazard at `age`. Zero below age 1, one beyond
    /// the horizon.
    pub fn hazard(&self, age: i32) -> f64 {
        if age <= 0 {
            0.0
        } else if (age as usize) < self.hazards.len() {
            self.hazards[age as usize]
        } else {
            1.0
        }
    }

    /// Cumulative retirement probability at integer `age` (clamped into the
    /// tabulated range).
    pub fn cumulative(&self, age: i32) -> f64 {
        if age <= 0 {
            self.cumulative[0]
        } else if (age as usize) < self.cumulative.len() {
            self.cumulative[age as usize]
        } else {
            *self.cumulative.last().expect("non-empty")
        }
    }
}

/// Empirical retirement-age distribution from sampled lifetimes.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted_lifetimes: Vec<f64>,
}

impl EmpiricalCdf {
    /// Fraction of sampled lifetimes at or below `age`.
    pub fn at(&self, age: f64) -> f64 {
        let n = self.sorted_lifetimes.len();
        let count = self.sorted_lifetimes.partition_point(|&x| x <= age);
        count as f64 / n as f64
    }

    pub fn median(&self) -> f64 {
        let n = self.sorted_lifetimes.len();
        if n % 2 == 1 {
            self.sorted_lifetimes[n / 2]
        } else {
            0.5 * (self.sorted_lifetimes[n / 2 - 1] + self.sorted_lifetimes[n / 2])
        }
    }

    pub fn len(&self) -> usize {
        self.sorted_lifetimes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_lifetimes.is_empty()
    }
}

/// Samples building lifetimes from the normal distribution (negative draws
/// resampled) and returns the empirical retirement-age CDF. Deterministic for
/// a fixed seed. This is a testing oracle, not part of the simulation path.
pub fn monte_carlo_survival(
    dist: LifetimeDistribution,
    n_samples: usize,
    seed: u64,
) -> Result<EmpiricalCdf> {
    if n_samples < 10_000 {
        return Err(Error::invalid(
            "n_samples",
            "need at least 10000 samples for a stable estimate",
            n_samples as f64,
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lifetimes = Vec::with_capacity(n_samples);
    while lifetimes.len() < n_samples {
        // Box-Muller on explicit uniforms keeps the draw sequence stable
        // across rand version bumps.
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let z = (-2.0 * u1.ln()).sqrt() * u2.cos();
        let lifetime = dist.mean() + dist.std_dev() * z;
        if lifetime >= 0.0 {
            lifetimes.push(lifetime);
        }
    }
    lifetimes.sort_by(|a, b| a.partial_cmp(b).expect("finite lifetimes"));
    Ok(EmpiricalCdf {
        sorted_lifetimes: lifetimes,
    })
}
