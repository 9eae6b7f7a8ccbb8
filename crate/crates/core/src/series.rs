//! Sparse-anchor to dense-annual series interpolation.
//!
//! Demand inputs arrive as a handful of anchor years (survey or projection
//! endpoints). Interior years are filled piecewise-linearly; years beyond the
//! anchored range are extended by the compound annual growth rate fitted to
//! the two nearest anchors.

use crate::error::{Error, Result};
use crate::types::Year;
use std::collections::BTreeMap;

/// Dense annual series over a contiguous span.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSeries {
    start: Year,
    values: Vec<f64>,
}

impl DenseSeries {
    pub fn new(start: Year, values: Vec<f64>) -> Self {
        DenseSeries { start, values }
    }

    pub fn start(&self) -> Year {
        self.start
    }

    pub fn end(&self) -> Year {
        Year(self.start.0 + self.values.len() as i32 - 1)
    }

    pub fn get(&self, year: Year) -> Option<f64> {
        let idx = year.since(self.start);
        if idx < 0 {
            return None;
        }
        self.values.get(idx as usize).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Year, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (Year(self.start.0 + i as i32), v))
    }

    /// Restricts the series to `span`, which must lie within the current one.
    pub fn crop(&self, span: (Year, Year)) -> Option<DenseSeries> {
        let (lo, hi) = span;
        if lo < self.start || hi > self.end() || lo > hi {
            return None;
        }
        let from = lo.since(self.start) as usize;
        let to = hi.since(self.start) as usize;
        Some(DenseSeries::new(lo, self.values[from..=to].to_vec()))
    }
}

fn growth_rate(y0: Year, v0: f64, y1: Year, v1: f64) -> f64 {
    if v0 <= 0.0 || v1 <= 0.0 {
        // Growth is undefined around zero; hold the level instead.
        return 1.0;
    }
    (v1 / v0).powf(1.0 / y1.since(y0) as f64)
}

/// Expands sparse `anchors` to a dense annual series covering `span`.
///
/// Piecewise-linear between anchors; beyond the last anchor the series grows
/// at the compound annual rate fitted to the last two anchors (symmetrically
/// before the first anchor). Anchor years themselves are reproduced exactly,
/// so stated endpoint values are always honoured.
pub fn interpolate_endpoint_series(
    anchors: &BTreeMap<Year, f64>,
    span: (Year, Year),
) -> Result<DenseSeries> {
    if anchors.len() < 2 {
        return Err(Error::Configuration(format!(
            "need at least 2 anchors to interpolate, got {}",
            anchors.len()
        )));
    }
    let (lo, hi) = span;
    if lo > hi {
        return Err(Error::Configuration(format!(
            "empty span [{lo}, {hi}]"
        )));
    }
    let points: Vec<(Year, f64)> = anchors.iter().map(|(y, v)| (*y, *v)).collect();
    for (y, v) in &points {
        if *y < lo || *y > hi {
            return Err(Error::Configuration(format!(
                "anchor year {y} outside span [{lo}, {hi}]"
            )));
        }
        if !v.is_finite() {
            return Err(Error::invalid("anchor", "must be finite", *v));
        }
    }
    let (first, last) = (points[0], points[points.len() - 1]);
    let fwd = growth_rate(points[points.len() - 2].0, points[points.len() - 2].1, last.0, last.1);
    let back = growth_rate(first.0, first.1, points[1].0, points[1].1);

    let mut values = Vec::with_capacity((hi.since(lo) + 1) as usize);
    for y in lo.0..=hi.0 {
        let y = Year(y);
        let v = if y <= first.0 {
            first.1 * back.powi(y.since(first.0))
        } else if y >= last.0 {
            last.1 * fwd.powi(y.since(last.0))
        } else {
            let seg = points
                .windows(2)
                .find(|w| w[0].0 <= y && y <= w[1].0)
                .expect("interior year sits in a segment");
            let ((y0, v0), (y1, v1)) = (seg[0], seg[1]);
            v0 + (v1 - v0) * y.since(y0) as f64 / y1.since(y0) as f64
        };
        values.push(v);
    }
    Ok(DenseSeries::new(lo, values))
}
