//! Data ingestion and result export.
//!
//! Input files are plain comma-separated text with a one-line header,
//! `.` decimal separator, and integer years. Floorspace values may be given
//! in square feet (`unit` column `sqft`) and are converted at ingestion.

use crate::error::{Error, Result};
use crate::scenario::{DemandSeries, PolicyRow, PolicyTable, RampShape, RampSpec};
use crate::series::interpolate_endpoint_series;
use crate::types::{BuildingType, EconomyId, ScenarioKind, Year};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Square feet per square metre, applied exactly at ingestion.
pub const SQFT_PER_M2: f64 = 10.7639;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(file: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}

struct FieldParser<'a> {
    file: &'a str,
    line: u64,
    headers: &'a csv::StringRecord,
    record: &'a csv::StringRecord,
}

impl<'a> FieldParser<'a> {
    fn raw(&self, name: &str) -> Result<&'a str> {
        let idx = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(self.file, 1, format!("missing column '{name}'")))?;
        Ok(self.record.get(idx).unwrap_or("").trim())
    }

    fn required_f64(&self, name: &str) -> Result<f64> {
        let raw = self.raw(name)?;
        raw.parse::<f64>()
            .map_err(|_| parse_err(self.file, self.line, format!("bad number '{raw}' in '{name}'")))
    }

    fn optional_f64(&self, name: &str) -> Result<Option<f64>> {
        let raw = self.raw(name)?;
        if raw.is_empty() {
            return Ok(None);
        }
        raw.parse::<f64>()
            .map(Some)
            .map_err(|_| parse_err(self.file, self.line, format!("bad number '{raw}' in '{name}'")))
    }

    fn year(&self, name: &str) -> Result<Year> {
        let raw = self.raw(name)?;
        let y: i32 = raw
            .parse()
            .map_err(|_| parse_err(self.file, self.line, format!("bad year '{raw}' in '{name}'")))?;
        Year::new(y).map_err(|e| parse_err(self.file, self.line, e.to_string()))
    }
}

fn for_each_record<F>(file_label: &str, content: &str, mut f: F) -> Result<()>
where
    F: FnMut(FieldParser<'_>) -> Result<()>,
{
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(content.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err(file_label, 1, e.to_string()))?
        .clone();
    for (i, record) in reader.records().enumerate() {
        let line = (i + 2) as u64; // header occupies line 1
        let record = record.map_err(|e| parse_err(file_label, line, e.to_string()))?;
        f(FieldParser {
            file: file_label,
            line,
            headers: &headers,
            record: &record,
        })?;
    }
    Ok(())
}

/// Parses a policy parameter table from CSV text. Rates are given in percent
/// and validated against [0, 100].
pub fn parse_policy_table(file_label: &str, content: &str) -> Result<PolicyTable> {
    let mut rows = Vec::new();
    for_each_record(file_label, content, |p| {
        let scenario = ScenarioKind::parse(p.raw("scenario")?)
            .map_err(|e| parse_err(p.file, p.line, e.to_string()))?;
        let economy = EconomyId::new(p.raw("economy")?)
            .map_err(|e| parse_err(p.file, p.line, e.to_string()))?;
        let building_type = BuildingType::parse(p.raw("building_type")?)
            .map_err(|e| parse_err(p.file, p.line, e.to_string()))?;
        let average_lifetime = (
            p.required_f64("avg_life_to_2030")?,
            p.required_f64("avg_life_from_2031")?,
        );
        let initial_lifetime = (
            p.required_f64("initial_life_to_2030")?,
            p.required_f64("initial_life_from_2031")?,
        );
        let renovation_cycle = p.optional_f64("renovation_cycle")?;

        let ramp = |start_col: &str, end_col: &str, shape_col: Option<&str>, step_col: Option<&str>| -> Result<Option<RampSpec>> {
            let start = p.optional_f64(start_col)?;
            let end = p.optional_f64(end_col)?;
            match (start, end) {
                (None, None) => Ok(None),
                (Some(start_pct), Some(end_pct)) => {
                    for pct in [start_pct, end_pct] {
                        if !(0.0..=100.0).contains(&pct) {
                            return Err(parse_err(
                                p.file,
                                p.line,
                                format!("rate {pct}% outside [0, 100]"),
                            ));
                        }
                    }
                    let shape = match shape_col.map(|c| p.raw(c)).transpose()? {
                        Some("annual_increment") => {
                            let step = step_col
                                .map(|c| p.required_f64(c))
                                .transpose()?
                                .unwrap_or(0.0);
                            RampShape::AnnualIncrement {
                                step_per_year: step / 100.0,
                            }
                        }
                        Some("linear") | Some("") | None => RampShape::Linear,
                        Some(other) => {
                            return Err(parse_err(
                                p.file,
                                p.line,
                                format!("unknown ramp shape '{other}'"),
                            ))
                        }
                    };
                    Ok(Some(RampSpec {
                        start_rate: start_pct / 100.0,
                        end_rate: end_pct / 100.0,
                        shape,
                    }))
                }
                _ => Err(parse_err(
                    p.file,
                    p.line,
                    format!("columns {start_col}/{end_col} must both be set or both empty"),
                )),
            }
        };

        let first_renovation = ramp(
            "first_start_pct",
            "first_end_pct",
            Some("first_shape"),
            Some("first_step_pct"),
        )?;
        let second_renovation = ramp("second_start_pct", "second_end_pct", None, None)?;

        rows.push(PolicyRow {
            scenario,
            economy,
            building_type,
            average_lifetime,
            initial_lifetime,
            renovation_cycle,
            first_renovation,
            second_renovation,
        });
        Ok(())
    })?;
    PolicyTable::new(rows)
}

/// Loads a policy parameter table from a CSV file.
pub fn load_policy_table(path: &Path) -> Result<PolicyTable> {
    let content = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_policy_table(&path.display().to_string(), &content)
}

type AnchorMap = BTreeMap<(EconomyId, BuildingType), BTreeMap<Year, f64>>;

fn parse_anchor_file(
    file_label: &str,
    content: &str,
    value_col: &str,
    unit_aware: bool,
) -> Result<AnchorMap> {
    let mut anchors: AnchorMap = BTreeMap::new();
    for_each_record(file_label, content, |p| {
        let economy = EconomyId::new(p.raw("economy")?)
            .map_err(|e| parse_err(p.file, p.line, e.to_string()))?;
        let building_type = BuildingType::parse(p.raw("building_type")?)
            .map_err(|e| parse_err(p.file, p.line, e.to_string()))?;
        let year = p.year("year")?;
        let mut value = p.required_f64(value_col)?;
        if value < 0.0 {
            return Err(parse_err(
                p.file,
                p.line,
                format!("negative value {value} in '{value_col}'"),
            ));
        }
        if unit_aware {
            match p.raw("unit")? {
                "m2" | "" => {}
                "sqft" => value /= SQFT_PER_M2,
                other => {
                    return Err(parse_err(p.file, p.line, format!("unknown unit '{other}'")))
                }
            }
        }
        anchors
            .entry((economy, building_type))
            .or_default()
            .insert(year, value);
        Ok(())
    })?;
    Ok(anchors)
}

/// Parses population and per-capita floorspace anchor files and expands them
/// to dense annual series over `span`.
pub fn parse_demand(
    population_label: &str,
    population_csv: &str,
    floorspace_label: &str,
    floorspace_csv: &str,
    span: (Year, Year),
) -> Result<DemandSeries> {
    let population = parse_anchor_file(population_label, population_csv, "population", false)?;
    let floorspace = parse_anchor_file(floorspace_label, floorspace_csv, "value", true)?;

    for key in population.keys() {
        if !floorspace.contains_key(key) {
            return Err(Error::Coverage(format!(
                "{}/{} has population data but no floorspace data",
                key.0, key.1
            )));
        }
    }
    for key in floorspace.keys() {
        if !population.contains_key(key) {
            return Err(Error::Coverage(format!(
                "{}/{} has floorspace data but no population data",
                key.0, key.1
            )));
        }
    }

    let mut series = DemandSeries::new();
    for ((economy, building_type), pop_anchors) in &population {
        let pcf_anchors = &floorspace[&(economy.clone(), *building_type)];
        // interpolate over the hull of span and anchors so anchors beyond a
        // short simulation span still shape the path, then crop to the span
        let expand = |anchors: &BTreeMap<Year, f64>| {
            let lo = anchors.keys().next().map_or(span.0, |y| span.0.min(*y));
            let hi = anchors.keys().last().map_or(span.1, |y| span.1.max(*y));
            (lo, hi)
        };
        let pop = interpolate_endpoint_series(pop_anchors, expand(pop_anchors))
            .and_then(|s| {
                s.crop(span).ok_or_else(|| {
                    Error::Configuration("cropped span outside interpolated range".into())
                })
            })
            .map_err(|e| {
                Error::Configuration(format!("population for {economy}/{building_type}: {e}"))
            })?;
        let pcf = interpolate_endpoint_series(pcf_anchors, expand(pcf_anchors))
            .and_then(|s| {
                s.crop(span).ok_or_else(|| {
                    Error::Configuration("cropped span outside interpolated range".into())
                })
            })
            .map_err(|e| {
                Error::Configuration(format!("floorspace for {economy}/{building_type}: {e}"))
            })?;
        series.insert(economy.clone(), *building_type, pop, pcf);
    }
    Ok(series)
}

/// Loads the demand series from population and floorspace anchor files.
pub fn load_demand(
    population_path: &Path,
    floorspace_path: &Path,
    span: (Year, Year),
) -> Result<DemandSeries> {
    let pop = fs::read_to_string(population_path).map_err(|e| io_err(population_path, e))?;
    let pcf = fs::read_to_string(floorspace_path).map_err(|e| io_err(floorspace_path, e))?;
    parse_demand(
        &population_path.display().to_string(),
        &pop,
        &floorspace_path.display().to_string(),
        &pcf,
        span,
    )
}

/// One exported result row (long form).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResultRecord {
    pub economy: String,
    pub building_type: String,
    pub scenario: String,
    pub year: i32,
    pub stock_m2: f64,
    pub demolished_m2: f64,
    pub renovated_m2: f64,
    pub demolished_renovated_m2: f64,
    pub new_construction_m2: f64,
}

/// Flattens results into export records, sorted for stable output.
pub fn to_records(results: &[crate::engine::SimulationResult]) -> Vec<ResultRecord> {
    let mut records: Vec<ResultRecord> = results
        .iter()
        .flat_map(|r| {
            let ledger = &r.ledger;
            ledger.rows.iter().map(move |row| ResultRecord {
                economy: ledger.economy.to_string(),
                building_type: ledger.building_type.to_string(),
                scenario: ledger.scenario.to_string(),
                year: row.year.get(),
                stock_m2: row.building_stock(),
                demolished_m2: row.demolished,
                renovated_m2: row.renovated,
                demolished_renovated_m2: row.demolished_renovated,
                new_construction_m2: row.new_construction,
            })
        })
        .collect();
    records.sort_by(|a, b| {
        (&a.economy, &a.building_type, &a.scenario, a.year).cmp(&(
            &b.economy,
            &b.building_type,
            &b.scenario,
            b.year,
        ))
    });
    records
}

fn records_to_csv(records: &[ResultRecord]) -> String {
    let mut out = String::from(
        "economy,building_type,scenario,year,stock_m2,demolished_m2,renovated_m2,demolished_renovated_m2,new_construction_m2\n",
    );
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.economy,
            r.building_type,
            r.scenario,
            r.year,
            r.stock_m2,
            r.demolished_m2,
            r.renovated_m2,
            r.demolished_renovated_m2,
            r.new_construction_m2
        )
        .expect("string write");
    }
    out
}

/// Reads back a results CSV produced by [`export_results`].
pub fn import_results(path: &Path) -> Result<Vec<ResultRecord>> {
    let content = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let label = path.display().to_string();
    let mut records = Vec::new();
    for_each_record(&label, &content, |p| {
        records.push(ResultRecord {
            economy: p.raw("economy")?.to_string(),
            building_type: p.raw("building_type")?.to_string(),
            scenario: p.raw("scenario")?.to_string(),
            year: p.year("year")?.get(),
            stock_m2: p.required_f64("stock_m2")?,
            demolished_m2: p.required_f64("demolished_m2")?,
            renovated_m2: p.required_f64("renovated_m2")?,
            demolished_renovated_m2: p.required_f64("demolished_renovated_m2")?,
            new_construction_m2: p.required_f64("new_construction_m2")?,
        });
        Ok(())
    })?;
    Ok(records)
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        write!(out, "{byte:02x}").expect("string write");
    }
    out
}

/// Canonical value-level hash of a policy table: insensitive to file
/// formatting, sensitive to any parameter change.
pub fn policy_table_hash(table: &PolicyTable) -> String {
    let mut rows: Vec<String> = table
        .rows()
        .iter()
        .map(|r| {
            let ramp = |spec: &Option<RampSpec>| match spec {
                None => "-".to_string(),
                Some(s) => {
                    let shape = match s.shape {
                        RampShape::Linear => "linear".to_string(),
                        RampShape::AnnualIncrement { step_per_year } => {
                            format!("inc:{step_per_year}")
                        }
                    };
                    format!("{}..{}@{}", s.start_rate, s.end_rate, shape)
                }
            };
            format!(
                "{}|{}|{}|{}:{}|{}:{}|{:?}|{}|{}",
                r.scenario,
                r.economy,
                r.building_type,
                r.average_lifetime.0,
                r.average_lifetime.1,
                r.initial_lifetime.0,
                r.initial_lifetime.1,
                r.renovation_cycle,
                ramp(&r.first_renovation),
                ramp(&r.second_renovation),
            )
        })
        .collect();
    rows.sort();
    sha256_hex(rows.join("\n").as_bytes())
}

/// Canonical value-level hash of a demand series.
pub fn demand_hash(series: &DemandSeries) -> String {
    let mut out = String::new();
    for (economy, building_type) in series.keys() {
        write!(out, "{economy}|{building_type}:").expect("string write");
        if let Some((pop, pcf)) = series.series(economy, *building_type) {
            for ((year, p), (_, f)) in pop.iter().zip(pcf.iter()) {
                write!(out, "{year}={p},{f};").expect("string write");
            }
        }
        out.push('\n');
    }
    sha256_hex(out.as_bytes())
}

/// Run manifest: configuration echo plus content hashes of every input and
/// of the exported results. No timestamps, so identical runs produce
/// identical manifests.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub config: serde_json::Value,
    pub input_hashes: BTreeMap<String, String>,
    pub results_sha256: String,
}

/// Output format for exported results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExportFormat {
    #[default]
    Csv,
    Json,
}

impl ExportFormat {
    pub fn parse(token: &str) -> Result<Self> {
        match token.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::Configuration(format!(
                "unknown output format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// Paths written by [`export_results`].
#[derive(Debug, Clone)]
pub struct ExportedFiles {
    pub results: PathBuf,
    pub manifest: PathBuf,
}

/// Writes the long-form results table and the run manifest into `out_dir`.
pub fn export_results(
    results: &[crate::engine::SimulationResult],
    out_dir: &Path,
    format: ExportFormat,
    config_echo: serde_json::Value,
    input_hashes: BTreeMap<String, String>,
) -> Result<ExportedFiles> {
    if results.is_empty() {
        return Err(Error::Configuration("no results to export".into()));
    }
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let records = to_records(results);

    let (results_path, payload) = match format {
        ExportFormat::Csv => (out_dir.join("results.csv"), records_to_csv(&records)),
        ExportFormat::Json => (
            out_dir.join("results.json"),
            serde_json::to_string_pretty(&records).expect("serializable records") + "\n",
        ),
    };
    fs::write(&results_path, &payload).map_err(|e| io_err(&results_path, e))?;

    let manifest = RunManifest {
        config: config_echo,
        input_hashes,
        results_sha256: sha256_hex(payload.as_bytes()),
    };
    let manifest_path = out_dir.join("manifest.json");
    let manifest_payload =
        serde_json::to_string_pretty(&manifest).expect("serializable manifest") + "\n";
    fs::write(&manifest_path, manifest_payload).map_err(|e| io_err(&manifest_path, e))?;

    Ok(ExportedFiles {
        results: results_path,
        manifest: manifest_path,
    })
}
