//! Command-line interface: run scenario simulations, compare scenario
//! stocks, validate inputs, and cross-check the survival mathematics.

use buildstock::engine::{run_simulation, EngineOptions};
use buildstock::io;
use buildstock::scenario::{build_policy, DemandSeries, PolicyTable};
use buildstock::{
    defaults, metrics, BuildingType, EconomyId, Error, RunConfig, ScenarioKind, SimulationResult,
    Year,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "buildstock",
    about = "Cohort-based building stock turnover simulator with renovation scenarios",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the configured scenario simulations and export results.
    Run(RunArgs),
    /// Compare reported stock between two scenarios.
    Compare(CompareArgs),
    /// Check inputs and print policy summaries.
    Validate(CommonArgs),
    /// Cross-check the analytic survival CDF against the Monte-Carlo
    /// estimator and print the maximum deviation.
    Oracle(OracleArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Configuration file (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Restrict to these economies (repeatable).
    #[arg(long = "economy")]
    economies: Vec<String>,
    /// Restrict to one building type (residential | non-residential).
    #[arg(long = "type")]
    building_type: Option<String>,
    /// First simulated year.
    #[arg(long = "from")]
    from_year: Option<i32>,
    /// Last simulated year.
    #[arg(long = "to")]
    to_year: Option<i32>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Restrict to these scenarios (repeatable; NR, BAU, TEP).
    #[arg(long = "scenario")]
    scenarios: Vec<String>,
}

#[derive(Args)]
struct CompareArgs {
    /// Baseline scenario (NR, BAU, or TEP).
    baseline: String,
    /// Variant scenario to compare against the baseline.
    variant: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct OracleArgs {
    /// Mean lifetime in years.
    #[arg(long, default_value_t = 50.0)]
    mean: f64,
    /// Number of Monte-Carlo samples.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Random seed.
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Loaded configuration plus resolved inputs.
struct Session {
    config: RunConfig,
    table: PolicyTable,
    demand: DemandSeries,
    span: (Year, Year),
}

fn load_session(common: &CommonArgs) -> Result<Session, Error> {
    let mut config = match &common.config {
        Some(path) => RunConfig::from_toml_file(path)?,
        None => RunConfig::default(),
    };
    if !common.economies.is_empty() {
        config.economies = common.economies.clone();
    }
    if let Some(bt) = &common.building_type {
        config.building_types = vec![BuildingType::parse(bt)?.as_str().to_string()];
    }
    if let Some(from) = common.from_year {
        config.start_year = from;
    }
    if let Some(to) = common.to_year {
        config.end_year = to;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.display().to_string();
    }
    if let Some(format) = &common.format {
        config.format = format.clone();
    }
    config.validate()?;

    let span = config.span()?;
    let table = match config.resolve_input(&config.policy_file, "policies.csv") {
        Some(path) => io::load_policy_table(&path)?,
        None => defaults::policy_table(),
    };
    let demand = match (
        config.resolve_input(&config.population_file, "population.csv"),
        config.resolve_input(&config.floorspace_file, "floorspace.csv"),
    ) {
        (Some(pop), Some(pcf)) => io::load_demand(&pop, &pcf, span)?,
        (None, None) => defaults::demand(span)?,
        (pop, _) => {
            return Err(Error::Configuration(format!(
                "population and floorspace files must be supplied together (got {})",
                if pop.is_some() {
                    "population only"
                } else {
                    "floorspace only"
                }
            )))
        }
    };
    Ok(Session {
        config,
        table,
        demand,
        span,
    })
}

impl Session {
    fn economies(&self) -> Result<Vec<EconomyId>, Error> {
        let requested = self.config.economy_ids()?;
        if requested.is_empty() {
            return Ok(self.demand.economies());
        }
        for economy in &requested {
            if !BuildingType::ALL
                .iter()
                .any(|bt| self.demand.covers(economy, *bt))
            {
                return Err(Error::Coverage(format!(
                    "no demand data for requested economy {economy}"
                )));
            }
        }
        Ok(requested)
    }

    fn simulate(
        &self,
        scenario: ScenarioKind,
        economy: &EconomyId,
        building_type: BuildingType,
    ) -> Result<SimulationResult, Error> {
        let policy = build_policy(
            scenario,
            economy,
            building_type,
            &self.table,
            self.config.ramp_window()?,
        )?;
        let mut options = EngineOptions::default();
        options.seed_strategy = self.config.seed()?;
        options.cdf_mode = self.config.cdf_mode();
        run_simulation(&policy, &self.demand, self.span.0, self.span.1, &options)
    }
}

fn cmd_run(args: RunArgs) -> Result<u8, Error> {
    let session = load_session(&args.common)?;
    let mut config = session.config.clone();
    if !args.scenarios.is_empty() {
        config.scenarios = args.scenarios.clone();
        config.validate()?;
    }
    let scenarios = config.scenario_kinds()?;
    let building_types = config.building_type_kinds()?;
    let economies = session.economies()?;
    let explicit_economies = !config.economies.is_empty();

    let mut results = Vec::new();
    for economy in &economies {
        for bt in &building_types {
            if !session.demand.covers(economy, *bt) {
                continue;
            }
            for scenario in &scenarios {
                if session.table.find(*scenario, economy, *bt).is_none() {
                    // economies without a parameter row run NR only
                    if explicit_economies {
                        return Err(Error::Configuration(format!(
                            "no policy row for {scenario}/{economy}/{bt}"
                        )));
                    }
                    eprintln!("note: skipping {scenario}/{economy}/{bt} (no policy row)");
                    continue;
                }
                results.push(session.simulate(*scenario, economy, *bt)?);
            }
        }
    }
    if results.is_empty() {
        return Err(Error::Configuration(
            "nothing to run: no (scenario, economy, type) tuple has both demand data and a policy row"
                .into(),
        ));
    }

    let input_hashes: BTreeMap<String, String> = [
        (
            "policies".to_string(),
            io::policy_table_hash(&session.table),
        ),
        ("demand".to_string(), io::demand_hash(&session.demand)),
    ]
    .into();
    let echo = serde_json::to_value(&config)
        .map_err(|e| Error::Configuration(format!("config echo: {e}")))?;
    let files = io::export_results(
        &results,
        std::path::Path::new(&config.output_dir),
        config.export_format()?,
        echo,
        input_hashes,
    )?;
    println!(
        "wrote {} and {} ({} runs, {}-{})",
        files.results.display(),
        files.manifest.display(),
        results.len(),
        session.span.0,
        session.span.1
    );
    Ok(0)
}

fn cmd_compare(args: CompareArgs) -> Result<u8, Error> {
    let baseline = ScenarioKind::parse(&args.baseline)?;
    let variant = ScenarioKind::parse(&args.variant)?;
    let session = load_session(&args.common)?;
    let year = Year::new(args.common.to_year.unwrap_or(session.span.1.get()))?;
    let building_types = session.config.building_type_kinds()?;
    let economies = session.economies()?;

    println!("economy,building_type,baseline,variant,year,baseline_stock_m2,variant_stock_m2,absolute_m2,relative_pct");
    let mut printed = 0;
    for economy in &economies {
        for bt in &building_types {
            if !session.demand.covers(economy, *bt) {
                continue;
            }
            if session.table.find(baseline, economy, *bt).is_none()
                || session.table.find(variant, economy, *bt).is_none()
            {
                continue;
            }
            let base_run = session.simulate(baseline, economy, *bt)?;
            let var_run = session.simulate(variant, economy, *bt)?;
            let delta = metrics::scenario_delta(&base_run, &var_run, year)?;
            let base_stock = base_run.ledger.building_stock(year).unwrap_or(0.0);
            let var_stock = var_run.ledger.building_stock(year).unwrap_or(0.0);
            println!(
                "{economy},{bt},{baseline},{variant},{year},{base_stock},{var_stock},{},{}",
                delta.absolute,
                delta
                    .relative
                    .map(|r| format!("{:.2}", 100.0 * r))
                    .unwrap_or_else(|| "NA".into())
            );
            printed += 1;
        }
    }
    if printed == 0 {
        return Err(Error::Configuration(
            "no comparable (economy, type) tuples for the requested scenarios".into(),
        ));
    }
    Ok(0)
}

fn cmd_validate(args: CommonArgs) -> Result<u8, Error> {
    let session = load_session(&args)?;
    let economies = session.demand.economies();
    let renovating = session.table.renovating_economies();

    // every policy row must build into a valid policy
    for row_economy in session.table.economies() {
        for bt in BuildingType::ALL {
            for scenario in ScenarioKind::ALL {
                if session.table.find(scenario, &row_economy, bt).is_some() {
                    build_policy(
                        scenario,
                        &row_economy,
                        bt,
                        &session.table,
                        session.config.ramp_window()?,
                    )?;
                }
            }
        }
    }
    // demand must cover the whole simulation span for every economy
    for economy in &economies {
        for bt in BuildingType::ALL {
            if session.demand.covers(economy, bt) {
                session.demand.demand_at(economy, bt, session.span.0)?;
                session.demand.demand_at(economy, bt, session.span.1)?;
            }
        }
    }

    println!(
        "inputs ok: {} economies with demand data, span {}-{}",
        economies.len(),
        session.span.0,
        session.span.1
    );
    println!(
        "renovation policies: {} economies ({})",
        renovating.len(),
        renovating
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    for scenario in ScenarioKind::ALL {
        let rows = session
            .table
            .rows()
            .iter()
            .filter(|r| r.scenario == scenario)
            .count();
        println!("  {scenario}: {rows} parameter rows");
    }
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, Error> {
    let dist = buildstock::LifetimeDistribution::with_default_std_dev(args.mean)?;
    let mc = buildstock::monte_carlo_survival(dist, args.samples, args.seed)?;
    let mut worst: f64 = 0.0;
    println!(
        "survival cross-check: mean {} yr, sigma {:.3} yr, {} samples, seed {}",
        dist.mean(),
        dist.std_dev(),
        args.samples,
        args.seed
    );
    for age in [
        dist.mean() - dist.std_dev(),
        dist.mean(),
        dist.mean() + dist.std_dev(),
    ] {
        let analytic = buildstock::lifetime_cdf(age, dist)?;
        let empirical = mc.at(age);
        let dev = (empirical - analytic).abs();
        worst = worst.max(dev);
        println!(
            "  age {age:7.3}: analytic {analytic:.6}  empirical {empirical:.6}  |dev| {dev:.6}"
        );
    }
    println!(
        "  empirical median {:.3} (analytic {:.1})",
        mc.median(),
        dist.mean()
    );
    let pass = worst < 0.002;
    println!(
        "max deviation {worst:.6} {}",
        if pass { "< 0.002: ok" } else { ">= 0.002: FAIL" }
    );
    Ok(if pass { 0 } else { 1 })
}
