//! `jaest`: Jiles-Atherton parameter estimation from the command line.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use ja_core::grid::brute_force_search;
use ja_core::harness::{run_experiment_with_progress, run_restart, RunRecord};
use ja_core::io::config::{BoundsTable, InitKind, MAX_SEED};
use ja_core::io::csv::format_bh_csv;
use ja_core::io::report::summary_table;
use ja_core::io::{
    generate_synthetic, ingest_bh_csv, sinusoidal_field, steady_state_magnetization, write_bh_csv, write_unique,
    ExperimentConfig, ExperimentReport,
};
use ja_core::model::simulate_loop;
use ja_core::optim::Algorithm;
use ja_core::{BhCurve, Error, JaParams, ParamBounds, SeededRng};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "jaest", version, about = "Jiles-Atherton parameter estimation under initialization uncertainty")]
struct Cli {
    /// Master seed (overrides the configuration file).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(0..=MAX_SEED as i64 as u64))]
    seed: Option<u64>,
    /// Output directory (overrides the configuration file). CSV commands print to stdout without it.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Experiment configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// More log output; repeat for debug messages.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a B-H loop for given parameters and write it as CSV.
    Simulate(SimulateArgs),
    /// Generate a synthetic B-H loop with optional measurement noise.
    Synth(SynthArgs),
    /// One sample-then-optimize run.
    Fit(RunArgs),
    /// Repeated restarts with error and time statistics.
    Experiment(RunArgs),
    /// Exhaustive grid search over the parameter limits.
    BruteForce(BruteForceArgs),
    /// Re-analyze a saved experiment report.
    Stats(StatsArgs),
    /// Print a configuration template.
    Template {
        #[arg(long, value_enum, default_value_t = Material::A)]
        material: Material,
        #[arg(long, default_value_t = Algorithm::De)]
        algorithm: Algorithm,
    },
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// Saturation magnetization [A/m].
    #[arg(long, default_value_t = 1_519_130.0)]
    ms: f64,
    /// Domain-wall density [A/m].
    #[arg(long, default_value_t = 13.0)]
    a: f64,
    /// Inter-domain coupling.
    #[arg(long, default_value_t = 1e-5)]
    alpha: f64,
    /// Reversibility coefficient.
    #[arg(long, default_value_t = 0.8)]
    c: f64,
    /// Pinning [A/m].
    #[arg(long, default_value_t = 24.0)]
    k: f64,
}

impl ParamArgs {
    fn params(&self) -> JaParams {
        JaParams::new(self.ms, self.a, self.alpha, self.c, self.k)
    }
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Field amplitude [A/m].
    #[arg(long, default_value_t = 100.0)]
    amplitude: f64,
    /// Samples per field period.
    #[arg(long, default_value_t = 1000)]
    samples_per_period: usize,
    #[arg(long, default_value_t = 1)]
    periods: usize,
    /// File name (without extension) used inside the output directory.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    field: FieldArgs,
    /// Take H from this B-H file instead of a sinusoid; its first sample sets the initial state.
    #[arg(long)]
    field_from: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    field: FieldArgs,
    /// Noise standard deviation as a fraction of the peak flux density.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Material {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InitArg {
    Uniform,
    Gaussian,
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// B-H curve CSV (overrides the configuration file).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Parameter limits when no configuration file is given.
    #[arg(long, value_enum)]
    material: Option<Material>,
    #[arg(long)]
    algorithm: Option<Algorithm>,
    #[arg(long, value_enum)]
    init: Option<InitArg>,
    /// Gaussian standard deviation as a fraction of the centre.
    #[arg(long)]
    sigma: Option<f64>,
    /// Gaussian centre as `ms,a,alpha,c,k`.
    #[arg(long, value_parser = parse_params)]
    center: Option<JaParams>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Hide the per-restart counter.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct BruteForceArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Grid points per free parameter.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Report written by `experiment`.
    report: PathBuf,
    /// Print the statistics as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

fn parse_params(s: &str) -> Result<JaParams, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    let v: [f64; 5] = v
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 5 comma-separated values, got {}", v.len()))?;
    Ok(JaParams::from_array(v))
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_data_error() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_env("JAEST_LOG")
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Simulate(args) => simulate(cli, args),
        Command::Synth(args) => synth(cli, args),
        Command::Fit(args) => fit(cli, args),
        Command::Experiment(args) => experiment(cli, args),
        Command::BruteForce(args) => brute_force(cli, args),
        Command::Stats(args) => stats(args),
        Command::Template { material, algorithm } => {
            let config = template(*material, *algorithm);
            print!("{}", config.to_toml()?);
            Ok(())
        }
    }
}

fn template(material: Material, algorithm: Algorithm) -> ExperimentConfig {
    let mut config = ExperimentConfig::template(algorithm);
    if material == Material::B {
        config.material = "B".into();
        config.bounds = BoundsTable::from_bounds(&ParamBounds::material_b());
    }
    config
}

/// Writes a curve to `<output>/<name>.csv`, or to stdout without `--output`.
fn emit_curve(cli: &Cli, name: &str, curve: &BhCurve) -> Result<(), Failure> {
    match &cli.output {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Failure::from(Error::Io {
                path: dir.clone(),
                source: e,
            }))?;
            let path = dir.join(format!("{name}.csv"));
            write_bh_csv(&path, curve)?;
            println!("{}", path.display());
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(format_bh_csv(curve).as_bytes())
                .map_err(|e| usage(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(())
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> Result<(), Failure> {
    let params = args.params.params();
    params.validate()?;
    let curve = match &args.field_from {
        Some(path) => {
            let source = ingest_bh_csv(path)?;
            simulate_loop(source.h(), &params, source.initial_magnetization())?
        }
        None => {
            let f = &args.field;
            if f.amplitude.is_nan() || f.amplitude <= 0.0 || f.samples_per_period < 2 || f.periods == 0 {
                return Err(usage("need a positive amplitude, at least 2 samples per period and 1 period"));
            }
            let h = sinusoidal_field(f.amplitude, f.samples_per_period, f.periods);
            let m0 = steady_state_magnetization(&h[..f.samples_per_period], &params)?;
            simulate_loop(&h, &params, m0)?
        }
    };
    let name = args.field.name.clone().unwrap_or_else(|| "simulated".into());
    emit_curve(cli, &name, &curve)
}

fn synth(cli: &Cli, args: &SynthArgs) -> Result<(), Failure> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let f = &args.field;
    let curve = generate_synthetic(
        &args.params.params(),
        f.amplitude,
        f.samples_per_period,
        f.periods,
        args.noise,
        &mut SeededRng::new(seed, 0),
    )?;
    let name = f.name.clone().unwrap_or_else(|| format!("synthetic-seed{seed}"));
    emit_curve(cli, &name, &curve)
}

/// Configuration with command-line overrides applied, the data path resolved
/// and the output directory chosen.
struct Resolved {
    config: ExperimentConfig,
    data: PathBuf,
    output: PathBuf,
}

fn resolve(cli: &Cli, args: &RunArgs) -> Result<Resolved, Failure> {
    let (mut config, base) = match &cli.config {
        Some(path) => {
            if args.material.is_some() {
                return Err(usage("--material only applies without --config"));
            }
            let config = ExperimentConfig::load(path)?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (config, Some(base))
        }
        None => {
            let algorithm = args.algorithm.unwrap_or(Algorithm::De);
            (template(args.material.unwrap_or(Material::A), algorithm), None)
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(alg) = args.algorithm {
        config.optimizer.algorithm = alg;
    }
    if let Some(n) = args.restarts {
        config.restarts = n;
    }
    match args.init {
        Some(InitArg::Uniform) => {
            config.init.kind = InitKind::Uniform;
            config.init.sigma_fraction = None;
            config.init.center = None;
        }
        Some(InitArg::Gaussian) => {
            config.init.kind = InitKind::Gaussian;
            config.init.sigma_fraction = Some(args.sigma.unwrap_or(0.05));
        }
        None => {
            if let Some(s) = args.sigma {
                config.init.sigma_fraction = Some(s);
            }
        }
    }
    if let Some(center) = args.center {
        config.init.center = Some(center);
    }
    let data = match (&args.data, &base) {
        (Some(d), _) => {
            config.data = d.clone();
            d.clone()
        }
        (None, Some(base)) => ExperimentConfig::resolve(base, &config.data),
        (None, None) => return Err(usage("no data: pass --data or --config")),
    };
    let output = match (&cli.output, &base) {
        (Some(o), _) => {
            config.output = o.clone();
            o.clone()
        }
        (None, Some(base)) => ExperimentConfig::resolve(base, &config.output),
        (None, None) => {
            config.output = PathBuf::from(".");
            PathBuf::from(".")
        }
    };
    Ok(Resolved { config, data, output })
}

fn print_record(r: &RunRecord) {
    let p = &r.params;
    println!("error      {:.6} %", r.error);
    println!("time       {:.3} s", r.time_s);
    println!("iterations {}", r.iterations);
    println!("Ms         {:.6e} A/m", p.ms);
    println!("a          {:.6} A/m", p.a);
    println!("alpha      {:.6e}", p.alpha);
    println!("c          {:.6}", p.c);
    println!("k          {:.6} A/m", p.k);
    if let Some(f) = &r.failure {
        println!("failure    {f}");
    }
}

fn fit(cli: &Cli, args: &RunArgs) -> Result<(), Failure> {
    let Resolved { config, data, output } = resolve(cli, args)?;
    let curve = ingest_bh_csv(&data)?;
    let mut spec = config.to_spec(curve)?;
    spec.restarts = 1;
    let record = run_restart(&spec, 0);
    print_record(&record);
    if cli.output.is_some() || cli.config.is_some() {
        let json = serde_json::to_string_pretty(&record).expect("records serialize") + "\n";
        let stem = format!(
            "{}-{}-{}-seed{}.fit",
            config.material,
            record.algorithm,
            record.strategy.replace('%', "pct"),
            spec.seed
        );
        let (path, _) = write_unique(&output, &stem, "json", json.as_bytes())?;
        println!("{}", path.display());
    }
    if record.failure.is_some() {
        return Err(Failure {
            code: 3,
            message: "the optimizer could not evaluate its population".into(),
        });
    }
    Ok(())
}

fn experiment(cli: &Cli, args: &RunArgs) -> Result<(), Failure> {
    let Resolved { config, data, output } = resolve(cli, args)?;
    let curve = ingest_bh_csv(&data)?;
    let spec = config.to_spec(curve)?;
    if spec.restarts < 2 {
        return Err(usage("an experiment needs at least 2 restarts for its statistics"));
    }
    info!(
        "{} restarts of {} with {} initialization, seed {}",
        spec.restarts,
        spec.optimizer.algorithm,
        spec.init.tag(),
        spec.seed
    );
    let total = spec.restarts;
    let show = !args.quiet;
    let records = run_experiment_with_progress(&spec, |done| {
        if show {
            eprint!("\rrestart {done}/{total}");
            if done == total {
                eprintln!();
            }
        }
    })?;
    let failed = records.iter().filter(|r| r.failure.is_some()).count();
    if failed > 0 {
        warn!("{failed} of {total} restarts failed and carry the penalty error");
    }
    let report = ExperimentReport::new(config, records)?;
    let path = report.write(&output)?;
    print!("{}", report.summary_table());
    println!("best run: restart {}", report.best_run.restart);
    println!("{}", path.display());
    Ok(())
}

fn brute_force(cli: &Cli, args: &BruteForceArgs) -> Result<(), Failure> {
    let Resolved { mut config, data, output } = resolve(cli, &args.run)?;
    if let Some(n) = args.points {
        config.grid_points = n;
    }
    let curve = ingest_bh_csv(&data)?;
    let bounds = config.bounds()?;
    let grid = config.grid()?;
    info!("evaluating {} grid points", grid.size());
    let result = brute_force_search(&curve, &bounds, &grid)?;
    let p = &result.params;
    println!("error       {:.6} %", result.error);
    println!("evaluations {}", result.evaluations);
    println!("Ms          {:.6e} A/m", p.ms);
    println!("a           {:.6} A/m", p.a);
    println!("alpha       {:.6e}", p.alpha);
    println!("c           {:.6}", p.c);
    println!("k           {:.6} A/m", p.k);
    if cli.output.is_some() || cli.config.is_some() {
        let json = serde_json::to_string_pretty(&result).expect("results serialize") + "\n";
        let stem = format!("{}-brute-force-{}pts", config.material, config.grid_points);
        let (path, _) = write_unique(&output, &stem, "json", json.as_bytes())?;
        println!("{}", path.display());
    }
    Ok(())
}

fn stats(args: &StatsArgs) -> Result<(), Failure> {
    let report = ExperimentReport::load(&args.report)?;
    let (error, time) = report.reanalyze()?;
    if error.stats != report.error.stats || time.stats != report.time.stats {
        warn!("statistics differ from the ones stored in the report");
    }
    if args.json {
        let value = serde_json::json!({ "error": error.stats, "time": time.stats });
        println!("{}", serde_json::to_string_pretty(&value).expect("stats serialize"));
    } else {
        println!(
            "{} restarts, {} ({}), seed {}",
            report.records.len(),
            report.best_run.algorithm,
            report.best_run.strategy,
            report.config.seed
        );
        print!("{}", summary_table(&error.stats, &time.stats));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_parameter_lists() {
        let p = parse_params("1.52e6, 13, 1e-5, 0.8, 24").unwrap();
        assert_eq!(p, JaParams::new(1.52e6, 13.0, 1e-5, 0.8, 24.0));
        assert!(parse_params("1,2,3").is_err());
        assert!(parse_params("1,2,x,4,5").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
