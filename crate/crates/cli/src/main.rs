//! `kdeavg`: averaged kernel density estimates from the command line.
//!
//! ```bash
//! # density estimate on a grid, with diagnostics and a plot
//! kdeavg estimate data.txt --grid -4:4:401 --out fit.csv --svg fit.svg
//!
//! # averaging weights only
//! kdeavg weights data.txt --format json
//!
//! # Monte-Carlo MISE table
//! kdeavg simulate --density Norm,Mix03 --n 1000 --reps 200 --seed 7 --out mise.csv
//! ```

mod input;
mod svg;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kdeavg::bench::{run_benchmark, BenchmarkConfig, Density, Method};
use kdeavg::{average_estimator, AverageFit, BandwidthSet, Mode, Sample, Selector};

use input::{parse_list, read_sample, GridSpec};

#[derive(Parser, Debug)]
#[command(
    name = "kdeavg",
    version,
    about = "Averaged Gaussian kernel density estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the averaged estimate and its experts on a grid
    Estimate(EstimateArgs),
    /// Print the averaging weights and model diagnostics
    Weights(WeightsArgs),
    /// Run the Monte-Carlo MISE benchmark
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Data file, one number per line
    input: PathBuf,

    /// Bandwidth selectors used as experts
    #[arg(long, default_value = "nrd0,nrd,sj")]
    methods: String,

    /// Weight constraint
    #[arg(long, value_enum, default_value_t = ModeArg::Linear)]
    mode: ModeArg,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    fit: FitArgs,

    /// Evaluation grid as lo:hi:points (default: data range padded by three bandwidths)
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<GridSpec>,

    /// CSV output (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Diagnostics JSON (default: next to --out, otherwise standard error)
    #[arg(long)]
    diagnostics: Option<PathBuf>,

    /// Also write an SVG plot of the curves
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WeightsArgs {
    #[command(flatten)]
    fit: FitArgs,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Benchmark densities
    #[arg(long, default_value = "Norm,Gamma,Cauchy,Mix05,Mix03")]
    density: String,

    /// Sample sizes
    #[arg(long, default_value = "50,100,200,500,1000,2000")]
    n: String,

    /// Estimators to compare
    #[arg(long, default_value = "nrd,nrd0,sj,AV,AVconv,AVsplit,RT,RTconv")]
    methods: String,

    /// Replications per (density, n) cell
    #[arg(long, default_value_t = 1000)]
    reps: usize,

    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Report file (default: standard output receives only the table)
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Run replications on a single thread
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Linear,
    Convex,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Linear => Mode::Linear,
            ModeArg::Convex => Mode::Convex,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn fit(args: &FitArgs) -> Result<(Sample, AverageFit)> {
    let sample = read_sample(&args.input)?;
    let selectors: Vec<Selector> = parse_list(&args.methods)?;
    let bandwidths = BandwidthSet::select(&sample, &selectors)?;
    let fit = average_estimator(&sample, &bandwidths, args.mode.into())?;
    Ok((sample, fit))
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents).with_context(|| format!("writing {}", p.display())),
        None => io::stdout()
            .write_all(contents.as_bytes())
            .context("writing to standard output"),
    }
}

fn default_grid(sample: &Sample, fit: &AverageFit) -> GridSpec {
    let sorted = sample.sorted();
    let pad = 3.0 * fit.estimator.max_bandwidth();
    GridSpec {
        lo: sorted[0] - pad,
        hi: sorted[sorted.len() - 1] + pad,
        points: 512,
    }
}

fn estimate(args: &EstimateArgs) -> Result<()> {
    let (sample, fit) = fit(&args.fit)?;
    let grid = args.grid.unwrap_or_else(|| default_grid(&sample, &fit));
    let xs = grid.xs();
    let mut columns = vec![("AV".to_string(), fit.estimator.eval_many(&xs))];
    for (label, expert) in fit.bandwidths.labels().zip(fit.estimator.experts()) {
        columns.push((label.to_string(), expert.eval_many(&xs)));
    }

    let mut csv = String::from("x");
    for (label, _) in &columns {
        csv.push(',');
        csv.push_str(label);
    }
    csv.push('\n');
    for (i, x) in xs.iter().enumerate() {
        csv.push_str(&format!("{x:.16e}"));
        for (_, ys) in &columns {
            csv.push_str(&format!(",{:.16e}", ys[i]));
        }
        csv.push('\n');
    }
    write_output(args.out.as_deref(), &csv)?;

    let json = serde_json::to_string_pretty(&fit.diagnostics())? + "\n";
    let diag_path = args
        .diagnostics
        .clone()
        .or_else(|| args.out.as_ref().map(|p| p.with_extension("json")));
    match diag_path {
        Some(p) => fs::write(&p, json).with_context(|| format!("writing {}", p.display()))?,
        None => eprint!("{json}"),
    }

    if let Some(path) = &args.svg {
        let curves: Vec<svg::Curve<'_>> = columns
            .iter()
            .map(|(label, ys)| svg::Curve { label, ys })
            .collect();
        fs::write(path, svg::render(&xs, &curves))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn weights(args: &WeightsArgs) -> Result<()> {
    let (_, fit) = fit(&args.fit)?;
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&fit.diagnostics())? + "\n",
        Format::Csv => {
            let mut s = String::from("label,bandwidth,weight\n");
            for ((label, h), w) in fit.bandwidths.iter().zip(&fit.estimator.weights().weights) {
                s.push_str(&format!("{label},{h:.16e},{w:.16e}\n"));
            }
            s
        }
    };
    write_output(args.out.as_deref(), &text)
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let config = BenchmarkConfig {
        densities: parse_list::<Density>(&args.density)?,
        sample_sizes: parse_list::<usize>(&args.n)?,
        methods: parse_list::<Method>(&args.methods)?,
        replications: args.reps,
        seed: args.seed,
        parallel: !args.sequential,
        ..BenchmarkConfig::default()
    };
    let report = run_benchmark(&config)?;
    let text = match args.format {
        Format::Csv => report.to_csv(),
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
    };
    match &args.out {
        Some(p) => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            print!("{}", report.to_table());
        }
        None if args.format == Format::Csv => print!("{}", report.to_table()),
        None => print!("{text}"),
    }
    if !report.failures.is_empty() {
        eprintln!("{} replication(s) failed", report.failures.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Weights(a) => weights(a),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
