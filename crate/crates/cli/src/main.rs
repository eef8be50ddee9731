//! `ordmetric`: sample, reconstruct, evaluate and sweep from the command line.
//!
//! Exit codes: 0 success (and every bound passed), 1 a bound check failed,
//! 2 reconstruction failed, 64 bad arguments or unusable input files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use ordmetric::evaluation::{check_bounds, run_pipeline, sweep, write_sweep_csv, RunConfig, RunRecord};
use ordmetric::hausdorff::{hausdorff_to_space, DEFAULT_RESOLUTION};
use ordmetric::repair::RepairTarget;
use ordmetric::space::{SampleMode, SampleSet, SpaceKind, SpaceModel};
use ordmetric::Error;

const EXIT_BOUND_FAILED: u8 = 1;
const EXIT_RECONSTRUCTION_FAILED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "ordmetric", version, about = "Metric reconstruction from ordinal distance comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a sample from a space and write it as JSON.
    Sample(SampleArgs),
    /// Reconstruct distances from a sample's comparison oracle.
    Reconstruct(ReconstructArgs),
    /// Check a reconstruction against ground truth and write a bound report.
    Evaluate(EvaluateArgs),
    /// Run uniform i.i.d. trials over several sample sizes and write CSV rows.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpaceArg {
    Segment,
    Circle,
    Sphere,
    #[value(name = "flat-torus", alias = "torus")]
    FlatTorus,
    #[value(name = "euclidean-box", alias = "box")]
    EuclideanBox,
}

#[derive(Args, Debug)]
struct SpaceOpts {
    /// Space to sample from.
    #[arg(long)]
    space: SpaceArg,
    /// Segment length.
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    /// Circle or sphere radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Comma-separated side lengths of a torus (two) or box (any number).
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0])]
    sides: Vec<f64>,
}

impl SpaceOpts {
    fn model(&self) -> Result<SpaceModel, Error> {
        let kind = match self.space {
            SpaceArg::Segment => SpaceKind::Segment { length: self.length },
            SpaceArg::Circle => SpaceKind::Circle { radius: self.radius },
            SpaceArg::Sphere => SpaceKind::Sphere { radius: self.radius },
            SpaceArg::FlatTorus => match self.sides[..] {
                [a, b] => SpaceKind::FlatTorus { sides: [a, b] },
                _ => return Err(Error::Argument("a torus needs exactly two --sides".into())),
            },
            SpaceArg::EuclideanBox => SpaceKind::EuclideanBox { sides: self.sides.clone() },
        };
        SpaceModel::new(kind)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Grid,
    UniformIid,
}

impl From<ModeArg> for SampleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Grid => SampleMode::Grid,
            ModeArg::UniformIid => SampleMode::UniformIid,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RepairArg {
    DPlus,
    MidpointOfBrackets,
}

impl From<RepairArg> for RepairTarget {
    fn from(r: RepairArg) -> Self {
        match r {
            RepairArg::DPlus => RepairTarget::DPlus,
            RepairArg::MidpointOfBrackets => RepairTarget::MidpointOfBrackets,
        }
    }
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    space: SpaceOpts,
    /// Number of points (at least 2).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    n: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::UniformIid)]
    mode: ModeArg,
    /// Seed for uniform i.i.d. sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Resolution of the printed Hausdorff distance on surfaces.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    /// Sample JSON written by `sample`.
    #[arg(long)]
    sample: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Deepest level to refine [default: ceil(log2 n) + 2].
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=62))]
    p_cap: Option<u32>,
    /// Estimate turned into a metric.
    #[arg(long, value_enum, default_value_t = RepairArg::DPlus)]
    repair_target: RepairArg,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    sample: PathBuf,
    /// Result JSON written by `reconstruct`.
    #[arg(long)]
    result: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Resolution of the Hausdorff distance on surfaces.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    space: SpaceOpts,
    /// Comma-separated, strictly increasing sample sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Base seed; each trial derives its own.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output, one row per trial.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON summary with the fitted decay exponent.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Resolution of the Hausdorff distance on surfaces.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: f64,
    /// Deepest level to refine [default: ceil(log2 n) + 2].
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=62))]
    p_cap: Option<u32>,
    #[arg(long, value_enum, default_value_t = RepairArg::DPlus)]
    repair_target: RepairArg,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let file = File::open(path)
        .map_err(|e| Error::Argument(format!("cannot open {}: {e}", path.display())))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::Argument(format!("cannot parse {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn cmd_sample(args: &SampleArgs) -> Result<u8, Error> {
    let space = args.space.model()?;
    let sample = space.sample(args.n as usize, args.mode.into(), args.seed)?;
    write_json(&args.out, &sample)?;
    let d_h = hausdorff_to_space(&space, &sample, args.resolution)?;
    println!("d_H = {d_h}");
    Ok(0)
}

fn cmd_reconstruct(args: &ReconstructArgs) -> Result<u8, Error> {
    let sample: SampleSet = read_json(&args.sample)?;
    let config = RunConfig { p_cap: args.p_cap, repair_target: args.repair_target.into(), ..RunConfig::default() };
    let (_, record) = run_pipeline(&sample, &config)?;
    write_json(&args.out, &record)?;
    println!("p_n = {}, queries = {}, repair_t = {}", record.p_n, record.queries, record.repair_t);
    Ok(0)
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<u8, Error> {
    let sample: SampleSet = read_json(&args.sample)?;
    let record: RunRecord = read_json(&args.result)?;
    let d_h = hausdorff_to_space(sample.space(), &sample, args.resolution)?;
    let report = check_bounds(&record, &sample, d_h)?;
    write_json(&args.out, &report)?;
    let f = report.passed;
    println!(
        "lemma1={} lemma2={} lemma3={} thm2={} cor={} metric={} ratio={:.4}",
        f.lemma1, f.lemma2, f.lemma3, f.thm2, f.cor, f.metric, report.empirical_ratio
    );
    Ok(if f.all() { 0 } else { EXIT_BOUND_FAILED })
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8, Error> {
    let space = args.space.model()?;
    let config = RunConfig {
        p_cap: args.p_cap,
        repair_target: args.repair_target.into(),
        hausdorff_resolution: args.resolution,
    };
    let outcome = sweep(&space, &args.n_list, args.trials, args.seed, &config)?;
    write_sweep_csv(&outcome.rows, BufWriter::new(File::create(&args.out)?))?;
    if let Some(path) = &args.summary {
        write_json(path, &outcome.summary)?;
    }
    let s = &outcome.summary;
    println!(
        "rows = {}, failures = {}, exponent = {:.4}, all flags pass = {}",
        s.rows, s.failures, s.fit.exponent, s.all_theorem_flags_pass
    );
    Ok(if s.all_theorem_flags_pass { 0 } else { EXIT_BOUND_FAILED })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match &cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e @ Error::ReconstructionFailed { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RECONSTRUCTION_FAILED)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
