//! Command-line front end: `verify`, `bound`, `robust`, `gen-arm`, `gen-random`.
//!
//! Exit codes: 0 safe (or success for non-verifying commands), 1 uncertain,
//! 2 usage, parse or dimension error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use nnverify::scenario::{self, Arm};
use nnverify::{
    excess_width_bound, grid_sample_hull, lipschitz_gamma, load_model, load_spec, network_interval,
    robustness_region, verify_uniform_with, verify_with, Activation, IntervalBox, Network,
    SafetySpec, Sampler, UnsafeRegion, Verdict, VerifyOptions,
};

use report::{bounds, BoundReport, GenReport, RunConfig, RunReport, FORMAT};

pub const EXIT_SAFE: i32 = 0;
pub const EXIT_UNCERTAIN: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] nnverify::Error),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: nnverify::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "nnverify", version, about = "Interval safety verification for feedforward networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prove that no input in the spec's box reaches the unsafe region.
    Verify(VerifyArgs),
    /// Print the output enclosure and Lipschitz diagnostics for an input box.
    Bound(BoundArgs),
    /// Certify that a perturbation window cannot change a classifier's label.
    Robust(RobustArgs),
    /// Write the two-link arm specification and a kinematics dataset.
    GenArm(GenArmArgs),
    /// Write a seeded random network and the matching quadrant specification.
    GenRandom(GenRandomArgs),
}

#[derive(Debug, Args)]
pub struct RunFlags {
    /// Bisection tolerance. Overrides the spec file for `verify`; `robust` defaults to 0.01.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Stop at the first undecided box of width ≤ ε.
    #[arg(long)]
    pub fail_fast: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Include every leaf box of the refinement in the report.
    #[arg(long)]
    pub dump_partition: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub spec: PathBuf,
    /// Use the uniform-grid baseline instead of guided bisection.
    #[arg(long)]
    pub uniform: bool,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Take the input box from this spec file.
    #[arg(long, conflicts_with = "input")]
    pub spec: Option<PathBuf>,
    /// One `LO,HI` pair per input dimension, in order.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "spec")]
    pub input: Vec<String>,
    /// Also report the hull of a grid with this many points per dimension.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RobustArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// CSV file holding one line of input values.
    #[arg(long)]
    pub image: PathBuf,
    /// Comma-separated input indices to perturb.
    #[arg(long, value_delimiter = ',', required = true)]
    pub window: Vec<usize>,
    /// Perturbation half-width applied to each windowed input.
    #[arg(long)]
    pub delta: f64,
    /// Class to certify; defaults to the network's prediction on the image.
    #[arg(long)]
    pub label: Option<usize>,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Debug, Args)]
pub struct GenArmArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    pub l1: f64,
    #[arg(long, default_value_t = 10.0)]
    pub l2: f64,
    /// Dataset points per joint angle.
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct GenRandomArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = scenario::BENCH_SEED)]
    pub seed: u64,
    /// Weights and biases are drawn from [-scale, scale].
    #[arg(long, default_value_t = scenario::BENCH_WEIGHT_SCALE)]
    pub scale: f64,
    /// Layer widths including input and output.
    #[arg(long, value_delimiter = ',', default_value = "2,10,10,10,10,10,2")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value = "sigmoid")]
    pub hidden: String,
    #[arg(long, default_value = "linear")]
    pub output: String,
}

/// What a command produced: its exit code and the JSON document for stdout
/// (`None` when it was written to `--out`).
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: Option<String>,
}

fn read_model(path: &Path) -> Result<Network<f64>> {
    load_model(path).map_err(|source| CliError::File {
        path: path.to_owned(),
        source,
    })
}

fn read_spec(path: &Path) -> Result<SafetySpec> {
    load_spec(path).map_err(|source| CliError::File {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(json: String, out: Option<&Path>, code: i32) -> Result<Outcome> {
    match out {
        Some(path) => {
            write_file(path, &json)?;
            Ok(Outcome { code, stdout: None })
        }
        None => Ok(Outcome {
            code,
            stdout: Some(json),
        }),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization")
}

fn options(run: &RunFlags) -> Result<VerifyOptions> {
    if run.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    Ok(VerifyOptions {
        fail_fast: run.fail_fast,
        jobs: run.jobs,
        record_partition: run.dump_partition,
    })
}

fn exit_code(v: &Verdict<f64>) -> i32 {
    if v.is_safe() {
        EXIT_SAFE
    } else {
        EXIT_UNCERTAIN
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Verify(args) => cmd_verify(&args),
        Command::Bound(args) => cmd_bound(&args),
        Command::Robust(args) => cmd_robust(&args),
        Command::GenArm(args) => cmd_gen_arm(&args),
        Command::GenRandom(args) => cmd_gen_random(&args),
    }
}

/// Parses `argv` (including the program name) and runs it. Usage errors
/// surface as `CliError::Usage` carrying clap's rendered message.
pub fn run_from<I, S>(argv: I) -> Result<Outcome>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let started = Instant::now();
    let net = read_model(&args.model)?;
    let spec = read_spec(&args.spec)?;
    let epsilon = args.run.epsilon.unwrap_or(spec.epsilon);
    let opts = options(&args.run)?;
    let verdict = if args.uniform {
        verify_uniform_with(&net, &spec.input, &spec.unsafe_region, epsilon, &opts)?
    } else {
        verify_with(&net, &spec.input, &spec.unsafe_region, epsilon, &opts)?
    };
    let config = RunConfig {
        model: args.model.display().to_string(),
        spec: Some(args.spec.display().to_string()),
        epsilon,
        mode: if args.uniform { "uniform" } else { "guided" },
        fail_fast: opts.fail_fast,
        jobs: opts.jobs,
        input: bounds(&spec.input),
        ..Default::default()
    };
    let report = RunReport::new("verify", config, &verdict, started.elapsed().as_secs_f64());
    emit(to_json(&report), args.run.out.as_deref(), exit_code(&verdict))
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let bad = || CliError::Usage(format!("expected LO,HI but got `{s}`"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

pub fn cmd_bound(args: &BoundArgs) -> Result<Outcome> {
    let net = read_model(&args.model)?;
    let input = match &args.spec {
        Some(path) => read_spec(path)?.input,
        None => {
            let pairs = args
                .input
                .iter()
                .map(|s| parse_pair(s))
                .collect::<Result<Vec<_>>>()?;
            IntervalBox::from_bounds(&pairs)?
        }
    };
    let output = network_interval(&net, &input)?;
    let lip = lipschitz_gamma(&net);
    let excess = excess_width_bound(&net, &input)?;
    let sampled_hull = match args.grid {
        Some(per_dim) => Some(bounds(&grid_sample_hull(&net, &input, per_dim)?.hull)),
        None => None,
    };
    let report = BoundReport {
        format: FORMAT,
        command: "bound",
        model: args.model.display().to_string(),
        input: bounds(&input),
        output: bounds(&output),
        gamma: lip.gamma,
        xi: lip.xi,
        per_layer_norms: lip.per_layer_norms,
        input_width: input.width(),
        output_width: output.width(),
        excess_width_bound: excess,
        sampled_hull,
    };
    emit(to_json(&report), args.out.as_deref(), EXIT_SAFE)
}

/// Reads the first record of a header-less CSV file as a vector of reals.
pub fn read_image(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let record = reader
        .records()
        .next()
        .ok_or_else(|| CliError::Usage(format!("{}: empty image file", path.display())))??;
    record
        .iter()
        .filter(|f| !f.is_empty())
        .map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("{}: bad pixel value `{f}`", path.display())))
        })
        .collect()
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best })
        .0
}

pub fn cmd_robust(args: &RobustArgs) -> Result<Outcome> {
    let started = Instant::now();
    let net = read_model(&args.model)?;
    let image = read_image(&args.image)?;
    if image.len() != net.input_dim() {
        return Err(nnverify::Error::DimensionMismatch {
            context: "image length",
            expected: net.input_dim(),
            found: image.len(),
        }
        .into());
    }
    let input = scenario::perturbation_box(&image, &args.window, args.delta)?;
    let label = match args.label {
        Some(l) => l,
        None => argmax(&net.eval(&image)?),
    };
    let region: UnsafeRegion<f64> = robustness_region(net.output_dim(), label)?;
    let epsilon = args.run.epsilon.unwrap_or(0.01);
    let opts = options(&args.run)?;
    let verdict = verify_with(&net, &input, &region, epsilon, &opts)?;
    let config = RunConfig {
        model: args.model.display().to_string(),
        epsilon,
        mode: "guided",
        fail_fast: opts.fail_fast,
        jobs: opts.jobs,
        image: Some(args.image.display().to_string()),
        window: Some(args.window.clone()),
        delta: Some(args.delta),
        label: Some(label),
        input: bounds(&input),
        ..Default::default()
    };
    let report = RunReport::new("robust", config, &verdict, started.elapsed().as_secs_f64());
    emit(to_json(&report), args.run.out.as_deref(), exit_code(&verdict))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn cmd_gen_arm(args: &GenArmArgs) -> Result<Outcome> {
    let arm = Arm::new(args.l1, args.l2)?;
    if !(args.epsilon > 0.0) {
        return Err(nnverify::Error::InvalidEpsilon(args.epsilon).into());
    }
    create_dir(&args.out)?;
    let spec_path = args.out.join("arm_spec.json");
    write_file(&spec_path, &scenario::arm_spec(args.epsilon).to_json())?;

    let data_path = args.out.join("arm_data.csv");
    let mut w = csv::Writer::from_path(&data_path)?;
    w.write_record(["theta1", "theta2", "x", "y"])?;
    for row in arm.dataset(&scenario::arm_input_box(), args.grid) {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: data_path.clone(),
        source,
    })?;

    let report = GenReport {
        format: FORMAT,
        command: "gen-arm",
        files: vec![spec_path.display().to_string(), data_path.display().to_string()],
    };
    emit(to_json(&report), None, EXIT_SAFE)
}

pub fn cmd_gen_random(args: &GenRandomArgs) -> Result<Outcome> {
    let hidden: Activation = args.hidden.parse()?;
    let output: Activation = args.output.parse()?;
    if args.sizes.len() < 2 || args.sizes.contains(&0) {
        return Err(CliError::Usage("--sizes needs at least two positive widths".into()));
    }
    if !(args.scale > 0.0) || !args.scale.is_finite() {
        return Err(CliError::Usage("--scale must be positive".into()));
    }
    let mut acts = vec![hidden; args.sizes.len() - 2];
    acts.push(output);
    let net = scenario::random_network(&args.sizes, &acts, args.scale, &mut Sampler::new(args.seed))?;

    create_dir(&args.out)?;
    let model_path = args.out.join("model.json");
    write_file(&model_path, &net.to_json())?;
    let mut files = vec![model_path.display().to_string()];
    if net.input_dim() == 2 && net.output_dim() == 2 {
        let spec_path = args.out.join("spec.json");
        write_file(&spec_path, &scenario::bench_spec().to_json())?;
        files.push(spec_path.display().to_string());
    }
    let report = GenReport {
        format: FORMAT,
        command: "gen-random",
        files,
    };
    emit(to_json(&report), None, EXIT_SAFE)
}
