//! Command-line front end: matrix file I/O, separability checks,
//! distillability runs, permutation-criteria classification, protocol
//! curves and the volume experiment.

mod matrixfile;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entglkit::distill::{distill_test_1copy, distill_test_ncopy};
use entglkit::montecarlo::volume_experiment;
use entglkit::permcrit::classify_independent;
use entglkit::protocol;
use entglkit::qstate::{partial_transpose, realign, trace_norm};
use entglkit::{linalg, tol, zoo};

use matrixfile::MatrixFile;
use report::{fmt_f64, JsonValue};

/// Exit codes: 0 success/detected, 10 clean negative verdict, 2 usage,
/// 3 parse, 4 numeric invariant violation, 1 other errors.
const EXIT_NEGATIVE: u8 = 10;
const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser)]
#[command(name = "entglkit", version, about = "Entanglement detection and distillation toolkit")]
struct Cli {
    /// Worker threads for the randomized searches (default: the
    /// ENTGLKIT_THREADS environment variable, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run separability checks on a state file.
    Check(CheckArgs),
    /// Randomized distillability test on a state file.
    Distill(DistillArgs),
    /// Classify the independent permutation criteria for r parties.
    ClassifyPermutations(ClassifyArgs),
    /// Estimate the volume of 1-distillable states.
    Volume(VolumeArgs),
    /// Emit a named state family as a matrix file.
    Zoo(ZooArgs),
    /// Evaluate protocol formulas as CSV curves.
    Protocol(ProtocolArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Path to a JSON matrix file.
    path: PathBuf,
    /// Write the detecting witness matrix here, when one exists.
    #[arg(long)]
    witness_out: Option<PathBuf>,
    /// Trace-normalize the emitted witness.
    #[arg(long)]
    normalize_witness: bool,
}

#[derive(Args)]
struct DistillArgs {
    path: PathBuf,
    #[arg(long, default_value_t = 1)]
    copies: usize,
    #[arg(long, default_value_t = 10_000)]
    tests: usize,
    #[arg(long, default_value_t = 300)]
    opt_steps: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Detection precision (a verdict needs a value below its negative).
    #[arg(long, default_value_t = 1e-8)]
    precision: f64,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    parties: usize,
}

#[derive(Args)]
struct VolumeArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 10_000)]
    states: usize,
    #[arg(long, default_value_t = 1000)]
    tests: usize,
    /// Optimization rounds per undetected state (default 100 * dim).
    #[arg(long)]
    opt_steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the detection curve as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ZooArgs {
    /// Family name: werner, isotropic, stormer, chessboard, tiles-upb,
    /// edge55, edge66, uuvvf, watrous, rainbow, bell-diagonal.
    #[arg(long)]
    family: String,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p00: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p01: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p10: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p11: Option<f64>,
    /// Output path for the matrix file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProtocolArgs {
    /// Formula name: recurrence, qpa, breeding, concentration.
    #[arg(long)]
    name: String,
    #[arg(long, allow_negative_numbers = true)]
    y0: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, allow_negative_numbers = true)]
    p00: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p01: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p10: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p11: Option<f64>,
    #[arg(long, default_value_t = 32)]
    rounds: usize,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("ENTGLKIT_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => err.exit_code(),
    }
}

enum CliError {
    Usage(String),
    Parse(String),
    Invariant(String),
    Other(String),
}

impl CliError {
    fn exit_code(self) -> ExitCode {
        let (code, label, msg) = match self {
            CliError::Usage(m) => (EXIT_USAGE, "usage", m),
            CliError::Parse(m) => (EXIT_PARSE, "parse", m),
            CliError::Invariant(m) => (EXIT_INVARIANT, "invariant", m),
            CliError::Other(m) => (1, "error", m),
        };
        eprintln!("entglkit: {label}: {msg}");
        ExitCode::from(code)
    }
}

fn load_state(path: &PathBuf) -> Result<entglkit::QuantumState, CliError> {
    let file = MatrixFile::read(path).map_err(|e| match e {
        matrixfile::FileError::Io(m) | matrixfile::FileError::Json(m) => CliError::Parse(m),
    })?;
    file.to_state()
        .map_err(|e| CliError::Invariant(e.to_string()))
}

fn seed_or_random(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0x5EED)
    })
}

fn write_out(path: &Option<PathBuf>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|e| CliError::Other(e.to_string())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Check(args) => cmd_check(args),
        Command::Distill(args) => cmd_distill(args),
        Command::ClassifyPermutations(args) => cmd_classify(args),
        Command::Volume(args) => cmd_volume(args),
        Command::Zoo(args) => cmd_zoo(args),
        Command::Protocol(args) => cmd_protocol(args),
    }
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, CliError> {
    let state = load_state(&args.path)?;
    if state.dims().len() != 2 {
        return Err(CliError::Invariant(
            "check requires a bipartite state".into(),
        ));
    }
    let pt = partial_transpose(&state, 1).map_err(|e| CliError::Other(e.to_string()))?;
    let min_pt = linalg::herm_eigenvalues(&pt)[0];
    let ppt = min_pt >= -tol::PSD;
    let realignment_norm =
        trace_norm(&realign(&state).map_err(|e| CliError::Other(e.to_string()))?);
    let reduction_violation =
        entglkit::distill::reduction_check(&state).map_err(|e| CliError::Other(e.to_string()))?;

    let mut witness_path = JsonValue::Null;
    if let Some(out) = &args.witness_out {
        let witness = if realignment_norm > 1.0 + 1e-10 {
            let sigma = entglkit::permcrit::PermutationCriterion::realignment(state.dims()[0]);
            entglkit::permcrit::permutation_witness(&state, &sigma).ok()
        } else if !ppt {
            let sigma =
                entglkit::permcrit::PermutationCriterion::partial_transpose(2, state.dims()[0]);
            entglkit::permcrit::permutation_witness(&state, &sigma).ok()
        } else {
            None
        };
        if let Some(mut w) = witness {
            if args.normalize_witness {
                let tr = w.trace();
                w = w.scale(num_complex::Complex64::new(1.0 / tr.re, 0.0));
            }
            let file = MatrixFile::from_matrix(&w, state.dims());
            file.write(out).map_err(|e| CliError::Other(e.to_string()))?;
            witness_path = JsonValue::Str(out.display().to_string());
        }
    }

    let report = JsonValue::Object(vec![
        ("ppt".into(), JsonValue::Bool(ppt)),
        ("min_pt_eigenvalue".into(), JsonValue::Num(min_pt)),
        ("realignment_norm".into(), JsonValue::Num(realignment_norm)),
        (
            "reduction_violation".into(),
            JsonValue::Bool(reduction_violation),
        ),
        ("witness".into(), witness_path),
    ]);
    println!("{}", report.render());
    Ok(ExitCode::SUCCESS)
}

fn cmd_distill(args: DistillArgs) -> Result<ExitCode, CliError> {
    if args.precision <= 0.0 {
        return Err(CliError::Usage("precision must be positive".into()));
    }
    let state = load_state(&args.path)?;
    let seed = seed_or_random(args.seed);
    let verdict = if args.copies == 1 {
        distill_test_1copy(&state, args.tests, args.opt_steps, seed)
    } else {
        distill_test_ncopy(&state, args.copies, args.tests, args.opt_steps, seed)
    }
    .map_err(|e| CliError::Invariant(e.to_string()))?;
    // the library detects at its fixed precision of 1e-8; re-derive the
    // flag when the caller asked for a different threshold
    let detected = verdict.min_value < -args.precision;
    let rows: Vec<JsonValue> = verdict
        .best_rows
        .iter()
        .map(|row| {
            JsonValue::Array(
                row.iter()
                    .map(|z| JsonValue::Array(vec![JsonValue::Num(z.re), JsonValue::Num(z.im)]))
                    .collect(),
            )
        })
        .collect();
    let report = JsonValue::Object(vec![
        ("detected".into(), JsonValue::Bool(detected)),
        ("min_value".into(), JsonValue::Num(verdict.min_value)),
        ("tests_run".into(), JsonValue::Num(verdict.tests_run as f64)),
        ("copies".into(), JsonValue::Num(args.copies as f64)),
        ("seed".into(), JsonValue::Str(seed.to_string())),
        ("best_rows".into(), JsonValue::Array(rows)),
    ]);
    println!("{}", report.render());
    Ok(if detected {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NEGATIVE)
    })
}

fn cmd_classify(args: ClassifyArgs) -> Result<ExitCode, CliError> {
    let classification =
        classify_independent(args.parties).map_err(|e| CliError::Usage(e.to_string()))?;
    let reps: Vec<JsonValue> = classification
        .representatives
        .iter()
        .map(|p| {
            JsonValue::Array(
                p.one_line()
                    .iter()
                    .map(|&v| JsonValue::Num(v as f64))
                    .collect(),
            )
        })
        .collect();
    let report = JsonValue::Object(vec![
        ("r".into(), JsonValue::Num(classification.r as f64)),
        (
            "orbit_count".into(),
            JsonValue::Num(classification.orbit_count as f64),
        ),
        (
            "includes_identity".into(),
            JsonValue::Bool(classification.includes_identity),
        ),
        ("representatives".into(), JsonValue::Array(reps)),
    ]);
    println!("{}", report.render());
    Ok(ExitCode::SUCCESS)
}

fn cmd_volume(args: VolumeArgs) -> Result<ExitCode, CliError> {
    let seed = seed_or_random(args.seed);
    let opt_steps = args.opt_steps.unwrap_or(100 * args.dim);
    let report = volume_experiment(args.dim, args.states, args.tests, opt_steps, seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(out) = &args.out {
        let mut csv = String::from("test_index,cumulative_fraction\n");
        for (idx, frac) in &report.detection_curve {
            csv.push_str(&format!("{},{}\n", idx, fmt_f64(*frac)));
        }
        std::fs::write(out, csv).map_err(|e| CliError::Other(e.to_string()))?;
    }
    let json = JsonValue::Object(vec![
        ("d".into(), JsonValue::Num(report.d as f64)),
        ("n_states".into(), JsonValue::Num(report.n_states as f64)),
        (
            "n_tests_per_state".into(),
            JsonValue::Num(report.n_tests_per_state as f64),
        ),
        ("opt_steps".into(), JsonValue::Num(report.opt_steps as f64)),
        ("seed".into(), JsonValue::Str(report.seed.to_string())),
        ("frac_ppt".into(), JsonValue::Num(report.frac_ppt)),
        (
            "frac_npt_undetected".into(),
            JsonValue::Num(report.frac_npt_undetected),
        ),
        (
            "first_test_fraction".into(),
            JsonValue::Num(report.detection_curve.first().map(|x| x.1).unwrap_or(0.0)),
        ),
        ("wall_time_s".into(), JsonValue::Num(report.wall_time_s)),
    ]);
    println!("{}", json.render());
    Ok(ExitCode::SUCCESS)
}

fn require<T: Copy>(opt: Option<T>, name: &str) -> Result<T, CliError> {
    opt.ok_or_else(|| CliError::Usage(format!("missing required parameter --{name}")))
}

fn cmd_zoo(args: ZooArgs) -> Result<ExitCode, CliError> {
    let usage = |e: entglkit::EntglError| CliError::Usage(e.to_string());
    let point = match args.family.as_str() {
        "werner" => {
            zoo::werner(require(args.d, "d")?, require(args.beta, "beta")?).map_err(usage)?
        }
        "isotropic" => {
            zoo::isotropic(require(args.d, "d")?, require(args.beta, "beta")?).map_err(usage)?
        }
        "stormer" => zoo::stormer(require(args.alpha, "alpha")?).map_err(usage)?,
        "chessboard" => zoo::chessboard(),
        "tiles-upb" => zoo::tiles_upb().1,
        "edge55" => zoo::edge55(),
        "edge66" => zoo::edge66(),
        "uuvvf" => zoo::uuvvf(
            require(args.d, "d")?,
            require(args.eps, "eps")?,
            require(args.delta, "delta")?,
        )
        .map_err(usage)?,
        "watrous" => {
            zoo::watrous(require(args.d, "d")?, require(args.eps, "eps")?).map_err(usage)?
        }
        "rainbow" => zoo::rainbow(
            require(args.m, "m")?,
            require(args.d, "d")?,
            require(args.eps, "eps")?,
            require(args.delta, "delta")?,
        )
        .map_err(usage)?,
        "bell-diagonal" => zoo::bell_diagonal([
            require(args.p00, "p00")?,
            require(args.p01, "p01")?,
            require(args.p10, "p10")?,
            require(args.p11, "p11")?,
        ])
        .map_err(usage)?,
        other => {
            return Err(CliError::Usage(format!("unknown family '{other}'")));
        }
    };
    let file = MatrixFile::from_matrix(point.state.matrix(), point.state.dims());
    let rendered = file.render();
    write_out(&args.out, &rendered)?;
    // metadata goes to stderr so the matrix stream stays clean
    for (k, v) in &point.flags {
        eprintln!("# flag {k} = {v}");
    }
    if let Some(n) = point.schmidt_number {
        eprintln!("# schmidt_number = {n}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_protocol(args: ProtocolArgs) -> Result<ExitCode, CliError> {
    let usage = |e: entglkit::EntglError| CliError::Usage(e.to_string());
    let mut csv = String::from("parameter,value\n");
    match args.name.as_str() {
        "recurrence" => {
            let y0 = require(args.y0, "y0")?;
            let traj = protocol::recurrence_iterate(y0, args.tol, args.max_iter).map_err(usage)?;
            for (i, y) in traj.iter().enumerate() {
                csv.push_str(&format!("{},{}\n", i, fmt_f64(*y)));
            }
        }
        "qpa" => {
            let mut p = [
                require(args.p00, "p00")?,
                require(args.p01, "p01")?,
                require(args.p10, "p10")?,
                require(args.p11, "p11")?,
            ];
            csv.push_str(&format!("0,{}\n", fmt_f64(p[0])));
            for round in 1..=args.rounds {
                p = protocol::qpa_round(p).map_err(usage)?;
                csv.push_str(&format!("{},{}\n", round, fmt_f64(p[0])));
            }
        }
        "breeding" => {
            let p = [
                require(args.p00, "p00")?,
                require(args.p01, "p01")?,
                require(args.p10, "p10")?,
                require(args.p11, "p11")?,
            ];
            let y = protocol::breeding_yield(p).map_err(usage)?;
            csv.push_str(&format!("raw,{}\n", fmt_f64(y.raw)));
            csv.push_str(&format!("clamped,{}\n", fmt_f64(y.clamped)));
        }
        "concentration" => {
            let spectrum = [
                require(args.p00, "p00")?,
                require(args.p01, "p01")?,
                require(args.p10, "p10")?,
                require(args.p11, "p11")?,
            ];
            let (probs, avg) = protocol::optimal_concentration(&spectrum).map_err(usage)?;
            for (j, p) in probs.iter().enumerate() {
                csv.push_str(&format!("p{},{}\n", j + 1, fmt_f64(*p)));
            }
            csv.push_str(&format!("avg_entanglement,{}\n", fmt_f64(avg)));
        }
        other => {
            return Err(CliError::Usage(format!("unknown protocol '{other}'")));
        }
    }
    write_out(&args.out, &csv)?;
    Ok(ExitCode::SUCCESS)
}
