//! `fracprop`: evolve signals, identify symbols, verify properties and
//! classify exponent products.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fracprop::exponent_algebra::PhaseTerm;
use fracprop::io::{load_signal, load_symbol, write_signal};
use fracprop::spectral::DEFAULT_MARGIN;
use fracprop::verify::{run_suite, VerifyOptions};
use fracprop::{
    apply, band_project, classify_product, forward_transform, identify, BandSpec, Error, MultiplierSpec,
    SemistablePair, SpatialGrid,
};

mod json_out;

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "fracprop", version, about = "Radial Fourier multipliers and fractional Schrödinger groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply T(t) with symbol e^{iβt|ξ|^α} to a signal CSV.
    Evolve(EvolveArgs),
    /// Recover (α, β) from a tabulated symbol CSV.
    Identify(IdentifyArgs),
    /// Run the property suite for e^{iβ|ξ|^α}.
    Verify(VerifyArgs),
    /// Decide whether a product of e^{iβ r^α} terms is identically 1.
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Band radius R: the operator acts on R⁻¹ ≤ |ξ| ≤ R.
    #[arg(long)]
    band: f64,
    /// Expected number of grid points in the input.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Expected half-width of the input window.
    #[arg(long)]
    x_max: Option<f64>,
}

#[derive(Args)]
struct IdentifyArgs {
    #[arg(long)]
    symbol: PathBuf,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Half-size grids and trial counts, tolerances ×10.
    #[arg(long)]
    fast: bool,
    #[arg(long, hide = true)]
    mutate_dilate: Option<f64>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// JSON list of {"alpha", "beta"}; read from stdin when omitted.
    #[arg(long)]
    terms: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    alpha_tol: f64,
}

/// A failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Parse(_) | Error::GridMismatch(_) | Error::InvalidInput(_) | Error::Domain(_) => 2,
            Error::Config(_) | Error::Range(_) => 3,
            Error::DegenerateSymbol(_) => 4,
            Error::InconsistentBranch(_) | Error::SemistabilityViolation { .. } | Error::InconsistentPair(_) => 5,
            Error::ModelMismatch(_) | Error::UnwrapResolution { .. } | Error::InsufficientData(_) => 6,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn print_json(value: &Value) -> Result<(), Failure> {
    let text = json_out::to_string(value).map_err(|e| usage(format!("serialising report: {e}")))?;
    let mut out = io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| usage(format!("writing report: {e}")))
}

/// Writes through a sibling temporary file so a failed run never leaves a
/// truncated output behind.
fn write_atomically(path: &Path, write: impl FnOnce(&mut fs::File) -> fracprop::Result<()>) -> Result<(), Failure> {
    let name = path.file_name().ok_or_else(|| usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        write(&mut file)?;
        file.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok::<(), Error>(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(Failure::from)
}

fn evolve(args: EvolveArgs) -> Result<(), Failure> {
    for (name, v) in [("alpha", args.alpha), ("beta", args.beta), ("t", args.t)] {
        if !v.is_finite() {
            return Err(usage(format!("--{name} must be finite")));
        }
    }
    let expected = match (args.grid_n, args.x_max) {
        (Some(n), Some(x)) => Some(SpatialGrid::new(n, x)?),
        (None, None) => None,
        _ => return Err(usage("--grid-n and --x-max must be given together")),
    };
    let f = load_signal(&args.input, expected)?;
    let grid = *f.grid();
    let band = BandSpec::new(args.band)?;
    band.check_resolvable(&grid, DEFAULT_MARGIN)?;

    let spec = MultiplierSpec::closed_form(args.alpha, args.beta * args.t);
    let out = apply(&spec, &f, &band)?;
    let norm_in = band_project(&forward_transform(&f)?, &band)?.norm();
    write_atomically(&args.output, |file| write_signal(io::BufWriter::new(file), &out))?;
    print_json(&json!({
        "schema": SCHEMA,
        "command": "evolve",
        "alpha": args.alpha,
        "beta": args.beta,
        "t": args.t,
        "band": args.band,
        "grid": { "n": grid.n(), "x_max": grid.x_max() },
        "norm_in": norm_in,
        "norm_in_raw": f.norm(),
        "norm_out": out.norm(),
    }))
}

fn identify_cmd(args: IdentifyArgs) -> Result<(), Failure> {
    let profile = load_symbol(&args.symbol)?;
    let pair = SemistablePair::new(args.a, args.b)?;
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let result = identify(&profile, &pair, args.tol)?;
    let mut value = json!({ "schema": SCHEMA, "command": "identify" });
    merge(&mut value, serde_json::to_value(&result).map_err(|e| usage(e.to_string()))?);
    print_json(&value)
}

fn verify_cmd(args: VerifyArgs) -> Result<(), Failure> {
    let options = VerifyOptions { fast: args.fast, dilate_mutation: args.mutate_dilate };
    let report = run_suite(args.alpha, args.beta, args.seed, options).map_err(|e| match e {
        Error::Domain(_) | Error::InvalidInput(_) => usage(format!("invalid spec: {e}")),
        other => Failure::from(other),
    })?;
    let mut value = json!({ "schema": SCHEMA, "command": "verify" });
    merge(&mut value, serde_json::to_value(&report).map_err(|e| usage(e.to_string()))?);
    print_json(&value)?;
    if report.pass {
        Ok(())
    } else {
        let names: Vec<&str> = report.failing().map(|c| c.name).collect();
        Err(Failure { code: 1, message: format!("failing checks: {}", names.join(", ")) })
    }
}

fn classify_cmd(args: ClassifyArgs) -> Result<(), Failure> {
    let text = match &args.terms {
        Some(path) => fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
            s
        }
    };
    let terms: Vec<PhaseTerm> = serde_json::from_str(&text).map_err(|e| usage(format!("terms: {e}")))?;
    let verdict = classify_product(&terms, args.alpha_tol)?;
    let mut value = json!({ "schema": SCHEMA, "command": "classify" });
    merge(&mut value, serde_json::to_value(&verdict).map_err(|e| usage(e.to_string()))?);
    print_json(&value)
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("FRACPROP_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Evolve(a) => evolve(a),
        Command::Identify(a) => identify_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Classify(a) => classify_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fracprop: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
