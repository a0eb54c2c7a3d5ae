//! Command-line front end.
//!
//! Subcommands: `fig1` (CHSH violation surface), `certify` (one violation
//! report), `lhv-bound` (exact classical bound by enumeration), `sweep`
//! (certification grid over n, V, xi) and `optimize` (angle optimization
//! beyond the named families).
//!
//! Exit codes: 0 success (and, for `certify`, violation found); 2 invalid
//! parameter ranges; 3 no violation at a degenerate point; 4 capacity or
//! enumeration cap exceeded; 1 anything else.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::bell::{self, InequalitySpec, LhvBound};
use crate::certify::{
    self, certify_no_cloning, phase_compensated, InequalityKind, OptimizeOptions,
};
use crate::error::Error;
use crate::qstate::{CatParams, NoisyCloneSpec, ORACLE_CAP};

/// Environment variable naming the default output directory for relative
/// `--out` paths.
pub const OUT_DIR_ENV: &str = "BELLCLONE_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_VIOLATED: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "bellclone",
    version,
    about = "Bell-inequality certification of the quantum no-cloning theorem"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the CHSH violation surface over a (xi, V) grid.
    Fig1(Fig1Args),
    /// Certify no-cloning at one (n, V, xi) point.
    Certify(CertifyArgs),
    /// Establish the exact classical bound of an inequality by enumeration.
    LhvBound(LhvBoundArgs),
    /// Run certifications over a grid of n, V and xi.
    Sweep(SweepArgs),
    /// Optimize measurement angles beyond the named setting families.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Chsh,
    Even,
    Odd,
}

impl Family {
    fn kind(self) -> InequalityKind {
        match self {
            Family::Chsh => InequalityKind::Chsh,
            Family::Even => InequalityKind::EvenN,
            Family::Odd => InequalityKind::OddN,
        }
    }
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    /// Grid resolution along xi.
    #[arg(long = "grid-xi", default_value_t = 101)]
    pub grid_xi: usize,
    /// Grid resolution along V.
    #[arg(long = "grid-v", default_value_t = 101)]
    pub grid_v: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for the grid sweep.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Number of clones (parties).
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub visibility: f64,
    #[arg(long)]
    pub xi: f64,
    /// Cat-state relative phase.
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Interpret xi and phi as degrees.
    #[arg(long)]
    pub degrees: bool,
    /// Cross-check the witness value against the density-matrix oracle.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LhvBoundArgs {
    /// Inequality family; alternative to --spec.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Party count for --family even/odd (chsh fixes n = 2).
    #[arg(long)]
    pub n: Option<usize>,
    /// JSON inequality document to bound instead of a named family.
    #[arg(long, conflicts_with_all = ["family", "n"])]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "n-min", default_value_t = 2)]
    pub n_min: usize,
    #[arg(long = "n-max", default_value_t = 6)]
    pub n_max: usize,
    #[arg(long = "grid-v", default_value_t = 11)]
    pub grid_v: usize,
    #[arg(long = "grid-xi", default_value_t = 11)]
    pub grid_xi: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; output is identical for any value.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Seed recorded for reproducibility (the sweep itself is exact).
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub visibility: f64,
    #[arg(long)]
    pub xi: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    #[arg(long)]
    pub degrees: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 200)]
    pub sweeps: usize,
    /// Verify the optimized value against the density-matrix oracle.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Round-trip-safe 17-significant-digit float formatting for CSV.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::OutOfRange { .. } | Error::PartyCount { .. } => EXIT_INVALID,
        Error::Capacity { .. } | Error::EnumerationCap { .. } => EXIT_CAPACITY,
        _ => EXIT_ERROR,
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn emit(out: &Option<PathBuf>, content: &str) -> i32 {
    match out {
        Some(path) => {
            let path = resolve_out(path);
            if let Err(e) = fs::write(&path, content) {
                eprintln!("cannot write {}: {e}", path.display());
                return EXIT_ERROR;
            }
            EXIT_OK
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(content.as_bytes()).is_err() {
                return EXIT_ERROR;
            }
            EXIT_OK
        }
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, i32> {
    match jobs {
        None => Ok(f()),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| {
                    eprintln!("cannot build thread pool: {e}");
                    EXIT_ERROR
                })?;
            Ok(pool.install(f))
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Fig1(args) => cmd_fig1(args),
        Command::Certify(args) => cmd_certify(args),
        Command::LhvBound(args) => cmd_lhv_bound(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Optimize(args) => cmd_optimize(args),
    }
}

fn cmd_fig1(args: Fig1Args) -> i32 {
    let surface = match with_pool(args.jobs, || certify::fig1_surface(args.grid_xi, args.grid_v)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => {
            eprintln!("fig1: {e}");
            return exit_code_for(&e);
        }
        Err(code) => return code,
    };
    let content = match args.format {
        OutputFormat::Csv => {
            let mut s = String::from("xi,visibility,chsh_value\n");
            for p in &surface {
                s.push_str(&format!(
                    "{},{},{}\n",
                    fmt(p.xi),
                    fmt(p.visibility),
                    fmt(p.chsh_value)
                ));
            }
            s
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&surface).expect("serializable");
            s.push('\n');
            s
        }
    };
    emit(&args.out, &content)
}

fn to_radians(value: f64, degrees: bool) -> f64 {
    if degrees {
        value.to_radians()
    } else {
        value
    }
}

fn cmd_certify(args: CertifyArgs) -> i32 {
    let xi = to_radians(args.xi, args.degrees);
    let phi = to_radians(args.phi, args.degrees);
    let mut report = match certify_no_cloning(args.n, args.visibility, xi) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("certify: {e}");
            return exit_code_for(&e);
        }
    };
    if phi != 0.0 {
        report.witness = phase_compensated(&report.witness, phi);
    }
    let mut doc = serde_json::to_value(&report).expect("serializable");
    if args.oracle {
        let cat = match CatParams::new(xi, phi.rem_euclid(std::f64::consts::TAU)) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("certify: {e}");
                return exit_code_for(&e);
            }
        };
        let check = NoisyCloneSpec::new(args.n, cat, args.visibility)
            .and_then(|state| report.inequality_kind.spec(args.n).map(|s| (state, s)))
            .and_then(|(state, spec)| bell::quantum_value(&spec, &state, &report.witness, true));
        match check {
            Ok(oracle_value) => {
                doc["oracle_value"] = json!(oracle_value);
                if (oracle_value - report.value).abs() > 1e-10 {
                    eprintln!(
                        "certify: oracle disagrees with closed form: {} vs {}",
                        oracle_value, report.value
                    );
                    return EXIT_ERROR;
                }
            }
            Err(e) => {
                eprintln!("certify: oracle check failed: {e}");
                return exit_code_for(&e);
            }
        }
    }
    let mut content = serde_json::to_string_pretty(&doc).expect("serializable");
    content.push('\n');
    if let Some(out) = &args.out {
        let code = emit(&Some(out.clone()), &content);
        if code != EXIT_OK {
            return code;
        }
    }
    print!("{content}");
    if report.violated {
        EXIT_OK
    } else {
        EXIT_NOT_VIOLATED
    }
}

fn cmd_lhv_bound(args: LhvBoundArgs) -> i32 {
    let spec: InequalitySpec = if let Some(path) = &args.spec {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("lhv-bound: cannot read {}: {e}", path.display());
                return EXIT_ERROR;
            }
        };
        match serde_json::from_str(&text) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("lhv-bound: invalid inequality document: {e}");
                return EXIT_INVALID;
            }
        }
    } else {
        let family = match args.family {
            Some(f) => f,
            None => {
                eprintln!("lhv-bound: need --family or --spec");
                return EXIT_INVALID;
            }
        };
        let n = args.n.unwrap_or(match family {
            Family::Chsh => 2,
            Family::Even => 4,
            Family::Odd => 3,
        });
        match family.kind().spec(n) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("lhv-bound: {e}");
                return exit_code_for(&e);
            }
        }
    };
    let bound: LhvBound = match bell::lhv_max(&spec) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("lhv-bound: {e}");
            return exit_code_for(&e);
        }
    };
    let doc = json!({
        "n": spec.n(),
        "bound": bound.value.to_f64(),
        "bound_exact": { "num": bound.value.num, "den_pow2": bound.value.den_pow2 },
        "claimed_bound": spec.claimed_bound(),
        "strategies_searched": bound.strategies_searched,
        "argmax_mask": bound.strategy_mask,
        "argmax_strategy": bound.strategy,
    });
    let mut content = serde_json::to_string_pretty(&doc).expect("serializable");
    content.push('\n');
    emit(&args.out, &content)
}

fn family_threshold(kind: InequalityKind, n: usize, v: f64, xi: f64) -> f64 {
    match kind {
        // the reduced CHSH form returns to the bound at 2 atan(V sin xi)
        InequalityKind::Chsh => 2.0 * (v * xi.sin()).atan(),
        InequalityKind::EvenN => certify::theorem1_threshold(n, v, xi),
        InequalityKind::OddN => certify::theorem2_threshold(n, v, xi),
    }
}

fn cmd_sweep(args: SweepArgs) -> i32 {
    if args.n_min < 2 || args.n_max < args.n_min || args.grid_v < 2 || args.grid_xi < 2 {
        eprintln!("sweep: need n-min >= 2, n-max >= n-min and grid resolutions >= 2");
        return EXIT_INVALID;
    }
    let ns: Vec<usize> = (args.n_min..=args.n_max).collect();
    let rows_per_n = args.grid_v * args.grid_xi;
    let total = ns.len() * rows_per_n;

    let rows = match with_pool(args.jobs, || {
        use rayon::prelude::*;
        (0..total)
            .into_par_iter()
            .map(|k| {
                let n = ns[k / rows_per_n];
                let rem = k % rows_per_n;
                let iv = rem / args.grid_xi;
                let ix = rem % args.grid_xi;
                let v = iv as f64 / (args.grid_v - 1) as f64;
                let xi = PI * ix as f64 / (args.grid_xi - 1) as f64;
                certify_no_cloning(n, v, xi).map(|r| {
                    let threshold = family_threshold(r.inequality_kind, n, v, xi);
                    (n, v, xi, r.inequality_kind, r.value, threshold, r.violated)
                })
            })
            .collect::<Result<Vec<_>, _>>()
    }) {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => {
            eprintln!("sweep: {e}");
            return exit_code_for(&e);
        }
        Err(code) => return code,
    };

    let kind_name = |k: InequalityKind| match k {
        InequalityKind::Chsh => "chsh",
        InequalityKind::EvenN => "even",
        InequalityKind::OddN => "odd",
    };
    let content = match args.format {
        OutputFormat::Csv => {
            let mut s = String::from("n,visibility,xi,kind,value,threshold,violated\n");
            for (n, v, xi, kind, value, threshold, violated) in &rows {
                s.push_str(&format!(
                    "{n},{},{},{},{},{},{violated}\n",
                    fmt(*v),
                    fmt(*xi),
                    kind_name(*kind),
                    fmt(*value),
                    fmt(*threshold)
                ));
            }
            s
        }
        OutputFormat::Json => {
            let docs: Vec<_> = rows
                .iter()
                .map(|(n, v, xi, kind, value, threshold, violated)| {
                    json!({
                        "n": n,
                        "visibility": v,
                        "xi": xi,
                        "kind": kind_name(*kind),
                        "value": value,
                        "threshold": threshold,
                        "violated": violated,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&docs).expect("serializable");
            s.push('\n');
            s
        }
    };
    emit(&args.out, &content)
}

fn cmd_optimize(args: OptimizeArgs) -> i32 {
    let xi = to_radians(args.xi, args.degrees);
    let phi = to_radians(args.phi, args.degrees);
    let opts = OptimizeOptions {
        restarts: args.restarts,
        sweeps: args.sweeps,
        seed: args.seed,
        full_search: true,
        phi_cat: phi.rem_euclid(std::f64::consts::TAU),
    };
    let result = match with_pool(args.jobs, || {
        certify::optimize_violation(args.family.kind(), args.n, args.visibility, xi, &opts)
    }) {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => {
            eprintln!("optimize: {e}");
            return exit_code_for(&e);
        }
        Err(code) => return code,
    };
    let table = result.table.clone();
    let mut doc = json!({
        "family": match args.family { Family::Chsh => "chsh", Family::Even => "even", Family::Odd => "odd" },
        "n": args.n,
        "visibility": args.visibility,
        "xi": xi,
        "phi": phi,
        "value": result.value,
        "sweeps_used": result.sweeps_used,
        "settings": table,
    });
    if args.oracle {
        if args.n > ORACLE_CAP {
            eprintln!("optimize: oracle check unavailable for n > {ORACLE_CAP}");
            return EXIT_CAPACITY;
        }
        let check = CatParams::new(xi, phi.rem_euclid(std::f64::consts::TAU))
            .and_then(|cat| NoisyCloneSpec::new(args.n, cat, args.visibility))
            .and_then(|state| args.family.kind().spec(args.n).map(|s| (state, s)))
            .and_then(|(state, spec)| bell::quantum_value(&spec, &state, &table, true));
        match check {
            Ok(oracle_value) => {
                doc["oracle_value"] = json!(oracle_value);
                if (oracle_value - result.value).abs() > 1e-10 {
                    eprintln!(
                        "optimize: oracle disagrees with closed form: {} vs {}",
                        oracle_value, result.value
                    );
                    return EXIT_ERROR;
                }
            }
            Err(e) => {
                eprintln!("optimize: oracle check failed: {e}");
                return exit_code_for(&e);
            }
        }
    }
    let mut content = serde_json::to_string_pretty(&doc).expect("serializable");
    content.push('\n');
    if let Some(out) = &args.out {
        let code = emit(&Some(out.clone()), &content);
        if code != EXIT_OK {
            return code;
        }
    }
    print!("{content}");
    EXIT_OK
}
