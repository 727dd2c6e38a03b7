//! Command-line front end.
//!
//! Exit codes: 0 success (verified), 2 decomposition or verification
//! failure, 1 usage, input or I/O error. Logs go to stderr; with `--json`
//! stdout carries a single JSON document.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::decomposer::{decompose_homogeneous, decompose_underdetermined, fdpmp4, verify, DecompError, DecompResult, DecomposeOptions};
use crate::field::FieldCtx;
use crate::instancegen::{gen_2r_keypair, gen_decomposable, gen_rank_deficient, parse, serialize, GenSpec};
use crate::oracles::{run_campaign, Campaign, CampaignParams, TrialReport};
use crate::poly::PolySystem;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "polydecomp", version, about = "Decompose quartic polynomial systems as g ∘ h")]
pub struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random decomposable system.
    Gen(GenArgs),
    /// Decompose a system read from a .psys.json file.
    Decompose(DecomposeArgs),
    /// Check whether g ∘ h = f.
    Verify(VerifyArgs),
    /// Run a Monte Carlo campaign.
    Stats(StatsArgs),
    /// Time the affine pipeline for a range of n.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Print JSON on stdout.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON output to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Coefficient field: gf:<p> or q.
    #[arg(long, default_value = "gf:65537")]
    pub field: FieldCtx,
    #[arg(long)]
    pub n: usize,
    /// Number of components of f; defaults to n.
    #[arg(long)]
    pub u: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub homogeneous: bool,
    #[arg(long, default_value_t = 2)]
    pub d_g: u32,
    #[arg(long, default_value_t = 2)]
    pub d_h: u32,
    /// Make span(h) exactly this dimension (< n).
    #[arg(long, conflicts_with = "two_r")]
    pub rank: Option<usize>,
    /// Emit the public map of a random 2R key pair instead.
    #[arg(long)]
    pub two_r: bool,
    /// Also write g and h next to --out as <stem>.g.psys.json, <stem>.h.psys.json.
    #[arg(long, requires = "out")]
    pub witness: bool,
    /// Output path for f; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Pick from the shape of f.
    Auto,
    Homogeneous,
    Fdpmp4,
    Underdetermined,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Degree of the multipliers for u < n.
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    /// Seed for the random linear forms.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub retries: usize,
    /// fdpmp4: use only the partial derivatives of f* (expected to fail).
    #[arg(long)]
    pub bare_partials: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub f: PathBuf,
    pub g: PathBuf,
    pub h: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, default_value = "conjecture-y")]
    pub campaign: Campaign,
    #[arg(long, default_value = "gf:65537")]
    pub field: FieldCtx,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// First seed; trials use seed, seed+1, ...
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub d_h: u32,
    #[arg(long, default_value_t = 1)]
    pub d_prime: u32,
    /// Run outside the degree hypotheses.
    #[arg(long)]
    pub allow_violation: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "gf:65537")]
    pub field: FieldCtx,
    /// Values of n: a list "6,8,10" or a range "6-12".
    #[arg(long, default_value = "5-12")]
    pub ns: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repetitions per n; timings are averaged.
    #[arg(long, default_value_t = 1)]
    pub reps: u32,
    #[command(flatten)]
    pub common: Common,
}

/// A usage, input or I/O problem; maps to exit code 1.
#[derive(Debug)]
struct CliError(String);

type CliResult = Result<i32, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose);
    let outcome = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .try_init();
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError(e.to_string())
}

fn read_system(path: &Path) -> Result<PolySystem, CliError> {
    let bytes = fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse(&bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Prints `value` (JSON or `text`) and writes it to `--out`.
fn emit(common: &Common, value: &Value, text: &str) -> Result<(), CliError> {
    let pretty = serde_json::to_string_pretty(value).expect("serializable");
    if let Some(path) = &common.out {
        write_file(path, pretty.as_bytes())?;
    }
    let mut stdout = std::io::stdout().lock();
    let shown = if common.json { pretty.as_str() } else { text };
    writeln!(stdout, "{shown}").map_err(usage)?;
    Ok(())
}

fn witness_path(out: &Path, tag: &str) -> PathBuf {
    let name = out.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let stem = name.strip_suffix(".psys.json").or_else(|| name.strip_suffix(".json")).unwrap_or(name);
    out.with_file_name(format!("{stem}.{tag}.psys.json"))
}

fn cmd_gen(a: &GenArgs) -> CliResult {
    let (f, witness) = if a.two_r {
        let key = gen_2r_keypair(a.field, a.n, a.seed).map_err(usage)?;
        (key.public.clone(), Some((key.outer(), key.inner())))
    } else {
        let spec = GenSpec {
            field: a.field,
            n: a.n,
            u: a.u.unwrap_or(a.n),
            homogeneous: a.homogeneous,
            d_g: a.d_g,
            d_h: a.d_h,
            seed: a.seed,
            coeff_bound: crate::field::DEFAULT_RATIONAL_BOUND,
        };
        let inst = match a.rank {
            Some(k) => gen_rank_deficient(&spec, k),
            None => gen_decomposable(&spec),
        }
        .map_err(usage)?;
        (inst.f, Some((inst.g, inst.h)))
    };
    match &a.out {
        Some(path) => {
            write_file(path, &serialize(&f))?;
            if a.witness {
                let (g, h) = witness.expect("witness available");
                write_file(&witness_path(path, "g"), &serialize(&g))?;
                write_file(&witness_path(path, "h"), &serialize(&h))?;
            }
            log::info!("wrote {} (seed {})", path.display(), a.seed);
        }
        None => println!("{}", String::from_utf8(serialize(&f)).expect("utf-8")),
    }
    Ok(EXIT_OK)
}

fn pick_method(f: &PolySystem, method: Method) -> Method {
    if method != Method::Auto {
        return method;
    }
    if f.len() < f.nvars() {
        Method::Underdetermined
    } else if f.is_homogeneous_of(4) {
        Method::Homogeneous
    } else {
        Method::Fdpmp4
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Auto => "auto",
        Method::Homogeneous => "homogeneous",
        Method::Fdpmp4 => "fdpmp4",
        Method::Underdetermined => "underdetermined",
    }
}

fn cmd_decompose(a: &DecomposeArgs) -> CliResult {
    let f = read_system(&a.input)?;
    let method = pick_method(&f, a.method);
    let opts = DecomposeOptions { seed: a.seed, linear_retries: a.retries, bare_partials: a.bare_partials };
    let outcome: Result<DecompResult, DecompError> = match method {
        Method::Homogeneous => decompose_homogeneous(&f, &opts),
        Method::Underdetermined => decompose_underdetermined(&f, a.d, &opts),
        _ => fdpmp4(&f, &opts),
    };
    match outcome {
        Ok(res) => {
            let mut value = res.to_json();
            value["method"] = json!(method_name(method));
            value["seed"] = json!(a.seed);
            let text = format!(
                "verified: {}\nmethod: {}\nseed: {}\nfactor space dimension: {}\npadding used: {}\n\ng:\n{}\n\nh:\n{}",
                res.verified,
                method_name(method),
                a.seed,
                res.factor_space_dim,
                res.padding_used,
                listing(&res.g),
                listing(&res.h)
            );
            emit(&a.common, &value, &text)?;
            Ok(if res.verified { EXIT_OK } else { EXIT_FAILURE })
        }
        Err(DecompError::Precondition(msg)) => Err(usage(format!("precondition: {msg}"))),
        Err(e) => {
            let value = json!({
                "verified": false,
                "method": method_name(method),
                "seed": a.seed,
                "stage": e.stage(),
                "error": e.to_string(),
            });
            emit(&a.common, &value, &format!("verified: false\nstage: {}\nerror: {e}", e.stage()))?;
            Ok(EXIT_FAILURE)
        }
    }
}

fn listing(s: &PolySystem) -> String {
    s.polys().iter().enumerate().map(|(i, p)| format!("  [{i}] {p}")).collect::<Vec<_>>().join("\n")
}

fn cmd_verify(a: &VerifyArgs) -> CliResult {
    let (f, g, h) = (read_system(&a.f)?, read_system(&a.g)?, read_system(&a.h)?);
    if f.ctx() != g.ctx() || g.ctx() != h.ctx() {
        return Err(usage("systems are over different fields"));
    }
    let v = verify(&f, &g, &h).map_err(usage)?;
    let value = json!({ "equal": v.equal, "degree_proper": v.degree_proper });
    emit(&a.common, &value, &format!("equal: {}\ndegree proper: {}", v.equal, v.degree_proper))?;
    Ok(if v.equal { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_stats(a: &StatsArgs) -> CliResult {
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let params = CampaignParams {
        campaign: a.campaign,
        field: a.field,
        n: a.n,
        d_h: a.d_h,
        d_prime: a.d_prime,
        allow_violation: a.allow_violation,
    };
    let report: TrialReport = run_campaign(&params, a.seed..a.seed + a.trials).map_err(usage)?;
    let text = format!("{}\n{}", TrialReport::TABLE_HEADER, report.table_row());
    emit(&a.common, &report.to_json(), &text)?;
    Ok(EXIT_OK)
}

/// Parses "6-12" or "6,8,10".
pub fn parse_ns(text: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("invalid n list '{text}'");
    let ns: Vec<usize> = if let Some((lo, hi)) = text.split_once('-') {
        let (lo, hi): (usize, usize) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
        (lo..=hi).collect()
    } else {
        text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if ns.is_empty() || ns.contains(&0) {
        return Err(bad());
    }
    Ok(ns)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One row of a benchmark run.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub n: usize,
    pub total_ms: f64,
    pub stage_ms: std::collections::BTreeMap<String, f64>,
    pub verified: bool,
}

/// Times `fdpmp4` on a seeded affine instance for each `n`.
pub fn bench(field: FieldCtx, ns: &[usize], seed: u64, reps: u32) -> Vec<BenchRow> {
    let reps = reps.max(1);
    ns.iter()
        .map(|&n| {
            let inst = gen_decomposable(&GenSpec::new(field, n).seed(seed)).expect("valid spec");
            let mut row = BenchRow { n, total_ms: 0.0, stage_ms: Default::default(), verified: true };
            for _ in 0..reps {
                let start = Instant::now();
                let res = fdpmp4(&inst.f, &DecomposeOptions::with_seed(seed));
                row.total_ms += start.elapsed().as_secs_f64() * 1e3 / reps as f64;
                match res {
                    Ok(r) => {
                        row.verified &= r.verified;
                        for (stage, ms) in r.stage_timings_ms {
                            *row.stage_ms.entry(stage.name().to_string()).or_default() += ms / reps as f64;
                        }
                    }
                    Err(_) => row.verified = false,
                }
            }
            log::info!("n = {n}: {:.1} ms", row.total_ms);
            row
        })
        .collect()
}

fn cmd_bench(a: &BenchArgs) -> CliResult {
    let ns = parse_ns(&a.ns).map_err(usage)?;
    let rows = bench(a.field, &ns, a.seed, a.reps);
    let slope = loglog_slope(&rows.iter().map(|r| (r.n as f64, r.total_ms)).collect::<Vec<_>>());
    let mut text = String::from("   n    total_ms   stage_sum_ms  verified  stages\n");
    for r in &rows {
        let stages: Vec<String> = r.stage_ms.iter().map(|(k, v)| format!("{k}={v:.1}")).collect();
        text += &format!(
            "{:>4} {:>11.2} {:>14.2}  {:>8}  {}\n",
            r.n,
            r.total_ms,
            r.stage_ms.values().sum::<f64>(),
            r.verified,
            stages.join(" ")
        );
    }
    text += &match slope {
        Some(s) => format!("log-log slope: {s:.3}"),
        None => "log-log slope: n/a".to_string(),
    };
    let value = json!({
        "field": a.field,
        "seed": a.seed,
        "reps": a.reps,
        "rows": rows.iter().map(|r| json!({
            "n": r.n,
            "total_ms": r.total_ms,
            "stage_ms": r.stage_ms,
            "verified": r.verified,
        })).collect::<Vec<_>>(),
        "slope": slope,
    });
    emit(&a.common, &value, &text)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ns_parsing() {
        assert_eq!(parse_ns("6-9").unwrap(), vec![6, 7, 8, 9]);
        assert_eq!(parse_ns("5, 7,11").unwrap(), vec![5, 7, 11]);
        assert!(parse_ns("").is_err());
        assert!(parse_ns("0-3").is_err());
        assert!(parse_ns("a-b").is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (2..8).map(|n| (n as f64, 3.0 * (n as f64).powi(6))).collect();
        assert!((loglog_slope(&pts).unwrap() - 6.0).abs() < 1e-9);
        assert_eq!(loglog_slope(&[(2.0, 1.0)]), None);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["polydecomp", "gen"]), EXIT_USAGE);
        assert_eq!(run(["polydecomp", "stats", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["polydecomp", "stats", "--trials", "0"]), EXIT_USAGE);
        assert_eq!(run(["polydecomp", "gen", "--n", "2", "--d-g", "3"]), EXIT_USAGE);
        assert_eq!(run(["polydecomp", "gen", "--n", "2", "--field", "gf:8"]), EXIT_USAGE);
    }

    #[test]
    fn witness_names() {
        assert_eq!(witness_path(Path::new("/t/a.psys.json"), "g"), PathBuf::from("/t/a.g.psys.json"));
        assert_eq!(witness_path(Path::new("b"), "h"), PathBuf::from("b.h.psys.json"));
    }
}
