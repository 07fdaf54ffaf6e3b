//! `mcgs`: synthesize, verify, benchmark and analyze multi-controlled gates.

mod bench;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mcgs_core::analysis::{akra_bazzi_exponent, find_crossover, linear_depth_table, predict_depth, RecurrenceSpec, Variant};
use mcgs_core::ctrl_u::{controlled_matrix, mcsu2_with, mcu2_approx_with};
use mcgs_core::metrics::{config_for, Metric, MetricsRecord};
use mcgs_core::sim::{check_mcx_with, check_unitary, CheckMode, McxCheckOptions};
use mcgs_core::synth::{synthesize, Method, SynthesisConfig, DEFAULT_BASE_THRESHOLD, DEFAULT_LINEAR_CUTOVER};
use mcgs_core::{Error, Mat2, C64};
use rayon::prelude::*;

/// Exit status when a verification finds a mismatch, or a command fails at run time.
const EXIT_FAILURE: u8 = 1;
/// Exit status for invalid flags or arguments outside a command's domain.
const EXIT_USAGE: u8 = 2;

/// Largest control count for the dense unitary oracle.
const MAX_DENSE_CONTROLS: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "mcgs", version, about = "Low-depth multi-controlled gates with one borrowed ancilla")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize C^nX and write it as OpenQASM 3.
    Synth(SynthArgs),
    /// Check a synthesized gate against the exact target operation.
    Verify(VerifyArgs),
    /// Sweep control counts and methods, writing CSV and optionally SVG.
    Bench(bench::BenchArgs),
    /// Exponents, crossovers and predicted depths.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
}

#[derive(Args, Debug, Clone)]
pub(crate) struct SynthOpts {
    /// Base-case threshold of the recursive methods.
    #[arg(long, default_value_t = DEFAULT_BASE_THRESHOLD)]
    base_threshold: usize,
    /// Largest n the auto method hands to the linear construction.
    #[arg(long, default_value_t = DEFAULT_LINEAR_CUTOVER)]
    linear_cutover: usize,
}

impl SynthOpts {
    fn config(&self, method: Method) -> anyhow::Result<SynthesisConfig> {
        let cfg = SynthesisConfig { method, ..SynthesisConfig::default() }
            .base_threshold(self.base_threshold)
            .linear_cutover(self.linear_cutover);
        cfg.validate().map_err(usage)?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Number of controls.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// linear | original | optimized | auto
    #[arg(long, default_value = "auto")]
    method: Method,
    #[command(flatten)]
    opts: SynthOpts,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct VerifyArgs {
    #[command(subcommand)]
    gate: Option<VerifyGate>,
    #[command(flatten)]
    mcx: VerifyMcx,
}

#[derive(Args, Debug)]
struct VerifyMcx {
    /// Number of controls.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: Option<u32>,
    #[arg(long, default_value = "auto")]
    method: Method,
    /// exhaustive | sampled | auto
    #[arg(long, default_value = "auto")]
    mode: String,
    /// Random inputs in sampled mode, on top of the critical patterns.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, env = "MCGS_SEED", value_parser = parse_seed)]
    seed: Option<u64>,
    #[command(flatten)]
    opts: SynthOpts,
}

#[derive(Subcommand, Debug)]
enum VerifyGate {
    /// C^n(W) for W = Rz(phi) Ry(theta) Rz(lambda).
    Su2(RotationArgs),
    /// Approximate C^n(U) for U = e^{i gamma} Rz(phi) Ry(theta) Rz(lambda).
    U2 {
        #[command(flatten)]
        rot: RotationArgs,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
    },
}

#[derive(Args, Debug)]
struct RotationArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda: f64,
    /// Spectral-distance tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl RotationArgs {
    fn su2(&self) -> Mat2 {
        Mat2::rz(self.phi) * Mat2::ry(self.theta) * Mat2::rz(self.lambda)
    }
}

#[derive(Subcommand, Debug)]
enum AnalyzeCmd {
    /// Exponent alpha with sum a_i / b_i^alpha = 1.
    Exponent {
        /// Terms as a:b,a:b,...
        #[arg(long)]
        terms: String,
    },
    /// Smallest n from which method a stays strictly below method b.
    Crossover {
        #[arg(long)]
        a: Method,
        #[arg(long)]
        b: Method,
        /// abstract_depth | lowered_depth | cx_count | total_gates
        #[arg(long, default_value = "lowered_depth")]
        metric: Metric,
        #[arg(long, default_value_t = 1)]
        min: usize,
        #[arg(long)]
        max: usize,
        #[command(flatten)]
        opts: SynthOpts,
    },
    /// Depth predicted by the recurrence over a linear base table.
    Predict {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// original | optimized
        #[arg(long, default_value = "original")]
        variant: String,
        #[arg(long, default_value_t = DEFAULT_BASE_THRESHOLD)]
        base_threshold: usize,
    },
}

/// Accepts decimal or `0x`-prefixed hexadecimal.
fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed '{s}': {e}"))
}

/// Marks an error as a usage error.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    Usage(e.to_string()).into()
}

/// Domain and configuration errors from the core are the caller's fault.
fn core(e: Error) -> anyhow::Error {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Resource(_) | Error::MissingTableEntry(_) => usage(e),
        other => other.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<Usage>() { EXIT_USAGE } else { EXIT_FAILURE })
        }
    }
}

fn run(cmd: Command) -> anyhow::Result<u8> {
    match cmd {
        Command::Synth(a) => synth(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench::run(a),
        Command::Analyze(a) => analyze(a),
    }
}

fn synth(a: SynthArgs) -> anyhow::Result<u8> {
    let cfg = a.opts.config(a.method)?;
    let c = synthesize(a.n as usize, &cfg).map_err(core)?;
    let qasm = c.to_qasm();
    match &a.out {
        Some(path) => std::fs::write(path, &qasm).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{qasm}"),
    }
    println!("n={} method={} {}", a.n, a.method, MetricsRecord::of(&c).map_err(core)?);
    Ok(0)
}

fn verify(a: VerifyArgs) -> anyhow::Result<u8> {
    match a.gate {
        Some(VerifyGate::Su2(r)) => verify_su2(&r),
        Some(VerifyGate::U2 { rot, gamma, epsilon }) => verify_u2(&rot, gamma, epsilon),
        None => verify_mcx(a.mcx),
    }
}

fn verify_mcx(a: VerifyMcx) -> anyhow::Result<u8> {
    let Some(n) = a.n else { bail!(usage("verify needs --n or a gate subcommand")) };
    let n = n as usize;
    let mode = match a.mode.as_str() {
        "auto" => None,
        "exhaustive" => Some(CheckMode::Exhaustive),
        "sampled" => Some(CheckMode::Sampled),
        other => bail!(usage(format!("unknown mode '{other}', expected exhaustive, sampled or auto"))),
    };
    let cfg = a.opts.config(a.method)?;
    let c = synthesize(n, &cfg).map_err(core)?;
    let opts = McxCheckOptions { mode, samples: a.samples, seed: a.seed.unwrap_or(mcgs_core::DEFAULT_SEED) };
    let rep = check_mcx_with(&c, n, opts).map_err(core)?;
    println!("n={n} method={} {rep}", a.method);
    Ok(if rep.passed() { 0 } else { EXIT_FAILURE })
}

fn dense_limit(n: u32) -> anyhow::Result<usize> {
    let n = n as usize;
    if n > MAX_DENSE_CONTROLS {
        bail!(usage(format!("the dense oracle supports at most {MAX_DENSE_CONTROLS} controls, got {n}")));
    }
    Ok(n)
}

fn verify_su2(r: &RotationArgs) -> anyhow::Result<u8> {
    let n = dense_limit(r.n)?;
    let w = r.su2();
    let c = mcsu2_with(n, &w, &SynthesisConfig::default()).map_err(core)?;
    let rep = check_unitary(&c, &controlled_matrix(n, &w), r.tol).map_err(core)?;
    println!("su2 n={n} gates={} {rep}", c.len());
    Ok(if rep.passed() { 0 } else { EXIT_FAILURE })
}

fn verify_u2(r: &RotationArgs, gamma: f64, epsilon: f64) -> anyhow::Result<u8> {
    let n = dense_limit(r.n)?;
    let u = r.su2().scale(C64::from_polar(1.0, gamma));
    let (c, plan) = mcu2_approx_with(n, &u, epsilon, &SynthesisConfig::default()).map_err(core)?;
    // the circuit is only promised within epsilon; the rounding slack is for the oracle
    let rep = check_unitary(&c, &controlled_matrix(n, &u), epsilon + r.tol).map_err(core)?;
    println!(
        "u2 n={n} steps={} residual={:.3e} epsilon={:.1e} gates={} {rep}",
        plan.steps,
        plan.residual_error,
        epsilon,
        c.len()
    );
    Ok(if rep.passed() { 0 } else { EXIT_FAILURE })
}

fn analyze(cmd: AnalyzeCmd) -> anyhow::Result<u8> {
    match cmd {
        AnalyzeCmd::Exponent { terms } => {
            let spec: RecurrenceSpec = terms.parse().map_err(usage)?;
            println!("{:.6}", akra_bazzi_exponent(&spec).map_err(core)?);
        }
        AnalyzeCmd::Crossover { a, b, metric, min, max, opts } => {
            if min == 0 || min > max {
                bail!(usage(format!("need 1 <= min <= max, got {min}..{max}")));
            }
            let base = opts.config(Method::Auto)?;
            let (ca, cb) = (config_for(a, &base), config_for(b, &base));
            let points = (min..=max)
                .into_par_iter()
                .map(|n| {
                    let ma = MetricsRecord::of(&synthesize(n, &ca)?)?.get(metric);
                    let mb = MetricsRecord::of(&synthesize(n, &cb)?)?.get(metric);
                    Ok((n, ma, mb))
                })
                .collect::<mcgs_core::Result<Vec<_>>>()
                .map_err(core)?;
            match find_crossover(&points) {
                Some(n) => println!("{n}"),
                None => println!("none"),
            }
        }
        AnalyzeCmd::Predict { n, variant, base_threshold } => {
            let variant = match variant.as_str() {
                "original" => Variant::Original,
                "optimized" => Variant::Optimized,
                other => bail!(usage(format!("unknown variant '{other}', expected original or optimized"))),
            };
            if base_threshold < 3 {
                bail!(usage("base threshold must be at least 3"));
            }
            let table = linear_depth_table(base_threshold);
            println!("{}", predict_depth(n as usize, &table, variant).map_err(core)?);
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn seeds_in_both_bases() {
        assert_eq!(parse_seed("42"), Ok(42));
        assert_eq!(parse_seed("0xC0FFEE"), Ok(0xC0FFEE));
        assert!(parse_seed("0xZZ").is_err());
        assert!(parse_seed("-1").is_err());
    }

    #[test]
    fn flags_parse() {
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["mcgs", "verify", "su2", "--n", "3", "--theta", "-0.5"]).unwrap();
        assert!(matches!(cli.cmd, Command::Verify(VerifyArgs { gate: Some(VerifyGate::Su2(_)), .. })));
    }
}
