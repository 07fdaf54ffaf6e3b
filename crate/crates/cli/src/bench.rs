//! The `bench` subcommand.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use mcgs_core::analysis::find_crossover;
use mcgs_core::metrics::{bench_one, config_for, geometric_range, svg_line_chart, to_csv, BenchRow, Series};
use mcgs_core::synth::Method;
use rayon::prelude::*;

use crate::{core, parse_seed, usage, SynthOpts};

#[derive(Args, Debug)]
pub(crate) struct BenchArgs {
    /// Control counts, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "range", required_unless_present = "range")]
    n: Vec<usize>,
    /// Geometric sweep `start:end:ratio`.
    #[arg(long)]
    range: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "linear,original,optimized")]
    methods: Vec<Method>,
    /// CSV output; standard output when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Line chart of lowered depth against n.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Record wall-clock synthesis time; otherwise `wall_ms` is 0 and the CSV is reproducible.
    #[arg(long)]
    timing: bool,
    /// Append the lowered-depth crossover of every method against linear.
    #[arg(long)]
    crossovers: bool,
    #[arg(long, env = "MCGS_SEED", value_parser = parse_seed)]
    seed: Option<u64>,
    #[command(flatten)]
    opts: SynthOpts,
}

fn parse_range(s: &str) -> anyhow::Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || usage(format!("malformed range '{s}', expected start:end:ratio"));
    let [a, b, r] = parts.as_slice() else { return Err(bad()) };
    let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let r: f64 = r.parse().map_err(|_| bad())?;
    if a == 0 || a > b || !(r > 1.0 && r.is_finite()) {
        return Err(usage(format!("range '{s}' needs 1 <= start <= end and ratio > 1")));
    }
    Ok(geometric_range(a, b, r))
}

pub(crate) fn run(a: BenchArgs) -> anyhow::Result<u8> {
    let mut ns = match &a.range {
        Some(r) => parse_range(r)?,
        None => a.n.clone(),
    };
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() || ns[0] == 0 {
        bail!(usage("control counts must be at least 1"));
    }
    let mut methods = a.methods.clone();
    methods.sort_by_key(|m| m.name());
    methods.dedup();
    let base = a.opts.config(Method::Auto)?;
    let seed = a.seed.unwrap_or(mcgs_core::DEFAULT_SEED);

    let jobs: Vec<(usize, Method)> = ns.iter().flat_map(|&n| methods.iter().map(move |&m| (n, m))).collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(n, m)| bench_one(n, &config_for(m, &base), seed, a.timing))
        .collect::<mcgs_core::Result<Vec<BenchRow>>>()
        .map_err(core)?;
    rows.sort_by(|x, y| (x.n, &x.method).cmp(&(y.n, &y.method)));

    let mut csv = to_csv(&rows);
    if a.crossovers {
        for m in methods.iter().filter(|&&m| m != Method::Linear) {
            if !methods.contains(&Method::Linear) {
                bail!(usage("--crossovers needs the linear method in --methods"));
            }
            let n0 = crossover(&rows, m.name(), Method::Linear.name());
            let n0 = n0.map(|n| n.to_string()).unwrap_or_default();
            csv.push_str(&format!("{n0},crossover:{}<{},,,,,,{seed},\n", m.name(), Method::Linear.name()));
        }
    }
    match &a.csv {
        Some(path) => std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    if let Some(path) = &a.svg {
        let series: Vec<Series> = methods
            .iter()
            .map(|m| Series {
                name: m.name().to_string(),
                points: rows.iter().filter(|r| r.method == m.name()).map(|r| (r.n as f64, r.metrics.lowered_depth as f64)).collect(),
            })
            .collect();
        let log_x = ns[ns.len() - 1] >= 8 * ns[0];
        let svg = svg_line_chart("Lowered depth of C^nX", "n (controls)", "depth", &series, log_x);
        std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

/// Lowered-depth crossover of method `a` below method `b` over the rows present for both.
fn crossover(rows: &[BenchRow], a: &str, b: &str) -> Option<usize> {
    let pick = |name: &str, n: usize| rows.iter().find(|r| r.n == n && r.method == name).map(|r| r.metrics.lowered_depth);
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.dedup();
    let points: Vec<(usize, usize, usize)> =
        ns.into_iter().filter_map(|n| Some((n, pick(a, n)?, pick(b, n)?))).collect();
    find_crossover(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("64:512:2").unwrap(), [64, 128, 256, 512]);
        for bad in ["64:512", "0:8:2", "9:8:2", "1:8:1", "a:b:c"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }
}
