//! Circuit metrics, benchmark rows, CSV and a minimal SVG line chart.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::circuit::Circuit;
use crate::lowering::lowered_metrics;
use crate::synth::{synthesize, Method, SynthesisConfig};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    AbstractDepth,
    LoweredDepth,
    CxCount,
    TotalGates,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abstract_depth" => Ok(Metric::AbstractDepth),
            "lowered_depth" => Ok(Metric::LoweredDepth),
            "cx_count" => Ok(Metric::CxCount),
            "total_gates" => Ok(Metric::TotalGates),
            other => Err(Error::Config(format!("unknown metric '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricsRecord {
    pub abstract_depth: usize,
    pub lowered_depth: usize,
    pub cx_count: usize,
    /// Gate count after lowering.
    pub total_gates: usize,
    /// Wires beyond controls and target.
    pub ancillas: usize,
}

impl MetricsRecord {
    pub fn of(c: &Circuit) -> Result<Self> {
        let low = lowered_metrics(c)?;
        let used = c.roles.controls.len() + usize::from(c.roles.target.is_some());
        Ok(MetricsRecord {
            abstract_depth: c.abstract_depth(),
            lowered_depth: low.depth,
            cx_count: low.cx_count,
            total_gates: low.total_gates(),
            ancillas: if used == 0 { 0 } else { c.width().saturating_sub(used) },
        })
    }

    pub fn get(&self, m: Metric) -> usize {
        match m {
            Metric::AbstractDepth => self.abstract_depth,
            Metric::LoweredDepth => self.lowered_depth,
            Metric::CxCount => self.cx_count,
            Metric::TotalGates => self.total_gates,
        }
    }
}

impl std::fmt::Display for MetricsRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "abstract_depth={} lowered_depth={} cx_count={} total_gates={} ancillas={}",
            self.abstract_depth, self.lowered_depth, self.cx_count, self.total_gates, self.ancillas
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub method: String,
    pub metrics: MetricsRecord,
    pub seed: u64,
    pub wall_ms: f64,
}

pub const BENCH_CSV_HEADER: &str = "n,method,abstract_depth,lowered_depth,cx_count,total_gates,ancillas,seed,wall_ms";

impl BenchRow {
    pub fn to_csv(&self) -> String {
        let m = &self.metrics;
        format!(
            "{},{},{},{},{},{},{},{},{:.3}",
            self.n,
            self.method,
            m.abstract_depth,
            m.lowered_depth,
            m.cx_count,
            m.total_gates,
            m.ancillas,
            self.seed,
            self.wall_ms
        )
    }
}

/// Synthesizes `C^nX` and measures it.
pub fn bench_one(n: usize, cfg: &SynthesisConfig, seed: u64, timing: bool) -> Result<BenchRow> {
    let start = std::time::Instant::now();
    let c = synthesize(n, cfg)?;
    let metrics = MetricsRecord::of(&c)?;
    let wall_ms = if timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
    Ok(BenchRow { n, method: cfg.method.name().to_string(), metrics, seed, wall_ms })
}

/// Synthesis settings used for each method in sweeps: the recursive
/// baseline keeps its own base threshold, everything else uses `base`.
pub fn config_for(method: Method, base: &SynthesisConfig) -> SynthesisConfig {
    let mut cfg = SynthesisConfig { method, ..*base };
    if method == Method::RecursiveOriginal {
        cfg.base_threshold = crate::synth::ORIGINAL_BASE_THRESHOLD;
        cfg.linear_cutover = cfg.linear_cutover.max(cfg.base_threshold);
    }
    cfg
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(BENCH_CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

/// Geometric sweep `start, start*r, ...` up to `end`, rounded and deduplicated.
pub fn geometric_range(start: usize, end: usize, ratio: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut x = start.max(1) as f64;
    while x.round() as usize <= end {
        let n = x.round() as usize;
        if out.last() != Some(&n) {
            out.push(n);
        }
        x *= ratio.max(1.0 + 1e-9);
    }
    out
}

/// One named series of `(x, y)` points.
#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Static SVG line chart; `log_x` plots the x axis on a log2 scale.
pub fn svg_line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], log_x: bool) -> String {
    let (w, h, ml, mr, mt, mb) = (720.0, 440.0, 70.0, 150.0, 40.0, 50.0);
    let tx = |x: f64| if log_x { x.max(1e-12).log2() } else { x };
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().map(|&(x, y)| (tx(x), y))).collect();
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y1) = (0.0, 1.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let y0 = 0.0;
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| ml + (tx(x) - x0) / (x1 - x0) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" font-size="15" text-anchor="middle">{}</text>"#, (w - mr + ml) / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{ml} {mt} V{} H{}" fill="none" stroke="black"/>"#,
        h - mb,
        w - mr
    );
    for i in 0..=5 {
        let yv = y0 + (y1 - y0) * i as f64 / 5.0;
        let y = py(yv);
        let _ = writeln!(s, r##"<line x1="{}" y1="{y:.1}" x2="{ml}" y2="{y:.1}" stroke="black"/><text x="{}" y="{:.1}" text-anchor="end">{:.0}</text>"##, ml - 5.0, ml - 8.0, y + 4.0, yv);
        let xv_t = x0 + (x1 - x0) * i as f64 / 5.0;
        let xv = if log_x { xv_t.exp2() } else { xv_t };
        let x = ml + (xv_t - x0) / (x1 - x0) * (w - ml - mr);
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{}" x2="{x:.1}" y2="{}" stroke="black"/><text x="{x:.1}" y="{}" text-anchor="middle">{:.0}</text>"#, h - mb, h - mb + 5.0, h - mb + 18.0, xv);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (w - mr + ml) / 2.0, h - 10.0, escape(x_label));
    let _ = writeln!(s, r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#, h / 2.0, h / 2.0, escape(y_label));
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, pts.join(" "));
        let ly = mt + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            w - mr + 10.0,
            w - mr + 30.0,
            w - mr + 35.0,
            ly + 4.0,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::mcx_linear;

    #[test]
    fn record_of_small_circuit() {
        let m = MetricsRecord::of(&mcx_linear(2).unwrap()).unwrap();
        assert_eq!(m, MetricsRecord { abstract_depth: 1, lowered_depth: 11, cx_count: 6, total_gates: 15, ancillas: 1 });
        assert_eq!(m.get(Metric::CxCount), 6);
    }

    #[test]
    fn csv_rows_are_stable() {
        let cfg = SynthesisConfig::with_method(Method::Linear);
        let a = to_csv(&[bench_one(10, &cfg, 7, false).unwrap()]);
        let b = to_csv(&[bench_one(10, &cfg, 7, false).unwrap()]);
        assert_eq!(a, b);
        assert!(a.starts_with(BENCH_CSV_HEADER));
        assert!(a.lines().nth(1).unwrap().starts_with("10,linear,"));
    }

    #[test]
    fn geometric_sweep() {
        assert_eq!(geometric_range(64, 512, 2.0), [64, 128, 256, 512]);
        assert_eq!(geometric_range(1, 4, 1.1), [1, 2, 3, 4]);
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let s = vec![
            Series { name: "a".into(), points: vec![(1.0, 1.0), (2.0, 3.0)] },
            Series { name: "b<".into(), points: vec![(1.0, 2.0), (4.0, 1.0)] },
        ];
        let svg = svg_line_chart("t", "n", "depth", &s, true);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("b&lt;"));
    }
}
