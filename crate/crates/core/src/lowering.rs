//! Rewriting to the {single-qubit, CX} basis and the metrics taken there.
//!
//! Supported inputs: X-type gates with at most two controls and unitary
//! gates with at most one control, any polarity. Open controls become X
//! conjugations. Metrics are computed by streaming the rewrite, so the
//! lowered circuit is never materialized.

use std::f64::consts::FRAC_PI_4;

use crate::circuit::{Circuit, DepthTracker, Gate, GateKind, Qubit};
use crate::ctrl_u::abc_factors;
use crate::linalg::{Mat2, C64};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ToffoliTemplate {
    /// Exact Toffoli: 6 CX and 9 single-qubit gates.
    #[default]
    Standard,
    /// 3-CX Toffoli up to a relative phase. Only sound where the phases
    /// provably cancel; never chosen by default.
    RelativePhase,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoweringOptions {
    pub toffoli: ToffoliTemplate,
}

/// Receiver of lowered operations.
trait Sink {
    fn one(&mut self, q: Qubit, m: impl FnOnce() -> Mat2);
    fn cx(&mut self, c: Qubit, t: Qubit);
}

struct GateSink(Vec<Gate>);

impl Sink for GateSink {
    fn one(&mut self, q: Qubit, m: impl FnOnce() -> Mat2) {
        self.0.push(Gate::unitary(m(), q));
    }
    fn cx(&mut self, c: Qubit, t: Qubit) {
        self.0.push(Gate::cx(c, t));
    }
}

/// Depth, CX count and single-qubit count of the lowered stream.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoweredMetrics {
    pub depth: usize,
    pub cx_count: usize,
    pub single_qubit_count: usize,
}

impl LoweredMetrics {
    pub fn total_gates(&self) -> usize {
        self.cx_count + self.single_qubit_count
    }
}

struct MetricSink {
    tracker: DepthTracker,
    cx: usize,
    single: usize,
}

impl Sink for MetricSink {
    fn one(&mut self, q: Qubit, _m: impl FnOnce() -> Mat2) {
        self.tracker.place(std::iter::once(q));
        self.single += 1;
    }
    fn cx(&mut self, c: Qubit, t: Qubit) {
        self.tracker.place([c, t].into_iter());
        self.cx += 1;
    }
}

fn hadamard() -> Mat2 {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Mat2::new(h, h, h, -h)
}

fn t_gate() -> Mat2 {
    Mat2::phase(FRAC_PI_4)
}

fn tdg_gate() -> Mat2 {
    Mat2::phase(-FRAC_PI_4)
}

fn toffoli<S: Sink>(a: Qubit, b: Qubit, t: Qubit, template: ToffoliTemplate, s: &mut S) {
    match template {
        ToffoliTemplate::Standard => {
            s.one(t, hadamard);
            s.cx(b, t);
            s.one(t, tdg_gate);
            s.cx(a, t);
            s.one(t, t_gate);
            s.cx(b, t);
            s.one(t, tdg_gate);
            s.cx(a, t);
            s.one(b, t_gate);
            s.one(t, t_gate);
            s.one(t, hadamard);
            s.cx(a, b);
            s.one(a, t_gate);
            s.one(b, tdg_gate);
            s.cx(a, b);
        }
        ToffoliTemplate::RelativePhase => {
            let ry = |th: f64| move || Mat2::ry(th);
            s.one(t, ry(FRAC_PI_4));
            s.cx(b, t);
            s.one(t, ry(FRAC_PI_4));
            s.cx(a, t);
            s.one(t, ry(-FRAC_PI_4));
            s.cx(b, t);
            s.one(t, ry(-FRAC_PI_4));
        }
    }
}

/// Singly-controlled `U`: `C`, CX, `B`, CX, `A` on the target and a phase
/// on the control carrying `det(U)^{1/2}`.
fn controlled_u<S: Sink>(u: &Mat2, c: Qubit, t: Qubit, s: &mut S) -> Result<()> {
    let delta = u.det().arg() / 2.0;
    let w = u.scale(C64::from_polar(1.0, -delta));
    let f = abc_factors(&w)?;
    s.one(t, || f.c);
    s.cx(c, t);
    s.one(t, || f.b);
    s.cx(c, t);
    s.one(t, || f.a);
    if delta != 0.0 {
        s.one(c, || Mat2::phase(delta));
    }
    Ok(())
}

fn lower_gate<S: Sink>(g: &Gate, opts: &LoweringOptions, s: &mut S) -> Result<()> {
    let open: Vec<Qubit> = g.controls.iter().filter(|c| c.is_open()).map(|c| c.qubit).collect();
    for &q in &open {
        s.one(q, Mat2::pauli_x);
    }
    let ctrl: Vec<Qubit> = g.controls.iter().map(|c| c.qubit).collect();
    match (&g.kind, ctrl.as_slice()) {
        (GateKind::X, []) => s.one(g.target, Mat2::pauli_x),
        (GateKind::X, &[c]) => s.cx(c, g.target),
        (GateKind::X, &[a, b]) => toffoli(a, b, g.target, opts.toffoli, s),
        (GateKind::Unitary(m), []) => s.one(g.target, || **m),
        (GateKind::Unitary(m), &[c]) => controlled_u(m, c, g.target, s)?,
        _ => {
            return Err(Error::UnsupportedGate(format!(
                "{} controls on a {} gate cannot be lowered directly",
                ctrl.len(),
                if g.is_x_type() { "X" } else { "unitary" }
            )))
        }
    }
    for &q in &open {
        s.one(q, Mat2::pauli_x);
    }
    Ok(())
}

/// X conjugation of the open controls around the closed-control version.
pub fn lower_open_controls(g: &Gate) -> Vec<Gate> {
    let open: Vec<Qubit> = g.controls.iter().filter(|c| c.is_open()).map(|c| c.qubit).collect();
    let mut closed = g.clone();
    for c in closed.controls.iter_mut() {
        c.polarity = crate::circuit::Polarity::Closed;
    }
    let mut out: Vec<Gate> = open.iter().map(|&q| Gate::x(q)).collect();
    out.push(closed);
    out.extend(open.iter().map(|&q| Gate::x(q)));
    out
}

pub fn lower(c: &Circuit) -> Result<Circuit> {
    lower_with(c, &LoweringOptions::default())
}

pub fn lower_with(c: &Circuit, opts: &LoweringOptions) -> Result<Circuit> {
    let mut sink = GateSink(Vec::new());
    for g in c.gates() {
        lower_gate(g, opts, &mut sink)?;
    }
    let mut out = Circuit::from_gates_unchecked(c.width(), sink.0);
    out.roles = c.roles.clone();
    Ok(out)
}

pub fn lowered_metrics(c: &Circuit) -> Result<LoweredMetrics> {
    lowered_metrics_with(c, &LoweringOptions::default())
}

pub fn lowered_metrics_with(c: &Circuit, opts: &LoweringOptions) -> Result<LoweredMetrics> {
    let mut sink = MetricSink { tracker: DepthTracker::new(c.width()), cx: 0, single: 0 };
    for g in c.gates() {
        lower_gate(g, opts, &mut sink)?;
    }
    Ok(LoweredMetrics { depth: sink.tracker.depth(), cx_count: sink.cx, single_qubit_count: sink.single })
}

pub fn lowered_depth(c: &Circuit) -> Result<usize> {
    Ok(lowered_metrics(c)?.depth)
}

pub fn cx_count(c: &Circuit) -> Result<usize> {
    Ok(lowered_metrics(c)?.cx_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Control;
    use crate::sim::{dense_unitary, spectral_distance};

    fn assert_same_unitary(a: &Circuit, b: &Circuit) {
        let d = spectral_distance(&dense_unitary(a).unwrap(), &dense_unitary(b).unwrap()).unwrap();
        assert!(d < 1e-12, "distance {d}");
    }

    #[test]
    fn toffoli_template_is_exact() {
        let c = Circuit::from_gates(3, vec![Gate::ccx(0, 1, 2)]).unwrap();
        let l = lower(&c).unwrap();
        assert_eq!(l.len(), 15);
        assert_eq!(cx_count(&c).unwrap(), 6);
        assert_same_unitary(&c, &l);
        assert_eq!(lowered_depth(&c).unwrap(), l.abstract_depth());
    }

    #[test]
    fn relative_phase_template_matches_up_to_phases() {
        let c = Circuit::from_gates(3, vec![Gate::ccx(0, 1, 2)]).unwrap();
        let opts = LoweringOptions { toffoli: ToffoliTemplate::RelativePhase };
        let l = lower_with(&c, &opts).unwrap();
        assert_eq!(lowered_metrics_with(&c, &opts).unwrap().cx_count, 3);
        let (u, v) = (dense_unitary(&c).unwrap(), dense_unitary(&l).unwrap());
        for i in 0..8 {
            for j in 0..8 {
                assert!((u[(i, j)].norm() - v[(i, j)].norm()).abs() < 1e-12);
            }
        }
        assert!(spectral_distance(&u, &v).unwrap() > 1e-3);
    }

    #[test]
    fn open_controls_and_small_gates() {
        let c = Circuit::from_gates(
            3,
            vec![
                Gate::mcx([Control::open(0), Control::closed(1)], 2),
                Gate::mcx([Control::open(2)], 0),
                Gate::x(1),
            ],
        )
        .unwrap();
        assert_same_unitary(&c, &lower(&c).unwrap());
        let parts = lower_open_controls(&c.gates()[0]);
        assert_eq!(parts.len(), 3);
        assert_same_unitary(&Circuit::from_gates(3, vec![c.gates()[0].clone()]).unwrap(), &Circuit::from_gates(3, parts).unwrap());
    }

    #[test]
    fn controlled_unitary_with_phase() {
        let u = Mat2::u3(0.7, 1.1, -0.4).scale(C64::from_polar(1.0, 0.3));
        for ctrl in [Control::closed(1), Control::open(1)] {
            let c = Circuit::from_gates(2, vec![Gate::controlled_unitary(u, [ctrl], 0)]).unwrap();
            let l = lower(&c).unwrap();
            assert_same_unitary(&c, &l);
            assert_eq!(l.gates().iter().filter(|g| g.num_controls() == 1).count(), 2);
        }
    }

    #[test]
    fn large_gates_are_rejected() {
        let c = Circuit::from_gates(4, vec![Gate::mcx_closed(&[0, 1, 2], 3)]).unwrap();
        assert!(matches!(lower(&c), Err(Error::UnsupportedGate(_))));
        assert!(lowered_depth(&c).is_err());
    }
}
