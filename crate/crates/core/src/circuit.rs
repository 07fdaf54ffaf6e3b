//! Circuit intermediate representation.
//!
//! A [`Circuit`] is a flat, ordered list of [`Gate`]s over a fixed-width
//! register. Layering is recomputed on demand; nothing is cached.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use smallvec::SmallVec;

use crate::linalg::Mat2;
use crate::{Error, Result};

/// Wire index within a circuit.
pub type Qubit = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    /// Active on `|1>`.
    Closed,
    /// Active on `|0>`.
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Control {
    pub qubit: Qubit,
    pub polarity: Polarity,
}

impl Control {
    pub fn closed(qubit: Qubit) -> Self {
        Control { qubit, polarity: Polarity::Closed }
    }

    pub fn open(qubit: Qubit) -> Self {
        Control { qubit, polarity: Polarity::Open }
    }

    pub fn is_open(&self) -> bool {
        self.polarity == Polarity::Open
    }
}

pub type Controls = SmallVec<[Control; 2]>;

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    /// Pauli X on the target, possibly multi-controlled.
    X,
    /// Arbitrary 2x2 unitary on the target, possibly controlled.
    Unitary(Box<Mat2>),
}

/// One circuit element. Controls are kept sorted by qubit index so that
/// structural equality does not depend on construction order.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub controls: Controls,
    pub target: Qubit,
    pub label: Option<Box<str>>,
}

impl Gate {
    pub fn x(target: Qubit) -> Self {
        Gate { kind: GateKind::X, controls: Controls::new(), target, label: None }
    }

    pub fn cx(control: Qubit, target: Qubit) -> Self {
        Self::mcx_closed(&[control], target)
    }

    pub fn ccx(c0: Qubit, c1: Qubit, target: Qubit) -> Self {
        Self::mcx_closed(&[c0, c1], target)
    }

    /// Multi-controlled X with all controls closed.
    pub fn mcx_closed(controls: &[Qubit], target: Qubit) -> Self {
        Self::mcx(controls.iter().map(|&q| Control::closed(q)), target)
    }

    pub fn mcx(controls: impl IntoIterator<Item = Control>, target: Qubit) -> Self {
        let mut controls: Controls = controls.into_iter().collect();
        controls.sort_unstable();
        Gate { kind: GateKind::X, controls, target, label: None }
    }

    pub fn unitary(matrix: Mat2, target: Qubit) -> Self {
        Gate { kind: GateKind::Unitary(Box::new(matrix)), controls: Controls::new(), target, label: None }
    }

    pub fn controlled_unitary(
        matrix: Mat2,
        controls: impl IntoIterator<Item = Control>,
        target: Qubit,
    ) -> Self {
        let mut controls: Controls = controls.into_iter().collect();
        controls.sort_unstable();
        Gate { kind: GateKind::Unitary(Box::new(matrix)), controls, target, label: None }
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn is_x_type(&self) -> bool {
        matches!(self.kind, GateKind::X)
    }

    pub fn matrix(&self) -> Option<&Mat2> {
        match &self.kind {
            GateKind::X => None,
            GateKind::Unitary(m) => Some(m),
        }
    }

    pub fn num_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn has_open_controls(&self) -> bool {
        self.controls.iter().any(Control::is_open)
    }

    /// Control qubits followed by the target.
    pub fn qubits(&self) -> impl Iterator<Item = Qubit> + Clone + '_ {
        self.controls.iter().map(|c| c.qubit).chain(std::iter::once(self.target))
    }

    pub fn touches(&self, q: Qubit) -> bool {
        self.target == q || self.controls.iter().any(|c| c.qubit == q)
    }

    /// The set of wires the gate acts on.
    pub fn support(&self) -> BTreeSet<Qubit> {
        self.qubits().collect()
    }

    /// The inverse gate. X-type gates are self-inverse; unitary payloads are
    /// replaced by their adjoint.
    pub fn inverse(&self) -> Gate {
        match &self.kind {
            GateKind::X => self.clone(),
            GateKind::Unitary(m) => Gate { kind: GateKind::Unitary(Box::new(m.adjoint())), ..self.clone() },
        }
    }

    /// Structural equality ignoring the label.
    pub fn same_action(&self, other: &Gate) -> bool {
        self.target == other.target && self.controls == other.controls && self.kind == other.kind
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= width {
                return Err(Error::QubitOutOfRange { qubit: q, width });
            }
        }
        for (i, c) in self.controls.iter().enumerate() {
            if c.qubit == self.target {
                return Err(Error::DuplicateQubit(c.qubit));
            }
            if self.controls[..i].iter().any(|d| d.qubit == c.qubit) {
                return Err(Error::DuplicateQubit(c.qubit));
            }
        }
        if let GateKind::Unitary(m) = &self.kind {
            if !m.is_unitary(1e-12) {
                return Err(Error::Domain(format!("gate matrix is not unitary: {m:?}")));
            }
        }
        Ok(())
    }
}

/// Named register roles of a synthesized circuit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Roles {
    pub controls: Vec<Qubit>,
    pub target: Option<Qubit>,
    pub ancilla: Vec<Qubit>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    pub roles: Roles,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit { width, gates: Vec::new(), roles: Roles::default() }
    }

    pub fn from_gates(width: usize, gates: Vec<Gate>) -> Result<Self> {
        let c = Circuit { width, gates, roles: Roles::default() };
        c.validate()?;
        Ok(c)
    }

    /// Skips validation; callers guarantee the gates are in range.
    pub(crate) fn from_gates_unchecked(width: usize, gates: Vec<Gate>) -> Self {
        Circuit { width, gates, roles: Roles::default() }
    }

    /// The `C^nX` register layout: controls `0..n`, target `n`, ancilla `n+1`.
    pub fn with_mcx_roles(mut self, n: usize) -> Self {
        self.roles = Roles { controls: (0..n).collect(), target: Some(n), ancilla: vec![n + 1] };
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Returns a new circuit with `gate` appended.
    pub fn append(&self, gate: Gate) -> Result<Circuit> {
        let mut c = self.clone();
        c.push(gate)?;
        Ok(c)
    }

    /// Concatenation `self` then `other`.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit> {
        if self.width != other.width {
            return Err(Error::WidthMismatch { left: self.width, right: other.width });
        }
        let mut gates = Vec::with_capacity(self.gates.len() + other.gates.len());
        gates.extend_from_slice(&self.gates);
        gates.extend_from_slice(&other.gates);
        Ok(Circuit { width: self.width, gates, roles: self.roles.clone() })
    }

    /// Gates reversed, each replaced by its inverse.
    pub fn invert(&self) -> Circuit {
        let gates = self.gates.iter().rev().map(Gate::inverse).collect();
        Circuit { width: self.width, gates, roles: self.roles.clone() }
    }

    pub fn is_x_type(&self) -> bool {
        self.gates.iter().all(Gate::is_x_type)
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            g.validate(self.width)?;
        }
        let r = &self.roles;
        let mut seen = BTreeSet::new();
        for &q in r.controls.iter().chain(r.target.iter()).chain(r.ancilla.iter()) {
            if q >= self.width {
                return Err(Error::QubitOutOfRange { qubit: q, width: self.width });
            }
            if !seen.insert(q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// Greedy as-soon-as-possible layering where every gate occupies one
    /// layer on each wire of its support.
    pub fn abstract_depth(&self) -> usize {
        let mut tracker = DepthTracker::new(self.width);
        for g in &self.gates {
            tracker.place(g.qubits());
        }
        tracker.depth()
    }

    /// ASAP layer index (0-based) of every gate.
    pub fn layers(&self) -> Vec<usize> {
        let mut tracker = DepthTracker::new(self.width);
        self.gates.iter().map(|g| tracker.place(g.qubits()) - 1).collect()
    }

    /// Histogram of gates by control count.
    pub fn control_histogram(&self) -> Vec<usize> {
        let mut h = Vec::new();
        for g in &self.gates {
            let k = g.num_controls();
            if h.len() <= k {
                h.resize(k + 1, 0);
            }
            h[k] += 1;
        }
        h
    }

    /// Text export in an OpenQASM 3 subset.
    pub fn to_qasm(&self) -> String {
        let mut out = String::new();
        out.push_str("OPENQASM 3.0;\ninclude \"stdgates.inc\";\n");
        let _ = writeln!(out, "qubit[{}] q;", self.width);
        for g in &self.gates {
            out.push_str(&gate_qasm(g));
            out.push('\n');
        }
        out
    }
}

fn gate_qasm(g: &Gate) -> String {
    let mut s = String::new();
    if let Some(label) = &g.label {
        let _ = write!(s, "// {label}\n");
    }
    let all_closed = !g.has_open_controls();
    let base = match &g.kind {
        GateKind::X => match (g.num_controls(), all_closed) {
            (0, _) => "x".to_string(),
            (1, true) => "cx".to_string(),
            (2, true) => "ccx".to_string(),
            _ => modifiers(g) + "x",
        },
        GateKind::Unitary(m) => {
            let (t, p, l, _) = m.to_u3();
            // adding 0.0 turns -0.0 into 0.0
            let (t, p, l) = (t + 0.0, p + 0.0, l + 0.0);
            let u = format!("u({t:.15}, {p:.15}, {l:.15})");
            if g.controls.is_empty() {
                u
            } else {
                modifiers(g) + &u
            }
        }
    };
    s.push_str(&base);
    s.push(' ');
    let args: Vec<String> = g.qubits().map(|q| format!("q[{q}]")).collect();
    s.push_str(&args.join(", "));
    s.push(';');
    s
}

/// Groups consecutive equal polarities into `ctrl(k) @` / `negctrl(k) @`.
fn modifiers(g: &Gate) -> String {
    let mut s = String::new();
    let mut i = 0;
    let cs = &g.controls;
    while i < cs.len() {
        let pol = cs[i].polarity;
        let mut j = i;
        while j < cs.len() && cs[j].polarity == pol {
            j += 1;
        }
        let k = j - i;
        let name = if pol == Polarity::Open { "negctrl" } else { "ctrl" };
        if k == 1 {
            let _ = write!(s, "{name} @ ");
        } else {
            let _ = write!(s, "{name}({k}) @ ");
        }
        i = j;
    }
    s
}

/// Per-wire frontier used for ASAP layering of streamed gates.
#[derive(Clone, Debug)]
pub struct DepthTracker {
    frontier: Vec<usize>,
    depth: usize,
}

impl DepthTracker {
    pub fn new(width: usize) -> Self {
        DepthTracker { frontier: vec![0; width], depth: 0 }
    }

    /// Places a gate on `qubits` and returns its 1-based layer.
    pub fn place(&mut self, qubits: impl Iterator<Item = Qubit> + Clone) -> usize {
        let layer = qubits.clone().map(|q| self.frontier[q]).max().unwrap_or(0) + 1;
        for q in qubits {
            self.frontier[q] = layer;
        }
        self.depth = self.depth.max(layer);
        layer
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_of_gates() {
        assert_eq!(Gate::ccx(0, 1, 2).support(), [0, 1, 2].into());
        assert_eq!(Gate::x(5).support(), [5].into());
        let cu = Gate::controlled_unitary(Mat2::ry(0.3), [Control::closed(3)], 0);
        assert_eq!(cu.support(), [0, 3].into());
    }

    #[test]
    fn invert_reverses_and_adjoints() {
        let c = Circuit::from_gates(2, vec![Gate::x(0), Gate::cx(0, 1)]).unwrap();
        assert_eq!(c.invert().gates(), &[Gate::cx(0, 1), Gate::x(0)]);
        assert!(Circuit::new(3).invert().is_empty());

        let m = Mat2::u3(0.4, 1.0, -0.2);
        let c = Circuit::from_gates(1, vec![Gate::unitary(m, 0)]).unwrap();
        assert_eq!(c.invert().gates()[0].matrix().unwrap(), &m.adjoint());
        assert_eq!(c.invert().invert(), c);
    }

    #[test]
    fn abstract_depth_examples() {
        let c = Circuit::from_gates(4, vec![Gate::cx(0, 1), Gate::cx(2, 3)]).unwrap();
        assert_eq!(c.abstract_depth(), 1);
        let c = Circuit::from_gates(3, vec![Gate::cx(0, 1), Gate::cx(1, 2)]).unwrap();
        assert_eq!(c.abstract_depth(), 2);
        let ctrl: Vec<_> = (0..8).collect();
        let c = Circuit::from_gates(
            10,
            vec![Gate::mcx_closed(&ctrl, 8), Gate::x(9), Gate::mcx_closed(&ctrl, 8)],
        )
        .unwrap();
        assert_eq!(c.abstract_depth(), 2);
        assert_eq!(Circuit::new(4).abstract_depth(), 0);
    }

    #[test]
    fn compose_and_append() {
        let a = Circuit::from_gates(4, vec![Gate::cx(0, 1)]).unwrap();
        let b = Circuit::from_gates(4, vec![Gate::cx(2, 3)]).unwrap();
        assert_eq!(a.compose(&Circuit::new(4)).unwrap(), a);
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.abstract_depth(), 1);
        assert!(ab.abstract_depth() <= a.abstract_depth() + b.abstract_depth());
        assert!(matches!(a.compose(&Circuit::new(3)), Err(Error::WidthMismatch { .. })));

        let x = Circuit::from_gates(1, vec![Gate::x(0)]).unwrap();
        assert_eq!(x.compose(&x).unwrap().gates(), &[Gate::x(0), Gate::x(0)]);
        assert_eq!(Circuit::new(1).append(Gate::x(0)).unwrap(), x);
    }

    #[test]
    fn validation_rejects_bad_gates() {
        let mut c = Circuit::new(3);
        assert!(matches!(c.push(Gate::cx(0, 3)), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(c.push(Gate::cx(1, 1)), Err(Error::DuplicateQubit(1))));
        assert!(matches!(c.push(Gate::ccx(0, 0, 1)), Err(Error::DuplicateQubit(0))));
        let bad = Mat2::identity().scale(crate::linalg::C64::new(2.0, 0.0));
        assert!(matches!(c.push(Gate::unitary(bad, 0)), Err(Error::Domain(_))));
    }

    #[test]
    fn controls_are_canonicalized() {
        assert_eq!(Gate::mcx_closed(&[3, 1, 2], 0), Gate::mcx_closed(&[1, 2, 3], 0));
    }

    #[test]
    fn qasm_export() {
        let g = Gate::mcx([Control::open(0), Control::open(1), Control::closed(2)], 3);
        let c = Circuit::from_gates(
            5,
            vec![Gate::x(0), Gate::cx(0, 1), Gate::ccx(0, 1, 2), Gate::mcx_closed(&[0, 1, 2], 4), g],
        )
        .unwrap();
        let q = c.to_qasm();
        assert!(q.contains("qubit[5] q;"));
        assert!(q.contains("x q[0];"));
        assert!(q.contains("cx q[0], q[1];"));
        assert!(q.contains("ccx q[0], q[1], q[2];"));
        assert!(q.contains("ctrl(3) @ x q[0], q[1], q[2], q[4];"));
        assert!(q.contains("negctrl(2) @ ctrl @ x q[0], q[1], q[2], q[3];"));
        let u = Circuit::from_gates(1, vec![Gate::unitary(Mat2::ry(0.5), 0)]).unwrap();
        assert!(u.to_qasm().contains("u(0.500000000000000, 0.000000000000000, 0.000000000000000) q[0];"));
    }
}
