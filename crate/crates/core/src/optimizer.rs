//! Peephole cancellation of self-inverse X-type gate pairs.
//!
//! A gate cancels against an earlier identical gate when every live gate in
//! between that shares a wire with it commutes with it. Passes repeat until
//! nothing changes.

use crate::circuit::{Circuit, Gate, Qubit};

/// Maximum number of live gates inspected while looking back for a partner.
pub const LOOKBACK_WINDOW: usize = 4096;

/// Whether two gates commute, decided conservatively from their structure.
///
/// Two X-type gates commute when they flip the same target (both are
/// conditional flips of one wire whose conditions read other wires), or when
/// neither target is read or written by the other gate. Anything involving a
/// unitary payload is reported as non-commuting.
pub fn commutes(a: &Gate, b: &Gate) -> bool {
    if !a.is_x_type() || !b.is_x_type() {
        return false;
    }
    if a.target == b.target {
        return true;
    }
    !b.touches(a.target) && !a.touches(b.target)
}

/// Per-wire ordered chains of gate indices.
#[derive(Clone, Debug, Default)]
pub struct DependencyView {
    chains: Vec<Vec<usize>>,
}

impl DependencyView {
    pub fn new(width: usize) -> Self {
        DependencyView { chains: vec![Vec::new(); width] }
    }

    pub fn from_gates(width: usize, gates: &[Gate]) -> Self {
        let mut v = Self::new(width);
        for (i, g) in gates.iter().enumerate() {
            v.push(i, g);
        }
        v
    }

    pub fn push(&mut self, index: usize, gate: &Gate) {
        for q in gate.qubits() {
            self.chains[q].push(index);
        }
    }

    pub fn chain(&self, q: Qubit) -> &[usize] {
        &self.chains[q]
    }

    /// Walks, newest first, the distinct indices found on any of `qubits`.
    fn walk_back<'a>(&'a self, qubits: &[Qubit]) -> impl Iterator<Item = usize> + 'a {
        let mut cursors: Vec<(&'a [usize], usize)> =
            qubits.iter().map(|&q| (self.chains[q].as_slice(), self.chains[q].len())).collect();
        std::iter::from_fn(move || {
            let next = cursors.iter().filter(|(_, pos)| *pos > 0).map(|(c, pos)| c[*pos - 1]).max()?;
            for (c, pos) in cursors.iter_mut() {
                if *pos > 0 && c[*pos - 1] == next {
                    *pos -= 1;
                }
            }
            Some(next)
        })
    }
}

/// Anything that carries a gate; lets synthesis annotate gates with
/// bookkeeping while still running them through the optimizer.
pub trait HasGate {
    fn gate(&self) -> &Gate;
}

impl HasGate for Gate {
    fn gate(&self) -> &Gate {
        self
    }
}

/// One left-to-right pass; returns the survivors and the number of pairs removed.
fn cancel_pass<T: HasGate>(width: usize, items: Vec<T>) -> (Vec<T>, usize) {
    let mut out: Vec<Option<T>> = Vec::with_capacity(items.len());
    let mut view = DependencyView::new(width);
    let mut removed = 0;
    let mut qubits = Vec::new();
    for item in items {
        let g = item.gate();
        let mut partner = None;
        if g.is_x_type() {
            qubits.clear();
            qubits.extend(g.qubits());
            let mut inspected = 0;
            for idx in view.walk_back(&qubits) {
                let Some(h) = &out[idx] else { continue };
                let h = h.gate();
                if h.same_action(g) {
                    partner = Some(idx);
                    break;
                }
                inspected += 1;
                if !commutes(h, g) || inspected >= LOOKBACK_WINDOW {
                    break;
                }
            }
        }
        match partner {
            Some(idx) => {
                out[idx] = None;
                removed += 1;
            }
            None => {
                view.push(out.len(), g);
                out.push(Some(item));
            }
        }
    }
    (out.into_iter().flatten().collect(), removed)
}

/// Cancels identical X-type pairs that can be brought together through
/// commuting neighbours, repeating until a pass removes nothing.
pub fn cancel_items<T: HasGate>(width: usize, mut items: Vec<T>) -> Vec<T> {
    loop {
        let (next, removed) = cancel_pass(width, items);
        items = next;
        if removed == 0 {
            return items;
        }
    }
}

/// Runs [`cancel_items`] on a circuit.
pub fn cancel(c: &Circuit) -> Circuit {
    let gates = cancel_items(c.width(), c.gates().to_vec());
    let mut out = Circuit::from_gates_unchecked(c.width(), gates);
    out.roles = c.roles.clone();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Control;
    use crate::linalg::Mat2;

    #[test]
    fn commutation_examples() {
        assert!(commutes(&Gate::ccx(0, 1, 3), &Gate::ccx(0, 1, 4)));
        assert!(!commutes(&Gate::ccx(0, 1, 3), &Gate::cx(3, 4)));
        assert!(commutes(&Gate::ccx(0, 1, 2), &Gate::ccx(0, 1, 2)));
        assert!(commutes(&Gate::cx(0, 2), &Gate::mcx([Control::open(1)], 2)));
        let u = Gate::unitary(Mat2::ry(0.1), 5);
        assert!(!commutes(&u, &Gate::x(0)));
    }

    #[test]
    fn cancel_examples() {
        let c = Circuit::from_gates(1, vec![Gate::x(0), Gate::x(0)]).unwrap();
        assert!(cancel(&c).is_empty());

        let c = Circuit::from_gates(4, vec![Gate::ccx(1, 2, 0), Gate::x(3), Gate::ccx(1, 2, 0)]).unwrap();
        assert_eq!(cancel(&c).gates(), &[Gate::x(3)]);

        let c = Circuit::from_gates(4, vec![Gate::ccx(1, 2, 0), Gate::x(1), Gate::ccx(1, 2, 0)]).unwrap();
        assert_eq!(cancel(&c), c);
    }

    #[test]
    fn nested_pairs_collapse() {
        let c = Circuit::from_gates(
            3,
            vec![Gate::cx(0, 1), Gate::cx(1, 2), Gate::x(0), Gate::x(0), Gate::cx(1, 2), Gate::cx(0, 1)],
        )
        .unwrap();
        assert!(cancel(&c).is_empty());
    }

    #[test]
    fn cancel_is_idempotent() {
        let c = Circuit::from_gates(
            4,
            vec![Gate::cx(0, 1), Gate::ccx(0, 2, 3), Gate::cx(1, 2), Gate::ccx(0, 2, 3), Gate::cx(0, 1)],
        )
        .unwrap();
        let once = cancel(&c);
        assert_eq!(cancel(&once), once);
    }

    #[test]
    fn unitaries_block_and_never_cancel() {
        let u = Gate::unitary(Mat2::ry(0.4), 0);
        let c = Circuit::from_gates(2, vec![u.clone(), u.clone()]).unwrap();
        assert_eq!(cancel(&c).len(), 2);
        let c = Circuit::from_gates(2, vec![Gate::cx(0, 1), u, Gate::cx(0, 1)]).unwrap();
        assert_eq!(cancel(&c).len(), 3);
    }

    #[test]
    fn polarity_distinguishes_gates() {
        let a = Gate::mcx([Control::open(0)], 1);
        let b = Gate::cx(0, 1);
        let c = Circuit::from_gates(2, vec![a, b]).unwrap();
        assert_eq!(cancel(&c).len(), 2);
    }
}
