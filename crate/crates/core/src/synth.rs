//! `C^nX` synthesis with one borrowed ancilla.
//!
//! Register convention for the public generators: controls `0..n`, target
//! `n`, borrowed ancilla `n+1`.
//!
//! The recursive constructions split the controls with a [`PartitionPlan`]
//! and rewrite one `C^nX` into a gadget of smaller multi-controlled gates:
//!
//! ```text
//! A  B1  X C X  B2  A  B3  X C X  B4
//! ```
//!
//! where `A = C^{2p}X(R0 -> anc)`, each `Bj` is a column of parallel
//! `C^pX(Ri -> R0*[i])`, and `C` flips the target when the ancilla is set and
//! every `R0*` wire is zero (the X layers realize the open controls). The
//! gadget is expanded level by level; every sub-gate carries the wire it may
//! borrow and an orientation flag. In the optimized variant the 1st and 3rd
//! `B` columns are expanded reversed so that, after the next level of
//! expansion, the boundary sub-gates of neighbouring columns meet their
//! mirror images and cancel.

use std::fmt;
use std::str::FromStr;

use crate::circuit::{Circuit, Gate, Qubit};
use crate::critical::{kind_of, BlockChoice, CriticalTable, How, Witness};
use crate::optimizer::{cancel_items, HasGate};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Linear,
    RecursiveOriginal,
    RecursiveOptimized,
    Auto,
}

impl Method {
    pub const ALL: [Method; 4] =
        [Method::Linear, Method::RecursiveOriginal, Method::RecursiveOptimized, Method::Auto];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::RecursiveOriginal => "original",
            Method::RecursiveOptimized => "optimized",
            Method::Auto => "auto",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Method::Linear),
            "original" | "recursive_original" | "recursive-original" => Ok(Method::RecursiveOriginal),
            "optimized" | "recursive_optimized" | "recursive-optimized" => Ok(Method::RecursiveOptimized),
            "auto" => Ok(Method::Auto),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrientationRule {
    /// Every sub-gate is expanded in its natural orientation.
    None,
    /// The 1st and 3rd parallel columns of each gadget are reversed.
    FirstAndThirdReversed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthesisConfig {
    pub method: Method,
    /// Gates with at most this many controls use the linear construction.
    pub base_threshold: usize,
    /// `Auto` uses the linear construction up to this many controls.
    pub linear_cutover: usize,
    pub optimize_cancellation: bool,
    pub orientation_rule: OrientationRule,
}

pub const DEFAULT_BASE_THRESHOLD: usize = 26;
pub const DEFAULT_LINEAR_CUTOVER: usize = 51;
/// Base threshold of the unoptimized recursive baseline.
pub const ORIGINAL_BASE_THRESHOLD: usize = 30;

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            method: Method::Auto,
            base_threshold: DEFAULT_BASE_THRESHOLD,
            linear_cutover: DEFAULT_LINEAR_CUTOVER,
            optimize_cancellation: true,
            orientation_rule: OrientationRule::FirstAndThirdReversed,
        }
    }
}

impl SynthesisConfig {
    pub fn with_method(method: Method) -> Self {
        let mut cfg = SynthesisConfig { method, ..Default::default() };
        if method == Method::RecursiveOriginal {
            cfg.base_threshold = ORIGINAL_BASE_THRESHOLD;
        }
        cfg
    }

    pub fn base_threshold(mut self, t: usize) -> Self {
        self.base_threshold = t;
        self
    }

    pub fn linear_cutover(mut self, c: usize) -> Self {
        self.linear_cutover = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_threshold < 3 {
            return Err(Error::Config(format!("base threshold must be >= 3, got {}", self.base_threshold)));
        }
        if self.linear_cutover < self.base_threshold {
            return Err(Error::Config(format!(
                "linear cutover {} is below base threshold {}",
                self.linear_cutover, self.base_threshold
            )));
        }
        Ok(())
    }
}

/// Split of `n` control positions into `R0` (split into `R0*` and `R0^b`)
/// and the groups `R1..Rb`. Entries are positions `0..n` in the control list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionPlan {
    pub n: usize,
    pub p: usize,
    pub r0: Vec<usize>,
    pub r0_star: Vec<usize>,
    pub r0_b: Vec<usize>,
    pub groups: Vec<Vec<usize>>,
    pub b: usize,
    pub r: usize,
}

impl PartitionPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::Domain(format!("partition needs at least 4 controls, got {n}")));
        }
        let p = n.isqrt();
        let rest = n - 2 * p;
        let b = rest.div_ceil(p);
        let r = rest % p;
        let r0: Vec<usize> = (0..2 * p).collect();
        let r0_star = r0[..b].to_vec();
        let r0_b = r0[b..].to_vec();
        let groups = (2 * p..n).collect::<Vec<_>>().chunks(p).map(<[usize]>::to_vec).collect();
        Ok(PartitionPlan { n, p, r0, r0_star, r0_b, groups, b, r })
    }

    /// The gadget applies only when at least one full group exists.
    pub fn is_recursive(&self) -> bool {
        self.n - 2 * self.p >= self.p
    }

    /// Size of the largest group (`p` whenever the gadget applies).
    pub fn max_group(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn check_invariants(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(format!("partition of {}: {m}", self.n)));
        if self.r0.len() != 2 * self.p {
            return bad("|R0| != 2p");
        }
        if self.b + 2 < self.p || self.b > self.p {
            return bad("b outside [p-2, p]");
        }
        if self.r0_b.len() < self.b {
            return bad("not enough borrowed wires in R0^b");
        }
        let covered: usize = self.groups.iter().map(Vec::len).sum();
        if covered + 2 * self.p != self.n || self.groups.len() != self.b {
            return bad("groups do not cover R \\ R0");
        }
        for (i, g) in self.groups.iter().enumerate() {
            let want = if i + 1 == self.b && self.r > 0 { self.r } else { self.p };
            if g.len() != want {
                return bad("group size");
            }
        }
        Ok(())
    }
}

/// Convenience wrapper matching the free-function form.
pub fn partition(n: usize) -> Result<PartitionPlan> {
    PartitionPlan::new(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Orient {
    Natural,
    Reversed,
}

impl Orient {
    fn flip(self) -> Self {
        match self {
            Orient::Natural => Orient::Reversed,
            Orient::Reversed => Orient::Natural,
        }
    }
}

/// A multi-controlled gate awaiting expansion.
#[derive(Clone, Debug)]
pub(crate) struct Pending {
    pub gate: Gate,
    /// Controls in logical order; partitions and ladders follow this order.
    pub order: Vec<Qubit>,
    pub borrowed: Option<Qubit>,
    pub orient: Orient,
    /// Which column of the outermost gadget this gate descends from
    /// (1..=4 for the parallel columns, 0 otherwise).
    pub origin: u8,
    /// Wires on which a full-length chain of the natural expansion must
    /// start and end.
    pub request: Option<(Qubit, Qubit)>,
}

impl HasGate for Pending {
    fn gate(&self) -> &Gate {
        &self.gate
    }
}

impl Pending {
    fn new(order: Vec<Qubit>, target: Qubit, borrowed: Option<Qubit>, origin: u8) -> Self {
        Pending {
            gate: Gate::mcx_closed(&order, target),
            order,
            borrowed,
            orient: Orient::Natural,
            origin,
            request: None,
        }
    }

    fn flip_gate(q: Qubit, origin: u8) -> Self {
        Pending { gate: Gate::x(q), order: Vec::new(), borrowed: None, orient: Orient::Natural, origin, request: None }
    }
}

/// Emits the Toffoli ladder for `C^mX(controls -> target)` using the dirty
/// wires `work` (at least `m - 2` of them). The ladder is a single chain of
/// gates, each sharing a wire with the next.
fn ladder(controls: &[Qubit], target: Qubit, work: &[Qubit], top_first: bool, out: &mut Vec<Gate>) {
    let m = controls.len();
    match m {
        0 => out.push(Gate::x(target)),
        1 => out.push(Gate::cx(controls[0], target)),
        2 => out.push(Gate::ccx(controls[0], controls[1], target)),
        _ => {
            debug_assert!(work.len() >= m - 2);
            let top = Gate::ccx(controls[m - 1], work[m - 3], target);
            let mut sweep = Vec::with_capacity(2 * m - 5);
            for j in (2..=m - 2).rev() {
                sweep.push(Gate::ccx(controls[j], work[j - 2], work[j - 1]));
            }
            sweep.push(Gate::ccx(controls[0], controls[1], work[0]));
            for j in 2..=m - 2 {
                sweep.push(Gate::ccx(controls[j], work[j - 2], work[j - 1]));
            }
            for _ in 0..2 {
                if top_first {
                    out.push(top.clone());
                    out.extend(sweep.iter().cloned());
                } else {
                    out.extend(sweep.iter().cloned());
                    out.push(top.clone());
                }
            }
        }
    }
}

/// Linear-depth `C^kX` over closed `controls` with one borrowed wire.
///
/// The controls are split into halves `g1`, `g2`; `C^{|g1|}X(g1 -> anc)`
/// and `C^{|g2|+1}X(g2 + anc -> target)` are applied twice each, every
/// ladder borrowing its work wires from the opposite half. Work wires are
/// assigned so that consecutive ladders share a wire: the whole circuit is
/// one chain that starts on the ancilla and ends on the target.
pub(crate) fn linear_chain(controls: &[Qubit], target: Qubit, borrowed: Option<Qubit>, out: &mut Vec<Gate>) {
    let k = controls.len();
    if k <= 2 {
        ladder(controls, target, &[], false, out);
        return;
    }
    let anc = borrowed.expect("C^kX with k >= 3 needs a borrowed wire");
    if k == 3 {
        ladder(controls, target, &[anc], false, out);
        return;
    }
    let k1 = k.div_ceil(2);
    let (g1, g2) = controls.split_at(k1);
    let (m1, m2) = (k1, k - k1 + 1);
    // the control shared by the last gate of the upper ladder and the
    // first gate of the lower one
    let link = if m1 >= 4 { g1[m1 - 2] } else { g1[0] };
    let mut upper = Vec::new();
    ladder(g1, anc, &g2[..m1.saturating_sub(2)], true, &mut upper);
    let mut lower_ctrl = g2.to_vec();
    lower_ctrl.push(anc);
    let mut lower_work: Vec<Qubit> = g1.iter().copied().filter(|&q| q != link).take(m2 - 3).collect();
    lower_work.push(link);
    let mut lower = Vec::new();
    ladder(&lower_ctrl, target, &lower_work, false, &mut lower);
    for _ in 0..2 {
        out.extend(upper.iter().cloned());
        out.extend(lower.iter().cloned());
    }
}

impl Pending {
    /// Canonical name of a wire of this gate.
    fn canonical(&self, q: Qubit) -> Option<u32> {
        let k = self.order.len() as u32;
        if let Some(i) = self.order.iter().position(|&c| c == q) {
            Some(i as u32)
        } else if q == self.gate.target {
            Some(k)
        } else if Some(q) == self.borrowed {
            Some(k + 1)
        } else {
            None
        }
    }

    /// Wire with canonical name `c`.
    fn wire(&self, c: u32) -> Qubit {
        let k = self.order.len() as u32;
        match c {
            c if c < k => self.order[c as usize],
            c if c == k => self.gate.target,
            _ => self.borrowed.expect("borrowed wire"),
        }
    }

    /// Reorders the logical controls so that each `(wire, slot)` control
    /// lands in its slot; the others keep their relative order.
    fn place_controls(&mut self, fixed: &[(Qubit, u32)]) {
        let k = self.order.len();
        let mut slots: Vec<Option<Qubit>> = vec![None; k];
        for &(q, c) in fixed {
            if (c as usize) < k && self.order.contains(&q) {
                slots[c as usize] = Some(q);
            }
        }
        let mut rest: Vec<Qubit> = self.order.iter().copied().filter(|q| !slots.contains(&Some(*q))).collect();
        rest.reverse();
        self.order = slots.into_iter().map(|s| s.unwrap_or_else(|| rest.pop().unwrap())).collect();
    }
}

/// Resolves the pending request to an expansion recipe. Mirrored requests
/// flip the orientation and swap the ends; the controls are then permuted
/// so the requested wires sit where the recipe's chain starts and ends.
fn resolve(p: &mut Pending, table: &mut CriticalTable) -> Option<How> {
    let (qa, qz) = p.request?;
    let k = p.order.len() as u32;
    let (ca, cz) = (p.canonical(qa)?, p.canonical(qz)?);
    let mut kind = kind_of(k, (ca, cz));
    let entry = table.entry(p.order.len());
    let (mut qa, mut qz) = (qa, qz);
    if let Witness::Mirror = entry.kinds.get(&kind)? {
        kind = kind.swapped();
        std::mem::swap(&mut qa, &mut qz);
        p.orient = p.orient.flip();
        p.request = Some((qa, qz));
    }
    let Witness::Direct { pair: (ra, rz), how } = entry.kinds.get(&kind)? else { return None };
    let how = how.clone();
    p.place_controls(&[(qa, *ra), (qz, *rz)]);
    Some(how)
}

/// Expands a gate through the linear construction; open controls are
/// conjugated with X.
fn linear_expand(p: &Pending, out: &mut Vec<Gate>) {
    let g = &p.gate;
    let start = out.len();
    if g.num_controls() <= 2 {
        out.push(g.clone());
    } else {
        let open: Vec<Qubit> = g.controls.iter().filter(|c| c.is_open()).map(|c| c.qubit).collect();
        out.extend(open.iter().map(|&q| Gate::x(q)));
        if g.is_x_type() && !p.order.is_empty() {
            linear_chain(&p.order, g.target, p.borrowed, out);
        } else {
            let mut closed = g.clone();
            closed.controls.iter_mut().for_each(|c| c.polarity = crate::circuit::Polarity::Closed);
            out.push(closed);
        }
        out.extend(open.iter().map(|&q| Gate::x(q)));
    }
    if p.orient == Orient::Reversed {
        out[start..].reverse();
    }
}

fn expandable(p: &Pending, threshold: usize) -> bool {
    let k = p.gate.num_controls();
    p.gate.is_x_type()
        && k > threshold
        && p.borrowed.is_some()
        && PartitionPlan::new(k).map(|plan| plan.is_recursive()).unwrap_or(false)
}

/// Block positions of the four parallel columns in the natural gadget.
const COLUMN_BLOCKS: [usize; 4] = [1, 5, 7, 11];

/// One level of the recursive rewrite of `p`. `choices` assigns chain
/// requests to the sub-gates of each of the 12 blocks.
fn gadget(p: &Pending, rule: OrientationRule, top_level: bool, choices: Option<&[BlockChoice; 12]>, out: &mut Vec<Pending>) {
    let g = &p.gate;
    let start = out.len();
    let inherit = |origin: u8| if top_level { origin } else { p.origin };
    let open: Vec<Qubit> = g.controls.iter().filter(|c| c.is_open()).map(|c| c.qubit).collect();
    let ctrl = &p.order;
    let t = g.target;
    let anc = p.borrowed.expect("expandable gates carry a borrowed wire");
    let plan = PartitionPlan::new(ctrl.len()).expect("expandable");
    let at = |idx: &[usize]| idx.iter().map(|&i| ctrl[i]).collect::<Vec<_>>();
    let r0 = at(&plan.r0);
    let r0_star = at(&plan.r0_star);
    let r0_b = at(&plan.r0_b);
    let groups: Vec<Vec<Qubit>> = plan.groups.iter().map(|gr| at(gr)).collect();
    let request_for = |block: usize, instance: usize| {
        choices.and_then(|c| {
            let ch = c[block];
            (ch.instance as usize == instance).then(|| (p.wire(ch.ends.0), p.wire(ch.ends.1)))
        })
    };

    let flip_ops = |out: &mut Vec<Pending>, qs: &[Qubit]| {
        out.extend(qs.iter().map(|&q| Pending::flip_gate(q, inherit(0))));
    };
    flip_ops(out, &open);

    let mut c_ctrl = r0_star.clone();
    c_ctrl.push(anc);
    let column = |out: &mut Vec<Pending>, j: u8| {
        let orient = match (rule, j) {
            (OrientationRule::FirstAndThirdReversed, 1 | 3) => Orient::Reversed,
            _ => Orient::Natural,
        };
        let block = COLUMN_BLOCKS[j as usize - 1];
        for (i, gr) in groups.iter().enumerate() {
            let mut b = Pending::new(gr.clone(), r0_star[i], Some(r0_b[i]), inherit(j));
            b.orient = orient;
            b.request = request_for(block, i);
            out.push(b);
        }
    };

    for half in 0..2u8 {
        let base = 6 * half as usize;
        let mut a = Pending::new(r0.clone(), anc, Some(t), inherit(0));
        a.request = request_for(base, 0);
        out.push(a);
        column(out, 1 + 2 * half);
        flip_ops(out, &r0_star);
        let mut c = Pending::new(c_ctrl.clone(), t, r0_b.last().copied(), inherit(0));
        c.request = request_for(base + 3, 0);
        out.push(c);
        flip_ops(out, &r0_star);
        column(out, 2 + 2 * half);
    }
    flip_ops(out, &open);

    if p.orient == Orient::Reversed {
        out[start..].reverse();
        for q in &mut out[start..] {
            q.orient = q.orient.flip();
        }
    }
}

/// Rewrites `root` level by level until every remaining gate is at or
/// below the base threshold. Returns the MCX-level list after at most
/// `max_levels` rewrites (all of them when `None`). With a `table`, chain
/// requests steer each expansion so that depth adds up block by block.
pub(crate) fn expand_levels(
    width: usize,
    root: Pending,
    threshold: usize,
    rule: OrientationRule,
    cancel: bool,
    max_levels: Option<usize>,
    mut table: Option<&mut CriticalTable>,
) -> Vec<Pending> {
    let mut level = vec![root];
    let mut depth = 0;
    loop {
        if max_levels.is_some_and(|m| depth >= m) {
            return level;
        }
        let mut next = Vec::with_capacity(level.len() * 8);
        let mut grew = false;
        for mut p in level {
            if expandable(&p, threshold) {
                let witness = table.as_deref_mut().and_then(|t| resolve(&mut p, t));
                let choices = match &witness {
                    Some(How::Gadget(c)) => Some(&**c),
                    _ => None,
                };
                gadget(&p, rule, depth == 0, choices, &mut next);
                grew = true;
            } else {
                next.push(p);
            }
        }
        level = if cancel { cancel_items(width, next) } else { next };
        if !grew {
            return level;
        }
        depth += 1;
    }
}

fn flatten(level: Vec<Pending>, mut table: Option<&mut CriticalTable>) -> Vec<Gate> {
    let mut out = Vec::new();
    for mut p in level {
        if let Some(t) = table.as_deref_mut() {
            resolve(&mut p, t);
        }
        linear_expand(&p, &mut out);
    }
    out
}

/// Gates of a `C^kX(controls -> target)` borrowing `borrowed`, synthesized
/// with `cfg.method`, on a register of `width` wires. `controls` are used in
/// the given order.
pub fn mcx_gates(
    controls: &[Qubit],
    target: Qubit,
    borrowed: Option<Qubit>,
    width: usize,
    cfg: &SynthesisConfig,
) -> Result<Vec<Gate>> {
    cfg.validate()?;
    let mut root = Pending::new(controls.to_vec(), target, borrowed, 0);
    root.gate.validate(width)?;
    if let Some(b) = borrowed {
        if b >= width || root.gate.touches(b) {
            return Err(Error::Domain(format!("borrowed wire {b} overlaps the gate or is out of range")));
        }
    } else if controls.len() >= 3 {
        return Err(Error::Domain("C^kX with k >= 3 needs a borrowed wire".into()));
    }
    let k = controls.len();
    let method = match cfg.method {
        Method::Auto if k <= cfg.linear_cutover => Method::Linear,
        Method::Auto => Method::RecursiveOptimized,
        m => m,
    };
    let gates = match method {
        Method::Linear => flatten(vec![root], None),
        Method::RecursiveOriginal => {
            let mut table = CriticalTable::new(cfg.base_threshold);
            let entry = table.entry(k);
            let pair = entry.any_kind().and_then(|kd| match entry.kinds.get(&kd) {
                Some(Witness::Direct { pair, .. }) => Some(*pair),
                _ => entry.kinds.get(&kd.swapped()).and_then(|w| match w {
                    Witness::Direct { pair, .. } => Some((pair.1, pair.0)),
                    Witness::Mirror => None,
                }),
            });
            root.request = pair.map(|(a, z)| (root.wire(a), root.wire(z)));
            let level = expand_levels(
                width,
                root,
                cfg.base_threshold,
                OrientationRule::None,
                false,
                None,
                Some(&mut table),
            );
            flatten(level, Some(&mut table))
        }
        Method::RecursiveOptimized => {
            let level = expand_levels(
                width,
                root,
                cfg.base_threshold,
                cfg.orientation_rule,
                cfg.optimize_cancellation,
                None,
                None,
            );
            let gates = flatten(level, None);
            if cfg.optimize_cancellation {
                cancel_items(width, gates)
            } else {
                gates
            }
        }
        Method::Auto => unreachable!(),
    };
    Ok(gates)
}

fn standard(n: usize, cfg: &SynthesisConfig) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Domain("C^nX needs n >= 1".into()));
    }
    let controls: Vec<Qubit> = (0..n).collect();
    let gates = mcx_gates(&controls, n, Some(n + 1), n + 2, cfg)?;
    Ok(Circuit::from_gates_unchecked(n + 2, gates).with_mcx_roles(n))
}

/// `C^nX` with `cfg.method`, on the standard register layout.
pub fn synthesize(n: usize, cfg: &SynthesisConfig) -> Result<Circuit> {
    standard(n, cfg)
}

/// Linear-depth construction.
pub fn mcx_linear(n: usize) -> Result<Circuit> {
    standard(n, &SynthesisConfig::with_method(Method::Linear))
}

/// Recursive construction without orientation changes or cancellation.
pub fn mcx_recursive_original(n: usize, cfg: &SynthesisConfig) -> Result<Circuit> {
    standard(n, &SynthesisConfig { method: Method::RecursiveOriginal, ..*cfg })
}

/// Recursive construction with reversed columns and gate cancellation.
pub fn mcx_recursive_optimized(n: usize, cfg: &SynthesisConfig) -> Result<Circuit> {
    standard(n, &SynthesisConfig { method: Method::RecursiveOptimized, ..*cfg })
}

/// Linear up to `cfg.linear_cutover` controls, optimized recursion above.
pub fn mcx_auto(n: usize, cfg: &SynthesisConfig) -> Result<Circuit> {
    standard(n, &SynthesisConfig { method: Method::Auto, ..*cfg })
}

/// The MCX-level circuit after `levels` rewrites of `C^nX`, each gate tagged
/// with the outermost column it descends from (1..=4, or 0).
pub fn gadget_levels(n: usize, cfg: &SynthesisConfig, levels: usize) -> Result<Vec<(Gate, u8)>> {
    cfg.validate()?;
    let optimized = cfg.method != Method::RecursiveOriginal && cfg.method != Method::Linear;
    let root = Pending::new((0..n).collect(), n, Some(n + 1), 0);
    let rule = if optimized { cfg.orientation_rule } else { OrientationRule::None };
    let level = expand_levels(
        n + 2,
        root,
        cfg.base_threshold,
        rule,
        optimized && cfg.optimize_cancellation,
        Some(levels),
        None,
    );
    Ok(level.into_iter().map(|p| (p.gate, p.origin)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::check_mcx;

    #[test]
    fn partition_examples() {
        let p = partition(16).unwrap();
        assert_eq!((p.p, p.r0.len(), p.b, p.r), (4, 8, 2, 0));
        assert_eq!(p.groups.iter().map(Vec::len).collect::<Vec<_>>(), [4, 4]);

        let p = partition(10).unwrap();
        assert_eq!((p.p, p.r0.len(), p.b, p.r), (3, 6, 2, 1));
        assert_eq!(p.groups.iter().map(Vec::len).collect::<Vec<_>>(), [3, 1]);

        let p = partition(103).unwrap();
        assert_eq!((p.p, p.r0.len(), p.b, p.r), (10, 20, 9, 3));
        let sizes: Vec<usize> = p.groups.iter().map(Vec::len).collect();
        assert_eq!(sizes, [10, 10, 10, 10, 10, 10, 10, 10, 3]);
        assert!(p.p - 2 <= p.b && p.b <= p.p);

        assert!(partition(3).is_err());
    }

    #[test]
    fn partition_invariants_hold() {
        for n in 4..2000 {
            let p = partition(n).unwrap();
            p.check_invariants().unwrap_or_else(|e| panic!("{e}"));
            assert_eq!(p.r0_star, (0..p.b).collect::<Vec<_>>());
        }
    }

    #[test]
    fn small_linear_cases() {
        assert_eq!(mcx_linear(1).unwrap().gates(), &[Gate::cx(0, 1)]);
        assert_eq!(mcx_linear(2).unwrap().gates(), &[Gate::ccx(0, 1, 2)]);
        assert_eq!(mcx_linear(3).unwrap().len(), 4);
        assert!(mcx_linear(0).is_err());
    }

    #[test]
    fn linear_is_correct_exhaustively() {
        for n in 1..=12 {
            let c = mcx_linear(n).unwrap();
            let rep = check_mcx(&c, n).unwrap();
            assert!(rep.passed(), "n={n}: {rep}");
            assert!(c.gates().iter().all(|g| g.num_controls() <= 2));
        }
    }

    #[test]
    fn linear_depth_is_linear() {
        let d: Vec<usize> = [20, 40, 80].iter().map(|&n| mcx_linear(n).unwrap().abstract_depth()).collect();
        assert_eq!(d[2] - d[1], 2 * (d[1] - d[0]), "{d:?}");
    }

    #[test]
    fn generation_is_deterministic() {
        for method in [Method::RecursiveOriginal, Method::RecursiveOptimized] {
            let cfg = SynthesisConfig::with_method(method).base_threshold(5).linear_cutover(5);
            for n in [40, 130] {
                assert_eq!(synthesize(n, &cfg).unwrap().gates(), synthesize(n, &cfg).unwrap().gates());
            }
        }
    }

    #[test]
    fn linear_circuit_is_one_chain() {
        for n in 5..=64 {
            let c = mcx_linear(n).unwrap();
            assert_eq!(c.len(), 8 * n - 24);
            assert_eq!(c.abstract_depth(), c.len(), "n={n}");
        }
    }

    #[test]
    fn recursive_small_thresholds_are_correct() {
        for t in [3, 4, 5] {
            let cfg = SynthesisConfig::default().base_threshold(t).linear_cutover(t);
            for n in 1..=14 {
                for c in [mcx_recursive_original(n, &cfg).unwrap(), mcx_recursive_optimized(n, &cfg).unwrap()] {
                    let rep = check_mcx(&c, n).unwrap();
                    assert!(rep.passed(), "n={n} t={t}: {rep}");
                }
            }
        }
    }

    #[test]
    fn top_level_multiset_for_16() {
        let cfg = SynthesisConfig::with_method(Method::RecursiveOriginal).base_threshold(4);
        let level = gadget_levels(16, &cfg, 1).unwrap();
        let hist = Circuit::from_gates(18, level.into_iter().map(|(g, _)| g).collect())
            .unwrap()
            .control_histogram();
        // 2 x C^8X, 8 x C^4X, 2 x C^3X, and X layers around both C^3X (b = 2 wires each side)
        assert_eq!(hist[8], 2);
        assert_eq!(hist[4], 8);
        assert_eq!(hist[3], 2);
        assert_eq!(hist[0], 8);
        assert_eq!(hist.iter().sum::<usize>(), 20);
    }

    #[test]
    fn below_threshold_matches_linear() {
        let cfg = SynthesisConfig::default();
        assert_eq!(mcx_recursive_original(4, &cfg).unwrap(), mcx_linear(4).unwrap());
        assert_eq!(mcx_auto(51, &cfg).unwrap(), mcx_linear(51).unwrap());
        assert_eq!(mcx_auto(52, &cfg).unwrap(), mcx_recursive_optimized(52, &cfg).unwrap());
        assert_eq!(mcx_auto(2, &cfg).unwrap().gates(), &[Gate::ccx(0, 1, 2)]);
    }

    #[test]
    fn config_validation() {
        assert!(SynthesisConfig::default().base_threshold(2).validate().is_err());
        assert!(SynthesisConfig::default().base_threshold(30).linear_cutover(20).validate().is_err());
        assert!(mcx_auto(10, &SynthesisConfig::default().base_threshold(2)).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("fast".parse::<Method>().is_err());
    }
}
