//! Critical-path planning for the unoptimized recursion.
//!
//! ASAP depth equals the length of the longest chain of gates in which each
//! gate shares a wire with the next. For the depth of a gadget to equal the
//! sum of its blocks, one chain must run through every block at full
//! length, entering each block on a wire the previous block left on.
//!
//! Wires are named canonically per gate: logical controls `0..k`, target
//! `k`, borrowed `k + 1`. A sub-gate's controls may be permuted freely, so
//! what matters about a chain is the role of its two end wires. For every
//! control count the planner records which role combinations some variant
//! realizes, with one concrete canonical pair and the choices behind it.

use std::collections::{BTreeMap, HashMap};

use crate::circuit::{DepthTracker, Gate, Qubit};
use crate::synth::{linear_chain, PartitionPlan};

pub(crate) type Pair = (u32, u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Role {
    Ctrl,
    Tgt,
    Brw,
}

/// Roles of the two chain ends; `same` marks one control wire at both ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Kind {
    pub a: Role,
    pub z: Role,
    pub same: bool,
}

impl Kind {
    pub fn swapped(self) -> Kind {
        Kind { a: self.z, z: self.a, same: self.same }
    }
}

fn role(k: u32, w: u32) -> Role {
    match w {
        w if w < k => Role::Ctrl,
        w if w == k => Role::Tgt,
        _ => Role::Brw,
    }
}

pub(crate) fn kind_of(k: u32, (a, z): Pair) -> Kind {
    Kind { a: role(k, a), z: role(k, z), same: a == z && a < k }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct BlockChoice {
    /// Gate index inside a parallel block (group index or X-layer wire).
    pub instance: u32,
    /// Chain ends inside the chosen gate, in the parent's canonical wires.
    pub ends: Pair,
}

#[derive(Clone, Debug)]
pub(crate) enum How {
    Linear,
    Gadget(Box<[BlockChoice; 12]>),
}

#[derive(Clone, Debug)]
pub(crate) enum Witness {
    /// Realized by the reversed expansion of the swapped kind.
    Mirror,
    /// The natural expansion, with the canonical pair it connects.
    Direct { pair: Pair, how: How },
}

#[derive(Debug, Default)]
pub(crate) struct Entry {
    pub depth: usize,
    pub kinds: BTreeMap<Kind, Witness>,
}

impl Entry {
    /// A deterministic representative kind, if any.
    pub fn any_kind(&self) -> Option<Kind> {
        self.kinds.keys().min().copied()
    }
}

pub(crate) struct CriticalTable {
    threshold: usize,
    entries: HashMap<usize, Entry>,
}

/// Full-length chain endpoints of a gate list on `width` wires.
pub(crate) fn endpoint_pairs(width: usize, gates: &[Gate]) -> (usize, Vec<Pair>) {
    let n = gates.len();
    if n == 0 {
        return (0, Vec::new());
    }
    let mut fwd = DepthTracker::new(width);
    let left: Vec<usize> = gates.iter().map(|g| fwd.place(g.qubits())).collect();
    let depth = fwd.depth();
    let mut bwd = DepthTracker::new(width);
    let mut right = vec![0; n];
    for i in (0..n).rev() {
        right[i] = bwd.place(gates[i].qubits());
    }
    // next gate on each wire of each gate
    let mut next_on: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut last_seen: Vec<Option<usize>> = vec![None; width];
    for i in (0..n).rev() {
        for q in gates[i].qubits() {
            if let Some(j) = last_seen[q] {
                next_on[i].push(j);
            }
            last_seen[q] = Some(i);
        }
    }
    let critical = |i: usize| left[i] + right[i] == depth + 1;
    let mut pairs = Vec::new();
    let mut seen = vec![usize::MAX; n];
    for s in (0..n).filter(|&i| left[i] == 1 && critical(i)) {
        let mut stack = vec![s];
        seen[s] = s;
        let mut ends = Vec::new();
        while let Some(i) = stack.pop() {
            if left[i] == depth {
                ends.push(i);
            }
            for &j in &next_on[i] {
                if seen[j] != s && critical(j) && left[j] == left[i] + 1 {
                    seen[j] = s;
                    stack.push(j);
                }
            }
        }
        for a in gates[s].qubits() {
            for &e in &ends {
                for z in gates[e].qubits() {
                    pairs.push((a as u32, z as u32));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    (depth, pairs)
}

/// One selectable chain segment through a block, in parent wires.
#[derive(Clone, Copy)]
struct Segment {
    a: u32,
    z: u32,
    instance: u32,
}

/// Fixed-width bitset over start wires.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn or(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &x)| (0..64).filter(move |b| x >> b & 1 == 1).map(move |b| w * 64 + b))
    }
}

impl CriticalTable {
    pub fn new(threshold: usize) -> Self {
        CriticalTable { threshold, entries: HashMap::new() }
    }

    pub fn is_linear(&self, k: usize) -> bool {
        k <= self.threshold || !PartitionPlan::new(k).map(|p| p.is_recursive()).unwrap_or(false)
    }

    pub fn entry(&mut self, k: usize) -> &Entry {
        if !self.entries.contains_key(&k) {
            let e = if self.is_linear(k) { self.linear_entry(k) } else { self.gadget_entry(k) };
            self.entries.insert(k, e);
        }
        &self.entries[&k]
    }

    fn linear_entry(&self, k: usize) -> Entry {
        let controls: Vec<Qubit> = (0..k).collect();
        let mut gates = Vec::new();
        linear_chain(&controls, k, (k >= 3).then_some(k + 1), &mut gates);
        let (depth, pairs) = endpoint_pairs(k + 2, &gates);
        let mut entry = Entry { depth, kinds: BTreeMap::new() };
        for p in pairs {
            entry.kinds.entry(kind_of(k as u32, p)).or_insert(Witness::Direct { pair: p, how: How::Linear });
        }
        add_mirrors(&mut entry);
        entry
    }

    /// Every segment a child of size `k` offers, mapped into parent wires.
    fn segments(&mut self, k: usize, map: &dyn Fn(u32) -> u32, instance: u32, out: &mut Vec<Segment>) {
        let k32 = k as u32;
        let kinds: Vec<Kind> = self.entry(k).kinds.keys().copied().collect();
        let wires = |r: Role| -> Vec<u32> {
            match r {
                Role::Ctrl => (0..k32).collect(),
                Role::Tgt => vec![k32],
                Role::Brw => vec![k32 + 1],
            }
        };
        for kd in kinds {
            for a in wires(kd.a) {
                for z in wires(kd.z) {
                    if kd.a == Role::Ctrl && kd.z == Role::Ctrl && (a == z) != kd.same {
                        continue;
                    }
                    out.push(Segment { a: map(a), z: map(z), instance });
                }
            }
        }
    }

    fn gadget_entry(&mut self, k: usize) -> Entry {
        let plan = PartitionPlan::new(k).expect("recursive size");
        let (p, b) = (plan.p as u32, plan.b as u32);
        let k32 = k as u32;
        let (tgt, brw) = (k32, k32 + 1);

        let da = self.entry(2 * plan.p).depth;
        let dc = self.entry(plan.b + 1).depth;
        let sizes: Vec<usize> = plan.groups.iter().map(Vec::len).collect();
        let db = sizes.iter().map(|&s| self.entry(s).depth).max().unwrap_or(0);
        let depth = 2 * da + 4 * db + 2 * dc + 4;

        let two_p = 2 * p;
        let mut a_seg = Vec::new();
        self.segments(2 * plan.p, &|j| match j {
            j if j < two_p => j,
            j if j == two_p => brw,
            _ => tgt,
        }, 0, &mut a_seg);
        let mut b_seg = Vec::new();
        for (i, &s) in sizes.iter().enumerate() {
            if self.entry(s).depth != db {
                continue;
            }
            let (i32_, s32) = (i as u32, s as u32);
            let base = two_p + i32_ * p;
            self.segments(s, &|j| match j {
                j if j < s32 => base + j,
                j if j == s32 => i32_,
                _ => b + i32_,
            }, i32_, &mut b_seg);
        }
        let last_b = 2 * p - 1;
        let mut c_seg = Vec::new();
        self.segments(plan.b + 1, &|j| match j {
            j if j < b => j,
            j if j == b => brw,
            j if j == b + 1 => tgt,
            _ => last_b,
        }, 0, &mut c_seg);
        let x_seg: Vec<Segment> = (0..b).map(|q| Segment { a: q, z: q, instance: q }).collect();

        let blocks: [&[Segment]; 12] = [
            &a_seg, &b_seg, &x_seg, &c_seg, &x_seg, &b_seg, &a_seg, &b_seg, &x_seg, &c_seg, &x_seg, &b_seg,
        ];

        // reach[j][w]: start wires with a full chain through blocks 0..j ending on w
        let width = k + 2;
        let mut init = vec![Bits::new(width); width];
        for (w, bits) in init.iter_mut().enumerate() {
            bits.set(w);
        }
        let mut reach: Vec<Vec<Bits>> = vec![init];
        for seg in blocks {
            let prev = reach.last().unwrap();
            let mut next = vec![Bits::new(width); width];
            for s in seg {
                next[s.z as usize].or(&prev[s.a as usize]);
            }
            reach.push(next);
        }

        let mut entry = Entry { depth, kinds: BTreeMap::new() };
        let fin = &reach[12];
        for z in 0..width {
            for s in fin[z].ones() {
                let kd = kind_of(k32, (s as u32, z as u32));
                if entry.kinds.contains_key(&kd) {
                    continue;
                }
                let mut choices = [BlockChoice { instance: 0, ends: (0, 0) }; 12];
                let mut w = z as u32;
                for j in (0..12).rev() {
                    let seg = blocks[j]
                        .iter()
                        .find(|g| g.z == w && reach[j][g.a as usize].get(s))
                        .expect("reachable chains can be traced back");
                    choices[j] = BlockChoice { instance: seg.instance, ends: (seg.a, seg.z) };
                    w = seg.a;
                }
                debug_assert_eq!(w as usize, s);
                entry.kinds.insert(
                    kd,
                    Witness::Direct { pair: (s as u32, z as u32), how: How::Gadget(Box::new(choices)) },
                );
            }
        }
        add_mirrors(&mut entry);
        entry
    }
}

fn add_mirrors(entry: &mut Entry) {
    let swapped: Vec<Kind> = entry.kinds.keys().map(|k| k.swapped()).collect();
    for kd in swapped {
        entry.kinds.entry(kd).or_insert(Witness::Mirror);
    }
}
