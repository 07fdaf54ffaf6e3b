//! Verification oracles: exact reversible simulation of X-type circuits,
//! sparse/dense unitary simulation for small widths, and equivalence checks.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate, GateKind, Polarity};
use crate::linalg::{spectral_norm, C64, ZERO};
use crate::{Error, Result, DEFAULT_SEED};

/// Widest circuit for which a dense unitary is materialized.
pub const MAX_DENSE_WIDTH: usize = 11;
/// Widest circuit for statevector simulation.
pub const MAX_STATE_WIDTH: usize = 22;
/// Widest `C^nX` circuit checked exhaustively by [`check_mcx`].
pub const MAX_EXHAUSTIVE_WIDTH: usize = 20;

/// Computational basis state; bit `i` is qubit `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BasisState {
    width: usize,
    words: Vec<u64>,
}

impl BasisState {
    pub fn zeros(width: usize) -> Self {
        BasisState { width, words: vec![0; width.div_ceil(64).max(1)] }
    }

    pub fn from_u64(width: usize, bits: u64) -> Self {
        let mut s = Self::zeros(width);
        s.words[0] = if width >= 64 { bits } else { bits & ((1u64 << width) - 1) };
        s
    }

    pub fn random(width: usize, rng: &mut impl Rng) -> Self {
        let mut s = Self::zeros(width);
        for w in &mut s.words {
            *w = rng.gen();
        }
        s.mask_tail();
        s
    }

    fn mask_tail(&mut self) {
        let r = self.width % 64;
        if r != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << r) - 1;
        }
        if self.width == 0 {
            self.words[0] = 0;
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, q: usize) -> bool {
        self.words[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn set(&mut self, q: usize, v: bool) {
        let m = 1u64 << (q % 64);
        if v {
            self.words[q / 64] |= m;
        } else {
            self.words[q / 64] &= !m;
        }
    }

    pub fn flip(&mut self, q: usize) {
        self.words[q / 64] ^= 1u64 << (q % 64);
    }

    pub fn as_u64(&self) -> Option<u64> {
        (self.width <= 64).then(|| self.words[0])
    }
}

impl fmt::Debug for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for q in 0..self.width {
            write!(f, "{}", self.get(q) as u8)?;
        }
        write!(f, ">")
    }
}

/// Applies one X-type gate to a basis state.
fn apply_x_gate(g: &Gate, x: &mut BasisState) {
    let fire = g.controls.iter().all(|c| x.get(c.qubit) == (c.polarity == Polarity::Closed));
    if fire {
        x.flip(g.target);
    }
}

/// Runs an X-type circuit on a basis state.
pub fn simulate_reversible(c: &Circuit, x: &BasisState) -> Result<BasisState> {
    if x.width() != c.width() {
        return Err(Error::WidthMismatch { left: c.width(), right: x.width() });
    }
    let mut s = x.clone();
    for g in c.gates() {
        if !g.is_x_type() {
            return Err(Error::UnsupportedGate("reversible simulation needs X-type gates".into()));
        }
        apply_x_gate(g, &mut s);
    }
    Ok(s)
}

/// X-type circuit pre-compiled to bit masks, for circuits of width <= 64.
pub struct PackedCircuit {
    // (closed mask, open mask, target bit)
    ops: Vec<(u64, u64, u64)>,
}

impl PackedCircuit {
    pub fn new(c: &Circuit) -> Result<Self> {
        if c.width() > 64 {
            return Err(Error::Resource(format!("packed simulation limited to 64 qubits, got {}", c.width())));
        }
        let mut ops = Vec::with_capacity(c.len());
        for g in c.gates() {
            if !g.is_x_type() {
                return Err(Error::UnsupportedGate("reversible simulation needs X-type gates".into()));
            }
            let (mut closed, mut open) = (0u64, 0u64);
            for ctl in &g.controls {
                match ctl.polarity {
                    Polarity::Closed => closed |= 1 << ctl.qubit,
                    Polarity::Open => open |= 1 << ctl.qubit,
                }
            }
            ops.push((closed, open, 1u64 << g.target));
        }
        Ok(PackedCircuit { ops })
    }

    #[inline]
    pub fn run(&self, mut x: u64) -> u64 {
        for &(closed, open, t) in &self.ops {
            if x & closed == closed && x & open == 0 {
                x ^= t;
            }
        }
        x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled,
    Unitary,
}

impl fmt::Display for CheckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckMode::Exhaustive => "exhaustive",
            CheckMode::Sampled => "sampled",
            CheckMode::Unitary => "unitary",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub input: BasisState,
    pub expected: BasisState,
    pub got: BasisState,
}

/// Outcome of an equivalence check.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub mode: CheckMode,
    pub checked: usize,
    /// Number of failing inputs.
    pub failure_count: usize,
    /// The first few failing inputs.
    pub failures: Vec<Counterexample>,
    pub max_distance: f64,
    pub tolerance: f64,
    pub seed: Option<u64>,
}

const KEEP_FAILURES: usize = 8;

impl EquivalenceReport {
    fn new(mode: CheckMode, tolerance: f64, seed: Option<u64>) -> Self {
        EquivalenceReport {
            mode,
            checked: 0,
            failure_count: 0,
            failures: Vec::new(),
            max_distance: 0.0,
            tolerance,
            seed,
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0 && self.max_distance <= self.tolerance
    }

    fn record(&mut self, cx: Counterexample) {
        self.failure_count += 1;
        if self.failures.len() < KEEP_FAILURES {
            self.failures.push(cx);
        }
    }

    fn merge(mut self, other: EquivalenceReport) -> Self {
        self.checked += other.checked;
        self.failure_count += other.failure_count;
        for f in other.failures {
            if self.failures.len() < KEEP_FAILURES {
                self.failures.push(f);
            }
        }
        self.max_distance = self.max_distance.max(other.max_distance);
        self
    }

    pub const CSV_HEADER: &'static str = "mode,checked,failures,max_distance,tolerance,seed,pass";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{},{}",
            self.mode,
            self.checked,
            self.failure_count,
            self.max_distance,
            self.tolerance,
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.passed()
        )
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} mode={} checked={} failures={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.mode,
            self.checked,
            self.failure_count
        )?;
        if self.mode == CheckMode::Unitary {
            write!(f, " max_distance={:.3e} tol={:.1e}", self.max_distance, self.tolerance)?;
        }
        if let Some(seed) = self.seed {
            write!(f, " seed={seed:#x}")?;
        }
        if let Some(cx) = self.failures.first() {
            write!(f, "\n  first counterexample: input={:?} expected={:?} got={:?}", cx.input, cx.expected, cx.got)?;
        }
        Ok(())
    }
}

/// Options for [`check_mcx_with`].
#[derive(Clone, Copy, Debug)]
pub struct McxCheckOptions {
    /// Force a mode; `None` picks exhaustive when the width allows.
    pub mode: Option<CheckMode>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for McxCheckOptions {
    fn default() -> Self {
        McxCheckOptions { mode: None, samples: 1000, seed: DEFAULT_SEED }
    }
}

fn mcx_expected(x: &BasisState, n: usize) -> BasisState {
    let mut y = x.clone();
    if (0..n).all(|q| x.get(q)) {
        y.flip(n);
    }
    y
}

/// Checks that `c` implements `C^nX` with controls `0..n`, target `n` and a
/// borrowed ancilla `n+1` that must be restored on every input.
pub fn check_mcx(c: &Circuit, n: usize) -> Result<EquivalenceReport> {
    check_mcx_with(c, n, McxCheckOptions::default())
}

pub fn check_mcx_with(c: &Circuit, n: usize, opts: McxCheckOptions) -> Result<EquivalenceReport> {
    let width = n + 2;
    if c.width() != width {
        return Err(Error::WidthMismatch { left: c.width(), right: width });
    }
    if !c.is_x_type() {
        return Err(Error::UnsupportedGate("check_mcx needs an X-type circuit".into()));
    }
    let mode = opts.mode.unwrap_or(if width <= MAX_EXHAUSTIVE_WIDTH {
        CheckMode::Exhaustive
    } else {
        CheckMode::Sampled
    });
    match mode {
        CheckMode::Exhaustive => {
            if width > MAX_EXHAUSTIVE_WIDTH + 4 {
                return Err(Error::Resource(format!("exhaustive check over {width} qubits")));
            }
            Ok(exhaustive_mcx(c, n))
        }
        CheckMode::Sampled => Ok(sampled_mcx(c, n, opts.samples, opts.seed)),
        CheckMode::Unitary => Err(Error::Config("unitary mode does not apply to C^nX checks".into())),
    }
}

fn exhaustive_mcx(c: &Circuit, n: usize) -> EquivalenceReport {
    let width = n + 2;
    let packed = PackedCircuit::new(c).expect("width checked");
    let control_mask = (1u64 << n) - 1;
    let total = 1u64 << width;
    let chunk = 1u64 << 12;
    (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|k| {
            let mut rep = EquivalenceReport::new(CheckMode::Exhaustive, 0.0, None);
            for x in k * chunk..((k + 1) * chunk).min(total) {
                let want = if x & control_mask == control_mask { x ^ (1 << n) } else { x };
                let got = packed.run(x);
                rep.checked += 1;
                if got != want {
                    rep.record(Counterexample {
                        input: BasisState::from_u64(width, x),
                        expected: BasisState::from_u64(width, want),
                        got: BasisState::from_u64(width, got),
                    });
                }
            }
            rep
        })
        .reduce(|| EquivalenceReport::new(CheckMode::Exhaustive, 0.0, None), EquivalenceReport::merge)
}

/// Control patterns that exercise the firing boundary: all ones, all ones
/// with one zero at each position, all zeros, and alternating.
pub fn critical_patterns(n: usize) -> Vec<Vec<bool>> {
    let mut pats = vec![vec![true; n]];
    for i in 0..n {
        let mut p = vec![true; n];
        p[i] = false;
        pats.push(p);
    }
    pats.push(vec![false; n]);
    pats.push((0..n).map(|i| i % 2 == 0).collect());
    pats
}

fn sampled_mcx(c: &Circuit, n: usize, samples: usize, seed: u64) -> EquivalenceReport {
    let width = n + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs: Vec<BasisState> = (0..samples).map(|_| BasisState::random(width, &mut rng)).collect();
    for pat in critical_patterns(n) {
        for extra in [false, true] {
            let mut x = BasisState::zeros(width);
            for (q, &b) in pat.iter().enumerate() {
                x.set(q, b);
            }
            x.set(n, extra);
            x.set(n + 1, extra);
            inputs.push(x);
        }
    }
    let packed = PackedCircuit::new(c).ok();
    let mut rep = inputs
        .par_iter()
        .map(|x| {
            let mut rep = EquivalenceReport::new(CheckMode::Sampled, 0.0, Some(seed));
            let want = mcx_expected(x, n);
            let got = match (&packed, x.as_u64()) {
                (Some(p), Some(bits)) => BasisState::from_u64(width, p.run(bits)),
                _ => simulate_reversible(c, x).expect("X-type checked"),
            };
            rep.checked = 1;
            if got != want {
                rep.record(Counterexample { input: x.clone(), expected: want, got });
            }
            rep
        })
        .reduce(|| EquivalenceReport::new(CheckMode::Sampled, 0.0, Some(seed)), EquivalenceReport::merge);
    rep.seed = Some(seed);
    rep
}

/// Sparse amplitude vector keyed by basis index.
type Sparse = Vec<(u64, C64)>;

fn gate_fires(g: &Gate, idx: u64) -> bool {
    g.controls.iter().all(|c| ((idx >> c.qubit) & 1 == 1) == (c.polarity == Polarity::Closed))
}

fn apply_sparse(g: &Gate, state: Sparse) -> Sparse {
    let t = 1u64 << g.target;
    match &g.kind {
        GateKind::X => state
            .into_iter()
            .map(|(i, a)| if gate_fires(g, i) { (i ^ t, a) } else { (i, a) })
            .collect(),
        GateKind::Unitary(m) => {
            let mut acc: BTreeMap<u64, C64> = BTreeMap::new();
            for (i, a) in state {
                if gate_fires(g, i) {
                    let bit = ((i & t) != 0) as usize;
                    let i0 = i & !t;
                    *acc.entry(i0).or_insert(ZERO) += m.0[0][bit] * a;
                    *acc.entry(i0 | t).or_insert(ZERO) += m.0[1][bit] * a;
                } else {
                    *acc.entry(i).or_insert(ZERO) += a;
                }
            }
            acc.into_iter().filter(|(_, a)| a.norm_sqr() != 0.0).collect()
        }
    }
}

/// Applies `c` to the basis column `e_col`, returning sparse amplitudes.
pub fn apply_to_basis(c: &Circuit, col: u64) -> Sparse {
    let mut state: Sparse = vec![(col, C64::new(1.0, 0.0))];
    for g in c.gates() {
        state = apply_sparse(g, state);
    }
    state
}

/// Dense unitary of a circuit of width <= [`MAX_DENSE_WIDTH`].
pub fn dense_unitary(c: &Circuit) -> Result<DMatrix<C64>> {
    if c.width() > MAX_DENSE_WIDTH {
        return Err(Error::Resource(format!(
            "dense unitary limited to {MAX_DENSE_WIDTH} qubits, got {}",
            c.width()
        )));
    }
    let dim = 1usize << c.width();
    let cols: Vec<Sparse> = (0..dim as u64).into_par_iter().map(|j| apply_to_basis(c, j)).collect();
    let mut u = DMatrix::from_element(dim, dim, ZERO);
    for (j, col) in cols.into_iter().enumerate() {
        for (i, a) in col {
            u[(i as usize, j)] = a;
        }
    }
    Ok(u)
}

/// Applies `c` to a dense statevector in place.
pub fn apply_statevector(c: &Circuit, state: &mut [C64]) -> Result<()> {
    if c.width() > MAX_STATE_WIDTH || state.len() != 1usize << c.width() {
        return Err(Error::Resource(format!(
            "statevector needs width <= {MAX_STATE_WIDTH} and matching length"
        )));
    }
    for g in c.gates() {
        let t = 1usize << g.target;
        for i in 0..state.len() {
            if i & t != 0 || !gate_fires(g, i as u64) {
                continue;
            }
            let j = i | t;
            match &g.kind {
                GateKind::X => state.swap(i, j),
                GateKind::Unitary(m) => {
                    let (a0, a1) = (state[i], state[j]);
                    state[i] = m.0[0][0] * a0 + m.0[0][1] * a1;
                    state[j] = m.0[1][0] * a0 + m.0[1][1] * a1;
                }
            }
        }
    }
    Ok(())
}

/// Largest singular value of `a - b`.
///
/// Rows and columns of the difference whose entries are all below `1e-13`
/// are dropped before the SVD; the Frobenius norm of the dropped part is
/// added back, so the result never underestimates the true distance by
/// more than rounding.
pub fn spectral_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::WidthMismatch { left: a.nrows(), right: b.nrows() });
    }
    let d = a - b;
    const CUT: f64 = 1e-13;
    let rows: Vec<usize> = (0..d.nrows()).filter(|&i| d.row(i).iter().any(|z| z.norm() > CUT)).collect();
    let cols: Vec<usize> = (0..d.ncols()).filter(|&j| d.column(j).iter().any(|z| z.norm() > CUT)).collect();
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |i, j| d[(rows[i], cols[j])]);
    let kept: f64 = sub.iter().map(|z| z.norm_sqr()).sum();
    let total: f64 = d.iter().map(|z| z.norm_sqr()).sum();
    let dropped = (total - kept).max(0.0).sqrt();
    Ok(spectral_norm(&sub) + dropped)
}

/// Compares the unitary of `c` against `expected` in spectral norm.
pub fn check_unitary(c: &Circuit, expected: &DMatrix<C64>, tolerance: f64) -> Result<EquivalenceReport> {
    let u = dense_unitary(c)?;
    let dist = spectral_distance(&u, expected)?;
    let mut rep = EquivalenceReport::new(CheckMode::Unitary, tolerance, None);
    rep.checked = u.ncols();
    rep.max_distance = dist;
    Ok(rep)
}

/// Whether a dense matrix is a 0/1 permutation matrix.
pub fn is_permutation_matrix(u: &DMatrix<C64>) -> bool {
    (0..u.ncols()).all(|j| {
        let col = u.column(j);
        let ones = col.iter().filter(|z| (**z - C64::new(1.0, 0.0)).norm() == 0.0).count();
        let zeros = col.iter().filter(|z| z.norm() == 0.0).count();
        ones == 1 && zeros == col.len() - 1
    }) && (0..u.nrows()).all(|i| u.row(i).iter().filter(|z| z.norm() != 0.0).count() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Control;
    use crate::linalg::Mat2;

    #[test]
    fn c3x_examples() {
        let c = Circuit::from_gates(4, vec![Gate::mcx_closed(&[0, 1, 2], 3)]).unwrap();
        let y = simulate_reversible(&c, &BasisState::from_u64(4, 0b0111)).unwrap();
        assert_eq!(y, BasisState::from_u64(4, 0b1111));
        let y = simulate_reversible(&c, &BasisState::from_u64(4, 0b0101)).unwrap();
        assert_eq!(y, BasisState::from_u64(4, 0b0101));
    }

    #[test]
    fn open_controls_fire_on_zero() {
        let c = Circuit::from_gates(2, vec![Gate::mcx([Control::open(0)], 1)]).unwrap();
        let y = simulate_reversible(&c, &BasisState::from_u64(2, 0)).unwrap();
        assert_eq!(y, BasisState::from_u64(2, 0b10));
    }

    #[test]
    fn reversible_rejects_unitary_gates() {
        let c = Circuit::from_gates(1, vec![Gate::unitary(Mat2::ry(0.2), 0)]).unwrap();
        assert!(matches!(
            simulate_reversible(&c, &BasisState::zeros(1)),
            Err(Error::UnsupportedGate(_))
        ));
    }

    #[test]
    fn dense_of_x_and_distances() {
        let c = Circuit::from_gates(1, vec![Gate::x(0)]).unwrap();
        let u = dense_unitary(&c).unwrap();
        assert_eq!(u, DMatrix::from_row_slice(2, 2, &[ZERO, C64::new(1.0, 0.0), C64::new(1.0, 0.0), ZERO]));
        assert_eq!(spectral_distance(&u, &u).unwrap(), 0.0);
        let id = DMatrix::<C64>::identity(2, 2);
        assert!((spectral_distance(&id, &u).unwrap() - 2.0).abs() < 1e-12);
        assert!(dense_unitary(&Circuit::new(12)).is_err());
    }

    #[test]
    fn check_mcx_negative() {
        let c = Circuit::from_gates(4, vec![Gate::cx(0, 2)]).unwrap();
        let rep = check_mcx(&c, 2).unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.checked, 16);
        let cx = &rep.failures[0];
        assert!(cx.input.get(0) && !cx.input.get(1));
    }

    #[test]
    fn check_mcx_width_mismatch() {
        let c = Circuit::new(5);
        assert!(matches!(check_mcx(&c, 2), Err(Error::WidthMismatch { .. })));
    }

    #[test]
    fn sampled_mode_counts() {
        let n = 30;
        let ctrl: Vec<usize> = (0..n).collect();
        let c = Circuit::from_gates(n + 2, vec![Gate::mcx_closed(&ctrl, n)]).unwrap();
        let rep = check_mcx(&c, n).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.mode, CheckMode::Sampled);
        assert_eq!(rep.checked, 1000 + 2 * (n + 3));
        assert_eq!(rep.seed, Some(DEFAULT_SEED));
    }

    #[test]
    fn wide_sampled_uses_bitset_path() {
        let n = 100;
        let ctrl: Vec<usize> = (0..n).collect();
        let c = Circuit::from_gates(n + 2, vec![Gate::mcx_closed(&ctrl, n)]).unwrap();
        let rep = check_mcx(&c, n).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.checked, 1206);
    }

    #[test]
    fn statevector_matches_dense() {
        let c = Circuit::from_gates(
            3,
            vec![
                Gate::unitary(Mat2::ry(0.7), 0),
                Gate::controlled_unitary(Mat2::rz(0.3), [Control::closed(0)], 2),
                Gate::ccx(0, 2, 1),
            ],
        )
        .unwrap();
        let u = dense_unitary(&c).unwrap();
        for j in 0..8 {
            let mut s = vec![ZERO; 8];
            s[j] = C64::new(1.0, 0.0);
            apply_statevector(&c, &mut s).unwrap();
            for i in 0..8 {
                assert!((s[i] - u[(i, j)]).norm() < 1e-14);
            }
        }
    }
}
