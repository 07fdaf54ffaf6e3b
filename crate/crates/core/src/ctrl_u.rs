//! Multi-controlled SU(2) and approximate multi-controlled U(2) gates.
//!
//! Both constructions use no wires beyond controls and target: the
//! multi-controlled X gates inside borrow a wire that the surrounding
//! singly-controlled gates do not modify as a control.

use crate::circuit::{Circuit, Control, Gate, Qubit};
use crate::linalg::{Mat2, C64, ONE};
use crate::synth::{mcx_gates, SynthesisConfig};
use crate::{Error, Result};

const UNITARY_TOL: f64 = 1e-10;

/// `W = Rz(alpha) Ry(theta) Rz(beta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZyzAngles {
    pub alpha: f64,
    pub theta: f64,
    pub beta: f64,
}

impl ZyzAngles {
    pub fn matrix(&self) -> Mat2 {
        Mat2::rz(self.alpha) * Mat2::ry(self.theta) * Mat2::rz(self.beta)
    }
}

/// `A X B X C = W` and `A B C = I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbcFactors {
    pub a: Mat2,
    pub b: Mat2,
    pub c: Mat2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxPlan {
    /// Square-root steps taken before the remaining gate was dropped.
    pub steps: usize,
    /// `||V - I||` of the dropped gate, or 0 when nothing was dropped.
    pub residual_error: f64,
    pub epsilon: f64,
}

fn check_su2(w: &Mat2) -> Result<()> {
    if !w.is_unitary(UNITARY_TOL) {
        return Err(Error::Domain(format!("matrix is not unitary (defect {:.3e})", w.unitarity_defect())));
    }
    let det = w.det();
    if (det - ONE).norm() > UNITARY_TOL {
        return Err(Error::Domain(format!("determinant {det:.6} is not 1")));
    }
    Ok(())
}

/// Euler angles of an SU(2) matrix; `theta` lies in `[0, pi]`.
pub fn zyz_decompose(w: &Mat2) -> Result<ZyzAngles> {
    check_su2(w)?;
    let a = w.0[0][0];
    let b = w.0[1][0];
    let theta = 2.0 * b.norm().atan2(a.norm());
    if b.norm() < 1e-14 {
        return Ok(ZyzAngles { alpha: -2.0 * a.arg(), theta: 0.0, beta: 0.0 });
    }
    let arg_a = if a.norm() < 1e-14 { 0.0 } else { a.arg() };
    let arg_b = b.arg();
    Ok(ZyzAngles { alpha: arg_b - arg_a, theta, beta: -arg_a - arg_b })
}

pub fn abc_factors(w: &Mat2) -> Result<AbcFactors> {
    let ZyzAngles { alpha, theta, beta } = zyz_decompose(w)?;
    Ok(AbcFactors {
        a: Mat2::rz(alpha) * Mat2::ry(theta / 2.0),
        b: Mat2::ry(-theta / 2.0) * Mat2::rz(-(alpha + beta) / 2.0),
        c: Mat2::rz((beta - alpha) / 2.0),
    })
}

/// Principal square root: eigenphases in `(-pi, pi]` are halved.
///
/// Uses `V = (U + c I) / t` with `c^2 = det U` and `t^2 = tr U + 2c`, which
/// squares to `U` for either sign of `c`. When both eigenvalues sit within
/// about 0.01 rad of `-1` on opposite sides of the cut, `t` vanishes for the
/// principal choice and the other sign of `c` is taken instead.
pub fn sqrt_unitary(u: &Mat2) -> Mat2 {
    let tr = u.trace();
    let det = u.det();
    let disc = (tr * tr / 4.0 - det).sqrt();
    let root = |l: C64| C64::from_polar(l.norm().sqrt(), l.arg() / 2.0);
    let (s1, s2) = (root(tr / 2.0 + disc), root(tr / 2.0 - disc));
    let mut c = root(det);
    if (c + s1 * s2).norm() < (c - s1 * s2).norm() {
        c = -c;
    }
    let mut t2 = tr + c * 2.0;
    let mut want = s1 + s2;
    if t2.norm() < 1e-4 {
        c = -c;
        t2 = tr + c * 2.0;
        want = s1 - s2;
    }
    let mut t = t2.sqrt();
    if (t + want).norm() < (t - want).norm() {
        t = -t;
    }
    u.add(&Mat2::identity().scale(c)).scale(t.inv())
}

fn su2_gates(n: usize, w: &Mat2, cfg: &SynthesisConfig) -> Result<Vec<Gate>> {
    let abc = abc_factors(w)?;
    let t = n;
    if n == 1 {
        return Ok(vec![Gate::controlled_unitary(*w, [Control::closed(0)], t)]);
    }
    let pivot = n - 1;
    let prefix: Vec<Qubit> = (0..pivot).collect();
    let mcx = mcx_gates(&prefix, t, Some(pivot), n + 1, cfg)?;
    let cu = |m: Mat2| Gate::controlled_unitary(m, [Control::closed(pivot)], t);
    let mut gates = Vec::with_capacity(2 * mcx.len() + 3);
    gates.push(cu(abc.c));
    gates.extend(mcx.iter().cloned());
    gates.push(cu(abc.b));
    gates.extend(mcx);
    gates.push(cu(abc.a));
    Ok(gates)
}

/// `C^n(W)` for `W` in SU(2): controls `0..n`, target `n`, no extra wires.
pub fn mcsu2(n: usize, w: &Mat2) -> Result<Circuit> {
    mcsu2_with(n, w, &SynthesisConfig::default())
}

pub fn mcsu2_with(n: usize, w: &Mat2, cfg: &SynthesisConfig) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Domain("need at least one control".into()));
    }
    Circuit::from_gates(n + 1, su2_gates(n, w, cfg)?)
}

/// Approximate `C^n(U)` for `U` in U(2) with spectral error at most `epsilon`.
///
/// Each step peels one control with the square-root identity; the first
/// remaining gate `C^k(V)` with `||V - I|| <= epsilon` is dropped.
pub fn mcu2_approx(n: usize, u: &Mat2, epsilon: f64) -> Result<(Circuit, ApproxPlan)> {
    mcu2_approx_with(n, u, epsilon, &SynthesisConfig::default())
}

pub fn mcu2_approx_with(
    n: usize,
    u: &Mat2,
    epsilon: f64,
    cfg: &SynthesisConfig,
) -> Result<(Circuit, ApproxPlan)> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if n == 0 {
        return Err(Error::Domain("need at least one control".into()));
    }
    if !u.is_unitary(UNITARY_TOL) {
        return Err(Error::Domain("matrix is not unitary".into()));
    }
    let t = n;
    let mut gates = Vec::new();
    let mut v = *u;
    let mut steps = 0;
    let residual_error = loop {
        let dist = v.distance_to_identity();
        if dist <= epsilon {
            break dist;
        }
        let k = n - steps;
        if k == 1 {
            gates.push(Gate::controlled_unitary(v, [Control::closed(0)], t));
            break 0.0;
        }
        let pivot = k - 1;
        let w = sqrt_unitary(&v);
        let prefix: Vec<Qubit> = (0..pivot).collect();
        let mcx = mcx_gates(&prefix, pivot, Some(t), n + 1, cfg)?;
        gates.push(Gate::controlled_unitary(w, [Control::closed(pivot)], t));
        gates.extend(mcx.iter().cloned());
        gates.push(Gate::controlled_unitary(w.adjoint(), [Control::closed(pivot)], t));
        gates.extend(mcx);
        v = w;
        steps += 1;
    };
    let circuit = Circuit::from_gates(n + 1, gates)?;
    Ok((circuit, ApproxPlan { steps, residual_error, epsilon }))
}

/// Dense matrix of `C^n(U)` with controls `0..n` and target `n`.
pub fn controlled_matrix(n: usize, u: &Mat2) -> nalgebra::DMatrix<C64> {
    let dim = 1usize << (n + 1);
    let mut m = nalgebra::DMatrix::<C64>::identity(dim, dim);
    let ctrl_mask = (1usize << n) - 1;
    let tbit = 1usize << n;
    for col in 0..dim {
        if col & ctrl_mask == ctrl_mask {
            let row0 = col & !tbit;
            let row1 = col | tbit;
            let j = usize::from(col & tbit != 0);
            m[(row0, col)] = u.0[0][j];
            m[(row1, col)] = u.0[1][j];
        }
    }
    m
}
