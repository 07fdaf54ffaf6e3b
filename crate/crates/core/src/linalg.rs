//! Small dense helpers: 2x2 complex matrices and spectral norms.

use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// A 2x2 complex matrix in row-major order.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{:.6}, {:.6}], [{:.6}, {:.6}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn pauli_x() -> Self {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    /// `Rz(phi) = diag(e^{-i phi/2}, e^{i phi/2})`.
    pub fn rz(phi: f64) -> Self {
        Mat2::new(
            C64::from_polar(1.0, -phi / 2.0),
            ZERO,
            ZERO,
            C64::from_polar(1.0, phi / 2.0),
        )
    }

    /// `Ry(theta) = [[cos, -sin], [sin, cos]]` of `theta/2`.
    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Mat2::new(C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0))
    }

    /// `diag(1, e^{i delta})`.
    pub fn phase(delta: f64) -> Self {
        Mat2::new(ONE, ZERO, ZERO, C64::from_polar(1.0, delta))
    }

    /// The OpenQASM `u(theta, phi, lambda)` gate.
    pub fn u3(theta: f64, phi: f64, lambda: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Mat2::new(
            C64::new(c, 0.0),
            -C64::from_polar(s, lambda),
            C64::from_polar(s, phi),
            C64::from_polar(c, phi + lambda),
        )
    }

    pub fn scale(&self, k: C64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * k, m[0][1] * k, m[1][0] * k, m[1][1] * k)
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn sub(&self, other: &Mat2) -> Self {
        let (a, b) = (&self.0, &other.0);
        Mat2::new(
            a[0][0] - b[0][0],
            a[0][1] - b[0][1],
            a[1][0] - b[1][0],
            a[1][1] - b[1][1],
        )
    }

    pub fn add(&self, other: &Mat2) -> Self {
        let (a, b) = (&self.0, &other.0);
        Mat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }

    /// Largest singular value, in closed form for the 2x2 case.
    pub fn spectral_norm(&self) -> f64 {
        let m = &self.0;
        let fro2: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
        let det = self.det().norm();
        // sigma_max^2 = (F^2 + sqrt(F^4 - 4|det|^2)) / 2
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
        ((fro2 + disc) / 2.0).sqrt()
    }

    /// Spectral distance to the identity.
    pub fn distance_to_identity(&self) -> f64 {
        self.sub(&Mat2::identity()).spectral_norm()
    }

    /// `max |M^dagger M - I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint() * *self;
        p.sub(&Mat2::identity())
            .0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Entrywise max-norm distance.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.sub(other).0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Mat2, tol: f64) -> bool {
        self.sub(other).spectral_norm() <= tol
    }

    /// Euler angles `(theta, phi, lambda, global_phase)` with
    /// `M = e^{i global} u(theta, phi, lambda)`.
    pub fn to_u3(&self) -> (f64, f64, f64, f64) {
        let det = self.det();
        let half = det.arg() / 2.0;
        let su = self.scale(C64::from_polar(1.0, -half));
        let s = &su.0;
        let theta = 2.0 * s[1][0].norm().atan2(s[0][0].norm());
        // su = e^{-i(phi+lambda)/2} u(theta, phi, lambda)
        let a = s[0][0].arg();
        let b = s[1][0].arg();
        let phi_plus_lambda = -2.0 * a;
        let phi_minus_lambda = 2.0 * b;
        let (phi, lambda) = if s[1][0].norm() < 1e-14 {
            (0.0, phi_plus_lambda)
        } else if s[0][0].norm() < 1e-14 {
            (phi_minus_lambda, 0.0)
        } else {
            (
                (phi_plus_lambda + phi_minus_lambda) / 2.0,
                (phi_plus_lambda - phi_minus_lambda) / 2.0,
            )
        };
        let global = half - (phi + lambda) / 2.0;
        (theta, phi, lambda, global)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Largest singular value of a dense complex matrix.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rotations_are_unitary() {
        for t in [0.0, 0.3, 1.7, PI, -2.2] {
            assert!(Mat2::rz(t).is_unitary(1e-14));
            assert!(Mat2::ry(t).is_unitary(1e-14));
            assert!(Mat2::u3(t, 0.4, -1.1).is_unitary(1e-14));
        }
    }

    #[test]
    fn spectral_norm_of_identity_minus_x_is_two() {
        let d = Mat2::identity().sub(&Mat2::pauli_x());
        assert!((d.spectral_norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_norm_matches_svd() {
        let m = Mat2::new(C64::new(0.3, 0.1), C64::new(-1.0, 0.2), C64::new(0.0, 0.7), C64::new(2.0, -0.5));
        let dm = DMatrix::from_row_slice(2, 2, &[m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]]);
        assert!((m.spectral_norm() - spectral_norm(&dm)).abs() < 1e-12);
    }

    #[test]
    fn u3_round_trip() {
        let m = Mat2::u3(1.1, -0.4, 2.5).scale(C64::from_polar(1.0, 0.77));
        let (t, p, l, g) = m.to_u3();
        let back = Mat2::u3(t, p, l).scale(C64::from_polar(1.0, g));
        assert!(back.approx_eq(&m, 1e-12), "{back:?} vs {m:?}");
    }
}
