//! 2×2 complex matrices on the counterpropagating-field basis `(φ, ψ)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Matrix2 {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn diag(d1: Complex64, d2: Complex64) -> Self {
        Self::new(d1, ZERO, ZERO, d2)
    }

    /// `η = diag(1, −1)`.
    pub const fn eta() -> Self {
        Self::diag(ONE, Complex64::new(-1.0, 0.0))
    }

    /// Projector `P_± = (1 ± η)/2`: `+1` selects `φ`, `−1` selects `ψ`.
    pub const fn projector(sign: i8) -> Self {
        if sign > 0 {
            Self::diag(ONE, ZERO)
        } else {
            Self::diag(ZERO, ONE)
        }
    }

    /// `e^{iηθ} = diag(e^{iθ}, e^{−iθ})`.
    pub fn phase(theta: f64) -> Self {
        Self::diag(
            Complex64::from_polar(1.0, theta),
            Complex64::from_polar(1.0, -theta),
        )
    }

    /// Symmetric mirror matrix `[[s, r], [r, s]]`.
    pub const fn mirror(r: Complex64, s: Complex64) -> Self {
        Self::new(s, r, r, s)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn conj(&self) -> Self {
        Self::new(
            self.a11.conj(),
            self.a12.conj(),
            self.a21.conj(),
            self.a22.conj(),
        )
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(self.a11 * k, self.a12 * k, self.a21 * k, self.a22 * k)
    }

    pub fn scale_re(&self, k: f64) -> Self {
        Self::new(self.a11 * k, self.a12 * k, self.a21 * k, self.a22 * k)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.a11.norm_sqr() + self.a12.norm_sqr() + self.a21.norm_sqr() + self.a22.norm_sqr())
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 + o.a11,
            self.a12 + o.a12,
            self.a21 + o.a21,
            self.a22 + o.a22,
        )
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 - o.a11,
            self.a12 - o.a12,
            self.a21 - o.a21,
            self.a22 - o.a22,
        )
    }
}

impl Neg for Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        Matrix2::new(-self.a11, -self.a12, -self.a21, -self.a22)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<Complex64> for Matrix2 {
    type Output = Matrix2;
    fn mul(self, k: Complex64) -> Matrix2 {
        self.scale(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projectors_partition_identity() {
        let p = Matrix2::projector(1);
        let m = Matrix2::projector(-1);
        assert_eq!(p + m, Matrix2::identity());
        assert_eq!(p * m, Matrix2::zero());
        assert_eq!(p - m, Matrix2::eta());
    }

    #[test]
    fn phase_is_unitary() {
        let u = Matrix2::phase(0.7);
        assert!((u * u.adjoint() - Matrix2::identity()).max_abs() < 1e-15);
        assert!((Matrix2::phase(0.3) * Matrix2::phase(0.4) - u).max_abs() < 1e-15);
    }
}
