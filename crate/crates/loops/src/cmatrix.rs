//! Small dense complex matrices for SU(n) work: products, exponentials,
//! and exact left logarithmic derivatives of exponential-form maps.

use crate::numeric::Real;
use num_complex::Complex;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct CMat<R: Real> {
    pub n: usize,
    pub data: Vec<Complex<R>>,
}

impl<R: Real> CMat<R> {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![Complex::new(R::zero(), R::zero()); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(R::one(), R::zero());
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<R> {
        self.data[i * self.n + j]
    }

    pub fn scale(&self, s: R) -> CMat<R> {
        CMat { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_c(&self, s: Complex<R>) -> CMat<R> {
        CMat { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn dagger(&self) -> CMat<R> {
        let mut out = CMat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = self.get(j, i).conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<R> {
        (0..self.n).map(|i| self.get(i, i)).fold(Complex::new(R::zero(), R::zero()), |a, b| a + b)
    }

    pub fn commutator(&self, other: &CMat<R>) -> CMat<R> {
        &(self * other) - &(other * self)
    }

    pub fn frobenius_norm(&self) -> R {
        self.data.iter().map(|z| z.norm_sqr()).fold(R::zero(), |a, b| a + b).sqrt()
    }

    /// max-abs distance to the identity under self · selfᴴ
    pub fn unitarity_defect(&self) -> R {
        let p = self * &self.dagger();
        let mut worst = R::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                let want = if i == j { R::one() } else { R::zero() };
                let d = (p.get(i, j) - Complex::new(want, R::zero())).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// anti-Hermitian defect: max |(X + Xᴴ)_{ij}|
    pub fn skew_defect(&self) -> R {
        let s = self + &self.dagger();
        s.data.iter().map(|z| z.norm()).fold(R::zero(), |a, b| a.max(b))
    }

    /// Matrix exponential by scaling-and-squaring on the Taylor series;
    /// ample for the anti-Hermitian inputs used here.
    pub fn exp(&self) -> CMat<R> {
        let norm = self.frobenius_norm();
        let mut squarings = 0u32;
        let mut scaled = self.clone();
        let half = R::from_f(0.5);
        while scaled.frobenius_norm() > half {
            scaled = scaled.scale(half);
            squarings += 1;
        }
        let _ = norm;
        let mut term = CMat::identity(self.n);
        let mut sum = CMat::identity(self.n);
        let tol = R::epsilon() * R::from_f(0.01);
        for k in 1..60 {
            term = &term * &scaled;
            term = term.scale(R::one() / R::from_f(k as f64));
            sum = &sum + &term;
            if term.frobenius_norm() < tol {
                break;
            }
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    /// Left logarithmic derivative of t ↦ exp(X(t)): given X and DX = X'(t),
    /// returns exp(−X)·(d/dt exp(X)) = Σ_k (−ad_X)^k (DX) / (k+1)!.
    pub fn dexp_left(x: &CMat<R>, dx: &CMat<R>) -> CMat<R> {
        let mut term = dx.clone();
        let mut sum = term.scale(R::one()); // k = 0 term: DX / 1!
        let tol = R::epsilon() * R::from_f(0.01) * (dx.frobenius_norm() + R::one());
        for k in 1..80 {
            term = x.commutator(&term).scale(-R::one());
            // term now holds (−ad_X)^k (DX); contribute term / (k+1)!
            let mut contrib = term.clone();
            let mut fact = R::one();
            for j in 2..=(k + 1) {
                fact *= R::from_f(j as f64);
            }
            contrib = contrib.scale(R::one() / fact);
            sum = &sum + &contrib;
            if contrib.frobenius_norm() < tol {
                break;
            }
        }
        sum
    }
}

impl<R: Real> std::ops::Index<(usize, usize)> for CMat<R> {
    type Output = Complex<R>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<R> {
        &self.data[i * self.n + j]
    }
}

impl<R: Real> std::ops::IndexMut<(usize, usize)> for CMat<R> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<R> {
        &mut self.data[i * self.n + j]
    }
}

impl<R: Real> Add for &CMat<R> {
    type Output = CMat<R>;
    fn add(self, rhs: &CMat<R>) -> CMat<R> {
        CMat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<R: Real> Sub for &CMat<R> {
    type Output = CMat<R>;
    fn sub(self, rhs: &CMat<R>) -> CMat<R> {
        CMat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<R: Real> Neg for &CMat<R> {
    type Output = CMat<R>;
    fn neg(self) -> CMat<R> {
        CMat { n: self.n, data: self.data.iter().map(|a| -a).collect() }
    }
}

impl<R: Real> Mul for &CMat<R> {
    type Output = CMat<R>;
    fn mul(self, rhs: &CMat<R>) -> CMat<R> {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == R::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

/// ⟨X, Y⟩ = −tr(XY), the invariant form with the longest root of su(n)
/// having squared length 2.
pub fn pairing<R: Real>(x: &CMat<R>, y: &CMat<R>) -> R {
    -(x * y).trace().re
}

/// Hermitian-traceless random generator data → anti-Hermitian su(n) element.
pub fn su_element_from<R: Real>(n: usize, entries: &[(f64, f64)]) -> CMat<R> {
    // entries fill the upper triangle (re, im) and the diagonal (re used)
    let mut h = CMat::<R>::zeros(n);
    let mut it = entries.iter();
    for i in 0..n {
        for j in i..n {
            let &(re, im) = it.next().expect("enough entries");
            if i == j {
                h[(i, i)] = Complex::new(R::from_f(re), R::zero());
            } else {
                h[(i, j)] = Complex::new(R::from_f(re), R::from_f(im));
                h[(j, i)] = Complex::new(R::from_f(re), -R::from_f(im));
            }
        }
    }
    // subtract the trace to land in su(n), then multiply by i
    let tr = h.trace().re / R::from_f(n as f64);
    for i in 0..n {
        h[(i, i)] = h[(i, i)] - Complex::new(tr, R::zero());
    }
    let i_unit = Complex::new(R::zero(), R::one());
    h.scale_c(i_unit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_su2(a: f64, b: f64, c: f64) -> CMat<f64> {
        su_element_from(2, &[(c, 0.0), (a, -b), (-c, 0.0)])
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = CMat::<f64>::zeros(2);
        assert!((&z.exp() - &CMat::identity(2)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn exp_is_unitary_on_skew_input() {
        let x = pauli_su2(0.3, -0.7, 0.2);
        assert!(x.skew_defect() < 1e-15);
        let g = x.exp();
        assert!(g.unitarity_defect() < 1e-13);
    }

    #[test]
    fn exp_matches_su2_closed_form() {
        // exp(i θ n̂·σ) = cos θ + i sin θ (n̂·σ)
        let x = pauli_su2(1.0, 0.0, 0.0); // i σ_x
        let g = x.exp();
        assert!((g.get(0, 0).re - 1.0f64.cos()).abs() < 1e-14);
        assert!((g.get(0, 1).im - 1.0f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn dexp_matches_finite_difference() {
        let x0 = pauli_su2(0.4, 0.2, -0.3);
        let dx = pauli_su2(-0.1, 0.5, 0.7);
        let a = CMat::dexp_left(&x0, &dx);
        // finite difference of exp(X + t DX) at t = 0
        let h = 1e-6;
        let xp = &x0 + &dx.scale(h);
        let xm = &x0 + &dx.scale(-h);
        let g0 = x0.exp();
        let diff = (&xp.exp() - &xm.exp()).scale(1.0 / (2.0 * h));
        let fd = &g0.dagger() * &diff;
        assert!((&a - &fd).frobenius_norm() < 1e-8);
    }

    #[test]
    fn pairing_normalization() {
        // ⟨iσ_z, iσ_z⟩ = −tr(−σ_z²) = 2: the coroot direction has length² 2
        let x = pauli_su2(0.0, 0.0, 1.0);
        assert!((pairing(&x, &x) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn generic_f32_instantiates() {
        let x: CMat<f32> = su_element_from(2, &[(0.5, 0.0), (0.2, 0.1), (-0.5, 0.0)]);
        let g = x.exp();
        assert!(g.unitarity_defect() < 1e-5);
    }
}
