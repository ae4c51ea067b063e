use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::C64;

/// Relative magnitude below which a coefficient is dropped.
pub const DROP_TOL: f64 = 1e-13;

/// A finite Laurent polynomial `sum_k c_k z^k` with complex coefficients.
///
/// Coefficients are stored densely from degree `lo` upward. The zero
/// polynomial has no coefficients.
#[derive(Clone, PartialEq)]
pub struct LaurentScalar {
    lo: i64,
    coeffs: Vec<C64>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self { lo: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::from_coeffs(0, vec![c])
    }

    /// `c z^k`
    pub fn monomial(k: i64, c: C64) -> Self {
        Self::from_coeffs(k, vec![c])
    }

    /// Builds `sum_i coeffs[i] z^(lo + i)`, trimming exact zeros at both ends.
    pub fn from_coeffs(lo: i64, coeffs: Vec<C64>) -> Self {
        let mut p = Self { lo, coeffs };
        p.trim_exact();
        p
    }

    /// Polynomial `sum_i coeffs[i] z^i`.
    pub fn poly(coeffs: Vec<C64>) -> Self {
        Self::from_coeffs(0, coeffs)
    }

    pub fn real_poly(coeffs: &[f64]) -> Self {
        Self::poly(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut c = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Self::poly(c)
    }

    fn trim_exact(&mut self) {
        let zero = C64::new(0.0, 0.0);
        while self.coeffs.last() == Some(&zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| **c == zero).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.lo = 0;
            return;
        }
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
    }

    /// Zeroes every coefficient below `tol * max|c|` and trims.
    pub fn dropped(&self, tol: f64) -> Self {
        let m = self.max_abs();
        if m == 0.0 {
            return Self::zero();
        }
        let cut = tol * m;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| if c.norm() <= cut { C64::new(0.0, 0.0) } else { *c })
            .collect();
        Self::from_coeffs(self.lo, coeffs)
    }

    /// Applies the default drop tolerance.
    pub fn cleaned(&self) -> Self {
        self.dropped(DROP_TOL)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg_lo(&self) -> i64 {
        self.lo
    }

    /// Highest degree; equals `deg_lo() - 1` for the zero polynomial.
    pub fn deg_hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: i64) -> C64 {
        let i = k - self.lo;
        if i < 0 || i >= self.coeffs.len() as i64 {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    /// Dense coefficients from `deg_lo()` to `deg_hi()`.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `(degree, coefficient)` pairs with nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(move |(i, c)| (self.lo + i as i64, *c))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, z: C64) -> C64 {
        if self.coeffs.is_empty() {
            return C64::new(0.0, 0.0);
        }
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.lo as i32)
    }

    /// `z^k p`
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { lo: self.lo + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_coeffs(self.lo, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Boundary conjugate: the Laurent polynomial equal to `conj(p(z))` on the circle.
    pub fn conj(&self) -> Self {
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        Self::from_coeffs(-self.deg_hi(), coeffs)
    }

    /// Splits into the part with degrees `< 0` and the part with degrees `>= 0`.
    pub fn split_at_zero(&self) -> (Self, Self) {
        let mut neg = Vec::new();
        let mut pos = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if self.lo + (i as i64) < 0 {
                neg.push(*c);
            } else {
                pos.push(*c);
            }
        }
        let pos_lo = self.lo.max(0);
        (Self::from_coeffs(self.lo, neg), Self::from_coeffs(pos_lo, pos))
    }

    /// Polynomial coefficients `c_0..c_deg`, requiring `deg_lo() >= 0`.
    pub fn poly_coeffs(&self) -> Vec<C64> {
        assert!(self.is_zero() || self.lo >= 0, "not a polynomial");
        let mut out = vec![C64::new(0.0, 0.0); self.lo.max(0) as usize];
        out.extend_from_slice(&self.coeffs);
        out
    }

    /// Degree as a polynomial (requires `deg_lo() >= 0`); zero has degree 0 here.
    pub fn poly_degree(&self) -> usize {
        if self.is_zero() {
            0
        } else {
            self.deg_hi().max(0) as usize
        }
    }

    /// Synthetic division by `(z - r)`; returns quotient and remainder.
    pub fn div_linear(&self, r: C64) -> (Self, C64) {
        let c = self.poly_coeffs();
        if c.is_empty() {
            return (Self::zero(), C64::new(0.0, 0.0));
        }
        let n = c.len();
        let mut q = vec![C64::new(0.0, 0.0); n - 1];
        let mut acc = C64::new(0.0, 0.0);
        for i in (0..n).rev() {
            acc = acc * r + c[i];
            if i > 0 {
                q[i - 1] = acc;
            }
        }
        (Self::poly(q), acc)
    }

    /// Polynomial long division `self = q * d + rem`, both polynomials.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let mut r = self.poly_coeffs();
        let dc = d.poly_coeffs();
        let dn = dc.len() - 1;
        let lead = dc[dn];
        if r.len() <= dn {
            return (Self::zero(), Self::poly(r));
        }
        let mut q = vec![C64::new(0.0, 0.0); r.len() - dn];
        for i in (0..q.len()).rev() {
            let f = r[i + dn] / lead;
            q[i] = f;
            for (j, dj) in dc.iter().enumerate() {
                r[i + j] -= f * dj;
            }
        }
        r.truncate(dn);
        (Self::poly(q), Self::poly(r))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * (self.lo + i as i64) as f64)
            .collect::<Vec<_>>();
        Self::from_coeffs(self.lo - 1, coeffs)
    }

    /// Values on the `n`-point grid `exp(2 pi i k / n)`.
    pub fn grid_values(&self, n: usize) -> Vec<C64> {
        crate::grid::points(n).iter().map(|&z| self.eval(z)).collect()
    }
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)z^{}", c.re, c.im, k)?;
        }
        Ok(())
    }
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(rhs.lo);
        let hi = self.deg_hi().max(rhs.deg_hi());
        let coeffs = (lo..=hi).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        LaurentScalar::from_coeffs(lo, coeffs)
    }
}

impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &LaurentScalar) -> LaurentScalar {
        self + &(-rhs)
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar { lo: self.lo, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        if self.is_zero() || rhs.is_zero() {
            return LaurentScalar::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LaurentScalar::from_coeffs(self.lo + rhs.lo, out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentScalar {
            type Output = LaurentScalar;
            fn $m(self, rhs: LaurentScalar) -> LaurentScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn arithmetic_and_eval() {
        let p = LaurentScalar::from_coeffs(-1, vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let q = LaurentScalar::real_poly(&[0.0, 1.0]);
        let pq = &p * &q;
        assert_eq!(pq.deg_lo(), 0);
        assert_eq!(pq.coeff(1), c(2.0, 0.0));
        let z = C64::from_polar(1.0, 0.3);
        assert!((pq.eval(z) - p.eval(z) * q.eval(z)).norm() < 1e-14);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn conj_matches_boundary_values() {
        let p = LaurentScalar::from_coeffs(-2, vec![c(1.0, 2.0), c(0.0, 0.0), c(-0.5, 0.25), c(3.0, 0.0)]);
        for k in 0..7 {
            let z = C64::from_polar(1.0, 0.9 * k as f64);
            assert!((p.conj().eval(z) - p.eval(z).conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn division() {
        let p = LaurentScalar::from_roots(&[c(0.5, 0.0), c(2.0, 1.0), c(-1.0, 0.0)]);
        let (q, r) = p.div_linear(c(2.0, 1.0));
        assert!(r.norm() < 1e-13);
        assert_eq!(q.poly_degree(), 2);
        let d = LaurentScalar::from_roots(&[c(0.5, 0.0)]);
        let (q2, rem) = p.div_rem(&d);
        assert!(rem.max_abs() < 1e-13);
        assert!((&(&q2 * &d) - &p).max_abs() < 1e-13);
    }

    #[test]
    fn drop_tolerance_trims_support() {
        let p = LaurentScalar::from_coeffs(-1, vec![c(1e-16, 0.0), c(1.0, 0.0), c(1e-15, 0.0)]);
        let q = p.cleaned();
        assert_eq!((q.deg_lo(), q.deg_hi()), (0, 0));
    }
}
