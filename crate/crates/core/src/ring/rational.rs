use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use super::{roots, LaurentScalar};
use crate::error::{Error, Result};
use crate::grid;
use crate::C64;

/// Poles closer than this to the unit circle are rejected.
pub const POLE_CIRCLE_TOL: f64 = 1e-10;

/// Poles closer than this (relative) are treated as the same pole when
/// forming common denominators.
const POLE_MERGE_TOL: f64 = 1e-12;

/// Largest change on the circle, relative to the sup, accepted from one
/// cancellation in [`RationalScalar::simplified`].
const SIMPLIFY_DRIFT: f64 = 1e-10;

/// A rational function on the circle, `num(z) / prod_r l_r(z)`.
///
/// `num` is a Laurent polynomial (so monomial shifts live there) and every
/// pole `r` is nonzero and off the circle. The denominator factor is
/// `l_r(z) = 1 - z/r` for `|r| > 1` and `l_r(z) = z - r` for `|r| < 1`, so a
/// purely analytic denominator satisfies `den(0) = 1`.
#[derive(Clone)]
pub struct RationalScalar {
    num: LaurentScalar,
    poles: Vec<C64>,
}

fn pole_factor(r: C64, z: C64) -> C64 {
    if r.norm() > 1.0 {
        C64::new(1.0, 0.0) - z / r
    } else {
        z - r
    }
}

fn pole_factor_poly(r: C64) -> LaurentScalar {
    if r.norm() > 1.0 {
        LaurentScalar::poly(vec![C64::new(1.0, 0.0), -C64::new(1.0, 0.0) / r])
    } else {
        LaurentScalar::poly(vec![-r, C64::new(1.0, 0.0)])
    }
}

fn same_pole(a: C64, b: C64) -> bool {
    (a - b).norm() <= POLE_MERGE_TOL * a.norm().max(1.0)
}

/// Least common multiple of two pole multisets, plus the poles each side lacks.
pub(crate) fn pole_lcm(a: &[C64], b: &[C64]) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
    let mut used = vec![false; a.len()];
    let mut a_missing = Vec::new();
    for &q in b {
        match (0..a.len()).find(|&i| !used[i] && same_pole(a[i], q)) {
            Some(i) => used[i] = true,
            None => a_missing.push(q),
        }
    }
    let b_missing: Vec<C64> = (0..a.len()).filter(|&i| !used[i]).map(|i| a[i]).collect();
    let mut lcm = a.to_vec();
    lcm.extend_from_slice(&a_missing);
    (lcm, a_missing, b_missing)
}

pub(crate) fn product_of_factors(poles: &[C64]) -> LaurentScalar {
    poles
        .iter()
        .fold(LaurentScalar::one(), |acc, &r| &acc * &pole_factor_poly(r))
}

fn check_pole(r: C64) -> Result<()> {
    let d = (r.norm() - 1.0).abs();
    if d <= POLE_CIRCLE_TOL {
        return Err(Error::BoundaryRoot { modulus: r.norm(), distance: d });
    }
    Ok(())
}

impl RationalScalar {
    /// Builds `num / prod l_r`. Poles must be nonzero and off the circle.
    pub fn new(num: LaurentScalar, poles: Vec<C64>) -> Result<Self> {
        for &r in &poles {
            check_pole(r)?;
            if r.norm() == 0.0 {
                return Err(Error::DegenerateInput("pole at the origin; use a monomial shift".into()));
            }
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        Ok(Self { num, poles })
    }

    pub fn zero() -> Self {
        Self { num: LaurentScalar::zero(), poles: Vec::new() }
    }

    pub fn one() -> Self {
        Self::laurent(LaurentScalar::one())
    }

    pub fn constant(c: C64) -> Self {
        Self::laurent(LaurentScalar::constant(c))
    }

    pub fn real(c: f64) -> Self {
        Self::constant(C64::new(c, 0.0))
    }

    /// `c z^k`
    pub fn monomial(k: i64, c: C64) -> Self {
        Self::laurent(LaurentScalar::monomial(k, c))
    }

    pub fn laurent(p: LaurentScalar) -> Self {
        Self { num: p, poles: Vec::new() }
    }

    /// `num / den` for Laurent polynomials; the denominator is factored.
    pub fn from_fraction(num: &LaurentScalar, den: &LaurentScalar) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DegenerateInput("zero denominator".into()));
        }
        let den_roots = roots(den)?;
        let lead = *den.coeffs().last().unwrap();
        let mut scale = lead;
        let mut poles = Vec::new();
        let mut shift = den.deg_lo();
        for r in den_roots {
            if r.norm() == 0.0 {
                shift += 1;
                continue;
            }
            check_pole(r)?;
            if r.norm() > 1.0 {
                // z - r = -r (1 - z/r)
                scale *= -r;
            }
            poles.push(r);
        }
        let num = num.shift(-shift).scale(C64::new(1.0, 0.0) / scale);
        Self::new(num, poles)
    }

    pub fn num(&self) -> &LaurentScalar {
        &self.num
    }

    pub fn poles(&self) -> &[C64] {
        &self.poles
    }

    /// Denominator polynomial `prod l_r`.
    pub fn den(&self) -> LaurentScalar {
        product_of_factors(&self.poles)
    }

    pub fn inside_poles(&self) -> Vec<C64> {
        self.poles.iter().copied().filter(|r| r.norm() < 1.0).collect()
    }

    pub fn outside_poles(&self) -> Vec<C64> {
        self.poles.iter().copied().filter(|r| r.norm() > 1.0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the representation has no negative powers and no poles in the disk.
    pub fn is_structurally_analytic(&self) -> bool {
        self.is_zero() || (self.num.deg_lo() >= 0 && self.poles.iter().all(|r| r.norm() > 1.0))
    }

    /// True when the representation is a Laurent polynomial with no poles.
    pub fn is_laurent(&self) -> bool {
        self.poles.is_empty()
    }

    /// Largest ratio by which a pole approaches the circle: `|r|` inside,
    /// `1/|r|` outside. Governs FFT aliasing.
    pub fn pole_radius(&self) -> f64 {
        self.poles
            .iter()
            .map(|r| if r.norm() < 1.0 { r.norm() } else { 1.0 / r.norm() })
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut v = self.num.eval(z);
        for &r in &self.poles {
            v /= pole_factor(r, z);
        }
        v
    }

    pub fn grid_values(&self, n: usize) -> Vec<C64> {
        grid::points(n).iter().map(|&z| self.eval(z)).collect()
    }

    /// Grid large enough for FFT coefficients of this function.
    pub fn natural_grid(&self, base: usize) -> usize {
        let width = (self.num.deg_hi() - self.num.deg_lo()).unsigned_abs() as usize + self.poles.len();
        grid::grid_for_decay(base.max(4 * width.next_power_of_two()), self.pole_radius())
    }

    /// Wrapped Fourier spectrum on an `n`-point grid.
    pub fn spectrum(&self, n: usize) -> Vec<C64> {
        if self.poles.is_empty() && (self.num.deg_hi() - self.num.deg_lo()) < n as i64 {
            // exact for Laurent polynomials that fit the grid
            let mut s = vec![C64::new(0.0, 0.0); n];
            for (k, c) in self.num.terms() {
                s[k.rem_euclid(n as i64) as usize] += c;
            }
            return s;
        }
        grid::fourier_from_values(&self.grid_values(n))
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        Self { num: self.num.scale(s), poles: self.poles.clone() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `z^k f`
    pub fn shift(&self, k: i64) -> Self {
        Self { num: self.num.shift(k), poles: self.poles.clone() }
    }

    /// Boundary conjugate: the rational function equal to `conj(f(z))` on the circle.
    pub fn conj(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        // on the circle conj(l_r(z)) = l_rho(z) / z with rho = 1 / conj(r)
        let num = self.num.conj().shift(self.poles.len() as i64);
        let poles = self.poles.iter().map(|&r| C64::new(1.0, 0.0) / r.conj()).collect();
        Self { num, poles }
    }

    /// Cancels poles against numerator zeros where `|num(r)|` is below
    /// `tol` relative to the numerator's size at `r`.
    ///
    /// Inside a cluster of nearby poles an admissible-looking cancellation can
    /// still move the function a lot, so each one is kept only if the values
    /// on the circle change by at most `SIMPLIFY_DRIFT` relative.
    pub fn simplified(&self, tol: f64) -> Self {
        if self.is_zero() || self.poles.is_empty() {
            return self.clone();
        }
        let probe = (2 * (self.num.coeffs().len() + self.poles.len())).max(64).next_power_of_two();
        let reference = self.grid_values(probe);
        let scale = reference.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut num = self.num.clone();
        let mut kept: Vec<C64> = Vec::new();
        for (i, &r) in self.poles.iter().enumerate() {
            let shift = num.deg_lo();
            let p = num.shift(-shift);
            let size: f64 = p
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c.norm() * r.norm().powi(k as i32))
                .sum();
            let (q, rem) = p.div_linear(r);
            if rem.norm() <= tol * size {
                let cand = if r.norm() > 1.0 {
                    // p / (1 - z/r) = -r p / (z - r)
                    q.scale(-r).shift(shift)
                } else {
                    q.shift(shift)
                };
                let mut poles = kept.clone();
                poles.extend_from_slice(&self.poles[i + 1..]);
                let trial = Self { num: cand, poles };
                let drift = trial
                    .grid_values(probe)
                    .iter()
                    .zip(&reference)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                if drift <= SIMPLIFY_DRIFT * scale {
                    num = trial.num;
                    continue;
                }
            }
            kept.push(r);
        }
        if num.is_zero() {
            return Self::zero();
        }
        Self { num, poles: kept }
    }

    /// `self / other`; zeros of `other` become poles. Common factors are left
    /// for [`simplified`](Self::simplified).
    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DegenerateInput("division by zero".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let s = other.num.deg_lo();
        let p = other.num.shift(-s);
        let mut scale = *p.coeffs().last().unwrap();
        let mut poles = self.poles.clone();
        for r in roots(&p)? {
            check_pole(r)?;
            if r.norm() > 1.0 {
                scale *= -r;
            }
            poles.push(r);
        }
        let num = (&self.num * &other.den()).shift(-s).scale(C64::new(1.0, 0.0) / scale);
        Self::new(num, poles)
    }

    /// Drops negligible numerator coefficients.
    pub fn cleaned(&self) -> Self {
        Self { num: self.num.cleaned(), poles: self.poles.clone() }
    }

    /// Exact split `f = P_-(f) + P_+(f)` into the strictly antianalytic part
    /// (in `H^2_-`) and the analytic part, by partial fractions.
    pub fn split(&self) -> (Self, Self) {
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let k = (-self.num.deg_lo()).max(0);
        let p = self.num.shift(k);
        let inside = self.inside_poles();
        let outside = self.outside_poles();
        if k == 0 && inside.is_empty() {
            return (Self::zero(), self.clone());
        }
        let d_in = product_of_factors(&inside).shift(k);
        let d_out = product_of_factors(&outside);
        let d = &d_in * &d_out;
        let (q, rem) = if p.poly_degree() >= d.poly_degree() {
            p.div_rem(&d)
        } else {
            (LaurentScalar::zero(), p)
        };
        if outside.is_empty() {
            let anti = Self { num: rem.shift(-k), poles: inside };
            return (anti, Self::laurent(q));
        }
        let m_in = d_in.poly_degree();
        let m_out = d_out.poly_degree();
        let (a, b) = solve_bezout(&d_out, m_in, &d_in, m_out, &rem);
        let anti = Self { num: a.shift(-k), poles: inside };
        let ana = Self { num: &(&q * &d_out) + &b, poles: outside };
        (anti.nonzero_or_zero(), ana.nonzero_or_zero())
    }

    fn nonzero_or_zero(self) -> Self {
        if self.num.is_zero() {
            Self::zero()
        } else {
            self
        }
    }

    /// `P_-(f)`
    pub fn antianalytic_part(&self) -> Self {
        self.split().0
    }

    /// `P_+(f)`
    pub fn analytic_part(&self) -> Self {
        self.split().1
    }

    /// Checks that no pole lies in the closed disk `|z| <= 1 + 1e-10`.
    pub fn check_disk_free_denominator(&self) -> Result<()> {
        for &r in &self.poles {
            if r.norm() <= 1.0 + POLE_CIRCLE_TOL {
                return Err(Error::DiskZeroDenominator { root: format!("{:.6}{:+.6}i", r.re, r.im) });
            }
        }
        Ok(())
    }

    /// Sup of `|f|` over an `n`-point grid.
    pub fn sup_on_grid(&self, n: usize) -> f64 {
        self.grid_values(n).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Solves `a * p + b * q = r` with `deg a < deg q`, `deg b < deg p`
/// (here `p = d_out` of degree `m_out`, `q = d_in` of degree `m_in`).
fn solve_bezout(
    p: &LaurentScalar,
    m_a: usize,
    q: &LaurentScalar,
    m_b: usize,
    r: &LaurentScalar,
) -> (LaurentScalar, LaurentScalar) {
    let n = m_a + m_b;
    let pc = p.poly_coeffs();
    let qc = q.poly_coeffs();
    let rc = r.poly_coeffs();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for j in 0..m_a {
        for (i, c) in pc.iter().enumerate() {
            if i + j < n {
                m[(i + j, j)] += c;
            }
        }
    }
    for j in 0..m_b {
        for (i, c) in qc.iter().enumerate() {
            if i + j < n {
                m[(i + j, m_a + j)] += c;
            }
        }
    }
    let mut rhs = DVector::<C64>::zeros(n);
    for (i, c) in rc.iter().enumerate().take(n) {
        rhs[i] = *c;
    }
    let sol = m
        .clone()
        .full_piv_lu()
        .solve(&rhs)
        .unwrap_or_else(|| m.svd(true, true).solve(&rhs, 1e-300).expect("svd solve"));
    let a = LaurentScalar::poly(sol.rows(0, m_a).iter().copied().collect());
    let b = LaurentScalar::poly(sol.rows(m_a, m_b).iter().copied().collect());
    (a, b)
}

impl fmt::Debug for RationalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}] / poles {:?}", self.num, self.poles)
    }
}

impl Add for &RationalScalar {
    type Output = RationalScalar;
    fn add(self, rhs: &RationalScalar) -> RationalScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (lcm, self_missing, rhs_missing) = pole_lcm(&self.poles, &rhs.poles);
        let a = &self.num * &product_of_factors(&self_missing);
        let b = &rhs.num * &product_of_factors(&rhs_missing);
        RationalScalar { num: &a + &b, poles: lcm }.nonzero_or_zero()
    }
}

impl Sub for &RationalScalar {
    type Output = RationalScalar;
    fn sub(self, rhs: &RationalScalar) -> RationalScalar {
        self + &(-rhs)
    }
}

impl Neg for &RationalScalar {
    type Output = RationalScalar;
    fn neg(self) -> RationalScalar {
        RationalScalar { num: -&self.num, poles: self.poles.clone() }
    }
}

impl Mul for &RationalScalar {
    type Output = RationalScalar;
    fn mul(self, rhs: &RationalScalar) -> RationalScalar {
        if self.is_zero() || rhs.is_zero() {
            return RationalScalar::zero();
        }
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&rhs.poles);
        RationalScalar { num: &self.num * &rhs.num, poles }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalScalar {
            type Output = RationalScalar;
            fn $m(self, rhs: RationalScalar) -> RationalScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
