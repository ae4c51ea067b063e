//! Scalar factorization primitives: spectral factor, inner–outer split, winding.

use std::f64::consts::PI;

use super::{roots, LaurentScalar, RationalScalar};
use crate::error::{Error, Result};
use crate::grid;
use crate::C64;

/// Floor below which a spectral density counts as not positive.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// Numerator roots within this distance of the circle are refused.
pub const BOUNDARY_ROOT_TOL: f64 = 1e-8;

/// Minimum modulus on the circle for a winding number to be meaningful.
pub const WINDING_FLOOR: f64 = 1e-8;

/// Outer polynomial `o` with `o(0) > 0` and `|o|^2 = rho` on the circle.
///
/// `rho` must be hermitian-symmetric and positive on the circle. Roots of
/// `z^m rho(z)` come in pairs `r, 1/conj(r)`; the factor keeps those outside
/// the disk.
pub fn spectral_factor(rho: &LaurentScalar) -> Result<LaurentScalar> {
    if rho.is_zero() {
        return Err(Error::NotPositive { min: 0.0 });
    }
    let scale = rho.max_abs();
    let mismatch = (rho.deg_lo().min(-rho.deg_hi())..=rho.deg_hi().max(-rho.deg_lo()))
        .map(|k| (rho.coeff(-k) - rho.coeff(k).conj()).norm())
        .fold(0.0, f64::max);
    if mismatch > 1e-12 * scale {
        return Err(Error::Asymmetric { mismatch });
    }
    let m = rho.deg_hi().max(0);
    let n = (16 * (m as usize + 1)).next_power_of_two().max(256);
    let min = rho
        .grid_values(n)
        .iter()
        .map(|v| v.re)
        .fold(f64::INFINITY, f64::min);
    if min < POSITIVITY_FLOOR {
        return Err(Error::NotPositive { min });
    }
    let mean = rho.coeff(0).re;
    if m == 0 {
        return Ok(LaurentScalar::constant(C64::new(mean.sqrt(), 0.0)));
    }
    let poly = rho.shift(m);
    let all = roots(&poly)?;
    let outside: Vec<C64> = all.into_iter().filter(|r| r.norm() > 1.0).collect();
    if outside.len() != m as usize {
        return Err(Error::NotPositive { min });
    }
    let mut o = LaurentScalar::one();
    for r in &outside {
        o = &o * &LaurentScalar::poly(vec![C64::new(1.0, 0.0), -C64::new(1.0, 0.0) / r]);
    }
    // |o|^2 has mean sum |o_k|^2; match the mean of rho
    let c = (mean / o.l2_norm().powi(2)).sqrt();
    Ok(o.scale(C64::new(c, 0.0)))
}

/// Inner–outer split of a nonzero analytic-type rational function.
///
/// The inner part collects the monomial shift and the Blaschke factors of
/// numerator zeros in the open disk; the outer part is normalized to
/// `outer(0) > 0`. Constants split as `(c/|c|, |c|)`.
pub fn inner_outer(f: &RationalScalar) -> Result<(RationalScalar, RationalScalar)> {
    if f.is_zero() {
        return Err(Error::DegenerateInput("inner-outer split of zero".into()));
    }
    if !f.inside_poles().is_empty() {
        return Err(Error::NotAnalytic("poles inside the disk".into()));
    }
    let num = f.num();
    let shift = num.deg_lo();
    let p = num.shift(-shift);
    let zs = roots(&p)?;
    let mut inner_num = LaurentScalar::monomial(shift, C64::new(1.0, 0.0));
    let mut inner_poles = Vec::new();
    let mut outer_num = p.clone();
    for r in zs {
        let d = (r.norm() - 1.0).abs();
        if d <= BOUNDARY_ROOT_TOL {
            return Err(Error::BoundaryRoot { modulus: r.norm(), distance: d });
        }
        if r.norm() < 1.0 {
            let (q, _) = outer_num.div_linear(r);
            // (z - r) = B_r(z) (1 - conj(r) z), B_r the Blaschke factor
            outer_num = &q * &LaurentScalar::poly(vec![C64::new(1.0, 0.0), -r.conj()]);
            inner_num = &inner_num * &LaurentScalar::poly(vec![-r, C64::new(1.0, 0.0)]);
            if r.norm() > 0.0 {
                inner_poles.push(C64::new(1.0, 0.0) / r.conj());
            } else {
                // B_0 = z
            }
        }
    }
    let outer = RationalScalar::new(outer_num, f.poles().to_vec())?;
    let o0 = outer.eval(C64::new(0.0, 0.0));
    let phase = o0 / o0.norm();
    let inner = RationalScalar::new(inner_num.scale(phase), inner_poles)?;
    let outer = outer.scale(phase.conj());
    Ok((inner, outer))
}

/// Winding number of `f` around the origin along the unit circle.
///
/// The grid is doubled until every argument increment is below `pi/2`.
pub fn winding_of<F: Fn(C64) -> C64>(f: F, start: usize) -> Result<i64> {
    let mut n = start.max(64).next_power_of_two();
    loop {
        let vals: Vec<C64> = grid::points(n).iter().map(|&z| f(z)).collect();
        let min = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        if !(min >= WINDING_FLOOR) {
            if n < grid::MAX_GRID {
                n *= 2;
                continue;
            }
            return Err(Error::NearZeroOnCircle { min_modulus: min });
        }
        let mut total = 0.0;
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let step = (vals[(k + 1) % n] / vals[k]).arg();
            max_step = max_step.max(step.abs());
            total += step;
        }
        if max_step < PI / 2.0 {
            return Ok((total / (2.0 * PI)).round() as i64);
        }
        if n >= grid::MAX_GRID {
            return Err(Error::NearZeroOnCircle { min_modulus: min });
        }
        n *= 2;
    }
}

/// Winding number of a rational function on the circle.
pub fn winding(f: &RationalScalar) -> Result<i64> {
    let start = 8 * (f.num().coeffs().len() + f.poles().len());
    winding_of(|z| f.eval(z), start.max(256))
}
