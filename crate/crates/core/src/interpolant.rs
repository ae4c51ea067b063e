//! Unitary interpolants with prescribed nonnegative Wiener–Hopf indices.
//!
//! The scalar step calibrates `c >= 0` so that `||H_{zbar^{d+1} psi + c zbar}|| = 1`;
//! the unimodular AAK error `u` of that symbol then has `ind T_u = 1`, and
//! `u0 = z^{d+1} u` interpolates `psi` with index `d`. Matrix symbols peel one
//! such step per thematic reduction and recurse on the lower block.

use crate::error::{Error, Result};
use crate::hankel::{hankel_norm, Compression};
use crate::matfun::{residual_report, MatSymbol, ResidualReport};
use crate::nehari::{best_approx_from_pair, best_approx_scalar, AAKResult};
use crate::ring::RationalScalar;
use crate::thematic::{reduce_with_pair, superoptimal, FactorizationReport};
use crate::wh_index::{wh_indices, IndexProfile};
use crate::C64;

/// Step of the coarse scan for the calibration constant.
pub const C_STEP: f64 = 0.125;

/// Upper end of the calibration scan.
pub const C_MAX: f64 = 4.0;

/// Target accuracy of `||H|| = 1` after bisection.
pub const CALIBRATION_TOL: f64 = 1e-10;

/// Hankel norms within this of 1 count as 1.
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ScalarStepRecord {
    pub c: f64,
    pub d: i64,
    /// `z^{d+1} u`
    pub u0: RationalScalar,
    /// AAK result for `zbar^{d+1} psi' + c zbar`; `u = e / sigma`.
    pub aak: AAKResult,
}

#[derive(Clone, Debug)]
pub struct InterpolantResult {
    pub u: MatSymbol,
    /// `U - Phi`, analytic.
    pub f: MatSymbol,
    pub residuals: ResidualReport,
    pub requested: Vec<i64>,
    pub profile: Option<IndexProfile>,
    /// No freedom was left: every superoptimal value equals 1.
    pub unique: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct InterpolantOptions {
    /// Tolerance for `||H_Phi|| <= 1` and for grouping unit superoptimal values.
    pub unit_tol: f64,
    /// Skip the index certification.
    pub skip_certificate: bool,
}

impl Default for InterpolantOptions {
    fn default() -> Self {
        Self { unit_tol: UNIT_TOL, skip_certificate: false }
    }
}

fn check_indices(d: &[i64]) -> Result<()> {
    if d.iter().any(|&x| x < 0) {
        return Err(Error::InvalidIndices(format!("negative index in {d:?}")));
    }
    if d.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidIndices(format!("indices {d:?} are not nondecreasing")));
    }
    Ok(())
}

/// Smallest `c` in `[0, C_MAX]` with `||H_{A + c B}|| = 1`, from a coarse scan
/// and bisection on the first crossing.
fn calibrate(comp: &Compression) -> Result<f64> {
    let nu = |c: f64| comp.norm(&[C64::new(1.0, 0.0), C64::new(c, 0.0)]);
    let mut lo = 0.0;
    if (nu(lo) - 1.0).abs() <= CALIBRATION_TOL {
        return Ok(lo);
    }
    let steps = (C_MAX / C_STEP).round() as usize;
    let mut hi = None;
    for i in 1..=steps {
        let c = i as f64 * C_STEP;
        if nu(c) >= 1.0 {
            hi = Some(c);
            break;
        }
        lo = c;
    }
    let mut hi = hi.ok_or(Error::BracketFailed { c_max: C_MAX })?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = nu(mid);
        if (v - 1.0).abs() <= CALIBRATION_TOL {
            return Ok(mid);
        }
        if v < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let c = 0.5 * (lo + hi);
    if (nu(c) - 1.0).abs() <= CALIBRATION_TOL {
        Ok(c)
    } else {
        Err(Error::BracketFailed { c_max: C_MAX })
    }
}

/// Unimodular `u0` with `u0 - psi` analytic and `winding(u0) = d`.
pub fn scalar_interpolant(psi: &RationalScalar, d: i64) -> Result<ScalarStepRecord> {
    if d < 0 {
        return Err(Error::InvalidIndices(format!("negative index {d}")));
    }
    let start = best_approx_scalar(psi)?;
    if start.sigma >= 1.0 - UNIT_TOL {
        return Err(Error::NormNotBelowOne { norm: start.sigma });
    }
    let a = MatSymbol::scalar(start.e.shift(-(d + 1)));
    let b = MatSymbol::scalar(RationalScalar::monomial(-1, C64::new(1.0, 0.0)));
    let comp = Compression::new(&[&a, &b]);
    let c = calibrate(&comp)?;
    let phi_c = &a + &b.scale(C64::new(c, 0.0));
    let pair = comp.schmidt(&phi_c, &[C64::new(1.0, 0.0), C64::new(c, 0.0)])?;
    let aak = best_approx_from_pair(phi_c.get(0, 0), &pair)?;
    if aak.index_of_error != 1 {
        return Err(Error::UnexpectedIndex { index: aak.index_of_error });
    }
    let u0 = aak.e.scale_real(1.0 / aak.sigma).shift(d + 1);
    Ok(ScalarStepRecord { c, d, u0, aak })
}

/// Unitary interpolant of `Psi` (`||H_Psi|| < 1`) with indices `d`.
pub fn matrix_interpolant(psi: &MatSymbol, d: &[i64]) -> Result<InterpolantResult> {
    let u = matrix_interpolant_symbol(psi, d)?;
    finish(psi, u, d.to_vec(), false)
}

fn matrix_interpolant_symbol(psi: &MatSymbol, d: &[i64]) -> Result<MatSymbol> {
    let n = psi.size();
    if d.len() != n {
        return Err(Error::SizeMismatch(format!("{} indices for size {n}", d.len())));
    }
    check_indices(d)?;
    if n == 1 {
        return Ok(MatSymbol::scalar(scalar_interpolant(psi.get(0, 0), d[0])?.u0));
    }
    let sup = superoptimal(psi)?;
    if sup.t[0] >= 1.0 - UNIT_TOL {
        return Err(Error::NormNotBelowOne { norm: sup.t[0] });
    }
    let d0 = d[0];
    let a = sup.error.shift(-(d0 + 1));
    let b = MatSymbol::scalar_identity(n, &RationalScalar::monomial(-1, C64::new(1.0, 0.0)));
    let comp = Compression::new(&[&a, &b]);
    let c = calibrate(&comp)?;
    let phi_c = &a + &b.scale(C64::new(c, 0.0));
    let pair = comp.schmidt(&phi_c, &[C64::new(1.0, 0.0), C64::new(c, 0.0)])?;
    let step = reduce_with_pair(&phi_c, &pair)?;
    if step.k != 1 {
        return Err(Error::UnexpectedIndex { index: step.k });
    }
    let u0 = step.u.shift(d0 + 1);
    let lower = step.psi.as_ref().expect("lower block for n > 1").shift(d0 + 1);
    let norm = hankel_norm(&lower);
    if norm >= 1.0 - UNIT_TOL {
        return Err(Error::NormNotBelowOne { norm });
    }
    let u1 = matrix_interpolant_symbol(&lower, &d[1..])?;
    Ok(step.assemble(&u0, Some(&u1)))
}

fn finish(phi: &MatSymbol, u: MatSymbol, requested: Vec<i64>, unique: bool) -> Result<InterpolantResult> {
    let diff = &u - phi;
    let f = diff.map(|e| e.analytic_part().cleaned());
    let residuals = residual_report(&u, phi)?;
    Ok(InterpolantResult { u, f, residuals, requested, profile: None, unique })
}

/// Unitary interpolant of `Phi` whose nonnegative indices are `d_tail`; the
/// negative indices are forced to `-k_j` over the unit superoptimal values.
pub fn unitary_interpolant(phi: &MatSymbol, d_tail: &[i64]) -> Result<InterpolantResult> {
    unitary_interpolant_with(phi, d_tail, &InterpolantOptions::default())
}

pub fn unitary_interpolant_with(
    phi: &MatSymbol,
    d_tail: &[i64],
    opts: &InterpolantOptions,
) -> Result<InterpolantResult> {
    let norm = hankel_norm(phi);
    if norm > 1.0 + opts.unit_tol {
        return Err(Error::NormTooLarge { norm });
    }
    let report = superoptimal(phi)?;
    let mut result = interpolant_from_report(phi, &report, d_tail, opts)?;
    if !opts.skip_certificate {
        result.profile = Some(wh_indices(&result.u)?);
    }
    Ok(result)
}

/// As [`unitary_interpolant_with`], reusing a superoptimal report of `Phi`.
pub fn interpolant_from_report(
    phi: &MatSymbol,
    report: &FactorizationReport,
    d_tail: &[i64],
    opts: &InterpolantOptions,
) -> Result<InterpolantResult> {
    let n = phi.size();
    let r = report.count_at_least(1.0, opts.unit_tol);
    if d_tail.len() != n - r {
        return Err(Error::WrongTailLength { expected: n - r, got: d_tail.len() });
    }
    check_indices(d_tail)?;
    if r == n {
        return finish(phi, report.error.clone(), Vec::new(), true);
    }
    if r == 0 {
        return matrix_interpolant(phi, d_tail).map(|mut res| {
            res.requested = d_tail.to_vec();
            res
        });
    }
    // peel the unit steps, interpolate the remaining lower block
    let steps = &report.chain[..r];
    let tail_psi = steps[r - 1].psi.as_ref().expect("lower block remains when r < n");
    let mut u = matrix_interpolant_symbol(tail_psi, d_tail)?;
    for step in steps.iter().rev() {
        u = step.assemble(&step.u, Some(&u));
    }
    finish(phi, u, d_tail.to_vec(), false)
}
