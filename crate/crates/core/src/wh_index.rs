//! Wiener–Hopf index profiles from Toeplitz kernel dimensions.
//!
//! With all indices of `z^{-M} U` negative, `g(k) = dim ker T_{z^{k-M} U}`
//! equals `sum_j max(a_j - k, 0)` for `a_j = M - d_j`. First differences of
//! `g` count the `a_j` above each level, second differences give their
//! multiplicities. No factorization is ever computed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::{toeplitz_kernel_dim_with, DEFAULT_DEG_CAP};
use crate::interpolant::{InterpolantResult, UNIT_TOL};
use crate::matfun::{residual_report, unitarity_residual, MatSymbol};
use crate::thematic::FactorizationReport;

/// Unitarity required of symbols handed to [`wh_indices`].
pub const UNITARY_PRECONDITION: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexProfile {
    /// Indices `d_0 <= ... <= d_{n-1}`.
    pub d: Vec<i64>,
    /// `(k, dim ker T_{z^{k-M} U})`
    pub kernel_sweep: Vec<(i64, usize)>,
    pub det_winding: i64,
    pub shift_m: i64,
}

impl IndexProfile {
    /// The sweep value predicted by the profile.
    pub fn predicted(&self, k: i64) -> usize {
        self.d.iter().map(|&d| (self.shift_m - d - k).max(0) as usize).sum()
    }
}

/// Index profile of a unitary-valued symbol.
pub fn wh_indices(u: &MatSymbol) -> Result<IndexProfile> {
    wh_indices_with(u, false)
}

/// As [`wh_indices`]; `relaxed` accepts any pointwise invertible symbol.
pub fn wh_indices_with(u: &MatSymbol, relaxed: bool) -> Result<IndexProfile> {
    if !relaxed {
        let res = unitarity_residual(u);
        if res > UNITARY_PRECONDITION {
            return Err(Error::NotUnitary { residual: res });
        }
    }
    let n = u.size() as i64;
    let det = u.det();
    let det_winding = u.det_winding()?;
    let width = (det.num().deg_hi() - det.num().deg_lo()) + det.poles().len() as i64;
    let mut slack = width + 2;
    for _ in 0..6 {
        let m = det_winding.max(0) + slack;
        if let Some(profile) = sweep(u, m, n, det_winding, relaxed)? {
            return Ok(profile);
        }
        slack *= 2;
    }
    Err(Error::Unstable { cap: DEFAULT_DEG_CAP })
}

/// Runs the sweep at shift `m`; `None` when `m` is too small.
fn sweep(u: &MatSymbol, m: i64, n: i64, det_winding: i64, relaxed: bool) -> Result<Option<IndexProfile>> {
    let dim = |k: i64| toeplitz_kernel_dim_with(&u.shift(k - m), DEFAULT_DEG_CAP, relaxed);
    let g0 = dim(0)? as i64;
    if g0 != n * m - det_winding {
        return Ok(None);
    }
    let mut g = vec![g0];
    let mut k = 0;
    while *g.last().unwrap() > 0 {
        k += 1;
        if k > 4 * m + 64 {
            return Err(Error::Unstable { cap: DEFAULT_DEG_CAP });
        }
        g.push(dim(k)? as i64);
    }
    g.push(0);
    // c[k] = #{a_j > k}
    let c: Vec<i64> = g.windows(2).map(|w| w[0] - w[1]).collect();
    let mut a = Vec::new();
    for _ in 0..(n - c[0]).max(0) {
        a.push(0);
    }
    for kk in 0..c.len() {
        let next = c.get(kk + 1).copied().unwrap_or(0);
        for _ in 0..(c[kk] - next).max(0) {
            a.push(kk as i64 + 1);
        }
    }
    if a.len() as i64 != n {
        return Err(Error::Unstable { cap: DEFAULT_DEG_CAP });
    }
    let mut d: Vec<i64> = a.iter().map(|aj| m - aj).collect();
    d.sort_unstable();
    if d.iter().sum::<i64>() != det_winding {
        return Ok(None);
    }
    let kernel_sweep = g[..g.len() - 1].iter().enumerate().map(|(k, &v)| (k as i64, v as usize)).collect();
    Ok(Some(IndexProfile { d, kernel_sweep, det_winding, shift_m: m }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyTolerances {
    pub unitarity: f64,
    pub analyticity: f64,
    pub fourier: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self { unitarity: 1e-8, analyticity: 1e-7, fourier: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub passed: bool,
    pub checks: Vec<Check>,
    pub profile: Option<IndexProfile>,
    /// Number of unit superoptimal values, when a report was supplied.
    pub unit_count: Option<usize>,
    pub notes: Vec<String>,
}

fn check(name: &str, passed: bool, measured: impl ToString, expected: impl ToString) -> Check {
    Check { name: name.into(), passed, measured: measured.to_string(), expected: expected.to_string() }
}

/// Independent certificate for an interpolant `U` of `Phi`: residuals, index
/// profile against the thematic indices and requested tail, and the kernel
/// counting identity for `z^k U`.
pub fn verify_interpolant(
    phi: &MatSymbol,
    result: &InterpolantResult,
    report: Option<&FactorizationReport>,
    tol: &VerifyTolerances,
) -> Certificate {
    verify_symbol(phi, &result.u, Some(&result.requested), report, tol)
}

/// Certificate for a bare `U`; `requested` is the expected nonnegative tail.
pub fn verify_symbol(
    phi: &MatSymbol,
    u: &MatSymbol,
    requested: Option<&[i64]>,
    report: Option<&FactorizationReport>,
    tol: &VerifyTolerances,
) -> Certificate {
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    if phi.size() != u.size() {
        checks.push(check("size", false, u.size(), phi.size()));
        return Certificate { passed: false, checks, profile: None, unit_count: None, notes };
    }
    match residual_report(u, phi) {
        Ok(r) => {
            checks.push(check("unitarity", r.unitarity_residual <= tol.unitarity, format!("{:.3e}", r.unitarity_residual), format!("<= {:.1e}", tol.unitarity)));
            checks.push(check("analyticity", r.analyticity_residual <= tol.analyticity, format!("{:.3e}", r.analyticity_residual), format!("<= {:.1e}", tol.analyticity)));
            checks.push(check("fourier_match", r.fourier_match_residual <= tol.fourier, format!("{:.3e}", r.fourier_match_residual), format!("<= {:.1e}", tol.fourier)));
        }
        Err(e) => checks.push(check("residuals", false, e, "computable")),
    }

    let profile = match wh_indices(u) {
        Ok(p) => Some(p),
        Err(e) => {
            checks.push(check("index_profile", false, e, "certified profile"));
            None
        }
    };
    let unit_k: Option<Vec<i64>> = report.map(|rep| {
        let r = rep.count_at_least(1.0, UNIT_TOL);
        rep.k.iter().take(r).copied().collect()
    });
    if let Some(p) = &profile {
        let negative: Vec<i64> = p.d.iter().copied().filter(|&x| x < 0).collect();
        let nonnegative: Vec<i64> = p.d.iter().copied().filter(|&x| x >= 0).collect();
        if let Some(k) = &unit_k {
            let mut want: Vec<i64> = k.iter().map(|x| -x).collect();
            want.sort_unstable();
            checks.push(check("negative_indices", negative == want, format!("{negative:?}"), format!("{want:?}")));
            // dim ker T_{z^k U} = sum_{k_j > k} (k_j - k)
            let kmax = k.iter().copied().max().unwrap_or(0).max(1);
            for kappa in 0..=kmax {
                let want: usize = k.iter().map(|&kj| (kj - kappa).max(0) as usize).sum();
                let got = toeplitz_kernel_dim_with(&u.shift(kappa), DEFAULT_DEG_CAP, false);
                let ok = got.as_ref().is_ok_and(|g| *g == want);
                let measured = got.map(|g| g.to_string()).unwrap_or_else(|e| e.to_string());
                checks.push(check(&format!("kernel_count_k{kappa}"), ok, measured, want));
            }
            if k.len() == phi.size() {
                notes.push("all superoptimal values equal 1: the unitary interpolant is unique".into());
            }
        }
        if let Some(req) = requested {
            checks.push(check("requested_indices", nonnegative == req, format!("{nonnegative:?}"), format!("{req:?}")));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Certificate { passed, checks, profile, unit_count: unit_k.map(|k| k.len()), notes }
}
