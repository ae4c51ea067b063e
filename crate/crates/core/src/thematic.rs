//! Thematic factorizations and the superoptimal recursion.
//!
//! A step peels one superoptimal singular value off `Phi`:
//!
//! ```text
//! Phi - F = W* diag(s u, Psi) V*,   V = (v, conj(Theta)),  W = (w, conj(Xi))^T
//! ```
//!
//! with `v`, `w` inner co-outer columns built from a Schmidt pair and `u`
//! unimodular. `F` is never needed explicitly: with analytic left inverses
//! `alpha^T Xi = I`, `Theta^T beta = I`, the lower block is determined modulo
//! `H^infinity` by `alpha^T Phi beta - s u (alpha^T conj(w)) (v* beta)`, and the
//! recursion only needs `Psi` up to analytic terms.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::{h2_norm, Compression, SchmidtPair};
use crate::matfun::{analyticity_residual, MatSymbol};
use crate::ring::{
    pole_lcm, product_of_factors, roots, spectral_factor, winding, LaurentScalar, RationalScalar,
};
use crate::C64;

/// Superoptimal values within this gap are grouped as equal.
pub const TIE_TOL: f64 = 1e-9;

/// Reconstruction tolerance for a single reduction step.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;

const COMMON_ROOT_TOL: f64 = 1e-8;
const SUPPORT_TOL: f64 = 1e-12;

/// `V = (v, conj(Theta))`: unitary-valued with `v`, `Theta` inner and co-outer.
#[derive(Clone, Debug)]
pub struct ThematicMatrix {
    pub matrix: MatSymbol,
    pub v: Vec<RationalScalar>,
    /// Columns of `Theta`.
    pub theta: Vec<Vec<RationalScalar>>,
    /// Analytic columns with `Theta^T beta = I`.
    pub left_inverse: Vec<Vec<RationalScalar>>,
}

/// One peeled superoptimal value.
#[derive(Clone, Debug)]
pub struct ThematicStep {
    pub s: f64,
    pub u: RationalScalar,
    /// `ind T_u`
    pub k: i64,
    pub v: ThematicMatrix,
    pub w: ThematicMatrix,
    /// Lower block modulo analytic functions (absent for 1 x 1 steps).
    pub psi: Option<MatSymbol>,
    /// Lower block of the superoptimal error, `||residual|| <= s`.
    pub residual: Option<MatSymbol>,
}

impl ThematicStep {
    /// `W* diag(s u, lower) V*`
    pub fn assemble(&self, corner: &RationalScalar, lower: Option<&MatSymbol>) -> MatSymbol {
        let mid = match lower {
            Some(l) => MatSymbol::bordered(corner, l),
            None => MatSymbol::scalar(corner.clone()),
        };
        &(&self.w.matrix.adjoint() * &mid) * &self.v.matrix.adjoint()
    }
}

/// Summary of [`superoptimal`].
#[derive(Clone, Debug)]
pub struct FactorizationReport {
    pub t: Vec<f64>,
    pub k: Vec<i64>,
    pub f: MatSymbol,
    /// `Phi - F`
    pub error: MatSymbol,
    pub chain: Vec<ThematicStep>,
    pub monotone: bool,
    pub tie_tol: f64,
}

impl FactorizationReport {
    /// Number of superoptimal values equal to `level` within `tol`.
    pub fn count_at_least(&self, level: f64, tol: f64) -> usize {
        self.t.iter().filter(|&&t| t >= level - tol).count()
    }

    pub fn summary(&self) -> ReportSummary {
        ReportSummary { t: self.t.clone(), k: self.k.clone(), monotone: self.monotone }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub t: Vec<f64>,
    pub k: Vec<i64>,
    pub monotone: bool,
}

/// Brings entries to a common (outside-pole) denominator: `f_i = P_i / den(L)`.
fn common_denominator(f: &[RationalScalar]) -> Result<(Vec<LaurentScalar>, Vec<C64>)> {
    let mut poles: Vec<C64> = Vec::new();
    for e in f.iter().filter(|e| !e.is_zero()) {
        if !e.inside_poles().is_empty() || e.num().deg_lo() < 0 {
            return Err(Error::NotAnalytic("column entry has poles in the disk".into()));
        }
        poles = pole_lcm(&poles, e.poles()).0;
    }
    let nums = f
        .iter()
        .map(|e| {
            if e.is_zero() {
                LaurentScalar::zero()
            } else {
                let (_, missing, _) = pole_lcm(e.poles(), &poles);
                e.num() * &product_of_factors(&missing)
            }
        })
        .collect();
    Ok((nums, poles))
}

fn relative_value(p: &LaurentScalar, r: C64) -> f64 {
    let size: f64 = p.terms().map(|(k, c)| c.norm() * r.norm().powi(k as i32)).sum();
    p.eval(r).norm() / size.max(f64::MIN_POSITIVE)
}

/// Removes the common roots (within the closed disk when `inside_only`) of the
/// nonzero polynomials; returns them.
fn strip_common_roots(ps: &mut [LaurentScalar], inside_only: bool) -> Result<Vec<C64>> {
    let mut common = Vec::new();
    let Some(pivot) = ps
        .iter()
        .filter(|p| !p.is_zero())
        .min_by_key(|p| p.poly_degree())
        .cloned()
    else {
        return Ok(common);
    };
    if pivot.poly_degree() == 0 {
        return Ok(common);
    }
    for r in roots(&pivot)? {
        if inside_only && r.norm() > 1.0 + 1e-8 {
            continue;
        }
        let shared = ps
            .iter()
            .filter(|p| !p.is_zero())
            .all(|p| p.poly_degree() > 0 && relative_value(p, r) <= COMMON_ROOT_TOL);
        if !shared {
            continue;
        }
        let dist = (r.norm() - 1.0).abs();
        if dist <= 1e-8 {
            return Err(Error::BoundaryRoot { modulus: r.norm(), distance: dist });
        }
        for p in ps.iter_mut().filter(|p| !p.is_zero()) {
            *p = p.div_linear(r).0;
        }
        common.push(r);
    }
    Ok(common)
}

/// `v = b o vhat` with `b` inner, `o` outer and `vhat` inner co-outer
/// (pointwise unit norm, entries without common zeros in the disk).
pub fn vector_inner_outer(
    v: &[RationalScalar],
) -> Result<(RationalScalar, RationalScalar, Vec<RationalScalar>)> {
    if v.iter().all(|e| e.is_zero()) {
        return Err(Error::DegenerateInput("zero column".into()));
    }
    let (mut nums, poles) = common_denominator(v)?;
    let shift = nums.iter().filter(|p| !p.is_zero()).map(|p| p.deg_lo()).min().unwrap_or(0);
    for p in nums.iter_mut() {
        *p = p.shift(-shift);
    }
    let inside = strip_common_roots(&mut nums, true)?;
    let mirror = inside
        .iter()
        .fold(LaurentScalar::one(), |acc, r| &acc * &LaurentScalar::poly(vec![C64::new(1.0, 0.0), -r.conj()]));
    let qs: Vec<LaurentScalar> = nums.iter().map(|p| p * &mirror).collect();
    let rho = qs.iter().fold(LaurentScalar::zero(), |acc, q| &acc + &(q * &q.conj()));
    let o_q = spectral_factor(&rho.dropped(1e-15 * rho.max_abs())).map_err(|e| match e {
        Error::NotPositive { min } => Error::BoundaryRoot { modulus: 1.0, distance: min.max(0.0) },
        other => other,
    })?;

    let mut b_num = LaurentScalar::monomial(shift, C64::new(1.0, 0.0));
    let mut b_poles = Vec::new();
    for &r in &inside {
        b_num = &b_num * &LaurentScalar::poly(vec![-r, C64::new(1.0, 0.0)]);
        if r.norm() > 0.0 {
            b_poles.push(C64::new(1.0, 0.0) / r.conj());
        } else {
            // (z - 0)/(1 - 0 z) = z: no pole
        }
    }
    let b = RationalScalar::new(b_num, b_poles)?;
    let o = RationalScalar::new(o_q.clone(), poles)?;
    let vhat = qs
        .iter()
        .map(|q| {
            if q.is_zero() {
                Ok(RationalScalar::zero())
            } else {
                Ok(RationalScalar::from_fraction(q, &o_q)?.simplified(COMMON_ROOT_TOL).cleaned())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((b, o, vhat))
}

/// Analytic `x, y` with `x a + y b = 1`, for analytic `a, b` without common
/// zeros in the closed disk.
pub fn bezout(a: &RationalScalar, b: &RationalScalar) -> Result<(RationalScalar, RationalScalar)> {
    let (mut nums, poles) = common_denominator(&[a.clone(), b.clone()])?;
    let d = product_of_factors(&poles);
    let shift = nums.iter().filter(|p| !p.is_zero()).map(|p| p.deg_lo()).min().unwrap_or(0);
    if shift > 0 {
        return Err(Error::ReductionFailed("column is not co-outer (common zero at 0)".into()));
    }
    let common = strip_common_roots(&mut nums, false)?;
    if let Some(r) = common.iter().find(|r| r.norm() <= 1.0) {
        return Err(Error::ReductionFailed(format!("column is not co-outer (common zero {r})")));
    }
    let g = LaurentScalar::from_roots(&common);
    let (pa, pb) = (&nums[0], &nums[1]);
    let (s, t) = if pb.is_zero() {
        (LaurentScalar::constant(C64::new(1.0, 0.0) / pa.coeff(0)), LaurentScalar::zero())
    } else if pa.is_zero() {
        (LaurentScalar::zero(), LaurentScalar::constant(C64::new(1.0, 0.0) / pb.coeff(0)))
    } else {
        solve_poly_bezout(pa, pb)?
    };
    let make = |p: &LaurentScalar| -> Result<RationalScalar> {
        if p.is_zero() {
            return Ok(RationalScalar::zero());
        }
        Ok(RationalScalar::from_fraction(&(p * &d), &g)?.simplified(COMMON_ROOT_TOL).cleaned())
    };
    let (x, y) = (make(&s)?, make(&t)?);
    let check = &(&(&x * a) + &(&y * b)) - &RationalScalar::one();
    let err = check.sup_on_grid(check.natural_grid(256));
    if err > 1e-8 {
        return Err(Error::ReductionFailed(format!("Bezout identity residual {err:.3e}")));
    }
    Ok((x, y))
}

/// `s p + t q = 1` for coprime polynomials, `deg s < deg q`, `deg t < deg p`.
fn solve_poly_bezout(p: &LaurentScalar, q: &LaurentScalar) -> Result<(LaurentScalar, LaurentScalar)> {
    let (dp, dq) = (p.poly_degree(), q.poly_degree());
    if dp == 0 {
        return Ok((LaurentScalar::constant(C64::new(1.0, 0.0) / p.coeff(0)), LaurentScalar::zero()));
    }
    if dq == 0 {
        return Ok((LaurentScalar::zero(), LaurentScalar::constant(C64::new(1.0, 0.0) / q.coeff(0))));
    }
    let size = dp + dq;
    let mut m = DMatrix::<C64>::zeros(size, size);
    for j in 0..dq {
        for k in 0..=dp {
            m[(j + k, j)] = p.coeff(k as i64);
        }
    }
    for j in 0..dp {
        for k in 0..=dq {
            m[(j + k, dq + j)] = q.coeff(k as i64);
        }
    }
    let mut rhs = DVector::<C64>::zeros(size);
    rhs[0] = C64::new(1.0, 0.0);
    let sol = m
        .full_piv_lu()
        .solve(&rhs)
        .ok_or_else(|| Error::ReductionFailed("polynomials share a root".into()))?;
    let s = LaurentScalar::poly(sol.rows(0, dq).iter().copied().collect());
    let t = LaurentScalar::poly(sol.rows(dq, dp).iter().copied().collect());
    Ok((s, t))
}

fn support(v: &[RationalScalar]) -> Vec<usize> {
    (0..v.len()).filter(|&i| !v[i].is_zero() && h2_norm(std::slice::from_ref(&v[i])) > SUPPORT_TOL).collect()
}

fn unit(n: usize, i: usize) -> Vec<RationalScalar> {
    (0..n).map(|k| if k == i { RationalScalar::one() } else { RationalScalar::zero() }).collect()
}

/// Completes an inner co-outer column to a thematic matrix `V = (v, conj(Theta))`.
///
/// Supported: `n = 2`, or columns supported on at most two coordinates.
pub fn thematic_complete(vhat: &[RationalScalar], n: usize) -> Result<ThematicMatrix> {
    if vhat.len() != n {
        return Err(Error::SizeMismatch(format!("column of length {} for size {n}", vhat.len())));
    }
    let supp = support(vhat);
    let v: Vec<RationalScalar> = (0..n)
        .map(|i| if supp.contains(&i) { vhat[i].clone() } else { RationalScalar::zero() })
        .collect();
    let (theta, left_inverse) = match supp.as_slice() {
        [i] => {
            let cols: Vec<Vec<RationalScalar>> = (0..n).filter(|k| k != i).map(|k| unit(n, k)).collect();
            (cols.clone(), cols)
        }
        [i, j] => {
            let (a, b) = (&v[*i], &v[*j]);
            let (x, y) = bezout(a, b)?;
            let mut first = vec![RationalScalar::zero(); n];
            first[*i] = -b;
            first[*j] = a.clone();
            let mut inv = vec![RationalScalar::zero(); n];
            inv[*i] = -&y;
            inv[*j] = x;
            let mut theta = vec![first];
            let mut left = vec![inv];
            for k in (0..n).filter(|k| k != i && k != j) {
                theta.push(unit(n, k));
                left.push(unit(n, k));
            }
            (theta, left)
        }
        [] => return Err(Error::DegenerateInput("zero column".into())),
        _ => {
            return Err(Error::UnsupportedCompletion(format!(
                "column supported on {} coordinates in size {n}",
                supp.len()
            )))
        }
    };
    let matrix = MatSymbol::from_fn(n, |r, c| if c == 0 { v[r].clone() } else { theta[c - 1][r].conj() });
    Ok(ThematicMatrix { matrix, v, theta, left_inverse })
}

fn dot(a: &[RationalScalar], b: &[RationalScalar]) -> RationalScalar {
    a.iter().zip(b).fold(RationalScalar::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            &acc + &(x * y)
        }
    })
}

fn conj_vec(v: &[RationalScalar]) -> Vec<RationalScalar> {
    v.iter().map(|e| e.conj()).collect()
}

/// One reduction `Phi - F = W* diag(s u, Psi) V*` from a given Schmidt pair.
pub fn reduce_with_pair(phi: &MatSymbol, pair: &SchmidtPair) -> Result<ThematicStep> {
    let n = phi.size();
    let s = pair.sigma;
    if n == 1 {
        let aak = crate::nehari::best_approx_from_pair(phi.get(0, 0), pair)?;
        let u = aak.e.scale_real(1.0 / s);
        let id = ThematicMatrix {
            matrix: MatSymbol::identity(1),
            v: vec![RationalScalar::one()],
            theta: Vec::new(),
            left_inverse: Vec::new(),
        };
        return Ok(ThematicStep { s, u, k: aak.index_of_error, v: id.clone(), w: id, psi: None, residual: None });
    }
    let (b_v, o_v, vhat) = vector_inner_outer(&pair.v)?;
    let omega: Vec<RationalScalar> = pair.w.iter().map(|e| e.conj().shift(-1)).collect();
    let (b_w, o_w, what) = vector_inner_outer(&omega)?;
    let u = (&b_w * &o_w)
        .conj()
        .shift(-1)
        .div(&(&b_v * &o_v).scale_real(s))?
        .simplified(COMMON_ROOT_TOL)
        .cleaned();
    let k = -winding(&u)?;
    let vm = thematic_complete(&vhat, n)?;
    let wm = thematic_complete(&what, n)?;

    // Psi ~ alpha^T Phi beta - s u (alpha^T conj(w)) (v* beta)
    let alpha = &wm.left_inverse;
    let beta = &vm.left_inverse;
    let wbar = conj_vec(&wm.v);
    let vstar = conj_vec(&vm.v);
    let su = u.scale_real(s);
    let psi = MatSymbol::from_fn(n - 1, |p, q| {
        let phi_beta: Vec<RationalScalar> = (0..n)
            .map(|a| dot(&(0..n).map(|i| phi.get(a, i).clone()).collect::<Vec<_>>(), &beta[q]))
            .collect();
        let main = dot(&alpha[p], &phi_beta);
        let corr = &(&su * &dot(&alpha[p], &wbar)) * &dot(&vstar, &beta[q]);
        (&main - &corr).antianalytic_part().cleaned()
    });

    let wmat = ThematicMatrix { matrix: wm.matrix.transpose(), ..wm };
    let step = ThematicStep { s, u, k, v: vm, w: wmat, psi: Some(psi), residual: None };
    let recon = phi - &step.assemble(&su, step.psi.as_ref());
    let leak = analyticity_residual(&recon)?;
    if leak > RECONSTRUCTION_TOL * s.max(1.0) {
        return Err(Error::ReductionFailed(format!("reconstruction residual {leak:.3e}")));
    }
    Ok(step)
}

/// One thematic reduction of `Phi`, with the lower block replaced by its
/// superoptimal error so that `||residual|| <= s`.
pub fn thematic_reduce(phi: &MatSymbol) -> Result<ThematicStep> {
    let pair = crate::hankel::schmidt(phi)?;
    let mut step = reduce_with_pair(phi, &pair)?;
    if let Some(psi) = &step.psi {
        let sub = superoptimal(psi)?;
        step.residual = Some(sub.error);
    }
    Ok(step)
}

struct Recursion {
    error: MatSymbol,
    t: Vec<f64>,
    k: Vec<i64>,
    chain: Vec<ThematicStep>,
}

fn recurse(phi: &MatSymbol, floor: f64) -> Result<Recursion> {
    let n = phi.size();
    let comp = Compression::new(&[phi]);
    let sigma = comp.norm(&[C64::new(1.0, 0.0)]);
    if sigma <= floor {
        return Ok(Recursion { error: MatSymbol::zeros(n), t: vec![0.0; n], k: Vec::new(), chain: Vec::new() });
    }
    let pair = comp.schmidt(phi, &[C64::new(1.0, 0.0)])?;
    let mut step = reduce_with_pair(phi, &pair)?;
    if n == 1 {
        return Ok(Recursion {
            error: MatSymbol::scalar(step.u.scale_real(step.s)),
            t: vec![step.s],
            k: vec![step.k],
            chain: vec![step],
        });
    }
    let psi = step.psi.clone().expect("lower block for n > 1");
    let sub = recurse(&psi, floor)?;
    let su = step.u.scale_real(step.s);
    let error = step.assemble(&su, Some(&sub.error));
    step.residual = Some(sub.error);
    let mut t = vec![step.s];
    t.extend(sub.t);
    let mut k = vec![step.k];
    k.extend(sub.k);
    let mut chain = vec![step];
    chain.extend(sub.chain);
    Ok(Recursion { error, t, k, chain })
}

/// `k` nonincreasing within every group of equal (positive) `t`.
pub fn is_monotone(t: &[f64], k: &[i64], tol: f64) -> bool {
    (1..k.len()).all(|j| (t[j - 1] - t[j]).abs() > tol || k[j] <= k[j - 1])
}

/// Superoptimal analytic approximation with its thematic factorization data.
pub fn superoptimal(phi: &MatSymbol) -> Result<FactorizationReport> {
    let top = crate::hankel::hankel_norm(phi);
    let floor = 1e-10 * top.max(1.0);
    let rec = recurse(phi, floor)?;
    let diff = phi - &rec.error;
    let (anti, f): (Vec<_>, Vec<_>) = diff.entries().iter().map(|e| e.split()).unzip();
    let leak = h2_norm(&anti);
    if leak > 1e-7 * top.max(1.0) {
        return Err(Error::ReductionFailed(format!("approximant not analytic ({leak:.3e})")));
    }
    let f = MatSymbol::new(phi.size(), f.into_iter().map(|e| e.cleaned()).collect())?;
    let monotone = is_monotone(&rec.t, &rec.k, TIE_TOL);
    Ok(FactorizationReport {
        t: rec.t,
        k: rec.k,
        f,
        error: rec.error,
        chain: rec.chain,
        monotone,
        tie_tol: TIE_TOL,
    })
}
