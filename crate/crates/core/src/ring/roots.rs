use nalgebra::DMatrix;

use super::LaurentScalar;
use crate::error::{Error, Result};
use crate::C64;

/// All roots of the polynomial part of `p` (the `z^k` shift is ignored),
/// with multiplicity.
///
/// Eigenvalues of the balanced companion matrix, followed by one Newton step.
pub fn roots(p: &LaurentScalar) -> Result<Vec<C64>> {
    if p.is_zero() {
        return Err(Error::DegenerateInput("roots of the zero polynomial".into()));
    }
    // strip the monomial shift: only the polynomial factor matters
    let c = p.coeffs().to_vec();
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    if deg == 1 {
        return Ok(vec![-c[0] / lead]);
    }
    // Unshifted QR can stall on symmetric root configurations; a rotated
    // variable z = e^{i theta} w breaks the symmetry.
    let eig = [0.0, 0.29, 2.1, 4.4]
        .iter()
        .find_map(|&theta| companion_eigenvalues(&c, theta))
        .ok_or_else(|| Error::DegenerateInput("companion eigenvalues did not converge".into()))?;
    let poly = LaurentScalar::poly(c);
    let dp = poly.derivative();
    let polished = eig
        .iter()
        .map(|&r| {
            let d = dp.eval(r);
            if d.norm() > 0.0 {
                let step = poly.eval(r) / d;
                let cand = r - step;
                if poly.eval(cand).norm() <= poly.eval(r).norm() {
                    return cand;
                }
            }
            r
        })
        .collect();
    Ok(polished)
}

/// Roots of `sum c_k z^k` computed as `e^{i theta}` times the eigenvalues of
/// the companion matrix of `c_k e^{i k theta}`.
fn companion_eigenvalues(c: &[C64], theta: f64) -> Option<Vec<C64>> {
    let deg = c.len() - 1;
    let rot = C64::from_polar(1.0, theta);
    let c: Vec<C64> = c.iter().enumerate().map(|(k, &x)| x * rot.powi(k as i32)).collect();
    let lead = c[deg];
    let mut m = DMatrix::<C64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i] / lead;
    }
    balance(&mut m);
    let schur = nalgebra::Schur::try_new(m, f64::EPSILON, 100 * deg.max(10))?;
    Some(schur.eigenvalues()?.iter().map(|&w| w * rot).collect())
}

/// Parlett–Reinsch diagonal balancing, in place.
fn balance(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut r = 0.0;
            let mut cn = 0.0;
            for j in 0..n {
                if j != i {
                    cn += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if cn == 0.0 || r == 0.0 {
                continue;
            }
            let s = cn + r;
            let mut f = 1.0;
            let mut cc = cn;
            let g = r / radix;
            while cc < g {
                f *= radix;
                cc *= radix * radix;
            }
            let g = r * radix;
            while cc >= g {
                f /= radix;
                cc /= radix * radix;
            }
            if (cc + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}
