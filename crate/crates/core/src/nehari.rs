//! Scalar best analytic approximation and the badly-approximable test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::{h2_norm, Compression, SchmidtPair};
use crate::matfun::MatSymbol;
use crate::ring::{winding, RationalScalar};
use crate::C64;

/// Tolerance for cancelling zeros of the Schmidt vector against `P_-(phi v)`.
pub const CANCEL_TOL: f64 = 1e-8;

/// Best analytic approximation `g` of `phi` with error `e = phi - g`.
#[derive(Clone, Debug)]
pub struct AAKResult {
    pub g: RationalScalar,
    pub e: RationalScalar,
    pub sigma: f64,
    /// `ind T_{e/sigma} = -winding(e)`; 0 in the degenerate case.
    pub index_of_error: i64,
    /// `phi` was already analytic: `g = phi`, `e = 0`.
    pub degenerate: bool,
}

/// Measurements behind [`badly_approximable_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadlyApproximable {
    pub holds: bool,
    /// `max |phi| - min |phi|` on the grid.
    pub modulus_spread: f64,
    pub min_modulus: f64,
    /// `-winding(phi)`, absent when the winding is undefined.
    pub index: Option<i64>,
}

/// `e = P_-(phi v) / v` with the zeros of `v` cancelled.
fn error_from_vector(phi: &MatSymbol, v: &RationalScalar) -> Result<RationalScalar> {
    let w = crate::hankel::apply_hankel(phi, std::slice::from_ref(v)).remove(0);
    Ok(w.div(v)?.simplified(CANCEL_TOL).cleaned())
}

/// Best approximation from a precomputed Schmidt pair of `phi`.
pub fn best_approx_from_pair(phi: &RationalScalar, pair: &SchmidtPair) -> Result<AAKResult> {
    let sym = MatSymbol::scalar(phi.clone());
    let e = error_from_vector(&sym, &pair.v[0])?;
    if let Some(alt) = &pair.alternate {
        // uniqueness: any maximizing vector gives the same error
        if let Ok(e2) = error_from_vector(&sym, &alt[0]) {
            let diff = h2_norm(&[&e - &e2]);
            if diff > 1e-8 * pair.sigma.max(1.0) {
                return Err(Error::ReductionFailed(format!(
                    "error function depends on the maximizing vector ({diff:.3e})"
                )));
            }
        }
    }
    let (anti, g) = (phi - &e).split();
    let leak = h2_norm(&[anti]);
    if leak > 1e-7 * pair.sigma.max(1.0) {
        return Err(Error::ReductionFailed(format!("approximant not analytic ({leak:.3e})")));
    }
    let index_of_error = -winding(&e)?;
    Ok(AAKResult { g: g.cleaned(), e, sigma: pair.sigma, index_of_error, degenerate: false })
}

/// Best analytic approximation of a scalar rational function.
///
/// Already-analytic input is returned as the degenerate result `g = phi`, `e = 0`.
pub fn best_approx_scalar(phi: &RationalScalar) -> Result<AAKResult> {
    let sym = MatSymbol::scalar(phi.clone());
    let comp = Compression::new(&[&sym]);
    match comp.schmidt(&sym, &[C64::new(1.0, 0.0)]) {
        Ok(pair) => best_approx_from_pair(phi, &pair),
        Err(Error::ZeroOperator) => Ok(AAKResult {
            g: phi.clone(),
            e: RationalScalar::zero(),
            sigma: 0.0,
            index_of_error: 0,
            degenerate: true,
        }),
        Err(e) => Err(e),
    }
}

/// Constant modulus, no zeros on the circle, and positive Toeplitz index.
pub fn badly_approximable_check(phi: &RationalScalar) -> BadlyApproximable {
    let n = phi.natural_grid(1024);
    let moduli: Vec<f64> = phi.grid_values(n).iter().map(|v| v.norm()).collect();
    let max = moduli.iter().copied().fold(0.0, f64::max);
    let min = moduli.iter().copied().fold(f64::INFINITY, f64::min);
    let index = winding(phi).ok().map(|w| -w);
    let holds = max - min <= 1e-8 && min >= 1e-8 && index.is_some_and(|k| k > 0);
    BadlyApproximable { holds, modulus_spread: max - min, min_modulus: min, index }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid;
    use crate::ring::LaurentScalar;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn worked_error() -> RationalScalar {
        // zbar^2 (1 + 2z)/(2 + z)
        RationalScalar::from_fraction(
            &LaurentScalar::from_coeffs(-2, vec![r(1.0), r(2.0)]),
            &LaurentScalar::real_poly(&[2.0, 1.0]),
        )
        .unwrap()
    }

    #[test]
    fn trivial_examples() {
        let a = best_approx_scalar(&RationalScalar::monomial(-1, r(1.0))).unwrap();
        assert!(a.g.is_zero() || a.g.sup_on_grid(64) < 1e-12);
        assert!((a.sigma - 1.0).abs() < 1e-13);
        assert_eq!(a.index_of_error, 1);

        let a = best_approx_scalar(&RationalScalar::monomial(-1, r(2.0))).unwrap();
        assert!((a.sigma - 2.0).abs() < 1e-13);
        assert!((a.e.eval(r(0.5)) - r(4.0)).norm() < 1e-12);
        assert_eq!(a.index_of_error, 1);
    }

    #[test]
    fn worked_example() {
        let phi = RationalScalar::laurent(LaurentScalar::from_coeffs(-2, vec![r(0.5), r(0.75)]));
        let a = best_approx_scalar(&phi).unwrap();
        assert!((a.sigma - 1.0).abs() < 1e-12);
        assert_eq!(a.index_of_error, 1);
        let want = worked_error();
        for z in grid::points(32) {
            assert!((a.e.eval(z) - want.eval(z)).norm() < 1e-10);
            assert!((a.e.eval(z).norm() - 1.0).abs() < 1e-8);
        }
        // optimality: sup |phi - g| equals the Hankel norm
        let sup = (&phi - &a.g).sup_on_grid(1024);
        assert!((sup - a.sigma).abs() < 1e-7);
    }

    #[test]
    fn multiple_top_value_is_consistent() {
        let phi = RationalScalar::monomial(-2, r(1.0));
        let a = best_approx_scalar(&phi).unwrap();
        assert!((a.sigma - 1.0).abs() < 1e-13);
        assert_eq!(a.index_of_error, 2);
    }

    #[test]
    fn rational_antianalytic_part() {
        // 1/(z - a) + analytic part: sigma = 1/(1-|a|^2), g analytic
        let a = 0.5;
        let phi = &RationalScalar::new(LaurentScalar::one(), vec![r(a)]).unwrap()
            + &RationalScalar::laurent(LaurentScalar::real_poly(&[1.0, 0.3]));
        let res = best_approx_scalar(&phi).unwrap();
        assert!((res.sigma - 1.0 / (1.0 - a * a)).abs() < 1e-10);
        assert!(res.g.inside_poles().is_empty() && res.g.num().deg_lo() >= 0);
        for z in grid::points(64) {
            assert!((res.e.eval(z).norm() - res.sigma).abs() < 1e-8);
        }
    }

    #[test]
    fn analytic_input_is_degenerate() {
        let phi = RationalScalar::laurent(LaurentScalar::real_poly(&[1.0, 2.0]));
        let a = best_approx_scalar(&phi).unwrap();
        assert!(a.degenerate && a.e.is_zero() && a.sigma == 0.0);
    }

    #[test]
    fn badly_approximable_examples() {
        assert!(badly_approximable_check(&RationalScalar::monomial(-1, r(1.0))).holds);
        let c = badly_approximable_check(&RationalScalar::monomial(1, r(1.0)));
        assert!(!c.holds && c.index == Some(-1));
        assert!(badly_approximable_check(&worked_error()).holds);
        assert!(!badly_approximable_check(&RationalScalar::laurent(LaurentScalar::from_coeffs(-1, vec![r(1.0), r(0.5)]))).holds);
    }
}
