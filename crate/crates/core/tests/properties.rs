use proptest::prelude::*;
use superopt::grid;
use superopt::hankel::hankel_norm;
use superopt::nehari::best_approx_scalar;
use superopt::symbol_file::{Meta, SymbolFile};
use superopt::thematic::superoptimal;
use superopt::wh_index::wh_indices;
use superopt::{LaurentScalar, MatSymbol, RationalScalar, C64};

fn coeffs(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len).prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

/// Antianalytic tail of depth 1..=3, small analytic part, optional pole off the circle.
fn scalar() -> impl Strategy<Value = RationalScalar> {
    (1..=3i64, coeffs(1..=3), coeffs(0..=2), prop::option::of((0.2..0.7f64, 0.0..6.28f64, -1.0..1.0f64)))
        .prop_map(|(depth, mut tail, head, pole)| {
            tail.resize(depth as usize, C64::new(0.0, 0.0));
            tail[0] += C64::new(0.3, 0.0);
            let mut all = tail;
            all.extend(head);
            let mut f = RationalScalar::laurent(LaurentScalar::from_coeffs(-depth, all));
            if let Some((rad, arg, c)) = pole {
                // inside pole when c < 0, outside otherwise
                let r = if c < 0.0 { C64::from_polar(rad, arg) } else { C64::from_polar(1.0 / rad, arg) };
                f = &f + &RationalScalar::new(LaurentScalar::constant(C64::new(c, 0.5)), vec![r]).unwrap();
            }
            f
        })
}

fn max_dev(a: &RationalScalar, b: &RationalScalar, n: usize) -> f64 {
    grid::points(n).iter().map(|&z| (a.eval(z) - b.eval(z)).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn split_reassembles(f in scalar()) {
        let (minus, plus) = f.split();
        prop_assert!(max_dev(&(&minus + &plus), &f, 256) < 1e-11);
        prop_assert!(plus.is_structurally_analytic());
        let c = grid::wrapped(&minus.spectrum(minus.natural_grid(1024)), 0);
        prop_assert!(c.norm() < 1e-12);
    }

    #[test]
    fn conj_is_pointwise_conjugate(f in scalar()) {
        let g = f.conj();
        for z in grid::points(64) {
            prop_assert!((g.eval(z) - f.eval(z).conj()).norm() < 1e-11 * (1.0 + f.eval(z).norm()));
        }
    }

    #[test]
    fn symbol_file_round_trip(a in scalar(), b in scalar()) {
        let phi = MatSymbol::diag(&[a, b]);
        let file = SymbolFile::from_symbol(&phi, Meta::default());
        let back = SymbolFile::from_json(&file.to_json()).unwrap();
        prop_assert_eq!(&back, &file);
        let sym = back.to_symbol(false).unwrap();
        for i in 0..2 {
            prop_assert_eq!(sym.get(i, i).num().coeffs(), phi.get(i, i).num().coeffs());
            prop_assert_eq!(sym.get(i, i).poles(), phi.get(i, i).poles());
        }
    }

    #[test]
    fn best_approximation_error_is_unimodular(f in scalar()) {
        let res = best_approx_scalar(&f).unwrap();
        let sigma = hankel_norm(&MatSymbol::scalar(f.clone()));
        prop_assert!((res.sigma - sigma).abs() < 1e-9 * sigma.max(1.0));
        for v in res.e.grid_values(512) {
            prop_assert!((v.norm() - res.sigma).abs() < 1e-8 * sigma.max(1.0));
        }
        prop_assert!(res.g.analytic_part().is_structurally_analytic());
    }

    #[test]
    fn index_shift_equivariance(d0 in -3..=3i64, d1 in -3..=3i64, m in -2..=2i64) {
        let u = MatSymbol::diag(&[RationalScalar::monomial(d0, C64::new(1.0, 0.0)), RationalScalar::monomial(d1, C64::new(0.0, 1.0))]);
        let base = wh_indices(&u).unwrap().d;
        let mut want = vec![d0, d1];
        want.sort_unstable();
        prop_assert_eq!(&base, &want);
        let shifted = wh_indices(&u.shift(m)).unwrap().d;
        prop_assert_eq!(shifted, want.iter().map(|d| d + m).collect::<Vec<_>>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    /// The superoptimal error has constant pointwise singular values `t_j`.
    #[test]
    fn superoptimal_error_has_constant_singular_values(a in scalar(), b in scalar(), c in scalar(), d in scalar()) {
        let phi = MatSymbol::new(2, vec![a, b.scale_real(0.5), c.scale_real(0.5), d]).unwrap();
        let rep = superoptimal(&phi).unwrap();
        prop_assert!((rep.t[0] - hankel_norm(&phi)).abs() < 1e-9 * rep.t[0].max(1.0));
        prop_assert!(rep.t[0] + 1e-9 >= rep.t[1]);
        for z in grid::points(64) {
            let sv = rep.error.eval(z).singular_values();
            let (hi, lo) = (sv.max(), sv.min());
            prop_assert!((hi - rep.t[0]).abs() < 1e-6 * rep.t[0].max(1.0));
            prop_assert!((lo - rep.t[1]).abs() < 1e-6 * rep.t[0].max(1.0));
        }
    }
}
