//! Square matrix symbols with rational entries.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid;
use crate::ring::{winding_of, LaurentScalar, RationalScalar};
use crate::C64;

/// Entries whose numerator degree exceeds this are simplified after products.
pub const SYMBOLIC_DEGREE_LIMIT: usize = 256;

/// An `n x n` matrix of rational functions on the circle, row-major.
#[derive(Clone)]
pub struct MatSymbol {
    n: usize,
    entries: Vec<RationalScalar>,
}

impl MatSymbol {
    pub fn new(n: usize, entries: Vec<RationalScalar>) -> Result<Self> {
        if entries.len() != n * n || n == 0 {
            return Err(Error::SizeMismatch(format!("{} entries for size {n}", entries.len())));
        }
        Ok(Self { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> RationalScalar) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| RationalScalar::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar_identity(n, &RationalScalar::one())
    }

    /// `f I_n`
    pub fn scalar_identity(n: usize, f: &RationalScalar) -> Self {
        Self::from_fn(n, |i, j| if i == j { f.clone() } else { RationalScalar::zero() })
    }

    pub fn diag(d: &[RationalScalar]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i].clone() } else { RationalScalar::zero() })
    }

    pub fn scalar(f: RationalScalar) -> Self {
        Self { n: 1, entries: vec![f] }
    }

    pub fn constant(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| RationalScalar::constant(m[(i, j)]))
    }

    /// `diag(a, rest)` with `a` scalar in the top-left corner.
    pub fn bordered(a: &RationalScalar, rest: &MatSymbol) -> Self {
        let n = rest.n + 1;
        Self::from_fn(n, |i, j| match (i, j) {
            (0, 0) => a.clone(),
            (0, _) | (_, 0) => RationalScalar::zero(),
            _ => rest.get(i - 1, j - 1).clone(),
        })
    }

    /// Lower-right `(n-1) x (n-1)` block.
    pub fn trailing_block(&self) -> MatSymbol {
        Self::from_fn(self.n - 1, |i, j| self.get(i + 1, j + 1).clone())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalScalar {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[RationalScalar] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<RationalScalar> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map(&self, f: impl Fn(&RationalScalar) -> RationalScalar) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|e| e.scale(s))
    }

    /// `z^k Phi`
    pub fn shift(&self, k: i64) -> Self {
        self.map(|e| e.shift(k))
    }

    /// Pointwise conjugate transpose on the circle.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Entrywise conjugate on the circle (no transpose).
    pub fn conj(&self) -> Self {
        self.map(|e| e.conj())
    }

    pub fn simplified(&self, tol: f64) -> Self {
        self.map(|e| e.simplified(tol))
    }

    pub fn cleaned(&self) -> Self {
        self.map(|e| e.cleaned())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn eval(&self, z: C64) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).eval(z))
    }

    pub fn grid_eval(&self, n: usize) -> Vec<DMatrix<C64>> {
        grid::points(n).iter().map(|&z| self.eval(z)).collect()
    }

    /// Smallest grid (at least `base`) adequate for every entry's FFT.
    pub fn natural_grid(&self, base: usize) -> usize {
        self.entries.iter().map(|e| e.natural_grid(base)).max().unwrap_or(base)
    }

    pub fn default_grid(&self) -> usize {
        self.natural_grid(grid::default_grid())
    }

    /// FFT spectra of all entries on an `n`-point grid.
    pub fn spectra(&self, n: usize) -> Spectra {
        Spectra {
            size: self.n,
            grid: n,
            entries: self.entries.iter().map(|e| e.spectrum(n)).collect(),
        }
    }

    /// Matrix of `j`-th Fourier coefficients, computed on an `n`-point grid.
    pub fn fourier_coeff_on(&self, j: i64, n: usize) -> Result<DMatrix<C64>> {
        self.spectra(n).coeff(j)
    }

    /// Matrix of `j`-th Fourier coefficients on the symbol's natural grid.
    pub fn fourier_coeff(&self, j: i64) -> Result<DMatrix<C64>> {
        let n = self.default_grid().max((4 * (j.unsigned_abs() as usize + 1)).next_power_of_two());
        self.fourier_coeff_on(j, n)
    }

    /// Determinant by cofactor expansion (sizes here are small).
    pub fn det(&self) -> RationalScalar {
        fn det_rec(m: &MatSymbol, rows: &[usize], cols: &[usize]) -> RationalScalar {
            if rows.len() == 1 {
                return m.get(rows[0], cols[0]).clone();
            }
            let mut acc = RationalScalar::zero();
            for (k, &c) in cols.iter().enumerate() {
                let e = m.get(rows[0], c);
                if e.is_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let minor = det_rec(m, &rows[1..], &sub_cols);
                let term = e * &minor;
                acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
        let idx: Vec<usize> = (0..self.n).collect();
        det_rec(self, &idx, &idx)
    }

    /// Winding number of the determinant on the circle.
    pub fn det_winding(&self) -> Result<i64> {
        let start = self.entries.iter().map(|e| e.num().coeffs().len() + e.poles().len()).sum::<usize>();
        winding_of(|z| self.eval(z).determinant(), (16 * start).max(256))
    }

    /// `sup_zeta ||Phi(zeta)||` over an `n`-point grid.
    pub fn sup_norm(&self, n: usize) -> f64 {
        self.grid_eval(n)
            .into_iter()
            .map(|m| spectral_norm(&m))
            .fold(0.0, f64::max)
    }

    /// Largest total numerator support plus pole count over the entries.
    pub fn symbolic_degree(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.num().coeffs().len() + e.poles().len())
            .max()
            .unwrap_or(0)
    }

    /// Embeds `self` at rows/cols `offset..` of an identity of size `n`.
    pub fn embed(&self, n: usize, offset: usize) -> MatSymbol {
        Self::from_fn(n, |i, j| {
            if i >= offset && j >= offset && i - offset < self.n && j - offset < self.n {
                self.get(i - offset, j - offset).clone()
            } else if i == j {
                RationalScalar::one()
            } else {
                RationalScalar::zero()
            }
        })
    }
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Entry spectra of a matrix symbol on a fixed grid.
#[derive(Clone, Debug)]
pub struct Spectra {
    size: usize,
    grid: usize,
    entries: Vec<Vec<C64>>,
}

impl Spectra {
    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn coeff(&self, j: i64) -> Result<DMatrix<C64>> {
        if j.unsigned_abs() as usize > self.grid / 2 - 1 {
            return Err(Error::GridTooSmall { grid: self.grid, index: j });
        }
        Ok(DMatrix::from_fn(self.size, self.size, |a, b| {
            grid::wrapped(&self.entries[a * self.size + b], j)
        }))
    }

    pub fn entry_coeff(&self, a: usize, b: usize, j: i64) -> C64 {
        grid::wrapped(&self.entries[a * self.size + b], j)
    }
}

impl fmt::Debug for MatSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatSymbol({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            for j in 0..self.n {
                writeln!(f, "  ({i},{j}): {:?}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

fn check_sizes(a: &MatSymbol, b: &MatSymbol) {
    assert_eq!(a.n, b.n, "matrix symbol size mismatch");
}

impl Add for &MatSymbol {
    type Output = MatSymbol;
    fn add(self, rhs: &MatSymbol) -> MatSymbol {
        check_sizes(self, rhs);
        MatSymbol {
            n: self.n,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &MatSymbol {
    type Output = MatSymbol;
    fn sub(self, rhs: &MatSymbol) -> MatSymbol {
        check_sizes(self, rhs);
        MatSymbol {
            n: self.n,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &MatSymbol {
    type Output = MatSymbol;
    fn neg(self) -> MatSymbol {
        self.map(|e| -e)
    }
}

impl Mul for &MatSymbol {
    type Output = MatSymbol;
    fn mul(self, rhs: &MatSymbol) -> MatSymbol {
        check_sizes(self, rhs);
        let n = self.n;
        let out = MatSymbol::from_fn(n, |i, j| {
            (0..n).fold(RationalScalar::zero(), |acc, k| {
                let a = self.get(i, k);
                let b = rhs.get(k, j);
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    &acc + &(a * b)
                }
            })
        });
        if out.symbolic_degree() > SYMBOLIC_DEGREE_LIMIT {
            out.simplified(1e-10)
        } else {
            out
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MatSymbol {
            type Output = MatSymbol;
            fn $m(self, rhs: MatSymbol) -> MatSymbol {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Evidence record for interpolation contracts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub unitarity_residual: f64,
    pub analyticity_residual: f64,
    pub fourier_match_residual: f64,
    pub grid_size: usize,
}

/// `max_zeta ||U U* - I||` over the grid.
pub fn unitarity_residual(u: &MatSymbol) -> f64 {
    unitarity_residual_on(u, u.default_grid())
}

pub fn unitarity_residual_on(u: &MatSymbol, n: usize) -> f64 {
    let id = DMatrix::<C64>::identity(u.size(), u.size());
    u.grid_eval(n)
        .into_iter()
        .map(|m| spectral_norm(&(&m * m.adjoint() - &id)))
        .fold(0.0, f64::max)
}

/// `max_{j<0} |F^(j)|` over entries: distance from analyticity seen by the FFT.
pub fn analyticity_residual(f: &MatSymbol) -> Result<f64> {
    analyticity_residual_on(f, f.default_grid())
}

pub fn analyticity_residual_on(f: &MatSymbol, n: usize) -> Result<f64> {
    let support = f
        .entries()
        .iter()
        .filter(|e| e.is_laurent())
        .map(|e| (e.num().deg_hi() - e.num().deg_lo() + 1).max(0) as usize)
        .max()
        .unwrap_or(0);
    if n < 4 * support {
        return Err(Error::GridTooSmall { grid: n, index: support as i64 });
    }
    let spectra = f.spectra(n);
    let half = n as i64 / 2;
    let mut worst: f64 = 0.0;
    for a in 0..f.size() {
        for b in 0..f.size() {
            for j in 1..half {
                worst = worst.max(spectra.entry_coeff(a, b, -j).norm());
            }
        }
    }
    Ok(worst)
}

/// Residuals of an interpolation `U` of `Phi`: unitarity of `U`,
/// analyticity of `U - Phi`, and the match of negative Fourier coefficients.
pub fn residual_report(u: &MatSymbol, phi: &MatSymbol) -> Result<ResidualReport> {
    let diff = u - phi;
    let n = u.default_grid().max(phi.default_grid()).max(diff.default_grid());
    let analyticity = analyticity_residual_on(&diff, n)?;
    Ok(ResidualReport {
        unitarity_residual: unitarity_residual_on(u, n),
        analyticity_residual: analyticity,
        fourier_match_residual: fourier_match_residual_on(u, phi, n)?,
        grid_size: n,
    })
}

/// `max_{j<0} ||U^(j) - Phi^(j)||` (operator norm per coefficient).
pub fn fourier_match_residual_on(u: &MatSymbol, phi: &MatSymbol, n: usize) -> Result<f64> {
    let su = u.spectra(n);
    let sp = phi.spectra(n);
    let mut worst: f64 = 0.0;
    for j in 1..(n as i64 / 2) {
        let d = su.coeff(-j)? - sp.coeff(-j)?;
        worst = worst.max(spectral_norm(&d));
    }
    Ok(worst)
}

/// Laurent-polynomial matrix from per-entry coefficient lists
/// `(lowest degree, coefficients)`.
pub fn laurent_matrix(n: usize, entries: Vec<(i64, Vec<C64>)>) -> MatSymbol {
    assert_eq!(entries.len(), n * n);
    let mut it = entries.into_iter();
    MatSymbol::from_fn(n, |_, _| {
        let (lo, c) = it.next().unwrap();
        RationalScalar::laurent(LaurentScalar::from_coeffs(lo, c))
    })
}
