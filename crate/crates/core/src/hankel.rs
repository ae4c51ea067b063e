//! Hankel operators `H_Phi f = P_-(Phi f)` on vector `H^2`, and Toeplitz kernels.
//!
//! For a rational symbol the Hankel operator vanishes on `q H^2`, where `q`
//! collects the poles of the antianalytic part (including `z = 0`). Its
//! nonzero singular values are therefore those of its compression to the
//! model space `K_q = {p / q~ : deg p < deg q}`, `q~(z) = prod (1 - conj(r) z)`.
//! That compression is finite and exact, so no section-size heuristics are
//! needed for norms and maximizing vectors.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid;
use crate::matfun::{spectral_norm, MatSymbol};
use crate::ring::{pole_lcm, product_of_factors, LaurentScalar, RationalScalar};
use crate::C64;

/// Singular values within this relative gap of the top one count as equal.
pub const MULTIPLICITY_TOL: f64 = 1e-8;

/// Relative threshold below which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Default cap on polynomial degree for Toeplitz kernel searches.
pub const DEFAULT_DEG_CAP: usize = 200;

const GRAM_FLOOR: f64 = 1e-14;
const INSIDE_MERGE_TOL: f64 = 1e-10;

/// Dense finite section of the block Hankel matrix, block `(j, k) = Phi^(-(j+k+1))`.
#[derive(Clone, Debug)]
pub struct HankelSection {
    pub block_rows: usize,
    pub block_cols: usize,
    pub matrix: DMatrix<C64>,
}

impl HankelSection {
    pub fn new(phi: &MatSymbol, block_rows: usize, block_cols: usize) -> Result<Self> {
        let n = phi.size();
        let need = (4 * (block_rows + block_cols + 2)).next_power_of_two();
        let spectra = phi.spectra(phi.default_grid().max(need));
        let mut matrix = DMatrix::zeros(n * block_rows, n * block_cols);
        for j in 0..block_rows {
            for k in 0..block_cols {
                let c = spectra.coeff(-((j + k + 1) as i64))?;
                matrix.view_mut((j * n, k * n), (n, n)).copy_from(&c);
            }
        }
        Ok(Self { block_rows, block_cols, matrix })
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.matrix.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }
}

/// A top Schmidt pair: `w = H_Phi v`, `||w|| = sigma ||v||`, `||v||_2 = 1`.
#[derive(Clone, Debug)]
pub struct SchmidtPair {
    pub sigma: f64,
    pub v: Vec<RationalScalar>,
    pub w: Vec<RationalScalar>,
    /// Dimension of the top singular subspace.
    pub multiplicity: usize,
    /// A second, independent maximizing vector when the top value is multiple.
    pub alternate: Option<Vec<RationalScalar>>,
}

/// Model-space compression of one or more Hankel operators on a common basis.
///
/// Columns are indexed by `(i, k)`: basis vector `e_i z^k / q~`. Rows are the
/// negative Fourier coefficients `(a, j)`, `j >= 1`.
pub struct Compression {
    n: usize,
    m: usize,
    basis_poles: Vec<C64>,
    whiten: DMatrix<C64>,
    ops: Vec<DMatrix<C64>>,
}

fn inside_multiset(symbols: &[&MatSymbol]) -> (usize, Vec<C64>) {
    let mut zero_order = 0usize;
    let mut poles: Vec<C64> = Vec::new();
    for phi in symbols {
        for e in phi.entries() {
            if e.is_zero() {
                continue;
            }
            zero_order = zero_order.max((-e.num().deg_lo()).max(0) as usize);
            // multiplicities within this entry
            let mut local: Vec<(C64, usize)> = Vec::new();
            for r in e.inside_poles() {
                match local.iter_mut().find(|(p, _)| (*p - r).norm() <= INSIDE_MERGE_TOL) {
                    Some(slot) => slot.1 += 1,
                    None => local.push((r, 1)),
                }
            }
            for (r, mult) in local {
                let have = poles.iter().filter(|p| (**p - r).norm() <= INSIDE_MERGE_TOL).count();
                for _ in have..mult {
                    poles.push(r);
                }
            }
        }
    }
    (zero_order, poles)
}

impl Compression {
    pub fn new(symbols: &[&MatSymbol]) -> Self {
        let n = symbols[0].size();
        let (d, inside) = inside_multiset(symbols);
        let m = d + inside.len();
        let basis_poles: Vec<C64> = inside.iter().map(|r| C64::new(1.0, 0.0) / r.conj()).collect();
        if m == 0 {
            return Self { n, m, basis_poles, whiten: DMatrix::zeros(0, 0), ops: vec![DMatrix::zeros(0, 0); symbols.len()] };
        }
        let rho = inside.iter().map(|r| r.norm()).fold(0.0, f64::max);
        let base = symbols.iter().map(|p| p.default_grid()).max().unwrap_or(grid::DEFAULT_GRID);
        let big_n = grid::grid_for_decay(base.max((8 * m).next_power_of_two()), rho);
        let zs = grid::points(big_n);
        let qt_inv: Vec<C64> = zs
            .iter()
            .map(|&z| {
                let q: C64 = inside.iter().fold(C64::new(1.0, 0.0), |acc, r| acc * (C64::new(1.0, 0.0) - r.conj() * z));
                C64::new(1.0, 0.0) / q
            })
            .collect();
        let basis: Vec<Vec<C64>> = (0..m)
            .map(|k| zs.iter().zip(&qt_inv).map(|(z, q)| z.powi(k as i32) * q).collect())
            .collect();

        // G[k][l] = <b_l, b_k>, so that ||sum x_k b_k||^2 = x* G x
        let gram = DMatrix::from_fn(m, m, |k, l| {
            basis[l].iter().zip(&basis[k]).map(|(a, b)| b.conj() * a).sum::<C64>() / big_n as f64
        });
        let gram = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(gram);
        let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..m).filter(|&i| eig.eigenvalues[i] > GRAM_FLOOR * lmax).collect();
        let t_m = DMatrix::from_fn(m, keep.len(), |r, c| {
            eig.eigenvectors[(r, keep[c])] / eig.eigenvalues[keep[c]].sqrt()
        });
        let whiten = kron_identity(n, &t_m);

        let half = big_n / 2;
        let ops = symbols
            .iter()
            .map(|phi| {
                let vals: Vec<Vec<C64>> = phi.entries().iter().map(|e| e.grid_values(big_n)).collect();
                let mut c = DMatrix::zeros(n * (half - 1), n * m);
                let mut buf = vec![C64::new(0.0, 0.0); big_n];
                for a in 0..n {
                    for i in 0..n {
                        let e = &vals[a * n + i];
                        if phi.get(a, i).is_zero() {
                            continue;
                        }
                        for (k, b) in basis.iter().enumerate() {
                            for t in 0..big_n {
                                buf[t] = e[t] * b[t];
                            }
                            let spec = grid::fourier_from_values(&buf);
                            for j in 1..half {
                                c[(a * (half - 1) + j - 1, i * m + k)] = grid::wrapped(&spec, -(j as i64));
                            }
                        }
                    }
                }
                trim_rows(&c, n, half - 1)
            })
            .collect::<Vec<_>>();
        let rows = ops.iter().map(|c| c.nrows()).max().unwrap_or(0);
        let ops = ops
            .into_iter()
            .map(|c| pad_rows(&c, n, rows / n.max(1)) * &whiten)
            .collect();
        Self { n, m, basis_poles, whiten, ops }
    }

    pub fn dimension(&self) -> usize {
        self.n * self.m
    }

    fn combined(&self, coeffs: &[C64]) -> DMatrix<C64> {
        let mut acc = self.ops[0].clone() * coeffs[0];
        for (c, op) in coeffs.iter().zip(&self.ops).skip(1) {
            acc += op * *c;
        }
        acc
    }

    /// `||H_{sum c_i Phi_i}||`.
    pub fn norm(&self, coeffs: &[C64]) -> f64 {
        if self.m == 0 {
            return 0.0;
        }
        spectral_norm(&self.combined(coeffs))
    }

    /// Singular values of `H_{sum c_i Phi_i}` on the model space, decreasing.
    pub fn singular_values(&self, coeffs: &[C64]) -> Vec<f64> {
        if self.m == 0 {
            return Vec::new();
        }
        let mut s: Vec<f64> = self.combined(coeffs).singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Top singular value and a basis (in model-space coordinates) of its
    /// singular subspace.
    fn top_space(&self, coeffs: &[C64]) -> (f64, Vec<DVector<C64>>) {
        let a = self.combined(coeffs);
        let svd = a.svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let s0 = svd.singular_values[order[0]];
        let vecs = order
            .iter()
            .take_while(|&&i| svd.singular_values[i] >= s0 * (1.0 - MULTIPLICITY_TOL))
            .map(|&i| &self.whiten * v_t.row(i).adjoint())
            .collect();
        (s0, vecs)
    }

    fn to_vector(&self, x: &DVector<C64>) -> Vec<RationalScalar> {
        (0..self.n)
            .map(|i| {
                let coeffs: Vec<C64> = (0..self.m).map(|k| x[i * self.m + k]).collect();
                let p = LaurentScalar::poly(coeffs).dropped(1e-15);
                if p.is_zero() {
                    RationalScalar::zero()
                } else {
                    RationalScalar::new(p, self.basis_poles.clone()).expect("poles off the circle")
                }
            })
            .collect()
    }

    /// Top Schmidt pair of `H_Phi` where `Phi = sum c_i Phi_i`.
    pub fn schmidt(&self, phi: &MatSymbol, coeffs: &[C64]) -> Result<SchmidtPair> {
        if self.m == 0 {
            return Err(Error::ZeroOperator);
        }
        let (sigma, space) = self.top_space(coeffs);
        if sigma <= 1e-14 {
            return Err(Error::ZeroOperator);
        }
        let multiplicity = space.len();
        let x = lowest_degree_combination(&space, self.n, self.m);
        let x = self.normalize(&x);
        let v = self.to_vector(&x);
        let w = apply_hankel(phi, &v);
        let alternate = if multiplicity > 1 {
            // a second maximizing vector, independent of x
            let other = space
                .iter()
                .map(|y| {
                    let proj = x.dotc(y);
                    y - &x * proj
                })
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .map(|y| self.normalize(&y));
            other.map(|y| self.to_vector(&y))
        } else {
            None
        };
        Ok(SchmidtPair { sigma, v, w, multiplicity, alternate })
    }

    fn normalize(&self, x: &DVector<C64>) -> DVector<C64> {
        // ||x||_G with G the block Gram; whiten^+ maps back to orthonormal coordinates
        let g = self.gram_norm(x);
        x / C64::new(g, 0.0)
    }

    fn gram_norm(&self, x: &DVector<C64>) -> f64 {
        let v = self.to_vector(x);
        h2_norm(&v)
    }
}

/// Picks, within a singular subspace, the vector whose highest-degree
/// coefficients are eliminated: a multiple top value then yields the
/// lowest-degree maximizing vector.
fn lowest_degree_combination(space: &[DVector<C64>], n: usize, m: usize) -> DVector<C64> {
    let mut vecs: Vec<DVector<C64>> = space.to_vec();
    let scale = vecs.iter().map(|v| v.camax()).fold(0.0, f64::max);
    // positions ordered by degree (desc), then coordinate (desc)
    let mut positions: Vec<usize> = Vec::with_capacity(n * m);
    for k in (0..m).rev() {
        for i in (0..n).rev() {
            positions.push(i * m + k);
        }
    }
    while vecs.len() > 1 {
        let pivot = positions.iter().find_map(|&p| {
            let (best, val) = vecs
                .iter()
                .enumerate()
                .map(|(idx, v)| (idx, v[p].norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))?;
            (val > 1e-8 * scale).then_some((best, p))
        });
        let Some((pi, p)) = pivot else { break };
        let pv = vecs.remove(pi);
        for v in vecs.iter_mut() {
            let f = v[p] / pv[p];
            *v -= &pv * f;
            v[p] = C64::new(0.0, 0.0);
        }
    }
    vecs.swap_remove(0)
}

fn kron_identity(n: usize, t: &DMatrix<C64>) -> DMatrix<C64> {
    let (r, c) = t.shape();
    let mut out = DMatrix::zeros(n * r, n * c);
    for i in 0..n {
        out.view_mut((i * r, i * c), (r, c)).copy_from(t);
    }
    out
}

/// Drops trailing coefficient rows that are negligible in every block.
fn trim_rows(c: &DMatrix<C64>, n: usize, per_block: usize) -> DMatrix<C64> {
    let scale = c.camax();
    let mut last = 0;
    for a in 0..n {
        for j in 0..per_block {
            if c.row(a * per_block + j).camax() > 1e-18 * scale {
                last = last.max(j + 1);
            }
        }
    }
    let keep = (last + 1).min(per_block);
    DMatrix::from_fn(n * keep, c.ncols(), |r, col| c[((r / keep) * per_block + r % keep, col)])
}

fn pad_rows(c: &DMatrix<C64>, n: usize, per_block: usize) -> DMatrix<C64> {
    let have = c.nrows() / n.max(1);
    if have == per_block {
        return c.clone();
    }
    let mut out = DMatrix::zeros(n * per_block, c.ncols());
    for a in 0..n {
        out.view_mut((a * per_block, 0), (have, c.ncols()))
            .copy_from(&c.view((a * have, 0), (have, c.ncols())));
    }
    out
}

/// `||H_Phi||`, equal to the `L^infinity` distance from `Phi` to `H^infinity`.
pub fn hankel_norm(phi: &MatSymbol) -> f64 {
    Compression::new(&[phi]).norm(&[C64::new(1.0, 0.0)])
}

/// All nonzero-candidate singular values of `H_Phi`, decreasing.
pub fn hankel_singular_values(phi: &MatSymbol) -> Vec<f64> {
    Compression::new(&[phi]).singular_values(&[C64::new(1.0, 0.0)])
}

/// Top Schmidt pair of `H_Phi`.
pub fn schmidt(phi: &MatSymbol) -> Result<SchmidtPair> {
    Compression::new(&[phi]).schmidt(phi, &[C64::new(1.0, 0.0)])
}

/// `P_-(Phi v)`, exactly.
pub fn apply_hankel(phi: &MatSymbol, v: &[RationalScalar]) -> Vec<RationalScalar> {
    let n = phi.size();
    (0..n)
        .map(|a| {
            let mut acc = RationalScalar::zero();
            for (i, vi) in v.iter().enumerate() {
                let e = phi.get(a, i);
                if !e.is_zero() && !vi.is_zero() {
                    acc = &acc + &(e * vi);
                }
            }
            acc.antianalytic_part().cleaned()
        })
        .collect()
}

/// `L^2` norm of a vector function on the circle.
pub fn h2_norm(v: &[RationalScalar]) -> f64 {
    v.iter()
        .map(|e| {
            if e.is_zero() {
                return 0.0;
            }
            let n = e.natural_grid(256);
            e.grid_values(n).iter().map(|x| x.norm_sqr()).sum::<f64>() / n as f64
        })
        .sum::<f64>()
        .sqrt()
}

/// `(1 - conj(tau) z)^{-1} v` for a vector vanishing at `tau` on the circle.
pub fn divide_boundary_zero(v: &[RationalScalar], tau: C64) -> Result<Vec<RationalScalar>> {
    v.iter()
        .map(|e| {
            if e.is_zero() {
                return Ok(RationalScalar::zero());
            }
            let (q, rem) = e.num().div_linear(tau);
            if rem.norm() > 1e-10 * e.num().max_abs() {
                return Err(Error::DegenerateInput(format!("vector does not vanish at {tau}")));
            }
            // 1 - conj(tau) z = -conj(tau) (z - tau), and 1/conj(tau) = tau on the circle
            RationalScalar::new(q.scale(-tau), e.poles().to_vec())
        })
        .collect()
}

/// Effective Fourier support `[lo, hi]` of a symbol, from its spectrum.
fn effective_support(psi: &MatSymbol, n: usize) -> (i64, i64) {
    let spectra = psi.spectra(n);
    let half = n as i64 / 2 - 1;
    let mut scale: f64 = 0.0;
    for j in -half..=half {
        scale = scale.max(spectral_norm(&spectra.coeff(j).unwrap()));
    }
    let (mut lo, mut hi) = (0, 0);
    for j in -half..=half {
        // FFT noise sits near 1e-16 relative; stay clear of it
        if spectra.coeff(j).unwrap().camax() > 1e-14 * scale {
            lo = lo.min(j);
            hi = hi.max(j);
        }
    }
    (lo, hi)
}

/// Degree by which kernel vectors of a Laurent polynomial symbol are resolved
/// well below the rank threshold. Kernel vectors are `Psi_+^{-1}` times a
/// polynomial, so only zeros of `det Psi` outside the disk slow their decay.
fn decay_length(psi: &MatSymbol) -> usize {
    let num = psi.det().num().clone();
    let mut rho: f64 = 0.0;
    if num.deg_hi() > num.deg_lo() {
        if let Ok(zs) = crate::ring::roots(&num.shift(-num.deg_lo())) {
            for z in zs.into_iter().filter(|z| z.norm() > 1.0) {
                rho = rho.max(1.0 / z.norm());
            }
        }
    }
    if rho <= 0.0 || rho >= 1.0 {
        return 0;
    }
    ((1e-11f64).ln() / rho.ln()).ceil() as usize
}

/// A Laurent polynomial symbol with the same Toeplitz kernel dimension.
///
/// Multiplying by the common denominator `prod_in (z - a) prod_out (1 - z/r)`
/// equals `z^m` times an antianalytic invertible factor times an analytic
/// invertible one, neither of which changes `dim ker`.
fn cleared(psi: &MatSymbol) -> MatSymbol {
    let common = psi.entries().iter().fold(Vec::new(), |acc, e| pole_lcm(&acc, e.poles()).0);
    if common.is_empty() {
        return psi.clone();
    }
    let inside = common.iter().filter(|r| r.norm() < 1.0).count() as i64;
    psi.map(|e| {
        let missing = pole_lcm(e.poles(), &common).1;
        RationalScalar::laurent((e.num() * &product_of_factors(&missing)).shift(-inside))
    })
}

/// `dim ker T_Psi`, found as the stable nullity of the map
/// `f -> P_+(Psi f)` on analytic polynomial vectors of growing degree.
pub fn toeplitz_kernel_dim(psi: &MatSymbol, deg_cap: usize) -> Result<usize> {
    toeplitz_kernel_dim_with(psi, deg_cap, false)
}

/// As [`toeplitz_kernel_dim`]; `relaxed` skips the pointwise invertibility check.
pub fn toeplitz_kernel_dim_with(psi: &MatSymbol, deg_cap: usize, relaxed: bool) -> Result<usize> {
    let n = psi.size();
    let base = psi.default_grid();
    if !relaxed {
        let min_sv = psi
            .grid_eval(base)
            .into_iter()
            .map(|m| m.singular_values().iter().copied().fold(f64::INFINITY, f64::min))
            .fold(f64::INFINITY, f64::min);
        if min_sv < 1e-8 {
            return Err(Error::NearSingularSymbol { min_sv });
        }
    }
    let psi = &cleared(psi);
    let base = psi.default_grid();
    let (lo, hi) = effective_support(psi, base);
    let width = (hi - lo) as usize;
    if width > deg_cap {
        return Err(Error::Unstable { cap: deg_cap });
    }
    let grid_n = base.max((4 * (deg_cap + width + 16)).next_power_of_two());
    let spectra = psi.spectra(grid_n);
    let coeff = |j: i64| -> DMatrix<C64> {
        if j < lo || j > hi {
            DMatrix::zeros(n, n)
        } else {
            spectra.coeff(j).unwrap()
        }
    };
    let nullity = |d: usize| -> usize {
        let rows = d + hi.max(0) as usize + 1;
        let mut a = DMatrix::zeros(n * rows, n * (d + 1));
        for j in 0..rows {
            for k in 0..=d {
                let c = coeff(j as i64 - k as i64);
                a.view_mut((j * n, k * n), (n, n)).copy_from(&c);
            }
        }
        let s = a.singular_values();
        let smax = s.iter().copied().fold(0.0, f64::max);
        s.iter().filter(|&&x| x < RANK_TOL * smax).count() + (n * (d + 1)).saturating_sub(s.len())
    };
    let mut d = 8.max(2 * width).max(decay_length(psi));
    let mut prev = nullity(d);
    while d + 5 <= deg_cap {
        let next = nullity(d + 5);
        if next == prev {
            return Ok(prev);
        }
        d += 5;
        prev = next;
    }
    Err(Error::Unstable { cap: deg_cap })
}
