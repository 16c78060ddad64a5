//! Pointwise algebra of the truncated Galerkin system.

use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, DenseMatrix};
use crate::pc_basis::TripleProductTensor;

/// Chaos coefficients `(u_0, .., u_M)` at one spatial location.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeVector(pub Vec<f64>);

impl ModeVector {
    pub fn zeros(modes: usize) -> Self {
        ModeVector(vec![0.0; modes])
    }

    /// `a * phi_0 + b * phi_1`, padded with zeros up to `modes` entries.
    pub fn affine(a: f64, b: f64, modes: usize) -> Self {
        let mut v = vec![0.0; modes];
        if modes > 0 {
            v[0] = a;
        }
        if modes > 1 {
            v[1] = b;
        }
        ModeVector(v)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for ModeVector {
    fn from(v: Vec<f64>) -> Self {
        ModeVector(v)
    }
}

impl Deref for ModeVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ModeVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// The symmetric matrix `A(u)` with `A_jk = sum_i <phi_i phi_j phi_k> u_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrix(pub DenseMatrix);

impl SystemMatrix {
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.0[(j, k)]
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Expectation and variance of the expanded random field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub expectation: f64,
    pub variance: f64,
}

pub fn assemble_a(u: &[f64], t: &TripleProductTensor) -> Result<SystemMatrix> {
    t.check_len(u.len())?;
    let n = u.len();
    let mut a = DenseMatrix::zeros(n);
    for &(i, j, k, v) in t.nonzeros() {
        // Every distinct permutation of (i, j, k) contributes once.
        let mut perms = [
            (i, j, k),
            (i, k, j),
            (j, i, k),
            (j, k, i),
            (k, i, j),
            (k, j, i),
        ];
        perms.sort_unstable();
        let mut last = None;
        for p in perms {
            if last == Some(p) {
                continue;
            }
            last = Some(p);
            a[(p.1, p.2)] += v * u[p.0];
        }
    }
    Ok(SystemMatrix(a))
}

/// Galerkin flux `f_k = 1/2 sum_ij <phi_i phi_j phi_k> u_i u_j` into `out`.
///
/// Lengths are not checked; callers validate once per field.
pub fn flux_into(u: &[f64], t: &TripleProductTensor, out: &mut [f64]) {
    for (k, o) in out.iter_mut().enumerate() {
        *o = 0.5
            * t.mode_terms(k)
                .iter()
                .map(|p| p.weight * u[p.i] * u[p.j])
                .sum::<f64>();
    }
}

pub fn flux(u: &[f64], t: &TripleProductTensor) -> Result<ModeVector> {
    t.check_len(u.len())?;
    let mut out = ModeVector::zeros(u.len());
    flux_into(u, t, &mut out);
    Ok(out)
}

/// `psi = 1/6 u^T A(u) u`, whose gradient is the flux.
pub fn flux_potential(u: &[f64], t: &TripleProductTensor) -> Result<f64> {
    t.check_len(u.len())?;
    Ok(potential_unchecked(u, t))
}

pub(crate) fn potential_unchecked(u: &[f64], t: &TripleProductTensor) -> f64 {
    let mut s = 0.0;
    for &(i, j, k, v) in t.nonzeros() {
        let mult = if i == j && j == k {
            1.0
        } else if i == j || j == k {
            3.0
        } else {
            6.0
        };
        s += mult * v * u[i] * u[j] * u[k];
    }
    s / 6.0
}

/// Entropy `U = 1/2 |u|^2`.
pub fn entropy(u: &[f64]) -> f64 {
    0.5 * u.iter().map(|v| v * v).sum::<f64>()
}

/// Entropy flux `F = u . f(u) - psi(u)`.
pub fn entropy_flux(u: &[f64], t: &TripleProductTensor) -> Result<f64> {
    let f = flux(u, t)?;
    let uf: f64 = u.iter().zip(f.iter()).map(|(a, b)| a * b).sum();
    Ok(uf - potential_unchecked(u, t))
}

/// Eigenvalues of `A(u)`, ascending.
pub fn eigenvalues(u: &[f64], t: &TripleProductTensor) -> Result<Vec<f64>> {
    let a = assemble_a(u, t)?;
    Ok(symmetric_eigen(&a.0).values)
}

/// Spectral radius of `A(u)`.
pub fn max_abs_eigenvalue(u: &[f64], t: &TripleProductTensor) -> Result<f64> {
    t.check_len(u.len())?;
    Ok(spectral_radius_unchecked(u, t))
}

pub(crate) fn spectral_radius_unchecked(u: &[f64], t: &TripleProductTensor) -> f64 {
    match u.len() {
        1 => u[0].abs(),
        // A = [[u0, u1], [u1, u0]]
        2 => u[0].abs() + u[1].abs(),
        n if n <= SMALL => small_spectral_radius(u, t),
        _ => {
            let a = assemble_a(u, t).expect("length checked by caller");
            let vals = symmetric_eigen(&a.0).values;
            vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        }
    }
}

const SMALL: usize = 8;

/// Spectral radius of a stack copy of `A(u)`: Householder reduction to
/// tridiagonal form, then the two extreme eigenvalues by Laguerre's method.
fn small_spectral_radius(u: &[f64], t: &TripleProductTensor) -> f64 {
    match u.len() {
        3 => radius_fixed::<3>(u, t),
        4 => radius_fixed::<4>(u, t),
        5 => radius_fixed::<5>(u, t),
        6 => radius_fixed::<6>(u, t),
        7 => radius_fixed::<7>(u, t),
        _ => radius_fixed::<SMALL>(u, t),
    }
}

fn radius_fixed<const N: usize>(u: &[f64], t: &TripleProductTensor) -> f64 {
    let n = N;
    let u = &u[..N];
    let mut a = [[0.0f64; N]; N];
    for &(r, c, i, v) in t.matrix_terms() {
        a[r][c] += v * u[i];
    }
    for r in 0..n {
        for c in r + 1..n {
            a[c][r] = a[r][c];
        }
    }
    let mut d = [0.0f64; N];
    let mut e = [0.0f64; N];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[i][k].abs()).sum();
            if scale == 0.0 {
                e[i] = a[i][l];
            } else {
                for k in 0..=l {
                    a[i][k] /= scale;
                    h += a[i][k] * a[i][k];
                }
                let f = a[i][l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i][l] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j][k] * a[i][k];
                    }
                    for k in j + 1..=l {
                        g += a[k][j] * a[i][k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i][j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j][k] -= f * e[k] + g * a[i][k];
                    }
                }
            }
        } else {
            e[i] = a[i][l];
        }
    }
    for i in 0..n {
        d[i] = a[i][i];
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..n {
        let below = if k > 0 { e[k - 1].abs() } else { 0.0 };
        let above = if k + 1 < n { e[k].abs() } else { 0.0 };
        lo = lo.min(d[k] - below - above);
        hi = hi.max(d[k] + below + above);
    }
    let scale = hi.abs().max(lo.abs());
    extreme_root(&d, &e, hi, scale)
        .0
        .abs()
        .max(extreme_root(&d, &e, lo, scale).0.abs())
}

/// Root of `det(T - x I)` for the symmetric tridiagonal `T = (d, e)`, and the
/// number of iterations taken. The root is the one reached
/// by Laguerre's iteration from `start`. Started outside a Gershgorin bound the
/// iterates move monotonically to the extreme eigenvalue on that side.
///
/// Steps below a few ulps of `scale` are roundoff in `p`, so they end the
/// iteration; otherwise a root near zero can cycle between neighbouring floats.
fn extreme_root(d: &[f64], e: &[f64], start: f64, scale: f64) -> (f64, usize) {
    let n = d.len();
    let nf = n as f64;
    let mut x = start;
    for it in 0..200 {
        // p, p' and p'' by the three-term recurrence
        let (mut p0, mut p1) = (1.0, d[0] - x);
        let (mut q0, mut q1) = (0.0, -1.0);
        let (mut s0, mut s1) = (0.0, 0.0);
        for k in 1..n {
            let a = d[k] - x;
            let b = e[k - 1] * e[k - 1];
            let p2 = a * p1 - b * p0;
            let q2 = a * q1 - p1 - b * q0;
            let s2 = a * s1 - 2.0 * q1 - b * s0;
            (p0, p1, q0, q1, s0, s1) = (p1, p2, q1, q2, s1, s2);
        }
        if p1 == 0.0 {
            return (x, it);
        }
        let g = q1 / p1;
        let h = g * g - s1 / p1;
        let root = ((nf - 1.0) * (nf * h - g * g)).max(0.0).sqrt();
        let den = if g >= 0.0 { g + root } else { g - root };
        if den == 0.0 {
            return (x, it);
        }
        let step = nf / den;
        let next = x - step;
        if next == x || step.abs() <= 4.0 * f64::EPSILON * scale {
            return (next, it + 1);
        }
        x = next;
    }
    (x, 200)
}

pub fn moments(u: &[f64]) -> Moments {
    let expectation = u.first().copied().unwrap_or(0.0);
    let variance = u.iter().skip(1).map(|v| v * v).sum();
    Moments {
        expectation,
        variance,
    }
}

/// Rejects vectors whose length differs from `modes`.
pub fn check_modes(u: &[f64], modes: usize) -> Result<()> {
    if u.len() != modes {
        return Err(Error::OrderMismatch {
            expected: modes,
            found: u.len(),
        });
    }
    Ok(())
}
