//! Orthogonal polynomial bases for the chaos expansion.
//!
//! The evolved system always uses the probabilists' Hermite polynomials,
//! normalized so that `<phi_i phi_j> = delta_ij` under the standard normal
//! density. Jacobi and Laguerre families are only needed for the generalized
//! reference solutions.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, DenseMatrix};

/// `1/sqrt(2 pi)`
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Normalized probabilists' Hermite polynomial `phi_i(xi)`.
///
/// Uses the orthonormal three-term recurrence
/// `sqrt(n+1) phi_{n+1} = xi phi_n - sqrt(n) phi_{n-1}`.
pub fn hermite_eval(i: usize, xi: f64) -> f64 {
    let mut prev = 1.0;
    if i == 0 {
        return prev;
    }
    let mut cur = xi;
    for n in 1..i {
        let nf = n as f64;
        let next = (xi * cur - nf.sqrt() * prev) / (nf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}

/// All of `phi_0(xi) .. phi_n(xi)` in one recurrence pass.
pub fn hermite_eval_all(n: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(xi);
    for k in 1..n {
        let kf = k as f64;
        let next = (xi * out[k] - kf.sqrt() * out[k - 1]) / (kf + 1.0).sqrt();
        out.push(next);
    }
    out
}

/// Standard normal density.
pub fn gaussian_density(xi: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * xi * xi).exp()
}

/// `phi_i(xi) * omega(xi)` with `omega` the standard normal density.
///
/// Satisfies `sqrt(i) phi_i omega = -(phi_{i-1} omega)'`.
pub fn weighted_eval(i: usize, xi: f64) -> f64 {
    let w = gaussian_density(xi);
    if w == 0.0 {
        return 0.0;
    }
    hermite_eval(i, xi) * w
}

/// `ln(n!)`; factorials up to 22! are exact in f64, so small arguments avoid
/// the roundoff of `ln_gamma`.
fn ln_factorial(n: usize) -> f64 {
    if n <= 22 {
        (1..=n).fold(1.0f64, |acc, k| acc * k as f64).ln()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Closed-form Hermite triple product `<phi_i phi_j phi_k>`.
///
/// Zero when `i+j+k` is odd or the triangle condition `max(i,j,k) <= s`
/// fails, with `s = (i+j+k)/2`. Otherwise
/// `sqrt(i! j! k!) / ((s-i)! (s-j)! (s-k)!)`, evaluated in log-space.
pub fn hermite_triple(i: usize, j: usize, k: usize) -> f64 {
    let sum = i + j + k;
    if sum % 2 == 1 {
        return 0.0;
    }
    let s = sum / 2;
    if i > s || j > s || k > s {
        return 0.0;
    }
    let log_num = 0.5 * (ln_factorial(i) + ln_factorial(j) + ln_factorial(k));
    let log_den = ln_factorial(s - i) + ln_factorial(s - j) + ln_factorial(s - k);
    (log_num - log_den).exp()
}

/// One nonzero contribution `weight * u_i * u_j` to mode `k`, with `i <= j`.
///
/// `weight` already folds in the multiplicity of the unordered pair, so a
/// symmetric double sum `sum_{i,j} T_ijk g(i,j)` equals `sum weight * g(i,j)`
/// over the terms of mode `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Sparse, fully symmetric tensor of Hermite triple products up to order `M`.
#[derive(Debug, Clone)]
pub struct TripleProductTensor {
    order: usize,
    /// Nonzeros with `i <= j <= k`.
    entries: Vec<(usize, usize, usize, f64)>,
    /// Per output mode `k`, nonzero `(i <= j)` pairs.
    by_mode: Vec<Vec<PairTerm>>,
    /// `(row, col, i, value)` with `row <= col`: `A[row][col] += value * u_i`.
    matrix_terms: Vec<(usize, usize, usize, f64)>,
}

impl TripleProductTensor {
    /// Highest retained chaos index `M`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of retained modes, `M + 1`.
    pub fn modes(&self) -> usize {
        self.order + 1
    }

    /// Canonical nonzeros `(i, j, k, value)` with `i <= j <= k`.
    pub fn nonzeros(&self) -> &[(usize, usize, usize, f64)] {
        &self.entries
    }

    /// Symmetric lookup of `<phi_i phi_j phi_k>`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        if i > self.order || j > self.order || k > self.order {
            return 0.0;
        }
        let mut idx = [i, j, k];
        idx.sort_unstable();
        self.entries
            .binary_search_by(|e| (e.0, e.1, e.2).cmp(&(idx[0], idx[1], idx[2])))
            .map(|pos| self.entries[pos].3)
            .unwrap_or(0.0)
    }

    /// Nonzero pair terms contributing to mode `k`.
    pub fn mode_terms(&self, k: usize) -> &[PairTerm] {
        &self.by_mode[k]
    }

    /// Terms `(row, col, i, value)`, `row <= col`, of `A(u)_{row,col} = sum_i value u_i`.
    pub fn matrix_terms(&self) -> &[(usize, usize, usize, f64)] {
        &self.matrix_terms
    }

    /// Checks a vector length against the tensor order.
    pub fn check_len(&self, len: usize) -> Result<()> {
        if len != self.modes() {
            return Err(Error::OrderMismatch {
                expected: self.modes(),
                found: len,
            });
        }
        Ok(())
    }
}

/// Builds the triple-product tensor for chaos order `M`.
pub fn build_tensor(order: usize) -> TripleProductTensor {
    let mut entries = Vec::new();
    for i in 0..=order {
        for j in i..=order {
            for k in j..=order {
                let v = hermite_triple(i, j, k);
                if v != 0.0 {
                    entries.push((i, j, k, v));
                }
            }
        }
    }
    let mut by_mode = vec![Vec::new(); order + 1];
    for (k, terms) in by_mode.iter_mut().enumerate() {
        for i in 0..=order {
            for j in i..=order {
                let v = hermite_triple(i, j, k);
                if v != 0.0 {
                    let weight = if i == j { v } else { 2.0 * v };
                    terms.push(PairTerm { i, j, weight });
                }
            }
        }
    }
    let mut matrix_terms = Vec::new();
    for row in 0..=order {
        for col in row..=order {
            for i in 0..=order {
                let v = hermite_triple(i, row, col);
                if v != 0.0 {
                    matrix_terms.push((row, col, i, v));
                }
            }
        }
    }
    TripleProductTensor {
        order,
        entries,
        by_mode,
        matrix_terms,
    }
}

/// Gauss rule from a Jacobi (tridiagonal) matrix via Golub-Welsch.
///
/// `diag[k]` and `offdiag[k]` (length `n-1`) are the monic recurrence
/// coefficients `a_k` and `sqrt(b_{k+1})`; `mass` is the total weight.
pub fn golub_welsch(diag: &[f64], offdiag: &[f64], mass: f64) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    assert_eq!(offdiag.len() + 1, n.max(1));
    let mut jm = DenseMatrix::zeros(n);
    for k in 0..n {
        jm[(k, k)] = diag[k];
        if k + 1 < n {
            jm[(k, k + 1)] = offdiag[k];
            jm[(k + 1, k)] = offdiag[k];
        }
    }
    let eig = symmetric_eigen(&jm);
    let weights = (0..n)
        .map(|k| mass * eig.vectors[(0, k)] * eig.vectors[(0, k)])
        .collect();
    (eig.values, weights)
}

/// `n`-point Gauss-Hermite rule for the standard normal density (weights sum to 1).
///
/// The eigenvalue nodes are polished by Newton steps on `phi_n` and the
/// weights taken from `1 / (n phi_{n-1}(x)^2)`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|k| (k as f64).sqrt()).collect();
    let (mut x, _) = golub_welsch(&diag, &off, 1.0);
    if n == 0 {
        return (x, Vec::new());
    }
    let nf = n as f64;
    let mut w = Vec::with_capacity(n);
    for xk in x.iter_mut() {
        for _ in 0..3 {
            let step = hermite_eval(n, *xk) / (nf.sqrt() * hermite_eval(n - 1, *xk));
            *xk -= step;
            if step.abs() <= 1e-16 * xk.abs().max(1.0) {
                break;
            }
        }
        let p = hermite_eval(n - 1, *xk);
        w.push(1.0 / (nf * p * p));
    }
    (x, w)
}

/// Brute-force `<phi_i phi_j phi_k>` by Gauss-Hermite quadrature.
///
/// Needs at least `(i+j+k)/2 + 1` nodes so the integrand is integrated exactly.
pub fn triple_quadrature_oracle(i: usize, j: usize, k: usize, nodes: usize) -> Result<f64> {
    let needed = (i + j + k) / 2 + 1;
    if nodes < needed {
        return Err(Error::QuadratureTooSmall {
            nodes,
            degree: i + j + k,
        });
    }
    let (x, w) = gauss_hermite(nodes);
    Ok(x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| wi * hermite_eval(i, xi) * hermite_eval(j, xi) * hermite_eval(k, xi))
        .sum())
}

/// Classical orthogonal polynomial families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrthogonalFamily {
    /// Orthonormal probabilists' Hermite, weight = standard normal density.
    HermiteNormalized,
    /// `P_n^{(alpha, beta)}` on `[-1, 1]`, weight `(1-x)^alpha (1+x)^beta`.
    Jacobi { alpha: f64, beta: f64 },
    /// `L_n^{(alpha)}` on `[0, inf)`, weight `x^alpha e^{-x}`.
    Laguerre { alpha: f64 },
}

impl OrthogonalFamily {
    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        let f = OrthogonalFamily::Jacobi { alpha, beta };
        f.validate()?;
        Ok(f)
    }

    pub fn laguerre(alpha: f64) -> Result<Self> {
        let f = OrthogonalFamily::Laguerre { alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > -1.0;
        match *self {
            OrthogonalFamily::HermiteNormalized => Ok(()),
            OrthogonalFamily::Jacobi { alpha, beta } => {
                if !ok(alpha) {
                    return Err(Error::param("alpha", format!("{alpha} must exceed -1")));
                }
                if !ok(beta) {
                    return Err(Error::param("beta", format!("{beta} must exceed -1")));
                }
                Ok(())
            }
            OrthogonalFamily::Laguerre { alpha } => {
                if !ok(alpha) {
                    return Err(Error::param("alpha", format!("{alpha} must exceed -1")));
                }
                Ok(())
            }
        }
    }

    /// Closed support of the weight.
    pub fn support(&self) -> (f64, f64) {
        match self {
            OrthogonalFamily::HermiteNormalized => (f64::NEG_INFINITY, f64::INFINITY),
            OrthogonalFamily::Jacobi { .. } => (-1.0, 1.0),
            OrthogonalFamily::Laguerre { .. } => (0.0, f64::INFINITY),
        }
    }

    /// Weight function, zero outside the support.
    pub fn weight(&self, xi: f64) -> f64 {
        match *self {
            OrthogonalFamily::HermiteNormalized => gaussian_density(xi),
            OrthogonalFamily::Jacobi { alpha, beta } => {
                if !(-1.0..=1.0).contains(&xi) {
                    return 0.0;
                }
                pow_weight(1.0 - xi, alpha) * pow_weight(1.0 + xi, beta)
            }
            OrthogonalFamily::Laguerre { alpha } => {
                if xi < 0.0 {
                    return 0.0;
                }
                pow_weight(xi, alpha) * (-xi).exp()
            }
        }
    }

    /// Degree-`n` member of the family.
    pub fn eval(&self, n: usize, xi: f64) -> f64 {
        match *self {
            OrthogonalFamily::HermiteNormalized => hermite_eval(n, xi),
            OrthogonalFamily::Jacobi { alpha, beta } => jacobi_eval(n, alpha, beta, xi),
            OrthogonalFamily::Laguerre { alpha } => laguerre_eval(n, alpha, xi),
        }
    }

    /// `<p_n, p_n>` under the (unnormalized) weight.
    pub fn norm_sq(&self, n: usize) -> f64 {
        match *self {
            OrthogonalFamily::HermiteNormalized => 1.0,
            OrthogonalFamily::Jacobi { alpha, beta } => jacobi_norm_sq(n, alpha, beta),
            OrthogonalFamily::Laguerre { alpha } => {
                (ln_gamma(n as f64 + alpha + 1.0) - ln_factorial(n)).exp()
            }
        }
    }

    /// The family whose weight is `omega * Q`, i.e. the parameter shift used
    /// by the Rodrigues-type derivative identity.
    pub fn shifted(&self, by: f64) -> Self {
        match *self {
            OrthogonalFamily::HermiteNormalized => OrthogonalFamily::HermiteNormalized,
            OrthogonalFamily::Jacobi { alpha, beta } => OrthogonalFamily::Jacobi {
                alpha: alpha + by,
                beta: beta + by,
            },
            OrthogonalFamily::Laguerre { alpha } => {
                OrthogonalFamily::Laguerre { alpha: alpha + by }
            }
        }
    }

    /// `n`-point Gauss rule for this family's weight.
    pub fn gauss_rule(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        match *self {
            OrthogonalFamily::HermiteNormalized => gauss_hermite(n),
            OrthogonalFamily::Jacobi { alpha, beta } => {
                let (diag, off) = jacobi_recurrence(n, alpha, beta);
                golub_welsch(&diag, &off, jacobi_norm_sq(0, alpha, beta))
            }
            OrthogonalFamily::Laguerre { alpha } => {
                let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
                let off: Vec<f64> = (1..n)
                    .map(|k| (k as f64 * (k as f64 + alpha)).sqrt())
                    .collect();
                golub_welsch(&diag, &off, ln_gamma(alpha + 1.0).exp())
            }
        }
    }
}

fn pow_weight(base: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        1.0
    } else {
        base.powf(exponent)
    }
}

/// Evaluates a family member, rejecting invalid parameters.
pub fn family_eval(family: OrthogonalFamily, n: usize, xi: f64) -> Result<f64> {
    family.validate()?;
    Ok(family.eval(n, xi))
}

fn jacobi_eval(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    for k in 1..n {
        let k = k as f64;
        let c = 2.0 * k + a + b;
        let a1 = 2.0 * (k + 1.0) * (k + a + b + 1.0) * c;
        let a2 = (c + 1.0) * (a * a - b * b);
        let a3 = c * (c + 1.0) * (c + 2.0);
        let a4 = 2.0 * (k + a) * (k + b) * (c + 2.0);
        let next = ((a2 + a3 * x) * cur - a4 * prev) / a1;
        prev = cur;
        cur = next;
    }
    cur
}

fn jacobi_norm_sq(n: usize, a: f64, b: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    if n == 0 {
        return ((a + b + 1.0) * ln2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
            - ln_gamma(a + b + 2.0))
        .exp();
    }
    let nf = n as f64;
    ((a + b + 1.0) * ln2 - (2.0 * nf + a + b + 1.0).ln()
        + ln_gamma(nf + a + 1.0)
        + ln_gamma(nf + b + 1.0)
        - ln_gamma(nf + a + b + 1.0)
        - ln_factorial(n))
    .exp()
}

/// Monic three-term recurrence of the Jacobi weight: `(a_k, sqrt(b_{k+1}))`.
fn jacobi_recurrence(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let kf = k as f64;
        let c = 2.0 * kf + a + b;
        if k == 0 {
            diag.push((b - a) / (a + b + 2.0));
        } else {
            diag.push((b * b - a * a) / (c * (c + 2.0)));
        }
    }
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let kf = k as f64;
        let c = 2.0 * kf + a + b;
        let bk = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (c * c * (c + 1.0) * (c - 1.0))
        };
        off.push(bk.sqrt());
    }
    (diag, off)
}

fn laguerre_eval(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `sqrt(2 pi)`, exposed for reference-solution formulas.
pub fn sqrt_2pi() -> f64 {
    (2.0 * PI).sqrt()
}
