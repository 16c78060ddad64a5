//! Diagonal-norm summation-by-parts operators on one reference element `[-1, 1]`.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub const MAX_DEGREE: usize = 20;

/// Which node family an operator set lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Gauss-Lobatto-Legendre nodes including both endpoints.
    GaussLobatto,
    /// One node at the cell center; `D = 0`. Turns the CPR scheme into first-order FV.
    FiniteVolume,
}

/// Nodes plus `D`, the diagonal norm `M`, restriction `R` and `B = diag(-1, 1)`.
#[derive(Debug, Clone)]
pub struct SbpOperators {
    pub kind: NodeKind,
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub d: DenseMatrix,
    /// Diagonal of the norm matrix.
    pub weights: Vec<f64>,
    /// First row of `R`: interpolation to `-1`.
    pub r_left: Vec<f64>,
    /// Second row of `R`: interpolation to `+1`.
    pub r_right: Vec<f64>,
}

impl SbpOperators {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Diagonal entries of `B`.
    pub fn boundary_signs() -> [f64; 2] {
        [-1.0, 1.0]
    }

    /// Trace at the left (`-1`) end.
    pub fn left_trace(&self, u: &[f64]) -> f64 {
        dot(&self.r_left, u)
    }

    /// Trace at the right (`+1`) end.
    pub fn right_trace(&self, u: &[f64]) -> f64 {
        dot(&self.r_right, u)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Legendre `P_n(x)` and its derivative.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut d_prev, mut d) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        let d_next = d_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

pub fn legendre(n: usize, x: f64) -> f64 {
    legendre_with_derivative(n, x).0
}

/// GLL nodes (ascending) and quadrature weights for degree `p >= 1`.
pub fn gauss_lobatto_legendre(p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; p + 1];
    nodes[0] = -1.0;
    nodes[p] = 1.0;
    let pp1 = (p * (p + 1)) as f64;
    for (j, node) in nodes.iter_mut().enumerate().take(p).skip(1) {
        let mut z = -(std::f64::consts::PI * j as f64 / p as f64).cos();
        // Newton on q = (1 - z^2) P_p'(z), using q' = -p(p+1) P_p(z).
        for _ in 0..100 {
            let (pv, dv) = legendre_with_derivative(p, z);
            let step = (1.0 - z * z) * dv / (-pp1 * pv);
            z -= step;
            if step.abs() <= 1e-15 {
                break;
            }
        }
        *node = z;
    }
    // Enforce exact antisymmetry of the node set.
    for j in 0..=p / 2 {
        let m = 0.5 * (nodes[p - j] - nodes[j]);
        nodes[j] = -m;
        nodes[p - j] = m;
    }
    if p % 2 == 0 {
        nodes[p / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&z| {
            let pv = legendre(p, z);
            2.0 / (pp1 * pv * pv)
        })
        .collect();
    (nodes, weights)
}

/// Lagrange differentiation matrix on arbitrary distinct nodes.
pub fn differentiation_matrix(nodes: &[f64]) -> DenseMatrix {
    let n = nodes.len();
    let bary: Vec<f64> = (0..n)
        .map(|j| {
            1.0 / (0..n)
                .filter(|&k| k != j)
                .map(|k| nodes[j] - nodes[k])
                .product::<f64>()
        })
        .collect();
    let mut d = DenseMatrix::zeros(n);
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                d[(i, j)] = v;
                row_sum += v;
            }
        }
        d[(i, i)] = -row_sum;
    }
    d
}

/// GLL operator set of degree `p` in `1..=20`.
pub fn lobatto_operators(p: usize) -> Result<SbpOperators> {
    if !(1..=MAX_DEGREE).contains(&p) {
        return Err(Error::param(
            "p",
            format!("degree {p} outside 1..={MAX_DEGREE}"),
        ));
    }
    let (nodes, weights) = gauss_lobatto_legendre(p);
    let d = differentiation_matrix(&nodes);
    let mut r_left = vec![0.0; p + 1];
    let mut r_right = vec![0.0; p + 1];
    r_left[0] = 1.0;
    r_right[p] = 1.0;
    Ok(SbpOperators {
        kind: NodeKind::GaussLobatto,
        degree: p,
        nodes,
        d,
        weights,
        r_left,
        r_right,
    })
}

/// Single-node set (`D = 0`, `M = [2]`, `R = [1; 1]`).
pub fn finite_volume_operators() -> SbpOperators {
    SbpOperators {
        kind: NodeKind::FiniteVolume,
        degree: 0,
        nodes: vec![0.0],
        d: DenseMatrix::zeros(1),
        weights: vec![2.0],
        r_left: vec![1.0],
        r_right: vec![1.0],
    }
}

/// Operator set of degree `p`; `p = 0` gives the finite-volume set.
pub fn operators_for_degree(p: usize) -> Result<SbpOperators> {
    if p == 0 {
        Ok(finite_volume_operators())
    } else {
        lobatto_operators(p)
    }
}

/// Max-norm residual of `M D + D^T M - R^T B R`.
pub fn sbp_residual(ops: &SbpOperators) -> f64 {
    let n = ops.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let md = ops.weights[i] * ops.d[(i, j)] + ops.d[(j, i)] * ops.weights[j];
            let rbr = ops.r_right[i] * ops.r_right[j] - ops.r_left[i] * ops.r_left[j];
            worst = worst.max((md - rbr).abs());
        }
    }
    worst
}

/// Whether the SBP identity holds to `tol`, with the residual.
pub fn verify_sbp(ops: &SbpOperators, tol: f64) -> (bool, f64) {
    let r = sbp_residual(ops);
    (r <= tol, r)
}

/// Nodal representation of a diagonal modal damping.
#[derive(Debug, Clone)]
pub struct FilterMatrix {
    pub degree: usize,
    /// Damping factor per Legendre mode.
    pub sigma: Vec<f64>,
    /// `V diag(sigma) V^{-1}` acting on nodal values.
    pub nodal: DenseMatrix,
}

impl FilterMatrix {
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        self.nodal.matvec_into(u, out);
    }
}

/// Exponential filter `sigma_k = exp(-eps (k/p)^(2s))` on the GLL nodes of degree `p`.
///
/// The modal transform is the discrete GLL projection onto Legendre
/// polynomials, which is exact for degree-`p` data and keeps the mean.
pub fn exponential_filter(p: usize, s: u32, eps: f64) -> Result<FilterMatrix> {
    if s < 1 {
        return Err(Error::param("filter_order", "must be at least 1"));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::param(
            "filter_strength",
            format!("{eps} must be finite and nonnegative"),
        ));
    }
    let ops = lobatto_operators(p)?;
    let n = p + 1;
    let sigma: Vec<f64> = (0..n)
        .map(|k| (-eps * (k as f64 / p as f64).powi(2 * s as i32)).exp())
        .collect();
    let vand: Vec<Vec<f64>> = ops
        .nodes
        .iter()
        .map(|&z| (0..n).map(|k| legendre(k, z)).collect())
        .collect();
    let gamma: Vec<f64> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| ops.weights[i] * vand[i][k] * vand[i][k])
                .sum()
        })
        .collect();
    let mut nodal = DenseMatrix::zeros(n);
    for i in 0..n {
        for l in 0..n {
            nodal[(i, l)] = (0..n)
                .map(|k| vand[i][k] * sigma[k] * ops.weights[l] * vand[l][k] / gamma[k])
                .sum();
        }
    }
    Ok(FilterMatrix {
        degree: p,
        sigma,
        nodal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_node_operator() {
        let ops = lobatto_operators(1).unwrap();
        assert_eq!(ops.nodes, vec![-1.0, 1.0]);
        assert_eq!(ops.weights, vec![1.0, 1.0]);
        assert_eq!(ops.d.row(0), &[-0.5, 0.5]);
        assert_eq!(ops.d.row(1), &[-0.5, 0.5]);
        assert!(sbp_residual(&ops) < 1e-15);
    }

    #[test]
    fn three_node_weights() {
        let ops = lobatto_operators(2).unwrap();
        assert_eq!(ops.nodes, vec![-1.0, 0.0, 1.0]);
        for (w, e) in ops.weights.iter().zip([1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]) {
            assert!((w - e).abs() < 1e-15);
        }
    }

    #[test]
    fn degree_range() {
        assert!(lobatto_operators(0).is_err());
        assert!(lobatto_operators(21).is_err());
        assert!(lobatto_operators(20).is_ok());
    }

    #[test]
    fn corrupted_operator_fails_check() {
        let mut ops = lobatto_operators(3).unwrap();
        assert!(verify_sbp(&ops, 1e-12).0);
        ops.d[(1, 2)] += 1e-6;
        assert!(!verify_sbp(&ops, 1e-12).0);
    }

    #[test]
    fn finite_volume_set_is_sbp() {
        let ops = finite_volume_operators();
        assert_eq!(sbp_residual(&ops), 0.0);
    }

    #[test]
    fn filter_examples() {
        let f = exponential_filter(4, 1, 0.0).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((f.nodal[(i, j)] - e).abs() < 1e-13);
            }
        }
        let f = exponential_filter(9, 1, 100.0).unwrap();
        assert!((f.sigma[9] / (-100f64).exp() - 1.0).abs() < 1e-12);
        assert_eq!(f.sigma[0], 1.0);
        let mut out = vec![0.0; 10];
        f.apply(&[2.5; 10], &mut out);
        assert!(out.iter().all(|v| (v - 2.5).abs() < 1e-13));
        assert!(exponential_filter(3, 0, 1.0).is_err());
        assert!(exponential_filter(3, 1, -1.0).is_err());
    }
}
