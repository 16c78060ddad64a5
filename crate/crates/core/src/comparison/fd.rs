//! Global diagonal-norm SBP finite differences with artificial dissipation.
//!
//! The grid has `N + 1` nodes including both ends. Boundary data enters
//! through flux-based penalty terms at the end nodes.

use crate::cpr::BoundaryCondition;
use crate::error::{Error, Result};
use crate::flux::FluxKind;
use crate::galerkin::{flux_into, spectral_radius_unchecked};
use crate::pc_basis::TripleProductTensor;

/// Which artificial dissipation terms are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DissipationMode {
    SecondAndFourth,
    /// Second-difference term switched off.
    FourthOnly,
    Off,
}

impl std::str::FromStr for DissipationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "second_and_fourth" | "both" => Ok(DissipationMode::SecondAndFourth),
            "fourth_only" | "fourth" => Ok(DissipationMode::FourthOnly),
            "off" | "none" => Ok(DissipationMode::Off),
            other => Err(Error::Config(format!("unknown fd dissipation '{other}'"))),
        }
    }
}

impl std::fmt::Display for DissipationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DissipationMode::SecondAndFourth => "second_and_fourth",
            DissipationMode::FourthOnly => "fourth_only",
            DissipationMode::Off => "off",
        })
    }
}

/// Sparse first-derivative SBP operator on a uniform grid, in units of `1/dx`.
#[derive(Debug, Clone)]
pub struct FdOperator {
    pub order: usize,
    pub x_lo: f64,
    pub dx: f64,
    /// Norm weights divided by `dx`.
    pub norm: Vec<f64>,
    /// Rows of `dx * D` as `(column, value)`.
    pub rows: Vec<Vec<(usize, f64)>>,
}

const D4_BOUNDARY: [&[f64]; 4] = [
    &[-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0],
    &[-0.5, 0.0, 0.5],
    &[4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0],
    &[3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0],
];
const H4_BOUNDARY: [f64; 4] = [17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0];
const D4_INTERIOR: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];

impl FdOperator {
    /// Operator of interior order 2 or 4 on `intervals + 1` nodes over `[x_lo, x_hi]`.
    pub fn new(order: usize, x_lo: f64, x_hi: f64, intervals: usize) -> Result<Self> {
        if intervals < 8 {
            return Err(Error::param(
                "N",
                format!("{intervals} intervals, need at least 8"),
            ));
        }
        if !(x_hi > x_lo) {
            return Err(Error::param("domain", format!("[{x_lo}, {x_hi}] is empty")));
        }
        let n = intervals;
        let dx = (x_hi - x_lo) / n as f64;
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + 1];
        let mut norm = vec![1.0; n + 1];
        match order {
            2 => {
                norm[0] = 0.5;
                norm[n] = 0.5;
                rows[0] = vec![(0, -1.0), (1, 1.0)];
                rows[n] = vec![(n - 1, -1.0), (n, 1.0)];
                for (i, row) in rows.iter_mut().enumerate().take(n).skip(1) {
                    *row = vec![(i - 1, -0.5), (i + 1, 0.5)];
                }
            }
            4 => {
                for (r, coeffs) in D4_BOUNDARY.iter().enumerate() {
                    norm[r] = H4_BOUNDARY[r];
                    norm[n - r] = H4_BOUNDARY[r];
                    rows[r] = coeffs
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v != 0.0)
                        .map(|(c, v)| (c, *v))
                        .collect();
                    rows[n - r] = coeffs
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v != 0.0)
                        .map(|(c, v)| (n - c, -*v))
                        .rev()
                        .collect();
                }
                for (i, row) in rows.iter_mut().enumerate().take(n - 3).skip(4) {
                    *row = D4_INTERIOR
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v != 0.0)
                        .map(|(o, v)| (i + o - 2, *v))
                        .collect();
                }
            }
            other => {
                return Err(Error::param(
                    "fd_order",
                    format!("interior order {other} not available (2 or 4)"),
                ))
            }
        }
        Ok(FdOperator {
            order,
            x_lo,
            dx,
            norm,
            rows,
        })
    }

    pub fn nodes(&self) -> usize {
        self.norm.len()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.nodes())
            .map(|i| self.x_lo + self.dx * i as f64)
            .collect()
    }

    /// `D v` for a strided component of a node-major array.
    pub fn apply_strided(&self, v: &[f64], stride: usize, comp: usize, out: &mut [f64]) {
        let inv = 1.0 / self.dx;
        for (i, row) in self.rows.iter().enumerate() {
            let s: f64 = row.iter().map(|&(c, w)| w * v[c * stride + comp]).sum();
            out[i * stride + comp] = s * inv;
        }
    }

    /// Max-norm residual of `H D + (H D)^T - diag(-1, 0, .., 0, 1)` in reference units.
    pub fn sbp_residual(&self) -> f64 {
        let n = self.nodes();
        let mut q = vec![0.0; n * n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, w) in row {
                q[i * n + c] += self.norm[i] * w;
            }
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut b = 0.0;
                if i == j && i == 0 {
                    b = -1.0;
                }
                if i == j && i == n - 1 {
                    b = 1.0;
                }
                worst = worst.max((q[i * n + j] + q[j * n + i] - b).abs());
            }
        }
        worst
    }
}

/// Split-form FD discretization of the Galerkin system.
#[derive(Debug, Clone, Copy)]
pub struct FdSolver<'a> {
    pub op: &'a FdOperator,
    pub tensor: &'a TripleProductTensor,
    pub flux: FluxKind,
    pub bc: &'a BoundaryCondition,
    pub dissipation: DissipationMode,
    pub c2: f64,
    pub c4: f64,
}

impl<'a> FdSolver<'a> {
    pub fn new(
        op: &'a FdOperator,
        tensor: &'a TripleProductTensor,
        flux: FluxKind,
        bc: &'a BoundaryCondition,
        dissipation: DissipationMode,
        c2: f64,
        c4: f64,
    ) -> Result<Self> {
        flux.validate()?;
        bc.validate(tensor.modes())?;
        if !(c2 >= 0.0 && c4 >= 0.0) {
            return Err(Error::param(
                "fd_c2/fd_c4",
                format!("({c2}, {c4}) must be nonnegative"),
            ));
        }
        Ok(FdSolver {
            op,
            tensor,
            flux,
            bc,
            dissipation,
            c2,
            c4,
        })
    }

    pub fn modes(&self) -> usize {
        self.tensor.modes()
    }

    pub fn initial_state<F: FnMut(f64) -> Vec<f64>>(&self, mut init: F) -> Result<Vec<f64>> {
        let m = self.modes();
        let mut out = Vec::with_capacity(self.op.nodes() * m);
        for x in self.op.positions() {
            let v = init(x);
            if v.len() != m {
                return Err(Error::OrderMismatch {
                    expected: m,
                    found: v.len(),
                });
            }
            out.extend_from_slice(&v);
        }
        Ok(out)
    }

    fn coefficients(&self) -> (f64, f64) {
        match self.dissipation {
            DissipationMode::SecondAndFourth => (self.c2, self.c4),
            DissipationMode::FourthOnly => (0.0, self.c4),
            DissipationMode::Off => (0.0, 0.0),
        }
    }

    pub fn rhs(&self, state: &[f64]) -> Result<Vec<f64>> {
        if state.len() != self.op.nodes() * self.modes() {
            return Err(Error::Shape(format!(
                "{} values for {} nodes of {} modes",
                state.len(),
                self.op.nodes(),
                self.modes()
            )));
        }
        let mut out = vec![0.0; state.len()];
        self.rhs_into(state, &mut out);
        Ok(out)
    }

    pub fn rhs_into(&self, u: &[f64], out: &mut [f64]) {
        let m = self.modes();
        let n = self.op.nodes();
        let t = self.tensor;
        let mut f = vec![0.0; n * m];
        for i in 0..n {
            flux_into(&u[i * m..(i + 1) * m], t, &mut f[i * m..(i + 1) * m]);
        }
        let mut df = vec![0.0; n * m];
        let mut du = vec![0.0; n * m];
        for k in 0..m {
            self.op.apply_strided(&f, m, k, &mut df);
            self.op.apply_strided(u, m, k, &mut du);
        }
        // -(1/3) D (A u) - (1/3) A (D u), with A u = 2 f
        for i in 0..n {
            for k in 0..m {
                let adv: f64 = t
                    .mode_terms(k)
                    .iter()
                    .map(|p| {
                        0.5 * p.weight
                            * (u[i * m + p.i] * du[i * m + p.j] + u[i * m + p.j] * du[i * m + p.i])
                    })
                    .sum();
                out[i * m + k] = -(2.0 * df[i * m + k] + adv) / 3.0;
            }
        }

        self.add_boundary_terms(u, &f, out);
        self.add_dissipation(u, out);
    }

    fn add_boundary_terms(&self, u: &[f64], f: &[f64], out: &mut [f64]) {
        let m = self.modes();
        let n = self.op.nodes();
        let last = n - 1;
        let first_state = &u[..m];
        let last_state = &u[last * m..];
        let (gl, gr) = match self.bc {
            BoundaryCondition::Periodic => (last_state, first_state),
            bc => (bc.left_ghost(first_state), bc.right_ghost(last_state)),
        };
        let radius = |s: &[f64]| {
            if self.flux.needs_wave_speed() {
                spectral_radius_unchecked(s, self.tensor)
            } else {
                0.0
            }
        };
        let mut fl = vec![0.0; m];
        let mut fr = vec![0.0; m];
        self.flux.evaluate_into(
            gl,
            first_state,
            radius(gl),
            radius(first_state),
            self.tensor,
            &mut fl,
        );
        self.flux.evaluate_into(
            last_state,
            gr,
            radius(last_state),
            radius(gr),
            self.tensor,
            &mut fr,
        );
        let h0 = self.op.norm[0] * self.op.dx;
        let hn = self.op.norm[last] * self.op.dx;
        for k in 0..m {
            out[k] += (fl[k] - f[k]) / h0;
            out[last * m + k] -= (fr[k] - f[last * m + k]) / hn;
        }
    }

    /// `-(1/dx) H_ref^-1 (c2 D1^T L D1 + c4 D2^T L D2) u`, undivided differences.
    fn add_dissipation(&self, u: &[f64], out: &mut [f64]) {
        let (c2, c4) = self.coefficients();
        if c2 == 0.0 && c4 == 0.0 {
            return;
        }
        let m = self.modes();
        let n = self.op.nodes();
        let rho: Vec<f64> = u
            .chunks(m)
            .map(|s| spectral_radius_unchecked(s, self.tensor))
            .collect();
        let mut acc = vec![0.0; n * m];
        if c2 > 0.0 {
            for e in 0..n - 1 {
                let lam = c2 * rho[e].max(rho[e + 1]);
                for k in 0..m {
                    let d = lam * (u[(e + 1) * m + k] - u[e * m + k]);
                    acc[e * m + k] -= d;
                    acc[(e + 1) * m + k] += d;
                }
            }
        }
        if c4 > 0.0 {
            for r in 1..n - 1 {
                let lam = c4 * rho[r - 1].max(rho[r]).max(rho[r + 1]);
                for k in 0..m {
                    let d2 = lam * (u[(r - 1) * m + k] - 2.0 * u[r * m + k] + u[(r + 1) * m + k]);
                    acc[(r - 1) * m + k] += d2;
                    acc[r * m + k] -= 2.0 * d2;
                    acc[(r + 1) * m + k] += d2;
                }
            }
        }
        let inv_dx = 1.0 / self.op.dx;
        for i in 0..n {
            let s = inv_dx / self.op.norm[i];
            for k in 0..m {
                out[i * m + k] -= s * acc[i * m + k];
            }
        }
    }

    /// `sum_i H_i u_i` per mode.
    pub fn total_mass(&self, u: &[f64]) -> Vec<f64> {
        let m = self.modes();
        let mut mass = vec![0.0; m];
        for (i, s) in u.chunks(m).enumerate() {
            for (a, v) in mass.iter_mut().zip(s) {
                *a += self.op.norm[i] * self.op.dx * v;
            }
        }
        mass
    }

    /// `1/2 sum_i H_i |u_i|^2`.
    pub fn total_entropy(&self, u: &[f64]) -> f64 {
        let m = self.modes();
        0.5 * u
            .chunks(m)
            .enumerate()
            .map(|(i, s)| self.op.norm[i] * self.op.dx * s.iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
    }

    /// `sum_i H_i u_i . rate_i`.
    pub fn entropy_rate(&self, u: &[f64], rate: &[f64]) -> f64 {
        let m = self.modes();
        (0..self.op.nodes())
            .map(|i| {
                let s: f64 = (0..m).map(|k| u[i * m + k] * rate[i * m + k]).sum();
                self.op.norm[i] * self.op.dx * s
            })
            .sum()
    }

    /// Quadratic form `u^T H AD(u)` of the dissipation alone, for audits.
    pub fn dissipation_energy(&self, u: &[f64]) -> f64 {
        let mut out = vec![0.0; u.len()];
        self.add_dissipation(u, &mut out);
        self.entropy_rate(u, &out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galerkin::ModeVector;
    use crate::pc_basis::build_tensor;

    #[test]
    fn sbp_identity_both_orders() {
        for order in [2, 4] {
            let op = FdOperator::new(order, 0.0, 1.0, 12).unwrap();
            assert!(op.sbp_residual() < 1e-14, "order {order}");
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(FdOperator::new(4, 0.0, 1.0, 7).is_err());
        assert!(FdOperator::new(6, 0.0, 1.0, 20).is_err());
    }

    #[test]
    fn exact_on_low_degree_polynomials() {
        let op = FdOperator::new(4, 0.0, 2.0, 16).unwrap();
        let x = op.positions();
        let v: Vec<f64> = x.iter().map(|x| x * x).collect();
        let mut d = vec![0.0; v.len()];
        op.apply_strided(&v, 1, 0, &mut d);
        for (xi, di) in x.iter().zip(&d) {
            assert!((di - 2.0 * xi).abs() < 1e-11);
        }
    }

    #[test]
    fn constant_state_is_steady() {
        let op = FdOperator::new(4, 0.0, 1.0, 20).unwrap();
        let t = build_tensor(3);
        let c = vec![0.8, 0.2, 0.05, -0.1];
        let bc = BoundaryCondition::InflowDirichlet {
            left: ModeVector(c.clone()),
            right: ModeVector(c.clone()),
        };
        let s = FdSolver::new(
            &op,
            &t,
            FluxKind::llf(),
            &bc,
            DissipationMode::SecondAndFourth,
            0.5,
            0.1,
        )
        .unwrap();
        let u = s.initial_state(|_| c.clone()).unwrap();
        assert!(s.rhs(&u).unwrap().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn parse_modes() {
        assert_eq!(
            "fourth-only".parse::<DissipationMode>().unwrap(),
            DissipationMode::FourthOnly
        );
        assert!("sixth".parse::<DissipationMode>().is_err());
    }
}
