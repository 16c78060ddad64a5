//! First-order finite volume scheme with scaled Lax-Friedrichs dissipation.

use crate::cpr::{BoundaryCondition, Mesh1D};
use crate::error::{Error, Result};
use crate::flux::FluxKind;
use crate::galerkin::spectral_radius_unchecked;
use crate::pc_basis::TripleProductTensor;

/// Cell averages on a uniform mesh, stored cell-major with modes fastest.
#[derive(Debug, Clone, Copy)]
pub struct FvSolver<'a> {
    pub mesh: &'a Mesh1D,
    pub tensor: &'a TripleProductTensor,
    pub omega: f64,
    pub bc: &'a BoundaryCondition,
}

impl<'a> FvSolver<'a> {
    pub fn new(
        mesh: &'a Mesh1D,
        tensor: &'a TripleProductTensor,
        omega: f64,
        bc: &'a BoundaryCondition,
    ) -> Result<Self> {
        FluxKind::LocalLaxFriedrichs { omega }.validate()?;
        bc.validate(tensor.modes())?;
        Ok(FvSolver {
            mesh,
            tensor,
            omega,
            bc,
        })
    }

    pub fn modes(&self) -> usize {
        self.tensor.modes()
    }

    pub fn cells(&self) -> usize {
        self.mesh.elements
    }

    /// Cell centers.
    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells()).map(|i| self.mesh.map(i, 0.0)).collect()
    }

    /// Samples `init` at cell centers.
    pub fn initial_state<F: FnMut(f64) -> Vec<f64>>(&self, mut init: F) -> Result<Vec<f64>> {
        let m = self.modes();
        let mut out = Vec::with_capacity(self.cells() * m);
        for x in self.centers() {
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

    pub fn check_state(&self, state: &[f64]) -> Result<()> {
        if state.len() != self.cells() * self.modes() {
            return Err(Error::Shape(format!(
                "{} values for {} cells of {} modes",
                state.len(),
                self.cells(),
                self.modes()
            )));
        }
        Ok(())
    }

    /// Interface fluxes `f_{i-1/2}`, `i = 0..=N`.
    pub fn face_fluxes(&self, state: &[f64]) -> Vec<f64> {
        let m = self.modes();
        let n = self.cells();
        let kind = FluxKind::LocalLaxFriedrichs { omega: self.omega };
        let radius: Vec<f64> = state
            .chunks(m)
            .map(|u| spectral_radius_unchecked(u, self.tensor))
            .collect();
        let cell = |i: usize| &state[i * m..(i + 1) * m];
        let mut out = vec![0.0; (n + 1) * m];
        for f in 1..n {
            kind.evaluate_into(
                cell(f - 1),
                cell(f),
                radius[f - 1],
                radius[f],
                self.tensor,
                &mut out[f * m..(f + 1) * m],
            );
        }
        match self.bc {
            BoundaryCondition::Periodic => {
                let mut g = vec![0.0; m];
                kind.evaluate_into(
                    cell(n - 1),
                    cell(0),
                    radius[n - 1],
                    radius[0],
                    self.tensor,
                    &mut g,
                );
                out[..m].copy_from_slice(&g);
                out[n * m..].copy_from_slice(&g);
            }
            bc => {
                let gl = bc.left_ghost(cell(0));
                let gr = bc.right_ghost(cell(n - 1));
                let rl = spectral_radius_unchecked(gl, self.tensor);
                let rr = spectral_radius_unchecked(gr, self.tensor);
                kind.evaluate_into(gl, cell(0), rl, radius[0], self.tensor, &mut out[..m]);
                kind.evaluate_into(
                    cell(n - 1),
                    gr,
                    radius[n - 1],
                    rr,
                    self.tensor,
                    &mut out[n * m..],
                );
            }
        }
        out
    }

    /// `rate_i = -(f_{i+1/2} - f_{i-1/2}) / dx`.
    pub fn rhs_into(&self, state: &[f64], out: &mut [f64]) {
        let m = self.modes();
        let inv_dx = 1.0 / self.mesh.h();
        let fl = self.face_fluxes(state);
        for i in 0..self.cells() {
            for k in 0..m {
                out[i * m + k] = -(fl[(i + 1) * m + k] - fl[i * m + k]) * inv_dx;
            }
        }
    }

    pub fn rhs(&self, state: &[f64]) -> Result<Vec<f64>> {
        self.check_state(state)?;
        let mut out = vec![0.0; state.len()];
        self.rhs_into(state, &mut out);
        Ok(out)
    }

    /// `dx * sum_i u_i` per mode.
    pub fn total_mass(&self, state: &[f64]) -> Vec<f64> {
        let m = self.modes();
        let mut mass = vec![0.0; m];
        for u in state.chunks(m) {
            for (a, v) in mass.iter_mut().zip(u) {
                *a += v;
            }
        }
        mass.iter().map(|v| v * self.mesh.h()).collect()
    }

    /// `dx/2 sum_i |u_i|^2`.
    pub fn total_entropy(&self, state: &[f64]) -> f64 {
        0.5 * self.mesh.h() * state.iter().map(|v| v * v).sum::<f64>()
    }

    /// `dx sum_i u_i . rate_i`.
    pub fn entropy_rate(&self, state: &[f64], rate: &[f64]) -> f64 {
        self.mesh.h() * state.iter().zip(rate).map(|(a, b)| a * b).sum::<f64>()
    }
}
