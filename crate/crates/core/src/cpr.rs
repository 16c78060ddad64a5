//! Split-form SBP CPR semidiscretization of the Galerkin system.

use crate::error::{Error, Result};
use crate::flux::FluxKind;
use crate::galerkin::{flux_into, potential_unchecked, spectral_radius_unchecked, ModeVector};
use crate::pc_basis::TripleProductTensor;
use crate::sbp::{FilterMatrix, NodeKind, SbpOperators};

/// Uniform partition of `[x_lo, x_hi]` into `elements` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D {
    pub x_lo: f64,
    pub x_hi: f64,
    pub elements: usize,
}

impl Mesh1D {
    pub fn new(x_lo: f64, x_hi: f64, elements: usize) -> Result<Self> {
        if elements == 0 {
            return Err(Error::param("N", "need at least one element"));
        }
        if !(x_hi > x_lo) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::param(
                "domain",
                format!("[{x_lo}, {x_hi}] is not a proper interval"),
            ));
        }
        Ok(Mesh1D {
            x_lo,
            x_hi,
            elements,
        })
    }

    pub fn unit(elements: usize) -> Result<Self> {
        Self::new(0.0, 1.0, elements)
    }

    pub fn h(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.elements as f64
    }

    /// Left face of element `e`.
    pub fn face(&self, e: usize) -> f64 {
        self.x_lo + self.h() * e as f64
    }

    /// Physical position of reference coordinate `zeta` in element `e`.
    pub fn map(&self, e: usize, zeta: f64) -> f64 {
        self.face(e) + 0.5 * self.h() * (zeta + 1.0)
    }

    /// All node positions, element-major.
    pub fn node_positions(&self, ops: &SbpOperators) -> Vec<f64> {
        (0..self.elements)
            .flat_map(|e| ops.nodes.iter().map(move |&z| self.map(e, z)))
            .collect()
    }
}

/// Coefficients indexed `(element, node, mode)`, mode fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub elements: usize,
    pub nodes: usize,
    pub modes: usize,
    pub data: Vec<f64>,
}

impl SolutionField {
    pub fn zeros(elements: usize, nodes: usize, modes: usize) -> Self {
        SolutionField {
            elements,
            nodes,
            modes,
            data: vec![0.0; elements * nodes * modes],
        }
    }

    pub fn from_data(elements: usize, nodes: usize, modes: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != elements * nodes * modes {
            return Err(Error::Shape(format!(
                "{} values for {elements}x{nodes}x{modes}",
                data.len()
            )));
        }
        Ok(SolutionField {
            elements,
            nodes,
            modes,
            data,
        })
    }

    /// Samples `init(x, element, node)` at every node.
    pub fn from_fn<F>(mesh: &Mesh1D, ops: &SbpOperators, modes: usize, mut init: F) -> Result<Self>
    where
        F: FnMut(f64, usize, usize) -> Vec<f64>,
    {
        let mut field = Self::zeros(mesh.elements, ops.len(), modes);
        for e in 0..mesh.elements {
            for (n, &z) in ops.nodes.iter().enumerate() {
                let v = init(mesh.map(e, z), e, n);
                if v.len() != modes {
                    return Err(Error::OrderMismatch {
                        expected: modes,
                        found: v.len(),
                    });
                }
                field.node_mut(e, n).copy_from_slice(&v);
            }
        }
        Ok(field)
    }

    pub fn index(&self, e: usize, n: usize, k: usize) -> usize {
        (e * self.nodes + n) * self.modes + k
    }

    pub fn get(&self, e: usize, n: usize, k: usize) -> f64 {
        self.data[self.index(e, n, k)]
    }

    pub fn node(&self, e: usize, n: usize) -> &[f64] {
        let s = (e * self.nodes + n) * self.modes;
        &self.data[s..s + self.modes]
    }

    pub fn node_mut(&mut self, e: usize, n: usize) -> &mut [f64] {
        let s = (e * self.nodes + n) * self.modes;
        &mut self.data[s..s + self.modes]
    }

    pub fn element(&self, e: usize) -> &[f64] {
        let len = self.nodes * self.modes;
        &self.data[e * len..(e + 1) * len]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &SolutionField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    Periodic,
    /// Prescribed exterior states, imposed weakly through the interface flux.
    InflowDirichlet {
        left: ModeVector,
        right: ModeVector,
    },
    /// Exterior state copies the interior trace.
    Outflow,
}

impl BoundaryCondition {
    pub fn validate(&self, modes: usize) -> Result<()> {
        if let BoundaryCondition::InflowDirichlet { left, right } = self {
            for s in [left, right] {
                if s.len() != modes {
                    return Err(Error::OrderMismatch {
                        expected: modes,
                        found: s.len(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Exterior state at the domain's left end given the interior trace.
    pub fn left_ghost<'a>(&'a self, trace: &'a [f64]) -> &'a [f64] {
        match self {
            BoundaryCondition::InflowDirichlet { left, .. } => left,
            _ => trace,
        }
    }

    /// Exterior state at the domain's right end given the interior trace.
    pub fn right_ghost<'a>(&'a self, trace: &'a [f64]) -> &'a [f64] {
        match self {
            BoundaryCondition::InflowDirichlet { right, .. } => right,
            _ => trace,
        }
    }
}

/// Element-boundary traces and the face numbering.
///
/// Face `f` separates element `f-1` (left) from element `f`; faces `0` and
/// `N` are the domain ends, identified with each other when periodic.
#[derive(Debug, Clone)]
pub struct FaceStates {
    pub modes: usize,
    /// `[left state | right state]` per face, `N + 1` faces.
    pub states: Vec<f64>,
}

impl FaceStates {
    pub fn left(&self, f: usize) -> &[f64] {
        let s = 2 * f * self.modes;
        &self.states[s..s + self.modes]
    }

    pub fn right(&self, f: usize) -> &[f64] {
        let s = (2 * f + 1) * self.modes;
        &self.states[s..s + self.modes]
    }
}

/// Per-element entropy budget terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyAudit {
    /// `sum_e h/2 sum_k u_k^T M rhs_k`.
    pub rate: f64,
    /// `sum over interior faces of [u].fnum - [psi]`.
    pub interface_production: f64,
    /// Flux of entropy through the two domain ends.
    pub boundary_terms: f64,
}

impl EntropyAudit {
    /// Rate predicted from interface and boundary contributions alone.
    pub fn predicted(&self) -> f64 {
        self.interface_production + self.boundary_terms
    }
}

/// One configured CPR discretization.
#[derive(Debug, Clone, Copy)]
pub struct Cpr<'a> {
    pub mesh: &'a Mesh1D,
    pub ops: &'a SbpOperators,
    pub tensor: &'a TripleProductTensor,
    pub flux: FluxKind,
    pub bc: &'a BoundaryCondition,
}

impl<'a> Cpr<'a> {
    pub fn new(
        mesh: &'a Mesh1D,
        ops: &'a SbpOperators,
        tensor: &'a TripleProductTensor,
        flux: FluxKind,
        bc: &'a BoundaryCondition,
    ) -> Result<Self> {
        flux.validate()?;
        bc.validate(tensor.modes())?;
        Ok(Cpr {
            mesh,
            ops,
            tensor,
            flux,
            bc,
        })
    }

    pub fn modes(&self) -> usize {
        self.tensor.modes()
    }

    pub fn empty_field(&self) -> SolutionField {
        SolutionField::zeros(self.mesh.elements, self.ops.len(), self.modes())
    }

    pub fn check_field(&self, field: &SolutionField) -> Result<()> {
        if field.elements != self.mesh.elements
            || field.nodes != self.ops.len()
            || field.modes != self.modes()
            || field.data.len() != field.elements * field.nodes * field.modes
        {
            return Err(Error::Shape(format!(
                "field {}x{}x{} does not match mesh {} elements, {} nodes, {} modes",
                field.elements,
                field.nodes,
                field.modes,
                self.mesh.elements,
                self.ops.len(),
                self.modes()
            )));
        }
        Ok(())
    }

    fn element_traces(&self, elem: &[f64], left: &mut [f64], right: &mut [f64]) {
        let m = self.modes();
        left.fill(0.0);
        right.fill(0.0);
        for n in 0..self.ops.len() {
            let (rl, rr) = (self.ops.r_left[n], self.ops.r_right[n]);
            let u = &elem[n * m..(n + 1) * m];
            for k in 0..m {
                left[k] += rl * u[k];
                right[k] += rr * u[k];
            }
        }
    }

    /// Left/right states at every face, with ghosts from the boundary condition.
    pub fn face_states(&self, data: &[f64]) -> FaceStates {
        let m = self.modes();
        let ne = self.mesh.elements;
        let elen = self.ops.len() * m;
        let mut states = vec![0.0; 2 * (ne + 1) * m];
        let mut tl = vec![0.0; m];
        let mut tr = vec![0.0; m];
        for e in 0..ne {
            self.element_traces(&data[e * elen..(e + 1) * elen], &mut tl, &mut tr);
            // Element e's left trace is the right state of face e.
            states[(2 * e + 1) * m..(2 * e + 2) * m].copy_from_slice(&tl);
            states[2 * (e + 1) * m..(2 * (e + 1) + 1) * m].copy_from_slice(&tr);
        }
        match self.bc {
            BoundaryCondition::Periodic => {
                let last_right = states[2 * ne * m..(2 * ne + 1) * m].to_vec();
                let first_left = states[m..2 * m].to_vec();
                states[0..m].copy_from_slice(&last_right);
                states[(2 * ne + 1) * m..(2 * ne + 2) * m].copy_from_slice(&first_left);
            }
            bc => {
                let inner_left = states[m..2 * m].to_vec();
                let inner_right = states[2 * ne * m..(2 * ne + 1) * m].to_vec();
                states[0..m].copy_from_slice(bc.left_ghost(&inner_left));
                states[(2 * ne + 1) * m..(2 * ne + 2) * m]
                    .copy_from_slice(bc.right_ghost(&inner_right));
            }
        }
        FaceStates { modes: m, states }
    }

    /// Numerical flux at each of the `N + 1` faces, one evaluation per face.
    pub fn face_fluxes(&self, faces: &FaceStates) -> Vec<f64> {
        let m = self.modes();
        let nf = self.mesh.elements + 1;
        let mut out = vec![0.0; nf * m];
        let periodic = matches!(self.bc, BoundaryCondition::Periodic);
        let count = if periodic { nf - 1 } else { nf };
        for f in 0..count {
            let (l, r) = (faces.left(f), faces.right(f));
            let (sl, sr) = if self.flux.needs_wave_speed() {
                (
                    spectral_radius_unchecked(l, self.tensor),
                    spectral_radius_unchecked(r, self.tensor),
                )
            } else {
                (0.0, 0.0)
            };
            self.flux
                .evaluate_into(l, r, sl, sr, self.tensor, &mut out[f * m..(f + 1) * m]);
        }
        if periodic {
            let (head, tail) = out.split_at_mut((nf - 1) * m);
            tail.copy_from_slice(&head[..m]);
        }
        out
    }

    /// Split-form right-hand side written into `out`.
    pub fn rhs_into(&self, data: &[f64], out: &mut [f64]) {
        let m = self.modes();
        let np = self.ops.len();
        let elen = np * m;
        let scale = 2.0 / self.mesh.h();
        let faces = self.face_states(data);
        let fnum = self.face_fluxes(&faces);

        let mut du = vec![0.0; elen];
        let mut prod = vec![0.0; np];
        let mut dprod = vec![0.0; np];
        let mut col = vec![0.0; np];
        let mut dcol = vec![0.0; np];
        let mut vol = vec![0.0; elen];
        let mut split_l = vec![0.0; m];
        let mut split_r = vec![0.0; m];

        for e in 0..self.mesh.elements {
            let u = &data[e * elen..(e + 1) * elen];
            for k in 0..m {
                for n in 0..np {
                    col[n] = u[n * m + k];
                }
                self.ops.d.matvec_into(&col, &mut dcol);
                for n in 0..np {
                    du[n * m + k] = dcol[n];
                }
            }
            vol.fill(0.0);
            split_l.fill(0.0);
            split_r.fill(0.0);
            for k in 0..m {
                for p in self.tensor.mode_terms(k) {
                    let (i, j) = (p.i, p.j);
                    for n in 0..np {
                        prod[n] = u[n * m + i] * u[n * m + j];
                    }
                    self.ops.d.matvec_into(&prod, &mut dprod);
                    let (mut rl_prod, mut rr_prod) = (0.0, 0.0);
                    let (mut rl_i, mut rl_j, mut rr_i, mut rr_j) = (0.0, 0.0, 0.0, 0.0);
                    for n in 0..np {
                        let adv =
                            0.5 * (u[n * m + j] * du[n * m + i] + u[n * m + i] * du[n * m + j]);
                        vol[n * m + k] += p.weight * (dprod[n] + adv);
                        let (rl, rr) = (self.ops.r_left[n], self.ops.r_right[n]);
                        rl_prod += rl * prod[n];
                        rr_prod += rr * prod[n];
                        rl_i += rl * u[n * m + i];
                        rl_j += rl * u[n * m + j];
                        rr_i += rr * u[n * m + i];
                        rr_j += rr * u[n * m + j];
                    }
                    split_l[k] += p.weight * (rl_prod / 3.0 + rl_i * rl_j / 6.0);
                    split_r[k] += p.weight * (rr_prod / 3.0 + rr_i * rr_j / 6.0);
                }
            }
            let fl = &fnum[e * m..(e + 1) * m];
            let fr = &fnum[(e + 1) * m..(e + 2) * m];
            let o = &mut out[e * elen..(e + 1) * elen];
            for n in 0..np {
                let inv_w = 1.0 / self.ops.weights[n];
                let (rl, rr) = (self.ops.r_left[n], self.ops.r_right[n]);
                for k in 0..m {
                    // R^T B g = -r_left g_left + r_right g_right
                    let gl = fl[k] - split_l[k];
                    let gr = fr[k] - split_r[k];
                    let surf = inv_w * (-rl * gl + rr * gr);
                    o[n * m + k] = scale * (-vol[n * m + k] / 3.0 - surf);
                }
            }
        }
    }

    pub fn semidiscrete_rhs(&self, field: &SolutionField) -> Result<SolutionField> {
        self.check_field(field)?;
        let mut out = self.empty_field();
        self.rhs_into(&field.data, &mut out.data);
        Ok(out)
    }

    /// Matrix form `-(b/2) D(A u) - (1-b) A (D u) - M^-1 R^T B (fnum - R (A u)/2)`.
    ///
    /// Only defined on Lobatto nodes, where `R` samples nodal values.
    pub fn skewsym_rhs(&self, field: &SolutionField, beta: f64) -> Result<SolutionField> {
        self.check_field(field)?;
        if self.ops.kind != NodeKind::GaussLobatto {
            return Err(Error::NotLobatto);
        }
        let m = self.modes();
        let np = self.ops.len();
        let elen = np * m;
        let scale = 2.0 / self.mesh.h();
        let faces = self.face_states(&field.data);
        let fnum = self.face_fluxes(&faces);
        let mut out = self.empty_field();
        let mut au = vec![0.0; elen];
        let mut du = vec![0.0; elen];
        let mut col = vec![0.0; np];
        let mut dcol = vec![0.0; np];
        for e in 0..self.mesh.elements {
            let u = field.element(e);
            for n in 0..np {
                // A(u) u = 2 f(u) pointwise
                flux_into(
                    &u[n * m..(n + 1) * m],
                    self.tensor,
                    &mut au[n * m..(n + 1) * m],
                );
                for k in 0..m {
                    au[n * m + k] *= 2.0;
                }
            }
            for k in 0..m {
                for n in 0..np {
                    col[n] = u[n * m + k];
                }
                self.ops.d.matvec_into(&col, &mut dcol);
                for n in 0..np {
                    du[n * m + k] = dcol[n];
                }
            }
            let o = &mut out.data[e * elen..(e + 1) * elen];
            for k in 0..m {
                for n in 0..np {
                    col[n] = au[n * m + k];
                }
                self.ops.d.matvec_into(&col, &mut dcol);
                for n in 0..np {
                    // (A(u) Du)_k = sum_ij T_ijk u_i (D u_j)
                    let adv: f64 = self
                        .tensor
                        .mode_terms(k)
                        .iter()
                        .map(|p| {
                            let (i, j) = (p.i, p.j);
                            0.5 * p.weight
                                * (u[n * m + i] * du[n * m + j] + u[n * m + j] * du[n * m + i])
                        })
                        .sum();
                    o[n * m + k] = -0.5 * beta * dcol[n] - (1.0 - beta) * adv;
                }
            }
            let last = np - 1;
            for k in 0..m {
                let gl = fnum[e * m + k] - 0.5 * au[k];
                let gr = fnum[(e + 1) * m + k] - 0.5 * au[last * m + k];
                // -M^-1 R^T B g with B = diag(-1, 1)
                o[k] += gl / self.ops.weights[0];
                o[last * m + k] -= gr / self.ops.weights[last];
            }
            for v in o.iter_mut() {
                *v *= scale;
            }
        }
        Ok(out)
    }

    /// `sum_e h/4 sum_k u_k^T M u_k`.
    pub fn total_entropy(&self, field: &SolutionField) -> f64 {
        total_entropy(field, self.mesh, self.ops)
    }

    pub fn total_mass(&self, field: &SolutionField) -> ModeVector {
        total_mass(field, self.mesh, self.ops)
    }

    /// `d/dt` of the total entropy along `rhs`.
    pub fn entropy_rate(&self, data: &[f64], rhs: &[f64]) -> f64 {
        let m = self.modes();
        let np = self.ops.len();
        let mut s = 0.0;
        for e in 0..self.mesh.elements {
            for n in 0..np {
                let base = (e * np + n) * m;
                let dotp: f64 = (0..m).map(|k| data[base + k] * rhs[base + k]).sum();
                s += self.ops.weights[n] * dotp;
            }
        }
        0.5 * self.mesh.h() * s
    }

    /// Entropy rate of the semidiscretization and its independent prediction
    /// from interface production and boundary fluxes.
    pub fn entropy_audit(&self, field: &SolutionField) -> Result<EntropyAudit> {
        let rhs = self.semidiscrete_rhs(field)?;
        let rate = self.entropy_rate(&field.data, &rhs.data);
        let faces = self.face_states(&field.data);
        let fnum = self.face_fluxes(&faces);
        let m = self.modes();
        let ne = self.mesh.elements;
        let t = self.tensor;
        let dotf = |u: &[f64], f: &[f64]| u.iter().zip(f).map(|(a, b)| a * b).sum::<f64>();
        let mut production = 0.0;
        let periodic = matches!(self.bc, BoundaryCondition::Periodic);
        let interior = if periodic { 0..ne } else { 1..ne };
        for f in interior {
            let (l, r) = (faces.left(f), faces.right(f));
            let fv = &fnum[f * m..(f + 1) * m];
            let jump: f64 = l.iter().zip(r).zip(fv).map(|((a, b), c)| (b - a) * c).sum();
            production += jump - (potential_unchecked(r, t) - potential_unchecked(l, t));
        }
        let boundary_terms = if periodic {
            0.0
        } else {
            let ul = faces.right(0);
            let ur = faces.left(ne);
            (dotf(ul, &fnum[..m]) - potential_unchecked(ul, t))
                - (dotf(ur, &fnum[ne * m..]) - potential_unchecked(ur, t))
        };
        Ok(EntropyAudit {
            rate,
            interface_production: production,
            boundary_terms,
        })
    }

    /// Largest spectral radius of `A(u)` over all nodes.
    pub fn max_wave_speed(&self, field: &SolutionField) -> f64 {
        field
            .data
            .chunks(self.modes())
            .fold(0.0, |a, u| a.max(spectral_radius_unchecked(u, self.tensor)))
    }

    /// `dt = cfl h / ((2p + 1) lambda_max)`.
    pub fn cfl_dt(&self, field: &SolutionField, cfl: f64) -> Result<f64> {
        cfl_time_step(
            self.mesh.h(),
            self.ops.degree,
            self.max_wave_speed(field),
            cfl,
        )
    }
}

/// `dt = cfl h / ((2p + 1) lambda_max)`.
pub fn cfl_time_step(h: f64, degree: usize, lambda_max: f64, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0) {
        return Err(Error::param("cfl", format!("{cfl} must be positive")));
    }
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::param(
            "lambda_max",
            format!("{lambda_max} gives no finite step"),
        ));
    }
    Ok(cfl * h / ((2 * degree + 1) as f64 * lambda_max))
}

/// `sum_e h/4 sum_k u_k^T M u_k`.
pub fn total_entropy(field: &SolutionField, mesh: &Mesh1D, ops: &SbpOperators) -> f64 {
    let mut s = 0.0;
    for e in 0..field.elements {
        for n in 0..field.nodes {
            let sq: f64 = field.node(e, n).iter().map(|v| v * v).sum();
            s += ops.weights[n] * sq;
        }
    }
    0.25 * mesh.h() * s
}

/// `sum_e h/2 1^T M u_k` per mode.
pub fn total_mass(field: &SolutionField, mesh: &Mesh1D, ops: &SbpOperators) -> ModeVector {
    let mut mass = ModeVector::zeros(field.modes);
    for e in 0..field.elements {
        for n in 0..field.nodes {
            for (acc, v) in mass.iter_mut().zip(field.node(e, n)) {
                *acc += ops.weights[n] * v;
            }
        }
    }
    for v in mass.iter_mut() {
        *v *= 0.5 * mesh.h();
    }
    mass
}

/// Filters every mode of every element in place.
pub fn apply_filter_in_place(data: &mut [f64], nodes: usize, modes: usize, filter: &FilterMatrix) {
    let mut col = vec![0.0; nodes];
    let mut res = vec![0.0; nodes];
    for elem in data.chunks_mut(nodes * modes) {
        for k in 0..modes {
            for n in 0..nodes {
                col[n] = elem[n * modes + k];
            }
            filter.apply(&col, &mut res);
            for n in 0..nodes {
                elem[n * modes + k] = res[n];
            }
        }
    }
}

pub fn apply_filter(field: &SolutionField, filter: &FilterMatrix) -> Result<SolutionField> {
    if filter.degree + 1 != field.nodes {
        return Err(Error::Shape(format!(
            "filter of degree {} on {} nodes",
            filter.degree, field.nodes
        )));
    }
    let mut out = field.clone();
    apply_filter_in_place(&mut out.data, field.nodes, field.modes, filter);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pc_basis::build_tensor;
    use crate::sbp::{exponential_filter, finite_volume_operators, lobatto_operators};

    fn constant_field(mesh: &Mesh1D, ops: &SbpOperators, c: &[f64]) -> SolutionField {
        SolutionField::from_fn(mesh, ops, c.len(), |_, _, _| c.to_vec()).unwrap()
    }

    #[test]
    fn constant_state_is_steady() {
        let mesh = Mesh1D::unit(5).unwrap();
        let ops = lobatto_operators(3).unwrap();
        let t = build_tensor(3);
        let c = [0.7, 0.2, -0.1, 0.05];
        let field = constant_field(&mesh, &ops, &c);
        let bcs = [
            BoundaryCondition::Periodic,
            BoundaryCondition::Outflow,
            BoundaryCondition::InflowDirichlet {
                left: ModeVector(c.to_vec()),
                right: ModeVector(c.to_vec()),
            },
        ];
        for bc in &bcs {
            for flux in [FluxKind::EntropyConservative, FluxKind::llf()] {
                let cpr = Cpr::new(&mesh, &ops, &t, flux, bc).unwrap();
                let rhs = cpr.semidiscrete_rhs(&field).unwrap();
                assert!(rhs.data.iter().all(|v| v.abs() < 1e-12));
                let skew = cpr.skewsym_rhs(&field, 2.0 / 3.0).unwrap();
                assert!(skew.data.iter().all(|v| v.abs() < 1e-12));
            }
        }
    }

    #[test]
    fn mass_and_entropy_of_unit_constant() {
        let mesh = Mesh1D::unit(4).unwrap();
        let ops = lobatto_operators(2).unwrap();
        let field = constant_field(&mesh, &ops, &[1.0, 0.0]);
        let m = total_mass(&field, &mesh, &ops);
        assert!((m[0] - 1.0).abs() < 1e-14 && m[1] == 0.0);
        assert!((total_entropy(&field, &mesh, &ops) - 0.5).abs() < 1e-14);
        let zero = SolutionField::zeros(4, 3, 2);
        assert_eq!(total_entropy(&zero, &mesh, &ops), 0.0);
    }

    #[test]
    fn periodic_faces_wrap() {
        let mesh = Mesh1D::unit(2).unwrap();
        let ops = lobatto_operators(1).unwrap();
        let t = build_tensor(0);
        let bc = BoundaryCondition::Periodic;
        let cpr = Cpr::new(&mesh, &ops, &t, FluxKind::EntropyConservative, &bc).unwrap();
        let field = SolutionField::from_data(2, 2, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let faces = cpr.face_states(&field.data);
        assert_eq!(faces.left(0), &[4.0]);
        assert_eq!(faces.right(0), &[1.0]);
        assert_eq!(faces.left(1), &[2.0]);
        assert_eq!(faces.right(1), &[3.0]);
        assert_eq!(faces.left(2), &[4.0]);
        assert_eq!(faces.right(2), &[1.0]);
    }

    #[test]
    fn inflow_and_outflow_ghosts() {
        let mesh = Mesh1D::unit(3).unwrap();
        let ops = lobatto_operators(1).unwrap();
        let t = build_tensor(3);
        let bc = BoundaryCondition::InflowDirichlet {
            left: ModeVector::affine(1.0, 0.2, 4),
            right: ModeVector::affine(-1.0, 0.2, 4),
        };
        let cpr = Cpr::new(&mesh, &ops, &t, FluxKind::EntropyConservative, &bc).unwrap();
        let field = constant_field(&mesh, &ops, &[0.5, 0.1, 0.0, 0.0]);
        let faces = cpr.face_states(&field.data);
        assert_eq!(faces.left(0), &[1.0, 0.2, 0.0, 0.0]);
        assert_eq!(faces.right(3), &[-1.0, 0.2, 0.0, 0.0]);
        let out = BoundaryCondition::Outflow;
        let cpr = Cpr::new(&mesh, &ops, &t, FluxKind::EntropyConservative, &out).unwrap();
        let faces = cpr.face_states(&field.data);
        assert_eq!(faces.left(0), faces.right(0));
        assert_eq!(faces.left(3), faces.right(3));
    }

    #[test]
    fn shape_errors() {
        let mesh = Mesh1D::unit(3).unwrap();
        let ops = lobatto_operators(2).unwrap();
        let t = build_tensor(1);
        let bc = BoundaryCondition::Periodic;
        let cpr = Cpr::new(&mesh, &ops, &t, FluxKind::EntropyConservative, &bc).unwrap();
        let bad = SolutionField::zeros(3, 2, 2);
        assert!(matches!(cpr.semidiscrete_rhs(&bad), Err(Error::Shape(_))));
        let fv = finite_volume_operators();
        let cpr = Cpr::new(&mesh, &fv, &t, FluxKind::EntropyConservative, &bc).unwrap();
        let f = SolutionField::zeros(3, 1, 2);
        assert!(matches!(
            cpr.skewsym_rhs(&f, 2.0 / 3.0),
            Err(Error::NotLobatto)
        ));
        let wrong = BoundaryCondition::InflowDirichlet {
            left: ModeVector::zeros(3),
            right: ModeVector::zeros(2),
        };
        assert!(Cpr::new(&mesh, &ops, &t, FluxKind::EntropyConservative, &wrong).is_err());
        assert!(Mesh1D::unit(0).is_err());
    }

    #[test]
    fn filter_keeps_constants() {
        let mesh = Mesh1D::unit(3).unwrap();
        let ops = lobatto_operators(4).unwrap();
        let field = constant_field(&mesh, &ops, &[1.5, -0.5]);
        let f = exponential_filter(4, 1, 50.0).unwrap();
        let out = apply_filter(&field, &f).unwrap();
        assert!(out.max_abs_diff(&field) < 1e-13);
        let wrong = exponential_filter(3, 1, 1.0).unwrap();
        assert!(apply_filter(&field, &wrong).is_err());
    }

    #[test]
    fn cfl_helper() {
        let dt = cfl_time_step(0.1, 3, 2.0, 0.5).unwrap();
        assert!((dt - 0.5 * 0.1 / 14.0).abs() < 1e-16);
        assert!(cfl_time_step(0.1, 3, 0.0, 0.5).is_err());
    }
}
