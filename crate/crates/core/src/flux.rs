//! Two-point interface fluxes for the Galerkin system.
//!
//! `mean(a) = (a(-) + a(+))/2` and `[a] = a(+) - a(-)`, where `-` is the left
//! and `+` the right state.

use crate::error::{Error, Result};
use crate::galerkin::{flux_into, potential_unchecked, spectral_radius_unchecked, ModeVector};
use crate::pc_basis::TripleProductTensor;

/// Left and right states at one interface.
#[derive(Debug, Clone, Copy)]
pub struct InterfacePair<'a> {
    pub left: &'a [f64],
    pub right: &'a [f64],
}

impl<'a> InterfacePair<'a> {
    pub fn new(left: &'a [f64], right: &'a [f64]) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::OrderMismatch {
                expected: left.len(),
                found: right.len(),
            });
        }
        Ok(InterfacePair { left, right })
    }

    pub fn modes(&self) -> usize {
        self.left.len()
    }

    fn check(&self, t: &TripleProductTensor) -> Result<()> {
        t.check_len(self.left.len())?;
        t.check_len(self.right.len())
    }
}

/// Interface flux selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxKind {
    /// Entropy conservative: `[u].f = [psi]`.
    EntropyConservative,
    /// Entropy conservative flux minus `(omega/2) lambda [u]`.
    LocalLaxFriedrichs { omega: f64 },
}

impl FluxKind {
    pub fn llf() -> Self {
        FluxKind::LocalLaxFriedrichs { omega: 1.0 }
    }

    /// Rejects dissipation weights outside `(0, 1]`.
    pub fn validate(&self) -> Result<()> {
        if let FluxKind::LocalLaxFriedrichs { omega } = *self {
            if !(omega > 0.0 && omega <= 1.0) {
                return Err(Error::param("omega", format!("{omega} outside (0, 1]")));
            }
        }
        Ok(())
    }

    pub fn needs_wave_speed(&self) -> bool {
        matches!(self, FluxKind::LocalLaxFriedrichs { .. })
    }

    pub fn evaluate(&self, pair: InterfacePair<'_>, t: &TripleProductTensor) -> Result<ModeVector> {
        pair.check(t)?;
        let mut out = ModeVector::zeros(pair.modes());
        let (sl, sr) = if self.needs_wave_speed() {
            (
                spectral_radius_unchecked(pair.left, t),
                spectral_radius_unchecked(pair.right, t),
            )
        } else {
            (0.0, 0.0)
        };
        self.evaluate_into(pair.left, pair.right, sl, sr, t, &mut out);
        Ok(out)
    }

    /// Unchecked hot-path evaluation with precomputed spectral radii of both states.
    pub fn evaluate_into(
        &self,
        left: &[f64],
        right: &[f64],
        radius_left: f64,
        radius_right: f64,
        t: &TripleProductTensor,
        out: &mut [f64],
    ) {
        ec_flux_into(left, right, t, out);
        if let FluxKind::LocalLaxFriedrichs { omega } = *self {
            let lambda = radius_left.max(radius_right);
            for ((o, l), r) in out.iter_mut().zip(left).zip(right) {
                *o -= 0.5 * omega * lambda * (r - l);
            }
        }
    }
}

pub(crate) fn ec_flux_into(left: &[f64], right: &[f64], t: &TripleProductTensor, out: &mut [f64]) {
    for (k, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for p in t.mode_terms(k) {
            let (li, lj, ri, rj) = (left[p.i], left[p.j], right[p.i], right[p.j]);
            let mean_prod = 0.5 * (li * lj + ri * rj);
            let prod_mean = 0.25 * (li + ri) * (lj + rj);
            s += p.weight * (mean_prod / 3.0 + 2.0 * prod_mean / 3.0);
        }
        *o = 0.5 * s;
    }
}

/// Entropy conservative flux
/// `f_k = 1/2 sum_ij T_ijk (1/3 mean(u_i u_j) + 2/3 mean(u_i) mean(u_j))`.
pub fn ec_flux(pair: InterfacePair<'_>, t: &TripleProductTensor) -> Result<ModeVector> {
    FluxKind::EntropyConservative.evaluate(pair, t)
}

/// `int_0^1 f((1-s) u(-) + s u(+)) ds`, by two-point Gauss quadrature in `s`.
pub fn tadmor_phase_integral(
    pair: InterfacePair<'_>,
    t: &TripleProductTensor,
) -> Result<ModeVector> {
    pair.check(t)?;
    let n = pair.modes();
    let g = 0.5 / 3f64.sqrt();
    let mut out = ModeVector::zeros(n);
    let mut state = vec![0.0; n];
    let mut f = vec![0.0; n];
    for s in [0.5 - g, 0.5 + g] {
        for (st, (l, r)) in state.iter_mut().zip(pair.left.iter().zip(pair.right)) {
            *st = (1.0 - s) * l + s * r;
        }
        flux_into(&state, t, &mut f);
        for (o, v) in out.iter_mut().zip(&f) {
            *o += 0.5 * v;
        }
    }
    Ok(out)
}

/// Local Lax-Friedrichs entropy stable flux with dissipation weight `omega`.
pub fn llf_es_flux(
    pair: InterfacePair<'_>,
    t: &TripleProductTensor,
    omega: f64,
) -> Result<ModeVector> {
    let kind = FluxKind::LocalLaxFriedrichs { omega };
    kind.validate()?;
    kind.evaluate(pair, t)
}

/// `[u] . fnum - [psi]`; zero for conservative, nonpositive for stable fluxes.
pub fn entropy_residual(
    pair: InterfacePair<'_>,
    fnum: &[f64],
    t: &TripleProductTensor,
) -> Result<f64> {
    pair.check(t)?;
    t.check_len(fnum.len())?;
    let jump_dot: f64 = pair
        .left
        .iter()
        .zip(pair.right)
        .zip(fnum)
        .map(|((l, r), f)| (r - l) * f)
        .sum();
    Ok(jump_dot - (potential_unchecked(pair.right, t) - potential_unchecked(pair.left, t)))
}

/// Scalar Burgers flux used for the diagonal sub-fluxes of the low-order examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarFluxChoice {
    /// `1/6 mean(u^2) + 1/3 mean(u)^2`
    EntropyConservative,
    /// `mean(u^2)/2 - 1/2 max(|u(-)|, |u(+)|) [u]`
    LaxFriedrichs,
}

/// Two-point flux for scalar Burgers `u^2/2`.
pub fn scalar_burgers_flux(choice: ScalarFluxChoice, l: f64, r: f64) -> f64 {
    match choice {
        ScalarFluxChoice::EntropyConservative => {
            let m = 0.5 * (l + r);
            0.5 * (l * l + r * r) / 6.0 + m * m / 3.0
        }
        ScalarFluxChoice::LaxFriedrichs => {
            let lambda = l.abs().max(r.abs());
            0.25 * (l * l + r * r) - 0.5 * lambda * (r - l)
        }
    }
}

/// Hand-built fluxes for `M = 0..=3`.
///
/// Pure squares and mixed terms with a repeated index are replaced by means;
/// products of three distinct indices use the `1/3, 2/3` split; `u_0^2/2` and
/// the `sqrt(2) u_2^2` part of mode 2 go through `choice`.
pub fn example_flux(
    order: usize,
    pair: InterfacePair<'_>,
    choice: ScalarFluxChoice,
) -> Result<ModeVector> {
    if order > 3 {
        return Err(Error::param(
            "order",
            format!("example fluxes exist for M <= 3, got {order}"),
        ));
    }
    if pair.modes() != order + 1 {
        return Err(Error::OrderMismatch {
            expected: order + 1,
            found: pair.modes(),
        });
    }
    let (l, r) = (pair.left, pair.right);
    let m = |i: usize| 0.5 * (l[i] + r[i]);
    let msq = |i: usize| 0.5 * (l[i] * l[i] + r[i] * r[i]);
    let split =
        |i: usize, j: usize| (0.5 * (l[i] * l[j] + r[i] * r[j])) / 3.0 + 2.0 * m(i) * m(j) / 3.0;
    let f00 = scalar_burgers_flux(choice, l[0], r[0]);
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let out = match order {
        0 => vec![f00],
        1 => vec![f00 + 0.5 * msq(1), m(0) * m(1)],
        2 => {
            let f22 = scalar_burgers_flux(choice, l[2], r[2]);
            vec![
                f00 + 0.5 * msq(1) + 0.5 * msq(2),
                m(0) * m(1) + s2 * m(1) * m(2),
                2.0 * s2 * f22 + m(0) * m(2) + 0.5 * s2 * msq(1),
            ]
        }
        _ => {
            let f22 = scalar_burgers_flux(choice, l[2], r[2]);
            vec![
                f00 + 0.5 * (msq(1) + msq(2) + msq(3)),
                m(0) * m(1) + s2 * m(1) * m(2) + s3 * split(2, 3),
                m(0) * m(2)
                    + 0.5 * s2 * msq(1)
                    + s3 * split(1, 3)
                    + 2.0 * s2 * f22
                    + 1.5 * s2 * msq(3),
                m(0) * m(3) + s3 * split(1, 2) + 3.0 * s2 * m(2) * m(3),
            ]
        }
    };
    Ok(ModeVector(out))
}
