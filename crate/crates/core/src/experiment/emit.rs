//! Reference-solution tables.

use crate::error::{Error, Result};
use crate::pc_basis::OrthogonalFamily;
use crate::reference::{
    family_coefficient, reference_moments, truncated_moments, BumpReference, BumpSetup,
    RiemannKind, RiemannSetup,
};

use super::config::{Case, ExperimentConfig};
use super::output::Table;

/// Problem whose exact solution is tabulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceCase {
    Riemann(RiemannSetup),
    /// Periodic bump on a domain of length `period`.
    Bump {
        setup: BumpSetup,
        period: f64,
    },
}

impl ReferenceCase {
    /// The problem a run configuration solves.
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        let kind = match cfg.case {
            Case::Shock => RiemannKind::Shock,
            Case::Rarefaction => RiemannKind::Rarefaction,
            Case::Bump => {
                return ReferenceCase::Bump {
                    setup: BumpSetup {
                        x0: cfg.x0,
                        r: cfg.r,
                        eps: cfg.bump_eps,
                        b: cfg.b,
                    },
                    period: cfg.x_hi - cfg.x_lo,
                }
            }
        };
        ReferenceCase::Riemann(RiemannSetup {
            a: cfg.a,
            b: cfg.b,
            x0: cfg.x0,
            kind,
        })
    }
}

/// Columns `x, u_0..u_{m_report}, E, Var` of the exact solution at time `t`.
///
/// For the Hermite family `E` and `Var` belong to the full (untruncated)
/// solution. For Jacobi and Laguerre the `u_i` are coefficients with respect
/// to the classical polynomials and `Var` is truncated at `m_report`.
/// The bump problem is only available in the Hermite basis.
pub fn emit_reference(
    case: &ReferenceCase,
    grid: &[f64],
    t: f64,
    m_report: usize,
    family: OrthogonalFamily,
) -> Result<Table> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param(
            "t",
            format!("{t} must be finite and nonnegative"),
        ));
    }
    family.validate()?;
    let modes = m_report + 1;
    let mut cols = vec!["x".to_string()];
    cols.extend((0..modes).map(|k| format!("u_{k}")));
    cols.push("E".into());
    cols.push("Var".into());
    let mut table = Table::new(cols);
    match case {
        ReferenceCase::Bump { setup, period } => {
            if family != OrthogonalFamily::HermiteNormalized {
                return Err(Error::Config(
                    "the bump reference is only available for the Hermite family".to_string(),
                ));
            }
            let r = BumpReference::new(*setup, *period)?;
            for &x in grid {
                let (c, mo) = r.coefficients(x, t, modes)?;
                let mut row = vec![x];
                row.extend(c);
                row.push(mo.expectation);
                row.push(mo.variance);
                table.push(row);
            }
        }
        ReferenceCase::Riemann(setup) => {
            setup.validate()?;
            for &x in grid {
                let c: Vec<f64> = (0..modes)
                    .map(|i| family_coefficient(family, i, x, t, setup))
                    .collect::<Result<_>>()?;
                let mo = match family {
                    OrthogonalFamily::HermiteNormalized => reference_moments(x, t, setup)?,
                    _ => truncated_moments(family, &c),
                };
                let mut row = vec![x];
                row.extend(c);
                row.push(mo.expectation);
                row.push(mo.variance);
                table.push(row);
            }
        }
    }
    Ok(table)
}

/// `n` equally spaced points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
