use pcburgers::pc_basis::OrthogonalFamily;
use pcburgers::reference::{RiemannKind, RiemannSetup};

use super::{
    hermite_orthonormal, integrate_with_breaks, jacobi_integral, laguerre_integral, normal_density,
};

/// Solution of the Riemann problem for one realization `xi`.
pub fn realization(s: &RiemannSetup, x: f64, t: f64, xi: f64) -> f64 {
    let (a, b) = (s.a, s.b);
    let d = x - s.x0;
    match s.kind {
        RiemannKind::Shock => {
            // the shock for this xi sits at x0 + b xi t
            if d < b * xi * t {
                a + b * xi
            } else {
                -a + b * xi
            }
        }
        RiemannKind::Rarefaction => {
            let (head, tail) = ((b * xi - a) * t, (b * xi + a) * t);
            if d < head {
                -a + b * xi
            } else if d > tail {
                a + b * xi
            } else {
                d / t
            }
        }
    }
}

pub fn breaks(s: &RiemannSetup, x: f64, t: f64) -> Vec<f64> {
    let bt = s.b * t;
    match s.kind {
        RiemannKind::Shock => vec![(x - s.x0) / bt],
        RiemannKind::Rarefaction => vec![(x - s.x0 - s.a * t) / bt, (x - s.x0 + s.a * t) / bt],
    }
}

/// `int u p_i w` by quadrature.
pub fn oracle(family: OrthogonalFamily, i: usize, s: &RiemannSetup, x: f64, t: f64) -> f64 {
    let cuts = breaks(s, x, t);
    let u = |xi: f64| realization(s, x, t, xi);
    match family {
        OrthogonalFamily::HermiteNormalized => integrate_with_breaks(
            |xi| u(xi) * hermite_orthonormal(i, xi) * normal_density(xi),
            -14.0,
            14.0,
            &cuts,
            2.0,
        ),
        OrthogonalFamily::Jacobi { alpha, beta } => {
            jacobi_integral(|xi| u(xi) * family.eval(i, xi), alpha, beta, &cuts)
        }
        OrthogonalFamily::Laguerre { alpha } => {
            laguerre_integral(|xi| u(xi) * family.eval(i, xi), alpha, &cuts)
        }
    }
}

pub fn families() -> Vec<OrthogonalFamily> {
    vec![
        OrthogonalFamily::HermiteNormalized,
        OrthogonalFamily::jacobi(0.0, 0.0).unwrap(),
        OrthogonalFamily::jacobi(0.5, -0.3).unwrap(),
        OrthogonalFamily::jacobi(2.0, 1.0).unwrap(),
        OrthogonalFamily::jacobi(-0.5, -0.5).unwrap(),
        OrthogonalFamily::laguerre(0.0).unwrap(),
        OrthogonalFamily::laguerre(0.5).unwrap(),
        OrthogonalFamily::laguerre(2.5).unwrap(),
    ]
}
