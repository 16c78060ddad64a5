use pcburgers::flux::{scalar_burgers_flux, ScalarFluxChoice};

/// `A(u)` for `M = 3`, written out by hand.
pub fn a3(u: &[f64]) -> [[f64; 4]; 4] {
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    [
        [u[0], u[1], u[2], u[3]],
        [u[1], u[0] + s2 * u[2], s2 * u[1] + s3 * u[3], s3 * u[2]],
        [
            u[2],
            s2 * u[1] + s3 * u[3],
            u[0] + 2.0 * s2 * u[2],
            s3 * u[1] + 3.0 * s2 * u[3],
        ],
        [
            u[3],
            s3 * u[2],
            s3 * u[1] + 3.0 * s2 * u[3],
            u[0] + 3.0 * s2 * u[2],
        ],
    ]
}

pub fn f3(u: &[f64]) -> [f64; 4] {
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    [
        0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3]),
        u[0] * u[1] + s2 * u[1] * u[2] + s3 * u[2] * u[3],
        u[0] * u[2]
            + 0.5 * s2 * u[1] * u[1]
            + s3 * u[1] * u[3]
            + s2 * u[2] * u[2]
            + 1.5 * s2 * u[3] * u[3],
        u[0] * u[3] + s3 * u[1] * u[2] + 3.0 * s2 * u[2] * u[3],
    ]
}

/// `f_00 [u0] - [u0^3]/6 + 2 sqrt(2) (f_22 [u2] - [u2^3]/6)`
pub fn reduced_residual(l: &[f64], r: &[f64], choice: ScalarFluxChoice) -> f64 {
    let part = |i: usize| {
        let f = scalar_burgers_flux(choice, l[i], r[i]);
        f * (r[i] - l[i]) - (r[i].powi(3) - l[i].powi(3)) / 6.0
    };
    part(0) + 2.0 * 2f64.sqrt() * part(2)
}
