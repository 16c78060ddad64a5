//! Chaos coefficients of the exact solutions of the uncertain Riemann problems.
//!
//! With a random slope `p(xi) = b xi`, the shock problem starts from
//! `a + b xi` left of `x0` and `-a + b xi` right of it; the rarefaction swaps
//! the signs of `a`. For fixed `xi` both are classical Burgers Riemann
//! problems, so the solution is piecewise linear in `xi` with breakpoints that
//! depend on `(x, t)`. Coefficients follow from repeated integration by parts
//! against the weighted polynomials.
//!
//! For the Jacobi and Laguerre families the coefficients are the plain
//! integrals `c_i = int u p_i w` with the classical (unnormalized) polynomials
//! and weights.

use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};
use crate::galerkin::{ModeVector, Moments};
use crate::pc_basis::{gaussian_density, weighted_eval, OrthogonalFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiemannKind {
    Shock,
    Rarefaction,
}

impl std::str::FromStr for RiemannKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "shock" => Ok(RiemannKind::Shock),
            "rarefaction" => Ok(RiemannKind::Rarefaction),
            other => Err(Error::Config(format!("unknown Riemann case '{other}'"))),
        }
    }
}

/// Uncertain Riemann problem with jump half-height `a` and slope `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSetup {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub kind: RiemannKind,
}

impl RiemannSetup {
    pub fn new(kind: RiemannKind, a: f64, b: f64, x0: f64) -> Result<Self> {
        let s = RiemannSetup { a, b, x0, kind };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::param("a", format!("{} must be positive", self.a)));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::param("b", format!("{} must be positive", self.b)));
        }
        if !self.x0.is_finite() {
            return Err(Error::param("x0", "must be finite"));
        }
        Ok(())
    }

    /// States `(left, right)` as `(mean, slope)` pairs.
    pub fn outer_states(&self) -> ((f64, f64), (f64, f64)) {
        match self.kind {
            RiemannKind::Shock => ((self.a, self.b), (-self.a, self.b)),
            RiemannKind::Rarefaction => ((-self.a, self.b), (self.a, self.b)),
        }
    }
}

/// Smooth bump of uncertain height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSetup {
    pub x0: f64,
    pub r: f64,
    pub eps: f64,
    pub b: f64,
}

impl Default for BumpSetup {
    fn default() -> Self {
        BumpSetup {
            x0: 0.25,
            r: 0.25,
            eps: std::f64::consts::E / 100.0,
            b: 0.2,
        }
    }
}

/// Standard normal cumulative distribution.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param(
            "t",
            format!("{t} must be finite and nonnegative"),
        ));
    }
    Ok(())
}

/// Initial state `(u_0, .., u_{modes-1})` of the Riemann problem.
///
/// At `x == x0` the left state is used.
pub fn initial_coefficients(x: f64, setup: &RiemannSetup, modes: usize) -> ModeVector {
    let (l, r) = setup.outer_states();
    let (mean, slope) = if x <= setup.x0 { l } else { r };
    ModeVector::affine(mean, slope, modes)
}

/// Bump initial data; only modes 0 and 1 are nonzero.
pub fn bump_initial(x: f64, setup: &BumpSetup, modes: usize) -> ModeVector {
    let profile = bump_profile(x - setup.x0, setup.r);
    ModeVector::affine(
        1.0 + setup.eps * profile,
        setup.eps * setup.b * profile,
        modes,
    )
}

/// Breakpoints `(xi_1, xi_2)` of the rarefaction fan in `xi`.
fn fan_breakpoints(x: f64, t: f64, s: &RiemannSetup) -> (f64, f64) {
    let bt = s.b * t;
    ((x - s.x0 - s.a * t) / bt, (x - s.x0 + s.a * t) / bt)
}

fn shock_location(x: f64, t: f64, s: &RiemannSetup) -> f64 {
    (x - s.x0) / (s.b * t)
}

/// Hermite coefficient `u_i(x, t)` of the shock solution.
pub fn shock_coefficient(i: usize, x: f64, t: f64, setup: &RiemannSetup) -> Result<f64> {
    setup.validate()?;
    check_time(t)?;
    if t == 0.0 {
        let s = RiemannSetup {
            kind: RiemannKind::Shock,
            ..*setup
        };
        return Ok(initial_coefficients(x, &s, i + 1)[i]);
    }
    let xs = shock_location(x, t, setup);
    let (a, b) = (setup.a, setup.b);
    Ok(match i {
        0 => a - 2.0 * a * normal_cdf(xs),
        _ => {
            let delta = if i == 1 { b } else { 0.0 };
            delta + 2.0 * a / (i as f64).sqrt() * weighted_eval(i - 1, xs)
        }
    })
}

/// Hermite coefficient `u_i(x, t)` of the rarefaction solution.
pub fn rarefaction_coefficient(i: usize, x: f64, t: f64, setup: &RiemannSetup) -> Result<f64> {
    setup.validate()?;
    check_time(t)?;
    if t == 0.0 {
        let s = RiemannSetup {
            kind: RiemannKind::Rarefaction,
            ..*setup
        };
        return Ok(initial_coefficients(x, &s, i + 1)[i]);
    }
    let (x1, x2) = fan_breakpoints(x, t, setup);
    let (a, b) = (setup.a, setup.b);
    let (p1, p2) = (normal_cdf(x1), normal_cdf(x2));
    Ok(match i {
        0 => {
            a - 2.0 * a * (1.0 - p2) + b * x1 * (p2 - p1)
                - b * (gaussian_density(x1) - gaussian_density(x2))
        }
        1 => b * (1.0 - (p2 - p1)),
        _ => {
            let c = b / ((i * (i - 1)) as f64).sqrt();
            c * (weighted_eval(i - 2, x2) - weighted_eval(i - 2, x1))
        }
    })
}

/// Hermite coefficient for the kind stored in `setup`.
pub fn hermite_coefficient(i: usize, x: f64, t: f64, setup: &RiemannSetup) -> Result<f64> {
    match setup.kind {
        RiemannKind::Shock => shock_coefficient(i, x, t, setup),
        RiemannKind::Rarefaction => rarefaction_coefficient(i, x, t, setup),
    }
}

/// Expectation and variance of the full (untruncated) Hermite solution.
pub fn reference_moments(x: f64, t: f64, setup: &RiemannSetup) -> Result<Moments> {
    setup.validate()?;
    check_time(t)?;
    let (a, b) = (setup.a, setup.b);
    let mean = hermite_coefficient(0, x, t, setup)?;
    let second = if t == 0.0 {
        // u = +-a + b xi
        a * a + b * b
    } else {
        match setup.kind {
            RiemannKind::Shock => {
                let xs = shock_location(x, t, setup);
                a * a + b * b + 4.0 * a * b * gaussian_density(xs)
            }
            RiemannKind::Rarefaction => {
                let (x1, x2) = fan_breakpoints(x, t, setup);
                let c = a + b * x1;
                let m = PartialMoments::hermite();
                m.poly(a * a, 2.0 * a * b, b * b, f64::NEG_INFINITY, x1)
                    + m.poly(c * c, 0.0, 0.0, x1, x2)
                    + m.poly(a * a, -2.0 * a * b, b * b, x2, f64::INFINITY)
            }
        }
    };
    Ok(Moments {
        expectation: mean,
        variance: (second - mean * mean).max(0.0),
    })
}

/// `int_lo^x w`, `int_lo^x xi w` (and `xi^2 w` for Hermite) of a family's weight.
struct PartialMoments {
    family: OrthogonalFamily,
}

impl PartialMoments {
    fn hermite() -> Self {
        PartialMoments {
            family: OrthogonalFamily::HermiteNormalized,
        }
    }

    fn clamp(&self, x: f64) -> f64 {
        let (lo, hi) = self.family.support();
        x.clamp(lo, hi)
    }

    fn mass(&self, x: f64) -> f64 {
        let x = self.clamp(x);
        match self.family {
            OrthogonalFamily::HermiteNormalized => normal_cdf(x),
            OrthogonalFamily::Jacobi { alpha, beta } => {
                let t = 0.5 * (x + 1.0);
                jacobi_scale(alpha, beta)
                    * ln_beta(beta + 1.0, alpha + 1.0).exp()
                    * beta_reg(beta + 1.0, alpha + 1.0, t)
            }
            OrthogonalFamily::Laguerre { alpha } => {
                if x.is_infinite() {
                    ln_gamma(alpha + 1.0).exp()
                } else if x <= 0.0 {
                    0.0
                } else {
                    ln_gamma(alpha + 1.0).exp() * gamma_lr(alpha + 1.0, x)
                }
            }
        }
    }

    fn first(&self, x: f64) -> f64 {
        let x = self.clamp(x);
        match self.family {
            OrthogonalFamily::HermiteNormalized => -gaussian_density(x),
            OrthogonalFamily::Jacobi { alpha, beta } => {
                // xi = 2t - 1 on t in [0, 1]
                let t = 0.5 * (x + 1.0);
                let s = jacobi_scale(alpha, beta);
                s * (2.0
                    * ln_beta(beta + 2.0, alpha + 1.0).exp()
                    * beta_reg(beta + 2.0, alpha + 1.0, t)
                    - ln_beta(beta + 1.0, alpha + 1.0).exp() * beta_reg(beta + 1.0, alpha + 1.0, t))
            }
            OrthogonalFamily::Laguerre { alpha } => {
                if x.is_infinite() {
                    ln_gamma(alpha + 2.0).exp()
                } else if x <= 0.0 {
                    0.0
                } else {
                    ln_gamma(alpha + 2.0).exp() * gamma_lr(alpha + 2.0, x)
                }
            }
        }
    }

    /// Hermite only: `int_-inf^x xi^2 omega = Phi(x) - x omega(x)`.
    fn second(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return if x > 0.0 { 1.0 } else { 0.0 };
        }
        normal_cdf(x) - x * gaussian_density(x)
    }

    /// `int_l^r (p0 + p1 xi + p2 xi^2) w`, with `p2` supported for Hermite only.
    fn poly(&self, p0: f64, p1: f64, p2: f64, l: f64, r: f64) -> f64 {
        let mut v = p0 * (self.mass(r) - self.mass(l)) + p1 * (self.first(r) - self.first(l));
        if p2 != 0.0 {
            v += p2 * (self.second(r) - self.second(l));
        }
        v
    }

    fn total_mass(&self) -> f64 {
        self.mass(self.family.support().1)
    }

    fn total_first(&self) -> f64 {
        self.first(self.family.support().1)
    }
}

fn jacobi_scale(alpha: f64, beta: f64) -> f64 {
    ((alpha + beta + 1.0) * std::f64::consts::LN_2).exp()
}

/// `p_n(xi) w(xi)` for a family, with `xi` clamped to the support.
fn weighted_member(family: &OrthogonalFamily, n: usize, xi: f64) -> f64 {
    let (lo, hi) = family.support();
    let x = xi.clamp(lo, hi);
    let w = family.weight(x);
    if w == 0.0 {
        return 0.0;
    }
    family.eval(n, x) * w
}

/// `c_0` of the shock solution, `u = b xi + a sign(xi - xi_s)`.
fn shock_mean(family: OrthogonalFamily, xs: f64, s: &RiemannSetup) -> f64 {
    let m = PartialMoments { family };
    s.b * m.total_first() + s.a * (m.total_mass() - 2.0 * m.mass(xs))
}

/// `c_0` of the rarefaction solution.
fn rarefaction_mean(family: OrthogonalFamily, x1: f64, x2: f64, s: &RiemannSetup) -> f64 {
    let m = PartialMoments { family };
    let (lo, hi) = family.support();
    let c = s.a + s.b * x1;
    m.poly(s.a, s.b, 0.0, lo, x1) + m.poly(c, 0.0, 0.0, x1, x2) + m.poly(-s.a, s.b, 0.0, x2, hi)
}

/// Mass of the `+1`-shifted weight outside the fan, `int u' w^(+1) / b`.
fn outside_fan_shifted_mass(family: OrthogonalFamily, x1: f64, x2: f64) -> f64 {
    let m = PartialMoments {
        family: family.shifted(1.0),
    };
    m.mass(x1) + m.total_mass() - m.mass(x2)
}

/// `int xi P_1 w` for Jacobi.
fn jacobi_first_moment_constant(alpha: f64, beta: f64) -> f64 {
    let s = alpha + beta;
    ((s + 2.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 2.0) + ln_gamma(beta + 2.0)
        - ln_gamma(s + 2.0))
    .exp()
        / ((s + 2.0) * (s + 3.0))
}

fn validated(family: OrthogonalFamily, setup: &RiemannSetup, t: f64) -> Result<()> {
    family.validate()?;
    setup.validate()?;
    check_time(t)
}

/// Coefficients of the piecewise-linear initial data `+-a + b xi`.
fn initial_family_coefficient(
    family: OrthogonalFamily,
    i: usize,
    x: f64,
    setup: &RiemannSetup,
) -> f64 {
    let (l, r) = setup.outer_states();
    let mean = if x <= setup.x0 { l.0 } else { r.0 };
    let m = PartialMoments { family };
    match (i, family) {
        (0, _) => mean * m.total_mass() + setup.b * m.total_first(),
        (1, OrthogonalFamily::HermiteNormalized) => setup.b,
        (1, OrthogonalFamily::Jacobi { alpha, beta }) => {
            setup.b * jacobi_first_moment_constant(alpha, beta)
        }
        (1, OrthogonalFamily::Laguerre { alpha }) => -setup.b * ln_gamma(alpha + 2.0).exp(),
        _ => 0.0,
    }
}

/// Jacobi coefficient `int u P_i^(a,b) w` of the shock solution.
pub fn jacobi_shock_coefficient(
    i: usize,
    x: f64,
    t: f64,
    setup: &RiemannSetup,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    let fam = OrthogonalFamily::Jacobi { alpha, beta };
    validated(fam, setup, t)?;
    if t == 0.0 {
        return Ok(initial_family_coefficient(fam, i, x, setup));
    }
    let xs = shock_location(x, t, setup);
    if i == 0 {
        return Ok(shock_mean(fam, xs, setup));
    }
    let delta = if i == 1 {
        setup.b * jacobi_first_moment_constant(alpha, beta)
    } else {
        0.0
    };
    Ok(delta + setup.a / i as f64 * weighted_member(&fam.shifted(1.0), i - 1, xs))
}

/// Jacobi coefficient `int u P_i^(a,b) w` of the rarefaction solution.
pub fn jacobi_rarefaction_coefficient(
    i: usize,
    x: f64,
    t: f64,
    setup: &RiemannSetup,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    let fam = OrthogonalFamily::Jacobi { alpha, beta };
    validated(fam, setup, t)?;
    if t == 0.0 {
        return Ok(initial_family_coefficient(fam, i, x, setup));
    }
    let (x1, x2) = fan_breakpoints(x, t, setup);
    Ok(match i {
        0 => rarefaction_mean(fam, x1, x2, setup),
        1 => 0.5 * setup.b * outside_fan_shifted_mass(fam, x1, x2),
        _ => {
            let g = fam.shifted(2.0);
            setup.b / (4.0 * (i * (i - 1)) as f64)
                * (weighted_member(&g, i - 2, x2) - weighted_member(&g, i - 2, x1))
        }
    })
}

/// Laguerre coefficient `int u L_i^(a) w` of the shock solution.
pub fn laguerre_shock_coefficient(
    i: usize,
    x: f64,
    t: f64,
    setup: &RiemannSetup,
    alpha: f64,
) -> Result<f64> {
    let fam = OrthogonalFamily::Laguerre { alpha };
    validated(fam, setup, t)?;
    if t == 0.0 {
        return Ok(initial_family_coefficient(fam, i, x, setup));
    }
    let xs = shock_location(x, t, setup);
    if i == 0 {
        return Ok(shock_mean(fam, xs, setup));
    }
    let delta = if i == 1 {
        -setup.b * ln_gamma(alpha + 2.0).exp()
    } else {
        0.0
    };
    Ok(delta - 2.0 * setup.a / i as f64 * weighted_member(&fam.shifted(1.0), i - 1, xs))
}

/// Laguerre coefficient `int u L_i^(a) w` of the rarefaction solution.
pub fn laguerre_rarefaction_coefficient(
    i: usize,
    x: f64,
    t: f64,
    setup: &RiemannSetup,
    alpha: f64,
) -> Result<f64> {
    let fam = OrthogonalFamily::Laguerre { alpha };
    validated(fam, setup, t)?;
    if t == 0.0 {
        return Ok(initial_family_coefficient(fam, i, x, setup));
    }
    let (x1, x2) = fan_breakpoints(x, t, setup);
    Ok(match i {
        0 => rarefaction_mean(fam, x1, x2, setup),
        1 => -setup.b * outside_fan_shifted_mass(fam, x1, x2),
        _ => {
            let g = fam.shifted(2.0);
            setup.b / ((i * (i - 1)) as f64)
                * (weighted_member(&g, i - 2, x2) - weighted_member(&g, i - 2, x1))
        }
    })
}

/// Coefficient `i` in any family, for the kind stored in `setup`.
pub fn family_coefficient(
    family: OrthogonalFamily,
    i: usize,
    x: f64,
    t: f64,
    setup: &RiemannSetup,
) -> Result<f64> {
    match (family, setup.kind) {
        (OrthogonalFamily::HermiteNormalized, _) => hermite_coefficient(i, x, t, setup),
        (OrthogonalFamily::Jacobi { alpha, beta }, RiemannKind::Shock) => {
            jacobi_shock_coefficient(i, x, t, setup, alpha, beta)
        }
        (OrthogonalFamily::Jacobi { alpha, beta }, RiemannKind::Rarefaction) => {
            jacobi_rarefaction_coefficient(i, x, t, setup, alpha, beta)
        }
        (OrthogonalFamily::Laguerre { alpha }, RiemannKind::Shock) => {
            laguerre_shock_coefficient(i, x, t, setup, alpha)
        }
        (OrthogonalFamily::Laguerre { alpha }, RiemannKind::Rarefaction) => {
            laguerre_rarefaction_coefficient(i, x, t, setup, alpha)
        }
    }
}

/// Coefficients `0..modes` at one point.
pub fn reference_coefficients(
    family: OrthogonalFamily,
    x: f64,
    t: f64,
    setup: &RiemannSetup,
    modes: usize,
) -> Result<Vec<f64>> {
    (0..modes)
        .map(|i| family_coefficient(family, i, x, t, setup))
        .collect()
}

/// Moments implied by the first `coeffs.len()` coefficients of an
/// unnormalized family: `E = c_0/h_0`, `Var = sum_{i>=1} c_i^2 / (h_i h_0)`.
pub fn truncated_moments(family: OrthogonalFamily, coeffs: &[f64]) -> Moments {
    let h0 = family.norm_sq(0);
    let expectation = coeffs.first().map(|c| c / h0).unwrap_or(0.0);
    let variance = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * c / (family.norm_sq(i) * h0))
        .sum();
    Moments {
        expectation,
        variance,
    }
}

/// Entropy solution of the bump problem for fixed `xi`, on a periodic domain.
///
/// Each realization is a scalar Burgers problem; the Hopf-Lax formula
/// `u = (x - y*) / t` with `y*` minimizing `U0(y) + (x - y)^2 / (2t)` gives
/// the entropy solution also after shocks form.
#[derive(Debug, Clone)]
pub struct BumpReference {
    pub setup: BumpSetup,
    pub period: f64,
    /// `int_{x0-r}^{x0-r+k h} g` on a uniform table over the bump support.
    table: Vec<f64>,
    spacing: f64,
    xi_nodes: Vec<f64>,
    xi_weights: Vec<f64>,
}

const BUMP_TABLE_CELLS: usize = 4096;

impl BumpReference {
    pub fn new(setup: BumpSetup, period: f64) -> Result<Self> {
        if !(setup.r > 0.0 && 2.0 * setup.r <= period) {
            return Err(Error::param(
                "r",
                format!("{} must lie in (0, period/2]", setup.r),
            ));
        }
        if !(setup.eps.is_finite() && setup.b.is_finite() && setup.x0.is_finite()) {
            return Err(Error::param("bump", "parameters must be finite"));
        }
        let spacing = 2.0 * setup.r / BUMP_TABLE_CELLS as f64;
        let (gn, gw) = crate::sbp::gauss_lobatto_legendre(12);
        let mut table = Vec::with_capacity(BUMP_TABLE_CELLS + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for c in 0..BUMP_TABLE_CELLS {
            let lo = -setup.r + c as f64 * spacing;
            let cell: f64 = gn
                .iter()
                .zip(&gw)
                .map(|(z, w)| w * bump_profile(lo + 0.5 * spacing * (z + 1.0), setup.r))
                .sum();
            acc += 0.5 * spacing * cell;
            table.push(acc);
        }
        // Composite Gauss-Legendre in xi; the realizations jump in xi once shocks exist.
        let (ln, lw) = crate::sbp::gauss_lobatto_legendre(6);
        let (lo, hi, panels) = (-9.0, 9.0, 720);
        let width = (hi - lo) / panels as f64;
        let mut xi_nodes = Vec::new();
        let mut xi_weights = Vec::new();
        for k in 0..panels {
            let a = lo + k as f64 * width;
            for (z, w) in ln.iter().zip(&lw) {
                // interior endpoints are shared between panels; keep both halves.
                let xi = a + 0.5 * width * (z + 1.0);
                xi_nodes.push(xi);
                xi_weights.push(0.5 * width * w * gaussian_density(xi));
            }
        }
        Ok(BumpReference {
            setup,
            period,
            table,
            spacing,
            xi_nodes,
            xi_weights,
        })
    }

    /// `int_{x0-r}^{x0+d} g` for `d` in `[-r, r]`, by cubic Hermite interpolation.
    fn partial_integral(&self, d: f64) -> f64 {
        let r = self.setup.r;
        if d <= -r {
            return 0.0;
        }
        if d >= r {
            return self.table[BUMP_TABLE_CELLS];
        }
        let s = (d + r) / self.spacing;
        let c = (s.floor() as usize).min(BUMP_TABLE_CELLS - 1);
        let tau = s - c as f64;
        let h = self.spacing;
        let x_lo = -r + c as f64 * h;
        let (p0, p1) = (self.table[c], self.table[c + 1]);
        let (m0, m1) = (bump_profile(x_lo, r) * h, bump_profile(x_lo + h, r) * h);
        let t2 = tau * tau;
        let t3 = t2 * tau;
        (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + tau) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1
    }

    /// `int_{x0-r}^{y} g` with `g` extended periodically.
    fn periodic_integral(&self, y: f64) -> f64 {
        let start = self.setup.x0 - self.setup.r;
        let shifted = y - start;
        let wraps = (shifted / self.period).floor();
        let local = shifted - wraps * self.period;
        wraps * self.table[BUMP_TABLE_CELLS] + self.partial_integral(local - self.setup.r)
    }

    /// Solution at `(x, t)` for one realization `xi`.
    pub fn realization(&self, x: f64, t: f64, xi: f64) -> f64 {
        let amp = self.setup.eps * (1.0 + self.setup.b * xi);
        let g = |y: f64| {
            let d = y - self.setup.x0;
            let d = d - (d / self.period).round() * self.period;
            bump_profile(d, self.setup.r)
        };
        if t == 0.0 {
            return 1.0 + amp * g(x);
        }
        let peak = (-1.0f64).exp();
        let (umin, umax) = (1.0 + (amp * peak).min(0.0), 1.0 + (amp * peak).max(0.0));
        let cost = |y: f64| y + amp * self.periodic_integral(y) + (x - y) * (x - y) / (2.0 * t);
        let (lo, hi) = (x - t * umax, x - t * umin);
        if hi - lo <= 0.0 {
            return (x - lo) / t;
        }
        let samples = 256;
        let step = (hi - lo) / samples as f64;
        let mut best = (0usize, f64::INFINITY);
        for k in 0..=samples {
            let v = cost(lo + k as f64 * step);
            if v < best.1 {
                best = (k, v);
            }
        }
        let mut a = lo + best.0.saturating_sub(1) as f64 * step;
        let mut b = (lo + (best.0 + 1) as f64 * step).min(hi);
        // The cost is flat at its minimum; bisect on its derivative instead.
        let slope = |y: f64| y + t * (1.0 + amp * g(y)) - x;
        if slope(a) > 0.0 || slope(b) < 0.0 {
            return (x - (lo + best.0 as f64 * step)) / t;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if slope(m) <= 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        (x - 0.5 * (a + b)) / t
    }

    /// Hermite coefficients `0..modes` and the moments of the full solution.
    pub fn coefficients(&self, x: f64, t: f64, modes: usize) -> Result<(Vec<f64>, Moments)> {
        check_time(t)?;
        let mut c = vec![0.0; modes];
        let mut second = 0.0;
        for (xi, w) in self.xi_nodes.iter().zip(&self.xi_weights) {
            let u = self.realization(x, t, *xi);
            second += w * u * u;
            for (i, ci) in c.iter_mut().enumerate() {
                *ci += w * u * crate::pc_basis::hermite_eval(i, *xi);
            }
        }
        let mean = if modes > 0 {
            c[0]
        } else {
            self.xi_nodes
                .iter()
                .zip(&self.xi_weights)
                .map(|(xi, w)| w * self.realization(x, t, *xi))
                .sum()
        };
        Ok((
            c,
            Moments {
                expectation: mean,
                variance: (second - mean * mean).max(0.0),
            },
        ))
    }
}

fn bump_profile(d: f64, r: f64) -> f64 {
    let r2 = r * r;
    if d * d < r2 {
        (-r2 / (r2 - d * d)).exp()
    } else {
        0.0
    }
}
