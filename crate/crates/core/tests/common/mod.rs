#![allow(dead_code)]

pub mod closed_forms;
pub mod riemann;

use quadrature::double_exponential;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draws in `[-scale, scale]`.
pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..=scale)).collect()
}

/// Tanh-sinh quadrature of `f` over `[a, b]`, cut into pieces of length at most `piece`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, piece: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = ((b - a) / piece).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    (0..n)
        .map(|k| {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == n { b } else { lo + h };
            double_exponential::integrate(&f, lo, hi, 1e-15).integral
        })
        .sum()
}

/// `int p(x) (x - a)^g dx` over `[a, a + len]`, with `p` given as a function of
/// the distance `x - a` and the weight handled exactly.
///
/// For `g < 0` the substitution `x - a = y^m`, `m = 1/(1 + g)`, removes the
/// endpoint singularity.
fn endpoint_piece<F: Fn(f64) -> f64>(p: F, g: f64, lo: f64, hi: f64, piece: f64) -> f64 {
    let m = if g < 0.0 { 1.0 / (1.0 + g) } else { 1.0 };
    let e = m * (1.0 + g) - 1.0;
    let (ylo, yhi) = (lo.powf(1.0 / m), hi.powf(1.0 / m));
    let pieces = ((hi - lo) / piece).ceil().max(1.0);
    integrate(
        |y: f64| {
            if y <= 0.0 {
                return 0.0;
            }
            let jac = if e == 0.0 { m } else { m * y.powf(e) };
            jac * p(y.powf(m))
        },
        ylo,
        yhi,
        (yhi - ylo) / pieces,
    )
}

fn sorted_cuts(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts
}

/// `int_{-1}^{1} p(x) (1-x)^alpha (1+x)^beta dx`, split at `breaks`.
pub fn jacobi_integral<F: Fn(f64) -> f64>(p: F, alpha: f64, beta: f64, breaks: &[f64]) -> f64 {
    let mut b: Vec<f64> = breaks.to_vec();
    b.push(0.0);
    let cuts = sorted_cuts(-1.0, 1.0, &b);
    cuts.windows(2)
        .map(|w| {
            if w[1] <= 0.0 {
                // distance d = 1 + x
                endpoint_piece(
                    |d| p(-1.0 + d) * (2.0 - d).powf(alpha),
                    beta,
                    1.0 + w[0],
                    1.0 + w[1],
                    0.25,
                )
            } else {
                // distance d = 1 - x
                endpoint_piece(
                    |d| p(1.0 - d) * (2.0 - d).powf(beta),
                    alpha,
                    1.0 - w[1],
                    1.0 - w[0],
                    0.25,
                )
            }
        })
        .sum()
}

/// `int_0^inf p(x) x^alpha e^-x dx`, truncated at 150 and split at `breaks`.
pub fn laguerre_integral<F: Fn(f64) -> f64>(p: F, alpha: f64, breaks: &[f64]) -> f64 {
    let mut b: Vec<f64> = breaks.to_vec();
    b.push(1.0);
    let cuts = sorted_cuts(0.0, 150.0, &b);
    cuts.windows(2)
        .map(|w| {
            if w[1] <= 1.0 {
                endpoint_piece(|x| p(x) * (-x).exp(), alpha, w[0], w[1], 0.25)
            } else {
                integrate(|x| p(x) * x.powf(alpha) * (-x).exp(), w[0], w[1], 2.0)
            }
        })
        .sum()
}

/// Integral over `[a, b]` split at the given interior breakpoints, so that
/// kinks and jumps of `f` sit at piece ends.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    piece: f64,
) -> f64 {
    sorted_cuts(a, b, breaks)
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], piece))
        .sum()
}

/// `exp(-x^2/2) / sqrt(2 pi)`
pub fn normal_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Probabilists' Hermite polynomials normalized to unit variance, by the
/// three-term recurrence.
pub fn hermite_orthonormal(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let p2 = x * p1 - k as f64 * p0;
        p0 = p1;
        p1 = p2;
    }
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    p1 / fact.sqrt()
}

/// Observed convergence order from errors at successively halved steps.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
