//! Post-processing of sampled profiles: jump conditions and plateau counting.

use crate::error::{Error, Result};
use crate::galerkin::{entropy, flux_into, potential_unchecked};
use crate::pc_basis::TripleProductTensor;

/// Tuning knobs for discontinuity detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSettings {
    /// A jump is a candidate if it exceeds this multiple of the median jump.
    pub median_factor: f64,
    /// ... and this fraction of the largest jump in the profile.
    pub relative_floor: f64,
    /// Samples skipped on each side of a detected jump when picking the flanking states.
    pub margin: usize,
    /// Samples averaged on each side, both for the jump indicator and for the
    /// flanking states. An even width cancels odd-even oscillations.
    pub window: usize,
    /// Tolerance of the entropy inequality `[F] - s[U] <= tol`.
    pub entropy_tolerance: f64,
}

impl Default for AuditSettings {
    fn default() -> Self {
        AuditSettings {
            median_factor: 10.0,
            relative_floor: 0.1,
            margin: 2,
            window: 1,
            entropy_tolerance: 1e-2,
        }
    }
}

/// One detected discontinuity and its jump-condition residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct Discontinuity {
    pub location: f64,
    /// Least-squares speed from `s [u_k] = [f_k]`.
    pub speed: f64,
    /// `|s [u_k] - [f_k]|` per mode.
    pub mode_residuals: Vec<f64>,
    /// `max_k |s [u_k] - [f_k]|` over `max_k max(|f_k(u_L)|, |f_k(u_R)|)`.
    pub flux_scaled_residual: f64,
    /// `max_k |s [u_k] - [f_k]|` over `max_k |[u_k]|`.
    pub jump_scaled_residual: f64,
    /// `[F] - s [U]`; nonpositive for an admissible discontinuity.
    pub entropy_residual: f64,
    pub entropy_admissible: bool,
    pub left_state: Vec<f64>,
    pub right_state: Vec<f64>,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Mean of samples `lo..=hi` of a profile of `m`-vectors.
fn window_mean(states: &[f64], m: usize, lo: usize, hi: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for s in states[lo * m..(hi + 1) * m].chunks(m) {
        for (o, v) in out.iter_mut().zip(s) {
            *o += v;
        }
    }
    let count = (hi - lo + 1) as f64;
    out.iter_mut().for_each(|o| *o /= count);
    out
}

/// Size of the jump across each sample interval: Euclidean norm of the
/// difference between the means of `window` samples on either side.
/// Intervals closer than `window` samples to either end get 0.
pub fn jump_indicator(states: &[f64], modes: usize, window: usize) -> Vec<f64> {
    let n = states.len() / modes;
    let w = window.max(1);
    (0..n.saturating_sub(1))
        .map(|i| {
            if i + 1 < w || i + w > n - 1 {
                return 0.0;
            }
            let l = window_mean(states, modes, i + 1 - w, i);
            let r = window_mean(states, modes, i + 1, i + w);
            l.iter()
                .zip(&r)
                .map(|(a, b)| (b - a) * (b - a))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Groups of consecutive sample intervals whose jump indicator is large.
///
/// Returns `(first, last)` interval indices; interval `i` spans samples `i, i+1`.
pub fn detect_jumps(jumps: &[f64], settings: &AuditSettings) -> Vec<(usize, usize)> {
    let largest = jumps.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return Vec::new();
    }
    let threshold =
        (settings.median_factor * median(jumps.to_vec())).max(settings.relative_floor * largest);
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for (i, &j) in jumps.iter().enumerate() {
        if j > threshold {
            match groups.last_mut() {
                Some(g) if g.1 + 1 >= i => g.1 = i,
                _ => groups.push((i, i)),
            }
        }
    }
    groups
}

/// Rankine-Hugoniot audit of a sampled profile.
///
/// `states` holds `positions.len()` mode vectors back to back.
pub fn rankine_hugoniot_audit(
    positions: &[f64],
    states: &[f64],
    tensor: &TripleProductTensor,
    settings: &AuditSettings,
) -> Result<Vec<Discontinuity>> {
    let m = tensor.modes();
    if states.len() != positions.len() * m {
        return Err(Error::Shape(format!(
            "{} values for {} samples of {} modes",
            states.len(),
            positions.len(),
            m
        )));
    }
    let n = positions.len();
    if n < 2 {
        return Ok(Vec::new());
    }
    let w = settings.window.max(1);
    let jumps = jump_indicator(states, m, w);
    let mut out = Vec::new();
    for (first, last) in detect_jumps(&jumps, settings) {
        let weight: f64 = jumps[first..=last].iter().sum();
        let location = (first..=last)
            .map(|i| jumps[i] * 0.5 * (positions[i] + positions[i + 1]))
            .sum::<f64>()
            / weight;
        let left_hi = first.saturating_sub(settings.margin);
        let ul = window_mean(states, m, (left_hi + 1).saturating_sub(w), left_hi);
        let right_lo = (last + 1 + settings.margin).min(n - 1);
        let ur = window_mean(states, m, right_lo, (right_lo + w - 1).min(n - 1));
        let mut fl = vec![0.0; m];
        let mut fr = vec![0.0; m];
        flux_into(&ul, tensor, &mut fl);
        flux_into(&ur, tensor, &mut fr);
        let du: Vec<f64> = ul.iter().zip(&ur).map(|(a, b)| b - a).collect();
        let df: Vec<f64> = fl.iter().zip(&fr).map(|(a, b)| b - a).collect();
        let du2: f64 = du.iter().map(|v| v * v).sum();
        let speed = if du2 > 0.0 {
            du.iter().zip(&df).map(|(a, b)| a * b).sum::<f64>() / du2
        } else {
            0.0
        };
        let mode_residuals: Vec<f64> = du
            .iter()
            .zip(&df)
            .map(|(a, b)| (speed * a - b).abs())
            .collect();
        let worst = mode_residuals.iter().cloned().fold(0.0, f64::max);
        let ratio = |scale: f64| if scale > 0.0 { worst / scale } else { 0.0 };
        let jump_scale = du.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let flux_scale = fl.iter().chain(&fr).fold(0.0f64, |a, v| a.max(v.abs()));
        let entropy_flux = |u: &[f64], f: &[f64]| {
            u.iter().zip(f).map(|(a, b)| a * b).sum::<f64>() - potential_unchecked(u, tensor)
        };
        let jump_f = entropy_flux(&ur, &fr) - entropy_flux(&ul, &fl);
        let jump_u = entropy(&ur) - entropy(&ul);
        let entropy_residual = jump_f - speed * jump_u;
        out.push(Discontinuity {
            location,
            speed,
            mode_residuals,
            flux_scaled_residual: ratio(flux_scale),
            jump_scaled_residual: ratio(jump_scale),
            entropy_residual,
            entropy_admissible: entropy_residual <= settings.entropy_tolerance,
            left_state: ul,
            right_state: ur,
        });
    }
    Ok(out)
}

/// A maximal run of (nearly) constant values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub x_start: f64,
    pub x_end: f64,
    pub value: f64,
    pub samples: usize,
}

/// Finds flat stretches of a sampled profile.
///
/// Neighbouring samples belong to the same run while they differ by less than
/// `step_tolerance`; runs shorter than `min_samples` are dropped, and adjacent
/// runs whose means differ by less than `merge_tolerance` are merged.
pub fn detect_plateaus(
    positions: &[f64],
    values: &[f64],
    step_tolerance: f64,
    min_samples: usize,
    merge_tolerance: f64,
) -> Vec<Plateau> {
    let n = values.len().min(positions.len());
    let mut runs: Vec<Plateau> = Vec::new();
    let mut start = 0;
    let flush = |runs: &mut Vec<Plateau>, s: usize, e: usize| {
        let len = e - s + 1;
        if len >= min_samples {
            let value = values[s..=e].iter().sum::<f64>() / len as f64;
            runs.push(Plateau {
                x_start: positions[s],
                x_end: positions[e],
                value,
                samples: len,
            });
        }
    };
    for i in 1..n {
        if (values[i] - values[i - 1]).abs() >= step_tolerance {
            flush(&mut runs, start, i - 1);
            start = i;
        }
    }
    if n > 0 {
        flush(&mut runs, start, n - 1);
    }
    let mut merged: Vec<Plateau> = Vec::new();
    for r in runs {
        match merged.last_mut() {
            Some(p) if (p.value - r.value).abs() < merge_tolerance => {
                let total = p.samples + r.samples;
                p.value = (p.value * p.samples as f64 + r.value * r.samples as f64) / total as f64;
                p.samples = total;
                p.x_end = r.x_end;
            }
            _ => merged.push(r),
        }
    }
    merged
}
