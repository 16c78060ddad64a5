//! Flat `key=value` run configuration and the named presets.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::comparison::{AuditSettings, DissipationMode};
use crate::error::{Error, Result};
use crate::time::Method;

/// Environment variable holding the root for relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "PCBURGERS_OUTPUT_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Bump,
    Rarefaction,
    Shock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Cpr,
    Fv,
    Fd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxChoice {
    Ec,
    LlfEs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcChoice {
    /// Periodic for the bump, inflow for the shock, outflow for the rarefaction.
    Auto,
    Periodic,
    Inflow,
    Outflow,
}

macro_rules! keyword_enum {
    ($ty:ident, $what:literal, $($variant:ident => [$($name:literal),+]),+ $(,)?) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($($name)|+ => Ok($ty::$variant),)+
                    other => Err(Error::Config(format!("unknown {} '{}'", $what, other))),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let name = match self {
                    $($ty::$variant => [$($name),+][0],)+
                };
                f.write_str(name)
            }
        }
    };
}

keyword_enum!(Case, "case", Bump => ["bump"], Rarefaction => ["rarefaction"], Shock => ["shock"]);
keyword_enum!(SolverKind, "solver", Cpr => ["cpr"], Fv => ["fv"], Fd => ["fd"]);
keyword_enum!(FluxChoice, "flux", Ec => ["ec"], LlfEs => ["llf_es", "llf", "es"]);
keyword_enum!(
    BcChoice, "boundary condition",
    Auto => ["auto"], Periodic => ["periodic"], Inflow => ["inflow"], Outflow => ["outflow"]
);

/// Per-element exponential filter applied after every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub order: u32,
    pub strength: f64,
}

/// Everything one run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub case: Case,
    pub solver: SolverKind,
    /// Chaos order `M`; the system has `M + 1` modes.
    pub order: usize,
    /// Elements (CPR), cells (FV) or grid intervals (FD).
    pub elements: usize,
    /// Polynomial degree of the CPR elements.
    pub degree: usize,
    pub steps: usize,
    pub t_end: f64,
    /// Optional explicit step; must agree with `t_end / steps`.
    pub dt: Option<f64>,
    pub flux: FluxChoice,
    /// Dissipation weight of the LLF flux (all solvers).
    pub omega: f64,
    pub filter: Option<FilterSpec>,
    pub fd_order: usize,
    pub fd_dissipation: DissipationMode,
    pub fd_c2: f64,
    pub fd_c4: f64,
    /// Defaults to SSPRK33 for CPR/FV and RK4 for FD.
    pub time_method: Option<Method>,
    pub bc: BcChoice,
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub r: f64,
    pub bump_eps: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    /// Output snapshots after the initial one, evenly spaced in steps.
    pub snapshots: usize,
    /// Steps between time-series samples; 0 picks about 200 samples.
    pub series_every: usize,
    pub output_dir: PathBuf,
    pub audit: AuditSettings,
    pub plateau_step_tol: f64,
    pub plateau_min_samples: usize,
    pub plateau_merge_tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "custom".to_string(),
            case: Case::Shock,
            solver: SolverKind::Cpr,
            order: 3,
            elements: 250,
            degree: 3,
            steps: 10_000,
            t_end: 0.5,
            dt: None,
            flux: FluxChoice::LlfEs,
            omega: 1.0,
            filter: None,
            fd_order: 4,
            fd_dissipation: DissipationMode::SecondAndFourth,
            fd_c2: 0.5,
            fd_c4: 0.1,
            time_method: None,
            bc: BcChoice::Auto,
            a: 1.0,
            b: 0.2,
            x0: 0.5,
            r: 0.25,
            bump_eps: std::f64::consts::E / 100.0,
            x_lo: 0.0,
            x_hi: 1.0,
            snapshots: 1,
            series_every: 0,
            output_dir: PathBuf::from("custom"),
            audit: AuditSettings::default(),
            plateau_step_tol: 2e-3,
            plateau_min_samples: 4,
            plateau_merge_tol: 1e-2,
        }
    }
}

/// Preset names accepted by [`preset`].
pub const PRESETS: &[&str] = &[
    "fig1",
    "fig1-fv",
    "fig2",
    "fig2-fv",
    "fig3",
    "fig3-fv",
    "fig4-cpr-low",
    "fig4-cpr-high",
    "fig4-fv-low",
    "fig4-fv-high",
    "fig4-fd-low",
    "fig4-fd-high",
    "fig5",
    "fig6",
];

/// Desk-scaled configuration for a figure.
///
/// The shock runs use 250 CPR elements / 1000 FV and FD cells and 10^4 steps
/// (ten times coarser than the published runs) except `fig5`, which keeps
/// 2500 FV cells; the bump and rarefaction runs use the published resolution.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig {
        name: name.to_string(),
        output_dir: PathBuf::from(name),
        ..ExperimentConfig::default()
    };
    let fv = |c: &mut ExperimentConfig, cells| {
        c.solver = SolverKind::Fv;
        c.elements = cells;
        c.degree = 0;
    };
    let fd = |c: &mut ExperimentConfig| {
        c.solver = SolverKind::Fd;
        c.elements = 1000;
        c.degree = 0;
    };
    match name {
        "fig1" | "fig1-fv" => {
            c.case = Case::Bump;
            c.x0 = 0.25;
            c.t_end = 10.0;
            c.steps = 10_000;
            c.elements = 10;
            c.degree = 9;
            if name == "fig1-fv" {
                fv(&mut c, 1000);
            }
        }
        "fig2" | "fig2-fv" => {
            c.case = Case::Rarefaction;
            c.t_end = 0.25;
            c.steps = 1000;
            c.elements = 10;
            c.degree = 7;
            if name == "fig2-fv" {
                fv(&mut c, 80);
            }
        }
        "fig3" | "fig4-cpr-low" => {}
        "fig4-cpr-high" => {
            c.filter = Some(FilterSpec {
                order: 1,
                strength: 100.0,
            })
        }
        "fig3-fv" | "fig4-fv-high" => fv(&mut c, 1000),
        "fig4-fv-low" => {
            fv(&mut c, 1000);
            c.omega = 5e-3;
        }
        "fig5" => {
            // The centred transition only settles into constant pieces on the finer grid.
            fv(&mut c, 2500);
            c.omega = 5e-3;
            c.audit.window = 32;
        }
        "fig4-fd-high" => fd(&mut c),
        "fig4-fd-low" | "fig6" => {
            fd(&mut c);
            c.fd_dissipation = DissipationMode::FourthOnly;
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}'; known presets: {}",
                PRESETS.join(", ")
            )))
        }
    }
    Ok(c)
}

fn field_err(key: &str, msg: impl fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| field_err(key, format!("cannot parse '{value}': {e}")))
}

fn parse_kw<T: FromStr<Err = Error>>(key: &str, value: &str) -> Result<T> {
    value.parse::<T>().map_err(|e| field_err(key, e))
}

impl ExperimentConfig {
    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        match key {
            "name" => self.name = value.to_string(),
            "case" => self.case = parse_kw(key, value)?,
            "solver" => self.solver = parse_kw(key, value)?,
            "M" | "order" => self.order = parse_num(key, value)?,
            "N" | "elements" => self.elements = parse_num(key, value)?,
            "p" | "degree" => self.degree = parse_num(key, value)?,
            "steps" => self.steps = parse_num(key, value)?,
            "t_end" => self.t_end = parse_num(key, value)?,
            "dt" => {
                self.dt = match value {
                    "" | "auto" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "flux" => self.flux = parse_kw(key, value)?,
            "omega" => self.omega = parse_num(key, value)?,
            "filter" => {
                self.filter = match value {
                    "off" | "none" | "" => None,
                    v => {
                        let (s, e) = v.split_once(',').ok_or_else(|| {
                            field_err(key, "expected 'off' or '<order>,<strength>'")
                        })?;
                        Some(FilterSpec {
                            order: parse_num(key, s)?,
                            strength: parse_num(key, e)?,
                        })
                    }
                }
            }
            "filter_order" => {
                let order = parse_num(key, value)?;
                let strength = self.filter.map(|f| f.strength).unwrap_or(100.0);
                self.filter = Some(FilterSpec { order, strength });
            }
            "filter_strength" => {
                let strength = parse_num(key, value)?;
                let order = self.filter.map(|f| f.order).unwrap_or(1);
                self.filter = Some(FilterSpec { order, strength });
            }
            "fd_order" => self.fd_order = parse_num(key, value)?,
            "fd_dissipation" => self.fd_dissipation = parse_kw(key, value)?,
            "fd_c2" => self.fd_c2 = parse_num(key, value)?,
            "fd_c4" => self.fd_c4 = parse_num(key, value)?,
            "time_method" => {
                self.time_method = match value {
                    "auto" | "" => None,
                    v => Some(parse_kw(key, v)?),
                }
            }
            "bc" => self.bc = parse_kw(key, value)?,
            "a" => self.a = parse_num(key, value)?,
            "b" => self.b = parse_num(key, value)?,
            "x0" => self.x0 = parse_num(key, value)?,
            "r" => self.r = parse_num(key, value)?,
            "bump_eps" => self.bump_eps = parse_num(key, value)?,
            "x_lo" => self.x_lo = parse_num(key, value)?,
            "x_hi" => self.x_hi = parse_num(key, value)?,
            "snapshots" => self.snapshots = parse_num(key, value)?,
            "series_every" => self.series_every = parse_num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "audit_median_factor" => self.audit.median_factor = parse_num(key, value)?,
            "audit_relative_floor" => self.audit.relative_floor = parse_num(key, value)?,
            "audit_margin" => self.audit.margin = parse_num(key, value)?,
            "audit_window" => self.audit.window = parse_num(key, value)?,
            "audit_entropy_tol" => self.audit.entropy_tolerance = parse_num(key, value)?,
            "plateau_step_tol" => self.plateau_step_tol = parse_num(key, value)?,
            "plateau_min_samples" => self.plateau_min_samples = parse_num(key, value)?,
            "plateau_merge_tol" => self.plateau_merge_tol = parse_num(key, value)?,
            other => return Err(field_err(other, "unknown key")),
        }
        Ok(())
    }

    /// Applies a `key=value` override string.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
        self.set(k, v)
    }

    /// Parses a config file body. Starts from `preset=<name>` if that key
    /// appears first, otherwise from the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key=value, got '{line}'",
                    lineno + 1
                ))
            })?;
            if k.trim() == "preset" {
                cfg = preset(v.trim())?;
                continue;
            }
            cfg.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn modes(&self) -> usize {
        self.order + 1
    }

    /// `(steps, dt)` actually used.
    pub fn time_grid(&self) -> (usize, f64) {
        match self.dt {
            Some(dt) => {
                let steps = (self.t_end / dt).round().max(1.0) as usize;
                (steps, dt)
            }
            None => (self.steps, self.t_end / self.steps as f64),
        }
    }

    pub fn effective_bc(&self) -> BcChoice {
        match (self.bc, self.case) {
            (BcChoice::Auto, Case::Bump) => BcChoice::Periodic,
            (BcChoice::Auto, Case::Shock) => BcChoice::Inflow,
            (BcChoice::Auto, Case::Rarefaction) => BcChoice::Outflow,
            (bc, _) => bc,
        }
    }

    pub fn effective_time_method(&self) -> Method {
        self.time_method.unwrap_or(match self.solver {
            SolverKind::Fd => Method::Rk4,
            _ => Method::Ssprk33,
        })
    }

    /// Output directory, resolved against `PCBURGERS_OUTPUT_ROOT` when relative.
    pub fn resolved_output_dir(&self) -> PathBuf {
        if self.output_dir.is_absolute() {
            return self.output_dir.clone();
        }
        let root = std::env::var_os(OUTPUT_ROOT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("pcburgers-output"));
        root.join(&self.output_dir)
    }

    /// Checks ranges and case/solver specific settings.
    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(field_err(key, format!("{v} must be positive and finite")))
            }
        };
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(field_err("name", "must be a non-empty file stem"));
        }
        if self.order > 12 {
            return Err(field_err(
                "M",
                format!("{} exceeds the supported maximum 12", self.order),
            ));
        }
        if self.steps == 0 && self.dt.is_none() {
            return Err(field_err("steps", "must be positive"));
        }
        positive("t_end", self.t_end)?;
        if let Some(dt) = self.dt {
            positive("dt", dt)?;
            let (steps, _) = self.time_grid();
            if ((steps as f64) * dt - self.t_end).abs() > 1e-9 * self.t_end {
                return Err(field_err(
                    "dt",
                    format!("{dt} does not divide t_end = {}", self.t_end),
                ));
            }
        }
        if !(self.x_lo.is_finite() && self.x_hi.is_finite() && self.x_lo < self.x_hi) {
            return Err(field_err(
                "x_lo/x_hi",
                "need a finite interval with x_lo < x_hi",
            ));
        }
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(field_err("omega", format!("{} outside (0, 1]", self.omega)));
        }
        match self.solver {
            SolverKind::Cpr => {
                if self.elements == 0 {
                    return Err(field_err("N", "must be positive"));
                }
                if self.degree > crate::sbp::MAX_DEGREE {
                    return Err(field_err(
                        "p",
                        format!("{} exceeds {}", self.degree, crate::sbp::MAX_DEGREE),
                    ));
                }
                if let Some(f) = self.filter {
                    if self.degree == 0 {
                        return Err(field_err("filter", "needs p >= 1"));
                    }
                    if f.order == 0 {
                        return Err(field_err("filter", "order must be at least 1"));
                    }
                    if !(f.strength >= 0.0 && f.strength.is_finite()) {
                        return Err(field_err(
                            "filter",
                            "strength must be finite and nonnegative",
                        ));
                    }
                }
            }
            SolverKind::Fv => {
                if self.elements == 0 {
                    return Err(field_err("N", "must be positive"));
                }
            }
            SolverKind::Fd => {
                if self.elements < 8 {
                    return Err(field_err("N", "the FD grid needs at least 8 intervals"));
                }
                if self.fd_order != 2 && self.fd_order != 4 {
                    return Err(field_err("fd_order", "must be 2 or 4"));
                }
                if !(self.fd_c2 >= 0.0 && self.fd_c4 >= 0.0) {
                    return Err(field_err("fd_c2/fd_c4", "must be nonnegative"));
                }
            }
        }
        if self.filter.is_some() && self.solver != SolverKind::Cpr {
            return Err(field_err(
                "filter",
                "only the cpr solver supports filtering",
            ));
        }
        match self.case {
            Case::Bump => {
                positive("r", self.r)?;
                if 2.0 * self.r > self.x_hi - self.x_lo {
                    return Err(field_err("r", "bump wider than the domain"));
                }
                if !(self.bump_eps >= 0.0 && self.bump_eps.is_finite()) {
                    return Err(field_err("bump_eps", "must be finite and nonnegative"));
                }
                if !self.b.is_finite() {
                    return Err(field_err("b", "must be finite"));
                }
                if self.effective_bc() == BcChoice::Inflow {
                    return Err(field_err(
                        "bc",
                        "inflow data is only defined for the Riemann cases",
                    ));
                }
            }
            Case::Shock | Case::Rarefaction => {
                positive("a", self.a)?;
                positive("b", self.b)?;
            }
        }
        if !self.x0.is_finite() {
            return Err(field_err("x0", "must be finite"));
        }
        if self.snapshots == 0 {
            return Err(field_err("snapshots", "must be at least 1"));
        }
        Ok(())
    }

    /// All settings as `key=value` pairs in a fixed order; parses back to `self`.
    pub fn to_key_values(&self) -> Vec<(&'static str, String)> {
        let filter = match self.filter {
            Some(f) => format!("{},{:?}", f.order, f.strength),
            None => "off".to_string(),
        };
        vec![
            ("name", self.name.clone()),
            ("case", self.case.to_string()),
            ("solver", self.solver.to_string()),
            ("M", self.order.to_string()),
            ("N", self.elements.to_string()),
            ("p", self.degree.to_string()),
            ("steps", self.steps.to_string()),
            ("t_end", format!("{:?}", self.t_end)),
            (
                "dt",
                self.dt
                    .map(|d| format!("{d:?}"))
                    .unwrap_or_else(|| "auto".into()),
            ),
            ("flux", self.flux.to_string()),
            ("omega", format!("{:?}", self.omega)),
            ("filter", filter),
            ("fd_order", self.fd_order.to_string()),
            ("fd_dissipation", self.fd_dissipation.to_string()),
            ("fd_c2", format!("{:?}", self.fd_c2)),
            ("fd_c4", format!("{:?}", self.fd_c4)),
            (
                "time_method",
                self.time_method
                    .map(|m| m.to_string())
                    .unwrap_or_else(|| "auto".into()),
            ),
            ("bc", self.bc.to_string()),
            ("a", format!("{:?}", self.a)),
            ("b", format!("{:?}", self.b)),
            ("x0", format!("{:?}", self.x0)),
            ("r", format!("{:?}", self.r)),
            ("bump_eps", format!("{:?}", self.bump_eps)),
            ("x_lo", format!("{:?}", self.x_lo)),
            ("x_hi", format!("{:?}", self.x_hi)),
            ("snapshots", self.snapshots.to_string()),
            ("series_every", self.series_every.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            (
                "audit_median_factor",
                format!("{:?}", self.audit.median_factor),
            ),
            (
                "audit_relative_floor",
                format!("{:?}", self.audit.relative_floor),
            ),
            ("audit_margin", self.audit.margin.to_string()),
            ("audit_window", self.audit.window.to_string()),
            (
                "audit_entropy_tol",
                format!("{:?}", self.audit.entropy_tolerance),
            ),
            ("plateau_step_tol", format!("{:?}", self.plateau_step_tol)),
            ("plateau_min_samples", self.plateau_min_samples.to_string()),
            ("plateau_merge_tol", format!("{:?}", self.plateau_merge_tol)),
        ]
    }

    /// Config file text that reproduces `self`.
    pub fn to_config_text(&self) -> String {
        self.to_key_values()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }
}
