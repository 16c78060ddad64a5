//! Runs one configured experiment and writes its data files.

use std::path::PathBuf;
use std::time::Instant;

use crate::comparison::{
    detect_plateaus, rankine_hugoniot_audit, Discontinuity, FdOperator, FdSolver, FvSolver, Plateau,
};
use crate::cpr::{apply_filter_in_place, BoundaryCondition, Cpr, Mesh1D};
use crate::error::{Error, Result};
use crate::flux::FluxKind;
use crate::galerkin::{eigenvalues, entropy, entropy_flux, moments, ModeVector};
use crate::pc_basis::{build_tensor, TripleProductTensor};
use crate::reference::{bump_initial, initial_coefficients, BumpSetup, RiemannKind, RiemannSetup};
use crate::sbp::{exponential_filter, operators_for_degree, FilterMatrix, SbpOperators};
use crate::time::{Stepper, Workspace};

use super::config::{BcChoice, Case, ExperimentConfig, FluxChoice, SolverKind};
use super::output::{
    content_hash, format_g17, gnuplot_script, write_atomic, Table, SCHEMA_VERSION,
};

/// Sampled solution: positions and mode vectors back to back.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub time: f64,
    pub modes: usize,
    pub positions: Vec<f64>,
    pub states: Vec<f64>,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.modes..(i + 1) * self.modes]
    }

    pub fn expectation(&self) -> Vec<f64> {
        self.states.chunks(self.modes).map(|u| u[0]).collect()
    }

    pub fn variance(&self) -> Vec<f64> {
        self.states
            .chunks(self.modes)
            .map(|u| moments(u).variance)
            .collect()
    }

    /// Columns `x, u_0.., E, Var, lambda_1.., U, F`.
    pub fn table(&self, tensor: &TripleProductTensor) -> Result<Table> {
        let m = self.modes;
        let mut cols = vec!["x".to_string()];
        cols.extend((0..m).map(|k| format!("u_{k}")));
        cols.push("E".into());
        cols.push("Var".into());
        cols.extend((1..=m).map(|k| format!("lambda_{k}")));
        cols.push("U".into());
        cols.push("F".into());
        let mut t = Table::new(cols);
        for i in 0..self.len() {
            let u = self.state(i);
            let mo = moments(u);
            let mut row = Vec::with_capacity(2 * m + 5);
            row.push(self.positions[i]);
            row.extend_from_slice(u);
            row.push(mo.expectation);
            row.push(mo.variance);
            row.extend(eigenvalues(u, tensor)?);
            row.push(entropy(u));
            row.push(entropy_flux(u, tensor)?);
            t.push(row);
        }
        Ok(t)
    }
}

/// One time-series sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub step: usize,
    pub time: f64,
    pub mass: Vec<f64>,
    pub entropy: f64,
}

/// In-memory result of a run.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: ExperimentConfig,
    /// Initial profile first, then the requested snapshots.
    pub profiles: Vec<Profile>,
    pub series: Vec<SeriesRow>,
    /// Final minus initial total mass, per mode.
    pub mass_drift: Vec<f64>,
    /// Jump-condition audit of the final profile (shock case only).
    pub discontinuities: Vec<Discontinuity>,
    /// Constant states of the final expectation (shock case only).
    pub plateaus: Vec<Plateau>,
    pub wall_time: f64,
}

impl Simulation {
    pub fn final_profile(&self) -> &Profile {
        self.profiles.last().expect("at least the initial profile")
    }
}

/// Paths and audit results of a written run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub snapshot_paths: Vec<PathBuf>,
    pub snapshot_times: Vec<f64>,
    pub series_path: PathBuf,
    pub audit_path: Option<PathBuf>,
    pub report_path: PathBuf,
    pub metadata_path: PathBuf,
    pub plot_path: PathBuf,
    pub mass_drift: Vec<f64>,
    pub entropy_series: Vec<(f64, f64)>,
    pub wall_time: f64,
    pub discontinuities: Vec<Discontinuity>,
    pub plateaus: Vec<Plateau>,
}

enum Engine<'a> {
    Cpr {
        solver: Cpr<'a>,
        filter: Option<FilterMatrix>,
    },
    Fv(FvSolver<'a>),
    Fd(FdSolver<'a>),
}

impl Engine<'_> {
    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        match self {
            Engine::Cpr { solver, .. } => solver.rhs_into(u, out),
            Engine::Fv(s) => s.rhs_into(u, out),
            Engine::Fd(s) => s.rhs_into(u, out),
        }
    }

    fn after_step(&self, u: &mut [f64]) {
        if let Engine::Cpr {
            solver,
            filter: Some(f),
        } = self
        {
            apply_filter_in_place(u, solver.ops.len(), solver.modes(), f);
        }
    }

    fn mass(&self, u: &[f64]) -> Vec<f64> {
        match self {
            Engine::Cpr { solver, .. } => {
                let m = solver.modes();
                let ops = solver.ops;
                let mut mass = vec![0.0; m];
                for (i, node) in u.chunks(m).enumerate() {
                    let w = ops.weights[i % ops.len()];
                    for (acc, v) in mass.iter_mut().zip(node) {
                        *acc += w * v;
                    }
                }
                mass.iter().map(|v| 0.5 * solver.mesh.h() * v).collect()
            }
            Engine::Fv(s) => s.total_mass(u),
            Engine::Fd(s) => s.total_mass(u),
        }
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        match self {
            Engine::Cpr { solver, .. } => {
                let m = solver.modes();
                let ops = solver.ops;
                let s: f64 = u
                    .chunks(m)
                    .enumerate()
                    .map(|(i, node)| {
                        ops.weights[i % ops.len()] * node.iter().map(|v| v * v).sum::<f64>()
                    })
                    .sum();
                0.25 * solver.mesh.h() * s
            }
            Engine::Fv(s) => s.total_entropy(u),
            Engine::Fd(s) => s.total_entropy(u),
        }
    }
}

fn riemann_setup(cfg: &ExperimentConfig) -> Option<RiemannSetup> {
    let kind = match cfg.case {
        Case::Shock => RiemannKind::Shock,
        Case::Rarefaction => RiemannKind::Rarefaction,
        Case::Bump => return None,
    };
    Some(RiemannSetup {
        a: cfg.a,
        b: cfg.b,
        x0: cfg.x0,
        kind,
    })
}

fn bump_setup(cfg: &ExperimentConfig) -> BumpSetup {
    BumpSetup {
        x0: cfg.x0,
        r: cfg.r,
        eps: cfg.bump_eps,
        b: cfg.b,
    }
}

/// Initial state at `x`. At the jump itself the left state is used, except
/// for a node sitting on the left end of an element (`right_of_face`), which
/// takes the right state so both traces of that face carry their own side.
fn initial_state(cfg: &ExperimentConfig, x: f64, right_of_face: bool) -> ModeVector {
    let m = cfg.modes();
    match riemann_setup(cfg) {
        None => {
            // periodic wrap of the bump centre into the domain
            let len = cfg.x_hi - cfg.x_lo;
            let mut d = x - cfg.x0;
            d -= (d / len).round() * len;
            bump_initial(cfg.x0 + d, &bump_setup(cfg), m)
        }
        Some(s) => {
            let on_jump = (x - s.x0).abs() <= 1e-12 * (1.0 + s.x0.abs());
            let xe = if on_jump && right_of_face {
                f64::INFINITY
            } else if on_jump {
                s.x0
            } else {
                x
            };
            initial_coefficients(xe, &s, m)
        }
    }
}

fn boundary_condition(cfg: &ExperimentConfig) -> BoundaryCondition {
    match cfg.effective_bc() {
        BcChoice::Periodic => BoundaryCondition::Periodic,
        BcChoice::Outflow => BoundaryCondition::Outflow,
        BcChoice::Inflow | BcChoice::Auto => {
            let s = riemann_setup(cfg).expect("inflow validated for Riemann cases");
            let ((la, lb), (ra, rb)) = s.outer_states();
            BoundaryCondition::InflowDirichlet {
                left: ModeVector::affine(la, lb, cfg.modes()),
                right: ModeVector::affine(ra, rb, cfg.modes()),
            }
        }
    }
}

fn flux_kind(cfg: &ExperimentConfig) -> FluxKind {
    match cfg.flux {
        FluxChoice::Ec => FluxKind::EntropyConservative,
        FluxChoice::LlfEs => FluxKind::LocalLaxFriedrichs { omega: cfg.omega },
    }
}

/// Evolves the configured problem without writing anything.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Simulation> {
    cfg.validate()?;
    let started = Instant::now();
    let m = cfg.modes();
    let tensor = build_tensor(cfg.order);
    let bc = boundary_condition(cfg);
    let mesh = Mesh1D::new(cfg.x_lo, cfg.x_hi, cfg.elements)?;
    let ops: SbpOperators = operators_for_degree(if cfg.solver == SolverKind::Cpr {
        cfg.degree
    } else {
        0
    })?;
    let fd_op = if cfg.solver == SolverKind::Fd {
        Some(FdOperator::new(
            cfg.fd_order,
            cfg.x_lo,
            cfg.x_hi,
            cfg.elements,
        )?)
    } else {
        None
    };
    let (engine, positions, mut state) = match cfg.solver {
        SolverKind::Cpr => {
            let solver = Cpr::new(&mesh, &ops, &tensor, flux_kind(cfg), &bc)?;
            let filter = match cfg.filter {
                Some(f) => Some(exponential_filter(cfg.degree, f.order, f.strength)?),
                None => None,
            };
            let positions = mesh.node_positions(&ops);
            let last = ops.len() - 1;
            let mut data = Vec::with_capacity(positions.len() * m);
            for (i, &x) in positions.iter().enumerate() {
                let n = i % ops.len();
                data.extend_from_slice(&initial_state(cfg, x, n == 0 && last > 0));
            }
            (Engine::Cpr { solver, filter }, positions, data)
        }
        SolverKind::Fv => {
            let solver = FvSolver::new(&mesh, &tensor, cfg.omega, &bc)?;
            let positions = solver.centers();
            let data = solver.initial_state(|x| initial_state(cfg, x, false).0)?;
            (Engine::Fv(solver), positions, data)
        }
        SolverKind::Fd => {
            let op = fd_op.as_ref().expect("built above");
            let solver = FdSolver::new(
                op,
                &tensor,
                flux_kind(cfg),
                &bc,
                cfg.fd_dissipation,
                cfg.fd_c2,
                cfg.fd_c4,
            )?;
            let positions = op.positions();
            let data = solver.initial_state(|x| initial_state(cfg, x, false).0)?;
            (Engine::Fd(solver), positions, data)
        }
    };

    let (steps, dt) = cfg.time_grid();
    let stepper = Stepper::new(cfg.effective_time_method(), dt)?;
    let mut ws = Workspace::default();
    let every = if cfg.series_every == 0 {
        (steps / 200).max(1)
    } else {
        cfg.series_every
    };
    let snapshot_at: Vec<usize> = (1..=cfg.snapshots)
        .map(|k| (k * steps).div_ceil(cfg.snapshots))
        .collect();

    let profile = |state: &[f64], time: f64| Profile {
        time,
        modes: m,
        positions: positions.clone(),
        states: state.to_vec(),
    };
    let mut profiles = vec![profile(&state, 0.0)];
    let mass0 = engine.mass(&state);
    let mut series = vec![SeriesRow {
        step: 0,
        time: 0.0,
        mass: mass0.clone(),
        entropy: engine.entropy(&state),
    }];
    for step in 1..=steps {
        stepper.step(&mut state, &mut ws, |u, out| {
            engine.rhs(u, out);
            Ok(())
        })?;
        engine.after_step(&mut state);
        if !state.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        let time = step as f64 * dt;
        if step % every == 0 || step == steps {
            series.push(SeriesRow {
                step,
                time,
                mass: engine.mass(&state),
                entropy: engine.entropy(&state),
            });
        }
        if snapshot_at.contains(&step) {
            profiles.push(profile(&state, time));
        }
    }
    let mass_drift = engine
        .mass(&state)
        .iter()
        .zip(&mass0)
        .map(|(a, b)| a - b)
        .collect();

    let last = profiles.last().expect("initial profile");
    let (discontinuities, plateaus) = if cfg.case == Case::Shock {
        let d = rankine_hugoniot_audit(&last.positions, &last.states, &tensor, &cfg.audit)?;
        let p = detect_plateaus(
            &last.positions,
            &last.expectation(),
            cfg.plateau_step_tol,
            cfg.plateau_min_samples,
            cfg.plateau_merge_tol,
        );
        (d, p)
    } else {
        (Vec::new(), Vec::new())
    };

    Ok(Simulation {
        config: cfg.clone(),
        profiles,
        series,
        mass_drift,
        discontinuities,
        plateaus,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

fn series_table(sim: &Simulation) -> Table {
    let m = sim.config.modes();
    let mut cols = vec!["step".to_string(), "t".to_string()];
    cols.extend((0..m).map(|k| format!("mass_{k}")));
    cols.push("entropy".into());
    let mut t = Table::new(cols);
    for r in &sim.series {
        let mut row = vec![r.step as f64, r.time];
        row.extend_from_slice(&r.mass);
        row.push(r.entropy);
        t.push(row);
    }
    t
}

fn audit_table(d: &[Discontinuity], modes: usize) -> Table {
    let mut cols: Vec<String> = [
        "location",
        "speed",
        "flux_scaled_residual",
        "jump_scaled_residual",
        "entropy_residual",
        "entropy_admissible",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend((0..modes).map(|k| format!("residual_{k}")));
    let mut t = Table::new(cols);
    for x in d {
        let mut row = vec![
            x.location,
            x.speed,
            x.flux_scaled_residual,
            x.jump_scaled_residual,
            x.entropy_residual,
            if x.entropy_admissible { 1.0 } else { 0.0 },
        ];
        row.extend_from_slice(&x.mode_residuals);
        t.push(row);
    }
    t
}

/// Writes the CSV files, report, sidecar metadata and plot script of a
/// finished simulation into the configured output directory.
pub fn write_outputs(sim: &Simulation) -> Result<RunReport> {
    let cfg = &sim.config;
    let dir = cfg.resolved_output_dir();
    let tensor = build_tensor(cfg.order);
    let name = &cfg.name;
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    let mut snapshot_paths = Vec::new();
    for (k, p) in sim.profiles.iter().enumerate() {
        let path = dir.join(format!("{name}_snapshot{k}.csv"));
        files.push((path.clone(), p.table(&tensor)?.to_csv()));
        snapshot_paths.push(path);
    }
    let series_path = dir.join(format!("{name}_series.csv"));
    files.push((series_path.clone(), series_table(sim).to_csv()));
    let audit_path = if cfg.case == Case::Shock {
        let p = dir.join(format!("{name}_rh_audit.csv"));
        files.push((
            p.clone(),
            audit_table(&sim.discontinuities, cfg.modes()).to_csv(),
        ));
        Some(p)
    } else {
        None
    };

    let mut report = String::new();
    report.push_str(&format!("schema={SCHEMA_VERSION}\n"));
    for (k, d) in sim.mass_drift.iter().enumerate() {
        report.push_str(&format!("mass_drift_{k}={}\n", format_g17(*d)));
    }
    let (e0, e1) = (
        sim.series[0].entropy,
        sim.series.last().expect("nonempty").entropy,
    );
    report.push_str(&format!("entropy_initial={}\n", format_g17(e0)));
    report.push_str(&format!("entropy_final={}\n", format_g17(e1)));
    if cfg.case == Case::Shock {
        report.push_str(&format!("discontinuities={}\n", sim.discontinuities.len()));
        report.push_str(&format!("plateaus={}\n", sim.plateaus.len()));
        for (i, p) in sim.plateaus.iter().enumerate() {
            report.push_str(&format!(
                "plateau_{i}={},{},{}\n",
                format_g17(p.x_start),
                format_g17(p.x_end),
                format_g17(p.value)
            ));
        }
    }
    let report_path = dir.join(format!("{name}_report.txt"));
    files.push((report_path.clone(), report));

    let plot_path = dir.join(format!("{name}.gp"));
    let snaps: Vec<(String, f64)> = snapshot_paths
        .iter()
        .zip(&sim.profiles)
        .map(|(p, pr)| {
            (
                p.file_name().expect("file").to_string_lossy().into_owned(),
                pr.time,
            )
        })
        .collect();
    files.push((plot_path.clone(), gnuplot_script(name, &snaps, None)));

    let mut meta = format!("schema={SCHEMA_VERSION}\n");
    for (k, v) in cfg.to_key_values() {
        meta.push_str(&format!("config.{k}={v}\n"));
    }
    let (steps, dt) = cfg.time_grid();
    meta.push_str(&format!(
        "derived.steps={steps}\nderived.dt={}\n",
        format_g17(dt)
    ));
    meta.push_str(&format!(
        "derived.time_method={}\n",
        cfg.effective_time_method()
    ));
    for (k, p) in sim.profiles.iter().enumerate() {
        meta.push_str(&format!("snapshot{k}.t={}\n", format_g17(p.time)));
    }
    for (path, body) in &files {
        let file = path.file_name().expect("file").to_string_lossy();
        meta.push_str(&format!(
            "sha256.{file}={}\n",
            content_hash(body.as_bytes())
        ));
    }
    for (path, body) in &files {
        write_atomic(path, body.as_bytes())?;
    }
    let metadata_path = dir.join(format!("{name}.meta"));
    write_atomic(&metadata_path, meta.as_bytes())?;

    Ok(RunReport {
        snapshot_times: sim.profiles.iter().map(|p| p.time).collect(),
        snapshot_paths,
        series_path,
        audit_path,
        report_path,
        metadata_path,
        plot_path,
        mass_drift: sim.mass_drift.clone(),
        entropy_series: sim.series.iter().map(|r| (r.time, r.entropy)).collect(),
        wall_time: sim.wall_time,
        discontinuities: sim.discontinuities.clone(),
        plateaus: sim.plateaus.clone(),
    })
}

/// Simulates and writes all outputs.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let sim = simulate(cfg)?;
    write_outputs(&sim)
}
