//! Turns a validated config into physics runs and output files.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use triad_core::constants::{self, angular, ordinary};
use triad_core::dynamics::RunMetadata;
use triad_core::hilbert::{coherent_state, product_state};
use triad_core::{
    analytic_entanglement, analytic_populations, build_hamiltonian, build_operators, coupling_strengths, entanglement_reports, evolve_with, phi_yig,
    populations, BasisLabel, CircuitParams, CollapseRevivalParams, CouplingSet, DeviceGeometry, EvolveOptions, FluxResult, Frame, HamiltonianKind,
    LindbladModel, SpaceSpec, State, TimeGrid,
};

use crate::config::{
    asq_amplitudes, asq_index, frame_of, kind_of, scq_amplitudes, scq_index, AnalyticTruncation, CircuitConfig, Config, GeometryConfig,
    HamiltonianConfig, InitialConfig, KindName, MagnonState, TimeConfig, TimeUnit,
};
use crate::error::{CliError, CliResult};
use crate::output::{write_json_file, Cell, Format, Table};

/// Entanglement reports are computed in batches of this many samples so mixed
/// trajectories never hold every density matrix at once.
pub const ENTANGLEMENT_BATCH: usize = 64;

#[derive(Debug, Clone)]
pub struct RunContext {
    pub out_dir: PathBuf,
    pub format: Format,
    pub command: String,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

/// Couplings and the circuit/flux data they came from.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedCouplings {
    pub couplings: CouplingSet,
    pub circuit: Option<CircuitParams>,
    pub geometry: Option<DeviceGeometry>,
    pub flux: Option<FluxResult>,
    pub warnings: Vec<String>,
}

pub fn resolve_flux(geometry: &Option<GeometryConfig>) -> CliResult<(DeviceGeometry, FluxResult)> {
    let geom = geometry.clone().unwrap_or_default().resolve();
    geom.validate().map_err(|e| CliError::from_core("geometry", e))?;
    let flux = phi_yig(&geom).map_err(|e| CliError::from_core("geometry", e))?;
    Ok((geom, flux))
}

pub fn couplings_from_circuit(circuit: &CircuitConfig, phi: f64) -> CliResult<(CircuitParams, CouplingSet, Vec<String>)> {
    let params = circuit.resolve()?;
    let warnings = params.validate().map_err(|e| CliError::from_core("circuit", e))?;
    let c = coupling_strengths(&params, phi).map_err(|e| CliError::from_core("circuit", e))?;
    Ok((params, c, warnings))
}

/// Resolves couplings from `[couplings]` or from `[circuit]` + `[geometry]`, then
/// applies the `[hamiltonian]` overrides.
pub fn resolve_couplings(cfg: &Config) -> CliResult<ResolvedCouplings> {
    let mut r = if let Some(direct) = &cfg.couplings {
        ResolvedCouplings { couplings: direct.resolve(), circuit: None, geometry: None, flux: None, warnings: Vec::new() }
    } else {
        let (geom, flux) = resolve_flux(&cfg.geometry)?;
        let (params, c, mut warnings) = couplings_from_circuit(&cfg.circuit.clone().unwrap_or_default(), flux.phi)?;
        warnings.extend(flux.warnings.iter().cloned());
        ResolvedCouplings { couplings: c, circuit: Some(params), geometry: Some(geom), flux: Some(flux), warnings }
    };
    if let Some(h) = &cfg.hamiltonian {
        if let Some(g) = h.g_mhz {
            r.couplings.g = angular(g * 1e6);
        }
        if let Some(j) = h.j_mhz {
            r.couplings.j = angular(j * 1e6);
        }
    }
    if !r.couplings.is_finite() {
        return Err(CliError::Config("resolved couplings are not finite".into()));
    }
    Ok(r)
}

pub fn couplings_table(c: &CouplingSet) -> Table {
    let mut t = Table::new(["quantity", "rad_per_s", "mhz"]);
    for (name, v) in coupling_entries(c) {
        t.push(vec![name.into(), v.into(), (ordinary(v) / 1e6).into()]);
    }
    t
}

pub fn coupling_entries(c: &CouplingSet) -> [(&'static str, f64); 10] {
    [
        ("omega_m", c.omega_m),
        ("omega_a", c.omega_a),
        ("omega_s", c.omega_s),
        ("g", c.g),
        ("j", c.j),
        ("g1", c.g1),
        ("g2", c.g2),
        ("g2_bar", c.g2_bar),
        ("g3", c.g3),
        ("g3_bar", c.g3_bar),
    ]
}

fn couplings_mhz(c: &CouplingSet) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> =
        coupling_entries(c).iter().map(|(k, v)| (format!("{k}_mhz"), serde_json::json!(ordinary(*v) / 1e6))).collect();
    serde_json::Value::Object(map)
}

pub fn flux_table(geom: &DeviceGeometry, flux: &FluxResult) -> Table {
    let mut t = Table::new(["radius_um", "half_side_um", "offset_um", "spin_density_m3", "phi_yig_wb", "error_wb", "flux_ratio", "evaluations"]);
    t.push(vec![
        (geom.radius * 1e6).into(),
        (geom.half_side * 1e6).into(),
        (geom.offset * 1e6).into(),
        geom.spin_density.into(),
        flux.phi.into(),
        flux.error.into(),
        flux.flux_ratio().into(),
        flux.evaluations.into(),
    ]);
    t
}

/// Everything needed to integrate one Hamiltonian.
pub struct Setup {
    pub spec: SpaceSpec,
    pub kind: HamiltonianKind,
    pub frame: Frame,
    pub model: LindbladModel,
    pub warnings: Vec<String>,
}

pub fn build_setup(
    cfg: &Config,
    couplings: &CouplingSet,
    kind: KindName,
    frame: Option<crate::config::FrameName>,
    scale: f64,
    section: &str,
) -> CliResult<Setup> {
    let h = hamiltonian_section(cfg)?;
    let spec = SpaceSpec::new(h.fock_cutoff).map_err(|e| CliError::config("hamiltonian.fock_cutoff", e))?;
    let frame = frame_of(kind, frame);
    let kind = kind_of(kind, h.squeeze.as_ref());
    let c = if scale == 1.0 { *couplings } else { couplings.with_frequencies_scaled_down(scale) };
    let ham = build_hamiltonian(kind, &c, spec, frame).map_err(|e| CliError::from_core(section, e))?;
    let rates = cfg.dissipation.resolve();
    let model = if rates.is_zero() {
        LindbladModel::closed(ham.matrix)
    } else {
        let ops = build_operators(spec).map_err(|e| CliError::from_core(section, e))?;
        LindbladModel::with_rates(ham.matrix, &ops, &rates, cfg.dissipation.dephasing).map_err(|e| CliError::from_core("dissipation", e))?
    };
    let warnings = ham.warnings.iter().map(|w| format!("{section}: {w}")).collect();
    Ok(Setup { spec, kind, frame, model, warnings })
}

fn hamiltonian_section(cfg: &Config) -> CliResult<&HamiltonianConfig> {
    cfg.hamiltonian.as_ref().ok_or_else(|| CliError::config("hamiltonian", "section required for this command"))
}

fn initial_section(cfg: &Config) -> CliResult<&InitialConfig> {
    cfg.initial.as_ref().ok_or_else(|| CliError::config("initial", "section required for this command"))
}

fn time_section(cfg: &Config) -> CliResult<&TimeConfig> {
    cfg.time.as_ref().ok_or_else(|| CliError::config("time", "section required for this command"))
}

pub fn initial_state(init: &InitialConfig, spec: SpaceSpec) -> CliResult<State> {
    let asq = asq_amplitudes(init.asq).map_err(|m| CliError::config("initial.asq", m))?;
    let scq = scq_amplitudes(init.scq).map_err(|m| CliError::config("initial.scq", m))?;
    let magnon = match init.magnon {
        MagnonState::Coherent => coherent_state(initial_alpha(init), spec),
        MagnonState::Fock => {
            let n = init.fock_n.unwrap_or(0);
            if n >= spec.fock_cutoff {
                return Err(CliError::config("initial.fock_n", format!("{n} is outside the cutoff {}", spec.fock_cutoff)));
            }
            let mut v = triad_core::CVector::zeros(spec.fock_cutoff);
            v[n] = Complex64::new(1.0, 0.0);
            v
        }
    };
    let psi = product_state(&magnon, asq, scq).map_err(|e| CliError::from_core("initial", e))?;
    Ok(State::Pure(psi))
}

pub fn initial_alpha(init: &InitialConfig) -> Complex64 {
    Complex64::new(init.alpha_re.unwrap_or(0.0), init.alpha_im.unwrap_or(0.0))
}

/// Rate that sets the dimensionless time axis: J for the switch, G otherwise.
pub fn time_scale(kind: KindName, c: &CouplingSet) -> f64 {
    match kind {
        KindName::EffSwitch => c.j.abs(),
        _ => c.g.abs(),
    }
}

/// Sample times in seconds, and the rate used for the `Gt` column.
pub fn time_grid(cfg: &Config, c: &CouplingSet) -> CliResult<(TimeGrid, f64)> {
    let t = time_section(cfg)?;
    let kind = hamiltonian_section(cfg)?.kind;
    let rate = time_scale(kind, c);
    let t_end = match t.unit {
        TimeUnit::Us => t.end * 1e-6,
        TimeUnit::Gt => {
            if !(rate > 0.0) {
                let which = if kind == KindName::EffSwitch { "J" } else { "G" };
                return Err(CliError::config("time.unit", format!("{which} is zero, so a Gt time axis is undefined; use unit = \"us\"")));
            }
            t.end / rate
        }
    };
    let grid = TimeGrid::uniform(t_end, t.samples).map_err(|e| CliError::config("time", e))?;
    Ok((grid, rate))
}

fn basis_labels(cfg: &Config) -> CliResult<Vec<BasisLabel>> {
    cfg.outputs
        .basis
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let a = asq_index(b.asq).map_err(|m| CliError::config(format!("outputs.basis[{k}].asq"), m))?;
            let s = scq_index(b.scq).map_err(|m| CliError::config(format!("outputs.basis[{k}].scq"), m))?;
            Ok(BasisLabel::new(b.n, a, s))
        })
        .collect()
}

pub fn population_columns(basis: &[BasisLabel]) -> Vec<String> {
    let mut cols: Vec<String> = ["t_us", "Gt", "P_up", "P_e", "n_mag"].iter().map(|s| s.to_string()).collect();
    cols.extend(basis.iter().map(BasisLabel::column));
    cols
}

pub const ENTANGLEMENT_COLUMNS: [&str; 17] = [
    "t_us",
    "Gt",
    "E_M_AS",
    "E_A_MS",
    "E_S_MA",
    "E_M_A",
    "E_M_S",
    "E_A_S",
    "R_M_AS",
    "R_A_MS",
    "R_S_MA",
    "R_min",
    "C_A_S",
    "S_two_qubit",
    "S_M_AS",
    "S_A_MS",
    "S_S_MA",
];

pub const ANALYTIC_COLUMNS: [&str; 10] = ["t_us", "Gt", "X", "Y", "delta", "P_up", "P_e", "S_M_AS", "S_A_MS", "C_A_S"];

/// Output of one integration.
pub struct RunTables {
    pub populations: Table,
    pub entanglement: Option<Table>,
    pub metadata: RunMetadata,
}

/// Integrates `setup` and tabulates the requested observables, streaming states
/// through the observer.
pub fn integrate(
    setup: &Setup,
    state0: &State,
    grid: &TimeGrid,
    rate: f64,
    basis: &[BasisLabel],
    opts: &EvolveOptions,
    want_entanglement: bool,
) -> CliResult<RunTables> {
    let spec = setup.spec;
    let mut pops = Table::new(population_columns(basis));
    let mut ent = want_entanglement.then(|| Table::new(ENTANGLEMENT_COLUMNS));
    let mut batch: Vec<(f64, State)> = Vec::new();
    let flush = |batch: &mut Vec<(f64, State)>, table: &mut Table| -> triad_core::Result<()> {
        for r in entanglement_reports(batch, spec) {
            let r = r?;
            table.push(vec![
                (r.t * 1e6).into(),
                (r.t * rate).into(),
                r.e_m_as.into(),
                r.e_a_ms.into(),
                r.e_s_ma.into(),
                r.e_m_a.into(),
                r.e_m_s.into(),
                r.e_a_s.into(),
                r.r_m_as.into(),
                r.r_a_ms.into(),
                r.r_s_ma.into(),
                r.r_min.into(),
                r.c_a_s.into(),
                r.s_two_qubit.into(),
                r.s_m_as.into(),
                r.s_a_ms.into(),
                r.s_s_ma.into(),
            ]);
        }
        batch.clear();
        Ok(())
    };
    let metadata = evolve_with(state0, &setup.model, grid, opts, |_, t, state| {
        let p = populations(t, state, spec, basis)?;
        let mut row: Vec<Cell> = vec![(t * 1e6).into(), (t * rate).into(), p.p_up.into(), p.p_e.into(), p.n_mag.into()];
        row.extend(p.basis.iter().map(|&v| Cell::from(v)));
        pops.push(row);
        if let Some(table) = ent.as_mut() {
            batch.push((t, state.clone()));
            if batch.len() >= ENTANGLEMENT_BATCH {
                flush(&mut batch, table)?;
            }
        }
        Ok(())
    })
    .map_err(|e| CliError::from_core("evolution", e))?;
    if let Some(table) = ent.as_mut() {
        flush(&mut batch, table).map_err(|e| CliError::from_core("entanglement", e))?;
    }
    Ok(RunTables { populations: pops, entanglement: ent, metadata })
}

/// Analytic collapse-revival series on the given dimensionless times.
pub fn analytic_table(cfg: &Config, gts: &[f64], rate: f64) -> CliResult<Table> {
    let init = initial_section(cfg)?;
    let h = hamiltonian_section(cfg)?;
    if h.kind != KindName::EffSum {
        return Err(CliError::config("outputs.analytic", "the closed-form series describes kind = \"eff_sum\" only"));
    }
    if init.magnon != MagnonState::Coherent || init.asq != crate::config::QubitState::Up || init.scq != crate::config::QubitState::G {
        return Err(CliError::config("outputs.analytic", "the closed-form series needs a coherent magnon with asq = \"up\", scq = \"g\""));
    }
    let alpha = initial_alpha(init);
    let params = match cfg.outputs.analytic_truncation {
        AnalyticTruncation::FockMatched => CollapseRevivalParams::fock_matched(alpha, 1.0, h.fock_cutoff),
        AnalyticTruncation::Poisson => CollapseRevivalParams::poisson(alpha, 1.0),
    }
    .map_err(|e| CliError::from_core("outputs.analytic_truncation", e))?;
    let mut t = Table::new(ANALYTIC_COLUMNS);
    for &gt in gts {
        let (up, e) = analytic_populations(gt, &params);
        let a = analytic_entanglement(gt, &params).map_err(|e| CliError::from_core("analytic", e))?;
        let t_us = if rate > 0.0 { Cell::Num(gt / rate * 1e6) } else { Cell::Empty };
        t.push(vec![t_us, gt.into(), a.x.into(), a.y.into(), a.delta.into(), up.into(), e.into(), a.s_m_as.into(), a.s_a_ms.into(), a.c_a_s.into()]);
    }
    Ok(t)
}

/// Joins two population tables column-wise; the second gets a `_ref` suffix.
pub fn overlay_table(main: &Table, reference: &Table) -> (Table, f64) {
    let mut cols = main.columns.clone();
    cols.extend(reference.columns[2..].iter().map(|c| format!("{c}_ref")));
    let mut t = Table::new(cols);
    let mut worst = 0.0f64;
    for (a, b) in main.rows.iter().zip(&reference.rows) {
        for k in [2usize, 3] {
            if let (Some(x), Some(y)) = (a[k].as_f64(), b[k].as_f64()) {
                worst = worst.max((x - y).abs());
            }
        }
        let mut row = a.clone();
        row.extend(b[2..].iter().cloned());
        t.push(row);
    }
    (t, worst)
}

#[derive(Debug, Serialize)]
pub struct Software {
    pub name: &'static str,
    pub version: &'static str,
}

pub const SOFTWARE: Software = Software { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") };

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub software: Software,
    pub command: String,
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub config: Config,
    pub units: &'static str,
    pub couplings_rad_per_s: Option<CouplingSet>,
    pub couplings_mhz: Option<serde_json::Value>,
    pub circuit: Option<CircuitParams>,
    pub geometry: Option<DeviceGeometry>,
    pub flux: Option<FluxResult>,
    pub constants: serde_json::Value,
    pub defaults: serde_json::Value,
    pub hamiltonian: Option<serde_json::Value>,
    pub integrator: Option<EvolveOptions>,
    pub run: Option<RunMetadata>,
    pub overlay: Option<serde_json::Value>,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
}

pub const UNITS: &str =
    "angular frequencies in rad/s unless the key ends in _mhz; lengths in m; flux in Wb; t_us in microseconds; Gt = |G| t (|J| t for eff_switch)";

pub fn constants_json() -> serde_json::Value {
    serde_json::Value::Object(constants::table().into_iter().map(|(k, v)| (k.to_string(), serde_json::json!(v))).collect())
}

/// Library defaults that a run may silently rely on.
pub fn defaults_json() -> serde_json::Value {
    serde_json::json!({
        "circuit": CircuitParams::default(),
        "geometry": DeviceGeometry::default(),
        "evolve_options": EvolveOptions::default(),
        "flux_rel_tol": triad_core::flux::FLUX_REL_TOL,
        "flux_small_phase_warn": triad_core::flux::SMALL_PHASE_WARN,
        "transmon_ratio_error": triad_core::circuit::TRANSMON_RATIO_ERROR,
        "transmon_ratio_warn": triad_core::circuit::TRANSMON_RATIO_WARN,
        "resonance_rel_tol": triad_core::hilbert::RESONANCE_REL_TOL,
        "max_dense_dim": triad_core::hilbert::MAX_DENSE_DIM,
        "eigen_floor": triad_core::entanglement::EIGEN_FLOOR,
        "residual_floor": triad_core::entanglement::RESIDUAL_FLOOR,
        "population_margin": triad_core::dynamics::POPULATION_MARGIN,
        "analytic_poisson_tail": triad_core::analytic::POISSON_TAIL,
        "entanglement_batch": ENTANGLEMENT_BATCH,
        "default_asq_frequency_ghz": 10.0,
    })
}

impl Manifest {
    pub fn new(ctx: &RunContext, cfg: &Config) -> Self {
        Self {
            software: SOFTWARE,
            command: ctx.command.clone(),
            scenario: cfg.name.clone(),
            seed: ctx.seed,
            threads: ctx.threads,
            config: cfg.clone(),
            units: UNITS,
            couplings_rad_per_s: None,
            couplings_mhz: None,
            circuit: None,
            geometry: None,
            flux: None,
            constants: constants_json(),
            defaults: defaults_json(),
            hamiltonian: None,
            integrator: None,
            run: None,
            overlay: None,
            warnings: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn set_couplings(&mut self, r: &ResolvedCouplings) {
        self.couplings_rad_per_s = Some(r.couplings);
        self.couplings_mhz = Some(couplings_mhz(&r.couplings));
        self.circuit = r.circuit.clone();
        self.geometry = r.geometry;
        self.flux = r.flux.clone();
        self.warnings.extend(r.warnings.iter().cloned());
    }

    pub fn add_output(&mut self, path: &Path) {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.outputs.push(name);
    }

    pub fn save(&mut self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join("manifest.json");
        self.outputs.push("manifest.json".into());
        for w in &self.warnings {
            log::warn!("{w}");
        }
        write_json_file(&path, self)?;
        Ok(path)
    }
}

/// Files written by one command, for reporting.
#[derive(Debug, Default)]
pub struct Written {
    pub files: Vec<PathBuf>,
    /// Largest population deviation between the main run and the overlay.
    pub overlay_deviation: Option<f64>,
}

pub fn run_couplings(ctx: &RunContext, cfg: &Config) -> CliResult<Written> {
    let r = resolve_couplings(cfg)?;
    let mut manifest = Manifest::new(ctx, cfg);
    manifest.set_couplings(&r);
    let mut w = Written::default();
    let p = couplings_table(&r.couplings).save(&ctx.out_dir, "couplings", ctx.format)?;
    manifest.add_output(&p);
    w.files.push(p);
    w.files.push(manifest.save(&ctx.out_dir)?);
    Ok(w)
}

pub fn run_flux(ctx: &RunContext, cfg: &Config) -> CliResult<Written> {
    let (geom, flux) = resolve_flux(&cfg.geometry)?;
    let mut manifest = Manifest::new(ctx, cfg);
    manifest.geometry = Some(geom);
    manifest.flux = Some(flux.clone());
    manifest.warnings.extend(flux.warnings.iter().cloned());
    let mut w = Written::default();
    let p = flux_table(&geom, &flux).save(&ctx.out_dir, "flux", ctx.format)?;
    manifest.add_output(&p);
    w.files.push(p);
    w.files.push(manifest.save(&ctx.out_dir)?);
    Ok(w)
}

/// Evolution with the outputs the config requests; `force_entanglement` is set
/// by the `entanglement` subcommand.
pub fn run_evolve(ctx: &RunContext, cfg: &Config, force_entanglement: bool) -> CliResult<Written> {
    let sim = simulate(cfg, force_entanglement)?;
    let mut manifest = Manifest::new(ctx, cfg);
    manifest.set_couplings(&sim.couplings);
    manifest.warnings.extend(sim.warnings.iter().cloned());
    manifest.hamiltonian = Some(sim.hamiltonian.clone());
    manifest.integrator = Some(sim.options);
    manifest.run = Some(sim.tables.metadata.clone());
    let mut w = Written::default();
    let save = |t: &Table, stem: &str, manifest: &mut Manifest, w: &mut Written| -> CliResult<()> {
        let p = t.save(&ctx.out_dir, stem, ctx.format)?;
        manifest.add_output(&p);
        w.files.push(p);
        Ok(())
    };
    if cfg.outputs.populations || sim.tables.entanglement.is_none() {
        save(&sim.tables.populations, "populations", &mut manifest, &mut w)?;
    }
    if let Some(e) = &sim.tables.entanglement {
        save(e, "entanglement", &mut manifest, &mut w)?;
    }
    if let Some(a) = &sim.analytic {
        save(a, "analytic", &mut manifest, &mut w)?;
    }
    if let Some(o) = &sim.overlay {
        manifest.overlay = Some(o.info.clone());
        w.overlay_deviation = Some(o.deviation);
        save(&o.table, "overlay", &mut manifest, &mut w)?;
    }
    w.files.push(manifest.save(&ctx.out_dir)?);
    Ok(w)
}

/// Reference run laid over the main one.
pub struct Overlay {
    pub table: Table,
    /// Largest |ΔP_up| or |ΔP_e| over the grid.
    pub deviation: f64,
    pub info: serde_json::Value,
}

/// Everything an `evolve` run produces, before anything is written.
pub struct Simulation {
    pub couplings: ResolvedCouplings,
    pub hamiltonian: serde_json::Value,
    pub warnings: Vec<String>,
    pub options: EvolveOptions,
    /// Population, entanglement and time columns use this rate for `Gt`.
    pub rate: f64,
    pub tables: RunTables,
    pub analytic: Option<Table>,
    pub overlay: Option<Overlay>,
}

pub fn simulate(cfg: &Config, force_entanglement: bool) -> CliResult<Simulation> {
    let h = hamiltonian_section(cfg)?.clone();
    let init = initial_section(cfg)?;
    let r = resolve_couplings(cfg)?;
    let setup = build_setup(cfg, &r.couplings, h.kind, h.frame, h.frequency_scale, "hamiltonian")?;
    let mut warnings = setup.warnings.clone();
    let hamiltonian = serde_json::json!({
        "kind": setup.kind,
        "frame": setup.frame,
        "dim": setup.spec.dim(),
        "fock_cutoff": setup.spec.fock_cutoff,
        "frequency_scale": h.frequency_scale,
        "dissipative": !setup.model.is_closed(),
    });
    let (grid, rate) = time_grid(cfg, &r.couplings)?;
    let basis = basis_labels(cfg)?;
    let state0 = initial_state(init, setup.spec)?;
    let options = cfg.integrator.resolve();
    let want_ent = force_entanglement || cfg.outputs.entanglement;
    log::info!("evolving {} (dim {}) over {} samples", setup.kind.name(), setup.spec.dim(), grid.len());
    let tables = integrate(&setup, &state0, &grid, rate, &basis, &options, want_ent)?;
    let analytic = if cfg.outputs.analytic {
        let gts: Vec<f64> = grid.times().iter().map(|t| t * rate).collect();
        Some(analytic_table(cfg, &gts, rate)?)
    } else {
        None
    };
    let overlay = match &cfg.overlay {
        Some(o) => {
            let ref_setup = build_setup(cfg, &r.couplings, o.kind, o.frame, o.frequency_scale, "overlay")?;
            warnings.extend(ref_setup.warnings.iter().cloned());
            log::info!("overlay {} (dim {})", ref_setup.kind.name(), ref_setup.spec.dim());
            let ref_tables = integrate(&ref_setup, &state0, &grid, rate, &basis, &options, false)?;
            let (table, deviation) = overlay_table(&tables.populations, &ref_tables.populations);
            let info = serde_json::json!({
                "kind": ref_setup.kind,
                "frame": ref_setup.frame,
                "frequency_scale": o.frequency_scale,
                "run": ref_tables.metadata,
                "max_population_deviation": deviation,
            });
            Some(Overlay { table, deviation, info })
        }
        None => None,
    };
    Ok(Simulation { couplings: r, hamiltonian, warnings, options, rate, tables, analytic, overlay })
}

/// Closed-form series only, on the `[time]` grid in Gt units.
pub fn run_analytic(ctx: &RunContext, cfg: &Config) -> CliResult<Written> {
    let t = time_section(cfg)?;
    let mut manifest = Manifest::new(ctx, cfg);
    let r = resolve_couplings(cfg)?;
    manifest.set_couplings(&r);
    let rate = r.couplings.g.abs();
    let gts: Vec<f64> = match t.unit {
        TimeUnit::Gt => TimeGrid::uniform(t.end, t.samples).map_err(|e| CliError::config("time", e))?.times().to_vec(),
        TimeUnit::Us => time_grid(cfg, &r.couplings)?.0.times().iter().map(|t| t * rate).collect(),
    };
    let mut w = Written::default();
    let p = analytic_table(cfg, &gts, rate)?.save(&ctx.out_dir, "analytic", ctx.format)?;
    manifest.add_output(&p);
    w.files.push(p);
    w.files.push(manifest.save(&ctx.out_dir)?);
    Ok(w)
}

/// Runs whatever the config describes: a sweep, an evolution, or a coupling table.
pub fn run_config(ctx: &RunContext, cfg: &Config) -> CliResult<Written> {
    if cfg.sweep.is_some() {
        crate::sweep::run_sweep(ctx, cfg)
    } else if cfg.hamiltonian.is_some() && cfg.time.is_some() {
        run_evolve(ctx, cfg, false)
    } else {
        run_couplings(ctx, cfg)
    }
}
