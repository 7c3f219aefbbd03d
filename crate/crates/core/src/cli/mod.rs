//! Config-driven runs: parse a TOML [`RunConfig`], [`execute`] it into a
//! [`ResultBundle`], then [`emit`] the bundle as CSV files or a text report.
//!
//! Output is a pure function of the config (seed included), so two runs of the
//! same config produce byte-identical files.

mod config;
mod output;

pub use config::{
    config_hash, parse_config, Command, ConfigError, ConfigErrors, CrystalParams, FieldParams, MonteCarloParams,
    NoiseParams, OutputFormat, PlanParams, ProbeChoice, ProtocolParams, RunConfig, ScenarioName, ScenarioParams,
    TrapParams, ZeemanParams,
};
pub use output::{emit, render_csv, render_text};

use std::f64::consts::PI;

use crate::crystal::{equilibrium_positions, TrapConfig};
use crate::error::Error;
use crate::estimation::{parity_estimate, simulate_shots, ExperimentPlan, NoiseModel, ShotModel};
use crate::foundation::{constants, Vec3};
use crate::magnetostatics::{
    compensation_gradient, differential_field, total_bz, DipoleSource, SpinState, UniformGradient,
};
use crate::protocol::{
    biased_parity, evolve, parity_trajectory, phase_rate, time_to_pi, transfer_and_prepare, ProbeLayout, ZeemanConfig,
};
use crate::rng::derive_seed;
use crate::scenarios::{self, quoted, IonRole, ScenarioConfig, ScenarioKind, ScenarioReport, ValueMode};

/// A failed run, tagged with the stage that failed.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct RunError {
    pub stage: &'static str,
    #[source]
    pub source: Error,
}

impl RunError {
    /// 1 for configuration problems, 2 for failures while computing.
    pub fn exit_code(&self) -> i32 {
        match self.source {
            Error::Config { .. } => 1,
            _ => 2,
        }
    }
}

fn at(stage: &'static str) -> impl Fn(Error) -> RunError {
    move |source| RunError { stage, source }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub version: &'static str,
    pub command: Command,
    pub seed: u64,
    pub mode: ValueMode,
    /// See [`RunConfig::hash`].
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultBundle {
    pub provenance: Provenance,
    /// Normalized TOML of the effective config.
    pub config_echo: String,
    pub tables: Vec<Table>,
    pub annotations: Vec<String>,
}

impl ResultBundle {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

struct Quantities(Table);

impl Quantities {
    fn new() -> Self {
        Self(Table::new("quantities", &["name", "value", "unit", "source"]))
    }

    fn push(&mut self, name: &str, value: f64, unit: &str, source: &str) {
        self.0.rows.push(vec![
            Cell::Text(name.into()),
            Cell::Real(value),
            Cell::Text(unit.into()),
            Cell::Text(source.into()),
        ]);
    }
}

fn field_table(name: impl Into<String>, rows: impl IntoIterator<Item = (usize, f64, f64)>) -> Table {
    let mut t = Table::new(name, &["ion_index", "z_m", "Bz_T"]);
    t.rows = rows
        .into_iter()
        .map(|(i, z, b)| vec![Cell::Int(i as i64), Cell::Real(z), Cell::Real(b)])
        .collect();
    t
}

fn trajectory_table(name: impl Into<String>, records: &[crate::protocol::ParityRecord]) -> Table {
    let mut t = Table::new(name, &["time_s", "phase_rad", "parity"]);
    t.rows = records
        .iter()
        .map(|r| vec![Cell::Real(r.time), Cell::Real(r.phase), Cell::Real(r.parity)])
        .collect();
    t
}

fn mode_of(config: &RunConfig) -> ValueMode {
    if config.paper_values {
        ValueMode::Paper
    } else {
        ValueMode::Computed
    }
}

fn trap_of(config: &RunConfig) -> Result<TrapConfig, RunError> {
    let t = &config.trap;
    let c = constants();
    TrapConfig::new(
        2.0 * PI * t.axial_frequency_hz,
        t.ion_mass_amu * c.atomic_mass_unit,
        t.ion_charge_e * c.elementary_charge,
    )
    .map_err(at("crystal"))
}

fn zeeman_of(config: &RunConfig) -> Result<ZeemanConfig, RunError> {
    ZeemanConfig::new(config.zeeman.g_factor).map_err(at("protocol"))
}

fn noise_of(config: &RunConfig) -> NoiseModel {
    NoiseModel {
        common_mode_rms: config.noise.common_mode_rms_t,
        gradient_rms: config.noise.gradient_rms_t_per_m,
        contrast: config.noise.contrast,
    }
}

fn plan_of(config: &RunConfig, default_time: f64) -> ExperimentPlan {
    let p = &config.plan;
    ExperimentPlan {
        shots: p.shots,
        interaction_time: p.interaction_time_s.unwrap_or(default_time),
        bias_phase: p.bias_phase_rad,
        rng_seed: config.seed,
        shot_overhead: p.shot_overhead_s,
    }
}

/// Runs the configured command. Validation errors surface as exit code 1.
pub fn execute(config: &RunConfig) -> Result<ResultBundle, RunError> {
    config.validate().map_err(|e| RunError {
        stage: "config",
        source: Error::config("config", e.to_string()),
    })?;
    let mut annotations = Vec::new();
    let tables = match config.command {
        Command::Crystal => run_crystal(config, &mut annotations)?,
        Command::Field => run_field(config, &mut annotations)?,
        Command::Protocol => run_protocol(config, &mut annotations)?,
        Command::Montecarlo => run_montecarlo(config, &mut annotations)?,
        Command::Scenario => run_scenario(config, &mut annotations)?,
    };
    let config_echo = config.echo();
    Ok(ResultBundle {
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION"),
            command: config.command,
            seed: config.seed,
            mode: mode_of(config),
            config_hash: config_hash(&config_echo),
        },
        config_echo,
        tables,
        annotations,
    })
}

fn run_crystal(config: &RunConfig, notes: &mut Vec<String>) -> Result<Vec<Table>, RunError> {
    let n = config.crystal.clone().unwrap_or_default().n_ions;
    let geometry = equilibrium_positions(n, &trap_of(config)?).map_err(at("crystal"))?;
    let mut positions = Table::new("positions", &["ion_index", "z_m", "u"]);
    for (i, (z, u)) in geometry.positions.iter().zip(&geometry.dimensionless).enumerate() {
        positions
            .rows
            .push(vec![Cell::Int(i as i64), Cell::Real(*z), Cell::Real(*u)]);
    }
    let mut q = Quantities::new();
    q.push("length_scale", geometry.length_scale, "m", "computed");
    q.push("force_residual", geometry.residual, "1", "computed");
    for (i, s) in geometry.adjacent_spacings().iter().enumerate() {
        q.push(&format!("spacing_{}_{}", i, i + 1), *s, "m", "computed");
    }
    if n == 3 {
        notes.push(format!(
            "quoted three-ion spacings: {:e} m at 10 MHz, {:e} m at 5 MHz",
            quoted::D12_10MHZ,
            quoted::D12_5MHZ
        ));
    }
    Ok(vec![positions, q.0])
}

fn run_field(config: &RunConfig, notes: &mut Vec<String>) -> Result<Vec<Table>, RunError> {
    let f = config.field.clone().unwrap_or_default();
    let geometry = equilibrium_positions(f.n_ions, &trap_of(config)?).map_err(at("crystal"))?;
    let point = |i: usize| geometry.point(i).map_err(at("crystal"));
    let target = DipoleSource::new(point(f.target_index)?, Vec3::new(0.0, 0.0, f.target_moment_j_per_t))
        .map_err(at("magnetostatics"))?;
    let mut rows = Vec::new();
    for i in (0..f.n_ions).filter(|&i| i != f.target_index) {
        let p = point(i)?;
        rows.push((
            i,
            p.z,
            total_bz(&[target], &UniformGradient::NONE, p).map_err(at("magnetostatics"))?,
        ));
    }
    let (p1, p2) = (point(f.probe_pair[0])?, point(f.probe_pair[1])?);
    let delta_b = differential_field(&target, p1, p2).map_err(at("magnetostatics"))?;
    let gradient = compensation_gradient(&target, p1, p2).map_err(at("magnetostatics"))?;
    let mut q = Quantities::new();
    q.push("delta_b", delta_b, "T", "computed");
    q.push("compensation_gradient", gradient.dbz_dz, "T/m", "computed");
    q.push("pair_spacing", (p2.z - p1.z).abs(), "m", "computed");
    if f.n_ions == 3 && f.target_index == 2 {
        q.push("b_near_quoted", quoted::B_NEAR, "T", "quoted");
        q.push("b_far_quoted", quoted::B_FAR, "T", "quoted");
        q.push("delta_b_quoted", quoted::DELTA_B, "T", "quoted");
        notes.push(format!(
            "quoted fields for this geometry: near {:e} T, far {:e} T, difference {:e} T",
            quoted::B_NEAR,
            quoted::B_FAR,
            quoted::DELTA_B
        ));
    }
    Ok(vec![field_table("fields", rows), q.0])
}

/// Probe layout and per-ion fields for the protocol and Monte Carlo commands.
///
/// Bell: ions 0 and 1 of a three-ion crystal. GHZ: the four outer ions of a
/// five-ion crystal, mirrored pattern. Unless given, fields come from a spin-up
/// electron on the remaining ion (or the quoted values in paper mode).
fn probe_setup(
    config: &RunConfig,
    probe: ProbeChoice,
    fields: Option<&Vec<f64>>,
) -> Result<(ProbeLayout, Vec<f64>, &'static str), RunError> {
    let trap = trap_of(config)?;
    let (n, probes, target) = match probe {
        ProbeChoice::Bell => (3, vec![0, 1], 2),
        ProbeChoice::Ghz => (5, vec![0, 1, 3, 4], 2),
    };
    let geometry = equilibrium_positions(n, &trap).map_err(at("crystal"))?;
    let pos: Vec<Vec3> = probes
        .iter()
        .map(|&i| geometry.point(i))
        .collect::<Result<_, _>>()
        .map_err(at("crystal"))?;
    let layout = match probe {
        ProbeChoice::Bell => ProbeLayout::bell(pos[0], pos[1]),
        ProbeChoice::Ghz => ProbeLayout::ghz_mirrored(pos.clone()).map_err(at("protocol"))?,
    };
    if let Some(f) = fields {
        return Ok((layout, f.clone(), "configured"));
    }
    let near = quoted::B_FAR + quoted::DELTA_B;
    match (config.paper_values, probe) {
        (true, ProbeChoice::Bell) => Ok((layout, vec![quoted::B_FAR, near], "paper-value")),
        (true, ProbeChoice::Ghz) => Ok((layout, vec![quoted::B_FAR, near, near, quoted::B_FAR], "paper-value")),
        (false, _) => {
            let x = DipoleSource::electron_spin(geometry.point(target).map_err(at("crystal"))?, SpinState::Up)
                .map_err(at("magnetostatics"))?;
            let f = pos
                .iter()
                .map(|p| total_bz(&[x], &UniformGradient::NONE, *p))
                .collect::<Result<_, _>>()
                .map_err(at("magnetostatics"))?;
            Ok((layout, f, "computed"))
        }
    }
}

fn run_protocol(config: &RunConfig, notes: &mut Vec<String>) -> Result<Vec<Table>, RunError> {
    let p = config.protocol.clone().unwrap_or_default();
    let zeeman = zeeman_of(config)?;
    let (layout, fields, source) = probe_setup(config, p.probe, p.fields_t.as_ref())?;
    let positions: Vec<f64> = layout.ion_positions().iter().map(|v| v.z).collect();
    let probe = transfer_and_prepare(layout, p.fidelity).map_err(at("protocol"))?;
    let rate = phase_rate(&probe, &zeeman, &fields).map_err(at("protocol"))?;
    let t_pi = time_to_pi(rate);
    let plan = plan_of(config, quoted::T_ZERO_CROSSING);
    let duration = p.duration_s.or(t_pi).unwrap_or(plan.interaction_time.max(1.0));
    let last = (p.points - 1) as f64;
    let times: Vec<f64> = (0..p.points).map(|i| duration * i as f64 / last).collect();
    let records = parity_trajectory(&probe, &zeeman, &fields, &times).map_err(at("protocol"))?;
    let at_t = evolve(&probe, &zeeman, &fields, plan.interaction_time).map_err(at("protocol"))?;

    let mut q = Quantities::new();
    q.push("phase_rate", rate, "rad/s", "computed");
    match t_pi {
        Some(t) => q.push("t_pi", t, "s", "computed"),
        None => notes.push("phase rate is zero; the parity never leaves its initial value".into()),
    }
    q.push("contrast", probe.contrast, "1", "computed");
    q.push("phase_at_t", at_t.phase, "rad", "computed");
    q.push(
        "parity_at_t_biased",
        biased_parity(&at_t, plan.bias_phase),
        "1",
        "computed",
    );
    notes.push(format!("probe fields: {source}"));
    let fields_table = field_table(
        "fields",
        positions.iter().zip(&fields).enumerate().map(|(i, (z, b))| (i, *z, *b)),
    );
    Ok(vec![fields_table, trajectory_table("trajectory", &records), q.0])
}

fn run_montecarlo(config: &RunConfig, notes: &mut Vec<String>) -> Result<Vec<Table>, RunError> {
    let m = config.montecarlo.clone().unwrap_or_default();
    let zeeman = zeeman_of(config)?;
    let noise = noise_of(config);
    let (layout, fields, source) = probe_setup(config, m.probe, m.fields_t.as_ref())?;
    let probe = transfer_and_prepare(layout, m.fidelity).map_err(at("protocol"))?;
    let model = ShotModel::new(probe, zeeman, fields).map_err(at("estimation"))?;
    let plan = plan_of(config, quoted::T_ZERO_CROSSING);

    let mut shots = Table::new(
        "shots",
        &["shot", "phase_rad", "expected_parity", "outcome_bits", "parity"],
    );
    let mut trials = Table::new("trials", &["trial", "parity_estimate", "std_error", "true_parity"]);
    let (mut sum, mut sum_sq, mut sum_err) = (0.0, 0.0, 0.0);
    for trial in 0..m.trials {
        let outcomes = simulate_shots(&plan.with_seed(derive_seed(config.seed, trial)), &model, &noise)
            .map_err(at("estimation"))?;
        if trial == 0 {
            for r in &outcomes {
                shots.rows.push(vec![
                    Cell::Int(r.index as i64),
                    Cell::Real(r.phase),
                    Cell::Real(r.expected_parity),
                    Cell::Int(r.bits as i64),
                    Cell::Int(r.parity as i64),
                ]);
            }
        }
        let est = parity_estimate(&outcomes).map_err(at("estimation"))?;
        sum += est.parity_estimate;
        sum_sq += est.parity_estimate * est.parity_estimate;
        sum_err += est.std_error;
        trials.rows.push(vec![
            Cell::Int(trial as i64),
            Cell::Real(est.parity_estimate),
            Cell::Real(est.std_error),
            Cell::Real(est.true_parity),
        ]);
    }
    let n = m.trials as f64;
    let mean = sum / n;
    let mut q = Quantities::new();
    q.push(
        "noiseless_parity",
        model.noiseless_parity(&plan, &noise).map_err(at("estimation"))?,
        "1",
        "computed",
    );
    q.push("mean_parity_estimate", mean, "1", "computed");
    q.push("mean_std_error", sum_err / n, "1", "computed");
    if m.trials > 1 {
        q.push(
            "empirical_std",
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0).sqrt(),
            "1",
            "computed",
        );
    }
    q.push("measurement_time_per_trial", plan.measurement_time(), "s", "computed");
    notes.push(format!("probe fields: {source}"));
    Ok(vec![shots, trials, q.0])
}

fn scenario_kind(p: &ScenarioParams) -> ScenarioKind {
    match p.kind {
        ScenarioName::ThreeIonSpin => {
            let ScenarioKind::ThreeIonSpin { x_moment, compensation } = ScenarioKind::three_ion_spin() else {
                unreachable!()
            };
            ScenarioKind::ThreeIonSpin {
                x_moment: p.x_moment_j_per_t.unwrap_or(x_moment),
                compensation: p.compensation.unwrap_or(compensation),
            }
        }
        ScenarioName::MolecularStateChange => {
            let ScenarioKind::MolecularStateChange {
                moment_before,
                moment_after,
            } = ScenarioKind::molecular_state_change()
            else {
                unreachable!()
            };
            ScenarioKind::MolecularStateChange {
                moment_before: p.moment_before_j_per_t.unwrap_or(moment_before),
                moment_after: p.moment_after_j_per_t.unwrap_or(moment_after),
            }
        }
        ScenarioName::DoubleWell => {
            let ScenarioKind::DoubleWell {
                well_separation,
                probe_spacing,
                atoms_left,
                atoms_right,
                atom_moment,
            } = ScenarioKind::double_well()
            else {
                unreachable!()
            };
            ScenarioKind::DoubleWell {
                well_separation: p.well_separation_m.unwrap_or(well_separation),
                probe_spacing: p.probe_spacing_m.unwrap_or(probe_spacing),
                atoms_left: p.atoms_left.unwrap_or(atoms_left),
                atoms_right: p.atoms_right.unwrap_or(atoms_right),
                atom_moment: p.atom_moment_j_per_t.unwrap_or(atom_moment),
            }
        }
        ScenarioName::GhzChain => {
            let ScenarioKind::GhzChain { x_moment, probe_ions } = ScenarioKind::ghz_chain() else {
                unreachable!()
            };
            ScenarioKind::GhzChain {
                x_moment: p.x_moment_j_per_t.unwrap_or(x_moment),
                probe_ions: p.probe_ions.unwrap_or(probe_ions),
            }
        }
    }
}

/// Maps a run config onto the scenario layer.
pub fn scenario_config(config: &RunConfig) -> Result<ScenarioConfig, RunError> {
    let p = config
        .scenario
        .as_ref()
        .ok_or_else(|| at("config")(Error::config("scenario", "missing [scenario] section")))?;
    let mut sc = ScenarioConfig::new(scenario_kind(p)).with_mode(mode_of(config));
    sc.trap = trap_of(config)?;
    sc.zeeman = zeeman_of(config)?;
    sc.noise = noise_of(config);
    sc.plan = plan_of(config, sc.plan.interaction_time);
    sc.fidelity = p.fidelity;
    sc.target_snr = p.target_snr;
    sc.trajectory_points = p.trajectory_points;
    Ok(sc)
}

/// Flattens a scenario report into tables.
pub fn report_tables(report: &ScenarioReport) -> Vec<Table> {
    let mut geometry = Table::new("geometry", &["ion_index", "z_m", "role"]);
    for (i, (z, role)) in report.geometry.iter().enumerate() {
        let role = match role {
            IonRole::Probe => "probe",
            IonRole::Target => "target",
        };
        geometry
            .rows
            .push(vec![Cell::Int(i as i64), Cell::Real(*z), Cell::Text(role.into())]);
    }
    let mut tables = vec![geometry];
    for f in &report.field_tables {
        tables.push(field_table(
            format!("fields_{}", f.name),
            f.rows.iter().map(|r| (r.ion_index, r.z, r.bz)),
        ));
    }
    for t in &report.trajectories {
        tables.push(trajectory_table(format!("trajectory_{}", t.name), &t.records));
    }
    let mut q = Quantities::new();
    for x in &report.quantities {
        q.push(&x.name, x.value, x.unit, x.source.label());
    }
    tables.push(q.0);
    tables
}

fn run_scenario(config: &RunConfig, notes: &mut Vec<String>) -> Result<Vec<Table>, RunError> {
    let report = scenarios::run(&scenario_config(config)?).map_err(at("scenario"))?;
    notes.extend(report.annotations.iter().cloned());
    Ok(report_tables(&report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_command_executes_with_defaults() {
        for command in [Command::Crystal, Command::Field, Command::Protocol, Command::Montecarlo] {
            let bundle = execute(&RunConfig::new(command)).unwrap();
            assert!(bundle.table("quantities").is_some(), "{command:?}");
        }
        let mut c = RunConfig::new(Command::Scenario);
        c.scenario = Some(ScenarioParams::new(ScenarioName::ThreeIonSpin));
        let bundle = execute(&c).unwrap();
        assert!(bundle.table("fields_spin_up").is_some() || bundle.tables.len() > 2);
    }

    #[test]
    fn invalid_config_maps_to_exit_code_one() {
        let mut c = RunConfig::new(Command::Crystal);
        c.trap.axial_frequency_hz = -1.0;
        assert_eq!(execute(&c).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn hash_matches_echo() {
        let b = execute(&RunConfig::new(Command::Crystal)).unwrap();
        assert_eq!(b.provenance.config_hash, config_hash(&b.config_echo));
    }
}
