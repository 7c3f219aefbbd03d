//! Run configuration files.
//!
//! Configs are TOML. Every key is unit-suffixed and in SI base units except
//! where the suffix says otherwise (`_hz` is converted to rad/s, `_amu` to kg,
//! `_e` to coulombs). Unknown keys, duplicate keys and sections that the
//! selected command does not use are all rejected.
//!
//! ```toml
//! command = "scenario"      # crystal | field | protocol | montecarlo | scenario
//! seed = 7
//! output_format = "csv"     # csv | text
//! output_path = "out"
//! paper_values = false
//!
//! [trap]
//! axial_frequency_hz = 10.0e6
//! ion_mass_amu = 40.0
//!
//! [scenario]
//! kind = "three-ion-spin"
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::foundation::constants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Crystal,
    Field,
    Protocol,
    Montecarlo,
    Scenario,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Crystal => "crystal",
            Command::Field => "field",
            Command::Protocol => "protocol",
            Command::Montecarlo => "montecarlo",
            Command::Scenario => "scenario",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeChoice {
    Bell,
    Ghz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    ThreeIonSpin,
    MolecularStateChange,
    DoubleWell,
    GhzChain,
}

fn default_output_path() -> String {
    "iongradim-out".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_format: OutputFormat,
    #[serde(default = "default_output_path")]
    pub output_path: String,
    #[serde(default)]
    pub paper_values: bool,
    #[serde(default)]
    pub trap: TrapParams,
    #[serde(default)]
    pub zeeman: ZeemanParams,
    #[serde(default)]
    pub noise: NoiseParams,
    #[serde(default)]
    pub plan: PlanParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crystal: Option<CrystalParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub montecarlo: Option<MonteCarloParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapParams {
    pub axial_frequency_hz: f64,
    pub ion_mass_amu: f64,
    pub ion_charge_e: f64,
}

impl Default for TrapParams {
    fn default() -> Self {
        Self {
            axial_frequency_hz: 10e6,
            ion_mass_amu: 40.0,
            ion_charge_e: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZeemanParams {
    pub g_factor: f64,
}

impl Default for ZeemanParams {
    fn default() -> Self {
        Self {
            g_factor: constants().ca40_g_factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseParams {
    pub common_mode_rms_t: f64,
    pub gradient_rms_t_per_m: f64,
    pub contrast: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            common_mode_rms_t: 0.0,
            gradient_rms_t_per_m: 0.0,
            contrast: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlanParams {
    pub shots: u64,
    /// Defaults per command/scenario when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interaction_time_s: Option<f64>,
    pub bias_phase_rad: f64,
    pub shot_overhead_s: f64,
}

impl Default for PlanParams {
    fn default() -> Self {
        Self {
            shots: 10,
            interaction_time_s: None,
            bias_phase_rad: std::f64::consts::FRAC_PI_2,
            shot_overhead_s: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrystalParams {
    pub n_ions: usize,
}

impl Default for CrystalParams {
    fn default() -> Self {
        Self { n_ions: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldParams {
    pub n_ions: usize,
    /// Crystal index of the target spin.
    pub target_index: usize,
    /// Signed moment along z, J/T.
    pub target_moment_j_per_t: f64,
    /// Crystal indices of the probe pair `(ion 1, ion 2)`.
    pub probe_pair: [usize; 2],
}

impl Default for FieldParams {
    fn default() -> Self {
        Self {
            n_ions: 3,
            target_index: 2,
            target_moment_j_per_t: constants().electron_magnetic_moment.abs(),
            probe_pair: [0, 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolParams {
    pub probe: ProbeChoice,
    /// `B_z` at each probe ion; computed from a target electron spin when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fields_t: Option<Vec<f64>>,
    pub fidelity: f64,
    /// Trajectory length; defaults to the time to reach φ = π.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    pub points: usize,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            probe: ProbeChoice::Bell,
            fields_t: None,
            fidelity: 1.0,
            duration_s: None,
            points: 101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarloParams {
    pub probe: ProbeChoice,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fields_t: Option<Vec<f64>>,
    pub fidelity: f64,
    /// Independent repetitions of the whole plan.
    pub trials: u64,
}

impl Default for MonteCarloParams {
    fn default() -> Self {
        Self {
            probe: ProbeChoice::Bell,
            fields_t: None,
            fidelity: 1.0,
            trials: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParams {
    pub kind: ScenarioName,
    #[serde(default = "one")]
    pub fidelity: f64,
    #[serde(default = "two")]
    pub target_snr: f64,
    #[serde(default = "hundred_and_one")]
    pub trajectory_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_moment_j_per_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compensation: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment_before_j_per_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment_after_j_per_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub well_separation_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_spacing_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms_left: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms_right: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom_moment_j_per_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_ions: Option<usize>,
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn hundred_and_one() -> usize {
    101
}

impl ScenarioParams {
    pub fn new(kind: ScenarioName) -> Self {
        Self {
            kind,
            fidelity: 1.0,
            target_snr: 2.0,
            trajectory_points: 101,
            x_moment_j_per_t: None,
            compensation: None,
            moment_before_j_per_t: None,
            moment_after_j_per_t: None,
            well_separation_m: None,
            probe_spacing_m: None,
            atoms_left: None,
            atoms_right: None,
            atom_moment_j_per_t: None,
            probe_ions: None,
        }
    }

    /// Keys that were set but have no meaning for this kind.
    fn foreign_keys(&self) -> Vec<&'static str> {
        let set: [(&'static str, bool); 10] = [
            ("x_moment_j_per_t", self.x_moment_j_per_t.is_some()),
            ("compensation", self.compensation.is_some()),
            ("moment_before_j_per_t", self.moment_before_j_per_t.is_some()),
            ("moment_after_j_per_t", self.moment_after_j_per_t.is_some()),
            ("well_separation_m", self.well_separation_m.is_some()),
            ("probe_spacing_m", self.probe_spacing_m.is_some()),
            ("atoms_left", self.atoms_left.is_some()),
            ("atoms_right", self.atoms_right.is_some()),
            ("atom_moment_j_per_t", self.atom_moment_j_per_t.is_some()),
            ("probe_ions", self.probe_ions.is_some()),
        ];
        let allowed: &[&str] = match self.kind {
            ScenarioName::ThreeIonSpin => &["x_moment_j_per_t", "compensation"],
            ScenarioName::MolecularStateChange => &["moment_before_j_per_t", "moment_after_j_per_t"],
            ScenarioName::DoubleWell => &[
                "well_separation_m",
                "probe_spacing_m",
                "atoms_left",
                "atoms_right",
                "atom_moment_j_per_t",
            ],
            ScenarioName::GhzChain => &["x_moment_j_per_t", "probe_ions"],
        };
        set.iter()
            .filter(|(key, present)| *present && !allowed.contains(key))
            .map(|(key, _)| *key)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    UnknownKey {
        key: String,
    },
    DuplicateKey {
        key: String,
        line: usize,
        column: usize,
    },
    InvalidValue {
        line: usize,
        column: usize,
        message: String,
    },
    OutOfRange {
        field: String,
        reason: String,
    },
    UnusedSection {
        section: String,
        command: String,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax { line, column, message } => write!(f, "syntax error at {line}:{column}: {message}"),
            ConfigError::UnknownKey { key } => write!(f, "unknown key `{key}`"),
            ConfigError::DuplicateKey { key, line, column } => write!(f, "duplicate key `{key}` at {line}:{column}"),
            ConfigError::InvalidValue { line, column, message } => {
                write!(f, "invalid value at {line}:{column}: {message}")
            }
            ConfigError::OutOfRange { field, reason } => write!(f, "{field}: {reason}"),
            ConfigError::UnusedSection { section, command } => {
                write!(f, "section [{section}] is not used by command `{command}`")
            }
        }
    }
}

/// All problems found in one config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

fn backticked(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let end = start + message[start..].find('`')?;
    Some(message[start..end].to_string())
}

fn classify(text: &str, err: toml::de::Error) -> ConfigError {
    let message = err.message().trim().to_string();
    let span = err.span();
    let (line, column) = span.clone().map_or((0, 0), |s| line_column(text, s.start));
    let spanned = span.and_then(|s| text.get(s)).map(|s| s.trim().to_string());
    if message.starts_with("unknown field") {
        ConfigError::UnknownKey {
            key: backticked(&message).unwrap_or(message),
        }
    } else if message.contains("duplicate key") {
        ConfigError::DuplicateKey {
            key: backticked(&message).or(spanned).unwrap_or_default(),
            line,
            column,
        }
    } else if message.starts_with("invalid")
        || message.starts_with("unknown variant")
        || message.starts_with("missing field")
    {
        ConfigError::InvalidValue { line, column, message }
    } else {
        ConfigError::Syntax { line, column, message }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigErrors(vec![classify(text, e)]))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// A config with defaults for everything except the command.
    pub fn new(command: Command) -> Self {
        Self {
            command,
            seed: 0,
            output_format: OutputFormat::Csv,
            output_path: default_output_path(),
            paper_values: false,
            trap: TrapParams::default(),
            zeeman: ZeemanParams::default(),
            noise: NoiseParams::default(),
            plan: PlanParams::default(),
            crystal: None,
            field: None,
            protocol: None,
            montecarlo: None,
            scenario: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigErrors> {
        let mut errors = Vec::new();
        let mut range = |ok: bool, field: &str, reason: String| {
            if !ok {
                errors.push(ConfigError::OutOfRange {
                    field: field.to_string(),
                    reason,
                });
            }
        };
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        let unit = |v: f64| (0.0..=1.0).contains(&v);

        range(self.seed <= i64::MAX as u64, "seed", format!("must be <= {}", i64::MAX));
        let t = &self.trap;
        range(
            positive(t.axial_frequency_hz),
            "trap.axial_frequency_hz",
            format!("must be > 0, got {}", t.axial_frequency_hz),
        );
        range(
            positive(t.ion_mass_amu),
            "trap.ion_mass_amu",
            format!("must be > 0, got {}", t.ion_mass_amu),
        );
        range(
            positive(t.ion_charge_e),
            "trap.ion_charge_e",
            format!("must be > 0, got {}", t.ion_charge_e),
        );
        range(
            positive(self.zeeman.g_factor),
            "zeeman.g_factor",
            format!("must be > 0, got {}", self.zeeman.g_factor),
        );
        let n = &self.noise;
        range(
            nonneg(n.common_mode_rms_t),
            "noise.common_mode_rms_t",
            format!("must be >= 0, got {}", n.common_mode_rms_t),
        );
        range(
            nonneg(n.gradient_rms_t_per_m),
            "noise.gradient_rms_t_per_m",
            format!("must be >= 0, got {}", n.gradient_rms_t_per_m),
        );
        range(
            unit(n.contrast),
            "noise.contrast",
            format!("must lie in [0, 1], got {}", n.contrast),
        );
        let p = &self.plan;
        range(p.shots >= 1, "plan.shots", "must be >= 1".into());
        if let Some(ti) = p.interaction_time_s {
            range(nonneg(ti), "plan.interaction_time_s", format!("must be >= 0, got {ti}"));
        }
        range(
            p.bias_phase_rad.is_finite(),
            "plan.bias_phase_rad",
            "must be finite".into(),
        );
        range(
            nonneg(p.shot_overhead_s),
            "plan.shot_overhead_s",
            format!("must be >= 0, got {}", p.shot_overhead_s),
        );

        if let Some(c) = &self.crystal {
            range(
                (1..=30).contains(&c.n_ions),
                "crystal.n_ions",
                format!("must be in 1..=30, got {}", c.n_ions),
            );
        }
        if let Some(f) = &self.field {
            range(
                (2..=30).contains(&f.n_ions),
                "field.n_ions",
                format!("must be in 2..=30, got {}", f.n_ions),
            );
            range(
                f.target_index < f.n_ions,
                "field.target_index",
                format!("must be < n_ions, got {}", f.target_index),
            );
            range(
                f.probe_pair.iter().all(|&i| i < f.n_ions && i != f.target_index) && f.probe_pair[0] != f.probe_pair[1],
                "field.probe_pair",
                "must name two distinct non-target ions".into(),
            );
            range(
                f.target_moment_j_per_t.is_finite(),
                "field.target_moment_j_per_t",
                "must be finite".into(),
            );
        }
        let check_fields = |fields: &Option<Vec<f64>>, probe: ProbeChoice| -> Option<String> {
            let v = fields.as_ref()?;
            let expected = match probe {
                ProbeChoice::Bell => 2,
                ProbeChoice::Ghz => 4,
            };
            if v.len() != expected {
                Some(format!("expected {expected} values, got {}", v.len()))
            } else if v.iter().any(|b| !b.is_finite()) {
                Some("values must be finite".into())
            } else {
                None
            }
        };
        if let Some(pr) = &self.protocol {
            if let Some(reason) = check_fields(&pr.fields_t, pr.probe) {
                range(false, "protocol.fields_t", reason);
            }
            range(
                unit(pr.fidelity),
                "protocol.fidelity",
                format!("must lie in [0, 1], got {}", pr.fidelity),
            );
            if let Some(d) = pr.duration_s {
                range(positive(d), "protocol.duration_s", format!("must be > 0, got {d}"));
            }
            range(pr.points >= 2, "protocol.points", "must be >= 2".into());
        }
        if let Some(mc) = &self.montecarlo {
            if let Some(reason) = check_fields(&mc.fields_t, mc.probe) {
                range(false, "montecarlo.fields_t", reason);
            }
            range(
                unit(mc.fidelity),
                "montecarlo.fidelity",
                format!("must lie in [0, 1], got {}", mc.fidelity),
            );
            range(
                (1..=1_000_000).contains(&mc.trials),
                "montecarlo.trials",
                "must be in 1..=1000000".into(),
            );
        }
        if let Some(sc) = &self.scenario {
            range(
                unit(sc.fidelity),
                "scenario.fidelity",
                format!("must lie in [0, 1], got {}", sc.fidelity),
            );
            range(
                positive(sc.target_snr),
                "scenario.target_snr",
                format!("must be > 0, got {}", sc.target_snr),
            );
            range(
                sc.trajectory_points >= 2,
                "scenario.trajectory_points",
                "must be >= 2".into(),
            );
            for key in sc.foreign_keys() {
                errors.push(ConfigError::UnknownKey {
                    key: format!("scenario.{key}"),
                });
            }
            for (key, value) in [
                ("scenario.well_separation_m", sc.well_separation_m),
                ("scenario.probe_spacing_m", sc.probe_spacing_m),
            ] {
                if let Some(v) = value {
                    if !positive(v) {
                        errors.push(ConfigError::OutOfRange {
                            field: key.into(),
                            reason: format!("must be > 0, got {v}"),
                        });
                    }
                }
            }
        }

        let sections = [
            ("crystal", self.crystal.is_some(), Command::Crystal),
            ("field", self.field.is_some(), Command::Field),
            ("protocol", self.protocol.is_some(), Command::Protocol),
            ("montecarlo", self.montecarlo.is_some(), Command::Montecarlo),
            ("scenario", self.scenario.is_some(), Command::Scenario),
        ];
        for (section, present, owner) in sections {
            if present && owner != self.command {
                errors.push(ConfigError::UnusedSection {
                    section: section.into(),
                    command: self.command.name().into(),
                });
            }
        }
        if self.command == Command::Scenario && self.scenario.is_none() {
            errors.push(ConfigError::OutOfRange {
                field: "scenario".into(),
                reason: "the scenario command needs a [scenario] section with a kind".into(),
            });
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(errors))
        }
    }

    /// Normalized TOML rendering; parsing it yields an identical config.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("run config serializes to TOML")
    }

    /// First 16 hex digits of the SHA-256 of [`RunConfig::echo`].
    pub fn hash(&self) -> String {
        config_hash(&self.echo())
    }
}

pub fn config_hash(echo: &str) -> String {
    let digest = Sha256::digest(echo.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
