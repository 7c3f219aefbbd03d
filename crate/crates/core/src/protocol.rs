//! Probe states, differential Zeeman phase accumulation and parity readout.
//!
//! A probe is a two-branch superposition `|b₁⟩ + e^{iφ}|b₂⟩` of ground-state
//! Zeeman levels (m = ±1/2), where `b₂` is `b₁` with every spin flipped.
//! Each branch has zero net magnetic quantum number, so a field that is the
//! same at every probe ion shifts both branches equally and leaves φ alone.
//! A field difference across the probe rotates φ at
//!
//! ```text
//! dφ/dt = (g μ_B / ħ) Σ_i Δm_i B_i,    Δm_i = m_i(b₁) − m_i(b₂) = ±1
//! ```
//!
//! Only φ and the contrast are tracked; that is exact for everything read out
//! through the parity observable.

use crate::error::{Error, Result};
use crate::foundation::{constants, Vec3};
use crate::magnetostatics::SpinState;

/// Outcome enumeration is capped at 2^20 entries.
pub const MAX_ENUMERATED_PROBES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbeKind {
    Bell,
    Ghz,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeemanConfig {
    pub g_factor: f64,
}

impl ZeemanConfig {
    /// Magnetic quantum numbers of the two qubit levels (↑, ↓).
    pub const MAGNETIC_QUANTUM_NUMBERS: [f64; 2] = [0.5, -0.5];

    pub fn new(g_factor: f64) -> Result<Self> {
        if !(g_factor.is_finite() && g_factor > 0.0) {
            return Err(Error::config("g_factor", format!("must be > 0, got {g_factor}")));
        }
        Ok(Self { g_factor })
    }

    pub fn ca40() -> Self {
        Self {
            g_factor: constants().ca40_g_factor,
        }
    }

    /// `g μ_B / ħ` in rad s⁻¹ T⁻¹.
    pub fn angular_rate_per_tesla(&self) -> f64 {
        let c = constants();
        self.g_factor * c.bohr_magneton / c.reduced_planck
    }

    pub fn magnetic_quantum_number(spin: SpinState) -> f64 {
        match spin {
            SpinState::Up => Self::MAGNETIC_QUANTUM_NUMBERS[0],
            SpinState::Down => Self::MAGNETIC_QUANTUM_NUMBERS[1],
        }
    }
}

impl Default for ZeemanConfig {
    fn default() -> Self {
        Self::ca40()
    }
}

/// Which ions take part in the probe and the spin pattern of the first branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeLayout {
    kind: ProbeKind,
    ion_positions: Vec<Vec3>,
    pattern: Vec<SpinState>,
}

impl ProbeLayout {
    /// `|↑⟩₁|↓⟩₂ + e^{iφ}|↓⟩₁|↑⟩₂`
    pub fn bell(p1: Vec3, p2: Vec3) -> Self {
        Self {
            kind: ProbeKind::Bell,
            ion_positions: vec![p1, p2],
            pattern: vec![SpinState::Up, SpinState::Down],
        }
    }

    pub fn ghz(ion_positions: Vec<Vec3>, pattern: Vec<SpinState>) -> Result<Self> {
        let layout = Self {
            kind: ProbeKind::Ghz,
            ion_positions,
            pattern,
        };
        layout.validate()?;
        Ok(layout)
    }

    /// GHZ pattern mirrored about the chain centre, alternating from the
    /// outside in: `↑↓ | ↓↑` for four ions. Needs a multiple of four ions so
    /// that each branch has zero net m.
    pub fn ghz_mirrored(ion_positions: Vec<Vec3>) -> Result<Self> {
        let n = ion_positions.len();
        if n == 0 || !n.is_multiple_of(4) {
            return Err(Error::config(
                "probe_ions",
                format!("mirrored GHZ pattern needs a multiple of 4 ions, got {n}"),
            ));
        }
        let half: Vec<SpinState> = (0..n / 2)
            .map(|i| if i % 2 == 0 { SpinState::Up } else { SpinState::Down })
            .collect();
        let pattern = half.iter().chain(half.iter().rev()).copied().collect();
        Self::ghz(ion_positions, pattern)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ion_positions.len();
        if self.pattern.len() != n {
            return Err(Error::config(
                "pattern",
                format!("{} spins for {n} ions", self.pattern.len()),
            ));
        }
        match self.kind {
            ProbeKind::Bell if n != 2 => {
                return Err(Error::config("probe_ions", format!("a Bell probe has 2 ions, got {n}")))
            }
            ProbeKind::Ghz if n < 2 || !n.is_multiple_of(2) => {
                return Err(Error::config(
                    "probe_ions",
                    format!("a GHZ probe needs an even count >= 2, got {n}"),
                ))
            }
            _ => {}
        }
        let ups = self.pattern.iter().filter(|s| **s == SpinState::Up).count();
        if 2 * ups != n {
            return Err(Error::config(
                "pattern",
                "each branch must have zero net magnetic quantum number",
            ));
        }
        if self.ion_positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::config("ion_positions", "must be finite"));
        }
        Ok(())
    }

    pub fn kind(&self) -> ProbeKind {
        self.kind
    }

    pub fn ion_positions(&self) -> &[Vec3] {
        &self.ion_positions
    }

    pub fn n_ions(&self) -> usize {
        self.ion_positions.len()
    }

    /// First-branch spin pattern; the second branch is its complement.
    pub fn pattern(&self) -> &[SpinState] {
        &self.pattern
    }

    /// `(m in branch 1, m in branch 2)` for every probe ion.
    pub fn zeeman_weights(&self) -> Vec<[f64; 2]> {
        self.pattern
            .iter()
            .map(|s| {
                [
                    ZeemanConfig::magnetic_quantum_number(*s),
                    ZeemanConfig::magnetic_quantum_number(s.flipped()),
                ]
            })
            .collect()
    }

    /// `Δm_i = m_i(b₁) − m_i(b₂)`, each ±1.
    pub fn branch_differences(&self) -> Vec<f64> {
        self.zeeman_weights().iter().map(|[a, b]| a - b).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeState {
    pub layout: ProbeLayout,
    /// φ, radians.
    pub phase: f64,
    pub contrast: f64,
}

impl ProbeState {
    pub fn kind(&self) -> ProbeKind {
        self.layout.kind
    }

    pub fn ion_positions(&self) -> &[Vec3] {
        &self.layout.ion_positions
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        Self { phase, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityRecord {
    /// s
    pub time: f64,
    pub parity: f64,
    /// rad
    pub phase: f64,
}

/// Entangle, map onto the Zeeman qubit, and start at φ = 0. Preparation and
/// readout infidelity both show up as reduced contrast.
pub fn transfer_and_prepare(layout: ProbeLayout, fidelity: f64) -> Result<ProbeState> {
    layout.validate()?;
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::config("fidelity", format!("must lie in [0, 1], got {fidelity}")));
    }
    Ok(ProbeState {
        layout,
        phase: 0.0,
        contrast: fidelity,
    })
}

/// dφ/dt in rad/s for the given `B_z` at each probe ion.
pub fn phase_rate(probe: &ProbeState, zeeman: &ZeemanConfig, field_at_ions: &[f64]) -> Result<f64> {
    layout_phase_rate(&probe.layout, zeeman, field_at_ions)
}

pub(crate) fn layout_phase_rate(layout: &ProbeLayout, zeeman: &ZeemanConfig, field_at_ions: &[f64]) -> Result<f64> {
    if field_at_ions.len() != layout.n_ions() {
        return Err(Error::config(
            "field_at_ions",
            format!(
                "{} field values for {} probe ions",
                field_at_ions.len(),
                layout.n_ions()
            ),
        ));
    }
    // Σ Δm_i B_i with Δm = ±1, summed as (Σ over +1) − (Σ over −1). A uniform
    // field then produces two bit-identical partial sums.
    let mut plus = 0.0;
    let mut minus = 0.0;
    for (dm, b) in layout.branch_differences().iter().zip(field_at_ions) {
        if *dm > 0.0 {
            plus += b;
        } else {
            minus += b;
        }
    }
    Ok(zeeman.angular_rate_per_tesla() * (plus - minus))
}

pub fn evolve(probe: &ProbeState, zeeman: &ZeemanConfig, field_at_ions: &[f64], duration: f64) -> Result<ProbeState> {
    if duration.is_nan() || duration < 0.0 || duration.is_infinite() {
        return Err(Error::config(
            "duration",
            format!("must be finite and >= 0, got {duration}"),
        ));
    }
    let rate = phase_rate(probe, zeeman, field_at_ions)?;
    Ok(probe.with_phase(probe.phase + rate * duration))
}

/// `contrast · cos φ`
pub fn parity(probe: &ProbeState) -> f64 {
    probe.contrast * probe.phase.cos()
}

/// Parity read out after an analysis pulse carrying phase `bias_phase`.
pub fn biased_parity(probe: &ProbeState, bias_phase: f64) -> f64 {
    probe.contrast * (probe.phase + bias_phase).cos()
}

/// Probability that a single shot has even parity.
pub fn even_parity_probability(contrast: f64, total_phase: f64) -> f64 {
    0.5 * (1.0 + contrast * total_phase.cos())
}

/// Born-rule outcome distribution after the analysis π/2 pulses.
///
/// Index bit `n−1−i` is set when probe ion `i` reads ↓, so for a Bell pair the
/// order is (↑↑, ↑↓, ↓↑, ↓↓). All outcomes of one parity are equally likely.
pub fn outcome_probabilities(probe: &ProbeState, bias_phase: f64) -> Result<Vec<f64>> {
    let n = probe.layout.n_ions();
    if n > MAX_ENUMERATED_PROBES {
        return Err(Error::config(
            "probe_ions",
            format!("outcome enumeration is limited to {MAX_ENUMERATED_PROBES} ions, got {n}"),
        ));
    }
    let outcomes = 1usize << n;
    let per_outcome = 1.0 / outcomes as f64;
    let signal = probe.contrast * (probe.phase + bias_phase).cos();
    Ok((0..outcomes)
        .map(|k| {
            let sign = if k.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            per_outcome * (1.0 + sign * signal)
        })
        .collect())
}

/// Parity of an outcome bit pattern: +1 for an even number of ↓ readings.
pub fn outcome_parity(bits: u32) -> i8 {
    if bits.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Parity sampled at the given times under constant fields.
pub fn parity_trajectory(
    probe: &ProbeState,
    zeeman: &ZeemanConfig,
    field_at_ions: &[f64],
    times: &[f64],
) -> Result<Vec<ParityRecord>> {
    let rate = phase_rate(probe, zeeman, field_at_ions)?;
    times
        .iter()
        .map(|&t| {
            if t.is_nan() || t < 0.0 {
                return Err(Error::config("time", format!("must be >= 0, got {t}")));
            }
            let phase = probe.phase + rate * t;
            Ok(ParityRecord {
                time: t,
                parity: probe.contrast * phase.cos(),
                phase,
            })
        })
        .collect()
}

/// Time for φ to advance by π at the given rate.
pub fn time_to_pi(rate: f64) -> Option<f64> {
    (rate != 0.0).then(|| std::f64::consts::PI / rate.abs())
}
