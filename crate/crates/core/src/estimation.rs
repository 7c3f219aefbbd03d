//! Monte Carlo shot statistics under projection noise and quasi-static field noise.
//!
//! Each shot draws its noise from a [`CounterRng`] keyed by `(seed, shot
//! index)` at fixed counter slots:
//!
//! | counters | use                                   |
//! |----------|---------------------------------------|
//! | 0, 1     | common-mode field deviate             |
//! | 2, 3     | gradient deviate                      |
//! | 4        | parity of the outcome                 |
//! | 5        | spin pattern within that parity class |
//!
//! so changing one noise amplitude never reshuffles the other draws.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::protocol::{self, even_parity_probability, ProbeLayout, ProbeState, ZeemanConfig};
use crate::rng::{derive_seed, CounterRng};

const SLOT_COMMON: u64 = 0;
const SLOT_GRADIENT: u64 = 2;
const SLOT_PARITY: u64 = 4;
const SLOT_PATTERN: u64 = 5;

const ARM_UP: u64 = 1;
const ARM_DOWN: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// T, uniform across the probe.
    pub common_mode_rms: f64,
    /// T/m along the trap axis.
    pub gradient_rms: f64,
    /// Readout contrast, multiplies the probe's own contrast.
    pub contrast: f64,
}

impl NoiseModel {
    pub const NOISELESS: NoiseModel = NoiseModel {
        common_mode_rms: 0.0,
        gradient_rms: 0.0,
        contrast: 1.0,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.common_mode_rms >= 0.0 && self.common_mode_rms.is_finite()) {
            return Err(Error::config("common_mode_rms", "must be finite and >= 0"));
        }
        if !(self.gradient_rms >= 0.0 && self.gradient_rms.is_finite()) {
            return Err(Error::config("gradient_rms", "must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.contrast) {
            return Err(Error::config("contrast", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::NOISELESS
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentPlan {
    pub shots: u64,
    /// s
    pub interaction_time: f64,
    /// Phase of the analysis pulse, rad.
    pub bias_phase: f64,
    pub rng_seed: u64,
    /// Cooling, preparation and detection time per shot, s.
    pub shot_overhead: f64,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::config("shots", "must be >= 1"));
        }
        if !(self.interaction_time >= 0.0 && self.interaction_time.is_finite()) {
            return Err(Error::config("interaction_time", "must be finite and >= 0"));
        }
        if !self.bias_phase.is_finite() {
            return Err(Error::config("bias_phase", "must be finite"));
        }
        if !(self.shot_overhead >= 0.0 && self.shot_overhead.is_finite()) {
            return Err(Error::config("shot_overhead", "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn with_seed(&self, rng_seed: u64) -> Self {
        Self { rng_seed, ..*self }
    }

    pub fn with_shots(&self, shots: u64) -> Self {
        Self { shots, ..*self }
    }

    /// Wall-clock time for all shots of one hypothesis.
    pub fn measurement_time(&self) -> f64 {
        self.shots as f64 * (self.interaction_time + self.shot_overhead)
    }
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            shots: 10,
            interaction_time: 5.0,
            bias_phase: std::f64::consts::FRAC_PI_2,
            rng_seed: 0,
            shot_overhead: 1.0,
        }
    }
}

/// Everything needed to evolve the probe during one shot.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotModel {
    pub probe: ProbeState,
    pub zeeman: ZeemanConfig,
    /// Deterministic `B_z` at each probe ion, T.
    pub fields: Vec<f64>,
}

impl ShotModel {
    pub fn new(probe: ProbeState, zeeman: ZeemanConfig, fields: Vec<f64>) -> Result<Self> {
        protocol::phase_rate(&probe, &zeeman, &fields)?;
        Ok(Self { probe, zeeman, fields })
    }

    /// Expected parity (after the analysis pulse) without field noise.
    pub fn noiseless_parity(&self, plan: &ExperimentPlan, noise: &NoiseModel) -> Result<f64> {
        let rate = protocol::phase_rate(&self.probe, &self.zeeman, &self.fields)?;
        let phase = self.probe.phase + rate * plan.interaction_time;
        Ok(self.probe.contrast * noise.contrast * (phase + plan.bias_phase).cos())
    }

    fn layout(&self) -> &ProbeLayout {
        &self.probe.layout
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotRecord {
    pub index: u64,
    /// φ accumulated in this shot, rad.
    pub phase: f64,
    /// Parity expectation for this shot's noise realisation.
    pub expected_parity: f64,
    /// Readout pattern; bit `n−1−i` set when probe ion `i` reads ↓.
    pub bits: u32,
    pub parity: i8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    pub parity_estimate: f64,
    pub std_error: f64,
    pub true_parity: f64,
    /// `|P̂| / std_error`, distance from the zero crossing in standard errors.
    pub snr: f64,
    pub shots_used: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrimination {
    pub up: EstimationResult,
    pub down: EstimationResult,
    pub snr: f64,
}

fn axial_center(layout: &ProbeLayout) -> f64 {
    let zs = layout.ion_positions();
    zs.iter().map(|p| p.z).sum::<f64>() / zs.len() as f64
}

pub fn simulate_shots(plan: &ExperimentPlan, model: &ShotModel, noise: &NoiseModel) -> Result<Vec<ShotRecord>> {
    plan.validate()?;
    noise.validate()?;
    let layout = model.layout();
    let n_ions = layout.n_ions();
    if n_ions > 31 {
        return Err(Error::config("probe_ions", "at most 31 probe ions fit an outcome word"));
    }
    let center = axial_center(layout);
    let lever: Vec<f64> = layout.ion_positions().iter().map(|p| p.z - center).collect();
    let contrast = model.probe.contrast * noise.contrast;

    (0..plan.shots)
        .into_par_iter()
        .map(|index| {
            let rng = CounterRng::new(plan.rng_seed, index);
            let common = noise.common_mode_rms * rng.normal(SLOT_COMMON);
            let gradient = noise.gradient_rms * rng.normal(SLOT_GRADIENT);

            let differential: Vec<f64> = model
                .fields
                .iter()
                .zip(&lever)
                .map(|(b, dz)| b + gradient * dz)
                .collect();
            // The common-mode part is evaluated on its own; it contributes an
            // exact zero through the branch-balanced sum.
            let rate = protocol::phase_rate(&model.probe, &model.zeeman, &differential)?
                + protocol::phase_rate(&model.probe, &model.zeeman, &vec![common; n_ions])?;
            let phase = model.probe.phase + rate * plan.interaction_time;

            let p_even = even_parity_probability(contrast, phase + plan.bias_phase);
            let even = rng.uniform(SLOT_PARITY) < p_even;
            let bits = draw_pattern(rng.word(SLOT_PATTERN), n_ions, even);
            Ok(ShotRecord {
                index,
                phase,
                expected_parity: 2.0 * p_even - 1.0,
                bits,
                parity: protocol::outcome_parity(bits),
            })
        })
        .collect()
}

/// Uniform pattern among those with the requested parity: the lower `n−1`
/// bits are free and the top bit fixes the parity.
fn draw_pattern(word: u64, n_ions: usize, even: bool) -> u32 {
    let free_bits = n_ions - 1;
    let low = if free_bits == 0 {
        0
    } else {
        (word & ((1u64 << free_bits) - 1)) as u32
    };
    let low_odd = low.count_ones() % 2 == 1;
    if low_odd == even {
        low | (1 << free_bits)
    } else {
        low
    }
}

/// Rule-of-three stand-in for the binomial error when every shot agreed.
fn projection_std_error(estimate: f64, shots: u64) -> f64 {
    let n = shots as f64;
    if estimate.abs() >= 1.0 {
        3.0 / n
    } else {
        ((1.0 - estimate * estimate) / n).sqrt()
    }
}

pub fn parity_estimate(outcomes: &[ShotRecord]) -> Result<EstimationResult> {
    if outcomes.is_empty() {
        return Err(Error::config("outcomes", "need at least one shot"));
    }
    let shots = outcomes.len() as u64;
    let even = outcomes.iter().filter(|r| r.parity > 0).count() as i64;
    let odd = shots as i64 - even;
    let estimate = (even - odd) as f64 / shots as f64;
    let std_error = projection_std_error(estimate, shots);
    let true_parity = outcomes.iter().map(|r| r.expected_parity).sum::<f64>() / shots as f64;
    Ok(EstimationResult {
        parity_estimate: estimate,
        std_error,
        true_parity,
        snr: estimate.abs() / std_error,
        shots_used: shots,
    })
}

/// Runs both spin hypotheses with `plan.shots` each, on independent streams,
/// and pools their errors.
pub fn spin_discrimination_snr(
    plan: &ExperimentPlan,
    up: &ShotModel,
    down: &ShotModel,
    noise: &NoiseModel,
) -> Result<Discrimination> {
    let up_plan = plan.with_seed(derive_seed(plan.rng_seed, ARM_UP));
    let down_plan = plan.with_seed(derive_seed(plan.rng_seed, ARM_DOWN));
    let up = parity_estimate(&simulate_shots(&up_plan, up, noise)?)?;
    let down = parity_estimate(&simulate_shots(&down_plan, down, noise)?)?;
    let snr = (down.parity_estimate - up.parity_estimate).abs() / up.std_error.hypot(down.std_error);
    Ok(Discrimination { up, down, snr })
}

/// Expected two-arm SNR for known parities with `shots` per arm.
pub fn analytic_snr(parity_up: f64, parity_down: f64, shots: u64) -> f64 {
    let variance = (1.0 - parity_up * parity_up) + (1.0 - parity_down * parity_down);
    (parity_down - parity_up).abs() * (shots as f64).sqrt() / variance.sqrt()
}

/// Smallest per-arm shot count whose SNR reaches `target_snr` for a given
/// parity swing, assuming zero-crossing (unit) projection noise in each arm:
/// `SNR = swing · √N / √2`.
pub fn required_shots(target_snr: f64, parity_swing: f64) -> Result<u64> {
    if !(target_snr > 0.0 && target_snr.is_finite()) {
        return Err(Error::config("target_snr", format!("must be > 0, got {target_snr}")));
    }
    if parity_swing == 0.0 {
        return Err(Error::Infeasible(
            "zero parity swing cannot be resolved with any number of shots".into(),
        ));
    }
    if !(parity_swing > 0.0 && parity_swing <= 2.0) {
        return Err(Error::config(
            "parity_swing",
            format!("must lie in (0, 2], got {parity_swing}"),
        ));
    }
    let snr = |n: u64| parity_swing * (n as f64 / 2.0).sqrt();
    let mut n = (2.0 * (target_snr / parity_swing).powi(2)).ceil().max(1.0) as u64;
    while n > 1 && snr(n - 1) >= target_snr {
        n -= 1;
    }
    while snr(n) < target_snr {
        n += 1;
    }
    Ok(n)
}

/// Phase spread of the probe from quasi-static Gaussian gradient noise.
pub fn dephasing_phase_spread(
    gradient_rms: f64,
    layout: &ProbeLayout,
    zeeman: &ZeemanConfig,
    time: f64,
) -> Result<f64> {
    if !(gradient_rms >= 0.0 && gradient_rms.is_finite()) {
        return Err(Error::config("gradient_rms", "must be finite and >= 0"));
    }
    if !(time >= 0.0 && time.is_finite()) {
        return Err(Error::config("time", "must be finite and >= 0"));
    }
    let center = axial_center(layout);
    let unit_fields: Vec<f64> = layout.ion_positions().iter().map(|p| p.z - center).collect();
    let rate_per_gradient = protocol::layout_phase_rate(layout, zeeman, &unit_fields)?;
    Ok(rate_per_gradient.abs() * gradient_rms * time)
}

/// Contrast multiplier `exp(−σ_φ²/2)`.
pub fn dephasing_contrast(gradient_rms: f64, layout: &ProbeLayout, zeeman: &ZeemanConfig, time: f64) -> Result<f64> {
    let sigma = dephasing_phase_spread(gradient_rms, layout, zeeman, time)?;
    Ok((-0.5 * sigma * sigma).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundation::Vec3;
    use crate::protocol::{transfer_and_prepare, ProbeLayout};
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn bell_layout() -> ProbeLayout {
        ProbeLayout::bell(Vec3::on_axis(-1.03e-6), Vec3::on_axis(0.0))
    }

    fn model(fields: Vec<f64>) -> ShotModel {
        let probe = transfer_and_prepare(bell_layout(), 1.0).unwrap();
        ShotModel::new(probe, ZeemanConfig::ca40(), fields).unwrap()
    }

    fn plan(shots: u64, bias: f64) -> ExperimentPlan {
        ExperimentPlan {
            shots,
            interaction_time: 5.0,
            bias_phase: bias,
            rng_seed: 11,
            shot_overhead: 1.0,
        }
    }

    #[test]
    fn perfect_contrast_at_zero_phase_is_always_even() {
        let shots = simulate_shots(&plan(500, 0.0), &model(vec![0.0, 0.0]), &NoiseModel::NOISELESS).unwrap();
        assert!(shots.iter().all(|s| s.parity == 1));
        let est = parity_estimate(&shots).unwrap();
        assert_eq!(est.parity_estimate, 1.0);
        assert_eq!(est.std_error, 3.0 / 500.0);
    }

    #[test]
    fn same_seed_same_outcomes() {
        let noise = NoiseModel {
            common_mode_rms: 1e-9,
            gradient_rms: 1e-7,
            contrast: 0.97,
        };
        let m = model(vec![1e-13, 7e-13]);
        let a = simulate_shots(&plan(200, FRAC_PI_2), &m, &noise).unwrap();
        let b = simulate_shots(&plan(200, FRAC_PI_2), &m, &noise).unwrap();
        assert_eq!(a, b);
        let c = simulate_shots(&plan(200, FRAC_PI_2).with_seed(12), &m, &noise).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn common_mode_noise_changes_nothing() {
        let m = model(vec![1e-13, 7e-13]);
        let quiet = NoiseModel {
            common_mode_rms: 0.0,
            gradient_rms: 3e-8,
            contrast: 0.99,
        };
        let loud = NoiseModel {
            common_mode_rms: 1e-6,
            ..quiet
        };
        let a = simulate_shots(&plan(1000, FRAC_PI_2), &m, &quiet).unwrap();
        let b = simulate_shots(&plan(1000, FRAC_PI_2), &m, &loud).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parity_estimate_examples() {
        let rec = |parity: i8| ShotRecord {
            index: 0,
            phase: 0.0,
            expected_parity: 0.0,
            bits: 0,
            parity,
        };
        let balanced: Vec<_> = (0..100).map(|i| rec(if i % 2 == 0 { 1 } else { -1 })).collect();
        let est = parity_estimate(&balanced).unwrap();
        assert_eq!(est.parity_estimate, 0.0);
        assert_relative_eq!(est.std_error, 0.1, max_relative = 1e-12);
        assert_eq!(est.shots_used, 100);
        assert!(parity_estimate(&[]).is_err());
    }

    #[test]
    fn patterns_respect_parity() {
        for n in 1..8 {
            for w in 0..200u64 {
                let word = crate::rng::mix(w);
                assert_eq!(protocol::outcome_parity(draw_pattern(word, n, true)), 1);
                assert_eq!(protocol::outcome_parity(draw_pattern(word, n, false)), -1);
                assert!(draw_pattern(word, n, false) < (1 << n));
            }
        }
    }

    #[test]
    fn required_shots_examples() {
        // 2·(2/1.14)² = 6.16
        assert_eq!(required_shots(2.0, 1.14).unwrap(), 7);
        assert_eq!(required_shots(2.0, 2.0).unwrap(), 2);
        // 2·(2/0.931)² = 9.23
        assert_eq!(required_shots(2.0, 0.931).unwrap(), 10);
        assert_eq!(required_shots(4.0, 0.5).unwrap(), 4 * required_shots(2.0, 0.5).unwrap());
        assert!(matches!(required_shots(2.0, 0.0), Err(Error::Infeasible(_))));
        assert!(required_shots(2.0, 2.5).is_err());
        assert!(required_shots(0.0, 1.0).is_err());
    }

    #[test]
    fn required_shots_is_minimal() {
        for swing in [0.05, 0.3, 0.77, 1.0, 1.5, 2.0] {
            for target in [0.5, 1.0, 2.0, 3.3, 10.0] {
                let n = required_shots(target, swing).unwrap();
                assert!(swing * (n as f64 / 2.0).sqrt() >= target);
                if n > 1 {
                    assert!(swing * ((n - 1) as f64 / 2.0).sqrt() < target);
                }
            }
        }
    }

    #[test]
    fn dephasing_examples() {
        let z = ZeemanConfig::ca40();
        assert_eq!(dephasing_contrast(0.0, &bell_layout(), &z, 5.0).unwrap(), 1.0);
        // 1e-13 T/µm over a 1.03 µm pair for 5 s:
        // σ_φ = (2.00225 μ_B / ħ) · 1e-7 T/m · 1.03e-6 m · 5 s
        let sigma = dephasing_phase_spread(1e-7, &bell_layout(), &z, 5.0).unwrap();
        assert_relative_eq!(sigma, 0.0906811322441, max_relative = 1e-9);
        assert_relative_eq!(
            dephasing_contrast(1e-7, &bell_layout(), &z, 5.0).unwrap(),
            0.995896906911,
            max_relative = 1e-9
        );
        // A spread of exactly 1 rad.
        let rms = 1.0 / (z.angular_rate_per_tesla() * 1.03e-6 * 5.0);
        assert_relative_eq!(
            dephasing_contrast(rms, &bell_layout(), &z, 5.0).unwrap(),
            (-0.5f64).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn invalid_inputs() {
        let m = model(vec![0.0, 0.0]);
        assert!(simulate_shots(&plan(0, 0.0), &m, &NoiseModel::NOISELESS).is_err());
        let bad = NoiseModel {
            contrast: 1.5,
            ..NoiseModel::NOISELESS
        };
        assert!(simulate_shots(&plan(10, 0.0), &m, &bad).is_err());
        let negative = NoiseModel {
            gradient_rms: -1.0,
            ..NoiseModel::NOISELESS
        };
        assert!(simulate_shots(&plan(10, 0.0), &m, &negative).is_err());
        assert!(ShotModel::new(m.probe.clone(), m.zeeman, vec![0.0]).is_err());
    }

    #[test]
    fn measurement_time_includes_overhead() {
        assert_eq!(plan(10, 0.0).measurement_time(), 60.0);
    }
}
