use iongradim::estimation::{
    analytic_snr, parity_estimate, simulate_shots, spin_discrimination_snr, ExperimentPlan, NoiseModel, ShotModel,
};
use iongradim::protocol::{transfer_and_prepare, ProbeLayout, ZeemanConfig};
use iongradim::Vec3;

/// Bell probe whose noiseless parity (zero bias, zero time) is `parity`.
fn model_with_parity(parity: f64) -> ShotModel {
    let layout = ProbeLayout::bell(Vec3::on_axis(0.0), Vec3::on_axis(1e-6));
    let probe = transfer_and_prepare(layout, 1.0).unwrap().with_phase(parity.acos());
    ShotModel::new(probe, ZeemanConfig::ca40(), vec![0.0, 0.0]).unwrap()
}

fn plan(shots: u64, seed: u64) -> ExperimentPlan {
    ExperimentPlan {
        shots,
        interaction_time: 0.0,
        bias_phase: 0.0,
        rng_seed: seed,
        shot_overhead: 0.0,
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    0.5 * (v[(n - 1) / 2] + v[n / 2])
}

#[test]
fn estimates_are_consistent() {
    for p in [-0.9, -0.5, 0.0, 0.3, 0.8] {
        let model = model_with_parity(p);
        assert!((model.noiseless_parity(&plan(1, 0), &NoiseModel::NOISELESS).unwrap() - p).abs() < 1e-12);
        let runs = 200;
        let inside = (0..runs)
            .filter(|&seed| {
                let est = parity_estimate(&simulate_shots(&plan(1000, seed), &model, &NoiseModel::NOISELESS).unwrap())
                    .unwrap();
                (est.parity_estimate - p).abs() <= 5.0 * est.std_error
            })
            .count();
        assert!(inside as f64 >= 0.99 * runs as f64, "P = {p}: {inside}/{runs}");
    }
}

#[test]
fn variance_follows_projection_law() {
    for p in [0.0, 0.6, -0.8] {
        let model = model_with_parity(p);
        let shots = 50;
        let runs = 4000u64;
        let est: Vec<f64> = (0..runs)
            .map(|s| {
                parity_estimate(&simulate_shots(&plan(shots, s), &model, &NoiseModel::NOISELESS).unwrap())
                    .unwrap()
                    .parity_estimate
            })
            .collect();
        let mean = est.iter().sum::<f64>() / runs as f64;
        let var = est.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
        let expected = (1.0 - p * p) / shots as f64;
        assert!((var / expected - 1.0).abs() < 0.1, "P = {p}: {var} vs {expected}");
        assert!((mean - p).abs() < 4.0 * (expected / runs as f64).sqrt());
    }
}

#[test]
fn extreme_parity_uses_floor_error() {
    let est = parity_estimate(&simulate_shots(&plan(40, 3), &model_with_parity(1.0), &NoiseModel::NOISELESS).unwrap())
        .unwrap();
    assert_eq!(est.parity_estimate, 1.0);
    assert_eq!(est.std_error, 3.0 / 40.0);
}

fn mc_median_snr(a: &ShotModel, b: &ShotModel, shots: u64) -> f64 {
    median(
        (0..300)
            .map(|s| {
                spin_discrimination_snr(&plan(shots, s), a, b, &NoiseModel::NOISELESS)
                    .unwrap()
                    .snr
            })
            .collect(),
    )
}

#[test]
fn monte_carlo_snr_tracks_analytic() {
    let (pa, pb) = (0.0, -0.3);
    let (a, b) = (model_with_parity(pa), model_with_parity(pb));
    for shots in [100, 400] {
        let mc = mc_median_snr(&a, &b, shots);
        let an = analytic_snr(pa, pb, shots);
        assert!((mc / an - 1.0).abs() < 0.15, "N = {shots}: {mc} vs {an}");
    }
}

#[test]
fn quadrupling_shots_doubles_snr() {
    assert!((analytic_snr(0.1, -0.4, 400) / analytic_snr(0.1, -0.4, 100) - 2.0).abs() < 1e-12);
    let (a, b) = (model_with_parity(0.1), model_with_parity(-0.4));
    let ratio = mc_median_snr(&a, &b, 400) / mc_median_snr(&a, &b, 100);
    assert!((ratio / 2.0 - 1.0).abs() < 0.15, "{ratio}");
}

#[test]
fn gradient_noise_reduces_contrast_on_average() {
    let layout = ProbeLayout::bell(Vec3::on_axis(0.0), Vec3::on_axis(1.03e-6));
    let model = ShotModel::new(
        transfer_and_prepare(layout.clone(), 1.0).unwrap(),
        ZeemanConfig::ca40(),
        vec![0.0, 0.0],
    )
    .unwrap();
    let noise = NoiseModel {
        gradient_rms: 1e-7,
        ..NoiseModel::NOISELESS
    };
    let p = ExperimentPlan {
        shots: 20_000,
        interaction_time: 5.0,
        bias_phase: 0.0,
        rng_seed: 5,
        shot_overhead: 0.0,
    };
    let est = parity_estimate(&simulate_shots(&p, &model, &noise).unwrap()).unwrap();
    let c = iongradim::estimation::dephasing_contrast(1e-7, &layout, &ZeemanConfig::ca40(), 5.0).unwrap();
    assert!(
        (est.parity_estimate - c).abs() < 5.0 * est.std_error.max(1.0 / 20_000f64.sqrt()),
        "{} vs {c}",
        est.parity_estimate
    );
}
