//! Shot-noise limited parity estimation and the spin-flip SNR budget.

use iongradim::estimation::{
    analytic_snr, parity_estimate, required_shots, simulate_shots, ExperimentPlan, NoiseModel, ShotModel,
};
use iongradim::protocol::{transfer_and_prepare, ProbeLayout, ZeemanConfig};
use iongradim::Vec3;

fn main() -> iongradim::Result<()> {
    let layout = ProbeLayout::bell(Vec3::on_axis(0.0), Vec3::on_axis(1.03e-6));
    let model = ShotModel::new(transfer_and_prepare(layout, 1.0)?, ZeemanConfig::ca40(), vec![0.0, 0.0])?;
    let plan = ExperimentPlan::default().with_shots(100);

    for seed in 0..5 {
        let est = parity_estimate(&simulate_shots(&plan.with_seed(seed), &model, &NoiseModel::NOISELESS)?)?;
        println!("seed {seed}: P = {:+.2} +/- {:.3}", est.parity_estimate, est.std_error);
    }

    println!("\nshots per arm for SNR 2:");
    for swing in [0.3, 0.57, 0.93, 2.0] {
        println!(
            "  swing {swing:.2}: {:>3} shots (analytic SNR at 10 shots for P = +/-{:.2}: {:.2})",
            required_shots(2.0, swing)?,
            swing / 2.0,
            analytic_snr(swing / 2.0, -swing / 2.0, 10)
        );
    }
    Ok(())
}
