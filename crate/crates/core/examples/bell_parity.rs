//! Parity oscillation of a Bell-state probe in a field difference.

use iongradim::protocol::{parity_trajectory, phase_rate, time_to_pi, transfer_and_prepare, ProbeLayout, ZeemanConfig};
use iongradim::Vec3;

fn main() -> iongradim::Result<()> {
    let layout = ProbeLayout::bell(Vec3::on_axis(-1.03e-6), Vec3::on_axis(0.0));
    let probe = transfer_and_prepare(layout, 0.95)?;
    let zeeman = ZeemanConfig::ca40();
    // A uniform 1 uT offset on top of a 0.68 pT difference: only the difference matters.
    let fields = [1e-6, 1e-6 + 6.8e-13];

    let rate = phase_rate(&probe, &zeeman, &fields)?;
    println!(
        "phase rate {rate:.5} rad/s, parity reaches -C after {:.2} s",
        time_to_pi(rate).unwrap()
    );
    let times: Vec<f64> = (0..=10).map(|i| 3.0 * i as f64).collect();
    for r in parity_trajectory(&probe, &zeeman, &fields, &times)? {
        println!("  t = {:>4.0} s  phase = {:+.3}  P = {:+.3}", r.time, r.phase, r.parity);
    }
    Ok(())
}
