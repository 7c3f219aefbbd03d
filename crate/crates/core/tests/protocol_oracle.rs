//! Parity and outcome statistics checked against an explicit two-qubit
//! density-matrix calculation.

use std::f64::consts::PI;

use iongradim::protocol::{biased_parity, outcome_probabilities, transfer_and_prepare, ProbeLayout};
use iongradim::Vec3;
use num_complex::Complex64 as C;
use proptest::prelude::*;

type Mat = [[C; 4]; 4];

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn dagger(a: &Mat) -> Mat {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

/// π/2 rotation about the equatorial axis at angle `alpha`.
fn half_pi(alpha: f64) -> [[C; 2]; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = C::new(0.0, 1.0);
    [
        [C::new(s, 0.0), -i * C::from_polar(s, -alpha)],
        [-i * C::from_polar(s, alpha), C::new(s, 0.0)],
    ]
}

fn kron(a: &[[C; 2]; 2], b: &[[C; 2]; 2]) -> Mat {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    out
}

/// State (|↑↓⟩ + e^{iφ}|↓↑⟩)/√2 with its coherence scaled by `contrast`,
/// basis index = 2·q₀ + q₁ with q = 1 meaning ↓.
fn bell_density(phi: f64, contrast: f64) -> Mat {
    let mut rho = [[C::new(0.0, 0.0); 4]; 4];
    rho[1][1] = C::new(0.5, 0.0);
    rho[2][2] = C::new(0.5, 0.0);
    rho[2][1] = C::from_polar(0.5 * contrast, phi);
    rho[1][2] = rho[2][1].conj();
    rho
}

/// Born-rule outcome distribution after analysis pulses whose phases differ
/// by `bias` between the two ions.
fn measured(phi: f64, contrast: f64, bias: f64) -> [f64; 4] {
    let u = kron(&half_pi(0.0), &half_pi(bias));
    let rho = matmul(&matmul(&u, &bell_density(phi, contrast)), &dagger(&u));
    [rho[0][0].re, rho[1][1].re, rho[2][2].re, rho[3][3].re]
}

fn parity_of(p: &[f64; 4]) -> f64 {
    p[0] - p[1] - p[2] + p[3]
}

fn bell(contrast: f64) -> iongradim::protocol::ProbeState {
    transfer_and_prepare(ProbeLayout::bell(Vec3::on_axis(0.0), Vec3::on_axis(1e-6)), contrast).unwrap()
}

#[test]
fn zero_phase_gives_even_outcomes() {
    let p = measured(0.0, 1.0, 0.0);
    assert!((parity_of(&p) - 1.0).abs() < 1e-12);
    assert!((parity_of(&measured(PI, 1.0, 0.0)) + 1.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn parity_matches_born_rule(phi in -10.0f64..10.0, bias in -4.0f64..4.0, contrast in 0.0f64..=1.0) {
        let oracle = measured(phi, contrast, bias);
        let probe = bell(contrast).with_phase(phi);
        prop_assert!((parity_of(&oracle) - biased_parity(&probe, bias)).abs() < 1e-12);
        let probs = outcome_probabilities(&probe, bias).unwrap();
        for (a, b) in probs.iter().zip(oracle) {
            prop_assert!((a - b).abs() < 1e-12, "{probs:?} vs {oracle:?}");
        }
    }
}
