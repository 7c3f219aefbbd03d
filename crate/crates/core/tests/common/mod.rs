//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use iongradim::constants;

/// Minimizes Σu²/2 + Σ_{i<j} 1/|u_i − u_j| one coordinate at a time, each
/// step a bisection on the coordinate's energy slope inside its neighbour gap.
pub fn minimize_potential(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    let mut u: Vec<f64> = (0..n).map(|i| (i as f64 - (n - 1) as f64 / 2.0) * 1.5).collect();
    let slope = |u: &[f64], i: usize, x: f64| -> f64 {
        let mut s = x;
        for (j, &uj) in u.iter().enumerate() {
            if j != i {
                let d = x - uj;
                s -= d.signum() / (d * d);
            }
        }
        s
    };
    for _sweep in 0..100_000 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let mut lo = if i == 0 { u[1] - 100.0 } else { u[i - 1] };
            let mut hi = if i + 1 == n { u[n - 2] + 100.0 } else { u[i + 1] };
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if slope(&u, i, mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let x = 0.5 * (lo + hi);
            moved = moved.max((x - u[i]).abs());
            u[i] = x;
        }
        if moved < 1e-14 {
            break;
        }
    }
    u
}

/// Phase rate from first principles: g μ_B / ħ times Σ_i (m_i − (−m_i)) B_i,
/// with `m` the first-branch quantum numbers (±1/2).
pub fn branch_sum_rate(first_branch_m: &[f64], fields: &[f64], g: f64) -> f64 {
    let c = constants();
    let k = g * c.bohr_magneton / c.reduced_planck;
    first_branch_m.iter().zip(fields).map(|(m, b)| k * 2.0 * m * b).sum()
}
