//! Equilibrium positions of a linear ion string in a harmonic axial trap.
//!
//! Positions are solved in units of the length scale
//! `ℓ = (q² / (4π ε₀ m ω_z²))^(1/3)`, where the force balance on ion `i` reads
//!
//! ```text
//! u_i = Σ_{j<i} (u_i − u_j)⁻² − Σ_{j>i} (u_j − u_i)⁻²
//! ```
//!
//! and then scaled back to meters.

use std::f64::consts::PI;

use log::debug;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::foundation::{ca40_mass, constants, Vec3};

pub const MAX_IONS: usize = 30;
pub const MAX_ITERATIONS: usize = 200;
/// Largest tolerated dimensionless net force on any ion.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    /// ω_z in rad/s.
    pub axial_frequency: f64,
    /// kg
    pub ion_mass: f64,
    /// C
    pub ion_charge: f64,
}

impl TrapConfig {
    pub fn new(axial_frequency: f64, ion_mass: f64, ion_charge: f64) -> Result<Self> {
        let trap = Self {
            axial_frequency,
            ion_mass,
            ion_charge,
        };
        trap.validate()?;
        Ok(trap)
    }

    /// Singly charged ⁴⁰Ca⁺ at an axial frequency given in Hz (ω_z / 2π).
    pub fn ca40(axial_frequency_hz: f64) -> Result<Self> {
        Self::new(
            2.0 * PI * axial_frequency_hz,
            ca40_mass(),
            constants().elementary_charge,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.axial_frequency) {
            return Err(Error::config(
                "axial_frequency",
                format!("must be > 0, got {}", self.axial_frequency),
            ));
        }
        if !positive(self.ion_mass) {
            return Err(Error::config("ion_mass", format!("must be > 0, got {}", self.ion_mass)));
        }
        if !positive(self.ion_charge) {
            return Err(Error::config(
                "ion_charge",
                format!("must be > 0, got {}", self.ion_charge),
            ));
        }
        Ok(())
    }

    /// Axial frequency (rad/s) at which a two-ion crystal has the given spacing.
    pub fn axial_frequency_for_pair_spacing(spacing: f64, ion_mass: f64, ion_charge: f64) -> Result<f64> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::config("spacing", format!("must be > 0, got {spacing}")));
        }
        // Two ions sit at ±(1/4)^(1/3) ℓ.
        let ell = spacing / (2.0 * 0.25f64.cbrt());
        let c = constants();
        let omega_sq = ion_charge * ion_charge / (4.0 * PI * c.vacuum_permittivity * ion_mass * ell.powi(3));
        Ok(omega_sq.sqrt())
    }
}

/// Solved ion positions along the trap axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalGeometry {
    /// Axial coordinates in meters, ascending.
    pub positions: Vec<f64>,
    /// ℓ in meters.
    pub length_scale: f64,
    /// Positions in units of ℓ.
    pub dimensionless: Vec<f64>,
    /// Max |net force| (dimensionless) at the returned positions.
    pub residual: f64,
}

impl CrystalGeometry {
    pub fn n_ions(&self) -> usize {
        self.positions.len()
    }

    /// Position of ion `i` as a point on the trap axis.
    pub fn point(&self, i: usize) -> Result<Vec3> {
        self.positions.get(i).map(|&z| Vec3::on_axis(z)).ok_or(Error::Index {
            index: i,
            len: self.n_ions(),
        })
    }

    pub fn spacing(&self, i: usize, j: usize) -> Result<f64> {
        spacing(self, i, j)
    }

    /// Spacings between neighbouring ions, in meters.
    pub fn adjacent_spacings(&self) -> Vec<f64> {
        self.positions.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

pub fn length_scale(trap: &TrapConfig) -> Result<f64> {
    trap.validate()?;
    let c = constants();
    let q = trap.ion_charge;
    let omega = trap.axial_frequency;
    Ok((q * q / (4.0 * PI * c.vacuum_permittivity * trap.ion_mass * omega * omega)).cbrt())
}

pub fn spacing(geometry: &CrystalGeometry, i: usize, j: usize) -> Result<f64> {
    let len = geometry.n_ions();
    let zi = geometry.positions.get(i).ok_or(Error::Index { index: i, len })?;
    let zj = geometry.positions.get(j).ok_or(Error::Index { index: j, len })?;
    Ok((zj - zi).abs())
}

pub fn equilibrium_positions(n_ions: usize, trap: &TrapConfig) -> Result<CrystalGeometry> {
    if !(1..=MAX_IONS).contains(&n_ions) {
        return Err(Error::config(
            "n_ions",
            format!("must be in 1..={MAX_IONS}, got {n_ions}"),
        ));
    }
    let ell = length_scale(trap)?;
    let (dimensionless, residual) = solve_dimensionless(n_ions)?;
    Ok(CrystalGeometry {
        positions: dimensionless.iter().map(|u| u * ell).collect(),
        length_scale: ell,
        dimensionless,
        residual,
    })
}

/// Net dimensionless force on every ion (harmonic restoring + Coulomb).
pub fn net_forces(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut f = vec![0.0; n];
    for i in 0..n {
        let mut fi = -u[i];
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = u[i] - u[j];
            fi += d.signum() / (d * d);
        }
        f[i] = fi;
    }
    f
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn strictly_ascending(u: &[f64]) -> bool {
    u.windows(2).all(|w| w[1] > w[0])
}

fn jacobian(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let coupling: f64 = (0..n)
                .filter(|&k| k != i)
                .map(|k| 2.0 / (u[i] - u[k]).abs().powi(3))
                .sum();
            -1.0 - coupling
        } else {
            2.0 / (u[i] - u[j]).abs().powi(3)
        }
    })
}

/// Damped Newton iteration from a uniformly spaced, centred start.
fn solve_dimensionless(n: usize) -> Result<(Vec<f64>, f64)> {
    let mut u: Vec<f64> = (0..n).map(|i| i as f64 - (n as f64 - 1.0) / 2.0).collect();
    let mut residual = max_abs(&net_forces(&u));

    for iteration in 0..MAX_ITERATIONS {
        if residual < RESIDUAL_TOLERANCE {
            debug!("crystal: n={n} converged after {iteration} iterations, residual {residual:e}");
            return Ok((u, residual));
        }
        let f = DVector::from_vec(net_forces(&u));
        let step = jacobian(&u).lu().solve(&(-f)).ok_or(Error::Solver {
            iterations: iteration,
            residual,
        })?;

        let mut damping = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a + damping * b).collect();
            if strictly_ascending(&trial) {
                let trial_residual = max_abs(&net_forces(&trial));
                if trial_residual <= residual {
                    u = trial;
                    residual = trial_residual;
                    break;
                }
            }
            damping *= 0.5;
            if damping < 1e-12 {
                return Err(Error::Solver {
                    iterations: iteration,
                    residual,
                });
            }
        }
    }
    if residual < RESIDUAL_TOLERANCE {
        return Ok((u, residual));
    }
    Err(Error::Solver {
        iterations: MAX_ITERATIONS,
        residual,
    })
}
