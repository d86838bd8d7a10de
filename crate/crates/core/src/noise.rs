// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Charge-noise models.
//!
//! Quasistatic detuning noise is averaged on an equally spaced Gaussian grid.
//! The quadrupolar offset follows the dipolar one through a fixed ratio
//! `kappa` unless independent sampling is requested. Resonant-drive decay
//! uses a Bloch-Redfield rate built from `1/ω` spectral densities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::NoiseOffsets;
use crate::error::{invalid, Result};

/// Ratio `δεq/δεd` used for the gate-fidelity sweeps.
pub const DEFAULT_KAPPA: f64 = 1.0 / 40.0;
pub const DEFAULT_GRID_N: usize = 41;
pub const DEFAULT_RANGE_SIGMAS: f64 = 6.0;
/// Low-frequency cutoff of [`SpectralDensity`] in rad/ns.
pub const DEFAULT_OMEGA_MIN: f64 = 1e-6;

/// How the quadrupolar offset is sampled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correlation {
    /// `δεq = kappa·δεd` on a one-dimensional grid.
    #[default]
    Correlated,
    /// `δεq` drawn from its own Gaussian of width `kappa·sigma_eps` on a
    /// product grid.
    Independent,
}

/// Gaussian quasistatic noise on the detunings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasistaticNoiseModel {
    /// Standard deviation of `δεd` in GHz.
    pub sigma_eps: f64,
    pub kappa: f64,
    pub grid_n: usize,
    pub range_sigmas: f64,
    #[serde(default)]
    pub correlation: Correlation,
}

impl Default for QuasistaticNoiseModel {
    fn default() -> Self {
        Self {
            sigma_eps: 0.0,
            kappa: DEFAULT_KAPPA,
            grid_n: DEFAULT_GRID_N,
            range_sigmas: DEFAULT_RANGE_SIGMAS,
            correlation: Correlation::Correlated,
        }
    }
}

/// One node of the quadrature: offsets and normalised weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraturePoint {
    pub delta_eps_d: f64,
    pub delta_eps_q: f64,
    pub weight: f64,
}

impl QuadraturePoint {
    pub fn offsets(&self) -> NoiseOffsets {
        NoiseOffsets::new(self.delta_eps_d, self.delta_eps_q)
    }
}

impl QuasistaticNoiseModel {
    pub fn with_sigma(sigma_eps: f64) -> Self {
        Self {
            sigma_eps,
            ..Self::default()
        }
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        Self { kappa, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_eps >= 0.0) || !self.sigma_eps.is_finite() {
            return Err(invalid(format!(
                "sigma_eps must be nonnegative, got {}",
                self.sigma_eps
            )));
        }
        if !self.kappa.is_finite() {
            return Err(invalid(format!("kappa must be finite, got {}", self.kappa)));
        }
        if self.grid_n < 1 {
            return Err(invalid("grid_n must be at least 1"));
        }
        if self.grid_n.is_multiple_of(2) {
            return Err(invalid(format!(
                "grid_n must be odd so the zero offset is sampled, got {}",
                self.grid_n
            )));
        }
        if !(self.range_sigmas > 0.0) || !self.range_sigmas.is_finite() {
            return Err(invalid(format!(
                "range_sigmas must be positive, got {}",
                self.range_sigmas
            )));
        }
        Ok(())
    }

    /// Nodes ordered by ascending `δεd` (then `δεq`), weights summing to one.
    pub fn quadrature_grid(&self) -> Result<Vec<QuadraturePoint>> {
        self.validate()?;
        if self.sigma_eps == 0.0 {
            return Ok(vec![QuadraturePoint {
                delta_eps_d: 0.0,
                delta_eps_q: 0.0,
                weight: 1.0,
            }]);
        }
        let nodes = gaussian_nodes(self.sigma_eps, self.grid_n, self.range_sigmas);
        let mut points = match self.correlation {
            Correlation::Correlated => nodes
                .iter()
                .map(|&(x, w)| QuadraturePoint {
                    delta_eps_d: x,
                    delta_eps_q: self.kappa * x,
                    weight: w,
                })
                .collect::<Vec<_>>(),
            Correlation::Independent => {
                let sigma_q = (self.kappa * self.sigma_eps).abs();
                let q_nodes = if sigma_q > 0.0 {
                    gaussian_nodes(sigma_q, self.grid_n, self.range_sigmas)
                } else {
                    vec![(0.0, 1.0)]
                };
                let mut out = Vec::with_capacity(nodes.len() * q_nodes.len());
                for &(x, wx) in &nodes {
                    for &(y, wy) in &q_nodes {
                        out.push(QuadraturePoint {
                            delta_eps_d: x,
                            delta_eps_q: y,
                            weight: wx * wy,
                        });
                    }
                }
                out
            }
        };
        let total: f64 = points.iter().map(|p| p.weight).sum();
        for p in &mut points {
            p.weight /= total;
        }
        Ok(points)
    }
}

/// Symmetric equally spaced nodes on `±range·sigma` with unnormalised
/// Gaussian weights.
fn gaussian_nodes(sigma: f64, n: usize, range_sigmas: f64) -> Vec<(f64, f64)> {
    let half = (n / 2) as i64;
    if half == 0 {
        return vec![(0.0, 1.0)];
    }
    let step = range_sigmas * sigma / half as f64;
    (-half..=half)
        .map(|k| {
            let x = k as f64 * step;
            let z = x / sigma;
            (x, (-0.5 * z * z).exp())
        })
        .collect()
}

/// Classical `1/ω` charge-noise spectrum `S(ω) = A / max(|ω|, ω_min)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub amplitude: f64,
    pub omega_min: f64,
}

impl SpectralDensity {
    pub fn one_over_f(amplitude: f64) -> Result<Self> {
        Self::with_cutoff(amplitude, DEFAULT_OMEGA_MIN)
    }

    pub fn with_cutoff(amplitude: f64, omega_min: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(invalid(format!(
                "spectral amplitude must be nonnegative, got {amplitude}"
            )));
        }
        if !(omega_min > 0.0) || !omega_min.is_finite() {
            return Err(invalid(format!("omega_min must be positive, got {omega_min}")));
        }
        Ok(Self { amplitude, omega_min })
    }

    pub fn zero() -> Self {
        Self {
            amplitude: 0.0,
            omega_min: DEFAULT_OMEGA_MIN,
        }
    }

    /// Evaluates at angular frequency `omega` (rad/ns), symmetrised.
    pub fn eval(&self, omega: f64) -> f64 {
        self.amplitude / omega.abs().max(self.omega_min)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            amplitude: self.amplitude * c,
            ..*self
        }
    }
}

/// Angular frequency in rad/ns of an energy given in GHz.
#[inline]
pub fn angular(freq_ghz: f64) -> f64 {
    2.0 * PI * freq_ghz
}

/// Individual terms of the rotating-frame relaxation rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T1rhoBreakdown {
    /// `2 S_z(ε_ac)`.
    pub longitudinal: f64,
    /// `S_x(ε_ac + 2t)`.
    pub transverse_sum: f64,
    /// `S_x(|ε_ac − 2t|)`.
    pub transverse_difference: f64,
}

impl T1rhoBreakdown {
    pub fn total(&self) -> f64 {
        self.longitudinal + self.transverse_sum + self.transverse_difference
    }
}

fn check_drive(eps_ac: f64, t_logical: f64) -> Result<()> {
    if !(eps_ac >= 0.0) || !eps_ac.is_finite() {
        return Err(invalid(format!("drive amplitude must be nonnegative, got {eps_ac}")));
    }
    if !(t_logical > 0.0) || !t_logical.is_finite() {
        return Err(invalid(format!("tunnel coupling must be positive, got {t_logical}")));
    }
    Ok(())
}

/// Terms of `1/T1ρ`. At the sweet spot the longitudinal spectrum does not
/// couple, so `sweet_spot = true` drops `S_z` entirely.
pub fn t1rho_terms(
    eps_ac: f64,
    t_logical: f64,
    s_z: &SpectralDensity,
    s_x: &SpectralDensity,
    sweet_spot: bool,
) -> Result<T1rhoBreakdown> {
    check_drive(eps_ac, t_logical)?;
    let w_ac = angular(eps_ac);
    let w_2t = angular(2.0 * t_logical);
    Ok(T1rhoBreakdown {
        longitudinal: if sweet_spot { 0.0 } else { 2.0 * s_z.eval(w_ac) },
        transverse_sum: s_x.eval(w_ac + w_2t),
        transverse_difference: s_x.eval(w_ac - w_2t),
    })
}

/// `1/T1ρ = 2 S_z(ε_ac) + S_x(ε_ac + 2t) + S_x(ε_ac − 2t)` in 1/ns.
pub fn t1rho_rate(eps_ac: f64, t_logical: f64, s_z: &SpectralDensity, s_x: &SpectralDensity) -> Result<f64> {
    Ok(t1rho_terms(eps_ac, t_logical, s_z, s_x, false)?.total())
}

/// Power of `kappa` by which triple-dot rates are suppressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuppressionExponent {
    /// Rates scale with the amplitude ratio itself.
    Linear,
    /// Rates scale with spectral density, i.e. amplitude squared.
    Quadratic,
}

/// Ratio of triple-dot to double-dot resonant decay rates when quadrupolar
/// noise amplitudes are `kappa` times the dipolar ones.
pub fn rate_ratio_cq_cd(kappa: f64, exponent: SuppressionExponent) -> Result<f64> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(invalid(format!("kappa must lie in (0, 1], got {kappa}")));
    }
    Ok(match exponent {
        SuppressionExponent::Linear => kappa,
        SuppressionExponent::Quadratic => kappa * kappa,
    })
}
