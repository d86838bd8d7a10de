// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Device-geometry estimates of detuning noise: point-charge fluctuators,
//! uniform fields acting on imperfectly placed dots, and the shift of a
//! harmonic dot in a uniform field.
//!
//! Lengths are nm and energies GHz. Fields are given pre-multiplied by the
//! electron charge, as an energy gradient in GHz/nm.

use crate::error::{invalid, Result};
use crate::model::{detunings, SitePotentials};

/// `e²/(4πε₀)` in eV·nm.
pub const COULOMB_EV_NM: f64 = 1.439_964_547_84;
/// GHz per eV (`e/h`).
pub const GHZ_PER_EV: f64 = 2.417_989_242e5;
/// `h/m_e` in nm²/ns.
pub const H_OVER_ME_NM2_PER_NS: f64 = 7.273_895_1e5;
/// Relative permittivity of silicon.
pub const EPS_R_SI: f64 = 11.7;
/// Relative permittivity of GaAs.
pub const EPS_R_GAAS: f64 = 12.9;
/// Transverse effective mass of silicon, in units of `m_e`.
pub const DEFAULT_EFFECTIVE_MASS: f64 = 0.19;

/// `e²/(4πε₀ε_r)` converted to GHz·nm.
pub fn coulomb_constant(eps_r: f64) -> Result<f64> {
    if !(eps_r > 0.0) || !eps_r.is_finite() {
        return Err(invalid(format!("relative permittivity must be positive, got {eps_r}")));
    }
    Ok(COULOMB_EV_NM * GHZ_PER_EV / eps_r)
}

/// Converts a field in V/m to the energy gradient `e·E` in GHz/nm.
pub fn field_v_per_m_to_ghz_per_nm(field: f64) -> f64 {
    field * 1e-9 * GHZ_PER_EV
}

/// Inverse of [`field_v_per_m_to_ghz_per_nm`].
pub fn field_ghz_per_nm_to_v_per_m(gradient: f64) -> f64 {
    gradient / (1e-9 * GHZ_PER_EV)
}

type Point = [f64; 2];

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// `|p − a|² − |p − b|²` without forming either square.
fn sq_dist_diff(p: Point, a: Point, b: Point) -> f64 {
    dot(sub(b, a), [2.0 * p[0] - a[0] - b[0], 2.0 * p[1] - a[1] - b[1]])
}

/// Positions of the three dots of a linear array, in nm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleDotGeometry {
    positions: [Point; 3],
}

impl TripleDotGeometry {
    pub fn new(positions: [Point; 3]) -> Result<Self> {
        if positions.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("dot positions must be finite"));
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if norm(sub(positions[i], positions[j])) == 0.0 {
                    return Err(invalid(format!("dots {} and {} coincide", i + 1, j + 1)));
                }
            }
        }
        Ok(Self { positions })
    }

    /// Three dots on the x axis at `−d, 0, d`.
    pub fn collinear(d: f64) -> Result<Self> {
        Self::new([[-d, 0.0], [0.0, 0.0], [d, 0.0]])
    }

    pub fn positions(&self) -> [Point; 3] {
        self.positions
    }

    /// Unit vector from dot 1 to dot 3.
    pub fn axis(&self) -> Point {
        let v = sub(self.positions[2], self.positions[0]);
        let n = norm(v);
        [v[0] / n, v[1] / n]
    }

    /// Mean adjacent spacing, `|r₃ − r₁|/2`.
    pub fn spacing(&self) -> f64 {
        norm(sub(self.positions[2], self.positions[0])) / 2.0
    }

    /// Dot coordinates projected on the array axis, relative to dot 1.
    pub fn axis_coordinates(&self) -> [f64; 3] {
        let u = self.axis();
        self.positions.map(|p| dot(sub(p, self.positions[0]), u))
    }
}

/// A point charge near the array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fluctuator {
    pub position: Point,
    pub relative_permittivity: f64,
}

impl Fluctuator {
    pub fn new(position: Point) -> Self {
        Self {
            position,
            relative_permittivity: EPS_R_SI,
        }
    }

    pub fn with_permittivity(mut self, eps_r: f64) -> Self {
        self.relative_permittivity = eps_r;
        self
    }
}

/// Site potentials `k/r_i` from a point charge.
pub fn monopole_potentials(g: &TripleDotGeometry, f: &Fluctuator) -> Result<SitePotentials> {
    let k = coulomb_constant(f.relative_permittivity)?;
    let r = distances(g, f)?;
    Ok(SitePotentials {
        u1: k / r[0],
        u2: k / r[1],
        u3: k / r[2],
    })
}

fn distances(g: &TripleDotGeometry, f: &Fluctuator) -> Result<[f64; 3]> {
    if f.position.iter().any(|v| !v.is_finite()) {
        return Err(invalid("fluctuator position must be finite"));
    }
    let r = g.positions.map(|p| norm(sub(f.position, p)));
    if let Some(i) = r.iter().position(|&v| v == 0.0) {
        return Err(invalid(format!("fluctuator coincides with dot {}", i + 1)));
    }
    Ok(r)
}

/// `(δεd, δεq)` from a point-charge fluctuator.
///
/// Potential differences are built from differences of squared distances
/// so that distant fluctuators keep full relative precision.
pub fn monopole_detunings(g: &TripleDotGeometry, f: &Fluctuator) -> Result<(f64, f64)> {
    let k = coulomb_constant(f.relative_permittivity)?;
    let [r1, r2, r3] = distances(g, f)?;
    let [p1, p2, p3] = g.positions;
    let p = f.position;
    // r_i − r_j
    let d13 = sq_dist_diff(p, p3, p1) / (r1 + r3);
    let a = sq_dist_diff(p, p1, p2) / (r1 + r2);
    let b = sq_dist_diff(p, p3, p2) / (r3 + r2);
    let eps_d = k * d13 / (2.0 * r1 * r3);
    // 1/r2 − (1/r1 + 1/r3)/2 = [r2 (a + b) + 2ab] / (2 r1 r2 r3)
    let eps_q = k * (r2 * (a + b) + 2.0 * a * b) / (2.0 * r1 * r2 * r3);
    Ok((eps_d, eps_q))
}

/// `δεq` induced by a uniform field along the array axis on a triple dot
/// whose middle dot is off-centre.
pub fn asymmetry_quadrupole(g: &TripleDotGeometry, delta_e: f64) -> f64 {
    let [x1, x2, x3] = g.axis_coordinates();
    (-x2 + 0.5 * (x1 + x3)) * delta_e
}

/// `(δεd, δεq)` from a uniform 2D field, with site shifts `δU_i = −r_i·δE`.
pub fn uniform_field_detunings(g: &TripleDotGeometry, field: Point) -> (f64, f64) {
    let [p1, p2, p3] = g.positions;
    let u = |p: Point| -dot(sub(p, p2), field);
    detunings(&SitePotentials {
        u1: u(p1),
        u2: 0.0,
        u3: u(p3),
    })
}

/// First-order energy of a dot centred at `x_i` in a uniform field.
pub fn first_order_site_energy(x_i: f64, delta_e: f64) -> f64 {
    -x_i * delta_e
}

/// Response of a harmonic dot to a uniform field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorShift {
    /// Displacement of the dot centre, nm.
    pub shift_nm: f64,
    /// Energy correction quadratic in the field, GHz.
    pub quadratic_energy_ghz: f64,
}

/// Centre shift `eδE/(mω²)` and energy `−(eδE)²/(2mω²)` for confinement
/// `omega` in rad/ns and effective mass in units of `m_e`.
pub fn shifted_oscillator_terms(omega: f64, delta_e: f64, effective_mass: f64) -> Result<OscillatorShift> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(invalid(format!("confinement frequency must be positive, got {omega}")));
    }
    if !(effective_mass > 0.0) || !effective_mass.is_finite() {
        return Err(invalid(format!(
            "effective mass must be positive, got {effective_mass}"
        )));
    }
    let h_over_m = H_OVER_ME_NM2_PER_NS / effective_mass;
    let w2 = omega * omega;
    Ok(OscillatorShift {
        shift_nm: h_over_m * delta_e / w2,
        quadratic_energy_ghz: -h_over_m * delta_e * delta_e / (2.0 * w2),
    })
}
