// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chargeq::calibrate::{sensitivity_coefficient, SensitivityOrder};
use chargeq::dynamics::{
    evolve, evolve_driven_observed, sweet_spot_eigenstates, validate_density_matrix, DriveSegment, NoiseOffsets,
    PulseSchedule, PulseSegment, SegmentParams,
};
use chargeq::geometry::{monopole_detunings, Fluctuator, TripleDotGeometry};
use chargeq::model::{h_cq_position, CdParams, CqParams};
use chargeq::noise::{t1rho_terms, Correlation, QuasistaticNoiseModel, SpectralDensity};
use chargeq::qmath::{c64, herm_eigenvalues, unitarity_defect, ComplexMatrix};
use chargeq::spectrum::{
    dsplitting_cd, dsplitting_cq, expansion_cd, expansion_cq, leakage_overlap, splitting_cd_numeric,
    splitting_cq_exact, QubitKind,
};
use chargeq::tomography::{
    gate_infidelity, infidelity_curve, log_log_slope, process_fidelity, process_of_schedule, process_of_unitary,
    GateKind,
};
use chargeq::twoqubit::{cnot_protocol, leak_through, population_transfer, truth_table_fidelity};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Centered first and second derivatives of `f` at 0, Richardson-extrapolated.
fn derivatives(f: impl Fn(f64) -> f64, h: f64) -> (f64, f64) {
    let f0 = f(0.0);
    let d1 = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    let d2 = |h: f64| (f(h) - 2.0 * f0 + f(-h)) / (h * h);
    ((4.0 * d1(h / 2.0) - d1(h)) / 3.0, (4.0 * d2(h / 2.0) - d2(h)) / 3.0)
}

fn rel(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let eps: f64 = rng.random_range(-20.0..20.0);
        let t: f64 = rng.random_range(1.0..20.0);
        let h = 1e-2 * t;

        let e = expansion_cd(eps, t).map_err(err)?;
        let cd = CdParams::new(eps, t).map_err(err)?;
        let (d1, d2) = derivatives(|x| splitting_cd_numeric(&cd.with_offset(x)), h);
        let c0 = splitting_cd_numeric(&cd);
        worst = worst
            .max(rel(e.constant, c0, 1.0 / t))
            .max(rel(e.linear_coeff, d1, 1e-3))
            .max(rel(e.quadratic_coeff, d2 / 2.0, 1e-3 / t));

        let e = expansion_cq(eps, t).map_err(err)?;
        let cq = CqParams::symmetric(eps, t).map_err(err)?;
        // the leakage level sits between the qubit levels; step well inside
        // the closest spacing
        let levels = herm_eigenvalues(&h_cq_position(&cq)).map_err(err)?;
        let h = 1e-2 * (levels[1] - levels[0]).min(levels[2] - levels[1]);
        let (lin, _) = derivatives(|x| splitting_cq_exact(&cq.with_offsets(0.0, x)), h);
        let (_, quad) = derivatives(|x| splitting_cq_exact(&cq.with_offsets(x, 0.0)), h);
        worst = worst
            .max(rel(e.constant, splitting_cq_exact(&cq), 1.0 / t))
            .max(rel(e.linear_coeff, lin, 1e-3))
            .max(rel(e.quadratic_coeff, quad / 2.0, 1e-3 / t));
    }
    Ok((worst < 1e-6, format!("max relative deviation {worst:.2e} (tol 1e-6)")))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let d: f64 = rng.random_range(-20.0..20.0);
        let t: f64 = rng.random_range(0.1..20.0);
        let oracle = d * d / (d * d + t * t);
        worst = worst.max((leakage_overlap(d, t).map_err(err)? - oracle).abs());
    }
    Ok((worst < 1e-12, format!("max deviation {worst:.2e} (tol 1e-12)")))
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for t in [1.0, 5.0, 10.0, 20.0] {
        let (dd, dq) = dsplitting_cq(0.0, 0.0, t);
        worst = worst.max(dd.abs()).max(dq.abs()).max(dsplitting_cd(0.0, t).abs());
    }
    Ok((worst < 1e-8, format!("max |dE01| {worst:.2e} (tol 1e-8)")))
}

fn sweep_sigmas() -> Vec<f64> {
    let n = 9;
    (0..n)
        .map(|k| 10f64.powf(0.03f64.log10() + (0.3f64.log10() - 0.03f64.log10()) * k as f64 / (n - 1) as f64))
        .collect()
}

fn curves(kappa: f64) -> Result<Vec<Vec<(f64, f64)>>, String> {
    let template = QuasistaticNoiseModel::with_sigma(0.0).with_kappa(kappa);
    GateKind::ALL
        .iter()
        .map(|&g| infidelity_curve(g, 10.0, &sweep_sigmas(), &template).map_err(err))
        .collect()
}

fn criterion_4() -> Outcome {
    let c = curves(1.0 / 40.0)?;
    let cd = log_log_slope(&c[0]).map_err(err)?;
    let cq = log_log_slope(&c[1]).map_err(err)?;
    let ok = (cd - 2.0).abs() <= 0.1 && (cq - 2.0).abs() <= 0.1;
    Ok((ok, format!("slopes CD {cd:.4}, CQ {cq:.4} (2.0 ± 0.1)")))
}

fn criterion_5() -> Outcome {
    let c = curves(1.0 / 40.0)?;
    let ratios: Vec<f64> = c[1].iter().zip(&c[2]).map(|(b, k)| b.1 / k.1).collect();
    let window: Vec<f64> = c[1]
        .iter()
        .zip(&ratios)
        .filter(|(_, r)| (10.0..=1000.0).contains(*r))
        .map(|(p, _)| p.0)
        .collect();
    let c0 = curves(0.0)?;
    let slope = log_log_slope(&c0[2]).map_err(err)?;
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let ok = !window.is_empty() && (slope - 4.0).abs() <= 0.3;
    let span = match (window.first(), window.last()) {
        (Some(a), Some(b)) => format!("[{a:.3}, {b:.3}] GHz"),
        _ => "none".into(),
    };
    Ok((
        ok,
        format!("ratio range {lo:.1}..{hi:.1}, window {span}, kappa=0 composite slope {slope:.4} (4.0 ± 0.3)"),
    ))
}

fn criterion_6() -> Outcome {
    let bare = sensitivity_coefficient(
        &GateKind::BareXpiCq.schedule(10.0).map_err(err)?,
        SensitivityOrder::Second,
    )
    .map_err(err)?;
    let comp = sensitivity_coefficient(
        &GateKind::CompositeXpiCq.schedule(10.0).map_err(err)?,
        SensitivityOrder::Second,
    )
    .map_err(err)?;
    let ok = comp.abs() <= 1e-3 * bare.abs();
    Ok((ok, format!("c2 bare {bare:.4e}, composite {comp:.4e}")))
}

fn criterion_7() -> Outcome {
    let d = 200.0;
    let g = TripleDotGeometry::collinear(d).map_err(err)?;
    let mut worst: f64 = 0.0;
    let mut shown = Vec::new();
    for (r, expect) in [(1000.0, 0.200), (2000.0, 0.100), (3000.0, 0.067)] {
        let (dd, dq) = monopole_detunings(&g, &Fluctuator::new([-r, 0.0])).map_err(err)?;
        let ratio = dq / dd;
        worst = worst.max((ratio + d / r).abs());
        if (ratio.abs() - expect).abs() > 5e-4 {
            return Ok((
                false,
                format!("|ratio| {:.4} at R = {r} nm, expected {expect}", ratio.abs()),
            ));
        }
        shown.push(format!("{:.3}", ratio.abs()));
    }
    Ok((
        worst <= 1e-12,
        format!("|ratio| {{{}}}, max deviation from -d/R {worst:.2e}", shown.join(", ")),
    ))
}

fn criterion_8() -> Outcome {
    let s_x = SpectralDensity::one_over_f(1.0).map_err(err)?;
    let rate = t1rho_terms(1.0, 2.0, &SpectralDensity::zero(), &s_x, false)
        .map_err(err)?
        .total();
    // ω_ac = 2π, ω_2t = 8π: 1/(10π) + 1/(6π)
    let hand = 1.0 / (10.0 * PI) + 1.0 / (6.0 * PI);
    let dev = (rate - hand).abs();
    let s_z = SpectralDensity::one_over_f(1.0).map_err(err)?;
    let sweet = t1rho_terms(1.0, 2.0, &s_z, &s_x, true).map_err(err)?;
    let off = t1rho_terms(1.0, 2.0, &s_z, &s_x, false).map_err(err)?;
    let ok = dev <= 1e-12 && sweet.longitudinal == 0.0 && off.longitudinal > 0.0;
    Ok((
        ok,
        format!(
            "rate {rate:.15} vs {hand:.15}, sweet-spot S_z term {}",
            sweet.longitudinal
        ),
    ))
}

fn criterion_9() -> Outcome {
    let (t, nu, eps_ac) = (5.0, 10.0, 0.2);
    let base = SegmentParams::Cq(CqParams::symmetric(0.0, t).map_err(err)?);
    let seg = DriveSegment::new(base, eps_ac, nu, 0.0, 15.0, 1.0 / (40.0 * nu)).map_err(err)?;
    let (lower, upper) = sweet_spot_eigenstates(QubitKind::Cq);
    let excited = |rho: &ComplexMatrix| -> f64 {
        let v = rho * upper.as_slice();
        upper.iter().zip(&v).map(|(a, b)| (a.conj() * b).re).sum()
    };
    let mut prev = (0.0, 0.0);
    let mut up = None;
    let mut down = None;
    evolve_driven_observed(
        &ComplexMatrix::projector(&lower),
        &seg,
        NoiseOffsets::ZERO,
        |time, rho| {
            let p = excited(rho);
            let cross = |(t0, p0): (f64, f64)| t0 + (0.5 - p0) * (time - t0) / (p - p0);
            if up.is_none() && prev.1 < 0.5 && p >= 0.5 {
                up = Some(cross(prev));
            } else if up.is_some() && down.is_none() && prev.1 > 0.5 && p <= 0.5 {
                down = Some(cross(prev));
            }
            prev = (time, p);
        },
    )
    .map_err(err)?;
    let (Some(a), Some(b)) = (up, down) else {
        return Ok((false, "no full Rabi half-cycle within 15 ns".into()));
    };
    let period = 2.0 * (b - a);
    let expected = 2.0 / eps_ac;
    let dev = (period - expected).abs() / expected;
    Ok((
        dev <= 0.05,
        format!("period {period:.4} ns vs {expected} ns ({:.2}%)", 100.0 * dev),
    ))
}

fn criterion_10() -> Outcome {
    let (t2, j) = (1.0, 10.0);
    let s = cnot_protocol(t2, j, -1000.0).map_err(err)?;
    let fid = truth_table_fidelity(&s).map_err(err)?;
    let p = population_transfer(&s).map_err(err)?;
    // control |1̃>: inputs 10 and 11 should stay put
    let leak = p[3][2].max(p[2][3]);
    let bound = 1.0 / 401.0 + 1e-3;
    let ok = fid >= 0.99 && leak <= bound;
    Ok((
        ok,
        format!(
            "fidelity {fid:.6}, leak-through {leak:.3e} (oracle {:.3e}, bound {bound:.3e})",
            leak_through(t2, j)
        ),
    ))
}

fn random_schedule(rng: &mut ChaCha8Rng, kind: QubitKind) -> Result<PulseSchedule, String> {
    let n = rng.random_range(1..5);
    let mut s = PulseSchedule::new(kind);
    for _ in 0..n {
        let params = match kind {
            QubitKind::Cq => SegmentParams::Cq(
                CqParams::new(
                    rng.random_range(-10.0..10.0),
                    rng.random_range(-20.0..20.0),
                    rng.random_range(0.0..15.0),
                    rng.random_range(0.0..15.0),
                )
                .map_err(err)?,
            ),
            QubitKind::Cd => SegmentParams::Cd(
                CdParams::new(rng.random_range(-20.0..20.0), rng.random_range(0.0..15.0)).map_err(err)?,
            ),
        };
        s.push(PulseSegment::new(params, rng.random_range(0.0..0.3)).map_err(err)?)
            .map_err(err)?;
    }
    Ok(s)
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut self_worst: f64 = 0.0;
    let mut oracle_worst: f64 = 0.0;
    for k in 0..20 {
        let kind = if k % 2 == 0 { QubitKind::Cq } else { QubitKind::Cd };
        let a = random_schedule(&mut rng, kind)?;
        let b = random_schedule(&mut rng, kind)?;
        let zero = QuasistaticNoiseModel::with_sigma(0.0);
        self_worst = self_worst.max(gate_infidelity(&a, &zero).map_err(err)?.abs());

        let u = a.propagator(NoiseOffsets::ZERO).map_err(err)?;
        let v = b.propagator(NoiseOffsets::ZERO).map_err(err)?;
        let f = process_fidelity(
            &process_of_unitary(&u, kind).map_err(err)?,
            &process_of_unitary(&v, kind).map_err(err)?,
        )
        .map_err(err)?;
        let w = &u.adjoint() * &v;
        let tr = w[(0, 0)] + w[(1, 1)];
        oracle_worst = oracle_worst.max((f - tr.norm_sqr() / 4.0).abs());
    }
    let ok = self_worst <= 1e-9 && oracle_worst <= 1e-10;
    Ok((
        ok,
        format!("self-infidelity {self_worst:.2e} (tol 1e-9), oracle deviation {oracle_worst:.2e} (tol 1e-10)"),
    ))
}

fn run_binary(args: &[&str], threads: &str) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_chargeq"))
        .args(args)
        .env("CHARGEQ_THREADS", threads)
        .output()
        .map_err(err)?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn determinism(dir: &Path) -> Result<bool, String> {
    let config = dir.join("sweep.json");
    fs::write(
        &config,
        r#"{"command": "sweep", "output": "sweep.csv", "params": {"sigma_eps_ghz": [0.01, 0.05, 0.1, 0.2, 0.3]}}"#,
    )
    .map_err(err)?;
    let out = dir.join("sweep.csv");
    let mut runs = Vec::new();
    for threads in ["1", "4", "4"] {
        run_binary(&["run", config.to_str().ok_or("non-UTF-8 temp path")?], threads)?;
        runs.push(fs::read(&out).map_err(err)?);
    }
    let json = dir.join("gate.json");
    let mut gate_runs = Vec::new();
    for threads in ["1", "3"] {
        run_binary(
            &[
                "gate",
                "--format",
                "json",
                "-o",
                json.to_str().ok_or("non-UTF-8 temp path")?,
            ],
            threads,
        )?;
        gate_runs.push(fs::read(&json).map_err(err)?);
    }
    Ok(runs.windows(2).all(|w| w[0] == w[1]) && gate_runs[0] == gate_runs[1])
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut unitary: f64 = 0.0;
    let mut states_ok = true;
    let mut weights: f64 = 0.0;
    for k in 0..50 {
        let kind = if k % 2 == 0 { QubitKind::Cq } else { QubitKind::Cd };
        let s = random_schedule(&mut rng, kind)?;
        let noise = NoiseOffsets::new(rng.random_range(-1.0..1.0), rng.random_range(-0.1..0.1));
        unitary = unitary.max(unitarity_defect(&s.propagator(noise).map_err(err)?));

        let d = kind.dim();
        let mut mixed = ComplexMatrix::zeros(d);
        mixed[(0, 0)] = c64(0.7, 0.0);
        mixed[(1, 1)] = c64(0.3, 0.0);
        mixed[(0, 1)] = c64(0.2, 0.1);
        mixed[(1, 0)] = c64(0.2, -0.1);
        let rho = evolve(&mixed, &s, noise).map_err(err)?;
        states_ok &= validate_density_matrix(&rho, d).is_ok();

        let model = QuasistaticNoiseModel {
            grid_n: 2 * rng.random_range(0..20) + 1,
            correlation: if k % 3 == 0 {
                Correlation::Independent
            } else {
                Correlation::Correlated
            },
            ..QuasistaticNoiseModel::with_sigma(rng.random_range(0.0..1.0))
        };
        let grid = model.quadrature_grid().map_err(err)?;
        weights = weights.max((grid.iter().map(|p| p.weight).sum::<f64>() - 1.0).abs());
        states_ok &= process_of_schedule(&s, &model).map_err(err)?.validate().is_ok();
    }
    let dir = tempfile::tempdir().map_err(err)?;
    let deterministic = determinism(dir.path())?;
    let ok = unitary < 1e-10 && states_ok && weights < 1e-12 && deterministic;
    Ok((
        ok,
        format!(
            "unitarity defect {unitary:.2e}, states valid {states_ok}, weight error {weights:.2e}, \
             byte-identical re-runs {deterministic}"
        ),
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("expansion coefficients vs finite differences", criterion_1),
        ("leakage overlap closed form", criterion_2),
        ("double sweet spot", criterion_3),
        ("bare-gate infidelity scaling", criterion_4),
        ("composite improvement window and slope", criterion_5),
        ("second-order sensitivity cancellation", criterion_6),
        ("on-axis monopole ratio", criterion_7),
        ("rotating-frame relaxation rate", criterion_8),
        ("AC Rabi period", criterion_9),
        ("two-qubit CNOT", criterion_10),
        ("process tomography", criterion_11),
        ("properties and determinism", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
