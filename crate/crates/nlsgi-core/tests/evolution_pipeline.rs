//! Evolution tests: phase calibration against the direct PDE solver,
//! invariance properties of the reflection rotation, the composed IST
//! stepper, and the reference integrator's convergence order.

use nlsgi_core::cauchy::ProjectorPlan;
use nlsgi_core::evolution::{
    evolve_reflection, ist_solve, mass, reference_solve, EvolutionConfig,
};
use nlsgi_core::grid::make_grids;
use nlsgi_core::potential::{sample_potential, PresetSpec, DEFAULT_BOUNDARY_TOL};
use nlsgi_core::reconstruct::rel_linf_error;
use nlsgi_core::rh::RhOptions;
use nlsgi_core::scattering::{scattering_ab, ScatteringOptions};
use nlsgi_core::C64;

fn sech(amplitude: f64) -> PresetSpec {
    PresetSpec::Sech {
        amplitude,
        center: 0.0,
        phase: 0.0,
    }
}

fn linf(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0f64, f64::max)
}

#[test]
fn calibrated_phase_matches_pde_and_literal_value_does_not() {
    let (xg, zg) = make_grids(20.0, 512, 40.0, 1024).unwrap();
    let f = sample_potential(&sech(0.1), xg, DEFAULT_BOUNDARY_TOL).unwrap();
    let t = 0.1;
    let mut cfg = EvolutionConfig {
        dt: 0.15 * xg.spacing() * xg.spacing(),
        ..EvolutionConfig::default()
    };
    let reference = reference_solve(&f, t, &cfg).unwrap();
    let plan = ProjectorPlan::new(zg, 8);

    cfg.phase_coefficient = 4.0;
    let run4 = ist_solve(
        &f,
        t,
        &cfg,
        &zg,
        &plan,
        ScatteringOptions::default(),
        &RhOptions::default(),
    )
    .unwrap();
    let gap4 = rel_linf_error(&run4.reconstruction.u_rec, &reference.u);
    assert!(gap4 <= 1e-2, "calibrated gap {gap4:.3e}");

    cfg.phase_coefficient = 2.0;
    let run2 = ist_solve(
        &f,
        t,
        &cfg,
        &zg,
        &plan,
        ScatteringOptions::default(),
        &RhOptions::default(),
    )
    .unwrap();
    let gap2 = rel_linf_error(&run2.reconstruction.u_rec, &reference.u);
    assert!(
        gap2 >= 10.0 * gap4,
        "literal exponent should visibly disagree: {gap2:.3e} vs {gap4:.3e}"
    );
}

#[test]
fn ist_at_t_zero_reduces_to_roundtrip() {
    let (xg, zg) = make_grids(20.0, 512, 40.0, 1024).unwrap();
    let f = sample_potential(&sech(0.1), xg, DEFAULT_BOUNDARY_TOL).unwrap();
    let cfg = EvolutionConfig::default();
    let plan = ProjectorPlan::new(zg, 8);
    let run = ist_solve(
        &f,
        0.0,
        &cfg,
        &zg,
        &plan,
        ScatteringOptions::default(),
        &RhOptions::default(),
    )
    .unwrap();
    let err = rel_linf_error(&run.reconstruction.u_rec, &f.u);
    assert!(err <= 1e-6, "t = 0 round trip {err:.3e}");
    assert_eq!(run.delta_invariance, 0.0);
}

#[test]
fn evolution_preserves_scattering_invariants() {
    let (xg, zg) = make_grids(20.0, 512, 40.0, 1024).unwrap();
    let f = sample_potential(&sech(0.2), xg, DEFAULT_BOUNDARY_TOL).unwrap();
    let data = scattering_ab(&f, &zg, ScatteringOptions::default()).unwrap();
    let cfg = EvolutionConfig::default();
    let evolved = evolve_reflection(&data, 0.37, &cfg);

    // a bitwise invariant, gate value preserved
    assert!(evolved.a.iter().zip(data.a.iter()).all(|(x, y)| x == y));
    assert_eq!(evolved.min_abs_a, data.min_abs_a);
    // moduli preserved to rounding, unitarity defect essentially unchanged
    for i in 0..zg.point_count {
        let rel = (evolved.b[i].norm() - data.b[i].norm()).abs() / data.b[i].norm().max(1e-300);
        assert!(rel <= 4.0 * f64::EPSILON);
    }
    assert!((evolved.unitarity_max_err - data.unitarity_max_err).abs() <= 1e-12);
}

#[test]
fn ist_output_scattering_matches_evolved_data() {
    let (xg, zg) = make_grids(20.0, 512, 40.0, 1024).unwrap();
    let f = sample_potential(&sech(0.1), xg, DEFAULT_BOUNDARY_TOL).unwrap();
    let cfg = EvolutionConfig::default();
    let plan = ProjectorPlan::new(zg, 8);
    let t = 0.05;
    let run = ist_solve(
        &f,
        t,
        &cfg,
        &zg,
        &plan,
        ScatteringOptions::default(),
        &RhOptions::default(),
    )
    .unwrap();
    // round-trip error scale of this setup
    let rt = ist_solve(
        &f,
        0.0,
        &cfg,
        &zg,
        &plan,
        ScatteringOptions::default(),
        &RhOptions::default(),
    )
    .unwrap();
    let rt_err = linf(&rt.reconstruction.u_rec, &f.u);

    let u_t = nlsgi_core::PotentialField::from_samples(xg, run.reconstruction.u_rec.clone(), 1.0)
        .unwrap();
    let rescattered = scattering_ab(&u_t, &zg, ScatteringOptions::default()).unwrap();
    let dev = (0..zg.point_count)
        .map(|i| {
            (rescattered.r_plus[i] - run.evolved.r_plus[i])
                .norm()
                .max((rescattered.r_minus[i] - run.evolved.r_minus[i]).norm())
        })
        .fold(0.0f64, f64::max);
    let scale = run
        .evolved
        .r_minus
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    assert!(
        dev / scale <= 10.0 * (rt_err / 0.1).max(1e-9),
        "re-scattered deviation {:.3e} vs round-trip scale {:.3e}",
        dev / scale,
        rt_err / 0.1
    );
}

#[test]
fn ist_preserves_mass_within_roundtrip_error() {
    let (xg, zg) = make_grids(20.0, 512, 40.0, 1024).unwrap();
    let f = sample_potential(&sech(0.1), xg, DEFAULT_BOUNDARY_TOL).unwrap();
    let cfg = EvolutionConfig::default();
    let plan = ProjectorPlan::new(zg, 8);
    let run0 = ist_solve(
        &f,
        0.0,
        &cfg,
        &zg,
        &plan,
        ScatteringOptions::default(),
        &RhOptions::default(),
    )
    .unwrap();
    let rt_mass_err = (mass(&run0.reconstruction.u_rec, xg) - mass(&f.u, xg)).abs();
    let run = ist_solve(
        &f,
        0.1,
        &cfg,
        &zg,
        &plan,
        ScatteringOptions::default(),
        &RhOptions::default(),
    )
    .unwrap();
    let drift = (mass(&run.reconstruction.u_rec, xg) - mass(&f.u, xg)).abs();
    assert!(
        drift <= 2.0 * rt_mass_err.max(1e-12),
        "mass drift {drift:.3e} vs round-trip budget {rt_mass_err:.3e}"
    );
    assert!(run.delta_invariance <= 1e-8);
}

#[test]
fn reference_integrator_is_fourth_order() {
    let (xg, _) = make_grids(20.0, 256, 10.0, 16).unwrap();
    let f = sample_potential(&sech(1.0), xg, DEFAULT_BOUNDARY_TOL).unwrap();
    let t = 0.1;
    let run = |dt: f64| -> Vec<C64> {
        let cfg = EvolutionConfig {
            dt,
            ..EvolutionConfig::default()
        };
        reference_solve(&f, t, &cfg).unwrap().u
    };
    let dt0 = 4e-3;
    let u1 = run(dt0);
    let u2 = run(dt0 / 2.0);
    let u4 = run(dt0 / 4.0);
    let e1 = linf(&u1, &u4);
    let e2 = linf(&u2, &u4);
    assert!(
        e1 / e2 >= 8.0,
        "order ratio {:.2} (e1 = {e1:.3e}, e2 = {e2:.3e})",
        e1 / e2
    );
}

#[test]
fn ist_pde_gap_shrinks_under_refinement() {
    let t = 0.1;
    let gap_at = |n: usize, m: usize| -> f64 {
        let (xg, zg) = make_grids(20.0, n, 40.0, m).unwrap();
        let f = sample_potential(&sech(0.1), xg, DEFAULT_BOUNDARY_TOL).unwrap();
        let cfg = EvolutionConfig {
            dt: 0.15 * xg.spacing() * xg.spacing(),
            ..EvolutionConfig::default()
        };
        let reference = reference_solve(&f, t, &cfg).unwrap();
        let plan = ProjectorPlan::new(zg, 8);
        let run = ist_solve(
            &f,
            t,
            &cfg,
            &zg,
            &plan,
            ScatteringOptions::default(),
            &RhOptions::default(),
        )
        .unwrap();
        rel_linf_error(&run.reconstruction.u_rec, &reference.u)
    };
    let coarse = gap_at(256, 512);
    let fine = gap_at(512, 1024);
    assert!(
        coarse / fine >= 2.0,
        "gap refinement {:.2} ({coarse:.3e} -> {fine:.3e})",
        coarse / fine
    );
}
