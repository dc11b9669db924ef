//! Riemann–Hilbert solve tests: one-term Neumann dominance at small
//! amplitude, residual verification, homogeneity, stability of the solution
//! norm under spectral-window doubling, branch equivalence at the seam, and
//! the boundedness of the solution-to-data ratio across amplitudes.

use nlsgi_core::cauchy::{delta_solve, projector, ProjectorPlan, Side};
use nlsgi_core::grid::{make_grids, SpatialGrid, SpectralGrid};
use nlsgi_core::potential::{sample_potential, PresetSpec, DEFAULT_BOUNDARY_TOL};
use nlsgi_core::reconstruct::reconstruct_point;
use nlsgi_core::rh::{
    build_jump, solve_rh_positive, solve_rh_with_jump, Branch, RHSolveState, RhOptions,
};
use nlsgi_core::scattering::{scattering_ab, ScatteringData, ScatteringOptions};
use nlsgi_core::{c64, C64};

const GATE: f64 = 0.6;

fn sech_data(amplitude: f64, n: usize, z: f64, m: usize) -> ScatteringData {
    let (xg, zg) = make_grids(20.0, n, z, m).unwrap();
    let f = sample_potential(
        &PresetSpec::Sech {
            amplitude,
            center: 0.0,
            phase: 0.0,
        },
        xg,
        DEFAULT_BOUNDARY_TOL,
    )
    .unwrap();
    scattering_ab(&f, &zg, ScatteringOptions::default()).unwrap()
}

fn norm2(v: &[C64], dz: f64) -> f64 {
    (v.iter().map(|x| x.norm_sqr()).sum::<f64>() * dz).sqrt()
}

/// Discrete 2-norm of `M - I` over all four solved components.
fn m_minus_i_norm(st: &RHSolveState, dz: f64) -> f64 {
    let d1: Vec<C64> = st.xi[0].iter().map(|v| v - c64(1.0, 0.0)).collect();
    let d4: Vec<C64> = st.eta[1].iter().map(|v| v - c64(1.0, 0.0)).collect();
    (norm2(&d1, dz).powi(2)
        + norm2(&st.xi[1], dz).powi(2)
        + norm2(&st.eta[0], dz).powi(2)
        + norm2(&d4, dz).powi(2))
    .sqrt()
}

#[test]
fn one_term_neumann_dominates_at_small_amplitude() {
    // A = 1e-3: xi_-^{(2)} is P^-(r_- e^{2i(z+1)x}) up to O(||r||^2)
    let data = sech_data(1e-3, 512, 20.0, 1024);
    let plan = ProjectorPlan::new(data.zgrid, 8);
    let opts = RhOptions::default();
    let x = 0.7;
    let st = solve_rh_positive(x, &data, &plan, &opts, GATE).unwrap();
    let jump = build_jump(x, &data, None, GATE).unwrap();
    let one_term = projector(&jump.r21, Side::Minus, &plan);
    let dz = data.zgrid.spacing();
    let diff: Vec<C64> = st.xi[1]
        .iter()
        .zip(one_term.iter())
        .map(|(a, b)| a - b)
        .collect();
    let dev = norm2(&diff, dz);
    assert!(dev <= 1e-5, "one-term Neumann discrepancy {dev:.3e}");
}

#[test]
fn residuals_meet_tolerance_on_both_branches() {
    let data = sech_data(0.2, 512, 20.0, 1024);
    let plan = ProjectorPlan::new(data.zgrid, 8);
    let opts = RhOptions::default();
    let deltas = delta_solve(&data.r_plus, &data.r_minus, &plan).unwrap();
    for x in [0.0, 0.5, 3.0, 11.0] {
        let st = solve_rh_positive(x, &data, &plan, &opts, GATE).unwrap();
        assert!(st.residual <= opts.rh_tol, "x = {x}: residual {:.3e}", st.residual);
    }
    for x in [-0.5, -4.0, -12.0] {
        let jump = build_jump(x, &data, Some(&deltas), GATE).unwrap();
        let st = solve_rh_with_jump(&jump, Branch::NegativeX, &plan, &opts).unwrap();
        assert!(st.residual <= opts.rh_tol, "x = {x}: residual {:.3e}", st.residual);
        // the delta jump identity feeding the conjugation stays satisfied
        let max_jump_resid = (0..data.zgrid.point_count)
            .map(|i| {
                let q = data.r_plus[i].conj() * data.r_minus[i];
                (deltas.delta_plus[i] - deltas.delta_minus[i] - q * deltas.delta_minus[i]).norm()
            })
            .fold(0.0f64, f64::max);
        assert!(max_jump_resid <= 1e-6);
    }
}

#[test]
fn doubling_reflection_at_most_quadruples_deviation() {
    // Neumann second-order remainder: for small data, doubling r at most
    // quadruples ||M - I|| (it roughly doubles it).
    let plan_data = sech_data(0.01, 512, 20.0, 1024);
    let plan = ProjectorPlan::new(plan_data.zgrid, 8);
    let opts = RhOptions::default();
    let dz = plan_data.zgrid.spacing();
    for x in [0.4, 2.0] {
        let st1 = solve_rh_positive(x, &plan_data, &plan, &opts, GATE).unwrap();
        let mut doubled = plan_data.clone();
        for i in 0..doubled.zgrid.point_count {
            doubled.b[i] *= 2.0;
            doubled.r[i] *= 2.0;
            doubled.r_plus[i] *= 2.0;
            doubled.r_minus[i] *= 2.0;
        }
        let st2 = solve_rh_positive(x, &doubled, &plan, &opts, GATE).unwrap();
        let (n1, n2) = (m_minus_i_norm(&st1, dz), m_minus_i_norm(&st2, dz));
        assert!(n2 <= 4.0 * n1 * (1.0 + 1e-6), "x = {x}: {n1:.3e} -> {n2:.3e}");
        assert!(n2 >= 1.5 * n1);
    }
}

#[test]
fn solution_norm_stable_under_window_doubling() {
    // components minus asymptotics lie in discrete L^2 over z: the norm is
    // stable (ratio <= 1.1) when the spectral window doubles at fixed dz
    let d20 = sech_data(0.2, 512, 20.0, 1024);
    let d40 = sech_data(0.2, 512, 40.0, 2048);
    let p20 = ProjectorPlan::new(d20.zgrid, 8);
    let p40 = ProjectorPlan::new(d40.zgrid, 8);
    let opts = RhOptions::default();
    let x = 1.3;
    let s20 = solve_rh_positive(x, &d20, &p20, &opts, GATE).unwrap();
    let s40 = solve_rh_positive(x, &d40, &p40, &opts, GATE).unwrap();
    let (n20, n40) = (
        m_minus_i_norm(&s20, d20.zgrid.spacing()),
        m_minus_i_norm(&s40, d40.zgrid.spacing()),
    );
    let ratio = (n40 / n20).max(n20 / n40);
    assert!(ratio <= 1.1, "window-doubling ratio {ratio:.4}");
}

#[test]
fn branch_equivalence_at_the_seam() {
    // positive system at x = 0 and the delta-conjugated system at x = 0
    // reconstruct the same value within 10x rh_tol
    let data = sech_data(0.1, 1024, 40.0, 2048);
    let plan = ProjectorPlan::new(data.zgrid, 8);
    let opts = RhOptions::default();
    let dz = data.zgrid.spacing();
    let deltas = delta_solve(&data.r_plus, &data.r_minus, &plan).unwrap();

    let st_pos = solve_rh_positive(0.0, &data, &plan, &opts, GATE).unwrap();
    let jump_pos = build_jump(0.0, &data, None, GATE).unwrap();
    let u_pos = reconstruct_point(&st_pos, &jump_pos, dz);

    let jump_neg = build_jump(0.0, &data, Some(&deltas), GATE).unwrap();
    let st_neg = solve_rh_with_jump(&jump_neg, Branch::NegativeX, &plan, &opts).unwrap();
    let u_neg = reconstruct_point(&st_neg, &jump_neg, dz);

    assert!(
        (u_pos - u_neg).norm() <= 10.0 * opts.rh_tol,
        "seam mismatch {:.3e}",
        (u_pos - u_neg).norm()
    );
}

#[test]
fn deviation_to_data_ratio_bounded_across_amplitudes() {
    // ||M - I||_2 <= C (||r+||_2 + ||r-||_2) with C stable over amplitudes
    let zg = SpectralGrid::new(40.0, 2048).unwrap();
    let plan = ProjectorPlan::new(zg, 8);
    let opts = RhOptions::default();
    let dz = zg.spacing();
    let mut ratios = Vec::new();
    for amp in [0.05, 0.1, 0.2, 0.4] {
        let f = sample_potential(
            &PresetSpec::Sech {
                amplitude: amp,
                center: 0.0,
                phase: 0.0,
            },
            SpatialGrid::new(20.0, 1024).unwrap(),
            DEFAULT_BOUNDARY_TOL,
        )
        .unwrap();
        let data = scattering_ab(&f, &zg, ScatteringOptions::default()).unwrap();
        let st = solve_rh_positive(0.0, &data, &plan, &opts, GATE).unwrap();
        let r_norm = norm2(&data.r_plus, dz) + norm2(&data.r_minus, dz);
        ratios.push(m_minus_i_norm(&st, dz) / r_norm);
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(
        (max - min) / min < 0.5,
        "ratio variation {:.1}% over {ratios:?}",
        100.0 * (max - min) / min
    );
}

#[test]
fn jump_modulus_preserved_by_delta_modification() {
    let data = sech_data(0.3, 512, 20.0, 1024);
    let plan = ProjectorPlan::new(data.zgrid, 8);
    let deltas = delta_solve(&data.r_plus, &data.r_minus, &plan).unwrap();
    let jump = build_jump(-1.0, &data, Some(&deltas), GATE).unwrap();
    assert!(jump.delta_modified);
    // |r_{+-,delta}| = |r_+-|
    let max_dev = (0..data.zgrid.point_count)
        .map(|i| {
            (jump.r12[i].norm() - data.r_plus[i].norm())
                .abs()
                .max((jump.r21[i].norm() - data.r_minus[i].norm()).abs())
        })
        .fold(0.0f64, f64::max);
    assert!(max_dev <= 1e-8, "modulus deviation {max_dev:.3e}");
}
