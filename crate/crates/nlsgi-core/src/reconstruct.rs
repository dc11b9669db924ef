//! Potential reconstruction from solved Riemann–Hilbert states: the
//! `u(x)` quadrature, the companion `conj(w)` display demoted to a residual
//! diagnostic, and the parallel sweep over the spatial grid.

use crate::cauchy::{DeltaSet, ProjectorPlan};
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::rh::{build_jump, solve_rh_with_jump, Branch, JumpData, RHSolveState, RhOptions};
use crate::scattering::ScatteringData;
use crate::C64;
use rayon::prelude::*;

/// Reconstructed field with its diagnostics.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub u_rec: Vec<C64>,
    /// pointwise magnitude of the mismatch between the `conj(w)` display
    /// and `w` computed from `u_rec`
    pub w_residual: Vec<f64>,
    /// linear-extrapolation gap of `u_rec` across `x = 0`
    pub seam_gap: f64,
    pub max_rh_residual: f64,
    pub total_iterations: usize,
    pub krylov_solves: usize,
}

/// `u(x)` from `i u = (2/(i pi)) \int conj(r_+) e^{-2i(z+1)x} xi^{(1)} dz`
/// on either branch (the jump data carries the delta modification).
pub fn reconstruct_point(state: &RHSolveState, jump: &JumpData, dz: f64) -> C64 {
    let mut acc = C64::ZERO;
    for i in 0..jump.r12.len() {
        acc += jump.r12[i] * state.xi[0][i];
    }
    // i u = (2/(i pi)) S  =>  u = -(2/pi) S
    -(2.0 / std::f64::consts::PI) * acc * dz
}

/// Positive-branch point reconstruction (`x >= 0`).
pub fn reconstruct_point_positive(state: &RHSolveState, jump: &JumpData, dz: f64) -> C64 {
    assert_eq!(state.branch, Branch::PositiveX);
    reconstruct_point(state, jump, dz)
}

/// Negative-branch point reconstruction (`x < 0`), from the delta-conjugated
/// state.
pub fn reconstruct_point_negative(state: &RHSolveState, jump: &JumpData, dz: f64) -> C64 {
    assert_eq!(state.branch, Branch::NegativeX);
    reconstruct_point(state, jump, dz)
}

/// The companion display: `(1/pi) \int r_- e^{2i(z+1)x} eta^{(2)} dz`,
/// which equals `conj(w)(x)` for the exact solution.
pub fn w_display(state: &RHSolveState, jump: &JumpData, dz: f64) -> C64 {
    let mut acc = C64::ZERO;
    for i in 0..jump.r21.len() {
        acc += jump.r21[i] * state.eta[1][i];
    }
    acc * dz / std::f64::consts::PI
}

/// `| w-display - conj(w from u_rec) |` at grid index `j`, with `w`
/// computed from the reconstructed field by the spectral rule.
pub fn w_residual(
    state: &RHSolveState,
    jump: &JumpData,
    w_from_u_rec: &[C64],
    j: usize,
    dz: f64,
) -> f64 {
    (w_display(state, jump, dz) - w_from_u_rec[j].conj()).norm()
}

/// Reconstruct the whole field: positive branch for `x >= 0`, the
/// delta-conjugated system for `x < 0`, swept in parallel over the grid.
pub fn reconstruct_field(
    scattering: &ScatteringData,
    deltas: &DeltaSet,
    xgrid: SpatialGrid,
    plan: &ProjectorPlan,
    opts: &RhOptions,
    gate_tol: f64,
) -> Result<ReconstructionResult> {
    scattering.check_gate(gate_tol)?;
    let dz = scattering.zgrid.spacing();
    let nodes = xgrid.nodes();

    struct PerX {
        u: C64,
        w_int: C64,
        iterations: usize,
        residual: f64,
        used_krylov: bool,
    }

    let results: Vec<std::result::Result<PerX, (f64, Error)>> = nodes
        .par_iter()
        .map(|&x| {
            let run = || -> Result<PerX> {
                let (jump, branch) = if x >= 0.0 {
                    (build_jump(x, scattering, None, gate_tol)?, Branch::PositiveX)
                } else {
                    (
                        build_jump(x, scattering, Some(deltas), gate_tol)?,
                        Branch::NegativeX,
                    )
                };
                let state = solve_rh_with_jump(&jump, branch, plan, opts)?;
                Ok(PerX {
                    u: reconstruct_point(&state, &jump, dz),
                    w_int: w_display(&state, &jump, dz),
                    iterations: state.iterations,
                    residual: state.residual,
                    used_krylov: state.used_krylov,
                })
            };
            run().map_err(|e| (x, e))
        })
        .collect();

    let mut u_rec = Vec::with_capacity(nodes.len());
    let mut w_int = Vec::with_capacity(nodes.len());
    let mut total_iterations = 0;
    let mut max_rh_residual: f64 = 0.0;
    let mut krylov_solves = 0;
    let mut failures: Vec<String> = Vec::new();
    for r in results {
        match r {
            Ok(px) => {
                u_rec.push(px.u);
                w_int.push(px.w_int);
                total_iterations += px.iterations;
                max_rh_residual = max_rh_residual.max(px.residual);
                krylov_solves += px.used_krylov as usize;
            }
            Err((x, e)) => failures.push(format!("x = {x:.6}: {e}")),
        }
    }
    if !failures.is_empty() {
        let shown = failures.iter().take(4).cloned().collect::<Vec<_>>().join("; ");
        return Err(Error::NonConvergence {
            context: format!(
                "reconstruction sweep failed at {} node(s): {shown}",
                failures.len()
            ),
            iterations: 0,
            contraction: f64::NAN,
        });
    }

    // w consistency: compare the display against w computed from u_rec
    let w_rec = crate::potential::compute_w(&u_rec, xgrid);
    let w_residual: Vec<f64> = w_int
        .iter()
        .zip(w_rec.iter())
        .map(|(wi, wr)| (wi - wr.conj()).norm())
        .collect();

    // seam: linear extrapolation of the negative branch onto x = 0
    let zi = xgrid.zero_index();
    let seam_gap = if zi >= 2 {
        (2.0 * u_rec[zi - 1] - u_rec[zi - 2] - u_rec[zi]).norm()
    } else {
        f64::NAN
    };

    Ok(ReconstructionResult {
        u_rec,
        w_residual,
        seam_gap,
        max_rh_residual,
        total_iterations,
        krylov_solves,
    })
}

/// Relative max-norm distance between two fields (for round-trip checks).
pub fn rel_linf_error(u_rec: &[C64], u_ref: &[C64]) -> f64 {
    let num = u_rec
        .iter()
        .zip(u_ref.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    let den = u_ref.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}
