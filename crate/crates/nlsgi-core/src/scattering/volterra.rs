//! Volterra integral equations for the modified Jost functions.
//!
//! Each equation couples a slowly varying component to one carrying the
//! oscillatory kernel `exp(+-2i(z+1)(x-y))`. The marcher uses product
//! integration: the kernel phase is integrated exactly over every cell and
//! only the slow factors are interpolated (Adams–Moulton-style stencils of
//! order 2 or 4), so the accuracy is uniform in `z`. Steps are implicit in
//! the endpoint value, which costs one 2x2 solve per step.

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::SpatialGrid;
use crate::potential::PotentialField;
use crate::{c64, C64};
use rayon::prelude::*;

/// Which Jost function to solve for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JostKind {
    MPlus,
    MMinus,
    NPlus,
    NMinus,
}

impl JostKind {
    /// `+` kinds integrate from `+infinity`, `-` kinds from `-infinity`.
    pub fn from_right(self) -> bool {
        matches!(self, JostKind::MPlus | JostKind::NPlus)
    }

    /// Boundary vector: `e1` for the `m` family, `e2` for `n`.
    pub fn boundary(self) -> [C64; 2] {
        match self {
            JostKind::MPlus | JostKind::MMinus => [c64(1.0, 0.0), C64::ZERO],
            JostKind::NPlus | JostKind::NMinus => [C64::ZERO, c64(1.0, 0.0)],
        }
    }

    fn is_m(self) -> bool {
        matches!(self, JostKind::MPlus | JostKind::MMinus)
    }
}

/// Product-integration stencil order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOrder {
    Two,
    Four,
}

#[derive(Debug, Clone, Copy)]
pub struct JostOptions {
    pub order: StepOrder,
    /// Internal grid refinement factor for the march (the potential is
    /// band-limited resampled).
    pub refine: usize,
    /// March the whole line and retain the field at every coarse node;
    /// otherwise the march stops at `x = 0` and stores only that column.
    pub store_full: bool,
}

impl Default for JostOptions {
    fn default() -> Self {
        Self {
            order: StepOrder::Four,
            refine: 2,
            store_full: false,
        }
    }
}

/// Solved Jost field: the `x = 0` column per spectral node plus diagnostics,
/// and optionally the full field.
#[derive(Debug, Clone)]
pub struct JostField {
    pub kind: JostKind,
    pub grid: SpatialGrid,
    pub z_values: Vec<f64>,
    pub at_zero: Vec<[C64; 2]>,
    /// `sup_x |v - boundary|` over the marched range, per z.
    pub sup_deviation: Vec<f64>,
    /// `full[zi][xj]` over coarse nodes, when requested.
    pub full: Option<Vec<Vec<[C64; 2]>>>,
}

/// Antiderivatives `q_+-(x) = (1/2) \int_{+-inf}^x u conj(w) dy`.
#[derive(Debug, Clone)]
pub struct JostAsymptotics {
    pub q_plus: Vec<C64>,
    pub q_minus: Vec<C64>,
}

/// Cumulative trapezoid of `u conj(w) / 2` from both ends.
pub fn jost_asymptotics(field: &PotentialField) -> JostAsymptotics {
    let n = field.grid.point_count;
    let dx = field.grid.spacing();
    let integrand: Vec<C64> = field
        .u
        .iter()
        .zip(field.w.iter())
        .map(|(&u, &w)| 0.5 * u * w.conj())
        .collect();
    let mut q_minus = vec![C64::ZERO; n];
    for j in 1..n {
        q_minus[j] = q_minus[j - 1] + 0.5 * dx * (integrand[j - 1] + integrand[j]);
    }
    let mut q_plus = vec![C64::ZERO; n];
    for j in (0..n - 1).rev() {
        q_plus[j] = q_plus[j + 1] - 0.5 * dx * (integrand[j] + integrand[j + 1]);
    }
    JostAsymptotics { q_plus, q_minus }
}

impl JostField {
    /// Lemma-2 second-order coefficient over the stored full field:
    /// `2iz(m - e1) + q e1 + conj(w) e2` for the `m` family,
    /// `2iz(n - e2) - w e1 - conj(q) e2` for `n`. Tends to zero as `|z|`
    /// grows when the potential is smooth.
    pub fn second_order_coefficient(
        &self,
        asym: &JostAsymptotics,
        w: &[C64],
        zi: usize,
    ) -> Option<Vec<[C64; 2]>> {
        let full = self.full.as_ref()?;
        let z = self.z_values[zi];
        let two_iz = c64(0.0, 2.0 * z);
        let q = if self.kind.from_right() {
            &asym.q_plus
        } else {
            &asym.q_minus
        };
        let e = self.kind.boundary();
        Some(
            full[zi]
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let dev = [v[0] - e[0], v[1] - e[1]];
                    if self.kind.is_m() {
                        [
                            two_iz * dev[0] + q[j],
                            two_iz * dev[1] + w[j].conj(),
                        ]
                    } else {
                        [
                            two_iz * dev[0] - w[j],
                            two_iz * dev[1] - q[j].conj(),
                        ]
                    }
                })
                .collect(),
        )
    }
}

/// Lagrange coefficients (powers of tau) for the interpolation stencils,
/// nodes at tau = -(len-2) .. 1 with the step spanning tau in [0, 1].
const STENCIL2: [[f64; 4]; 4] = [
    [1.0, -1.0, 0.0, 0.0], // 1 - tau
    [0.0, 1.0, 0.0, 0.0],  // tau
    [0.0; 4],
    [0.0; 4],
];
const STENCIL3: [[f64; 4]; 4] = [
    [0.0, -0.5, 0.5, 0.0], // (tau^2 - tau)/2      at tau = -1
    [1.0, 0.0, -1.0, 0.0], // 1 - tau^2            at tau = 0
    [0.0, 0.5, 0.5, 0.0],  // (tau^2 + tau)/2      at tau = 1
    [0.0; 4],
];
const STENCIL4: [[f64; 4]; 4] = [
    [0.0, 1.0 / 6.0, 0.0, -1.0 / 6.0], // at tau = -2
    [0.0, -1.0, 0.5, 0.5],             // at tau = -1
    [1.0, 0.5, -1.0, -0.5],            // at tau = 0
    [0.0, 1.0 / 3.0, 0.5, 1.0 / 6.0],  // at tau = 1
];

/// Moments `mu_p = \int_0^1 tau^p e^{i theta (1 - tau)} d tau`, `p = 0..3`.
fn phase_moments(theta: f64) -> [C64; 4] {
    let i_theta = c64(0.0, theta);
    if theta.abs() < 0.5 {
        // mu_p = sum_n (i theta)^n * p! / (n + p + 1)!
        let mut mu = [C64::ZERO; 4];
        for (p, m) in mu.iter_mut().enumerate() {
            let mut acc = C64::ZERO;
            let mut pow = c64(1.0, 0.0);
            let mut fact_ratio = 1.0 / (p + 1) as f64; // p!/(p+1)!
            let mut denom_next = (p + 2) as f64;
            for _n in 0..24 {
                acc += pow * fact_ratio;
                pow *= i_theta;
                fact_ratio /= denom_next;
                denom_next += 1.0;
            }
            *m = acc;
        }
        mu
    } else {
        // recursion mu_p = (p mu_{p-1} - 1) / (i theta), mu_0 = (e^{i theta} - 1)/(i theta)
        let e = i_theta.exp();
        let mut mu = [C64::ZERO; 4];
        mu[0] = (e - 1.0) / i_theta;
        for p in 1..4 {
            mu[p] = (mu[p - 1] * p as f64 - 1.0) / i_theta;
        }
        mu
    }
}

/// Weights `W_r = \int_0^1 L_r(tau) e^{i theta (1-tau)} d tau` for a stencil.
fn product_weights(stencil: &[[f64; 4]; 4], len: usize, theta: f64) -> [C64; 4] {
    let mu = phase_moments(theta);
    let mut w = [C64::ZERO; 4];
    for r in 0..len {
        let mut acc = C64::ZERO;
        for p in 0..4 {
            acc += mu[p] * stencil[r][p];
        }
        w[r] = acc;
    }
    w
}

struct MarchSetup {
    /// Coefficient multiplying the oscillatory component in the plain
    /// equation, per refined node.
    c_plain: Vec<C64>,
    /// Coefficient multiplying the plain component in the oscillatory
    /// equation, per refined node.
    c_osc: Vec<C64>,
    /// `true` when the oscillatory component is the first of the 2-vector
    /// (the `n` family).
    osc_first: bool,
    /// Oscillation sign: kernel phase is `exp(i * phase_sign * 2(z+1)(x-y))`.
    phase_sign: f64,
}

fn march_setup(field: &PotentialField, kind: JostKind, refine: usize) -> MarchSetup {
    let u_fine = fourier::refine_periodic(&field.u, refine);
    let w_fine = if refine == 1 {
        field.w.clone()
    } else {
        crate::potential::compute_w(&u_fine, fine_grid(field.grid, refine))
    };
    match kind {
        // m' relations: plain = comp1 with (u/2) m2, osc = comp2 with conj(w) m1
        JostKind::MPlus | JostKind::MMinus => MarchSetup {
            c_plain: u_fine.iter().map(|v| 0.5 * v).collect(),
            c_osc: w_fine.iter().map(|v| v.conj()).collect(),
            osc_first: false,
            phase_sign: 1.0,
        },
        // n' relations: plain = comp2 with (conj(u)/2) n1, osc = comp1 with w n2
        JostKind::NPlus | JostKind::NMinus => MarchSetup {
            c_plain: u_fine.iter().map(|v| 0.5 * v.conj()).collect(),
            c_osc: w_fine,
            osc_first: true,
            phase_sign: -1.0,
        },
    }
}

fn fine_grid(grid: SpatialGrid, refine: usize) -> SpatialGrid {
    SpatialGrid {
        half_width: grid.half_width,
        point_count: grid.point_count * refine,
    }
}

/// Guard: with more than this phase advance per refined cell the slow-factor
/// interpolation is no longer trustworthy.
const MAX_PHASE_PER_CELL: f64 = 8.0;

/// Solve one Jost family at the given spectral values.
pub fn solve_jost(
    field: &PotentialField,
    z_values: &[f64],
    kind: JostKind,
    opts: JostOptions,
) -> Result<JostField> {
    let refine = opts.refine.max(1);
    let setup = march_setup(field, kind, refine);
    let n_fine = field.grid.point_count * refine;
    let h = field.grid.spacing() / refine as f64;

    let results: Vec<Result<PerZ>> = z_values
        .par_iter()
        .map(|&z| march_one(field, &setup, z, kind, opts, n_fine, h, refine))
        .collect();

    let mut at_zero = Vec::with_capacity(z_values.len());
    let mut sup_deviation = Vec::with_capacity(z_values.len());
    let mut full = if opts.store_full {
        Some(Vec::with_capacity(z_values.len()))
    } else {
        None
    };
    for r in results {
        let r = r?;
        at_zero.push(r.at_zero);
        sup_deviation.push(r.sup_dev);
        if let (Some(full), Some(col)) = (full.as_mut(), r.full) {
            full.push(col);
        }
    }
    Ok(JostField {
        kind,
        grid: field.grid,
        z_values: z_values.to_vec(),
        at_zero,
        sup_deviation,
        full,
    })
}

struct PerZ {
    at_zero: [C64; 2],
    sup_dev: f64,
    full: Option<Vec<[C64; 2]>>,
}

#[allow(clippy::too_many_arguments)]
fn march_one(
    field: &PotentialField,
    setup: &MarchSetup,
    z: f64,
    kind: JostKind,
    opts: JostOptions,
    n_fine: usize,
    h: f64,
    refine: usize,
) -> Result<PerZ> {
    let from_right = kind.from_right();
    let d = if from_right { -h } else { h };
    let beta = 2.0 * (z + 1.0);
    let theta = setup.phase_sign * beta * d;
    if theta.abs() > MAX_PHASE_PER_CELL {
        return Err(Error::VolterraStep {
            z,
            reason: format!(
                "phase advance {:.2} rad per cell exceeds {MAX_PHASE_PER_CELL}; refine the spatial grid or reduce the spectral half-width",
                theta.abs()
            ),
        });
    }
    let phase = c64(0.0, theta).exp();

    let max_len = match opts.order {
        StepOrder::Two => 2,
        StepOrder::Four => 4,
    };
    // weights per stencil length (starters use shorter stencils)
    let w2 = product_weights(&STENCIL2, 2, theta);
    let w3 = product_weights(&STENCIL3, 3, theta);
    let w4 = product_weights(&STENCIL4, 4, theta);
    let w2_0 = product_weights(&STENCIL2, 2, 0.0);
    let w3_0 = product_weights(&STENCIL3, 3, 0.0);
    let w4_0 = product_weights(&STENCIL4, 4, 0.0);

    let start = if from_right { n_fine - 1 } else { 0 };
    let zero_idx = n_fine / 2;
    let steps = if opts.store_full {
        n_fine - 1
    } else if from_right {
        start - zero_idx
    } else {
        zero_idx
    };

    // history of (vp, vq) and node indices, most recent last
    let mut hist_p: Vec<C64> = Vec::with_capacity(steps + 1);
    let mut hist_q: Vec<C64> = Vec::with_capacity(steps + 1);
    let mut idxs: Vec<usize> = Vec::with_capacity(steps + 1);
    hist_p.push(c64(1.0, 0.0));
    hist_q.push(C64::ZERO);
    idxs.push(start);

    let mut sup_dev: f64 = 0.0;
    for s in 0..steps {
        let have = (s + 1).min(max_len - 1); // known history nodes in the stencil
        let len = have + 1;
        let (wt, w0) = match len {
            2 => (&w2, &w2_0),
            3 => (&w3, &w3_0),
            _ => (&w4, &w4_0),
        };
        let next = if from_right { start - s - 1 } else { start + s + 1 };

        // sums over the known part of the stencil (tau = 1 slot is implicit)
        let mut sp = C64::ZERO;
        let mut sq = C64::ZERO;
        let n_hist = hist_p.len();
        for r in 0..have {
            let slot = len - 2 - r; // stencil slot for history node (most recent first)
            let hi = n_hist - 1 - r;
            let node = idxs[hi];
            sp += w0[slot] * setup.c_plain[node] * hist_q[hi];
            sq += wt[slot] * setup.c_osc[node] * hist_p[hi];
        }
        let vp = hist_p[n_hist - 1];
        let vq = hist_q[n_hist - 1];
        let a_rhs = vp + d * sp;
        let b_rhs = phase * vq + d * sq;
        let alpha_p = d * w0[len - 1] * setup.c_plain[next];
        let alpha_q = d * wt[len - 1] * setup.c_osc[next];
        let denom = c64(1.0, 0.0) - alpha_p * alpha_q;
        if denom.norm() < 0.1 {
            return Err(Error::VolterraStep {
                z,
                reason: "implicit step matrix nearly singular; refine the spatial grid".into(),
            });
        }
        let vp_next = (a_rhs + alpha_p * b_rhs) / denom;
        let vq_next = b_rhs + alpha_q * vp_next;
        if !vp_next.is_finite() || !vq_next.is_finite() {
            return Err(Error::VolterraStep {
                z,
                reason: "non-finite value during march".into(),
            });
        }
        hist_p.push(vp_next);
        hist_q.push(vq_next);
        idxs.push(next);
        let dev = ((vp_next - c64(1.0, 0.0)).norm_sqr() + vq_next.norm_sqr()).sqrt();
        sup_dev = sup_dev.max(dev);
    }

    // internal (vp, vq) puts the boundary value in the plain slot; map back
    // to (comp1, comp2) ordering
    let to_components = |vp: C64, vq: C64| -> [C64; 2] {
        if setup.osc_first {
            [vq, vp]
        } else {
            [vp, vq]
        }
    };

    // locate x = 0 in the history
    let zero_pos = if from_right {
        start - zero_idx
    } else {
        zero_idx
    };
    let at_zero = to_components(hist_p[zero_pos], hist_q[zero_pos]);

    let full = if opts.store_full {
        let n_coarse = field.grid.point_count;
        let mut col = vec![kind.boundary(); n_coarse];
        for (pos, &node) in idxs.iter().enumerate() {
            if node % refine == 0 {
                col[node / refine] = to_components(hist_p[pos], hist_q[pos]);
            }
        }
        Some(col)
    } else {
        None
    };

    Ok(PerZ {
        at_zero,
        sup_dev,
        full,
    })
}
