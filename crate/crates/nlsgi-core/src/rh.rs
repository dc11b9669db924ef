//! Vector Riemann–Hilbert solves: the projection fixed-point equations for
//! the plain system on `x >= 0` and the delta-conjugated system on `x < 0`.
//!
//! Both reduce to two decoupled pairs of scalar equations (one per matrix
//! column component) of the form `v = T v + F` with `T` built from the
//! boundary projectors and multiplication by `r e^{+-2i(z+1)x}` factors.
//! Neumann iteration handles the small-data regime; a restarted GMRES on
//! the same operator takes over when the contraction estimate degrades.

use crate::cauchy::{projector, DeltaSet, ProjectorPlan, Side};
use crate::error::{Error, Result};
use crate::scattering::ScatteringData;
use crate::{c64, C64};

/// Solver policy. `rh_tol` is measured in the discrete 2-norm
/// `sqrt(dz * sum |.|^2)`.
#[derive(Debug, Clone, Copy)]
pub struct RhOptions {
    pub rh_tol: f64,
    pub max_iter: usize,
    /// Neumann contraction estimate above which the Krylov fallback engages.
    pub contraction_switch: f64,
    pub gmres_restart: usize,
}

impl Default for RhOptions {
    fn default() -> Self {
        Self {
            rh_tol: 1e-10,
            max_iter: 200,
            contraction_switch: 0.9,
            gmres_restart: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    PositiveX,
    NegativeX,
}

/// Jump data at one `x`: the entries of
/// `R = [[conj(r+) r-, conj(r+) e^{-2i(z+1)x}], [r- e^{2i(z+1)x}, 0]]`,
/// with `r_+-` replaced by the delta-modified coefficients on the negative
/// branch. `r12` and `r21` are the strictly upper/lower split `R_+`/`R_-`;
/// `r11` the diagonal part.
#[derive(Debug, Clone)]
pub struct JumpData {
    pub x: f64,
    pub r11: Vec<C64>,
    pub r12: Vec<C64>,
    pub r21: Vec<C64>,
    pub delta_modified: bool,
}

/// Assemble the jump matrix entries at `x`. When deltas are given the
/// coefficients are delta-modified; they are mandatory on the negative
/// branch, where the plain phases are uncontrollable.
pub fn build_jump(
    x: f64,
    scattering: &ScatteringData,
    deltas: Option<&DeltaSet>,
    gate_tol: f64,
) -> Result<JumpData> {
    scattering.check_gate(gate_tol)?;
    let zgrid = scattering.zgrid;
    let m = zgrid.point_count;
    if x < 0.0 && deltas.is_none() {
        return Err(Error::DataCorruption(
            "negative-branch jump requested without delta factors".into(),
        ));
    }
    let modifier: Option<Vec<C64>> = deltas.map(|d| d.modifier());
    let mut r11 = Vec::with_capacity(m);
    let mut r12 = Vec::with_capacity(m);
    let mut r21 = Vec::with_capacity(m);
    for i in 0..m {
        let z = zgrid.node(i);
        let phase = c64(0.0, 2.0 * (z + 1.0) * x).exp();
        let (rp, rm) = match &modifier {
            Some(md) => (md[i] * scattering.r_plus[i], md[i] * scattering.r_minus[i]),
            None => (scattering.r_plus[i], scattering.r_minus[i]),
        };
        // conj(r+) r- is invariant under the unimodular delta modifier
        r11.push(scattering.r_plus[i].conj() * scattering.r_minus[i]);
        r12.push(rp.conj() * phase.conj());
        r21.push(rm * phase);
    }
    Ok(JumpData {
        x,
        r11,
        r12,
        r21,
        delta_modified: modifier.is_some(),
    })
}

/// Solved state at one `x`: the two columns of the unknown matrix on the
/// spectral grid. On the positive branch these are `(xi_-, eta_+)`, on the
/// negative branch `(xi_{+,delta}, eta_{-,delta})`.
#[derive(Debug, Clone)]
pub struct RHSolveState {
    pub branch: Branch,
    pub x: f64,
    pub xi: [Vec<C64>; 2],
    pub eta: [Vec<C64>; 2],
    pub iterations: usize,
    pub residual: f64,
    pub used_krylov: bool,
}

fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).collect()
}

fn mul_scaled(a: &[C64], s: C64) -> Vec<C64> {
    a.iter().map(|x| x * s).collect()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += a * xi;
    }
}

fn norm2(v: &[C64], dz: f64) -> f64 {
    (v.iter().map(|x| x.norm_sqr()).sum::<f64>() * dz).sqrt()
}

/// One scalar pair `(p, q)` of projection equations, affine in the unknowns:
/// `p = P^{sp}(m_pq (q + cq))`, `q = P^{sq}(m_qp (p + cp))`.
///
/// Both branches reduce to this shape: on `x >= 0` the pair is
/// `(xi_- - e1, eta_+ - e2)` with sides `(-, +)`; on `x < 0`, eliminating
/// `xi_{-,d}` through the first-column jump relation cancels the
/// `conj(r+) r-` diagonal entry exactly and leaves the mirrored system for
/// `(xi_{+,d} - e1, eta_{-,d} - e2)` with sides `(+, -)`.
struct PairSystem<'a> {
    plan: &'a ProjectorPlan,
    side_p: Side,
    side_q: Side,
    m_pq: &'a [C64],
    m_qp: &'a [C64],
    cp: f64,
    cq: f64,
}

impl PairSystem<'_> {
    /// `T (p, q)` — the linear part.
    fn apply_t(&self, p: &[C64], q: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let tp = projector(&mul(self.m_pq, q), self.side_p, self.plan);
        let tq = projector(&mul(self.m_qp, p), self.side_q, self.plan);
        (tp, tq)
    }

    /// Constant term `F`.
    fn rhs(&self) -> (Vec<C64>, Vec<C64>) {
        let fp = projector(
            &mul_scaled(self.m_pq, c64(self.cq, 0.0)),
            self.side_p,
            self.plan,
        );
        let fq = projector(
            &mul_scaled(self.m_qp, c64(self.cp, 0.0)),
            self.side_q,
            self.plan,
        );
        (fp, fq)
    }

    /// Residual of the affine system in the discrete 2-norm.
    fn residual(&self, p: &[C64], q: &[C64], fp: &[C64], fq: &[C64], dz: f64) -> f64 {
        let (tp, tq) = self.apply_t(p, q);
        let rp: Vec<C64> = (0..p.len()).map(|i| p[i] - tp[i] - fp[i]).collect();
        let rq: Vec<C64> = (0..q.len()).map(|i| q[i] - tq[i] - fq[i]).collect();
        (norm2(&rp, dz).powi(2) + norm2(&rq, dz).powi(2)).sqrt()
    }
}

struct PairSolution {
    p: Vec<C64>,
    q: Vec<C64>,
    iterations: usize,
    residual: f64,
    used_krylov: bool,
}

fn solve_pair(sys: &PairSystem<'_>, opts: &RhOptions, context: &str) -> Result<PairSolution> {
    let m = sys.m_pq.len();
    let dz = sys.plan.zgrid.spacing();
    let (fp, fq) = sys.rhs();
    let mut p = fp.clone();
    let mut q = fq.clone();
    // Neumann iteration with contraction tracking
    let mut last_change = f64::INFINITY;
    let mut contraction: f64 = 0.0;
    let mut iterations = 0;
    let mut neumann_ok = false;
    for it in 0..opts.max_iter {
        let (tp, tq) = sys.apply_t(&p, &q);
        let mut change_sq = 0.0;
        let mut pn = Vec::with_capacity(m);
        let mut qn = Vec::with_capacity(m);
        for i in 0..m {
            let np = tp[i] + fp[i];
            let nq = tq[i] + fq[i];
            change_sq += (np - p[i]).norm_sqr() + (nq - q[i]).norm_sqr();
            pn.push(np);
            qn.push(nq);
        }
        p = pn;
        q = qn;
        let change = (change_sq * dz).sqrt();
        iterations = it + 1;
        if change <= opts.rh_tol {
            neumann_ok = true;
            break;
        }
        if last_change.is_finite() && last_change > 0.0 {
            contraction = change / last_change;
            if it >= 4 && contraction > opts.contraction_switch {
                break;
            }
        }
        last_change = change;
    }

    let mut used_krylov = false;
    if !neumann_ok {
        let residual = sys.residual(&p, &q, &fp, &fq, dz);
        if residual > opts.rh_tol {
            // Krylov fallback on (I - T) v = F
            used_krylov = true;
            let mut rhs = Vec::with_capacity(2 * m);
            rhs.extend_from_slice(&fp);
            rhs.extend_from_slice(&fq);
            let apply = |v: &[C64]| -> Vec<C64> {
                let (tp, tq) = sys.apply_t(&v[..m], &v[m..]);
                let mut out = Vec::with_capacity(2 * m);
                for i in 0..m {
                    out.push(v[i] - tp[i]);
                }
                for i in 0..m {
                    out.push(v[m + i] - tq[i]);
                }
                out
            };
            let sol = gmres(&apply, &rhs, opts.gmres_restart, opts.max_iter, opts.rh_tol, dz)
                .ok_or_else(|| Error::NonConvergence {
                    context: format!("{context}: krylov fallback"),
                    iterations: opts.max_iter,
                    contraction,
                })?;
            p = sol.0[..m].to_vec();
            q = sol.0[m..].to_vec();
            iterations += sol.1;
        }
    }

    let residual = sys.residual(&p, &q, &fp, &fq, dz);
    if residual > 10.0 * opts.rh_tol {
        return Err(Error::NonConvergence {
            context: context.to_string(),
            iterations,
            contraction,
        });
    }
    Ok(PairSolution {
        p,
        q,
        iterations,
        residual,
        used_krylov,
    })
}

/// Restarted GMRES with modified Gram–Schmidt, on the weighted 2-norm.
/// Returns the solution and the iteration count.
fn gmres(
    apply: &dyn Fn(&[C64]) -> Vec<C64>,
    rhs: &[C64],
    restart: usize,
    max_outer: usize,
    tol: f64,
    dz: f64,
) -> Option<(Vec<C64>, usize)> {
    let n = rhs.len();
    let dot = |a: &[C64], b: &[C64]| -> C64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.conj() * y)
            .sum::<C64>()
            * dz
    };
    let nrm = |a: &[C64]| -> f64 { dot(a, a).re.max(0.0).sqrt() };

    let mut x = vec![C64::ZERO; n];
    let rhs_norm = nrm(rhs).max(1e-300);
    let mut total_iters = 0usize;
    for _outer in 0..max_outer {
        let ax = apply(&x);
        let r0: Vec<C64> = (0..n).map(|i| rhs[i] - ax[i]).collect();
        let beta = nrm(&r0);
        if beta <= tol * (1.0 + rhs_norm) {
            return Some((x, total_iters));
        }
        let mut basis: Vec<Vec<C64>> = vec![r0.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![C64::ZERO; restart]; restart + 1];
        let mut cs = vec![C64::ZERO; restart];
        let mut sn = vec![C64::ZERO; restart];
        let mut g = vec![C64::ZERO; restart + 1];
        g[0] = c64(beta, 0.0);
        let mut k_used = 0;
        for k in 0..restart {
            total_iters += 1;
            let mut wv = apply(&basis[k]);
            for j in 0..=k {
                let hjk = dot(&basis[j], &wv);
                h[j][k] = hjk;
                axpy(&mut wv, -hjk, &basis[j]);
            }
            let hk1 = nrm(&wv);
            h[k + 1][k] = c64(hk1, 0.0);
            // Givens rotations
            for j in 0..k {
                let tmp = cs[j].conj() * h[j][k] + sn[j].conj() * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = tmp;
            }
            let denom = (h[k][k].norm_sqr() + h[k + 1][k].norm_sqr()).sqrt();
            if denom > 0.0 {
                cs[k] = h[k][k] / denom;
                sn[k] = h[k + 1][k] / denom;
                h[k][k] = c64(denom, 0.0);
                h[k + 1][k] = C64::ZERO;
                g[k + 1] = -sn[k] * g[k];
                g[k] = cs[k].conj() * g[k];
            }
            k_used = k + 1;
            let resid = g[k + 1].norm();
            if resid <= tol * (1.0 + rhs_norm) || hk1 <= 1e-14 * rhs_norm {
                break;
            }
            basis.push(wv.iter().map(|v| v / hk1).collect());
        }
        // back substitution
        let mut y = vec![C64::ZERO; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            if h[i][i].norm() <= 1e-300 {
                return None;
            }
            y[i] = s / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            axpy(&mut x, *yj, &basis[j]);
        }
        let ax = apply(&x);
        let res: Vec<C64> = (0..n).map(|i| rhs[i] - ax[i]).collect();
        if nrm(&res) <= tol * (1.0 + rhs_norm) {
            return Some((x, total_iters));
        }
    }
    None
}

fn add_const(v: &[C64], c: f64) -> Vec<C64> {
    v.iter().map(|x| x + c).collect()
}

/// Solve the plain projection system at `x >= 0`:
/// `xi_- - e1 = P^-(r_- e^{2i(z+1)x} eta_+)`,
/// `eta_+ - e2 = P^+(conj(r_+) e^{-2i(z+1)x} xi_-)`.
pub fn solve_rh_positive(
    x: f64,
    scattering: &ScatteringData,
    plan: &ProjectorPlan,
    opts: &RhOptions,
    gate_tol: f64,
) -> Result<RHSolveState> {
    assert!(x >= 0.0, "positive-branch solve at x = {x}");
    let jump = build_jump(x, scattering, None, gate_tol)?;
    solve_rh_with_jump(&jump, Branch::PositiveX, plan, opts)
}

/// Solve the delta-conjugated system at `x < 0`:
/// `xi_{+,d} - e1 = P^+(r_{-,d} e^{2i(z+1)x} eta_{-,d})`,
/// `eta_{-,d} - e2 = P^-(conj(r_{+,d}) e^{-2i(z+1)x} xi_{-,d})` with
/// `xi_{-,d}` eliminated through the first-column jump relation.
pub fn solve_rh_negative(
    x: f64,
    scattering: &ScatteringData,
    deltas: &DeltaSet,
    plan: &ProjectorPlan,
    opts: &RhOptions,
    gate_tol: f64,
) -> Result<RHSolveState> {
    assert!(x < 0.0, "negative-branch solve at x = {x}");
    let jump = build_jump(x, scattering, Some(deltas), gate_tol)?;
    solve_rh_with_jump(&jump, Branch::NegativeX, plan, opts)
}

/// Shared driver over assembled jump data.
pub fn solve_rh_with_jump(
    jump: &JumpData,
    branch: Branch,
    plan: &ProjectorPlan,
    opts: &RhOptions,
) -> Result<RHSolveState> {
    let (side_p, side_q) = match branch {
        Branch::PositiveX => (Side::Minus, Side::Plus),
        Branch::NegativeX => (Side::Plus, Side::Minus),
    };

    let mut columns: Vec<(Vec<C64>, Vec<C64>)> = Vec::with_capacity(2);
    let mut iterations = 0;
    let mut residual: f64 = 0.0;
    let mut used_krylov = false;
    for comp in 0..2 {
        let (cp, cq) = if comp == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
        let sys = PairSystem {
            plan,
            side_p,
            side_q,
            m_pq: &jump.r21,
            m_qp: &jump.r12,
            cp,
            cq,
        };
        let sol = solve_pair(&sys, opts, &format!("rh solve at x = {:.6}", jump.x))?;
        iterations += sol.iterations;
        residual = residual.max(sol.residual);
        used_krylov |= sol.used_krylov;
        columns.push((sol.p, sol.q));
    }
    let (p1, q1) = columns.pop().unwrap();
    let (p0, q0) = columns.pop().unwrap();
    Ok(RHSolveState {
        branch,
        x: jump.x,
        xi: [add_const(&p0, 1.0), p1],
        eta: [q0, add_const(&q1, 1.0)],
        iterations,
        residual,
        used_krylov,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::delta_solve;
    use crate::grid::SpectralGrid;

    fn zero_data(m: usize) -> ScatteringData {
        ScatteringData::identity(SpectralGrid::new(20.0, m).unwrap())
    }

    #[test]
    fn zero_reflection_gives_identity_solution() {
        let data = zero_data(256);
        let plan = ProjectorPlan::new(data.zgrid, 4);
        let opts = RhOptions::default();
        let st = solve_rh_positive(1.5, &data, &plan, &opts, 0.5).unwrap();
        assert!(st.xi[0].iter().all(|v| (v - c64(1.0, 0.0)).norm() == 0.0));
        assert!(st.xi[1].iter().all(|v| v.norm() == 0.0));
        assert!(st.eta[0].iter().all(|v| v.norm() == 0.0));
        assert!(st.eta[1].iter().all(|v| (v - c64(1.0, 0.0)).norm() == 0.0));

        let ds = delta_solve(&data.r_plus, &data.r_minus, &plan).unwrap();
        let st = solve_rh_negative(-0.7, &data, &ds, &plan, &opts, 0.5).unwrap();
        assert!(st.xi[0].iter().all(|v| (v - c64(1.0, 0.0)).norm() == 0.0));
        assert!(st.eta[1].iter().all(|v| (v - c64(1.0, 0.0)).norm() == 0.0));
    }

    #[test]
    fn build_jump_requires_deltas_on_negative_branch() {
        let data = zero_data(64);
        assert!(build_jump(-1.0, &data, None, 0.5).is_err());
        let jump = build_jump(0.0, &data, None, 0.5).unwrap();
        // at x = 0 the phase factor is exactly 1
        assert!(jump.r12.iter().all(|v| v.norm() == 0.0));
        assert!(!jump.delta_modified);
    }

    #[test]
    fn gmres_solves_small_system() {
        // scaled-identity operator
        let n = 32;
        let rhs: Vec<C64> = (0..n).map(|i| c64((i as f64).sin(), 0.2)).collect();
        let apply = |v: &[C64]| -> Vec<C64> { v.iter().map(|x| x * 0.7).collect() };
        let (x, _) = gmres(&apply, &rhs, 16, 50, 1e-12, 1.0).unwrap();
        for i in 0..n {
            assert!((x[i] * 0.7 - rhs[i]).norm() <= 1e-10);
        }
    }
}
