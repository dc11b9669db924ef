//! Direct scattering: assemble `a(z)`, `b(k)`, `r = b/a` and the split pair
//! `(r_+, r_-)` from the Jost fields, plus the soliton-free gate and the
//! scattering archive formats.

pub mod volterra;

use crate::error::{Error, Result};
use crate::grid::SpectralGrid;
use crate::potential::PotentialField;
use crate::{c64, C64};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;
use volterra::{solve_jost, JostField, JostKind, JostOptions};

/// Default numerical gate: inversion refuses to run when `min |a|` on the
/// grid drops to this level (eigenvalues or resonances suspected).
///
/// `|a| < 0.6` on the `|a|^2 + |b|^2 = 1` branch means `|r| > 4/3`
/// somewhere — strong coupling, where the sech amplitude family has already
/// passed resonance crossings (`min |a|` dips to ~0.38 near `A = 2`).
/// Eigenvalues then sit off the contour and inversion would silently drop
/// their contribution, so the gate refuses well before that regime.
pub const DEFAULT_GATE_TOL: f64 = 0.6;

#[derive(Debug, Clone, Copy)]
pub struct ScatteringOptions {
    pub jost: JostOptions,
    pub gate_tol: f64,
}

impl Default for ScatteringOptions {
    fn default() -> Self {
        Self {
            jost: JostOptions::default(),
            gate_tol: DEFAULT_GATE_TOL,
        }
    }
}

/// Scattering data on the spectral grid.
#[derive(Debug, Clone)]
pub struct ScatteringData {
    pub zgrid: SpectralGrid,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub r: Vec<C64>,
    pub r_plus: Vec<C64>,
    pub r_minus: Vec<C64>,
    pub min_abs_a: f64,
    /// max over nodes of the unitarity defect
    /// (`||a|^2 + |b|^2 - 1|` for `z > 0`, `||a|^2 - |b|^2 - 1|` for `z < 0`).
    pub unitarity_max_err: f64,
    /// max relative branch-flip inconsistency (`a` even, `b` odd in `k`);
    /// `None` when the data was loaded from an archive.
    pub parity_max_err: Option<f64>,
}

impl ScatteringData {
    /// Identity data (`a = 1`, `b = 0`), the zero-potential case.
    pub fn identity(zgrid: SpectralGrid) -> Self {
        let m = zgrid.point_count;
        Self {
            zgrid,
            a: vec![c64(1.0, 0.0); m],
            b: vec![C64::ZERO; m],
            r: vec![C64::ZERO; m],
            r_plus: vec![C64::ZERO; m],
            r_minus: vec![C64::ZERO; m],
            min_abs_a: 1.0,
            unitarity_max_err: 0.0,
            parity_max_err: Some(0.0),
        }
    }

    /// Enforce the soliton-free gate.
    pub fn check_gate(&self, gate_tol: f64) -> Result<()> {
        if self.min_abs_a <= gate_tol {
            Err(Error::SolitonGate {
                min_abs_a: self.min_abs_a,
                gate_tol,
            })
        } else {
            Ok(())
        }
    }
}

/// Repackage a 2-vector `m`-family value into the `phi` Jost function at a
/// point: `phi = (m1, (1/2k)(-i conj(u) m1 + m2))`.
#[inline]
fn phi_from_m(m: [C64; 2], u: C64, inv2k: C64) -> [C64; 2] {
    [m[0], inv2k * (-c64(0.0, 1.0) * u.conj() * m[0] + m[1])]
}

/// Repackage an `n`-family value: `vphi = (-(1/2k)(n1 + i u n2), n2)`.
#[inline]
fn vphi_from_n(n: [C64; 2], u: C64, inv2k: C64) -> [C64; 2] {
    [-inv2k * (n[0] + c64(0.0, 1.0) * u * n[1]), n[1]]
}

#[inline]
fn det2(col1: [C64; 2], col2: [C64; 2]) -> C64 {
    col1[0] * col2[1] - col1[1] * col2[0]
}

/// Assemble the scattering data from solved Jost columns at `x = 0`,
/// through the Wronskians `a = det[phi_-, vphi_+]`, `b = det[phi_+, phi_-]`.
pub fn assemble_scattering(
    m_minus: &JostField,
    m_plus: &JostField,
    n_plus: &JostField,
    u_at_zero: C64,
    zgrid: SpectralGrid,
    gate_tol: f64,
) -> Result<ScatteringData> {
    let m = zgrid.point_count;
    assert_eq!(m_minus.at_zero.len(), m);
    assert_eq!(m_plus.at_zero.len(), m);
    assert_eq!(n_plus.at_zero.len(), m);

    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    let mut r = Vec::with_capacity(m);
    let mut r_plus = Vec::with_capacity(m);
    let mut r_minus = Vec::with_capacity(m);
    let mut min_abs_a = f64::INFINITY;
    let mut unit_err: f64 = 0.0;
    let mut parity_err: f64 = 0.0;

    for i in 0..m {
        let z = zgrid.node(i);
        let k = SpectralGrid::branch_k(z);
        let two_k = 2.0 * k;
        let inv2k = two_k.inv();

        let phi_m = phi_from_m(m_minus.at_zero[i], u_at_zero, inv2k);
        let phi_p = phi_from_m(m_plus.at_zero[i], u_at_zero, inv2k);
        let vphi_p = vphi_from_n(n_plus.at_zero[i], u_at_zero, inv2k);

        let ai = det2(phi_m, vphi_p);
        let bi = det2(phi_p, phi_m);

        // branch-flip consistency: a even, b odd in k
        let phi_m_f = phi_from_m(m_minus.at_zero[i], u_at_zero, -inv2k);
        let phi_p_f = phi_from_m(m_plus.at_zero[i], u_at_zero, -inv2k);
        let vphi_p_f = vphi_from_n(n_plus.at_zero[i], u_at_zero, -inv2k);
        let ai_f = det2(phi_m_f, vphi_p_f);
        let bi_f = det2(phi_p_f, phi_m_f);
        let scale = ai.norm().max(bi.norm()).max(1e-300);
        parity_err = parity_err
            .max((ai_f - ai).norm() / scale)
            .max((bi_f + bi).norm() / scale);

        let ri = bi / ai;
        let abs_a2 = ai.norm_sqr();
        let abs_b2 = bi.norm_sqr();
        let defect = if z > 0.0 {
            (abs_a2 + abs_b2 - 1.0).abs()
        } else {
            (abs_a2 - abs_b2 - 1.0).abs()
        };
        unit_err = unit_err.max(defect);
        min_abs_a = min_abs_a.min(ai.norm());

        a.push(ai);
        b.push(bi);
        r_plus.push(ri * inv2k);
        r_minus.push(ri * two_k);
        r.push(ri);
    }

    let data = ScatteringData {
        zgrid,
        a,
        b,
        r,
        r_plus,
        r_minus,
        min_abs_a,
        unitarity_max_err: unit_err,
        parity_max_err: Some(parity_err),
    };
    data.check_gate(gate_tol)?;
    Ok(data)
}

/// Full direct-scattering transform of a potential on the spectral grid.
pub fn scattering_ab(
    field: &PotentialField,
    zgrid: &SpectralGrid,
    opts: ScatteringOptions,
) -> Result<ScatteringData> {
    let zs = zgrid.nodes();
    let m_minus = solve_jost(field, &zs, JostKind::MMinus, opts.jost)?;
    let m_plus = solve_jost(field, &zs, JostKind::MPlus, opts.jost)?;
    let n_plus = solve_jost(field, &zs, JostKind::NPlus, opts.jost)?;
    let u0 = field.u[field.grid.zero_index()];
    assemble_scattering(&m_minus, &m_plus, &n_plus, u0, *zgrid, opts.gate_tol)
}

/// Analytic soliton-free certificate `1 - ||u||_1 exp(||W_1||_1) / 2`.
///
/// A positive value certifies `|a| > 0` on the whole contour; a negative
/// value is merely uninformative (the numerical gate decides).
pub fn soliton_free_bound(field: &PotentialField) -> f64 {
    let dx = field.grid.spacing();
    let u_l1: f64 = field.u.iter().map(|v| v.norm()).sum::<f64>() * dx;
    // |W_1| = Frobenius norm of [[0, u/2], [conj w, 0]]
    let w1_l1: f64 = field
        .u
        .iter()
        .zip(field.w.iter())
        .map(|(u, w)| (0.25 * u.norm_sqr() + w.norm_sqr()).sqrt())
        .sum::<f64>()
        * dx;
    1.0 - 0.5 * u_l1 * w1_l1.exp()
}

// -------------------------------------------------------------------------
// archive formats
// -------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct ArchiveGrid {
    #[serde(rename = "Z")]
    z: f64,
    #[serde(rename = "M")]
    m: usize,
}

/// JSON scattering archive.
#[derive(Debug, Serialize, Deserialize)]
pub struct ScatteringArchive {
    zgrid: ArchiveGrid,
    a_re: Vec<f64>,
    a_im: Vec<f64>,
    b_re: Vec<f64>,
    b_im: Vec<f64>,
    rp_re: Vec<f64>,
    rp_im: Vec<f64>,
    rm_re: Vec<f64>,
    rm_im: Vec<f64>,
    min_abs_a: f64,
    unitarity_max_err: f64,
}

fn split(v: &[C64]) -> (Vec<f64>, Vec<f64>) {
    (v.iter().map(|c| c.re).collect(), v.iter().map(|c| c.im).collect())
}

fn join(re: &[f64], im: &[f64]) -> Vec<C64> {
    re.iter().zip(im.iter()).map(|(&r, &i)| c64(r, i)).collect()
}

impl From<&ScatteringData> for ScatteringArchive {
    fn from(d: &ScatteringData) -> Self {
        let (a_re, a_im) = split(&d.a);
        let (b_re, b_im) = split(&d.b);
        let (rp_re, rp_im) = split(&d.r_plus);
        let (rm_re, rm_im) = split(&d.r_minus);
        Self {
            zgrid: ArchiveGrid {
                z: d.zgrid.half_width,
                m: d.zgrid.point_count,
            },
            a_re,
            a_im,
            b_re,
            b_im,
            rp_re,
            rp_im,
            rm_re,
            rm_im,
            min_abs_a: d.min_abs_a,
            unitarity_max_err: d.unitarity_max_err,
        }
    }
}

/// Write the JSON archive.
pub fn write_archive_json(path: &Path, data: &ScatteringData) -> Result<()> {
    let archive = ScatteringArchive::from(data);
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(file, &archive)?;
    Ok(())
}

/// Read a JSON archive back into scattering data. Derived quantities are
/// recomputed and cross-checked so a corrupted file is rejected.
pub fn read_archive_json(path: &Path) -> Result<ScatteringData> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let archive: ScatteringArchive = serde_json::from_reader(file)?;
    let display = path.display().to_string();
    let m = archive.zgrid.m;
    let zgrid = SpectralGrid::new(archive.zgrid.z, m)
        .map_err(|e| Error::Malformed {
            path: display.clone(),
            msg: e.to_string(),
        })?;
    for (name, arr) in [
        ("a_re", &archive.a_re),
        ("a_im", &archive.a_im),
        ("b_re", &archive.b_re),
        ("b_im", &archive.b_im),
        ("rp_re", &archive.rp_re),
        ("rp_im", &archive.rp_im),
        ("rm_re", &archive.rm_re),
        ("rm_im", &archive.rm_im),
    ] {
        if arr.len() != m {
            return Err(Error::Malformed {
                path: display,
                msg: format!("array `{name}` has length {} but M = {m}", arr.len()),
            });
        }
    }
    let a = join(&archive.a_re, &archive.a_im);
    let b = join(&archive.b_re, &archive.b_im);
    let r_plus = join(&archive.rp_re, &archive.rp_im);
    let r_minus = join(&archive.rm_re, &archive.rm_im);
    let r: Vec<C64> = a.iter().zip(b.iter()).map(|(a, b)| b / a).collect();

    let mut min_abs_a = f64::INFINITY;
    let mut unit_err: f64 = 0.0;
    for i in 0..m {
        min_abs_a = min_abs_a.min(a[i].norm());
        let defect = if zgrid.node(i) > 0.0 {
            (a[i].norm_sqr() + b[i].norm_sqr() - 1.0).abs()
        } else {
            (a[i].norm_sqr() - b[i].norm_sqr() - 1.0).abs()
        };
        unit_err = unit_err.max(defect);
        // r+ and r- must be consistent with b/a through the branch map
        let k = SpectralGrid::branch_k(zgrid.node(i));
        let expect_rp = r[i] / (2.0 * k);
        if (expect_rp - r_plus[i]).norm() > 1e-9 * (1.0 + r_plus[i].norm()) {
            return Err(Error::Malformed {
                path: display,
                msg: format!("rp inconsistent with b/a at node {i}"),
            });
        }
    }
    if (min_abs_a - archive.min_abs_a).abs() > 1e-9 * (1.0 + archive.min_abs_a) {
        return Err(Error::Malformed {
            path: display,
            msg: "stored min_abs_a inconsistent with arrays".into(),
        });
    }
    Ok(ScatteringData {
        zgrid,
        a,
        b,
        r,
        r_plus,
        r_minus,
        min_abs_a,
        unitarity_max_err: unit_err,
        parity_max_err: None,
    })
}

/// Write the CSV mirror (`z,re_a,im_a,re_rp,im_rp,re_rm,im_rm`).
pub fn write_archive_csv(path: &Path, data: &ScatteringData) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "z,re_a,im_a,re_rp,im_rp,re_rm,im_rm")?;
    for i in 0..data.zgrid.point_count {
        writeln!(
            out,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            data.zgrid.node(i),
            data.a[i].re,
            data.a[i].im,
            data.r_plus[i].re,
            data.r_plus[i].im,
            data.r_minus[i].re,
            data.r_minus[i].im,
        )?;
    }
    Ok(())
}

/// Read the CSV mirror back (row count and node positions are validated).
pub fn read_archive_csv(path: &Path, zgrid: SpectralGrid) -> Result<(Vec<C64>, Vec<C64>, Vec<C64>)> {
    let display = path.display().to_string();
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut a = Vec::new();
    let mut rp = Vec::new();
    let mut rm = Vec::new();
    for (idx, line) in file.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if idx == 0 {
            if t != "z,re_a,im_a,re_rp,im_rp,re_rm,im_rm" {
                return Err(Error::Malformed {
                    path: display,
                    msg: "bad CSV header".into(),
                });
            }
            continue;
        }
        let cols: Vec<&str> = t.split(',').collect();
        if cols.len() != 7 {
            return Err(Error::Malformed {
                path: display,
                msg: format!("line {}: expected 7 columns", idx + 1),
            });
        }
        let nums: Vec<f64> = cols
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|_| Error::Malformed {
                    path: path.display().to_string(),
                    msg: format!("line {}: bad number", idx + 1),
                })
            })
            .collect::<Result<_>>()?;
        let row = a.len();
        if row >= zgrid.point_count || (nums[0] - zgrid.node(row)).abs() > 1e-9 {
            return Err(Error::Malformed {
                path: display,
                msg: format!("line {}: node mismatch with the grid", idx + 1),
            });
        }
        a.push(c64(nums[1], nums[2]));
        rp.push(c64(nums[3], nums[4]));
        rm.push(c64(nums[5], nums[6]));
    }
    if a.len() != zgrid.point_count {
        return Err(Error::Malformed {
            path: display,
            msg: format!("row count {} != M = {}", a.len(), zgrid.point_count),
        });
    }
    Ok((a, rp, rm))
}
