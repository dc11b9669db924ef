//! Potential ingestion: presets, CSV files, the derived field
//! `w = -i u_x + 2u - |u|^2 u / 2`, and the diagnostic norms.

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::SpatialGrid;
use crate::{c64, C64};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

/// Default decay tolerance at the grid boundary for the built-in presets.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-10;

/// Descriptor of an initial potential.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetSpec {
    Zero,
    /// `amplitude * sech(x - center) * exp(i phase)`
    Sech {
        amplitude: f64,
        center: f64,
        phase: f64,
    },
    /// `amplitude * exp(-x^2 / (2 sigma^2))`
    Gaussian {
        amplitude: f64,
        sigma: f64,
    },
    File(PathBuf),
}

impl PresetSpec {
    /// Parse `zero`, `sech(A[,x0[,phase]])`, `gaussian(A[,sigma])`,
    /// or `file:PATH`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "zero" {
            return Ok(PresetSpec::Zero);
        }
        if let Some(path) = text.strip_prefix("file:") {
            return Ok(PresetSpec::File(PathBuf::from(path)));
        }
        let (name, args) = match text.split_once('(') {
            Some((name, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Preset(format!("missing ')' in `{text}`")))?;
                let args: Vec<f64> = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|s| {
                            s.trim()
                                .parse::<f64>()
                                .map_err(|_| Error::Preset(format!("bad number `{s}` in `{text}`")))
                        })
                        .collect::<Result<_>>()?
                };
                (name.trim(), args)
            }
            None => return Err(Error::Preset(format!("unknown preset `{text}`"))),
        };
        match (name, args.len()) {
            ("sech", 1..=3) => Ok(PresetSpec::Sech {
                amplitude: args[0],
                center: args.get(1).copied().unwrap_or(0.0),
                phase: args.get(2).copied().unwrap_or(0.0),
            }),
            ("gaussian", 1..=2) => {
                let sigma = args.get(1).copied().unwrap_or(1.0);
                if sigma <= 0.0 {
                    return Err(Error::Preset("gaussian sigma must be positive".into()));
                }
                Ok(PresetSpec::Gaussian {
                    amplitude: args[0],
                    sigma,
                })
            }
            _ => Err(Error::Preset(format!("unknown preset `{text}`"))),
        }
    }
}

impl fmt::Display for PresetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresetSpec::Zero => write!(f, "zero"),
            PresetSpec::Sech {
                amplitude,
                center,
                phase,
            } => write!(f, "sech({amplitude},{center},{phase})"),
            PresetSpec::Gaussian { amplitude, sigma } => write!(f, "gaussian({amplitude},{sigma})"),
            PresetSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Complex potential samples on a spatial grid together with the derived
/// field `w`. Immutable after construction.
#[derive(Debug, Clone)]
pub struct PotentialField {
    pub grid: SpatialGrid,
    pub u: Vec<C64>,
    pub w: Vec<C64>,
    /// `max(|u(-L)|, |u(L - dx)|)`, checked against the decay tolerance.
    pub boundary_deviation: f64,
    /// Warnings recorded during ingestion (decay violations and the like).
    pub warnings: Vec<String>,
}

impl PotentialField {
    /// Wrap raw samples: computes `w` and runs the boundary-decay check
    /// (violations are recorded as warnings, not errors).
    pub fn from_samples(grid: SpatialGrid, u: Vec<C64>, boundary_tol: f64) -> Result<Self> {
        if u.len() != grid.point_count {
            return Err(Error::Grid(format!(
                "sample count {} does not match grid point count {}",
                u.len(),
                grid.point_count
            )));
        }
        let w = compute_w(&u, grid);
        let boundary_deviation = u[0].norm().max(u[grid.point_count - 1].norm());
        let mut warnings = Vec::new();
        if boundary_deviation > boundary_tol {
            warnings.push(format!(
                "boundary decay violated: |u| = {boundary_deviation:.3e} at the grid ends, tolerance {boundary_tol:.3e}"
            ));
        }
        Ok(Self {
            grid,
            u,
            w,
            boundary_deviation,
            warnings,
        })
    }

    pub fn zero(grid: SpatialGrid) -> Self {
        let n = grid.point_count;
        Self {
            grid,
            u: vec![C64::ZERO; n],
            w: vec![C64::ZERO; n],
            boundary_deviation: 0.0,
            warnings: Vec::new(),
        }
    }
}

/// `w = -i u_x + 2u - |u|^2 u / 2` with a spectral derivative on the
/// periodic extension of the grid.
pub fn compute_w(u: &[C64], grid: SpatialGrid) -> Vec<C64> {
    let ux = fourier::spectral_derivative(u, grid.half_width, 1);
    u.iter()
        .zip(ux.iter())
        .map(|(&u, &ux)| -c64(0.0, 1.0) * ux + 2.0 * u - 0.5 * u.norm_sqr() * u)
        .collect()
}

/// Sample a preset or ingest a CSV potential onto the target grid.
pub fn sample_potential(
    spec: &PresetSpec,
    grid: SpatialGrid,
    boundary_tol: f64,
) -> Result<PotentialField> {
    match spec {
        PresetSpec::Zero => Ok(PotentialField::zero(grid)),
        PresetSpec::Sech {
            amplitude,
            center,
            phase,
        } => {
            let rot = c64(0.0, *phase).exp();
            let u = grid
                .nodes()
                .iter()
                .map(|&x| *amplitude * rot / (x - center).cosh())
                .collect();
            PotentialField::from_samples(grid, u, boundary_tol)
        }
        PresetSpec::Gaussian { amplitude, sigma } => {
            let u = grid
                .nodes()
                .iter()
                .map(|&x| c64(*amplitude * (-x * x / (2.0 * sigma * sigma)).exp(), 0.0))
                .collect();
            PotentialField::from_samples(grid, u, boundary_tol)
        }
        PresetSpec::File(path) => read_potential_csv(path, grid, boundary_tol),
    }
}

/// Read a `x,re_u,im_u` CSV. If the file grid matches the target nodes the
/// samples are ingested directly; if it is a different uniform grid covering
/// the target domain, band-limited (sinc) interpolation resamples it.
pub fn read_potential_csv(
    path: &Path,
    grid: SpatialGrid,
    boundary_tol: f64,
) -> Result<PotentialField> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut xs: Vec<f64> = Vec::new();
    let mut us: Vec<C64> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if idx == 0 {
            if trimmed != "x,re_u,im_u" {
                return Err(Error::Malformed {
                    path: display,
                    msg: format!("expected header `x,re_u,im_u`, got `{trimmed}`"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Malformed {
                path: display,
                msg: format!("line {}: expected 3 columns", idx + 1),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::Malformed {
                path: path.display().to_string(),
                msg: format!("line {}: bad number `{s}`", idx + 1),
            })
        };
        xs.push(parse(fields[0])?);
        us.push(c64(parse(fields[1])?, parse(fields[2])?));
    }
    if xs.len() < 2 {
        return Err(Error::Malformed {
            path: display,
            msg: "fewer than 2 data rows".into(),
        });
    }
    let dx_file = xs[1] - xs[0];
    if dx_file <= 0.0 {
        return Err(Error::Malformed {
            path: display,
            msg: "x column must be strictly ascending".into(),
        });
    }
    for i in 1..xs.len() {
        let step = xs[i] - xs[i - 1];
        if (step - dx_file).abs() > 1e-9 * dx_file.max(1.0) {
            return Err(Error::Malformed {
                path: display,
                msg: format!("non-uniform spacing near row {}", i + 2),
            });
        }
    }

    let nodes = grid.nodes();
    let matches_target = xs.len() == grid.point_count
        && xs
            .iter()
            .zip(nodes.iter())
            .all(|(a, b)| (a - b).abs() <= 1e-9 * grid.spacing());
    if matches_target {
        return PotentialField::from_samples(grid, us, boundary_tol);
    }

    // Resampling decouples file resolution from solver resolution, but the
    // file must cover the target domain.
    let tol = dx_file + 1e-9;
    if xs[0] > nodes[0] + tol || *xs.last().unwrap() < nodes[nodes.len() - 1] - tol {
        return Err(Error::Malformed {
            path: display,
            msg: format!(
                "file grid [{:.6}, {:.6}] ({} rows) does not cover the target grid [{:.6}, {:.6}] ({} points)",
                xs[0],
                xs.last().unwrap(),
                xs.len(),
                nodes[0],
                nodes[nodes.len() - 1],
                grid.point_count
            ),
        });
    }
    let u = sinc_resample(&xs, &us, dx_file, &nodes);
    PotentialField::from_samples(grid, u, boundary_tol)
}

/// Whittaker–Shannon interpolation of uniform samples at arbitrary targets.
fn sinc_resample(xs: &[f64], us: &[C64], dx: f64, targets: &[f64]) -> Vec<C64> {
    let sinc = |t: f64| -> f64 {
        if t.abs() < 1e-12 {
            1.0
        } else {
            let p = std::f64::consts::PI * t;
            p.sin() / p
        }
    };
    targets
        .iter()
        .map(|&x| {
            let mut acc = C64::ZERO;
            for (xn, un) in xs.iter().zip(us.iter()) {
                acc += *un * sinc((x - xn) / dx);
            }
            acc
        })
        .collect()
}

/// Write the potential CSV (`x,re_u,im_u`).
pub fn write_potential_csv(path: &Path, grid: SpatialGrid, u: &[C64]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "x,re_u,im_u")?;
    for (x, v) in grid.nodes().iter().zip(u.iter()) {
        writeln!(out, "{x:.17e},{:.17e},{:.17e}", v.re, v.im)?;
    }
    Ok(())
}

/// The six diagnostic norms used across the engine.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NormReport {
    pub l1: f64,
    pub l2: f64,
    /// weighted `<x> u` in L2
    pub l21: f64,
    pub h1: f64,
    pub h2: f64,
    /// `<x> u` and `<x> u_x` in L2
    pub h11: f64,
}

/// Trapezoid quadrature of all six norms; derivatives are spectral.
pub fn norms(field: &PotentialField) -> NormReport {
    let grid = field.grid;
    let dx = grid.spacing();
    let ux = fourier::spectral_derivative(&field.u, grid.half_width, 1);
    let uxx = fourier::spectral_derivative(&field.u, grid.half_width, 2);
    let mut l1 = 0.0;
    let mut l2sq = 0.0;
    let mut l21sq = 0.0;
    let mut dxsq = 0.0;
    let mut dxxsq = 0.0;
    let mut wdxsq = 0.0;
    for (j, x) in grid.nodes().into_iter().enumerate() {
        let wsq = 1.0 + x * x;
        l1 += field.u[j].norm();
        l2sq += field.u[j].norm_sqr();
        l21sq += wsq * field.u[j].norm_sqr();
        dxsq += ux[j].norm_sqr();
        dxxsq += uxx[j].norm_sqr();
        wdxsq += wsq * ux[j].norm_sqr();
    }
    NormReport {
        l1: l1 * dx,
        l2: (l2sq * dx).sqrt(),
        l21: (l21sq * dx).sqrt(),
        h1: ((l2sq + dxsq) * dx).sqrt(),
        h2: ((l2sq + dxsq + dxxsq) * dx).sqrt(),
        h11: ((l21sq + wdxsq) * dx).sqrt(),
    }
}
