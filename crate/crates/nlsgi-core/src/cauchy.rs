//! Discrete Cauchy transform machinery: the boundary projectors `P+`/`P-`,
//! the Hilbert transform tied to them by `P+ + P- = -iH`, the off-axis
//! Cauchy integral, and the scalar `delta` Riemann–Hilbert factors.
//!
//! The projectors are Fourier multipliers on a zero-padded copy of the
//! spectral grid: `P+` keeps the components that extend analytically into
//! `Im z > 0`, `P-` the complementary ones, and the zero-frequency and
//! Nyquist bins are split evenly so that `P+ - P- = I` holds exactly on the
//! discrete space.

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::SpectralGrid;
use crate::{c64, C64};

/// Which boundary value of the Cauchy integral to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Deterministic transform plan for one spectral grid.
#[derive(Debug, Clone)]
pub struct ProjectorPlan {
    pub zgrid: SpectralGrid,
    /// Zero-padded transform length, `pad_factor * M`.
    pub padded_len: usize,
    /// Fraction of the grid at each end covered by the cosine taper.
    pub taper_frac: f64,
    /// Relative decay tolerance: inputs whose outer-band magnitude exceeds
    /// `window_tol * max|f|` are tapered before transforming.
    pub window_tol: f64,
}

impl ProjectorPlan {
    pub fn new(zgrid: SpectralGrid, pad_factor: usize) -> Self {
        Self::with_policy(zgrid, pad_factor, 0.1, 1e-8)
    }

    pub fn with_policy(
        zgrid: SpectralGrid,
        pad_factor: usize,
        taper_frac: f64,
        window_tol: f64,
    ) -> Self {
        let pad = pad_factor.max(2);
        Self {
            zgrid,
            padded_len: pad * zgrid.point_count,
            taper_frac,
            window_tol,
        }
    }

    /// Returns the outer-band excess when the input does not decay at the
    /// grid ends, i.e. the taper will modify it.
    pub fn decay_violation(&self, f: &[C64]) -> Option<f64> {
        let m = self.zgrid.point_count;
        let band = ((m as f64 * self.taper_frac).ceil() as usize).clamp(1, m / 2);
        let global_max = f.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        if global_max == 0.0 {
            return None;
        }
        let band_max = f[..band]
            .iter()
            .chain(f[m - band..].iter())
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        if band_max > self.window_tol * global_max {
            Some(band_max / global_max)
        } else {
            None
        }
    }

    fn taper_weight(&self, m: usize) -> f64 {
        let z = self.zgrid.node(m).abs();
        let z0 = (1.0 - self.taper_frac) * self.zgrid.half_width;
        if z <= z0 {
            1.0
        } else {
            let t = (z - z0) / (self.zgrid.half_width - z0);
            0.5 * (1.0 + (std::f64::consts::PI * t.min(1.0)).cos())
        }
    }

    /// Pad (and taper when the decay check fails) into the transform buffer.
    fn padded(&self, f: &[C64]) -> Vec<C64> {
        assert_eq!(f.len(), self.zgrid.point_count);
        let mut buf = vec![C64::ZERO; self.padded_len];
        if self.decay_violation(f).is_some() {
            for (m, v) in f.iter().enumerate() {
                buf[m] = *v * self.taper_weight(m);
            }
        } else {
            buf[..f.len()].copy_from_slice(f);
        }
        buf
    }

    fn apply_multiplier(&self, f: &[C64], mult: impl Fn(Band) -> C64) -> Vec<C64> {
        let p = self.padded_len;
        let mut buf = self.padded(f);
        fourier::fft_forward(&mut buf);
        for (idx, v) in buf.iter_mut().enumerate() {
            let band = if idx == 0 {
                Band::Dc
            } else if 2 * idx == p {
                Band::Nyquist
            } else if idx < p / 2 {
                Band::Positive
            } else {
                Band::Negative
            };
            *v *= mult(band);
        }
        fourier::fft_inverse(&mut buf);
        buf.truncate(self.zgrid.point_count);
        buf
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Band {
    Dc,
    Positive,
    Nyquist,
    Negative,
}

/// Boundary projector `P+` or `P-` of a decaying function on the grid.
pub fn projector(f: &[C64], side: Side, plan: &ProjectorPlan) -> Vec<C64> {
    let mult = move |band: Band| -> C64 {
        match (side, band) {
            (Side::Plus, Band::Positive) => c64(1.0, 0.0),
            (Side::Plus, Band::Negative) => C64::ZERO,
            (Side::Plus, Band::Dc) | (Side::Plus, Band::Nyquist) => c64(0.5, 0.0),
            (Side::Minus, Band::Positive) => C64::ZERO,
            (Side::Minus, Band::Negative) => c64(-1.0, 0.0),
            (Side::Minus, Band::Dc) | (Side::Minus, Band::Nyquist) => c64(-0.5, 0.0),
        }
    };
    plan.apply_multiplier(f, mult)
}

/// Hilbert transform fixed by the identity `P+ + P- = -iH`, i.e.
/// `H = i (P+ + P-)` as a single multiplier (`i sgn` in frequency).
///
/// Note this is the kernel `1/(pi (s - z))`; classical tables that use
/// `1/(pi (z - s))` differ by a sign.
pub fn hilbert(f: &[C64], plan: &ProjectorPlan) -> Vec<C64> {
    let mult = move |band: Band| -> C64 {
        match band {
            Band::Positive => c64(0.0, 1.0),
            Band::Negative => c64(0.0, -1.0),
            Band::Dc | Band::Nyquist => C64::ZERO,
        }
    };
    plan.apply_multiplier(f, mult)
}

/// Cauchy integral `(1/2 pi i) \int f(s)/(s - z) ds` off the axis,
/// by trapezoid over the grid. Accuracy degrades when `|Im z|` is below
/// the grid spacing.
pub fn cauchy_offaxis(f: &[C64], z: C64, plan: &ProjectorPlan) -> C64 {
    let dz = plan.zgrid.spacing();
    let mut acc = C64::ZERO;
    for (m, v) in f.iter().enumerate() {
        let s = plan.zgrid.node(m);
        acc += *v / (c64(s, 0.0) - z);
    }
    acc * dz / c64(0.0, 2.0 * std::f64::consts::PI)
}

/// Whether the off-axis evaluation point is far enough from the contour.
pub fn offaxis_accuracy_ok(z: C64, plan: &ProjectorPlan) -> bool {
    z.im.abs() >= plan.zgrid.spacing()
}

/// Scalar Riemann–Hilbert factors `delta_+-` over the grid.
#[derive(Debug, Clone)]
pub struct DeltaSet {
    pub delta_plus: Vec<C64>,
    pub delta_minus: Vec<C64>,
    /// `log(1 + conj(r+) r-)`, real by the unitarity identities.
    pub log_integrand: Vec<f64>,
}

impl DeltaSet {
    /// Identity set (`delta_+- = 1`), the `r = 0` solution.
    pub fn identity(m: usize) -> Self {
        Self {
            delta_plus: vec![c64(1.0, 0.0); m],
            delta_minus: vec![c64(1.0, 0.0); m],
            log_integrand: vec![0.0; m],
        }
    }

    /// `conj(delta_+ delta_-)`, the unimodular factor multiplying `r_+-`
    /// in the modified reflection coefficients.
    pub fn modifier(&self) -> Vec<C64> {
        self.delta_plus
            .iter()
            .zip(self.delta_minus.iter())
            .map(|(p, m)| (p * m).conj())
            .collect()
    }
}

/// Relative imaginary-part budget for `conj(r+) r-` before the input is
/// declared corrupt.
const POSITIVITY_IM_TOL: f64 = 1e-8;

/// Solve the scalar RH problem: `delta_+- = exp(P^+- log(1 + conj(r+) r-))`.
///
/// `1 + conj(r+) r-` equals `1/|a|^2`, so it must be real and positive;
/// a violation signals inconsistent scattering input.
pub fn delta_solve(r_plus: &[C64], r_minus: &[C64], plan: &ProjectorPlan) -> Result<DeltaSet> {
    let m = plan.zgrid.point_count;
    if r_plus.len() != m || r_minus.len() != m {
        return Err(Error::DataCorruption(
            "reflection arrays do not match the spectral grid".into(),
        ));
    }
    let mut log_integrand = vec![0.0; m];
    for i in 0..m {
        let q = r_plus[i].conj() * r_minus[i];
        if q.im.abs() > POSITIVITY_IM_TOL * (1.0 + q.norm()) {
            return Err(Error::DataCorruption(format!(
                "conj(r+) r- not real at z = {:.6}: Im = {:.3e}",
                plan.zgrid.node(i),
                q.im
            )));
        }
        let one_plus = 1.0 + q.re;
        if one_plus <= 0.0 {
            return Err(Error::DataCorruption(format!(
                "1 + conj(r+) r- = {one_plus:.3e} <= 0 at z = {:.6}",
                plan.zgrid.node(i)
            )));
        }
        log_integrand[i] = one_plus.ln();
    }
    let nu: Vec<C64> = log_integrand.iter().map(|&v| c64(v, 0.0)).collect();
    let p_plus = projector(&nu, Side::Plus, plan);
    let p_minus = projector(&nu, Side::Minus, plan);
    Ok(DeltaSet {
        delta_plus: p_plus.iter().map(|v| v.exp()).collect(),
        delta_minus: p_minus.iter().map(|v| v.exp()).collect(),
        log_integrand,
    })
}
