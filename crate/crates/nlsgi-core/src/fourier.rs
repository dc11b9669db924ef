//! Small FFT utilities: cached plans, spectral derivatives on the periodic
//! extension of the spatial grid, and band-limited resampling.

use crate::C64;
use once_cell_less::PlanCache;
use rustfft::num_traits::Zero;
use std::sync::Arc;

/// Lightweight global plan cache so hot loops never re-plan.
mod once_cell_less {
    use rustfft::{Fft, FftPlanner};
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};

    pub struct PlanCache {
        plans: Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>,
    }

    impl PlanCache {
        pub fn global() -> &'static PlanCache {
            static CACHE: OnceLock<PlanCache> = OnceLock::new();
            CACHE.get_or_init(|| PlanCache {
                plans: Mutex::new(HashMap::new()),
            })
        }

        pub fn plan(&self, len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
            let mut plans = self.plans.lock().unwrap();
            plans
                .entry((len, forward))
                .or_insert_with(|| {
                    let mut planner = FftPlanner::new();
                    if forward {
                        planner.plan_fft_forward(len)
                    } else {
                        planner.plan_fft_inverse(len)
                    }
                })
                .clone()
        }
    }
}

pub fn plan(len: usize, forward: bool) -> Arc<dyn rustfft::Fft<f64>> {
    PlanCache::global().plan(len, forward)
}

/// Unnormalized forward FFT, in place.
pub fn fft_forward(buf: &mut [C64]) {
    plan(buf.len(), true).process(buf);
}

/// Inverse FFT, in place, normalized by `1/len`.
pub fn fft_inverse(buf: &mut [C64]) {
    let n = buf.len();
    plan(n, false).process(buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Signed FFT frequency of bin `m` for period `2 * half_width`:
/// wavenumber `kappa_m = pi * m' / half_width` with `m'` in `[-n/2, n/2)`.
#[inline]
pub fn wavenumber(m: usize, n: usize, half_width: f64) -> f64 {
    let signed = if m <= n / 2 {
        m as isize
    } else {
        m as isize - n as isize
    };
    std::f64::consts::PI * signed as f64 / half_width
}

/// Spectral derivative of given order on the periodic extension.
///
/// The Nyquist bin is zeroed for odd orders (its derivative is not
/// representable on the grid).
pub fn spectral_derivative(u: &[C64], half_width: f64, order: u32) -> Vec<C64> {
    let n = u.len();
    let mut hat = u.to_vec();
    fft_forward(&mut hat);
    for (m, v) in hat.iter_mut().enumerate() {
        let kappa = wavenumber(m, n, half_width);
        let mult = C64::new(0.0, kappa).powu(order);
        *v *= mult;
        if order % 2 == 1 && n % 2 == 0 && m == n / 2 {
            *v = C64::zero();
        }
    }
    fft_inverse(&mut hat);
    hat
}

/// Band-limited upsampling by an integer factor: returns `factor * n`
/// samples on the same period, the first coinciding with `u[0]`.
pub fn refine_periodic(u: &[C64], factor: usize) -> Vec<C64> {
    assert!(factor >= 1);
    if factor == 1 {
        return u.to_vec();
    }
    let n = u.len();
    let big = n * factor;
    let mut hat = u.to_vec();
    fft_forward(&mut hat);
    let mut padded = vec![C64::zero(); big];
    let half = n / 2;
    for m in 0..n {
        let target = if m <= half { m } else { big - (n - m) };
        padded[target] = hat[m];
    }
    // Split the Nyquist bin symmetrically so real inputs stay real.
    if n % 2 == 0 {
        let v = hat[half] * 0.5;
        padded[half] = v;
        padded[big - half] = v;
    }
    fft_inverse(&mut padded);
    let scale = factor as f64;
    for v in padded.iter_mut() {
        *v *= scale;
    }
    padded
}
