//! Uniform spatial and spectral grids.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

pub const MIN_POINTS: usize = 8;

/// Uniform grid on `[-L, L)` with nodes `x_j = -L + j dx`, `dx = 2L/N`.
///
/// `N` must be even so that `x = 0` is a node (the Wronskians for `a`, `b`
/// are evaluated there).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub half_width: f64,
    pub point_count: usize,
}

impl SpatialGrid {
    pub fn new(half_width: f64, point_count: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Grid(format!(
                "spatial half-width must be positive, got {half_width}"
            )));
        }
        if point_count < MIN_POINTS {
            return Err(Error::Grid(format!(
                "spatial point count {point_count} below minimum {MIN_POINTS}"
            )));
        }
        if point_count % 2 != 0 {
            return Err(Error::Grid(format!(
                "spatial point count {point_count} must be even so x = 0 is a node"
            )));
        }
        Ok(Self {
            half_width,
            point_count,
        })
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.point_count as f64
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.point_count).map(|j| self.node(j)).collect()
    }

    /// Index of the node at `x = 0`.
    #[inline]
    pub fn zero_index(&self) -> usize {
        self.point_count / 2
    }
}

/// Uniform grid in the spectral variable `z`, offset by half a cell so that
/// `z = 0` is never a node: `z_m = -Z + (m + 1/2) dz`, `dz = 2Z/M`.
///
/// The half-cell offset keeps `k(z)` away from zero, where the `T_2`
/// transform and `r_+ = r/(2k)` degenerate; the node set stays symmetric
/// about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub half_width: f64,
    pub point_count: usize,
}

impl SpectralGrid {
    pub fn new(half_width: f64, point_count: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Grid(format!(
                "spectral half-width must be positive, got {half_width}"
            )));
        }
        if point_count < MIN_POINTS {
            return Err(Error::Grid(format!(
                "spectral point count {point_count} below minimum {MIN_POINTS}"
            )));
        }
        if point_count % 2 != 0 {
            return Err(Error::Grid(format!(
                "spectral point count {point_count} must be even for a symmetric node set"
            )));
        }
        Ok(Self {
            half_width,
            point_count,
        })
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.point_count as f64
    }

    #[inline]
    pub fn node(&self, m: usize) -> f64 {
        -self.half_width + (m as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.point_count).map(|m| self.node(m)).collect()
    }

    /// Branch map `k(z) = sqrt(z)` for `z > 0`, `k(z) = i sqrt(-z)` for `z < 0`.
    #[inline]
    pub fn branch_k(z: f64) -> C64 {
        if z >= 0.0 {
            C64::new(z.sqrt(), 0.0)
        } else {
            C64::new(0.0, (-z).sqrt())
        }
    }
}

/// Build the spatial/spectral grid pair used by one run.
pub fn make_grids(
    spatial_half_width: f64,
    spatial_points: usize,
    spectral_half_width: f64,
    spectral_points: usize,
) -> Result<(SpatialGrid, SpectralGrid)> {
    Ok((
        SpatialGrid::new(spatial_half_width, spatial_points)?,
        SpectralGrid::new(spectral_half_width, spectral_points)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_scale_grids() {
        let (xg, zg) = make_grids(20.0, 2048, 40.0, 4096).unwrap();
        assert!((xg.spacing() - 0.01953125).abs() < 1e-15);
        assert!((zg.spacing() - 0.01953125).abs() < 1e-15);
        assert_eq!(xg.node(xg.zero_index()), 0.0);
    }

    #[test]
    fn smallest_legal_grids() {
        let (xg, zg) = make_grids(1.0, 8, 1.0, 8).unwrap();
        assert_eq!(xg.point_count, 8);
        assert_eq!(zg.point_count, 8);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_grids(20.0, 7, 40.0, 4096).is_err());
        assert!(make_grids(-1.0, 64, 40.0, 4096).is_err());
        assert!(make_grids(20.0, 64, 0.0, 4096).is_err());
        assert!(make_grids(20.0, 64, 40.0, 6).is_err());
    }

    #[test]
    fn spectral_nodes_avoid_zero_and_pair_symmetrically() {
        let zg = SpectralGrid::new(1.0, 8).unwrap();
        let nodes = zg.nodes();
        for (m, z) in nodes.iter().enumerate() {
            assert!(z.abs() >= 0.5 * zg.spacing() - 1e-15);
            let mirror = nodes[zg.point_count - 1 - m];
            assert!((z + mirror).abs() < 1e-15);
        }
    }

    #[test]
    fn branch_map_squares_back() {
        let zg = SpectralGrid::new(40.0, 64).unwrap();
        for z in zg.nodes() {
            let k = SpectralGrid::branch_k(z);
            let back = k * k;
            assert!((back.re - z).abs() <= 4e-16 * z.abs().max(1.0));
            assert!(back.im.abs() <= 4e-16 * z.abs().max(1.0));
        }
    }
}
