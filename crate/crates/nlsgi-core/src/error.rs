//! Error type shared across the engine.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid parameters (non-positive extent, count below minimum, odd count).
    #[error("invalid grid: {0}")]
    Grid(String),

    /// Unparseable preset descriptor or bad preset parameters.
    #[error("invalid preset: {0}")]
    Preset(String),

    /// Malformed input file (CSV rows, JSON archive).
    #[error("malformed input {path}: {msg}")]
    Malformed { path: String, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// The soliton-free gate failed: `a` came too close to zero on the grid,
    /// so eigenvalues or resonances are suspected and inversion refuses to run.
    #[error("soliton gate: min |a| = {min_abs_a:.3e} <= gate tolerance {gate_tol:.3e}")]
    SolitonGate { min_abs_a: f64, gate_tol: f64 },

    /// Scattering input violates an identity it should satisfy
    /// (e.g. `1 + conj(r+) r-` not real positive).
    #[error("corrupt scattering data: {0}")]
    DataCorruption(String),

    /// A Volterra step became ill-conditioned at the given spectral node.
    #[error("volterra step failed at z = {z}: {reason}")]
    VolterraStep { z: f64, reason: String },

    /// An iterative solve did not reach tolerance.
    #[error("{context}: no convergence after {iterations} iterations (contraction estimate {contraction:.3})")]
    NonConvergence {
        context: String,
        iterations: usize,
        contraction: f64,
    },

    /// The reference PDE solver detected runaway norm growth.
    #[error("reference solver instability at t = {t:.6}: norm ratio {norm_ratio:.3e}")]
    Instability { t: f64, norm_ratio: f64 },

    /// Reference-solver step size violates the stability precondition.
    #[error("time step {dt:.3e} exceeds the stability bound {bound:.3e} (c_stab * dx^2)")]
    UnstableStep { dt: f64, bound: f64 },

    /// Bad run configuration.
    #[error("configuration error: {0}")]
    Config(String),
}
