//! Python bindings: a thin facade over the engine exposing the grids,
//! potential presets, direct scattering, inversion, and the two evolution
//! paths. Complex arrays cross the boundary as lists of `(re, im)` tuples.

use nlsgi_core::cauchy::{delta_solve, ProjectorPlan};
use nlsgi_core::evolution::{ist_solve, reference_solve, EvolutionConfig};
use nlsgi_core::potential::{sample_potential, PresetSpec};
use nlsgi_core::reconstruct::reconstruct_field;
use nlsgi_core::rh::RhOptions;
use nlsgi_core::scattering::{
    read_archive_json, scattering_ab, soliton_free_bound, write_archive_json, ScatteringData,
    ScatteringOptions, DEFAULT_GATE_TOL,
};
use nlsgi_core::{make_grids, C64};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py_err(e: nlsgi_core::Error) -> PyErr {
    match e {
        nlsgi_core::Error::Grid(_)
        | nlsgi_core::Error::Preset(_)
        | nlsgi_core::Error::Config(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn pairs(v: &[C64]) -> Vec<(f64, f64)> {
    v.iter().map(|c| (c.re, c.im)).collect()
}

/// Scattering data of a potential on the spectral grid.
#[pyclass(name = "Scattering")]
struct PyScattering {
    data: ScatteringData,
}

#[pymethods]
impl PyScattering {
    #[getter]
    fn min_abs_a(&self) -> f64 {
        self.data.min_abs_a
    }

    #[getter]
    fn unitarity_max_err(&self) -> f64 {
        self.data.unitarity_max_err
    }

    fn z_nodes(&self) -> Vec<f64> {
        self.data.zgrid.nodes()
    }

    fn a(&self) -> Vec<(f64, f64)> {
        pairs(&self.data.a)
    }

    fn b(&self) -> Vec<(f64, f64)> {
        pairs(&self.data.b)
    }

    fn r_plus(&self) -> Vec<(f64, f64)> {
        pairs(&self.data.r_plus)
    }

    fn r_minus(&self) -> Vec<(f64, f64)> {
        pairs(&self.data.r_minus)
    }

    fn save_json(&self, path: &str) -> PyResult<()> {
        write_archive_json(std::path::Path::new(path), &self.data).map_err(to_py_err)
    }

    #[staticmethod]
    fn load_json(path: &str) -> PyResult<Self> {
        Ok(Self {
            data: read_archive_json(std::path::Path::new(path)).map_err(to_py_err)?,
        })
    }
}

/// Reconstructed field and its diagnostics.
#[pyclass(name = "Reconstruction")]
struct PyReconstruction {
    x_nodes: Vec<f64>,
    u: Vec<C64>,
    w_residual: Vec<f64>,
    seam_gap: f64,
}

#[pymethods]
impl PyReconstruction {
    fn x_nodes(&self) -> Vec<f64> {
        self.x_nodes.clone()
    }

    fn u(&self) -> Vec<(f64, f64)> {
        pairs(&self.u)
    }

    fn w_residual(&self) -> Vec<f64> {
        self.w_residual.clone()
    }

    #[getter]
    fn seam_gap(&self) -> f64 {
        self.seam_gap
    }
}

/// Sample a preset potential; returns (x, re u, im u) triples.
#[pyfunction]
#[pyo3(signature = (preset, l, n, boundary_tol = 1e-8))]
fn potential_samples(
    preset: &str,
    l: f64,
    n: usize,
    boundary_tol: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let spec = PresetSpec::parse(preset).map_err(to_py_err)?;
    let (xg, _) = make_grids(l, n, 1.0, 8).map_err(to_py_err)?;
    let field = sample_potential(&spec, xg, boundary_tol).map_err(to_py_err)?;
    Ok(xg
        .nodes()
        .into_iter()
        .zip(field.u.iter())
        .map(|(x, u)| (x, u.re, u.im))
        .collect())
}

/// The analytic soliton-free certificate for a preset.
#[pyfunction]
fn analytic_gate_bound(preset: &str, l: f64, n: usize) -> PyResult<f64> {
    let spec = PresetSpec::parse(preset).map_err(to_py_err)?;
    let (xg, _) = make_grids(l, n, 1.0, 8).map_err(to_py_err)?;
    let field = sample_potential(&spec, xg, 1.0).map_err(to_py_err)?;
    Ok(soliton_free_bound(&field))
}

/// Direct scattering of a preset potential.
#[pyfunction]
#[pyo3(signature = (preset, l, n, z, m, gate_tol = DEFAULT_GATE_TOL))]
fn scatter(
    preset: &str,
    l: f64,
    n: usize,
    z: f64,
    m: usize,
    gate_tol: f64,
) -> PyResult<PyScattering> {
    let spec = PresetSpec::parse(preset).map_err(to_py_err)?;
    let (xg, zg) = make_grids(l, n, z, m).map_err(to_py_err)?;
    let field = sample_potential(&spec, xg, 1e-8).map_err(to_py_err)?;
    let opts = ScatteringOptions {
        gate_tol,
        ..ScatteringOptions::default()
    };
    Ok(PyScattering {
        data: scattering_ab(&field, &zg, opts).map_err(to_py_err)?,
    })
}

/// Riemann–Hilbert inversion of scattering data back to the potential.
#[pyfunction]
#[pyo3(signature = (scattering, l, n, pad_factor = 8, rh_tol = 1e-10, gate_tol = DEFAULT_GATE_TOL))]
fn invert(
    scattering: &PyScattering,
    l: f64,
    n: usize,
    pad_factor: usize,
    rh_tol: f64,
    gate_tol: f64,
) -> PyResult<PyReconstruction> {
    let (xg, _) = make_grids(l, n, 1.0, 8).map_err(to_py_err)?;
    let plan = ProjectorPlan::new(scattering.data.zgrid, pad_factor);
    let deltas =
        delta_solve(&scattering.data.r_plus, &scattering.data.r_minus, &plan).map_err(to_py_err)?;
    let opts = RhOptions {
        rh_tol,
        ..RhOptions::default()
    };
    let res = reconstruct_field(&scattering.data, &deltas, xg, &plan, &opts, gate_tol)
        .map_err(to_py_err)?;
    Ok(PyReconstruction {
        x_nodes: xg.nodes(),
        u: res.u_rec,
        w_residual: res.w_residual,
        seam_gap: res.seam_gap,
    })
}

/// Full IST evolution pipeline: scatter, rotate the reflection data to `t`,
/// invert. Returns the reconstruction at time `t`.
#[pyfunction]
#[pyo3(signature = (preset, t, l, n, z, m, c_theta = 4.0, phase_sign = 1.0, gate_tol = DEFAULT_GATE_TOL))]
#[allow(clippy::too_many_arguments)]
fn ist_evolve(
    preset: &str,
    t: f64,
    l: f64,
    n: usize,
    z: f64,
    m: usize,
    c_theta: f64,
    phase_sign: f64,
    gate_tol: f64,
) -> PyResult<PyReconstruction> {
    let spec = PresetSpec::parse(preset).map_err(to_py_err)?;
    let (xg, zg) = make_grids(l, n, z, m).map_err(to_py_err)?;
    let field = sample_potential(&spec, xg, 1e-8).map_err(to_py_err)?;
    let cfg = EvolutionConfig {
        t_final: t,
        phase_coefficient: c_theta,
        phase_sign,
        dt: 0.15 * xg.spacing() * xg.spacing(),
        ..EvolutionConfig::default()
    };
    let plan = ProjectorPlan::new(zg, 8);
    let opts = ScatteringOptions {
        gate_tol,
        ..ScatteringOptions::default()
    };
    let run = ist_solve(&field, t, &cfg, &zg, &plan, opts, &RhOptions::default())
        .map_err(to_py_err)?;
    Ok(PyReconstruction {
        x_nodes: xg.nodes(),
        u: run.reconstruction.u_rec,
        w_residual: run.reconstruction.w_residual,
        seam_gap: run.reconstruction.seam_gap,
    })
}

/// Direct pseudo-spectral reference solve; returns the field at time `t`.
#[pyfunction]
#[pyo3(signature = (preset, t, l, n, dt = 0.0))]
fn reference(preset: &str, t: f64, l: f64, n: usize, dt: f64) -> PyResult<Vec<(f64, f64)>> {
    let spec = PresetSpec::parse(preset).map_err(to_py_err)?;
    let (xg, _) = make_grids(l, n, 1.0, 8).map_err(to_py_err)?;
    let field = sample_potential(&spec, xg, 1e-8).map_err(to_py_err)?;
    let dt = if dt > 0.0 {
        dt
    } else {
        0.15 * xg.spacing() * xg.spacing()
    };
    let cfg = EvolutionConfig {
        t_final: t,
        dt,
        ..EvolutionConfig::default()
    };
    let state = reference_solve(&field, t, &cfg).map_err(to_py_err)?;
    Ok(pairs(&state.u))
}

#[pymodule]
fn nlsgi_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScattering>()?;
    m.add_class::<PyReconstruction>()?;
    m.add_function(wrap_pyfunction!(potential_samples, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_gate_bound, m)?)?;
    m.add_function(wrap_pyfunction!(scatter, m)?)?;
    m.add_function(wrap_pyfunction!(invert, m)?)?;
    m.add_function(wrap_pyfunction!(ist_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(reference, m)?)?;
    m.add("DEFAULT_GATE_TOL", DEFAULT_GATE_TOL)?;
    Ok(())
}
