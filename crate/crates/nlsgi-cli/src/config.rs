//! Flat `key = value` run configuration with `#` comments. Unknown keys are
//! rejected with their line number; every key has a default.

use nlsgi_core::error::{Error, Result};
use nlsgi_core::evolution::EvolutionConfig;
use nlsgi_core::potential::PresetSpec;
use nlsgi_core::rh::RhOptions;
use nlsgi_core::scattering::volterra::{JostOptions, StepOrder};
use nlsgi_core::scattering::ScatteringOptions;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spatial_half_width: f64,
    pub spatial_points: usize,
    pub spectral_half_width: f64,
    pub spectral_points: usize,
    pub preset: PresetSpec,
    pub boundary_tol: f64,
    pub gate_tol: f64,
    pub rh_tol: f64,
    pub seam_tol: f64,
    pub max_iter: usize,
    pub solver_order: u32,
    pub solver_refine: usize,
    pub pad_factor: usize,
    pub taper_frac: f64,
    pub window_tol: f64,
    pub t_final: f64,
    /// `0` means automatic (`0.15 dx^2`).
    pub dt: f64,
    pub c_theta: f64,
    pub phase_sign: f64,
    pub c_stab: f64,
    pub snapshots: Vec<f64>,
    pub archive: Option<PathBuf>,
    pub suite: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            spatial_half_width: 20.0,
            spatial_points: 2048,
            spectral_half_width: 40.0,
            spectral_points: 4096,
            preset: PresetSpec::Sech {
                amplitude: 0.3,
                center: 0.0,
                phase: 0.0,
            },
            boundary_tol: 1e-10,
            gate_tol: nlsgi_core::scattering::DEFAULT_GATE_TOL,
            rh_tol: 1e-10,
            seam_tol: 1e-2,
            max_iter: 200,
            solver_order: 4,
            solver_refine: 2,
            pad_factor: 8,
            taper_frac: 0.1,
            window_tol: 1e-8,
            t_final: 0.1,
            dt: 0.0,
            c_theta: 4.0,
            phase_sign: 1.0,
            c_stab: 0.2,
            snapshots: Vec::new(),
            archive: None,
            suite: "all".to_string(),
        }
    }
}

impl RunConfig {
    pub fn grids(&self) -> Result<(nlsgi_core::SpatialGrid, nlsgi_core::SpectralGrid)> {
        nlsgi_core::make_grids(
            self.spatial_half_width,
            self.spatial_points,
            self.spectral_half_width,
            self.spectral_points,
        )
    }

    pub fn scattering_options(&self) -> ScatteringOptions {
        ScatteringOptions {
            jost: JostOptions {
                order: if self.solver_order == 2 {
                    StepOrder::Two
                } else {
                    StepOrder::Four
                },
                refine: self.solver_refine,
                store_full: false,
            },
            gate_tol: self.gate_tol,
        }
    }

    pub fn rh_options(&self) -> RhOptions {
        RhOptions {
            rh_tol: self.rh_tol,
            max_iter: self.max_iter,
            ..RhOptions::default()
        }
    }

    pub fn projector_plan(&self, zgrid: nlsgi_core::SpectralGrid) -> nlsgi_core::cauchy::ProjectorPlan {
        nlsgi_core::cauchy::ProjectorPlan::with_policy(
            zgrid,
            self.pad_factor,
            self.taper_frac,
            self.window_tol,
        )
    }

    pub fn effective_dt(&self) -> f64 {
        if self.dt > 0.0 {
            self.dt
        } else {
            let dx = 2.0 * self.spatial_half_width / self.spatial_points as f64;
            0.15 * dx * dx
        }
    }

    pub fn evolution_config(&self) -> EvolutionConfig {
        EvolutionConfig {
            t_final: self.t_final,
            phase_coefficient: self.c_theta,
            phase_sign: self.phase_sign,
            dt: self.effective_dt(),
            snapshot_times: self.snapshots.clone(),
            c_stab: self.c_stab,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grids()?;
        for (name, v) in [
            ("boundary_tol", self.boundary_tol),
            ("gate_tol", self.gate_tol),
            ("rh_tol", self.rh_tol),
            ("seam_tol", self.seam_tol),
            ("taper_frac", self.taper_frac),
            ("window_tol", self.window_tol),
            ("c_stab", self.c_stab),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.solver_order != 2 && self.solver_order != 4 {
            return Err(Error::Config("solver_order must be 2 or 4".into()));
        }
        if self.solver_refine == 0 || self.solver_refine > 16 {
            return Err(Error::Config("solver_refine must be in 1..=16".into()));
        }
        if self.pad_factor < 2 {
            return Err(Error::Config("pad_factor must be >= 2".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        self.evolution_config().validate()?;
        const SUITES: [&str; 6] = [
            "identities",
            "projectors",
            "roundtrip",
            "evolution",
            "lipschitz",
            "all",
        ];
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(Error::Config(format!(
                "unknown suite `{}` (expected one of {SUITES:?})",
                self.suite
            )));
        }
        Ok(())
    }

    /// Canonical `key = value` rendering (sorted keys), used by `--dry-run`
    /// and hashed into the provenance record.
    pub fn normalized(&self) -> String {
        let mut s = String::new();
        let mut kv: Vec<(&str, String)> = vec![
            ("L", format!("{}", self.spatial_half_width)),
            ("M", format!("{}", self.spectral_points)),
            ("N", format!("{}", self.spatial_points)),
            ("Z", format!("{}", self.spectral_half_width)),
            (
                "archive",
                self.archive
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default(),
            ),
            ("boundary_tol", format!("{:e}", self.boundary_tol)),
            ("c_stab", format!("{}", self.c_stab)),
            ("c_theta", format!("{}", self.c_theta)),
            ("dt", format!("{:e}", self.dt)),
            ("gate_tol", format!("{:e}", self.gate_tol)),
            ("max_iter", format!("{}", self.max_iter)),
            ("pad_factor", format!("{}", self.pad_factor)),
            ("phase_sign", format!("{}", self.phase_sign)),
            ("preset", format!("{}", self.preset)),
            ("rh_tol", format!("{:e}", self.rh_tol)),
            ("seam_tol", format!("{:e}", self.seam_tol)),
            (
                "snapshots",
                self.snapshots
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("solver_order", format!("{}", self.solver_order)),
            ("solver_refine", format!("{}", self.solver_refine)),
            ("suite", self.suite.clone()),
            ("t_final", format!("{}", self.t_final)),
            ("taper_frac", format!("{}", self.taper_frac)),
            ("window_tol", format!("{:e}", self.window_tol)),
        ];
        kv.sort_by(|a, b| a.0.cmp(b.0));
        for (k, v) in kv {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.normalized().as_bytes());
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Parse a configuration file. An empty (or absent) file yields the
/// defaults.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {lineno}: expected `key = value`, got `{line}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| Error::Config(format!("line {lineno}: bad {what} `{value}`"));
        let parse_f64 = || value.parse::<f64>().map_err(|_| bad("number"));
        let parse_usize = || value.parse::<usize>().map_err(|_| bad("integer"));
        match key {
            "L" => cfg.spatial_half_width = parse_f64()?,
            "N" => cfg.spatial_points = parse_usize()?,
            "Z" => cfg.spectral_half_width = parse_f64()?,
            "M" => cfg.spectral_points = parse_usize()?,
            "preset" => cfg.preset = PresetSpec::parse(value)?,
            "boundary_tol" => cfg.boundary_tol = parse_f64()?,
            "gate_tol" => cfg.gate_tol = parse_f64()?,
            "rh_tol" => cfg.rh_tol = parse_f64()?,
            "seam_tol" => cfg.seam_tol = parse_f64()?,
            "max_iter" => cfg.max_iter = parse_usize()?,
            "solver_order" => cfg.solver_order = parse_usize()? as u32,
            "solver_refine" => cfg.solver_refine = parse_usize()?,
            "pad_factor" => cfg.pad_factor = parse_usize()?,
            "taper_frac" => cfg.taper_frac = parse_f64()?,
            "window_tol" => cfg.window_tol = parse_f64()?,
            "t_final" => cfg.t_final = parse_f64()?,
            "dt" => cfg.dt = parse_f64()?,
            "c_theta" => cfg.c_theta = parse_f64()?,
            "phase_sign" => cfg.phase_sign = parse_f64()?,
            "c_stab" => cfg.c_stab = parse_f64()?,
            "snapshots" => {
                cfg.snapshots = if value.is_empty() {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|s| s.trim().parse::<f64>().map_err(|_| bad("snapshot list")))
                        .collect::<Result<_>>()?
                };
            }
            "archive" => {
                cfg.archive = if value.is_empty() {
                    None
                } else {
                    Some(PathBuf::from(value))
                };
            }
            "suite" => cfg.suite = value.to_string(),
            _ => {
                return Err(Error::Config(format!("line {lineno}: unknown key `{key}`")));
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
