//! Verification suites: each check compares a measured quantity against a
//! pinned bound and the report is written as JSON.

use crate::config::RunConfig;
use nlsgi_core::c64;
use nlsgi_core::cauchy::{delta_solve, hilbert, projector, Side};
use nlsgi_core::error::Result;
use nlsgi_core::evolution::{
    evolve_reflection, ist_solve, mass, reference_solve, EvolutionConfig,
};
use nlsgi_core::fourier;
use nlsgi_core::potential::{norms, sample_potential, PotentialField, PresetSpec};
use nlsgi_core::reconstruct::{reconstruct_field, rel_linf_error};
use nlsgi_core::scattering::{scattering_ab, ScatteringData};
use nlsgi_core::{C64, SpectralGrid};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub records: Vec<CheckRecord>,
    pub overall_pass: bool,
    pub config_hash: String,
    pub version: String,
}

struct Recorder {
    records: Vec<CheckRecord>,
}

impl Recorder {
    fn new() -> Self {
        Self {
            records: Vec::new(),
        }
    }

    /// `measured <= bound` passes.
    fn le(&mut self, name: &str, measured: f64, bound: f64) {
        let pass = measured.is_finite() && measured <= bound;
        self.records.push(CheckRecord {
            name: name.to_string(),
            measured,
            bound,
            pass,
        });
    }

    /// `measured >= bound` passes (for ratios that must stay large).
    fn ge(&mut self, name: &str, measured: f64, bound: f64) {
        let pass = measured.is_finite() && measured >= bound;
        self.records.push(CheckRecord {
            name: name.to_string(),
            measured,
            bound,
            pass,
        });
    }
}

fn scatter_preset(cfg: &RunConfig, preset: &PresetSpec, n_scale: usize) -> Result<(PotentialField, ScatteringData)> {
    let (xg, zg) = nlsgi_core::make_grids(
        cfg.spatial_half_width,
        cfg.spatial_points / n_scale,
        cfg.spectral_half_width,
        cfg.spectral_points / n_scale,
    )?;
    let field = sample_potential(preset, xg, cfg.boundary_tol)?;
    let data = scattering_ab(&field, &zg, cfg.scattering_options())?;
    Ok((field, data))
}

fn suite_identities(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let (_, data) = scatter_preset(cfg, &cfg.preset, 1)?;
    let zg = data.zgrid;
    let mut unit_pos: f64 = 0.0;
    let mut unit_neg: f64 = 0.0;
    let mut rel_split: f64 = 0.0;
    let mut min_one_plus_q = f64::INFINITY;
    for i in 0..zg.point_count {
        let z = zg.node(i);
        let d = if z > 0.0 {
            let v = (data.a[i].norm_sqr() + data.b[i].norm_sqr() - 1.0).abs();
            unit_pos = unit_pos.max(v);
            v
        } else {
            let v = (data.a[i].norm_sqr() - data.b[i].norm_sqr() - 1.0).abs();
            unit_neg = unit_neg.max(v);
            v
        };
        let _ = d;
        rel_split = rel_split.max(
            (data.r_minus[i] - 4.0 * z * data.r_plus[i]).norm()
                / (1.0 + data.r_minus[i].norm()),
        );
        min_one_plus_q =
            min_one_plus_q.min(1.0 + (data.r_plus[i].conj() * data.r_minus[i]).re);
    }
    rec.le("unitarity_zpos", unit_pos, 1e-6);
    rec.le("unitarity_zneg", unit_neg, 1e-6);
    rec.le("parity_branch_flip", data.parity_max_err.unwrap_or(0.0), 1e-10);
    rec.le("split_relation_r4z", rel_split, 1e-12);
    rec.ge("one_plus_rbar_r_positive", min_one_plus_q, 1e-12);
    let edge_dev = (data.a[0] - c64(1.0, 0.0))
        .norm()
        .max((data.a[zg.point_count - 1] - c64(1.0, 0.0)).norm());
    rec.le("large_z_tail_of_a", edge_dev, 0.05);

    let plan = cfg.projector_plan(zg);
    let deltas = delta_solve(&data.r_plus, &data.r_minus, &plan)?;
    let mut mod_dev: f64 = 0.0;
    let mut jump_dev: f64 = 0.0;
    for i in 0..zg.point_count {
        let prod = deltas.delta_plus[i] * deltas.delta_minus[i];
        mod_dev = mod_dev.max((prod.norm() - 1.0).abs());
        let q = data.r_plus[i].conj() * data.r_minus[i];
        jump_dev = jump_dev.max(
            (deltas.delta_plus[i] - deltas.delta_minus[i] - q * deltas.delta_minus[i]).norm(),
        );
    }
    rec.le("delta_modulus_one", mod_dev, 1e-8);
    rec.le("delta_scalar_jump", jump_dev, 1e-6);
    Ok(())
}

/// Random decaying wavepacket scaled to the grid: envelope well inside the
/// window, carrier between a quarter and half of the grid Nyquist rate so
/// the half-plane parts stay window-supported.
fn random_wavepacket(zg: SpectralGrid, rng: &mut impl Rng) -> Vec<C64> {
    let nyquist = std::f64::consts::PI / zg.spacing();
    let mut f = vec![C64::ZERO; zg.point_count];
    for _ in 0..3 {
        let center: f64 = rng.random_range(-0.15 * zg.half_width..0.15 * zg.half_width);
        let width: f64 = rng.random_range(zg.half_width / 25.0..zg.half_width / 12.0);
        let carrier: f64 = rng.random_range(0.25 * nyquist..0.45 * nyquist)
            * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let amp = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        for (m, v) in f.iter_mut().enumerate() {
            let z = zg.node(m);
            *v += amp
                * (-(z - center).powi(2) / (2.0 * width * width)).exp()
                * c64(0.0, carrier * z).exp();
        }
    }
    f
}

fn suite_projectors(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let zg = SpectralGrid::new(cfg.spectral_half_width, cfg.spectral_points)?;
    let plan = cfg.projector_plan(zg);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut err_diff: f64 = 0.0;
    let mut err_hilbert: f64 = 0.0;
    let mut err_annihilation: f64 = 0.0;
    let mut err_idem: f64 = 0.0;
    for _ in 0..100 {
        let f = random_wavepacket(zg, &mut rng);
        let scale = f.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1e-300);
        let p = projector(&f, Side::Plus, &plan);
        let m = projector(&f, Side::Minus, &plan);
        let h = hilbert(&f, &plan);
        for i in 0..f.len() {
            err_diff = err_diff.max((p[i] - m[i] - f[i]).norm() / scale);
            err_hilbert = err_hilbert.max((p[i] + m[i] + c64(0.0, 1.0) * h[i]).norm() / scale);
        }
        let mp = projector(&p, Side::Minus, &plan);
        let pp = projector(&p, Side::Plus, &plan);
        for i in 0..f.len() {
            err_annihilation = err_annihilation.max(mp[i].norm() / scale);
            err_idem = err_idem.max((pp[i] - p[i]).norm() / scale);
        }
    }
    rec.le("projector_difference_identity", err_diff, 1e-12);
    rec.le("projector_hilbert_identity", err_hilbert, 1e-12);
    rec.le("projector_annihilation", err_annihilation, 1e-10);
    rec.le("projector_idempotence", err_idem, 1e-10);
    Ok(())
}

fn roundtrip_error(cfg: &RunConfig, n_scale: usize) -> Result<f64> {
    let (field, data) = scatter_preset(cfg, &cfg.preset, n_scale)?;
    let plan = cfg.projector_plan(data.zgrid);
    let deltas = delta_solve(&data.r_plus, &data.r_minus, &plan)?;
    let res = reconstruct_field(
        &data,
        &deltas,
        field.grid,
        &plan,
        &cfg.rh_options(),
        cfg.gate_tol,
    )?;
    Ok(rel_linf_error(&res.u_rec, &field.u))
}

fn suite_roundtrip(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let coarse = roundtrip_error(cfg, 4)?;
    let mid = roundtrip_error(cfg, 2)?;
    let fine = roundtrip_error(cfg, 1)?;
    rec.le("roundtrip_rel_linf", fine, 1e-3);
    rec.ge("roundtrip_monotone_l1", coarse / mid, 1.0);
    rec.ge("roundtrip_monotone_l2", mid / fine, 1.0);
    Ok(())
}

fn suite_evolution(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let (field, zg) = {
        let (xg, zg) = nlsgi_core::make_grids(
            cfg.spatial_half_width,
            cfg.spatial_points,
            cfg.spectral_half_width,
            cfg.spectral_points,
        )?;
        (sample_potential(&cfg.preset, xg, cfg.boundary_tol)?, zg)
    };
    let evo = cfg.evolution_config();
    let data = scattering_ab(&field, &zg, cfg.scattering_options())?;
    let evolved = evolve_reflection(&data, evo.t_final, &evo);
    let mod_dev = (0..zg.point_count)
        .map(|i| {
            (evolved.r_plus[i].norm() - data.r_plus[i].norm()).abs()
                / data.r_plus[i].norm().max(1e-300)
        })
        .fold(0.0f64, f64::max);
    rec.le("reflection_modulus_preserved", mod_dev, 1e-14);
    let a_dev = (0..zg.point_count)
        .map(|i| (evolved.a[i] - data.a[i]).norm())
        .fold(0.0f64, f64::max);
    rec.le("a_invariant", a_dev, 0.0);

    let plan = cfg.projector_plan(zg);
    let run = ist_solve(
        &field,
        evo.t_final,
        &evo,
        &zg,
        &plan,
        cfg.scattering_options(),
        &cfg.rh_options(),
    )?;
    rec.le("delta_t_invariance", run.delta_invariance, 1e-8);

    let reference = reference_solve(&field, evo.t_final, &evo)?;
    rec.le("reference_mass_drift", reference.mass_drift, 1e-8);
    let gap = rel_linf_error(&run.reconstruction.u_rec, &reference.u);
    rec.le("ist_vs_reference_rel_linf", gap, 1e-2);
    let m0 = mass(&field.u, field.grid);
    rec.le(
        "ist_mass_drift",
        (mass(&run.reconstruction.u_rec, field.grid) - m0).abs() / m0.max(1e-300),
        1e-4,
    );

    // integrator order on a small auxiliary problem
    let (aux_grid, _) = nlsgi_core::make_grids(20.0, 256, 10.0, 16)?;
    let aux = sample_potential(
        &PresetSpec::Sech {
            amplitude: 1.0,
            center: 0.0,
            phase: 0.0,
        },
        aux_grid,
        1.0,
    )?;
    let run_dt = |dt: f64| -> Result<Vec<C64>> {
        let c = EvolutionConfig {
            dt,
            t_final: 0.1,
            snapshot_times: Vec::new(),
            ..evo.clone()
        };
        Ok(reference_solve(&aux, 0.1, &c)?.u)
    };
    let u1 = run_dt(4e-3)?;
    let u2 = run_dt(2e-3)?;
    let u4 = run_dt(1e-3)?;
    let linf = |a: &[C64], b: &[C64]| -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0f64, f64::max)
    };
    rec.ge("reference_fourth_order_ratio", linf(&u1, &u4) / linf(&u2, &u4), 8.0);
    Ok(())
}

/// `H^1 ∩ L^{2,1}` norm of a spectral-grid function.
fn data_norm(r: &[C64], zg: SpectralGrid) -> f64 {
    let dz = zg.spacing();
    let dr = fourier::spectral_derivative(r, zg.half_width, 1);
    let l2: f64 = r.iter().map(|v| v.norm_sqr()).sum::<f64>() * dz;
    let dl2: f64 = dr.iter().map(|v| v.norm_sqr()).sum::<f64>() * dz;
    let l21: f64 = r
        .iter()
        .enumerate()
        .map(|(i, v)| (1.0 + zg.node(i).powi(2)) * v.norm_sqr())
        .sum::<f64>()
        * dz;
    (l2 + dl2).sqrt() + l21.sqrt()
}

fn suite_lipschitz(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let base_amp = 0.1;
    let sech = |a: f64| PresetSpec::Sech {
        amplitude: a,
        center: 0.0,
        phase: 0.0,
    };
    let (f0, d0) = scatter_preset(cfg, &sech(base_amp), 2)?;
    let plan = cfg.projector_plan(d0.zgrid);

    let mut forward_ratios = Vec::new();
    let mut inverse_ratios = Vec::new();
    for eps in [1e-3, 1e-4] {
        let (f1, d1) = scatter_preset(cfg, &sech(base_amp + eps), 2)?;
        // forward map u -> (r+, r-)
        let du = {
            let diff: Vec<C64> = f1.u.iter().zip(f0.u.iter()).map(|(a, b)| a - b).collect();
            let pf = PotentialField::from_samples(f0.grid, diff, 1.0)?;
            let n = norms(&pf);
            n.h2 + n.h11
        };
        let drp: Vec<C64> = d1
            .r_plus
            .iter()
            .zip(d0.r_plus.iter())
            .map(|(a, b)| a - b)
            .collect();
        let drm: Vec<C64> = d1
            .r_minus
            .iter()
            .zip(d0.r_minus.iter())
            .map(|(a, b)| a - b)
            .collect();
        let dr = data_norm(&drp, d0.zgrid) + data_norm(&drm, d0.zgrid);
        forward_ratios.push(dr / du);

        // inverse map (r+, r-) -> u_rec
        let rh = cfg.rh_options();
        let rec0 = {
            let deltas = delta_solve(&d0.r_plus, &d0.r_minus, &plan)?;
            reconstruct_field(&d0, &deltas, f0.grid, &plan, &rh, cfg.gate_tol)?
        };
        let rec1 = {
            let deltas = delta_solve(&d1.r_plus, &d1.r_minus, &plan)?;
            reconstruct_field(&d1, &deltas, f0.grid, &plan, &rh, cfg.gate_tol)?
        };
        let du_rec = {
            let diff: Vec<C64> = rec1
                .u_rec
                .iter()
                .zip(rec0.u_rec.iter())
                .map(|(a, b)| a - b)
                .collect();
            let pf = PotentialField::from_samples(f0.grid, diff, 1.0)?;
            let n = norms(&pf);
            n.h2 + n.h11
        };
        inverse_ratios.push(du_rec / dr);
    }
    let stability = |r: &[f64]| -> f64 { (r[0] - r[1]).abs() / r[1].abs().max(1e-300) };
    rec.le("lipschitz_forward_stability", stability(&forward_ratios), 0.2);
    rec.le("lipschitz_inverse_stability", stability(&inverse_ratios), 0.2);
    rec.le("lipschitz_forward_ratio_finite", forward_ratios[0], 1e3);
    rec.le("lipschitz_inverse_ratio_finite", inverse_ratios[0], 1e3);
    Ok(())
}

/// Run the configured suite(s) and write the report.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<SuiteReport> {
    let mut rec = Recorder::new();
    let suite = cfg.suite.as_str();
    if suite == "identities" || suite == "all" {
        suite_identities(cfg, &mut rec)?;
    }
    if suite == "projectors" || suite == "all" {
        suite_projectors(cfg, &mut rec)?;
    }
    if suite == "roundtrip" || suite == "all" {
        suite_roundtrip(cfg, &mut rec)?;
    }
    if suite == "evolution" || suite == "all" {
        suite_evolution(cfg, &mut rec)?;
    }
    if suite == "lipschitz" || suite == "all" {
        suite_lipschitz(cfg, &mut rec)?;
    }
    let overall_pass = rec.records.iter().all(|r| r.pass);
    let report = SuiteReport {
        suite: suite.to_string(),
        records: rec.records,
        overall_pass,
        config_hash: cfg.config_hash(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let file = std::io::BufWriter::new(std::fs::File::create(
        out.join(format!("verify_{suite}.json")),
    )?);
    serde_json::to_writer_pretty(file, &report)?;
    for r in &report.records {
        println!(
            "[{}] {}: measured = {:.6e}, bound = {:.3e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.measured,
            r.bound
        );
    }
    println!(
        "suite `{suite}`: {}",
        if report.overall_pass { "PASS" } else { "FAIL" }
    );
    Ok(report)
}
