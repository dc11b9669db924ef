//! The CLI subcommands: scatter, invert, evolve, reference.

use crate::config::RunConfig;
use nlsgi_core::cauchy::delta_solve;
use nlsgi_core::error::Result;
use nlsgi_core::evolution::{evolve_reflection, mass, reference_solve};
use nlsgi_core::potential::{sample_potential, write_potential_csv, NormReport, PotentialField};
use nlsgi_core::reconstruct::{reconstruct_field, rel_linf_error, ReconstructionResult};
use nlsgi_core::scattering::{
    read_archive_json, scattering_ab, soliton_free_bound, write_archive_csv, write_archive_json,
    ScatteringData,
};
use nlsgi_core::{C64, SpatialGrid};
use serde::Serialize;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Serialize)]
struct Provenance {
    config_hash: String,
    version: String,
}

fn provenance(cfg: &RunConfig) -> Provenance {
    Provenance {
        config_hash: cfg.config_hash(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(file, value)?;
    Ok(())
}

fn sample(cfg: &RunConfig) -> Result<(PotentialField, nlsgi_core::SpectralGrid)> {
    let (xg, zg) = cfg.grids()?;
    let field = sample_potential(&cfg.preset, xg, cfg.boundary_tol)?;
    for w in &field.warnings {
        eprintln!("warning: {w}");
    }
    Ok((field, zg))
}

fn archive_path(cfg: &RunConfig, out: &Path) -> PathBuf {
    cfg.archive
        .clone()
        .unwrap_or_else(|| out.join("scattering.json"))
}

#[derive(Serialize)]
struct ScatterSummary {
    min_abs_a: f64,
    unitarity_max_err: f64,
    parity_max_err: Option<f64>,
    soliton_free_bound: f64,
    boundary_deviation: f64,
    warnings: Vec<String>,
    provenance: Provenance,
}

/// `nlsgi scatter`: direct transform of the configured potential; writes
/// the sampled potential, the JSON archive, its CSV mirror, and a summary.
pub fn cmd_scatter(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (field, zg) = sample(cfg)?;
    write_potential_csv(&out.join("potential.csv"), field.grid, &field.u)?;
    let bound = soliton_free_bound(&field);
    let data = scattering_ab(&field, &zg, cfg.scattering_options())?;
    write_archive_json(&archive_path(cfg, out), &data)?;
    write_archive_csv(&out.join("scattering.csv"), &data)?;
    write_json(
        &out.join("scatter_summary.json"),
        &ScatterSummary {
            min_abs_a: data.min_abs_a,
            unitarity_max_err: data.unitarity_max_err,
            parity_max_err: data.parity_max_err,
            soliton_free_bound: bound,
            boundary_deviation: field.boundary_deviation,
            warnings: field.warnings.clone(),
            provenance: provenance(cfg),
        },
    )?;
    println!(
        "scatter: min |a| = {:.6}, unitarity defect = {:.3e}, bound = {:.3}",
        data.min_abs_a, data.unitarity_max_err, bound
    );
    Ok(())
}

#[derive(Serialize)]
struct InvertSummary {
    seam_gap: f64,
    seam_tol_exceeded: bool,
    max_w_residual: f64,
    max_rh_residual: f64,
    total_iterations: usize,
    krylov_solves: usize,
    norms_u_rec: NormReport,
    /// round-trip error norms against the configured preset (meaningful
    /// when the archive was produced from the same preset)
    roundtrip_rel_linf: f64,
    roundtrip_l2: f64,
    provenance: Provenance,
}

fn write_reconstruction_csv(path: &Path, grid: SpatialGrid, res: &ReconstructionResult) -> Result<()> {
    let mut outf = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(outf, "x,re_u,im_u,w_residual")?;
    for (j, x) in grid.nodes().into_iter().enumerate() {
        writeln!(
            outf,
            "{x:.17e},{:.17e},{:.17e},{:.17e}",
            res.u_rec[j].re, res.u_rec[j].im, res.w_residual[j]
        )?;
    }
    Ok(())
}

/// Recover the potential from a scattering archive and compare against the
/// configured preset.
pub fn invert_archive(
    cfg: &RunConfig,
    data: &ScatteringData,
) -> Result<(PotentialField, ReconstructionResult)> {
    data.check_gate(cfg.gate_tol)?;
    let (field, _) = sample(cfg)?;
    let plan = cfg.projector_plan(data.zgrid);
    let deltas = delta_solve(&data.r_plus, &data.r_minus, &plan)?;
    let res = reconstruct_field(
        data,
        &deltas,
        field.grid,
        &plan,
        &cfg.rh_options(),
        cfg.gate_tol,
    )?;
    Ok((field, res))
}

/// `nlsgi invert`: RH inversion of an archive back to the potential.
pub fn cmd_invert(cfg: &RunConfig, out: &Path) -> Result<()> {
    let data = read_archive_json(&archive_path(cfg, out))?;
    let (field, res) = invert_archive(cfg, &data)?;
    write_reconstruction_csv(&out.join("reconstruction.csv"), field.grid, &res)?;
    let rec_field = PotentialField::from_samples(field.grid, res.u_rec.clone(), 1.0)?;
    let dx = field.grid.spacing();
    let l2_err = (field
        .u
        .iter()
        .zip(res.u_rec.iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        * dx)
        .sqrt();
    let summary = InvertSummary {
        seam_gap: res.seam_gap,
        seam_tol_exceeded: res.seam_gap > cfg.seam_tol,
        max_w_residual: res.w_residual.iter().cloned().fold(0.0, f64::max),
        max_rh_residual: res.max_rh_residual,
        total_iterations: res.total_iterations,
        krylov_solves: res.krylov_solves,
        norms_u_rec: nlsgi_core::norms(&rec_field),
        roundtrip_rel_linf: rel_linf_error(&res.u_rec, &field.u),
        roundtrip_l2: l2_err,
        provenance: provenance(cfg),
    };
    if summary.seam_tol_exceeded {
        eprintln!(
            "warning: seam gap {:.3e} exceeds seam_tol {:.3e}",
            res.seam_gap, cfg.seam_tol
        );
    }
    write_json(&out.join("invert_summary.json"), &summary)?;
    println!(
        "invert: round-trip rel Linf = {:.3e}, seam gap = {:.3e}",
        summary.roundtrip_rel_linf, summary.seam_gap
    );
    Ok(())
}

fn write_snapshot_csv(path: &Path, grid: SpatialGrid, u: &[C64]) -> Result<()> {
    let mut outf = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(outf, "x,re_u,im_u")?;
    for (j, x) in grid.nodes().into_iter().enumerate() {
        writeln!(outf, "{x:.17e},{:.17e},{:.17e}", u[j].re, u[j].im)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ComparisonRecord {
    t: f64,
    linf_gap: f64,
    l2_gap: f64,
    mass_drift_ist: f64,
    mass_drift_ref: f64,
}

#[derive(Serialize)]
struct EvolveSummary {
    records: Vec<ComparisonRecord>,
    delta_invariance: f64,
    provenance: Provenance,
}

/// `nlsgi evolve`: IST evolution vs the direct reference solver, snapshot
/// CSVs for both, and the comparison record.
pub fn cmd_evolve(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (field, zg) = sample(cfg)?;
    let evo = cfg.evolution_config();
    let plan = cfg.projector_plan(zg);

    // scatter once, then rotate the data per requested time
    let data0 = scattering_ab(&field, &zg, cfg.scattering_options())?;
    let mut times = cfg.snapshots.clone();
    if !times.iter().any(|&s| (s - cfg.t_final).abs() < 1e-14) {
        times.push(cfg.t_final);
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let reference = reference_solve(&field, cfg.t_final, &evo)?;
    let mass0 = mass(&field.u, field.grid);

    let mut records = Vec::new();
    let mut delta_invariance: f64 = 0.0;
    let deltas0 = delta_solve(&data0.r_plus, &data0.r_minus, &plan)?;
    for (idx, &t) in times.iter().enumerate() {
        let evolved = evolve_reflection(&data0, t, &evo);
        let deltas = delta_solve(&evolved.r_plus, &evolved.r_minus, &plan)?;
        delta_invariance = delta_invariance.max(
            deltas0
                .delta_plus
                .iter()
                .zip(deltas.delta_plus.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max),
        );
        let res = reconstruct_field(
            &evolved,
            &deltas,
            field.grid,
            &plan,
            &cfg.rh_options(),
            cfg.gate_tol,
        )?;
        write_snapshot_csv(&out.join(format!("ist_snapshot_{idx}.csv")), field.grid, &res.u_rec)?;

        let u_ref: &[C64] = if (t - cfg.t_final).abs() < 1e-14 {
            &reference.u
        } else {
            match reference.snapshots.iter().find(|(ts, _, _)| (ts - t).abs() < 1e-12) {
                Some((_, u, _)) => u,
                None => &reference.u,
            }
        };
        write_snapshot_csv(&out.join(format!("ref_snapshot_{idx}.csv")), field.grid, u_ref)?;

        let dx = field.grid.spacing();
        let linf_gap = res
            .u_rec
            .iter()
            .zip(u_ref.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        let l2_gap = (res
            .u_rec
            .iter()
            .zip(u_ref.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * dx)
            .sqrt();
        records.push(ComparisonRecord {
            t,
            linf_gap,
            l2_gap,
            mass_drift_ist: (mass(&res.u_rec, field.grid) - mass0).abs(),
            mass_drift_ref: reference
                .snapshots
                .iter()
                .find(|(ts, _, _)| (ts - t).abs() < 1e-12)
                .map(|(_, _, d)| *d)
                .unwrap_or(reference.mass_drift),
        });
    }
    let summary = EvolveSummary {
        records,
        delta_invariance,
        provenance: provenance(cfg),
    };
    write_json(&out.join("comparison.json"), &summary)?;
    let last = summary.records.last().unwrap();
    println!(
        "evolve: t = {}, Linf gap = {:.3e}, mass drift (ist, ref) = ({:.3e}, {:.3e})",
        last.t, last.linf_gap, last.mass_drift_ist, last.mass_drift_ref
    );
    Ok(())
}

#[derive(Serialize)]
struct ReferenceSummary {
    t_final: f64,
    mass_drift: f64,
    provenance: Provenance,
}

/// `nlsgi reference`: direct solver only.
pub fn cmd_reference(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (field, _) = sample(cfg)?;
    let evo = cfg.evolution_config();
    let state = reference_solve(&field, cfg.t_final, &evo)?;
    write_snapshot_csv(&out.join("reference_final.csv"), field.grid, &state.u)?;
    for (idx, (t, u, _)) in state.snapshots.iter().enumerate() {
        if (*t - cfg.t_final).abs() > 1e-14 {
            write_snapshot_csv(&out.join(format!("reference_snapshot_{idx}.csv")), field.grid, u)?;
        }
    }
    write_json(
        &out.join("reference_summary.json"),
        &ReferenceSummary {
            t_final: state.t,
            mass_drift: state.mass_drift,
            provenance: provenance(cfg),
        },
    )?;
    println!(
        "reference: t = {}, mass drift = {:.3e}",
        state.t, state.mass_drift
    );
    Ok(())
}

