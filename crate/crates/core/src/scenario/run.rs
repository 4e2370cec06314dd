//! Scenario orchestration and file output.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{ModelKind, ScenarioConfig};
use super::csvio::{write_fields, write_paired, write_runlog, write_sweep, write_transient, SweepRow};
use super::plot::{emit_plot, PlotStyle, Series};
use super::record::{paired_difference, TransientRecord};
use super::rise::{extract_rise_time, RiseTimeReport};
use super::simulate::{dark_state, run_transient, steady_state, TransientModel, TransientOptions};
use crate::discretization::compute_current;
use crate::error::{Error, Result};
use crate::model::exciton_tau;
use crate::reduced::{memory_diagnostics, steady_solve, GummelOptions, MemoryCoefficients, MemoryDiagnostics};
use crate::solver::Device;

pub fn transient_options(cfg: &ScenarioConfig, keep_states: bool) -> TransientOptions {
    TransientOptions {
        outputs: cfg.output.times(),
        snapshot_times: cfg.output.snapshots.clone(),
        keep_states,
        bdf: cfg.bdf,
    }
}

/// Dark start plus light-on transient of the selected model.
pub fn simulate(cfg: &ScenarioConfig, model: TransientModel, keep_states: bool) -> Result<TransientRecord> {
    let device = cfg.device()?;
    let dark = dark_state(&device, &cfg.bdf.newton)?;
    let mut rec = run_transient(&device, model, &dark, &transient_options(cfg, keep_states))?;
    rec.config_hash = Some(cfg.hash());
    Ok(rec)
}

/// Memory-term diagnostics of a full-model record that kept its states.
pub fn memory_from_record(device: &Device, rec: &TransientRecord) -> Result<MemoryDiagnostics> {
    if rec.states.len() != rec.t.len() {
        return Err(Error::History("record was run without keeping states".into()));
    }
    let m = &device.material;
    let kdiss = m.kdiss(device.mean_field());
    let coeffs = MemoryCoefficients {
        gamma: m.gamma(),
        kdiss,
        tau: exciton_tau(kdiss, m.k_rec)?,
    };
    let np: Vec<Vec<f64>> = rec.states.iter().map(|s| s.n.iter().zip(&s.p).map(|(n, p)| n * p).collect()).collect();
    memory_diagnostics(&rec.t, &np, device.mesh.volumes(), coeffs)
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub j_final: f64,
    pub rise: Option<RiseTimeReport>,
    pub steps: usize,
}

fn model_of(kind: ModelKind) -> TransientModel {
    match kind {
        ModelKind::Reduced => TransientModel::Reduced,
        _ => TransientModel::Full,
    }
}

/// Run the configured model and write its files into `out_dir`.
pub fn run(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir)?;
    if cfg.model == ModelKind::Steady {
        return run_steady(cfg, out_dir);
    }
    let device = cfg.device()?;
    let keep = cfg.output.memory && cfg.model == ModelKind::Full;
    let rec = simulate(cfg, model_of(cfg.model), keep)?;
    let mut files = write_record(&rec, &device, out_dir, "")?;
    if keep {
        let mem = memory_from_record(&device, &rec)?;
        let p = out_dir.join("memory.csv");
        std::fs::write(&p, mem.to_csv())?;
        files.push(p);
    }
    Ok(RunSummary {
        files,
        j_final: *rec.j.last().expect("non-empty record"),
        rise: extract_rise_time(&rec).ok(),
        steps: rec.stats.accepted,
    })
}

fn write_record(rec: &TransientRecord, device: &Device, out_dir: &Path, suffix: &str) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let p = out_dir.join(format!("transient{suffix}.csv"));
    write_transient(&p, &rec.t, &rec.j)?;
    files.push(p);
    let p = out_dir.join(format!("runlog{suffix}.csv"));
    write_runlog(&p, &rec.log)?;
    files.push(p);
    for s in &rec.snapshots {
        let p = out_dir.join(format!("fields{suffix}_{:e}.csv", s.t));
        write_fields(&p, device, s)?;
        files.push(p);
    }
    Ok(files)
}

fn run_steady(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunSummary> {
    let device = cfg.device()?;
    let mut report = String::new();
    let state = if device.contacts.all_dirichlet() && device.material.v_max.is_none() {
        let sol = steady_solve(&device, &GummelOptions::default())?;
        report.push_str(&format!(
            "outer_iterations = {}\nlast_update = {:e} V\nwithin_bounds = {}\n",
            sol.report.outer_iterations, sol.report.last_update, sol.report.within_bounds
        ));
        report.push_str(&sol.bounds.report());
        sol.state
    } else {
        steady_state(&device, &cfg.bdf.newton)?
    };
    let c = compute_current(&device.mesh, &state.phi, &state.n, &state.p, &device.material, None);
    report.push_str(&format!("current = {:e} A/m^2\ncurrent_variation = {:e}\n", c.contact, c.max_relative_variation()));
    let mut files = Vec::new();
    let p = out_dir.join("transient.csv");
    write_transient(&p, &[f64::INFINITY], &[c.contact])?;
    files.push(p);
    let p = out_dir.join("fields_steady.csv");
    write_fields(&p, &device, &state)?;
    files.push(p);
    let p = out_dir.join("runlog.txt");
    std::fs::write(&p, report)?;
    files.push(p);
    Ok(RunSummary {
        files,
        j_final: c.contact,
        rise: None,
        steps: 0,
    })
}

/// Full and reduced transients of the same scenario, their paired
/// difference and an overlay plot.
pub fn compare(cfg: &ScenarioConfig, out_dir: &Path) -> Result<(TransientRecord, TransientRecord, Vec<PathBuf>)> {
    std::fs::create_dir_all(out_dir)?;
    let device = cfg.device()?;
    let (full, reduced) = rayon::join(
        || simulate(cfg, TransientModel::Full, false),
        || simulate(cfg, TransientModel::Reduced, false),
    );
    let (full, reduced) = (full?, reduced?);
    let mut files = write_record(&full, &device, out_dir, "_full")?;
    files.extend(write_record(&reduced, &device, out_dir, "_reduced")?);
    let d = paired_difference(&full, &reduced);
    let p = out_dir.join("compare.csv");
    write_paired(&p, &d, ["full", "reduced"])?;
    files.push(p);
    let series = [
        Series { label: "full".into(), x: full.t.clone(), y: full.j.clone() },
        Series { label: "reduced".into(), x: reduced.t.clone(), y: reduced.j.clone() },
    ];
    let p = out_dir.join("compare.svg");
    std::fs::write(&p, emit_plot(&series, &PlotStyle::photocurrent())?)?;
    files.push(p);
    Ok((full, reduced, files))
}

/// Cartesian sweep over the configured axes. Each run writes
/// `runs/transient_<k>.csv`; failures leave NaN results in their row.
pub fn sweep(cfg: &ScenarioConfig, out_dir: &Path) -> Result<Vec<SweepRow>> {
    if cfg.sweep.is_empty() {
        return Err(Error::Domain("sweep needs at least one non-empty axis".into()));
    }
    let runs = out_dir.join("runs");
    std::fs::create_dir_all(&runs)?;
    let names = cfg.sweep.names();
    let points = cfg.sweep.points();
    let rows: Vec<SweepRow> = points
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let one = cfg.at_point(p);
            let params = p.values(&names);
            let result = (|| -> Result<RiseTimeReport> {
                if one.model == ModelKind::Steady {
                    let device = one.device()?;
                    let s = steady_state(&device, &one.bdf.newton)?;
                    let c = compute_current(&device.mesh, &s.phi, &s.n, &s.p, &device.material, None);
                    return Ok(RiseTimeReport { j_inf: c.contact, t10: f64::NAN, t50: f64::NAN, t90: f64::NAN });
                }
                let rec = simulate(&one, model_of(one.model), false)?;
                write_transient(&runs.join(format!("transient_{k}.csv")), &rec.t, &rec.j)?;
                extract_rise_time(&rec)
            })();
            match result {
                Ok(r) => SweepRow { params, j_inf: r.j_inf, t10: r.t10, t50: r.t50, t90: r.t90, error: None },
                Err(e) => SweepRow {
                    params,
                    j_inf: f64::NAN,
                    t10: f64::NAN,
                    t50: f64::NAN,
                    t90: f64::NAN,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    write_sweep(&out_dir.join("sweep.csv"), &names, &rows)?;
    let failures: String = rows
        .iter()
        .enumerate()
        .filter_map(|(k, r)| r.error.as_ref().map(|e| format!("{k},{e}\n")))
        .collect();
    if !failures.is_empty() {
        std::fs::write(out_dir.join("sweep_failures.csv"), format!("row,error\n{failures}"))?;
    }
    Ok(rows)
}
