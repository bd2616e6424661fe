//! The six subcommands. Each returns a CSV table or a JSON report; reports
//! that compare against an oracle also carry an agreement verdict.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use dephaselab_core::dynamics::trajectory;
use dephaselab_core::oracle::{
    exact_diagonalization_coherence, exact_diagonalization_converged, search_velocity_extrema, FockMode,
    FockOracleConfig,
};
use dephaselab_core::quadrature::QuadOptions;
use dephaselab_core::scheme::{classify, n_constants, q_critical};
use dephaselab_core::shorttime::velocity_extrema;
use dephaselab_core::spectral::Shape;
use dephaselab_core::{dynamics, Error as CoreError};

use crate::config::{Point, RunConfig, SchemeRecord};
use crate::error::{CliError, CliResult};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Evolve,
    Initial,
    Velocity,
    Extrema,
    Classify,
    Oracle,
}

#[derive(Debug, Clone)]
pub enum Output {
    Csv(Table),
    Json(Value),
}

#[derive(Debug, Clone)]
pub struct Report {
    pub output: Output,
    /// Set when an analytic value and its oracle differ beyond tolerance.
    pub disagreement: Option<String>,
    pub warnings: Vec<String>,
}

impl Report {
    fn csv(t: Table, warnings: Vec<String>) -> Self {
        Report {
            output: Output::Csv(t),
            disagreement: None,
            warnings,
        }
    }

    pub fn render(&self) -> CliResult<String> {
        match &self.output {
            Output::Csv(t) => t.to_csv_string(),
            Output::Json(v) => Ok(serde_json::to_string_pretty(v)? + "\n"),
        }
    }
}

pub const DEFAULT_EXTREMA_TOL: f64 = 1e-4;
pub const DEFAULT_ORACLE_TOL: f64 = 1e-6;
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Override sweep points, time points, search grid or `n_max` from `--grid`.
pub fn apply_grid(cmd: Command, cfg: &mut RunConfig, grid: &[usize]) -> CliResult<()> {
    if grid.is_empty() {
        return Ok(());
    }
    if grid.len() > 3 || grid.contains(&0) {
        return Err(CliError::config(format!("--grid {grid:?}")));
    }
    let at = |i: usize| grid.get(i).copied().unwrap_or(grid[0]);
    match cmd {
        Command::Evolve => {
            let t = cfg.time.get_or_insert_with(Default::default);
            if t.values.is_some() {
                return Err(CliError::config("--grid cannot resample explicit time values"));
            }
            t.points = Some(grid[0]);
        }
        Command::Initial | Command::Velocity => {
            for (i, ax) in cfg.sweep.iter_mut().enumerate() {
                if ax.values.is_some() {
                    return Err(CliError::config("--grid cannot resample explicit sweep values"));
                }
                ax.points = Some(at(i));
            }
        }
        Command::Extrema => {
            cfg.search.get_or_insert_with(Default::default).grid = Some([at(0), at(1), at(2)]);
        }
        Command::Oracle => {
            cfg.oracle
                .as_mut()
                .ok_or_else(|| CliError::config("oracle command needs an oracle record"))?
                .n_max = grid[0];
        }
        Command::Classify => {}
    }
    Ok(())
}

pub fn run(cmd: Command, cfg: &RunConfig) -> CliResult<Report> {
    cfg.validate()?;
    match cmd {
        Command::Evolve => evolve(cfg),
        Command::Initial => surface(cfg, false),
        Command::Velocity => surface(cfg, true),
        Command::Extrema => extrema(cfg),
        Command::Classify => classify_cmd(cfg),
        Command::Oracle => oracle(cfg),
    }
}

fn evolve(cfg: &RunConfig) -> CliResult<Report> {
    let j = cfg.density()?;
    let ctx = cfg.context(None)?;
    let ws = j.omega_s();
    let scaled = cfg.time.clone().unwrap_or_default();
    let scaled = if scaled.values.is_none() && scaled.t_max.is_none() {
        crate::config::TimeRecord {
            t_max: Some(1.0),
            ..scaled
        }
    } else {
        scaled
    }
    .scaled()?;
    let times: Vec<f64> = scaled.iter().map(|t| t / ws).collect();
    let mut table = Table::new([
        "curve",
        "delta_zeta",
        "t_omega_s",
        "re",
        "im",
        "abs",
        "normalized",
        "phase",
        "xi",
        "upsilon",
        "flag",
    ]);
    let mut warnings = Vec::new();
    for (label, rec) in cfg.curve_records() {
        let s = rec.resolve(&ctx)?;
        let c = n_constants(&s, &ctx);
        let traj = trajectory(&s, &j, &ctx, &times, QuadOptions::TIME_DEPENDENT)?;
        let rho0 = c.magnitude();
        let zero = c.is_degenerate();
        if zero {
            warnings.push(format!("curve {label}: vanishing initial coherence, values set to 0"));
        }
        let phases = traj.phases();
        for (i, z) in traj.values.iter().enumerate() {
            let normalized = if zero { 0.0 } else { z.norm() / rho0 };
            table.rows.push(vec![
                Cell::Text(label.clone()),
                Cell::Num(s.delta_zeta()),
                Cell::Num(scaled[i]),
                Cell::Num(z.re),
                Cell::Num(z.im),
                Cell::Num(z.norm()),
                Cell::Num(normalized),
                Cell::Num(phases[i]),
                Cell::Num(traj.xi[i]),
                Cell::Num(traj.upsilon[i]),
                Cell::Int(i64::from(zero)),
            ]);
        }
    }
    Ok(Report::csv(table, warnings))
}

/// Cartesian product of the sweep axes, first axis slowest.
fn cells(cfg: &RunConfig) -> CliResult<Vec<Vec<f64>>> {
    if cfg.sweep.is_empty() || cfg.sweep.len() > 2 {
        return Err(CliError::config("need one or two sweep axes"));
    }
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for ax in &cfg.sweep {
        let nodes = ax.nodes()?;
        out = out
            .into_iter()
            .flat_map(|p| {
                nodes.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Ok(out)
}

fn surface(cfg: &RunConfig, velocity: bool) -> CliResult<Report> {
    let eta = match cfg.density_opt()? {
        Some(j) if velocity => Some(j.moment(&cfg.context(None)?, -1, true)?),
        _ => None,
    };
    let mut header = vec!["curve".to_string()];
    header.extend(cfg.sweep.iter().map(|a| a.axis.column().to_string()));
    header.push("abs_rho0".into());
    if velocity {
        header.push("v_over_eta".into());
        if eta.is_some() {
            header.push("velocity".into());
        }
    }
    let mut table = Table::new(header);
    let grid = cells(cfg)?;
    for (label, rec) in cfg.curve_records() {
        let rows: Vec<Vec<Cell>> = grid
            .par_iter()
            .map(|vals| -> CliResult<Vec<Cell>> {
                let mut p = Point {
                    scheme: rec,
                    x: None,
                };
                for (ax, &v) in cfg.sweep.iter().zip(vals) {
                    p.set(ax.axis, v);
                }
                let ctx = cfg.context(p.x)?;
                let s = p.scheme.resolve(&ctx)?;
                let c = n_constants(&s, &ctx);
                let mut row = vec![Cell::Text(label.clone())];
                row.extend(vals.iter().map(|&v| Cell::Num(v)));
                row.push(Cell::Num(c.magnitude()));
                if velocity {
                    let u = c.normalized_velocity();
                    row.push(Cell::Num(u));
                    if let Some(e) = eta {
                        row.push(Cell::Num(u * e));
                    }
                }
                Ok(row)
            })
            .collect::<CliResult<_>>()?;
        table.rows.extend(rows);
    }
    Ok(Report::csv(table, vec![]))
}

fn theta0_of(rec: &SchemeRecord) -> CliResult<f64> {
    rec.theta0.ok_or_else(|| CliError::config("scheme needs theta0"))
}

fn extrema(cfg: &RunConfig) -> CliResult<Report> {
    let j = cfg.density()?;
    let ctx = cfg.context(None)?;
    let grid = cfg.search.clone().unwrap_or_default().spec();
    let tol = cfg.tol.unwrap_or(DEFAULT_EXTREMA_TOL);
    let mut entries = Vec::new();
    let mut worst: f64 = 0.0;
    for (label, rec) in cfg.curve_records() {
        let theta0 = theta0_of(&rec)?;
        let analytic = velocity_extrema(&ctx, theta0, &j, rec.delta_zeta)?;
        let (max, min) = search_velocity_extrema(&ctx, theta0, &j, &grid)?;
        let eta = analytic.eta;
        let d_max = (analytic.v_max - max.best_value * eta).abs();
        let d_min = (analytic.v_min - min.best_value * eta).abs();
        worst = worst.max(d_max.max(d_min) / eta);
        entries.push(json!({
            "label": label,
            "theta0": theta0,
            "analytic": analytic,
            "oracle": { "max": max, "min": min },
            "oracle_v_max": max.best_value * eta,
            "oracle_v_min": min.best_value * eta,
            "discrepancy": { "max": d_max, "min": d_min },
        }));
    }
    let agree = worst <= tol;
    Ok(Report {
        output: Output::Json(json!({
            "command": "extrema",
            "omega0_over_T": ctx.ratio(),
            "temperature": ctx.temperature(),
            "spectral": cfg.spectral,
            "grid": grid,
            "tolerance_over_eta": tol,
            "max_discrepancy_over_eta": worst,
            "agree": agree,
            "results": entries,
        })),
        disagreement: (!agree).then(|| format!("analytic and grid extrema differ by {worst:e}·η > {tol:e}·η")),
        warnings: vec![],
    })
}

fn classify_cmd(cfg: &RunConfig) -> CliResult<Report> {
    let ctx = cfg.context(None)?;
    let tol = cfg.tol.unwrap_or(DEFAULT_CLASSIFY_TOL);
    let mut entries = Vec::new();
    for (label, rec) in cfg.curve_records() {
        let s = rec.resolve(&ctx)?;
        let c = n_constants(&s, &ctx);
        let cl = classify(&s, &ctx, tol);
        entries.push(json!({
            "label": label,
            "scheme": s,
            "class": cl.class,
            "q": s.q(),
            "q_critical": q_critical(&ctx, s.theta0),
            "delta_zeta": s.delta_zeta(),
            "abs_rho0": c.magnitude(),
            "v_over_eta": c.normalized_velocity(),
        }));
    }
    Ok(Report {
        output: Output::Json(json!({
            "command": "classify",
            "omega0_over_T": ctx.ratio(),
            "tol": tol,
            "results": entries,
        })),
        disagreement: None,
        warnings: vec![],
    })
}

fn oracle(cfg: &RunConfig) -> CliResult<Report> {
    let j = cfg.density()?;
    let Shape::DiscreteModes(modes) = j.shape() else {
        return Err(CliError::config("oracle needs a discrete spectral record"));
    };
    let rec = cfg
        .oracle
        .as_ref()
        .ok_or_else(|| CliError::config("oracle command needs an oracle record"))?;
    let ctx = cfg.context(None)?;
    let ws = j.omega_s();
    let scaled = cfg
        .time
        .clone()
        .unwrap_or_else(|| crate::config::TimeRecord::linear(1.0, 20))
        .scaled()?;
    let times: Vec<f64> = scaled.iter().map(|t| t / ws).collect();
    let tol = cfg.tol.unwrap_or(DEFAULT_ORACLE_TOL);
    // A mode of weight w in J has coupling g = √w / 2 in the Hamiltonian.
    let fock_modes: Vec<FockMode> = modes
        .iter()
        .map(|m| FockMode {
            g: m.weight.sqrt() / 2.0,
            omega: m.frequency,
        })
        .collect();
    let mut entries = Vec::new();
    let mut worst: f64 = 0.0;
    let mut warnings = Vec::new();
    for (label, srec) in cfg.curve_records() {
        let s = srec.resolve(&ctx)?;
        let mut fc = FockOracleConfig::new(fock_modes.clone(), rec.n_max, ctx, s);
        if let Some(cap) = rec.dimension_cap {
            fc.dimension_cap = cap;
        }
        let (ed, log) = if rec.converge {
            exact_diagonalization_converged(&fc, &times, rec.convergence_tol.unwrap_or(tol / 10.0))?
        } else {
            (exact_diagonalization_coherence(&fc, &times)?, vec![])
        };
        let analytic = times
            .iter()
            .map(|&t| dynamics::coherence(&s, &j, &ctx, t))
            .collect::<Result<Vec<_>, CoreError>>()?;
        let dev: Vec<f64> = analytic.iter().zip(&ed.values).map(|(a, b)| (a - b).norm()).collect();
        let max_dev = dev.iter().copied().fold(0.0, f64::max);
        let p0 = ed.populations[0];
        let drift = ed
            .populations
            .iter()
            .map(|p| (p[0] - p0[0]).abs().max((p[1] - p0[1]).abs()))
            .fold(0.0, f64::max);
        worst = worst.max(max_dev);
        if let Some(w) = &ed.truncation_warning {
            warnings.push(format!("curve {label}: {w}"));
        }
        entries.push(json!({
            "label": label,
            "scheme": s,
            "max_deviation": max_dev,
            "deviation": dev,
            "population_drift": drift,
            "analytic": analytic.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "oracle": ed,
            "convergence": log,
        }));
    }
    let agree = worst <= tol;
    Ok(Report {
        output: Output::Json(json!({
            "command": "oracle",
            "omega0_over_T": ctx.ratio(),
            "temperature": ctx.temperature(),
            "spectral": cfg.spectral,
            "times_omega_s": scaled,
            "tolerance": tol,
            "max_deviation": worst,
            "agree": agree,
            "results": entries,
        })),
        disagreement: (!agree).then(|| format!("exact diagonalization deviates by {worst:e} > {tol:e}")),
        warnings,
    })
}
