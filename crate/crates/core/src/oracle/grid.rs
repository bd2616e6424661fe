//! Refined grid search over `(u, v, Δζ) ∈ [0,1] × [0,1] × ]−2π, 2π[` with
//! `u = sin ϑ₁` and `v = sin ϑ₂`.
//!
//! Every objective depends on ϑ₁ and ϑ₂ only through their sines, so the
//! acute and obtuse branches give identical values and only one is searched.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{q_critical, SchemeCoefficients};
use crate::spectral::{SpectralDensity, ThermalContext};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_u: usize,
    pub n_v: usize,
    /// Number of interior Δζ nodes; rounded up to the next `4k − 1` so that
    /// `Δζ = 0` and `±π` are nodes.
    pub n_delta: usize,
    pub refinements: usize,
    pub shrink: f64,
    /// Max-norm distance in `(|u − Qv|, |Δζ ∓ π|)` below which a point
    /// counts as singular.
    pub exclusion_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::cube(32)
    }
}

impl GridSpec {
    pub fn cube(n: usize) -> Self {
        GridSpec {
            n_u: n,
            n_v: n,
            n_delta: n,
            refinements: 3,
            shrink: 8.0,
            exclusion_tol: 1e-6,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_u < 2 || self.n_v < 2 || self.n_delta < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid {}×{}×{} too small",
                self.n_u, self.n_v, self.n_delta
            )));
        }
        if !(self.shrink > 1.0) || !(self.exclusion_tol > 0.0) {
            return Err(Error::InvalidParameter("shrink must exceed 1, exclusion_tol positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub u: f64,
    pub v: f64,
    pub delta_zeta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub delta_zeta: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStep {
    pub round: usize,
    pub region: SearchBox,
    pub best: GridPoint,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchReport {
    pub objective: String,
    pub maximize: bool,
    pub shape: [usize; 3],
    pub theta0: f64,
    pub omega0_over_t: f64,
    pub best: GridPoint,
    pub best_value: f64,
    pub history: Vec<RefinementStep>,
    pub excluded: Vec<String>,
    pub exclusion_tol: f64,
    /// Critical ratio Q used for the singular set.
    pub q_critical: f64,
}

struct Exclusion {
    q: f64,
    tol: f64,
}

impl Exclusion {
    fn in_s0(&self, p: &GridPoint) -> bool {
        p.u.max(p.v) <= self.tol
    }

    /// The `±π` the point is singular at, if any.
    fn s1_base(&self, p: &GridPoint) -> Option<f64> {
        if (p.u - self.q * p.v).abs() > self.tol {
            return None;
        }
        [PI, -PI].into_iter().find(|b| (p.delta_zeta - b).abs() <= self.tol)
    }

    fn contains(&self, p: &GridPoint) -> bool {
        self.in_s0(p) || self.s1_base(p).is_some()
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn delta_count(n: usize) -> usize {
    (n + 4) / 4 * 4 - 1
}

fn delta_nodes(n: usize) -> Vec<f64> {
    let n = delta_count(n);
    let step = 2.0 * TAU / (n + 1) as f64;
    (1..=n).map(|k| -TAU + step * k as f64).collect()
}

struct Search<'a, F> {
    f: &'a F,
    maximize: bool,
    excl: Exclusion,
}

impl<F: Fn(&GridPoint) -> f64 + Sync> Search<'_, F> {
    fn better(&self, a: f64, b: f64) -> bool {
        if self.maximize {
            a > b
        } else {
            a < b
        }
    }

    /// Value at a grid node; singular nodes are replaced by the better of
    /// two samples just off `Δζ = ±π`.
    fn sample(&self, p: GridPoint) -> Option<(GridPoint, f64)> {
        if self.excl.in_s0(&p) {
            return None;
        }
        match self.excl.s1_base(&p) {
            None => Some((p, (self.f)(&p))),
            Some(base) => {
                let off = 2.0 * self.excl.tol;
                [base - off, base + off]
                    .into_iter()
                    .map(|d| GridPoint { delta_zeta: d, ..p })
                    .filter(|q| q.delta_zeta.abs() < TAU && !self.excl.contains(q))
                    .map(|q| (q, (self.f)(&q)))
                    .reduce(|a, b| if self.better(b.1, a.1) { b } else { a })
            }
        }
    }

    fn scan(&self, us: &[f64], vs: &[f64], ds: &[f64]) -> Option<(GridPoint, f64)> {
        let cells: Vec<(usize, usize)> = (0..us.len()).flat_map(|i| (0..vs.len()).map(move |j| (i, j))).collect();
        cells
            .par_iter()
            .map(|&(i, j)| {
                let mut best: Option<(GridPoint, f64)> = None;
                for &d in ds {
                    let p = GridPoint {
                        u: us[i],
                        v: vs[j],
                        delta_zeta: d,
                    };
                    if let Some(c) = self.sample(p) {
                        if best.is_none_or(|b| self.better(c.1, b.1)) {
                            best = Some(c);
                        }
                    }
                }
                best
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .reduce(|a, b| if self.better(b.1, a.1) { b } else { a })
    }
}

fn run<F: Fn(&GridPoint) -> f64 + Sync>(
    name: &str,
    f: &F,
    maximize: bool,
    ctx: &ThermalContext,
    theta0: f64,
    grid: &GridSpec,
) -> Result<GridSearchReport> {
    grid.validate()?;
    let q = q_critical(ctx, theta0);
    let search = Search {
        f,
        maximize,
        excl: Exclusion {
            q,
            tol: grid.exclusion_tol,
        },
    };
    let ds = delta_nodes(grid.n_delta);
    let full = SearchBox {
        u: (0.0, 1.0),
        v: (0.0, 1.0),
        delta_zeta: (-TAU, TAU),
    };
    let (mut best, mut value) = search
        .scan(&linspace(0.0, 1.0, grid.n_u), &linspace(0.0, 1.0, grid.n_v), &ds)
        .ok_or_else(|| Error::Oracle("every grid node is excluded".into()))?;
    let mut history = vec![RefinementStep {
        round: 0,
        region: full,
        best,
        value,
    }];
    let mut half = [0.5, 0.5, TAU];
    for round in 1..=grid.refinements {
        for h in &mut half {
            *h /= grid.shrink;
        }
        let clip = |c: f64, h: f64, lo: f64, hi: f64| ((c - h).max(lo), (c + h).min(hi));
        let region = SearchBox {
            u: clip(best.u, half[0], 0.0, 1.0),
            v: clip(best.v, half[1], 0.0, 1.0),
            delta_zeta: clip(best.delta_zeta, half[2], -TAU, TAU),
        };
        let mut dl = linspace(region.delta_zeta.0, region.delta_zeta.1, grid.n_delta | 1);
        dl.retain(|d| d.abs() < TAU);
        dl.push(best.delta_zeta);
        let mut ul = linspace(region.u.0, region.u.1, grid.n_u);
        ul.push(best.u);
        let mut vl = linspace(region.v.0, region.v.1, grid.n_v);
        vl.push(best.v);
        if let Some((p, val)) = search.scan(&ul, &vl, &dl) {
            if search.better(val, value) {
                best = p;
                value = val;
            }
        }
        history.push(RefinementStep {
            round,
            region,
            best,
            value,
        });
    }
    Ok(GridSearchReport {
        objective: name.to_string(),
        maximize,
        shape: [grid.n_u, grid.n_v, delta_count(grid.n_delta)],
        theta0,
        omega0_over_t: ctx.ratio(),
        best,
        best_value: value,
        history,
        excluded: vec!["S0: u = v = 0".into(), "S1: u = Q v, Δζ = ±π".into()],
        exclusion_tol: grid.exclusion_tol,
        q_critical: q,
    })
}

fn coefficients(ctx: &ThermalContext, theta0: f64, p: &GridPoint) -> SchemeCoefficients {
    SchemeCoefficients::from_sines(ctx, theta0, p.u, p.v, p.delta_zeta, 0.0)
}

/// Maximum of `|ρ₀₁(0)|²` over the scheme box.
pub fn search_initial_coherence_max(ctx: &ThermalContext, theta0: f64, grid: &GridSpec) -> Result<GridSearchReport> {
    let f = |p: &GridPoint| coefficients(ctx, theta0, p).n0 / 4.0;
    run("|rho01(0)|^2", &f, true, ctx, theta0, grid)
}

/// Maximum and minimum of `𝔙/η_{−1,0}` over the scheme box minus the
/// singular set.
pub fn search_velocity_extrema(
    ctx: &ThermalContext,
    theta0: f64,
    j: &SpectralDensity,
    grid: &GridSpec,
) -> Result<(GridSearchReport, GridSearchReport)> {
    let eta = j.moment(ctx, -1, true)?;
    if !eta.is_finite() {
        return Err(Error::UnsupportedSpectrum {
            k: -1,
            reason: "not finite".into(),
        });
    }
    let f = |p: &GridPoint| coefficients(ctx, theta0, p).normalized_velocity();
    let max = run("V/eta_-1,0", &f, true, ctx, theta0, grid)?;
    let min = run("V/eta_-1,0", &f, false, ctx, theta0, grid)?;
    Ok((max, min))
}
