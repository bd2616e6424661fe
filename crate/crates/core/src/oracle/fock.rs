//! Exact diagonalization of the qubit coupled to a few truncated bosonic
//! modes.
//!
//! `H = (ω₀/2)σ_z + σ_z ⊗ Σ_k g_k(b_k† + b_k) + Σ_k ω_k b_k† b_k` commutes
//! with σ_z, so it splits into two environment blocks `H_±` (σ_z = ±1).
//! Both blocks are diagonalized once; the thermal weights and the unitary
//! evolution are then diagonal in the block eigenbases.
//!
//! A mode with coupling `g` contributes `4g²` to the spectral weight, see
//! [`FockOracleConfig::spectral_density`].

use faer::complex_native::c64;
use faer::Side;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{ket, MeasurementScheme};
use crate::spectral::{Mode, SpectralDensity, ThermalContext};

pub const DEFAULT_DIMENSION_CAP: usize = 20_000;
const TAIL_LIMIT: f64 = 1e-8;
const EIGEN_CHECK_DIM: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockMode {
    pub g: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockOracleConfig {
    pub modes: Vec<FockMode>,
    pub n_max: usize,
    pub ctx: ThermalContext,
    pub scheme: MeasurementScheme,
    pub dimension_cap: usize,
}

impl FockOracleConfig {
    pub fn new(modes: Vec<FockMode>, n_max: usize, ctx: ThermalContext, scheme: MeasurementScheme) -> Self {
        FockOracleConfig {
            modes,
            n_max,
            ctx,
            scheme,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }

    /// `2 (n_max + 1)^{#modes}`, saturating.
    pub fn dimension(&self) -> usize {
        let per = self.n_max + 1;
        self.modes
            .iter()
            .try_fold(2usize, |d, _| d.checked_mul(per))
            .unwrap_or(usize::MAX)
    }

    /// The discrete spectral density with the same dephasing integrals.
    pub fn spectral_density(&self) -> Result<SpectralDensity> {
        SpectralDensity::discrete(
            self.modes
                .iter()
                .map(|m| Mode {
                    weight: 4.0 * m.g * m.g,
                    frequency: m.omega,
                })
                .collect(),
        )
    }

    /// `exp(−(n_max + 1) ω_min / T)`.
    pub fn tail_bound(&self) -> f64 {
        let w_min = self.modes.iter().map(|m| m.omega).fold(f64::INFINITY, f64::min);
        (-((self.n_max + 1) as f64) * w_min / self.ctx.temperature()).exp()
    }

    fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::InvalidParameter("no modes".into()));
        }
        for m in &self.modes {
            if !(m.omega > 0.0) || !m.g.is_finite() {
                return Err(Error::InvalidParameter(format!("mode g = {}, ω = {}", m.g, m.omega)));
            }
        }
        if !(self.ctx.temperature() > 0.0) {
            return Err(Error::InvalidParameter("exact diagonalization needs T > 0".into()));
        }
        let dim = self.dimension();
        if dim > self.dimension_cap {
            return Err(Error::DimensionCap {
                dim,
                cap: self.dimension_cap,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockTrajectory {
    pub times: Vec<f64>,
    #[serde(with = "complex_vec")]
    pub values: Vec<Complex64>,
    /// `(⟨0|ρ(t)|0⟩, ⟨1|ρ(t)|1⟩)`.
    pub populations: Vec<[f64; 2]>,
    pub trace: f64,
    pub dimension: usize,
    pub n_max: usize,
    pub tail_bound: f64,
    pub truncation_warning: Option<String>,
    /// Smallest eigenvalue of the full `ρ(t)` over the sampled times, only
    /// for total dimension up to 400.
    pub min_eigenvalue: Option<f64>,
}

mod complex_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

/// Coupling operator `Σ g_k(b_k† + b_k)` and `Σ ω_k n_k` on the product
/// Fock space, mode 0 being the most significant digit.
fn environment(modes: &[FockMode], n_max: usize) -> (DMatrix<f64>, DVector<f64>) {
    let per = n_max + 1;
    let dim = per.pow(modes.len() as u32);
    let mut x = DMatrix::zeros(dim, dim);
    let mut free = DVector::zeros(dim);
    let strides: Vec<usize> = (0..modes.len()).map(|k| per.pow((modes.len() - 1 - k) as u32)).collect();
    for idx in 0..dim {
        for (k, m) in modes.iter().enumerate() {
            let n = (idx / strides[k]) % per;
            free[idx] += m.omega * n as f64;
            if n < n_max {
                let up = idx + strides[k];
                let a = m.g * ((n + 1) as f64).sqrt();
                x[(up, idx)] += a;
                x[(idx, up)] += a;
            }
        }
    }
    (x, free)
}

struct Block {
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

fn block(sign: f64, omega0: f64, x: &DMatrix<f64>, free: &DVector<f64>) -> Block {
    let mut h = x * sign;
    for i in 0..free.len() {
        h[(i, i)] += free[i] + sign * omega0 / 2.0;
    }
    let (values, vectors) = symmetric_eigen(&h);
    Block { values, vectors }
}

// nalgebra's symmetric QR loses accuracy on the clustered spectra of
// commensurate mode frequencies, so the decompositions go through faer.
fn symmetric_eigen(h: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = h.nrows();
    let m = faer::Mat::<f64>::from_fn(n, n, |i, j| h[(i, j)]);
    let evd = m.selfadjoint_eigendecomposition(Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();
    (DVector::from_fn(n, |i, _| s.read(i)), DMatrix::from_fn(n, n, |i, j| u.read(i, j)))
}

fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    let m = faer::Mat::<c64>::from_fn(n, n, |i, j| {
        let z = h[(i, j)];
        c64::new(z.re, z.im)
    });
    m.selfadjoint_eigenvalues(Side::Lower)
}

/// `⟨0|Tr_E ρ(t)|1⟩` and the populations from exact diagonalization.
pub fn exact_diagonalization_coherence(cfg: &FockOracleConfig, times: &[f64]) -> Result<FockTrajectory> {
    cfg.validate()?;
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParameter("times must be finite and nonnegative".into()));
    }
    let temp = cfg.ctx.temperature();
    let w0 = cfg.ctx.omega0();
    let (x, free) = environment(&cfg.modes, cfg.n_max);
    // index 0: σ_z = −1 (|0⟩), index 1: σ_z = +1 (|1⟩)
    let blocks = [block(-1.0, w0, &x, &free), block(1.0, w0, &x, &free)];
    let shift = blocks
        .iter()
        .flat_map(|b| b.values.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let boltz: Vec<DVector<f64>> = blocks
        .iter()
        .map(|b| b.values.map(|l| (-(l - shift) / temp).exp()))
        .collect();
    let z: f64 = boltz.iter().map(|e| e.sum()).sum();

    // ρ(0) = (1/Z) Σ_j |n_j⟩⟨n_j| ⊗ B_j, B_j = Σ_s |⟨s|m_j⟩|² E_s with
    // m₁ = n₀, m₂ = −n₀.
    let s = &cfg.scheme;
    let n0 = ket(s.theta0, s.zeta0);
    let w_n0 = [n0[0].norm_sqr(), n0[1].norm_sqr()];
    let w_m = [w_n0, [w_n0[1], w_n0[0]]];
    let kets = [s.ket(1), s.ket(2)];
    // Coefficient of E_b in the environment operator ⟨a|ρ(0)|a'⟩.
    let coef = |a: usize, ap: usize, b: usize| -> Complex64 {
        (0..2).map(|j| kets[j][a] * kets[j][ap].conj() * w_m[j][b]).sum::<Complex64>() / z
    };
    let trace = (0..2)
        .map(|a| (0..2).map(|b| coef(a, a, b).re * boltz[b].sum()).sum::<f64>())
        .sum::<f64>();
    if (trace - 1.0).abs() > 1e-10 {
        return Err(Error::Oracle(format!("Tr ρ(0) = {trace}")));
    }

    // K = U₋ᵀ U₊; in the eigenbases E₊ → K diag(e₊), E₋ → diag(e₋) K.
    let k = blocks[0].vectors.transpose() * &blocks[1].vectors;
    let alpha = coef(0, 1, 1);
    let beta = coef(0, 1, 0);
    let (lm, lp) = (&blocks[0].values, &blocks[1].values);
    let dim = lm.len();

    let values: Vec<Complex64> = times
        .iter()
        .map(|&t| {
            let pm: Vec<Complex64> = lm.iter().map(|l| Complex64::from_polar(1.0, -l * t)).collect();
            let pp: Vec<Complex64> = lp.iter().map(|l| Complex64::from_polar(1.0, l * t)).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..dim {
                let mut row = Complex64::new(0.0, 0.0);
                for b in 0..dim {
                    let kk = k[(a, b)] * k[(a, b)];
                    row += pp[b] * kk * (alpha * boltz[1][b] + beta * boltz[0][a]);
                }
                acc += pm[a] * row;
            }
            acc
        })
        .collect();

    let populations = populations(&blocks, &boltz, &k, &coef, times);
    let min_eigenvalue = if 2 * dim <= EIGEN_CHECK_DIM {
        Some(min_eigenvalue(&blocks, &boltz, &coef, times))
    } else {
        None
    };
    let tail = cfg.tail_bound();
    let truncation_warning = (tail >= TAIL_LIMIT).then(|| {
        format!(
            "thermal tail exp(-(n_max+1)ω_min/T) = {tail:.3e} ≥ {TAIL_LIMIT:e}; raise n_max"
        )
    });
    Ok(FockTrajectory {
        times: times.to_vec(),
        values,
        populations,
        trace,
        dimension: 2 * dim,
        n_max: cfg.n_max,
        tail_bound: tail,
        truncation_warning,
        min_eigenvalue,
    })
}

/// `Tr[e^{−iH_s t} ρ_ss e^{iH_s t}]` evaluated in the eigenbasis of `H_s`
/// with the numerically computed overlap `U_sᵀU_s`.
fn populations<C: Fn(usize, usize, usize) -> Complex64>(
    blocks: &[Block; 2],
    boltz: &[DVector<f64>],
    k: &DMatrix<f64>,
    coef: &C,
    times: &[f64],
) -> Vec<[f64; 2]> {
    let mut per_block = Vec::with_capacity(2);
    for s in 0..2 {
        let u = &blocks[s].vectors;
        // E_s is diagonal in its own basis; the other block enters via K.
        let other = if s == 0 { k * DMatrix::from_diagonal(&boltz[1]) * k.transpose() } else {
            k.transpose() * DMatrix::from_diagonal(&boltz[0]) * k
        };
        let own = DMatrix::from_diagonal(&boltz[s]);
        let p = own * coef(s, s, s).re + other * coef(s, s, 1 - s).re;
        let g = u.transpose() * u;
        per_block.push((p, g));
    }
    times
        .iter()
        .map(|&t| {
            let mut out = [0.0; 2];
            for s in 0..2 {
                let (p, g) = &per_block[s];
                let l = &blocks[s].values;
                let n = l.len();
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..n {
                    for b in 0..n {
                        if p[(a, b)] != 0.0 && g[(b, a)] != 0.0 {
                            acc += Complex64::from_polar(p[(a, b)] * g[(b, a)], -(l[a] - l[b]) * t);
                        }
                    }
                }
                out[s] = acc.re;
            }
            out
        })
        .collect()
}

fn min_eigenvalue<C: Fn(usize, usize, usize) -> Complex64>(
    blocks: &[Block; 2],
    boltz: &[DVector<f64>],
    coef: &C,
    times: &[f64],
) -> f64 {
    let n = blocks[0].values.len();
    let e: Vec<DMatrix<Complex64>> = (0..2)
        .map(|b| {
            let u = blocks[b].vectors.map(|v| Complex64::new(v, 0.0));
            let d = DMatrix::from_diagonal(&boltz[b].map(|v| Complex64::new(v, 0.0)));
            &u * d * u.transpose()
        })
        .collect();
    let mut lowest = f64::INFINITY;
    for &t in times {
        let evol: Vec<DMatrix<Complex64>> = (0..2)
            .map(|s| {
                let u = blocks[s].vectors.map(|v| Complex64::new(v, 0.0));
                let ph = DMatrix::from_diagonal(&blocks[s].values.map(|l| Complex64::from_polar(1.0, -l * t)));
                &u * ph * u.transpose()
            })
            .collect();
        let mut rho = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
        for a in 0..2 {
            for ap in 0..2 {
                let env = &e[1] * coef(a, ap, 1) + &e[0] * coef(a, ap, 0);
                let blk = &evol[a] * env * evol[ap].adjoint();
                rho.view_mut((a * n, ap * n), (n, n)).copy_from(&blk);
            }
        }
        let herm = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        lowest = hermitian_eigenvalues(&herm).into_iter().fold(lowest, f64::min);
    }
    lowest
}

/// Repeats the diagonalization with `n_max` doubled until the largest
/// change of the coherence over `times` drops below `tol` or the dimension
/// cap is reached. Returns the finest trajectory and `(n_max, change)` for
/// every doubling.
pub fn exact_diagonalization_converged(
    cfg: &FockOracleConfig,
    times: &[f64],
    tol: f64,
) -> Result<(FockTrajectory, Vec<(usize, f64)>)> {
    let mut cur = exact_diagonalization_coherence(cfg, times)?;
    let mut log = Vec::new();
    let mut next = cfg.clone();
    loop {
        next.n_max *= 2;
        if next.n_max == 0 || next.dimension() > next.dimension_cap {
            return Ok((cur, log));
        }
        let fine = exact_diagonalization_coherence(&next, times)?;
        let change = cur
            .values
            .iter()
            .zip(&fine.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        log.push((next.n_max, change));
        cur = fine;
        if change < tol {
            return Ok((cur, log));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::coherence;
    use crate::scheme::initial_coherence;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn config(scheme: MeasurementScheme, n_max: usize) -> FockOracleConfig {
        let ctx = ThermalContext::new(1.0, 1.0).unwrap();
        FockOracleConfig::new(
            vec![FockMode { g: 0.15, omega: 1.0 }, FockMode { g: 0.1, omega: 1.7 }],
            n_max,
            ctx,
            scheme,
        )
    }

    #[test]
    fn dimension_and_cap() {
        let s = MeasurementScheme::from_delta(0.7, 1.2, 0.9, 2.0).unwrap();
        let mut c = config(s, 12);
        assert_eq!(c.dimension(), 2 * 169);
        c.n_max = 200;
        assert!(matches!(
            exact_diagonalization_coherence(&c, &[0.0]),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn matches_analytic_generic() {
        let s = MeasurementScheme::new(0.7, 0.3, 1.2, 3.1, 0.9, 1.1).unwrap();
        let cfg = config(s, 24);
        let times: Vec<f64> = (0..8).map(|i| 0.35 * i as f64).collect();
        let r = exact_diagonalization_coherence(&cfg, &times).unwrap();
        assert!(r.truncation_warning.is_none());
        let j = cfg.spectral_density().unwrap();
        assert!((r.values[0] - initial_coherence(&s, &cfg.ctx)).norm() < 1e-8);
        for (t, v) in times.iter().zip(&r.values) {
            let a = coherence(&s, &j, &cfg.ctx, *t).unwrap();
            assert!((a - v).norm() < 1e-6, "t = {t}: {a} vs {v}");
        }
        let p0 = r.populations[0];
        for p in &r.populations {
            assert!((p[0] - p0[0]).abs() < 1e-10 && (p[1] - p0[1]).abs() < 1e-10);
        }
        assert!((p0[0] + p0[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn density_matrix_is_positive() {
        let s = MeasurementScheme::from_delta(0.4, FRAC_PI_2, FRAC_PI_2, 0.0).unwrap();
        let r = exact_diagonalization_coherence(&config(s, 8), &[0.0, 1.0, 3.0]).unwrap();
        assert!(r.min_eigenvalue.unwrap() > -1e-10);
        assert!(r.truncation_warning.is_some());
        assert!((r.values[0].norm() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn convergence_log() {
        let s = MeasurementScheme::from_delta(2.2, 0.8, PI / 3.0, -1.0).unwrap();
        let mut cfg = config(s, 12);
        cfg.ctx = ThermalContext::from_ratio(2.0, 0.5).unwrap();
        cfg.dimension_cap = 2 * 25 * 25;
        let (r, log) = exact_diagonalization_converged(&cfg, &[0.0, 0.7, 2.0], 1e-7).unwrap();
        assert_eq!(r.n_max, 24);
        assert_eq!(log.len(), 1);
        assert!(log[0].1 < 1e-7, "{log:?}");
    }
}
