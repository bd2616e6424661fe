//! Time-dependent dephasing integrals and the coherence trajectory.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::QuadOptions;
use crate::scheme::{n_constants, MeasurementScheme, SchemeCoefficients};
use crate::spectral::{SpectralDensity, ThermalContext};

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn inner_scale(j: &SpectralDensity, temperature: f64, t: f64) -> f64 {
    let mut s = j.omega_s().min(1.0 / t);
    if temperature > 0.0 {
        s = s.min(temperature);
    }
    s
}

/// `Ξ_T(t) = ∫ J_T(ω) (1 − cos ωt)/ω² dω`.
pub fn dephasing_factor(j: &SpectralDensity, ctx: &ThermalContext, t: f64) -> Result<f64> {
    dephasing_factor_with(j, ctx, t, QuadOptions::TIME_DEPENDENT)
}

pub fn dephasing_factor_with(j: &SpectralDensity, ctx: &ThermalContext, t: f64, opts: QuadOptions) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let temp = ctx.temperature();
    // (1 − cos ωt)/ω² = (t²/2) sinc²(ωt/2)
    let f = |w: f64| 0.5 * t * t * sinc(0.5 * w * t).powi(2);
    j.integrate_effective(temp, f, inner_scale(j, temp, t), opts)
}

/// `υ₀(t) = ∫ J(ω) sin(ωt)/ω² dω`.
pub fn upsilon0(j: &SpectralDensity, t: f64) -> Result<f64> {
    upsilon0_with(j, t, QuadOptions::TIME_DEPENDENT)
}

pub fn upsilon0_with(j: &SpectralDensity, t: f64, opts: QuadOptions) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let f = |w: f64| t * sinc(w * t) / w;
    j.integrate_effective(0.0, f, inner_scale(j, 0.0, t), opts)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time {t}")))
    }
}

/// `χ_{1,T}` on the principal branch of the two-argument arctangent.
pub fn phase_shift(c: &SchemeCoefficients, upsilon: f64) -> Result<f64> {
    if c.is_degenerate() {
        return Err(Error::DegenerateScheme);
    }
    let (s, co) = upsilon.sin_cos();
    let y = c.n1 * s;
    let x = c.n0 * co + c.n2 * s;
    if x == 0.0 && y == 0.0 {
        return Err(Error::UndefinedPhase);
    }
    Ok(y.atan2(x))
}

/// Removes 2π jumps from a sequence of phases.
#[derive(Debug, Clone, Default)]
pub struct PhaseUnwrapper {
    last: Option<f64>,
}

impl PhaseUnwrapper {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unwrap(&mut self, raw: f64) -> f64 {
        let out = match self.last {
            None => raw,
            Some(prev) => {
                let k = ((prev - raw) / (2.0 * PI)).round();
                raw + 2.0 * PI * k
            }
        };
        self.last = Some(out);
        out
    }
}

/// The two time integrals at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeIntegrals {
    pub xi: f64,
    pub upsilon: f64,
}

pub fn time_integrals(j: &SpectralDensity, ctx: &ThermalContext, t: f64, opts: QuadOptions) -> Result<TimeIntegrals> {
    Ok(TimeIntegrals {
        xi: dephasing_factor_with(j, ctx, t, opts)?,
        upsilon: upsilon0_with(j, t, opts)?,
    })
}

/// `ρ₀₁(t)`.
///
/// Evaluated as `e^{iω₀t − Ξ}·ρ₀₁(0)[cos υ₀ + (a₂ + i a₁) sin υ₀]`, which is
/// the same complex number as `ρ₀₁(0) e^{i(ω₀t+χ)−Ξ} √(1 + a₂ sin 2υ₀ + a₃ sin² υ₀)`
/// but free of branch choices. Returns 0 without evaluating any integral when
/// the initial coherence vanishes.
pub fn coherence(s: &MeasurementScheme, j: &SpectralDensity, ctx: &ThermalContext, t: f64) -> Result<Complex64> {
    coherence_with(s, j, ctx, t, QuadOptions::TIME_DEPENDENT)
}

pub fn coherence_with(
    s: &MeasurementScheme,
    j: &SpectralDensity,
    ctx: &ThermalContext,
    t: f64,
    opts: QuadOptions,
) -> Result<Complex64> {
    let c = n_constants(s, ctx);
    if c.is_degenerate() {
        check_time(t)?;
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ti = time_integrals(j, ctx, t, opts)?;
    Ok(coherence_from(&c, ctx, t, ti))
}

pub(crate) fn coherence_from(c: &SchemeCoefficients, ctx: &ThermalContext, t: f64, ti: TimeIntegrals) -> Complex64 {
    if c.is_degenerate() {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar((-ti.xi).exp(), ctx.omega0() * t) * c.evolution_amplitude(ti.upsilon)
}

/// The amplitude form of [`coherence`] evaluated without the vanishing
/// initial coherence short cut. It coincides with `coherence` whenever
/// `ρ₀₁(0) ≠ 0` and is its continuous extension onto the schemes with
/// `ρ₀₁(0) = 0`.
pub fn continuous_coherence(
    s: &MeasurementScheme,
    j: &SpectralDensity,
    ctx: &ThermalContext,
    t: f64,
    opts: QuadOptions,
) -> Result<Complex64> {
    let c = n_constants(s, ctx);
    let ti = time_integrals(j, ctx, t, opts)?;
    Ok(Complex64::from_polar((-ti.xi).exp(), ctx.omega0() * t) * c.evolution_amplitude(ti.upsilon))
}

/// `ρ₀ e^{−Ξ_T(t)}`, the coherence of a state prepared decoupled from the
/// thermal bath.
pub fn decoupled_coherence(rho0: Complex64, j: &SpectralDensity, ctx: &ThermalContext, t: f64) -> Result<Complex64> {
    Ok(rho0 * (-dephasing_factor(j, ctx, t)?).exp())
}

/// `|ρ₀₁(0)| exp(−∫ J_T/ω² dω)`; 0 when the integral diverges.
pub fn asymptotic_magnitude(s: &MeasurementScheme, j: &SpectralDensity, ctx: &ThermalContext) -> Result<f64> {
    let rho = n_constants(s, ctx).magnitude();
    if rho == 0.0 {
        return Ok(0.0);
    }
    let temp = ctx.temperature();
    let inner = if temp > 0.0 { j.omega_s().min(temp) } else { j.omega_s() };
    match j.integrate_effective(temp, |w| 1.0 / (w * w), inner, QuadOptions::MOMENTS) {
        Ok(v) => Ok(rho * (-v).exp()),
        Err(e) if e.is_divergence() => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Sampling times: `t = 0`, `per_decade` log-spaced points from
/// `t_min` up to `min(t_max, 1/ω_s)`, then `linear` equally spaced points up
/// to `t_max`.
pub fn time_grid(omega_s: f64, t_min: f64, t_max: f64, per_decade: usize, linear: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    if !(t_max > 0.0) {
        return out;
    }
    let knee = (1.0 / omega_s).min(t_max);
    let t_min = t_min.min(knee);
    let decades = (knee / t_min).log10();
    let n = (decades * per_decade as f64).ceil().max(1.0) as usize;
    for i in 0..=n {
        let t = t_min * 10f64.powf(decades * i as f64 / n as f64);
        out.push(t.min(knee));
    }
    if t_max > knee && linear > 0 {
        for i in 1..=linear {
            out.push(knee + (t_max - knee) * i as f64 / linear as f64);
        }
    }
    out.dedup();
    out
}

/// Default grid: 400 points per decade from `10⁻⁴/ω_s`, then 400 linear
/// points beyond `1/ω_s`.
pub fn default_time_grid(omega_s: f64, t_max: f64) -> Vec<f64> {
    time_grid(omega_s, 1e-4 / omega_s, t_max, 400, 400)
}

#[derive(Debug, Clone)]
pub struct CoherenceTrajectory {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub xi: Vec<f64>,
    pub upsilon: Vec<f64>,
    pub scheme: MeasurementScheme,
    pub density: SpectralDensity,
    pub context: ThermalContext,
}

/// Sample `ρ₀₁(t)` on `times`, evaluating points in parallel.
pub fn trajectory(
    s: &MeasurementScheme,
    j: &SpectralDensity,
    ctx: &ThermalContext,
    times: &[f64],
    opts: QuadOptions,
) -> Result<CoherenceTrajectory> {
    let c = n_constants(s, ctx);
    let samples: Vec<(Complex64, TimeIntegrals)> = times
        .par_iter()
        .map(|&t| {
            let ti = time_integrals(j, ctx, t, opts)?;
            Ok((coherence_from(&c, ctx, t, ti), ti))
        })
        .collect::<Result<_>>()?;
    Ok(CoherenceTrajectory {
        times: times.to_vec(),
        values: samples.iter().map(|s| s.0).collect(),
        xi: samples.iter().map(|s| s.1.xi).collect(),
        upsilon: samples.iter().map(|s| s.1.upsilon).collect(),
        scheme: *s,
        density: j.clone(),
        context: *ctx,
    })
}

impl CoherenceTrajectory {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// `arg ρ₀₁(t)` made continuous along the samples.
    pub fn phases(&self) -> Vec<f64> {
        let mut un = PhaseUnwrapper::new();
        self.values
            .iter()
            .map(|z| if z.norm() == 0.0 { un.unwrap(0.0) } else { un.unwrap(z.arg()) })
            .collect()
    }

    pub const CSV_HEADER: &'static str = "t_omega_s,re,im,abs,phase,xi,upsilon";

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        let ws = self.density.omega_s();
        let phases = self.phases();
        for (i, (&t, &z)) in self.times.iter().zip(&self.values).enumerate() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                t * ws,
                z.re,
                z.im,
                z.norm(),
                phases[i],
                self.xi[i],
                self.upsilon[i]
            )?;
        }
        Ok(())
    }
}
