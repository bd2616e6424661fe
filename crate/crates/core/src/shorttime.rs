//! Short-time behaviour of `|ρ₀₁(t)|`: the expansion
//! `|ρ₀₁(0)| + 𝔙t + 𝔚t²`, its validity scales, and the extremal velocities
//! over measurement schemes at fixed ϑ₀ and temperature.
//!
//! With `W = e^{−ω₀/T}`, `c = cos ϑ₀` and `Q̂ = max(Q, 1/Q)` the extremal
//! velocity is
//!
//! ```text
//! 𝔙_M / η_{−1,0} = 2W|c| / ((1 + W)(1 + W + (1 − W)|c|)),    𝔙_m = −𝔙_M.
//! ```
//!
//! The Appendix text introducing the minimal-velocity conditions calls them
//! "the global maximum"; they realize the minimum and are treated as such.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{n_constants, q_critical_w, q_hat_w, Branch, MeasurementScheme, SchemeClass, SchemeCoefficients};
use crate::spectral::{SpectralDensity, ThermalContext};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortTimeProfile {
    /// Linear coefficient 𝔙.
    pub velocity: f64,
    /// Quadratic coefficient 𝔚.
    pub quadratic: f64,
    /// `ξ_T = (a₁² − 1)η²_{−1,0} − η_{0,T}`; `None` for vanishing coherence.
    pub xi: Option<f64>,
    /// 𝔚′, the quadratic coefficient of the maximal-coherence schemes.
    pub w_prime: f64,
    pub t_s: f64,
    pub t_l: f64,
    pub rho0_mag: f64,
    pub a1: f64,
    pub a2: f64,
    pub eta_m1_0: f64,
    pub eta_1_0: f64,
    pub eta_0_t: f64,
    pub eta_2_t: f64,
    pub degenerate: bool,
}

impl ShortTimeProfile {
    /// For a vanishing velocity, whether `|ρ₀₁|` initially grows
    /// (`a₁² > 1 + η_{0,T}/η²_{−1,0}`). `None` if 𝔙 ≠ 0, the scheme is
    /// degenerate or the quadratic term vanishes as well.
    pub fn quadratic_increasing(&self) -> Option<bool> {
        if self.degenerate || self.velocity != 0.0 {
            return None;
        }
        match self.xi {
            Some(xi) if xi != 0.0 => Some(xi > 0.0),
            _ => None,
        }
    }
}

fn eta(j: &SpectralDensity, ctx: &ThermalContext, k: i32, zero_t: bool) -> Result<f64> {
    j.moment(ctx, k, zero_t).map_err(|e| {
        if e.is_divergence() {
            Error::UnsupportedSpectrum {
                k,
                reason: e.to_string(),
            }
        } else {
            e
        }
    })
}

/// `𝔚′ = −η_{0,T}/4 − η²_{−1,0} W/(1 + W)²`.
pub fn w_prime(ctx: &ThermalContext, eta_m1_0: f64, eta_0_t: f64) -> f64 {
    let w = ctx.boltzmann();
    -eta_0_t / 4.0 - eta_m1_0 * eta_m1_0 * w / (1.0 + w).powi(2)
}

/// `t_s = min{1/ω_s, √(6η_{−1,0}/η_{1,0}), 2√(3η_{0,T}/η_{2,T})}`.
pub fn short_time_scale(omega_s: f64, eta_m1_0: f64, eta_1_0: f64, eta_0_t: f64, eta_2_t: f64) -> f64 {
    let mut t = 1.0 / omega_s;
    if eta_1_0 > 0.0 {
        t = t.min((6.0 * eta_m1_0 / eta_1_0).sqrt());
    }
    if eta_2_t > 0.0 {
        t = t.min(2.0 * (3.0 * eta_0_t / eta_2_t).sqrt());
    }
    t
}

pub fn short_time_profile(s: &MeasurementScheme, j: &SpectralDensity, ctx: &ThermalContext) -> Result<ShortTimeProfile> {
    let eta_m1_0 = eta(j, ctx, -1, true)?;
    let eta_1_0 = eta(j, ctx, 1, true)?;
    let eta_0_t = eta(j, ctx, 0, false)?;
    let eta_2_t = eta(j, ctx, 2, false)?;
    let c = n_constants(s, ctx);
    let t_s = short_time_scale(j.omega_s(), eta_m1_0, eta_1_0, eta_0_t, eta_2_t);
    let wp = w_prime(ctx, eta_m1_0, eta_0_t);
    let base = ShortTimeProfile {
        velocity: 0.0,
        quadratic: 0.0,
        xi: None,
        w_prime: wp,
        t_s,
        t_l: t_s,
        rho0_mag: c.magnitude(),
        a1: 0.0,
        a2: 0.0,
        eta_m1_0,
        eta_1_0,
        eta_0_t,
        eta_2_t,
        degenerate: true,
    };
    let Ok((a1, a2, _)) = c.a_coefficients() else {
        return Ok(base);
    };
    let rho = c.magnitude();
    let xi = (a1 * a1 - 1.0) * eta_m1_0 * eta_m1_0 - eta_0_t;
    let mut t_l = t_s;
    if a2 != 0.0 && xi != 0.0 {
        t_l = t_l.min(2.0 * eta_m1_0 * (a2 / xi).abs());
    }
    Ok(ShortTimeProfile {
        velocity: c.normalized_velocity() * eta_m1_0,
        quadratic: rho * xi / 2.0,
        xi: Some(xi),
        t_l,
        a1,
        a2,
        degenerate: false,
        ..base
    })
}

/// `ρ₀ + 𝔙t` (order 1) or `ρ₀ + 𝔙t + 𝔚t²` (order 2).
pub fn expansion_eval(p: &ShortTimeProfile, rho0_mag: f64, t: f64, order: u8) -> f64 {
    let lin = rho0_mag + p.velocity * t;
    if order >= 2 {
        lin + p.quadratic * t * t
    } else {
        lin
    }
}

/// Whether a velocity extremum is a maximum or a minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Max,
    Min,
}

impl Extremum {
    fn sign(self) -> f64 {
        match self {
            Extremum::Max => 1.0,
            Extremum::Min => -1.0,
        }
    }
}

/// `𝔙_M / η_{−1,0}`.
pub fn velocity_bound_ratio(ctx: &ThermalContext, theta0: f64) -> f64 {
    velocity_bound_ratio_w(ctx.boltzmann(), theta0.cos())
}

fn velocity_bound_ratio_w(w: f64, c: f64) -> f64 {
    let c = c.abs();
    2.0 * w * c / ((1.0 + w) * (1.0 + w + (1.0 - w) * c))
}

/// `φ = arccos(1/Q̂)`.
pub fn phi_angle(ctx: &ThermalContext, theta0: f64) -> f64 {
    phi_w(ctx.boltzmann(), theta0.cos())
}

fn phi_w(w: f64, c: f64) -> f64 {
    let q = q_hat_w(w, c);
    if q.is_finite() {
        (1.0 / q).clamp(-1.0, 1.0).acos()
    } else {
        FRAC_PI_2
    }
}

/// `ψ = arcsin(1/(Q̂|cos Δζ|))`, defined on the arc `cos Δζ ≤ −1/Q̂`.
pub fn psi_angle(ctx: &ThermalContext, theta0: f64, delta: f64) -> Option<f64> {
    let q = q_hat_w(ctx.boltzmann(), theta0.cos());
    let cd = delta.cos();
    if cd >= 0.0 {
        return None;
    }
    let s = 1.0 / (q * cd.abs());
    if s > 1.0 + 1e-12 {
        None
    } else {
        Some(s.min(1.0).asin())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityExtrema {
    pub v_max: f64,
    pub v_min: f64,
    /// `η_{−1,0}`.
    pub eta: f64,
    pub phi: f64,
    /// ψ at the supplied Δζ, when that Δζ lies on the admissible arc.
    pub psi: Option<f64>,
    pub delta: Option<f64>,
    pub max_families: Vec<SchemeClass>,
    pub min_families: Vec<SchemeClass>,
    /// Set at `ϑ₀ = π/2`, where every scheme has vanishing initial velocity.
    pub zero_velocity: bool,
}

pub fn velocity_extrema(
    ctx: &ThermalContext,
    theta0: f64,
    j: &SpectralDensity,
    delta: Option<f64>,
) -> Result<VelocityExtrema> {
    let eta = eta(j, ctx, -1, true)?;
    let c = theta0.cos();
    let zero = c.abs() < 1e-15;
    let v_max = if zero { 0.0 } else { velocity_bound_ratio(ctx, theta0) * eta };
    let (max_families, min_families) = if zero {
        (vec![], vec![])
    } else {
        (
            vec![SchemeClass::SMVMaxVelocity, SchemeClass::SMVprime],
            vec![SchemeClass::SmVMinVelocity, SchemeClass::SmVprime],
        )
    };
    Ok(VelocityExtrema {
        v_max,
        v_min: -v_max,
        eta,
        phi: phi_angle(ctx, theta0),
        psi: delta.and_then(|d| psi_angle(ctx, theta0, d)),
        delta,
        max_families,
        min_families,
        zero_velocity: zero || v_max == 0.0,
    })
}

fn family_kind(family: SchemeClass) -> Result<(Extremum, bool)> {
    match family {
        SchemeClass::SMVMaxVelocity => Ok((Extremum::Max, false)),
        SchemeClass::SMVprime => Ok((Extremum::Max, true)),
        SchemeClass::SmVMinVelocity => Ok((Extremum::Min, false)),
        SchemeClass::SmVprime => Ok((Extremum::Min, true)),
        _ => Err(Error::InvalidParameter(format!("{family:?} is not a velocity family"))),
    }
}

/// Whether `Δζ` lies on the arc where the family `kind` is realized:
/// `cos Δζ ≤ −cos φ`, `Δζ ≠ ±π`, and `cos ϑ₀ sin Δζ` of the sign of the
/// extremum.
pub fn on_extremal_arc(ctx: &ThermalContext, theta0: f64, delta: f64, kind: Extremum) -> bool {
    let w = ctx.boltzmann();
    let c = theta0.cos();
    let phi = phi_w(w, c);
    let (sd, cd) = delta.sin_cos();
    delta.abs() < TAU && cd <= -phi.cos() + 1e-12 && c * sd * kind.sign() > 0.0
}

/// The `Δζ` of the primed family on the branch at `base = ±π`.
fn primed_delta(theta0: f64, phi: f64, kind: Extremum, base: f64) -> f64 {
    // For cos ϑ₀ > 0 the maximum sits at ±π − φ, the minimum at ±π + φ.
    let below = theta0 < FRAC_PI_2;
    let minus = below == (kind == Extremum::Max);
    if minus {
        base - phi
    } else {
        base + phi
    }
}

/// A scheme of the requested velocity family.
///
/// For the primed families `delta` may be omitted (the `+π` branch is
/// taken) or must equal `±π ∓ φ` as appropriate. For `SMV`/`SmV` a missing
/// `delta` selects the arc endpoint, where ψ = π/2. `branch` picks ψ or
/// π − ψ for the free polar angle.
pub fn build_extremal_scheme(
    family: SchemeClass,
    ctx: &ThermalContext,
    theta0: f64,
    delta: Option<f64>,
    branch: Branch,
) -> Result<MeasurementScheme> {
    let (kind, primed) = family_kind(family)?;
    if !(0.0..=PI).contains(&theta0) {
        return Err(Error::InvalidParameter(format!("theta0 = {theta0}")));
    }
    let c = theta0.cos();
    if c.abs() < 1e-15 {
        return Err(Error::DegenerateScheme);
    }
    let phi = phi_w(ctx.boltzmann(), c);
    let default = primed_delta(theta0, phi, kind, PI);
    let delta = match delta {
        None => default,
        Some(d) if primed => {
            let ok = [PI, -PI]
                .iter()
                .map(|&b| primed_delta(theta0, phi, kind, b))
                .any(|p| (d - p).abs() <= 1e-12 * (1.0 + p.abs()));
            if !ok {
                return Err(Error::Domain(format!("Δζ = {d} is not ±π∓φ (φ = {phi})")));
            }
            d
        }
        Some(d) => d,
    };
    if !on_extremal_arc(ctx, theta0, delta, kind) {
        return Err(Error::Domain(format!(
            "Δζ = {delta} outside the {kind:?} arc of half-width φ = {phi}"
        )));
    }
    let free = if primed {
        FRAC_PI_2
    } else {
        let psi = psi_angle(ctx, theta0, delta).ok_or_else(|| Error::Domain(format!("ψ undefined at Δζ = {delta}")))?;
        match branch {
            Branch::Acute => psi,
            Branch::Obtuse => PI - psi,
        }
    };
    let (theta1, theta2) = if c > 0.0 { (FRAC_PI_2, free) } else { (free, FRAC_PI_2) };
    MeasurementScheme::from_delta(theta0, theta1, theta2, delta)
}

/// `|ρ₀₁(0)|` shared by all schemes of the velocity families at a given Δζ:
/// `(1 + W − (1 − W)|c|)|tan Δζ| / (4(1 + W))`.
pub fn extremal_initial_coherence(ctx: &ThermalContext, theta0: f64, delta: f64) -> Result<f64> {
    let w = ctx.boltzmann();
    let c = theta0.cos().abs();
    let phi = phi_w(w, c);
    let cd = delta.cos();
    if !(delta.abs() < TAU) || cd > -phi.cos() + 1e-12 {
        return Err(Error::Domain(format!("Δζ = {delta} outside the extremal arc")));
    }
    Ok((1.0 + w - (1.0 - w) * c) * delta.tan().abs() / (4.0 * (1.0 + w)))
}

/// Maximum of [`extremal_initial_coherence`] over the arc:
/// `√((1 − W)|c|/(1 + W)) / 2`.
pub fn extremal_initial_coherence_max(ctx: &ThermalContext, theta0: f64) -> f64 {
    let w = ctx.boltzmann();
    0.5 * ((1.0 - w) * theta0.cos().abs() / (1.0 + w)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionPoint {
    pub delta_zeta: f64,
    /// 𝔙.
    pub velocity: f64,
    /// 𝔙 / η_{−1,0}.
    pub v_over_eta: f64,
}

/// 𝔙 along `sin ϑ₁ = Q sin ϑ₂` (with the larger sine equal to 1) at
/// `Δζ = ±π ± ε` for each ε, and at `Δζ = ±π`, in increasing Δζ.
pub fn transition_scan(
    ctx: &ThermalContext,
    theta0: f64,
    j: &SpectralDensity,
    eps: &[f64],
) -> Result<Vec<TransitionPoint>> {
    let eta = eta(j, ctx, -1, true)?;
    let q = q_critical_w(ctx.boltzmann(), theta0.cos());
    let v = (1.0 / q).min(1.0);
    let u = q * v;
    let mut deltas = Vec::with_capacity(4 * eps.len() + 2);
    for base in [-PI, PI] {
        deltas.push(base);
        for &e in eps {
            for d in [base - e, base + e] {
                if d.abs() < TAU {
                    deltas.push(d);
                }
            }
        }
    }
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    Ok(deltas
        .into_iter()
        .map(|d| {
            let r = SchemeCoefficients::from_sines(ctx, theta0, u, v, d, 0.0).normalized_velocity();
            TransitionPoint {
                delta_zeta: d,
                velocity: r * eta,
                v_over_eta: r,
            }
        })
        .collect())
}
