//! Nonselective preparation measurements, their N-constants and the initial
//! postmeasurement coherence.
//!
//! The measurement maps `|n₀⟩ → |n₁⟩` and `|−n₀⟩ → |n₂⟩`, each unit vector
//! given by a polar angle ϑ and an azimuth ζ. Only ϑ₀, ϑ₁, ϑ₂ and
//! `Δζ = ζ₁ − ζ₂` enter any result; ζ₀ is carried along but inert.
//!
//! # Normalization of the N-constants
//!
//! The N-constants grow like `e^{ω₀/T}` at low temperature. They are stored
//! divided by `4 cosh²(ω₀/2T)`, which keeps them bounded for every `x`.
//! The ratios `a₁, a₂, a₃` are unaffected; multiply by
//! [`SchemeCoefficients::normalization`] to recover the unscaled values.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::ThermalContext;

/// Below this value of the normalized `N₀` a scheme is treated as having
/// vanishing initial coherence (`|ρ₀₁(0)| ≲ 5·10⁻¹⁴`).
pub const DEGENERATE_N0: f64 = 1e-26;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementScheme {
    pub theta0: f64,
    pub zeta0: f64,
    pub theta1: f64,
    pub zeta1: f64,
    pub theta2: f64,
    pub zeta2: f64,
}

/// Which solution of `sin ϑ = s` to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Acute,
    Obtuse,
}

impl Branch {
    fn angle(self, sine: f64) -> f64 {
        let a = sine.clamp(0.0, 1.0).asin();
        match self {
            Branch::Acute => a,
            Branch::Obtuse => PI - a,
        }
    }
}

fn check_polar(name: &str, v: f64) -> Result<()> {
    if (0.0..=PI).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} outside [0, π]")))
    }
}

fn check_azimuth(name: &str, v: f64) -> Result<()> {
    if (0.0..TAU).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 2π)")))
    }
}

impl MeasurementScheme {
    pub fn new(theta0: f64, zeta0: f64, theta1: f64, zeta1: f64, theta2: f64, zeta2: f64) -> Result<Self> {
        check_polar("theta0", theta0)?;
        check_polar("theta1", theta1)?;
        check_polar("theta2", theta2)?;
        check_azimuth("zeta0", zeta0)?;
        check_azimuth("zeta1", zeta1)?;
        check_azimuth("zeta2", zeta2)?;
        Ok(MeasurementScheme {
            theta0,
            zeta0,
            theta1,
            zeta1,
            theta2,
            zeta2,
        })
    }

    /// Scheme with `ζ₀ = 0` and azimuths chosen so that `ζ₁ − ζ₂ = Δζ`.
    pub fn from_delta(theta0: f64, theta1: f64, theta2: f64, delta: f64) -> Result<Self> {
        if !(delta.abs() < TAU) {
            return Err(Error::InvalidParameter(format!("Δζ = {delta} outside (−2π, 2π)")));
        }
        let (z1, z2) = if delta >= 0.0 { (delta, 0.0) } else { (0.0, -delta) };
        Self::new(theta0, 0.0, theta1, z1, theta2, z2)
    }

    /// Scheme with `sin ϑ₁ = q sin ϑ₂`.
    pub fn from_q(theta0: f64, q: f64, theta2: f64, branch: Branch, delta: f64) -> Result<Self> {
        check_polar("theta2", theta2)?;
        let s = q * theta2.sin();
        if !(q >= 0.0) || s > 1.0 + 1e-15 {
            return Err(Error::Domain(format!("q·sin ϑ₂ = {s} is not a sine")));
        }
        Self::from_delta(theta0, branch.angle(s), theta2, delta)
    }

    /// Scheme with `sin ϑ₂ = sin ϑ₁ / q`.
    pub fn from_q_theta1(theta0: f64, q: f64, theta1: f64, branch: Branch, delta: f64) -> Result<Self> {
        check_polar("theta1", theta1)?;
        if !(q > 0.0) {
            return Err(Error::Domain(format!("q = {q}")));
        }
        let s = theta1.sin() / q;
        if s > 1.0 + 1e-15 {
            return Err(Error::Domain(format!("sin ϑ₁/q = {s} is not a sine")));
        }
        Self::from_delta(theta0, theta1, branch.angle(s), delta)
    }

    pub fn delta_zeta(&self) -> f64 {
        self.zeta1 - self.zeta2
    }

    /// `q = sin ϑ₁ / sin ϑ₂`: `+∞` when only the denominator vanishes,
    /// `None` when both do.
    pub fn q(&self) -> Option<f64> {
        let (u, v) = (self.theta1.sin(), self.theta2.sin());
        if v > 0.0 {
            Some(u / v)
        } else if u > 0.0 {
            Some(f64::INFINITY)
        } else {
            None
        }
    }

    /// Bloch vector of `|n̂_j⟩`, `j ∈ {0, 1, 2}`.
    pub fn ket(&self, j: usize) -> [Complex64; 2] {
        let (theta, zeta) = match j {
            0 => (self.theta0, self.zeta0),
            1 => (self.theta1, self.zeta1),
            _ => (self.theta2, self.zeta2),
        };
        ket(theta, zeta)
    }
}

/// `|n̂⟩` in the basis `(|0⟩, |1⟩)`.
pub fn ket(theta: f64, zeta: f64) -> [Complex64; 2] {
    [
        Complex64::from_polar((theta / 2.0).sin(), zeta / 2.0),
        Complex64::from_polar((theta / 2.0).cos(), -zeta / 2.0),
    ]
}

/// Critical ratio `Q(ω₀/T, ϑ₀)`.
pub fn q_critical(ctx: &ThermalContext, theta0: f64) -> f64 {
    q_critical_w(ctx.boltzmann(), theta0.cos())
}

pub(crate) fn q_critical_w(w: f64, c: f64) -> f64 {
    let a = 1.0 + w;
    let b = (1.0 - w) * c;
    (a + b) / (a - b)
}

/// `Q̂ = max(Q, 1/Q)`, the form entering the velocity extrema.
pub(crate) fn q_hat_w(w: f64, c: f64) -> f64 {
    let a = 1.0 + w;
    let b = (1.0 - w) * c.abs();
    (a + b) / (a - b)
}

/// Thermal weights of a preparation: `(α̃₂, β̃₂, α̃₁, β̃₁)`.
fn weights(w: f64, theta0: f64) -> (f64, f64, f64, f64) {
    let s = (theta0 / 2.0).sin().powi(2);
    let c = (theta0 / 2.0).cos().powi(2);
    let n = 1.0 + w;
    ((s + w * c) / n, (c + w * s) / n, (s - w * c) / n, (c - w * s) / n)
}

/// N-constants (normalized, see the module docs), `A₀` and `ρ₀₁(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeCoefficients {
    pub n0: f64,
    pub n1: f64,
    pub n2: f64,
    pub a0: f64,
    #[serde(with = "complex_serde")]
    pub rho0: Complex64,
    /// `ω₀/T`.
    pub x: f64,
    // Amplitudes of ρ₀₁(t) = e^{iω₀t−Ξ}(p cos υ + i r sin υ).
    #[serde(skip)]
    p: Complex64,
    #[serde(skip)]
    r: Complex64,
}

mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

impl SchemeCoefficients {
    /// Coefficients from `u = sin ϑ₁`, `v = sin ϑ₂` and `Δζ`; `ζ₁` only
    /// sets the global phase of `ρ₀₁(0)`.
    pub fn from_sines(ctx: &ThermalContext, theta0: f64, u: f64, v: f64, delta: f64, zeta1: f64) -> Self {
        let w = ctx.boltzmann();
        let (a2, b2, a1, b1) = weights(w, theta0);
        let (sd, cd) = delta.sin_cos();
        let d = Complex64::new(cd, -sd);
        let re = u * a2 + v * b2 * cd;
        let im = v * b2 * sd;
        let n0 = re * re + im * im;
        let n1 = u * u * a1 * a2 + v * v * b1 * b2 + u * v * cd * (a1 * b2 + b1 * a2);
        let n2 = 2.0 * theta0.cos() * sd * u * v * w / (1.0 + w).powi(2);
        let phase = Complex64::from_polar(0.5, zeta1);
        let p = phase * (u * a2 + d * (v * b2));
        let r = phase * (u * a1 + d * (v * b1));
        SchemeCoefficients {
            n0,
            n1,
            n2,
            a0: a2 * a2,
            rho0: p,
            x: ctx.ratio(),
            p,
            r,
        }
    }

    /// `4 cosh²(x/2)`, the factor removed from the N-constants.
    pub fn normalization(&self) -> f64 {
        4.0 * (self.x / 2.0).cosh().powi(2)
    }

    pub fn is_degenerate(&self) -> bool {
        self.n0 <= DEGENERATE_N0
    }

    /// `(a₁, a₂, a₃)`.
    pub fn a_coefficients(&self) -> Result<(f64, f64, f64)> {
        if self.is_degenerate() {
            return Err(Error::DegenerateScheme);
        }
        let a1 = self.n1 / self.n0;
        let a2 = self.n2 / self.n0;
        Ok((a1, a2, a1 * a1 + a2 * a2 - 1.0))
    }

    /// `1 + a₂ sin 2y + a₃ sin² y`.
    pub fn radicand(&self, y: f64) -> Result<f64> {
        let (_, a2, a3) = self.a_coefficients()?;
        Ok(1.0 + a2 * (2.0 * y).sin() + a3 * y.sin().powi(2))
    }

    /// `|ρ₀₁(0)|`.
    pub fn magnitude(&self) -> f64 {
        0.5 * self.n0.sqrt()
    }

    /// `𝔘 = 𝔙/η_{−1,0} = |ρ₀₁(0)| a₂`, zero for degenerate schemes.
    pub fn normalized_velocity(&self) -> f64 {
        if self.is_degenerate() {
            0.0
        } else {
            self.n2 / (2.0 * self.n0.sqrt())
        }
    }

    /// `ρ₀₁(0)·[cos υ + (a₂ + i a₁) sin υ]`, written in a form that stays
    /// finite and continuous through `N₀ = 0`.
    pub fn evolution_amplitude(&self, upsilon: f64) -> Complex64 {
        let (s, c) = upsilon.sin_cos();
        self.p * c + Complex64::i() * self.r * s
    }
}

/// N-constants and initial coherence of a scheme.
pub fn n_constants(s: &MeasurementScheme, ctx: &ThermalContext) -> SchemeCoefficients {
    SchemeCoefficients::from_sines(
        ctx,
        s.theta0,
        s.theta1.sin(),
        s.theta2.sin(),
        s.delta_zeta(),
        s.zeta1,
    )
}

/// `ρ₀₁(0)`.
pub fn initial_coherence(s: &MeasurementScheme, ctx: &ThermalContext) -> Complex64 {
    n_constants(s, ctx).rho0
}

/// `|ρ₀₁(0)|` in the limit `T ≪ ω₀`.
pub fn low_temperature_coherence(s: &MeasurementScheme) -> f64 {
    let sh = (s.theta0 / 2.0).sin().powi(2);
    let ch = (s.theta0 / 2.0).cos().powi(2);
    let (u, v) = (s.theta1.sin(), s.theta2.sin());
    let r = sh * sh * u * u + ch * ch * v * v + 0.5 * s.theta0.sin().powi(2) * u * v * s.delta_zeta().cos();
    0.5 * r.max(0.0).sqrt()
}

/// `|ρ₀₁(0)|` in the limit `T ≫ ω₀`.
pub fn high_temperature_coherence(s: &MeasurementScheme) -> f64 {
    let (u, v) = (s.theta1.sin(), s.theta2.sin());
    let r = u * u + v * v + 2.0 * u * v * s.delta_zeta().cos();
    0.25 * r.max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeClass {
    S0FullDecoherence,
    SMMaxCoherence,
    SMprimeLowT,
    SdDecreasing,
    SiIncreasing,
    SMVMaxVelocity,
    SmVMinVelocity,
    SMVprime,
    SmVprime,
    ZeroInitialCoherence,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: SchemeClass,
    pub tol: f64,
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn near_pm(a: f64, b: f64, tol: f64) -> bool {
    near(a, b, tol) || near(a, -b, tol)
}

/// Assign a scheme to one of the special families.
///
/// Families overlap; they are tested in the order
/// S0 > SM > SMV′/SmV′ > SMV/SmV > SM′ > Sd/Si > zero coherence > generic,
/// with tolerance `tol` on angles and on `|q − Q|`. Half-open conditions on
/// ϑ₀ (`ϑ₀ < π/2`, `ϑ₀ > π/2`) require a margin of `tol` from π/2.
pub fn classify(s: &MeasurementScheme, ctx: &ThermalContext, tol: f64) -> Classification {
    let class = classify_inner(s, ctx, tol);
    Classification { class, tol }
}

fn classify_inner(s: &MeasurementScheme, ctx: &ThermalContext, tol: f64) -> SchemeClass {
    let w = ctx.boltzmann();
    let c = s.theta0.cos();
    let delta = s.delta_zeta();
    let (u, v) = (s.theta1.sin(), s.theta2.sin());
    let q_crit = q_critical_w(w, c);
    let right1 = near(s.theta1, FRAC_PI_2, tol);
    let right2 = near(s.theta2, FRAC_PI_2, tol);
    let below = s.theta0 < FRAC_PI_2 - tol;
    let above = s.theta0 > FRAC_PI_2 + tol;

    if v > tol {
        if let Some(q) = s.q() {
            if near(q, q_crit, tol) && near_pm(delta, PI, tol) {
                return SchemeClass::S0FullDecoherence;
            }
        }
    }
    if right1 && right2 && near(delta, 0.0, tol) {
        return SchemeClass::SMMaxCoherence;
    }
    if below || above {
        let q_hat = q_hat_w(w, c);
        let phi = (1.0 / q_hat).acos();
        let increasing = |d: f64| c * d.sin() > 0.0;
        if right1 && right2 {
            for base in [PI, -PI] {
                for d in [base - phi, base + phi] {
                    if near(delta, d, tol) && phi > tol {
                        return if increasing(d) {
                            SchemeClass::SMVprime
                        } else {
                            SchemeClass::SmVprime
                        };
                    }
                }
            }
        }
        let cd = delta.cos();
        let in_arc = cd < 0.0 && -cd >= phi.cos() - tol && !near_pm(delta, PI, tol);
        if in_arc {
            let psi = (1.0 / (q_hat * -cd)).min(1.0).asin();
            let (fixed, free) = if below { (right1, s.theta2) } else { (right2, s.theta1) };
            if fixed && (near(free, psi, tol) || near(free, PI - psi, tol)) {
                return if c * delta.sin() > 0.0 {
                    SchemeClass::SMVMaxVelocity
                } else {
                    SchemeClass::SmVMinVelocity
                };
            }
        }
    }
    let zero0 = near(s.theta0, 0.0, tol);
    let pi0 = near(s.theta0, PI, tol);
    if ((zero0 || pi0) && right1 && right2) || (zero0 && right2) || (pi0 && right1) {
        return SchemeClass::SMprimeLowT;
    }
    if u > tol && v > tol && (below || above) && !near(delta, 0.0, tol) && !near_pm(delta, PI, tol) {
        return if c * delta.sin() < 0.0 {
            SchemeClass::SdDecreasing
        } else {
            SchemeClass::SiIncreasing
        };
    }
    if n_constants(s, ctx).magnitude() <= tol {
        return SchemeClass::ZeroInitialCoherence;
    }
    SchemeClass::Generic
}
