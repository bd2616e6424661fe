//! Spectral densities, the thermally dressed density `J_T`, and the
//! frequency moments `η_{k,T} = ∫ ω^k J_T(ω) dω`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_half_line, QuadOptions};

/// One discrete bath mode. `weight` is the coefficient of `δ(ω - ω_k)` in
/// `J(ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub weight: f64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    /// `A ν^α e^{-ν}` with `ν = (ω - ω_g)/ω_s`.
    OhmicLike { alpha: f64, amplitude: f64 },
    DiscreteModes(Vec<Mode>),
    /// Samples `(ω, J(ω))` with strictly increasing `ω`, linearly interpolated.
    Tabulated(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    shape: Shape,
    omega_s: f64,
    gap: f64,
    cutoff: f64,
}

/// Temperature and qubit splitting, in units with ħ = k_B = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalContext {
    temperature: f64,
    omega0: f64,
}

impl ThermalContext {
    pub fn new(temperature: f64, omega0: f64) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::InvalidParameter(format!("temperature {temperature}")));
        }
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::InvalidParameter(format!("omega0 {omega0}")));
        }
        Ok(ThermalContext { temperature, omega0 })
    }

    /// Context with temperature `T` and `ω₀ = x·T`.
    pub fn from_ratio(x: f64, temperature: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::InvalidParameter(format!("omega0/T {x}")));
        }
        Self::new(temperature, x * temperature)
    }

    pub fn zero_temperature(omega0: f64) -> Result<Self> {
        Self::new(0.0, omega0)
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// `x = ω₀/T`, infinite at `T = 0`.
    pub fn ratio(&self) -> f64 {
        if self.temperature == 0.0 {
            f64::INFINITY
        } else {
            self.omega0 / self.temperature
        }
    }

    /// `e^{-ω₀/T}`, zero at `T = 0`.
    pub fn boltzmann(&self) -> f64 {
        (-self.ratio()).exp()
    }
}

/// `coth(ω/2T)`, with `T = 0` mapped to 1.
pub fn coth_half(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 1.0;
    }
    let y = omega / (2.0 * temperature);
    if y > 20.0 {
        1.0 + 2.0 * (-2.0 * y).exp()
    } else {
        1.0 / y.tanh()
    }
}

/// The stored moments `η_{k,T}` for `k = -1..=2`; `None` marks a divergent
/// integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    entries: [Option<f64>; 4],
    zero_temperature: bool,
}

impl MomentTable {
    pub fn compute(
        j: &SpectralDensity,
        ctx: &ThermalContext,
        zero_temperature: bool,
        opts: QuadOptions,
    ) -> Result<Self> {
        let mut entries = [None; 4];
        for (i, k) in (-1..=2).enumerate() {
            entries[i] = match j.moment_with(ctx, k, zero_temperature, opts) {
                Ok(v) => Some(v),
                Err(e) if e.is_divergence() => None,
                Err(e) => return Err(e),
            };
        }
        Ok(MomentTable {
            entries,
            zero_temperature,
        })
    }

    pub fn get(&self, k: i32) -> Option<f64> {
        if (-1..=2).contains(&k) {
            self.entries[(k + 1) as usize]
        } else {
            None
        }
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.zero_temperature
    }
}

impl SpectralDensity {
    /// `J(ω) = A ((ω-ω_g)/ω_s)^α exp(-(ω-ω_g)/ω_s)`, no gap and no cutoff.
    pub fn ohmic_like(alpha: f64, omega_s: f64, amplitude: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha {alpha}")));
        }
        check_scale(omega_s)?;
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidParameter(format!("amplitude {amplitude}")));
        }
        Ok(SpectralDensity {
            shape: Shape::OhmicLike { alpha, amplitude },
            omega_s,
            gap: 0.0,
            cutoff: f64::INFINITY,
        })
    }

    /// Finite set of modes. The frequency scale defaults to the largest mode
    /// frequency.
    pub fn discrete(modes: Vec<Mode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidParameter("no modes".into()));
        }
        for m in &modes {
            if !(m.frequency > 0.0) || !m.frequency.is_finite() {
                return Err(Error::InvalidParameter(format!("mode frequency {}", m.frequency)));
            }
            if !(m.weight >= 0.0) || !m.weight.is_finite() {
                return Err(Error::InvalidParameter(format!("mode weight {}", m.weight)));
            }
        }
        let omega_s = modes.iter().map(|m| m.frequency).fold(0.0, f64::max);
        Ok(SpectralDensity {
            shape: Shape::DiscreteModes(modes),
            omega_s,
            gap: 0.0,
            cutoff: f64::INFINITY,
        })
    }

    /// Sampled density with an explicit frequency scale `ω_s`.
    pub fn tabulated(samples: Vec<(f64, f64)>, omega_s: f64) -> Result<Self> {
        check_scale(omega_s)?;
        if samples.len() < 2 {
            return Err(Error::InvalidParameter("need at least two samples".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParameter("sample frequencies must increase".into()));
            }
        }
        for &(w, v) in &samples {
            if !(w >= 0.0) || !w.is_finite() || !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("sample ({w}, {v})")));
            }
        }
        Ok(SpectralDensity {
            shape: Shape::Tabulated(samples),
            omega_s,
            gap: 0.0,
            cutoff: f64::INFINITY,
        })
    }

    /// Shift the support to start at `gap`. For `OhmicLike` the whole profile
    /// moves with it; tabulated samples and discrete modes are clipped.
    pub fn with_gap(mut self, gap: f64) -> Result<Self> {
        if !(gap >= 0.0) || !gap.is_finite() || gap >= self.cutoff {
            return Err(Error::InvalidParameter(format!("gap {gap}")));
        }
        self.gap = gap;
        Ok(self)
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Result<Self> {
        if !(cutoff > self.gap) {
            return Err(Error::InvalidParameter(format!("cutoff {cutoff}")));
        }
        self.cutoff = cutoff;
        Ok(self)
    }

    pub fn with_scale(mut self, omega_s: f64) -> Result<Self> {
        check_scale(omega_s)?;
        self.omega_s = omega_s;
        Ok(self)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn omega_s(&self) -> f64 {
        self.omega_s
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.shape, Shape::DiscreteModes(_))
    }

    /// `J(ω)`.
    pub fn evaluate(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::InvalidParameter(format!("frequency {omega}")));
        }
        match &self.shape {
            Shape::DiscreteModes(_) => Err(Error::UnsupportedVariant("discrete modes")),
            _ if omega < self.gap || omega > self.cutoff => Ok(0.0),
            Shape::OhmicLike { alpha, amplitude } => {
                let nu = (omega - self.gap) / self.omega_s;
                Ok(amplitude * nu.powf(*alpha) * (-nu).exp())
            }
            Shape::Tabulated(samples) => interpolate(samples, omega),
        }
    }

    /// `J_T(ω) = J(ω) coth(ω/2T)`.
    pub fn effective_density(&self, ctx: &ThermalContext, omega: f64) -> Result<f64> {
        let j = self.evaluate(omega)?;
        if omega == 0.0 {
            if j == 0.0 {
                return Ok(0.0);
            }
            if ctx.temperature() > 0.0 {
                return Err(Error::Singular);
            }
            return Ok(j);
        }
        Ok(j * coth_half(omega, ctx.temperature()))
    }

    /// `Ω(ν) = J(ω_g + ω_s ν)/ω_s`.
    pub fn scale_function(&self, nu: f64) -> Result<f64> {
        if self.is_discrete() {
            return Err(Error::UnsupportedVariant("discrete modes"));
        }
        Ok(self.evaluate(self.gap + self.omega_s * nu)? / self.omega_s)
    }

    /// `η_{k,T}` at the default tolerance.
    pub fn moment(&self, ctx: &ThermalContext, k: i32, zero_temperature: bool) -> Result<f64> {
        self.moment_with(ctx, k, zero_temperature, QuadOptions::MOMENTS)
    }

    pub fn moment_with(
        &self,
        ctx: &ThermalContext,
        k: i32,
        zero_temperature: bool,
        opts: QuadOptions,
    ) -> Result<f64> {
        if !(-1..=2).contains(&k) {
            return Err(Error::InvalidParameter(format!("moment order {k}")));
        }
        let t = if zero_temperature { 0.0 } else { ctx.temperature() };
        let inner = if t > 0.0 { self.omega_s.min(t) } else { self.omega_s };
        self.integrate_effective(t, |w| w.powi(k), inner, opts)
    }

    /// `∫ J(ω) coth(ω/2T) f(ω) dω` over the support, `T = 0` meaning
    /// `coth ≡ 1`. Discrete modes give exact sums.
    ///
    /// `inner_scale` is the smallest frequency scale the integrand resolves;
    /// it only steers where the quadrature panels start.
    pub fn integrate_effective<F: Fn(f64) -> f64>(
        &self,
        temperature: f64,
        f: F,
        inner_scale: f64,
        opts: QuadOptions,
    ) -> Result<f64> {
        match &self.shape {
            Shape::DiscreteModes(modes) => Ok(modes
                .iter()
                .filter(|m| m.frequency >= self.gap && m.frequency <= self.cutoff)
                .map(|m| m.weight * coth_half(m.frequency, temperature) * f(m.frequency))
                .sum()),
            Shape::OhmicLike { alpha, amplitude } => {
                let (alpha, amplitude) = (*alpha, *amplitude);
                let (gap, ws) = (self.gap, self.omega_s);
                let g = |w: f64| {
                    let nu = (w - gap) / ws;
                    let j = amplitude * nu.powf(alpha) * (-nu).exp();
                    if j == 0.0 {
                        0.0
                    } else {
                        j * coth_half(w, temperature) * f(w)
                    }
                };
                let split = gap + ws.max(temperature);
                let inner = inner_scale.min(ws).max(f64::MIN_POSITIVE);
                let est = integrate_half_line(g, gap, self.cutoff, split, inner, opts)?;
                check_finite(est.value, gap)
            }
            Shape::Tabulated(samples) => {
                let pts = self.clipped_samples(samples)?;
                let mut total = 0.0;
                let mut prev: Option<(f64, f64)> = None;
                for (w, j) in pts {
                    let h = if j == 0.0 {
                        0.0
                    } else if w == 0.0 {
                        if temperature > 0.0 {
                            return Err(Error::Singular);
                        }
                        j * f(w)
                    } else {
                        j * coth_half(w, temperature) * f(w)
                    };
                    if let Some((w0, h0)) = prev {
                        total += 0.5 * (w - w0) * (h + h0);
                    }
                    prev = Some((w, h));
                }
                check_finite(total, self.gap)
            }
        }
    }

    fn clipped_samples(&self, samples: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
        let lo = self.gap.max(samples[0].0);
        let hi = self.cutoff.min(samples[samples.len() - 1].0);
        let mut out = Vec::with_capacity(samples.len() + 2);
        if hi <= lo {
            return Ok(out);
        }
        if !samples.iter().any(|s| s.0 == lo) {
            out.push((lo, interpolate(samples, lo)?));
        }
        out.extend(samples.iter().copied().filter(|s| s.0 >= lo && s.0 <= hi));
        if !samples.iter().any(|s| s.0 == hi) {
            out.push((hi, interpolate(samples, hi)?));
        }
        Ok(out)
    }
}

fn check_scale(omega_s: f64) -> Result<()> {
    if !(omega_s > 0.0) || !omega_s.is_finite() {
        return Err(Error::InvalidParameter(format!("omega_s {omega_s}")));
    }
    Ok(())
}

fn check_finite(v: f64, endpoint: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Divergence { endpoint })
    }
}

fn interpolate(samples: &[(f64, f64)], omega: f64) -> Result<f64> {
    let (min, max) = (samples[0].0, samples[samples.len() - 1].0);
    if omega < min || omega > max {
        return Err(Error::OutOfRange { omega, min, max });
    }
    let i = samples.partition_point(|s| s.0 <= omega);
    if i == samples.len() {
        return Ok(samples[i - 1].1);
    }
    let (w0, j0) = samples[i - 1];
    let (w1, j1) = samples[i];
    Ok(j0 + (j1 - j0) * (omega - w0) / (w1 - w0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use statrs::function::gamma::gamma;

    fn ohmic(alpha: f64) -> SpectralDensity {
        SpectralDensity::ohmic_like(alpha, 1.0, 1.0).unwrap()
    }

    #[test]
    fn caption_form_at_scale() {
        let j = SpectralDensity::ohmic_like(0.5, 2.0, 2.0).unwrap();
        assert!((j.evaluate(2.0).unwrap() - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn zero_below_gap_and_above_cutoff() {
        let j = ohmic(0.5).with_gap(0.3).unwrap().with_cutoff(4.0).unwrap();
        assert_eq!(j.evaluate(0.2).unwrap(), 0.0);
        assert_eq!(j.evaluate(4.5).unwrap(), 0.0);
        assert!(j.evaluate(1.0).unwrap() > 0.0);
    }

    #[test]
    fn discrete_is_not_pointwise() {
        let j = SpectralDensity::discrete(vec![Mode { weight: 0.1, frequency: 1.0 }]).unwrap();
        assert!(matches!(j.evaluate(1.0), Err(Error::UnsupportedVariant(_))));
        assert!(matches!(j.scale_function(1.0), Err(Error::UnsupportedVariant(_))));
    }

    #[test]
    fn tabulated_range_error() {
        let j = SpectralDensity::tabulated(vec![(0.5, 0.1), (1.0, 0.2), (2.0, 0.0)], 1.0).unwrap();
        assert!((j.evaluate(0.75).unwrap() - 0.15).abs() < 1e-15);
        assert!(matches!(j.evaluate(3.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn effective_density_limits() {
        let j = ohmic(0.5);
        let cold = ThermalContext::zero_temperature(1.0).unwrap();
        assert_eq!(j.effective_density(&cold, 0.7).unwrap(), j.evaluate(0.7).unwrap());
        let hot = ThermalContext::new(100.0, 1.0).unwrap();
        let w = 1e-3;
        let approx = j.evaluate(w).unwrap() * 2.0 * 100.0 / w;
        assert!((j.effective_density(&hot, w).unwrap() / approx - 1.0).abs() < 1e-9);
        let cool = ThermalContext::new(0.05, 1.0).unwrap();
        let w = 2.0;
        let approx = j.evaluate(w).unwrap() * (1.0 + 2.0 * (-w / 0.05f64).exp());
        assert!((j.effective_density(&cool, w).unwrap() / approx - 1.0).abs() < 1e-15);
        assert_eq!(j.effective_density(&hot, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn effective_density_singular_at_zero() {
        let j = SpectralDensity::tabulated(vec![(0.0, 0.5), (1.0, 0.2)], 1.0).unwrap();
        let hot = ThermalContext::new(1.0, 1.0).unwrap();
        assert_eq!(j.effective_density(&hot, 0.0), Err(Error::Singular));
    }

    #[test]
    fn zero_temperature_moments_match_gamma() {
        let ctx = ThermalContext::zero_temperature(1.0).unwrap();
        for &alpha in &[0.5, 1.0, 2.5, 3.0] {
            let ws = 1.7;
            let j = SpectralDensity::ohmic_like(alpha, ws, ws).unwrap();
            for k in -1..=2 {
                let expect = ws.powi(k + 2) * gamma(alpha + k as f64 + 1.0);
                let got = j.moment(&ctx, k, true).unwrap();
                assert!((got / expect - 1.0).abs() < 1e-8, "alpha {alpha} k {k}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn caption_moments() {
        let ctx = ThermalContext::zero_temperature(1.0).unwrap();
        let j = ohmic(0.5);
        let pi_sqrt = std::f64::consts::PI.sqrt();
        assert!((j.moment(&ctx, -1, true).unwrap() - pi_sqrt).abs() < 1e-9);
        assert!((j.moment(&ctx, 0, true).unwrap() - 0.5 * pi_sqrt).abs() < 1e-9);
    }

    #[test]
    fn discrete_moments_are_sums() {
        let modes = vec![
            Mode { weight: 0.3, frequency: 1.5 },
            Mode { weight: 0.2, frequency: 0.4 },
        ];
        let j = SpectralDensity::discrete(modes.clone()).unwrap();
        let ctx = ThermalContext::new(0.8, 1.0).unwrap();
        for k in -1..=2 {
            let expect: f64 = modes
                .iter()
                .map(|m| m.weight * m.frequency.powi(k) / (m.frequency / 1.6).tanh())
                .sum();
            assert!((j.moment(&ctx, k, false).unwrap() - expect).abs() <= 1e-15 * expect.abs() * 4.0);
            let single = SpectralDensity::discrete(vec![modes[0]]).unwrap();
            let cold = single.moment(&ctx, k, true).unwrap();
            assert!((cold - 0.3 * 1.5f64.powi(k)).abs() < 1e-15);
        }
    }

    // Independent route: double-exponential quadrature on (0, ∞).
    fn exp_sinh<F: Fn(f64) -> f64>(f: F) -> f64 {
        let h: f64 = 1.0 / 64.0;
        let mut sum = 0.0;
        let mut k = -6.0 / h;
        while k <= 6.0 / h {
            let s = k * h;
            let x = (std::f64::consts::FRAC_PI_2 * s.sinh()).exp();
            let dx = std::f64::consts::FRAC_PI_2 * s.cosh() * x;
            let v = f(x) * dx;
            if v.is_finite() {
                sum += v;
            }
            k += 1.0;
        }
        sum * h
    }

    #[test]
    fn thermal_moments_match_double_exponential_oracle() {
        for &(alpha, t) in &[(1.5, 0.7), (2.0, 3.0), (3.0, 10.0)] {
            let j = ohmic(alpha);
            let ctx = ThermalContext::new(t, 1.0).unwrap();
            for k in -1..=2 {
                let oracle = exp_sinh(|w| w.powi(k) * w.powf(alpha) * (-w).exp() / (w / (2.0 * t)).tanh());
                let got = j.moment(&ctx, k, false).unwrap();
                assert!((got / oracle - 1.0).abs() < 1e-9, "alpha {alpha} T {t} k {k}");
            }
        }
    }

    #[test]
    fn divergent_moment_reports_endpoint() {
        let j = ohmic(0.5);
        let ctx = ThermalContext::new(1.0, 1.0).unwrap();
        match j.moment(&ctx, -1, false) {
            Err(Error::Divergence { endpoint }) => assert_eq!(endpoint, 0.0),
            other => panic!("expected divergence, got {other:?}"),
        }
        let table = MomentTable::compute(&j, &ctx, false, QuadOptions::MOMENTS).unwrap();
        assert!(table.get(-1).is_none());
        assert!(table.get(0).unwrap() > 0.0);
    }

    #[test]
    fn doubling_subdivision_limit_is_stable() {
        let j = ohmic(0.5);
        let ctx = ThermalContext::new(0.3, 1.0).unwrap();
        for k in 0..=2 {
            let a = j.moment_with(&ctx, k, false, QuadOptions::MOMENTS).unwrap();
            let b = j
                .moment_with(&ctx, k, false, QuadOptions::MOMENTS.with_max_subdivisions(800))
                .unwrap();
            assert!((a - b).abs() <= 1e-10 * a);
        }
    }

    #[test]
    fn tabulated_trapezoid() {
        let samples: Vec<(f64, f64)> = (0..=4).map(|i| (i as f64, i as f64)).collect();
        let j = SpectralDensity::tabulated(samples, 1.0).unwrap();
        let ctx = ThermalContext::zero_temperature(1.0).unwrap();
        assert!((j.moment(&ctx, 0, true).unwrap() - 8.0).abs() < 1e-14);
        // The ω = 0 node carries J = 0 and contributes 0 although 1/ω blows up.
        assert!((j.moment(&ctx, -1, true).unwrap() - 3.5).abs() < 1e-14);
        let gapped = j.with_gap(1.0).unwrap();
        assert!((gapped.moment(&ctx, 0, true).unwrap() - 7.5).abs() < 1e-14);
    }

    #[test]
    fn scale_function_examples() {
        let j = ohmic(0.5);
        assert_eq!(j.scale_function(0.0).unwrap(), 0.0);
        assert!((j.scale_function(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let g = SpectralDensity::ohmic_like(0.5, 2.0, 2.0).unwrap().with_gap(0.5).unwrap();
        for &nu in &[0.1, 0.7, 3.0] {
            let lhs = g.scale_function(nu).unwrap() * 2.0;
            assert!((lhs - g.evaluate(0.5 + 2.0 * nu).unwrap()).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn effective_density_dominates(w in 1e-6f64..50.0, t in 1e-3f64..100.0, alpha in 0.1f64..4.0) {
            let j = ohmic(alpha);
            let ctx = ThermalContext::new(t, 1.0).unwrap();
            prop_assert!(j.effective_density(&ctx, w).unwrap() >= j.evaluate(w).unwrap());
        }

        #[test]
        fn thermal_moments_exceed_cold(t in 0.01f64..20.0, alpha in 1.2f64..3.0, k in 0i32..=2) {
            let j = ohmic(alpha);
            let ctx = ThermalContext::new(t, 1.0).unwrap();
            let hot = j.moment(&ctx, k, false).unwrap();
            let cold = j.moment(&ctx, k, true).unwrap();
            prop_assert!(hot >= cold * (1.0 - 1e-12));
        }
    }
}
