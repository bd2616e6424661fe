//! Run configuration, read from a JSON file or built by a figure preset.
//!
//! All times in the record are in units of `1/ω_s`. The thermal context is
//! given either in ratio form (`omega0_over_T`, `omega_s_over_T`) or in
//! absolute form (`temperature`, `omega0`, `unit`), never both.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use dephaselab_core::oracle::GridSpec;
use dephaselab_core::scheme::{q_critical, Branch, MeasurementScheme, SchemeClass};
use dephaselab_core::shorttime::build_extremal_scheme;
use dephaselab_core::spectral::{Mode, SpectralDensity, ThermalContext};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralRecord>,
    pub context: ContextRecord,
    pub scheme: SchemeRecord,
    /// Variants of `scheme`; each curve overrides the fields it sets.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<Curve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralKind {
    OhmicLike,
    Discrete,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralRecord {
    #[serde(rename = "type")]
    pub kind: SpectralKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_s: Option<f64>,
    /// Defaults to `omega_s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_g: Option<f64>,
    #[serde(default, rename = "omega_M", skip_serializing_if = "Option::is_none")]
    pub omega_m: Option<f64>,
    /// `[weight, ω]` pairs; the weight multiplies `δ(ω − ω_k)` in `J`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<[f64; 2]>,
    /// `[ω, J(ω)]` samples.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<[f64; 2]>,
}

impl SpectralRecord {
    pub fn ohmic(alpha: f64, omega_s: f64) -> Self {
        SpectralRecord {
            kind: SpectralKind::OhmicLike,
            alpha: Some(alpha),
            omega_s: Some(omega_s),
            amplitude: None,
            omega_g: None,
            omega_m: None,
            modes: vec![],
            samples: vec![],
        }
    }

    pub fn build(&self) -> CliResult<SpectralDensity> {
        let mut j = match self.kind {
            SpectralKind::OhmicLike => {
                let alpha = self.alpha.ok_or_else(|| CliError::config("ohmic_like needs alpha"))?;
                let ws = self.omega_s.unwrap_or(1.0);
                SpectralDensity::ohmic_like(alpha, ws, self.amplitude.unwrap_or(ws))?
            }
            SpectralKind::Discrete => {
                if self.modes.is_empty() {
                    return Err(CliError::config("discrete spectrum needs modes"));
                }
                let modes = self
                    .modes
                    .iter()
                    .map(|&[weight, frequency]| Mode { weight, frequency })
                    .collect();
                let j = SpectralDensity::discrete(modes)?;
                match self.omega_s {
                    Some(ws) => j.with_scale(ws)?,
                    None => j,
                }
            }
            SpectralKind::Tabulated => {
                let ws = self
                    .omega_s
                    .ok_or_else(|| CliError::config("tabulated spectrum needs omega_s"))?;
                SpectralDensity::tabulated(self.samples.iter().map(|&[w, v]| (w, v)).collect(), ws)?
            }
        };
        if let Some(g) = self.omega_g {
            j = j.with_gap(g)?;
        }
        if let Some(m) = self.omega_m {
            j = j.with_cutoff(m)?;
        }
        Ok(j)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextRecord {
    #[serde(default, rename = "omega0_over_T", alias = "omega0_over_t", skip_serializing_if = "Option::is_none")]
    pub omega0_over_t: Option<f64>,
    /// Defaults to 1 in ratio form.
    #[serde(default, rename = "omega_s_over_T", alias = "omega_s_over_t", skip_serializing_if = "Option::is_none")]
    pub omega_s_over_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl ContextRecord {
    pub fn ratio(omega0_over_t: f64, omega_s_over_t: Option<f64>) -> Self {
        ContextRecord {
            omega0_over_t: Some(omega0_over_t),
            omega_s_over_t,
            ..Default::default()
        }
    }

    fn is_ratio(&self) -> CliResult<bool> {
        let ratio = self.omega0_over_t.is_some() || self.omega_s_over_t.is_some();
        let absolute = self.temperature.is_some() || self.omega0.is_some() || self.unit.is_some();
        match (ratio, absolute) {
            (true, false) => Ok(true),
            (false, true) => Ok(false),
            _ => Err(CliError::config(
                "context needs exactly one of the ratio form (omega0_over_T, omega_s_over_T) \
                 or the absolute form (temperature, omega0, unit)",
            )),
        }
    }

    /// Thermal context for a density with scale `omega_s`, optionally with
    /// `ω₀/T` replaced by `x`.
    pub fn build(&self, omega_s: f64, x: Option<f64>) -> CliResult<ThermalContext> {
        if self.is_ratio()? {
            let x = x
                .or(self.omega0_over_t)
                .ok_or_else(|| CliError::config("ratio form needs omega0_over_T"))?;
            let r = self.omega_s_over_t.unwrap_or(1.0);
            if !(r > 0.0) || !r.is_finite() {
                return Err(CliError::config(format!("omega_s_over_T = {r}")));
            }
            Ok(ThermalContext::from_ratio(x, omega_s / r)?)
        } else {
            let t = self.temperature.ok_or_else(|| CliError::config("absolute form needs temperature"))?;
            let w0 = self.omega0.ok_or_else(|| CliError::config("absolute form needs omega0"))?;
            if self.unit.as_deref().is_none_or(str::is_empty) {
                return Err(CliError::config("absolute form needs a frequency unit"));
            }
            match x {
                Some(x) => Ok(ThermalContext::from_ratio(x, t)?),
                None => Ok(ThermalContext::new(t, w0)?),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    S0,
    SM,
    SMV,
    SmV,
    SMVprime,
    SmVprime,
}

impl Family {
    fn velocity_class(self) -> Option<SchemeClass> {
        match self {
            Family::SMV => Some(SchemeClass::SMVMaxVelocity),
            Family::SmV => Some(SchemeClass::SmVMinVelocity),
            Family::SMVprime => Some(SchemeClass::SMVprime),
            Family::SmVprime => Some(SchemeClass::SmVprime),
            Family::S0 | Family::SM => None,
        }
    }
}

/// Marker for the critical ratio, written `"Q"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Critical {
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QValue {
    Value(f64),
    Critical(Critical),
}

/// A measurement scheme by its angles, by `q` plus one polar angle, or by
/// family name. Unset fields are inherited when records are merged.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_zeta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<QValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
}

fn branch_angle(branch: Branch, sine: f64) -> f64 {
    let a = sine.clamp(0.0, 1.0).asin();
    match branch {
        Branch::Acute => a,
        Branch::Obtuse => PI - a,
    }
}

impl SchemeRecord {
    pub fn merged(&self, over: &SchemeRecord) -> SchemeRecord {
        SchemeRecord {
            family: over.family.or(self.family),
            theta0: over.theta0.or(self.theta0),
            theta1: over.theta1.or(self.theta1),
            theta2: over.theta2.or(self.theta2),
            delta_zeta: over.delta_zeta.or(self.delta_zeta),
            zeta0: over.zeta0.or(self.zeta0),
            q: over.q.or(self.q),
            branch: over.branch.or(self.branch),
        }
    }

    pub fn resolve(&self, ctx: &ThermalContext) -> CliResult<MeasurementScheme> {
        let theta0 = self.theta0.ok_or_else(|| CliError::config("scheme needs theta0"))?;
        let branch = self.branch.unwrap_or(Branch::Acute);
        let q_value = |q: QValue| match q {
            QValue::Value(v) => v,
            QValue::Critical(Critical::Q) => q_critical(ctx, theta0),
        };
        let mut s = if let Some(family) = self.family {
            if self.theta1.is_some() || self.theta2.is_some() || self.q.is_some() {
                return Err(CliError::config("a scheme family fixes theta1, theta2 and q"));
            }
            match family {
                Family::SM => {
                    if self.delta_zeta.is_some_and(|d| d != 0.0) {
                        return Err(CliError::config("SM requires delta_zeta = 0"));
                    }
                    MeasurementScheme::from_delta(theta0, FRAC_PI_2, FRAC_PI_2, 0.0)?
                }
                Family::S0 => {
                    let delta = self.delta_zeta.unwrap_or(PI);
                    if delta.abs() != PI {
                        return Err(CliError::config("S0 requires delta_zeta = ±π"));
                    }
                    let q = q_critical(ctx, theta0);
                    let v = (1.0 / q).min(1.0);
                    let t1 = branch_angle(branch, q * v);
                    let t2 = branch_angle(branch, v);
                    MeasurementScheme::from_delta(theta0, t1, t2, delta)?
                }
                _ => {
                    let class = family.velocity_class().expect("velocity family");
                    build_extremal_scheme(class, ctx, theta0, self.delta_zeta, branch)?
                }
            }
        } else {
            let delta = self.delta_zeta.ok_or_else(|| CliError::config("scheme needs delta_zeta"))?;
            match (self.q, self.theta1, self.theta2) {
                (Some(q), None, Some(t2)) => MeasurementScheme::from_q(theta0, q_value(q), t2, branch, delta)?,
                (Some(q), Some(t1), None) => MeasurementScheme::from_q_theta1(theta0, q_value(q), t1, branch, delta)?,
                (None, Some(t1), Some(t2)) => MeasurementScheme::from_delta(theta0, t1, t2, delta)?,
                _ => {
                    return Err(CliError::config(
                        "scheme needs theta1 and theta2, or q with exactly one of them, or a family",
                    ))
                }
            }
        };
        if let Some(z0) = self.zeta0 {
            s = MeasurementScheme::new(s.theta0, z0, s.theta1, s.zeta1, s.theta2, s.zeta2)?;
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curve {
    pub label: String,
    #[serde(default)]
    pub scheme: SchemeRecord,
}

/// Sampling times in units of `1/ω_s`: explicit `values`, or `points`
/// equally spaced values from 0 to `t_max`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl TimeRecord {
    pub fn linear(t_max: f64, points: usize) -> Self {
        TimeRecord {
            values: None,
            t_max: Some(t_max),
            points: Some(points),
        }
    }

    /// Dimensionless times `ω_s t`.
    pub fn scaled(&self) -> CliResult<Vec<f64>> {
        let v = match (&self.values, self.t_max) {
            (Some(v), None) if self.points.is_none() => v.clone(),
            (None, Some(t_max)) => {
                let n = self.points.unwrap_or(101);
                if n < 2 || !(t_max > 0.0) || !t_max.is_finite() {
                    return Err(CliError::config(format!("time grid t_max = {t_max}, points = {n}")));
                }
                (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
            }
            _ => return Err(CliError::config("time needs either values or t_max (with points)")),
        };
        if v.first() != Some(&0.0) {
            return Err(CliError::config("time grid must start at 0"));
        }
        if v.windows(2).any(|w| !(w[1] > w[0])) || v.iter().any(|t| !t.is_finite()) {
            return Err(CliError::config("time grid must be strictly increasing"));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Theta0,
    Theta1,
    Theta2,
    DeltaZeta,
    #[serde(rename = "omega0_over_T", alias = "omega0_over_t")]
    Omega0OverT,
    Q,
}

impl Axis {
    pub fn column(self) -> &'static str {
        match self {
            Axis::Theta0 => "theta0",
            Axis::Theta1 => "theta1",
            Axis::Theta2 => "theta2",
            Axis::DeltaZeta => "delta_zeta",
            Axis::Omega0OverT => "omega0_over_T",
            Axis::Q => "q",
        }
    }
}

/// One sweep axis: explicit `values`, or `points` nodes spanning
/// `[min, max]` with either end optionally excluded. With both ends open the
/// nodes are `min + (i + 1)(max − min)/(points + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub axis: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub open_min: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub open_max: bool,
}

impl SweepAxis {
    pub fn range(axis: Axis, min: f64, max: f64, points: usize, open_min: bool, open_max: bool) -> Self {
        SweepAxis {
            axis,
            values: None,
            min: Some(min),
            max: Some(max),
            points: Some(points),
            open_min,
            open_max,
        }
    }

    pub fn nodes(&self) -> CliResult<Vec<f64>> {
        if let Some(v) = &self.values {
            if v.is_empty() || self.min.is_some() || self.max.is_some() {
                return Err(CliError::config(format!("{:?}: values exclude min/max", self.axis)));
            }
            return Ok(v.clone());
        }
        let (Some(a), Some(b)) = (self.min, self.max) else {
            return Err(CliError::config(format!("{:?}: need values or min and max", self.axis)));
        };
        let n = self.points.unwrap_or(33);
        if n == 0 || !(b >= a) {
            return Err(CliError::config(format!("{:?}: empty range", self.axis)));
        }
        if n == 1 {
            if self.open_min || self.open_max {
                return Ok(vec![(a + b) / 2.0]);
            }
            return Ok(vec![a]);
        }
        let intervals = (n - 1 + usize::from(self.open_min) + usize::from(self.open_max)) as f64;
        let first = usize::from(self.open_min);
        Ok((0..n)
            .map(|i| {
                let k = i + first;
                if k as f64 == intervals {
                    b
                } else {
                    a + (b - a) * k as f64 / intervals
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinements: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shrink: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclusion_tol: Option<f64>,
}

impl SearchRecord {
    pub fn spec(&self) -> GridSpec {
        let mut g = GridSpec::default();
        if let Some([a, b, c]) = self.grid {
            g.n_u = a;
            g.n_v = b;
            g.n_delta = c;
        }
        if let Some(r) = self.refinements {
            g.refinements = r;
        }
        if let Some(s) = self.shrink {
            g.shrink = s;
        }
        if let Some(e) = self.exclusion_tol {
            g.exclusion_tol = e;
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleRecord {
    pub n_max: usize,
    /// Double `n_max` until the trajectory changes by less than
    /// `convergence_tol`.
    #[serde(default)]
    pub converge: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension_cap: Option<usize>,
}

/// Axis values applied on top of a base scheme and context.
#[derive(Debug, Clone, Copy, Default)]
pub struct Point {
    pub scheme: SchemeRecord,
    pub x: Option<f64>,
}

impl Point {
    pub fn set(&mut self, axis: Axis, v: f64) {
        match axis {
            Axis::Theta0 => self.scheme.theta0 = Some(v),
            Axis::Theta1 => self.scheme.theta1 = Some(v),
            Axis::Theta2 => self.scheme.theta2 = Some(v),
            Axis::DeltaZeta => self.scheme.delta_zeta = Some(v),
            Axis::Omega0OverT => self.x = Some(v),
            Axis::Q => self.scheme.q = Some(QValue::Value(v)),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn density(&self) -> CliResult<SpectralDensity> {
        self.spectral
            .as_ref()
            .ok_or_else(|| CliError::config("this command needs a spectral record"))?
            .build()
    }

    /// Density if one is configured; otherwise `None`.
    pub fn density_opt(&self) -> CliResult<Option<SpectralDensity>> {
        self.spectral.as_ref().map(SpectralRecord::build).transpose()
    }

    /// Frequency scale used to turn ratios into absolute values.
    pub fn omega_s(&self) -> CliResult<f64> {
        Ok(self.density_opt()?.map_or(1.0, |j| j.omega_s()))
    }

    pub fn context(&self, x: Option<f64>) -> CliResult<ThermalContext> {
        self.context.build(self.omega_s()?, x)
    }

    /// `(label, scheme record)` for every curve, or the base scheme alone.
    pub fn curve_records(&self) -> Vec<(String, SchemeRecord)> {
        if self.curves.is_empty() {
            vec![("main".to_string(), self.scheme)]
        } else {
            self.curves
                .iter()
                .map(|c| (c.label.clone(), self.scheme.merged(&c.scheme)))
                .collect()
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        self.context.is_ratio()?;
        for c in &self.curves {
            if c.label.is_empty() || c.label.contains([',', '"', '\n', '\r']) {
                return Err(CliError::config(format!("curve label {:?}", c.label)));
            }
        }
        if let Some(t) = &self.time {
            t.scaled()?;
        }
        for s in &self.sweep {
            s.nodes()?;
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(CliError::config(format!("tol = {tol}")));
            }
        }
        Ok(())
    }
}
