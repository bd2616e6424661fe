//! Parameter sets of the seven figures, in ratio form.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use crate::commands::Command;
use crate::config::{
    Axis, ContextRecord, Critical, Curve, Family, QValue, RunConfig, SchemeRecord, SpectralRecord, SweepAxis,
    TimeRecord,
};
use crate::error::{CliError, CliResult};

pub const FIGURES: [u8; 7] = [1, 2, 3, 4, 5, 6, 7];

/// Δζ nodes strictly inside `(−2π, 2π)`; `4k − 1` points put 0 and ±π on
/// the grid.
fn delta_axis(points: usize) -> SweepAxis {
    SweepAxis::range(Axis::DeltaZeta, -TAU, TAU, points, true, true)
}

fn curve(label: &str, scheme: SchemeRecord) -> Curve {
    Curve {
        label: label.to_string(),
        scheme,
    }
}

fn delta(d: f64) -> SchemeRecord {
    SchemeRecord {
        delta_zeta: Some(d),
        ..Default::default()
    }
}

fn base(title: &str, x: f64, scheme: SchemeRecord) -> RunConfig {
    RunConfig {
        title: Some(title.to_string()),
        spectral: None,
        context: ContextRecord::ratio(x, None),
        scheme,
        curves: vec![],
        time: None,
        sweep: vec![],
        search: None,
        oracle: None,
        tol: None,
        out: None,
    }
}

/// α = 1/2, ω_s/T = 1/10, ω₀/T = 1/100, ϑ₀ = π/8, q = Q with ϑ₁ = π/2.
fn short_time(title: &str, t_max: f64, deltas: &[(&str, f64)]) -> RunConfig {
    let scheme = SchemeRecord {
        theta0: Some(PI / 8.0),
        theta1: Some(FRAC_PI_2),
        q: Some(QValue::Critical(Critical::Q)),
        ..Default::default()
    };
    let mut cfg = base(title, 0.01, scheme);
    cfg.spectral = Some(SpectralRecord::ohmic(0.5, 1.0));
    cfg.context.omega_s_over_t = Some(0.1);
    cfg.time = Some(TimeRecord::linear(t_max, 121));
    cfg.curves = deltas.iter().map(|&(l, d)| curve(l, delta(d))).collect();
    cfg
}

/// Command and configuration of figure `n`.
pub fn preset(n: u8) -> CliResult<(Command, RunConfig)> {
    let high_t = 1e-4;
    let fig67 = SchemeRecord {
        theta0: Some(0.9 * PI),
        theta2: Some(FRAC_PI_2),
        ..Default::default()
    };
    Ok(match n {
        1 => (
            Command::Evolve,
            short_time(
                "|rho10(t)/rho10(0)| vs omega_s t, 0 <= omega_s t <= 0.6",
                0.6,
                &[("a", 3.12), ("b", 3.11), ("c", 3.09), ("d", 3.20), ("e", 3.25)],
            ),
        ),
        2 => (
            Command::Evolve,
            short_time(
                "|rho10(t)/rho10(0)| vs omega_s t, 0 <= omega_s t <= 0.005",
                0.005,
                &[
                    ("a", 3.12),
                    ("b", 3.11),
                    ("c", 3.09),
                    ("d", 3.20),
                    ("e", 3.17),
                    ("f", 3.16),
                    ("g", 3.15),
                ],
            ),
        ),
        3 => {
            let scheme = SchemeRecord {
                theta1: Some(FRAC_PI_2),
                theta2: Some(FRAC_PI_2),
                ..Default::default()
            };
            let mut cfg = base("|rho10(0)| over theta0 and delta_zeta", 1e-3, scheme);
            cfg.sweep = vec![
                SweepAxis::range(Axis::Theta0, 0.0, PI, 33, false, false),
                delta_axis(127),
            ];
            (Command::Initial, cfg)
        }
        4 => {
            let scheme = SchemeRecord {
                theta1: Some(FRAC_PI_2),
                delta_zeta: Some(FRAC_PI_4),
                ..Default::default()
            };
            let mut cfg = base("|rho10(0)| over omega0/T and theta0", 1.0, scheme);
            let theta2 = |t: f64| SchemeRecord {
                theta2: Some(t),
                ..Default::default()
            };
            cfg.curves = vec![curve("theta2=0", theta2(0.0)), curve("theta2=pi", theta2(PI))];
            cfg.sweep = vec![
                SweepAxis::range(Axis::Omega0OverT, 0.0, 10.0, 40, true, false),
                SweepAxis::range(Axis::Theta0, 0.0, PI, 33, false, false),
            ];
            (Command::Initial, cfg)
        }
        5 => {
            let scheme = SchemeRecord {
                family: Some(Family::SMVprime),
                ..Default::default()
            };
            let mut cfg = base("maximal V/eta over omega0/T and theta0", 1.0, scheme);
            cfg.sweep = vec![
                SweepAxis::range(Axis::Omega0OverT, 0.0, 5.0, 40, true, false),
                SweepAxis::range(Axis::Theta0, 0.0, FRAC_PI_2, 32, false, true),
            ];
            (Command::Velocity, cfg)
        }
        6 => {
            let mut cfg = base("V/eta over q = sin theta1 and delta_zeta", high_t, fig67);
            cfg.sweep = vec![SweepAxis::range(Axis::Q, 0.0, 1.0, 41, false, false), delta_axis(127)];
            (Command::Velocity, cfg)
        }
        7 => {
            let mut cfg = base("V/eta over delta_zeta for several q", high_t, fig67);
            let q = |v: QValue| SchemeRecord {
                q: Some(v),
                ..Default::default()
            };
            cfg.curves = vec![
                curve("a", q(QValue::Critical(Critical::Q))),
                curve("b", q(QValue::Value(0.8))),
                curve("c", q(QValue::Value(0.5))),
                curve("d", q(QValue::Value(0.1))),
            ];
            cfg.sweep = vec![delta_axis(255)];
            (Command::Velocity, cfg)
        }
        _ => return Err(CliError::config(format!("no figure {n}; presets are 1–7"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_serialize() {
        for n in FIGURES {
            let (_, cfg) = preset(n).unwrap();
            cfg.validate().unwrap();
            let json = serde_json::to_string(&cfg).unwrap();
            assert_eq!(RunConfig::from_json(&json).unwrap(), cfg, "figure {n}");
        }
        assert!(preset(8).is_err());
    }

    #[test]
    fn fig1_curve_schemes_resolve() {
        let (_, cfg) = preset(1).unwrap();
        let ctx = cfg.context(None).unwrap();
        assert!((ctx.ratio() - 0.01).abs() < 1e-15);
        assert!((ctx.temperature() - 10.0).abs() < 1e-12);
        for (_, r) in cfg.curve_records() {
            let s = r.resolve(&ctx).unwrap();
            assert_eq!(s.theta1, FRAC_PI_2);
        }
    }
}
