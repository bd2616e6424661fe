//! Acceptance run over the eleven criteria. Prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use dephaselab::commands::{run, Command, Output};
use dephaselab::config::{
    ContextRecord, Curve, Family, OracleRecord, RunConfig, SchemeRecord, SearchRecord, SpectralKind, SpectralRecord,
    TimeRecord,
};
use dephaselab::presets::{preset, FIGURES};
use dephaselab::table::{Cell, Table};
use dephaselab_core::dynamics::{
    asymptotic_magnitude, coherence, coherence_with, continuous_coherence, default_time_grid, time_integrals, trajectory,
};
use dephaselab_core::oracle::{finite_difference_velocity, search_initial_coherence_max, GridSpec};
use dephaselab_core::quadrature::QuadOptions;
use dephaselab_core::scheme::{classify, n_constants, MeasurementScheme, SchemeClass};
use dephaselab_core::shorttime::{short_time_profile, transition_scan, velocity_bound_ratio};
use dephaselab_core::spectral::{SpectralDensity, ThermalContext};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn ctx(x: f64, temperature: f64) -> ThermalContext {
    ThermalContext::from_ratio(x, temperature).unwrap()
}

fn ohmic_half() -> SpectralDensity {
    SpectralDensity::ohmic_like(0.5, 1.0, 1.0).unwrap()
}

fn sm_record(theta0: f64) -> SchemeRecord {
    SchemeRecord {
        family: Some(Family::SM),
        theta0: Some(theta0),
        ..Default::default()
    }
}

fn random_scheme(rng: &mut ChaCha8Rng) -> MeasurementScheme {
    let theta0 = rng.gen_range(0.0..=PI);
    let theta1 = rng.gen_range(0.0..=PI);
    let theta2 = rng.gen_range(0.0..=PI);
    let mut delta: f64 = rng.gen_range(-TAU..TAU);
    if delta.abs() >= TAU {
        delta = 0.0;
    }
    MeasurementScheme::from_delta(theta0, theta1, theta2, delta).unwrap()
}

fn json(report: &dephaselab::Report) -> &Value {
    match &report.output {
        Output::Json(v) => v,
        Output::Csv(_) => panic!("expected JSON"),
    }
}

fn ac1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let s = random_scheme(&mut rng);
        let x = 50.0 * (1.0 - rng.gen::<f64>());
        worst = worst.max(n_constants(&s, &ctx(x, 1.0)).magnitude());
    }
    let mut sm_dev: f64 = 0.0;
    for theta0 in [0.0, PI / 8.0, PI / 3.0, FRAC_PI_2, 7.0 * PI / 8.0, PI] {
        for x in [1e-6, 0.01, 1.0, 10.0, 50.0] {
            let c = ctx(x, 1.0);
            let s = sm_record(theta0).resolve(&c).unwrap();
            sm_dev = sm_dev.max((n_constants(&s, &c).magnitude() - 0.5).abs());
        }
    }
    outcome(
        worst <= 0.5 + 1e-12 && sm_dev <= 1e-10,
        format!("max |rho01(0)| over 1e5 samples = {worst:.15}, SM presets |rho01(0)| - 1/2 <= {sm_dev:.1e}"),
    )
}

fn ac2() -> Outcome {
    let c = ctx(1e-6, 1.0);
    let r = search_initial_coherence_max(&c, PI / 3.0, &GridSpec::cube(128)).unwrap();
    let b = r.best;
    let coord = (b.u - 1.0).abs().max((b.v - 1.0).abs()).max(b.delta_zeta.abs());
    let val = (r.best_value - 0.25).abs();
    outcome(
        coord <= 1e-3 && val <= 1e-6,
        format!(
            "incumbent (u, v, dz) = ({:.9}, {:.9}, {:.2e}), |best - 1/4| = {val:.1e}",
            b.u, b.v, b.delta_zeta
        ),
    )
}

fn ac3() -> Outcome {
    let c = ctx(40.0, 1.0);
    let angles = [0.0, PI / 6.0, FRAC_PI_2, 2.0 * PI / 3.0, PI];
    let deltas = [-5.0, -1.0, 0.0, 2.0, 4.0];
    let mut schemes = Vec::new();
    for &a in &angles {
        for &d in &deltas {
            schemes.push(MeasurementScheme::from_delta(0.0, a, FRAC_PI_2, d).unwrap());
            schemes.push(MeasurementScheme::from_delta(PI, FRAC_PI_2, a, d).unwrap());
        }
    }
    for &d in &deltas {
        schemes.push(MeasurementScheme::from_delta(0.0, FRAC_PI_2, FRAC_PI_2, d).unwrap());
        schemes.push(MeasurementScheme::from_delta(PI, FRAC_PI_2, FRAC_PI_2, d).unwrap());
    }
    let min = schemes
        .iter()
        .map(|s| n_constants(s, &c).magnitude())
        .fold(f64::INFINITY, f64::min);
    outcome(
        min >= 0.5 - 1e-6,
        format!("{} low-temperature family members, min |rho01(0)| = {min:.15}", schemes.len()),
    )
}

fn ac4() -> Outcome {
    let j = ohmic_half();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = QuadOptions::TIME_DEPENDENT.with_rel_tol(1e-13).with_max_subdivisions(2000);
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for _ in 0..100 {
        let s = random_scheme(&mut rng);
        let c = ctx(rng.gen_range(0.0..5.0_f64).max(1e-3), 1.0);
        let v = short_time_profile(&s, &j, &c).unwrap().velocity;
        let fd = finite_difference_velocity(|t| Ok(coherence_with(&s, &j, &c, t, opts)?.norm()), 0.0, 1e-2).unwrap();
        let rel = (fd.value - v).abs() / v.abs();
        if rel > worst {
            worst = rel;
            at = format!("V = {v:.6e}, fd = {:.6e}", fd.value);
        }
    }
    outcome(worst <= 1e-3, format!("100 schemes, max relative error {worst:.2e} ({at})"))
}

fn ac5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut all_agree = true;
    for x in [0.1, 1.0, 5.0] {
        let cfg = RunConfig {
            title: None,
            spectral: Some(SpectralRecord::ohmic(0.5, 1.0)),
            context: ContextRecord::ratio(x, None),
            scheme: SchemeRecord::default(),
            curves: [PI / 8.0, PI / 3.0, 7.0 * PI / 8.0]
                .iter()
                .enumerate()
                .map(|(i, &t)| Curve {
                    label: format!("theta0_{i}"),
                    scheme: SchemeRecord {
                        theta0: Some(t),
                        ..Default::default()
                    },
                })
                .collect(),
            time: None,
            sweep: vec![],
            search: Some(SearchRecord::default()),
            oracle: None,
            tol: Some(1e-4),
            out: None,
        };
        let report = run(Command::Extrema, &cfg).unwrap();
        let v = json(&report);
        worst = worst.max(v["max_discrepancy_over_eta"].as_f64().unwrap());
        all_agree &= v["agree"].as_bool().unwrap();
    }
    outcome(
        all_agree && worst <= 1e-4,
        format!("9 (x, theta0) pairs, max |grid - analytic| = {worst:.2e} eta"),
    )
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..10_000 {
        let theta0 = rng.gen_range(0.0..=PI);
        let x = 10f64.powf(rng.gen_range(-8.0..50f64.log10()));
        let r = velocity_bound_ratio(&ctx(x, 1.0), theta0);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let mut lim: f64 = 0.0;
    for theta0 in [0.0, PI / 8.0, PI / 3.0, 2.0 * PI / 3.0, 7.0 * PI / 8.0, PI] {
        let want = theta0.cos().abs() / 2.0;
        lim = lim.max((velocity_bound_ratio(&ctx(1e-8, 1.0), theta0) - want).abs() / want);
    }
    outcome(
        lo >= 0.0 && hi < 0.5 && lim <= 1e-6,
        format!("V_M/eta in [{lo:.3e}, {hi:.15}] on 1e4 samples; high-T limit relative error {lim:.1e}"),
    )
}

fn ac7() -> Outcome {
    let j = ohmic_half();
    let times = default_time_grid(1.0, 10.0);
    let mut zero_max: f64 = 0.0;
    let mut classified = true;
    let mut vel_err: f64 = 0.0;
    for theta0 in [PI / 8.0, PI / 3.0, 2.0 * PI / 3.0, 7.0 * PI / 8.0] {
        for x in [0.01, 1.0, 5.0] {
            let c = ctx(x, 1.0);
            for d in [PI, -PI] {
                let rec = SchemeRecord {
                    family: Some(Family::S0),
                    theta0: Some(theta0),
                    delta_zeta: Some(d),
                    ..Default::default()
                };
                let s = rec.resolve(&c).unwrap();
                classified &= classify(&s, &c, 1e-9).class == SchemeClass::S0FullDecoherence;
                let tr = trajectory(&s, &j, &c, &times, QuadOptions::TIME_DEPENDENT).unwrap();
                zero_max = tr.magnitudes().into_iter().fold(zero_max, f64::max);
            }
            let vm = velocity_bound_ratio(&c, theta0);
            let sign = if theta0 < FRAC_PI_2 { 1.0 } else { -1.0 };
            for p in transition_scan(&c, theta0, &j, &[1e-6]).unwrap() {
                let d = p.delta_zeta;
                if (d.abs() - PI).abs() < 1e-9 {
                    continue;
                }
                // c·sin Δζ fixes the side: +V_M where it is positive.
                let want = sign * d.sin().signum() * vm;
                vel_err = vel_err.max((p.v_over_eta - want).abs() / vm);
            }
        }
    }
    outcome(
        zero_max <= 1e-12 && classified && vel_err <= 1e-4,
        format!(
            "max |rho01(t)| at q = Q, dz = ±pi: {zero_max:.1e} on {} times; velocity at ±pi∓1e-6 within {vel_err:.1e} of ±V_M",
            times.len()
        ),
    )
}

fn ac8() -> Outcome {
    let modes = vec![[0.09, 1.0], [0.04, 1.7]];
    let spectral = SpectralRecord {
        kind: SpectralKind::Discrete,
        alpha: None,
        omega_s: None,
        amplitude: None,
        omega_g: None,
        omega_m: None,
        modes,
        samples: vec![],
    };
    let theta0 = PI / 3.0;
    let curves = vec![
        Curve {
            label: "generic".into(),
            scheme: SchemeRecord {
                theta0: Some(theta0),
                theta1: Some(1.1),
                theta2: Some(0.6),
                delta_zeta: Some(2.3),
                ..Default::default()
            },
        },
        Curve {
            label: "SM".into(),
            scheme: sm_record(theta0),
        },
        Curve {
            label: "S0".into(),
            scheme: SchemeRecord {
                family: Some(Family::S0),
                theta0: Some(theta0),
                ..Default::default()
            },
        },
    ];
    let cfg = RunConfig {
        title: None,
        spectral: Some(spectral),
        context: ContextRecord {
            temperature: Some(0.5),
            omega0: Some(1.0),
            unit: Some("omega_1".into()),
            ..Default::default()
        },
        scheme: SchemeRecord::default(),
        curves,
        time: Some(TimeRecord::linear(8.0, 20)),
        sweep: vec![],
        search: None,
        oracle: Some(OracleRecord {
            n_max: 12,
            converge: true,
            convergence_tol: Some(1e-8),
            dimension_cap: Some(2 * 25 * 25),
        }),
        tol: Some(1e-6),
        out: None,
    };
    let report = run(Command::Oracle, &cfg).unwrap();
    let v = json(&report);
    let mut pass = true;
    let mut lines = Vec::new();
    let c = cfg.context(None).unwrap();
    let j = cfg.density().unwrap();
    let times: Vec<f64> = v["times_omega_s"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t.as_f64().unwrap() / j.omega_s())
        .collect();
    for (k, r) in v["results"].as_array().unwrap().iter().enumerate() {
        let dev = r["max_deviation"].as_f64().unwrap();
        let drift = r["population_drift"].as_f64().unwrap();
        let conv = r["convergence"].as_array().unwrap();
        let last = conv.last().map(|e| e[1].as_f64().unwrap()).unwrap_or(f64::NAN);
        let n_max = r["oracle"]["n_max"].as_u64().unwrap();
        let ok = dev <= 1e-6 && drift <= 1e-10 && last <= 1e-8;
        pass &= ok;
        let tag = ["8a", "8b", "8c"][k];
        let mut line = format!(
            "  {tag} {} {}: max |analytic - ED| = {dev:.2e}, population drift = {drift:.1e}, n_max = {n_max}, last doubling change = {last:.1e}",
            if ok { "PASS" } else { "FAIL" },
            r["label"].as_str().unwrap()
        );
        if r["label"] == "S0" {
            let s: MeasurementScheme = serde_json::from_value(r["scheme"].clone()).unwrap();
            let ed: Vec<[f64; 2]> = serde_json::from_value(r["oracle"]["values"].clone()).unwrap();
            let mut ext: f64 = 0.0;
            let mut ed_max: f64 = 0.0;
            for (t, z) in times.iter().zip(&ed) {
                let e = num_complex::Complex64::new(z[0], z[1]);
                let cc = continuous_coherence(&s, &j, &c, *t, QuadOptions::TIME_DEPENDENT).unwrap();
                let zero = coherence(&s, &j, &c, *t).unwrap();
                ext = ext.max((cc - e).norm());
                ed_max = ed_max.max(e.norm() + zero.norm());
            }
            line.push_str(&format!(
                "\n     analysis: the analytic coherence of a q = Q, dz = pi scheme is 0 at all t (criterion 7), \
                 while exact diagonalization of the full thermal state gives max |rho01(t)| = {ed_max:.3e}. \
                 ED agrees to {ext:.1e} with the continuous extension rho0[cos u + (a2 + i a1) sin u] of the \
                 evolution formula, which is nonzero for t > 0 because the post-measurement state keeps \
                 system-bath correlations. Criteria 7 and 8 cannot both hold for this scheme."
            ));
        }
        lines.push(line);
    }
    outcome(pass, format!("generic, SM and S0 schemes on 2 modes, 20 times\n{}", lines.join("\n")))
}

/// Least-squares slope of `ln|y|` against `ln t`.
fn loglog_slope(t: &[f64], y: &[f64]) -> f64 {
    let xs: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = xs.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn ac9() -> Outcome {
    let j = ohmic_half();
    let opts = QuadOptions::TIME_DEPENDENT.with_rel_tol(1e-14).with_max_subdivisions(4000);
    let ts: Vec<f64> = (0..=20).map(|i| 1e-4 * 10f64.powf(i as f64 / 10.0)).collect();
    let mut min_slope = f64::INFINITY;
    let mut cross: f64 = 0.0;
    for theta0 in [PI / 8.0, PI / 3.0, 7.0 * PI / 8.0] {
        for x in [0.01, 1.0] {
            let c = ctx(x, 1.0);
            let s = sm_record(theta0).resolve(&c).unwrap();
            let coef = n_constants(&s, &c);
            let (_, a2, a3) = coef.a_coefficients().unwrap();
            let wp = short_time_profile(&s, &j, &c).unwrap().w_prime;
            // |rho(t)| - 1/2 in logarithmic form, free of cancellation against 1/2.
            let res: Vec<f64> = ts
                .iter()
                .map(|&t| {
                    let ti = time_integrals(&j, &c, t, opts).unwrap();
                    let u = ti.upsilon;
                    let l = -ti.xi + 0.5 * (a2 * (2.0 * u).sin() + a3 * u.sin().powi(2)).ln_1p();
                    let excess = coef.magnitude() * l.exp_m1() + (coef.magnitude() - 0.5);
                    cross = cross.max(
                        (0.5 + excess - coherence_with(&s, &j, &c, t, opts).unwrap().norm()).abs(),
                    );
                    excess - wp * t * t
                })
                .collect();
            min_slope = min_slope.min(loglog_slope(&ts, &res));
        }
    }
    let cold = ThermalContext::from_ratio(30.0, 1e-3).unwrap();
    let s = sm_record(PI / 3.0).resolve(&cold).unwrap();
    let wp = short_time_profile(&s, &j, &cold).unwrap().w_prime;
    let eta00 = j.moment(&cold, 0, true).unwrap();
    let rel = (wp + eta00 / 4.0).abs() / (eta00 / 4.0);
    outcome(
        min_slope >= 2.8 && rel <= 1e-3 && cross <= 1e-12,
        format!(
            "min fitted exponent of |rho01(t)| - (1/2 + W't^2) = {min_slope:.3} on [1e-4, 1e-2]/omega_s; \
             at x = 30 (omega_s/T = 1e3) |W' + eta00/4|/(eta00/4) = {rel:.1e}; log form vs coherence {cross:.1e}"
        ),
    )
}

fn fixture_path(n: u8) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/fixtures/fig{n}.csv"))
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 + 1e-9 * a.abs().max(b.abs())
}

fn same_table(a: &Table, b: &Table) -> bool {
    a.header == b.header
        && a.rows.len() == b.rows.len()
        && a.rows.iter().zip(&b.rows).all(|(r, s)| {
            r.len() == s.len()
                && r.iter().zip(s).all(|(x, y)| match (x.as_f64(), y.as_f64()) {
                    (Some(p), Some(q)) => close(p, q),
                    _ => x == y,
                })
        })
}

fn col(t: &Table, name: &str) -> usize {
    t.column(name).unwrap()
}

fn num(c: &Cell) -> f64 {
    c.as_f64().unwrap()
}

/// Velocity of curve `label` near `Δζ = ±π`: `(V(±π), V(±π − h), V(±π + h), V(±π + 2h))`.
fn near_pi(t: &Table, label: &str, base: f64) -> (f64, f64, f64, f64) {
    let d = t.series(label, "delta_zeta");
    let v = t.series(label, "v_over_eta");
    let k = d.iter().position(|x| (x - base).abs() < 1e-12).unwrap();
    (v[k], v[k - 1], v[k + 1], v[k + 2])
}

fn ac10() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut tables = Vec::new();
    for n in FIGURES {
        let (cmd, cfg) = preset(n).unwrap();
        let Output::Csv(t) = run(cmd, &cfg).unwrap().output else {
            panic!("figure {n} is not tabular");
        };
        let fixture = fs::read_to_string(fixture_path(n))
            .map(|s| Table::read(s.as_bytes()).unwrap())
            .ok();
        let same = fixture.as_ref().is_some_and(|f| same_table(f, &t));
        if !same {
            notes.push(format!("fig{n}: output differs from committed fixture"));
        }
        pass &= same;
        tables.push((cfg, t));
    }

    // Figures 1 and 2: sign of the initial velocity and of the first step.
    for (fig, decreasing) in [(0usize, ["d", "e"].as_slice()), (1, ["d", "e", "f", "g"].as_slice())] {
        let (cfg, t) = &tables[fig];
        let c = cfg.context(None).unwrap();
        let j = cfg.density().unwrap();
        for (label, rec) in cfg.curve_records() {
            let v = short_time_profile(&rec.resolve(&c).unwrap(), &j, &c).unwrap().velocity;
            let step = t.series(&label, "normalized")[1] - 1.0;
            let want_neg = decreasing.contains(&label.as_str());
            let ok = if want_neg { v < 0.0 && step < 0.0 } else { v > 0.0 && step > 0.0 };
            if !ok {
                notes.push(format!("fig{}: curve {label} has V = {v:e}, first step {step:e}", fig + 1));
            }
            pass &= ok;
        }
    }

    // Figure 3: maximum 1/2 only on the Δζ = 0 line.
    {
        let t = &tables[2].1;
        let (d, a) = (col(t, "delta_zeta"), col(t, "abs_rho0"));
        let max = t.rows.iter().map(|r| num(&r[a])).fold(0.0, f64::max);
        let only_zero = t.rows.iter().filter(|r| num(&r[a]) >= max - 1e-9).all(|r| num(&r[d]) == 0.0);
        let ok = (max - 0.5).abs() <= 1e-12 && only_zero;
        notes.push(format!("fig3: max |rho01(0)| = {max:.15}, attained only at dz = 0: {only_zero}"));
        pass &= ok;
    }

    // Figure 4: largest value at ϑ₀ = π and the largest ω₀/T, below 1/2.
    {
        let t = &tables[3].1;
        let (x, th, a) = (col(t, "omega0_over_T"), col(t, "theta0"), col(t, "abs_rho0"));
        let best = t.rows.iter().max_by(|p, q| num(&p[a]).total_cmp(&num(&q[a]))).unwrap();
        let ok = num(&best[th]) == PI && num(&best[x]) == 10.0 && num(&best[a]) < 0.5;
        notes.push(format!(
            "fig4: max {:.12} at theta0 = {:.4}, omega0/T = {}",
            num(&best[a]),
            num(&best[th]),
            num(&best[x])
        ));
        pass &= ok;
    }

    // Figure 5: supremum 1/2 approached at small ω₀/T and ϑ₀ = 0.
    {
        let t = &tables[4].1;
        let (x, th, v) = (col(t, "omega0_over_T"), col(t, "theta0"), col(t, "v_over_eta"));
        let best = t.rows.iter().max_by(|p, q| num(&p[v]).total_cmp(&num(&q[v]))).unwrap();
        let x_min = t.rows.iter().map(|r| num(&r[x])).fold(f64::INFINITY, f64::min);
        let sup = velocity_bound_ratio(&ctx(x_min, 1.0), 0.0);
        let ok = num(&best[th]) == 0.0
            && num(&best[x]) == x_min
            && (num(&best[v]) - sup).abs() <= 1e-12
            && num(&best[v]) < 0.5;
        notes.push(format!(
            "fig5: max V/eta = {:.6} (bound {sup:.6}) at theta0 = {}, omega0/T = {}",
            num(&best[v]),
            num(&best[th]),
            num(&best[x])
        ));
        pass &= ok;
    }

    // Figure 6: every value within the extremal bound.
    {
        let (cfg, t) = &tables[5];
        let bound = velocity_bound_ratio(&cfg.context(None).unwrap(), cfg.scheme.theta0.unwrap());
        let v = col(t, "v_over_eta");
        let max = t.rows.iter().map(|r| num(&r[v]).abs()).fold(0.0, f64::max);
        let ok = max <= bound + 1e-12;
        notes.push(format!("fig6: max |V/eta| = {max:.9} <= V_M/eta = {bound:.9}"));
        pass &= ok;
    }

    // Figure 7: jump across ±π for q = Q, continuous zero crossing otherwise.
    {
        let (cfg, t) = &tables[6];
        let bound = velocity_bound_ratio(&cfg.context(None).unwrap(), cfg.scheme.theta0.unwrap());
        for base in [PI, -PI] {
            for label in ["a", "b", "c", "d"] {
                let (at, before, after, after2) = near_pi(t, label, base);
                let flips = before * after < 0.0 && at.abs() <= 1e-12;
                let ratio = after.abs() / after2.abs();
                let ok = if label == "a" {
                    flips && before.abs().min(after.abs()) > 0.99 * bound && ratio > 0.99
                } else {
                    flips && ratio < 0.6
                };
                if !ok || base == PI {
                    notes.push(format!(
                        "fig7 {label} at {base:+.4}: V(-h) = {before:+.4e}, V = {at:.1e}, V(+h) = {after:+.4e}, |V(h)/V(2h)| = {ratio:.3}"
                    ));
                }
                pass &= ok;
            }
        }
    }
    outcome(pass, format!("presets 1-7\n  {}", notes.join("\n  ")))
}

fn ac11() -> Outcome {
    let gap = 1.0;
    let dw = 1e-3;
    let samples: Vec<(f64, f64)> = (0..=40_000)
        .map(|i| {
            let nu = i as f64 * dw;
            (gap + nu, nu.sqrt() * (-nu).exp())
        })
        .collect();
    let tab = SpectralDensity::tabulated(samples, 1.0).unwrap().with_gap(gap).unwrap();
    let c = ctx(1.0, 1.0);
    let s = MeasurementScheme::from_delta(PI / 3.0, 1.2, 0.7, 2.0).unwrap();
    let asym = asymptotic_magnitude(&s, &tab, &c).unwrap();
    let at = coherence(&s, &tab, &c, 100.0).unwrap().norm();
    let gapped = (at - asym).abs();

    let j = ohmic_half();
    let zero = asymptotic_magnitude(&s, &j, &c).unwrap();
    let t_late = 100.0 / j.omega_s();
    let late = coherence(&s, &j, &c, t_late).unwrap().norm();
    outcome(
        gapped <= 5e-2 && zero == 0.0 && late < 1e-3,
        format!(
            "gapped: |rho01(100/omega_s)| = {at:.6e}, asymptote {asym:.6e}, difference {gapped:.1e}; \
             ungapped alpha = 1/2, T = omega_s: asymptote {zero}, |rho01(100/omega_s)| = {late:.1e}"
        ),
    )
}

fn main() {
    type Check = fn() -> Outcome;
    let checks: [(&str, &str, Check, Option<Duration>); 11] = [
        ("AC1", "initial coherence bound", ac1, Some(Duration::from_secs(10))),
        ("AC2", "unique high-temperature maximizer", ac2, Some(Duration::from_secs(60))),
        ("AC3", "low-temperature maximizers", ac3, None),
        ("AC4", "velocity formula vs finite differences", ac4, Some(Duration::from_secs(30))),
        ("AC5", "velocity extrema vs grid search", ac5, Some(Duration::from_secs(300))),
        ("AC6", "velocity bounds and high-temperature limit", ac6, None),
        ("AC7", "full decoherence and discontinuity", ac7, None),
        ("AC8", "exact diagonalization equivalence", ac8, Some(Duration::from_secs(120))),
        ("AC9", "short-time expansion", ac9, None),
        ("AC10", "figure presets", ac10, None),
        ("AC11", "long-time asymptote", ac11, None),
    ];
    let mut failed = Vec::new();
    for (id, name, f, limit) in checks {
        let start = Instant::now();
        let mut o = f();
        let took = start.elapsed();
        if let Some(l) = limit {
            if took > l {
                o.pass = false;
                o.detail.push_str(&format!(" [runtime {took:.1?} exceeds {l:.0?}]"));
            }
        }
        println!(
            "{id} {} {name} ({:.2}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed.push(id);
        }
    }
    println!("acceptance: {} of {} criteria passed", checks.len() - failed.len(), checks.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
