//! Adaptive Gauss-Kronrod integration on finite and semi-infinite ranges.
//!
//! The semi-infinite driver splits the range at a caller supplied point.
//! Below the split the integrand is mapped through `ω = a + e^s` and
//! integrated panel by panel toward the lower endpoint; above it, panels of
//! doubling width march toward the upper endpoint. Each panel is integrated
//! with an adaptive G10/K21 rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_626_836_669,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], .., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Requested relative accuracy.
    pub rel_tol: f64,
    /// Maximum number of bisections per panel.
    pub max_subdivisions: usize,
}

impl QuadOptions {
    /// Default for frequency moments.
    pub const MOMENTS: QuadOptions = QuadOptions {
        rel_tol: 1e-10,
        max_subdivisions: 400,
    };

    /// Default for the time dependent integrals Ξ and υ₀.
    pub const TIME_DEPENDENT: QuadOptions = QuadOptions {
        rel_tol: 1e-8,
        max_subdivisions: 400,
    };

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadOptions { rel_tol, ..self }
    }

    pub fn with_max_subdivisions(self, max_subdivisions: usize) -> Self {
        QuadOptions {
            max_subdivisions,
            ..self
        }
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions::MOMENTS
    }
}

/// Result of a single integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Integral of |f| over the same range.
    pub abs_value: f64,
}

struct Rule {
    kronrod: f64,
    error: f64,
    abs: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Rule {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs = fc.abs() * WGK[10];
    let mut fv = [0.0f64; 20];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let res = kronrod * half;
    let res_abs = abs * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (1.0f64).min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Rule {
        kronrod: res,
        error: err,
        abs: res_abs,
    }
}

struct Segment {
    a: f64,
    b: f64,
    rule: Rule,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.rule.error == other.rule.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rule.error.total_cmp(&other.rule.error)
    }
}

/// Adaptive G10/K21 integration of `f` over the finite interval `[a, b]`.
///
/// Converges when the error estimate drops below
/// `max(abs_tol, rel_tol·|I|)`. A non-finite integrand value is reported as
/// divergence at whichever endpoint is closer to the offending segment.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    opts: QuadOptions,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            abs_value: 0.0,
        });
    }
    let first = gk21(&f, a, b);
    if !first.kronrod.is_finite() || !first.error.is_finite() {
        return Err(Error::Divergence { endpoint: a });
    }
    let mut total = first.kronrod;
    let mut total_err = first.error;
    let mut total_abs = first.abs;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, rule: first });
    let mut splits = 0;
    loop {
        let tol = abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tol || total_err <= 50.0 * f64::EPSILON * total_abs {
            break;
        }
        if splits >= opts.max_subdivisions {
            if total_err <= 1e3 * tol {
                break;
            }
            return Err(Error::NoConvergence {
                achieved: total_err,
                requested: tol,
            });
        }
        let seg = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            heap.push(seg);
            break;
        }
        let left = gk21(&f, seg.a, mid);
        let right = gk21(&f, mid, seg.b);
        if !(left.kronrod.is_finite() && right.kronrod.is_finite()) {
            let endpoint = if (seg.a - a).abs() <= (seg.b - b).abs() { a } else { b };
            return Err(Error::Divergence { endpoint });
        }
        total += left.kronrod + right.kronrod - seg.rule.kronrod;
        total_err += left.error + right.error - seg.rule.error;
        total_abs += left.abs + right.abs - seg.rule.abs;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            rule: left,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            rule: right,
        });
        splits += 1;
    }
    // Re-sum from the segments to shed accumulated update error.
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().map(|s| s.rule.kronrod).sum();
    let error = segs.iter().map(|s| s.rule.error).sum();
    let abs_value = segs.iter().map(|s| s.rule.abs).sum();
    Ok(Estimate {
        value,
        error,
        abs_value,
    })
}

const LOG_PANEL: f64 = 9.210_340_371_976_184; // ln 1e4
const MAX_LOWER_PANELS: usize = 80;
const MAX_UPPER_PANELS: usize = 120;
const GROWTH_STREAK: usize = 3;

/// Integral of `f` over `[lower, upper]` where `upper` may be `+∞`.
///
/// `split` (strictly inside the range) separates the piece treated in the
/// logarithmic variable from the linear tail. `inner_scale` hints at the
/// smallest relevant frequency scale above `lower`; the first logarithmic
/// panel reaches below it.
pub fn integrate_half_line<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    split: f64,
    inner_scale: f64,
    opts: QuadOptions,
) -> Result<Estimate> {
    if !(upper > lower) {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            abs_value: 0.0,
        });
    }
    let split = if split > lower && split < upper {
        split
    } else if upper.is_finite() {
        lower + 0.5 * (upper - lower)
    } else {
        lower + 1.0
    };
    let width = split - lower;

    let mut value = 0.0;
    let mut error = 0.0;
    let mut abs_value = 0.0;

    // Lower piece in s = ln(ω - lower).
    let g = |s: f64| {
        let e = s.exp();
        f(lower + e) * e
    };
    let s_top = width.ln();
    let inner = if inner_scale > 0.0 && inner_scale < width {
        inner_scale
    } else {
        width
    };
    let mut s_hi = s_top;
    let mut s_lo = inner.ln() - LOG_PANEL;
    let mut previous: Option<f64> = None;
    let mut growth = 0usize;
    let mut quiet = 0usize;
    let mut converged = false;
    for panel in 0..MAX_LOWER_PANELS {
        let abs_tol = opts.rel_tol * abs_value * 0.1;
        let est = integrate(g, s_lo, s_hi, abs_tol, opts).map_err(|e| match e {
            Error::Divergence { .. } => Error::Divergence { endpoint: lower },
            other => other,
        })?;
        value += est.value;
        error += est.error;
        abs_value += est.abs_value;
        if let Some(prev) = previous {
            if est.abs_value >= prev && est.abs_value > 0.0 {
                growth += 1;
                if growth >= GROWTH_STREAK {
                    return Err(Error::Divergence { endpoint: lower });
                }
            } else {
                growth = 0;
            }
        }
        previous = Some(est.abs_value);
        if est.abs_value <= 1e-3 * opts.rel_tol * abs_value || abs_value == 0.0 && panel > 1 {
            quiet += 1;
            if quiet >= 2 {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
        s_hi = s_lo;
        s_lo -= LOG_PANEL;
        if s_lo < -745.0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Divergence { endpoint: lower });
    }

    // Upper piece, panels of doubling width.
    let mut a = split;
    let mut step = width.max(f64::MIN_POSITIVE);
    previous = None;
    growth = 0;
    quiet = 0;
    for _ in 0..MAX_UPPER_PANELS {
        let b = if upper.is_finite() { (a + step).min(upper) } else { a + step };
        let abs_tol = opts.rel_tol * abs_value * 0.1;
        let est = integrate(&f, a, b, abs_tol, opts).map_err(|e| match e {
            Error::Divergence { .. } => Error::Divergence { endpoint: upper },
            other => other,
        })?;
        value += est.value;
        error += est.error;
        abs_value += est.abs_value;
        if b >= upper {
            return Ok(Estimate {
                value,
                error,
                abs_value,
            });
        }
        if let Some(prev) = previous {
            if est.abs_value >= prev && est.abs_value > 0.0 {
                growth += 1;
                if growth >= GROWTH_STREAK && upper.is_infinite() {
                    return Err(Error::Divergence { endpoint: upper });
                }
            } else {
                growth = 0;
            }
        }
        previous = Some(est.abs_value);
        if est.abs_value <= 1e-3 * opts.rel_tol * abs_value || abs_value == 0.0 {
            quiet += 1;
            if quiet >= 2 {
                return Ok(Estimate {
                    value,
                    error,
                    abs_value,
                });
            }
        } else {
            quiet = 0;
        }
        a = b;
        step *= 2.0;
    }
    Err(Error::Divergence { endpoint: upper })
}
