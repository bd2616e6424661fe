//! Numerical derivative of a sampled magnitude `t ↦ |ρ₀₁(t)|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FdMethod {
    /// Centered differences at `h` and `h/2`, Richardson-combined.
    Centered,
    /// One-sided differences at `h, h/2, h/4, h/8`, Romberg-combined.
    Forward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdEstimate {
    pub value: f64,
    pub method: FdMethod,
    pub note: Option<String>,
}

/// Derivative of `f` at `t0` with step `h`.
///
/// Falls back to one-sided differences when `t0 − h < 0`; the raw one-sided
/// difference is only first order in `h`, which the extrapolation removes up
/// to `O(h⁴)` for smooth `f`.
pub fn finite_difference_velocity<F>(f: F, t0: f64, h: f64) -> Result<FdEstimate>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(h > 0.0) || !(t0 >= 0.0) {
        return Err(Error::InvalidParameter(format!("t0 = {t0}, h = {h}")));
    }
    if t0 - h >= 0.0 {
        let d = |h: f64| -> Result<f64> { Ok((f(t0 + h)? - f(t0 - h)?) / (2.0 * h)) };
        let (d1, d2) = (d(h)?, d(h / 2.0)?);
        return Ok(FdEstimate {
            value: (4.0 * d2 - d1) / 3.0,
            method: FdMethod::Centered,
            note: None,
        });
    }
    let f0 = f(t0)?;
    let mut row: Vec<f64> = Vec::with_capacity(4);
    for k in 0..4 {
        let hk = h / f64::from(1u32 << k);
        row.push((f(t0 + hk)? - f0) / hk);
    }
    // Romberg table for an error series in powers of h.
    for level in 1..4 {
        let p = f64::from(1u32 << level);
        for i in (level..4).rev() {
            row[i] = (p * row[i] - row[i - 1]) / (p - 1.0);
        }
    }
    Ok(FdEstimate {
        value: row[3],
        method: FdMethod::Forward,
        note: Some(format!("t0 - h < 0: one-sided differences, leading error O(h) before extrapolation (h = {h:e})")),
    })
}
