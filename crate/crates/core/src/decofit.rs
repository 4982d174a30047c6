//! Decay-rate extraction from computed time series.
//!
//! The damping factor multiplies an oscillation, so the fit runs on the
//! envelope (local maxima of the magnitude) and is a plain least-squares
//! line through the log magnitudes. That is deterministic, needs no
//! starting guess, and the oscillation energy never enters the decoherence
//! time. The default fit window starts one coarse lifetime in, past the
//! region where non-pole background is largest.

use crate::constants::HBAR_EVS;
use crate::error::{Error, Result};
use crate::models::{DecoherenceEstimate, Method};
use crate::vanhove::{ExpectationSeries, PointStatus};

/// Magnitudes at or below this are treated as numerical silence and never
/// enter a fit.
pub const DEFAULT_NOISE_FLOOR: f64 = 1e-12;

/// A fitted exponential envelope `amplitude * exp(-rate t)`.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Decay rate in 1/s, nonnegative.
    pub rate: f64,
    /// Envelope magnitude extrapolated to `t = 0`.
    pub amplitude: f64,
    /// RMS residual of the log-envelope line fit.
    pub residual: f64,
    /// Time span of the points actually used, seconds.
    pub window: (f64, f64),
}

impl DecayFit {
    /// A residual above 0.5 in log units means the envelope is not a single
    /// exponential over the window.
    pub fn poor_fit(&self) -> bool {
        self.residual > 0.5
    }
}

/// Options for the series-level fit pipeline.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub noise_floor: f64,
    /// Explicit fit window in seconds; the default is
    /// `[t_coarse, 10 t_coarse]` from a two-point estimate.
    pub window: Option<(f64, f64)>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            noise_floor: DEFAULT_NOISE_FLOOR,
            window: None,
        }
    }
}

/// Envelope of a series: the local maxima of the magnitude over converged
/// points. Fewer than four maxima means the decay is not (or barely)
/// oscillatory and every point is returned.
pub fn envelope(series: &ExpectationSeries) -> Result<Vec<(f64, f64)>> {
    let points: Vec<(f64, f64)> = series
        .times()
        .iter()
        .zip(series.values())
        .zip(series.status())
        .filter(|(_, s)| **s == PointStatus::Converged)
        .map(|((t, v), _)| (*t, v.norm()))
        .collect();
    if points.len() < 8 {
        return Err(Error::FitInput(format!(
            "envelope needs at least 8 converged points, got {}",
            points.len()
        )));
    }
    let mut maxima = Vec::new();
    for i in 1..points.len() - 1 {
        if points[i].1 > points[i - 1].1 && points[i].1 >= points[i + 1].1 {
            maxima.push(points[i]);
        }
    }
    if maxima.len() < 4 {
        return Ok(points);
    }
    Ok(maxima)
}

/// Least-squares line through `ln |value|` against `t`. Points at or below
/// the noise floor are excluded; at least four must survive.
pub fn fit_exponential_with_floor(points: &[(f64, f64)], noise_floor: f64) -> Result<DecayFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(_, v)| *v > noise_floor)
        .collect();
    if usable.len() < 4 {
        if points.iter().all(|(_, v)| *v <= 0.0) {
            return Err(Error::FitInput(
                "all magnitudes are nonpositive; nothing to fit".into(),
            ));
        }
        return Err(Error::FitInput(format!(
            "need at least 4 points above the noise floor {noise_floor:.1e}, got {}",
            usable.len()
        )));
    }

    let n = usable.len() as f64;
    let mean_t = usable.iter().map(|(t, _)| t).sum::<f64>() / n;
    let mean_y = usable.iter().map(|(_, v)| v.ln()).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(t, v) in &usable {
        let dt = t - mean_t;
        sxx += dt * dt;
        sxy += dt * (v.ln() - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::FitInput("all points share one time".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_t;
    let mut ss = 0.0;
    for &(t, v) in &usable {
        let r = v.ln() - (intercept + slope * t);
        ss += r * r;
    }
    let residual = (ss / n).sqrt();
    Ok(DecayFit {
        rate: (-slope).max(0.0),
        amplitude: intercept.exp(),
        residual,
        window: (usable[0].0, usable[usable.len() - 1].0),
    })
}

/// [`fit_exponential_with_floor`] at the default noise floor.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<DecayFit> {
    fit_exponential_with_floor(points, DEFAULT_NOISE_FLOOR)
}

/// Full pipeline: envelope, coarse two-point rate, windowed fit.
pub fn fit_series(series: &ExpectationSeries, opts: &FitOptions) -> Result<DecayFit> {
    let env = envelope(series)?;
    let window = match opts.window {
        Some(w) => Some(w),
        None => coarse_window(&env, opts.noise_floor),
    };
    let selected: Vec<(f64, f64)> = match window {
        Some((lo, hi)) => {
            let inside: Vec<(f64, f64)> = env
                .iter()
                .copied()
                .filter(|(t, _)| *t >= lo && *t <= hi)
                .collect();
            if inside.len() >= 4 {
                inside
            } else {
                env.clone()
            }
        }
        None => env.clone(),
    };
    fit_exponential_with_floor(&selected, opts.noise_floor)
}

/// Two-point coarse estimate: first envelope point against the last one
/// above the floor, giving the default window `[t_c, 10 t_c]`.
fn coarse_window(env: &[(f64, f64)], noise_floor: f64) -> Option<(f64, f64)> {
    let (t0, v0) = *env.first()?;
    let (t1, v1) = env.iter().rev().find(|(_, v)| *v > noise_floor).copied()?;
    if t1 <= t0 || v1 >= v0 || v0 <= noise_floor {
        return None;
    }
    let rate = (v0 / v1).ln() / (t1 - t0);
    let t_coarse = 1.0 / rate;
    Some((t_coarse, 10.0 * t_coarse))
}

/// Convert a fitted rate into an estimate: `t_D = 1 / rate`,
/// `gamma = hbar rate`. A zero rate is the infinite sentinel.
pub fn estimate_from_fit(fit: &DecayFit) -> DecoherenceEstimate {
    let mut est = if fit.rate > 0.0 {
        DecoherenceEstimate {
            t_d_seconds: 1.0 / fit.rate,
            gamma_ev: HBAR_EVS * fit.rate,
            method: Method::Fit,
            diagnostics: Default::default(),
        }
    } else {
        DecoherenceEstimate::infinite(Method::Fit)
    };
    est.diagnostics.fit_residual = Some(fit.residual);
    if fit.poor_fit() {
        est.diagnostics.warnings.push(format!(
            "log-envelope fit residual {:.3} exceeds 0.5; the decay is not a single exponential",
            fit.residual
        ));
    }
    est
}

/// Envelope magnitudes relative to the first point at `t_D`, `3 t_D` and
/// `10 t_D`, linearly interpolated where the grid allows.
pub fn envelope_ratios(series: &ExpectationSeries, t_d: f64) -> Option<[f64; 3]> {
    if !t_d.is_finite() || series.is_empty() {
        return None;
    }
    let base = series.values().first()?.norm();
    if base <= 0.0 {
        return None;
    }
    let sample = |t: f64| -> Option<f64> {
        let times = series.times();
        if t > *times.last()? {
            return None;
        }
        let idx = times.partition_point(|&x| x < t);
        if idx == 0 {
            return Some(series.values()[0].norm() / base);
        }
        let (t0, t1) = (times[idx - 1], times[idx]);
        let (v0, v1) = (
            series.values()[idx - 1].norm(),
            series.values()[idx].norm(),
        );
        let frac = (t - t0) / (t1 - t0);
        Some((v0 + frac * (v1 - v0)) / base)
    };
    Some([
        sample(t_d).unwrap_or(f64::NAN),
        sample(3.0 * t_d).unwrap_or(f64::NAN),
        sample(10.0 * t_d).unwrap_or(f64::NAN),
    ])
}

/// Non-pole content of the series at its first point, relative to the
/// fitted envelope extrapolated there.
pub fn background_ratio(series: &ExpectationSeries, fit: &DecayFit) -> Option<f64> {
    let (t0, v0) = (*series.times().first()?, series.values().first()?.norm());
    let predicted = fit.amplitude * (-fit.rate * t0).exp();
    if predicted <= 0.0 {
        return None;
    }
    Some((v0 - predicted).abs() / predicted)
}
