//! Barycentric rational continuation of data sampled on the real axis.
//!
//! Support points are chosen greedily at the worst residual; the weights at
//! each step are the smallest right singular vector of the Loewner matrix of
//! the remaining samples. Poles and zeros of the approximant are the roots
//! of its nodal numerator/denominator polynomials, computed by
//! Durand-Kerner iteration directly on the product form (no monomial
//! expansion). Spurious pole-zero pairs ("Froissart doublets") and poles
//! with negligible residue are filtered before anything is reported.

use super::{PoleLocation, PoleSource};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Pole-zero pairing distance below which a doublet is dropped (eV).
pub const FROISSART_PAIR_DISTANCE: f64 = 1e-8;
/// Residue threshold, relative to the data scale, below which a pole is
/// dropped.
pub const FROISSART_RESIDUE: f64 = 1e-10;
/// Target residual of the greedy fit, relative to the data scale.
pub const TARGET_RESIDUAL: f64 = 1e-10;

/// A barycentric rational interpolant of real-axis samples, evaluable at
/// any complex point.
#[derive(Debug, Clone)]
pub struct RationalApproximant {
    support: Vec<f64>,
    values: Vec<Complex64>,
    weights: Vec<Complex64>,
    residual: f64,
    scale: f64,
    x_min: f64,
    x_max: f64,
}

impl RationalApproximant {
    /// Interpolation degree: one less than the number of support points.
    pub fn degree(&self) -> usize {
        self.support.len().saturating_sub(1)
    }

    pub fn support_points(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Achieved maximum deviation from the samples, in data units.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut num = Complex64::ZERO;
        let mut den = Complex64::ZERO;
        for j in 0..self.support.len() {
            let d = z - Complex64::new(self.support[j], 0.0);
            if d.norm() == 0.0 {
                return self.values[j];
            }
            let c = self.weights[j] / d;
            num += c * self.values[j];
            den += c;
        }
        num / den
    }

    /// Poles of the approximant, Froissart-filtered, with residues. Simple
    /// by construction of the barycentric form.
    ///
    /// Only poles within half a span of the sampled interval are reported:
    /// farther out the approximant no longer continues the data, it merely
    /// extrapolates, and its far-field denominator roots carry no meaning.
    pub fn poles(&self) -> Result<Vec<PoleLocation>> {
        let pole_candidates = nodal_roots(&self.support, &self.weights);
        let zero_weights: Vec<Complex64> = self
            .weights
            .iter()
            .zip(&self.values)
            .map(|(w, f)| w * f)
            .collect();
        let zero_candidates = nodal_roots(&self.support, &zero_weights);

        let span = self.x_max - self.x_min;
        let trust = 0.5 * span;
        let mut out = Vec::new();
        for p in pole_candidates {
            let dx = (self.x_min - p.re).max(p.re - self.x_max).max(0.0);
            if (dx * dx + p.im * p.im).sqrt() > trust {
                continue;
            }
            let paired = zero_candidates
                .iter()
                .any(|z| (z - p).norm() < FROISSART_PAIR_DISTANCE);
            if paired {
                continue;
            }
            let res = self.residue_at(p);
            if !res.re.is_finite() || !res.im.is_finite() {
                continue;
            }
            if res.norm() < FROISSART_RESIDUE * self.scale {
                continue;
            }
            out.push(PoleLocation {
                position: p,
                residue: res,
                multiplicity: 1,
                source: PoleSource::ContinuationApproximant,
            });
        }

        // Surviving poles on the sampled interval itself mean the data was
        // not analytic there; report that instead of handing them out.
        if let Some(bad) = out.iter().find(|p| {
            p.position.im.abs() < 1e-8 * span.max(1.0)
                && p.position.re >= self.x_min
                && p.position.re <= self.x_max
        }) {
            return Err(Error::Domain(format!(
                "continuation found a pole at {} on the sampled interval; the data is singular there",
                bad.position
            )));
        }

        out.sort_by(|a, b| {
            (a.position.re, a.position.im)
                .partial_cmp(&(b.position.re, b.position.im))
                .unwrap()
        });
        Ok(out)
    }

    /// Residue of the barycentric form at a denominator root:
    /// `N(p) / D'(p)`.
    fn residue_at(&self, p: Complex64) -> Complex64 {
        let mut num = Complex64::ZERO;
        let mut dden = Complex64::ZERO;
        for j in 0..self.support.len() {
            let d = p - Complex64::new(self.support[j], 0.0);
            num += self.weights[j] * self.values[j] / d;
            dden -= self.weights[j] / (d * d);
        }
        num / dden
    }
}

/// Roots of the nodal polynomial `sum_j w_j prod_{k != j} (z - s_k)` by
/// Durand-Kerner iteration. Degree-dropped roots run off to large modulus
/// and are discarded.
fn nodal_roots(support: &[f64], weights: &[Complex64]) -> Vec<Complex64> {
    let m = support.len();
    if m < 2 {
        return Vec::new();
    }
    let deg = m - 1;
    let w_scale = weights.iter().map(|w| w.norm()).fold(0.0, f64::max);
    if w_scale == 0.0 {
        return Vec::new();
    }
    let mut lead: Complex64 = weights.iter().sum();
    if lead.norm() < 1e-14 * w_scale {
        // Degree drop: keep the iteration defined; the runaway roots are
        // filtered below.
        lead = Complex64::new(1e-14 * w_scale, 0.0);
    }

    let eval = |z: Complex64| -> Complex64 {
        let mut total = Complex64::ZERO;
        for (j, &w) in weights.iter().enumerate() {
            let mut prod = w;
            for (k, &s) in support.iter().enumerate() {
                if k != j {
                    prod *= z - Complex64::new(s, 0.0);
                }
            }
            total += prod;
        }
        total
    };

    let centroid: f64 = support.iter().sum::<f64>() / m as f64;
    let spread = support
        .iter()
        .map(|s| (s - centroid).abs())
        .fold(0.0, f64::max)
        .max(1e-6);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|i| {
            let angle = std::f64::consts::TAU * i as f64 / deg as f64 + 0.4;
            Complex64::new(centroid, 0.0)
                + 1.2 * spread * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();

    let tol = 1e-13 * (1.0 + spread);
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let mut den = lead;
            for j in 0..deg {
                if j != i {
                    den *= roots[i] - roots[j];
                }
            }
            if den.norm() == 0.0 {
                roots[i] += Complex64::new(tol, tol);
                continue;
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
            if !roots[i].re.is_finite() || !roots[i].im.is_finite() {
                roots[i] = Complex64::new(centroid, spread * (i as f64 + 1.0));
            }
        }
        if max_step < tol {
            break;
        }
    }

    let cutoff = 1e6 * (spread + centroid.abs() + 1.0);
    roots
        .into_iter()
        .filter(|r| r.re.is_finite() && r.im.is_finite() && r.norm() < cutoff)
        .collect()
}

/// Greedy barycentric rational fit of real-axis samples `(x_i, f_i)`.
/// Needs at least 8 samples with distinct abscissae; stagnation above the
/// target residual is an error carrying the best achieved value.
pub fn continue_from_samples(samples: &[(f64, Complex64)]) -> Result<RationalApproximant> {
    if samples.len() < 8 {
        return Err(Error::Domain(format!(
            "continuation needs at least 8 samples, got {}",
            samples.len()
        )));
    }
    let mut xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain("sample abscissae must be distinct".into()));
    }
    if samples
        .iter()
        .any(|(x, f)| !x.is_finite() || !f.re.is_finite() || !f.im.is_finite())
    {
        return Err(Error::Domain("samples must be finite".into()));
    }

    let n = samples.len();
    let scale = samples
        .iter()
        .map(|(_, f)| f.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let target = TARGET_RESIDUAL * scale;
    let mean = samples.iter().map(|(_, f)| f).sum::<Complex64>() / n as f64;

    let mut in_support = vec![false; n];
    let mut support: Vec<usize> = Vec::new();
    // Residual of the current approximant at every sample (mean to start).
    let mut current: Vec<Complex64> = vec![mean; n];

    let mut best: Option<(Vec<usize>, Vec<Complex64>, f64)> = None;
    let mut stagnation = 0usize;
    let max_support = (n / 2).clamp(4, 48);

    for _ in 0..max_support {
        // Pick the worst-fit sample as the next support point.
        let mut pick = None;
        let mut worst = -1.0;
        for i in 0..n {
            if in_support[i] {
                continue;
            }
            let dev = (samples[i].1 - current[i]).norm();
            if dev > worst {
                worst = dev;
                pick = Some(i);
            }
        }
        let Some(pick) = pick else { break };
        in_support[pick] = true;
        support.push(pick);
        let m = support.len();

        let rest: Vec<usize> = (0..n).filter(|&i| !in_support[i]).collect();
        if rest.len() < m {
            break;
        }

        // Loewner matrix of the remaining samples against the support.
        let mut a = DMatrix::<Complex64>::zeros(rest.len(), m);
        for (r, &i) in rest.iter().enumerate() {
            let (xi, fi) = samples[i];
            for (c, &j) in support.iter().enumerate() {
                let (xj, fj) = samples[j];
                a[(r, c)] = (fi - fj) / Complex64::new(xi - xj, 0.0);
            }
        }
        let svd = a.svd(false, true);
        let vt = svd
            .v_t
            .ok_or(Error::ApproximationFailed {
                achieved: f64::INFINITY,
                target,
            })?;
        let mut k_min = 0;
        for k in 1..svd.singular_values.len() {
            if svd.singular_values[k] < svd.singular_values[k_min] {
                k_min = k;
            }
        }
        let weights: Vec<Complex64> = (0..m).map(|c| vt[(k_min, c)].conj()).collect();

        // Evaluate the new approximant everywhere off-support.
        let mut residual = 0.0f64;
        for &i in &rest {
            let (xi, fi) = samples[i];
            let mut num = Complex64::ZERO;
            let mut den = Complex64::ZERO;
            for (c, &j) in support.iter().enumerate() {
                let d = Complex64::new(xi - samples[j].0, 0.0);
                let w = weights[c] / d;
                num += w * samples[j].1;
                den += w;
            }
            let v = num / den;
            current[i] = v;
            residual = residual.max((fi - v).norm());
        }

        let improved = match &best {
            Some((_, _, r)) => residual < 0.9 * r,
            None => true,
        };
        if best.as_ref().is_none_or(|(_, _, r)| residual < *r) {
            best = Some((support.clone(), weights, residual));
        }
        stagnation = if improved { 0 } else { stagnation + 1 };

        if residual <= target {
            break;
        }
        if stagnation >= 6 {
            break;
        }
    }

    let (support_idx, weights, residual) = best.ok_or(Error::ApproximationFailed {
        achieved: f64::INFINITY,
        target,
    })?;
    if residual > target {
        return Err(Error::ApproximationFailed {
            achieved: residual,
            target,
        });
    }

    Ok(RationalApproximant {
        support: support_idx.iter().map(|&i| samples[i].0).collect(),
        values: support_idx.iter().map(|&i| samples[i].1).collect(),
        weights,
        residual,
        scale,
        x_min: xs[0],
        x_max: xs[n - 1],
    })
}
