//! Poles of meromorphic functions on rectangles: counting by the argument
//! principle, location by recursive subdivision plus Muller refinement on
//! `1/f`, residues by trapezoid integration on circles, and analytic
//! continuation of sampled kernels by barycentric rational approximation.
//!
//! The winding number is read off the phase of `f` along the rectangle
//! boundary, so no derivative of the user's function is ever required.

mod aaa;

pub use aaa::{continue_from_samples, RationalApproximant};

use crate::energy::ComplexEnergy;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Where a pole came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoleSource {
    /// Zero of a resolvent dispersion function.
    Resolvent,
    /// Pole of an initial-condition factor (e.g. a thermal occupation).
    InitialCondition,
    /// Pole of a rational continuation of sampled data.
    ContinuationApproximant,
}

impl PoleSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            PoleSource::Resolvent => "resolvent",
            PoleSource::InitialCondition => "initial-condition",
            PoleSource::ContinuationApproximant => "continuation-approximant",
        }
    }
}

/// A located pole with residue and multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleLocation {
    /// Position in the complex energy plane, eV.
    pub position: ComplexEnergy,
    /// Coefficient of `1/(Z - position)` in the Laurent expansion.
    pub residue: Complex64,
    pub multiplicity: u32,
    pub source: PoleSource,
}

impl PoleLocation {
    /// Damping energy: the imaginary part, positive for the decaying poles
    /// used in decoherence estimates.
    pub fn gamma(&self) -> f64 {
        self.position.im
    }
}

/// Axis-aligned search rectangle in the complex energy plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchRectangle {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max)
            || ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite())
        {
            return Err(Error::Domain(format!(
                "degenerate search rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    /// Default decoherence search window: symmetric in the oscillation
    /// energy up to `2 lambda_max`, damping energies in `(0, im_max]`.
    pub fn upper_half(lambda_max: f64, im_max: f64) -> Result<Self> {
        Self::new(-2.0 * lambda_max, 2.0 * lambda_max, 1e-6 * im_max, im_max)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn diag(&self) -> f64 {
        let w = self.re_max - self.re_min;
        let h = self.im_max - self.im_min;
        (w * w + h * h).sqrt()
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn distance_to_boundary(&self, z: Complex64) -> f64 {
        let dx = (z.re - self.re_min).min(self.re_max - z.re);
        let dy = (z.im - self.im_min).min(self.im_max - z.im);
        dx.min(dy)
    }
}

/// Smallest |f| tolerated on a contour before declaring a zero on it.
const MIN_BOUNDARY_MAG: f64 = 1e-280;
/// Evaluation budget for one winding computation.
const MAX_BOUNDARY_EVALS: usize = 1 << 17;

struct EvalCounter {
    used: usize,
}

/// Boundary value split into phase and magnitude: phases come from the
/// normalized part (safe against underflow in ratios), magnitudes police
/// near-contour singularities.
#[derive(Clone, Copy)]
struct BoundaryValue {
    unit: Complex64,
    mag: f64,
}

fn checked_eval<F: Fn(Complex64) -> Complex64>(
    f: &F,
    z: Complex64,
    counter: &mut EvalCounter,
) -> Result<BoundaryValue> {
    counter.used += 1;
    if counter.used > MAX_BOUNDARY_EVALS {
        return Err(Error::BoundaryUnresolved(
            "evaluation budget exhausted; a singularity is probably on or near the contour".into(),
        ));
    }
    let v = f(z);
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::BoundaryUnresolved(format!(
            "f({z}) is not finite on the contour"
        )));
    }
    let mag = v.norm();
    if mag < MIN_BOUNDARY_MAG {
        return Err(Error::BoundaryUnresolved(format!(
            "|f({z})| = {mag:.3e} vanishes on the contour"
        )));
    }
    Ok(BoundaryValue { unit: v / mag, mag })
}

/// Magnitude swing per resolved segment. A singularity hugging the contour
/// makes |f| spike; chasing the swing keeps the sampling honest around it.
const MAX_MAG_RATIO: f64 = 8.0;

/// Accumulated phase change of `f` along the segment `[za, zb]`.
///
/// A segment is accepted only when its two halves individually turn by less
/// than `max_phase`, swing in magnitude by less than [`MAX_MAG_RATIO`], and
/// their phase changes sum to the direct endpoint-to-endpoint difference. A
/// singularity straddled symmetrically by a segment aliases the direct
/// difference by a multiple of 2 pi while leaving the magnitudes balanced;
/// the half-sum consistency check is what catches exactly that case.
#[allow(clippy::too_many_arguments)]
fn segment_phase<F: Fn(Complex64) -> Complex64>(
    f: &F,
    za: Complex64,
    fa: BoundaryValue,
    zb: Complex64,
    fb: BoundaryValue,
    max_phase: f64,
    min_step: f64,
    counter: &mut EvalCounter,
) -> Result<f64> {
    let mut total = 0.0;
    let mut stack = vec![(za, fa, zb, fb)];
    while let Some((za, fa, zb, fb)) = stack.pop() {
        let zm = 0.5 * (za + zb);
        let fm = checked_eval(f, zm, counter)?;
        let direct = (fb.unit / fa.unit).arg();
        let d1 = (fm.unit / fa.unit).arg();
        let d2 = (fb.unit / fm.unit).arg();
        let swing = |a: &BoundaryValue, b: &BoundaryValue| (a.mag / b.mag).max(b.mag / a.mag);
        let resolved = d1.abs() < max_phase
            && d2.abs() < max_phase
            && (d1 + d2 - direct).abs() < 1e-6
            && swing(&fa, &fm) < MAX_MAG_RATIO
            && swing(&fm, &fb) < MAX_MAG_RATIO;
        if resolved {
            total += d1 + d2;
            continue;
        }
        if (zb - za).norm() < min_step {
            return Err(Error::BoundaryUnresolved(format!(
                "phase change did not stabilize below step {min_step:.3e} near {za} (halves {d1:.3}, {d2:.3} vs direct {direct:.3})"
            )));
        }
        stack.push((zm, fm, zb, fb));
        stack.push((za, fa, zm, fm));
    }
    Ok(total)
}

fn winding_with_threshold<F: Fn(Complex64) -> Complex64>(
    f: &F,
    rect: &SearchRectangle,
    max_phase: f64,
    counter: &mut EvalCounter,
) -> Result<f64> {
    let corners = rect.corners();
    let min_step = 1e-13 * rect.diag().max(1.0);
    let mut total = 0.0;
    // Pre-split each edge so coarse aliasing cannot slip through.
    const EDGE_SPLITS: usize = 16;
    for e in 0..4 {
        let za = corners[e];
        let zb = corners[(e + 1) % 4];
        let mut prev_z = za;
        let mut prev_f = checked_eval(f, za, counter)?;
        for k in 1..=EDGE_SPLITS {
            let t = k as f64 / EDGE_SPLITS as f64;
            let z = za + (zb - za) * t;
            let fz = checked_eval(f, z, counter)?;
            total += segment_phase(f, prev_z, prev_f, z, fz, max_phase, min_step, counter)?;
            prev_z = z;
            prev_f = fz;
        }
    }
    Ok(total / std::f64::consts::TAU)
}

/// Count `N_zeros - N_poles` (with multiplicity) inside the rectangle via
/// the winding number of `f` along its boundary. The sampling is refined
/// until two successive refinement levels agree on the integer.
pub fn count_poles_zeros<F: Fn(Complex64) -> Complex64>(
    f: &F,
    rect: &SearchRectangle,
) -> Result<i64> {
    let mut counter = EvalCounter { used: 0 };
    let mut previous: Option<i64> = None;
    for max_phase in [
        std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_4,
        std::f64::consts::FRAC_PI_8,
        std::f64::consts::FRAC_PI_8 / 2.0,
    ] {
        let w = winding_with_threshold(f, rect, max_phase, &mut counter)?;
        let rounded = w.round();
        if (w - rounded).abs() > 1e-6 {
            // Phase sum should telescope to an integer; a miss means the
            // contour is under-resolved. Try the next threshold.
            previous = None;
            continue;
        }
        let count = rounded as i64;
        if previous == Some(count) {
            return Ok(count);
        }
        previous = Some(count);
    }
    Err(Error::BoundaryUnresolved(
        "winding number did not stabilize under refinement".into(),
    ))
}

/// Muller iteration toward a zero of `g`, started inside a box of the given
/// half-diagonal around `center`. Returns the final iterate and last step.
fn muller_zero<G: Fn(Complex64) -> Complex64>(
    g: &G,
    center: Complex64,
    scale: f64,
) -> (Complex64, f64) {
    let mut p0 = center + Complex64::new(0.31 * scale, 0.17 * scale);
    let mut p1 = center - Complex64::new(0.22 * scale, 0.35 * scale);
    let mut p2 = center;
    let mut f0 = g(p0);
    let mut f1 = g(p1);
    let mut f2 = g(p2);
    let mut last_step = scale;

    for _ in 0..96 {
        let h01 = p1 - p0;
        let h12 = p2 - p1;
        if h01.norm() == 0.0 || h12.norm() == 0.0 {
            break;
        }
        let d01 = (f1 - f0) / h01;
        let d12 = (f2 - f1) / h12;
        let a = (d12 - d01) / (p2 - p0);
        let b = d12 + h12 * a;
        let disc = (b * b - 4.0 * f2 * a).sqrt();
        let den1 = b + disc;
        let den2 = b - disc;
        let den = if den1.norm() >= den2.norm() { den1 } else { den2 };
        let step = if den.norm() == 0.0 {
            Complex64::new(0.37 * last_step, 0.21 * last_step)
        } else {
            -2.0 * f2 / den
        };
        let p3 = p2 + step;
        let f3 = g(p3);
        if !f3.re.is_finite() || !f3.im.is_finite() {
            break;
        }
        p0 = p1;
        f0 = f1;
        p1 = p2;
        f1 = f2;
        p2 = p3;
        f2 = f3;
        last_step = step.norm();
        if last_step < 1e-16 * (1.0 + p2.norm()) {
            break;
        }
    }
    (p2, last_step)
}

const MAX_SUBDIVISION_DEPTH: usize = 48;

struct Subdivision<'f, F> {
    f: &'f F,
    outer: SearchRectangle,
    tol: f64,
    found: Vec<(Complex64, u32)>,
    unresolved: Vec<SearchRectangle>,
}

impl<F: Fn(Complex64) -> Complex64> Subdivision<'_, F> {
    /// Try to pin the single pole of this box by Muller iteration on `1/f`.
    /// Returns false when every start escapes the box or stalls; the caller
    /// then subdivides further to shrink the basin.
    fn refine_leaf(&mut self, rect: &SearchRectangle, multiplicity: u32) -> bool {
        let g = |z: Complex64| {
            let v = (self.f)(z);
            if !v.re.is_finite() || !v.im.is_finite() {
                // Landed on the pole itself: 1/f is exactly the zero sought.
                return Complex64::ZERO;
            }
            if v.norm() == 0.0 {
                Complex64::new(f64::MAX / 2.0, 0.0)
            } else {
                v.inv()
            }
        };
        let scale = 0.5 * rect.diag();
        // A couple of deterministic starts in case the first basin escapes.
        let starts = [
            rect.center(),
            rect.center() + Complex64::new(0.29 * scale, -0.13 * scale),
            rect.center() + Complex64::new(-0.17 * scale, 0.23 * scale),
        ];
        for start in starts {
            let (p, step) = muller_zero(&g, start, scale);
            let margin = 10.0 * self.tol;
            let inside = p.re >= rect.re_min - margin
                && p.re <= rect.re_max + margin
                && p.im >= rect.im_min - margin
                && p.im <= rect.im_max + margin;
            if step <= self.tol && inside && self.outer.contains(p) {
                self.found.push((p, multiplicity));
                return true;
            }
        }
        false
    }

    fn recurse(&mut self, rect: SearchRectangle, depth: usize) -> Result<()> {
        let count = count_poles_zeros(self.f, &rect)?;
        if count >= 0 {
            // No net poles here. Zeros (count > 0) are not our quarry.
            return Ok(());
        }
        let multiplicity = (-count) as u32;
        // A multiple pole keeps its count under subdivision, so stop well
        // before the contour touches it; closer than this, a cluster of
        // simple poles is reported as one multiple pole.
        let isolation = if multiplicity == 1 {
            (100.0 * self.tol).max(1e-9 * self.outer.diag())
        } else {
            (1e3 * self.tol).max(1e-6 * self.outer.diag())
        };
        if (multiplicity == 1 && depth >= 1) || rect.diag() <= isolation {
            if self.refine_leaf(&rect, multiplicity) {
                return Ok(());
            }
            if rect.diag() <= isolation {
                // Too small to shrink the basin any further.
                self.unresolved.push(rect);
                return Ok(());
            }
            // Fall through to subdivision: a smaller box tames the basins.
        }
        if depth >= MAX_SUBDIVISION_DEPTH {
            self.unresolved.push(rect);
            return Ok(());
        }
        // Split the longer side; nudge the cut if it lands near a
        // singularity. A singularity hugging a cut line can alias both
        // children's windings in compensating ways (the sum check cannot
        // see it), so cuts are probed and rejected before counting.
        let wide = (rect.re_max - rect.re_min) >= (rect.im_max - rect.im_min);
        for fraction in [0.5, 0.43, 0.57, 0.613] {
            if !self.cut_is_clear(&rect, wide, fraction) {
                continue;
            }
            let (a, b) = if wide {
                let cut = rect.re_min + fraction * (rect.re_max - rect.re_min);
                (
                    SearchRectangle { re_max: cut, ..rect },
                    SearchRectangle { re_min: cut, ..rect },
                )
            } else {
                let cut = rect.im_min + fraction * (rect.im_max - rect.im_min);
                (
                    SearchRectangle { im_max: cut, ..rect },
                    SearchRectangle { im_min: cut, ..rect },
                )
            };
            let ca = match count_poles_zeros(self.f, &a) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let cb = match count_poles_zeros(self.f, &b) {
                Ok(c) => c,
                Err(_) => continue,
            };
            if ca + cb != count {
                continue;
            }
            self.recurse(a, depth + 1)?;
            self.recurse(b, depth + 1)?;
            return Ok(());
        }
        self.unresolved.push(rect);
        Ok(())
    }

    /// Probe a candidate cut line: if |f| on the line towers over |f| on
    /// two parallel lines an eighth of the box away, a singularity sits on
    /// or next to the cut and the split must move.
    fn cut_is_clear(&self, rect: &SearchRectangle, wide: bool, fraction: f64) -> bool {
        const PROBES: usize = 33;
        let mut on_line: f64 = 0.0;
        let mut off_line: f64 = 0.0;
        for k in 0..PROBES {
            let t = (k as f64 + 0.5) / PROBES as f64;
            let (z_on, z_off_a, z_off_b) = if wide {
                let cut = rect.re_min + fraction * (rect.re_max - rect.re_min);
                let offset = 0.125 * (rect.re_max - rect.re_min);
                let y = rect.im_min + t * (rect.im_max - rect.im_min);
                (
                    Complex64::new(cut, y),
                    Complex64::new(cut - offset, y),
                    Complex64::new(cut + offset, y),
                )
            } else {
                let cut = rect.im_min + fraction * (rect.im_max - rect.im_min);
                let offset = 0.125 * (rect.im_max - rect.im_min);
                let x = rect.re_min + t * (rect.re_max - rect.re_min);
                (
                    Complex64::new(x, cut),
                    Complex64::new(x, cut - offset),
                    Complex64::new(x, cut + offset),
                )
            };
            let v_on = (self.f)(z_on).norm();
            if !v_on.is_finite() {
                return false;
            }
            on_line = on_line.max(v_on);
            for z in [z_off_a, z_off_b] {
                let v = (self.f)(z).norm();
                if v.is_finite() {
                    off_line = off_line.max(v);
                }
            }
        }
        on_line <= 100.0 * off_line
    }
}

/// Locate the poles of `f` inside the rectangle to position tolerance `tol`
/// (eV). Assumes `f` has no zeros in the rectangle cancelling its poles in
/// the winding count; a sub-region whose net count vanishes is skipped.
pub fn locate_poles<F: Fn(Complex64) -> Complex64>(
    f: &F,
    rect: &SearchRectangle,
    tol: f64,
    source: PoleSource,
) -> Result<Vec<PoleLocation>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut sub = Subdivision {
        f,
        outer: *rect,
        tol,
        found: Vec::new(),
        unresolved: Vec::new(),
    };
    sub.recurse(*rect, 0)?;

    // Merge refinement duplicates.
    let mut merged: Vec<(Complex64, u32)> = Vec::new();
    sub.found
        .sort_by(|a, b| (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap());
    for (p, m) in sub.found {
        if let Some(last) = merged.last_mut() {
            if (last.0 - p).norm() <= 10.0 * tol {
                last.1 = last.1.max(m);
                continue;
            }
        }
        merged.push((p, m));
    }

    if !sub.unresolved.is_empty() {
        let found = finish_poles(f, rect, &merged, source)?;
        return Err(Error::SubdivisionExhausted {
            found,
            unresolved: sub.unresolved,
        });
    }
    finish_poles(f, rect, &merged, source)
}

fn finish_poles<F: Fn(Complex64) -> Complex64>(
    f: &F,
    rect: &SearchRectangle,
    poles: &[(Complex64, u32)],
    source: PoleSource,
) -> Result<Vec<PoleLocation>> {
    let mut out = Vec::with_capacity(poles.len());
    for (i, &(p, m)) in poles.iter().enumerate() {
        let mut clearance = rect.distance_to_boundary(p).max(1e-12);
        for (j, &(q, _)) in poles.iter().enumerate() {
            if i != j {
                clearance = clearance.min(0.5 * (p - q).norm());
            }
        }
        let radius = 0.45 * clearance;
        let res = residue(f, p, radius)?;
        out.push(PoleLocation {
            position: p,
            residue: res,
            multiplicity: m,
            source,
        });
    }
    out.sort_by(|a, b| {
        (a.position.re, a.position.im)
            .partial_cmp(&(b.position.re, b.position.im))
            .unwrap()
    });
    Ok(out)
}

/// Residue of `f` at `pole`: `(1/2 pi i) * contour integral of f` on the
/// circle of the given radius, by the trapezoid rule with node doubling.
/// Exponentially convergent when `f` is analytic on an annulus around the
/// circle and no other singularity sits inside it.
pub fn residue<F: Fn(Complex64) -> Complex64>(
    f: &F,
    pole: ComplexEnergy,
    radius: f64,
) -> Result<Complex64> {
    if radius.is_nan() || radius <= 0.0 || !radius.is_finite() {
        return Err(Error::Domain(format!("residue radius must be positive, got {radius}")));
    }
    let eval = |n: usize| -> (Complex64, f64) {
        let mut sum = Complex64::ZERO;
        let mut mag = 0.0;
        for k in 0..n {
            let theta = std::f64::consts::TAU * k as f64 / n as f64;
            let dir = Complex64::new(theta.cos(), theta.sin());
            let v = f(pole + radius * dir);
            sum += v * dir;
            mag += v.norm();
        }
        (sum * radius / n as f64, mag * radius / n as f64)
    };

    let mut n = 16;
    let (mut prev, mut scale) = eval(n);
    while n <= (1 << 15) {
        n *= 2;
        let (cur, s) = eval(n);
        scale = s;
        let change = (cur - prev).norm();
        if change <= 1e-10 * cur.norm() + 1e-13 * scale {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::RadiusInvalid {
        radius,
        last_change: (prev - eval(n).0).norm() / scale.max(1e-300),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::KB_EV_PER_K;

    fn rect(re0: f64, re1: f64, im0: f64, im1: f64) -> SearchRectangle {
        SearchRectangle::new(re0, re1, im0, im1).unwrap()
    }

    #[test]
    fn counts_single_zero() {
        let f = |z: Complex64| z - Complex64::new(1.0, 1.0);
        assert_eq!(count_poles_zeros(&f, &rect(0.0, 2.0, 0.0, 2.0)).unwrap(), 1);
    }

    #[test]
    fn counts_single_pole() {
        let f = |z: Complex64| (z - Complex64::new(1.0, 1.0)).inv();
        assert_eq!(count_poles_zeros(&f, &rect(0.0, 2.0, 0.0, 2.0)).unwrap(), -1);
    }

    #[test]
    fn counts_double_zero_minus_pole() {
        let z0 = Complex64::new(1.0, 1.0);
        let p0 = Complex64::new(0.5, 0.5);
        let f = |z: Complex64| (z - z0) * (z - z0) / (z - p0);
        assert_eq!(count_poles_zeros(&f, &rect(0.0, 2.0, 0.0, 2.0)).unwrap(), 1);
    }

    #[test]
    fn count_is_zero_when_region_is_clean() {
        let f = |z: Complex64| (z - Complex64::new(10.0, 10.0)).inv();
        assert_eq!(count_poles_zeros(&f, &rect(0.0, 2.0, 0.0, 2.0)).unwrap(), 0);
    }

    #[test]
    fn locates_simple_pole() {
        let p0 = Complex64::new(0.5, 0.2);
        let f = |z: Complex64| (z - p0).inv();
        let poles = locate_poles(&f, &rect(0.0, 1.0, 0.0, 1.0), 1e-12, PoleSource::Resolvent)
            .unwrap();
        assert_eq!(poles.len(), 1);
        assert!((poles[0].position - p0).norm() < 1e-10);
        assert_eq!(poles[0].multiplicity, 1);
        assert!((poles[0].residue - Complex64::ONE).norm() < 1e-9);
    }

    #[test]
    fn locates_bose_occupation_pole() {
        // 1/(e^{beta(lambda + Z/2)} - 1) at T = 100 K, lambda = 1 eV: the
        // first pole above the real axis sits at (-2 lambda, 4 pi k T).
        let t_kelvin = 100.0;
        let lambda = 1.0;
        let beta = 1.0 / (KB_EV_PER_K * t_kelvin);
        let f = move |z: Complex64| {
            ((Complex64::new(lambda, 0.0) + 0.5 * z) * beta).exp() - Complex64::ONE
        };
        let b = move |z: Complex64| f(z).inv();
        let kt = KB_EV_PER_K * t_kelvin;
        let expect_im = 4.0 * std::f64::consts::PI * kt;
        let window = rect(-2.0 - 2.0 * kt, -2.0 + 2.0 * kt, expect_im - 2.0 * kt, expect_im + 2.0 * kt);
        let poles = locate_poles(&b, &window, 1e-12, PoleSource::InitialCondition).unwrap();
        assert_eq!(poles.len(), 1);
        let p = poles[0].position;
        assert!((p.re - (-2.0)).abs() < 1e-8 * expect_im);
        assert!(
            ((p.im - expect_im) / expect_im).abs() < 1e-8,
            "im = {}, expected {expect_im}",
            p.im
        );
        // Residue of the occupation factor at any of its poles is 2/beta.
        let expect_res = 2.0 / beta;
        assert!((poles[0].residue - Complex64::new(expect_res, 0.0)).norm() < 1e-8 * expect_res);
    }

    #[test]
    fn locates_double_plus_simple_pole() {
        // Built as a zero-free product so the winding counts are pure pole
        // counts: c / ((z - pd)^2 (z - ps)).
        let pd = Complex64::new(0.3, 0.1);
        let ps = Complex64::new(0.7, 0.05);
        let c = Complex64::new(2.0, 1.0);
        let f = |z: Complex64| c / ((z - pd) * (z - pd) * (z - ps));
        let poles = locate_poles(&f, &rect(0.0, 1.0, 0.01, 0.5), 1e-12, PoleSource::Resolvent)
            .unwrap();
        assert_eq!(poles.len(), 2);
        let double = poles.iter().find(|p| (p.position - pd).norm() < 1e-6).unwrap();
        let simple = poles.iter().find(|p| (p.position - ps).norm() < 1e-6).unwrap();
        assert_eq!(double.multiplicity, 2);
        assert_eq!(simple.multiplicity, 1);
        // Closed forms: residue at ps is c/(ps-pd)^2; at the double pole it
        // is the derivative of c/(z-ps) there, i.e. -c/(pd-ps)^2.
        let expect_simple = c / ((ps - pd) * (ps - pd));
        let expect_double = -c / ((pd - ps) * (pd - ps));
        assert!((simple.residue - expect_simple).norm() < 1e-8 * expect_simple.norm());
        assert!((double.residue - expect_double).norm() < 1e-8 * expect_double.norm());
    }

    #[test]
    fn residue_of_simple_pole_is_one() {
        let z0 = Complex64::new(0.4, 0.3);
        let f = move |z: Complex64| (z - z0).inv();
        let r = residue(&f, z0, 0.1).unwrap();
        assert!((r - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn residue_scales_linearly() {
        let z0 = Complex64::new(-1.0, 2.0);
        let c = Complex64::new(3.0, 2.0);
        let f = move |z: Complex64| c / (z - z0);
        let r = residue(&f, z0, 0.05).unwrap();
        assert!((r - c).norm() < 1e-11);
    }

    #[test]
    fn residue_linearity_with_analytic_addend() {
        let z0 = Complex64::new(0.1, 0.7);
        let a = Complex64::new(2.0, -1.0);
        let f = move |z: Complex64| a / (z - z0) + z * z + Complex64::new(3.0, 0.5);
        let r = residue(&f, z0, 0.2).unwrap();
        assert!((r - a).norm() < 1e-10);
    }

    #[test]
    fn boundary_pole_is_reported() {
        // Pole exactly on the contour: the phase cannot stabilize.
        let f = |z: Complex64| (z - Complex64::new(1.0, 0.0)).inv();
        let r = rect(0.0, 1.0, -0.5, 0.5);
        assert!(count_poles_zeros(&f, &r).is_err());
    }

    #[test]
    fn upper_half_window_shape() {
        let w = SearchRectangle::upper_half(5.0, 1.0).unwrap();
        assert_eq!(w.re_min, -10.0);
        assert_eq!(w.re_max, 10.0);
        assert!(w.im_min > 0.0 && w.im_max == 1.0);
    }
}
