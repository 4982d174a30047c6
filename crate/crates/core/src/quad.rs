//! Gauss-Kronrod quadrature over real intervals, for real- and
//! complex-valued integrands.
//!
//! The adaptive driver keeps a worst-first queue of panels and bisects until
//! the summed error estimate meets the tolerance. Final results are
//! accumulated with compensated summation over panels sorted by position, so
//! the value is independent of refinement order.

use num_complex::Complex64;

/// 15-point Kronrod abscissae (positive half, descending; last entry is 0).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// Embedded 7-point Gauss weights (odd Kronrod indices; last is the center).
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// Result of one Kronrod panel.
#[derive(Debug, Clone, Copy)]
pub struct PanelEval {
    pub value: Complex64,
    pub error: f64,
    pub resabs: f64,
}

/// Evaluate the 15-point Kronrod rule with its embedded Gauss estimate on
/// `[a, b]`. The error is the QUADPACK-rescaled `|K15 - G7|`.
pub fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> PanelEval {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];

    let mut fv = [Complex64::ZERO; 14];
    for k in 0..7 {
        let dx = half * XGK[k];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[k] = f1;
        fv[k + 7] = f2;
        let sum = f1 + f2;
        kronrod += sum * WGK[k];
        resabs += (f1.norm() + f2.norm()) * WGK[k];
        if k % 2 == 1 {
            gauss += sum * WG[k / 2];
        }
    }

    // Scaled deviation of |f| from its mean, for the QUADPACK error model.
    let mean = kronrod * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[7];
    for k in 0..7 {
        resasc += ((fv[k] - mean).norm() + (fv[k + 7] - mean).norm()) * WGK[k];
    }
    resasc *= half.abs();

    let value = kronrod * half;
    let mut err = ((kronrod - gauss) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let abs_scaled = resabs * half.abs();
    if abs_scaled > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_scaled);
    }

    PanelEval {
        value,
        error: err,
        resabs: abs_scaled,
    }
}

/// Outcome of an adaptive integration. `converged` is false when the error
/// estimate still exceeds the tolerance after exhausting the panel budget.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn kahan_sum(segments: &[Segment]) -> (Complex64, f64) {
    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by(|&i, &j| {
        segments[i]
            .a
            .partial_cmp(&segments[j].a)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                segments[i]
                    .b
                    .partial_cmp(&segments[j].b)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    let mut sum = Complex64::ZERO;
    let mut comp = Complex64::ZERO;
    let mut err = 0.0;
    for &i in &order {
        let y = segments[i].value - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        err += segments[i].error;
    }
    (sum, err)
}

fn tolerance_met(err: f64, value_norm: f64, abs_tol: f64, rel_tol: f64) -> bool {
    err <= abs_tol.max(rel_tol * value_norm)
}

/// Adaptive integration starting from the panels delimited by `mesh`
/// (sorted breakpoints, at least two). Bisects the worst panel until the
/// tolerance holds or `max_segments` panels exist.
pub fn adaptive_with_mesh<F: Fn(f64) -> Complex64>(
    f: &F,
    mesh: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> QuadOutcome<Complex64> {
    debug_assert!(mesh.len() >= 2);
    let mut segments: Vec<Segment> = mesh
        .windows(2)
        .map(|w| {
            let p = gk15(f, w[0], w[1]);
            Segment {
                a: w[0],
                b: w[1],
                value: p.value,
                error: p.error,
            }
        })
        .collect();

    loop {
        let (sum, err) = kahan_sum(&segments);
        if tolerance_met(err, sum.norm(), abs_tol, rel_tol) {
            return QuadOutcome {
                value: sum,
                error: err,
                converged: true,
            };
        }
        if segments.len() >= max_segments {
            return QuadOutcome {
                value: sum,
                error: err,
                converged: false,
            };
        }
        // Split the worst panel; ties break on position for determinism.
        let mut worst = 0;
        for i in 1..segments.len() {
            let (ei, ew) = (segments[i].error, segments[worst].error);
            if ei > ew || (ei == ew && segments[i].a < segments[worst].a) {
                worst = i;
            }
        }
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // Panel no longer splittable in f64; put it back and stop.
            segments.push(s);
            let (sum, err) = kahan_sum(&segments);
            return QuadOutcome {
                value: sum,
                error: err,
                converged: tolerance_met(err, sum.norm(), abs_tol, rel_tol),
            };
        }
        for (a, b) in [(s.a, mid), (mid, s.b)] {
            let p = gk15(f, a, b);
            segments.push(Segment {
                a,
                b,
                value: p.value,
                error: p.error,
            });
        }
    }
}

/// Adaptive integration of a complex-valued integrand over `[a, b]`.
pub fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> QuadOutcome<Complex64> {
    adaptive_with_mesh(f, &[a, b], abs_tol, rel_tol, max_segments)
}

/// Adaptive integration of a real-valued integrand over `[a, b]`.
pub fn adaptive_real<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> QuadOutcome<f64> {
    let out = adaptive(&|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol, max_segments);
    QuadOutcome {
        value: out.value.re,
        error: out.error,
        converged: out.converged,
    }
}

/// Breakpoints for an integrand carrying a phase `exp(i rate x)`: panel
/// width is capped at half an oscillation period (`pi / rate`) so a single
/// Kronrod rule resolves each panel, with at least `min_panels` overall.
pub fn oscillation_mesh(
    a: f64,
    b: f64,
    phase_rate: f64,
    min_panels: usize,
    max_panels: usize,
) -> Vec<f64> {
    let span = b - a;
    let mut n = min_panels.max(1);
    if phase_rate > 0.0 {
        let half_period = std::f64::consts::PI / phase_rate;
        let by_osc = (span / half_period).ceil() as usize;
        n = n.max(by_osc);
    }
    n = n.min(max_panels.max(1));
    let mut mesh = Vec::with_capacity(n + 1);
    for i in 0..=n {
        mesh.push(a + span * i as f64 / n as f64);
    }
    mesh
}
