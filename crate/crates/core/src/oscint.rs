//! Direct time-domain evaluation of the fluctuating term.
//!
//! The quantity computed here is the double integral over the wedge
//! `lambda >= 0`, `|nu| <= 2 lambda` (cut off at `omega_max`) of
//! `conj(rho'(lambda, nu)) O'(lambda, nu) exp(i nu t / hbar)`.
//! It is the ground truth against which pole predictions are checked, so it
//! stays a plain (if oscillation-aware) quadrature with an honest error bar
//! and no asymptotic shortcuts.
//!
//! Only `nu` carries a phase, so the integral is arranged with `lambda`
//! innermost: the cross-section `G(nu) = integral of the kernel product over
//! the admissible lambda strip` is time-independent and smooth, and the
//! remaining `nu` integral is evaluated on Kronrod panels no wider than half
//! an oscillation period `pi hbar / t`. A series evaluation builds the `nu`
//! panel set once, caches `G` at every node, and then each time point only
//! re-weights the cached values with fresh phases.

use crate::constants::HBAR_EVS;
use crate::error::{Error, Result};
use crate::quad;
use crate::vanhove::{
    expectation_constant, ExpectationSeries, PointStatus, VanHoveObservable, VanHoveState,
};
use num_complex::Complex64;
use rayon::prelude::*;

/// Tolerances and budgets for the double integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Absolute tolerance on the double integral.
    pub abs_tol: f64,
    /// Relative tolerance on the double integral.
    pub rel_tol: f64,
    /// Extra panel-splitting budget for the `nu` integral beyond the base
    /// oscillation mesh.
    pub max_subdivisions: usize,
    /// Initial panel count of each inner `lambda` integral.
    pub lambda_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 400,
            lambda_panels: 8,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.abs_tol.is_nan() || self.abs_tol <= 0.0 || self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::Validation {
                field: "abs_tol/rel_tol".into(),
                message: "tolerances must be positive".into(),
            });
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Validation {
                field: "max_subdivisions".into(),
                message: "need at least one subdivision".into(),
            });
        }
        if self.lambda_panels < 1 {
            return Err(Error::Validation {
                field: "lambda_panels".into(),
                message: "need at least one lambda panel".into(),
            });
        }
        Ok(())
    }
}

/// One evaluated time point: best value and its error bar.
#[derive(Debug, Clone, Copy)]
pub struct FluctuatingPoint {
    pub value: Complex64,
    pub error: f64,
}

/// Hard cap on `nu` panels; a request beyond this fails the tolerance
/// honestly instead of running away.
const MAX_NU_PANELS: usize = 1 << 16;

/// Kronrod nodes/weights, duplicated from [`quad`] because the panel cache
/// stores raw node values.
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
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

struct Integrand<'a> {
    state: &'a VanHoveState,
    obs: &'a VanHoveObservable,
    omega_max: f64,
    lambda_tol_abs: f64,
    lambda_tol_rel: f64,
    lambda_panels: usize,
}

impl<'a> Integrand<'a> {
    fn new(state: &'a VanHoveState, obs: &'a VanHoveObservable, cfg: &QuadratureConfig) -> Result<Self> {
        if state.omega_max() != obs.omega_max() {
            return Err(Error::Domain(format!(
                "state and observable cutoffs differ: {} vs {}",
                state.omega_max(),
                obs.omega_max()
            )));
        }
        let omega_max = state.omega_max();
        Ok(Self {
            state,
            obs,
            omega_max,
            // The nu span is 2 omega_max; divide the error budget evenly.
            // Cross-section errors from the peak region survive the phase
            // cancellation at late times, so their relative tolerance is
            // pushed far below the requested one.
            lambda_tol_abs: cfg.abs_tol / (8.0 * omega_max),
            lambda_tol_rel: (cfg.rel_tol * 1e-4).max(5e-15),
            lambda_panels: cfg.lambda_panels,
        })
    }

    fn is_zero(&self) -> bool {
        self.state.regular().is_zero() || self.obs.regular().is_zero()
    }

    /// `conj(rho') O'` at a wedge point.
    fn product(&self, lambda: f64, nu: f64) -> Complex64 {
        let rho = self.state.regular().lambda_nu().eval_unchecked(lambda, nu);
        let o = self.obs.regular().lambda_nu().eval_unchecked(lambda, nu);
        rho.conj() * o
    }

    /// Time-independent cross-section: integral of the kernel product over
    /// the lambda strip admissible at this `nu`.
    fn cross_section(&self, nu: f64) -> (Complex64, f64) {
        let lo = 0.5 * nu.abs();
        let hi = self.omega_max - lo;
        if hi <= lo {
            return (Complex64::ZERO, 0.0);
        }
        let n = self.lambda_panels.max(1);
        let mesh: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let out = quad::adaptive_with_mesh(
            &|lambda| self.product(lambda, nu),
            &mesh,
            self.lambda_tol_abs,
            self.lambda_tol_rel,
            n + 64,
        );
        (out.value, out.error)
    }
}

/// One `nu` panel with its 15 cached cross-section values.
#[derive(Debug, Clone)]
struct NuPanel {
    a: f64,
    b: f64,
    /// Node layout: index 0..7 are `center - h x_k`, 7 is the center
    /// (x_7 = 0), 8..15 are `center + h x_{k-8}`.
    g: [Complex64; 15],
    nodes: [f64; 15],
    g_err: f64,
}

impl NuPanel {
    fn build(integrand: &Integrand<'_>, a: f64, b: f64) -> Self {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut g = [Complex64::ZERO; 15];
        let mut nodes = [0.0; 15];
        let mut g_err = 0.0;
        for k in 0..8 {
            let dx = half * XGK[k];
            let (v, e) = integrand.cross_section(center - dx);
            g[k] = v;
            nodes[k] = center - dx;
            g_err += e * WGK[k];
            if k < 7 {
                let (v2, e2) = integrand.cross_section(center + dx);
                g[8 + k] = v2;
                nodes[8 + k] = center + dx;
                g_err += e2 * WGK[k];
            }
        }
        Self {
            a,
            b,
            g,
            nodes,
            g_err,
        }
    }

    /// Kronrod/Gauss sums of `G(nu) exp(i nu rate)` over this panel.
    fn evaluate(&self, rate: f64) -> (Complex64, f64) {
        let half = 0.5 * (self.b - self.a);
        let phased = |i: usize| self.g[i] * Complex64::new(0.0, self.nodes[i] * rate).exp();
        let fc = phased(7);
        let mut kronrod = fc * WGK[7];
        let mut gauss = fc * WG[3];
        for k in 0..7 {
            let sum = phased(k) + phased(8 + k);
            kronrod += sum * WGK[k];
            if k % 2 == 1 {
                gauss += sum * WG[k / 2];
            }
        }
        let value = kronrod * half;
        let error = ((kronrod - gauss) * half).norm() + self.g_err * half;
        (value, error)
    }
}

/// The `nu` panel set for one state/observable pair, shared across time
/// points.
struct PanelSet {
    panels: Vec<NuPanel>,
}

#[derive(Debug, Clone, Copy)]
struct Evaluation {
    value: Complex64,
    error: f64,
    converged: bool,
}

impl PanelSet {
    /// Build a panel set resolving the kernel structure (adaptive at zero
    /// phase) and the fastest requested oscillation (`max_rate` in rad/eV).
    fn build(integrand: &Integrand<'_>, cfg: &QuadratureConfig, max_rate: f64) -> Self {
        let w = integrand.omega_max;
        // Base mesh: split at nu = 0 where the lambda limits have a kink.
        let base = [-w, 0.0, w];
        let mut panels: Vec<NuPanel> = base
            .windows(2)
            .map(|s| NuPanel::build(integrand, s[0], s[1]))
            .collect();

        // Shape refinement at zero phase.
        let budget = 2 + cfg.max_subdivisions;
        loop {
            let (value, error) = sum_panels(&panels, 0.0).into_pair();
            if error <= cfg.abs_tol.max(cfg.rel_tol * value.norm()) || panels.len() >= budget {
                break;
            }
            if !bisect_worst(&mut panels, integrand, 0.0) {
                break;
            }
        }

        // Oscillation split: no panel wider than half a period at max_rate.
        if max_rate > 0.0 {
            let half_period = std::f64::consts::PI / max_rate;
            let mut split: Vec<NuPanel> = Vec::with_capacity(panels.len());
            for p in panels {
                let width = p.b - p.a;
                let pieces = ((width / half_period).ceil() as usize).max(1);
                if pieces == 1 {
                    split.push(p);
                } else {
                    let remaining = MAX_NU_PANELS.saturating_sub(split.len()).max(1);
                    let pieces = pieces.min(remaining);
                    for i in 0..pieces {
                        let a = p.a + width * i as f64 / pieces as f64;
                        let b = p.a + width * (i + 1) as f64 / pieces as f64;
                        split.push(NuPanel::build(integrand, a, b));
                    }
                }
            }
            panels = split;
        }

        Self { panels }
    }

    fn evaluate(&self, rate: f64, cfg: &QuadratureConfig) -> Evaluation {
        let sum = sum_panels(&self.panels, rate);
        let (value, error) = sum.into_pair();
        Evaluation {
            value,
            error,
            converged: error <= cfg.abs_tol.max(cfg.rel_tol * value.norm()),
        }
    }

    /// Refine against a single rate until the tolerance holds or the budget
    /// runs out. Used by single-point evaluation only.
    fn refine_at(&mut self, integrand: &Integrand<'_>, rate: f64, cfg: &QuadratureConfig) -> Evaluation {
        let budget = (self.panels.len() + cfg.max_subdivisions).min(MAX_NU_PANELS);
        loop {
            let out = self.evaluate(rate, cfg);
            if out.converged || self.panels.len() >= budget {
                return out;
            }
            if !bisect_worst(&mut self.panels, integrand, rate) {
                return out;
            }
        }
    }
}

struct PanelSum {
    value: Complex64,
    error: f64,
}

impl PanelSum {
    fn into_pair(self) -> (Complex64, f64) {
        (self.value, self.error)
    }
}

/// Compensated sum over panels in position order, so the result does not
/// depend on refinement history or thread count.
fn sum_panels(panels: &[NuPanel], rate: f64) -> PanelSum {
    let mut order: Vec<usize> = (0..panels.len()).collect();
    order.sort_by(|&i, &j| panels[i].a.partial_cmp(&panels[j].a).unwrap());
    let mut sum = Complex64::ZERO;
    let mut comp = Complex64::ZERO;
    let mut error = 0.0;
    for &i in &order {
        let (v, e) = panels[i].evaluate(rate);
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        error += e;
    }
    PanelSum { value: sum, error }
}

/// Bisect the panel with the largest error at the given rate. Returns false
/// when the worst panel cannot be split further.
fn bisect_worst(panels: &mut Vec<NuPanel>, integrand: &Integrand<'_>, rate: f64) -> bool {
    let mut worst = 0;
    let mut worst_err = -1.0;
    for (i, p) in panels.iter().enumerate() {
        let (_, e) = p.evaluate(rate);
        if e > worst_err || (e == worst_err && p.a < panels[worst].a) {
            worst = i;
            worst_err = e;
        }
    }
    let p = panels.swap_remove(worst);
    let mid = 0.5 * (p.a + p.b);
    if mid <= p.a || mid >= p.b {
        panels.push(p);
        return false;
    }
    panels.push(NuPanel::build(integrand, p.a, mid));
    panels.push(NuPanel::build(integrand, mid, p.b));
    true
}

/// The fluctuating term at a single time, in seconds (`t >= 0`; only the
/// decaying branch is treated). Fails with the best estimate attached when
/// the error bar cannot be brought under tolerance.
pub fn fluctuating_term(
    state: &VanHoveState,
    obs: &VanHoveObservable,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<FluctuatingPoint> {
    cfg.validate()?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    let integrand = Integrand::new(state, obs, cfg)?;
    if integrand.is_zero() {
        return Ok(FluctuatingPoint {
            value: Complex64::ZERO,
            error: 0.0,
        });
    }
    let rate = t / HBAR_EVS;
    let mut panels = PanelSet::build(&integrand, cfg, rate);
    let out = panels.refine_at(&integrand, rate, cfg);
    if out.converged {
        Ok(FluctuatingPoint {
            value: out.value,
            error: out.error,
        })
    } else {
        Err(Error::OscillatoryConvergence {
            best: out.value,
            error_bar: out.error,
            required: cfg.abs_tol.max(cfg.rel_tol * out.value.norm()),
        })
    }
}

/// The fluctuating term over a strictly increasing time grid. The panel set
/// and its cross-section values are built once (sized for the fastest
/// oscillation in the grid) and every time point re-weights them; points are
/// independent and evaluated in parallel, each carrying its own convergence
/// tag instead of aborting the series.
pub fn fluctuating_series(
    state: &VanHoveState,
    obs: &VanHoveObservable,
    times: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ExpectationSeries> {
    cfg.validate()?;
    if times.is_empty() {
        return Err(Error::Domain("series needs at least one time".into()));
    }
    if times[0] < 0.0 || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("series times must be finite and >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("series times must be strictly increasing".into()));
    }
    let constant = expectation_constant(state, obs)?;
    let integrand = Integrand::new(state, obs, cfg)?;

    if integrand.is_zero() {
        return ExpectationSeries::new(
            times.to_vec(),
            vec![Complex64::ZERO; times.len()],
            vec![0.0; times.len()],
            vec![PointStatus::Converged; times.len()],
            constant,
        );
    }

    let max_rate = times.last().unwrap() / HBAR_EVS;
    let panels = PanelSet::build(&integrand, cfg, max_rate);
    let points: Vec<Evaluation> = times
        .par_iter()
        .map(|&t| panels.evaluate(t / HBAR_EVS, cfg))
        .collect();

    let values = points.iter().map(|p| p.value).collect();
    let errors = points.iter().map(|p| p.error).collect();
    let status = points
        .iter()
        .map(|p| {
            if p.converged {
                PointStatus::Converged
            } else {
                PointStatus::Unconverged
            }
        })
        .collect();
    ExpectationSeries::new(times.to_vec(), values, errors, status, constant)
}

/// Full expectation value at time `t`: constant part plus fluctuating term.
pub fn full_expectation(
    state: &VanHoveState,
    obs: &VanHoveObservable,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let fluct = fluctuating_term(state, obs, t, cfg)?;
    Ok(fluct.value + expectation_constant(state, obs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::HBAR_EVS;
    use crate::kernel::{KernelForm, LambdaProfile, RegularKernel};
    use crate::vanhove::ScalarField;

    fn lorentzian_pair(gamma: f64, omega_max: f64) -> (VanHoveState, VanHoveObservable) {
        let state = VanHoveState::new(
            ScalarField::custom(move |w| (-w).exp() / (1.0 - (-omega_max).exp())),
            RegularKernel::new(
                KernelForm::LorentzianNu {
                    gamma,
                    profile: LambdaProfile::GaussianBump {
                        center: 1.0,
                        width: 0.2,
                    },
                    amplitude: 1.0,
                },
                omega_max,
            )
            .unwrap(),
        )
        .unwrap();
        let obs = VanHoveObservable::new(
            ScalarField::constant(1.0),
            RegularKernel::custom(|_, _| Complex64::ONE, 1.0, omega_max).unwrap(),
        )
        .unwrap();
        (state, obs)
    }

    #[test]
    fn zero_regular_parts_give_zero() {
        let state =
            VanHoveState::new(ScalarField::exponential(1.0), RegularKernel::zero(50.0)).unwrap();
        let obs =
            VanHoveObservable::new(ScalarField::constant(1.0), RegularKernel::zero(50.0)).unwrap();
        let cfg = QuadratureConfig::default();
        for &t in &[0.0, 1e-15, 3e-14] {
            let p = fluctuating_term(&state, &obs, t, &cfg).unwrap();
            assert_eq!(p.value, Complex64::ZERO);
        }
    }

    #[test]
    fn negative_time_rejected() {
        let (state, obs) = lorentzian_pair(0.1, 4.0);
        let cfg = QuadratureConfig::default();
        assert!(fluctuating_term(&state, &obs, -1e-16, &cfg).is_err());
    }

    #[test]
    fn lorentzian_decays_exponentially() {
        // Fourier transform of the Lorentzian: f(10 t_D) / f(0) ~ e^{-10}.
        let gamma = 0.1;
        let (state, obs) = lorentzian_pair(gamma, 4.0);
        let cfg = QuadratureConfig {
            abs_tol: 1e-11,
            ..QuadratureConfig::default()
        };
        let t_d = HBAR_EVS / gamma;
        let f0 = fluctuating_term(&state, &obs, 0.0, &cfg).unwrap();
        let f10 = fluctuating_term(&state, &obs, 10.0 * t_d, &cfg).unwrap();
        let ratio = f10.value.norm() / f0.value.norm();
        let expect = (-10.0f64).exp();
        assert!(
            (ratio - expect).abs() < 0.2 * expect,
            "ratio {ratio:.4e} vs e^-10 {expect:.4e}"
        );
    }

    /// Independent oracle: 2-D trapezoid in the original spectrum
    /// coordinates on an n x n grid.
    fn trapezoid_oracle(
        state: &VanHoveState,
        obs: &VanHoveObservable,
        t: f64,
        n: usize,
    ) -> Complex64 {
        let omega_max = state.omega_max();
        let h = omega_max / (n - 1) as f64;
        let phase = t / HBAR_EVS;
        let mut sum = Complex64::ZERO;
        for i in 0..n {
            let wi = i as f64 * h;
            let ci = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            for j in 0..n {
                let wj = j as f64 * h;
                let cj = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                let q = state.regular().eval(wi, wj).conj() * obs.regular().eval(wi, wj);
                sum += q * Complex64::new(0.0, (wi - wj) * phase).exp() * (ci * cj);
            }
        }
        sum * h * h
    }

    #[test]
    fn matches_brute_force_grid_at_t_zero() {
        let (state, obs) = lorentzian_pair(0.1, 4.0);
        let cfg = QuadratureConfig::default();
        let adaptive = fluctuating_term(&state, &obs, 0.0, &cfg).unwrap();
        let brute = trapezoid_oracle(&state, &obs, 0.0, 400);
        let rel = (adaptive.value - brute).norm() / brute.norm();
        assert!(rel < 1e-4, "relative difference {rel:.3e}");
    }

    #[test]
    fn matches_refined_grid_within_error_bar_at_random_times() {
        let (state, obs) = lorentzian_pair(0.1, 4.0);
        let cfg = QuadratureConfig::default();
        let t_d = HBAR_EVS / 0.1;
        // Fixed "random" draws, kept below moderate oscillation so the
        // 4000-point trapezoid stays trustworthy.
        for &f in &[0.13, 0.71, 1.42, 2.33, 3.05] {
            let t = f * t_d;
            let adaptive = fluctuating_term(&state, &obs, t, &cfg).unwrap();
            let coarse = trapezoid_oracle(&state, &obs, t, 2000);
            let fine = trapezoid_oracle(&state, &obs, t, 4000);
            let grid_err = (fine - coarse).norm();
            let diff = (adaptive.value - fine).norm();
            assert!(
                diff <= adaptive.error + grid_err + 1e-12,
                "t = {f} t_D: diff {diff:.3e}, bar {:.3e}, grid err {grid_err:.3e}",
                adaptive.error
            );
        }
    }

    #[test]
    fn series_envelope_nonincreasing_past_two_lifetimes() {
        let gamma = 0.1;
        let (state, obs) = lorentzian_pair(gamma, 4.0);
        let cfg = QuadratureConfig {
            abs_tol: 1e-12,
            ..QuadratureConfig::default()
        };
        let t_d = HBAR_EVS / gamma;
        let times: Vec<f64> = (0..64).map(|i| i as f64 * 20.0 * t_d / 63.0).collect();
        let series = fluctuating_series(&state, &obs, &times, &cfg).unwrap();
        for i in 0..series.len() - 1 {
            if series.times()[i] >= 2.0 * t_d {
                let a = series.values()[i].norm();
                let b = series.values()[i + 1].norm();
                assert!(b <= a * 1.05, "ripple at index {i}: {b:.3e} > 1.05 * {a:.3e}");
            }
        }
        assert!(series.unconverged_indices().is_empty());
    }

    #[test]
    fn gaussian_kernel_matches_gaussian_envelope() {
        let sigma = 0.2;
        let omega_max: f64 = 4.0;
        let state = VanHoveState::new(
            ScalarField::custom(move |w| (-w).exp() / (1.0 - (-omega_max).exp())),
            RegularKernel::new(
                KernelForm::GaussianNu {
                    sigma,
                    profile: LambdaProfile::GaussianBump {
                        center: 1.0,
                        width: 0.2,
                    },
                    amplitude: 1.0,
                },
                omega_max,
            )
            .unwrap(),
        )
        .unwrap();
        let obs = VanHoveObservable::new(
            ScalarField::constant(1.0),
            RegularKernel::custom(|_, _| Complex64::ONE, 1.0, omega_max).unwrap(),
        )
        .unwrap();
        let cfg = QuadratureConfig::default();
        let tau = HBAR_EVS / sigma;
        let times: Vec<f64> = (0..24).map(|i| i as f64 * 5.2 * tau / 23.0).collect();
        let series = fluctuating_series(&state, &obs, &times, &cfg).unwrap();
        let c = series.values()[0].norm();
        for (i, &t) in series.times().iter().enumerate() {
            let predicted = c * (-0.5 * (sigma * t / HBAR_EVS).powi(2)).exp();
            if predicted > 1e-6 * c {
                let got = series.values()[i].norm();
                assert!(
                    (got - predicted).abs() <= 0.1 * predicted,
                    "t/tau = {:.2}: got {got:.4e}, predicted {predicted:.4e}",
                    t / tau
                );
            }
        }
    }

    #[test]
    fn riemann_lebesgue_suppression_for_builtin_families() {
        let omega_max: f64 = 4.0;
        let singular = move |w: f64| (-w).exp() / (1.0 - (-omega_max).exp());
        let kernels = [
            RegularKernel::new(
                KernelForm::LorentzianNu {
                    gamma: 0.1,
                    profile: LambdaProfile::GaussianBump {
                        center: 1.0,
                        width: 0.2,
                    },
                    amplitude: 1.0,
                },
                omega_max,
            )
            .unwrap(),
            RegularKernel::new(
                KernelForm::GaussianNu {
                    sigma: 0.2,
                    profile: LambdaProfile::GaussianBump {
                        center: 1.0,
                        width: 0.2,
                    },
                    amplitude: 1.0,
                },
                omega_max,
            )
            .unwrap(),
            RegularKernel::new(
                KernelForm::Separable {
                    factor: crate::kernel::SeparableFactor::GaussianBump {
                        center: 1.0,
                        width: 0.3,
                        amplitude: 1.0,
                    },
                },
                omega_max,
            )
            .unwrap(),
        ];
        let cfg = QuadratureConfig {
            abs_tol: 1e-12,
            ..QuadratureConfig::default()
        };
        for kernel in kernels {
            let tau = kernel.characteristic_time().unwrap();
            let state = VanHoveState::new(ScalarField::custom(singular), kernel).unwrap();
            let obs = VanHoveObservable::new(
                ScalarField::constant(1.0),
                RegularKernel::custom(|_, _| Complex64::ONE, 1.0, omega_max).unwrap(),
            )
            .unwrap();
            let f0 = fluctuating_term(&state, &obs, 0.0, &cfg).unwrap().value.norm();
            for &mult in &[10.0, 12.0, 15.0] {
                let ft = fluctuating_term(&state, &obs, mult * tau, &cfg)
                    .unwrap()
                    .value
                    .norm();
                assert!(
                    ft < 1e-3 * f0,
                    "{:?}: |f({mult} tau)| = {ft:.3e} vs 1e-3 |f(0)| = {:.3e}",
                    state.regular().form(),
                    1e-3 * f0
                );
            }
        }
    }

    #[test]
    fn hermitian_pair_gives_real_expectation() {
        let (state, obs) = lorentzian_pair(0.1, 4.0);
        let cfg = QuadratureConfig {
            abs_tol: 1e-11,
            ..QuadratureConfig::default()
        };
        let t_d = HBAR_EVS / 0.1;
        for &t in &[0.0, 0.7 * t_d, 3.1 * t_d] {
            let total = full_expectation(&state, &obs, t, &cfg).unwrap();
            assert!(
                total.im.abs() <= 1e-10 * total.norm(),
                "imaginary part {:.3e} vs magnitude {:.3e}",
                total.im,
                total.norm()
            );
        }
    }

    #[test]
    fn series_with_zero_kernels_is_all_zero() {
        let state =
            VanHoveState::new(ScalarField::exponential(1.0), RegularKernel::zero(50.0)).unwrap();
        let obs = VanHoveObservable::new(
            ScalarField::power(1.0),
            RegularKernel::zero(50.0),
        )
        .unwrap();
        let times = vec![0.0, 1e-15, 2e-15];
        let series =
            fluctuating_series(&state, &obs, &times, &QuadratureConfig::default()).unwrap();
        assert!(series.values().iter().all(|v| *v == Complex64::ZERO));
        assert!((series.constant_part() - 1.0).abs() < 1e-6);
    }
}
