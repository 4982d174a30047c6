//! Regular (smooth) two-point kernels `K(omega, omega')`.
//!
//! A kernel is the regular part of a state or observable. The built-in
//! analytic families are all products of a profile in the mean energy
//! `lambda` and a factor in the difference `nu`; their complex continuation
//! in `nu` is known in closed form, which is what the pole route consumes.
//! Grid kernels interpolate samples bilinearly and can only be continued
//! numerically (see [`crate::cpoles::continue_from_samples`]).

use crate::constants::HBAR_EVS;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

/// Profile in the mean energy `lambda`, multiplying the `nu` factor of the
/// analytic families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaProfile {
    /// Identically one.
    Uniform,
    /// Normalized Gaussian bump `exp(-(lambda-center)^2 / 2 width^2) / (width sqrt(2 pi))`.
    GaussianBump { center: f64, width: f64 },
}

impl LambdaProfile {
    pub fn eval(&self, lambda: f64) -> f64 {
        match self {
            LambdaProfile::Uniform => 1.0,
            LambdaProfile::GaussianBump { center, width } => {
                let z = (lambda - center) / width;
                (-0.5 * z * z).exp() / (width * TAU.sqrt())
            }
        }
    }

    fn peak(&self) -> f64 {
        match self {
            LambdaProfile::Uniform => 1.0,
            LambdaProfile::GaussianBump { width, .. } => 1.0 / (width * TAU.sqrt()),
        }
    }

    fn validate(&self) -> Result<()> {
        if let LambdaProfile::GaussianBump { center, width } = self {
            if !center.is_finite() || !width.is_finite() || *width <= 0.0 {
                return Err(Error::Validation {
                    field: "profile".into(),
                    message: format!("bad Gaussian bump: center={center}, width={width}"),
                });
            }
        }
        Ok(())
    }
}

/// One-point factor of a separable kernel `K(omega, omega') = u(omega) u(omega')`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeparableFactor {
    Constant { value: f64 },
    GaussianBump { center: f64, width: f64, amplitude: f64 },
}

impl SeparableFactor {
    pub fn eval(&self, omega: f64) -> f64 {
        match self {
            SeparableFactor::Constant { value } => *value,
            SeparableFactor::GaussianBump {
                center,
                width,
                amplitude,
            } => {
                let z = (omega - center) / width;
                amplitude * (-0.5 * z * z).exp()
            }
        }
    }

    fn peak(&self) -> f64 {
        match self {
            SeparableFactor::Constant { value } => value.abs(),
            SeparableFactor::GaussianBump { amplitude, .. } => amplitude.abs(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SeparableFactor::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::Validation {
                        field: "factor".into(),
                        message: "non-finite constant factor".into(),
                    });
                }
            }
            SeparableFactor::GaussianBump {
                center,
                width,
                amplitude,
            } => {
                if !(center.is_finite() && width.is_finite() && amplitude.is_finite())
                    || *width <= 0.0
                {
                    return Err(Error::Validation {
                        field: "factor".into(),
                        message: format!(
                            "bad Gaussian factor: center={center}, width={width}, amplitude={amplitude}"
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Uniformly spaced square grid of kernel samples on `[0, omega_max]^2`,
/// interpolated bilinearly.
#[derive(Clone)]
pub struct GridKernel {
    n: usize,
    spacing: f64,
    values: Vec<Complex64>,
}

impl GridKernel {
    /// `values` is row-major with `values[i * n + j] = K(i h, j h)` and
    /// `h = omega_max / (n - 1)`.
    pub fn new(n: usize, omega_max: f64, values: Vec<Complex64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("grid kernel needs at least 2x2 samples".into()));
        }
        if values.len() != n * n {
            return Err(Error::Domain(format!(
                "grid kernel expects {} samples, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(Self {
            n,
            spacing: omega_max / (n - 1) as f64,
            values,
        })
    }

    fn eval(&self, omega: f64, omega_prime: f64) -> Complex64 {
        let fi = (omega / self.spacing).clamp(0.0, (self.n - 1) as f64);
        let fj = (omega_prime / self.spacing).clamp(0.0, (self.n - 1) as f64);
        let i = (fi.floor() as usize).min(self.n - 2);
        let j = (fj.floor() as usize).min(self.n - 2);
        let tx = fi - i as f64;
        let ty = fj - j as f64;
        let v00 = self.values[i * self.n + j];
        let v01 = self.values[i * self.n + j + 1];
        let v10 = self.values[(i + 1) * self.n + j];
        let v11 = self.values[(i + 1) * self.n + j + 1];
        v00 * (1.0 - tx) * (1.0 - ty) + v01 * (1.0 - tx) * ty + v10 * tx * (1.0 - ty) + v11 * tx * ty
    }

    fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn hermitized(&self) -> Self {
        let mut values = self.values.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self.values[i * self.n + j];
                let b = self.values[j * self.n + i].conj();
                values[i * self.n + j] = 0.5 * (a + b);
            }
        }
        Self {
            n: self.n,
            spacing: self.spacing,
            values,
        }
    }
}

impl fmt::Debug for GridKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridKernel")
            .field("n", &self.n)
            .field("spacing", &self.spacing)
            .finish()
    }
}

type KernelFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// The evaluator behind a [`RegularKernel`].
#[derive(Clone)]
pub enum KernelForm {
    /// Identically zero.
    Zero,
    /// `amplitude * profile(lambda) * gamma^2 / (nu^2 + gamma^2)`.
    LorentzianNu {
        gamma: f64,
        profile: LambdaProfile,
        amplitude: f64,
    },
    /// `amplitude * profile(lambda) * exp(-nu^2 / 2 sigma^2)`.
    GaussianNu {
        sigma: f64,
        profile: LambdaProfile,
        amplitude: f64,
    },
    /// `u(omega) u(omega')`.
    Separable { factor: SeparableFactor },
    /// Bilinear interpolation of samples.
    Grid(GridKernel),
    /// Arbitrary closure, for tests and embedding.
    Custom { f: KernelFn, bound: f64 },
}

impl fmt::Debug for KernelForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelForm::Zero => write!(f, "Zero"),
            KernelForm::LorentzianNu {
                gamma, amplitude, ..
            } => write!(f, "LorentzianNu {{ gamma: {gamma}, amplitude: {amplitude} }}"),
            KernelForm::GaussianNu {
                sigma, amplitude, ..
            } => write!(f, "GaussianNu {{ sigma: {sigma}, amplitude: {amplitude} }}"),
            KernelForm::Separable { factor } => write!(f, "Separable {{ {factor:?} }}"),
            KernelForm::Grid(g) => write!(f, "{g:?}"),
            KernelForm::Custom { bound, .. } => write!(f, "Custom {{ bound: {bound} }}"),
        }
    }
}

/// A bounded kernel on `[0, omega_max]^2`. States and observables require it
/// to be Hermitian, `K(omega', omega) = conj K(omega, omega')`.
#[derive(Debug, Clone)]
pub struct RegularKernel {
    form: KernelForm,
    omega_max: f64,
    bound: f64,
}

impl RegularKernel {
    pub fn new(form: KernelForm, omega_max: f64) -> Result<Self> {
        if !omega_max.is_finite() || omega_max <= 0.0 {
            return Err(Error::Validation {
                field: "omega_max".into(),
                message: format!("spectrum cutoff must be positive, got {omega_max}"),
            });
        }
        let bound = match &form {
            KernelForm::Zero => 0.0,
            KernelForm::LorentzianNu {
                gamma,
                profile,
                amplitude,
            } => {
                if !gamma.is_finite() || *gamma <= 0.0 {
                    return Err(Error::Validation {
                        field: "gamma".into(),
                        message: format!("Lorentzian width must be positive, got {gamma}"),
                    });
                }
                profile.validate()?;
                amplitude.abs() * profile.peak()
            }
            KernelForm::GaussianNu {
                sigma,
                profile,
                amplitude,
            } => {
                if !sigma.is_finite() || *sigma <= 0.0 {
                    return Err(Error::Validation {
                        field: "sigma".into(),
                        message: format!("Gaussian width must be positive, got {sigma}"),
                    });
                }
                profile.validate()?;
                amplitude.abs() * profile.peak()
            }
            KernelForm::Separable { factor } => {
                factor.validate()?;
                factor.peak() * factor.peak()
            }
            KernelForm::Grid(g) => g.max_abs(),
            KernelForm::Custom { bound, .. } => *bound,
        };
        Ok(Self {
            form,
            omega_max,
            bound,
        })
    }

    pub fn zero(omega_max: f64) -> Self {
        Self {
            form: KernelForm::Zero,
            omega_max,
            bound: 0.0,
        }
    }

    pub fn custom<F>(f: F, bound: f64, omega_max: f64) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(
            KernelForm::Custom {
                f: Arc::new(f),
                bound,
            },
            omega_max,
        )
    }

    pub fn form(&self) -> &KernelForm {
        &self.form
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.form, KernelForm::Zero)
    }

    /// Evaluate at spectrum coordinates. The caller keeps both arguments in
    /// `[0, omega_max]`; analytic families extend smoothly, grids clamp.
    pub fn eval(&self, omega: f64, omega_prime: f64) -> Complex64 {
        match &self.form {
            KernelForm::Zero => Complex64::ZERO,
            KernelForm::LorentzianNu {
                gamma,
                profile,
                amplitude,
            } => {
                let lambda = 0.5 * (omega + omega_prime);
                let nu = omega - omega_prime;
                let g2 = gamma * gamma;
                Complex64::new(amplitude * profile.eval(lambda) * g2 / (nu * nu + g2), 0.0)
            }
            KernelForm::GaussianNu {
                sigma,
                profile,
                amplitude,
            } => {
                let lambda = 0.5 * (omega + omega_prime);
                let nu = omega - omega_prime;
                let z = nu / sigma;
                Complex64::new(
                    amplitude * profile.eval(lambda) * (-0.5 * z * z).exp(),
                    0.0,
                )
            }
            KernelForm::Separable { factor } => {
                Complex64::new(factor.eval(omega) * factor.eval(omega_prime), 0.0)
            }
            KernelForm::Grid(g) => g.eval(omega, omega_prime),
            KernelForm::Custom { f, .. } => f(omega, omega_prime),
        }
    }

    /// The same kernel viewed in mean/difference coordinates.
    pub fn lambda_nu(&self) -> LambdaNuKernel<'_> {
        LambdaNuKernel { kernel: self }
    }

    /// Closed-form analytic continuation of the `nu` dependence, where the
    /// family has one. The returned function may differ from the kernel by a
    /// positive lambda-dependent factor; its pole set in `nu` is what
    /// matters. `None` for grids and custom closures.
    pub fn nu_continuation(&self) -> Option<Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>> {
        match &self.form {
            KernelForm::Zero => None,
            KernelForm::LorentzianNu { gamma, .. } => {
                let g2 = gamma * gamma;
                Some(Arc::new(move |z: Complex64| g2 / (z * z + g2)))
            }
            KernelForm::GaussianNu { sigma, .. } => {
                let s2 = 2.0 * sigma * sigma;
                Some(Arc::new(move |z: Complex64| (-z * z / s2).exp()))
            }
            KernelForm::Separable { factor } => match factor {
                SeparableFactor::Constant { .. } => Some(Arc::new(|_| Complex64::ONE)),
                SeparableFactor::GaussianBump { width, .. } => {
                    // u(l + nu/2) u(l - nu/2) factorizes; the nu part is
                    // exp(-nu^2 / 4 width^2) independent of lambda.
                    let s2 = 4.0 * width * width;
                    Some(Arc::new(move |z: Complex64| (-z * z / s2).exp()))
                }
            },
            KernelForm::Grid(_) | KernelForm::Custom { .. } => None,
        }
    }

    /// Node spacing of a grid-sampled kernel.
    pub fn grid_spacing(&self) -> Option<f64> {
        match &self.form {
            KernelForm::Grid(g) => Some(g.spacing),
            _ => None,
        }
    }

    /// Characteristic width of the `nu` dependence in eV, when defined.
    pub fn nu_scale(&self) -> Option<f64> {
        match &self.form {
            KernelForm::LorentzianNu { gamma, .. } => Some(*gamma),
            KernelForm::GaussianNu { sigma, .. } => Some(*sigma),
            KernelForm::Separable { factor } => match factor {
                SeparableFactor::Constant { .. } => None,
                SeparableFactor::GaussianBump { width, .. } => Some(std::f64::consts::SQRT_2 * width),
            },
            _ => None,
        }
    }

    /// `hbar / nu_scale`, the time over which the fluctuating term built
    /// from this kernel decays appreciably.
    pub fn characteristic_time(&self) -> Option<f64> {
        self.nu_scale().map(|s| HBAR_EVS / s)
    }

    /// Largest Hermiticity defect `|K(w,w') - conj K(w',w)|` over an
    /// `n x n` probe grid.
    pub fn hermiticity_defect(&self, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let w = self.omega_max * (i as f64 + 0.5) / n as f64;
                let wp = self.omega_max * (j as f64 + 0.5) / n as f64;
                let d = (self.eval(w, wp) - self.eval(wp, w).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// View of a kernel in mean/difference coordinates,
/// `K'(lambda, nu) = K(lambda + nu/2, lambda - nu/2)`.
#[derive(Debug, Clone, Copy)]
pub struct LambdaNuKernel<'a> {
    kernel: &'a RegularKernel,
}

impl LambdaNuKernel<'_> {
    /// Checked evaluation: the point must lie in the image of
    /// `[0, omega_max]^2`.
    pub fn eval(&self, lambda: f64, nu: f64) -> Result<Complex64> {
        let half = 0.5 * nu.abs();
        if lambda < 0.0 || half > lambda || lambda + half > self.kernel.omega_max {
            return Err(Error::Domain(format!(
                "(lambda, nu) = ({lambda}, {nu}) outside the transformed domain (omega_max = {})",
                self.kernel.omega_max
            )));
        }
        Ok(self.eval_unchecked(lambda, nu))
    }

    /// Unchecked evaluation for quadrature inner loops.
    pub fn eval_unchecked(&self, lambda: f64, nu: f64) -> Complex64 {
        self.kernel.eval(lambda + 0.5 * nu, lambda - 0.5 * nu)
    }

    /// Half-width of the admissible `nu` interval at this `lambda`.
    pub fn nu_halfwidth(&self, lambda: f64) -> f64 {
        (2.0 * lambda.min(self.kernel.omega_max - lambda)).max(0.0)
    }
}

/// Hermitian projection `(K(w,w') + conj K(w',w)) / 2`. Analytic families
/// are Hermitian by construction and pass through unchanged; grids are
/// symmetrized eagerly, closures lazily.
pub fn hermitize(kernel: &RegularKernel) -> RegularKernel {
    match &kernel.form {
        KernelForm::Zero
        | KernelForm::LorentzianNu { .. }
        | KernelForm::GaussianNu { .. }
        | KernelForm::Separable { .. } => kernel.clone(),
        KernelForm::Grid(g) => RegularKernel {
            form: KernelForm::Grid(g.hermitized()),
            omega_max: kernel.omega_max,
            bound: kernel.bound,
        },
        KernelForm::Custom { f, bound } => {
            let f = Arc::clone(f);
            RegularKernel {
                form: KernelForm::Custom {
                    f: Arc::new(move |w, wp| 0.5 * (f(w, wp) + f(wp, w).conj())),
                    bound: *bound,
                },
                omega_max: kernel.omega_max,
                bound: kernel.bound,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn custom(f: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static) -> RegularKernel {
        RegularKernel::custom(f, 100.0, 10.0).unwrap()
    }

    #[test]
    fn lambda_nu_substitution_difference() {
        // K = omega - omega' becomes nu.
        let k = custom(|w, wp| Complex64::new(w - wp, 0.0));
        let v = k.lambda_nu().eval(2.0, 1.0).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12 && v.im == 0.0);
    }

    #[test]
    fn lambda_nu_substitution_sum() {
        // K = omega + omega' becomes 2 lambda.
        let k = custom(|w, wp| Complex64::new(w + wp, 0.0));
        let v = k.lambda_nu().eval(2.0, 1.0).unwrap();
        assert!((v.re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_nu_substitution_product() {
        // K = omega * omega' becomes lambda^2 - nu^2/4.
        let k = custom(|w, wp| Complex64::new(w * wp, 0.0));
        for &(l, n) in &[(2.0, 1.0), (3.0, 0.5), (1.0, 2.0), (4.0, -3.0)] {
            let v = k.lambda_nu().eval(l, n).unwrap();
            let expect = l * l - 0.25 * n * n;
            assert!((v.re - expect).abs() < 1e-12, "at ({l}, {n})");
        }
    }

    #[test]
    fn lambda_nu_domain_checked() {
        let k = custom(|_, _| Complex64::ONE);
        assert!(k.lambda_nu().eval(1.0, 2.5).is_err()); // |nu| > 2 lambda
        assert!(k.lambda_nu().eval(9.5, 2.0).is_err()); // omega beyond cutoff
        assert!(k.lambda_nu().eval(1.0, 2.0).is_ok());
    }

    #[test]
    fn lambda_nu_round_trip_pointwise() {
        let k = custom(|w, wp| Complex64::new(w * wp + w.sin(), wp.cos()));
        let ln = k.lambda_nu();
        for &(w, wp) in &[(0.3, 0.8), (1.7, 0.1), (5.0, 4.9), (2.2, 2.2)] {
            let lambda = 0.5 * (w + wp);
            let nu = w - wp;
            let direct = k.eval(w, wp);
            let via = ln.eval_unchecked(lambda, nu);
            assert!((direct - via).norm() < 1e-12);
        }
    }

    #[test]
    fn hermitize_fixed_point_on_hermitian() {
        let k = RegularKernel::new(
            KernelForm::LorentzianNu {
                gamma: 0.1,
                profile: LambdaProfile::Uniform,
                amplitude: 1.0,
            },
            10.0,
        )
        .unwrap();
        let h = hermitize(&k);
        for &(w, wp) in &[(0.5, 0.7), (3.0, 1.0)] {
            assert_eq!(k.eval(w, wp), h.eval(w, wp));
        }
    }

    #[test]
    fn hermitize_annihilates_constant_imaginary() {
        let k = custom(|_, _| Complex64::new(0.0, 1.0));
        let h = hermitize(&k);
        assert!(h.eval(1.0, 2.0).norm() < 1e-15);
    }

    #[test]
    fn hermitize_omega_plus_i() {
        // K = omega + i  ->  (omega + omega') / 2 on a 5x5 grid.
        let k = custom(|w, _| Complex64::new(w, 1.0));
        let h = hermitize(&k);
        for i in 0..5 {
            for j in 0..5 {
                let w = 0.5 + i as f64;
                let wp = 0.5 + j as f64;
                let got = h.eval(w, wp);
                let expect = Complex64::new(0.5 * (w + wp), 0.0);
                assert!((got - expect).norm() < 1e-12, "at ({w}, {wp})");
            }
        }
    }

    #[test]
    fn grid_kernel_reproduces_bilinear_function() {
        // Bilinear functions are exact under bilinear interpolation.
        let n = 11;
        let omega_max = 5.0;
        let h = omega_max / (n - 1) as f64;
        let f = |w: f64, wp: f64| Complex64::new(1.0 + 2.0 * w + 3.0 * wp + 0.5 * w * wp, 0.0);
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i as f64 * h, j as f64 * h));
            }
        }
        let k = RegularKernel::new(
            KernelForm::Grid(GridKernel::new(n, omega_max, values).unwrap()),
            omega_max,
        )
        .unwrap();
        for &(w, wp) in &[(0.31, 2.7), (4.99, 0.01), (2.5, 2.5)] {
            assert!((k.eval(w, wp) - f(w, wp)).norm() < 1e-12);
        }
    }

    #[test]
    fn hermiticity_defect_detects_asymmetry() {
        let bad = custom(|w, wp| Complex64::new(w - wp, 0.0)); // anti-symmetric
        assert!(bad.hermiticity_defect(8) > 0.1);
        let good = custom(|w, wp| Complex64::new(w + wp, 0.0));
        assert!(good.hermiticity_defect(8) < 1e-14);
    }

    #[test]
    fn separable_gaussian_nu_continuation_matches_real_axis() {
        let k = RegularKernel::new(
            KernelForm::Separable {
                factor: SeparableFactor::GaussianBump {
                    center: 2.0,
                    width: 0.5,
                    amplitude: 1.3,
                },
            },
            10.0,
        )
        .unwrap();
        let cont = k.nu_continuation().unwrap();
        // K'(lambda, nu) / K'(lambda, 0) should equal cont(nu) / cont(0).
        let ln = k.lambda_nu();
        for &nu in &[0.2, 0.9, -1.4] {
            let ratio = ln.eval_unchecked(2.0, nu) / ln.eval_unchecked(2.0, 0.0);
            let cratio = cont(Complex64::new(nu, 0.0)) / cont(Complex64::ZERO);
            assert!((ratio - cratio).norm() < 1e-12);
        }
    }
}
