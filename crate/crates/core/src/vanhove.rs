//! States and observables with a singular diagonal part plus a regular
//! kernel part, and their expectation values.
//!
//! The singular parts `rho(omega)`, `O(omega)` weight the diagonal; the
//! regular kernels carry the off-diagonal content whose decay is the whole
//! point of the crate. The expectation value splits into a time-constant
//! diagonal integral and a fluctuating double integral (see
//! [`crate::oscint`]); as `t -> infinity` only the constant part survives,
//! which is what [`weak_limit_state`] encodes.

use crate::error::{Error, Result};
use crate::kernel::RegularKernel;
use crate::quad;
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

/// Tolerance on the normalization integral of a state's singular part.
pub const NORMALIZATION_TOL: f64 = 1e-6;

type FieldFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of energy, used for singular parts.
#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    /// `exp(-omega / scale)`.
    Exponential { scale: f64 },
    /// `omega^exponent`.
    Power { exponent: f64 },
    /// `exp(-(omega-center)^2 / 2 width^2) / (width sqrt(2 pi))`.
    GaussianBump { center: f64, width: f64 },
    Custom(FieldFn),
}

impl ScalarField {
    pub fn constant(value: f64) -> Self {
        ScalarField::Constant(value)
    }

    pub fn exponential(scale: f64) -> Self {
        ScalarField::Exponential { scale }
    }

    pub fn power(exponent: f64) -> Self {
        ScalarField::Power { exponent }
    }

    pub fn gaussian_bump(center: f64, width: f64) -> Self {
        ScalarField::GaussianBump { center, width }
    }

    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        ScalarField::Custom(Arc::new(f))
    }

    pub fn eval(&self, omega: f64) -> f64 {
        match self {
            ScalarField::Constant(v) => *v,
            ScalarField::Exponential { scale } => (-omega / scale).exp(),
            ScalarField::Power { exponent } => omega.powf(*exponent),
            ScalarField::GaussianBump { center, width } => {
                let z = (omega - center) / width;
                (-0.5 * z * z).exp() / (width * std::f64::consts::TAU.sqrt())
            }
            ScalarField::Custom(f) => f(omega),
        }
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Constant(v) => write!(f, "Constant({v})"),
            ScalarField::Exponential { scale } => write!(f, "Exponential {{ scale: {scale} }}"),
            ScalarField::Power { exponent } => write!(f, "Power {{ exponent: {exponent} }}"),
            ScalarField::GaussianBump { center, width } => {
                write!(f, "GaussianBump {{ center: {center}, width: {width} }}")
            }
            ScalarField::Custom(_) => write!(f, "Custom(<fn>)"),
        }
    }
}

/// Hermiticity tolerance applied at construction, relative to the kernel
/// bound.
const HERMITICITY_TOL: f64 = 1e-10;
const PROBE_GRID: usize = 24;

fn check_hermitian(kernel: &RegularKernel, what: &str) -> Result<()> {
    let defect = kernel.hermiticity_defect(PROBE_GRID);
    let scale = kernel.bound().max(1e-300);
    if defect > HERMITICITY_TOL * scale {
        return Err(Error::Domain(format!(
            "{what} regular kernel is not Hermitian: defect {defect:.3e} vs bound {scale:.3e}"
        )));
    }
    Ok(())
}

/// A state: nonnegative normalized singular density plus a Hermitian
/// regular kernel sharing one spectrum cutoff.
#[derive(Debug, Clone)]
pub struct VanHoveState {
    singular: ScalarField,
    regular: RegularKernel,
}

impl VanHoveState {
    pub fn new(singular: ScalarField, regular: RegularKernel) -> Result<Self> {
        let omega_max = regular.omega_max();
        // Spot-check positivity of the density.
        for i in 0..512 {
            let w = omega_max * (i as f64 + 0.5) / 512.0;
            let v = singular.eval(w);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "state density must be finite and nonnegative, got {v} at omega = {w}"
                )));
            }
        }
        let norm = quad::adaptive_real(&|w| singular.eval(w), 0.0, omega_max, 1e-10, 1e-10, 2048);
        if !norm.converged {
            return Err(Error::Convergence {
                achieved: norm.error,
                required: 1e-10,
            });
        }
        if (norm.value - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Domain(format!(
                "state density integrates to {:.9}, expected 1 within {NORMALIZATION_TOL:e}",
                norm.value
            )));
        }
        check_hermitian(&regular, "state")?;
        Ok(Self { singular, regular })
    }

    pub fn singular(&self) -> &ScalarField {
        &self.singular
    }

    pub fn regular(&self) -> &RegularKernel {
        &self.regular
    }

    pub fn omega_max(&self) -> f64 {
        self.regular.omega_max()
    }
}

/// An observable: real singular part plus a Hermitian regular kernel.
#[derive(Debug, Clone)]
pub struct VanHoveObservable {
    singular: ScalarField,
    regular: RegularKernel,
}

impl VanHoveObservable {
    pub fn new(singular: ScalarField, regular: RegularKernel) -> Result<Self> {
        let omega_max = regular.omega_max();
        for i in 0..512 {
            let w = omega_max * (i as f64 + 0.5) / 512.0;
            let v = singular.eval(w);
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "observable singular part must be finite, got {v} at omega = {w}"
                )));
            }
        }
        check_hermitian(&regular, "observable")?;
        Ok(Self { singular, regular })
    }

    pub fn singular(&self) -> &ScalarField {
        &self.singular
    }

    pub fn regular(&self) -> &RegularKernel {
        &self.regular
    }

    pub fn omega_max(&self) -> f64 {
        self.regular.omega_max()
    }
}

/// The time-constant part of the expectation value,
/// `integral rho(omega) O(omega) d omega`, which is also its limit as
/// `t -> infinity`.
pub fn expectation_constant(state: &VanHoveState, obs: &VanHoveObservable) -> Result<f64> {
    if state.omega_max() != obs.omega_max() {
        return Err(Error::Domain(format!(
            "state and observable cutoffs differ: {} vs {}",
            state.omega_max(),
            obs.omega_max()
        )));
    }
    let out = quad::adaptive_real(
        &|w| state.singular.eval(w) * obs.singular.eval(w),
        0.0,
        state.omega_max(),
        1e-12,
        1e-10,
        4096,
    );
    if !out.converged {
        return Err(Error::Convergence {
            achieved: out.error,
            required: 1e-10,
        });
    }
    Ok(out.value)
}

/// Project a state onto its diagonal: same singular part, regular part
/// identically zero. Idempotent, and preserves [`expectation_constant`]
/// exactly (the singular closure is shared, not copied).
pub fn weak_limit_state(state: &VanHoveState) -> VanHoveState {
    VanHoveState {
        singular: state.singular.clone(),
        regular: RegularKernel::zero(state.omega_max()),
    }
}

/// Status of one point of a computed series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    Converged,
    /// Error bar above tolerance; the value is the best estimate.
    Unconverged,
}

/// A fluctuating-term time series plus the constant part of the same
/// expectation value.
#[derive(Debug, Clone)]
pub struct ExpectationSeries {
    times: Vec<f64>,
    values: Vec<Complex64>,
    error_bars: Vec<f64>,
    status: Vec<PointStatus>,
    constant_part: f64,
}

impl ExpectationSeries {
    pub fn new(
        times: Vec<f64>,
        values: Vec<Complex64>,
        error_bars: Vec<f64>,
        status: Vec<PointStatus>,
        constant_part: f64,
    ) -> Result<Self> {
        if times.len() != values.len()
            || times.len() != error_bars.len()
            || times.len() != status.len()
        {
            return Err(Error::Domain("series columns must have equal length".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("series times must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("series values must be finite".into()));
        }
        Ok(Self {
            times,
            values,
            error_bars,
            status,
            constant_part,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn error_bars(&self) -> &[f64] {
        &self.error_bars
    }

    pub fn status(&self) -> &[PointStatus] {
        &self.status
    }

    pub fn constant_part(&self) -> f64 {
        self.constant_part
    }

    /// Indices of points whose error bar exceeded tolerance.
    pub fn unconverged_indices(&self) -> Vec<usize> {
        self.status
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == PointStatus::Unconverged)
            .map(|(i, _)| i)
            .collect()
    }
}
