//! Energy-domain coordinates.
//!
//! Kernels live on the quarter-plane `omega, omega' >= 0`. The mean/difference
//! coordinates `lambda = (omega + omega')/2`, `nu = omega - omega'` map that
//! quarter-plane onto the wedge `|nu| <= 2 lambda` with unit Jacobian; the
//! time dependence of the fluctuating term is a pure phase in `nu`, which is
//! why every pole search happens in the complex `nu` plane.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// A complex energy in eV. Real part is the oscillation energy, imaginary
/// part the damping energy.
pub type ComplexEnergy = Complex64;

/// A point of the continuous spectrum, in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPoint {
    omega: f64,
}

impl EnergyPoint {
    pub fn new(omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::Domain(format!(
                "spectrum point must be finite and nonnegative, got {omega}"
            )));
        }
        Ok(Self { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// Mean/difference coordinates in eV, restricted to the image of the
/// quarter-plane: `lambda >= 0`, `|nu| <= 2 lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaNuPoint {
    lambda: f64,
    nu: f64,
}

impl LambdaNuPoint {
    pub fn new(lambda: f64, nu: f64) -> Result<Self> {
        if !lambda.is_finite() || !nu.is_finite() || lambda < 0.0 {
            return Err(Error::Domain(format!(
                "mean energy must be finite and nonnegative, got lambda={lambda}, nu={nu}"
            )));
        }
        if nu.abs() > 2.0 * lambda {
            return Err(Error::Domain(format!(
                "|nu| <= 2 lambda violated: lambda={lambda}, nu={nu}"
            )));
        }
        Ok(Self { lambda, nu })
    }

    /// Build from spectrum coordinates; always valid for valid inputs.
    pub fn from_omegas(omega: EnergyPoint, omega_prime: EnergyPoint) -> Self {
        Self {
            lambda: 0.5 * (omega.omega() + omega_prime.omega()),
            nu: omega.omega() - omega_prime.omega(),
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Back to spectrum coordinates `(omega, omega')`.
    pub fn to_omegas(&self) -> (f64, f64) {
        (self.lambda + 0.5 * self.nu, self.lambda - 0.5 * self.nu)
    }
}

/// Reject non-finite complex energies.
pub fn check_finite(z: ComplexEnergy) -> Result<ComplexEnergy> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Domain(format!("non-finite complex energy {z}")))
    }
}
