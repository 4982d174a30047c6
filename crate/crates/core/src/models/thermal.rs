//! Thermal bath: the occupation factor `1 / (e^{beta omega} - 1)` of the
//! initial condition continues to a ladder of poles in the difference
//! coordinate, equally spaced by `4 pi k T` above the real axis. The first
//! rung sets the thermal decoherence time `hbar / (4 pi k T)`.

use super::{DecoherenceEstimate, Method};
use crate::constants::KB_EV_PER_K;
use crate::cpoles::{self, PoleLocation, PoleSource, SearchRectangle};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn default_n_max() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalBathModel {
    /// Bath temperature, kelvin.
    #[serde(rename = "T")]
    pub t_kelvin: f64,
    /// Mean-energy slice at which the occupation factor is continued, eV.
    pub lambda: f64,
    /// Number of pole rungs to report.
    #[serde(default = "default_n_max")]
    pub n_max: u32,
}

impl ThermalBathModel {
    pub fn validate(&self) -> Result<()> {
        if !self.t_kelvin.is_finite() || self.t_kelvin <= 0.0 {
            return Err(Error::Validation {
                field: "T".into(),
                message: format!("temperature must be positive, got {}", self.t_kelvin),
            });
        }
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::Validation {
                field: "lambda".into(),
                message: format!("mean energy must be nonnegative, got {}", self.lambda),
            });
        }
        if self.n_max < 1 {
            return Err(Error::Validation {
                field: "n_max".into(),
                message: "need at least one pole rung".into(),
            });
        }
        Ok(())
    }

    /// Inverse temperature in 1/eV.
    pub fn beta(&self) -> f64 {
        1.0 / (KB_EV_PER_K * self.t_kelvin)
    }

    /// The occupation factor continued in the difference coordinate:
    /// `1 / (e^{beta (lambda + Z/2)} - 1)`.
    pub fn occupation(&self, z: Complex64) -> Complex64 {
        let s = (Complex64::new(self.lambda, 0.0) + 0.5 * z) * self.beta();
        (s.exp() - Complex64::ONE).inv()
    }
}

/// Closed-form pole ladder `Z_n = -2 lambda + 4 pi n k T i`, `n = 1..n_max`,
/// each cross-checked against a numerical pole search on the occupation
/// factor. Residues are `2 / beta` exactly.
pub fn thermal_pole_grid(model: &ThermalBathModel) -> Result<Vec<PoleLocation>> {
    model.validate()?;
    let kt = KB_EV_PER_K * model.t_kelvin;
    let residue = Complex64::new(2.0 * kt, 0.0); // 2 / beta
    let mut out = Vec::with_capacity(model.n_max as usize);
    for n in 1..=model.n_max {
        let position = Complex64::new(-2.0 * model.lambda, 4.0 * PI * n as f64 * kt);
        // Windows of +-2 kT around the prediction keep the exponent small
        // and contain exactly one rung (spacing is 4 pi kT).
        let window = SearchRectangle::new(
            position.re - 2.0 * kt,
            position.re + 2.0 * kt,
            position.im - 2.0 * kt,
            position.im + 2.0 * kt,
        )?;
        let occupation = |z: Complex64| model.occupation(z);
        let located =
            cpoles::locate_poles(&occupation, &window, 1e-12 * kt.max(1.0), PoleSource::InitialCondition)?;
        if located.len() != 1 {
            return Err(Error::InternalConsistency(format!(
                "expected one occupation pole near {position}, found {}",
                located.len()
            )));
        }
        let rel = (located[0].position - position).norm() / position.norm();
        if rel > 1e-6 {
            return Err(Error::InternalConsistency(format!(
                "occupation pole {} deviates from closed form {position} by {rel:.3e}",
                located[0].position
            )));
        }
        out.push(PoleLocation {
            position,
            residue,
            multiplicity: 1,
            source: PoleSource::InitialCondition,
        });
    }
    Ok(out)
}

/// First-rung thermal decoherence time: `gamma = 4 pi k T`.
pub fn thermal_decoherence_time(model: &ThermalBathModel) -> Result<DecoherenceEstimate> {
    model.validate()?;
    let gamma = 4.0 * PI * KB_EV_PER_K * model.t_kelvin;
    Ok(DecoherenceEstimate::from_gamma(gamma, Method::Formula))
}
