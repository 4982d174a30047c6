//! Macroscopic bodies: per-particle rates add, so an `N`-particle body
//! decoheres `N` times faster. The particle number itself can be estimated
//! from the ratio of the body's characteristic action `M L^2 / Upsilon` to
//! the quantum of action, which chains into `t_D ~ Upsilon hbar^2 /
//! (M L^2 k T)` — algebraically identical to the relaxation-scaled
//! de Broglie ratio used by environment-induced treatments.

use super::{DecoherenceEstimate, Method};
use crate::constants::{HBAR_JS, KB_J_PER_K};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacroscopicBody {
    /// Particle count; estimated from the action when absent.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    /// Mean per-particle interaction energy, eV.
    #[serde(rename = "V_i", default, skip_serializing_if = "Option::is_none")]
    pub v_i: Option<f64>,
    /// Characteristic mass, kg.
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m_kg: Option<f64>,
    /// Characteristic length, m.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l_m: Option<f64>,
    /// Characteristic time, s.
    #[serde(rename = "Upsilon", default, skip_serializing_if = "Option::is_none")]
    pub upsilon_s: Option<f64>,
    /// Temperature, kelvin.
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t_kelvin: Option<f64>,
}

impl MacroscopicBody {
    pub fn validate(&self) -> Result<()> {
        let fields: [(&str, Option<f64>); 6] = [
            ("N", self.n),
            ("V_i", self.v_i),
            ("M", self.m_kg),
            ("L", self.l_m),
            ("Upsilon", self.upsilon_s),
            ("T", self.t_kelvin),
        ];
        for (name, value) in fields {
            if let Some(v) = value {
                if !v.is_finite() || v <= 0.0 {
                    return Err(Error::Validation {
                        field: name.into(),
                        message: format!("must be positive when present, got {v}"),
                    });
                }
            }
        }
        Ok(())
    }

    fn require(&self, name: &str, value: Option<f64>) -> Result<f64> {
        value.ok_or_else(|| Error::Validation {
            field: name.into(),
            message: "required for this operation".into(),
        })
    }

    /// Particle count: explicit field, or estimated from the action ratio
    /// `M L^2 / (hbar Upsilon)`.
    pub fn particle_count(&self) -> Result<f64> {
        match self.n {
            Some(n) => Ok(n),
            None => particle_number_from_action(self),
        }
    }
}

/// Scale a per-particle estimate to `N` particles: the damping energies add,
/// so `gamma -> N gamma` and `t_D -> t_D / N`.
pub fn nbody_scaled_time(single: &DecoherenceEstimate, n: f64) -> Result<DecoherenceEstimate> {
    if !n.is_finite() || n < 1.0 {
        return Err(Error::Domain(format!("particle count must be >= 1, got {n}")));
    }
    let mut scaled = DecoherenceEstimate::from_gamma(single.gamma_ev * n, single.method);
    scaled.diagnostics = single.diagnostics.clone();
    Ok(scaled)
}

/// Particle number from the action ratio `M L^2 / (hbar Upsilon)`.
pub fn particle_number_from_action(body: &MacroscopicBody) -> Result<f64> {
    body.validate()?;
    let m = body.require("M", body.m_kg)?;
    let l = body.require("L", body.l_m)?;
    let upsilon = body.require("Upsilon", body.upsilon_s)?;
    Ok(m * l * l / (HBAR_JS * upsilon))
}

/// `t_D = Upsilon hbar^2 / (M L^2 k T)`, evaluated in SI units.
pub fn macroscopic_decoherence_time(body: &MacroscopicBody) -> Result<DecoherenceEstimate> {
    body.validate()?;
    let m = body.require("M", body.m_kg)?;
    let l = body.require("L", body.l_m)?;
    let upsilon = body.require("Upsilon", body.upsilon_s)?;
    let t = body.require("T", body.t_kelvin)?;
    let t_d = upsilon * HBAR_JS * HBAR_JS / (m * l * l * KB_J_PER_K * t);
    Ok(DecoherenceEstimate::from_time(t_d, Method::Formula))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EinselectionScenario {
    /// Relaxation time `1 / gamma_0`, s.
    #[serde(rename = "gamma0_inv")]
    pub gamma0_inv_s: f64,
    /// Coherence length probed, m.
    #[serde(rename = "L0")]
    pub l0_m: f64,
    /// Mass, kg.
    #[serde(rename = "M")]
    pub m_kg: f64,
    /// Temperature, kelvin.
    #[serde(rename = "T")]
    pub t_kelvin: f64,
}

impl EinselectionScenario {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma0_inv", self.gamma0_inv_s),
            ("L0", self.l0_m),
            ("M", self.m_kg),
            ("T", self.t_kelvin),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Validation {
                    field: name.into(),
                    message: format!("must be positive, got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// Thermal de Broglie length `hbar / sqrt(M k T)` in meters.
pub fn de_broglie_length(m_kg: f64, t_kelvin: f64) -> f64 {
    HBAR_JS / (m_kg * KB_J_PER_K * t_kelvin).sqrt()
}

/// The environment-induced route `t_D = gamma0^-1 (lambda_dB / L0)^2`,
/// algebraically identical to [`macroscopic_decoherence_time`] with
/// `Upsilon = gamma0^-1`, `L = L0`.
pub fn einselection_comparison(sc: &EinselectionScenario) -> Result<DecoherenceEstimate> {
    sc.validate()?;
    let ratio = de_broglie_length(sc.m_kg, sc.t_kelvin) / sc.l0_m;
    Ok(DecoherenceEstimate::from_time(
        sc.gamma0_inv_s * ratio * ratio,
        Method::Formula,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::HBAR_EVS;

    fn body() -> MacroscopicBody {
        MacroscopicBody {
            m_kg: Some(1e-3),
            l_m: Some(1e-2),
            upsilon_s: Some(1.0),
            t_kelvin: Some(300.0),
            ..MacroscopicBody::default()
        }
    }

    #[test]
    fn particle_number_of_a_gram_sized_body() {
        let n = particle_number_from_action(&body()).unwrap();
        assert!((n - 9.483e26).abs() < 1e-3 * 9.483e26, "n = {n:.4e}");
    }

    #[test]
    fn particle_number_scalings() {
        let base = particle_number_from_action(&body()).unwrap();
        let mut doubled_l = body();
        doubled_l.l_m = Some(2e-2);
        assert!((particle_number_from_action(&doubled_l).unwrap() / base - 4.0).abs() < 1e-12);
        let mut doubled_upsilon = body();
        doubled_upsilon.upsilon_s = Some(2.0);
        assert!((particle_number_from_action(&doubled_upsilon).unwrap() / base - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nbody_identity_and_mole_scale() {
        let single = DecoherenceEstimate::from_gamma(1.0, Method::Formula);
        let same = nbody_scaled_time(&single, 1.0).unwrap();
        assert_eq!(same.t_d_seconds, single.t_d_seconds);
        let mole = nbody_scaled_time(&single, 1e24).unwrap();
        assert!((mole.t_d_seconds - 6.582e-40).abs() < 1e-3 * 6.582e-40);
    }

    #[test]
    fn nbody_product_is_constant() {
        let single = DecoherenceEstimate::from_gamma(0.7, Method::Formula);
        let base = single.t_d_seconds;
        for &n in &[1.0, 10.0, 1e6, 1e24] {
            let scaled = nbody_scaled_time(&single, n).unwrap();
            assert!(((scaled.t_d_seconds * n) / base - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn macroscopic_time_at_room_temperature() {
        let est = macroscopic_decoherence_time(&body()).unwrap();
        assert!(
            (est.t_d_seconds - 2.685e-41).abs() < 1e-3 * 2.685e-41,
            "t_D = {:.4e}",
            est.t_d_seconds
        );
    }

    #[test]
    fn halving_temperature_doubles_the_time() {
        let warm = macroscopic_decoherence_time(&body()).unwrap();
        let mut cold_body = body();
        cold_body.t_kelvin = Some(150.0);
        let cold = macroscopic_decoherence_time(&cold_body).unwrap();
        assert!((cold.t_d_seconds / warm.t_d_seconds - 2.0).abs() < 1e-12);
    }

    #[test]
    fn action_route_agrees_with_thermal_scaling() {
        // hbar/(k T N) from the thermal first rung times 4 pi equals the
        // macroscopic formula when N comes from the action.
        let b = body();
        let n = particle_number_from_action(&b).unwrap();
        let thermal_gamma = 4.0 * std::f64::consts::PI
            * crate::constants::KB_EV_PER_K
            * b.t_kelvin.unwrap();
        let single = DecoherenceEstimate::from_gamma(thermal_gamma, Method::Formula);
        let scaled = nbody_scaled_time(&single, n).unwrap();
        let via_action = scaled.t_d_seconds * 4.0 * std::f64::consts::PI;
        let direct = macroscopic_decoherence_time(&b).unwrap().t_d_seconds;
        assert!(
            (via_action / direct - 1.0).abs() < 1e-12,
            "via action {via_action:.6e} vs direct {direct:.6e}"
        );
    }

    #[test]
    fn de_broglie_length_at_room_temperature() {
        let l = de_broglie_length(1e-3, 300.0);
        assert!((l - 5.182e-23).abs() < 1e-3 * 5.182e-23, "lambda = {l:.4e}");
    }

    #[test]
    fn einselection_route_matches_macroscopic_route() {
        let sc = EinselectionScenario {
            gamma0_inv_s: 1.0,
            l0_m: 1e-2,
            m_kg: 1e-3,
            t_kelvin: 300.0,
        };
        let a = einselection_comparison(&sc).unwrap().t_d_seconds;
        let b = macroscopic_decoherence_time(&body()).unwrap().t_d_seconds;
        assert!(((a / b) - 1.0).abs() < 1e-12, "{a:.6e} vs {b:.6e}");
        assert!((a - 2.685e-41).abs() < 1e-3 * 2.685e-41);
    }

    #[test]
    fn doubling_the_probed_length_quarters_the_time() {
        let sc = EinselectionScenario {
            gamma0_inv_s: 1.0,
            l0_m: 1e-2,
            m_kg: 1e-3,
            t_kelvin: 300.0,
        };
        let base = einselection_comparison(&sc).unwrap().t_d_seconds;
        let wide = EinselectionScenario {
            l0_m: 2e-2,
            ..sc
        };
        let quartered = einselection_comparison(&wide).unwrap().t_d_seconds;
        assert!((base / quartered - 4.0).abs() < 1e-12);
    }

    #[test]
    fn estimates_satisfy_time_gamma_relation() {
        let est = macroscopic_decoherence_time(&body()).unwrap();
        assert!((est.t_d_seconds * est.gamma_ev / HBAR_EVS - 1.0).abs() < 4.0 * f64::EPSILON);
    }

    #[test]
    fn nonpositive_fields_are_named() {
        let mut b = body();
        b.m_kg = Some(-1.0);
        match macroscopic_decoherence_time(&b).unwrap_err() {
            Error::Validation { field, .. } => assert_eq!(field, "M"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
