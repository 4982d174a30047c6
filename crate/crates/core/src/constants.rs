//! Physical constants.
//!
//! The 2019 SI redefinition fixes `h`, `e` and `k_B` exactly; everything
//! else here is derived from those three values so that eV-based and
//! SI-based expressions of the same quantity stay mutually consistent.

use std::f64::consts::TAU;

/// Planck constant, J·s (exact).
pub const H_PLANCK_JS: f64 = 6.626_070_15e-34;

/// Elementary charge, C (exact).
pub const E_CHARGE_C: f64 = 1.602_176_634e-19;

/// Boltzmann constant, J/K (exact).
pub const KB_J_PER_K: f64 = 1.380_649e-23;

/// Reduced Planck constant, J·s.
pub const HBAR_JS: f64 = H_PLANCK_JS / TAU;

/// Reduced Planck constant, eV·s.
pub const HBAR_EVS: f64 = HBAR_JS / E_CHARGE_C;

/// Boltzmann constant, eV/K.
pub const KB_EV_PER_K: f64 = KB_J_PER_K / E_CHARGE_C;

/// The constants every operation reads. Fixed at compile time; nothing in
/// the crate redefines them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant in eV·s.
    pub hbar: f64,
    /// Boltzmann constant in eV/K.
    pub k_b: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR_EVS,
            k_b: KB_EV_PER_K,
        }
    }
}

/// Thermal energy `k_B T` in eV.
pub fn thermal_energy_ev(t_kelvin: f64) -> f64 {
    KB_EV_PER_K * t_kelvin
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn hbar_matches_codata_ev() {
        assert!(rel(HBAR_EVS, 6.582_119_569e-16) < 1e-9);
    }

    #[test]
    fn hbar_matches_codata_si() {
        assert!(rel(HBAR_JS, 1.054_571_817e-34) < 1e-9);
    }

    #[test]
    fn boltzmann_matches_codata_ev() {
        assert!(rel(KB_EV_PER_K, 8.617_333_262e-5) < 1e-9);
    }

    #[test]
    fn ev_and_si_ratios_agree() {
        // hbar/k_B must be the same number in both unit systems.
        let ev_ratio = HBAR_EVS / KB_EV_PER_K;
        let si_ratio = HBAR_JS / KB_J_PER_K;
        assert!(rel(ev_ratio, si_ratio) < 1e-14);
    }

    #[test]
    fn defaults_read_the_constants() {
        let c = PhysicalConstants::default();
        assert_eq!(c.hbar, HBAR_EVS);
        assert_eq!(c.k_b, KB_EV_PER_K);
    }
}
