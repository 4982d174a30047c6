//! Physical models producing decoherence-time estimates.
//!
//! Every estimate states its route: `pole` (located in the complex plane),
//! `formula` (closed form) or `fit` (decay rate extracted from a computed
//! time series). Pole and formula estimates satisfy `t_D = hbar / gamma` by
//! construction; the infinite sentinel (`gamma = 0`) stands for "no pole in
//! the upper half-plane, decoherence only nominal".

mod friedrichs;
mod kernel_model;
mod macroscopic;
mod thermal;
mod two_stage;

pub use friedrichs::{FormFactor, FriedrichsModel, Sheet};
pub use kernel_model::{analyze_kernel_poles, KernelPoleAnalysis};
pub use macroscopic::{
    de_broglie_length, einselection_comparison, macroscopic_decoherence_time, nbody_scaled_time,
    particle_number_from_action, EinselectionScenario, MacroscopicBody,
};
pub use thermal::{thermal_decoherence_time, thermal_pole_grid, ThermalBathModel};
pub use two_stage::{two_stage_times, TwoStageModel};

use crate::constants::HBAR_EVS;
use crate::cpoles::PoleLocation;
use serde::{Deserialize, Serialize};

/// How an estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pole,
    Fit,
    Formula,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Pole => "pole",
            Method::Fit => "fit",
            Method::Formula => "formula",
        }
    }
}

/// Everything an estimate carries beyond the number itself.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    /// Size of the non-pole content of the series relative to the fitted
    /// pole term, measured at the first series point.
    pub background_to_pole_ratio: Option<f64>,
    /// RMS residual of the log-envelope fit.
    pub fit_residual: Option<f64>,
    /// Poles backing the estimate (empty for pure formula routes).
    pub poles: Vec<PoleLocation>,
    /// Envelope magnitudes relative to the first point, sampled at
    /// `t_D`, `3 t_D` and `10 t_D` when a series was available.
    pub envelope_ratios: Option<[f64; 3]>,
    pub warnings: Vec<String>,
}

/// A decoherence time with its damping energy and provenance.
#[derive(Debug, Clone)]
pub struct DecoherenceEstimate {
    /// Decay time in seconds; `+inf` when no damping exists.
    pub t_d_seconds: f64,
    /// Damping energy in eV; zero for the infinite sentinel.
    pub gamma_ev: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl DecoherenceEstimate {
    /// Build from a damping energy in eV. `gamma = 0` yields the infinite
    /// sentinel.
    pub fn from_gamma(gamma_ev: f64, method: Method) -> Self {
        let t_d_seconds = if gamma_ev == 0.0 {
            f64::INFINITY
        } else {
            HBAR_EVS / gamma_ev
        };
        Self {
            t_d_seconds,
            gamma_ev,
            method,
            diagnostics: Diagnostics::default(),
        }
    }

    /// Build from a time in seconds.
    pub fn from_time(t_d_seconds: f64, method: Method) -> Self {
        let gamma_ev = if t_d_seconds.is_infinite() {
            0.0
        } else {
            HBAR_EVS / t_d_seconds
        };
        Self {
            t_d_seconds,
            gamma_ev,
            method,
            diagnostics: Diagnostics::default(),
        }
    }

    /// The no-decoherence sentinel.
    pub fn infinite(method: Method) -> Self {
        Self::from_gamma(0.0, method)
    }

    pub fn is_infinite(&self) -> bool {
        self.t_d_seconds.is_infinite()
    }

    pub fn with_poles(mut self, poles: Vec<PoleLocation>) -> Self {
        self.diagnostics.poles = poles;
        self
    }

    pub fn with_warning(mut self, warning: impl Into<String>) -> Self {
        self.diagnostics.warnings.push(warning.into());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_one_ev_gives_hbar_seconds() {
        let e = DecoherenceEstimate::from_gamma(1.0, Method::Formula);
        assert_eq!(e.t_d_seconds, HBAR_EVS);
    }

    #[test]
    fn zero_gamma_is_infinite() {
        let e = DecoherenceEstimate::from_gamma(0.0, Method::Pole);
        assert!(e.is_infinite());
        assert_eq!(e.gamma_ev, 0.0);
    }

    #[test]
    fn time_gamma_round_trip() {
        let e = DecoherenceEstimate::from_gamma(0.37, Method::Pole);
        assert!((e.t_d_seconds * e.gamma_ev / HBAR_EVS - 1.0).abs() < 4.0 * f64::EPSILON);
    }
}
