//! Scenario files: a strict JSON schema naming one model, optional
//! time-domain evolution, quadrature tolerances and the outputs to write.
//!
//! Unknown fields are rejected everywhere so a typo never silently changes
//! a run.

use decotime_core::kernel::{
    GridKernel, KernelForm, LambdaProfile, RegularKernel, SeparableFactor,
};
use decotime_core::models::{
    EinselectionScenario, FriedrichsModel, MacroscopicBody, ThermalBathModel, TwoStageModel,
};
use decotime_core::oscint::QuadratureConfig;
use decotime_core::vanhove::{ScalarField, VanHoveObservable, VanHoveState};
use decotime_core::{quad, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One model to analyze.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpec {
    Friedrichs(FriedrichsModel),
    Thermal(ThermalBathModel),
    Macroscopic(MacroscopicBody),
    Einselection(EinselectionScenario),
    TwoStage(TwoStageModel),
    CustomKernel(CustomKernelSpec),
}

impl ModelSpec {
    pub fn type_name(&self) -> &'static str {
        match self {
            ModelSpec::Friedrichs(_) => "friedrichs",
            ModelSpec::Thermal(_) => "thermal",
            ModelSpec::Macroscopic(_) => "macroscopic",
            ModelSpec::Einselection(_) => "einselection",
            ModelSpec::TwoStage(_) => "two_stage",
            ModelSpec::CustomKernel(_) => "custom_kernel",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Friedrichs(m) => m.validate(),
            ModelSpec::Thermal(m) => m.validate(),
            ModelSpec::Macroscopic(m) => m.validate(),
            ModelSpec::Einselection(m) => m.validate(),
            ModelSpec::TwoStage(m) => m.validate(),
            ModelSpec::CustomKernel(m) => m.validate(),
        }
    }
}

/// A state/observable pair built from named kernel families.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomKernelSpec {
    /// Spectrum cutoff shared by everything in the pair, eV.
    pub omega_max: f64,
    /// Regular (off-diagonal) part of the state.
    pub state_kernel: KernelSpec,
    /// Diagonal density of the state; normalized automatically.
    #[serde(default = "default_state_singular")]
    pub state_singular: FieldSpec,
    /// Regular part of the probe observable; a flat kernel by default.
    #[serde(default)]
    pub observable_kernel: Option<KernelSpec>,
    /// Diagonal part of the probe observable.
    #[serde(default = "default_obs_singular")]
    pub observable_singular: FieldSpec,
}

fn default_state_singular() -> FieldSpec {
    FieldSpec::Exponential { scale: 1.0 }
}

fn default_obs_singular() -> FieldSpec {
    FieldSpec::Constant { value: 1.0 }
}

impl CustomKernelSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.omega_max.is_finite() || self.omega_max <= 0.0 {
            return Err(Error::Validation {
                field: "omega_max".into(),
                message: format!("must be positive, got {}", self.omega_max),
            });
        }
        // Full construction is the real validation.
        self.build().map(|_| ())
    }

    /// Materialize the pair.
    pub fn build(&self) -> Result<(VanHoveState, VanHoveObservable)> {
        let omega_max = self.omega_max;
        let state_kernel = self.state_kernel.build(omega_max)?;
        let obs_kernel = match &self.observable_kernel {
            Some(spec) => spec.build(omega_max)?,
            None => RegularKernel::new(
                KernelForm::Separable {
                    factor: SeparableFactor::Constant { value: 1.0 },
                },
                omega_max,
            )?,
        };
        let state = VanHoveState::new(
            self.state_singular.build_normalized(omega_max)?,
            state_kernel,
        )?;
        let obs = VanHoveObservable::new(self.observable_singular.build(), obs_kernel)?;
        Ok((state, obs))
    }
}

/// Named kernel families, matching the library's analytic forms plus a
/// real-valued sample grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    LorentzianNu {
        gamma: f64,
        #[serde(default = "default_profile")]
        profile: LambdaProfile,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    GaussianNu {
        sigma: f64,
        #[serde(default = "default_profile")]
        profile: LambdaProfile,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    Separable { factor: SeparableFactor },
    /// `n x n` real samples, row-major, over `[0, omega_max]^2`.
    Grid { n: usize, values: Vec<f64> },
}

fn default_profile() -> LambdaProfile {
    LambdaProfile::Uniform
}

fn default_amplitude() -> f64 {
    1.0
}

impl KernelSpec {
    pub fn build(&self, omega_max: f64) -> Result<RegularKernel> {
        let form = match self {
            KernelSpec::LorentzianNu {
                gamma,
                profile,
                amplitude,
            } => KernelForm::LorentzianNu {
                gamma: *gamma,
                profile: profile.clone(),
                amplitude: *amplitude,
            },
            KernelSpec::GaussianNu {
                sigma,
                profile,
                amplitude,
            } => KernelForm::GaussianNu {
                sigma: *sigma,
                profile: profile.clone(),
                amplitude: *amplitude,
            },
            KernelSpec::Separable { factor } => KernelForm::Separable {
                factor: factor.clone(),
            },
            KernelSpec::Grid { n, values } => {
                let complex: Vec<Complex64> =
                    values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                KernelForm::Grid(GridKernel::new(*n, omega_max, complex)?)
            }
        };
        RegularKernel::new(form, omega_max)
    }
}

/// Scalar energy profiles for singular parts.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Constant { value: f64 },
    Exponential { scale: f64 },
    Power { exponent: f64 },
    GaussianBump { center: f64, width: f64 },
}

impl FieldSpec {
    pub fn build(&self) -> ScalarField {
        match self {
            FieldSpec::Constant { value } => ScalarField::constant(*value),
            FieldSpec::Exponential { scale } => ScalarField::exponential(*scale),
            FieldSpec::Power { exponent } => ScalarField::power(*exponent),
            FieldSpec::GaussianBump { center, width } => {
                ScalarField::gaussian_bump(*center, *width)
            }
        }
    }

    /// Build and rescale so the integral over `[0, omega_max]` is one, as a
    /// state density requires.
    pub fn build_normalized(&self, omega_max: f64) -> Result<ScalarField> {
        let raw = self.build();
        let z = quad::adaptive_real(&|w| raw.eval(w), 0.0, omega_max, 1e-12, 1e-12, 4096);
        if !z.converged || !(z.value > 0.0) {
            return Err(Error::Validation {
                field: "state_singular".into(),
                message: format!("density does not normalize: integral {}", z.value),
            });
        }
        let norm = z.value;
        Ok(ScalarField::custom(move |w| raw.eval(w) / norm))
    }
}

/// Time-grid request for the evolution stage.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSpec {
    /// Grid extends to this multiple of the coarse decoherence time.
    #[serde(default = "default_t_max_factor")]
    pub t_max_factor: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_t_max_factor() -> f64 {
    12.0
}

fn default_points() -> usize {
    48
}

impl EvolutionSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.t_max_factor.is_finite() || self.t_max_factor <= 0.0 {
            return Err(Error::Validation {
                field: "t_max_factor".into(),
                message: format!("must be positive, got {}", self.t_max_factor),
            });
        }
        if self.points < 8 {
            return Err(Error::Validation {
                field: "points".into(),
                message: format!("need at least 8 points, got {}", self.points),
            });
        }
        Ok(())
    }
}

/// Quadrature tolerances, mirroring the library defaults.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_max_subdivisions")]
    pub max_subdivisions: usize,
    #[serde(default = "default_lambda_panels")]
    pub lambda_panels: usize,
}

fn default_abs_tol() -> f64 {
    1e-10
}
fn default_rel_tol() -> f64 {
    1e-8
}
fn default_max_subdivisions() -> usize {
    400
}
fn default_lambda_panels() -> usize {
    8
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: default_abs_tol(),
            rel_tol: default_rel_tol(),
            max_subdivisions: default_max_subdivisions(),
            lambda_panels: default_lambda_panels(),
        }
    }
}

impl From<QuadratureSpec> for QuadratureConfig {
    fn from(s: QuadratureSpec) -> Self {
        QuadratureConfig {
            abs_tol: s.abs_tol,
            rel_tol: s.rel_tol,
            max_subdivisions: s.max_subdivisions,
            lambda_panels: s.lambda_panels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Report,
    Series,
    Poles,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Report]
}

/// A complete run description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolution: Option<EvolutionSpec>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if let Some(evolution) = &self.evolution {
            evolution.validate()?;
        }
        QuadratureConfig::from(self.quadrature).validate()?;
        if self.outputs.is_empty() {
            return Err(Error::Validation {
                field: "outputs".into(),
                message: "at least one output is required".into(),
            });
        }
        Ok(())
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }
}

/// Load and validate a scenario. Parse errors keep serde's line/column;
/// validation errors name the offending field. An absent name defaults to
/// the model type.
pub fn load_scenario(path: &Path) -> std::result::Result<Scenario, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut scenario: Scenario = serde_json::from_str(&text)
        .map_err(|e| format!("{}: parse error: {e}", path.display()))?;
    if scenario.name.is_empty() {
        scenario.name = scenario.model.type_name().to_string();
    }
    scenario
        .validate()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(scenario)
}

/// Canonical serialization used for round-tripping scenarios.
pub fn save_scenario(scenario: &Scenario) -> String {
    let mut s = serde_json::to_string_pretty(scenario).expect("scenario serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> std::result::Result<Scenario, String> {
        let mut scenario: Scenario =
            serde_json::from_str(text).map_err(|e| format!("parse error: {e}"))?;
        if scenario.name.is_empty() {
            scenario.name = scenario.model.type_name().to_string();
        }
        scenario.validate().map_err(|e| e.to_string())?;
        Ok(scenario)
    }

    #[test]
    fn minimal_thermal_scenario_gets_defaults() {
        let sc = parse(r#"{"model": {"type": "thermal", "T": 100.0, "lambda": 1.0, "n_max": 3}}"#)
            .unwrap();
        assert_eq!(sc.name, "thermal");
        assert_eq!(sc.outputs, vec![OutputKind::Report]);
        assert!(sc.evolution.is_none());
        assert_eq!(sc.quadrature.abs_tol, 1e-10);
    }

    #[test]
    fn negative_temperature_names_the_field() {
        let err = parse(r#"{"model": {"type": "thermal", "T": -5.0, "lambda": 1.0, "n_max": 1}}"#)
            .unwrap_err();
        assert!(err.contains("`T`"), "error was: {err}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = parse(
            r#"{"model": {"type": "thermal", "T": 100.0, "lambda": 1.0, "n_max": 1, "bogus": 2}}"#,
        )
        .unwrap_err();
        assert!(err.contains("bogus"), "error was: {err}");
        let err =
            parse(r#"{"model": {"type": "thermal", "T": 100.0, "lambda": 1.0}, "extra": true}"#)
                .unwrap_err();
        assert!(err.contains("extra"), "error was: {err}");
    }

    #[test]
    fn empty_outputs_rejected() {
        let err = parse(
            r#"{"model": {"type": "thermal", "T": 100.0, "lambda": 1.0}, "outputs": []}"#,
        )
        .unwrap_err();
        assert!(err.contains("outputs"));
    }

    #[test]
    fn custom_kernel_scenario_builds() {
        let sc = parse(
            r#"{
                "model": {
                    "type": "custom_kernel",
                    "omega_max": 4.0,
                    "state_kernel": {
                        "family": "lorentzian_nu",
                        "gamma": 0.1,
                        "profile": {"shape": "gaussian_bump", "center": 1.0, "width": 0.2}
                    }
                },
                "evolution": {"points": 32}
            }"#,
        )
        .unwrap();
        match &sc.model {
            ModelSpec::CustomKernel(spec) => {
                let (state, obs) = spec.build().unwrap();
                assert_eq!(state.omega_max(), 4.0);
                assert_eq!(obs.omega_max(), 4.0);
            }
            other => panic!("wrong model {other:?}"),
        }
        assert_eq!(sc.evolution.unwrap().t_max_factor, 12.0);
    }

    #[test]
    fn save_load_round_trip_is_stable() {
        let text = r#"{
            "name": "g01",
            "model": {"type": "friedrichs", "Omega": 1.0, "g": 0.1, "omega_max": 2.5},
            "evolution": {"t_max_factor": 12.0, "points": 40},
            "outputs": ["report", "series", "poles"]
        }"#;
        let sc = parse(text).unwrap();
        let first = save_scenario(&sc);
        let reparsed = parse(&first).unwrap();
        let second = save_scenario(&reparsed);
        assert_eq!(first, second);
    }
}
