//! Two-stage evolution: a macroscopic interaction damps the off-diagonal
//! terms almost instantly, after which a residual microscopic coupling
//! drives a much slower approach to equilibrium in the rotated basis. Two
//! characteristic times come out: a decoherence time set by the aggregate
//! interaction `N V_i` and a relaxation time set by the small coupling.

use super::{DecoherenceEstimate, Method};
use crate::error::{Error, Result};
use crate::models::MacroscopicBody;
use serde::{Deserialize, Serialize};

/// Aggregate-to-residual coupling ratio below which the two-stage picture
/// gets a warning attached.
const SCALE_SEPARATION_WARN: f64 = 1e3;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoStageModel {
    /// The body whose aggregate interaction drives the fast stage.
    #[serde(rename = "macro")]
    pub macro_body: MacroscopicBody,
    /// Residual microscopic coupling driving the slow stage, eV.
    pub micro_coupling: f64,
}

impl TwoStageModel {
    pub fn validate(&self) -> Result<()> {
        self.macro_body.validate()?;
        if !self.micro_coupling.is_finite() || self.micro_coupling < 0.0 {
            return Err(Error::Validation {
                field: "micro_coupling".into(),
                message: format!("must be nonnegative, got {}", self.micro_coupling),
            });
        }
        Ok(())
    }

    /// Aggregate interaction energy `N V_i` in eV.
    pub fn aggregate_ev(&self) -> Result<f64> {
        let n = self.macro_body.particle_count()?;
        let v_i = self.macro_body.v_i.ok_or_else(|| Error::Validation {
            field: "V_i".into(),
            message: "per-particle interaction required for the two-stage model".into(),
        })?;
        Ok(n * v_i)
    }
}

/// The two characteristic times `(decoherence, relaxation)`. Vanishing
/// residual coupling leaves the relaxation time infinite; a residual
/// coupling at or above the aggregate is an ordering violation.
pub fn two_stage_times(
    model: &TwoStageModel,
) -> Result<(DecoherenceEstimate, DecoherenceEstimate)> {
    model.validate()?;
    let aggregate = model.aggregate_ev()?;
    if aggregate <= 0.0 {
        return Err(Error::Model("aggregate interaction must be positive".into()));
    }
    if model.micro_coupling >= aggregate {
        return Err(Error::Model(format!(
            "relaxation must be slower than decoherence: micro coupling {} >= aggregate {}",
            model.micro_coupling, aggregate
        )));
    }
    let mut deco = DecoherenceEstimate::from_gamma(aggregate, Method::Formula);
    let relax = DecoherenceEstimate::from_gamma(model.micro_coupling, Method::Formula);
    if model.micro_coupling > 0.0 && aggregate / model.micro_coupling < SCALE_SEPARATION_WARN {
        deco = deco.with_warning(format!(
            "aggregate/residual coupling ratio {:.3e} below {SCALE_SEPARATION_WARN:.0e}; the two-stage separation is marginal",
            aggregate / model.micro_coupling
        ));
    }
    Ok((deco, relax))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n_v_i: f64, micro: f64) -> TwoStageModel {
        TwoStageModel {
            macro_body: MacroscopicBody {
                n: Some(n_v_i),
                v_i: Some(1.0),
                ..MacroscopicBody::default()
            },
            micro_coupling: micro,
        }
    }

    #[test]
    fn mole_scale_aggregate_with_second_scale_relaxation() {
        let (deco, relax) = two_stage_times(&model(1e24, 6.582e-16)).unwrap();
        assert!((deco.t_d_seconds - 6.582e-40).abs() < 1e-3 * 6.582e-40);
        assert!((relax.t_d_seconds - 1.0).abs() < 1e-3);
        assert!(relax.t_d_seconds > deco.t_d_seconds);
    }

    #[test]
    fn time_ratio_equals_coupling_ratio() {
        let (deco, relax) = two_stage_times(&model(1e6, 1e3)).unwrap();
        assert!(((relax.t_d_seconds / deco.t_d_seconds) - 1e3).abs() < 1e-9 * 1e3);
    }

    #[test]
    fn vanishing_residual_coupling_never_relaxes() {
        let (_, relax) = two_stage_times(&model(1e24, 0.0)).unwrap();
        assert!(relax.is_infinite());
    }

    #[test]
    fn ordering_violation_is_an_error() {
        assert!(two_stage_times(&model(1.0, 2.0)).is_err());
    }

    #[test]
    fn marginal_separation_warns() {
        let (deco, _) = two_stage_times(&model(100.0, 1.0)).unwrap();
        assert!(!deco.diagnostics.warnings.is_empty());
        let (deco, _) = two_stage_times(&model(1e6, 1.0)).unwrap();
        assert!(deco.diagnostics.warnings.is_empty());
    }
}
