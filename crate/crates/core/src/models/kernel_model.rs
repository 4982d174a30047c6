//! Pole analysis of the kernels themselves: the upper-half-plane poles of
//! the continued product `conj(rho') O'` in the difference coordinate set
//! the decoherence rate, and their absence (an entire continuation, e.g. a
//! Gaussian) means the decay is faster than exponential and the exponential
//! decoherence time is infinite — the calibration case of free evolution.
//!
//! Analytic kernel families are continued by their closed forms and the
//! poles located by contour counting; sampled kernels (grids, closures) go
//! through rational continuation of real-axis samples instead, and their
//! poles carry the approximant source tag.

use super::{DecoherenceEstimate, Method};
use crate::cpoles::{self, PoleLocation, PoleSource, SearchRectangle};
use crate::error::{Error, Result};
use crate::vanhove::{VanHoveObservable, VanHoveState};
use num_complex::Complex64;

/// Result of a kernel pole analysis: the located decay poles (upper
/// half-plane) and the estimate they imply.
#[derive(Debug, Clone)]
pub struct KernelPoleAnalysis {
    pub poles: Vec<PoleLocation>,
    pub estimate: DecoherenceEstimate,
}

/// Number of real-axis samples taken for the rational-continuation route.
const SAMPLE_COUNT: usize = 201;

/// Locate the decay poles of the kernel product and derive the estimate.
/// No pole in the search window yields the infinite sentinel.
pub fn analyze_kernel_poles(
    state: &VanHoveState,
    obs: &VanHoveObservable,
) -> Result<KernelPoleAnalysis> {
    if state.omega_max() != obs.omega_max() {
        return Err(Error::Domain(format!(
            "state and observable cutoffs differ: {} vs {}",
            state.omega_max(),
            obs.omega_max()
        )));
    }
    if state.regular().is_zero() || obs.regular().is_zero() {
        return Ok(KernelPoleAnalysis {
            poles: Vec::new(),
            estimate: DecoherenceEstimate::infinite(Method::Pole)
                .with_warning("zero off-diagonal content: nothing to decohere"),
        });
    }

    let cont_state = state.regular().nu_continuation();
    let cont_obs = obs.regular().nu_continuation();
    let scale = match (state.regular().nu_scale(), obs.regular().nu_scale()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };

    let poles = match (cont_state, cont_obs) {
        (Some(fs), Some(fo)) => {
            let Some(scale) = scale else {
                // Both factors are entire and structureless in the
                // difference coordinate (constants): no decay at all.
                return Ok(KernelPoleAnalysis {
                    poles: Vec::new(),
                    estimate: DecoherenceEstimate::infinite(Method::Pole).with_warning(
                        "kernel product has no difference-coordinate structure; no poles exist",
                    ),
                });
            };
            // Search band: oscillation energies within the wedge, damping
            // energies up to ten kernel widths. The real half-width is
            // clipped to the region where the closed-form continuations
            // stay representable (Gaussians underflow beyond ~30 widths).
            let half_width = (2.0 * state.omega_max()).min(30.0 * scale);
            let window = SearchRectangle::new(
                -half_width,
                half_width,
                1e-6 * scale,
                10.0 * scale,
            )?;
            let product = |z: Complex64| fs(z) * fo(z);
            cpoles::locate_poles(&product, &window, 1e-10 * scale, PoleSource::InitialCondition)?
        }
        _ => sampled_route(state, obs)?,
    };

    let estimate = match poles
        .iter()
        .filter(|p| p.position.im > 0.0)
        .min_by(|a, b| a.position.im.partial_cmp(&b.position.im).unwrap())
    {
        Some(dominant) => DecoherenceEstimate::from_gamma(dominant.position.im, Method::Pole)
            .with_poles(poles.clone()),
        None => DecoherenceEstimate::infinite(Method::Pole)
            .with_poles(poles.clone())
            .with_warning("no pole in the upper half-plane: decoherence is only nominal"),
    };
    Ok(KernelPoleAnalysis { poles, estimate })
}

/// Continuation from real-axis samples of the product, taken along the
/// difference coordinate at the mean energy where the product is largest.
fn sampled_route(state: &VanHoveState, obs: &VanHoveObservable) -> Result<Vec<PoleLocation>> {
    let omega_max = state.omega_max();
    let product = |lambda: f64, nu: f64| {
        state.regular().lambda_nu().eval_unchecked(lambda, nu).conj()
            * obs.regular().lambda_nu().eval_unchecked(lambda, nu)
    };

    // Pick the strongest mean-energy slice on a coarse scan; ties (flat
    // products) keep the center, where the admissible nu span is widest.
    let mut best_lambda = 0.5 * omega_max;
    let mut best_mag = product(best_lambda, 0.0).norm();
    for i in 1..64 {
        let lambda = omega_max * i as f64 / 64.0;
        let mag = product(lambda, 0.0).norm();
        if mag > best_mag * (1.0 + 1e-9) {
            best_mag = mag;
            best_lambda = lambda;
        }
    }
    if best_mag <= 0.0 {
        return Ok(Vec::new());
    }

    // Grid kernels are exact only on their node lattice; between nodes the
    // bilinear interpolant has kinks that rational fits cannot absorb. Snap
    // the slice and the nu samples onto the lattice when one is present.
    let grid_h = state
        .regular()
        .grid_spacing()
        .or_else(|| obs.regular().grid_spacing());
    let samples: Vec<(f64, Complex64)> = match grid_h {
        Some(h) => {
            best_lambda = (best_lambda / h).round() * h;
            let half = 2.0 * best_lambda.min(omega_max - best_lambda);
            let max_index = (half / (2.0 * h)).floor() as i64;
            let stride = (2 * max_index / (SAMPLE_COUNT as i64 - 1)).max(1);
            (-max_index..=max_index)
                .step_by(stride as usize)
                .map(|m| {
                    let nu = 2.0 * m as f64 * h;
                    (nu, product(best_lambda, nu))
                })
                .collect()
        }
        None => {
            let half = 2.0 * best_lambda.min(omega_max - best_lambda);
            (0..SAMPLE_COUNT)
                .map(|i| {
                    let nu = -half + 2.0 * half * i as f64 / (SAMPLE_COUNT - 1) as f64;
                    (nu, product(best_lambda, nu))
                })
                .collect()
        }
    };
    let approximant = cpoles::continue_from_samples(&samples)?;
    Ok(approximant
        .poles()?
        .into_iter()
        .filter(|p| p.position.im > 0.0)
        .collect())
}
