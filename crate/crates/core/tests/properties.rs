//! Property tests for the algebraic invariants.

use decotime_core::kernel::{hermitize, KernelForm, LambdaProfile, RegularKernel};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Hermitization is a projection: output Hermitian, Hermitian fixed.
    #[test]
    fn hermitize_output_is_hermitian(
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        c in -2.0f64..2.0,
        w in 0.1f64..9.9,
        wp in 0.1f64..9.9,
    ) {
        let kernel = RegularKernel::custom(
            move |x, y| Complex64::new(a * x + b * y, c * (x - y) + b),
            100.0,
            10.0,
        )
        .unwrap();
        let h = hermitize(&kernel);
        let defect = (h.eval(w, wp) - h.eval(wp, w).conj()).norm();
        prop_assert!(defect < 1e-12);
        let hh = hermitize(&h);
        prop_assert!((hh.eval(w, wp) - h.eval(w, wp)).norm() < 1e-12);
    }

    /// Mean/difference coordinates invert the spectrum coordinates
    /// pointwise.
    #[test]
    fn lambda_nu_round_trip(
        w in 0.0f64..10.0,
        wp in 0.0f64..10.0,
        gamma in 0.01f64..1.0,
    ) {
        let kernel = RegularKernel::new(
            KernelForm::LorentzianNu {
                gamma,
                profile: LambdaProfile::Uniform,
                amplitude: 1.0,
            },
            10.0,
        )
        .unwrap();
        let direct = kernel.eval(w, wp);
        let lambda = 0.5 * (w + wp);
        let nu = w - wp;
        let via = kernel.lambda_nu().eval_unchecked(lambda, nu);
        prop_assert!((direct - via).norm() <= 1e-12 * direct.norm().max(1e-30));
    }

    /// The wedge admits exactly the image of the quarter-plane.
    #[test]
    fn wedge_membership_matches_omega_positivity(
        lambda in 0.0f64..5.0,
        nu in -12.0f64..12.0,
    ) {
        let kernel = RegularKernel::custom(|_, _| Complex64::ONE, 1.0, 10.0).unwrap();
        let ln = kernel.lambda_nu();
        let omega = lambda + 0.5 * nu;
        let omega_p = lambda - 0.5 * nu;
        let inside = omega >= 0.0 && omega_p >= 0.0 && omega <= 10.0 && omega_p <= 10.0;
        prop_assert_eq!(ln.eval(lambda, nu).is_ok(), inside);
    }
}
