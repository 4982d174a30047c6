//! Decoherence times for quantum systems with continuous energy spectra.
//!
//! The library predicts the decay time of the off-diagonal ("fluctuating")
//! part of an expectation value through two independent routes and checks
//! them against each other:
//!
//! * **Pole route** — locate the complex poles of the analytically continued
//!   kernels (or of the resolvent's dispersion function) and read off the
//!   damping rate `gamma`; the decoherence time is `hbar / gamma`.
//! * **Time-domain route** — evaluate the oscillatory double integral of the
//!   fluctuating term directly on a time grid ([`oscint`]) and fit the decay
//!   of its envelope ([`decofit`]).
//!
//! Module map:
//!
//! * [`constants`] — physical constants (SI-exact, eV-derived).
//! * [`energy`] — energy-domain newtypes and the mean/difference coordinates.
//! * [`kernel`] — regular two-point kernels (analytic families, grids).
//! * [`vanhove`] — states, observables, expectation values, weak limits.
//! * [`quad`] — Gauss-Kronrod quadrature, plain and oscillation-aware.
//! * [`oscint`] — direct evaluation of the fluctuating term over time.
//! * [`cpoles`] — pole counting/location, residues, rational continuation.
//! * [`models`] — resonance, thermal-bath, macroscopic and two-stage models.
//! * [`decofit`] — envelope extraction and exponential decay fitting.

pub mod constants;
pub mod cpoles;
pub mod decofit;
pub mod energy;
pub mod error;
pub mod kernel;
pub mod models;
pub mod oscint;
pub mod quad;
pub mod vanhove;

pub use energy::{ComplexEnergy, EnergyPoint, LambdaNuPoint};
pub use error::{Error, Result};
pub use kernel::{KernelForm, LambdaProfile, RegularKernel, SeparableFactor};
pub use models::{DecoherenceEstimate, Method};
pub use vanhove::{ExpectationSeries, ScalarField, VanHoveObservable, VanHoveState};
