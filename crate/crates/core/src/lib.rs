//! Simulation library for phase estimation in a Mach-Zehnder interferometer
//! fed with q-deformed coherent and cat states.
//!
//! Modules build on each other roughly bottom-up:
//!
//! * [`qalgebra`]: q-deformed integers and log-domain q-factorials.
//! * [`states`]: truncated Fock amplitude vectors and photon moments.
//! * [`wigner`]: Wigner (small) d-matrix elements and phi derivatives.
//! * [`mzi`]: two-mode interferometer outcome amplitudes and likelihoods.
//! * [`fisher`]: quantum and classical Fisher information and bounds.
//! * [`bayes`]: grid-based Bayesian phase posterior and point estimates.
//! * [`rng`]: deterministic seeding for reproducible Monte-Carlo runs.
//! * [`harness`]: experiment configs, sweep drivers, CSV/JSON/SVG output.

pub mod bayes;
pub(crate) mod dd;
pub mod error;
pub mod fisher;
pub mod harness;
pub mod kahan;
pub mod mzi;
pub mod qalgebra;
pub mod rng;
pub mod states;
pub mod wigner;

pub use error::{Error, Result};
pub use qalgebra::DeformationParameter;
pub use states::{
    build_state, custom_state, photon_moments, q_cat, q_cat_with, q_coherent,
    q_coherent_with, solve_amplitude, CatParity, FockAmplitudes, PhotonMoments, StateKind,
    TruncationPolicy,
};
