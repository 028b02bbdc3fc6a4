//! Deterministic structure-preserving particle method for the spatially
//! homogeneous multispecies Landau equation.
//!
//! Particle weights are fixed by a midpoint quadrature of the initial
//! densities and never change; velocities evolve under a pairwise collisional
//! field built from a mollified entropy gradient. The semi-discrete system
//! conserves mass, momentum, and energy and dissipates the regularized
//! entropy; the forward Euler and implicit midpoint steppers preserve those
//! properties as documented in [`integrate`].
//!
//! Entry points:
//! - [`config`] / [`scenario`]: declarative scenario files and state setup,
//! - [`runner`]: the simulation drivers behind the `landau` binary
//!   (`run`, `convergence`, `check-config`),
//! - [`analytic`]: exact solutions used for verification,
//! - the `examples/` directory: one runnable program per capability.
//!
//! Everything is bitwise deterministic for a fixed configuration: parallel
//! loops are over independent output elements and every reduction runs in a
//! fixed order, so the thread count never changes a result.

pub mod analytic;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod init;
pub mod integrate;
pub mod interaction;
pub mod kernel;
pub mod model;
pub mod output;
pub mod presets;
pub mod runner;
pub mod scenario;
pub mod score;
pub mod vec3;

pub use error::{Error, Result};
pub use model::{
    KernelSpec, MomentRecord, ParticleEnsemble, SpeciesMoments, SpeciesSpec, SystemState, Totals,
};
pub use vec3::Vec3;
