//! Simulation and verification toolkit for second-order stochastic
//! interacting-particle systems on the torus and their mean-field limit.
//!
//! The crate covers five layers:
//! - torus geometry and periodized interaction kernels ([`torus`], [`kernel`]),
//! - Langevin dynamics of N particles with direct pairwise forces ([`sim`]),
//! - replica ensembles with deterministic seeding and checkpointing
//!   ([`ensemble`]),
//! - marginal estimation and weighted-norm functionals ([`marginal`]),
//! - deterministic reference solvers for the limiting kinetic and first-order
//!   equations ([`vlasov`]) and the scalar hierarchy bounds ([`hierarchy`]).

pub mod ensemble;
pub mod error;
pub mod hierarchy;
pub mod kernel;
pub mod marginal;
pub mod rng;
pub mod sim;
pub mod tensor_io;
pub mod torus;
pub mod vlasov;

pub use error::{Error, Result};
pub use kernel::{CompiledKernel, KernelFamily, KernelSpec};
pub use sim::{ParticleState, SimConfig};
