//! Simulation and synchronization-stability analysis for networks of
//! diffusively coupled nonlinear oscillators on undirected graphs.
//!
//! The pipeline: build a graph and its Laplacian spectrum ([`graph`]),
//! assemble the coupled vector field over planar Van der Pol nodes
//! ([`models`]), integrate it and locate the node limit cycle
//! ([`integrate`]), certify synchronization mode by mode through monodromy
//! matrices and the master stability function ([`floquet`]), and measure
//! synchronization in simulated trajectories ([`sync`]). The [`cli`] module
//! exposes all of it behind the `oscnet` binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod floquet;
pub mod graph;
pub mod integrate;
pub mod models;
pub mod output;
pub mod sync;

pub use error::{Error, Result};
