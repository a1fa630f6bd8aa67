//! Simulation and estimation tools for the percolated random geometric graph
//! `G(λ, p)`: Poisson points of intensity λ joined when at distance ≤ 1, each
//! edge kept independently with probability p.

pub mod components;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod graph;
pub mod lattice;
pub mod planar;
pub mod points;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
