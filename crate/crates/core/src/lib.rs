//! Secure sensor activation for battlefield IoT networks, modelled as a
//! graphical Bayesian game.
//!
//! Each sensor decides whether to transmit or sleep. Its utility trades the
//! conditional differential entropy of its Gaussian measurement (given the
//! active neighbours) times the expected secrecy capacity of its sink link
//! against the energy it spends. Utilities are lifted to repercussion
//! utilities, which turns the game into an exact potential game whose
//! sequential best-response dynamics always converge to a pure equilibrium.
//!
//! Module map:
//!
//! * [`topology`]: deployments, sinks and the range-limited communication graph.
//! * [`field`]: RBF covariance and Gaussian entropies.
//! * [`radio`]: path-loss capacities and (expected) secrecy capacity.
//! * [`game`]: utilities, repercussion utilities, potentials, best responses.
//! * [`dynamics`]: best-response learning with 2-hop broadcast accounting.
//! * [`oracle`]: brute-force references for small instances.
//! * [`harness`]: seeded experiment runs, sweeps, CSV and SVG output.

pub mod dynamics;
pub mod error;
pub mod field;
pub mod game;
pub mod harness;
pub mod linalg;
pub mod oracle;
pub mod radio;
pub mod topology;

pub use error::{Error, Result};
