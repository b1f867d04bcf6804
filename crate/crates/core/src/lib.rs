//! Ground states of a one-dimensional repulsive Bose gas in a random
//! point-scatterer potential: deterministic disorder sampling, a
//! finite-difference minimizer for the interacting ground state, mean-field
//! excitation spectra with gap and depletion bounds, and a grand-canonical
//! mass-repartition model with its phase diagram.
//!
//! Everything is deterministic given the seeds: sampling uses counter-seeded
//! ChaCha12 streams and all reductions preserve order, so results are
//! identical with the `parallel` feature on or off.

pub mod disorder;
pub mod elliptic;
pub mod eigen;
pub mod error;
pub mod gc;
pub mod gp;
pub mod grid;
pub mod observables;
pub mod parallel;
pub mod params;
pub mod quad;
pub mod spectrum;

pub use error::{Error, Result};
pub use params::{ModelParams, Sigma, SolveOpts};
