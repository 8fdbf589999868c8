//! Worst-case robust transmit beamforming for a multi-antenna transmitter
//! serving one information receiver and one energy receiver.
//!
//! The transmitter knows only channel estimates `ĥ`, `ĝ` whose errors lie in
//! a ball of radius `ε`. [`solver`] maximizes the energy guaranteed to the
//! energy receiver while guaranteeing the information rate for every error
//! in the ball; [`worstcase`] provides the closed-form worst cases and a
//! sampling adversary; [`montecarlo`] runs randomized campaigns comparing
//! robust and non-robust designs.

pub mod error;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod rng;
pub mod solver;
pub mod worstcase;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use model::{Beamformer, ChannelVector, RobustInstance};
pub use rng::RandomStream;
pub use solver::BeamformerSolution;
