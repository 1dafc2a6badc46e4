//! Simulation and analysis toolkit for quantum query algorithms that may take
//! non-collapsing measurements or make copies of unentangled registers.
//!
//! * [`state`]: state vectors, gates, density matrices and fidelity.
//! * [`engine`]: step circuits and their direct, purified and copy executors.
//! * [`problems`] and [`oracle`]: problem instances and phase or value oracles.
//! * [`algorithms`]: collision, search and partition algorithms as circuits.
//! * [`adversary`]: adversary relations, weight schemes and lower bounds.
//! * [`bench`]: success estimation, budget search and property suites.

pub mod adversary;
pub mod algorithms;
pub mod bench;
pub mod engine;
pub mod error;
pub mod oracle;
pub mod problems;
pub mod state;

pub use error::{Error, Result};
