//! Conditional mean waiting times in a two-station, two-class tandem network
//! of exhaustive polling queues.

pub mod deterministic;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod markov;
pub mod model;
pub mod primitives;
pub mod scenario;
pub mod simulator;

pub use error::{Error, Result};
