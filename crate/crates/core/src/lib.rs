//! Schelling's chequerboard segregation model on a torus, extended with a
//! friendship network and moving costs, plus a harness for replicated
//! parameter sweeps with CSV and SVG output.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod population;
pub mod rng;
pub mod utility;

pub use error::{Error, Result};
