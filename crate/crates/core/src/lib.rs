//! Floquet time-crystal dynamics with controlled Gaussian coefficient noise,
//! used as the compute substrate for quantum reservoir computing, a layered
//! quantum neural network and a variational quantum Kolmogorov-Arnold
//! network.

pub mod cmaes;
pub mod error;
pub mod floquet;
pub mod harness;
pub mod qml;
pub mod qrc;
pub mod quantum;
pub mod rng;

pub use error::{Error, Result};
