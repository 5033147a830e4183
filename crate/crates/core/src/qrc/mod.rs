//! Quantum reservoir computing: waveform corpus, input injection, feature
//! harvesting, pseudoinverse readout and the echo benchmark.

pub mod echo;
pub mod readout;
pub mod reservoir;
pub mod waveform;

pub use echo::{echo_teacher, mean_loss, run_echo_case, run_echo_suite, EchoConfig, EchoRecord};
pub use readout::{fit_filter, predict, qrc_loss, DEFAULT_RCOND};
pub use reservoir::{harvest_features, input_operator, reservoir_row, Reservoir, INPUT_QUBIT};
pub use waveform::{generate_waveform, WaveKind, WaveformSpec};
