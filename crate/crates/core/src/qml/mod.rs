//! Variational fitting models: parabolic encoding, the layered QNN and the
//! spline-activated VQKAN, with their loss and test metric.

pub mod encoding;
pub mod model;
pub mod objective;
pub mod spline;

pub use encoding::{
    feature_readout, fermi_dirac, parabolic_encode, sample_points, target_function, EncodedInput,
    QML_QUBITS,
};
pub use model::{Forward, ModelKind, ModelSpec};
pub use objective::{test_metric, training_loss, Evaluation, PointResult, TestReport};
pub use spline::{vqkan_angle, BSplineBasis};
