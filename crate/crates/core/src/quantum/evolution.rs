use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{IsingHamiltonian, Statevector};

/// Exact unitary `exp(-i H t)` for a fixed Hamiltonian and duration,
/// built from the eigendecomposition of the dense Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Propagator {
    n_qubits: usize,
    unitary: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new(h: &IsingHamiltonian, duration: f64) -> Result<Self> {
        if !duration.is_finite() {
            return Err(Error::NonFinite("evolution duration"));
        }
        Ok(Self {
            n_qubits: h.n_qubits(),
            unitary: unitary_from_hermitian(h.to_matrix(), duration),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn unitary(&self) -> &DMatrix<Complex64> {
        &self.unitary
    }

    pub fn apply(&self, state: &mut Statevector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                actual: state.n_qubits(),
            });
        }
        let dim = state.dim();
        let input = state.amplitudes().to_vec();
        let out = state.amplitudes_mut();
        for (row, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, a) in input.iter().enumerate().take(dim) {
                acc += self.unitary[(row, col)] * a;
            }
            *slot = acc;
        }
        Ok(())
    }
}

fn unitary_from_hermitian(matrix: DMatrix<Complex64>, duration: f64) -> DMatrix<Complex64> {
    let dim = matrix.nrows();
    if duration == 0.0 {
        return DMatrix::identity(dim, dim);
    }
    let eigen = SymmetricEigen::new(matrix);
    let vectors = &eigen.eigenvectors;
    let phases = DMatrix::from_diagonal(&eigen.eigenvalues.map(|lambda| {
        let (s, c) = (-lambda * duration).sin_cos();
        Complex64::new(c, s)
    }));
    vectors * phases * vectors.adjoint()
}

impl Statevector {
    /// `exp(-i H t)|psi>`, exact.
    pub fn evolve(&mut self, h: &IsingHamiltonian, duration: f64) -> Result<()> {
        if h.n_qubits() != self.n_qubits() {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits(),
                actual: h.n_qubits(),
            });
        }
        Propagator::new(h, duration)?.apply(self)
    }
}
