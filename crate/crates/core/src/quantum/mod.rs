//! Dense statevector simulation: Ry gates, Pauli-string observables and
//! exact evolution under small Ising-type Hamiltonians.

mod evolution;
mod hamiltonian;
mod pauli;
mod statevector;

pub use evolution::Propagator;
pub use hamiltonian::{IsingHamiltonian, OneBodyTerm, ProjectorTerm, TwoBodyTerm};
pub use pauli::{Pauli, PauliString};
pub use statevector::{Statevector, MAX_QUBITS};
