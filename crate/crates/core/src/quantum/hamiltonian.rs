use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::statevector::check_qubit_count;
use crate::quantum::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneBodyTerm {
    pub qubit: usize,
    pub axis: Pauli,
    pub coefficient: f64,
}

/// `coefficient * Z_a Z_b`, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBodyTerm {
    pub pair: (usize, usize),
    pub coefficient: f64,
}

/// `p0 |0><0| + p1 |1><1|` on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorTerm {
    pub qubit: usize,
    pub p0: f64,
    pub p1: f64,
}

/// All-to-all Ising-type Hamiltonian with real coefficients.
///
/// The ordered coefficient vector used by noise sampling and training is
/// the one-body coefficients followed by the two-body coefficients.
/// Projector terms sit outside that vector.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingHamiltonian {
    n_qubits: usize,
    one_body: Vec<OneBodyTerm>,
    two_body: Vec<TwoBodyTerm>,
    projectors: Vec<ProjectorTerm>,
}

impl IsingHamiltonian {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        Ok(Self {
            n_qubits,
            one_body: Vec::new(),
            two_body: Vec::new(),
            projectors: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn one_body(&self) -> &[OneBodyTerm] {
        &self.one_body
    }

    pub fn two_body(&self) -> &[TwoBodyTerm] {
        &self.two_body
    }

    pub fn projectors(&self) -> &[ProjectorTerm] {
        &self.projectors
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit < self.n_qubits {
            Ok(())
        } else {
            Err(Error::QubitIndex {
                index: qubit,
                n_qubits: self.n_qubits,
            })
        }
    }

    pub fn add_one_body(&mut self, qubit: usize, axis: Pauli, coefficient: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        if axis == Pauli::I {
            return Err(Error::InvalidArgument(
                "one-body term needs an X, Y or Z axis".into(),
            ));
        }
        if !coefficient.is_finite() {
            return Err(Error::NonFinite("one-body coefficient"));
        }
        self.one_body.push(OneBodyTerm {
            qubit,
            axis,
            coefficient,
        });
        Ok(())
    }

    pub fn add_two_body(&mut self, a: usize, b: usize, coefficient: f64) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::InvalidPair(a, b));
        }
        let pair = (a.min(b), a.max(b));
        if self.two_body.iter().any(|t| t.pair == pair) {
            return Err(Error::DuplicatePair(pair.0, pair.1));
        }
        if !coefficient.is_finite() {
            return Err(Error::NonFinite("two-body coefficient"));
        }
        self.two_body.push(TwoBodyTerm { pair, coefficient });
        Ok(())
    }

    pub fn add_projector(&mut self, term: ProjectorTerm) -> Result<()> {
        self.check_qubit(term.qubit)?;
        if !term.p0.is_finite() || !term.p1.is_finite() {
            return Err(Error::NonFinite("projector weight"));
        }
        self.projectors.push(term);
        Ok(())
    }

    /// Returns a copy with `term` added.
    pub fn with_projector(&self, term: ProjectorTerm) -> Result<Self> {
        let mut h = self.clone();
        h.add_projector(term)?;
        Ok(h)
    }

    /// Number of entries in the coefficient vector.
    pub fn term_count(&self) -> usize {
        self.one_body.len() + self.two_body.len()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.one_body
            .iter()
            .map(|t| t.coefficient)
            .chain(self.two_body.iter().map(|t| t.coefficient))
            .collect()
    }

    pub fn set_coefficients(&mut self, coefficients: &[f64]) -> Result<()> {
        if coefficients.len() != self.term_count() {
            return Err(Error::LengthMismatch {
                what: "Hamiltonian coefficients",
                expected: self.term_count(),
                actual: coefficients.len(),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("Hamiltonian coefficient"));
        }
        let (ones, twos) = coefficients.split_at(self.one_body.len());
        for (t, &c) in self.one_body.iter_mut().zip(ones) {
            t.coefficient = c;
        }
        for (t, &c) in self.two_body.iter_mut().zip(twos) {
            t.coefficient = c;
        }
        Ok(())
    }

    pub fn with_coefficients(&self, coefficients: &[f64]) -> Result<Self> {
        let mut h = self.clone();
        h.set_coefficients(coefficients)?;
        Ok(h)
    }

    /// Same operator written as a sum of Pauli strings.
    pub fn pauli_terms(&self) -> Vec<PauliString> {
        let n = self.n_qubits;
        let mut out = Vec::with_capacity(self.term_count() + 2 * self.projectors.len());
        for t in &self.one_body {
            out.push(
                PauliString::single(n, t.qubit, t.axis, t.coefficient).expect("validated term"),
            );
        }
        for t in &self.two_body {
            out.push(
                PauliString::single(n, t.pair.0, Pauli::Z, t.coefficient)
                    .and_then(|p| p.with(t.pair.1, Pauli::Z))
                    .expect("validated term"),
            );
        }
        for t in &self.projectors {
            out.push(PauliString::identity(n, 0.5 * (t.p0 + t.p1)).expect("validated term"));
            out.push(
                PauliString::single(n, t.qubit, Pauli::Z, 0.5 * (t.p0 - t.p1))
                    .expect("validated term"),
            );
        }
        out
    }

    /// Dense `2^N x 2^N` matrix in the qubit-0-LSB basis.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.one_body {
            let mask = 1usize << t.qubit;
            for b in 0..dim {
                let bit = b & mask != 0;
                match t.axis {
                    Pauli::X => m[(b ^ mask, b)] += t.coefficient,
                    Pauli::Z => m[(b, b)] += if bit { -t.coefficient } else { t.coefficient },
                    Pauli::Y => {
                        let v = if bit {
                            Complex64::new(0.0, -1.0)
                        } else {
                            Complex64::new(0.0, 1.0)
                        };
                        m[(b ^ mask, b)] += v * t.coefficient;
                    }
                    Pauli::I => unreachable!("rejected on insertion"),
                }
            }
        }
        for t in &self.two_body {
            let mask = (1usize << t.pair.0) | (1usize << t.pair.1);
            for b in 0..dim {
                let sign = if (b & mask).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                m[(b, b)] += sign * t.coefficient;
            }
        }
        for t in &self.projectors {
            let mask = 1usize << t.qubit;
            for b in 0..dim {
                m[(b, b)] += if b & mask == 0 { t.p0 } else { t.p1 };
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn pauli_matrices() {
        let mut h = IsingHamiltonian::new(1).unwrap();
        h.add_one_body(0, Pauli::Z, 1.0).unwrap();
        let m = h.to_matrix();
        assert_eq!(m[(0, 0)], c(1.0));
        assert_eq!(m[(1, 1)], c(-1.0));
        assert_eq!(m[(0, 1)], c(0.0));

        let mut h = IsingHamiltonian::new(1).unwrap();
        h.add_one_body(0, Pauli::X, 0.5).unwrap();
        let m = h.to_matrix();
        assert_eq!(m[(0, 1)], c(0.5));
        assert_eq!(m[(1, 0)], c(0.5));
        assert_eq!(m[(0, 0)], c(0.0));

        let mut h = IsingHamiltonian::new(2).unwrap();
        h.add_two_body(0, 1, 1.0).unwrap();
        let m = h.to_matrix();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn hermitian_by_construction() {
        let mut h = IsingHamiltonian::new(3).unwrap();
        h.add_one_body(0, Pauli::X, 0.3).unwrap();
        h.add_one_body(1, Pauli::Y, -0.7).unwrap();
        h.add_one_body(2, Pauli::Z, 1.1).unwrap();
        h.add_two_body(0, 2, 0.4).unwrap();
        h.add_projector(ProjectorTerm {
            qubit: 0,
            p0: 0.2,
            p1: 0.8,
        })
        .unwrap();
        let m = h.to_matrix();
        let residual = (&m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(residual < 1e-14);
    }

    #[test]
    fn pair_rules() {
        let mut h = IsingHamiltonian::new(3).unwrap();
        h.add_two_body(2, 0, 1.0).unwrap();
        assert_eq!(h.two_body()[0].pair, (0, 2));
        assert_eq!(h.add_two_body(0, 2, 1.0), Err(Error::DuplicatePair(0, 2)));
        assert_eq!(h.add_two_body(1, 1, 1.0), Err(Error::InvalidPair(1, 1)));
        assert!(h.add_two_body(1, 3, 1.0).is_err());
    }

    #[test]
    fn coefficient_vector_order() {
        let mut h = IsingHamiltonian::new(2).unwrap();
        h.add_one_body(0, Pauli::Z, 1.0).unwrap();
        h.add_two_body(0, 1, 3.0).unwrap();
        h.add_one_body(1, Pauli::X, 2.0).unwrap();
        assert_eq!(h.coefficients(), vec![1.0, 2.0, 3.0]);
        h.set_coefficients(&[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(h.two_body()[0].coefficient, 6.0);
        assert!(h.set_coefficients(&[1.0]).is_err());
    }

    #[test]
    fn pauli_terms_match_matrix() {
        let mut h = IsingHamiltonian::new(2).unwrap();
        h.add_one_body(1, Pauli::Y, 0.3).unwrap();
        h.add_two_body(0, 1, -0.4).unwrap();
        h.add_projector(ProjectorTerm {
            qubit: 0,
            p0: 0.9,
            p1: 0.1,
        })
        .unwrap();
        let mut rebuilt = DMatrix::<Complex64>::zeros(4, 4);
        for p in h.pauli_terms() {
            let (flip, phase, ny) = p.masks();
            let yph = Complex64::new(0.0, 1.0).powu(ny as u32);
            for b in 0..4 {
                let s = if (b & phase).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                rebuilt[(b ^ flip, b)] += yph * s * p.coefficient();
            }
        }
        let diff = (&rebuilt - h.to_matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-15);
    }
}
