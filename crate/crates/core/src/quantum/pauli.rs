use std::fmt;

use crate::error::{Error, Result};
use crate::quantum::statevector::check_qubit_count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A weighted tensor product of single-qubit Paulis.
///
/// `factors[q]` acts on qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    factors: Vec<Pauli>,
    coefficient: f64,
}

impl PauliString {
    pub fn new(factors: Vec<Pauli>, coefficient: f64) -> Result<Self> {
        check_qubit_count(factors.len())?;
        if !coefficient.is_finite() {
            return Err(Error::NonFinite("Pauli coefficient"));
        }
        Ok(Self {
            factors,
            coefficient,
        })
    }

    /// Parses a label such as `"ZZII"`; character `q` acts on qubit `q`.
    pub fn parse(label: &str, coefficient: f64) -> Result<Self> {
        let factors = label
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad Pauli label `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors, coefficient)
    }

    pub fn identity(n_qubits: usize, coefficient: f64) -> Result<Self> {
        Self::new(vec![Pauli::I; n_qubits], coefficient)
    }

    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli, coefficient: f64) -> Result<Self> {
        Self::identity(n_qubits, coefficient)?.with(qubit, pauli)
    }

    /// Replaces the factor on `qubit`.
    pub fn with(mut self, qubit: usize, pauli: Pauli) -> Result<Self> {
        let n_qubits = self.factors.len();
        let slot = self.factors.get_mut(qubit).ok_or(Error::QubitIndex {
            index: qubit,
            n_qubits,
        })?;
        *slot = pauli;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    /// `(flip mask, phase mask, number of Y factors)` describing
    /// `P|b> = i^ny (-1)^popcount(b & phase) |b ^ flip>`.
    pub(crate) fn masks(&self) -> (usize, usize, usize) {
        let mut flip = 0usize;
        let mut phase = 0usize;
        let mut ny = 0usize;
        for (q, p) in self.factors.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => flip |= 1 << q,
                Pauli::Z => phase |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    phase |= 1 << q;
                    ny += 1;
                }
            }
        }
        (flip, phase, ny)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*", self.coefficient)?;
        for p in &self.factors {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p = PauliString::parse("zxIY", 0.5).unwrap();
        assert_eq!(p.factors(), &[Pauli::Z, Pauli::X, Pauli::I, Pauli::Y]);
        assert_eq!(p.to_string(), "0.5*ZXIY");
        assert!(PauliString::parse("ZQ", 1.0).is_err());
        assert!(PauliString::parse("Z", f64::INFINITY).is_err());
    }

    #[test]
    fn masks_follow_lsb_order() {
        let p = PauliString::parse("XIZY", 1.0).unwrap();
        assert_eq!(p.masks(), (0b1001, 0b1100, 1));
    }
}
