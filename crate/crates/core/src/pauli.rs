//! Pauli letters and the bit-mask form of Pauli strings used by the kernels.
//!
//! A Pauli string `P` acts on a computational basis state as
//! `P|k> = i^{n_y} (-1)^{popcount(k & z_mask)} |k ^ x_mask>`, where `x_mask`
//! marks the wires carrying X or Y, `z_mask` the wires carrying Z or Y and
//! `n_y` counts the Y letters. All kernels work from this form, so no matrix
//! is ever built for a multi-qubit Pauli operator.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(Error::invalid(format!("unknown Pauli letter {other:?}"))),
        }
    }
}

/// Bit-mask encoding of a Pauli string on an `n`-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMask {
    pub x_mask: usize,
    pub z_mask: usize,
    pub n_y: u32,
}

impl PauliMask {
    /// Builds the mask for `letters` on a register of `n_qubits`, where wire 0
    /// is the most significant bit of the basis index.
    pub fn new(n_qubits: usize, letters: &[(usize, Pauli)]) -> Result<Self> {
        let mut mask = PauliMask {
            x_mask: 0,
            z_mask: 0,
            n_y: 0,
        };
        for &(wire, letter) in letters {
            if wire >= n_qubits {
                return Err(Error::invalid(format!(
                    "wire {wire} out of range for {n_qubits} qubits"
                )));
            }
            let bit = 1usize << (n_qubits - 1 - wire);
            if (mask.x_mask | mask.z_mask) & bit != 0 {
                return Err(Error::invalid(format!("wire {wire} appears twice")));
            }
            match letter {
                Pauli::X => mask.x_mask |= bit,
                Pauli::Z => mask.z_mask |= bit,
                Pauli::Y => {
                    mask.x_mask |= bit;
                    mask.z_mask |= bit;
                    mask.n_y += 1;
                }
            }
        }
        Ok(mask)
    }

    /// `i^{n_y}`.
    #[inline]
    pub fn y_phase(&self) -> Complex64 {
        match self.n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// `(-1)^{popcount(k & z_mask)}` as a float.
    #[inline]
    pub fn sign(&self, k: usize) -> f64 {
        if (k & self.z_mask).count_ones() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.x_mask == 0
    }
}
