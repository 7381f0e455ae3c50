//! Dense state vectors and strided gate kernels.
//!
//! Wire 0 is the most significant bit of the amplitude index, so the basis
//! state `|q0 q1 ... q(n-1)>` lives at index `q0 * 2^(n-1) + ... + q(n-1)`.
//! Global phase is never meaningful; compare probabilities or expectations.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliMask;

pub const MAX_QUBITS: usize = 20;

const UNITARY_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

#[inline]
fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A 2x2 or 4x4 complex matrix stored row-major.
///
/// For two-qubit gates the first wire passed to [`Statevector::apply_2q`] is
/// the first tensor factor, i.e. the local basis order is `|ab>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::invalid(format!("gate dimension must be 2 or 4, got {dim}")));
        }
        if entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "{dim}x{dim} gate needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(GateMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::default(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = c(1.0, 0.0);
        }
        GateMatrix { dim, entries }
    }

    pub fn hadamard() -> Self {
        let h = FRAC_1_SQRT_2;
        GateMatrix {
            dim: 2,
            entries: vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
        }
    }

    pub fn s_dagger() -> Self {
        GateMatrix {
            dim: 2,
            entries: vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)],
        }
    }

    pub fn pauli_x() -> Self {
        GateMatrix {
            dim: 2,
            entries: vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        }
    }

    /// `exp(-i theta X / 2)`
    pub fn rx(theta: f64) -> Self {
        let (s, co) = (theta / 2.0).sin_cos();
        GateMatrix {
            dim: 2,
            entries: vec![c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)],
        }
    }

    /// `exp(-i theta Y / 2)`
    pub fn ry(theta: f64) -> Self {
        let (s, co) = (theta / 2.0).sin_cos();
        GateMatrix {
            dim: 2,
            entries: vec![c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)],
        }
    }

    /// `exp(-i theta Z / 2)`
    pub fn rz(theta: f64) -> Self {
        let (s, co) = (theta / 2.0).sin_cos();
        GateMatrix {
            dim: 2,
            entries: vec![c(co, -s), c(0.0, 0.0), c(0.0, 0.0), c(co, s)],
        }
    }

    /// Controlled NOT with the first wire as control.
    pub fn cnot() -> Self {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        GateMatrix {
            dim: 4,
            entries: vec![l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o],
        }
    }

    /// `exp(-i theta (XX + YY))`, the parameterized iSWAP-dagger.
    pub fn iswap_dagger(theta: f64) -> Self {
        // XX + YY = 2(|01><10| + |10><01|), so the exponential acts as a
        // rotation by 2 theta inside span{|01>, |10>}.
        let (s, co) = (2.0 * theta).sin_cos();
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        GateMatrix {
            dim: 4,
            entries: vec![
                l, o, o, o, //
                o, c(co, 0.0), c(0.0, -s), o, //
                o, c(0.0, -s), c(co, 0.0), o, //
                o, o, o, l,
            ],
        }
    }

    /// `exp(-i phi ZZ)`
    pub fn cphase(phi: f64) -> Self {
        let m = Complex64::from_polar(1.0, -phi);
        let p = Complex64::from_polar(1.0, phi);
        let o = c(0.0, 0.0);
        GateMatrix {
            dim: 4,
            entries: vec![m, o, o, o, o, p, o, o, o, o, p, o, o, o, o, m],
        }
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![Complex64::default(); d * d];
        for r in 0..d {
            for col in 0..d {
                entries[col * d + r] = self.get(r, col).conj();
            }
        }
        GateMatrix { dim: d, entries }
    }

    pub fn matmul(&self, other: &GateMatrix) -> Result<GateMatrix> {
        if self.dim != other.dim {
            return Err(Error::invalid("gate dimension mismatch"));
        }
        let d = self.dim;
        let mut entries = vec![Complex64::default(); d * d];
        for r in 0..d {
            for col in 0..d {
                entries[r * d + col] = (0..d).map(|k| self.get(r, k) * other.get(k, col)).sum();
            }
        }
        Ok(GateMatrix { dim: d, entries })
    }

    /// Largest entrywise deviation of `G G^dagger` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for col in 0..d {
                let v: Complex64 = (0..d).map(|k| self.get(r, k) * self.get(col, k).conj()).sum();
                let target = if r == col { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_error() <= UNITARY_TOL
    }
}

/// Pure state of `n_qubits` qubits as `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// Computational basis state; `bits[0]` is wire 0 (the most significant bit).
    pub fn basis(n_qubits: usize, bits: &[u8]) -> Result<Self> {
        check_qubits(n_qubits)?;
        if bits.len() != n_qubits {
            return Err(Error::invalid(format!(
                "bitstring of length {} for {} qubits",
                bits.len(),
                n_qubits
            )));
        }
        let mut index = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::invalid(format!("bit value {b} is not 0 or 1")));
            }
            index = (index << 1) | b as usize;
        }
        Ok(Self::basis_index(n_qubits, index))
    }

    pub(crate) fn basis_index(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::default(); 1 << n_qubits];
        amplitudes[index] = c(1.0, 0.0);
        Statevector {
            n_qubits,
            amplitudes,
        }
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Statevector {
            n_qubits,
            amplitudes,
        }
    }

    /// `|0...0>`
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self::basis_index(n_qubits, 0))
    }

    /// Wraps raw amplitudes. The length must be a power of two and the vector
    /// must be normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::invalid(format!("amplitude count {len} is not 2^n with n >= 1")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        let sv = Statevector {
            n_qubits,
            amplitudes,
        };
        let norm = sv.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("state is not normalized (|psi|^2 = {norm})")));
        }
        Ok(sv)
    }

    /// Tensor product `self ⊗ other`, with `self` on the leading wires.
    pub fn tensor(&self, other: &Statevector) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        check_qubits(n)?;
        let mut amplitudes = Vec::with_capacity(1 << n);
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        Ok(Statevector {
            n_qubits: n,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_same(&self, other: &Statevector) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::invalid(format!(
                "qubit count mismatch: {} vs {}",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    #[inline]
    fn bit(&self, wire: usize) -> usize {
        1 << (self.n_qubits - 1 - wire)
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire >= self.n_qubits {
            return Err(Error::invalid(format!(
                "wire {wire} out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Applies a 2x2 unitary to `wire`.
    pub fn apply_1q(&mut self, gate: &GateMatrix, wire: usize) -> Result<()> {
        self.check_wire(wire)?;
        if gate.dim() != 2 {
            return Err(Error::invalid("apply_1q needs a 2x2 gate"));
        }
        if !gate.is_unitary() {
            return Err(Error::ContractViolation(format!(
                "gate is not unitary (error {:.3e})",
                gate.unitarity_error()
            )));
        }
        self.apply_1q_unchecked(gate, wire);
        Ok(())
    }

    pub(crate) fn apply_1q_unchecked(&mut self, gate: &GateMatrix, wire: usize) {
        let stride = self.bit(wire);
        let [m00, m01, m10, m11] = [gate.get(0, 0), gate.get(0, 1), gate.get(1, 0), gate.get(1, 1)];
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = m00 * x0 + m01 * x1;
                *a1 = m10 * x0 + m11 * x1;
            }
        }
    }

    /// Applies a 4x4 unitary to the ordered wire pair `(wire_a, wire_b)`.
    pub fn apply_2q(&mut self, gate: &GateMatrix, wire_a: usize, wire_b: usize) -> Result<()> {
        self.check_wire(wire_a)?;
        self.check_wire(wire_b)?;
        if wire_a == wire_b {
            return Err(Error::invalid(format!("two-qubit gate on repeated wire {wire_a}")));
        }
        if gate.dim() != 4 {
            return Err(Error::invalid("apply_2q needs a 4x4 gate"));
        }
        if !gate.is_unitary() {
            return Err(Error::ContractViolation(format!(
                "gate is not unitary (error {:.3e})",
                gate.unitarity_error()
            )));
        }
        self.apply_2q_unchecked(gate, wire_a, wire_b);
        Ok(())
    }

    pub(crate) fn apply_2q_unchecked(&mut self, gate: &GateMatrix, wire_a: usize, wire_b: usize) {
        let ba = self.bit(wire_a);
        let bb = self.bit(wire_b);
        let m = gate.entries();
        let offsets = [0, bb, ba, ba | bb];
        for base in 0..self.amplitudes.len() {
            if base & (ba | bb) != 0 {
                continue;
            }
            let x = offsets.map(|o| self.amplitudes[base + o]);
            for (r, o) in offsets.iter().enumerate() {
                self.amplitudes[base + o] =
                    m[4 * r] * x[0] + m[4 * r + 1] * x[1] + m[4 * r + 2] * x[2] + m[4 * r + 3] * x[3];
            }
        }
    }

    /// CNOT as a permutation of amplitudes.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_wire(control)?;
        self.check_wire(target)?;
        if control == target {
            return Err(Error::invalid(format!("CNOT on repeated wire {control}")));
        }
        self.apply_cnot_unchecked(control, target);
        Ok(())
    }

    pub(crate) fn apply_cnot_unchecked(&mut self, control: usize, target: usize) {
        let bc = self.bit(control);
        let bt = self.bit(target);
        for k in 0..self.amplitudes.len() {
            if k & bc != 0 && k & bt == 0 {
                self.amplitudes.swap(k, k | bt);
            }
        }
    }

    /// Applies `exp(-i angle P / 2)` for the Pauli string encoded by `mask`.
    pub fn apply_pauli_rotation(&mut self, mask: &PauliMask, angle: f64) {
        let (s, co) = (angle / 2.0).sin_cos();
        if mask.is_diagonal() {
            let plus = c(co, -s);
            let minus = c(co, s);
            for (k, a) in self.amplitudes.iter_mut().enumerate() {
                *a *= if mask.sign(k) > 0.0 { plus } else { minus };
            }
            return;
        }
        // -i sin * i^{n_y}, applied to the partner amplitude with its sign.
        let coupling = c(0.0, -s) * mask.y_phase();
        let pivot = 1usize << (usize::BITS - 1 - mask.x_mask.leading_zeros());
        for k in 0..self.amplitudes.len() {
            if k & pivot != 0 {
                continue;
            }
            let j = k ^ mask.x_mask;
            let (ak, aj) = (self.amplitudes[k], self.amplitudes[j]);
            self.amplitudes[k] = co * ak + coupling * mask.sign(j) * aj;
            self.amplitudes[j] = co * aj + coupling * mask.sign(k) * ak;
        }
    }

    /// Returns `P|self>` for the Pauli string encoded by `mask`.
    pub fn pauli_applied(&self, mask: &PauliMask) -> Statevector {
        let phase = mask.y_phase();
        let mut out = vec![Complex64::default(); self.amplitudes.len()];
        for (k, a) in self.amplitudes.iter().enumerate() {
            out[k ^ mask.x_mask] = phase * mask.sign(k) * a;
        }
        Statevector {
            n_qubits: self.n_qubits,
            amplitudes: out,
        }
    }

    /// `<self|P|other>` in one pass, without materializing `P|other>`.
    pub fn pauli_matrix_element(&self, mask: &PauliMask, other: &Statevector) -> Complex64 {
        let mut acc = Complex64::default();
        if mask.is_diagonal() {
            for (k, (a, b)) in self.amplitudes.iter().zip(&other.amplitudes).enumerate() {
                acc += a.conj() * b * mask.sign(k);
            }
            return acc;
        }
        for (k, b) in other.amplitudes.iter().enumerate() {
            acc += self.amplitudes[k ^ mask.x_mask].conj() * b * mask.sign(k);
        }
        acc * mask.y_phase()
    }

    /// `<self|P|self>`, real for any Pauli string.
    pub fn pauli_expectation(&self, mask: &PauliMask) -> f64 {
        if mask.is_diagonal() {
            return self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(k, a)| a.norm_sqr() * mask.sign(k))
                .sum();
        }
        self.pauli_matrix_element(mask, self).re
    }

    /// Schmidt coefficients (descending) of the cut after `left` wires: the
    /// singular values of the amplitudes reshaped to `2^left x 2^(n-left)`.
    pub fn schmidt_coefficients(&self, left: usize) -> Result<Vec<f64>> {
        if left == 0 || left >= self.n_qubits {
            return Err(Error::invalid(format!(
                "cut after {left} wires is not a bipartition of {} qubits",
                self.n_qubits
            )));
        }
        let rows = 1 << left;
        let cols = 1 << (self.n_qubits - left);
        let m = nalgebra::DMatrix::from_fn(rows, cols, |r, col| self.amplitudes[r * cols + col]);
        let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(sv)
    }

    /// Von Neumann entropy (natural log) of the cut after `left` wires.
    pub fn entanglement_entropy(&self, left: usize) -> Result<f64> {
        Ok(self
            .schmidt_coefficients(left)?
            .into_iter()
            .map(|s| s * s)
            .filter(|&p| p > 1e-300)
            .map(|p| -p * p.ln())
            .sum())
    }
}

/// `Re <psi|O|psi>` for a linear observable given as a state-to-state map.
///
/// Returns an error when the imaginary residue exceeds `1e-9`, which means the
/// applier is not Hermitian.
pub fn inner_expectation<F>(state: &Statevector, observable: F) -> Result<f64>
where
    F: FnOnce(&Statevector) -> Statevector,
{
    let applied = observable(state);
    let value = state.inner(&applied)?;
    if value.im.abs() > 1e-9 {
        return Err(Error::ContractViolation(format!(
            "observable expectation has imaginary part {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::invalid(format!(
            "qubit count {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}
