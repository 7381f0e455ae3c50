//! Weighted Pauli-string Hamiltonians and the nearest-neighbour Heisenberg chain.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliMask};
use crate::statevector::{Statevector, MAX_QUBITS};

/// `coefficient * P_{w1} P_{w2} ...` with strictly increasing wires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    #[serde(rename = "coeff")]
    pub coefficient: f64,
    #[serde(rename = "paulis")]
    pub letters: Vec<(usize, Pauli)>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, letters: Vec<(usize, Pauli)>) -> Result<Self> {
        if !coefficient.is_finite() || coefficient == 0.0 {
            return Err(Error::invalid(format!(
                "term coefficient must be finite and nonzero, got {coefficient}"
            )));
        }
        if letters.is_empty() {
            return Err(Error::invalid("term has no Pauli letters"));
        }
        if letters.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::invalid("term wires must be strictly increasing"));
        }
        Ok(PauliTerm {
            coefficient,
            letters,
        })
    }

    /// The single letter shared by every wire, if there is one.
    pub fn uniform_letter(&self) -> Option<Pauli> {
        let first = self.letters.first()?.1;
        self.letters.iter().all(|&(_, l)| l == first).then_some(first)
    }

    pub fn label(&self) -> String {
        self.letters
            .iter()
            .map(|(w, l)| format!("{l}{w}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Terms sharing one flip mask, evaluated together in a single sweep.
#[derive(Debug, Clone)]
struct FlipGroup {
    x_mask: usize,
    // (coefficient * i^{n_y}, z_mask)
    parts: Vec<(Complex64, usize)>,
}

impl FlipGroup {
    #[inline]
    fn weight(&self, k: usize) -> Complex64 {
        self.parts
            .iter()
            .map(|&(w, z)| if (k & z).count_ones() & 1 == 0 { w } else { -w })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct HamiltonianDoc {
    n_qubits: usize,
    #[serde(rename = "J")]
    coupling: f64,
    #[serde(rename = "h")]
    field: f64,
    terms: Vec<PauliTerm>,
}

/// A Hermitian operator `sum_t c_t P_t` over `n_qubits` wires.
///
/// The coupling and field are carried along for bookkeeping; the terms are
/// the operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "HamiltonianDoc", into = "HamiltonianDoc")]
pub struct Hamiltonian {
    n_qubits: usize,
    coupling: f64,
    field: f64,
    terms: Vec<PauliTerm>,
    masks: Vec<PauliMask>,
    diagonal: Vec<f64>,
    groups: Vec<FlipGroup>,
}

impl PartialEq for Hamiltonian {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits
            && self.coupling == other.coupling
            && self.field == other.field
            && self.terms == other.terms
    }
}

impl TryFrom<HamiltonianDoc> for Hamiltonian {
    type Error = Error;

    fn try_from(doc: HamiltonianDoc) -> Result<Self> {
        for t in &doc.terms {
            PauliTerm::new(t.coefficient, t.letters.clone())?;
        }
        Hamiltonian::from_terms(doc.n_qubits, doc.coupling, doc.field, doc.terms)
    }
}

impl From<Hamiltonian> for HamiltonianDoc {
    fn from(h: Hamiltonian) -> Self {
        HamiltonianDoc {
            n_qubits: h.n_qubits,
            coupling: h.coupling,
            field: h.field,
            terms: h.terms,
        }
    }
}

impl Hamiltonian {
    pub fn from_terms(n_qubits: usize, coupling: f64, field: f64, terms: Vec<PauliTerm>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!("qubit count {n_qubits} outside 1..={MAX_QUBITS}")));
        }
        let masks = terms
            .iter()
            .map(|t| PauliMask::new(n_qubits, &t.letters))
            .collect::<Result<Vec<_>>>()?;

        let dim = 1usize << n_qubits;
        let mut diagonal = vec![0.0; dim];
        let mut by_flip: BTreeMap<usize, Vec<(Complex64, usize)>> = BTreeMap::new();
        for (t, m) in terms.iter().zip(&masks) {
            if m.is_diagonal() {
                for (k, d) in diagonal.iter_mut().enumerate() {
                    *d += t.coefficient * m.sign(k);
                }
            } else {
                by_flip
                    .entry(m.x_mask)
                    .or_default()
                    .push((m.y_phase() * t.coefficient, m.z_mask));
            }
        }
        let groups = by_flip
            .into_iter()
            .map(|(x_mask, parts)| FlipGroup { x_mask, parts })
            .collect();

        Ok(Hamiltonian {
            n_qubits,
            coupling,
            field,
            terms,
            masks,
            diagonal,
            groups,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    fn check_state(&self, state: &Statevector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::invalid(format!(
                "Hamiltonian on {} qubits applied to a {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        Ok(())
    }

    /// Exact `<psi|H|psi>`.
    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        self.check_state(state)?;
        Ok(self.expectation_unchecked(state.amplitudes()))
    }

    pub(crate) fn expectation_unchecked(&self, amps: &[Complex64]) -> f64 {
        let mut e: f64 = amps
            .iter()
            .zip(&self.diagonal)
            .map(|(a, d)| a.norm_sqr() * d)
            .sum();
        for g in &self.groups {
            let mut acc = Complex64::default();
            for (k, a) in amps.iter().enumerate() {
                acc += amps[k ^ g.x_mask].conj() * g.weight(k) * a;
            }
            e += acc.re;
        }
        e
    }

    /// `H|psi>` as raw amplitudes (not normalized).
    pub fn apply(&self, state: &Statevector) -> Result<Vec<Complex64>> {
        self.check_state(state)?;
        Ok(self.apply_unchecked(state.amplitudes()))
    }

    pub(crate) fn apply_unchecked(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = amps.iter().zip(&self.diagonal).map(|(a, d)| a * d).collect();
        self.apply_offdiagonal_into(amps, &mut out);
        out
    }

    pub(crate) fn apply_offdiagonal_into(&self, amps: &[Complex64], out: &mut [Complex64]) {
        for g in &self.groups {
            for (k, a) in amps.iter().enumerate() {
                out[k ^ g.x_mask] += g.weight(k) * a;
            }
        }
    }

    /// True when the matrix is real (an even number of Y letters per term).
    pub(crate) fn is_real(&self) -> bool {
        self.masks.iter().all(|m| m.n_y % 2 == 0)
    }

    /// Dense `2^n x 2^n` matrix. Only sensible for small registers.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > 12 {
            return Err(Error::invalid(format!(
                "refusing to build a dense matrix for {} qubits",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for col in 0..dim {
            let e = Statevector::basis_index(self.n_qubits, col);
            let hv = self.apply_unchecked(e.amplitudes());
            for (row, v) in hv.into_iter().enumerate() {
                m[(row, col)] = v;
            }
        }
        Ok(m)
    }

    /// Groups every term under one of the three uniform product bases.
    pub fn measurement_settings(&self) -> Result<Vec<MeasurementSetting>> {
        let mut settings: Vec<MeasurementSetting> = Pauli::ALL
            .iter()
            .map(|&basis| MeasurementSetting {
                basis,
                terms: Vec::new(),
            })
            .collect();
        for (i, t) in self.terms.iter().enumerate() {
            let letter = t.uniform_letter().ok_or_else(|| {
                Error::invalid(format!(
                    "term {} mixes Pauli letters and is not covered by a uniform basis",
                    t.label()
                ))
            })?;
            settings[letter as usize].terms.push(i);
        }
        Ok(settings)
    }
}

/// One measurement basis applied to every wire, and the terms it estimates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub basis: Pauli,
    pub terms: Vec<usize>,
}

/// Open-boundary Heisenberg chain
/// `H = -J sum_i (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}) + h sum_i Z_i`.
pub fn build_heisenberg(n_qubits: usize, coupling: f64, field: f64) -> Result<Hamiltonian> {
    if n_qubits < 2 {
        return Err(Error::invalid(format!(
            "a Heisenberg chain needs at least 2 sites, got {n_qubits}"
        )));
    }
    if !coupling.is_finite() || !field.is_finite() {
        return Err(Error::invalid("coupling and field must be finite"));
    }
    let mut terms = Vec::with_capacity(3 * (n_qubits - 1) + n_qubits);
    if coupling != 0.0 {
        for i in 0..n_qubits - 1 {
            for p in Pauli::ALL {
                terms.push(PauliTerm::new(-coupling, vec![(i, p), (i + 1, p)])?);
            }
        }
    }
    if field != 0.0 {
        for i in 0..n_qubits {
            terms.push(PauliTerm::new(field, vec![(i, Pauli::Z)])?);
        }
    }
    Hamiltonian::from_terms(n_qubits, coupling, field, terms)
}
