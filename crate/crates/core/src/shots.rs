//! Finite-shot energy estimation.
//!
//! A shot budget of `S` means `S` samples per measurement setting, so one
//! cost evaluation of a Heisenberg Hamiltonian draws `3 S` bitstrings.
//! A budget of zero selects the exact (infinite-shot) expectation.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, MeasurementSetting};
use crate::pauli::Pauli;
use crate::rng::{derive_seed, stream};
use crate::statevector::{GateMatrix, Statevector};

pub const MAX_SHOTS: u32 = 1_000_000;

/// Samples per measurement setting; `0` means analytic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct ShotBudget(u32);

impl ShotBudget {
    pub const ANALYTIC: ShotBudget = ShotBudget(0);

    pub fn new(shots_per_setting: u32) -> Result<Self> {
        if shots_per_setting > MAX_SHOTS {
            return Err(Error::invalid(format!(
                "shot budget {shots_per_setting} exceeds {MAX_SHOTS}"
            )));
        }
        Ok(ShotBudget(shots_per_setting))
    }

    pub fn shots_per_setting(self) -> u32 {
        self.0
    }

    pub fn is_analytic(self) -> bool {
        self.0 == 0
    }
}

impl TryFrom<u32> for ShotBudget {
    type Error = Error;

    fn try_from(v: u32) -> Result<Self> {
        ShotBudget::new(v)
    }
}

impl From<ShotBudget> for u32 {
    fn from(b: ShotBudget) -> u32 {
        b.0
    }
}

impl fmt::Display for ShotBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_analytic() {
            f.write_str("analytic")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    Analytic,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub mode: EstimateMode,
    pub seed: u64,
    /// Basis letter -> bitstring -> count. Empty in analytic mode.
    pub per_setting_counts: BTreeMap<Pauli, BTreeMap<String, u64>>,
}

/// Wire 0 first.
pub fn format_bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|w| if index >> (n_qubits - 1 - w) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn draw(state: &Statevector, count: usize, seed: u64) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for a in state.amplitudes() {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;
    let last = cdf.len() - 1;
    let mut rng = stream(seed);
    (0..count)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            cdf.partition_point(|&c| c <= u).min(last)
        })
        .collect()
}

/// `count` i.i.d. basis-state indices from the Born distribution of `state`.
pub fn sample_bitstrings(state: &Statevector, count: usize, seed: u64) -> Result<Vec<usize>> {
    if count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    Ok(draw(state, count, seed))
}

/// Single-qubit change of basis that maps `basis` eigenstates onto Z eigenstates.
fn basis_change(basis: Pauli) -> Option<GateMatrix> {
    match basis {
        Pauli::Z => None,
        Pauli::X => Some(GateMatrix::hadamard()),
        Pauli::Y => Some(
            GateMatrix::hadamard()
                .matmul(&GateMatrix::s_dagger())
                .expect("2x2 product"),
        ),
    }
}

fn rotated(state: &Statevector, basis: Pauli) -> Statevector {
    let mut s = state.clone();
    if let Some(g) = basis_change(basis) {
        for w in 0..s.n_qubits() {
            s.apply_1q_unchecked(&g, w);
        }
    }
    s
}

fn wire_mask(n_qubits: usize, letters: &[(usize, Pauli)]) -> usize {
    letters
        .iter()
        .fold(0, |m, &(w, _)| m | 1 << (n_qubits - 1 - w))
}

fn sampled(
    h: &Hamiltonian,
    settings: &[MeasurementSetting],
    state: &Statevector,
    shots: usize,
    seed: u64,
    mut keep: Option<&mut BTreeMap<Pauli, BTreeMap<String, u64>>>,
) -> f64 {
    let n = h.n_qubits();
    let mut value = 0.0;
    for (i, setting) in settings.iter().enumerate() {
        if setting.terms.is_empty() {
            continue;
        }
        let samples = draw(&rotated(state, setting.basis), shots, derive_seed(seed, &[i as u64]));
        for &t in &setting.terms {
            let term = &h.terms()[t];
            let mask = wire_mask(n, &term.letters);
            let plus = samples.iter().filter(|&&s| (s & mask).count_ones().is_multiple_of(2)).count();
            let mean = (2.0 * plus as f64 - shots as f64) / shots as f64;
            value += term.coefficient * mean;
        }
        if let Some(hist) = keep.as_deref_mut() {
            let entry = hist.entry(setting.basis).or_default();
            for &s in &samples {
                *entry.entry(format_bitstring(s, n)).or_insert(0) += 1;
            }
        }
    }
    value
}

/// Estimated `<H>` with bitstring histograms.
pub fn estimate_energy(
    h: &Hamiltonian,
    state: &Statevector,
    budget: ShotBudget,
    seed: u64,
) -> Result<EnergyEstimate> {
    if budget.is_analytic() {
        return Ok(EnergyEstimate {
            value: h.expectation(state)?,
            mode: EstimateMode::Analytic,
            seed,
            per_setting_counts: BTreeMap::new(),
        });
    }
    if state.n_qubits() != h.n_qubits() {
        return Err(Error::invalid("state and Hamiltonian qubit counts differ"));
    }
    let settings = h.measurement_settings()?;
    let mut counts = BTreeMap::new();
    let value = sampled(
        h,
        &settings,
        state,
        budget.shots_per_setting() as usize,
        seed,
        Some(&mut counts),
    );
    Ok(EnergyEstimate {
        value,
        mode: EstimateMode::Sampled,
        seed,
        per_setting_counts: counts,
    })
}

/// Reusable estimator for optimizer inner loops: same numbers as
/// [`estimate_energy`], without histograms.
#[derive(Debug, Clone)]
pub struct Estimator<'h> {
    h: &'h Hamiltonian,
    settings: Vec<MeasurementSetting>,
    budget: ShotBudget,
}

impl<'h> Estimator<'h> {
    pub fn new(h: &'h Hamiltonian, budget: ShotBudget) -> Result<Self> {
        let settings = if budget.is_analytic() {
            Vec::new()
        } else {
            h.measurement_settings()?
        };
        Ok(Estimator { h, settings, budget })
    }

    pub fn hamiltonian(&self) -> &'h Hamiltonian {
        self.h
    }

    pub fn budget(&self) -> ShotBudget {
        self.budget
    }

    pub fn estimate(&self, state: &Statevector, seed: u64) -> f64 {
        if self.budget.is_analytic() {
            self.h.expectation_unchecked(state.amplitudes())
        } else {
            sampled(
                self.h,
                &self.settings,
                state,
                self.budget.shots_per_setting() as usize,
                seed,
                None,
            )
        }
    }

    pub fn exact(&self, amps: &[Complex64]) -> f64 {
        self.h.expectation_unchecked(amps)
    }
}
