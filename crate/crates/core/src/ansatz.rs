//! Symbolic circuit templates for the six benchmarked families.
//!
//! Every parameterized gate is a Pauli-string rotation
//! `exp(-i * angle_scale * theta * P / 2)`, which keeps the parameter-shift
//! rule exact for all of them. Wires are 0-based, wire 0 being the most
//! significant bit of the amplitude index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliMask};
use crate::statevector::{Statevector, MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Hesa,
    HeaA,
    HeaB,
    Sycamore,
    Hva,
    Ldca,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Hesa,
        Family::HeaA,
        Family::HeaB,
        Family::Sycamore,
        Family::Hva,
        Family::Ldca,
    ];

    /// The five families with entangling gates.
    pub const ENTANGLING: [Family; 5] = [
        Family::HeaA,
        Family::HeaB,
        Family::Sycamore,
        Family::Hva,
        Family::Ldca,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            Family::Hesa => "hesa",
            Family::HeaA => "hea_a",
            Family::HeaB => "hea_b",
            Family::Sycamore => "sycamore",
            Family::Hva => "hva",
            Family::Ldca => "ldca",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Family::Hesa => "HESA",
            Family::HeaA => "HEA(a)",
            Family::HeaB => "HEA(b)",
            Family::Sycamore => "Sycamore-inspired",
            Family::Hva => "HVA",
            Family::Ldca => "LDCA",
        }
    }

    pub fn min_qubits(self) -> usize {
        match self {
            Family::Hesa => 1,
            _ => 2,
        }
    }

    /// Trainable parameters for one layer on `n` qubits.
    pub fn params_per_layer(self, n: usize) -> usize {
        match self {
            Family::Hesa => 3 * n,
            Family::HeaA => n,
            Family::HeaB => 2 * n,
            Family::Sycamore => 6 * n + 2 * (n - 1),
            Family::Hva => 3,
            Family::Ldca => 7 * (n - 1),
        }
    }

    pub fn build(self, n_qubits: usize, layers: usize) -> Result<AnsatzDescriptor> {
        match self {
            Family::Hesa => build_hesa(n_qubits, layers),
            Family::HeaA => build_hea_a(n_qubits, layers),
            Family::HeaB => build_hea_b(n_qubits, layers),
            Family::Sycamore => build_sycamore(n_qubits, layers),
            Family::Hva => build_hva(n_qubits, layers),
            Family::Ldca => build_ldca(n_qubits, layers),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "hesa" => Ok(Family::Hesa),
            "heaa" => Ok(Family::HeaA),
            "heab" => Ok(Family::HeaB),
            "sycamore" | "sycamoreinspired" | "syc" => Ok(Family::Sycamore),
            "hva" => Ok(Family::Hva),
            "ldca" => Ok(Family::Ldca),
            _ => Err(Error::invalid(format!(
                "unknown ansatz family {s:?} (expected one of hesa, hea_a, hea_b, sycamore, hva, ldca)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum GateKind {
    Rot1 { axis: Pauli },
    Rot2 { first: Pauli, second: Pauli },
    Cnot,
}

/// One gate of a template. `param` indexes the owning descriptor's parameter
/// vector; the bound angle is `angle_scale * params[param]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub wires: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<usize>,
    #[serde(default = "unit_scale")]
    pub angle_scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl GateOp {
    fn rot1(axis: Pauli, wire: usize, param: usize) -> Self {
        GateOp {
            kind: GateKind::Rot1 { axis },
            wires: vec![wire],
            param: Some(param),
            angle_scale: 1.0,
        }
    }

    fn rot2(first: Pauli, second: Pauli, a: usize, b: usize, param: usize, scale: f64) -> Self {
        GateOp {
            kind: GateKind::Rot2 { first, second },
            wires: vec![a, b],
            param: Some(param),
            angle_scale: scale,
        }
    }

    fn cnot(control: usize, target: usize) -> Self {
        GateOp {
            kind: GateKind::Cnot,
            wires: vec![control, target],
            param: None,
            angle_scale: 1.0,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.wires.len() == 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "bits")]
pub enum InitialState {
    Bitstring(Vec<u8>),
    /// Singlets on wire pairs (0,1), (2,3), ...; a trailing unpaired wire in |0>.
    SingletPairs,
}

impl InitialState {
    pub fn prepare(&self, n_qubits: usize) -> Result<Statevector> {
        match self {
            InitialState::Bitstring(bits) => Statevector::basis(n_qubits, bits),
            InitialState::SingletPairs => singlet_product(n_qubits),
        }
    }
}

fn singlet_product(n_qubits: usize) -> Result<Statevector> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = num_complex::Complex64::default();
    let singlet = Statevector::from_amplitudes(vec![
        z,
        num_complex::Complex64::new(r, 0.0),
        num_complex::Complex64::new(-r, 0.0),
        z,
    ])?;
    if n_qubits < 2 {
        return Err(Error::invalid("singlet preparation needs at least 2 qubits"));
    }
    let mut state = singlet.clone();
    for _ in 1..n_qubits / 2 {
        state = state.tensor(&singlet)?;
    }
    if n_qubits % 2 == 1 {
        state = state.tensor(&Statevector::zero(1)?)?;
    }
    Ok(state)
}

/// A parameterized circuit: initial state plus an ordered gate list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzDescriptor {
    pub family: Family,
    pub n_qubits: usize,
    pub layers: usize,
    pub n_params: usize,
    pub initial_state: InitialState,
    pub ops: Vec<GateOp>,
}

impl AnsatzDescriptor {
    /// Number of gates that carry a parameter.
    pub fn parameterized_ops(&self) -> usize {
        self.ops.iter().filter(|o| o.param.is_some()).count()
    }

    /// Lowers the template to kernel-level steps.
    pub fn compile(&self) -> Result<Circuit> {
        let steps = self
            .ops
            .iter()
            .map(|op| match (op.kind, op.param) {
                (GateKind::Cnot, _) => Ok(Step::Cnot {
                    control: op.wires[0],
                    target: op.wires[1],
                }),
                (GateKind::Rot1 { axis }, Some(param)) => Ok(Step::Rotation {
                    mask: PauliMask::new(self.n_qubits, &[(op.wires[0], axis)])?,
                    param,
                    scale: op.angle_scale,
                }),
                (GateKind::Rot2 { first, second }, Some(param)) => {
                    let mut letters = [(op.wires[0], first), (op.wires[1], second)];
                    letters.sort_by_key(|l| l.0);
                    Ok(Step::Rotation {
                        mask: PauliMask::new(self.n_qubits, &letters)?,
                        param,
                        scale: op.angle_scale,
                    })
                }
                (kind, None) => Err(Error::invalid(format!("rotation {kind:?} without a parameter"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            n_params: self.n_params,
            initial: self.initial_state.prepare(self.n_qubits)?,
            steps,
        })
    }

    /// Output state for `params`.
    pub fn instantiate(&self, params: &[f64]) -> Result<Statevector> {
        self.compile()?.run(params)
    }
}

/// Kernel-level gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Rotation { mask: PauliMask, param: usize, scale: f64 },
    Cnot { control: usize, target: usize },
}

impl Step {
    #[inline]
    pub(crate) fn apply(&self, state: &mut Statevector, params: &[f64], shift: f64) {
        match *self {
            Step::Rotation { mask, param, scale } => {
                state.apply_pauli_rotation(&mask, scale * params[param] + shift)
            }
            Step::Cnot { control, target } => state.apply_cnot_unchecked(control, target),
        }
    }

    #[inline]
    pub(crate) fn apply_inverse(&self, state: &mut Statevector, params: &[f64]) {
        match *self {
            Step::Rotation { mask, param, scale } => {
                state.apply_pauli_rotation(&mask, -scale * params[param])
            }
            Step::Cnot { control, target } => state.apply_cnot_unchecked(control, target),
        }
    }
}

/// A compiled descriptor, ready for repeated execution.
#[derive(Debug, Clone)]
pub struct Circuit {
    pub n_params: usize,
    pub initial: Statevector,
    pub steps: Vec<Step>,
}

impl Circuit {
    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::invalid(format!(
                "expected {} parameters, got {}",
                self.n_params,
                params.len()
            )));
        }
        Ok(())
    }

    pub fn run(&self, params: &[f64]) -> Result<Statevector> {
        self.run_shifted(params, None)
    }

    /// Runs the circuit with the angle of step `shift.0` offset by `shift.1`.
    pub fn run_shifted(&self, params: &[f64], shift: Option<(usize, f64)>) -> Result<Statevector> {
        self.check_params(params)?;
        let mut state = self.initial.clone();
        for (i, step) in self.steps.iter().enumerate() {
            let delta = match shift {
                Some((at, d)) if at == i => d,
                _ => 0.0,
            };
            step.apply(&mut state, params, delta);
        }
        Ok(state)
    }
}

fn check_n(family: Family, n_qubits: usize, layers: usize) -> Result<()> {
    if n_qubits < family.min_qubits() || n_qubits > MAX_QUBITS {
        return Err(Error::invalid(format!(
            "{} needs {}..={} qubits, got {n_qubits}",
            family.display_name(),
            family.min_qubits(),
            MAX_QUBITS
        )));
    }
    if layers == 0 {
        return Err(Error::invalid("layers must be at least 1"));
    }
    Ok(())
}

fn descriptor(
    family: Family,
    n_qubits: usize,
    layers: usize,
    initial_state: InitialState,
    ops: Vec<GateOp>,
) -> AnsatzDescriptor {
    AnsatzDescriptor {
        family,
        n_qubits,
        layers,
        n_params: family.params_per_layer(n_qubits) * layers,
        initial_state,
        ops,
    }
}

fn zeros(n: usize) -> InitialState {
    InitialState::Bitstring(vec![0; n])
}

fn cnot_ladder(ops: &mut Vec<GateOp>, n: usize) {
    ops.extend((0..n - 1).map(|j| GateOp::cnot(j, j + 1)));
}

fn zyz_triples(ops: &mut Vec<GateOp>, n: usize, next: &mut usize) {
    for q in 0..n {
        for axis in [Pauli::Z, Pauli::Y, Pauli::Z] {
            ops.push(GateOp::rot1(axis, q, *next));
            *next += 1;
        }
    }
}

/// Local Z-Y-Z rotations only; every output is a product state.
pub fn build_hesa(n_qubits: usize, layers: usize) -> Result<AnsatzDescriptor> {
    check_n(Family::Hesa, n_qubits, layers)?;
    let mut ops = Vec::new();
    let mut next = 0;
    for _ in 0..layers {
        zyz_triples(&mut ops, n_qubits, &mut next);
    }
    Ok(descriptor(Family::Hesa, n_qubits, layers, zeros(n_qubits), ops))
}

/// `R_y` on every wire, then a CNOT ladder.
pub fn build_hea_a(n_qubits: usize, layers: usize) -> Result<AnsatzDescriptor> {
    check_n(Family::HeaA, n_qubits, layers)?;
    let mut ops = Vec::new();
    let mut next = 0;
    for _ in 0..layers {
        for q in 0..n_qubits {
            ops.push(GateOp::rot1(Pauli::Y, q, next));
            next += 1;
        }
        cnot_ladder(&mut ops, n_qubits);
    }
    Ok(descriptor(Family::HeaA, n_qubits, layers, zeros(n_qubits), ops))
}

/// `R_y` on every wire, a CNOT ladder, then `R_x` on every wire.
pub fn build_hea_b(n_qubits: usize, layers: usize) -> Result<AnsatzDescriptor> {
    check_n(Family::HeaB, n_qubits, layers)?;
    let mut ops = Vec::new();
    let mut next = 0;
    for _ in 0..layers {
        for q in 0..n_qubits {
            ops.push(GateOp::rot1(Pauli::Y, q, next));
            next += 1;
        }
        cnot_ladder(&mut ops, n_qubits);
        for q in 0..n_qubits {
            ops.push(GateOp::rot1(Pauli::X, q, next));
            next += 1;
        }
    }
    Ok(descriptor(Family::HeaB, n_qubits, layers, zeros(n_qubits), ops))
}

/// Z-Y-Z triples, then `iSWAP^dagger(theta) = exp(-i theta (XX+YY))` followed
/// by `CPHASE(phi) = exp(-i phi ZZ)` on each adjacent pair, then Z-Y-Z triples
/// again. Starts from the alternating state `|0101...>`.
pub fn build_sycamore(n_qubits: usize, layers: usize) -> Result<AnsatzDescriptor> {
    check_n(Family::Sycamore, n_qubits, layers)?;
    let mut ops = Vec::new();
    let mut next = 0;
    for _ in 0..layers {
        zyz_triples(&mut ops, n_qubits, &mut next);
        for j in 0..n_qubits - 1 {
            // XX and YY commute, so the iSWAP exponential splits exactly.
            ops.push(GateOp::rot2(Pauli::X, Pauli::X, j, j + 1, next, 2.0));
            ops.push(GateOp::rot2(Pauli::Y, Pauli::Y, j, j + 1, next, 2.0));
            ops.push(GateOp::rot2(Pauli::Z, Pauli::Z, j, j + 1, next + 1, 2.0));
            next += 2;
        }
        zyz_triples(&mut ops, n_qubits, &mut next);
    }
    let alternating = (0..n_qubits).map(|q| (q % 2) as u8).collect();
    Ok(descriptor(
        Family::Sycamore,
        n_qubits,
        layers,
        InitialState::Bitstring(alternating),
        ops,
    ))
}

/// Hamiltonian-variational layer. Starts from singlets on wire pairs
/// (0,1), (2,3), ... and applies, in time order: ZZ, XX, YY rotations on the
/// links between those pairs ((1,2), (3,4), ...) sharing the first angle; the
/// same on the paired links ((0,1), (2,3), ...) with the second angle; a
/// uniform Z rotation with the third. Each rotation is `exp(-i theta P / 2)`.
///
/// The bridging links go first because the initial state is an eigenstate of
/// the paired-link terms. An unpaired last wire on odd chains is reached only
/// by the bridging links.
pub fn build_hva(n_qubits: usize, layers: usize) -> Result<AnsatzDescriptor> {
    check_n(Family::Hva, n_qubits, layers)?;
    let bridging: Vec<usize> = (1..n_qubits - 1).step_by(2).collect();
    let paired: Vec<usize> = (0..n_qubits - 1).step_by(2).collect();
    let mut ops = Vec::new();
    for layer in 0..layers {
        let base = 3 * layer;
        for (links, param) in [(&bridging, base), (&paired, base + 1)] {
            for p in [Pauli::Z, Pauli::X, Pauli::Y] {
                for &i in links.iter() {
                    ops.push(GateOp::rot2(p, p, i, i + 1, param, 1.0));
                }
            }
        }
        for q in 0..n_qubits {
            ops.push(GateOp::rot1(Pauli::Z, q, base + 2));
        }
    }
    Ok(descriptor(
        Family::Hva,
        n_qubits,
        layers,
        InitialState::SingletPairs,
        ops,
    ))
}

/// For each adjacent pair: `R_z` on both wires, then `R_xx, R_yy, R_zz, R_xy,
/// R_yx`, each with its own angle.
pub fn build_ldca(n_qubits: usize, layers: usize) -> Result<AnsatzDescriptor> {
    check_n(Family::Ldca, n_qubits, layers)?;
    let mut ops = Vec::new();
    let mut next = 0;
    for _ in 0..layers {
        for i in 0..n_qubits - 1 {
            ops.push(GateOp::rot1(Pauli::Z, i, next));
            ops.push(GateOp::rot1(Pauli::Z, i + 1, next + 1));
            next += 2;
            for (a, b) in [
                (Pauli::X, Pauli::X),
                (Pauli::Y, Pauli::Y),
                (Pauli::Z, Pauli::Z),
                (Pauli::X, Pauli::Y),
                (Pauli::Y, Pauli::X),
            ] {
                ops.push(GateOp::rot2(a, b, i, i + 1, next, 1.0));
                next += 1;
            }
        }
    }
    Ok(descriptor(Family::Ldca, n_qubits, layers, zeros(n_qubits), ops))
}

pub fn parameter_count(family: Family, n_qubits: usize, layers: usize) -> Result<usize> {
    check_n(family, n_qubits, layers)?;
    Ok(family.params_per_layer(n_qubits) * layers)
}
