//! State-vector VQE engine for detecting entangled ground states of the
//! open Heisenberg chain with an energy-based entanglement witness.
//!
//! The pieces, bottom up:
//!
//! * [`statevector`]: dense amplitudes and strided gate kernels.
//! * [`hamiltonian`]: Pauli-string Hamiltonians, the Heisenberg builder,
//!   exact expectations and measurement grouping.
//! * [`spectrum`]: reference ground and separable energies that do not go
//!   through the circuit simulator.
//! * [`ansatz`]: the six circuit families.
//! * [`shots`]: finite-shot energy estimation.
//! * [`vqe`]: cost, parameter-shift and adjoint gradients, gradient descent.
//! * [`witness`]: the two-stage detection protocol.
//! * [`bench`]: the experiment grid with checkpoints.
//!
//! Restart-level loops run on rayon when the `parallel` feature is enabled
//! (the default); results never depend on the thread count.

pub mod ansatz;
pub mod bench;
pub mod error;
pub mod hamiltonian;
pub mod par;
pub mod pauli;
pub mod rng;
pub mod shots;
pub mod spectrum;
pub mod statevector;
pub mod vqe;
pub mod witness;

pub use ansatz::{AnsatzDescriptor, Family};
pub use error::{Error, Result};
pub use hamiltonian::{build_heisenberg, Hamiltonian, PauliTerm};
pub use pauli::Pauli;
pub use shots::ShotBudget;
pub use statevector::{GateMatrix, Statevector};
