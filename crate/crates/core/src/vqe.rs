//! The variational loop: cost, gradients, fixed-step gradient descent.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzDescriptor, Circuit, Step};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::rng::{derive_seed, stream};
use crate::shots::{Estimator, ShotBudget};
use crate::statevector::Statevector;

// seed-path tags
const INIT_STREAM: u64 = 0;
const EVAL_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// Adjoint differentiation when analytic, parameter shift when sampled.
    #[default]
    Auto,
    ParameterShift,
    /// Exact reverse-mode gradient; analytic budgets only.
    Adjoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    pub step_size: f64,
    pub shots: ShotBudget,
    pub init_low: f64,
    pub init_high: f64,
    pub seed: u64,
    pub gradient: GradientMethod,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iterations: 200,
            step_size: 0.1,
            shots: ShotBudget::ANALYTIC,
            init_low: 0.0,
            init_high: TAU,
            seed: 0,
            gradient: GradientMethod::Auto,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        if !self.step_size.is_finite() || self.step_size < 0.0 {
            return Err(Error::invalid(format!(
                "step_size must be finite and non-negative, got {}",
                self.step_size
            )));
        }
        if !self.init_low.is_finite() || !self.init_high.is_finite() || self.init_low >= self.init_high {
            return Err(Error::invalid(format!(
                "need init_low < init_high, got [{}, {})",
                self.init_low, self.init_high
            )));
        }
        if self.gradient == GradientMethod::Adjoint && !self.shots.is_analytic() {
            return Err(Error::invalid("adjoint gradients need an analytic shot budget"));
        }
        Ok(())
    }

    fn uses_adjoint(&self) -> bool {
        match self.gradient {
            GradientMethod::Auto => self.shots.is_analytic(),
            GradientMethod::ParameterShift => false,
            GradientMethod::Adjoint => true,
        }
    }
}

/// One optimizer step: the parameters at which the cost was evaluated and the
/// gradient taken there (absent on the final record).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub params: Vec<f64>,
    pub energy: f64,
    pub analytic_energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum RunStatus {
    Completed,
    Aborted { iteration: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub records: Vec<TraceRecord>,
    pub final_params: Vec<f64>,
    pub seed: u64,
    pub status: RunStatus,
}

impl OptimizerTrace {
    pub fn is_aborted(&self) -> bool {
        matches!(self.status, RunStatus::Aborted { .. })
    }

    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.energy)
    }

    pub fn final_energy(&self) -> Option<f64> {
        self.records.last().map(|r| r.energy)
    }

    pub fn into_result(self) -> Result<Self> {
        match self.status {
            RunStatus::Completed => Ok(self),
            RunStatus::Aborted { iteration, reason } => Err(Error::AbortedRun { iteration, reason }),
        }
    }

    /// One JSON object per record.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Estimated energy of the circuit output at `params`.
pub fn cost(
    descriptor: &AnsatzDescriptor,
    params: &[f64],
    h: &Hamiltonian,
    budget: ShotBudget,
    seed: u64,
) -> Result<f64> {
    check_sizes(descriptor, h)?;
    let circuit = descriptor.compile()?;
    let est = Estimator::new(h, budget)?;
    Ok(est.estimate(&circuit.run(params)?, seed))
}

/// Parameter-shift gradient; every evaluation draws from its own derived seed.
pub fn gradient(
    descriptor: &AnsatzDescriptor,
    params: &[f64],
    h: &Hamiltonian,
    budget: ShotBudget,
    seed: u64,
) -> Result<Vec<f64>> {
    check_sizes(descriptor, h)?;
    let circuit = descriptor.compile()?;
    let est = Estimator::new(h, budget)?;
    parameter_shift(&circuit, params, &est, seed)
}

/// Exact gradient by reverse-mode (adjoint) differentiation of `<H>`.
pub fn adjoint_gradient(descriptor: &AnsatzDescriptor, params: &[f64], h: &Hamiltonian) -> Result<Vec<f64>> {
    check_sizes(descriptor, h)?;
    let circuit = descriptor.compile()?;
    let psi = circuit.run(params)?;
    Ok(adjoint(&circuit, params, h, psi))
}

fn check_sizes(descriptor: &AnsatzDescriptor, h: &Hamiltonian) -> Result<()> {
    if descriptor.n_qubits != h.n_qubits() {
        return Err(Error::invalid(format!(
            "ansatz on {} qubits, Hamiltonian on {}",
            descriptor.n_qubits,
            h.n_qubits()
        )));
    }
    Ok(())
}

pub(crate) fn parameter_shift(
    circuit: &Circuit,
    params: &[f64],
    est: &Estimator<'_>,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; circuit.n_params];
    for (i, step) in circuit.steps.iter().enumerate() {
        let Step::Rotation { param, scale, .. } = *step else {
            continue;
        };
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::UnsupportedGate(format!(
                "step {i} has angle scale {scale}"
            )));
        }
        // shifting the bound angle by pi/2 is a shift of pi/(2 s) in theta
        let plus = circuit.run_shifted(params, Some((i, FRAC_PI_2)))?;
        let minus = circuit.run_shifted(params, Some((i, -FRAC_PI_2)))?;
        let i = i as u64;
        let fp = est.estimate(&plus, derive_seed(seed, &[2 * i]));
        let fm = est.estimate(&minus, derive_seed(seed, &[2 * i + 1]));
        grad[param] += scale * (fp - fm) / 2.0;
    }
    Ok(grad)
}

fn adjoint(circuit: &Circuit, params: &[f64], h: &Hamiltonian, mut psi: Statevector) -> Vec<f64> {
    let mut grad = vec![0.0; circuit.n_params];
    let mut lambda = Statevector::from_raw(psi.n_qubits(), h.apply_unchecked(psi.amplitudes()));
    for step in circuit.steps.iter().rev() {
        if let Step::Rotation { mask, param, scale } = *step {
            // d<H>/d(angle) = Im <lambda|P|psi> for exp(-i angle P / 2)
            grad[param] += scale * lambda.pauli_matrix_element(&mask, &psi).im;
        }
        step.apply_inverse(&mut psi, params);
        step.apply_inverse(&mut lambda, params);
    }
    grad
}

fn initial_params(n: usize, config: &OptimizerConfig) -> Vec<f64> {
    let mut rng = stream(derive_seed(config.seed, &[INIT_STREAM]));
    let width = config.init_high - config.init_low;
    (0..n)
        .map(|_| config.init_low + width * rng.random::<f64>())
        .collect()
}

/// Fixed-step gradient descent for `config.max_iterations` steps.
///
/// The trace has `max_iterations + 1` records: the cost at the initial point
/// and after every update. Non-finite costs or gradients stop the run and mark
/// the trace as aborted.
pub fn minimize(descriptor: &AnsatzDescriptor, h: &Hamiltonian, config: &OptimizerConfig) -> Result<OptimizerTrace> {
    config.validate()?;
    check_sizes(descriptor, h)?;
    let params = initial_params(descriptor.n_params, config);
    minimize_from(descriptor, h, config, params)
}

/// As [`minimize`], starting from the given parameters.
pub fn minimize_from(
    descriptor: &AnsatzDescriptor,
    h: &Hamiltonian,
    config: &OptimizerConfig,
    mut params: Vec<f64>,
) -> Result<OptimizerTrace> {
    config.validate()?;
    check_sizes(descriptor, h)?;
    let circuit = descriptor.compile()?;
    if params.len() != circuit.n_params {
        return Err(Error::invalid(format!(
            "expected {} initial parameters, got {}",
            circuit.n_params,
            params.len()
        )));
    }
    let est = Estimator::new(h, config.shots)?;
    let adjoint_mode = config.uses_adjoint();
    let mut records = Vec::with_capacity(config.max_iterations + 1);
    let mut status = RunStatus::Completed;

    for iteration in 0..=config.max_iterations {
        let eval_seed = derive_seed(config.seed, &[EVAL_STREAM, iteration as u64]);
        let state = circuit.run(&params)?;
        let analytic = est.exact(state.amplitudes());
        let energy = if config.shots.is_analytic() {
            analytic
        } else {
            est.estimate(&state, derive_seed(eval_seed, &[0]))
        };
        if !energy.is_finite() || !analytic.is_finite() {
            status = RunStatus::Aborted {
                iteration,
                reason: format!("non-finite cost {energy}"),
            };
            break;
        }
        let last = iteration == config.max_iterations;
        let grad = if last {
            None
        } else if adjoint_mode {
            Some(adjoint(&circuit, &params, h, state))
        } else {
            Some(parameter_shift(&circuit, &params, &est, derive_seed(eval_seed, &[1]))?)
        };
        let gradient_norm = grad.as_ref().map(|g| g.iter().map(|x| x * x).sum::<f64>().sqrt());
        records.push(TraceRecord {
            iteration,
            params: params.clone(),
            energy,
            analytic_energy: analytic,
            gradient_norm,
        });
        let Some(grad) = grad else { break };
        if !gradient_norm.is_some_and(f64::is_finite) {
            status = RunStatus::Aborted {
                iteration,
                reason: "non-finite gradient".into(),
            };
            break;
        }
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= config.step_size * g;
        }
    }

    let final_params = records.last().map(|r| r.params.clone()).unwrap_or(params);
    Ok(OptimizerTrace {
        records,
        final_params,
        seed: config.seed,
        status,
    })
}
