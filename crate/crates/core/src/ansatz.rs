//! Data re-uploading circuit model f_θ(x).
//!
//! Layer layout, repeated `n_layers` times:
//!
//! ```text
//! RY(θ) column, RZ(θ) column, CNOT ring q → q+1 (mod n), RZ(s·x) column
//! ```
//!
//! followed by one closing RY/RZ column. The observable is Z on qubit 0 and
//! the circuit expectation is passed through a trainable affine map. With
//! frequency scale `s`, the output is a trigonometric polynomial in `s·x` of
//! degree `n_qubits × n_layers`.

use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::statevec::{self, Axis, Gate, Observable, SimError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnsatzError {
    #[error("ansatz needs at least one qubit and one layer (got {n_qubits}×{n_layers})")]
    EmptyArchitecture { n_qubits: usize, n_layers: usize },
    #[error("frequency scale must be positive and finite, got {0}")]
    BadFrequencyScale(f64),
    #[error("expected {expected} rotation angles, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("output scale must be nonzero")]
    ZeroScale,
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
    /// Ring of CNOTs after each trainable block (skipped for one qubit).
    pub entangle: bool,
    pub encoding_axis: Axis,
    /// Encoding gates rotate by `frequency_scale · x`; 1 gives a 2π-periodic
    /// model, 1/2 a 4π-periodic one.
    pub frequency_scale: f64,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, n_layers: usize) -> Result<Self, AnsatzError> {
        let spec = Self {
            n_qubits,
            n_layers,
            entangle: true,
            encoding_axis: Axis::Z,
            frequency_scale: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_frequency_scale(mut self, scale: f64) -> Result<Self, AnsatzError> {
        self.frequency_scale = scale;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), AnsatzError> {
        if self.n_qubits == 0 || self.n_layers == 0 {
            return Err(AnsatzError::EmptyArchitecture {
                n_qubits: self.n_qubits,
                n_layers: self.n_layers,
            });
        }
        if self.n_qubits > statevec::MAX_QUBITS {
            return Err(SimError::BadRegister(self.n_qubits).into());
        }
        if !(self.frequency_scale.is_finite() && self.frequency_scale > 0.0) {
            return Err(AnsatzError::BadFrequencyScale(self.frequency_scale));
        }
        Ok(())
    }

    /// Highest integer frequency (in units of the scaled input).
    pub fn spectrum_size(&self) -> usize {
        self.n_qubits * self.n_layers
    }

    pub fn parameter_count(&self) -> usize {
        2 * self.n_qubits * (self.n_layers + 1)
    }

    /// Period of the model in x.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.frequency_scale
    }

    pub fn observable(&self) -> Observable {
        Observable::z(0, self.n_qubits)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    pub theta: Vec<f64>,
    pub out_scale: f64,
    pub out_bias: f64,
}

impl ParamVector {
    pub fn new(
        spec: &AnsatzSpec,
        theta: Vec<f64>,
        out_scale: f64,
        out_bias: f64,
    ) -> Result<Self, AnsatzError> {
        let p = Self {
            theta,
            out_scale,
            out_bias,
        };
        p.validate(spec)?;
        Ok(p)
    }

    pub fn zeros(spec: &AnsatzSpec) -> Self {
        Self {
            theta: vec![0.0; spec.parameter_count()],
            out_scale: 1.0,
            out_bias: 0.0,
        }
    }

    pub fn validate(&self, spec: &AnsatzSpec) -> Result<(), AnsatzError> {
        if self.theta.len() != spec.parameter_count() {
            return Err(AnsatzError::ParamCount {
                expected: spec.parameter_count(),
                got: self.theta.len(),
            });
        }
        if self.out_scale == 0.0 {
            return Err(AnsatzError::ZeroScale);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOutput {
    pub value: f64,
    pub raw_expectation: f64,
}

/// Where each gate in the built circuit comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Theta(usize),
    Encoding,
    Fixed,
}

fn layout(spec: &AnsatzSpec, theta: &[f64], x: f64) -> (Vec<Gate>, Vec<Slot>) {
    let n = spec.n_qubits;
    let mut gates = Vec::with_capacity(spec.n_layers * 4 * n + 2 * n);
    let mut slots = Vec::with_capacity(gates.capacity());
    let mut t = 0usize;
    let mut trainable_column = |gates: &mut Vec<Gate>, slots: &mut Vec<Slot>, axis: Axis| {
        for q in 0..n {
            gates.push(Gate::rotation(axis, q, theta[t]));
            slots.push(Slot::Theta(t));
            t += 1;
        }
    };
    for _ in 0..spec.n_layers {
        trainable_column(&mut gates, &mut slots, Axis::Y);
        trainable_column(&mut gates, &mut slots, Axis::Z);
        if spec.entangle && n > 1 {
            for q in 0..n {
                gates.push(Gate::Cnot {
                    control: q,
                    target: (q + 1) % n,
                });
                slots.push(Slot::Fixed);
            }
        }
        for q in 0..n {
            gates.push(Gate::rotation(spec.encoding_axis, q, spec.frequency_scale * x));
            slots.push(Slot::Encoding);
        }
    }
    trainable_column(&mut gates, &mut slots, Axis::Y);
    trainable_column(&mut gates, &mut slots, Axis::Z);
    (gates, slots)
}

/// Gate list for U(x, θ); angles in `params.theta` are consumed in layout order.
pub fn build_circuit(spec: &AnsatzSpec, params: &ParamVector, x: f64) -> Vec<Gate> {
    layout(spec, &params.theta, x).0
}

fn raw(spec: &AnsatzSpec, gates: &[Gate]) -> f64 {
    let state = statevec::run_circuit(gates, spec.n_qubits).expect("ansatz gates are valid");
    statevec::expectation(&state, &spec.observable()).expect("matching register")
}

pub fn evaluate(spec: &AnsatzSpec, params: &ParamVector, x: f64) -> ModelOutput {
    let raw_expectation = raw(spec, &build_circuit(spec, params, x));
    ModelOutput {
        value: params.out_scale * raw_expectation + params.out_bias,
        raw_expectation,
    }
}

/// Expectation with gate `idx` shifted by `shift`.
fn shifted(spec: &AnsatzSpec, gates: &[Gate], idx: usize, shift: f64) -> f64 {
    let mut g = gates.to_vec();
    let angle = g[idx].angle().expect("rotation gate");
    g[idx] = g[idx].with_angle(angle + shift);
    raw(spec, &g)
}

fn shift_rule(spec: &AnsatzSpec, gates: &[Gate], idx: usize) -> f64 {
    0.5 * (shifted(spec, gates, idx, FRAC_PI_2) - shifted(spec, gates, idx, -FRAC_PI_2))
}

/// ∂f/∂θ by the parameter-shift rule, including the output scale.
pub fn grad_theta(spec: &AnsatzSpec, params: &ParamVector, x: f64) -> Vec<f64> {
    let (gates, slots) = layout(spec, &params.theta, x);
    let mut grad = vec![0.0; params.theta.len()];
    for (idx, slot) in slots.iter().enumerate() {
        if let Slot::Theta(t) = *slot {
            grad[t] = params.out_scale * shift_rule(spec, &gates, idx);
        }
    }
    grad
}

/// Shift-rule derivative of the raw expectation w.r.t. x for a prepared gate list.
fn raw_grad_x(spec: &AnsatzSpec, gates: &[Gate], slots: &[Slot]) -> f64 {
    let sum: f64 = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| **s == Slot::Encoding)
        .map(|(idx, _)| shift_rule(spec, gates, idx))
        .sum();
    spec.frequency_scale * sum
}

/// ∂f/∂x, summing shift-rule terms over every encoding gate.
pub fn grad_x(spec: &AnsatzSpec, params: &ParamVector, x: f64) -> f64 {
    let (gates, slots) = layout(spec, &params.theta, x);
    params.out_scale * raw_grad_x(spec, &gates, &slots)
}

/// ∂²f/∂θ_j∂x by nesting a θ shift around the encoding-gate shift sum.
pub fn grad_theta_of_grad_x(spec: &AnsatzSpec, params: &ParamVector, x: f64) -> Vec<f64> {
    let (gates, slots) = layout(spec, &params.theta, x);
    let mut grad = vec![0.0; params.theta.len()];
    for (idx, slot) in slots.iter().enumerate() {
        let Slot::Theta(t) = *slot else { continue };
        let angle = gates[idx].angle().expect("rotation");
        let mut plus = gates.clone();
        plus[idx] = gates[idx].with_angle(angle + FRAC_PI_2);
        let mut minus = gates.clone();
        minus[idx] = gates[idx].with_angle(angle - FRAC_PI_2);
        grad[t] = params.out_scale
            * 0.5
            * (raw_grad_x(spec, &plus, &slots) - raw_grad_x(spec, &minus, &slots));
    }
    grad
}

/// Value, ∂f/∂θ, ∂f/∂x in one adjoint sweep. Matches the shift-rule
/// functions to rounding and costs about three circuit executions.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub output: ModelOutput,
    /// Gradient of the raw expectation (no output scale applied).
    pub raw_grad_theta: Vec<f64>,
    pub grad_x: f64,
}

pub fn evaluate_with_gradients(spec: &AnsatzSpec, params: &ParamVector, x: f64) -> Jet {
    let (gates, slots) = layout(spec, &params.theta, x);
    let (raw_expectation, angle_grads) =
        statevec::expectation_with_angle_gradients(&gates, spec.n_qubits, &spec.observable())
            .expect("ansatz gates are valid");
    let mut raw_grad_theta = vec![0.0; params.theta.len()];
    let mut dx = 0.0;
    for (slot, g) in slots.iter().zip(&angle_grads) {
        match *slot {
            Slot::Theta(t) => raw_grad_theta[t] = *g,
            Slot::Encoding => dx += *g,
            Slot::Fixed => {}
        }
    }
    Jet {
        output: ModelOutput {
            value: params.out_scale * raw_expectation + params.out_bias,
            raw_expectation,
        },
        raw_grad_theta,
        grad_x: params.out_scale * spec.frequency_scale * dx,
    }
}
