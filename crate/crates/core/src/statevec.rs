//! Pure-state simulator for the small gate set used by the ansatz.
//!
//! Amplitudes are stored in a flat vector indexed by the computational basis
//! integer. Qubit 0 is the most significant bit of that index.

use num_complex::Complex64;
use thiserror::Error;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("controlled-NOT needs distinct control and target (both {0})")]
    DuplicateQubit(usize),
    #[error("register size {0} not supported (1..={MAX_QUBITS})")]
    BadRegister(usize),
    #[error("dimension mismatch: state has {state} qubits, operand has {other}")]
    DimensionMismatch { state: usize, other: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    n_qubits: usize,
}

impl StateVector {
    /// |0…0⟩ on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self, SimError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(SimError::BadRegister(n_qubits));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            amplitudes,
            n_qubits,
        })
    }

    /// Wraps raw amplitudes. The length must be a power of two; the norm is
    /// not checked so that linearity tests can feed unnormalized vectors.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::BadRegister(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(SimError::BadRegister(n_qubits));
        }
        Ok(Self {
            amplitudes,
            n_qubits,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit mask selecting `qubit` inside a basis index.
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// In-place gate application.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::Cnot { control, target } => {
                let cm = self.mask(control);
                let tm = self.mask(target);
                for i in 0..self.amplitudes.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amplitudes.swap(i, i | tm);
                    }
                }
            }
            Gate::Rx { qubit, angle } | Gate::Ry { qubit, angle } | Gate::Rz { qubit, angle } => {
                let m = gate_matrix(gate.axis().expect("rotation"), angle);
                self.apply_single(qubit, &m);
            }
        }
        Ok(())
    }

    /// Applies the inverse of `gate` in place.
    pub fn apply_inverse(&mut self, gate: &Gate) -> Result<(), SimError> {
        self.apply(&gate.inverse())
    }

    fn apply_single(&mut self, qubit: usize, m: &[[Complex64; 2]; 2]) {
        let tm = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & tm == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | tm];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | tm] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Applies the Pauli generator of `axis` on `qubit` (no angle).
    fn apply_pauli(&mut self, axis: Axis, qubit: usize) {
        let tm = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & tm != 0 {
                continue;
            }
            let j = i | tm;
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[j]);
            let (b0, b1) = match axis {
                Axis::X => (a1, a0),
                Axis::Y => (Complex64::new(a1.im, -a1.re), Complex64::new(-a0.im, a0.re)),
                Axis::Z => (a0, -a1),
            };
            self.amplitudes[i] = b0;
            self.amplitudes[j] = b1;
        }
    }

    fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rx { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn rotation(axis: Axis, qubit: usize, angle: f64) -> Self {
        match axis {
            Axis::X => Gate::Rx { qubit, angle },
            Axis::Y => Gate::Ry { qubit, angle },
            Axis::Z => Gate::Rz { qubit, angle },
        }
    }

    pub fn axis(&self) -> Option<Axis> {
        match self {
            Gate::Rx { .. } => Some(Axis::X),
            Gate::Ry { .. } => Some(Axis::Y),
            Gate::Rz { .. } => Some(Axis::Z),
            Gate::Cnot { .. } => None,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => Some(angle),
            Gate::Cnot { .. } => None,
        }
    }

    /// Same gate with its rotation angle replaced. CNOT is returned unchanged.
    pub fn with_angle(&self, new_angle: f64) -> Self {
        match *self {
            Gate::Rx { qubit, .. } => Gate::Rx {
                qubit,
                angle: new_angle,
            },
            Gate::Ry { qubit, .. } => Gate::Ry {
                qubit,
                angle: new_angle,
            },
            Gate::Rz { qubit, .. } => Gate::Rz {
                qubit,
                angle: new_angle,
            },
            g @ Gate::Cnot { .. } => g,
        }
    }

    pub fn inverse(&self) -> Self {
        match self.angle() {
            Some(angle) => self.with_angle(-angle),
            None => *self,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<(), SimError> {
        let check = |index: usize| {
            if index < n_qubits {
                Ok(())
            } else {
                Err(SimError::QubitOutOfRange { index, n_qubits })
            }
        };
        match *self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => check(qubit),
            Gate::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    Err(SimError::DuplicateQubit(control))
                } else {
                    Ok(())
                }
            }
        }
    }

    fn qubit(&self) -> usize {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => qubit,
            Gate::Cnot { target, .. } => target,
        }
    }
}

/// 2×2 matrix of exp(−iθP/2).
pub fn gate_matrix(axis: Axis, angle: f64) -> [[Complex64; 2]; 2] {
    let c = (angle / 2.0).cos();
    let s = (angle / 2.0).sin();
    let z = Complex64::new(0.0, 0.0);
    match axis {
        Axis::X => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        Axis::Y => [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
        Axis::Z => [[Complex64::new(c, -s), z], [z, Complex64::new(c, s)]],
    }
}

/// Tensor product of I and Z factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observable {
    z_on: Vec<bool>,
}

impl Observable {
    /// Z on a single qubit, identity elsewhere.
    pub fn z(qubit: usize, n_qubits: usize) -> Self {
        let mut z_on = vec![false; n_qubits];
        z_on[qubit] = true;
        Self { z_on }
    }

    /// Parses a string such as `"ZI"` (qubit 0 first).
    pub fn from_labels(labels: &str) -> Option<Self> {
        labels
            .chars()
            .map(|c| match c {
                'I' | 'i' => Some(false),
                'Z' | 'z' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .filter(|v| !v.is_empty())
            .map(|z_on| Self { z_on })
    }

    pub fn n_qubits(&self) -> usize {
        self.z_on.len()
    }

    /// ±1 eigenvalue on a basis state.
    pub fn eigenvalue(&self, basis_index: usize) -> f64 {
        let n = self.z_on.len();
        let parity = self
            .z_on
            .iter()
            .enumerate()
            .filter(|(q, &on)| on && basis_index & (1 << (n - 1 - q)) != 0)
            .count();
        if parity % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn apply_to(&self, state: &mut StateVector) {
        for (i, a) in state.amplitudes.iter_mut().enumerate() {
            if self.eigenvalue(i) < 0.0 {
                *a = -*a;
            }
        }
    }
}

pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector, SimError> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// ⟨ψ|M|ψ⟩.
pub fn expectation(state: &StateVector, obs: &Observable) -> Result<f64, SimError> {
    if obs.n_qubits() != state.n_qubits {
        return Err(SimError::DimensionMismatch {
            state: state.n_qubits,
            other: obs.n_qubits(),
        });
    }
    Ok(state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| obs.eigenvalue(i) * a.norm_sqr())
        .sum())
}

/// Applies `gates` in order to |0…0⟩.
pub fn run_circuit(gates: &[Gate], n_qubits: usize) -> Result<StateVector, SimError> {
    let mut state = StateVector::zero(n_qubits)?;
    for g in gates {
        state.apply(g)?;
    }
    Ok(state)
}

/// Expectation of `obs` after `gates` together with its derivative with
/// respect to every gate angle (zero for CNOT entries), by one forward and one
/// backward sweep.
pub fn expectation_with_angle_gradients(
    gates: &[Gate],
    n_qubits: usize,
    obs: &Observable,
) -> Result<(f64, Vec<f64>), SimError> {
    let mut psi = run_circuit(gates, n_qubits)?;
    let value = expectation(&psi, obs)?;
    let mut lambda = psi.clone();
    obs.apply_to(&mut lambda);

    let mut grads = vec![0.0; gates.len()];
    let mut scratch = psi.clone();
    for (idx, gate) in gates.iter().enumerate().rev() {
        if let Some(axis) = gate.axis() {
            // d/dθ ⟨M⟩ = Im ⟨λ| P |ψ⟩ with both taken right after the gate.
            scratch.amplitudes.copy_from_slice(&psi.amplitudes);
            scratch.apply_pauli(axis, gate.qubit());
            grads[idx] = lambda.inner(&scratch).im;
        }
        psi.apply_inverse(gate)?;
        lambda.apply_inverse(gate)?;
    }
    Ok((value, grads))
}
