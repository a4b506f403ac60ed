#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use qfourier::statevec::{gate_matrix, Axis, Gate};

pub type Matrix = Vec<Vec<Complex64>>;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| Complex64::new((i == j) as u8 as f64, 0.0)).collect())
        .collect()
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Full 2ⁿ×2ⁿ unitary of one gate, qubit 0 as the leftmost tensor factor.
pub fn dense_gate(gate: &Gate, n: usize) -> Matrix {
    match *gate {
        Gate::Cnot { control, target } => {
            let dim = 1 << n;
            let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
            for col in 0..dim {
                let c = (col >> (n - 1 - control)) & 1;
                let row = if c == 1 { col ^ (1 << (n - 1 - target)) } else { col };
                m[row][col] = Complex64::new(1.0, 0.0);
            }
            m
        }
        _ => {
            let g = gate_matrix(gate.axis().unwrap(), gate.angle().unwrap());
            let q = match *gate {
                Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => qubit,
                Gate::Cnot { .. } => unreachable!(),
            };
            let g: Matrix = g.iter().map(|r| r.to_vec()).collect();
            let id = identity(2);
            let mut out = identity(1);
            for k in 0..n {
                out = kron(&out, if k == q { &g } else { &id });
            }
            out
        }
    }
}

/// Final state of `gates` on |0…0⟩ by dense matrix-vector products.
pub fn dense_run(gates: &[Gate], n: usize) -> Vec<Complex64> {
    let dim = 1 << n;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[0] = Complex64::new(1.0, 0.0);
    for g in gates {
        let m = dense_gate(g, n);
        psi = (0..dim)
            .map(|i| (0..dim).map(|j| m[i][j] * psi[j]).sum())
            .collect();
    }
    psi
}

/// ⟨Z on qubit 0⟩ from a dense state.
pub fn dense_z0(psi: &[Complex64], n: usize) -> f64 {
    psi.iter()
        .enumerate()
        .map(|(i, a)| if (i >> (n - 1)) & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

pub fn random_circuit(rng: &mut ChaCha20Rng, n: usize, depth: usize) -> Vec<Gate> {
    (0..depth)
        .map(|_| {
            let kind = if n > 1 { rng.random_range(0..4) } else { rng.random_range(0..3) };
            let q = rng.random_range(0..n);
            let angle = rng.random_range(-6.0..6.0);
            match kind {
                0 => Gate::rotation(Axis::X, q, angle),
                1 => Gate::rotation(Axis::Y, q, angle),
                2 => Gate::rotation(Axis::Z, q, angle),
                _ => {
                    let t = (q + rng.random_range(1..n)) % n;
                    Gate::Cnot { control: q, target: t }
                }
            }
        })
        .collect()
}

pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
