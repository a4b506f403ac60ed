mod common;

use proptest::prelude::*;
use qfourier::ansatz::{self, AnsatzSpec, ParamVector};
use qfourier::statevec::{self, Observable, StateVector};
use rand::Rng;

use common::{central_difference, dense_run, dense_z0, random_circuit, rng};

#[test]
fn matches_dense_matrix_oracle() {
    let mut r = rng(11);
    for _ in 0..60 {
        let n = r.random_range(1..=4);
        let depth = r.random_range(1..=20);
        let gates = random_circuit(&mut r, n, depth);
        let psi = statevec::run_circuit(&gates, n).unwrap();
        let dense = dense_run(&gates, n);
        for (a, b) in psi.amplitudes().iter().zip(&dense) {
            assert!((a - b).norm() < 1e-12);
        }
        let z = statevec::expectation(&psi, &Observable::z(0, n)).unwrap();
        assert!((z - dense_z0(&dense, n)).abs() < 1e-12);
    }
}

#[test]
fn adjoint_gradients_match_finite_differences() {
    let mut r = rng(5);
    for _ in 0..20 {
        let n = r.random_range(1..=3);
        let gates = random_circuit(&mut r, n, 12);
        let obs = Observable::z(0, n);
        let (_, grads) = statevec::expectation_with_angle_gradients(&gates, n, &obs).unwrap();
        for (i, g) in gates.iter().enumerate() {
            let Some(angle) = g.angle() else { continue };
            let f = |t: f64| {
                let mut gs = gates.clone();
                gs[i] = g.with_angle(t);
                statevec::expectation(&statevec::run_circuit(&gs, n).unwrap(), &obs).unwrap()
            };
            assert!((grads[i] - central_difference(f, angle, 1e-5)).abs() < 1e-8);
        }
    }
}

fn random_params(spec: &AnsatzSpec, seed: u64) -> ParamVector {
    let mut r = rng(seed);
    ParamVector {
        theta: (0..spec.parameter_count()).map(|_| r.random_range(0.0..6.3)).collect(),
        out_scale: r.random_range(0.5..1.5),
        out_bias: r.random_range(-0.5..0.5),
    }
}

#[test]
fn model_derivatives_match_finite_differences() {
    for (seed, (n, l, s)) in [(2, 2, 1.0), (3, 2, 0.5), (1, 3, 1.0), (3, 3, 0.5)].into_iter().enumerate() {
        let spec = AnsatzSpec::new(n, l).unwrap().with_frequency_scale(s).unwrap();
        let params = random_params(&spec, seed as u64);
        let x = 0.37 - seed as f64;
        let f = |p: &ParamVector, x: f64| ansatz::evaluate(&spec, p, x).value;

        let gt = ansatz::grad_theta(&spec, &params, x);
        let gx = ansatz::grad_x(&spec, &params, x);
        let mixed = ansatz::grad_theta_of_grad_x(&spec, &params, x);
        let jet = ansatz::evaluate_with_gradients(&spec, &params, x);
        assert!((central_difference(|t| f(&params, t), x, 1e-5) - gx).abs() < 1e-6);
        assert!((jet.grad_x - gx).abs() < 1e-10);
        for i in 0..params.theta.len() {
            let shifted = |t: f64| {
                let mut p = params.clone();
                p.theta[i] = t;
                p
            };
            let fd = central_difference(|t| f(&shifted(t), x), params.theta[i], 1e-5);
            assert!((fd - gt[i]).abs() < 1e-6);
            assert!((params.out_scale * jet.raw_grad_theta[i] - gt[i]).abs() < 1e-10);
            let fd_mixed = central_difference(|t| ansatz::grad_x(&spec, &shifted(t), x), params.theta[i], 1e-5);
            assert!((fd_mixed - mixed[i]).abs() < 1e-5);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuits_preserve_norm_and_invert(seed in any::<u64>(), n in 1usize..=5, depth in 0usize..30) {
        let gates = random_circuit(&mut rng(seed), n, depth);
        let mut psi = statevec::run_circuit(&gates, n).unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        for g in gates.iter().rev() {
            psi.apply_inverse(g).unwrap();
        }
        let zero = StateVector::zero(n).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(zero.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn model_output_is_bounded_by_affine_map(seed in any::<u64>(), x in -10.0f64..10.0) {
        let spec = AnsatzSpec::new(2, 2).unwrap();
        let p = random_params(&spec, seed);
        let out = ansatz::evaluate(&spec, &p, x);
        prop_assert!(out.raw_expectation.abs() <= 1.0 + 1e-12);
        prop_assert!((out.value - (p.out_scale * out.raw_expectation + p.out_bias)).abs() < 1e-14);
    }

    #[test]
    fn model_is_periodic(seed in any::<u64>(), x in -3.0f64..3.0, half in any::<bool>()) {
        let scale = if half { 0.5 } else { 1.0 };
        let spec = AnsatzSpec::new(2, 1).unwrap().with_frequency_scale(scale).unwrap();
        let p = random_params(&spec, seed);
        let a = ansatz::evaluate(&spec, &p, x).value;
        let b = ansatz::evaluate(&spec, &p, x + spec.period()).value;
        prop_assert!((a - b).abs() < 1e-12);
    }
}
