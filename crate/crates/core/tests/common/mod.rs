use std::f64::consts::TAU;

use rand::Rng;
use vqc_core::circuit::{Circuit, Gate};

/// Random circuit over the full gate set, measuring every qubit in a
/// shuffled order.
pub fn random_circuit(rng: &mut impl Rng, n: usize, n_gates: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..n_gates {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n);
        let two_qubit = n > 1;
        while two_qubit && b == a {
            b = rng.random_range(0..n);
        }
        let angle = rng.random_range(-TAU..TAU);
        let pick = if two_qubit {
            rng.random_range(0..7)
        } else {
            rng.random_range(0..4)
        };
        let g = match pick {
            0 => Gate::H(a),
            1 => Gate::X(a),
            2 => Gate::Ry(angle, a),
            3 => Gate::Rz(angle, a),
            4 => Gate::Cx(a, b),
            5 => Gate::Cp(angle, a, b),
            _ => Gate::Swap(a, b),
        };
        c.push(g).unwrap();
    }
    let mut measured: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        measured.swap(i, rng.random_range(0..=i));
    }
    c.set_measured(measured).unwrap();
    c
}
