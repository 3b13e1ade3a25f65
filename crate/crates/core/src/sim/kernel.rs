//! In-place gate kernels over a dense complex vector where qubit `k` is the
//! bit of weight `2^k` in the index.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::Gate;

pub(crate) type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub(crate) fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[re(c), re(-s)], [re(s), re(c)]]
}

pub(crate) fn rz(theta: f64) -> Mat2 {
    [
        [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

pub(crate) fn hadamard() -> Mat2 {
    let h = re(FRAC_1_SQRT_2);
    [[h, h], [h, -h]]
}

pub(crate) fn pauli_x() -> Mat2 {
    [[ZERO, re(1.0)], [re(1.0), ZERO]]
}

pub(crate) fn apply_1q(amps: &mut [Complex64], m: &Mat2, bit: usize) {
    let stride = 1usize << bit;
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + stride {
            let j = i + stride;
            let (x, y) = (amps[i], amps[j]);
            amps[i] = m[0][0] * x + m[0][1] * y;
            amps[j] = m[1][0] * x + m[1][1] * y;
        }
        base += 2 * stride;
    }
}

pub(crate) fn apply_cx(amps: &mut [Complex64], control: usize, target: usize) {
    let (cm, tm) = (1usize << control, 1usize << target);
    for i in 0..amps.len() {
        if i & cm != 0 && i & tm == 0 {
            amps.swap(i, i | tm);
        }
    }
}

pub(crate) fn apply_cp(amps: &mut [Complex64], lambda: f64, a: usize, b: usize) {
    let mask = (1usize << a) | (1usize << b);
    let phase = Complex64::from_polar(1.0, lambda);
    for (i, amp) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            *amp *= phase;
        }
    }
}

pub(crate) fn apply_swap(amps: &mut [Complex64], a: usize, b: usize) {
    let (am, bm) = (1usize << a, 1usize << b);
    for i in 0..amps.len() {
        if i & am != 0 && i & bm == 0 {
            amps.swap(i, (i & !am) | bm);
        }
    }
}

/// Applies `gate` with every qubit index shifted by `offset` bits.
/// With `conjugate`, applies the elementwise complex conjugate of the gate.
pub(crate) fn apply_gate(amps: &mut [Complex64], gate: &Gate, offset: usize, conjugate: bool) {
    let sign = if conjugate { -1.0 } else { 1.0 };
    match *gate {
        Gate::H(q) => apply_1q(amps, &hadamard(), q + offset),
        Gate::X(q) => apply_1q(amps, &pauli_x(), q + offset),
        Gate::Ry(t, q) => apply_1q(amps, &ry(t), q + offset),
        Gate::Rz(t, q) => apply_1q(amps, &rz(sign * t), q + offset),
        Gate::Cx(c, t) => apply_cx(amps, c + offset, t + offset),
        Gate::Cp(l, c, t) => apply_cp(amps, sign * l, c + offset, t + offset),
        Gate::Swap(a, b) => apply_swap(amps, a + offset, b + offset),
    }
}
