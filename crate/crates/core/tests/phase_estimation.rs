use std::f64::consts::PI;

use vqc_core::qpe::{analytic_qpe_distribution, build_qpe, PhaseSpec};
use vqc_core::sim::run_ideal;

#[test]
fn most_likely_outcome_is_within_half_a_bin() {
    for theta in [1.0 / 3.0, 1.0 / 7.0, 0.1, 0.5, 0.9, 0.015625] {
        for t in 2..=8 {
            let d = analytic_qpe_distribution(PhaseSpec::new(theta).unwrap(), t).unwrap();
            let m = d.argmax() as f64;
            let scale = (1u64 << t) as f64;
            // distance on the circle: m = 0 also estimates theta near 1
            let diff = (theta - m / scale).rem_euclid(1.0);
            let dist = diff.min(1.0 - diff);
            assert!(dist <= 0.5 / scale + 1e-15, "theta {theta} t {t} m {m}");
        }
    }
}

#[test]
fn success_probability_bound_on_a_fine_grid() {
    let bound = 4.0 / (PI * PI);
    for i in 0..1000 {
        let theta = i as f64 / 1000.0;
        let d = analytic_qpe_distribution(PhaseSpec::new(theta).unwrap(), 5).unwrap();
        assert!(d.prob(d.argmax()) >= bound, "theta {theta}");
    }
}

#[test]
fn larger_registers_match_closed_form() {
    for t in [7, 8] {
        let phase = PhaseSpec::new(0.3).unwrap();
        let sim = run_ideal(&build_qpe(phase, t).unwrap().circuit).unwrap();
        let exact = analytic_qpe_distribution(phase, t).unwrap();
        for (a, b) in sim.probs().iter().zip(exact.probs()) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
}
