//! Frozen numeric values, each recomputed here from the closed forms with a
//! separate q-number implementation.

use qsphere::scalars::HalfInt;
use qsphere::spectral::{
    alpha_coeff, alpha_n, beta_n, mu_j, mu_j_squared_exact, spectrum_table, CoefficientForm, SpectralConfig,
};

fn qnum(x: f64, q: f64) -> f64 {
    (q.powf(x) - q.powf(-x)) / (q - 1.0 / q)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

#[test]
fn mu_half_at_q_half() {
    let q = 0.5;
    let nu = q - 1.0 / q;
    let d = nu * nu / q * qnum(0.5, q) * qnum(1.5, q);
    let oracle = d.hypot(qnum(1.0, q));
    assert!(close(oracle, 3.640_054_944_640_259));
    assert!(close(mu_j(0.5, q), oracle));
    assert!(close(mu_j_squared_exact(1).eval(q).unwrap().sqrt(), oracle));
}

#[test]
fn higher_eigenvalues_at_q_half() {
    for (two_j, frozen) in [(3, 27.239_963_748_140_34), (5, 123.143_213_278_533_95)] {
        let j = two_j as f64 / 2.0;
        assert!(close(mu_j(j, 0.5), frozen), "j = {j}");
        assert!(close(mu_j_squared_exact(two_j).eval(0.5).unwrap().sqrt(), frozen));
    }
    let cfg = SpectralConfig::new(0.5, 5, 1e-9).unwrap();
    let table = spectrum_table(&cfg);
    assert_eq!(table.len(), 3);
    assert!(close(table[0].2, 3.640_054_944_640_259));
    assert_eq!(table.iter().map(|r| r.3).collect::<Vec<_>>(), [2, 4, 6]);
}

#[test]
fn beta_values() {
    // at j = 1/2 the tail vanishes and β = 1 / (q^2 [3])
    let q = 0.5;
    assert!(close(1.0 / (q * q * qnum(3.0, q)), 0.761_904_761_904_761_9));
    for (j, frozen) in [(0.5, 0.761_904_761_904_761_9), (1.5, 0.926_686_217_008_797_7), (2.5, 0.980_772_752_243_179)] {
        assert!(close(beta_n(j, 0.5, q, CoefficientForm::Resolved), frozen), "j = {j}");
    }
}

#[test]
fn alpha_value() {
    let q: f64 = 0.5;
    let oracle = (qnum(2.0, q) * qnum(2.0, q) * qnum(1.0, q) / (qnum(4.0, q) * qnum(3.0, q))).sqrt() * q.sqrt();
    assert!(close(oracle, 0.236_690_534_165_575_44));
    assert!(close(alpha_n(1.5, 0.5, q), oracle));
}

#[test]
fn alpha_00_on_the_top_weight_is_beta() {
    let h = HalfInt::from_twice;
    for two_j in [1, 3, 5, 9] {
        for q in [0.3, 0.5, 0.8] {
            let a = alpha_coeff(0, 0, h(two_j), h(two_j), h(1), q, CoefficientForm::Resolved).unwrap();
            let b = beta_n(two_j as f64 / 2.0, 0.5, q, CoefficientForm::Resolved);
            assert!(close(a, b), "2j = {two_j}, q = {q}");
        }
    }
    let off = alpha_coeff(0, 0, h(3), h(1), h(1), 0.5, CoefficientForm::Resolved).unwrap();
    assert!(close(off, 0.871_526_323_139_226_5));
}
