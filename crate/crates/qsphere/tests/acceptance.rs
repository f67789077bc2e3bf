//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion, then
//! asserts that each outcome, including the expected failures, has exactly
//! the recorded signature.

use std::time::{Duration, Instant};

use qsphere::calculus::verify_calculus;
use qsphere::qalgebra::verify_algebra;
use qsphere::report::Report;
use qsphere::spectral::{
    verify_ko_signs, verify_pi_relations, verify_spectrum, CoefficientForm, DecayOp, JForm, SpectralConfig,
    SpinorModel,
};
use qsphere::symmetries::verify_symmetries;

const QS: [f64; 3] = [0.3, 0.5, 0.8];
const IDX: [i32; 3] = [1, 0, -1];

struct Outcome {
    passed: bool,
    detail: String,
}

fn line(n: u32, title: &str, o: &Outcome) {
    println!("criterion {n} {:<4} {title}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
}

fn cfg(q: f64) -> SpectralConfig {
    SpectralConfig::new(q, 41, 1e-9).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn criterion_1() -> Outcome {
    let (r, t) = timed(|| verify_algebra(4));
    let failed = r.failed_ids();
    // signature: only the two printed x-relations carrying μ fail
    assert_eq!(
        failed,
        vec!["x-relation.(q^2x0+1)(x0-1)=mu.x-1x1", "x-relation.(q^-2x0+1)(x0-1)=mu.x1x-1"],
        "unexpected algebra failures"
    );
    assert!(r.unexpected_failures().is_empty());
    for id in ["x-relation.(q^2x0+1)(x0-1)=x-1x1", "x-relation.(q^-2x0+1)(x0-1)=x1x-1", "hopf.antipode", "hopf.coassociativity"] {
        assert!(r.check(id).unwrap().passed(), "{id}");
    }
    assert!(t < Duration::from_secs(30));
    let (p, f, _) = r.counts();
    Outcome {
        passed: f == 0,
        detail: format!(
            "{p} exact identities hold, {f} fail: the printed x-relations with factor μ; the μ-free forms hold ({:.2}s)",
            t.as_secs_f64()
        ),
    }
}

fn criterion_2() -> Outcome {
    let (r, t) = timed(|| verify_symmetries(3));
    assert!(t < Duration::from_secs(120));
    let (p, f, _) = r.counts();
    assert_eq!(f, 0, "{:?}", r.failed_ids());
    Outcome { passed: f == 0, detail: format!("{p} exact checks, all zero residual ({:.2}s)", t.as_secs_f64()) }
}

fn criterion_3() -> Outcome {
    let (r, t) = timed(|| verify_calculus(4, 6));
    assert!(t < Duration::from_secs(300));
    let unexpected: Vec<&str> = r.unexpected_failures().iter().map(|c| c.id.as_str()).collect();
    assert!(unexpected.is_empty(), "{unexpected:?}");
    let errata = r.failed().count();
    assert_eq!(errata, 11, "{:?}", r.failed_ids());
    for id in ["fibre.codimension", "soldering.b+", "soldering.b0", "soldering.b-"] {
        let c = r.check(id).unwrap_or_else(|| panic!("missing {id}"));
        assert!(c.passed(), "{id}");
    }
    let corrected = r.checks.iter().filter(|c| c.id.starts_with("corrected.")).count();
    assert!(corrected >= errata);
    assert!(r.checks.iter().filter(|c| c.id.starts_with("corrected.")).all(|c| c.passed()));
    let (p, _, _) = r.counts();
    Outcome {
        passed: true,
        detail: format!(
            "{p} identities exact; {errata} printed identities fail and are reported as named errata with exact corrections; fibre codimension 1 ({:.2}s)",
            t.as_secs_f64()
        ),
    }
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for q in QS {
        let (r, t) = timed(|| verify_spectrum(&cfg(q)));
        assert!(t < Duration::from_secs(60));
        for id in ["eigenvalues", "multiplicities", "dirac-squared", "closed-form-oracle", "w-diagonalises"] {
            let c = r.check(id).unwrap();
            assert!(c.passed(), "q = {q}: {id}");
            if let Some(v) = c.residual {
                worst = worst.max(v);
            }
        }
    }
    Outcome {
        passed: true,
        detail: format!("±μ_j with multiplicity 2j+1 and D^2 blockwise at q ∈ {QS:?}; worst relative error {worst:.1e}"),
    }
}

fn criterion_5() -> Outcome {
    let mut residual: f64 = 0.0;
    for q in QS {
        let stated = verify_ko_signs(&cfg(q), JForm::Stated);
        // signature: J^2 = -1, JD = DJ and ΓD = -DΓ hold; Γ and J commute instead of anticommuting
        assert_eq!(stated.failed_ids(), vec!["GJ=-JG".to_string()], "q = {q}");
        let c = stated.check("GJ=-JG").unwrap();
        let r = c.residual.unwrap();
        assert!((r - 2.0).abs() < 1e-3, "‖ΓJ + JΓ‖ = {r}");
        residual = residual.max(r);
        let graded = verify_ko_signs(&cfg(q), JForm::Graded);
        assert!(graded.all_passed(), "graded J at q = {q}: {:?}", graded.failed_ids());
    }
    Outcome {
        passed: false,
        detail: format!(
            "J^2 = -1, JD = DJ, ΓD = -DΓ hold but ΓJ = +JΓ (‖ΓJ + JΓ‖ = {residual:.3}); the graded variant of J passes all four"
        ),
    }
}

#[derive(Default)]
struct Tally {
    within: usize,
    faster: usize,
    flat: usize,
    other: usize,
    below_floor: usize,
}

fn criterion_6() -> Outcome {
    let mut total = Tally::default();
    let mut z_min = f64::INFINITY;
    for q in QS {
        let c = cfg(q);
        let lq = q.ln();
        let m = SpinorModel::new(&c, JForm::Stated);

        // the two claims that do hold at the stated rate
        for (op, i) in [(DecayOp::WLemma, 0), (DecayOp::Approx, 1), (DecayOp::Approx, 0), (DecayOp::Approx, -1)] {
            let d = m.decay(op, i, 0).unwrap();
            assert!(d.rel_slope_error <= 0.10, "{} at q = {q}: {}", d.label, d.fitted_slope);
        }

        let mut flat_delta = 0;
        for i in IDX {
            for k in IDX {
                let z = m.series_operator(DecayOp::ZCommutant, i, k).max_block_norm(|t| c.is_interior(t));
                z_min = z_min.min(z);
                for op in [DecayOp::Commutant, DecayOp::FirstOrderDelta, DecayOp::FirstOrderOmega] {
                    match m.decay(op, i, k) {
                        Err(_) => total.below_floor += 1,
                        Ok(d) if d.rel_slope_error <= 0.10 => total.within += 1,
                        Ok(d) if d.fitted_slope < 1.1 * lq => total.faster += 1,
                        Ok(d) if d.fitted_slope.abs() < 0.1 * lq.abs() => {
                            total.flat += 1;
                            if op == DecayOp::FirstOrderDelta {
                                flat_delta += 1;
                            }
                        }
                        Ok(_) => total.other += 1,
                    }
                }
            }
        }
        // signature: [[D_Δ, π(x_i)], Jπ(x_k)J^-1] does not decay for at least 8 of 9 pairs
        assert!(flat_delta >= 8, "q = {q}: {flat_delta}");
    }
    // signature: [z_i, J z_k J^-1] is far above rounding for every pair
    assert!(z_min > 1e-2, "{z_min}");
    // commutants and the D_Ω part never decay slower than q^j
    assert!(total.flat <= 27 && total.other <= 3, "flat {}, other {}", total.flat, total.other);
    Outcome {
        passed: false,
        detail: format!(
            "W_j and π - z decay at log q; of {} commutator series {} are within 10% of log q, {} decay faster (2-3 log q), {} fall below the noise floor, {} do not decay (D_Δ part), {} other; min interior ‖[z_i, J z_k J^-1]‖ = {z_min:.3}",
            3 * 27,
            total.within,
            total.faster,
            total.below_floor,
            total.flat,
            total.other
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut control: f64 = f64::INFINITY;
    let max_rel = |r: &Report| r.checks.iter().filter(|c| c.id.starts_with("relation.")).filter_map(|c| c.residual).fold(0.0, f64::max);
    for q in QS {
        let ok = verify_pi_relations(&cfg(q), CoefficientForm::Resolved);
        assert!(ok.all_passed(), "q = {q}: {:?}", ok.failed_ids());
        worst = worst.max(max_rel(&ok));
        let bad = verify_pi_relations(&cfg(q), CoefficientForm::MisparenthesizedBeta);
        assert!(!bad.all_passed(), "negative control passed at q = {q}");
        control = control.min(max_rel(&bad));
    }
    Outcome {
        passed: true,
        detail: format!("max residual {worst:.1e}; mis-parenthesised β_N fails with residual >= {control:.1e}"),
    }
}

fn criterion_8() -> Outcome {
    let mut detail = Vec::new();
    for q in [0.3, 0.5] {
        let r = verify_spectrum(&cfg(q));
        for id in ["growth.mu", "growth.gamma"] {
            let c = r.check(id).unwrap();
            assert!(c.passed(), "q = {q}: {id} {:?}", c.residual);
            detail.push(format!("{id}@{q}: {:.1e}", c.residual.unwrap()));
        }
    }
    Outcome { passed: true, detail: format!("ratio deviations {}", detail.join(", ")) }
}

fn main() {
    let results = [
        (1, "exact algebra suite", criterion_1()),
        (2, "exact action suite", criterion_2()),
        (3, "exact calculus suite", criterion_3()),
        (4, "spectrum reproduction", criterion_4()),
        (5, "real-structure sign relations", criterion_5()),
        (6, "decay properties", criterion_6()),
        (7, "relation oracle", criterion_7()),
        (8, "eigenvalue growth", criterion_8()),
    ];
    for (n, title, o) in &results {
        line(*n, title, o);
    }
    let pattern: Vec<bool> = results.iter().map(|r| r.2.passed).collect();
    assert_eq!(pattern, [false, true, true, true, false, false, true, true]);
}
