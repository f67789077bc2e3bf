use proptest::prelude::*;

use qsphere::qalgebra::{Element, Gen, TensorElement};
use qsphere::scalars::QScalar;
use qsphere::spectral::{
    build_w, fit_decay, verify_pi_relations, BlockOperator, Chirality, CoefficientForm, SpectralConfig, SpinorIndex,
};

fn gen() -> impl Strategy<Value = Gen> {
    prop::sample::select(Gen::ALL.to_vec())
}

fn word(max_len: usize) -> impl Strategy<Value = Vec<(Gen, u32)>> {
    prop::collection::vec((gen(), 1u32..3), 0..max_len)
}

fn element() -> impl Strategy<Value = Element> {
    prop::collection::vec((word(3), -3i64..4, -2i64..3), 1..3).prop_map(|terms| {
        terms.into_iter().fold(Element::zero(), |acc, (w, n, k)| {
            let c = &QScalar::from_int(n) * &QScalar::s_pow(k);
            &acc + &Element::normal_form(&w, c)
        })
    })
}

fn random_operator(two_j_max: u32) -> impl Strategy<Value = BlockOperator> {
    let idx: Vec<SpinorIndex> = SpinorIndex::all(two_j_max).collect();
    let n = idx.len();
    prop::collection::vec((0..n, 0..n, -5.0f64..5.0), 0..40).prop_map(move |entries| {
        let mut op = BlockOperator::zero(two_j_max);
        for (o, i, v) in entries {
            op.add_entry(idx[o], idx[i], v);
        }
        op
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_associative(x in element(), y in element(), z in element()) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn word_normal_form_matches_products(w in word(5)) {
        let direct = Element::normal_form(&w, QScalar::one());
        let folded = w.iter().fold(Element::one(), |acc, &(g, k)| &acc * &Element::gen(g).pow(k));
        prop_assert_eq!(direct, folded);
    }

    #[test]
    fn star_reverses_products_and_is_involutive(x in element(), y in element()) {
        prop_assert_eq!((&x * &y).star(), &y.star() * &x.star());
        prop_assert_eq!(x.star().star(), x);
    }

    #[test]
    fn coproduct_and_counit_are_multiplicative(x in element(), y in element()) {
        prop_assert_eq!((&x * &y).coproduct(), &x.coproduct() * &y.coproduct());
        prop_assert_eq!((&x * &y).counit(), &x.counit() * &y.counit());
    }

    #[test]
    fn antipode_axiom(x in element()) {
        let eps = Element::scalar(x.counit());
        let left = x.coproduct().contract(|a| a.antipode(), |b| b.clone());
        let right = x.coproduct().contract(|a| a.clone(), |b| b.antipode());
        prop_assert_eq!(&left, &eps);
        prop_assert_eq!(&right, &eps);
    }

    #[test]
    fn degree_is_additive(u in word(4), v in word(4)) {
        let x = Element::normal_form(&u, QScalar::one());
        let y = Element::normal_form(&v, QScalar::one());
        let xy = &x * &y;
        prop_assume!(!xy.is_zero());
        prop_assert_eq!(xy.degree().unwrap(), x.degree().unwrap() + y.degree().unwrap());
    }

    #[test]
    fn tensor_unit(x in element()) {
        let d = x.coproduct();
        prop_assert_eq!(&d * &TensorElement::one(), d);
    }

    #[test]
    fn adjoint_is_an_involution(op in random_operator(5)) {
        let back = op.adjoint().adjoint();
        prop_assert!((&back.to_dense() - &op.to_dense()).amax() == 0.0);
    }

    #[test]
    fn adjoint_reverses_products(a in random_operator(3), b in random_operator(3)) {
        let lhs = a.mul(&b).adjoint().to_dense();
        let rhs = b.adjoint().mul(&a.adjoint()).to_dense();
        prop_assert!((&lhs - &rhs).amax() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn w_is_orthogonal(q in 0.1f64..0.95) {
        let cfg = SpectralConfig::new(q, 11, 1e-9).unwrap();
        let w = build_w(&cfg).to_dense();
        let n = w.nrows();
        let err = (w.transpose() * &w - nalgebra::DMatrix::<f64>::identity(n, n)).amax();
        prop_assert!(err < 1e-12, "{}", err);
    }

    #[test]
    fn relations_hold_for_any_q(q in 0.2f64..0.9) {
        let cfg = SpectralConfig::new(q, 9, 1e-9).unwrap();
        let r = verify_pi_relations(&cfg, CoefficientForm::Resolved);
        prop_assert!(r.all_passed(), "{:?}", r.failed_ids());
    }

    #[test]
    fn fit_recovers_geometric_rate(q in 0.2f64..0.95, c in 0.1f64..10.0) {
        let seq: Vec<(f64, f64)> = (0..20).map(|k| {
            let j = k as f64 + 0.5;
            (j, c * q.powf(j))
        }).collect();
        let d = fit_decay("geometric", &seq, q.ln(), |_| true).unwrap();
        prop_assert!(d.rel_slope_error < 1e-9);
    }

    #[test]
    fn spinor_index_round_trip(two_j in (0u32..6).prop_map(|k| 2 * k + 1), m in 0u32..12, up in any::<bool>()) {
        prop_assume!(m <= two_j);
        let ch = if up { Chirality::Plus } else { Chirality::Minus };
        let s = SpinorIndex::new(two_j, m, ch).unwrap();
        prop_assert_eq!(s.j() * 2.0, two_j as f64);
        prop_assert!(s.m().abs() <= s.j());
    }
}
