use proptest::prelude::*;

use qsphere::qalgebra::Element;
use qsphere_cli::parse::{parse, Lowered, ParseError, Symbol};

const CORPUS: [&str; 50] = [
    "a",
    "a*",
    "c",
    "c*",
    "b",
    "d",
    "b+",
    "b-",
    "b0",
    "x1",
    "x0",
    "x-1",
    "t",
    "t*",
    "a* * a + c* * c - 1",
    "a*a* + q^2*c*c* - 1",
    "a*c - q*c*a",
    "a*c* - q*c**a",
    "c*c* - c**c",
    "b0*b+ - q^2*b+*b0",
    "b0*b- - q^-2*b-*b0",
    "q^-2*b-*b+ - q^2*b+*b- - (1-q^2)*b0",
    "b+*b- - b0*(1 + q^-1*b0)",
    "x-1*(x0-1) - q^2*(x0-1)*x-1",
    "x1*(x0-1) - q^-2*(x0-1)*x1",
    "(q^2*x0+1)*(x0-1) - x-1*x1",
    "(q^-2*x0+1)*(x0-1) - x1*x-1",
    "q^(1/2)*a - q^(-1/2)*d",
    "q^(3/2)*b+*x1",
    "(a + c)^3",
    "(a* - q*c)^2*(b0 + 1)",
    "-a*-c",
    "-(b+ - b-)",
    "x0^2/(q + q^-1)",
    "b0/2 + x0/3",
    "(1 - q^2)^-1*c*c*",
    "a^2*d^2",
    "b*c - c*b",
    "d*a - a*d - (q^2 - 1)*c*c*",
    "q^(2/2)*a",
    "((a))",
    "2*q^-3*x1*x-1*x0",
    "a**c*",
    "c**a*",
    "b+^2*b-^2",
    "t^3*t*",
    "t^-2 + q*t*",
    "(1 + q)*t - t*^2",
    "q^(1/2)*t^4/(1 + q^2)",
    "(t + t*)^2",
];

fn lower(src: &str) -> Lowered {
    parse(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

fn alg(src: &str) -> Element {
    match lower(src) {
        Lowered::Algebra(e) => e,
        other => panic!("{src}: not an algebra element: {other}"),
    }
}

#[test]
fn corpus_round_trips_through_render() {
    for src in CORPUS {
        let v = lower(src);
        let again = parse(&v.render()).unwrap_or_else(|e| panic!("{src} -> {}: {e}", v.render()));
        assert_eq!(again, v, "{src}");
    }
}

#[test]
fn corpus_covers_every_symbol() {
    for s in Symbol::ALL {
        assert!(CORPUS.contains(&s.name()), "{}", s.name());
    }
}

#[test]
fn defining_relations_lower_to_zero() {
    for src in &CORPUS[14..27] {
        assert!(alg(src).is_zero(), "{src} = {}", alg(src));
    }
    assert!(alg("b*c - c*b").is_zero());
    assert!(alg("d*a - a*d - (q^2 - 1)*c*c*").is_zero());
    assert!(alg("a + -c") == alg("a - c"));
}

#[test]
fn circle_and_algebra_do_not_mix() {
    assert!(matches!(parse("a + t"), Err(ParseError::Mixed { .. })));
    assert!(matches!(lower("t^3*t*"), Lowered::Circle(_)));
}

#[test]
fn errors() {
    assert!(matches!(parse("a + e"), Err(ParseError::UnknownSymbol { pos: 4, .. })));
    assert!(matches!(parse("a/c"), Err(ParseError::NonScalarDivisor { pos: 1 })));
    assert!(matches!(parse("a/(q - q)"), Err(ParseError::DivisionByZero { .. })));
    assert!(matches!(parse("a^(1/2)"), Err(ParseError::InvalidExponent { .. })));
    assert!(matches!(parse("a^-1"), Err(ParseError::InvalidExponent { .. })));
    assert!(matches!(parse("(a + c"), Err(ParseError::Unexpected { .. })));
    assert!(matches!(parse(""), Err(ParseError::Unexpected { pos: 0, .. })));
}

fn atom() -> impl Strategy<Value = String> {
    prop::sample::select(CORPUS[..12].iter().map(|s| format!("({s})")).chain(["q", "q^-1", "q^(1/2)", "2", "(-3)"].map(String::from)).collect::<Vec<_>>())
}

fn expr() -> impl Strategy<Value = String> {
    atom().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x} + {y})")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x} - {y})")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("{x}*{y}")),
            inner.prop_map(|x| format!("-({x})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_expressions_round_trip(src in expr()) {
        let v = lower(&src);
        prop_assert_eq!(parse(&v.render()).unwrap(), v);
    }

    #[test]
    fn difference_with_itself_is_zero(src in expr()) {
        let diff = alg(&format!("({src}) - ({src})"));
        prop_assert!(diff.is_zero());
    }
}
