//! Left and right actions of U_q(su(2)) on A[SU_q(2)], the dual pairing,
//! the L-fields spanning the 4D+ tangent space, and their verification suite.
//!
//! Left action convention: `K ▷ p = q^{-deg(p)/2} p` on homogeneous `p`.

use std::fmt;

use thiserror::Error;

use crate::qalgebra::{Element, Gen, Monomial};
use crate::report::{Check, Report};
use crate::scalars::{nu, qnum, HalfInt, QScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("{action} does not preserve the spin-1 span: remainder {remainder}")]
    ClosureViolation { action: String, remainder: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UqGen {
    E,
    F,
    K,
    KInv,
}

impl UqGen {
    pub const ALL: [UqGen; 4] = [UqGen::E, UqGen::F, UqGen::K, UqGen::KInv];

    /// Terms of the coproduct as (left, right) generator pairs; `None` is the unit.
    fn coproduct(self) -> [(Option<UqGen>, Option<UqGen>); 2] {
        match self {
            UqGen::E => [(Some(UqGen::E), Some(UqGen::K)), (Some(UqGen::KInv), Some(UqGen::E))],
            UqGen::F => [(Some(UqGen::F), Some(UqGen::K)), (Some(UqGen::KInv), Some(UqGen::F))],
            // second entry is padding; K is group-like
            UqGen::K => [(Some(UqGen::K), Some(UqGen::K)), (None, None)],
            UqGen::KInv => [(Some(UqGen::KInv), Some(UqGen::KInv)), (None, None)],
        }
    }

    /// `(S(X))*` as a scalar multiple of a generator.
    fn antipode_star(self) -> (QScalar, UqGen) {
        match self {
            UqGen::E => (-QScalar::q(), UqGen::F),
            UqGen::F => (-QScalar::q_pow(-1), UqGen::E),
            UqGen::K => (QScalar::one(), UqGen::KInv),
            UqGen::KInv => (QScalar::one(), UqGen::K),
        }
    }
}

impl fmt::Display for UqGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UqGen::E => "E",
            UqGen::F => "F",
            UqGen::K => "K",
            UqGen::KInv => "K^-1",
        })
    }
}

/// Linear combination of words `X_1 X_2 ... X_n` in U_q(su(2)).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UqElement {
    pub terms: Vec<(QScalar, Vec<UqGen>)>,
}

impl UqElement {
    pub fn word(c: QScalar, w: &[UqGen]) -> Self {
        UqElement { terms: vec![(c, w.to_vec())] }
    }

    pub fn gen(g: UqGen) -> Self {
        UqElement::word(QScalar::one(), &[g])
    }

    pub fn scalar(c: QScalar) -> Self {
        UqElement::word(c, &[])
    }

    pub fn plus(mut self, o: UqElement) -> Self {
        self.terms.extend(o.terms);
        self
    }

    pub fn scale(mut self, c: &QScalar) -> Self {
        for (v, _) in &mut self.terms {
            *v = &*v * c;
        }
        self
    }

    pub fn times(&self, o: &UqElement) -> Self {
        let mut terms = Vec::new();
        for (c1, w1) in &self.terms {
            for (c2, w2) in &o.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                terms.push((c1 * c2, w));
            }
        }
        UqElement { terms }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LField {
    LMinus,
    LZero,
    LPlus,
    Lz,
    DZero,
    Casimir,
}

impl LField {
    /// The four tangent vectors, in the order (-, 0, +, z).
    pub const TANGENT: [LField; 4] = [LField::LMinus, LField::LZero, LField::LPlus, LField::Lz];

    pub fn name(self) -> &'static str {
        match self {
            LField::LMinus => "L-",
            LField::LZero => "L0",
            LField::LPlus => "L+",
            LField::Lz => "Lz",
            LField::DZero => "D0",
            LField::Casimir => "Cq",
        }
    }

    pub fn expand(self) -> UqElement {
        use UqGen::*;
        let one = QScalar::one();
        match self {
            LField::LMinus => UqElement::word(QScalar::s_pow(1), &[F, KInv]),
            LField::LPlus => UqElement::word(QScalar::s_pow(-1), &[E, KInv]),
            LField::LZero => UqElement::word(one.clone(), &[K, K])
                .plus(UqElement::word(&nu() * &nu() * QScalar::q_pow(-1), &[F, E]))
                .plus(UqElement::scalar(-one)),
            LField::Lz => UqElement::word(one.clone(), &[KInv, KInv]).plus(UqElement::scalar(-one)),
            LField::DZero => LField::LZero.expand().plus(LField::Lz.expand().scale(&QScalar::q_pow(-2))),
            LField::Casimir => {
                let inv_nu2 = (&nu() * &nu()).inv().expect("nu is nonzero");
                UqElement::word(one, &[F, E])
                    .plus(UqElement::word(&inv_nu2 * &QScalar::q(), &[K, K]))
                    .plus(UqElement::scalar(&inv_nu2 * &QScalar::from_int(-2)))
                    .plus(UqElement::word(&inv_nu2 * &QScalar::q_pow(-1), &[KInv, KInv]))
                    .plus(UqElement::scalar(-QScalar::from_ratio(1, 4)))
            }
        }
    }
}

fn left_gen_on_gen(x: UqGen, g: Gen) -> Element {
    match (x, g) {
        (UqGen::E, Gen::A) => Element::b(),
        (UqGen::E, Gen::C) => Element::d(),
        (UqGen::F, Gen::AStar) => Element::c(),
        (UqGen::F, Gen::CStar) => Element::term(Monomial::gen(Gen::A), -QScalar::q_pow(-1)),
        (UqGen::E | UqGen::F, _) => Element::zero(),
        (UqGen::K, g) => Element::term(Monomial::gen(g), QScalar::s_pow(-g.degree() as i64)),
        (UqGen::KInv, g) => Element::term(Monomial::gen(g), QScalar::s_pow(g.degree() as i64)),
    }
}

/// Weight of `m ◁ K = q^{-w/2} m`.
fn right_weight(m: &Monomial) -> i64 {
    m.a as i64 - m.c as i64 + m.cs as i64
}

fn right_gen_on_gen(g: Gen, x: UqGen) -> Element {
    let mg = Monomial::gen(g);
    match (g, x) {
        (Gen::C, UqGen::E) => Element::a(),
        (Gen::AStar, UqGen::E) => Element::b(),
        (Gen::A, UqGen::F) => Element::c(),
        (Gen::CStar, UqGen::F) => Element::term(Monomial::gen(Gen::AStar), -QScalar::q_pow(-1)),
        (_, UqGen::E | UqGen::F) => Element::zero(),
        (_, UqGen::K) => Element::term(mg, QScalar::s_pow(-right_weight(&mg))),
        (_, UqGen::KInv) => Element::term(mg, QScalar::s_pow(right_weight(&mg))),
    }
}

fn left_on_mono(x: UqGen, m: &Monomial) -> Element {
    match x {
        UqGen::K => return Element::term(*m, QScalar::s_pow(-m.degree() as i64)),
        UqGen::KInv => return Element::term(*m, QScalar::s_pow(m.degree() as i64)),
        _ => {}
    }
    let Some((g, rest)) = m.peel() else {
        return Element::zero();
    };
    // X ▷ (g·rest) = (X ▷ g)(K ▷ rest) + (K^{-1} ▷ g)(X ▷ rest)
    let first = &left_gen_on_gen(x, g) * &Element::term(rest, QScalar::s_pow(-rest.degree() as i64));
    let second = &Element::term(Monomial::gen(g), QScalar::s_pow(g.degree() as i64)) * &left_on_mono(x, &rest);
    &first + &second
}

fn right_on_mono(m: &Monomial, x: UqGen) -> Element {
    match x {
        UqGen::K => return Element::term(*m, QScalar::s_pow(-right_weight(m))),
        UqGen::KInv => return Element::term(*m, QScalar::s_pow(right_weight(m))),
        _ => {}
    }
    let Some((g, rest)) = m.peel() else {
        return Element::zero();
    };
    // (g·rest) ◁ X = (g ◁ X)(rest ◁ K) + (g ◁ K^{-1})(rest ◁ X)
    let gm = Monomial::gen(g);
    let first = &right_gen_on_gen(g, x) * &Element::term(rest, QScalar::s_pow(-right_weight(&rest)));
    let second = &Element::term(gm, QScalar::s_pow(right_weight(&gm))) * &right_on_mono(&rest, x);
    &first + &second
}

pub fn act_gen_left(x: UqGen, e: &Element) -> Element {
    let mut acc = Element::zero();
    for (m, v) in e.terms() {
        acc = &acc + &left_on_mono(x, m).scale(v);
    }
    acc
}

pub fn act_gen_right(e: &Element, x: UqGen) -> Element {
    let mut acc = Element::zero();
    for (m, v) in e.terms() {
        acc = &acc + &right_on_mono(m, x).scale(v);
    }
    acc
}

/// `X ▷ e` for a word `X = X_1 ... X_n` (the rightmost letter acts first).
pub fn act_word_left(w: &[UqGen], e: &Element) -> Element {
    w.iter().rev().fold(e.clone(), |acc, &x| act_gen_left(x, &acc))
}

/// `e ◁ X` for a word `X = X_1 ... X_n` (the leftmost letter acts first).
pub fn act_word_right(e: &Element, w: &[UqGen]) -> Element {
    w.iter().fold(e.clone(), |acc, &x| act_gen_right(&acc, x))
}

pub fn act_left(x: &UqElement, e: &Element) -> Element {
    let mut acc = Element::zero();
    for (c, w) in &x.terms {
        acc = &acc + &act_word_left(w, e).scale(c);
    }
    acc
}

pub fn act_right(e: &Element, x: &UqElement) -> Element {
    let mut acc = Element::zero();
    for (c, w) in &x.terms {
        acc = &acc + &act_word_right(e, w).scale(c);
    }
    acc
}

pub fn lfield_apply(l: LField, e: &Element) -> Element {
    act_left(&l.expand(), e)
}

/// `(X, p) = ε(X ▷ p)`.
pub fn pairing(x: &UqElement, p: &Element) -> QScalar {
    act_left(x, p).counit()
}

fn pair_gen_gen(x: UqGen, g: Gen) -> QScalar {
    match (x, g) {
        (UqGen::K, Gen::A) | (UqGen::KInv, Gen::AStar) => QScalar::s_pow(-1),
        (UqGen::K, Gen::AStar) | (UqGen::KInv, Gen::A) => QScalar::s_pow(1),
        (UqGen::E, Gen::C) => QScalar::one(),
        (UqGen::F, Gen::CStar) => -QScalar::q_pow(-1),
        _ => QScalar::zero(),
    }
}

fn pair_gen_mono(x: UqGen, m: &Monomial) -> QScalar {
    let Some((g, rest)) = m.peel() else {
        return if matches!(x, UqGen::K | UqGen::KInv) { QScalar::one() } else { QScalar::zero() };
    };
    let mut acc = QScalar::zero();
    for (l, r) in x.coproduct().into_iter() {
        let (Some(l), Some(r)) = (l, r) else { continue };
        let a = pair_gen_gen(l, g);
        if a.is_zero() {
            continue;
        }
        acc = &acc + &(&a * &pair_gen_mono(r, &rest));
    }
    acc
}

/// Pairing computed from the generator table and the coproduct of `p`,
/// independent of the recursive actions.
pub fn pairing_from_table(w: &[UqGen], p: &Element) -> QScalar {
    match w {
        [] => p.counit(),
        [x] => p.terms().fold(QScalar::zero(), |acc, (m, v)| &acc + &(v * &pair_gen_mono(*x, m))),
        [x, rest @ ..] => {
            let mut acc = QScalar::zero();
            for ((m1, m2), v) in p.coproduct().terms() {
                let a = pair_gen_mono(*x, m1);
                if a.is_zero() {
                    continue;
                }
                acc = &acc + &(&(v * &a) * &pairing_from_table(rest, &Element::mono(*m2)));
            }
            acc
        }
    }
}

/// `X ▷ p = p_(1) (X, p_(2))`, through the coproduct and the table pairing.
pub fn left_from_table(x: UqGen, p: &Element) -> Element {
    let mut acc = Element::zero();
    for ((m1, m2), v) in p.coproduct().terms() {
        let c = pair_gen_mono(x, m2);
        if !c.is_zero() {
            acc = &acc + &Element::term(*m1, v * &c);
        }
    }
    acc
}

/// `p ◁ X = (X, p_(1)) p_(2)`.
pub fn right_from_table(p: &Element, x: UqGen) -> Element {
    let mut acc = Element::zero();
    for ((m1, m2), v) in p.coproduct().terms() {
        let c = pair_gen_mono(x, m1);
        if !c.is_zero() {
            acc = &acc + &Element::term(*m2, v * &c);
        }
    }
    acc
}

/// The nine generators of the right ideal defining the 4D+ calculus.
pub fn ideal_generators() -> Vec<(&'static str, Element)> {
    let (a, b, c, d) = (Element::a(), Element::b(), Element::c(), Element::d());
    let one = Element::one();
    let sc = |x: QScalar| Element::scalar(x);
    let z = z_element();
    let amd = &a - &d;
    let quad = &(&(&a * &a) + &(&sc(QScalar::q_pow(2)) * &(&d * &d)))
        - &(&sc(QScalar::one() + QScalar::q_pow(2)) * &(&(&a * &d) + &(&sc(QScalar::q_pow(-1)) * &(&b * &c))));
    let z_last = &(&(&sc(QScalar::q_pow(2)) * &a) + &d) - &(&sc(QScalar::q_pow(2) + QScalar::one()) * &one);
    vec![
        ("b^2", &b * &b),
        ("c^2", &c * &c),
        ("b(a-d)", &b * &amd),
        ("c(a-d)", &c * &amd),
        ("a^2+q^2d^2-(1+q^2)(ad+q^-1bc)", quad),
        ("zb", &z * &b),
        ("zc", &z * &c),
        ("z(a-d)", &z * &amd),
        ("z(q^2a+d-(q^2+1))", &z * &z_last),
    ]
}

/// `z = q^2 a + d - (q^3 + q^{-1})`
pub fn z_element() -> Element {
    let q2a = Element::a().scale(&QScalar::q_pow(2));
    &(&q2a + &Element::d()) - &Element::scalar(QScalar::q_pow(3) + QScalar::q_pow(-1))
}

/// `(L, g·m) = 0` for every tangent vector, ideal generator and monomial of length `<= max_deg`.
pub fn verify_tangent_vanishing(max_deg: u32) -> Report {
    let mut r = Report::new("tangent-vanishing").with_config("deg", max_deg);
    let monos = Monomial::all_up_to(max_deg);
    let gens = ideal_generators();
    for l in LField::TANGENT {
        let lx = l.expand();
        for (name, g) in &gens {
            let mut witness = None;
            for m in &monos {
                let v = pairing(&lx, &(g * &Element::mono(*m)));
                if !v.is_zero() {
                    witness = Some(format!("m = {}: {}", m.render(), v.render()));
                    break;
                }
            }
            r.push(Check::exact(
                format!("tangent.{}.{}", l.name(), name),
                format!("({}, g*m) = 0 for g = {name}, |m| <= {max_deg}", l.name()),
                witness,
            ));
        }
    }
    r
}

pub type Mat3 = [[QScalar; 3]; 3];

/// Action matrices on the basis (x_1, x_0, x_{-1}); column k is the image of basis vector k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spin1Constants {
    pub e: Mat3,
    pub f: Mat3,
    pub k: Mat3,
    pub k_inv: Mat3,
    pub casimir: Mat3,
    pub d0: Mat3,
}

pub fn spin1_basis() -> [Element; 3] {
    [Element::x_plus(), Element::x_zero(), Element::x_minus()]
}

/// Coordinates of `x` in the spin-1 basis, or the remainder if `x` leaves the span.
pub fn spin1_coords(x: &Element) -> Result<[QScalar; 3], Element> {
    let basis = spin1_basis();
    let mut coords: [QScalar; 3] = Default::default();
    let mut rest = x.clone();
    for (k, v) in basis.iter().enumerate() {
        // each basis vector is a single PBW monomial
        let (m, c) = v.terms().next().expect("nonzero basis vector");
        let a = rest.coeff(m);
        if !a.is_zero() {
            let t = a.div(c).expect("nonzero coefficient");
            rest = &rest - &v.scale(&t);
            coords[k] = t;
        }
    }
    if rest.is_zero() {
        Ok(coords)
    } else {
        Err(rest)
    }
}

fn matrix_of(label: &str, f: impl Fn(&Element) -> Element) -> Result<Mat3, SymmetryError> {
    let mut m: Mat3 = Default::default();
    for (k, v) in spin1_basis().iter().enumerate() {
        let col = spin1_coords(&f(v)).map_err(|rem| SymmetryError::ClosureViolation {
            action: label.to_string(),
            remainder: rem.render(),
        })?;
        for (i, c) in col.into_iter().enumerate() {
            m[i][k] = c;
        }
    }
    Ok(m)
}

/// Exact action matrices on span{x_1, x_0, x_{-1}}.
///
/// E, F, K^{±1} act from the right (the left action of E, F shifts degree by ∓2);
/// the Casimir and D_0 act from the left.
pub fn spin1_structure_constants() -> Result<Spin1Constants, SymmetryError> {
    Ok(Spin1Constants {
        e: matrix_of("right E", |v| act_gen_right(v, UqGen::E))?,
        f: matrix_of("right F", |v| act_gen_right(v, UqGen::F))?,
        k: matrix_of("right K", |v| act_gen_right(v, UqGen::K))?,
        k_inv: matrix_of("right K^-1", |v| act_gen_right(v, UqGen::KInv))?,
        casimir: matrix_of("left Cq", |v| lfield_apply(LField::Casimir, v))?,
        d0: matrix_of("left D0", |v| lfield_apply(LField::DZero, v))?,
    })
}

/// Whether the left action of a generator preserves the spin-1 span.
pub fn left_spin1_closure(x: UqGen) -> Result<Mat3, SymmetryError> {
    matrix_of(&format!("left {x}"), |v| act_gen_left(x, v))
}

fn first_nonzero(monos: &[Monomial], f: impl Fn(&Monomial) -> Element) -> Option<String> {
    monos.iter().find_map(|m| {
        let r = f(m);
        (!r.is_zero()).then(|| format!("m = {}: {}", m.render(), r.render()))
    })
}

/// Exact verification of the actions, pairing and tangent space up to monomial length `max_deg`.
pub fn verify_symmetries(max_deg: u32) -> Report {
    let mut r = Report::new("symmetries").with_config("deg", max_deg);
    let monos = Monomial::all_up_to(max_deg);
    let small = Monomial::all_up_to(2.min(max_deg));
    let q = QScalar::q;
    let inv_nu = nu().inv().expect("nu is nonzero");
    use UqGen::*;

    type Side = fn(&[UqGen], &Element) -> Element;
    let sides: [(&str, Side); 2] = [
        ("left", |w, e| act_word_left(w, e)),
        // right action of the word read as an algebra element: p ◁ (XY) = (p ◁ X) ◁ Y
        ("right", |w, e| act_word_right(e, w)),
    ];
    for (side, act) in sides {
        let rels: [(&str, Box<dyn Fn(&Element) -> Element>); 5] = [
            ("KE=qEK", Box::new(|p| &act(&[K, E], p) - &act(&[E, K], p).scale(&q()))),
            ("KF=q^-1FK", Box::new(|p| &act(&[K, F], p) - &act(&[F, K], p).scale(&QScalar::q_pow(-1)))),
            ("KK^-1=1", Box::new(|p| &act(&[K, KInv], p) - p)),
            (
                "[E,F]=(K^2-K^-2)/nu",
                Box::new(|p| {
                    let lhs = &act(&[E, F], p) - &act(&[F, E], p);
                    let rhs = &act(&[K, K], p) - &act(&[KInv, KInv], p);
                    &lhs - &rhs.scale(&inv_nu)
                }),
            ),
            ("K^-1E=q^-1EK^-1", Box::new(|p| &act(&[KInv, E], p) - &act(&[E, KInv], p).scale(&QScalar::q_pow(-1)))),
        ];
        for (name, f) in rels {
            r.push(Check::exact(
                format!("uq.{side}.{name}"),
                format!("{name} as operators of the {side} action on monomials of length <= {max_deg}"),
                first_nonzero(&monos, |m| f(&Element::mono(*m))),
            ));
        }
    }

    for x in UqGen::ALL {
        let witness = small.iter().find_map(|p| {
            small.iter().find_map(|qm| {
                let (pe, qe) = (Element::mono(*p), Element::mono(*qm));
                let lhs = act_gen_left(x, &(&pe * &qe));
                let mut rhs = Element::zero();
                for (l, rr) in x.coproduct() {
                    let (Some(l), Some(rr)) = (l, rr) else { continue };
                    rhs = &rhs + &(&act_gen_left(l, &pe) * &act_gen_left(rr, &qe));
                }
                let d = &lhs - &rhs;
                (!d.is_zero()).then(|| format!("p = {}, q = {}: {}", p.render(), qm.render(), d.render()))
            })
        });
        r.push(Check::exact(
            format!("module-algebra.{x}"),
            format!("{x}▷(pq) = ({x}_(1)▷p)({x}_(2)▷q) on monomial pairs of length <= 2"),
            witness,
        ));

        let (c, sx) = x.antipode_star();
        r.push(Check::exact(
            format!("star-compat.{x}"),
            format!("{x}▷p* = ((S({x}))*▷p)*"),
            first_nonzero(&monos, |m| {
                let p = Element::mono(*m);
                &act_gen_left(x, &p.star()) - &act_gen_left(sx, &p).scale(&c).star()
            }),
        ));

        r.push(Check::exact(
            format!("pairing-route.left.{x}"),
            format!("recursive {x}▷p equals p_(1)({x}, p_(2)) from the generator table"),
            first_nonzero(&monos, |m| {
                let p = Element::mono(*m);
                &act_gen_left(x, &p) - &left_from_table(x, &p)
            }),
        ));
        r.push(Check::exact(
            format!("pairing-route.right.{x}"),
            format!("recursive p◁{x} equals ({x}, p_(1))p_(2) from the generator table"),
            first_nonzero(&monos, |m| {
                let p = Element::mono(*m);
                &act_gen_right(&p, x) - &right_from_table(&p, x)
            }),
        ));

        for y in UqGen::ALL {
            r.push(Check::exact(
                format!("commute.{x}.{y}"),
                format!("({x}▷p)◁{y} = {x}▷(p◁{y})"),
                first_nonzero(&small, |m| {
                    let p = Element::mono(*m);
                    &act_gen_right(&act_gen_left(x, &p), y) - &act_gen_left(x, &act_gen_right(&p, y))
                }),
            ));
        }
    }

    for (x, shift) in [(E, -2), (F, 2), (K, 0), (KInv, 0)] {
        let bad = monos.iter().find(|m| {
            let img = act_gen_left(x, &Element::mono(**m));
            !img.is_zero() && img.degree() != Ok(m.degree() + shift)
        });
        r.push(Check::exact(
            format!("degree-shift.{x}"),
            format!("{x}▷ maps L_n into L_(n{:+})", -shift),
            bad.map(|m| m.render()),
        ));
    }

    let two_words = [vec![E, F], vec![F, K], vec![KInv, E], vec![K, K]];
    for w in &two_words {
        let label: Vec<String> = w.iter().map(|g| g.to_string()).collect();
        let label = label.join("");
        let bad = monos.iter().find_map(|m| {
            let p = Element::mono(*m);
            let a = pairing(&UqElement::word(QScalar::one(), w), &p);
            let b = pairing_from_table(w, &p);
            (a != b).then(|| format!("m = {}: {} vs {}", m.render(), a.render(), b.render()))
        });
        r.push(Check::exact(
            format!("pairing.{label}"),
            format!("ε({label}▷p) equals (X_1⊗X_2, Δp) from the generator table"),
            bad,
        ));
    }

    let half = qnum(HalfInt::from_twice(1));
    let shift = &QScalar::from_ratio(1, 4) - &(&half * &half);
    let nu2 = &nu() * &nu();
    r.push(Check::exact(
        "casimir.l-fields",
        "ν²(C_q + 1/4 - [1/2]²) = qL_0 + q^-1 L_z on monomials",
        first_nonzero(&monos, |m| {
            let p = Element::mono(*m);
            let lhs = (&lfield_apply(LField::Casimir, &p) + &p.scale(&shift)).scale(&nu2);
            let rhs = &lfield_apply(LField::LZero, &p).scale(&q()) + &lfield_apply(LField::Lz, &p).scale(&QScalar::q_pow(-1));
            &lhs - &rhs
        }),
    ));
    r.push(Check::exact(
        "casimir.central",
        "C_q commutes with E, F, K in the left action",
        first_nonzero(&small, |m| {
            let p = Element::mono(*m);
            let mut acc = Element::zero();
            for x in [E, F, K] {
                let a = act_gen_left(x, &lfield_apply(LField::Casimir, &p));
                let b = lfield_apply(LField::Casimir, &act_gen_left(x, &p));
                acc = &acc + &(&a - &b);
            }
            acc
        }),
    ));

    let sphere = [Element::b_plus(), Element::b_zero(), Element::b_minus(), Element::b_zero().pow(2)];
    let lz_bad = sphere.iter().find_map(|p| {
        let v = lfield_apply(LField::Lz, p);
        (!v.is_zero()).then(|| p.render())
    });
    r.push(Check::exact("lz.sphere", "L_z annihilates the sphere generators", lz_bad));

    match spin1_structure_constants() {
        Ok(sc) => {
            let cq = &(&qnum(HalfInt::from_twice(3)) * &qnum(HalfInt::from_twice(3))) - &QScalar::from_ratio(1, 4);
            let off = (0..3).flat_map(|i| (0..3).map(move |k| (i, k))).find(|&(i, k)| {
                let expect = if i == k { cq.clone() } else { QScalar::zero() };
                sc.casimir[i][k] != expect
            });
            r.push(Check::exact(
                "spin1.casimir",
                "C_q acts on span{x_1, x_0, x_-1} as [3/2]^2 - 1/4",
                off.map(|(i, k)| format!("entry ({i},{k}) = {}", sc.casimir[i][k].render())),
            ));
            r.push(Check::exact("spin1.closure", "right E, F, K^±1 and left C_q, D_0 preserve the spin-1 span", None));
        }
        Err(e) => r.push(Check::exact("spin1.closure", "spin-1 span closure", Some(e.to_string()))),
    }

    let tangent = verify_tangent_vanishing(3.min(max_deg));
    r.absorb("", tangent);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::mu;

    fn s(k: i64) -> QScalar {
        QScalar::s_pow(k)
    }

    #[test]
    fn generator_table() {
        assert_eq!(act_gen_left(UqGen::E, &Element::a()), Element::b());
        assert_eq!(act_gen_left(UqGen::E, &Element::c()), Element::d());
        assert_eq!(act_gen_left(UqGen::F, &Element::b()), Element::a());
        assert_eq!(act_gen_left(UqGen::F, &Element::d()), Element::c());
        assert!(act_gen_left(UqGen::F, &Element::a()).is_zero());
        assert_eq!(act_gen_left(UqGen::K, &Element::c()), Element::c().scale(&s(-1)));
    }

    #[test]
    fn coproduct_rule_on_ac() {
        let ac = &Element::a() * &Element::c();
        let expect = &(&Element::b() * &Element::c()).scale(&s(-1)) + &(&Element::a() * &Element::d()).scale(&s(1));
        assert_eq!(act_gen_left(UqGen::E, &ac), expect);
    }

    #[test]
    fn right_action_examples() {
        assert_eq!(act_gen_right(&Element::a(), UqGen::K), Element::a().scale(&s(-1)));
        assert!(act_gen_right(&Element::one(), UqGen::E).is_zero());
        let ac = &Element::a() * &Element::c();
        assert_eq!(act_gen_right(&ac, UqGen::K), right_from_table(&ac, UqGen::K));
        assert_eq!(act_gen_right(&ac, UqGen::K), ac);
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&UqElement::gen(UqGen::K), &Element::a()), s(-1));
        assert_eq!(pairing(&UqElement::gen(UqGen::E), &Element::c()), QScalar::one());
        assert_eq!(pairing(&UqElement::gen(UqGen::F), &Element::b()), QScalar::one());
        assert!(pairing(&UqElement::scalar(QScalar::one()), &Element::b_zero()).is_zero());
    }

    #[test]
    fn lfield_examples() {
        assert!(lfield_apply(LField::Lz, &Element::b_zero()).is_zero());
        let x = Element::x_zero();
        let c = &(&qnum(HalfInt::from_twice(3)) * &qnum(HalfInt::from_twice(3))) - &QScalar::from_ratio(1, 4);
        assert_eq!(lfield_apply(LField::Casimir, &x), x.scale(&c));
        // x_0 - 1 carries a spin-0 component: C_q▷(x_0 - 1) = c (x_0 - 1) + μ
        let y = &x - &Element::one();
        let expect = &y.scale(&c) + &Element::scalar(mu());
        assert_eq!(lfield_apply(LField::Casimir, &y), expect);
    }

    #[test]
    fn spin1_golden_values() {
        let sc = spin1_structure_constants().unwrap();
        let q = QScalar::q_pow;
        let z = QScalar::zero;
        let one = QScalar::one;
        assert_eq!(sc.e, [[z(), z(), z()], [-(one() + q(2)), z(), z()], [z(), -q(1), z()]]);
        assert_eq!(sc.f, [[z(), -q(-1), z()], [z(), z(), -(one() + q(-2))], [z(), z(), z()]]);
        assert_eq!(sc.k, [[q(1), z(), z()], [z(), one(), z()], [z(), z(), q(-1)]]);
        let d = &(&(&q(-4) - &q(-2)) - &one()) + &q(2);
        assert_eq!(sc.d0, [[d.clone(), z(), z()], [z(), d.clone(), z()], [z(), z(), d]]);
        // D_0 eigenvalue on spin 1: q^-1 ν² ([3/2]² - [1/2]²)
        let h = |t| qnum(HalfInt::from_twice(t));
        let expect = &(&(&nu() * &nu()) * &q(-1)) * &(&(&h(3) * &h(3)) - &(&h(1) * &h(1)));
        assert_eq!(sc.d0[0][0], expect);
    }

    #[test]
    fn left_e_leaves_the_spin1_span() {
        assert!(matches!(left_spin1_closure(UqGen::E), Err(SymmetryError::ClosureViolation { .. })));
        assert!(left_spin1_closure(UqGen::K).is_ok());
    }

    #[test]
    fn tangent_vanishing_at_degree_one() {
        let r = verify_tangent_vanishing(1);
        assert!(r.all_passed(), "{}", r.to_text());
        assert_eq!(r.checks.len(), 36);
    }
}
