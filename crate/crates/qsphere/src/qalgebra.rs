//! Normal forms in A[SU_q(2)] over the PBW basis `a^k c^l c*^m` / `a*^k c^l c*^m`,
//! the Hopf *-structure, the Z-grading, and the projection to A[U(1)].
//!
//! Rewriting rules: `ac = qca`, `ac* = qc*a`, `cc* = c*c`,
//! `aa* = 1 - q^2 cc*`, `a*a = 1 - c*c`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::report::{Check, Report};
use crate::scalars::{mu, QScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("element is not homogeneous (degrees {0:?})")]
    Inhomogeneous(Vec<i32>),
    #[error("the zero element has no degree")]
    ZeroDegree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    A,
    AStar,
    C,
    CStar,
}

impl Gen {
    pub const ALL: [Gen; 4] = [Gen::A, Gen::AStar, Gen::C, Gen::CStar];

    pub fn degree(self) -> i32 {
        match self {
            Gen::A | Gen::C => 1,
            Gen::AStar | Gen::CStar => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gen::A => "a",
            Gen::AStar => "a*",
            Gen::C => "c",
            Gen::CStar => "c*",
        }
    }
}

/// `a^{a} c^{c} c*^{cs}`, with a negative `a` meaning a power of `a*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub a: i32,
    pub c: u32,
    pub cs: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { a: 0, c: 0, cs: 0 };

    pub const fn new(a: i32, c: u32, cs: u32) -> Self {
        Monomial { a, c, cs }
    }

    pub fn gen(g: Gen) -> Self {
        match g {
            Gen::A => Monomial::new(1, 0, 0),
            Gen::AStar => Monomial::new(-1, 0, 0),
            Gen::C => Monomial::new(0, 1, 0),
            Gen::CStar => Monomial::new(0, 0, 1),
        }
    }

    pub fn degree(&self) -> i32 {
        self.a + self.c as i32 - self.cs as i32
    }

    /// Number of generator letters.
    pub fn length(&self) -> u32 {
        self.a.unsigned_abs() + self.c + self.cs
    }

    /// No `c` or `c*` letters; these map to `t^a` under the projection to A[U(1)].
    pub fn is_diagonal(&self) -> bool {
        self.c == 0 && self.cs == 0
    }

    /// Split off the leftmost letter: `self = g * rest` exactly.
    pub fn peel(&self) -> Option<(Gen, Monomial)> {
        if self.a > 0 {
            Some((Gen::A, Monomial::new(self.a - 1, self.c, self.cs)))
        } else if self.a < 0 {
            Some((Gen::AStar, Monomial::new(self.a + 1, self.c, self.cs)))
        } else if self.c > 0 {
            Some((Gen::C, Monomial::new(0, self.c - 1, self.cs)))
        } else if self.cs > 0 {
            Some((Gen::CStar, Monomial::new(0, 0, self.cs - 1)))
        } else {
            None
        }
    }

    /// All monomials with at most `max_len` letters.
    pub fn all_up_to(max_len: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for len in 0..=max_len {
            for a in -(len as i32)..=(len as i32) {
                let rest = len - a.unsigned_abs();
                for c in 0..=rest {
                    out.push(Monomial::new(a, c, rest - c));
                }
            }
        }
        out
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        let pw = |s: &str, k: u32| if k == 1 { s.to_string() } else { format!("{s}^{k}") };
        if self.a > 0 {
            parts.push(pw("a", self.a as u32));
        } else if self.a < 0 {
            parts.push(pw("a*", self.a.unsigned_abs()));
        }
        if self.c > 0 {
            parts.push(pw("c", self.c));
        }
        if self.cs > 0 {
            parts.push(pw("c*", self.cs));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Coefficients of `Π_e (1 - q^e x)` as a polynomial in `x`.
fn x_product(exps: impl Iterator<Item = i64>) -> Vec<QScalar> {
    let mut poly = vec![QScalar::one()];
    for e in exps {
        let f = -QScalar::q_pow(e);
        let mut next = poly.clone();
        next.push(QScalar::zero());
        for (p, c) in poly.iter().enumerate() {
            next[p + 1] = &next[p + 1] + &(&f * c);
        }
        poly = next;
    }
    poly
}

/// Product of two PBW monomials in normal form.
pub fn mono_mul(m1: &Monomial, m2: &Monomial) -> Vec<(Monomial, QScalar)> {
    // moving c^l c*^m of m1 past the a-part of m2
    let e = -((m1.c + m1.cs) as i64) * m2.a as i64;
    let (k1, k2) = (m1.a as i64, m2.a as i64);
    let (rem, xs) = if k1 >= 0 && k2 >= 0 || k1 <= 0 && k2 <= 0 {
        (k1 + k2, vec![QScalar::one()])
    } else if k1 > 0 {
        // a^k a*^n = a^{k-r} a*^{n-r} Π_{i<r} (1 - q^{2(n-i)} x)
        let (k, n) = (k1, -k2);
        let r = k.min(n);
        (k - n, x_product((0..r).map(|i| 2 * (n - i))))
    } else {
        // a*^k a^n = a*^{k-r} a^{n-r} Π_{i<r} (1 - q^{-2(n-1-i)} x)
        let (k, n) = (-k1, k2);
        let r = k.min(n);
        (n - k, x_product((0..r).map(|i| -2 * (n - 1 - i))))
    };
    let scale = QScalar::q_pow(e);
    xs.into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(p, c)| {
            let p = p as u32;
            (Monomial::new(rem as i32, m1.c + m2.c + p, m1.cs + m2.cs + p), &c * &scale)
        })
        .collect()
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, QScalar>, k: K, v: QScalar) {
    if v.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(k) {
        Entry::Vacant(e) => {
            e.insert(v);
        }
        Entry::Occupied(mut e) => {
            let s = e.get() + &v;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// Element of A[SU_q(2)] in PBW normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Element {
    terms: BTreeMap<Monomial, QScalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn one() -> Self {
        Element::scalar(QScalar::one())
    }

    pub fn scalar(c: QScalar) -> Self {
        Element::term(Monomial::ONE, c)
    }

    pub fn term(m: Monomial, c: QScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Element { terms }
    }

    pub fn mono(m: Monomial) -> Self {
        Element::term(m, QScalar::one())
    }

    pub fn gen(g: Gen) -> Self {
        Element::mono(Monomial::gen(g))
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, QScalar)>) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in it {
            accumulate(&mut terms, m, c);
        }
        Element { terms }
    }

    pub fn a() -> Self {
        Element::gen(Gen::A)
    }
    pub fn a_star() -> Self {
        Element::gen(Gen::AStar)
    }
    pub fn c() -> Self {
        Element::gen(Gen::C)
    }
    pub fn c_star() -> Self {
        Element::gen(Gen::CStar)
    }
    /// `b = -q c*`
    pub fn b() -> Self {
        Element::term(Monomial::gen(Gen::CStar), -QScalar::q())
    }
    /// `d = a*`
    pub fn d() -> Self {
        Element::a_star()
    }
    /// `b_+ = cd`
    pub fn b_plus() -> Self {
        &Element::c() * &Element::d()
    }
    /// `b_- = ab`
    pub fn b_minus() -> Self {
        &Element::a() * &Element::b()
    }
    /// `b_0 = bc`
    pub fn b_zero() -> Self {
        &Element::b() * &Element::c()
    }
    /// `x_1 = -q^{1/2} μ b_+`
    pub fn x_plus() -> Self {
        Element::b_plus().scale(&-(QScalar::s_pow(1) * mu()))
    }
    /// `x_0 = 1 + μ b_0`
    pub fn x_zero() -> Self {
        &Element::one() + &Element::b_zero().scale(&mu())
    }
    /// `x_{-1} = -q^{-3/2} μ b_-`
    pub fn x_minus() -> Self {
        Element::b_minus().scale(&-(QScalar::s_pow(-3) * mu()))
    }

    /// Normal form of a word of generator powers times a coefficient.
    pub fn normal_form(word: &[(Gen, u32)], coeff: QScalar) -> Self {
        let mut acc = Element::scalar(coeff);
        for &(g, p) in word {
            acc = &acc * &Element::gen(g).pow(p);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> QScalar {
        self.terms.get(m).cloned().unwrap_or_else(QScalar::zero)
    }

    pub fn scale(&self, c: &QScalar) -> Self {
        if c.is_zero() {
            return Element::zero();
        }
        Element { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Element::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Anti-linear, anti-multiplicative involution. Coefficients are real.
    pub fn star(&self) -> Self {
        // (a^k c^l c*^m)* = c^m c*^l a*^k = q^{(l+m)k} a*^k c^m c*^l
        Element::from_terms(self.terms.iter().map(|(m, v)| {
            let e = (m.c + m.cs) as i64 * m.a as i64;
            (Monomial::new(-m.a, m.cs, m.c), v * &QScalar::q_pow(e))
        }))
    }

    pub fn counit(&self) -> QScalar {
        self.terms
            .iter()
            .filter(|(m, _)| m.is_diagonal())
            .fold(QScalar::zero(), |acc, (_, v)| &acc + v)
    }

    /// Anti-algebra map with S(a) = a*, S(a*) = a, S(c) = -qc, S(c*) = -q^{-1}c*.
    pub fn antipode(&self) -> Self {
        // S(a^k c^l c*^m) = (-1)^{l+m} q^{l-m+(l+m)k} a*^k c^l c*^m
        Element::from_terms(self.terms.iter().map(|(m, v)| {
            let (l, n) = (m.c as i64, m.cs as i64);
            let mut f = QScalar::q_pow(l - n + (l + n) * m.a as i64);
            if (l + n) % 2 == 1 {
                f = -f;
            }
            (Monomial::new(-m.a, m.c, m.cs), v * &f)
        }))
    }

    pub fn coproduct(&self) -> TensorElement {
        let mut out = TensorElement::zero();
        for (m, v) in &self.terms {
            out = &out + &mono_coproduct(m).scale(v);
        }
        out
    }

    pub fn degrees(&self) -> Vec<i32> {
        let mut d: Vec<i32> = self.terms.keys().map(|m| m.degree()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn degree(&self) -> Result<i32, AlgebraError> {
        match self.degrees().as_slice() {
            [] => Err(AlgebraError::ZeroDegree),
            [d] => Ok(*d),
            ds => Err(AlgebraError::Inhomogeneous(ds.to_vec())),
        }
    }

    /// Component of degree `n`.
    pub fn degree_part(&self, n: i32) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == n)
                .map(|(m, v)| (*m, v.clone()))
                .collect(),
        }
    }

    /// Right leg projected to A[U(1)] of the right adjoint coaction
    /// `p ↦ p_(2) ⊗ S(p_(1)) p_(3)`.
    pub fn ad_r_projected(&self) -> CircleTensor {
        let mut out = CircleTensor::default();
        for (m, v) in &self.terms {
            for ((m1, rest), c1) in &mono_coproduct(m).terms {
                if !m1.is_diagonal() {
                    continue;
                }
                for ((m2, m3), c2) in &mono_coproduct(rest).terms {
                    if !m3.is_diagonal() {
                        continue;
                    }
                    let c = &(v * c1) * c2;
                    accumulate(&mut out.terms, (*m2, m3.a - m1.a), c);
                }
            }
        }
        out
    }

    pub fn render(&self) -> String {
        render_sum(self.terms.iter().map(|(m, v)| (v, m.render())))
    }
}

/// `x ∈ L_n` iff `deg x = -n`; zero lies in every line bundle.
pub fn in_line_bundle(x: &Element, n: i32) -> bool {
    x.is_zero() || x.degree() == Ok(-n)
}

pub(crate) fn render_sum<'a>(terms: impl Iterator<Item = (&'a QScalar, String)>) -> String {
    let mut out = String::new();
    for (i, (c, body)) in terms.enumerate() {
        let (neg, coeff) = coeff_prefix(c);
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        match (coeff.is_empty(), body == "1") {
            (true, _) => out.push_str(&body),
            (false, true) => out.push_str(&coeff),
            (false, false) => {
                out.push_str(&coeff);
                out.push('*');
                out.push_str(&body);
            }
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Sign and rendered magnitude of a coefficient (empty for 1).
fn coeff_prefix(c: &QScalar) -> (bool, String) {
    if c.is_compound() {
        return (false, format!("({})", c.render()));
    }
    let r = c.render();
    let (neg, body) = match r.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, r),
    };
    if body == "1" {
        (neg, String::new())
    } else {
        (neg, body)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<'a> Add<&'a Element> for &'a Element {
    type Output = Element;
    fn add(self, o: &Element) -> Element {
        let mut terms = self.terms.clone();
        for (m, v) in &o.terms {
            accumulate(&mut terms, *m, v.clone());
        }
        Element { terms }
    }
}

impl<'a> Sub<&'a Element> for &'a Element {
    type Output = Element;
    fn sub(self, o: &Element) -> Element {
        let mut terms = self.terms.clone();
        for (m, v) in &o.terms {
            accumulate(&mut terms, *m, -v);
        }
        Element { terms }
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element { terms: self.terms.iter().map(|(m, v)| (*m, -v)).collect() }
    }
}

impl<'a> Mul<&'a Element> for &'a Element {
    type Output = Element;
    fn mul(self, o: &Element) -> Element {
        let mut terms = BTreeMap::new();
        for (m1, v1) in &self.terms {
            for (m2, v2) in &o.terms {
                let c = v1 * v2;
                for (m, f) in mono_mul(m1, m2) {
                    accumulate(&mut terms, m, &f * &c);
                }
            }
        }
        Element { terms }
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}
owned_ops!(Element);

fn gen_coproduct(g: Gen) -> TensorElement {
    let m = |g| Monomial::gen(g);
    let mq = -QScalar::q();
    let one = QScalar::one();
    let terms = match g {
        Gen::A => vec![((m(Gen::A), m(Gen::A)), one), ((m(Gen::CStar), m(Gen::C)), mq)],
        Gen::C => vec![((m(Gen::C), m(Gen::A)), one.clone()), ((m(Gen::AStar), m(Gen::C)), one)],
        Gen::AStar => vec![((m(Gen::AStar), m(Gen::AStar)), one), ((m(Gen::C), m(Gen::CStar)), mq)],
        Gen::CStar => {
            vec![((m(Gen::CStar), m(Gen::AStar)), one.clone()), ((m(Gen::A), m(Gen::CStar)), one)]
        }
    };
    TensorElement::from_terms(terms)
}

fn mono_coproduct(m: &Monomial) -> TensorElement {
    match m.peel() {
        None => TensorElement::one(),
        Some((g, rest)) => &gen_coproduct(g) * &mono_coproduct(&rest),
    }
}

/// Element of A ⊗ A, collected over pairs of PBW monomials.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TensorElement {
    terms: BTreeMap<(Monomial, Monomial), QScalar>,
}

impl TensorElement {
    pub fn zero() -> Self {
        TensorElement::default()
    }

    pub fn one() -> Self {
        TensorElement::from_terms([((Monomial::ONE, Monomial::ONE), QScalar::one())])
    }

    pub fn from_terms(it: impl IntoIterator<Item = ((Monomial, Monomial), QScalar)>) -> Self {
        let mut terms = BTreeMap::new();
        for (k, v) in it {
            accumulate(&mut terms, k, v);
        }
        TensorElement { terms }
    }

    /// `x ⊗ y`
    pub fn pure(x: &Element, y: &Element) -> Self {
        let mut terms = BTreeMap::new();
        for (m1, v1) in x.terms() {
            for (m2, v2) in y.terms() {
                accumulate(&mut terms, (*m1, *m2), v1 * v2);
            }
        }
        TensorElement { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &QScalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &QScalar) -> Self {
        if c.is_zero() {
            return TensorElement::zero();
        }
        TensorElement { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// Apply linear maps to each leg and multiply the results: `Σ f(x) g(y)`.
    pub fn contract(&self, f: impl Fn(&Element) -> Element, g: impl Fn(&Element) -> Element) -> Element {
        let mut acc = Element::zero();
        for ((m1, m2), v) in &self.terms {
            let x = f(&Element::mono(*m1));
            let y = g(&Element::mono(*m2));
            acc = &acc + &(&x * &y).scale(v);
        }
        acc
    }

    pub fn render(&self) -> String {
        render_sum(self.terms.iter().map(|(k, v)| (v, format!("{}⊗{}", k.0.render(), k.1.render()))))
    }
}

impl<'a> Add<&'a TensorElement> for &'a TensorElement {
    type Output = TensorElement;
    fn add(self, o: &TensorElement) -> TensorElement {
        let mut terms = self.terms.clone();
        for (k, v) in &o.terms {
            accumulate(&mut terms, *k, v.clone());
        }
        TensorElement { terms }
    }
}

impl<'a> Sub<&'a TensorElement> for &'a TensorElement {
    type Output = TensorElement;
    fn sub(self, o: &TensorElement) -> TensorElement {
        self + &o.scale(&-QScalar::one())
    }
}

impl<'a> Mul<&'a TensorElement> for &'a TensorElement {
    type Output = TensorElement;
    fn mul(self, o: &TensorElement) -> TensorElement {
        let mut terms = BTreeMap::new();
        for ((x1, y1), v1) in &self.terms {
            for ((x2, y2), v2) in &o.terms {
                let c = v1 * v2;
                let left = mono_mul(x1, x2);
                let right = mono_mul(y1, y2);
                for (ml, cl) in &left {
                    let cc = &c * cl;
                    for (mr, cr) in &right {
                        accumulate(&mut terms, (*ml, *mr), &cc * cr);
                    }
                }
            }
        }
        TensorElement { terms }
    }
}

/// Three-fold tensors, used for coassociativity.
pub type Tensor3 = BTreeMap<(Monomial, Monomial, Monomial), QScalar>;

/// `(Δ ⊗ id) Δ(x)`
pub fn coproduct_left_iterated(x: &Element) -> Tensor3 {
    let mut out = Tensor3::new();
    for ((m1, m2), v) in x.coproduct().terms() {
        for ((l, r), w) in mono_coproduct(m1).terms() {
            accumulate(&mut out, (*l, *r, *m2), v * w);
        }
    }
    out
}

/// `(id ⊗ Δ) Δ(x)`
pub fn coproduct_right_iterated(x: &Element) -> Tensor3 {
    let mut out = Tensor3::new();
    for ((m1, m2), v) in x.coproduct().terms() {
        for ((l, r), w) in mono_coproduct(m2).terms() {
            accumulate(&mut out, (*m1, *l, *r), v * w);
        }
    }
    out
}

/// Laurent polynomial in `t`, with `t* = t^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CircleElement {
    terms: BTreeMap<i32, QScalar>,
}

impl CircleElement {
    pub fn zero() -> Self {
        CircleElement::default()
    }

    pub fn one() -> Self {
        CircleElement::t_pow(0)
    }

    pub fn t_pow(k: i32) -> Self {
        CircleElement::from_terms([(k, QScalar::one())])
    }

    pub fn t() -> Self {
        CircleElement::t_pow(1)
    }

    pub fn t_star() -> Self {
        CircleElement::t_pow(-1)
    }

    pub fn scalar(c: QScalar) -> Self {
        CircleElement::from_terms([(0, c)])
    }

    pub fn from_terms(it: impl IntoIterator<Item = (i32, QScalar)>) -> Self {
        let mut terms = BTreeMap::new();
        for (k, v) in it {
            accumulate(&mut terms, k, v);
        }
        CircleElement { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i32, &QScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: i32) -> QScalar {
        self.terms.get(&k).cloned().unwrap_or_else(QScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &QScalar) -> Self {
        CircleElement::from_terms(self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn counit(&self) -> QScalar {
        self.terms.values().fold(QScalar::zero(), |acc, v| &acc + v)
    }

    pub fn star(&self) -> Self {
        CircleElement::from_terms(self.terms.iter().map(|(k, v)| (-*k, v.clone())))
    }

    /// Lowest and highest exponent present.
    pub fn support(&self) -> Option<(i32, i32)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }

    pub fn render(&self) -> String {
        render_sum(self.terms.iter().map(|(k, v)| {
            let body = match *k {
                0 => "1".to_string(),
                1 => "t".to_string(),
                -1 => "t*".to_string(),
                k if k > 0 => format!("t^{k}"),
                k => format!("t*^{}", -k),
            };
            (v, body)
        }))
    }
}

impl<'a> Add<&'a CircleElement> for &'a CircleElement {
    type Output = CircleElement;
    fn add(self, o: &CircleElement) -> CircleElement {
        CircleElement::from_terms(self.terms.iter().chain(o.terms.iter()).map(|(k, v)| (*k, v.clone())))
    }
}

impl<'a> Sub<&'a CircleElement> for &'a CircleElement {
    type Output = CircleElement;
    fn sub(self, o: &CircleElement) -> CircleElement {
        self + &o.scale(&-QScalar::one())
    }
}

impl<'a> Mul<&'a CircleElement> for &'a CircleElement {
    type Output = CircleElement;
    fn mul(self, o: &CircleElement) -> CircleElement {
        CircleElement::from_terms(
            self.terms
                .iter()
                .flat_map(|(k1, v1)| o.terms.iter().map(move |(k2, v2)| (k1 + k2, v1 * v2))),
        )
    }
}
impl Neg for &CircleElement {
    type Output = CircleElement;
    fn neg(self) -> CircleElement {
        self.scale(&-QScalar::one())
    }
}
owned_ops!(CircleElement);

impl fmt::Display for CircleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Canonical Hopf projection A[SU_q(2)] → A[U(1)]: a ↦ t, a* ↦ t*, c, c* ↦ 0.
pub fn project_circle(x: &Element) -> CircleElement {
    CircleElement::from_terms(x.terms().filter(|(m, _)| m.is_diagonal()).map(|(m, v)| (m.a, v.clone())))
}

/// Image of the right adjoint coaction with the right leg in A[U(1)].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CircleTensor {
    terms: BTreeMap<(Monomial, i32), QScalar>,
}

impl CircleTensor {
    /// `x ⊗ t^k`
    pub fn pure(x: &Element, k: i32) -> Self {
        let mut terms = BTreeMap::new();
        for (m, v) in x.terms() {
            accumulate(&mut terms, (*m, k), v.clone());
        }
        CircleTensor { terms }
    }

    pub fn render(&self) -> String {
        render_sum(self.terms.iter().map(|((m, k), v)| (v, format!("{}⊗t^{}", m.render(), k))))
    }
}

fn first_witness<T>(items: &[T], f: impl Fn(&T) -> Option<String>) -> Option<String> {
    items.iter().find_map(f)
}

fn nonzero(label: String, e: Element) -> Option<String> {
    (!e.is_zero()).then(|| format!("{label}: {}", e.render()))
}

/// Exact checks of the relations, the Hopf axioms on monomials of length `<= max_deg`,
/// the grading, and the sphere relations.
pub fn verify_algebra(max_deg: u32) -> Report {
    let mut r = Report::new("algebra").with_config("deg", max_deg);
    let (a, a_s, c, c_s) = (Element::a(), Element::a_star(), Element::c(), Element::c_star());
    let qe = |k: i64| Element::scalar(QScalar::q_pow(k));
    let one = Element::one();

    let rels = [
        ("ac=qca", &(&a * &c) - &(&qe(1) * &(&c * &a))),
        ("ac*=qc*a", &(&a * &c_s) - &(&qe(1) * &(&c_s * &a))),
        ("cc*=c*c", &(&c * &c_s) - &(&c_s * &c)),
        ("aa*+q^2cc*=1", &(&(&a * &a_s) + &(&qe(2) * &(&c * &c_s))) - &one),
        ("a*a+c*c=1", &(&(&a_s * &a) + &(&c_s * &c)) - &one),
    ];
    for (name, e) in rels {
        r.push(Check::exact(format!("relation.{name}"), format!("{name} in normal form"), nonzero(name.into(), e)));
    }

    let small = Monomial::all_up_to(2);
    let small = small.as_slice();
    let triples: Vec<(Monomial, Monomial, Monomial)> =
        small.iter().flat_map(|x| small.iter().flat_map(move |y| small.iter().map(move |z| (*x, *y, *z)))).collect();
    r.push(Check::exact(
        "pbw.associativity",
        "(xy)z = x(yz) on monomials of length <= 2",
        first_witness(&triples, |(x, y, z)| {
            let (x, y, z) = (Element::mono(*x), Element::mono(*y), Element::mono(*z));
            nonzero(format!("{x}, {y}, {z}"), &(&(&x * &y) * &z) - &(&x * &(&y * &z)))
        }),
    ));

    let monos = Monomial::all_up_to(max_deg);
    let pairs: Vec<(Monomial, Monomial)> =
        small.iter().flat_map(|x| small.iter().map(move |y| (*x, *y))).collect();
    r.push(Check::exact(
        "star.involution",
        "(p*)* = p",
        first_witness(&monos, |m| {
            let p = Element::mono(*m);
            nonzero(m.render(), &p.star().star() - &p)
        }),
    ));
    r.push(Check::exact(
        "star.anti-multiplicative",
        "(pq)* = q* p* on monomials of length <= 2",
        first_witness(&pairs, |(x, y)| {
            let (x, y) = (Element::mono(*x), Element::mono(*y));
            nonzero(format!("{x}, {y}"), &(&x * &y).star() - &(&y.star() * &x.star()))
        }),
    ));

    let gens_delta = [
        ("a", TensorElement::from_terms([
            ((Monomial::gen(Gen::A), Monomial::gen(Gen::A)), QScalar::one()),
            ((Monomial::gen(Gen::CStar), Monomial::gen(Gen::C)), -QScalar::q()),
        ])),
        ("c", TensorElement::from_terms([
            ((Monomial::gen(Gen::C), Monomial::gen(Gen::A)), QScalar::one()),
            ((Monomial::gen(Gen::AStar), Monomial::gen(Gen::C)), QScalar::one()),
        ])),
    ];
    for (name, expect) in gens_delta {
        let got = Element::gen(if name == "a" { Gen::A } else { Gen::C }).coproduct();
        let d = &got - &expect;
        r.push(Check::exact(
            format!("coproduct.{name}"),
            format!("Δ({name}) on the generator"),
            (!d.is_zero()).then(|| d.render()),
        ));
    }

    r.push(Check::exact(
        "hopf.coassociativity",
        format!("(Δ⊗id)Δ = (id⊗Δ)Δ on monomials of length <= {max_deg}"),
        first_witness(&monos, |m| {
            let p = Element::mono(*m);
            (coproduct_left_iterated(&p) != coproduct_right_iterated(&p)).then(|| m.render())
        }),
    ));
    r.push(Check::exact(
        "hopf.counit",
        format!("(ε⊗id)Δ = id = (id⊗ε)Δ on monomials of length <= {max_deg}"),
        first_witness(&monos, |m| {
            let p = Element::mono(*m);
            let delta = p.coproduct();
            let eps = |x: &Element| Element::scalar(x.counit());
            let id = |x: &Element| x.clone();
            nonzero(format!("left, {}", m.render()), &delta.contract(eps, id) - &p)
                .or_else(|| nonzero(format!("right, {}", m.render()), &delta.contract(id, eps) - &p))
        }),
    ));
    r.push(Check::exact(
        "hopf.antipode",
        format!("m(S⊗id)Δ = ε1 = m(id⊗S)Δ on monomials of length <= {max_deg}"),
        first_witness(&monos, |m| {
            let p = Element::mono(*m);
            let delta = p.coproduct();
            let eps = Element::scalar(p.counit());
            let id = |x: &Element| x.clone();
            nonzero(format!("left, {}", m.render()), &delta.contract(|x| x.antipode(), id) - &eps)
                .or_else(|| nonzero(format!("right, {}", m.render()), &delta.contract(id, |x| x.antipode()) - &eps))
        }),
    ));
    r.push(Check::exact(
        "hopf.counit-multiplicative",
        "ε(pq) = ε(p)ε(q) on monomials of length <= 2",
        first_witness(&pairs, |(x, y)| {
            let (x, y) = (Element::mono(*x), Element::mono(*y));
            let d = &(&x * &y).counit() - &(&x.counit() * &y.counit());
            (!d.is_zero()).then(|| format!("{x}, {y}: {}", d.render()))
        }),
    ));
    r.push(Check::exact(
        "grading.additive",
        "deg(pq) = deg(p) + deg(q) on monomials of length <= 2",
        first_witness(&pairs, |(x, y)| {
            let prod = &Element::mono(*x) * &Element::mono(*y);
            (prod.degree() != Ok(x.degree() + y.degree())).then(|| format!("{}, {}", x.render(), y.render()))
        }),
    ));

    let (bp, b0, bm) = (Element::b_plus(), Element::b_zero(), Element::b_minus());
    let sphere = [
        ("b0b+=q^2b+b0", &(&b0 * &bp) - &(&qe(2) * &(&bp * &b0))),
        ("b0b-=q^-2b-b0", &(&b0 * &bm) - &(&qe(-2) * &(&bm * &b0))),
        (
            "q^-2b-b+=q^2b+b-+(1-q^2)b0",
            &(&qe(-2) * &(&bm * &bp)) - &(&(&qe(2) * &(&bp * &bm)) + &(&(&one - &qe(2)) * &b0)),
        ),
        ("b+b-=b0(1+q^-1b0)", &(&bp * &bm) - &(&b0 * &(&one + &(&qe(-1) * &b0)))),
    ];
    for (name, e) in sphere {
        r.push(Check::exact(format!("sphere.{name}"), format!("{name} in A[SU_q(2)]"), nonzero(name.into(), e)));
    }

    let (x1, x0, xm) = (Element::x_plus(), Element::x_zero(), Element::x_minus());
    let x0m1 = &x0 - &one;
    let m = Element::scalar(mu());
    let lhs_minus = &(&(&qe(2) * &x0) + &one) * &x0m1;
    let lhs_plus = &(&(&qe(-2) * &x0) + &one) * &x0m1;
    let xrels = [
        ("x-1(x0-1)=q^2(x0-1)x-1", &(&xm * &x0m1) - &(&qe(2) * &(&x0m1 * &xm)), None),
        ("x1(x0-1)=q^-2(x0-1)x1", &(&x1 * &x0m1) - &(&qe(-2) * &(&x0m1 * &x1)), None),
        ("(q^2x0+1)(x0-1)=mu.x-1x1", &lhs_minus - &(&m * &(&xm * &x1)), Some("the factor μ on the right is spurious")),
        ("(q^-2x0+1)(x0-1)=mu.x1x-1", &lhs_plus - &(&m * &(&x1 * &xm)), Some("the factor μ on the right is spurious")),
        ("(q^2x0+1)(x0-1)=x-1x1", &lhs_minus - &(&xm * &x1), None),
        ("(q^-2x0+1)(x0-1)=x1x-1", &lhs_plus - &(&x1 * &xm), None),
    ];
    for (name, e, erratum) in xrels {
        let mut ch = Check::exact(format!("x-relation.{name}"), format!("{name} in A[SU_q(2)]"), nonzero(name.into(), e));
        if let (false, Some(e)) = (ch.passed(), erratum) {
            ch = ch.with_erratum(e);
        }
        r.push(ch);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: i64) -> QScalar {
        QScalar::q_pow(k)
    }

    #[test]
    fn normal_form_examples() {
        let ca = Element::normal_form(&[(Gen::C, 1), (Gen::A, 1)], QScalar::one());
        assert_eq!(ca, Element::term(Monomial::new(1, 1, 0), q(-1)));
        let aas = Element::normal_form(&[(Gen::A, 1), (Gen::AStar, 1)], QScalar::one());
        let expect = Element::one() - Element::term(Monomial::new(0, 1, 1), q(2));
        assert_eq!(aas, expect);
        let csaa = Element::normal_form(&[(Gen::CStar, 1), (Gen::A, 2)], QScalar::one());
        assert_eq!(csaa, Element::term(Monomial::new(2, 0, 1), q(-2)));
    }

    #[test]
    fn defining_relations_hold() {
        let (a, a_s, c, c_s) = (Element::a(), Element::a_star(), Element::c(), Element::c_star());
        let qe = |k| Element::scalar(q(k));
        assert!((&a * &c - qe(1) * (&c * &a)).is_zero());
        assert!((&a * &c_s - qe(1) * (&c_s * &a)).is_zero());
        assert!((&c * &c_s - &c_s * &c).is_zero());
        assert!((&a * &a_s + qe(2) * (&c * &c_s) - Element::one()).is_zero());
        assert!((&a_s * &a + &c_s * &c - Element::one()).is_zero());
    }

    #[test]
    fn star_and_counit_examples() {
        assert_eq!(Element::a().star(), Element::a_star());
        let b0 = Element::b_zero();
        assert_eq!(b0, Element::term(Monomial::new(0, 1, 1), -q(1)));
        assert_eq!(b0.star(), b0);
        assert_eq!(Element::scalar(q(1)).star(), Element::scalar(q(1)));
        assert_eq!(Element::a().counit(), QScalar::one());
        assert!(b0.counit().is_zero());
        let e = Element::a().pow(3) + Element::scalar(QScalar::from_int(2)) * (Element::c() * Element::c_star());
        assert_eq!(e.counit(), QScalar::one());
    }

    #[test]
    fn coproduct_of_b_plus() {
        let bp = Element::b_plus();
        let c2 = Element::c().pow(2);
        let cd = Element::c() * Element::d();
        let d2 = Element::d().pow(2);
        let one_mu_b0 = Element::one() + Element::b_zero().scale(&mu());
        let expect = &(&TensorElement::pure(&c2, &Element::b_minus()) + &TensorElement::pure(&cd, &one_mu_b0))
            + &TensorElement::pure(&d2, &bp);
        assert_eq!(bp.coproduct(), expect);
        assert_eq!(Element::one().coproduct(), TensorElement::one());
    }

    #[test]
    fn antipode_examples() {
        assert_eq!(Element::c().antipode(), Element::term(Monomial::gen(Gen::C), -q(1)));
        assert_eq!(Element::one().antipode(), Element::one());
        let bp = Element::b_plus();
        let s = bp.coproduct().contract(|x| x.antipode(), |y| y.clone());
        assert!(s.is_zero());
    }

    #[test]
    fn degree_examples() {
        assert_eq!(Element::a().degree(), Ok(1));
        assert_eq!(Element::b_plus().degree(), Ok(0));
        let d2 = Element::d().pow(2);
        assert_eq!(d2.degree(), Ok(-2));
        assert!(in_line_bundle(&d2, 2));
        assert!(matches!((Element::a() + Element::d()).degree(), Err(AlgebraError::Inhomogeneous(_))));
    }

    #[test]
    fn ad_r_examples() {
        let c2 = Element::c().pow(2);
        assert_eq!(c2.ad_r_projected(), CircleTensor::pure(&c2, 4));
        let b2 = Element::b().pow(2);
        assert_eq!(b2.ad_r_projected(), CircleTensor::pure(&b2, -4));
        assert_eq!(Element::one().ad_r_projected(), CircleTensor::pure(&Element::one(), 0));
    }

    #[test]
    fn render_forms() {
        let e = Element::b_zero() + Element::one();
        assert_eq!(e.render(), "1 - q*c*c*");
        assert_eq!(Element::a_star().pow(2).render(), "a*^2");
    }
}
