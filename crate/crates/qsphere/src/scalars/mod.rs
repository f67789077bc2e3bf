//! Exact arithmetic in the rational function field Q(s), where s = q^{1/2},
//! together with q-numbers and evaluation at a numeric 0 < q < 1.
//!
//! Every [`QScalar`] is kept as `num / den` with `den` monic and
//! `gcd(num, den) = 1`, so structural equality is field equality.

pub mod linalg;
mod poly;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use poly::{rat_to_f64, Poly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at q = {0}")]
    DenominatorZero(f64),
    #[error("q = {0} is outside the open interval (0, 1)")]
    DomainError(f64),
    #[error("non-finite numeric value {0}")]
    NonFinite(f64),
}

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    pub twice: i64,
}

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn int(n: i64) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + o.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - o.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Element of Q(s), s = q^{1/2}, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QScalar {
    num: Poly,
    den: Poly,
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

/// Canonical form of `num / den`.
pub fn simplify(num: Poly, den: Poly) -> Result<QScalar, ScalarError> {
    if den.is_zero() {
        return Err(ScalarError::DivisionByZero);
    }
    Ok(QScalar::canonical(num, den))
}

impl QScalar {
    fn canonical(num: Poly, den: Poly) -> QScalar {
        if num.is_zero() {
            return QScalar::zero();
        }
        // strip the common power of s first; it is the common case
        let k = num.valuation().unwrap().min(den.valuation().unwrap());
        let (num, den) = if k > 0 {
            (num.shift_down(k), den.shift_down(k))
        } else {
            (num, den)
        };
        let (num, den) = if den.monomial_power().is_some() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.degree() == Some(0) {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let (lead, den) = den.monic();
        let num = if lead.is_one() { num } else { num.scale(&lead.recip()) };
        QScalar { num, den }
    }

    pub fn zero() -> Self {
        QScalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        QScalar { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(c: BigRational) -> Self {
        QScalar { num: Poly::constant(c), den: Poly::one() }
    }

    /// `s^k = q^{k/2}`
    pub fn s_pow(k: i64) -> Self {
        let one = BigRational::one();
        if k >= 0 {
            QScalar { num: Poly::monomial(one, k as usize), den: Poly::one() }
        } else {
            QScalar { num: Poly::one(), den: Poly::monomial(one, (-k) as usize) }
        }
    }

    /// `q^k`
    pub fn q_pow(k: i64) -> Self {
        Self::s_pow(2 * k)
    }

    /// `q^{x}` for a half-integer exponent.
    pub fn q_half(x: HalfInt) -> Self {
        Self::s_pow(x.twice)
    }

    pub fn q() -> Self {
        Self::q_pow(1)
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == Poly::one() && self.den == Poly::one()
    }

    /// Power of `s` in the denominator when it is a single monomial.
    fn den_power(&self) -> Option<usize> {
        self.den.monomial_power()
    }

    pub fn inv(&self) -> Result<QScalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(QScalar::canonical(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &QScalar) -> Result<QScalar, ScalarError> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<QScalar, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = QScalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn scale_rational(&self, c: &BigRational) -> QScalar {
        if c.is_zero() {
            return QScalar::zero();
        }
        QScalar { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Laurent expansion `Σ c_e s^e` when the denominator is a power of `s`.
    pub fn as_laurent(&self) -> Option<Vec<(i64, BigRational)>> {
        let k = self.den_power()? as i64;
        Some(
            self.num
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i64 - k, c.clone()))
                .collect(),
        )
    }

    /// The rational constant, if this scalar has no `s` dependence.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        (self.den == Poly::one() && self.num.degree() == Some(0)).then(|| self.num.coeffs()[0].clone())
    }

    pub fn eval(&self, q: f64) -> Result<f64, ScalarError> {
        eval_at(self, q)
    }

    /// Render as a Laurent expression in `q` (half powers as `q^(k/2)`).
    pub fn render(&self) -> String {
        if let Some(terms) = self.as_laurent() {
            return render_laurent(&terms);
        }
        let lift = |p: &Poly| -> Vec<(i64, BigRational)> {
            p.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i64, c.clone()))
                .collect()
        };
        format!("({})/({})", render_laurent(&lift(&self.num)), render_laurent(&lift(&self.den)))
    }

    /// True when rendering needs parentheses to be used as a factor.
    pub fn is_compound(&self) -> bool {
        match self.as_laurent() {
            Some(t) => t.len() > 1 || t.iter().any(|(_, c)| !c.denom().is_one()),
            None => true,
        }
    }
}

fn render_q_power(e: i64) -> String {
    match e {
        0 => String::new(),
        2 => "q".into(),
        _ if e % 2 == 0 => format!("q^{}", e / 2),
        _ => format!("q^({}/2)", e),
    }
}

fn render_laurent(terms: &[(i64, BigRational)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (n, (e, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if n == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let qp = render_q_power(*e);
        if qp.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&qp);
        } else {
            out.push_str(&format!("{}*{}", a, qp));
        }
    }
    out
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<'a> Add<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn add(self, o: &QScalar) -> QScalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        match (self.den_power(), o.den_power()) {
            (Some(a), Some(b)) => {
                let k = a.max(b);
                let num = self.num.shift_up(k - a).add(&o.num.shift_up(k - b));
                QScalar::canonical(num, Poly::monomial(BigRational::one(), k))
            }
            _ if self.den == o.den => QScalar::canonical(self.num.add(&o.num), self.den.clone()),
            _ => QScalar::canonical(
                self.num.mul(&o.den).add(&o.num.mul(&self.den)),
                self.den.mul(&o.den),
            ),
        }
    }
}

impl<'a> Mul<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn mul(self, o: &QScalar) -> QScalar {
        if self.is_zero() || o.is_zero() {
            return QScalar::zero();
        }
        match (self.den_power(), o.den_power()) {
            (Some(a), Some(b)) => {
                QScalar::canonical(self.num.mul(&o.num), Poly::monomial(BigRational::one(), a + b))
            }
            _ => QScalar::canonical(self.num.mul(&o.num), self.den.mul(&o.den)),
        }
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

impl<'a> Sub<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn sub(self, o: &QScalar) -> QScalar {
        self + &(-o)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, o: QScalar) -> QScalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, o: &QScalar) -> QScalar {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<QScalar> for &'a QScalar {
            type Output = QScalar;
            fn $m(self, o: QScalar) -> QScalar {
                self.$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, o: &QScalar) {
        *self = &*self + o;
    }
}

impl From<i64> for QScalar {
    fn from(n: i64) -> Self {
        QScalar::from_int(n)
    }
}

/// The q-number `[x] = (q^x - q^{-x}) / (q - q^{-1})`.
pub fn qnum(x: HalfInt) -> QScalar {
    let t = x.twice;
    if t == 0 {
        return QScalar::zero();
    }
    if t < 0 {
        return -qnum(-x);
    }
    let t = t as usize;
    let one = BigRational::one();
    // (s^t - s^{-t}) / (s^2 - s^{-2}) = s^2 (s^{2t} - 1) / (s^t (s^4 - 1))
    let num = Poly::monomial(one.clone(), 2 * t + 2).sub(&Poly::monomial(one.clone(), 2));
    let den = Poly::monomial(one.clone(), t + 4).sub(&Poly::monomial(one, t));
    QScalar::canonical(num, den)
}

/// `μ = q + q^{-1}`
pub fn mu() -> QScalar {
    QScalar::q_pow(1) + QScalar::q_pow(-1)
}

/// `ν = q - q^{-1}`
pub fn nu() -> QScalar {
    QScalar::q_pow(1) - QScalar::q_pow(-1)
}

/// Numeric value at `s = √q`.
pub fn eval_at(v: &QScalar, q: f64) -> Result<f64, ScalarError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(ScalarError::DomainError(q));
    }
    let s = q.sqrt();
    let d = v.den.eval_f64(s);
    // cancellation below rounding level counts as a pole
    let scale = v.den.coeffs().iter().rev().fold(0.0, |acc, c| acc * s + rat_to_f64(c).abs());
    if d.abs() <= 64.0 * f64::EPSILON * scale {
        return Err(ScalarError::DenominatorZero(q));
    }
    let r = v.num.eval_f64(s) / d;
    if !r.is_finite() {
        return Err(ScalarError::NonFinite(r));
    }
    Ok(r)
}

/// A finite double-precision value.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct NumericScalar(f64);

impl NumericScalar {
    pub fn new(v: f64) -> Result<Self, ScalarError> {
        if v.is_finite() {
            Ok(NumericScalar(v))
        } else {
            Err(ScalarError::NonFinite(v))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Numeric q-number, used by the spectral layer.
pub fn qnum_f64(x: f64, q: f64) -> f64 {
    (q.powf(x) - q.powf(-x)) / (q - 1.0 / q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn qnum_small_values() {
        assert_eq!(qnum(HalfInt::int(1)), QScalar::one());
        assert_eq!(qnum(HalfInt::int(2)), QScalar::s_pow(2) + QScalar::s_pow(-2));
        // [1/2] = 1/(s + s^{-1}) = s/(s^2 + 1)
        let expect = simplify(Poly::from_i64(&[0, 1]), Poly::from_i64(&[1, 0, 1])).unwrap();
        assert_eq!(qnum(h(1)), expect);
    }

    #[test]
    fn eval_examples() {
        assert!((eval_at(&qnum(HalfInt::int(2)), 0.5).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(eval_at(&QScalar::one(), 0.3).unwrap(), 1.0);
        let v = mu() * nu();
        assert!((eval_at(&v, 0.5).unwrap() + 3.75).abs() < 1e-14);
        assert_eq!(eval_at(&v, 1.5), Err(ScalarError::DomainError(1.5)));
        let bad = simplify(Poly::one(), Poly::from_i64(&[-1, 0, 2])).unwrap();
        assert_eq!(eval_at(&bad, 0.5), Err(ScalarError::DenominatorZero(0.5)));
    }

    #[test]
    fn simplify_examples() {
        let v = simplify(Poly::from_i64(&[-1, 0, 1]), Poly::from_i64(&[-1, 1])).unwrap();
        assert_eq!(v, QScalar::from_int(1) + QScalar::s_pow(1));
        let z = simplify(Poly::zero(), Poly::from_i64(&[3, 1])).unwrap();
        assert_eq!(z.numer(), &Poly::zero());
        assert_eq!(z.denom(), &Poly::one());
        // (s^4 - s^{-4}) / (s^2 - s^{-2}) written over s^4 and s^2
        let num = Poly::from_i64(&[-1, 0, 0, 0, 0, 0, 0, 0, 1]);
        let den = Poly::from_i64(&[-1, 0, 0, 0, 1]).shift_up(2);
        let v = simplify(num, den).unwrap();
        assert_eq!(v, qnum(HalfInt::int(2)));
        assert_eq!(simplify(Poly::one(), Poly::zero()), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn render_laurent_forms() {
        let v = QScalar::q_pow(-1) * (QScalar::q() - QScalar::q_pow(-1)).pow(2).unwrap();
        assert_eq!(v.render(), "q^-3 - 2*q^-1 + q");
        assert_eq!(QScalar::s_pow(3).render(), "q^(3/2)");
        assert_eq!(QScalar::from_ratio(-3, 4).render(), "-3/4");
        assert_eq!(qnum(h(1)).render(), "(q^(1/2))/(1 + q)");
    }

    #[test]
    fn field_inverse() {
        let x = mu();
        assert_eq!(&x * &x.inv().unwrap(), QScalar::one());
        assert_eq!(QScalar::zero().inv(), Err(ScalarError::DivisionByZero));
    }
}
