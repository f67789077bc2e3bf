//! Expression parser for algebra elements.
//!
//! Grammar:
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := atom ('^' exponent)?
//! exponent := ['-'] int | '(' ['-'] int ['/' int] ')'
//! atom     := symbol | int | 'q' | '(' expr ')'
//! ```
//!
//! A `*` directly after `a`, `c` or `t` is the involution when the next
//! non-blank character cannot start a factor, so `a*c` is a product and
//! `a**c` is `a*` times `c`. Likewise `b+`/`b-` are symbols only when the
//! sign is not followed by a factor: `b+c` is a sum, `b+*c` a product.
//! Half-integer exponents are allowed on `q` only.

use std::fmt;

use qsphere::qalgebra::{CircleElement, Element};
use qsphere::scalars::QScalar;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("at {pos}: expected {expected}, found {found}")]
    Unexpected { pos: usize, expected: &'static str, found: String },
    #[error("at {pos}: unknown symbol `{name}`")]
    UnknownSymbol { pos: usize, name: String },
    #[error("at {pos}: {msg}")]
    InvalidExponent { pos: usize, msg: String },
    #[error("at {pos}: integer literal out of range")]
    Overflow { pos: usize },
    #[error("at {pos}: division by a non-scalar")]
    NonScalarDivisor { pos: usize },
    #[error("at {pos}: division by zero")]
    DivisionByZero { pos: usize },
    #[error("at {pos}: cannot combine elements of A[SU_q(2)] and A[U(1)]")]
    Mixed { pos: usize },
}

impl ParseError {
    pub fn pos(&self) -> usize {
        match self {
            ParseError::Unexpected { pos, .. }
            | ParseError::UnknownSymbol { pos, .. }
            | ParseError::InvalidExponent { pos, .. }
            | ParseError::Overflow { pos }
            | ParseError::NonScalarDivisor { pos }
            | ParseError::DivisionByZero { pos }
            | ParseError::Mixed { pos } => *pos,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    A,
    AStar,
    C,
    CStar,
    B,
    D,
    BPlus,
    BMinus,
    BZero,
    X1,
    X0,
    XMinus1,
    T,
    TStar,
}

impl Symbol {
    pub const ALL: [Symbol; 14] = [
        Symbol::A,
        Symbol::AStar,
        Symbol::C,
        Symbol::CStar,
        Symbol::B,
        Symbol::D,
        Symbol::BPlus,
        Symbol::BMinus,
        Symbol::BZero,
        Symbol::X1,
        Symbol::X0,
        Symbol::XMinus1,
        Symbol::T,
        Symbol::TStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Symbol::A => "a",
            Symbol::AStar => "a*",
            Symbol::C => "c",
            Symbol::CStar => "c*",
            Symbol::B => "b",
            Symbol::D => "d",
            Symbol::BPlus => "b+",
            Symbol::BMinus => "b-",
            Symbol::BZero => "b0",
            Symbol::X1 => "x1",
            Symbol::X0 => "x0",
            Symbol::XMinus1 => "x-1",
            Symbol::T => "t",
            Symbol::TStar => "t*",
        }
    }

    fn lower(self) -> Value {
        let alg = Value::Algebra;
        match self {
            Symbol::A => alg(Element::a()),
            Symbol::AStar => alg(Element::a_star()),
            Symbol::C => alg(Element::c()),
            Symbol::CStar => alg(Element::c_star()),
            Symbol::B => alg(Element::b()),
            Symbol::D => alg(Element::d()),
            Symbol::BPlus => alg(Element::b_plus()),
            Symbol::BMinus => alg(Element::b_minus()),
            Symbol::BZero => alg(Element::b_zero()),
            Symbol::X1 => alg(Element::x_plus()),
            Symbol::X0 => alg(Element::x_zero()),
            Symbol::XMinus1 => alg(Element::x_minus()),
            Symbol::T => Value::Circle(CircleElement::t()),
            Symbol::TStar => Value::Circle(CircleElement::t_star()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    /// `q^(k/2)`
    QPow(i64),
    Sym(Symbol),
    Neg(Box<Expr>),
    /// Binary operation with the operator's position.
    Bin(Op, Box<Expr>, Box<Expr>, usize),
    /// Integer power; position of the `^`.
    Pow(Box<Expr>, i64, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Op {
    fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
            Op::Div => '/',
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::QPow(2) => write!(f, "q"),
            Expr::QPow(k) if k % 2 == 0 => write!(f, "q^({})", k / 2),
            Expr::QPow(k) => write!(f, "q^({k}/2)"),
            Expr::Sym(s) => write!(f, "{}", s.name()),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Bin(op, a, b, _) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(a, k, _) => write!(f, "({a})^({k})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Sym(Symbol),
    Q,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => n.to_string(),
            Tok::Sym(s) => format!("`{}`", s.name()),
            Tok::Q => "`q`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn starts_factor(c: Option<char>) -> bool {
    c.is_some_and(|c| c.is_ascii_alphanumeric() || c == '(')
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let next_non_blank = |from: usize| chars[from.min(chars.len())..].iter().copied().find(|c| !c.is_whitespace());
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| ParseError::Overflow { pos })?;
            out.push((Tok::Int(n), pos));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let tok = match c {
                'a' | 'c' | 't' => {
                    i += 1;
                    let starred = chars.get(i) == Some(&'*') && !starts_factor(next_non_blank(i + 1));
                    if starred {
                        i += 1;
                    }
                    match (c, starred) {
                        ('a', false) => Tok::Sym(Symbol::A),
                        ('a', true) => Tok::Sym(Symbol::AStar),
                        ('c', false) => Tok::Sym(Symbol::C),
                        ('c', true) => Tok::Sym(Symbol::CStar),
                        ('t', false) => Tok::Sym(Symbol::T),
                        _ => Tok::Sym(Symbol::TStar),
                    }
                }
                'b' => {
                    i += 1;
                    match chars.get(i) {
                        Some('0') => {
                            i += 1;
                            Tok::Sym(Symbol::BZero)
                        }
                        Some(&s @ ('+' | '-')) if !starts_factor(next_non_blank(i + 1)) => {
                            i += 1;
                            Tok::Sym(if s == '+' { Symbol::BPlus } else { Symbol::BMinus })
                        }
                        _ => Tok::Sym(Symbol::B),
                    }
                }
                'd' => {
                    i += 1;
                    Tok::Sym(Symbol::D)
                }
                'q' => {
                    i += 1;
                    Tok::Q
                }
                'x' => match (chars.get(i + 1), chars.get(i + 2)) {
                    (Some('1'), _) => {
                        i += 2;
                        Tok::Sym(Symbol::X1)
                    }
                    (Some('0'), _) => {
                        i += 2;
                        Tok::Sym(Symbol::X0)
                    }
                    (Some('-'), Some('1')) => {
                        i += 3;
                        Tok::Sym(Symbol::XMinus1)
                    }
                    _ => {
                        i += 1;
                        Tok::End
                    }
                },
                _ => Tok::End,
            };
            // an identifier must not run on into further letters or digits
            if tok == Tok::End || chars.get(i).is_some_and(|c| c.is_ascii_alphanumeric()) {
                let mut j = pos;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || (j > pos && chars[j] == '-' && chars[pos] == 'x')) {
                    j += 1;
                }
                let name: String = chars[pos..j.max(pos + 1)].iter().collect();
                return Err(ParseError::UnknownSymbol { pos, name });
            }
            out.push((tok, pos));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(ParseError::Unexpected {
                    pos,
                    expected: "an expression",
                    found: format!("`{other}`"),
                })
            }
        };
        out.push((tok, pos));
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        ParseError::Unexpected { pos: self.pos(), expected, found: self.peek().describe() }
    }

    fn expect(&mut self, t: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Plus {
            self.bump();
        }
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => Op::Add,
                Tok::Minus => Op::Sub,
                _ => return Ok(lhs),
            };
            let (_, pos) = self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?), pos);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => Op::Mul,
                Tok::Slash => Op::Div,
                _ => return Ok(lhs),
            };
            let (_, pos) = self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.factor()?), pos);
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            (Tok::Int(n), _) => Ok(if neg { -n } else { n }),
            _ => {
                self.at -= 1;
                Err(self.unexpected("an integer exponent"))
            }
        }
    }

    /// Exponent as twice its value.
    fn exponent(&mut self) -> Result<i64, ParseError> {
        if *self.peek() != Tok::LParen {
            return Ok(2 * self.int()?);
        }
        self.bump();
        let num = self.int()?;
        let twice = if *self.peek() == Tok::Slash {
            self.bump();
            let pos = self.pos();
            match self.int()? {
                1 => 2 * num,
                2 => num,
                d => {
                    return Err(ParseError::InvalidExponent {
                        pos,
                        msg: format!("exponent denominator {d}; only halves are supported"),
                    })
                }
            }
        } else {
            2 * num
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(twice)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let pos = self.pos();
        self.bump();
        let twice = self.exponent()?;
        match base {
            Expr::QPow(2) => Ok(Expr::QPow(twice)),
            _ if twice % 2 != 0 => Err(ParseError::InvalidExponent {
                pos,
                msg: "half-integer exponents are only allowed on q".into(),
            }),
            b => Ok(Expr::Pow(Box::new(b), twice / 2, pos)),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Q => {
                self.bump();
                Ok(Expr::QPow(2))
            }
            Tok::Sym(s) => {
                self.bump();
                Ok(Expr::Sym(s))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.unexpected("a symbol, number, `q` or `(`")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

/// Result of lowering: an element of A[SU_q(2)] or of A[U(1)].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lowered {
    Algebra(Element),
    Circle(CircleElement),
}

impl Lowered {
    pub fn render(&self) -> String {
        match self {
            Lowered::Algebra(e) => e.render(),
            Lowered::Circle(c) => c.render(),
        }
    }
}

impl fmt::Display for Lowered {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Clone, Debug)]
enum Value {
    Scalar(QScalar),
    Algebra(Element),
    Circle(CircleElement),
}

fn combine(
    x: Value,
    y: Value,
    pos: usize,
    s: impl Fn(&QScalar, &QScalar) -> QScalar,
    a: impl Fn(&Element, &Element) -> Element,
    c: impl Fn(&CircleElement, &CircleElement) -> CircleElement,
) -> Result<Value, ParseError> {
    use Value::*;
    Ok(match (x, y) {
        (Scalar(x), Scalar(y)) => Scalar(s(&x, &y)),
        (Scalar(x), Algebra(y)) => Algebra(a(&Element::scalar(x), &y)),
        (Algebra(x), Scalar(y)) => Algebra(a(&x, &Element::scalar(y))),
        (Algebra(x), Algebra(y)) => Algebra(a(&x, &y)),
        (Scalar(x), Circle(y)) => Circle(c(&CircleElement::scalar(x), &y)),
        (Circle(x), Scalar(y)) => Circle(c(&x, &CircleElement::scalar(y))),
        (Circle(x), Circle(y)) => Circle(c(&x, &y)),
        _ => return Err(ParseError::Mixed { pos }),
    })
}

fn eval(e: &Expr) -> Result<Value, ParseError> {
    Ok(match e {
        Expr::Int(n) => Value::Scalar(QScalar::from_int(*n)),
        Expr::QPow(k) => Value::Scalar(QScalar::s_pow(*k)),
        Expr::Sym(s) => s.lower(),
        Expr::Neg(x) => match eval(x)? {
            Value::Scalar(s) => Value::Scalar(-s),
            Value::Algebra(a) => Value::Algebra(-&a),
            Value::Circle(c) => Value::Circle(-&c),
        },
        Expr::Bin(Op::Add, x, y, pos) => combine(eval(x)?, eval(y)?, *pos, |a, b| a + b, |a, b| a + b, |a, b| a + b)?,
        Expr::Bin(Op::Sub, x, y, pos) => combine(eval(x)?, eval(y)?, *pos, |a, b| a - b, |a, b| a - b, |a, b| a - b)?,
        Expr::Bin(Op::Mul, x, y, pos) => combine(eval(x)?, eval(y)?, *pos, |a, b| a * b, |a, b| a * b, |a, b| a * b)?,
        Expr::Bin(Op::Div, x, y, pos) => {
            let Value::Scalar(d) = eval(y)? else {
                return Err(ParseError::NonScalarDivisor { pos: *pos });
            };
            let inv = d.inv().map_err(|_| ParseError::DivisionByZero { pos: *pos })?;
            combine(eval(x)?, Value::Scalar(inv), *pos, |a, b| a * b, |a, b| a * b, |a, b| a * b)?
        }
        Expr::Pow(x, k, pos) => match eval(x)? {
            Value::Scalar(s) => {
                Value::Scalar(s.pow(*k).map_err(|_| ParseError::DivisionByZero { pos: *pos })?)
            }
            Value::Algebra(a) if *k >= 0 => Value::Algebra(a.pow(*k as u32)),
            Value::Algebra(_) => {
                return Err(ParseError::InvalidExponent {
                    pos: *pos,
                    msg: "negative powers of algebra elements are undefined".into(),
                })
            }
            Value::Circle(c) => Value::Circle(circle_pow(&c, *k, *pos)?),
        },
    })
}

fn circle_pow(c: &CircleElement, k: i64, pos: usize) -> Result<CircleElement, ParseError> {
    let base = if k >= 0 {
        c.clone()
    } else {
        // only monomials c·t^n are invertible
        let mut terms = c.terms();
        match (terms.next(), terms.next()) {
            (Some((n, v)), None) => {
                let inv = v.inv().map_err(|_| ParseError::DivisionByZero { pos })?;
                CircleElement::from_terms([(-n, inv)])
            }
            _ => {
                return Err(ParseError::InvalidExponent {
                    pos,
                    msg: "negative power of a non-monomial in t".into(),
                })
            }
        }
    };
    let mut out = CircleElement::one();
    for _ in 0..k.unsigned_abs() {
        out = &out * &base;
    }
    Ok(out)
}

/// Parse and lower to normal form; pure scalars lower to A[SU_q(2)].
pub fn parse(src: &str) -> Result<Lowered, ParseError> {
    match eval(&parse_expr(src)?)? {
        Value::Scalar(s) => Ok(Lowered::Algebra(Element::scalar(s))),
        Value::Algebra(a) => Ok(Lowered::Algebra(a)),
        Value::Circle(c) => Ok(Lowered::Circle(c)),
    }
}

/// Multi-line message with a caret under the error position.
pub fn caret_message(src: &str, err: &ParseError) -> String {
    format!("{src}\n{}^\n{err}", " ".repeat(err.pos()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(s: &str) -> Element {
        match parse(s).unwrap() {
            Lowered::Algebra(e) => e,
            other => panic!("expected an algebra element, got {other}"),
        }
    }

    #[test]
    fn star_tokenization() {
        assert_eq!(alg("a*c"), &Element::a() * &Element::c());
        assert_eq!(alg("a**c"), &Element::a_star() * &Element::c());
        assert_eq!(alg("a*"), Element::a_star());
        assert_eq!(alg("c*c*"), &Element::c() * &Element::c_star());
        assert_eq!(alg("a*^2"), Element::a_star().pow(2));
    }

    #[test]
    fn sign_tokenization() {
        assert_eq!(alg("b+c"), &Element::b() + &Element::c());
        assert_eq!(alg("b+*c"), &Element::b_plus() * &Element::c());
        assert_eq!(alg("b- + b0"), &Element::b_minus() + &Element::b_zero());
        assert_eq!(alg("x-1"), Element::x_minus());
        assert_eq!(alg("x0-1"), &Element::x_zero() - &Element::one());
    }

    #[test]
    fn commutation_is_zero() {
        assert!(alg("a*c - q*c*a").is_zero());
    }

    #[test]
    fn b0_alias() {
        let expect = Element::term(qsphere::qalgebra::Monomial::new(0, 1, 1), -QScalar::q());
        assert_eq!(alg("b0"), expect);
    }

    #[test]
    fn scalar_forms() {
        assert_eq!(alg("q^-1"), Element::scalar(QScalar::q_pow(-1)));
        assert_eq!(alg("q^(1/2)"), Element::scalar(QScalar::s_pow(1)));
        assert_eq!(alg("3/4"), Element::scalar(QScalar::from_ratio(3, 4)));
        assert_eq!(alg("(1 + q)/(1 + q)"), Element::one());
    }

    #[test]
    fn circle_symbols() {
        assert_eq!(parse("t*t*").unwrap(), Lowered::Circle(CircleElement::one()));
        assert_eq!(parse("t^-2").unwrap(), Lowered::Circle(CircleElement::t_pow(-2)));
        assert!(matches!(parse("a*t"), Err(ParseError::Mixed { .. })));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("a + y"), Err(ParseError::UnknownSymbol { pos: 4, name: "y".into() }));
        assert!(matches!(parse("ab"), Err(ParseError::UnknownSymbol { pos: 0, .. })));
        assert!(matches!(parse("a +"), Err(ParseError::Unexpected { pos: 3, .. })));
        assert!(matches!(parse("(a"), Err(ParseError::Unexpected { pos: 2, .. })));
        assert!(matches!(parse("a^(1/2)"), Err(ParseError::InvalidExponent { .. })));
        assert!(matches!(parse("a/c"), Err(ParseError::NonScalarDivisor { pos: 1 })));
        assert!(matches!(parse("a/(q - q)"), Err(ParseError::DivisionByZero { .. })));
        assert!(matches!(parse("a^-1"), Err(ParseError::InvalidExponent { .. })));
    }
}
