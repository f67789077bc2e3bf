//! Dense univariate polynomials in `s` with rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficients stored lowest degree first, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<BigRational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        Poly(vec![c]).trimmed()
    }

    /// `c * s^k`
    pub fn monomial(c: BigRational, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        Poly(v)
    }

    pub fn from_coeffs(v: Vec<BigRational>) -> Self {
        Poly(v).trimmed()
    }

    pub fn from_i64(v: &[i64]) -> Self {
        Poly(v.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect()).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.0.last()
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    /// True when the polynomial is a single term `c s^k`.
    pub fn monomial_power(&self) -> Option<usize> {
        let v = self.valuation()?;
        (v + 1 == self.0.len()).then_some(v)
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut v = vec![BigRational::zero(); k];
        v.extend(self.0.iter().cloned());
        Poly(v)
    }

    /// Divide by `s^k`; the caller guarantees divisibility.
    pub fn shift_down(&self, k: usize) -> Self {
        debug_assert!(self.valuation().is_none_or(|v| v >= k));
        Poly(self.0.iter().skip(k).cloned().collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let c = match (self.0.get(i), o.0.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            v.push(c);
        }
        Poly(v).trimmed()
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        Poly(v).trimmed()
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.lead().unwrap().clone();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (i, dc) in d.0.iter().enumerate() {
                    r[k + i] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly(q).trimmed(), Poly(r).trimmed())
    }

    /// Leading coefficient and the monic associate.
    pub fn monic(&self) -> (BigRational, Poly) {
        match self.lead() {
            None => (BigRational::one(), Poly::zero()),
            Some(l) if l.is_one() => (l.clone(), self.clone()),
            Some(l) => {
                let inv = l.recip();
                (l.clone(), self.scale(&inv))
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            // keep intermediate coefficients small
            b = r.monic().1;
        }
        a.monic().1
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        self.0
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * s + rat_to_f64(c))
    }

    pub fn max_abs_coeff(&self) -> BigRational {
        self.0
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

pub fn rat_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn div_rem_reconstructs() {
        let a = Poly::from_i64(&[-1, 0, 0, 0, 1]);
        let d = Poly::from_i64(&[-1, 1]);
        let (q, r) = a.div_rem(&d);
        assert!(r.is_zero());
        assert_eq!(q.mul(&d), a);
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let a = Poly::from_i64(&[1, 0, 1]);
        let b = Poly::from_i64(&[0, 1]);
        assert_eq!(a.gcd(&b), Poly::one());
    }

    #[test]
    fn gcd_finds_common_factor() {
        // (s-1)(s+2) and (s-1)(s-3)
        let a = Poly::from_i64(&[-2, 1, 1]);
        let b = Poly::from_i64(&[3, -4, 1]);
        assert_eq!(a.gcd(&b), Poly::from_i64(&[-1, 1]));
    }
}
