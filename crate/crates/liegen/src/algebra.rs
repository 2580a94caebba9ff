//! Exact scalars and sparse multivariate polynomials over the rationals.
//!
//! All arithmetic here is exact: coefficients are arbitrary-precision
//! rationals, monomials are exponent vectors, and polynomials are sparse
//! term maps with a canonical (lexicographic) iteration order. Values are
//! immutable after construction and safe to share across threads.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact scalar: arbitrary-precision rational, always in lowest terms with
/// a positive denominator (zero is `0/1`).
pub type Rational = BigRational;

/// Rational from an integer.
pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Rational `p/q`. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub(crate) fn factorial(m: u64) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exponent vector of a single monomial in `n` variables.
///
/// Slot `i` (0-based) holds the exponent of `z_{i+1}`; all public index
/// arguments are 1-based, matching the `z1..zn` text form. Ordering is
/// lexicographic on the exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    exponents: Vec<u32>,
}

impl Monomial {
    /// The constant monomial `1` in `n` variables.
    pub fn constant(n: usize) -> Self {
        Monomial {
            exponents: vec![0; n],
        }
    }

    /// The single variable `z_i` (1-based).
    pub fn variable(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "variable index {i} out of range 1..={n}");
        let mut exponents = vec![0; n];
        exponents[i - 1] = 1;
        Monomial { exponents }
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial { exponents }
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// Exponent of `z_i` (1-based).
    pub fn exponent(&self, i: usize) -> u32 {
        assert!(
            i >= 1 && i <= self.dim(),
            "variable index {i} out of range 1..={}",
            self.dim()
        );
        self.exponents[i - 1]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Copy with the exponent of `z_i` replaced by `e`.
    pub fn with_exponent(&self, i: usize, e: u32) -> Self {
        assert!(i >= 1 && i <= self.dim());
        let mut exponents = self.exponents.clone();
        exponents[i - 1] = e;
        Monomial { exponents }
    }

    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Product of two monomials: exponents add.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "monomial dimension mismatch");
        Monomial {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        Monomial {
            exponents: self.exponents.iter().map(|a| a * e).collect(),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let mut first = true;
        for (idx, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "z{}", idx + 1)?;
            } else {
                write!(f, "z{}^{}", idx + 1, e)?;
            }
        }
        Ok(())
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Invariants: no stored coefficient is zero, every key has the same
/// dimension, and the zero polynomial has an empty term map. Terms iterate
/// in lexicographic order of the exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::constant(n), c);
        p
    }

    /// The variable `z_i` (1-based) as a polynomial.
    pub fn variable(n: usize, i: usize) -> Self {
        Self::monomial(Monomial::variable(n, i), Rational::one())
    }

    /// Single-term polynomial `c * m`.
    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(m.dim());
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(n);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in lexicographic order of exponent vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Largest total degree among terms; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Add `c * m`, combining with an existing term and dropping zeros.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        assert_eq!(m.dim(), self.n, "monomial dimension mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "polynomial dimension mismatch");
        let mut out = Self::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Power by repeated squaring.
    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.n);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Formal partial derivative with respect to `z_i` (1-based).
    pub fn partial(&self, i: usize) -> Self {
        assert!(i >= 1 && i <= self.n, "variable index {i} out of range 1..={}", self.n);
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            out.add_term(m.with_exponent(i, e - 1), c * rat_int(i64::from(e)));
        }
        out
    }
}

fn term_string(c: &Rational, m: &Monomial) -> String {
    if m.is_constant() {
        format!("{c}")
    } else if c.is_one() {
        format!("{m}")
    } else {
        format!("{c} {m}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| term_string(c, m)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, other: Self) -> Polynomial {
        Polynomial::add(self, other)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, other: Self) -> Polynomial {
        Polynomial::sub(self, other)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, other: Self) -> Polynomial {
        Polynomial::mul(self, other)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize, i: usize) -> Polynomial {
        Polynomial::variable(n, i)
    }

    #[test]
    fn addition_cancels_terms() {
        let p = z(1, 1).pow(2);
        let sum = p.add(&p.neg());
        assert!(sum.is_zero());
        assert_eq!(sum.num_terms(), 0);
    }

    #[test]
    fn addition_combines_like_terms() {
        let p = z(1, 1).add(&Polynomial::one(1));
        let sum = p.add(&z(1, 1));
        let expected = Polynomial::from_terms(
            1,
            [
                (Monomial::variable(1, 1), rat_int(2)),
                (Monomial::constant(1), rat_int(1)),
            ],
        );
        assert_eq!(sum, expected);
    }

    #[test]
    fn distinct_monomials_coexist() {
        let a = z(2, 2).pow(8);
        let b = z(2, 1).pow(4).mul(&z(2, 2).pow(4));
        let sum = a.add(&b);
        assert_eq!(sum.num_terms(), 2);
        assert_eq!(
            sum.terms().map(|(m, _)| m.clone()).collect::<Vec<_>>(),
            vec![
                Monomial::from_exponents(vec![0, 8]),
                Monomial::from_exponents(vec![4, 4])
            ]
        );
    }

    #[test]
    fn difference_of_squares() {
        let a = z(1, 1).add(&Polynomial::one(1));
        let b = z(1, 1).sub(&Polynomial::one(1));
        let expected = z(1, 1).pow(2).sub(&Polynomial::one(1));
        assert_eq!(a.mul(&b), expected);
    }

    #[test]
    fn zero_is_absorbing() {
        let p = z(2, 1).pow(3).add(&z(2, 2));
        assert!(Polynomial::zero(2).mul(&p).is_zero());
    }

    #[test]
    fn square_of_square_matches_repeated_mul() {
        let m = z(2, 1).mul(&z(2, 2));
        let by_squaring = m.pow(2).pow(2);
        let by_mul = m.mul(&m).mul(&m).mul(&m);
        assert_eq!(by_squaring, by_mul);
        assert_eq!(
            by_squaring,
            Polynomial::monomial(Monomial::from_exponents(vec![4, 4]), Rational::one())
        );
    }

    #[test]
    fn partial_power_rule() {
        let p = z(2, 2).pow(8);
        let expected = Polynomial::monomial(Monomial::from_exponents(vec![0, 7]), rat_int(8));
        assert_eq!(p.partial(2), expected);
    }

    #[test]
    fn partial_of_independent_variable_is_zero() {
        assert!(z(2, 2).pow(8).partial(1).is_zero());
    }

    #[test]
    fn fifth_partial_gives_falling_factorial() {
        let mut p = z(2, 2).pow(8);
        for _ in 0..5 {
            p = p.partial(2);
        }
        // 8*7*6*5*4 = 6720
        let expected = Polynomial::monomial(Monomial::from_exponents(vec![0, 3]), rat_int(6720));
        assert_eq!(p, expected);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn partial_rejects_bad_index() {
        let _ = z(2, 1).partial(3);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn add_rejects_dimension_mismatch() {
        let _ = z(1, 1).add(&z(2, 1));
    }

    #[test]
    fn display_is_canonical() {
        let p = z(2, 1)
            .pow(2)
            .mul(&z(2, 2))
            .scale(&rat_int(-3))
            .add(&Polynomial::one(2));
        assert_eq!(p.to_string(), "1 + -3 z1^2*z2");
        assert_eq!(Polynomial::zero(3).to_string(), "0");
    }
}
