//! Polynomial vector fields on affine n-space: Lie brackets, application to
//! functions, iterated ad-operators, and the standard two-generator pair.

use crate::algebra::{Monomial, Polynomial, Rational};
use num_traits::One;

/// A polynomial vector field `f_1 d1 + ... + f_n dn`, stored as the vector
/// of coefficient polynomials (slot `i` holds the coefficient of `d(i+1)`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    coeffs: Vec<Polynomial>,
}

impl VectorField {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        VectorField {
            coeffs: vec![Polynomial::zero(n); n],
        }
    }

    /// Builds a field from its coefficient polynomials; the vector length is
    /// the ambient dimension and every entry must share it.
    pub fn from_coeffs(coeffs: Vec<Polynomial>) -> Self {
        let n = coeffs.len();
        assert!(n >= 1, "dimension must be at least 1");
        assert!(
            coeffs.iter().all(|p| p.dim() == n),
            "coefficient dimension mismatch"
        );
        VectorField { coeffs }
    }

    /// The coordinate field `d_i` (1-based).
    pub fn unit_direction(n: usize, i: usize) -> Self {
        let mut f = Self::zero(n);
        f.coeffs[i - 1] = Polynomial::one(n);
        f
    }

    /// Field with one slot: `p * d_i`.
    pub fn single(n: usize, i: usize, p: Polynomial) -> Self {
        assert_eq!(p.dim(), n, "coefficient dimension mismatch");
        let mut f = Self::zero(n);
        f.coeffs[i - 1] = p;
        f
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `d_i` (1-based).
    pub fn coeff(&self, i: usize) -> &Polynomial {
        assert!(i >= 1 && i <= self.dim(), "direction index {i} out of range");
        &self.coeffs[i - 1]
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Polynomial::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        VectorField {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        VectorField {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        VectorField {
            coeffs: self.coeffs.iter().map(Polynomial::neg).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        VectorField {
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Applies the field to a polynomial as a derivation:
    /// `X(f) = sum_i X_i * df/dz_i`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        assert_eq!(self.dim(), f.dim(), "dimension mismatch");
        let mut out = Polynomial::zero(self.dim());
        for i in 1..=self.dim() {
            let xi = self.coeff(i);
            if xi.is_zero() {
                continue;
            }
            let d = f.partial(i);
            if !d.is_zero() {
                out = out.add(&xi.mul(&d));
            }
        }
        out
    }

    /// Lie bracket `[X, Y]`, computed coefficientwise: slot `k` of the
    /// result is `X(Y_k) - Y(X_k)`.
    pub fn bracket(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let coeffs = (1..=self.dim())
            .map(|k| self.apply(other.coeff(k)).sub(&other.apply(self.coeff(k))))
            .collect();
        VectorField { coeffs }
    }

    /// `ad_self(x) = [self, x]`.
    pub fn ad(&self, x: &Self) -> Self {
        self.bracket(x)
    }

    /// `m`-fold left bracket `[A, [A, ... [A, x]]]`; `m = 0` returns `x`.
    pub fn ad_iter(&self, x: &Self, m: usize) -> Self {
        let mut cur = x.clone();
        for _ in 0..m {
            cur = self.bracket(&cur);
        }
        cur
    }
}

/// The standard generator pair `(U, V)` in dimension `n`:
/// `U = dn` and
/// `V = zn^{4n} d(n-1) + (zn*z(n-1))^{4n-4} d(n-2) + ... + (zn...z2)^8 d1
///      + (zn...z1)^4 dn`.
///
/// For `n = 1` only the last summand survives, giving `(d1, z1^4 d1)`.
pub fn standard_generators(n: usize) -> (VectorField, VectorField) {
    assert!(n >= 1, "dimension must be at least 1");
    let u = VectorField::unit_direction(n, n);
    let mut coeffs = vec![Polynomial::zero(n); n];
    for j in 1..n {
        // slot j carries (z_{j+1} ... z_n)^{4(j+1)}
        let e = 4 * (j as u32 + 1);
        let mut exps = vec![0u32; n];
        for i in (j + 1)..=n {
            exps[i - 1] = e;
        }
        coeffs[j - 1] = Polynomial::monomial(Monomial::from_exponents(exps), Rational::one());
    }
    coeffs[n - 1] = Polynomial::monomial(Monomial::from_exponents(vec![4; n]), Rational::one());
    (u, VectorField::from_coeffs(coeffs))
}
