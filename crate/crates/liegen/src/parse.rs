//! Text form for vector fields.
//!
//! Grammar (whitespace insignificant between tokens):
//!
//! ```text
//! field    := signed_term (("+" | "-") term)*
//! term     := [rational] ["*"] [monomial "*"?] dir
//! dir      := "d" nat                  (1-based direction index)
//! monomial := factor ("*" factor)*
//! factor   := "z" nat ["^" nat]
//! rational := ["-"] nat ["/" nat]
//! ```
//!
//! `"0"` on its own denotes the zero field, which is also what the zero
//! field formats to. [`format_field`] emits the canonical form: slots in
//! increasing direction order, terms in lexicographic order of exponent
//! vectors, coefficients in lowest terms, terms joined with `" + "` and
//! negative signs carried by the coefficient.

use crate::algebra::{Monomial, Polynomial, Rational};
use crate::vectorfield::VectorField;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("index {index} out of range 1..={max} at byte {offset}")]
    IndexOutOfRange {
        index: u64,
        max: usize,
        offset: usize,
    },
    #[error("zero denominator at byte {offset}")]
    ZeroDenominator { offset: usize },
    #[error("dimension must be at least 1")]
    InvalidDimension,
}

/// Parses a vector field in the text grammar; every `z`/`d` index must be
/// at most `n`. Like terms are combined and the result is canonical.
pub fn parse_field(text: &str, n: usize) -> Result<VectorField, ParseError> {
    if n == 0 {
        return Err(ParseError::InvalidDimension);
    }
    if text.trim() == "0" {
        return Ok(VectorField::zero(n));
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        n,
    };
    let mut coeffs = vec![Polynomial::zero(n); n];
    let mut negate = false;
    loop {
        let (c, m, dir) = p.term()?;
        let c = if negate { -c } else { c };
        coeffs[dir - 1].add_term(m, c);
        p.skip_ws();
        match p.peek() {
            None => break,
            Some(b'+') => {
                p.pos += 1;
                negate = false;
            }
            Some(b'-') => {
                p.pos += 1;
                negate = true;
            }
            Some(_) => {
                return Err(p.syntax("expected '+', '-', or end of input"));
            }
        }
    }
    Ok(VectorField::from_coeffs(coeffs))
}

/// Canonical text form; inverse of [`parse_field`] at the same dimension.
pub fn format_field(x: &VectorField) -> String {
    let mut parts = Vec::new();
    for dir in 1..=x.dim() {
        for (m, c) in x.coeff(dir).terms() {
            let mut s = String::new();
            if !c.is_one() {
                s.push_str(&c.to_string());
                s.push(' ');
            }
            if !m.is_constant() {
                s.push_str(&m.to_string());
                s.push(' ');
            }
            s.push_str(&format!("d{dir}"));
            parts.push(s);
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_field(self))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    /// Unsigned decimal integer as a big integer; at least one digit.
    fn nat_big(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("expected a number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }

    /// Unsigned decimal integer that must fit in a u64 (indices, exponents).
    fn nat_u64(&mut self, what: &str) -> Result<(u64, usize), ParseError> {
        let offset = self.pos;
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ParseError::Syntax {
                offset,
                message: format!("expected {what}"),
            });
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match digits.parse::<u64>() {
            Ok(v) => Ok((v, offset)),
            Err(_) => Err(ParseError::Syntax {
                offset,
                message: format!("{what} too large"),
            }),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        };
        let numer = self.nat_big()?;
        self.skip_ws();
        let denom = if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let offset = self.pos;
            let d = self.nat_big()?;
            if d.is_zero() {
                return Err(ParseError::ZeroDenominator { offset });
            }
            d
        } else {
            BigInt::one()
        };
        let numer = if negative { -numer } else { numer };
        Ok(Rational::new(numer, denom))
    }

    /// `z<nat>[^<nat>]`; the leading `z` has already been seen.
    fn factor(&mut self) -> Result<(usize, u32), ParseError> {
        debug_assert_eq!(self.peek(), Some(b'z'));
        self.pos += 1;
        let (idx, offset) = self.nat_u64("variable index")?;
        if idx < 1 || idx > self.n as u64 {
            return Err(ParseError::IndexOutOfRange {
                index: idx,
                max: self.n,
                offset,
            });
        }
        self.skip_ws();
        let exp = if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let (e, e_offset) = self.nat_u64("exponent")?;
            u32::try_from(e).map_err(|_| ParseError::Syntax {
                offset: e_offset,
                message: "exponent too large".to_string(),
            })?
        } else {
            1
        };
        Ok((idx as usize, exp))
    }

    fn term(&mut self) -> Result<(Rational, Monomial, usize), ParseError> {
        self.skip_ws();
        let mut coeff = Rational::one();
        if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'-') {
            coeff = self.rational()?;
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                self.skip_ws();
            }
        }
        let mut exps = vec![0u32; self.n];
        while self.peek() == Some(b'z') {
            let (idx, e) = self.factor()?;
            exps[idx - 1] = exps[idx - 1].checked_add(e).ok_or_else(|| ParseError::Syntax {
                offset: self.pos,
                message: "exponent too large".to_string(),
            })?;
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                self.skip_ws();
                match self.peek() {
                    Some(b'z') | Some(b'd') => {}
                    _ => return Err(self.syntax("expected a factor or direction after '*'")),
                }
            }
        }
        self.skip_ws();
        if self.peek() != Some(b'd') {
            return Err(self.syntax("expected a direction 'd<k>'"));
        }
        self.pos += 1;
        let (dir, offset) = self.nat_u64("direction index")?;
        if dir < 1 || dir > self.n as u64 {
            return Err(ParseError::IndexOutOfRange {
                index: dir,
                max: self.n,
                offset,
            });
        }
        Ok((coeff, Monomial::from_exponents(exps), dir as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};
    use crate::vectorfield::standard_generators;

    #[test]
    fn parses_v_at_n2() {
        let v = parse_field("z2^8 d1 + z1^4*z2^4 d2", 2).unwrap();
        assert_eq!(v, standard_generators(2).1);
    }

    #[test]
    fn parses_bare_direction() {
        let u = parse_field("d2", 2).unwrap();
        assert_eq!(u, standard_generators(2).0);
    }

    #[test]
    fn cancellation_yields_zero_field() {
        let f = parse_field("-1/2 * z1 d1 + 1/2 z1 d1", 1).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn parses_literal_zero() {
        assert!(parse_field("0", 3).unwrap().is_zero());
        assert!(parse_field("  0  ", 1).unwrap().is_zero());
    }

    #[test]
    fn minus_separator_negates() {
        let f = parse_field("d1 - 2 d2", 2).unwrap();
        let g = parse_field("d1 + -2 d2", 2).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn formats_zero_field() {
        assert_eq!(format_field(&VectorField::zero(2)), "0");
    }

    #[test]
    fn formats_v_at_n2_canonically() {
        let (_, v) = standard_generators(2);
        assert_eq!(format_field(&v), "z2^8 d1 + z1^4*z2^4 d2");
    }

    #[test]
    fn formats_negative_coefficient() {
        let f = VectorField::single(
            2,
            2,
            Polynomial::monomial(Monomial::from_exponents(vec![2, 1]), rat_int(-3)),
        );
        assert_eq!(format_field(&f), "-3 z1^2*z2 d2");
    }

    #[test]
    fn roundtrips_rational_coefficients() {
        let f = VectorField::single(
            3,
            2,
            Polynomial::monomial(Monomial::from_exponents(vec![0, 1, 5]), rat(-7, 3)),
        );
        let text = format_field(&f);
        assert_eq!(text, "-7/3 z2*z3^5 d2");
        assert_eq!(parse_field(&text, 3).unwrap(), f);
    }

    #[test]
    fn syntax_error_reports_offset() {
        match parse_field("z1^2 d1 + ?", 2) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 10),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_index_is_named() {
        match parse_field("z5^2 d1", 2) {
            Err(ParseError::IndexOutOfRange { index, max, offset }) => {
                assert_eq!(index, 5);
                assert_eq!(max, 2);
                assert_eq!(offset, 1);
            }
            other => panic!("expected index error, got {other:?}"),
        }
        match parse_field("z1 d0", 2) {
            Err(ParseError::IndexOutOfRange { index, .. }) => assert_eq!(index, 0),
            other => panic!("expected index error, got {other:?}"),
        }
    }

    #[test]
    fn zero_denominator_is_rejected() {
        match parse_field("1/0 d1", 1) {
            Err(ParseError::ZeroDenominator { offset }) => assert_eq!(offset, 2),
            other => panic!("expected zero denominator error, got {other:?}"),
        }
    }

    #[test]
    fn dimension_zero_is_rejected() {
        assert_eq!(parse_field("d1", 0), Err(ParseError::InvalidDimension));
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        assert!(parse_field("d1 d2", 2).is_err());
        assert!(parse_field("", 2).is_err());
        assert!(parse_field("3", 2).is_err());
    }

    #[test]
    fn repeated_factors_accumulate() {
        let f = parse_field("z1*z1^2 d1", 1).unwrap();
        let g = parse_field("z1^3 d1", 1).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn star_before_direction_is_allowed() {
        let f = parse_field("2*z1*d1", 1).unwrap();
        let g = parse_field("2 z1 d1", 1).unwrap();
        assert_eq!(f, g);
    }
}
