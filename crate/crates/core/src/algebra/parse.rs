//! Recursive-descent parser for rational-function expressions in `x` and `i`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | 'x' | 'i' | '(' expr ')'
//! ```

use super::poly::Polynomial;
use super::rational::RationalFunction;
use super::scalar::ExactScalar;
use super::AlgebraError;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

const MAX_EXPONENT: u32 = 4096;

pub fn parse_expression(text: &str) -> Result<RationalFunction, AlgebraError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

/// Exact rational from `p/q`, an integer, or a finite decimal such as `0.1`.
pub fn parse_rational(text: &str) -> Result<BigRational, AlgebraError> {
    let t = text.trim();
    let bad = |offset: usize, message: &str| AlgebraError::Syntax { offset, message: message.to_string() };
    if let Some((a, b)) = t.split_once('/') {
        let n = parse_decimal(a.trim()).ok_or_else(|| bad(0, "invalid numerator"))?;
        let d = parse_decimal(b.trim()).ok_or_else(|| bad(a.len() + 1, "invalid denominator"))?;
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        return Ok(n / d);
    }
    parse_decimal(t).ok_or_else(|| bad(0, "invalid rational number"))
}

fn parse_decimal(t: &str) -> Option<BigRational> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(n, d);
    Some(if neg { -v } else { v })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> AlgebraError {
        AlgebraError::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RationalFunction, AlgebraError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction, AlgebraError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let rhs = self.unary()?;
            acc = if c == b'*' {
                &acc * &rhs
            } else {
                acc.checked_div(&rhs).map_err(|_| AlgebraError::ZeroDivisor { offset: at })?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalFunction, AlgebraError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction, AlgebraError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.err("expected a nonnegative integer exponent"));
        }
        let e: u32 = match digits.parse() {
            Ok(e) if e <= MAX_EXPONENT => e,
            _ => {
                return Err(AlgebraError::Syntax { offset: start, message: "exponent too large".into() });
            }
        };
        Ok(base.powi(e as i32).expect("nonnegative power"))
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<RationalFunction, AlgebraError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(RationalFunction::x())
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(RationalFunction::constant(ExactScalar::i()))
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n: BigInt = self.digits().parse().expect("digit run");
                Ok(RationalFunction::from_poly(Polynomial::constant(ExactScalar::real(
                    BigRational::from_integer(n),
                ))))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
