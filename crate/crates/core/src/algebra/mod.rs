//! Exact univariate algebra over Q(i): scalars, polynomials, rational
//! functions, the expression parser and singular-point analysis.

pub mod parse;
pub mod poly;
pub mod rational;
pub mod roots;
pub mod scalar;
pub mod singular;

pub use parse::{parse_expression, parse_rational};
pub use poly::Polynomial;
pub use rational::RationalFunction;
pub use roots::{isolate_complex_roots, rational_roots, IsolatingRect};
pub use scalar::{rat, rat_to_f64, render_rational, ExactScalar};
pub use singular::{
    alpha_exponents, laurent_coefficient, singular_profile, AlgebraicPoint, AlphaPair, Exponent, LaurentDatum,
    Location, PoleSite,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("division by the zero polynomial at offset {offset}")]
    ZeroDivisor { offset: usize },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("unsupported pole order {order}: Laurent data is limited to orders 1 and 2")]
    UnsupportedOrder { order: i64 },
}

/// Normalizes `num/den`: gcd-reduced with monic denominator.
pub fn normalize(num: Polynomial, den: Polynomial) -> Result<RationalFunction, AlgebraError> {
    RationalFunction::new(num, den)
}
