use thiserror::Error;

use crate::exactq::{Exp, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series is zero to its truncation")]
    ZeroSeries,
    #[error("leading coefficient {0} is not 1 and the exponent is not an integer")]
    NonUnitLeading(Rational),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unknown series name `{0}`")]
    UnknownName(String),
    #[error(
        "series is not in the span of the basis; first nonzero residual at q^{exp} is {value}"
    )]
    NotInSpan { exp: Exp, value: Rational },
    #[error("{0} is not an indicial root")]
    NotAnIndicialRoot(Rational),
    #[error("indicial cubic has no three rational roots")]
    NonRationalRoots,
    #[error("recursion denominator vanishes at step {0} without cancellation")]
    ResonantStep(usize),
    #[error("degenerate denominator (h-1)(c-8h-4) = 0")]
    DegenerateDenominator,
    #[error("discriminant {0} is not the square of a rational")]
    NotRationalSquare(Rational),
    #[error("m = 31c makes the quadratic for h degenerate")]
    Degenerate,
    #[error("lower parameter {0} is a non-positive integer")]
    PoleInLowerParameter(Rational),
    #[error("h = {0} is a pole of b1")]
    DegenerateH(Rational),
    #[error("logarithmic solution needs log-degree above 1")]
    UnsupportedLogDegree,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
