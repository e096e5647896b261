//! The S₃ action on (c, h), the weight table, and the second vacuum
//! coefficient `m` as a function of (c, h) together with its inverse.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactq::rational::rational_sqrt;
use crate::exactq::{int, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CHPair {
    pub c: Rational,
    pub h: Rational,
}

impl CHPair {
    pub fn new(c: Rational, h: Rational) -> Self {
        CHPair { c, h }
    }

    /// The three indices `{−c/24, h − c/24, c/12 + 1/2 − h}`, sorted.
    pub fn indices(&self) -> [Rational; 3] {
        let c24 = &self.c / int(24);
        let mut r = [
            -&c24,
            &self.h - &c24,
            &self.c / int(12) + rat(1, 2) - &self.h,
        ];
        r.sort();
        r
    }
}

/// `λ(c, h) = (c − 24h, c/8 − 2h + 1/2)`, of order 3.
pub fn sym_lambda(p: &CHPair) -> CHPair {
    CHPair::new(
        &p.c - int(24) * &p.h,
        &p.c / int(8) - int(2) * &p.h + rat(1, 2),
    )
}

/// `μ(c, h) = (c − 24h, −h)`, an involution.
pub fn sym_mu(p: &CHPair) -> CHPair {
    CHPair::new(&p.c - int(24) * &p.h, -&p.h)
}

/// All six images of `p` under the group generated by λ and μ.
pub fn orbit(p: &CHPair) -> Vec<CHPair> {
    let l1 = sym_lambda(p);
    let l2 = sym_lambda(&l1);
    vec![
        p.clone(),
        l1.clone(),
        l2.clone(),
        sym_mu(p),
        sym_mu(&l1),
        sym_mu(&l2),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightRow {
    pub c: Rational,
    pub weights: [Rational; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    pub rows: [WeightRow; 3],
}

/// Rows `(c; 0, h, c/8+1/2−h)`, `(c−24h; −h, 0, c/8+1/2−2h)`,
/// `(24h−2c−12; h−c/8−1/2, 2h−c/8−1/2, 0)`.
pub fn weight_table(p: &CHPair) -> WeightTable {
    let (c, h) = (&p.c, &p.h);
    let t = c / int(8) + rat(1, 2);
    WeightTable {
        rows: [
            WeightRow {
                c: c.clone(),
                weights: [Rational::zero(), h.clone(), &t - h],
            },
            WeightRow {
                c: c - int(24) * h,
                weights: [-h, Rational::zero(), &t - int(2) * h],
            },
            WeightRow {
                c: int(24) * h - int(2) * c - int(12),
                weights: [h - &t, int(2) * h - &t, Rational::zero()],
            },
        ],
    }
}

/// Central charges at which the vacuum solution does not depend on h, with
/// its (then constant) second coefficient.
pub fn h_independent_m(c: &Rational) -> Option<Rational> {
    if *c == int(8) {
        Some(int(248))
    } else if *c == int(16) {
        Some(int(496))
    } else {
        None
    }
}

/// Second coefficient of the vacuum solution:
/// `m = (−c³ + 31c²h − 7c² − 248ch² + 124ch − 4c) / ((h−1)(c−8h−4))`.
/// At c = 8 and 16 numerator and denominator share the factors and `m` is the
/// constant 248 resp. 496.
pub fn second_coeff_m(p: &CHPair) -> Result<Rational> {
    if let Some(m) = h_independent_m(&p.c) {
        return Ok(m);
    }
    let (c, h) = (&p.c, &p.h);
    let den = (h - Rational::one()) * (c - int(8) * h - int(4));
    if den.is_zero() {
        return Err(Error::DegenerateDenominator);
    }
    let num = -(c * c * c) + int(31) * c * c * h - int(7) * c * c - int(248) * c * h * h
        + int(124) * c * h
        - int(4) * c;
    Ok(num / den)
}

/// `D = (m − 31c)(m(c − 12)² + c(c² − 24c − 368))`.
pub fn discriminant(c: &Rational, m: &Rational) -> Rational {
    let c12 = c - int(12);
    (m - int(31) * c) * (m * &c12 * &c12 + c * (c * c - int(24) * c - int(368)))
}

/// The conformal weights with vacuum coefficient `m` at central charge `c`:
/// `h = (c + 4 ± √D/(m − 31c))/16`, ascending and deduplicated.
pub fn h_from_cm(c: &Rational, m: &Rational) -> Result<Vec<Rational>> {
    let k = m - int(31) * c;
    if k.is_zero() {
        return Err(Error::Degenerate);
    }
    let d = discriminant(c, m);
    let s = rational_sqrt(&d).ok_or_else(|| Error::NotRationalSquare(d.clone()))?;
    let base = c + int(4);
    let mut out = vec![(&base - &s / &k) / int(16), (&base + &s / &k) / int(16)];
    out.sort();
    out.dedup();
    Ok(out)
}
