//! Scalar helpers: the exact rational type, small exponent rationals, parsing
//! and a few integer utilities shared by the root finder and the searches.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Exponents of q. They stay tiny, so machine-word rationals are enough.
pub type Exp = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn exp(n: i64, d: i64) -> Exp {
    Exp::new(n, d)
}

pub fn exp_to_rational(e: Exp) -> Rational {
    rat(*e.numer(), *e.denom())
}

pub fn rational_to_exp(r: &Rational) -> Option<Exp> {
    Some(Exp::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

/// Accepts `p`, `-p`, `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational of the form p or p/q"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn is_nonneg_integer(r: &Rational) -> bool {
    is_integer(r) && !r.is_negative()
}

pub fn to_i64(r: &Rational) -> Option<i64> {
    if is_integer(r) {
        r.numer().to_i64()
    } else {
        None
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = int_sqrt(r.numer())?;
    let d = int_sqrt(r.denom())?;
    Some(Rational::new(n, d))
}

pub fn int_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

/// Positive divisors in increasing order, by trial division.
pub fn positive_divisors(n: u128) -> Vec<u128> {
    assert!(n > 0, "divisors of zero");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Divisors via the prime factorisation; faster than [`positive_divisors`] for
/// smooth numbers such as the right-hand sides of the coefficient searches.
pub fn divisors_smooth(n: &BigInt) -> Vec<BigInt> {
    assert!(n.is_positive(), "divisors of a non-positive number");
    let mut m = n.clone();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0;
        while m.is_multiple_of(&p) {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            factors.push((p.clone(), e));
        }
        p += 1;
    }
    if !m.is_one() {
        factors.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = d.clone();
            next.push(pk.clone());
            for _ in 0..e {
                pk *= &p;
                next.push(pk.clone());
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

pub fn ceil_exp(e: Exp) -> i64 {
    e.ceil().to_integer()
}

pub fn floor_exp(e: Exp) -> i64 {
    e.floor().to_integer()
}

pub fn lcm_i64(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn bigint_abs(n: &BigInt) -> BigInt {
    n.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["0", "7", "-1/3", "1254592/1617", "-800544692/1617"] {
            assert_eq!(parse_rational(s).unwrap().to_string(), s);
        }
        assert_eq!(parse_rational("4/6").unwrap(), rat(2, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn square_roots() {
        assert_eq!(rational_sqrt(&rat(49, 4)), Some(rat(7, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-4, 1)), None);
    }

    #[test]
    fn divisors_agree() {
        for n in [1u128, 12, 97, 360, 3628800] {
            let a = positive_divisors(n);
            let b: Vec<u128> = divisors_smooth(&BigInt::from(n))
                .iter()
                .map(|d| d.to_u128().unwrap())
                .collect();
            assert_eq!(a, b);
        }
        assert_eq!(positive_divisors(3628800).len(), 270);
    }
}
