//! Divisor sums, Eisenstein series, eta products, theta constants and the
//! auxiliary level-3 / level-5 series.
//!
//! `prec` arguments are absolute exponent bounds: the result is exact for all
//! exponents below `prec`.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use super::rational::{ceil_exp, int, Exp, Rational};
use super::series::QSeries;
use crate::error::{Error, Result};

pub fn divisor_sigma(m: u32, n: u64) -> Result<BigInt> {
    if n < 1 {
        return Err(Error::Domain(format!("sigma_{m}({n}) needs n >= 1")));
    }
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += BigInt::from(d).pow(m);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(m);
            }
        }
        d += 1;
    }
    Ok(s)
}

/// Evaluate `build` at increasing working precision until its truncation
/// reaches `prec`, then cut to exactly `prec`. Quotients and shifted products
/// lose a little precision; this keeps callers free of the bookkeeping.
pub fn fit(prec: impl Into<Exp>, build: impl Fn(Exp) -> QSeries) -> QSeries {
    let prec = prec.into();
    let mut work = prec + Exp::one();
    loop {
        let s = build(work);
        if s.trunc() >= prec {
            return s.truncate(prec);
        }
        work = work + (prec - s.trunc()) + Exp::one();
    }
}

fn integer_series(prec: Exp, coeff: impl Fn(u64) -> BigInt) -> QSeries {
    let n = ceil_exp(prec).max(0) as u64;
    let coeffs = (0..n).map(|k| Rational::from_integer(coeff(k))).collect();
    QSeries::new(Exp::zero(), Exp::one(), coeffs, prec)
}

pub fn eisenstein(k: u32, prec: impl Into<Exp>) -> Result<QSeries> {
    let (scale, m): (i64, u32) = match k {
        2 => (-24, 1),
        4 => (240, 3),
        6 => (-504, 5),
        _ => {
            return Err(Error::Domain(format!(
                "eisenstein weight {k} not in {{2,4,6}}"
            )))
        }
    };
    Ok(integer_series(prec.into(), |n| {
        if n == 0 {
            BigInt::one()
        } else {
            BigInt::from(scale) * divisor_sigma(m, n).unwrap()
        }
    }))
}

/// `∏_{n≥1} (1 − q^n)` restricted to the factors selected by `keep`.
pub fn euler_product(prec: impl Into<Exp>, keep: impl Fn(u64) -> bool) -> QSeries {
    let prec = prec.into();
    let n = ceil_exp(prec).max(1) as usize;
    let mut c = vec![BigInt::zero(); n];
    c[0] = BigInt::one();
    for f in 1..n {
        if !keep(f as u64) {
            continue;
        }
        for k in (f..n).rev() {
            let t = c[k - f].clone();
            c[k] -= t;
        }
    }
    QSeries::new(
        Exp::zero(),
        Exp::one(),
        c.into_iter().map(Rational::from_integer).collect(),
        prec,
    )
}

pub fn dedekind_eta(prec: impl Into<Exp>) -> QSeries {
    eta_power(1, prec)
}

/// `η(q)^n = q^(n/24)·∏(1−q^k)^n`, by repeated squaring of the product.
pub fn eta_power(n: i64, prec: impl Into<Exp>) -> QSeries {
    let prec = prec.into();
    let shift = Exp::new(n, 24);
    let body = euler_product(prec - shift, |_| true);
    body.pow_int(n)
        .expect("euler product is a unit")
        .shift(shift)
}

/// `η(q^k)^n`.
pub fn eta_power_at(n: i64, k: i64, prec: impl Into<Exp>) -> QSeries {
    let prec = prec.into();
    eta_power(n, prec / Exp::from_integer(k)).subst_power(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theta {
    Two,
    Three,
    Zero,
}

impl Theta {
    pub fn parse(s: &str) -> Result<Theta> {
        match s {
            "2" | "theta2" => Ok(Theta::Two),
            "3" | "theta3" => Ok(Theta::Three),
            "0" | "4" | "theta0" | "theta4" => Ok(Theta::Zero),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// θ₃ = Σ q^(n²/2), θ₀ = Σ (−1)^n q^(n²/2), θ₂ = Σ q^((n+1/2)²/2), evaluated
/// at `q^scale`.
pub fn jacobi_theta(which: Theta, scale: i64, prec: impl Into<Exp>) -> QSeries {
    let prec = prec.into();
    if scale != 1 {
        return jacobi_theta(which, 1, prec / Exp::from_integer(scale)).subst_power(scale);
    }
    let two = int(2);
    match which {
        Theta::Three | Theta::Zero => {
            let slots = ceil_exp(prec * Exp::from_integer(2)).max(0) as usize;
            let mut c = vec![Rational::zero(); slots];
            let mut m = 0usize;
            while m * m < slots {
                c[m * m] = if m == 0 {
                    Rational::one()
                } else if which == Theta::Zero && m % 2 == 1 {
                    -two.clone()
                } else {
                    two.clone()
                };
                m += 1;
            }
            QSeries::new(Exp::zero(), Exp::new(1, 2), c, prec)
        }
        Theta::Two => {
            let slots = ceil_exp(prec * Exp::from_integer(8)).max(0) as usize;
            let mut c = vec![Rational::zero(); slots];
            let mut m = 1usize;
            while m * m < slots {
                c[m * m] = two.clone();
                m += 2;
            }
            QSeries::new(Exp::zero(), Exp::new(1, 8), c, prec)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aux {
    I3,
    Delta3,
    Delta2,
    Delta2A,
    Delta3A,
    H2,
    Psi1,
    Psi2,
}

impl Aux {
    pub const ALL: [Aux; 8] = [
        Aux::I3,
        Aux::Delta3,
        Aux::Delta2,
        Aux::Delta2A,
        Aux::Delta3A,
        Aux::H2,
        Aux::Psi1,
        Aux::Psi2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Aux::I3 => "I3",
            Aux::Delta3 => "Delta3",
            Aux::Delta2 => "Delta2",
            Aux::Delta2A => "Delta2A",
            Aux::Delta3A => "Delta3A",
            Aux::H2 => "H2",
            Aux::Psi1 => "psi1",
            Aux::Psi2 => "psi2",
        }
    }

    pub fn parse(s: &str) -> Result<Aux> {
        Aux::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

fn legendre3(d: u64) -> i64 {
    match d % 3 {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

pub fn aux_series(which: Aux, prec: impl Into<Exp>) -> QSeries {
    let prec = prec.into();
    match which {
        Aux::I3 => integer_series(prec, |n| {
            if n == 0 {
                return BigInt::one();
            }
            let s: i64 = (1..=n).filter(|d| n % d == 0).map(legendre3).sum();
            BigInt::from(6 * s)
        }),
        Aux::Delta3 => fit(prec, |p| eta_power_at(3, 3, p) * eta_power(-1, p)),
        Aux::Delta2 => fit(prec, |p| eta_power_at(8, 2, p) * eta_power(-4, p)),
        Aux::Delta2A => fit(prec, |p| eta_power(8, p) * eta_power_at(8, 2, p)),
        Aux::Delta3A => fit(prec, |p| eta_power(6, p) * eta_power_at(6, 3, p)),
        Aux::H2 => {
            let e2 = eisenstein(2, prec).unwrap();
            let e2q2 = eisenstein(2, prec / Exp::from_integer(2))
                .unwrap()
                .subst_power(2);
            e2q2.scale(&int(2)) - e2
        }
        Aux::Psi1 => fit(prec, |p| {
            euler_product(p + Exp::new(1, 60), |n| n % 5 == 1 || n % 5 == 4)
                .invert()
                .unwrap()
                .shift(Exp::new(-1, 60))
        }),
        Aux::Psi2 => fit(prec, |p| {
            euler_product(p, |n| n % 5 == 2 || n % 5 == 3)
                .invert()
                .unwrap()
                .shift(Exp::new(11, 60))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::rational::exp;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn sigma_hand_values() {
        assert_eq!(divisor_sigma(1, 1).unwrap(), BigInt::from(1));
        assert_eq!(divisor_sigma(3, 2).unwrap(), BigInt::from(9));
        assert_eq!(divisor_sigma(5, 4).unwrap(), BigInt::from(1057));
        assert!(divisor_sigma(1, 0).is_err());
    }

    #[test]
    fn eisenstein_heads() {
        assert_eq!(
            eisenstein(4, 4).unwrap().head(4),
            ints(&[1, 240, 2160, 6720])
        );
        assert_eq!(eisenstein(6, 3).unwrap().head(3), ints(&[1, -504, -16632]));
        assert_eq!(eisenstein(2, 3).unwrap().head(3), ints(&[1, -24, -72]));
        assert!(eisenstein(8, 3).is_err());
    }

    #[test]
    fn eta_leading_and_shape() {
        let eta = dedekind_eta(3);
        assert_eq!(eta.lead_exp(), Some(exp(1, 24)));
        assert_eq!(eta.trunc(), exp(3, 1));
        assert_eq!(eta.head(3), ints(&[1, -1, -1]));
        let inv8 = eta_power(-8, 3);
        assert_eq!(inv8.lead_exp(), Some(exp(-1, 3)));
        assert_eq!(inv8.head(3), ints(&[1, 8, 44]));
        assert_eq!(eta_power(-16, 1).lead_exp(), Some(exp(-2, 3)));
    }

    #[test]
    fn theta_leading_terms() {
        let t2 = jacobi_theta(Theta::Two, 1, 3);
        assert_eq!(t2.lead_exp(), Some(exp(1, 8)));
        assert_eq!(t2.lead_coeff(), Some(&int(2)));
        let t3 = jacobi_theta(Theta::Three, 1, 5);
        let got: Vec<(Exp, Rational)> = t3.terms().map(|(e, c)| (e, c.clone())).collect();
        assert_eq!(
            got,
            vec![
                (exp(0, 1), int(1)),
                (exp(1, 2), int(2)),
                (exp(2, 1), int(2)),
                (exp(9, 2), int(2))
            ]
        );
    }

    #[test]
    fn aux_names_roundtrip() {
        for a in Aux::ALL {
            assert_eq!(Aux::parse(a.name()).unwrap(), a);
        }
        assert_eq!(Aux::parse("nope"), Err(Error::UnknownName("nope".into())));
    }

    #[test]
    fn psi_leading_exponents() {
        assert_eq!(aux_series(Aux::Psi1, 2).lead_exp(), Some(exp(-1, 60)));
        assert_eq!(aux_series(Aux::Psi2, 2).lead_exp(), Some(exp(11, 60)));
        assert_eq!(aux_series(Aux::Psi2, 3).trunc(), exp(3, 1));
        // Rogers–Ramanujan: q^{1/60}ψ₁ = 1 + q + q² + q³ + 2q⁴, q^{−11/60}ψ₂ = 1 + q² + q³ + q⁴.
        assert_eq!(
            aux_series(Aux::Psi1, 5).shift(exp(1, 60)).head(5),
            ints(&[1, 1, 1, 1, 2])
        );
        assert_eq!(
            aux_series(Aux::Psi2, 5).shift(exp(-11, 60)).head(5),
            ints(&[1, 0, 1, 1, 1])
        );
    }
}
