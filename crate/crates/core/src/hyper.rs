//! ₃F₂ solutions in the Hauptmodul `K = 1728/j`.
//!
//! For indices `r₁, r₂, r₃` summing to 1/2,
//! `fᵢ = K^rᵢ·₃F₂(rᵢ, rᵢ+1/3, rᵢ+2/3; rᵢ−rⱼ+1, rᵢ−rₖ+1; K)`. The factor
//! `1728^rᵢ` is irrational in general, so everything here is divided by it:
//! `fᵢ/1728^rᵢ = j^(−rᵢ)·₃F₂(…; K)`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactq::rational::rational_to_exp;
use crate::exactq::{eisenstein, euler_product, fit, int, rat, Exp, QSeries, Rational};
use crate::modforms::xy_generators;

/// Rising factorial `x(x+1)…(x+r−1)`.
pub fn pochhammer(x: &Rational, r: u32) -> Rational {
    (0..r).fold(Rational::one(), |acc, k| acc * (x + int(k as i64)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperParams {
    pub upper: [Rational; 3],
    pub lower: [Rational; 2],
}

impl HyperParams {
    pub fn new(upper: [Rational; 3], lower: [Rational; 2]) -> Self {
        HyperParams { upper, lower }
    }
}

/// The first `n` coefficients of `₃F₂(a, b, c; d, e; z)`. A series that
/// terminates (an upper parameter reaches zero) is returned padded with zeros
/// even if a lower parameter would later hit a pole; a pole reached first is
/// an error.
pub fn f32_series(p: &HyperParams, n: usize) -> Result<Vec<Rational>> {
    let mut out = Vec::with_capacity(n);
    let mut term = Rational::one();
    for r in 0..n {
        out.push(term.clone());
        if term.is_zero() {
            continue;
        }
        let rr = int(r as i64);
        let num: Rational = p.upper.iter().map(|a| a + &rr).product();
        if num.is_zero() {
            term = Rational::zero();
            continue;
        }
        let den: Rational = p.lower.iter().map(|d| d + &rr).product::<Rational>() * (&rr + int(1));
        if den.is_zero() {
            let bad = p.lower.iter().find(|d| (*d + &rr).is_zero()).unwrap();
            return Err(Error::PoleInLowerParameter(bad.clone()));
        }
        term = term * num / den;
    }
    Ok(out)
}

/// `∏(1 − qⁿ)²⁴ / E₄³ = q⁻¹·j⁻¹`, a unit series.
fn j_inverse_body(prec: Exp) -> QSeries {
    let e4 = eisenstein(4, prec).unwrap();
    let e4_3 = &(&e4 * &e4) * &e4;
    euler_product(prec, |_| true).pow_int(24).unwrap() * e4_3.invert().unwrap()
}

/// `j = E₄³/η²⁴ = q⁻¹ + 744 + 196884q + …`
pub fn j_function(prec: impl Into<Exp>) -> QSeries {
    let prec = prec.into();
    fit(prec, |p| {
        j_inverse_body(p + Exp::one())
            .invert()
            .unwrap()
            .shift(-Exp::one())
    })
}

/// `K = 1728/j = 1728q(1 − 744q + …)`.
pub fn kappa(prec: impl Into<Exp>) -> QSeries {
    let prec = prec.into();
    fit(prec, |p| j_inverse_body(p - Exp::one()).shift(Exp::one())).scale(&int(1728))
}

/// `j^(−r)` for rational `r`.
pub fn j_power(r: &Rational, prec: impl Into<Exp>) -> Result<QSeries> {
    let prec = prec.into();
    let re = rational_to_exp(r).ok_or_else(|| Error::Domain(format!("exponent {r} too large")))?;
    Ok(fit(prec, |p| {
        j_inverse_body(p - re).pow(r).unwrap().shift(re)
    }))
}

/// `Σ aₙ zⁿ` at `z = K` by Horner's rule; `K` has valuation 1, so terms
/// beyond the truncation drop out.
pub fn compose_horner(a: &[Rational], k: &QSeries) -> QSeries {
    let t = k.trunc();
    let mut acc = QSeries::zero(t);
    for c in a.iter().rev() {
        acc = &(&acc * k) + &QSeries::constant(c.clone(), t);
    }
    acc
}

/// The same sum assembled term by term from the powers of `K`.
pub fn compose_direct(a: &[Rational], k: &QSeries) -> QSeries {
    let t = k.trunc();
    let mut acc = QSeries::zero(t);
    let mut kn = QSeries::one(t);
    for c in a {
        if !c.is_zero() {
            acc = &acc + &kn.scale(c);
        }
        kn = &kn * k;
    }
    acc
}

fn f32_at_kappa(p: &HyperParams, prec: Exp) -> Result<QSeries> {
    let n = prec.ceil().to_integer().max(1) as usize;
    let a = f32_series(p, n)?;
    let k = kappa(prec);
    Ok(compose_horner(&a, &k))
}

/// The parameters attached to index `i` (0-based).
pub fn hyper_params(r: &[Rational; 3], i: usize) -> HyperParams {
    let (j, k) = match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let ri = &r[i];
    HyperParams::new(
        [ri.clone(), ri + rat(1, 3), ri + rat(2, 3)],
        [ri - &r[j] + int(1), ri - &r[k] + int(1)],
    )
}

/// `fᵢ/1728^rᵢ` for `i ∈ {1, 2, 3}`, exact below `prec`.
pub fn hyper_solution(r: &[Rational; 3], i: usize, prec: impl Into<Exp>) -> Result<QSeries> {
    if !(1..=3).contains(&i) {
        return Err(Error::Domain(format!("component {i} not in 1..=3")));
    }
    let prec = prec.into();
    let p = hyper_params(r, i - 1);
    let ri = &r[i - 1];
    let re =
        rational_to_exp(ri).ok_or_else(|| Error::Domain(format!("exponent {ri} too large")))?;
    let body = f32_at_kappa(&p, prec - re + Exp::one())?;
    Ok((j_power(ri, prec)? * body).truncate(prec))
}

/// Residuals `x − j^(1/6)·₃F₂(−1/6, 1/6, 1/2; 1/2, 1/2; K)` and
/// `y − j^(−1/3)·₃F₂(1/3, 2/3, 1; 3/2, 1; K)`.
pub fn xy_hypergeometric_check(prec: impl Into<Exp>) -> Result<(QSeries, QSeries)> {
    let prec = prec.into();
    let (x, y) = xy_generators(prec);
    let hx = HyperParams::new([rat(-1, 6), rat(1, 6), rat(1, 2)], [rat(1, 2), rat(1, 2)]);
    let hy = HyperParams::new([rat(1, 3), rat(2, 3), int(1)], [rat(3, 2), int(1)]);
    let xs = j_power(&rat(-1, 6), prec)? * f32_at_kappa(&hx, prec + Exp::new(1, 6) + Exp::one())?;
    let ys = j_power(&rat(1, 3), prec)? * f32_at_kappa(&hy, prec + Exp::one())?;
    Ok((&x - &xs.truncate(prec), &y - &ys.truncate(prec)))
}
