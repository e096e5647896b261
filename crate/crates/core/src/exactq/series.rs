//! Truncated q-expansions with fractional exponents and exact coefficients.
//!
//! A series is stored on the lattice `(1/ram)·Z`: `coeffs[i]` is the
//! coefficient of `q^((lead + i)/ram)`. The truncation is an exponent bound
//! kept as an exact rational, independent of `ram`, so re-ramifying never
//! loses or invents precision. Every lattice slot in `[lead/ram, trunc)` is
//! stored, and off-lattice exponents below `trunc` are known to vanish.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{ceil_exp, exp_to_rational, Exp, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct QSeries {
    ram: i64,
    lead: i64,
    coeffs: Vec<Rational>,
    trunc: Exp,
}

fn slots(ram: i64, lead: i64, trunc: Exp) -> usize {
    let end = ceil_exp(trunc * Exp::from_integer(ram));
    (end - lead).max(0) as usize
}

impl QSeries {
    pub fn zero(trunc: impl Into<Exp>) -> Self {
        let trunc = trunc.into();
        QSeries {
            ram: 1,
            lead: ceil_exp(trunc),
            coeffs: Vec::new(),
            trunc,
        }
    }

    pub fn constant(c: Rational, trunc: impl Into<Exp>) -> Self {
        Self::monomial(c, Exp::zero(), trunc)
    }

    pub fn one(trunc: impl Into<Exp>) -> Self {
        Self::constant(Rational::one(), trunc)
    }

    pub fn monomial(c: Rational, e: Exp, trunc: impl Into<Exp>) -> Self {
        Self::new(e, Exp::one(), vec![c], trunc)
    }

    /// Coefficient `i` sits at `start + i·step`; every other exponent below
    /// `trunc` is zero. Entries at or beyond `trunc` are dropped.
    pub fn new(start: Exp, step: Exp, coeffs: Vec<Rational>, trunc: impl Into<Exp>) -> Self {
        assert!(step > Exp::zero(), "step must be positive");
        let trunc = trunc.into();
        let ram = start.denom().lcm(step.denom());
        let lead = (start * Exp::from_integer(ram)).to_integer();
        let spacing = (step * Exp::from_integer(ram)).to_integer() as usize;
        let n = slots(ram, lead, trunc);
        let mut out = vec![Rational::zero(); n];
        for (i, c) in coeffs.into_iter().enumerate() {
            let k = i * spacing;
            if k >= n {
                break;
            }
            out[k] = c;
        }
        let mut s = QSeries {
            ram,
            lead,
            coeffs: out,
            trunc,
        };
        s.normalize();
        s
    }

    /// `q^start·(c₀ + c₁q + c₂q² + …)` known exactly for the listed terms only.
    pub fn from_head(start: Exp, coeffs: Vec<Rational>) -> Self {
        let trunc = start + Exp::from_integer(coeffs.len() as i64);
        Self::new(start, Exp::one(), coeffs, trunc)
    }

    pub fn from_terms(terms: &[(Exp, Rational)], trunc: impl Into<Exp>) -> Self {
        let trunc = trunc.into();
        let mut acc = QSeries::zero(trunc);
        for (e, c) in terms {
            acc = &acc + &QSeries::monomial(c.clone(), *e, trunc);
        }
        acc
    }

    fn normalize(&mut self) {
        let skip = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if skip == self.coeffs.len() {
            *self = QSeries::zero(self.trunc);
            return;
        }
        if skip > 0 {
            self.coeffs.drain(..skip);
            self.lead += skip as i64;
        }
        let mut g = self.ram;
        for (i, c) in self.coeffs.iter().enumerate() {
            if g == 1 {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(&(self.lead + i as i64));
            }
        }
        if g > 1 {
            let ram = self.ram / g;
            let lead = self.lead / g;
            let n = slots(ram, lead, self.trunc);
            let coeffs: Vec<Rational> = self
                .coeffs
                .iter()
                .step_by(g as usize)
                .take(n)
                .cloned()
                .collect();
            debug_assert_eq!(coeffs.len(), n);
            self.ram = ram;
            self.lead = lead;
            self.coeffs = coeffs;
        }
    }

    pub fn ram(&self) -> i64 {
        self.ram
    }

    pub fn trunc(&self) -> Exp {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead_exp(&self) -> Option<Exp> {
        (!self.is_zero()).then(|| Exp::new(self.lead, self.ram))
    }

    pub fn lead_coeff(&self) -> Option<&Rational> {
        self.coeffs.first()
    }

    /// The leading exponent, or the truncation for a series known to vanish.
    pub fn valuation(&self) -> Exp {
        self.lead_exp().unwrap_or(self.trunc)
    }

    /// `None` when the exponent is at or beyond the truncation.
    pub fn coeff(&self, e: Exp) -> Option<Rational> {
        if e >= self.trunc {
            return None;
        }
        let scaled = e * Exp::from_integer(self.ram);
        if !scaled.is_integer() || self.is_zero() {
            return Some(Rational::zero());
        }
        let k = scaled.to_integer() - self.lead;
        if k < 0 {
            return Some(Rational::zero());
        }
        Some(
            self.coeffs
                .get(k as usize)
                .cloned()
                .unwrap_or_else(Rational::zero),
        )
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exp, &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (Exp::new(self.lead + i as i64, self.ram), c))
    }

    /// Spacing of the exponents relative to the leading one: `1/k` for the
    /// least `k` putting every offset on an integer, never coarser than 1.
    pub fn rel_step(&self) -> Exp {
        let mut k = 1i64;
        if let Some(v) = self.lead_exp() {
            for (e, _) in self.terms() {
                k = k.lcm((e - v).denom());
            }
        }
        Exp::new(1, k)
    }

    /// Up to `n` coefficients starting at the leading term, spaced by
    /// [`rel_step`](Self::rel_step); fewer if the truncation intervenes.
    pub fn head(&self, n: usize) -> Vec<Rational> {
        let Some(v) = self.lead_exp() else {
            return Vec::new();
        };
        let step = self.rel_step();
        (0..n)
            .map_while(|i| self.coeff(v + step * Exp::from_integer(i as i64)))
            .collect()
    }

    /// Number of [`rel_step`](Self::rel_step) slots known from the leading term.
    pub fn known_terms(&self) -> usize {
        match self.lead_exp() {
            None => 0,
            Some(v) => {
                let n = (self.trunc - v) / self.rel_step();
                ceil_exp(n).max(0) as usize
            }
        }
    }

    pub fn truncate(&self, bound: impl Into<Exp>) -> Self {
        let bound = bound.into();
        if bound >= self.trunc {
            return self.clone();
        }
        let mut s = self.clone();
        s.trunc = bound;
        let n = slots(s.ram, s.lead, bound);
        s.coeffs.truncate(n);
        s.normalize();
        s
    }

    /// Relative truncation: keep `n` slots of the given step past the leading term.
    pub fn truncate_terms(&self, n: usize, step: Exp) -> Self {
        match self.lead_exp() {
            None => self.clone(),
            Some(v) => self.truncate(v + step * Exp::from_integer(n as i64)),
        }
    }

    fn spread(&self, ram: i64) -> (i64, i64) {
        let s = ram / self.ram;
        (self.lead * s, s)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return QSeries::zero(self.trunc);
        }
        let mut s = self.clone();
        for x in &mut s.coeffs {
            *x *= c;
        }
        s
    }

    /// Multiply by `c·q^e`.
    pub fn shift(&self, e: Exp) -> Self {
        if self.is_zero() {
            return QSeries::zero(self.trunc + e);
        }
        let start = Exp::new(self.lead, self.ram) + e;
        Self::new(
            start,
            Exp::new(1, self.ram),
            self.coeffs.clone(),
            self.trunc + e,
        )
    }

    fn combine(&self, other: &QSeries, sign: bool) -> QSeries {
        let trunc = self.trunc.min(other.trunc);
        let ram = self.ram.lcm(&other.ram);
        let mut start: Option<i64> = None;
        for s in [self, other] {
            if !s.is_zero() {
                let (l, _) = s.spread(ram);
                start = Some(start.map_or(l, |x: i64| x.min(l)));
            }
        }
        let Some(start) = start else {
            return QSeries::zero(trunc);
        };
        let n = slots(ram, start, trunc);
        let mut out = vec![Rational::zero(); n];
        for (which, s) in [self, other].into_iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            let (l, sp) = s.spread(ram);
            for (i, c) in s.coeffs.iter().enumerate() {
                let k = (l - start + i as i64 * sp) as usize;
                if k >= n {
                    break;
                }
                if which == 1 && !sign {
                    out[k] -= c;
                } else {
                    out[k] += c;
                }
            }
        }
        let mut r = QSeries {
            ram,
            lead: start,
            coeffs: out,
            trunc,
        };
        r.normalize();
        r
    }

    fn integer_form(&self) -> (Vec<BigInt>, BigInt) {
        let mut den = BigInt::one();
        for c in &self.coeffs {
            if !c.denom().is_one() {
                den = den.lcm(c.denom());
            }
        }
        let v = self
            .coeffs
            .iter()
            .map(|c| {
                if c.denom() == &den {
                    c.numer().clone()
                } else {
                    c.numer() * (&den / c.denom())
                }
            })
            .collect();
        (v, den)
    }

    fn product(&self, other: &QSeries) -> QSeries {
        let trunc = (self.trunc + other.valuation()).min(other.trunc + self.valuation());
        if self.is_zero() || other.is_zero() {
            return QSeries::zero(trunc);
        }
        let ram = self.ram.lcm(&other.ram);
        let (la, sa) = self.spread(ram);
        let (lb, sb) = other.spread(ram);
        let start = la + lb;
        let n = slots(ram, start, trunc);
        let (ia, da) = self.integer_form();
        let (ib, db) = other.integer_form();
        let nza: Vec<(i64, &BigInt)> = ia
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64 * sa, c))
            .collect();
        let nzb: Vec<(i64, &BigInt)> = ib
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64 * sb, c))
            .collect();
        let mut acc = vec![BigInt::zero(); n];
        for &(i, a) in &nza {
            if i as usize >= n {
                break;
            }
            for &(j, b) in &nzb {
                let k = (i + j) as usize;
                if k >= n {
                    break;
                }
                acc[k] += a * b;
            }
        }
        let den = da * db;
        let coeffs = acc
            .into_iter()
            .map(|x| Rational::new(x, den.clone()))
            .collect();
        let mut r = QSeries {
            ram,
            lead: start,
            coeffs,
            trunc,
        };
        r.normalize();
        r
    }

    pub fn invert(&self) -> Result<QSeries> {
        let Some(c0) = self.lead_coeff() else {
            return Err(Error::ZeroSeries);
        };
        let n = self.coeffs.len();
        let inv0 = c0.recip();
        let u: Vec<Rational> = self.coeffs.iter().map(|c| c * &inv0).collect();
        let mut w: Vec<Rational> = Vec::with_capacity(n);
        w.push(Rational::one());
        for k in 1..n {
            let mut s = Rational::zero();
            for j in 1..=k {
                if !u[j].is_zero() {
                    s += &u[j] * &w[k - j];
                }
            }
            w.push(-s);
        }
        let v = Exp::new(self.lead, self.ram);
        let coeffs = w.into_iter().map(|x| x * &inv0).collect();
        Ok(QSeries::new(
            -v,
            Exp::new(1, self.ram),
            coeffs,
            self.trunc - v * 2,
        ))
    }

    pub fn pow_int(&self, n: i64) -> Result<QSeries> {
        if n < 0 {
            return self.invert()?.pow_int(-n);
        }
        let mut result = QSeries::one(self.trunc - self.valuation());
        let mut base = self.clone();
        let mut k = n;
        let mut first = true;
        while k > 0 {
            if k & 1 == 1 {
                result = if first { base.clone() } else { &result * &base };
                first = false;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// `self^e` for rational `e`; the leading coefficient must be 1 unless `e`
    /// is an integer.
    pub fn pow(&self, e: &Rational) -> Result<QSeries> {
        if e.is_integer() {
            let n = num_traits::ToPrimitive::to_i64(e.numer())
                .ok_or_else(|| Error::Domain("exponent too large".into()))?;
            return self.pow_int(n);
        }
        let Some(c0) = self.lead_coeff() else {
            return Err(Error::ZeroSeries);
        };
        if !c0.is_one() {
            return Err(Error::NonUnitLeading(c0.clone()));
        }
        let u = &self.coeffs;
        let n = u.len();
        let mut g: Vec<Rational> = Vec::with_capacity(n);
        g.push(Rational::one());
        for m in 1..n {
            let mut s = Rational::zero();
            for k in 1..=m {
                if u[k].is_zero() {
                    continue;
                }
                let f = e * Rational::from_integer(k.into())
                    - Rational::from_integer(((m - k) as i64).into());
                s += f * &u[k] * &g[m - k];
            }
            g.push(s / Rational::from_integer((m as i64).into()));
        }
        let v = Exp::new(self.lead, self.ram);
        let er = super::rational::rational_to_exp(e)
            .ok_or_else(|| Error::Domain("exponent too large".into()))?;
        let start = v * er;
        Ok(QSeries::new(
            start,
            Exp::new(1, self.ram),
            g,
            start + (self.trunc - v),
        ))
    }

    /// The derivation `q·d/dq`.
    pub fn derive(&self) -> QSeries {
        let mut s = self.clone();
        for (i, c) in s.coeffs.iter_mut().enumerate() {
            if !c.is_zero() {
                *c *= exp_to_rational(Exp::new(self.lead + i as i64, self.ram));
            }
        }
        s.normalize();
        s
    }

    /// `f(q) ↦ f(q^k)`.
    pub fn subst_power(&self, k: i64) -> QSeries {
        assert!(k >= 1, "substitution power must be positive");
        let kk = Exp::from_integer(k);
        if self.is_zero() {
            return QSeries::zero(self.trunc * kk);
        }
        let start = Exp::new(self.lead, self.ram) * kk;
        Self::new(
            start,
            Exp::new(k, self.ram),
            self.coeffs.clone(),
            self.trunc * kk,
        )
    }

    /// First exponent below both truncations where the two series differ.
    pub fn first_mismatch(&self, other: &QSeries) -> Option<(Exp, Rational, Rational)> {
        let d = self - other;
        let (e, _) = d.terms().next()?;
        Some((e, self.coeff(e).unwrap(), other.coeff(e).unwrap()))
    }

    /// Coefficients that are all non-negative integers below the truncation.
    pub fn is_nonneg_integral(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.is_integer() && !c.is_negative())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Normalise the leading coefficient to 1.
    pub fn monic(&self) -> Result<QSeries> {
        let c = self.lead_coeff().ok_or(Error::ZeroSeries)?;
        Ok(self.scale(&c.recip()))
    }

    /// `∫₀^q f(t) dt/t`: the constant term becomes the `log q` part and every
    /// other coefficient is divided by its exponent.
    pub fn integrate_dlog(&self) -> super::logseries::LogQSeries {
        let c0 = self.coeff(Exp::zero()).unwrap_or_else(Rational::zero);
        let mut g = self.clone();
        for (i, c) in g.coeffs.iter_mut().enumerate() {
            let e = Exp::new(self.lead + i as i64, self.ram);
            if e.is_zero() {
                *c = Rational::zero();
            } else if !c.is_zero() {
                *c /= exp_to_rational(e);
            }
        }
        g.normalize();
        let log_part = QSeries::constant(c0, self.trunc);
        super::logseries::LogQSeries::new(vec![g, log_part])
    }
}

impl PartialEq for QSeries {
    /// Agreement on every exponent below the smaller truncation.
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&QSeries> for &QSeries {
            type Output = QSeries;
            fn $m(self, rhs: &QSeries) -> QSeries {
                let f: fn(&QSeries, &QSeries) -> QSeries = $body;
                f(self, rhs)
            }
        }
        impl $tr<QSeries> for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QSeries> for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: &QSeries) -> QSeries {
                (&self).$m(rhs)
            }
        }
        impl $tr<QSeries> for &QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.combine(b, true));
forward_binop!(Sub, sub, |a, b| a.combine(b, false));
forward_binop!(Mul, mul, |a, b| a.product(b));

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.scale(&-Rational::one())
    }
}

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}

pub(crate) fn fmt_exp(e: Exp) -> String {
    if e.is_integer() {
        e.to_integer().to_string()
    } else {
        format!("({}/{})", e.numer(), e.denom())
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let (neg, mag) = if c.is_negative() {
                (true, -c)
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (e.cmp(&Exp::zero()), mag.is_one()) {
                (Ordering::Equal, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "q^{}", fmt_exp(e))?,
                _ => write!(f, "{mag}*q^{}", fmt_exp(e))?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", fmt_exp(self.trunc))
    }
}
