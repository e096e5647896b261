//! Finite sums `Σ_k (log q)^k · g_k` with q-series parts.

use std::ops::{Add, Sub};

use super::rational::{Exp, Rational};
use super::series::QSeries;

#[derive(Clone, Debug, PartialEq)]
pub struct LogQSeries {
    parts: Vec<QSeries>,
}

impl LogQSeries {
    pub fn new(parts: Vec<QSeries>) -> Self {
        let mut s = LogQSeries { parts };
        s.trim();
        s
    }

    pub fn plain(g: QSeries) -> Self {
        LogQSeries { parts: vec![g] }
    }

    fn trim(&mut self) {
        while self.parts.len() > 1 && self.parts.last().is_some_and(QSeries::is_zero) {
            self.parts.pop();
        }
    }

    pub fn parts(&self) -> &[QSeries] {
        &self.parts
    }

    pub fn part(&self, k: usize) -> Option<&QSeries> {
        self.parts.get(k)
    }

    pub fn degree(&self) -> usize {
        self.parts.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(QSeries::is_zero)
    }

    /// Smallest truncation over the parts.
    pub fn trunc(&self) -> Exp {
        self.parts
            .iter()
            .map(QSeries::trunc)
            .min()
            .expect("at least one part")
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LogQSeries::new(self.parts.iter().map(|p| p.scale(c)).collect())
    }

    pub fn mul_series(&self, f: &QSeries) -> Self {
        LogQSeries::new(self.parts.iter().map(|p| p * f).collect())
    }

    /// `D(g·L^k) = D(g)·L^k + k·g·L^(k−1)` with `D = q·d/dq`, `L = log q`.
    pub fn derive(&self) -> Self {
        let mut out: Vec<QSeries> = self.parts.iter().map(QSeries::derive).collect();
        for k in 1..self.parts.len() {
            let extra = self.parts[k].scale(&Rational::from_integer((k as i64).into()));
            out[k - 1] = &out[k - 1] + &extra;
        }
        LogQSeries::new(out)
    }

    pub fn truncate(&self, bound: Exp) -> Self {
        LogQSeries::new(self.parts.iter().map(|p| p.truncate(bound)).collect())
    }

    fn zip(&self, other: &Self, sub: bool) -> Self {
        let n = self.parts.len().max(other.parts.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let p = match (self.parts.get(k), other.parts.get(k)) {
                (Some(a), Some(b)) => {
                    if sub {
                        a - b
                    } else {
                        a + b
                    }
                }
                (Some(a), None) => a.clone(),
                (None, Some(b)) => {
                    if sub {
                        -b
                    } else {
                        b.clone()
                    }
                }
                (None, None) => unreachable!(),
            };
            out.push(p);
        }
        LogQSeries::new(out)
    }
}

impl Add<&LogQSeries> for &LogQSeries {
    type Output = LogQSeries;
    fn add(self, rhs: &LogQSeries) -> LogQSeries {
        self.zip(rhs, false)
    }
}

impl Sub<&LogQSeries> for &LogQSeries {
    type Output = LogQSeries;
    fn sub(self, rhs: &LogQSeries) -> LogQSeries {
        self.zip(rhs, true)
    }
}

impl std::fmt::Display for LogQSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "[{p}]")?,
                1 => write!(f, "log(q)*[{p}]")?,
                _ => write!(f, "log(q)^{k}*[{p}]")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::rational::{exp, int};

    #[test]
    fn derivative_of_log_term() {
        // D(q·log q) = q·log q + q
        let q = QSeries::monomial(int(1), exp(1, 1), 5);
        let s = LogQSeries::new(vec![QSeries::zero(5), q.clone()]);
        let d = s.derive();
        assert_eq!(d.degree(), 1);
        assert_eq!(d.part(0).unwrap(), &q);
        assert_eq!(d.part(1).unwrap(), &q);
    }

    #[test]
    fn trailing_zero_parts_are_trimmed() {
        let s = LogQSeries::new(vec![QSeries::one(3), QSeries::zero(3)]);
        assert_eq!(s.degree(), 0);
    }
}
