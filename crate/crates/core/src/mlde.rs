//! Third-order monic MLDEs in the canonical form
//!
//! ```text
//! f''' − ½E₂f'' + (½E₂' + P·E₄)f' + Q·E₆f = 0,   ' = q·d/dq,
//! ```
//!
//! their indicial data, and a Frobenius solver that handles resonances
//! (free coefficients or a single logarithmic term).
//!
//! The solver substitutes `Σ aₙq^(λ+n)` into the operator and solves order by
//! order; with `Tᵢ(t) = −½E₂ᵢt² + (½·i·E₂ᵢ + P·E₄ᵢ)t + Q·E₆ᵢ` the coefficient
//! of `q^(λ+n)` gives `aₙ·I(λ+n) = −Σ_{i≥1} aₙ₋ᵢ·Tᵢ(λ+n−i)`, where `I` is the
//! indicial cubic.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactq::rational::{exp_to_rational, rational_to_exp};
use crate::exactq::{divisor_sigma, eisenstein, int, rat, Exp, LogQSeries, QSeries, Rational};
use crate::modforms::{serre_iterate, GradedSeries};
use crate::poly::{rational_roots, Field, Poly, RatFunc};

pub use crate::modforms::kaneko_zagier_residual;

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    FromCh {
        c: Rational,
        h: Rational,
    },
    /// Parameters read off an equation written with `+x·E₄` and `y·E₆`.
    FromXy {
        x: Rational,
        y: Rational,
    },
    FromDn(u32),
    DForm {
        k: Rational,
        alpha: Rational,
    },
    FromRoots,
    Direct,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mlde3 {
    pub p: Rational,
    pub q: Rational,
    pub provenance: Provenance,
}

fn ch_pq<F: Field>(c: &F, h: &F) -> (F, F) {
    let k = |n: i64, d: i64| F::from_rational(&rat(n, d));
    let p = -(h.clone() * h.clone() - k(1, 2) * h.clone() - k(1, 8) * c.clone() * h.clone()
        + k(1, 192) * c.clone() * c.clone()
        + k(1, 24) * c.clone());
    let q = k(1, 24)
        * c.clone()
        * (k(1, 12) * c.clone() + k(1, 2) - h.clone())
        * (h.clone() - k(1, 24) * c.clone());
    (p, q)
}

impl Mlde3 {
    pub fn new(p: Rational, q: Rational) -> Self {
        Mlde3 {
            p,
            q,
            provenance: Provenance::Direct,
        }
    }

    /// The equation whose indices are `{−c/24, h − c/24, c/12 + 1/2 − h}`.
    pub fn from_ch(c: &Rational, h: &Rational) -> Self {
        let (p, q) = ch_pq(c, h);
        Mlde3 {
            p,
            q,
            provenance: Provenance::FromCh {
                c: c.clone(),
                h: h.clone(),
            },
        }
    }

    /// `f''' − ½E₂f'' + (½E₂' + x·E₄)f' + y·E₆f = 0`.
    pub fn from_xy(x: &Rational, y: &Rational) -> Self {
        Mlde3 {
            p: x.clone(),
            q: y.clone(),
            provenance: Provenance::FromXy {
                x: x.clone(),
                y: y.clone(),
            },
        }
    }

    /// The same equation written with `− x·E₄` in the f' coefficient.
    pub fn from_minus_x(x: &Rational, y: &Rational) -> Self {
        Mlde3 {
            p: -x,
            q: y.clone(),
            provenance: Provenance::Direct,
        }
    }

    /// `𝔡³f + x·E₄·𝔡f + y·E₆·f = 0` at weight 0; `𝔡³` contributes `E₄/18`.
    pub fn from_serre(x: &Rational, y: &Rational) -> Self {
        Mlde3 {
            p: x + rat(1, 18),
            q: y.clone(),
            provenance: Provenance::Direct,
        }
    }

    /// The equation satisfied by the characters of the `Dₙ` lattice VOA.
    pub fn from_dn(n: u32) -> Result<Self> {
        if n < 4 {
            return Err(Error::Domain(format!("D_n needs n >= 4, got {n}")));
        }
        let n_ = int(n as i64);
        let p = &n_ / int(48) * (Rational::one() - &n_ / int(4));
        let q = (&n_ / int(24)) * (&n_ / int(24)) * (Rational::one() - &n_ / int(12));
        Ok(Mlde3 {
            p,
            q,
            provenance: Provenance::FromDn(n),
        })
    }

    /// The equation with the given indices (which must sum to 1/2).
    pub fn from_roots(r: [Rational; 3]) -> Result<Self> {
        let s = &r[0] + &r[1] + &r[2];
        if s != rat(1, 2) {
            return Err(Error::Domain(format!("indices sum to {s}, not 1/2")));
        }
        let p = &r[0] * &r[1] + &r[0] * &r[2] + &r[1] * &r[2];
        let q = -(&r[0] * &r[1] * &r[2]);
        Ok(Mlde3 {
            p,
            q,
            provenance: Provenance::FromRoots,
        })
    }

    /// `t³ − t²/2 + P·t + Q`.
    pub fn indicial_poly(&self) -> Poly {
        Poly::new(vec![self.q.clone(), self.p.clone(), rat(-1, 2), int(1)])
    }

    pub fn indicial_at(&self, t: &Rational) -> Rational {
        indicial_at(t, &self.p, &self.q)
    }

    /// Apply the operator; the master oracle for every solution.
    pub fn apply(&self, f: &LogQSeries) -> LogQSeries {
        let lo = f
            .parts()
            .iter()
            .filter(|p| !p.is_zero())
            .map(QSeries::valuation)
            .min();
        let Some(lo) = lo else { return f.clone() };
        let prec = f.trunc() - lo + Exp::one();
        let e2 = eisenstein(2, prec).unwrap();
        let e4 = eisenstein(4, prec).unwrap();
        let e6 = eisenstein(6, prec).unwrap();
        let d1 = f.derive();
        let d2 = d1.derive();
        let d3 = d2.derive();
        let c1 = &e2.derive().scale(&rat(1, 2)) + &e4.scale(&self.p);
        let out = &d3 - &d2.mul_series(&e2).scale(&rat(1, 2));
        let out = &out + &d1.mul_series(&c1);
        &out + &f.mul_series(&e6.scale(&self.q))
    }

    pub fn apply_series(&self, f: &QSeries) -> QSeries {
        self.apply(&LogQSeries::plain(f.clone())).parts()[0].clone()
    }

    pub fn annihilates(&self, f: &QSeries) -> bool {
        self.apply_series(f).is_zero()
    }

    /// `∂L/∂D = 3D² − E₂D + ½E₂' + P·E₄`, the operator `L[g·log q] − log q·L[g]`.
    fn log_derivative_op(&self, g: &QSeries) -> QSeries {
        let prec = g.trunc() - g.valuation() + Exp::one();
        let e2 = eisenstein(2, prec).unwrap();
        let e4 = eisenstein(4, prec).unwrap();
        let d1 = g.derive();
        let d2 = d1.derive();
        let c1 = &e2.derive().scale(&rat(1, 2)) + &e4.scale(&self.p);
        &(&d2.scale(&int(3)) - &(&e2 * &d1)) + &(&c1 * g)
    }

    fn ch(&self) -> Option<(&Rational, &Rational)> {
        match &self.provenance {
            Provenance::FromCh { c, h } => Some((c, h)),
            _ => None,
        }
    }
}

impl fmt::Display for Mlde3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f''' - 1/2 E2 f'' + (1/2 E2' + ({}) E4) f' + ({}) E6 f = 0",
            self.p, self.q
        )
    }
}

fn indicial_at<F: Field>(t: &F, p: &F, q: &F) -> F {
    let half = F::from_rational(&rat(1, 2));
    t.clone() * t.clone() * t.clone() - half * t.clone() * t.clone()
        + p.clone() * t.clone()
        + q.clone()
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndicialData {
    /// Ascending, with multiplicity.
    pub roots: Vec<Rational>,
    /// Index pairs `(i, j)` with `roots[j] − roots[i]` a positive integer `n`.
    pub differences: Vec<(usize, usize, u64)>,
    /// Per root, the steps n ≥ 1 at which `I(root + n) = 0`.
    pub resonance_steps: Vec<Vec<u64>>,
}

impl IndicialData {
    pub fn distinct_roots(&self) -> Vec<Rational> {
        let mut r = self.roots.clone();
        r.dedup();
        r
    }

    pub fn multiplicity(&self, root: &Rational) -> usize {
        self.roots.iter().filter(|r| *r == root).count()
    }

    pub fn has_resonance(&self) -> bool {
        self.resonance_steps.iter().any(|s| !s.is_empty())
    }
}

pub fn indicial(m: &Mlde3) -> Result<IndicialData> {
    let roots = rational_roots(&m.indicial_poly());
    if roots.len() != 3 {
        return Err(Error::NonRationalRoots);
    }
    let mut differences = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let d = &roots[j] - &roots[i];
            if d.is_integer() && d > Rational::zero() {
                let n = d.to_integer().try_into().unwrap_or(u64::MAX);
                differences.push((i, j, n));
            }
        }
    }
    let resonance_steps = (0..3)
        .map(|i| {
            let mut s: Vec<u64> = differences
                .iter()
                .filter(|d| d.0 == i)
                .map(|d| d.2)
                .collect();
            s.sort();
            s.dedup();
            s
        })
        .collect();
    Ok(IndicialData {
        roots,
        differences,
        resonance_steps,
    })
}

/// Eisenstein coefficients `E₂ᵢ, E₄ᵢ, E₆ᵢ` for `i < n`.
struct EisCoeffs {
    e2: Vec<Rational>,
    e4: Vec<Rational>,
    e6: Vec<Rational>,
}

impl EisCoeffs {
    fn new(n: usize) -> Self {
        let prec = Exp::from_integer(n as i64);
        let get = |k| eisenstein(k, prec).unwrap().head(n);
        EisCoeffs {
            e2: get(2),
            e4: get(4),
            e6: get(6),
        }
    }
}

/// `−Σ_{i=1..n} aₙ₋ᵢ·Tᵢ(λ+n−i)`.
fn oracle_rhs<F: Field>(a: &[F], n: usize, lam: &F, p: &F, q: &F, eis: &EisCoeffs) -> F {
    let half = F::from_rational(&rat(1, 2));
    let mut acc = F::zero();
    for i in 1..=n {
        let prev = &a[n - i];
        if *prev == F::zero() {
            continue;
        }
        let t = lam.clone() + F::from_rational(&int((n - i) as i64));
        let e2 = F::from_rational(&eis.e2[i]);
        let e4 = F::from_rational(&eis.e4[i]);
        let e6 = F::from_rational(&eis.e6[i]);
        let ti = -(half.clone() * e2.clone() * t.clone() * t.clone())
            + (half.clone() * F::from_rational(&int(i as i64)) * e2 + p.clone() * e4) * t
            + q.clone() * e6;
        acc = acc - ti * prev.clone();
    }
    acc
}

/// One step of the recursion over any scalar field: with `n = a.len()`,
/// returns `(−Σ aₙ₋ᵢ·Tᵢ(λ+n−i), I(λ+n))`, so that `aₙ·I(λ+n)` must equal the
/// first component. Used to run the recursion with a parameter left free.
pub fn recursion_step<F: Field>(a: &[F], root: &F, p: &F, q: &F) -> (F, F) {
    let n = a.len();
    let eis = EisCoeffs::new(n + 1);
    let t = root.clone() + F::from_rational(&int(n as i64));
    (oracle_rhs(a, n, root, p, q, &eis), indicial_at(&t, p, q))
}

/// How a free coefficient at a resonance with vanishing obstruction is fixed.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum ResonancePolicy {
    /// Set it to zero.
    Zero,
    /// Use the given value (first resonance only; later ones get zero).
    Fixed(Rational),
    /// For equations built from (c, h): rerun the recursion with h as an
    /// indeterminate, cancel, and evaluate; falls back to zero at a pole.
    #[default]
    Continue,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FreeRule {
    Zero,
    Fixed,
    Continued,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolutionStatus {
    Generic,
    ResonantFree {
        step: usize,
        value: Rational,
        rule: FreeRule,
    },
    /// `g + C·log q·f_partner`; `step` is the resonance where the obstruction
    /// appeared (0 for the second solution at a double root).
    Logarithmic {
        step: usize,
        partner_root: Rational,
        log_coeff: Rational,
    },
}

#[derive(Clone, Debug)]
pub struct FrobeniusSolution {
    pub root: Rational,
    pub status: SolutionStatus,
    pub series: LogQSeries,
    /// A solution that may be added with any coefficient (the free family),
    /// present whenever a resonance occurred.
    pub partner: Option<QSeries>,
}

impl FrobeniusSolution {
    /// The power-series part (log-degree 0).
    pub fn plain(&self) -> &QSeries {
        &self.series.parts()[0]
    }

    pub fn log_part(&self) -> Option<&QSeries> {
        self.series.part(1)
    }

    pub fn is_logarithmic(&self) -> bool {
        matches!(self.status, SolutionStatus::Logarithmic { .. })
    }

    /// Coefficients of the plain part at `root + n`, `n < terms`.
    pub fn coefficients(&self, terms: usize) -> Vec<Rational> {
        let s = self.plain();
        (0..terms)
            .map(|n| {
                let e = rational_to_exp(&(&self.root + int(n as i64))).unwrap();
                s.coeff(e).unwrap_or_else(Rational::zero)
            })
            .collect()
    }
}

/// Solve at `root` with `terms` coefficients (exponents below `root + terms`)
/// using the default policy: continuation in h for equations built from
/// (c, h), zero otherwise.
pub fn frobenius_solve(m: &Mlde3, root: &Rational, terms: usize) -> Result<FrobeniusSolution> {
    let policy = if m.ch().is_some() {
        ResonancePolicy::Continue
    } else {
        ResonancePolicy::Zero
    };
    frobenius_solve_with(m, root, terms, &policy)
}

pub fn frobenius_solve_with(
    m: &Mlde3,
    root: &Rational,
    terms: usize,
    policy: &ResonancePolicy,
) -> Result<FrobeniusSolution> {
    if !m.indicial_at(root).is_zero() {
        return Err(Error::NotAnIndicialRoot(root.clone()));
    }
    let eis = EisCoeffs::new(terms.max(1));
    let mut a: Vec<Rational> = vec![Rational::one()];
    let mut status = SolutionStatus::Generic;
    let mut partner: Option<QSeries> = None;
    let mut forcing: Option<QSeries> = None;
    let mut fixed_used = false;
    let mut all_continued = true;
    for n in 1..terms {
        let mut r = oracle_rhs(&a, n, root, &m.p, &m.q, &eis);
        let t = root + int(n as i64);
        if let Some(fc) = &forcing {
            r -= fc.coeff(rational_to_exp(&t).unwrap()).unwrap();
        }
        let d = m.indicial_at(&t);
        if !d.is_zero() {
            a.push(r / d);
            continue;
        }
        if r.is_zero() {
            let (value, rule) = match policy {
                ResonancePolicy::Fixed(v) if !fixed_used => {
                    fixed_used = true;
                    all_continued = false;
                    (v.clone(), FreeRule::Fixed)
                }
                ResonancePolicy::Continue if all_continued && forcing.is_none() => {
                    match continued_value(m, root, n, &eis) {
                        Some(v) => (v, FreeRule::Continued),
                        None => {
                            all_continued = false;
                            (Rational::zero(), FreeRule::Zero)
                        }
                    }
                }
                _ => {
                    all_continued = false;
                    (Rational::zero(), FreeRule::Zero)
                }
            };
            if partner.is_none() {
                partner = Some(
                    frobenius_solve_with(m, &t, terms - n, &ResonancePolicy::Zero)?
                        .plain()
                        .clone(),
                );
            }
            if matches!(status, SolutionStatus::Generic) {
                status = SolutionStatus::ResonantFree {
                    step: n,
                    value: value.clone(),
                    rule,
                };
            }
            a.push(value);
            continue;
        }
        // Nonzero obstruction: one logarithmic term against the partner.
        if forcing.is_some() {
            return Err(Error::UnsupportedLogDegree);
        }
        let p_sol = frobenius_solve_with(m, &t, terms - n, &ResonancePolicy::Zero)?;
        if p_sol.is_logarithmic() {
            return Err(Error::UnsupportedLogDegree);
        }
        let fp = p_sol.plain().clone();
        let l1 = m.log_derivative_op(&fp);
        let lead = l1.coeff(rational_to_exp(&t).unwrap()).unwrap();
        if lead.is_zero() {
            return Err(Error::UnsupportedLogDegree);
        }
        let cst = &r / &lead;
        forcing = Some(l1.scale(&cst));
        let value = match policy {
            ResonancePolicy::Fixed(v) if !fixed_used => {
                fixed_used = true;
                v.clone()
            }
            _ => Rational::zero(),
        };
        a.push(value);
        status = SolutionStatus::Logarithmic {
            step: n,
            partner_root: t.clone(),
            log_coeff: cst.clone(),
        };
        partner = Some(fp);
        all_continued = false;
    }
    let g = series_from(root, a, terms)?;
    let series = match (&status, &partner) {
        (SolutionStatus::Logarithmic { log_coeff, .. }, Some(fp)) => LogQSeries::new(vec![
            g,
            fp.scale(log_coeff).truncate(root_bound(root, terms)?),
        ]),
        _ => LogQSeries::plain(g),
    };
    Ok(FrobeniusSolution {
        root: root.clone(),
        status,
        series,
        partner,
    })
}

fn root_bound(root: &Rational, terms: usize) -> Result<Exp> {
    rational_to_exp(&(root + int(terms as i64)))
        .ok_or_else(|| Error::Domain("exponent too large".into()))
}

fn series_from(root: &Rational, a: Vec<Rational>, terms: usize) -> Result<QSeries> {
    let start = rational_to_exp(root).ok_or_else(|| Error::Domain("exponent too large".into()))?;
    Ok(QSeries::new(start, Exp::one(), a, root_bound(root, terms)?))
}

/// The index branch `λ(h)` among `−c/24, h − c/24, c/12 + 1/2 − h` that
/// equals `root` at the actual h, as a polynomial in h.
fn root_branch(c: &Rational, h: &Rational, root: &Rational) -> Option<RatFunc> {
    let hv = RatFunc::var();
    let k = |r: Rational| RatFunc::from_rational(&r);
    let branches = [
        (-c / int(24), k(-c / int(24))),
        (h - c / int(24), hv.clone() - k(c / int(24))),
        (
            c / int(12) + rat(1, 2) - h,
            k(c / int(12) + rat(1, 2)) - hv.clone(),
        ),
    ];
    branches
        .into_iter()
        .find(|(v, _)| v == root)
        .map(|(_, f)| f)
}

/// `aₙ` from the recursion run with h indeterminate, after cancellation.
fn continued_value(m: &Mlde3, root: &Rational, n: usize, eis: &EisCoeffs) -> Option<Rational> {
    let (c, h) = m.ch()?;
    let lam = root_branch(c, h, root)?;
    let (p, q) = ch_pq(&RatFunc::from_rational(c), &RatFunc::var());
    let mut a = vec![RatFunc::one()];
    for k in 1..=n {
        let t = lam.clone() + RatFunc::from_rational(&int(k as i64));
        let d = indicial_at(&t, &p, &q);
        if d.is_zero() {
            return None;
        }
        let r = oracle_rhs(&a, k, &lam, &p, &q, eis);
        a.push(r / d);
    }
    a[n].eval(h)
}

/// Non-logarithmic second solution at a double root: `g + log q·f` where `f`
/// is the plain solution. `b0` is the free coefficient of `q^root` in `g`.
pub fn frobenius_double_root(
    m: &Mlde3,
    root: &Rational,
    terms: usize,
    b0: &Rational,
) -> Result<FrobeniusSolution> {
    let data = indicial(m)?;
    if data.multiplicity(root) != 2 {
        return Err(Error::Domain(format!("{root} is not a double index")));
    }
    let f = frobenius_solve(m, root, terms)?;
    if f.is_logarithmic() {
        return Err(Error::UnsupportedLogDegree);
    }
    let fp = f.plain().clone();
    let forcing = m.log_derivative_op(&fp);
    let eis = EisCoeffs::new(terms.max(1));
    let mut b = vec![b0.clone()];
    for n in 1..terms {
        let t = root + int(n as i64);
        let r = oracle_rhs(&b, n, root, &m.p, &m.q, &eis)
            - forcing.coeff(rational_to_exp(&t).unwrap()).unwrap();
        let d = m.indicial_at(&t);
        if d.is_zero() {
            if !r.is_zero() {
                return Err(Error::UnsupportedLogDegree);
            }
            b.push(Rational::zero());
        } else {
            b.push(r / d);
        }
    }
    let g = series_from(root, b, terms)?;
    Ok(FrobeniusSolution {
        root: root.clone(),
        status: SolutionStatus::Logarithmic {
            step: 0,
            partner_root: root.clone(),
            log_coeff: Rational::one(),
        },
        series: LogQSeries::new(vec![g, fp.clone()]),
        partner: Some(fp),
    })
}

/// One solution per index with multiplicity, ascending: a double index
/// contributes the plain solution and then the logarithmic one.
pub fn solve_all(m: &Mlde3, terms: usize) -> Result<Vec<FrobeniusSolution>> {
    let data = indicial(m)?;
    let mut out = Vec::new();
    for r in data.distinct_roots() {
        match data.multiplicity(&r) {
            1 => out.push(frobenius_solve(m, &r, terms)?),
            2 => {
                out.push(frobenius_solve(m, &r, terms)?);
                out.push(frobenius_double_root(m, &r, terms, &Rational::zero())?);
            }
            _ => return Err(Error::UnsupportedLogDegree),
        }
    }
    Ok(out)
}

/// The recursion in its expanded (c, h) form:
///
/// `(n+λ+c/24)(n+λ+c/24−h)(n+λ−c/12−1/2+h)·aₙ = Σᵢ {(λ+n−i)(12(2i−λ−n)σ₁(i)
///  + (5/4)(c²+8c−24hc−96h+192h²)σ₃(i)) − (7/96)c(c−24h)(c−12h+6)σ₅(i)}·aₙ₋ᵢ`.
///
/// Kept separate from the solver as a cross-check. A vanishing left side is
/// resolved by rerunning with h indeterminate; a genuine pole is an error.
pub fn printed_recursion(
    c: &Rational,
    h: &Rational,
    root: &Rational,
    terms: usize,
) -> Result<Vec<Rational>> {
    let sig = Sigmas::new(terms);
    let mut a = vec![Rational::one()];
    for n in 1..terms {
        let (lhs, rhs) = printed_step(c, h, root, &a, n, &sig);
        if !lhs.is_zero() {
            a.push(rhs / lhs);
            continue;
        }
        let lam = root_branch(c, h, root).ok_or(Error::ResonantStep(n))?;
        let cf = RatFunc::from_rational(c);
        let hv = RatFunc::var();
        let mut s = vec![RatFunc::one()];
        for k in 1..=n {
            let (l, r) = printed_step(&cf, &hv, &lam, &s, k, &sig);
            if l.is_zero() {
                return Err(Error::ResonantStep(n));
            }
            s.push(r / l);
        }
        a.push(s[n].eval(h).ok_or(Error::ResonantStep(n))?);
    }
    Ok(a)
}

struct Sigmas {
    s1: Vec<Rational>,
    s3: Vec<Rational>,
    s5: Vec<Rational>,
}

impl Sigmas {
    fn new(n: usize) -> Self {
        let get = |m| {
            (0..n.max(1))
                .map(|i| {
                    if i == 0 {
                        Rational::zero()
                    } else {
                        Rational::from_integer(divisor_sigma(m, i as u64).unwrap())
                    }
                })
                .collect()
        };
        Sigmas {
            s1: get(1),
            s3: get(3),
            s5: get(5),
        }
    }
}

fn printed_step<F: Field>(c: &F, h: &F, lam: &F, a: &[F], n: usize, sig: &Sigmas) -> (F, F) {
    let k = |r: Rational| F::from_rational(&r);
    let nn = k(int(n as i64));
    let base = nn.clone() + lam.clone();
    let lhs = (base.clone() + c.clone() * k(rat(1, 24)))
        * (base.clone() + c.clone() * k(rat(1, 24)) - h.clone())
        * (base.clone() - c.clone() * k(rat(1, 12)) - k(rat(1, 2)) + h.clone());
    let w3 = k(rat(5, 4))
        * (c.clone() * c.clone() + k(int(8)) * c.clone()
            - k(int(24)) * h.clone() * c.clone()
            - k(int(96)) * h.clone()
            + k(int(192)) * h.clone() * h.clone());
    let w5 = k(rat(7, 96))
        * c.clone()
        * (c.clone() - k(int(24)) * h.clone())
        * (c.clone() - k(int(12)) * h.clone() + k(int(6)));
    let mut rhs = F::zero();
    for i in 1..=n {
        if a[n - i] == F::zero() {
            continue;
        }
        let ii = k(int(i as i64));
        let t = lam.clone() - ii.clone() + nn.clone();
        let term = t
            * (k(int(12)) * (k(int(2)) * ii - lam.clone() - nn.clone()) * k(sig.s1[i].clone())
                + w3.clone() * k(sig.s3[i].clone()))
            - w5.clone() * k(sig.s5[i].clone());
        rhs = rhs + term * a[n - i].clone();
    }
    (lhs, rhs)
}

/// First index where two coefficient lists differ, with both values.
#[derive(Clone, Debug, PartialEq)]
pub struct Discrepancy {
    pub index: usize,
    pub printed: Rational,
    pub solver: Rational,
}

/// Compare [`printed_recursion`] with [`frobenius_solve`] on `terms`
/// coefficients. `Ok(None)` means agreement.
pub fn compare_printed(
    c: &Rational,
    h: &Rational,
    root: &Rational,
    terms: usize,
) -> Result<Option<Discrepancy>> {
    let printed = printed_recursion(c, h, root, terms)?;
    let sol = frobenius_solve(&Mlde3::from_ch(c, h), root, terms)?;
    let ours = sol.coefficients(terms);
    Ok(printed
        .iter()
        .zip(&ours)
        .enumerate()
        .find(|(_, (p, o))| p != o)
        .map(|(index, (p, o))| Discrepancy {
            index,
            printed: p.clone(),
            solver: o.clone(),
        }))
}

/// `𝔡ₖ³f + α·E₄·𝔡ₖf + (k(k+2)(k+4)/1728 + kα/12)·E₆·f` on a weight-k series.
#[derive(Clone, Debug, PartialEq)]
pub struct DForm {
    pub k: Rational,
    pub alpha: Rational,
}

impl DForm {
    pub fn new(k: Rational, alpha: Rational) -> Self {
        DForm { k, alpha }
    }

    fn e6_coeff(&self) -> Rational {
        let k = &self.k;
        k * (k + int(2)) * (k + int(4)) / int(1728) + k * &self.alpha / int(12)
    }

    pub fn residual(&self, f: &QSeries) -> QSeries {
        let g = GradedSeries::new(f.clone(), self.k.clone(), 1);
        let d1 = serre_iterate(&g, 1).series;
        let d3 = serre_iterate(&g, 3).series;
        let prec = f.trunc() - f.valuation() + Exp::one();
        let e4 = eisenstein(4, prec).unwrap();
        let e6 = eisenstein(6, prec).unwrap();
        &(&d3 + &(&e4 * &d1).scale(&self.alpha)) + &(&e6 * f).scale(&self.e6_coeff())
    }

    /// At weight 0 the operator is canonical with `P = α + 1/18`, `Q = 0`.
    pub fn to_mlde3(&self) -> Option<Mlde3> {
        self.k.is_zero().then(|| Mlde3 {
            p: &self.alpha + rat(1, 18),
            q: Rational::zero(),
            provenance: Provenance::DForm {
                k: self.k.clone(),
                alpha: self.alpha.clone(),
            },
        })
    }
}

/// The exponent `root + n` as an [`Exp`].
pub fn exponent(root: &Rational, n: i64) -> Exp {
    rational_to_exp(&(root + int(n))).expect("small exponent")
}

/// Roots as exact exponents.
pub fn root_exp(r: &Rational) -> Exp {
    rational_to_exp(r).expect("small exponent")
}

pub fn exp_rat(e: Exp) -> Rational {
    exp_to_rational(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::{eta_power, exp, parse_rational};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn ch_construction_and_indices() {
        let m = Mlde3::from_ch(&int(8), &rat(1, 2));
        assert_eq!((m.p.clone(), m.q.clone()), (rat(-1, 6), rat(1, 27)));
        assert_eq!(
            indicial(&m).unwrap().roots,
            vec![rat(-1, 3), rat(1, 6), rat(2, 3)]
        );
        let m = Mlde3::from_ch(&int(16), &int(2));
        assert_eq!((m.p.clone(), m.q.clone()), (int(-1), rat(-4, 27)));
        let m = Mlde3::from_ch(&int(16), &int(1));
        assert_eq!(
            indicial(&m).unwrap().roots,
            vec![rat(-2, 3), rat(1, 3), rat(5, 6)]
        );
        assert!(Mlde3::from_ch(&int(12), &rat(1, 2)).q.is_zero());
    }

    #[test]
    fn dn_parameters() {
        let d16 = Mlde3::from_dn(16).unwrap();
        let ch = Mlde3::from_ch(&int(16), &int(2));
        assert_eq!((d16.p, d16.q), (ch.p, ch.q));
        let d28 = Mlde3::from_dn(28).unwrap();
        assert_eq!((d28.p, d28.q), (rat(-7, 2), rat(-49, 27)));
        let d20 = Mlde3::from_dn(20).unwrap();
        assert_eq!((d20.p, d20.q), (rat(-5, 3), rat(-25, 54)));
        assert!(Mlde3::from_dn(3).is_err());
    }

    #[test]
    fn non_rational_indices_flagged() {
        assert_eq!(
            indicial(&Mlde3::new(int(1), int(1))),
            Err(Error::NonRationalRoots)
        );
    }

    #[test]
    fn resonance_steps_recorded() {
        // (16, −1): −5/3 → −2/3 is one step.
        let d = indicial(&Mlde3::from_ch(&int(16), &int(-1))).unwrap();
        assert_eq!(d.roots, vec![rat(-5, 3), rat(-2, 3), rat(17, 6)]);
        assert_eq!(d.resonance_steps, vec![vec![1], vec![], vec![]]);
    }

    #[test]
    fn vacuum_c8_is_h_independent() {
        for h in [rat(1, 2), rat(1, 5), int(1), rat(-1, 2)] {
            let m = Mlde3::from_ch(&int(8), &h);
            let s = frobenius_solve(&m, &rat(-1, 3), 5).unwrap();
            assert_eq!(
                s.coefficients(5),
                ints(&[1, 248, 4124, 34752, 213126]),
                "h = {h}"
            );
            assert!(m.apply(&s.series).is_zero());
        }
    }

    #[test]
    fn continuation_resolves_the_removable_resonance() {
        // (16, 1): −2/3 → 1/3 resonates, and the obstruction vanishes.
        let m = Mlde3::from_ch(&int(16), &int(1));
        let s = frobenius_solve(&m, &rat(-2, 3), 5).unwrap();
        assert_eq!(s.coefficients(5), ints(&[1, 496, 69752, 2115008, 34670620]));
        assert!(matches!(
            s.status,
            SolutionStatus::ResonantFree {
                step: 1,
                rule: FreeRule::Continued,
                ..
            }
        ));
        let z = frobenius_solve_with(&m, &rat(-2, 3), 5, &ResonancePolicy::Zero).unwrap();
        assert_eq!(z.coefficients(2), ints(&[1, 0]));
        assert!(m.apply(&z.series).is_zero());
    }

    #[test]
    fn c16_h1_second_solution_times_eta16() {
        let m = Mlde3::from_ch(&int(16), &int(1));
        let s = frobenius_solve(&m, &rat(1, 3), 7).unwrap();
        let e = (s.plain() * &eta_power(16, 8)).truncate(exp(7, 1));
        assert_eq!(e.lead_exp(), Some(exp(1, 1)));
        assert_eq!(e.head(6), ints(&[1, 120, 2060, 15424, 73518, 263584]));
    }

    #[test]
    fn logarithmic_at_h_minus_one() {
        let m = Mlde3::from_ch(&int(16), &int(-1));
        let s = frobenius_solve(&m, &rat(-5, 3), 6).unwrap();
        match &s.status {
            SolutionStatus::Logarithmic {
                log_coeff,
                partner_root,
                step,
            } => {
                assert_eq!(log_coeff, &rat(7680, 7));
                assert_eq!(partner_root, &rat(-2, 3));
                assert_eq!(*step, 1);
            }
            other => panic!("{other:?}"),
        }
        assert!(m.apply(&s.series).is_zero());
        // The printed free value propagates to the printed next coefficient.
        let f = frobenius_solve_with(
            &m,
            &rat(-5, 3),
            4,
            &ResonancePolicy::Fixed(q("1254592/1617")),
        )
        .unwrap();
        assert_eq!(f.coefficients(3)[2], q("-800544692/1617"));
        assert!(m.apply(&f.series).is_zero());
        // Log part is proportional to the partner.
        let lp = f.log_part().unwrap();
        let fp = f.partner.as_ref().unwrap();
        assert!((lp - &fp.scale(&rat(7680, 7))).is_zero());
    }

    #[test]
    fn logarithmic_at_h_three_quarters() {
        let m = Mlde3::from_ch(&int(16), &rat(3, 4));
        let d = indicial(&m).unwrap();
        assert_eq!(d.roots, vec![rat(-2, 3), rat(1, 12), rat(13, 12)]);
        let s = frobenius_solve(&m, &rat(1, 12), 5).unwrap();
        match &s.status {
            SolutionStatus::Logarithmic { log_coeff, .. } => assert_eq!(log_coeff, &rat(180, 7)),
            other => panic!("{other:?}"),
        }
        assert!(m.apply(&s.series).is_zero());
        let f2 = frobenius_solve(&m, &rat(13, 12), 4).unwrap();
        assert_eq!(
            f2.coefficients(4),
            vec![int(1), rat(416, 11), rat(7709, 11), rat(1799980, 209)]
        );
    }

    #[test]
    fn not_an_index() {
        let m = Mlde3::from_ch(&int(8), &rat(1, 2));
        assert_eq!(
            frobenius_solve(&m, &int(0), 3).unwrap_err(),
            Error::NotAnIndicialRoot(int(0))
        );
    }

    #[test]
    fn printed_recursion_agrees() {
        for (c, h) in [(int(8), rat(1, 2)), (int(16), int(1)), (int(16), int(2))] {
            for r in indicial(&Mlde3::from_ch(&c, &h)).unwrap().distinct_roots() {
                assert_eq!(
                    compare_printed(&c, &h, &r, 10).unwrap(),
                    None,
                    "({c}, {h}) at {r}"
                );
            }
        }
        let a = printed_recursion(&int(8), &int(1), &rat(-1, 3), 3).unwrap();
        assert_eq!(a, ints(&[1, 248, 4124]));
    }

    #[test]
    fn printed_recursion_reports_genuine_poles() {
        let e = printed_recursion(&int(16), &int(-1), &rat(-5, 3), 3).unwrap_err();
        assert_eq!(e, Error::ResonantStep(1));
    }

    #[test]
    fn double_root_log_solution() {
        // (P, Q) with indices {−1/6, 1/3, 1/3}.
        let m = Mlde3::from_roots([rat(-1, 6), rat(1, 3), rat(1, 3)]).unwrap();
        let all = solve_all(&m, 6).unwrap();
        assert_eq!(all.len(), 3);
        for s in &all {
            assert!(m.apply(&s.series).is_zero());
        }
        assert!(all[2].is_logarithmic());
    }

    #[test]
    fn dform_operators() {
        let e4 = eisenstein(4, 15).unwrap();
        for a in [int(0), int(1), rat(-5, 3), rat(7, 11)] {
            assert!(DForm::new(int(4), a).residual(&e4).is_zero());
        }
        let e4sq = &e4 * &e4;
        assert!(DForm::new(int(8), rat(2, 9)).residual(&e4sq).is_zero());
        // At weight 0 the operator is the canonical one with P = α + 1/18.
        let d = DForm::new(int(0), rat(-1, 3));
        let m = d.to_mlde3().unwrap();
        let ch = Mlde3::from_ch(&int(8), &rat(1, 3));
        assert_eq!((m.p.clone(), m.q.clone()), (ch.p.clone(), ch.q.clone()));
        let f = QSeries::from_head(exp(-1, 3), ints(&[3, -1, 4, 1, -5, 9]));
        assert_eq!(d.residual(&f), ch.apply_series(&f));
    }
}
