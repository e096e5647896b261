//! c = 4: every vacuum `q^{−1/6}(1 + m₁q + m₂q² + …)` of a third-order
//! equation, then the six equations with rational indices checked against
//! their closed-form solutions.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{ri, sort_records, CandidateRecord, LeadingData, Pipeline};
use crate::error::{Error, Result};
use crate::exactq::rational::{exp_to_rational, positive_divisors};
use crate::exactq::{aux_series, eta_power, int, rat, Aux, Exp, LogQSeries, QSeries, Rational};
use crate::mlde::{
    exponent, frobenius_double_root, frobenius_solve_with, indicial, solve_all, FrobeniusSolution,
    Mlde3, ResonancePolicy, SolutionStatus,
};
use crate::modforms::kaneko_zagier_residual;

const N: i128 = 3_628_800;

/// The equation's `(x, y)` in the `+xE₄` form; `None` at the excluded `m₁ = 124`.
pub fn c4_xy(m1: &Rational) -> Option<(Rational, Rational)> {
    let den = int(124) - m1;
    if den.is_zero() {
        return None;
    }
    let x = -(int(1344) - int(48) * m1) / (int(192) * &den);
    let y = (int(160) * m1 + int(7808)) / (int(6912) * &den);
    Some((x, y))
}

/// `m₂` forced by `m₁`: `10m₁² − (666 + m₂)m₁ + 8(17m₂ − 458) = 0`.
pub fn c4_m2(m1: &Rational) -> Option<Rational> {
    let den = m1 - int(136);
    if den.is_zero() {
        return None;
    }
    Some((int(10) * m1 * m1 - int(666) * m1 - int(3664)) / den)
}

/// The m₂ for which `(m₂ − 2054)² − 3628800` is a square.
pub fn c4_m2_candidates() -> Vec<i128> {
    let mut out = BTreeSet::new();
    for u in positive_divisors(N as u128) {
        let u = u as i128;
        let v = N / u;
        if (u + v) % 2 != 0 {
            continue;
        }
        for s in [1, -1] {
            out.insert(2054 - s * (u + v) / 2);
        }
    }
    out.into_iter().collect()
}

/// `(m₁, m₂)` with `m₁ = (666 + m₂ ± d)/20` and both non-negative integers.
pub fn c4_pairs() -> Vec<(i128, i128)> {
    let mut out = BTreeSet::new();
    for m2 in c4_m2_candidates() {
        if m2 < 0 {
            continue;
        }
        let disc = (m2 - 2054).pow(2) - N;
        let d = disc.isqrt();
        debug_assert_eq!(d * d, disc);
        for num in [666 + m2 + d, 666 + m2 - d] {
            if num >= 0 && num % 20 == 0 {
                out.insert((num / 20, m2));
            }
        }
    }
    out.into_iter().collect()
}

pub fn c4_m1_candidates() -> Vec<i128> {
    let set: BTreeSet<i128> = c4_pairs().into_iter().map(|p| p.0).collect();
    set.into_iter().collect()
}

/// Solutions with any free resonant coefficient taken from `pinned`.
fn solutions(
    m: &Mlde3,
    terms: usize,
    pinned: &[(Rational, Rational)],
) -> Result<Vec<FrobeniusSolution>> {
    solve_all(m, terms)?
        .into_iter()
        .map(
            |s| match (&s.status, pinned.iter().find(|(r, _)| *r == s.root)) {
                (SolutionStatus::ResonantFree { .. }, Some((_, v))) => {
                    frobenius_solve_with(m, &s.root, terms, &ResonancePolicy::Fixed(v.clone()))
                }
                _ => Ok(s),
            },
        )
        .collect()
}

const VACUUM: (i64, i64) = (-1, 6);

/// Free coefficients fixed by the closed forms, keyed by root.
fn pinned_values(m1: i128, terms: usize) -> Vec<(Rational, Rational)> {
    if m1 != 156 || terms < 3 {
        return vec![];
    }
    let f = case4_second(Exp::from_integer(3));
    vec![(rat(-2, 3), f.coeff(exponent(&rat(-2, 3), 2)).unwrap())]
}

/// One record per m₁ candidate.
pub fn c4_search(terms: usize) -> Result<Vec<CandidateRecord>> {
    let mut out: Vec<CandidateRecord> = c4_pairs()
        .into_par_iter()
        .map(|(m1, m2)| -> Result<CandidateRecord> {
            let m1r = ri(m1);
            let (x, y) = c4_xy(&m1r).ok_or(Error::Degenerate)?;
            let m = Mlde3::from_xy(&x, &y);
            let params = [("m1", m1r.clone()), ("m2", ri(m2)), ("x", x), ("y", y)];
            let label = format!("m1={m1}");
            match indicial(&m) {
                Ok(ind) => {
                    let sols = solutions(&m, terms, &pinned_values(m1, terms))?;
                    let vac = rat(VACUUM.0, VACUUM.1);
                    let data = sols
                        .iter()
                        .map(|s| {
                            let name = format!("root {}", s.root);
                            if s.root == vac {
                                LeadingData::vacuum(name, s, terms)
                            } else {
                                LeadingData::module(name, s, terms)
                            }
                        })
                        .collect();
                    Ok(CandidateRecord::new(
                        Pipeline::C4,
                        label,
                        &params,
                        Some(ind),
                        data,
                    ))
                }
                Err(Error::NonRationalRoots) => Ok(CandidateRecord::new(
                    Pipeline::C4,
                    label,
                    &params,
                    None,
                    vec![],
                )),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    sort_records(&mut out);
    Ok(out)
}

fn aux(a: Aux, prec: Exp) -> QSeries {
    aux_series(a, prec)
}

/// `g/ηᵏ` exact below `prec`, for `g` holomorphic at the cusp.
fn over_eta(g: impl Fn(Exp) -> QSeries, k: i64, prec: Exp) -> QSeries {
    let shift = Exp::new(k, 24);
    let p = prec + shift + Exp::one();
    (&g(p) * &eta_power(-k, p)).truncate(prec)
}

fn pw(f: &QSeries, n: i64) -> QSeries {
    f.pow_int(n).unwrap()
}

fn case4_second(prec: Exp) -> QSeries {
    over_eta(
        |p| {
            let h = aux(Aux::H2, p);
            let d = aux(Aux::Delta2, p);
            let h2 = &h * &h;
            let d2 = &d * &d;
            &(&(&h2 * &h2) + &(&h2 * &d2).scale(&int(384))) - &(&d2 * &d2).scale(&int(10272))
        },
        16,
        prec,
    )
}

/// Closed-form solutions for each case, in root order.
pub fn c4_closed_forms(m1: i128, prec: impl Into<Exp>) -> Result<Vec<QSeries>> {
    let prec = prec.into();
    Ok(match m1 {
        16 => {
            let f = |a: i64, b: i64| {
                over_eta(
                    move |p| &pw(&aux(Aux::I3, p), a) * &pw(&aux(Aux::Delta3, p), b),
                    4,
                    prec,
                )
            };
            vec![f(2, 0), f(1, 1), f(0, 2)]
        }
        24 => {
            let p = prec + Exp::one();
            let (a, b) = (aux(Aux::Psi1, p), aux(Aux::Psi2, p));
            let (a5, b5) = (pw(&a, 5), pw(&b, 5));
            let f1 = &(&(&a5 * &a5) + &(&a5 * &b5).scale(&int(14))) - &(&b5 * &b5);
            let f2 = &(&pw(&a, 3) * &pw(&b, 2)) * &(&a5 + &b5.scale(&int(2)));
            let f3 = &(&pw(&a, 2) * &pw(&b, 3)) * &(&a5 - &b5.scale(&rat(1, 2)));
            vec![f1.truncate(prec), f2.truncate(prec), f3.truncate(prec)]
        }
        28 => vec![
            over_eta(|p| aux(Aux::H2, p), 4, prec),
            over_eta(|p| aux(Aux::Delta2, p), 4, prec),
        ],
        156 => {
            let f1 = over_eta(
                |p| {
                    let h = aux(Aux::H2, p);
                    let d = aux(Aux::Delta2, p);
                    &(&h * &d) * &(&(&h * &h) + &(&d * &d).scale(&int(64)))
                },
                16,
                prec,
            );
            let f3 = over_eta(|p| pw(&aux(Aux::Delta2, p), 4), 16, prec);
            vec![case4_second(prec), f1, f3]
        }
        178 => {
            let f2 = over_eta(
                |p| {
                    let i = aux(Aux::I3, p);
                    let d = aux(Aux::Delta3, p);
                    &pw(&i, 6)
                        + &(&aux(Aux::Delta3A, p).scale(&int(270)) + &pw(&d, 6).scale(&int(5832)))
                },
                12,
                prec,
            );
            let f1 = over_eta(
                |p| {
                    let i = aux(Aux::I3, p);
                    let d = aux(Aux::Delta3, p);
                    &(&pw(&i, 2) * &d) * &(&pw(&i, 3) + &pw(&d, 3).scale(&int(135)))
                },
                12,
                prec,
            );
            let f3 = over_eta(
                |p| &aux(Aux::I3, p) * &pw(&aux(Aux::Delta3, p), 5),
                12,
                prec,
            );
            vec![f2, f1, f3]
        }
        _ => vec![],
    })
}

/// `(Δ₂/η⁴)∫H₂ dq/q + s·(H₂/η⁴)∫Δ₂ dq/q`.
pub fn case3_log_combination(sign: &Rational, prec: impl Into<Exp>) -> LogQSeries {
    let prec = prec.into();
    let p = prec + Exp::one();
    let h = aux(Aux::H2, p);
    let d = aux(Aux::Delta2, p);
    let (ih, id) = (h.integrate_dlog(), d.integrate_dlog());
    let h4 = over_eta(|q| aux(Aux::H2, q), 4, p);
    let d4 = over_eta(|q| aux(Aux::Delta2, q), 4, p);
    (&ih.mul_series(&d4) + &id.mul_series(&h4).scale(sign)).truncate(prec)
}

#[derive(Clone, Debug)]
pub struct CaseCheck {
    pub m1: i128,
    pub mlde: Mlde3,
    pub roots: Vec<Rational>,
    /// Each closed form solves the equation.
    pub closed_forms_solve: Vec<bool>,
    /// Each closed form agrees with the solver at its root.
    pub closed_forms_match_solver: Vec<bool>,
    pub notes: Vec<String>,
}

impl CaseCheck {
    pub fn passed(&self) -> bool {
        self.closed_forms_solve
            .iter()
            .chain(&self.closed_forms_match_solver)
            .all(|&b| b)
    }
}

/// Check the closed forms of one of the six rational-index cases to `terms`
/// coefficients.
pub fn c4_case_verify(m1: i128, terms: usize) -> Result<CaseCheck> {
    let (x, y) = c4_xy(&ri(m1)).ok_or(Error::Degenerate)?;
    let m = Mlde3::from_xy(&x, &y);
    let ind = indicial(&m)?;
    let prec = Exp::from_integer(terms as i64) - Exp::one();
    let forms = c4_closed_forms(m1, prec)?;
    let sols = solutions(&m, terms + 2, &pinned_values(m1, terms + 2))?;
    let mut check = CaseCheck {
        m1,
        mlde: m.clone(),
        roots: ind.roots.clone(),
        closed_forms_solve: vec![],
        closed_forms_match_solver: vec![],
        notes: vec![],
    };
    for f in &forms {
        check.closed_forms_solve.push(m.annihilates(f));
        let root = exp_to_rational(f.lead_exp().ok_or(Error::ZeroSeries)?);
        let scale = f.lead_coeff().unwrap().clone();
        let same = sols
            .iter()
            .filter(|s| s.root == root && !s.is_logarithmic())
            .any(|s| s.plain().scale(&scale).truncate(f.trunc()) == *f);
        check.closed_forms_match_solver.push(same);
    }
    if m1 == 28 {
        for f in &forms {
            check.notes.push(format!(
                "Kaneko-Zagier residual vanishes: {}",
                kaneko_zagier_residual(f).is_zero()
            ));
        }
        let root = rat(1, 3);
        let terms_log = terms.min(5);
        let lp = Exp::from_integer(terms_log as i64) - Exp::new(2, 3);
        let minus = case3_log_combination(&int(-1), lp);
        let plus = case3_log_combination(&int(1), lp);
        let ds = frobenius_double_root(&m, &root, terms_log + 1, &int(-2))?;
        let ds = ds.series.truncate(lp);
        check.closed_forms_solve.push(m.apply(&minus).is_zero());
        check.closed_forms_match_solver.push(minus == ds);
        check.notes.push(format!(
            "with + sign the combination solves the equation: {}",
            m.apply(&plus).is_zero()
        ));
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{is_nonneg_int, Verdict};
    use crate::exactq::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn xy_and_m2() {
        assert_eq!(c4_xy(&int(124)), None);
        assert_eq!(c4_xy(&int(16)), Some((rat(-1, 36), rat(1, 72))));
        assert_eq!(c4_xy(&int(24)), Some((rat(-1, 100), rat(91, 5400))));
        assert_eq!(c4_xy(&int(28)), Some((int(0), rat(1, 54))));
        assert_eq!(c4_xy(&int(156)), Some((int(-1), rat(-4, 27))));
        assert_eq!(c4_xy(&int(178)), Some((rat(-25, 36), rat(-7, 72))));
        assert_eq!(c4_xy(&int(271)), Some((rat(-81, 196), rat(-533, 10584))));
        for (m1, m2) in [
            (16, 98),
            (24, 124),
            (28, 134),
            (156, 6790),
            (178, 4634),
            (271, 4076),
        ] {
            assert_eq!(c4_m2(&int(m1)), Some(int(m2)));
        }
    }

    #[test]
    fn candidate_lists() {
        let m2 = c4_m2_candidates();
        assert_eq!(m2.len(), 210);
        assert_eq!((m2[0], *m2.last().unwrap()), (-905147, 909255));
        let m1 = c4_m1_candidates();
        assert_eq!(m1.len(), 133);
        assert_eq!((m1[0], *m1.last().unwrap()), (1, 90856));
        assert!(!m1.contains(&124));
        for (a, b) in c4_pairs() {
            assert_eq!(c4_m2(&ri(a)), Some(ri(b)));
        }
    }

    #[test]
    fn search_verdicts() {
        let recs = c4_search(6).unwrap();
        assert_eq!(recs.len(), 133);
        let rational: Vec<i128> = recs
            .iter()
            .filter(|r| r.indicial.is_some())
            .map(|r| r.param("m1").unwrap().to_integer().try_into().unwrap())
            .collect();
        assert_eq!(rational, vec![16, 24, 28, 156, 178, 271]);
        let v = |m1: i64| {
            recs.iter()
                .find(|r| r.param("m1") == Some(&int(m1)))
                .unwrap()
                .verdict
        };
        for m1 in [16, 24, 156, 178] {
            assert_eq!(v(m1), Verdict::CharacterType, "m1 = {m1}");
        }
        assert_eq!(v(28), Verdict::RejectedLogarithmic);
        assert_eq!(v(271), Verdict::RejectedNonintegral);
        assert_eq!(v(1), Verdict::RejectedNonrationalRoots);
        assert!(recs.iter().all(|r| r.verdict_is_reproducible()));
        for r in &recs {
            if let Some(d) = r.leading_data.iter().find(|d| d.root == rat(-1, 6)) {
                assert_eq!(&d.coefficients[1], r.param("m1").unwrap());
                assert_eq!(&d.coefficients[2], r.param("m2").unwrap());
            }
        }
    }

    #[test]
    fn closed_forms() {
        for m1 in [16, 24, 28, 156, 178] {
            let c = c4_case_verify(m1, 6).unwrap();
            assert!(c.passed(), "{c:?}");
        }
        let c = c4_case_verify(28, 6).unwrap();
        assert!(c.notes[0].ends_with("true") && c.notes[1].ends_with("true"));
        assert!(c.notes[2].ends_with("false"));
    }

    #[test]
    fn printed_expansions() {
        let f = c4_closed_forms(24, 6).unwrap();
        let third = LeadingData::from_series("", &f[2], 6);
        assert_eq!(
            third.coefficients,
            vec![
                q("1"),
                q("13/2"),
                q("30"),
                q("205/2"),
                q("314"),
                q("1713/2")
            ]
        );
        let f = c4_closed_forms(156, 6).unwrap();
        let second = LeadingData::from_series("", &f[0], 5);
        assert_eq!(second.root, rat(-2, 3));
        assert_eq!(
            second.coefficients,
            [1, 496, 22616, 606656, 9782812].map(int).to_vec()
        );
        let third = LeadingData::from_series("", &f[2], 5);
        assert_eq!(
            third.coefficients,
            [1, 32, 528, 6016, 53384].map(int).to_vec()
        );
        let f = c4_closed_forms(178, 6).unwrap();
        assert_eq!(
            LeadingData::from_series("", &f[2], 5).coefficients,
            [1, 23, 272, 2286, 15318].map(int).to_vec()
        );
        assert_eq!(
            LeadingData::from_series("", &f[0], 5).coefficients,
            [1, 318, 8514, 126862, 1269771].map(int).to_vec()
        );
    }

    #[test]
    fn case3_log_solution() {
        let l = case3_log_combination(&int(-1), Exp::new(8, 3));
        let g = l.part(0).unwrap().scale(&int(16));
        let want = [q("-32"), q("-1664/3"), q("-33856/15")];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(g.coeff(exponent(&rat(1, 3), k as i64)), Some(w.clone()));
        }
        assert_eq!(
            l.part(1).unwrap().coeff(exponent(&rat(1, 3), 1)),
            Some(int(8))
        );
    }

    #[test]
    fn case6_values() {
        let (x, y) = c4_xy(&int(271)).unwrap();
        let m = Mlde3::from_xy(&x, &y);
        let s = solve_all(&m, 5).unwrap();
        let roots: Vec<Rational> = s.iter().map(|s| s.root.clone()).collect();
        assert_eq!(roots, vec![rat(-13, 42), rat(-1, 6), rat(41, 42)]);
        assert_eq!(
            s[1].coefficients(5),
            ["1", "271", "4076", "30862", "5029533/29"].map(q).to_vec()
        );
        assert_eq!(
            s[0].coefficients(4)[1..],
            ["1742/7", "188850/49", "10279088/343"].map(q)
        );
        assert_eq!(
            s[2].coefficients(5)[1..],
            ["205/14", "5289/49", "5921425/9947", "186843109/69629"].map(q)
        );
        assert!(is_nonneg_int(&s[1].coefficients(4)[3]));
    }
}
