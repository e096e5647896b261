//! c = 16: integrality of the second coefficient of the h-character, the
//! Diophantine scan it reduces to, the closure and pole filters, and the
//! logarithmic equations at h = −1 and h = 3/4.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;

use super::{is_nonneg_int, ri, sort_records, CandidateRecord, LeadingData, Pipeline, Verdict};
use crate::error::{Error, Result};
use crate::exactq::rational::positive_divisors;
use crate::exactq::{int, rat, Exp, Rational};
use crate::lattice::{bw_characters, dn_characters, CharacterTriple};
use crate::mlde::{frobenius_solve, indicial, solve_all, FrobeniusSolution, Mlde3, SolutionStatus};

fn c16() -> Rational {
    int(16)
}

/// `8(60h³ − 277h² + 437h − 186)/((h + 1)(4h − 3))`.
pub fn c16_b1(h: &Rational) -> Result<Rational> {
    let den = (h + int(1)) * (int(4) * h - int(3));
    if den.is_zero() {
        return Err(Error::DegenerateH(h.clone()));
    }
    let num = int(60) * h * h * h - int(277) * h * h + int(437) * h - int(186);
    Ok(int(8) * num / den)
}

/// `n = (b₁ − 120h + 584)·y = 120y(37h − 27)/((h + 1)(4h − 3))`.
pub fn c16_n(h: &Rational, y: i64) -> Result<Rational> {
    let den = (h + int(1)) * (int(4) * h - int(3));
    if den.is_zero() {
        return Err(Error::DegenerateH(h.clone()));
    }
    Ok(int(120 * y) * (int(37) * h - int(27)) / den)
}

/// The weight swap `h ↦ c/8 + 1/2 − h`, which leaves the equation unchanged.
pub fn partner(h: &Rational) -> Rational {
    rat(5, 2) - h
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiophantineSolution {
    pub n: i128,
    /// Square root of the quadratic's discriminant (non-negative).
    pub d: i128,
    pub hs: Vec<Rational>,
}

/// Integer solutions of `(49n − 30360y − 7d)(49n − 30360y + 7d) = −44236800y²`
/// over all sign patterns, with the rational roots h of
/// `4nh² + (n − 4440y)h − 3(n − 1080y) = 0`.
pub fn c16_diophantine(y: i64) -> Result<Vec<DiophantineSolution>> {
    if y < 1 {
        return Err(Error::Domain("y must be a positive integer".into()));
    }
    let y = y as i128;
    let rhs = 44_236_800i128 * y * y;
    let divs = positive_divisors(rhs as u128);
    let mut seen: BTreeMap<i128, i128> = BTreeMap::new();
    for &u in &divs {
        let u = u as i128;
        let v = rhs / u;
        for (a, b) in [(u, -v), (-u, v)] {
            // a = A − 7d, b = A + 7d with A = 49n − 30360y.
            if (a + b) % 2 != 0 || (b - a) % 14 != 0 {
                continue;
            }
            let big_a = (a + b) / 2;
            if (big_a + 30360 * y) % 49 != 0 {
                continue;
            }
            let n = (big_a + 30360 * y) / 49;
            let d = ((b - a) / 14).abs();
            seen.insert(n, d);
        }
    }
    let out = seen
        .into_iter()
        .map(|(n, d)| {
            let mut hs: Vec<Rational> = if n == 0 {
                vec![rat(27, 37)]
            } else {
                let b = ri(n - 4440 * y);
                vec![(-&b + ri(d)) / ri(8 * n), (-&b - ri(d)) / ri(8 * n)]
            };
            hs.sort();
            hs.dedup();
            DiophantineSolution { n, d, hs }
        })
        .collect();
    Ok(out)
}

/// `49·disc(4n, n − 4440y, −3(n − 1080y)) = (49n − 30360y)² + 44236800y²`.
pub fn discriminant_identity_holds(n: i128, y: i128) -> bool {
    let disc = (n - 4440 * y).pow(2) + 48 * n * (n - 1080 * y);
    49 * disc == (49 * n - 30360 * y).pow(2) + 44_236_800 * y * y
}

/// Every rational h with `y·b₁` an integer, sorted.
pub fn c16_h_candidates(y: i64) -> Result<Vec<Rational>> {
    let set: BTreeSet<Rational> = c16_diophantine(y)?.into_iter().flat_map(|s| s.hs).collect();
    Ok(set.into_iter().collect())
}

/// The h with `y·b₁` a non-negative integer.
pub fn c16_integrality_filter(y: i64, hs: &[Rational]) -> Vec<Rational> {
    hs.iter()
        .filter(|h| {
            c16_b1(h)
                .map(|b| is_nonneg_int(&(b * int(y))))
                .unwrap_or(false)
        })
        .cloned()
        .collect()
}

/// The h whose partner `5/2 − h` is also in the set.
pub fn c16_closure_filter(hs: &[Rational]) -> Vec<Rational> {
    let set: BTreeSet<&Rational> = hs.iter().collect();
    hs.iter()
        .filter(|h| set.contains(&partner(h)))
        .cloned()
        .collect()
}

fn b1_data(label: &str, h: &Rational, y: i64) -> LeadingData {
    let root = h - rat(2, 3);
    match c16_b1(h) {
        Ok(b) => LeadingData::new(label, root, int(y), vec![int(1), b]),
        Err(_) => {
            let mut d = LeadingData::new(label, root, int(y), vec![int(1)]);
            d.logarithmic = true;
            d
        }
    }
}

/// One record per Diophantine h: the h-character and its partner, each
/// normalised with leading coefficient y.
pub fn c16_candidate_records(y: i64) -> Result<Vec<CandidateRecord>> {
    let mut out: Vec<CandidateRecord> = c16_diophantine(y)?
        .into_par_iter()
        .flat_map_iter(|s| {
            s.hs.clone().into_iter().map(move |h| {
                let ind = indicial(&Mlde3::from_ch(&c16(), &h)).ok();
                let data = vec![b1_data("f2", &h, y), b1_data("f3", &partner(&h), y)];
                CandidateRecord::new(
                    Pipeline::C16,
                    format!("h={h}"),
                    &[
                        ("h", h.clone()),
                        ("n", ri(s.n)),
                        ("d", ri(s.d)),
                        ("y", int(y)),
                    ],
                    ind,
                    data,
                )
            })
        })
        .collect();
    sort_records(&mut out);
    Ok(out)
}

pub const A4_POLES: [(i64, i64); 8] = [
    (-4, 1),
    (-3, 1),
    (-2, 1),
    (-1, 1),
    (-3, 4),
    (-1, 4),
    (1, 4),
    (3, 4),
];

/// Closed form of the q⁴ coefficient of the monic solution at `h − 2/3`.
pub fn a4_closed_form(h: &Rational) -> Result<Rational> {
    if A4_POLES.iter().any(|&(n, d)| *h == rat(n, d)) {
        return Err(Error::DegenerateH(h.clone()));
    }
    let r = |n: i64| int(n);
    let big = |s: &str| Rational::from_integer(s.parse().unwrap());
    let poly = big("108840475660") - big("17142532250") * h + big("2159171400") * h * h
        - r(190224000) * h * h * h
        + r(8640000) * h * h * h * h;
    let poles = -big("1279954780160") / (r(11) * (h + r(2)))
        + big("10485088911360") / (r(13) * (h + r(3)))
        - big("416697727057920") / (r(323) * (h + r(4)))
        + r(92570400) / (r(209) * (r(4) * h - r(3)))
        - r(703761520) / (r(221) * (r(4) * h - r(1)))
        - r(100245600) / (r(4) * h + r(1))
        + big("2471182560") / (r(4) * h + r(3))
        + big("2320465920") / (h + r(1));
    Ok(poly + poles)
}

/// The solver's q⁴ coefficient at `h − 2/3`.
pub fn a4_solver(h: &Rational) -> Result<Rational> {
    let sol = frobenius_solve(&Mlde3::from_ch(&c16(), h), &(h - rat(2, 3)), 5)?;
    if sol.is_logarithmic() {
        return Err(Error::DegenerateH(h.clone()));
    }
    Ok(sol.coefficients(5)[4].clone())
}

/// Equations shared by `h` and `5/2 − h` are represented by the integral member
/// when there is one, else by the smaller.
pub fn representative(h: &Rational) -> Rational {
    let p = partner(h);
    match (h.is_integer(), p.is_integer()) {
        (true, _) => h.clone(),
        (false, true) => p,
        _ => h.clone().min(p),
    }
}

fn lattice_for(h: &Rational, prec: Exp) -> Result<Option<CharacterTriple>> {
    Ok(if *h == int(1) {
        Some(bw_characters(prec))
    } else if *h == int(2) {
        Some(dn_characters(16, prec)?)
    } else if *h == int(3) {
        Some(dn_characters(28, prec)?)
    } else {
        None
    })
}

fn solver_data(
    vacuum_root: &Rational,
    sols: &[FrobeniusSolution],
    terms: usize,
) -> Vec<LeadingData> {
    sols.iter()
        .map(|s| {
            let name = format!("root {}", s.root);
            if &s.root == vacuum_root {
                LeadingData::vacuum(name, s, terms)
            } else {
                LeadingData::module(name, s, terms)
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct C16Final {
    pub survivors: Vec<Rational>,
    pub records: Vec<CandidateRecord>,
}

/// Resolve the closure-filtered set: one record per h, each carrying the
/// filter that decides it.
pub fn c16_final_filter(y: i64, terms: usize) -> Result<C16Final> {
    let hs = c16_closure_filter(&c16_integrality_filter(y, &c16_h_candidates(y)?));
    let prec = Exp::from_integer(terms as i64);
    let mut records: Vec<CandidateRecord> = hs
        .par_iter()
        .map(|h| -> Result<CandidateRecord> {
            let m = Mlde3::from_ch(&c16(), h);
            let ind = indicial(&m)?;
            let rep = representative(h);
            let params = [("h", h.clone()), ("representative", rep.clone()), ("y", int(y))];
            let a4 = match a4_closed_form(h) {
                Ok(v) => format!("a4 = {v}"),
                Err(_) => "a4 closed form has a pole here".to_string(),
            };
            let mut rec = if let Some(t) = lattice_for(&rep, prec)? {
                let data = t
                    .members
                    .iter()
                    .zip(&t.weights)
                    .map(|(f, w)| LeadingData::from_series(format!("{}:{}", t.label, w), f, terms))
                    .collect();
                let ok = t.annihilated_by(&m);
                CandidateRecord::new(Pipeline::C16, t.label.clone(), &params, Some(ind), data)
                    .with_note(format!("{} triple solves the equation: {ok}", t.label))
            } else {
                let sols = solve_all(&m, terms)?;
                let data = solver_data(&rat(-2, 3), &sols, terms);
                let mut rec = CandidateRecord::new(Pipeline::C16, format!("h={h}"), &params, Some(ind), data);
                for s in &sols {
                    if let SolutionStatus::Logarithmic { step, log_coeff, .. } = &s.status {
                        let c = s.coefficients(3);
                        rec = rec.with_note(format!(
                            "root {}: 1 + {} q + {} q^2, obstruction at step {step}, log coefficient {log_coeff}",
                            s.root, c[1], c[2]
                        ));
                    }
                }
                rec
            };
            if &rep != h {
                rec = rec.with_note(format!("same equation as h = {rep}"));
            }
            Ok(rec.with_note(a4))
        })
        .collect::<Result<_>>()?;
    sort_records(&mut records);
    let survivors: BTreeSet<Rational> = records
        .iter()
        .filter(|r| r.verdict == Verdict::CharacterType)
        .map(|r| r.param("representative").unwrap().clone())
        .collect();
    Ok(C16Final {
        survivors: survivors.into_iter().collect(),
        records,
    })
}

/// The equations at h = −1 and h = 3/4, where b₁ has its poles.
pub fn c16_logarithmic_fixtures(terms: usize) -> Result<Vec<CandidateRecord>> {
    let mut out = Vec::new();
    for h in [int(-1), rat(3, 4)] {
        let m = Mlde3::from_ch(&c16(), &h);
        let ind = indicial(&m)?;
        let sols = solve_all(&m, terms)?;
        let data = solver_data(&rat(-2, 3), &sols, terms);
        let mut rec = CandidateRecord::new(
            Pipeline::C16,
            format!("h={h}"),
            &[("h", h.clone())],
            Some(ind),
            data,
        );
        for s in &sols {
            if let SolutionStatus::Logarithmic {
                step,
                partner_root,
                log_coeff,
            } = &s.status
            {
                rec = rec.with_note(format!(
                    "root {}: log coefficient {log_coeff} against the solution at {partner_root}, free step {step}",
                    s.root
                ));
            }
        }
        out.push(rec);
    }
    sort_records(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::parse_rational;
    use crate::mlde::{frobenius_solve_with, ResonancePolicy};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn qs(v: &[&str]) -> Vec<Rational> {
        v.iter().map(|s| q(s)).collect()
    }

    #[test]
    fn b1_values_and_identity() {
        assert_eq!(c16_b1(&int(1)).unwrap(), int(136));
        assert_eq!(c16_b1(&int(2)).unwrap(), int(32));
        assert_eq!(c16_b1(&int(-1)), Err(Error::DegenerateH(int(-1))));
        assert_eq!(c16_b1(&rat(3, 4)), Err(Error::DegenerateH(rat(3, 4))));
        for h in [
            int(0),
            int(5),
            rat(1, 3),
            rat(-2, 7),
            rat(9, 5),
            rat(11, 13),
            int(-6),
            rat(1, 2),
            rat(7, 3),
            int(40),
        ] {
            let lhs = c16_b1(&h).unwrap() - int(120) * &h + int(584);
            assert_eq!(lhs * int(16), c16_n(&h, 16).unwrap());
            let sol = frobenius_solve(&Mlde3::from_ch(&c16(), &h), &(&h - rat(2, 3)), 2).unwrap();
            assert_eq!(sol.coefficients(2)[1], c16_b1(&h).unwrap(), "h = {h}");
        }
    }

    #[test]
    fn diophantine_roots_satisfy_the_quadratic() {
        let sols = c16_diophantine(16).unwrap();
        for s in &sols {
            assert!(discriminant_identity_holds(s.n, 16));
            for h in &s.hs {
                assert_eq!(c16_n(h, 16).unwrap(), ri(s.n));
            }
        }
        assert_eq!(sols.len(), 46);
        assert_eq!(c16_h_candidates(16).unwrap().len(), 91);
    }

    #[test]
    fn y16_sets() {
        let all = c16_h_candidates(16).unwrap();
        let nonneg = c16_integrality_filter(16, &all);
        let want = qs(&[
            "-11/12", "-17/20", "-3/4", "-7/12", "-1/2", "-3/8", "-1/4", "0", "1/4", "1/3", "1/2",
            "3/5", "2/3", "7/8", "1", "3/2", "2", "11/4", "3",
        ]);
        assert_eq!(nonneg, want);
        let closed = c16_closure_filter(&nonneg);
        assert_eq!(
            closed,
            qs(&["-1/2", "-1/4", "1/2", "1", "3/2", "2", "11/4", "3"])
        );
    }

    #[test]
    fn candidate_records_match_filters() {
        let recs = c16_candidate_records(16).unwrap();
        assert_eq!(recs.len(), 91);
        let mut good: Vec<Rational> = recs
            .iter()
            .filter(|r| r.verdict == Verdict::CharacterType)
            .map(|r| r.param("h").unwrap().clone())
            .collect();
        good.sort();
        assert_eq!(
            good,
            qs(&["-1/2", "-1/4", "1/2", "1", "3/2", "2", "11/4", "3"])
        );
        assert!(recs.iter().all(|r| r.verdict_is_reproducible()));
    }

    #[test]
    fn a4_matches_solver() {
        for (h, v) in [
            (int(1), q("770442")),
            (int(2), q("53384")),
            (int(3), q("458262")),
            (int(5), q("1204844290/17")),
        ] {
            assert_eq!(a4_closed_form(&h).unwrap(), v);
            assert_eq!(a4_solver(&h).unwrap(), v, "h = {h}");
        }
        for h in [rat(1, 3), rat(7, 5), rat(-5, 2)] {
            assert_eq!(
                a4_closed_form(&h).unwrap(),
                a4_solver(&h).unwrap(),
                "h = {h}"
            );
        }
        assert!(a4_closed_form(&rat(-1, 4)).is_err());
    }

    #[test]
    fn h_minus_quarter_is_logarithmic() {
        let m = Mlde3::from_ch(&c16(), &rat(-1, 4));
        assert_eq!((m.p.clone(), m.q.clone()), (rat(-43, 16), rat(-275, 216)));
        assert_eq!(
            indicial(&m).unwrap().roots,
            qs(&["-11/12", "-2/3", "25/12"])
        );
        let s = frobenius_solve(&m, &rat(-11, 12), 5).unwrap();
        assert!(s.is_logarithmic());
        let c = s.coefficients(3);
        assert_eq!(c[1], int(836));
        assert_eq!(&c[2] * int(7), int(1034649));
    }

    #[test]
    fn final_survivors() {
        let fin = c16_final_filter(16, 6).unwrap();
        assert_eq!(fin.survivors, vec![int(1), int(2), int(3)]);
        let get = |h: Rational| {
            fin.records
                .iter()
                .find(|r| r.param("h") == Some(&h))
                .unwrap()
        };
        assert_eq!(get(int(1)).label, "BW16");
        assert_eq!(get(int(2)).label, "D16");
        assert_eq!(get(int(3)).label, "D28");
        assert_eq!(get(rat(1, 2)).label, "D16");
        for h in [int(1), int(2), int(3)] {
            assert!(get(h).notes.contains("solves the equation: true"));
        }
        assert_eq!(get(rat(-1, 4)).verdict, Verdict::RejectedLogarithmic);
        assert_eq!(get(rat(11, 4)).verdict, Verdict::RejectedLogarithmic);
    }

    #[test]
    fn logarithmic_fixtures() {
        let recs = c16_logarithmic_fixtures(4).unwrap();
        assert!(recs
            .iter()
            .all(|r| r.verdict == Verdict::RejectedLogarithmic));
        assert!(recs[0].notes.contains("log coefficient 7680/7"));
        assert!(recs[1].notes.contains("log coefficient 180/7"));

        let m = Mlde3::from_ch(&c16(), &int(-1));
        let f3 = frobenius_solve(&m, &rat(17, 6), 4).unwrap();
        assert_eq!(
            f3.coefficients(4),
            qs(&["1", "2788/33", "17400758/4719", "6701005192/61347"])
        );
        let f2 = frobenius_solve_with(
            &m,
            &rat(-5, 3),
            3,
            &ResonancePolicy::Fixed(q("1254592/1617")),
        )
        .unwrap();
        assert_eq!(f2.coefficients(3)[2], q("-800544692/1617"));
    }
}
