//! c = 8: the generic case (vacuum coefficient m ≠ 248), which forces a
//! single equation, and the exceptional family m = 248.

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{sort_records, CandidateRecord, LeadingData, Pipeline};
use crate::error::{Error, Result};
use crate::exactq::eta_power;
use crate::exactq::{int, rat, Exp, QSeries, Rational};
use crate::lattice::{
    dn_characters, e4_power_over_eta, orbifold_characters, sqrt2e8_characters, CharacterTriple,
    Orbifold,
};
use crate::mlde::{
    exponent, frobenius_solve, frobenius_solve_with, indicial, recursion_step, solve_all,
    FrobeniusSolution, Mlde3, ResonancePolicy, SolutionStatus,
};
use crate::modforms::{gamma2_basis, identify_in_basis};
use crate::poly::{rational_roots, Field, Poly, RatFunc};

/// With P free and Q fixed by the vacuum index `−c/24`, the first step of
/// the recursion reads `m·I(λ+1) = R₁`. Returns the constant `R₁/I(λ+1)`
/// (the only m compatible with generic P) and the root of `I(λ+1)`, the
/// unique P available to any other m.
pub fn vacuum_step_one(c: &Rational) -> Result<(Rational, Rational, Rational)> {
    let lam = -c / int(24);
    let l = RatFunc::from_rational(&lam);
    let p = RatFunc::var();
    let q = -(l.clone() * l.clone() * l.clone()
        - RatFunc::from_rational(&rat(1, 2)) * l.clone() * l.clone()
        + p.clone() * l.clone());
    let (rhs, ind) = recursion_step(&[RatFunc::one()], &l, &p, &q);
    let ratio = (rhs / ind.clone()).as_constant().ok_or(Error::Degenerate)?;
    let roots = rational_roots(ind.num());
    let [pv] = roots.as_slice() else {
        return Err(Error::Degenerate);
    };
    let qv = q.eval(pv).ok_or(Error::Degenerate)?;
    Ok((ratio, pv.clone(), qv))
}

/// The η⁸-multiplied solutions of the (8, 1/2) equation written in the
/// weight-4 basis `{x², xy, y²}`.
#[derive(Clone, Debug)]
pub struct C8Basis {
    pub mlde: Mlde3,
    pub labels: Vec<String>,
    /// Solutions at −1/3, 1/6, 2/3; the first is normalised to equal x².
    pub solutions: Vec<QSeries>,
    pub coords: Vec<Vec<Rational>>,
    /// The free coefficient at the step-1 resonance that gives f₁ = x².
    pub free_value: Rational,
    pub certified: bool,
}

pub fn c8_basis(terms: usize) -> Result<C8Basis> {
    let m = Mlde3::from_ch(&int(8), &rat(1, 2));
    let prec = Exp::from_integer(terms as i64);
    let basis = gamma2_basis(4, prec)?;
    let in_basis = |f: &QSeries| -> Result<(Vec<Rational>, bool)> {
        let g = f * &eta_power(8, prec + Exp::one());
        let id = identify_in_basis(&g.truncate(prec), &basis)?;
        Ok((id.coords, id.certified))
    };
    let f3 = frobenius_solve(&m, &rat(2, 3), terms)?.plain().clone();
    let f2 = frobenius_solve(&m, &rat(1, 6), terms)?.plain().clone();
    let raw = frobenius_solve_with(&m, &rat(-1, 3), terms + 1, &ResonancePolicy::Zero)?
        .plain()
        .clone();
    // Removing the y² component of the zero-choice solution.
    let (c_raw, _) = in_basis(&raw)?;
    let free_value = -c_raw[2].clone();
    let f1 = frobenius_solve_with(
        &m,
        &rat(-1, 3),
        terms + 1,
        &ResonancePolicy::Fixed(free_value.clone()),
    )?
    .plain()
    .clone();
    let mut coords = Vec::new();
    let mut certified = true;
    for f in [&f1, &f2, &f3] {
        let (c, ok) = in_basis(f)?;
        coords.push(c);
        certified &= ok;
    }
    Ok(C8Basis {
        mlde: m,
        labels: basis.labels.clone(),
        solutions: vec![f1, f2, f3],
        coords,
        free_value,
        certified,
    })
}

impl C8Basis {
    /// Name of each solution in the monomial basis, when it is a single
    /// monomial.
    pub fn names(&self) -> Vec<Option<String>> {
        self.coords
            .iter()
            .map(|c| {
                let nz: Vec<usize> = (0..c.len()).filter(|&i| !c[i].is_zero()).collect();
                match nz.as_slice() {
                    [i] if c[*i].is_one() => Some(self.labels[*i].clone()),
                    _ => None,
                }
            })
            .collect()
    }

    /// `f₁ + s·f₃`.
    pub fn vacuum_combination(&self, s: &Rational) -> QSeries {
        &self.solutions[0] + &self.solutions[2].scale(s)
    }
}

fn triple_record(
    pipeline: Pipeline,
    t: &CharacterTriple,
    m: &Mlde3,
    params: &[(&str, Rational)],
    terms: usize,
) -> Result<CandidateRecord> {
    let ind = indicial(m)?;
    let data: Vec<LeadingData> = t
        .members
        .iter()
        .zip(&t.weights)
        .map(|(f, w)| LeadingData::from_series(format!("{}:{}", t.label, w), f, terms))
        .collect();
    let rec = CandidateRecord::new(pipeline, t.label.clone(), params, Some(ind), data);
    Ok(if t.annihilated_by(m) {
        rec.with_note(format!("all three members solve {m}"))
    } else {
        rec.with_note("members do NOT solve the equation")
    })
}

fn solver_record(
    pipeline: Pipeline,
    label: &str,
    m: &Mlde3,
    vacuum_root: &Rational,
    sols: &[FrobeniusSolution],
    params: &[(&str, Rational)],
    terms: usize,
) -> Result<CandidateRecord> {
    let ind = indicial(m)?;
    let data = sols
        .iter()
        .map(|s| {
            let name = format!("{label}@{}", s.root);
            if &s.root == vacuum_root {
                LeadingData::vacuum(name, s, terms)
            } else {
                LeadingData::module(name, s, terms)
            }
        })
        .collect();
    Ok(CandidateRecord::new(
        pipeline,
        label,
        params,
        Some(ind),
        data,
    ))
}

/// The generic c = 8 pipeline: the forced equation, its triples, and the two
/// further equations at h = −1/2 and h = −1/3.
pub fn c8_generic_pipeline(terms: usize) -> Result<Vec<CandidateRecord>> {
    let c = int(8);
    let (m_exc, p, q) = vacuum_step_one(&c)?;
    let m = Mlde3::from_ch(&c, &rat(1, 2));
    debug_assert_eq!((&m.p, &m.q), (&p, &q));
    let prec = Exp::from_integer(terms as i64);
    let ch = |h: Rational| [("c", c.clone()), ("h", h)];
    let mut out = Vec::new();

    let basis = c8_basis(terms)?;
    let names: Vec<String> = basis
        .names()
        .into_iter()
        .map(|n| n.unwrap_or_else(|| "?".into()))
        .collect();
    for t in [
        sqrt2e8_characters(prec),
        dn_characters(8, prec)?,
        orbifold_characters(Orbifold::Sqrt2E8Plus, prec),
    ] {
        out.push(
            triple_record(Pipeline::C8, &t, &m, &ch(rat(1, 2)), terms)?.with_note(format!(
                "m != {m_exc} forces P = {p}, Q = {q}; eta^8 f_i = {}",
                names.join(", ")
            )),
        );
    }

    let d20 = Mlde3::from_ch(&c, &rat(-1, 2));
    out.push(triple_record(
        Pipeline::C8,
        &dn_characters(20, prec)?,
        &d20,
        &ch(rat(-1, 2)),
        terms,
    )?);

    let m3 = Mlde3::from_ch(&c, &rat(-1, 3));
    let sols = solve_all(&m3, terms)?;
    let rec = solver_record(
        Pipeline::C8,
        "h=-1/3",
        &m3,
        &rat(-1, 3),
        &sols,
        &ch(rat(-1, 3)),
        terms,
    )?;
    let e4 = e4_power_over_eta(1, prec - Exp::new(1, 3));
    let e4sq = e4_power_over_eta(2, prec - Exp::new(2, 3));
    let known = m3.annihilates(&e4) && m3.annihilates(&e4sq);
    out.push(rec.with_note(format!("E4/eta^8 and E4^2/eta^16 are solutions: {known}")));

    sort_records(&mut out);
    Ok(out)
}

/// `m_{n}·I(−1/3 + n) = Rₙ` along the m = 248 family, with P = x left free
/// and the vacuum coefficients of E₄/η⁸ substituted.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadeStep {
    pub step: usize,
    pub coefficient: Rational,
    /// `I(−1/3 + step)` as a polynomial in x.
    pub factor: Poly,
    /// The x at which the coefficient is free.
    pub root: Rational,
    /// Whether `Rₙ − mₙ·I` vanishes identically in x.
    pub holds: bool,
}

pub fn c8_cascade(steps: usize) -> Result<Vec<CascadeStep>> {
    let vac = e4_power_over_eta(1, Exp::from_integer(steps as i64 + 1) - Exp::new(1, 3));
    let lam = rat(-1, 3);
    let coeffs: Vec<Rational> = (0..=steps)
        .map(|n| {
            vac.coeff(exponent(&lam, n as i64))
                .unwrap_or_else(Rational::zero)
        })
        .collect();
    let x = RatFunc::var();
    let y = x.clone() * RatFunc::from_rational(&rat(1, 3)) + RatFunc::from_rational(&rat(5, 54));
    let a: Vec<RatFunc> = coeffs.iter().map(RatFunc::from_rational).collect();
    let l = RatFunc::from_rational(&lam);
    (1..=steps)
        .map(|n| {
            let (rhs, ind) = recursion_step(&a[..n], &l, &x, &y);
            let holds = (rhs - a[n].clone() * ind.clone()).is_zero();
            let factor = ind.num().clone();
            let root = rational_roots(&factor)
                .first()
                .cloned()
                .ok_or(Error::Degenerate)?;
            Ok(CascadeStep {
                step: n,
                coefficient: coeffs[n].clone(),
                factor,
                root,
                holds,
            })
        })
        .collect()
}

/// `x = −(6n² − 9n + 4)/6`.
pub fn c8x_parameter(n: i64) -> Rational {
    -rat(6 * n * n - 9 * n + 4, 6)
}

/// Indices `{(7 − 6n)/6, −1/3, (3n − 1)/3}`.
pub fn c8x_roots(n: i64) -> [Rational; 3] {
    [rat(7 - 6 * n, 6), rat(-1, 3), rat(3 * n - 1, 3)]
}

/// `−4(6n − 7)(40n² − 30n + 17)/((2n − 5)(4n − 5))`.
pub fn c8x_f3_second(n: i64) -> Rational {
    rat(
        -4 * (6 * n - 7) * (40 * n * n - 30 * n + 17),
        (2 * n - 5) * (4 * n - 5),
    )
}

fn c8x_record(n: i64, terms: usize) -> Result<CandidateRecord> {
    let roots = c8x_roots(n);
    let m = Mlde3::from_roots(roots.clone())?;
    let lam = rat(-1, 3);
    // E₄/η⁸ solves every member; its coefficient fills the free slot.
    let vac = e4_power_over_eta(1, Exp::from_integer(terms as i64) - Exp::new(1, 3));
    let free = vac.coeff(exponent(&lam, n)).unwrap_or_else(Rational::zero);
    let f1 = frobenius_solve_with(&m, &lam, terms, &ResonancePolicy::Fixed(free))?;
    let f2 = frobenius_solve(&m, &roots[2], terms)?;
    let f3 = frobenius_solve(&m, &roots[0], terms)?;
    let ind = indicial(&m)?;
    let data = vec![
        LeadingData::vacuum("f1", &f1, terms),
        LeadingData::module("f2", &f2, terms),
        LeadingData::vacuum("f3", &f3, terms),
    ];
    let f3_a1 = f3.coefficients(2)[1].clone();
    let formula = c8x_f3_second(n);
    let mut rec = CandidateRecord::new(
        Pipeline::C8Exceptional,
        format!("n={n}"),
        &[("n", int(n)), ("x", m.p.clone())],
        Some(ind),
        data,
    )
    .with_note(format!(
        "f3 second coefficient {f3_a1}, closed form {formula}"
    ));
    if f1.plain() == &vac.truncate(f1.plain().trunc()) {
        rec = rec.with_note("vacuum is E4/eta^8");
    }
    if let SolutionStatus::ResonantFree { step, .. } = f1.status {
        rec = rec.with_note(format!("vacuum coefficient at step {step} is free"));
    }
    Ok(rec)
}

/// The m = 248 family `n = 1..=n_max`; `f₃` at the smallest index must
/// have a non-negative integral second coefficient.
pub fn c8_exceptional_scan(n_max: i64, terms: usize) -> Result<Vec<CandidateRecord>> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let mut out: Vec<CandidateRecord> = (1..=n_max)
        .into_par_iter()
        .map(|n| c8x_record(n, terms))
        .collect::<Result<_>>()?;
    sort_records(&mut out);
    Ok(out)
}

pub fn survivors(records: &[CandidateRecord]) -> Vec<Rational> {
    records
        .iter()
        .filter(|r| r.verdict == super::Verdict::CharacterType)
        .filter_map(|r| r.param("n").cloned())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Verdict;
    use crate::exactq::parse_rational;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn generic_m_forces_the_equation() {
        let (m, p, q) = vacuum_step_one(&int(8)).unwrap();
        assert_eq!((m, p, q), (int(248), rat(-1, 6), rat(1, 27)));
        // At c = 16 the same step gives the constant 496.
        assert_eq!(vacuum_step_one(&int(16)).unwrap().0, int(496));
    }

    #[test]
    fn basis_is_x2_xy_y2() {
        let b = c8_basis(6).unwrap();
        assert_eq!(
            b.names(),
            vec![Some("x^2".into()), Some("xy".into()), Some("y^2".into())]
        );
        assert_eq!(b.free_value, int(56));
        assert!(b.certified);
        let k = |n: i64| exponent(&rat(-1, 3), n);
        let d8 = b.vacuum_combination(&int(64));
        assert_eq!(
            (0..4).map(|n| d8.coeff(k(n)).unwrap()).collect::<Vec<_>>(),
            ints(&[1, 120, 2076, 17344])
        );
        let s2 = b.vacuum_combination(&int(-48));
        assert_eq!(
            (0..4).map(|n| s2.coeff(k(n)).unwrap()).collect::<Vec<_>>(),
            ints(&[1, 8, 284, 2112])
        );
    }

    #[test]
    fn generic_records() {
        let recs = c8_generic_pipeline(6).unwrap();
        let get = |l: &str| recs.iter().find(|r| r.label == l).unwrap();
        for l in ["sqrt2E8", "D8", "sqrt2E8+", "D20"] {
            assert_eq!(get(l).verdict, Verdict::CharacterType, "{l}");
            assert!(get(l).notes.contains("all three members solve"), "{l}");
        }
        let r = get("h=-1/3");
        assert_eq!(r.verdict, Verdict::RejectedNonintegral);
        let f3 = r.leading_data.iter().find(|d| d.root == rat(3, 2)).unwrap();
        let want: Vec<Rational> = [
            "1",
            "10188/323",
            "18705546/37145",
            "185597486664/33393355",
            "1912837788531/39856585",
        ]
        .iter()
        .map(|s| parse_rational(s).unwrap())
        .collect();
        assert_eq!(f3.coefficients[..5], want[..]);
        assert!(r
            .notes
            .contains("E4/eta^8 and E4^2/eta^16 are solutions: true"));
        assert!(recs.iter().all(|r| r.verdict_is_reproducible()));
    }

    #[test]
    fn cascade_factors() {
        let steps = c8_cascade(4).unwrap();
        assert!(steps.iter().all(|s| s.holds));
        let coeffs: Vec<_> = steps.iter().map(|s| s.coefficient.clone()).collect();
        assert_eq!(coeffs, ints(&[248, 4124, 34752, 213126]));
        let roots: Vec<_> = steps.iter().map(|s| s.root.clone()).collect();
        assert_eq!(
            roots,
            vec![rat(-1, 6), rat(-5, 3), rat(-31, 6), rat(-32, 3)]
        );
        for (i, s) in steps.iter().enumerate() {
            assert_eq!(s.root, c8x_parameter(i as i64 + 1));
        }
    }

    #[test]
    fn exceptional_family() {
        assert_eq!(c8x_f3_second(1), int(36));
        assert_eq!(c8x_f3_second(2), int(780));
        assert_eq!(c8x_f3_second(3), rat(-12628, 7));
        let recs = c8_exceptional_scan(12, 4).unwrap();
        assert_eq!(survivors(&recs), ints(&[1, 2]));
        for r in &recs {
            let n = r.param("n").unwrap().to_integer().try_into().unwrap();
            let f3 = r.leading_data.iter().find(|d| d.label == "f3").unwrap();
            assert_eq!(f3.coefficients[1], c8x_f3_second(n), "n = {n}");
            assert_eq!(r.param("x").unwrap(), &c8x_parameter(n));
            assert!(r.notes.contains("vacuum is E4/eta^8"));
        }
        assert_eq!(recs[2].verdict, Verdict::RejectedNegative);
    }

    #[test]
    fn n2_is_d20() {
        let m = Mlde3::from_roots(c8x_roots(2)).unwrap();
        let t = dn_characters(20, 5).unwrap();
        assert!(t.annihilated_by(&m));
        let mut w = t.weights.to_vec();
        w.sort();
        assert_eq!(w, vec![int(0), rat(1, 2), rat(5, 2)]);
        let xi = &t.members[1];
        assert_eq!(xi.lead_coeff(), Some(&int(40)));
        assert_eq!(xi.coeff(exp_of(-1, 3)), Some(int(40)));
        assert_eq!(xi.coeff(exp_of(2, 3)), Some(int(40 * 248)));
    }

    fn exp_of(n: i64, d: i64) -> Exp {
        Exp::new(n, d)
    }
}
