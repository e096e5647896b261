//! Named checks: the classical q-series identities, and the printed tables
//! the solver and lattice code must reproduce.

use std::fmt;

use num_traits::{One, Zero};

use crate::classify::c16::{a4_closed_form, a4_solver, c16_final_filter, c16_logarithmic_fixtures};
use crate::classify::c4::{c4_case_verify, c4_m1_candidates, c4_m2_candidates};
use crate::classify::c8::{c8_basis, c8_exceptional_scan, survivors};
use crate::error::Result;
use crate::exactq::{
    eisenstein, eta_power, eta_power_at, int, jacobi_theta, Exp, QSeries, Rational, Theta,
};
use crate::lattice::{barnes_wall_theta, bw_characters, dn_characters, e4_power_over_eta};
use crate::mlde::{exponent, frobenius_solve, Mlde3};
use crate::modforms::xy_generators;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Empty on success; otherwise the first disagreement.
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    /// `lhs = rhs` below the common truncation.
    pub fn equal(name: impl Into<String>, lhs: &QSeries, rhs: &QSeries) -> Self {
        match lhs.first_mismatch(rhs) {
            None => Check::new(name, true, ""),
            Some((e, a, b)) => {
                Check::new(name, false, format!("first mismatch at q^{e}: {a} vs {b}"))
            }
        }
    }

    /// The coefficients of `f` at `root, root + 1, …` equal `want`.
    pub fn coefficients(
        name: impl Into<String>,
        f: &QSeries,
        root: &Rational,
        want: &[Rational],
    ) -> Self {
        for (n, w) in want.iter().enumerate() {
            let e = exponent(root, n as i64);
            match f.coeff(e) {
                Some(c) if &c == w => {}
                Some(c) => {
                    return Check::new(name, false, format!("first mismatch at q^{e}: {c} vs {w}"))
                }
                None => return Check::new(name, false, format!("q^{e} is beyond the truncation")),
            }
        }
        Check::new(name, true, "")
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "ok" } else { "FAIL" };
        if self.detail.is_empty() {
            write!(f, "{tag:4} {}", self.name)
        } else {
            write!(f, "{tag:4} {} ({})", self.name, self.detail)
        }
    }
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

/// Ramanujan's derivative identities, Jacobi's quartic identity, the
/// discriminant, θ₂ as an eta quotient and the θ-form of x, to `prec`.
pub fn identity_suite(prec: impl Into<Exp>) -> Vec<Check> {
    let prec = prec.into();
    let p1 = prec + Exp::one();
    let (e2, e4, e6) = (
        eisenstein(2, p1).unwrap(),
        eisenstein(4, p1).unwrap(),
        eisenstein(6, p1).unwrap(),
    );
    let eta = eta_power(1, p1);
    let t = |w| jacobi_theta(w, 1, p1);
    let (t2, t3, t0) = (t(Theta::Two), t(Theta::Three), t(Theta::Zero));
    let p4 = |f: &QSeries| f.pow_int(4).unwrap();
    let tr = |f: QSeries| f.truncate(prec);
    let (x, _) = xy_generators(p1);
    vec![
        Check::equal(
            "24 eta' = E2 eta",
            &tr(eta.derive().scale(&int(24))),
            &tr(&e2 * &eta),
        ),
        Check::equal(
            "12 E2' = E2^2 - E4",
            &tr(e2.derive().scale(&int(12))),
            &tr(&(&e2 * &e2) - &e4),
        ),
        Check::equal(
            "3 E4' = E2 E4 - E6",
            &tr(e4.derive().scale(&int(3))),
            &tr(&(&e2 * &e4) - &e6),
        ),
        Check::equal(
            "2 E6' = E2 E6 - E4^2",
            &tr(e6.derive().scale(&int(2))),
            &tr(&(&e2 * &e6) - &(&e4 * &e4)),
        ),
        Check::equal(
            "theta3^4 = theta2^4 + theta0^4",
            &tr(p4(&t3)),
            &tr(&p4(&t2) + &p4(&t0)),
        ),
        Check::equal(
            "1728 eta^24 = E4^3 - E6^2",
            &tr(eta_power(24, p1).scale(&int(1728))),
            &tr(&(&(&e4 * &e4) * &e4) - &(&e6 * &e6)),
        ),
        Check::equal(
            "theta2 = 2 eta(q^2)^2 / eta",
            &tr(t2.clone()),
            &tr((&eta_power_at(2, 2, p1) * &eta_power(-1, p1 + Exp::one())).scale(&int(2))),
        ),
        Check::equal(
            "2 eta^4 x = theta3^4 + theta0^4",
            &tr((&eta_power(4, p1) * &x).scale(&int(2))),
            &tr(&p4(&t3) + &p4(&t0)),
        ),
    ]
}

/// The printed tables, as corrected where the ledger of known misprints says
/// so; every check here is expected to pass.
pub fn fixture_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let solve = |c: i64, h: Rational, root: Rational, n: usize| -> Result<QSeries> {
        Ok(frobenius_solve(&Mlde3::from_ch(&int(c), &h), &root, n)?
            .plain()
            .clone())
    };
    let third = |a: i64| Rational::new(a.into(), 3.into());
    out.push(Check::coefficients(
        "c=8 vacuum",
        &solve(8, Rational::new(1.into(), 2.into()), third(-1), 5)?,
        &third(-1),
        &ints(&[1, 248, 4124, 34752, 213126]),
    ));
    out.push(Check::coefficients(
        "c=16 vacuum",
        &solve(16, int(1), third(-2), 5)?,
        &third(-2),
        &ints(&[1, 496, 69752, 2115008, 34670620]),
    ));

    let b = c8_basis(5)?;
    let names: Vec<String> = b
        .names()
        .into_iter()
        .map(|n| n.unwrap_or_default())
        .collect();
    out.push(Check::new(
        "c=8 basis is x^2, xy, y^2",
        names == ["x^2", "xy", "y^2"],
        names.join(", "),
    ));
    out.push(Check::coefficients(
        "f1 + 64 f3 = D8 vacuum",
        &b.vacuum_combination(&int(64)),
        &third(-1),
        &ints(&[1, 120, 2076, 17344]),
    ));

    let prec = Exp::from_integer(7);
    let d16 = dn_characters(16, prec)?;
    let scaled = |k: i64, v: &[i64]| v.iter().map(|&x| int(k * x)).collect::<Vec<_>>();
    out.push(Check::coefficients(
        "D16 vacuum",
        &d16.members[0],
        &third(-2),
        &ints(&[1, 496, 36984, 1066432]),
    ));
    out.push(Check::coefficients(
        "D16 vector",
        &d16.members[1],
        &Rational::new((-1).into(), 6.into()),
        &scaled(32, &[1, 156, 6790, 142136]),
    ));
    out.push(Check::coefficients(
        "D16 spinor",
        &d16.members[2],
        &third(4),
        &scaled(32768, &[1, 32, 528, 6016]),
    ));

    out.push(Check::coefficients(
        "Barnes-Wall theta",
        &barnes_wall_theta(4),
        &Rational::zero(),
        &ints(&[1, 0, 4320, 61440]),
    ));
    let bw = bw_characters(prec);
    out.push(Check::coefficients(
        "Barnes-Wall vacuum",
        &bw.members[0],
        &third(-2),
        &ints(&[1, 16, 4472, 131648, 2168860, 24647840]),
    ));
    let p20 = Exp::from_integer(20);
    let bw20 = bw_characters(p20);
    out.push(Check::equal(
        "chV + 15 ch1 = E4^2/eta^16",
        &(&bw20.members[0] + &bw20.members[1].scale(&int(15))),
        &e4_power_over_eta(2, p20),
    ));
    let d28 = dn_characters(28, prec)?;
    out.push(Check::coefficients(
        "D28 vacuum",
        &d28.members[0],
        &Rational::new((-7).into(), 6.into()),
        &ints(&[1, 1540, 370426, 34025432]),
    ));

    let c8x = c8_exceptional_scan(50, 4)?;
    let s = survivors(&c8x);
    out.push(Check::new(
        "c=8, m=248 family survivors are {1, 2}",
        s == ints(&[1, 2]),
        s.iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    ));

    let fin = c16_final_filter(16, 6)?;
    out.push(Check::new(
        "c=16 survivors are {1, 2, 3}",
        fin.survivors == ints(&[1, 2, 3]),
        fin.survivors
            .iter()
            .map(|h| h.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    ));
    let logs = c16_logarithmic_fixtures(4)?;
    let has = |i: usize, s: &str| logs[i].notes.contains(s);
    out.push(Check::new(
        "c=16 logarithmic fixtures",
        has(0, "log coefficient 7680/7") && has(1, "log coefficient 180/7"),
        format!("{} | {}", logs[0].notes, logs[1].notes),
    ));
    for h in [1, 2, 3, 5] {
        let (a, b) = (a4_closed_form(&int(h))?, a4_solver(&int(h))?);
        out.push(Check::new(
            format!("a4 closed form at h = {h}"),
            a == b,
            format!("{a} vs {b}"),
        ));
    }

    let (m2, m1) = (c4_m2_candidates(), c4_m1_candidates());
    out.push(Check::new(
        "c=4: 210 m2 and 133 m1 values",
        m2.len() == 210 && m1.len() == 133,
        "",
    ));
    for m1 in [16, 24, 28, 156, 178] {
        let c = c4_case_verify(m1, 6)?;
        out.push(Check::new(
            format!("c=4 case m1 = {m1}"),
            c.passed(),
            if c.passed() {
                String::new()
            } else {
                format!("{c:?}")
            },
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold() {
        for c in identity_suite(20) {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn fixtures_hold() {
        for c in fixture_suite().unwrap() {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn broken_identity_is_reported() {
        let a = QSeries::from_head(Exp::zero(), ints(&[1, 2, 3]));
        let b = QSeries::from_head(Exp::zero(), ints(&[1, 2, 4]));
        let c = Check::equal("x", &a, &b);
        assert!(!c.passed);
        assert_eq!(c.detail, "first mismatch at q^2: 3 vs 4");
        assert!(c.to_string().starts_with("FAIL"));
    }
}
