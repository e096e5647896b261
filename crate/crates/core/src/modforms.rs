//! Weight-graded series: Serre derivatives, the level-2 generators x and y,
//! monomial bases of M_k(Γ(2)) and exact identification in a basis.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactq::rational::ceil_exp;
use crate::exactq::{
    aux_series, eisenstein, eta_power, eta_power_at, fit, Aux, Exp, QSeries, Rational,
};

#[derive(Clone, Debug, PartialEq)]
pub struct GradedSeries {
    pub series: QSeries,
    pub weight: Rational,
    pub level: u32,
}

impl GradedSeries {
    pub fn new(series: QSeries, weight: Rational, level: u32) -> Self {
        GradedSeries {
            series,
            weight,
            level,
        }
    }
}

/// `𝔡_k f = f' − (k/12)E₂f`, raising the weight by 2.
pub fn serre_derivative(f: &GradedSeries) -> GradedSeries {
    let s = &f.series;
    let e2 = eisenstein(2, s.trunc() - s.valuation()).unwrap();
    let k12 = &f.weight / Rational::from_integer(12.into());
    let out = s.derive() - (&e2 * s).scale(&k12);
    GradedSeries::new(out, &f.weight + Rational::from_integer(2.into()), f.level)
}

/// Iterated Serre derivative `𝔡_k^i = 𝔡_{k+2(i−1)} ∘ … ∘ 𝔡_k`.
pub fn serre_iterate(f: &GradedSeries, i: usize) -> GradedSeries {
    (0..i).fold(f.clone(), |g, _| serre_derivative(&g))
}

/// `x = (2E₂(q²) − E₂(q))/η⁴` and `y = η(q²)⁸/η(q)⁸`, both to `prec`.
pub fn xy_generators(prec: impl Into<Exp>) -> (QSeries, QSeries) {
    let prec = prec.into();
    let x = fit(prec, |p| aux_series(Aux::H2, p) * eta_power(-4, p));
    let y = fit(prec, |p| eta_power_at(8, 2, p) * eta_power(-8, p));
    (x, y)
}

#[derive(Clone, Debug)]
pub struct BasisW {
    pub weight: Rational,
    pub index: u32,
    /// Spacing of the local parameter at the cusp (q^(1/2) for Γ(2)).
    pub step: Exp,
    pub elements: Vec<GradedSeries>,
    pub labels: Vec<String>,
}

fn monomial_label(a: u32, b: u32) -> String {
    let part = |v: &str, e: u32| match e {
        0 => String::new(),
        1 => v.to_string(),
        _ => format!("{v}^{e}"),
    };
    let s = format!("{}{}", part("x", a), part("y", b));
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

/// The monomial bases η^(2k)·{x^a y^b} used for weights 4, 8 and 14.
pub fn gamma2_basis(weight: u32, prec: impl Into<Exp>) -> Result<BasisW> {
    let prec = prec.into();
    let monomials: &[(u32, u32)] = match weight {
        4 => &[(2, 0), (1, 1), (0, 2)],
        8 => &[(2, 2), (0, 4), (1, 3), (3, 1)],
        14 => &[(7, 0), (5, 2), (3, 4), (1, 6), (0, 7)],
        _ => {
            return Err(Error::Domain(format!(
                "no basis tabulated for weight {weight}"
            )))
        }
    };
    let n = 2 * weight as i64;
    let mut elements = Vec::new();
    let mut labels = Vec::new();
    for &(a, b) in monomials {
        let s = fit(prec, |p| {
            let (x, y) = xy_generators(p);
            let xa = x.pow_int(a as i64).unwrap();
            let yb = y.pow_int(b as i64).unwrap();
            eta_power(n, p) * xa * yb
        });
        elements.push(GradedSeries::new(
            s,
            Rational::from_integer(weight.into()),
            2,
        ));
        labels.push(monomial_label(a, b));
    }
    Ok(BasisW {
        weight: Rational::from_integer(weight.into()),
        index: 6,
        step: Exp::new(1, 2),
        elements,
        labels,
    })
}

/// `ceil(k·index/12) + 1` coefficients certify equality at weight `k`.
pub fn sturm_depth(weight: &Rational, index: u32) -> Result<usize> {
    if weight < &Rational::zero() {
        return Err(Error::Domain(format!("negative weight {weight}")));
    }
    let b = weight * Rational::from_integer(index.into()) / Rational::from_integer(12.into());
    Ok(b.ceil().to_integer().try_into().unwrap_or(usize::MAX) + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Identification {
    pub coords: Vec<Rational>,
    /// Coefficient slots (in units of the basis step) that were compared.
    pub depth: usize,
    pub certified: bool,
}

/// Solve `f = Σ c_i b_i` exactly on every exponent known to all series, with
/// first-nonzero pivoting. Fails with the first residual if `f` is not in
/// the span.
pub fn identify_in_basis(f: &QSeries, basis: &BasisW) -> Result<Identification> {
    let all: Vec<&QSeries> = basis
        .elements
        .iter()
        .map(|g| &g.series)
        .chain(std::iter::once(f))
        .collect();
    let trunc = all.iter().map(|s| s.trunc()).min().unwrap();
    let start = all.iter().map(|s| s.valuation()).min().unwrap();
    let ram = all.iter().fold(basis.step.denom().to_owned(), |acc, s| {
        num_integer::lcm(acc, s.ram())
    });
    let step = Exp::new(1, ram);
    let m = basis.elements.len();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut exps: Vec<Exp> = Vec::new();
    let mut e = start;
    while e < trunc {
        let row: Vec<Rational> = all.iter().map(|s| s.coeff(e).unwrap()).collect();
        if row.iter().any(|c| !c.is_zero()) {
            rows.push(row);
            exps.push(e);
        }
        e += step;
    }
    // Reduced row echelon form of the augmented matrix.
    let mut a = rows.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..m {
        let Some(p) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..=m {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if pivots.len() < m {
        return Err(Error::Domain(
            "basis is rank deficient at the available depth".into(),
        ));
    }
    let coords: Vec<Rational> = (0..m).map(|i| a[i][m].clone()).collect();
    let combo = recombine(basis, &coords).truncate(trunc);
    if let Some((e, _, _)) = f.first_mismatch(&combo) {
        let value = (f - &combo).coeff(e).unwrap();
        return Err(Error::NotInSpan { exp: e, value });
    }
    let depth = ceil_exp((trunc - Exp::zero().max(start)) / basis.step).max(0) as usize;
    let certified = depth >= sturm_depth(&basis.weight, basis.index)?;
    Ok(Identification {
        coords,
        depth,
        certified,
    })
}

pub fn recombine(basis: &BasisW, coords: &[Rational]) -> QSeries {
    let trunc = basis
        .elements
        .iter()
        .map(|g| g.series.trunc())
        .min()
        .unwrap();
    basis
        .elements
        .iter()
        .zip(coords)
        .fold(QSeries::zero(trunc), |acc, (g, c)| acc + g.series.scale(c))
}

/// Kaneko–Zagier check with `c = 4`: residual of `f'' − (1/6)E₂f' − (1/18)E₄f`.
pub fn kaneko_zagier_residual(f: &QSeries) -> QSeries {
    let p = f.trunc() - f.valuation();
    let e2 = eisenstein(2, p).unwrap();
    let e4 = eisenstein(4, p).unwrap();
    let d1 = f.derive();
    let d2 = d1.derive();
    d2 - (&e2 * &d1).scale(&Rational::new(1.into(), 6.into()))
        - (&e4 * f).scale(&Rational::new(1.into(), 18.into()))
}

pub fn one_graded(prec: impl Into<Exp>) -> GradedSeries {
    GradedSeries::new(QSeries::one(prec), Rational::zero(), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::{exp, int, rat};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn generators_match_printed_heads() {
        let (x, y) = xy_generators(6);
        assert_eq!(x.lead_exp(), Some(exp(-1, 6)));
        assert_eq!(x.head(5), ints(&[1, 28, 134, 568, 1809]));
        assert_eq!(y.lead_exp(), Some(exp(1, 3)));
        assert_eq!(y.head(5), ints(&[1, 8, 36, 128, 394]));
    }

    #[test]
    fn serre_derivative_of_constant_and_e4() {
        let d = serre_derivative(&one_graded(10));
        assert!(d.series.is_zero());
        assert_eq!(d.weight, int(2));
        let e4 = GradedSeries::new(eisenstein(4, 20).unwrap(), int(4), 1);
        let d4 = serre_derivative(&e4);
        let e6 = eisenstein(6, 20).unwrap().scale(&rat(-1, 3));
        assert_eq!(d4.series, e6);
        assert_eq!(d4.weight, int(6));
    }

    #[test]
    fn weight_four_basis_heads() {
        let b = gamma2_basis(4, 6).unwrap();
        assert_eq!(b.labels, vec!["x^2", "xy", "y^2"]);
        assert_eq!(
            b.elements[0].series.head(6),
            ints(&[1, 48, 624, 1344, 5232, 6048])
        );
        assert_eq!(b.elements[1].series.lead_exp(), Some(exp(1, 2)));
        assert_eq!(b.elements[1].series.head(5), ints(&[1, 28, 126, 344, 757]));
        assert_eq!(b.elements[2].series.head(5), ints(&[1, 8, 28, 64, 126]));
    }

    #[test]
    fn sturm_depths() {
        assert_eq!(sturm_depth(&int(0), 6).unwrap(), 1);
        assert_eq!(sturm_depth(&int(4), 6).unwrap(), 3);
        assert_eq!(sturm_depth(&int(8), 6).unwrap(), 5);
        assert!(sturm_depth(&int(-2), 6).is_err());
    }

    #[test]
    fn identification_roundtrip_and_failure() {
        let b = gamma2_basis(4, 8).unwrap();
        let target = b.elements[0].series.scale(&int(3)) - b.elements[2].series.scale(&rat(1, 2));
        let id = identify_in_basis(&target, &b).unwrap();
        assert_eq!(id.coords, vec![int(3), int(0), rat(-1, 2)]);
        assert!(id.certified);
        let e2 = eisenstein(2, 8).unwrap();
        assert!(matches!(
            identify_in_basis(&e2, &b),
            Err(Error::NotInSpan { .. })
        ));
    }
}
