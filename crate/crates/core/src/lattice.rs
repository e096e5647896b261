//! Theta series and character triples of the lattices that appear in the
//! classifications: Dₙ, √2E₈, Barnes–Wall Λ₁₆ and two orbifolds, plus the
//! level tables for theta and eta powers.

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactq::{
    eisenstein, eta_power, fit, int, jacobi_theta, rat, Exp, QSeries, Rational, Theta,
};
use crate::mlde::Mlde3;
use crate::modforms::xy_generators;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coset {
    /// The lattice itself.
    L,
    /// The vector coset.
    Xi,
    /// The spinor cosets.
    Eta,
}

fn theta_pow(which: Theta, n: i64, scale: i64, prec: Exp) -> QSeries {
    jacobi_theta(which, scale, prec)
        .pow_int(n)
        .expect("theta series are units or monomials times units")
}

/// `(θ₃ⁿ + θ₀ⁿ)/2`, `(θ₃ⁿ − θ₀ⁿ)/2` and `θ₂ⁿ/2`.
pub fn dn_theta(n: u32, coset: Coset, prec: impl Into<Exp>) -> Result<QSeries> {
    if n < 4 {
        return Err(Error::Domain(format!("D_n needs n >= 4, got {n}")));
    }
    let prec = prec.into();
    let n = n as i64;
    let half = rat(1, 2);
    Ok(match coset {
        Coset::L => {
            (theta_pow(Theta::Three, n, 1, prec) + theta_pow(Theta::Zero, n, 1, prec)).scale(&half)
        }
        Coset::Xi => {
            (theta_pow(Theta::Three, n, 1, prec) - theta_pow(Theta::Zero, n, 1, prec)).scale(&half)
        }
        Coset::Eta => fit(prec, |p| theta_pow(Theta::Two, n, 1, p)).scale(&half),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacterTriple {
    pub label: String,
    pub c: Rational,
    pub weights: [Rational; 3],
    /// Vacuum first.
    pub members: [QSeries; 3],
}

impl CharacterTriple {
    pub fn leading_exponents(&self) -> Vec<Option<Exp>> {
        self.members.iter().map(QSeries::lead_exp).collect()
    }

    pub fn leading_coeffs(&self) -> Vec<Rational> {
        self.members
            .iter()
            .map(|m| m.lead_coeff().cloned().unwrap_or_else(Rational::zero))
            .collect()
    }

    /// Leading exponents equal `weight − c/24`.
    pub fn exponents_consistent(&self) -> bool {
        let c24 = &self.c / int(24);
        self.members.iter().zip(&self.weights).all(|(m, w)| {
            m.lead_exp().map(crate::exactq::rational::exp_to_rational) == Some(w - &c24)
        })
    }

    /// Members whose coefficients are not all non-negative integers.
    pub fn non_character_members(&self) -> Vec<usize> {
        (0..3)
            .filter(|&i| !self.members[i].is_nonneg_integral())
            .collect()
    }

    /// Members which become non-integral once scaled to leading coefficient 1.
    pub fn non_integral_after_normalising(&self) -> Vec<usize> {
        (0..3)
            .filter(|&i| {
                !self.members[i]
                    .monic()
                    .map(|m| m.is_integral())
                    .unwrap_or(false)
            })
            .collect()
    }

    /// `3·(3 − 1) − 12·Σ(leading exponents) = 0`.
    pub fn wronskian_exponent_check(&self) -> bool {
        wronskian_exponent_check(self)
    }

    /// Does every member satisfy the given equation to truncation?
    pub fn annihilated_by(&self, m: &Mlde3) -> bool {
        self.members.iter().all(|f| m.annihilates(f))
    }
}

pub fn wronskian_exponent_check(t: &CharacterTriple) -> bool {
    let mut s = Exp::zero();
    for e in t.leading_exponents() {
        match e {
            Some(e) => s += e,
            None => return false,
        }
    }
    Exp::from_integer(6) - Exp::from_integer(12) * s == Exp::zero()
}

/// Theta series of the three cosets of Dₙ divided by ηⁿ.
pub fn dn_characters(n: u32, prec: impl Into<Exp>) -> Result<CharacterTriple> {
    let prec = prec.into();
    let nn = n as i64;
    let member = |coset| -> Result<QSeries> {
        dn_theta(n, coset, prec)?;
        Ok(fit(prec, |p| {
            dn_theta(n, coset, p).unwrap() * eta_power(-nn, p)
        }))
    };
    Ok(CharacterTriple {
        label: format!("D{n}"),
        c: int(nn),
        weights: [Rational::zero(), rat(1, 2), rat(nn, 8)],
        members: [member(Coset::L)?, member(Coset::Xi)?, member(Coset::Eta)?],
    })
}

/// `½(θ₂(q²)¹⁶ + θ₃(q²)¹⁶ + θ₀(q²)¹⁶ + 30·θ₂(q²)⁸θ₃(q²)⁸)`.
pub fn barnes_wall_theta(prec: impl Into<Exp>) -> QSeries {
    let prec = prec.into();
    let t2_8 = theta_pow(Theta::Two, 8, 2, prec);
    let t3_8 = theta_pow(Theta::Three, 8, 2, prec);
    let s = &(&(&t2_8 * &t2_8) + &(&t3_8 * &t3_8)) + &theta_pow(Theta::Zero, 16, 2, prec);
    (&s + &(&t2_8 * &t3_8).scale(&int(30))).scale(&rat(1, 2))
}

/// `θ₂⁸(θ₃⁸ ± θ₀⁸)/(k·η¹⁶)`.
fn bw_twisted(sign: i64, k: i64, prec: Exp) -> QSeries {
    fit(prec, |p| {
        let t2 = theta_pow(Theta::Two, 8, 1, p);
        let t3 = theta_pow(Theta::Three, 8, 1, p);
        let t0 = theta_pow(Theta::Zero, 8, 1, p).scale(&int(sign));
        (t2 * (t3 + t0)) * eta_power(-16, p)
    })
    .scale(&rat(1, k))
}

/// Vacuum `Θ_Λ₁₆/η¹⁶`, weight 1 `θ₂⁸(θ₃⁸+θ₀⁸)/16η¹⁶`, weight 3/2 `θ₂⁸(θ₃⁸−θ₀⁸)/16η¹⁶`.
pub fn bw_characters(prec: impl Into<Exp>) -> CharacterTriple {
    let prec = prec.into();
    CharacterTriple {
        label: "BW16".into(),
        c: int(16),
        weights: [Rational::zero(), int(1), rat(3, 2)],
        members: [
            fit(prec, |p| barnes_wall_theta(p) * eta_power(-16, p)),
            bw_twisted(1, 16, prec),
            bw_twisted(-1, 16, prec),
        ],
    }
}

/// `{x² − 48y², 16xy, 128y²}`.
pub fn sqrt2e8_characters(prec: impl Into<Exp>) -> CharacterTriple {
    let (x, y) = xy_generators(prec);
    CharacterTriple {
        label: "sqrt2E8".into(),
        c: int(8),
        weights: [Rational::zero(), rat(1, 2), int(1)],
        members: [
            &x * &x - (&y * &y).scale(&int(48)),
            (&x * &y).scale(&int(16)),
            (&y * &y).scale(&int(128)),
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orbifold {
    Sqrt2E8Plus,
    BwPlus,
}

impl Orbifold {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sqrt2e8_plus" => Ok(Orbifold::Sqrt2E8Plus),
            "bw_plus" => Ok(Orbifold::BwPlus),
            _ => Err(Error::UnknownName(s.into())),
        }
    }
}

/// √2E₈⁺: `(32E₄(q²) − θ₂⁸)/32η⁸`, `(θ₃⁸ − θ₀⁸)/η⁸`, `8θ₂⁸/η⁸`.
/// Λ₁₆⁺: `(Θ_Λ₁₆ + θ₀(q²)¹⁶)/2η¹⁶`, `θ₂⁸(θ₃⁸ ± θ₀⁸)/32η¹⁶`.
pub fn orbifold_characters(which: Orbifold, prec: impl Into<Exp>) -> CharacterTriple {
    let prec = prec.into();
    match which {
        Orbifold::Sqrt2E8Plus => {
            let over_eta8 =
                |build: &dyn Fn(Exp) -> QSeries| fit(prec, |p| build(p) * eta_power(-8, p));
            let vac = over_eta8(&|p| {
                eisenstein(4, p / Exp::from_integer(2))
                    .unwrap()
                    .subst_power(2)
                    .scale(&int(32))
                    - theta_pow(Theta::Two, 8, 1, p)
            })
            .scale(&rat(1, 32));
            let half =
                over_eta8(&|p| theta_pow(Theta::Three, 8, 1, p) - theta_pow(Theta::Zero, 8, 1, p));
            let one = over_eta8(&|p| theta_pow(Theta::Two, 8, 1, p)).scale(&int(8));
            CharacterTriple {
                label: "sqrt2E8+".into(),
                c: int(8),
                weights: [Rational::zero(), rat(1, 2), int(1)],
                members: [vac, half, one],
            }
        }
        Orbifold::BwPlus => {
            let vac = fit(prec, |p| {
                (barnes_wall_theta(p) + theta_pow(Theta::Zero, 16, 2, p)) * eta_power(-16, p)
            })
            .scale(&rat(1, 2));
            CharacterTriple {
                label: "BW16+".into(),
                c: int(16),
                weights: [Rational::zero(), int(1), rat(3, 2)],
                members: [vac, bw_twisted(1, 32, prec), bw_twisted(-1, 32, prec)],
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelInfo {
    pub n: u64,
    /// Level of θᵢⁿ, keyed by the largest divisor of n not exceeding 4.
    pub n1: u64,
    /// Level of ηⁿ: 24/gcd(n, 24).
    pub n2: u64,
    /// Level of the Dₙ characters: 24/gcd(n, 12).
    pub n3: u64,
}

pub fn level_info(n: u64) -> Result<LevelInfo> {
    if n < 1 {
        return Err(Error::Domain("level_info needs n >= 1".into()));
    }
    let d = (1..=4).rev().find(|d| n.is_multiple_of(*d)).unwrap();
    let n1 = match d {
        4 => 2,
        2 => 4,
        _ => 8,
    };
    Ok(LevelInfo {
        n,
        n1,
        n2: 24 / n.gcd(&24),
        n3: 24 / n.gcd(&12),
    })
}

/// `E₄(q²)/η⁸`, one of the two readings of the √2E₈ vacuum.
pub fn e4_q2_over_eta8(prec: impl Into<Exp>) -> QSeries {
    fit(prec.into(), |p| {
        eisenstein(4, p / Exp::from_integer(2))
            .unwrap()
            .subst_power(2)
            * eta_power(-8, p)
    })
}

/// `E₄(q)^k/η^(8k)`, the h-independent vacuum at c = 8k.
pub fn e4_power_over_eta(k: i64, prec: impl Into<Exp>) -> QSeries {
    fit(prec.into(), |p| {
        eisenstein(4, p).unwrap().pow_int(k).unwrap() * eta_power(-8 * k, p)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::exp;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn dn_theta_leading_data() {
        for n in [4u32, 8, 16, 20] {
            let l = dn_theta(n, Coset::L, 3).unwrap();
            let nn = n as i64;
            assert_eq!(l.coeff(exp(1, 1)), Some(int(2 * nn * (nn - 1))));
            let xi = dn_theta(n, Coset::Xi, 3).unwrap();
            assert_eq!(
                (xi.lead_exp(), xi.lead_coeff().cloned()),
                (Some(exp(1, 2)), Some(int(2 * nn)))
            );
            let eta = dn_theta(n, Coset::Eta, 4).unwrap();
            assert_eq!(eta.lead_exp(), Some(exp(nn, 8)));
            assert_eq!(eta.lead_coeff(), Some(&(int(2).pow(n as i32 - 1))));
        }
        assert!(dn_theta(3, Coset::L, 2).is_err());
    }

    #[test]
    fn d16_characters() {
        let t = dn_characters(16, 4).unwrap();
        assert_eq!(t.leading_coeffs(), ints(&[1, 32, 32768]));
        assert_eq!(
            t.members[0].monic().unwrap().head(4),
            ints(&[1, 496, 36984, 1066432])
        );
        assert!(t.exponents_consistent());
        assert!(t.wronskian_exponent_check());
        assert!(t.annihilated_by(&Mlde3::from_dn(16).unwrap()));
    }

    #[test]
    fn d20_vector_character_is_not_integral_after_normalising() {
        let t = dn_characters(20, 3).unwrap();
        let xi = t.members[1].monic().unwrap();
        assert_eq!(t.members[1].lead_coeff(), Some(&int(40)));
        assert_eq!(xi.head(3), vec![int(1), int(248), rat(86156, 5)]);
        assert_eq!(t.non_integral_after_normalising(), vec![1]);
        assert!(t.non_character_members().is_empty());
    }

    #[test]
    fn barnes_wall() {
        let th = barnes_wall_theta(4);
        assert_eq!(th.head(4), ints(&[1, 0, 4320, 61440]));
        let t = bw_characters(7);
        assert_eq!(
            t.members[0].head(6),
            ints(&[1, 16, 4472, 131648, 2168860, 24647840])
        );
        assert_eq!(t.leading_coeffs(), ints(&[1, 32, 512]));
        assert!(t.wronskian_exponent_check());
        // The vacuum plus fifteen copies of the weight-1 character.
        let e4sq = e4_power_over_eta(2, 7);
        assert_eq!(&t.members[0] + &t.members[1].scale(&int(15)), e4sq);
        assert_ne!(&t.members[0] + &t.members[1], e4sq);
    }

    #[test]
    fn sqrt2e8_and_orbifolds() {
        let t = sqrt2e8_characters(5);
        assert_eq!(t.members[0].head(4), ints(&[1, 8, 284, 2112]));
        assert_eq!(t.leading_coeffs(), ints(&[1, 16, 128]));
        assert_eq!(t.members[0], e4_q2_over_eta8(5));
        let o = orbifold_characters(Orbifold::Sqrt2E8Plus, 6);
        assert_eq!(o.members[0].head(6), ints(&[1, 0, 156, 1024, 6790, 32768]));
        assert_eq!(o.leading_coeffs(), ints(&[1, 32, 2048]));
        assert_eq!(
            o.members[1].monic().unwrap().head(5),
            ints(&[1, 36, 394, 2776, 15155])
        );
        assert_eq!(
            o.members[2].monic().unwrap().head(5),
            ints(&[1, 16, 136, 832, 4132])
        );
        assert!(o.wronskian_exponent_check());
        let m = Mlde3::from_ch(&int(8), &rat(1, 2));
        assert!(t.annihilated_by(&m) && o.annihilated_by(&m));
        let b = orbifold_characters(Orbifold::BwPlus, 4);
        assert!(b.members.iter().all(QSeries::is_nonneg_integral));
        assert!(b.annihilated_by(&Mlde3::from_ch(&int(16), &int(1))));
    }

    #[test]
    fn levels() {
        assert_eq!(
            level_info(16).unwrap(),
            LevelInfo {
                n: 16,
                n1: 2,
                n2: 3,
                n3: 6
            }
        );
        assert_eq!(level_info(8).unwrap().n2, 3);
        assert_eq!(level_info(24).unwrap().n2, 1);
    }

    #[test]
    fn wronskian_detects_shift() {
        let mut t = dn_characters(16, 3).unwrap();
        assert!(t.wronskian_exponent_check());
        t.members[2] = t.members[2].shift(exp(1, 1));
        assert!(!t.wronskian_exponent_check());
    }
}
