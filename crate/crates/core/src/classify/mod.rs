//! The classification searches at c = 8, 16 and 4. Every pipeline produces
//! [`CandidateRecord`]s whose verdict can be recomputed from the data stored
//! in the record.

pub mod c16;
pub mod c4;
pub mod c8;

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactq::rational::exp_to_rational;
use crate::exactq::{QSeries, Rational};
use crate::mlde::{FrobeniusSolution, IndicialData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pipeline {
    C8,
    C8Exceptional,
    C16,
    C4,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::C8 => "c8",
            Pipeline::C8Exceptional => "c8_exceptional",
            Pipeline::C16 => "c16",
            Pipeline::C4 => "c4",
        }
    }
}

/// Ordered from acceptable to most severe; a record takes the worst verdict
/// among its solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    CharacterType,
    RejectedNonintegral,
    RejectedNegative,
    RejectedLogarithmic,
    RejectedNonrationalRoots,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::CharacterType => "character_type",
            Verdict::RejectedNonintegral => "rejected_nonintegral",
            Verdict::RejectedNegative => "rejected_negative",
            Verdict::RejectedLogarithmic => "rejected_logarithmic",
            Verdict::RejectedNonrationalRoots => "rejected_nonrational_roots",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The first coefficients of one solution, written as `scale·q^root·(1 + …)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingData {
    pub label: String,
    pub root: Rational,
    /// The multiplicity the character is allowed to carry in front.
    pub scale: Rational,
    /// Monic coefficients at `root + n`.
    pub coefficients: Vec<Rational>,
    pub logarithmic: bool,
}

/// Least common multiple of the denominators.
pub fn denominator_lcm(v: &[Rational]) -> Rational {
    let l = v
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, r| acc.lcm(r.denom()));
    Rational::from_integer(l)
}

impl LeadingData {
    pub fn new(
        label: impl Into<String>,
        root: Rational,
        scale: Rational,
        coefficients: Vec<Rational>,
    ) -> Self {
        LeadingData {
            label: label.into(),
            root,
            scale,
            coefficients,
            logarithmic: false,
        }
    }

    /// A vacuum solution: leading coefficient 1, no freedom.
    pub fn vacuum(label: impl Into<String>, sol: &FrobeniusSolution, terms: usize) -> Self {
        let mut d = Self::new(
            label,
            sol.root.clone(),
            Rational::one(),
            sol.coefficients(terms),
        );
        d.logarithmic = sol.is_logarithmic();
        d
    }

    /// A module character: the scale is the least one that clears the
    /// denominators of the first half of the coefficients. Denominators that
    /// keep growing past that point are not cleared and the data is flagged.
    pub fn module(label: impl Into<String>, sol: &FrobeniusSolution, terms: usize) -> Self {
        let coefficients = sol.coefficients(terms);
        let scale = denominator_lcm(&coefficients[..terms.div_ceil(2).min(coefficients.len())]);
        let mut d = Self::new(label, sol.root.clone(), scale, coefficients);
        d.logarithmic = sol.is_logarithmic();
        d
    }

    /// From an explicit series: scale is its leading coefficient.
    pub fn from_series(label: impl Into<String>, f: &QSeries, terms: usize) -> Self {
        let root = f
            .lead_exp()
            .map(exp_to_rational)
            .unwrap_or_else(Rational::zero);
        let scale = f.lead_coeff().cloned().unwrap_or_else(Rational::one);
        let monic = f.scale(&scale.recip());
        // Only coefficients below the truncation are kept.
        let coefficients = (0..terms)
            .map_while(|n| monic.coeff(crate::mlde::exponent(&root, n as i64)))
            .collect();
        Self::new(label, root, scale, coefficients)
    }

    pub fn verdict(&self) -> Verdict {
        if self.logarithmic {
            return Verdict::RejectedLogarithmic;
        }
        let scaled: Vec<Rational> = self.coefficients.iter().map(|c| c * &self.scale).collect();
        if self.scale.is_negative() || scaled.iter().any(|c| c.is_negative()) {
            Verdict::RejectedNegative
        } else if !self.scale.is_integer() || scaled.iter().any(|c| !c.is_integer()) {
            Verdict::RejectedNonintegral
        } else {
            Verdict::CharacterType
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateRecord {
    pub pipeline: Pipeline,
    pub label: String,
    pub params: BTreeMap<String, Rational>,
    /// `None` when the indicial cubic has an irrational root.
    pub indicial: Option<IndicialData>,
    pub leading_data: Vec<LeadingData>,
    pub verdict: Verdict,
    pub notes: String,
}

impl CandidateRecord {
    pub fn new(
        pipeline: Pipeline,
        label: impl Into<String>,
        params: &[(&str, Rational)],
        indicial: Option<IndicialData>,
        leading_data: Vec<LeadingData>,
    ) -> Self {
        let verdict = derive_verdict(indicial.as_ref(), &leading_data);
        CandidateRecord {
            pipeline,
            label: label.into(),
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            indicial,
            leading_data,
            verdict,
            notes: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(note.as_ref());
        self
    }

    pub fn param(&self, key: &str) -> Option<&Rational> {
        self.params.get(key)
    }

    pub fn verdict_is_reproducible(&self) -> bool {
        derive_verdict(self.indicial.as_ref(), &self.leading_data) == self.verdict
    }
}

pub fn derive_verdict(indicial: Option<&IndicialData>, leading: &[LeadingData]) -> Verdict {
    if indicial.is_none() {
        return Verdict::RejectedNonrationalRoots;
    }
    leading
        .iter()
        .map(LeadingData::verdict)
        .max()
        .unwrap_or(Verdict::CharacterType)
}

/// Deterministic order: by parameters, then label.
pub fn sort_records(records: &mut [CandidateRecord]) {
    records.sort_by(|a, b| (&a.params, &a.label).cmp(&(&b.params, &b.label)));
}

pub(crate) fn ri(n: i128) -> Rational {
    Rational::from_integer(n.into())
}

pub(crate) fn is_nonneg_int(r: &Rational) -> bool {
    r.is_integer() && !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::{int, rat};

    #[test]
    fn leading_data_verdicts() {
        let ok = LeadingData::new("a", rat(-1, 3), int(1), vec![int(1), int(248)]);
        assert_eq!(ok.verdict(), Verdict::CharacterType);
        let frac = LeadingData::new("b", int(0), int(1), vec![int(1), rat(1742, 7)]);
        assert_eq!(frac.verdict(), Verdict::RejectedNonintegral);
        let cleared = LeadingData::new("c", int(0), int(7), vec![int(1), rat(1742, 7)]);
        assert_eq!(cleared.verdict(), Verdict::CharacterType);
        let neg = LeadingData::new("d", int(0), int(1), vec![int(1), rat(-12628, 7)]);
        assert_eq!(neg.verdict(), Verdict::RejectedNegative);
        let mut log = ok.clone();
        log.logarithmic = true;
        assert_eq!(log.verdict(), Verdict::RejectedLogarithmic);
    }

    #[test]
    fn record_verdict_is_the_worst() {
        let a = LeadingData::new("a", int(0), int(1), vec![int(1), int(2)]);
        let b = LeadingData::new("b", int(0), int(1), vec![int(1), rat(1, 2)]);
        let r = CandidateRecord::new(
            Pipeline::C4,
            "x",
            &[],
            Some(dummy_indicial()),
            vec![a.clone(), b],
        );
        assert_eq!(r.verdict, Verdict::RejectedNonintegral);
        assert!(r.verdict_is_reproducible());
        let r = CandidateRecord::new(Pipeline::C4, "x", &[], None, vec![a]);
        assert_eq!(r.verdict, Verdict::RejectedNonrationalRoots);
    }

    #[test]
    fn sorting_is_by_params() {
        let mk = |h: Rational| CandidateRecord::new(Pipeline::C16, "r", &[("h", h)], None, vec![]);
        let mut v = vec![mk(int(3)), mk(rat(-1, 2)), mk(int(1))];
        sort_records(&mut v);
        let hs: Vec<_> = v.iter().map(|r| r.param("h").unwrap().clone()).collect();
        assert_eq!(hs, vec![rat(-1, 2), int(1), int(3)]);
    }

    fn dummy_indicial() -> IndicialData {
        IndicialData {
            roots: vec![int(0); 3],
            differences: vec![],
            resonance_steps: vec![vec![]; 3],
        }
    }
}
