use mlde_lab::classify::c16::{c16_b1, c16_n, discriminant_identity_holds, partner};
use mlde_lab::classify::{derive_verdict, sort_records, CandidateRecord, LeadingData, Pipeline};
use mlde_lab::exactq::{exp, int, parse_rational, rat, Exp, QSeries, Rational};
use mlde_lab::hyper::{compose_direct, compose_horner, kappa};
use mlde_lab::mlde::{frobenius_solve, indicial, Mlde3};
use mlde_lab::symmetry::{sym_lambda, sym_mu, CHPair};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn series(start_num: i64, den: i64, len: usize) -> impl Strategy<Value = QSeries> {
    prop::collection::vec(-9i64..9, len).prop_map(move |v| {
        let mut c: Vec<Rational> = v.into_iter().map(int).collect();
        c[0] = int(1);
        QSeries::from_head(exp(start_num, den), c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplication_is_associative(a in series(-1, 3, 6), b in series(1, 6, 6), c in series(0, 1, 6)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn inverse_is_inverse(a in series(0, 1, 8)) {
        let inv = a.invert().unwrap();
        prop_assert_eq!(&a * &inv, QSeries::one(a.trunc()));
    }

    #[test]
    fn derivation_is_leibniz(a in series(-1, 3, 6), b in series(1, 2, 6)) {
        let lhs = (&a * &b).derive();
        let rhs = &(&a.derive() * &b) + &(&a * &b.derive());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rational_display_roundtrips(r in small_rat()) {
        prop_assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn indices_sum_to_one_half(c in small_rat(), h in small_rat()) {
        let p = CHPair::new(c.clone(), h.clone());
        let s: Rational = p.indices().iter().cloned().sum();
        prop_assert_eq!(s, rat(1, 2));
        let m = Mlde3::from_ch(&c, &h);
        for r in p.indices() {
            prop_assert!(m.indicial_at(&r) == int(0));
        }
    }

    #[test]
    fn symmetry_group_orders(c in small_rat(), h in small_rat()) {
        let p = CHPair::new(c, h);
        prop_assert_eq!(sym_lambda(&sym_lambda(&sym_lambda(&p))), p.clone());
        prop_assert_eq!(sym_mu(&sym_mu(&p)), p.clone());
    }

    #[test]
    fn equation_is_invariant_under_the_weight_swap(h in small_rat()) {
        // (c, h) and (c, c/8 + 1/2 − h) have the same indices.
        let (a, b) = (Mlde3::from_ch(&int(16), &h), Mlde3::from_ch(&int(16), &partner(&h)));
        prop_assert_eq!((a.p, a.q), (b.p, b.q));
    }

    #[test]
    fn generic_solutions_are_annihilated(c in small_rat(), h in small_rat()) {
        let m = Mlde3::from_ch(&c, &h);
        let ind = indicial(&m).unwrap();
        prop_assume!(!ind.has_resonance());
        let top = ind.roots.last().unwrap().clone();
        let s = frobenius_solve(&m, &top, 5).unwrap();
        prop_assert!(m.annihilates(s.plain()));
    }

    #[test]
    fn b1_identity(h in small_rat()) {
        prop_assume!(h != int(-1) && h != rat(3, 4));
        let b = c16_b1(&h).unwrap();
        prop_assert_eq!((b - int(120) * &h + int(584)) * int(16), c16_n(&h, 16).unwrap());
    }

    #[test]
    fn b1_is_the_solver_coefficient(h in small_rat()) {
        prop_assume!(h != int(-1) && h != rat(3, 4));
        let m = Mlde3::from_ch(&int(16), &h);
        let root = &h - rat(2, 3);
        prop_assume!(indicial(&m).unwrap().resonance_steps[indicial(&m).unwrap().roots.iter().position(|r| *r == root).unwrap()].is_empty());
        let s = frobenius_solve(&m, &root, 2).unwrap();
        prop_assert_eq!(s.coefficients(2)[1].clone(), c16_b1(&h).unwrap());
    }

    #[test]
    fn c16_discriminant_identity(n in -100_000i128..100_000, y in 1i128..64) {
        prop_assert!(discriminant_identity_holds(n, y));
    }

    #[test]
    fn horner_equals_direct(v in prop::collection::vec(small_rat(), 1..7)) {
        let k = kappa(Exp::from_integer(7));
        prop_assert_eq!(compose_horner(&v, &k), compose_direct(&v, &k));
    }

    #[test]
    fn record_verdict_is_the_worst_member(coeffs in prop::collection::vec(prop::collection::vec(-3i64..30, 3), 1..4)) {
        let data: Vec<LeadingData> = coeffs
            .iter()
            .map(|c| LeadingData::new("f", int(0), int(1), c.iter().map(|&x| rat(x, 2)).collect()))
            .collect();
        let worst = data.iter().map(LeadingData::verdict).max().unwrap();
        let ind = indicial(&Mlde3::from_ch(&int(8), &rat(1, 2))).ok();
        prop_assert_eq!(derive_verdict(ind.as_ref(), &data), worst);
    }

    #[test]
    fn sorting_ignores_input_order(hs in prop::collection::vec(small_rat(), 1..10), seed in any::<u64>()) {
        let mk = |h: &Rational| CandidateRecord::new(Pipeline::C16, format!("h={h}"), &[("h", h.clone())], None, vec![]);
        let mut a: Vec<CandidateRecord> = hs.iter().map(mk).collect();
        let mut b = a.clone();
        let n = b.len();
        b.rotate_left((seed as usize) % n);
        b.reverse();
        sort_records(&mut a);
        sort_records(&mut b);
        prop_assert_eq!(a, b);
    }
}
