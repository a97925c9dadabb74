mod common;

use mops_core::casebook;
use mops_core::relation23::{self, CaseTag};
use mops_core::scalar::{int, rat};
use mops_core::{Polynomial, Relation23, Scalar};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

/// Independent restatement of the six cases as predicates.
fn case_predicates(r: &[Scalar; 4], s: &[Scalar; 3], t: &[Scalar; 4]) -> [(CaseTag, bool); 6] {
    let k = &s[1] - &r[1];
    let first = t[2] == &r[2] * &k;
    [
        (CaseTag::Trivial11, first && k.is_zero()),
        (CaseTag::Type12, first && !k.is_zero()),
        (CaseTag::Type13, !first && r[3].is_zero()),
        (
            CaseTag::Type21,
            !first && !r[3].is_zero() && t[3].is_zero() && t[2] == &s[2] * &k,
        ),
        (
            CaseTag::Type22,
            !first && !r[3].is_zero() && t[3].is_zero() && t[2] != &s[2] * &k,
        ),
        (
            CaseTag::NonDegenerate23,
            !first && !r[3].is_zero() && !t[3].is_zero(),
        ),
    ]
}

fn tiny() -> impl Strategy<Value = Scalar> {
    // zeros and coincidences must be frequent to reach every case
    (-2i64..=2, 1i64..=2).prop_map(|(n, d)| rat(n, d))
}

fn check_recurrence_claim(q: &mops_core::PolySeq, tilde: &mops_core::RecurrencePair, upto: usize) {
    for n in 1..upto {
        let next = &(&q.get(n).unwrap().shift_up() - &q.get(n).unwrap().scale(tilde.beta(n).unwrap()))
            - &q.get(n - 1).unwrap().scale(tilde.gamma(n).unwrap());
        assert_eq!(&next, q.get(n + 1).unwrap(), "three-term recurrence at n = {n}");
    }
    assert_eq!(
        q.get(1).unwrap(),
        &Polynomial::x_minus(tilde.beta(0).unwrap().clone())
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn classification_is_total_and_exclusive(
        r1 in tiny(), r2 in tiny(), r3 in tiny(),
        s1 in tiny(), s2 in tiny(), t2 in tiny(), t3 in tiny(),
    ) {
        let z = Scalar::zero();
        let rel = Relation23::new(
            vec![z.clone(), r1.clone(), r2.clone(), r3.clone()],
            vec![z.clone(), s1.clone(), s2.clone(), z.clone()],
            vec![z.clone(), z.clone(), t2.clone(), t3.clone()],
        ).unwrap();
        let preds = case_predicates(
            &[z.clone(), r1, r2, r3],
            &[z.clone(), s1, s2],
            &[z.clone(), z, t2, t3],
        );
        let holding: Vec<CaseTag> = preds.iter().filter(|(_, b)| *b).map(|(t, _)| *t).collect();
        prop_assert_eq!(holding.len(), 1);
        prop_assert_eq!(relation23::classify(&rel).unwrap().tag, holding[0]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The moment identities follow from the relation alone, for any data.
    #[test]
    fn moment_identities_hold_for_any_relation(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let depth = 8;
        let rec = common::random_recurrence(&mut rng, depth + 2);
        let rel = common::random_gated_relation(&mut rng, depth + 1);
        let u = rec.moments(2 * depth).unwrap();
        let p = rec.mops(depth + 1).unwrap();
        let q = relation23::generate_q(&p, &rel).unwrap();
        prop_assert!(relation23::check_moment_identities(&u, &p, &q, &rel, depth).unwrap().is_empty());
    }

    #[test]
    fn fit_recovers_generated_relation(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let rec = common::random_recurrence(&mut rng, 10);
        let rel = common::random_gated_relation(&mut rng, 9);
        let rel = rel.with_entry('r', 1, Scalar::zero()).unwrap();
        let p = rec.mops(9).unwrap();
        let q = relation23::generate_q(&p, &rel).unwrap();
        let fitted = relation23::fit_relation(&p, &q, rel.r(2).unwrap().clone()).unwrap();
        prop_assert_eq!(fitted, rel);
    }

    #[test]
    fn v_moments_satisfy_the_relation(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let rec = common::random_recurrence(&mut rng, 12);
        let u = rec.moments(20).unwrap();
        let fr = relation23::FunctionalRelation::new(
            common::small_nonzero(&mut rng),
            common::small(&mut rng),
            common::small(&mut rng),
            common::small(&mut rng),
        ).unwrap();
        let bt0 = common::small(&mut rng);
        let v = relation23::v_moments_from_relation(&u, &fr, &bt0).unwrap();
        prop_assert!(relation23::verify_functional_relation(&u, &v, &fr, 18).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// On constructed MOPS instances: both checkers say yes, the generated
    /// sequence follows the candidate recurrence, the constant sequences equal
    /// the closed-form constants and the stored recurrence of `v` matches.
    #[test]
    fn true_instances(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let depth = 8;
        let inst = common::random_true_instance(&mut rng, depth + 2);
        let by_eq = relation23::check_by_equations(&inst.rec, &inst.rel, depth).unwrap();
        let by_const = relation23::check_by_constants(&inst.rec, &inst.rel, depth).unwrap();
        prop_assert!(by_eq.is_mops, "{:?}", by_eq.failures);
        prop_assert!(by_const.is_mops, "{:?}", by_const.failures);
        prop_assert_eq!(&by_eq.tilde, &by_const.tilde);
        check_recurrence_claim(&inst.q, &by_eq.tilde, depth + 1);
        for n in 0..=depth {
            prop_assert_eq!(by_eq.tilde.beta(n).unwrap(), inst.v_rec.beta(n).unwrap());
        }
        let fr = relation23::relation_constants(&inst.rec, &by_eq.tilde, &inst.rel).unwrap();
        let abc = by_const.constants.unwrap();
        prop_assert_eq!((abc.a, abc.b, abc.c), (fr.a.clone(), fr.b.clone(), fr.c.clone()));
        prop_assert_eq!(&fr, &inst.fr);
        prop_assert_eq!(by_eq.tilde.beta(0).unwrap(), &inst.beta0_tilde);
    }

    /// Perturbing one coefficient inside the checked window keeps the verdicts equal.
    #[test]
    fn perturbed_instances(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let depth = 8;
        let inst = common::random_true_instance(&mut rng, depth + 2);
        let (rel, which, n) = common::perturb(&mut rng, &inst.rel, depth + 1);
        let by_eq = relation23::check_by_equations(&inst.rec, &rel, depth).unwrap();
        let by_const = relation23::check_by_constants(&inst.rec, &rel, depth).unwrap();
        prop_assert_eq!(by_eq.is_mops, by_const.is_mops, "perturbed {}_{}", which, n);
    }

    #[test]
    fn random_relations_agree(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let depth = 8;
        let rec = common::random_recurrence(&mut rng, depth + 2);
        let rel = common::random_gated_relation(&mut rng, depth + 3);
        let by_eq = relation23::check_by_equations(&rec, &rel, depth).unwrap();
        let by_const = relation23::check_by_constants(&rec, &rel, depth).unwrap();
        prop_assert_eq!(by_eq.is_mops, by_const.is_mops);
        prop_assert_eq!(by_eq.is_mops, by_eq.failures.is_empty());
        prop_assert_eq!(by_const.is_mops, by_const.failures.is_empty());
    }
}

#[test]
fn chebyshev_t4_bump_breaks_both_checkers() {
    let rep = casebook::chebyshev_case(10).unwrap();
    let t4 = rep.rel.t(4).unwrap() + int(1);
    let rel = rep.rel.with_entry('t', 4, t4).unwrap();
    let by_eq = relation23::check_by_equations(&rep.recurrence, &rel, 10).unwrap();
    let by_const = relation23::check_by_constants(&rep.recurrence, &rel, 10).unwrap();
    assert!(!by_eq.is_mops && !by_const.is_mops);
    assert!(by_eq.failures.iter().any(|f| f.n == 4 && f.condition == "eqn2"), "{:?}", by_eq.failures);
    assert!(
        by_const.failures.iter().any(|f| f.n == 4 && f.condition == "start_condition"),
        "{:?}",
        by_const.failures
    );
}

#[test]
fn chebyshev_generated_q_is_fourth_kind() {
    let rep = casebook::chebyshev_case(8).unwrap();
    let p = rep.recurrence.mops(9).unwrap();
    let q = relation23::generate_q(&p, &rep.rel).unwrap();
    let kind4 = mops_core::families::chebyshev_kind(4, 9).unwrap().mops(9).unwrap();
    assert_eq!(q, kind4);
    assert_eq!(q.get(2).unwrap(), kind4.get(2).unwrap());
    assert_eq!(relation23::classify(&rep.rel).unwrap().tag, CaseTag::NonDegenerate23);
    // d_4 = a_4 r_3 on the case data, both sides computed separately
    let aux = relation23::abcd_sequences(&rep.recurrence, &rep.tilde, &rep.rel, 4).unwrap();
    assert_eq!(aux.d.get(4).unwrap(), &(aux.a.get(4).unwrap() * rep.rel.r(3).unwrap()));
}

#[test]
fn chebyshev_v_moments_are_fourth_kind_moments() {
    let rep = casebook::chebyshev_case(8).unwrap();
    let u = rep.recurrence.moments(18).unwrap();
    let v = relation23::v_moments_from_relation(&u, &rep.constants, &rat(-1, 2)).unwrap();
    let w4 = mops_core::families::chebyshev_kind(4, 12).unwrap().moments(18).unwrap();
    assert_eq!(v, w4);
    assert_eq!(v.moment(0).unwrap(), &Scalar::one());
}
