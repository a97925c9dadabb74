//! Random exact instances shared by the integration tests.
#![allow(dead_code)]

use mops_core::functional::{MomentFunctional, PolySeq};
use mops_core::relation23::{self, CaseTag, FunctionalRelation};
use mops_core::scalar::{int, rat};
use mops_core::{RecurrencePair, Relation23, Scalar};
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::Rng;

/// Small rational `p/q` with `|p| <= 6`, `1 <= q <= 4`.
pub fn small(rng: &mut StdRng) -> Scalar {
    rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

pub fn small_nonzero(rng: &mut StdRng) -> Scalar {
    loop {
        let x = small(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

pub fn random_recurrence(rng: &mut StdRng, count: usize) -> RecurrencePair {
    RecurrencePair::new(
        (0..count).map(|_| small(rng)).collect(),
        (0..count).map(|_| small_nonzero(rng)).collect(),
    )
    .unwrap()
}

/// A relation with `r_n t_n != 0` for `n >= 2` and `t_2 != r_2 s_1`, so it
/// passes the non-degenerate gate.
pub fn random_gated_relation(rng: &mut StdRng, len: usize) -> Relation23 {
    loop {
        let mut r = vec![Scalar::zero(); len];
        let mut s = vec![Scalar::zero(); len];
        let mut t = vec![Scalar::zero(); len];
        for n in 1..len {
            s[n] = small(rng);
            if n >= 2 {
                r[n] = small_nonzero(rng);
                t[n] = small_nonzero(rng);
            }
        }
        let rel = Relation23::new(r, s, t).unwrap();
        if relation23::classify(&rel).unwrap().tag == CaseTag::NonDegenerate23 {
            return rel;
        }
    }
}

/// An instance in which `(Q_n)` is a MOPS by construction.
pub struct TrueInstance {
    pub rec: RecurrencePair,
    pub u: MomentFunctional,
    pub fr: FunctionalRelation,
    pub beta0_tilde: Scalar,
    pub v: MomentFunctional,
    pub v_rec: RecurrencePair,
    pub p: PolySeq,
    pub q: PolySeq,
    pub rel: Relation23,
}

/// Random regular `u`, random `lambda, c, a, b, beta~_0`, `v` from
/// `lambda (x - c) u = (x^2 + a x + b) v`, and the 2-3 relation between the
/// two MOPS recovered by projection. Polynomials run through index `top`.
pub fn random_true_instance(rng: &mut StdRng, top: usize) -> TrueInstance {
    let moment_depth = 2 * top + 1;
    loop {
        let rec = random_recurrence(rng, top + 2);
        let u = rec.moments(moment_depth).unwrap();
        let fr = FunctionalRelation::new(
            small_nonzero(rng),
            small(rng),
            small(rng),
            small(rng),
        )
        .unwrap();
        let beta0_tilde = small(rng);
        let v = relation23::v_moments_from_relation(&u, &fr, &beta0_tilde).unwrap();
        let report = v.recurrence_from_moments();
        if !report.regular_through_order(top) {
            continue;
        }
        let v_rec = report.recurrence;
        let p = rec.mops(top + 1).unwrap();
        let q = v_rec.mops(top + 1).unwrap();
        let r2 = if rng.gen_bool(0.5) { int(0) } else { small(rng) };
        let Ok(rel) = relation23::fit_relation(&p, &q, r2) else {
            continue;
        };
        if relation23::classify(&rel).unwrap().tag != CaseTag::NonDegenerate23 {
            continue;
        }
        if (3..=top).any(|n| rel.rs()[n].is_zero() || rel.ts()[n].is_zero()) {
            continue;
        }
        assert_eq!(
            relation23::relation_identity_failure(&p, &q, &rel, 0, top).unwrap(),
            None
        );
        return TrueInstance {
            rec,
            u,
            fr,
            beta0_tilde,
            v,
            v_rec,
            p,
            q,
            rel,
        };
    }
}

/// Replaces one of `r_n, s_n, t_n` (`1 <= n <= last`) by a different value,
/// keeping the conventions, the non-degenerate gate and `r_n t_n != 0` for `n >= 3`.
pub fn perturb(rng: &mut StdRng, rel: &Relation23, last: usize) -> (Relation23, char, usize) {
    loop {
        let n = rng.gen_range(1..=last);
        let which = ['r', 's', 't'][rng.gen_range(0..3)];
        if which == 't' && n == 1 {
            continue;
        }
        let old = match which {
            'r' => rel.r(n).unwrap(),
            's' => rel.s(n).unwrap(),
            _ => rel.t(n).unwrap(),
        }
        .clone();
        let new = &old + small_nonzero(rng);
        if n >= 3 && (which == 'r' || which == 't') && new.is_zero() {
            continue;
        }
        let out = rel.with_entry(which, n, new).unwrap();
        if relation23::classify(&out).unwrap().tag != CaseTag::NonDegenerate23 {
            continue;
        }
        return (out, which, n);
    }
}
