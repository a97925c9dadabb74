//! Two worked reproductions of non-degenerate 2-3 relations.
//!
//! * [`chebyshev_case`]: `u = -(1/3) x w3 + delta_1` with `<w3, 1> = 3/2`
//!   (then normalized) against the
//!   Chebyshev functional of the fourth kind. The relation is non-degenerate
//!   although `(x - 1) u` is not regular.
//! * [`jacobi_chain`]: a Jacobi functional `w`, its Geronimus transform `w~`
//!   at `1`, `u = (1 + x) w~`, and `v` with `(1 + x) v = w`.
//!
//! Both pipelines certify every identity they rely on as an exact
//! polynomial or scalar identity through the requested depth.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{self, JacobiParams};
use crate::functional::{MomentFunctional, PolySeq, RecurrencePair};
use crate::poly::Polynomial;
use crate::relation23::{
    self, AbcSequences, CaseTag, ConditionFailure, FunctionalCheck, FunctionalRelation,
    InverseVerdict, Relation23, RegularityCriterion,
};
use crate::scalar::{int, rat, serde_scalar, Scalar};
use crate::seq::IndexedSeq;

/// Column names of the per-index table.
pub const CSV_HEADER: [&str; 12] = [
    "n",
    "a",
    "b",
    "c",
    "r",
    "s",
    "t",
    "beta_tilde",
    "gamma_tilde",
    "A",
    "B",
    "C",
];

/// One row of the per-index table; empty cells where a quantity is undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseRow {
    pub n: usize,
    pub cells: Vec<Option<Scalar>>,
}

fn table_rows(
    depth: usize,
    a: Option<&IndexedSeq>,
    b: Option<&IndexedSeq>,
    c: Option<&IndexedSeq>,
    rel: &Relation23,
    tilde: &RecurrencePair,
    abc: &AbcSequences,
) -> Vec<CaseRow> {
    let pick = |seq: Option<&IndexedSeq>, n: usize| seq.and_then(|s| s.get(n).cloned());
    (0..=depth)
        .map(|n| CaseRow {
            n,
            cells: vec![
                pick(a, n),
                pick(b, n),
                pick(c, n),
                rel.r(n).ok().cloned(),
                rel.s(n).ok().cloned(),
                rel.t(n).ok().cloned(),
                tilde.beta(n).ok().cloned(),
                if n == 0 { None } else { tilde.gamma(n).ok().cloned() },
                abc.a.get(n).cloned(),
                abc.b.get(n).cloned(),
                abc.c.get(n).cloned(),
            ],
        })
        .collect()
}

fn ensure(ok: bool, check: &str, n: usize) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::consistency(check, n))
    }
}

/// Any failure inside a certified pipeline is an internal inconsistency.
fn certified<T>(r: Result<T>, check: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Consistency { .. } => e,
        other => Error::Consistency {
            check: format!("{check}: {other}"),
            n: 0,
        },
    })
}

fn first_failure_index(v: &InverseVerdict) -> usize {
    v.failures.first().map_or(0, |f| f.n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChebyshevCaseReport {
    pub depth: usize,
    /// `lambda_n` of `Q_n = R_n + lambda_n R_{n-1}` (`R` Chebyshev of the second kind).
    pub lambda_seq: IndexedSeq,
    /// `P_n + a_n P_{n-1} = R_n + b_n R_{n-1}`
    pub a_seq: IndexedSeq,
    pub b_seq: IndexedSeq,
    pub rel: Relation23,
    pub tag: CaseTag,
    /// Recurrence of `u`'s MOPS.
    pub recurrence: RecurrencePair,
    pub tilde: RecurrencePair,
    pub by_equations: InverseVerdict,
    pub by_constants: InverseVerdict,
    pub abc: AbcSequences,
    pub constants: FunctionalRelation,
    pub functional_relation: FunctionalCheck,
    pub regularity: RegularityCriterion,
    /// First singular Hankel order of `(x - 1) u`.
    pub shifted_first_singular: usize,
    /// Odd `n` with `t_n = r_n (s_{n-1} - r_{n-1})`.
    pub odd_gap_indices: Vec<usize>,
}

impl ChebyshevCaseReport {
    pub fn rows(&self) -> Vec<CaseRow> {
        table_rows(
            self.depth,
            Some(&self.a_seq),
            Some(&self.b_seq),
            None,
            &self.rel,
            &self.tilde,
            &self.abc,
        )
    }
}

/// `a_{2m} = b_{2m} = -(4m+1)/(2(4m-1))`,
/// `a_{2m+1} = (4m-1)/(2(4m+1))`, `b_{2m+1} = -(4m+3)/(2(4m+1))`.
fn chebyshev_two_two(n: usize) -> (Scalar, Scalar) {
    let m = (n / 2) as i64;
    if n % 2 == 0 {
        let v = rat(-(4 * m + 1), 2 * (4 * m - 1));
        (v.clone(), v)
    } else {
        (
            rat(4 * m - 1, 2 * (4 * m + 1)),
            rat(-(4 * m + 3), 2 * (4 * m + 1)),
        )
    }
}

/// Builds and certifies the Chebyshev case through `depth`.
pub fn chebyshev_case(depth: usize) -> Result<ChebyshevCaseReport> {
    if depth < 5 {
        return Err(Error::Domain("chebyshev_case needs depth >= 5".into()));
    }
    let top = depth + 2; // largest polynomial index used
    let moment_depth = 2 * top + 2;

    // <w3, 1> = 3/2: the stated 2-2 coefficients hold only for this mass
    let w3 = families::chebyshev_kind(3, moment_depth / 2 + 2)?
        .moments(moment_depth + 1)?
        .scaled(&rat(3, 2));
    let u_raw = w3
        .left_multiply(&Polynomial::x())?
        .scaled(&rat(-1, 3))
        .add_point_mass(&int(1), &int(1));
    let u = u_raw.normalized()?;
    let report = u.recurrence_from_moments();
    ensure(report.regular_through_order(top), "u_regular", report.first_singular.unwrap_or(0))?;
    let rec = report.recurrence;

    let p = rec.mops(top + 1)?;
    let r_seq = families::chebyshev_kind(2, top + 1)?.mops(top + 1)?;
    let kind4 = families::chebyshev_kind(4, top + 1)?;
    let q = kind4.mops(top + 1)?;

    let lambda = rat(1, 2);
    let lambda_seq = IndexedSeq::from_fn(1, top, |_| lambda.clone());
    let a_seq = IndexedSeq::from_fn(1, top, |n| chebyshev_two_two(n).0);
    let b_seq = IndexedSeq::from_fn(1, top, |n| chebyshev_two_two(n).1);
    let a = |n: usize| a_seq.get(n).unwrap().clone();
    let b = |n: usize| b_seq.get(n).unwrap().clone();

    for n in 1..=top {
        let lhs = p.get(n)? + &p.get(n - 1)?.scale(&a(n));
        let rhs = r_seq.get(n)? + &r_seq.get(n - 1)?.scale(&b(n));
        ensure(lhs == rhs, "two_two_link", n)?;
        let rhs = r_seq.get(n)? + &r_seq.get(n - 1)?.scale(&lambda);
        ensure(*q.get(n)? == rhs, "q_link", n)?;
    }

    let mut r = vec![Scalar::zero(); top + 1];
    let mut s = vec![Scalar::zero(); top + 1];
    let mut t = vec![Scalar::zero(); top + 1];
    s[1] = a(1) - b(1) + &lambda;
    for n in 2..=top {
        let mu = &lambda * (b(n) - &lambda) / (b(n - 1) - &lambda);
        s[n] = a(n) + &mu;
        t[n] = a(n - 1) * &mu;
        r[n] = b(n - 1) * (b(n) - &lambda) / (b(n - 1) - &lambda);
    }
    let rel = Relation23::new(r, s, t)?;

    if let Some(n) = relation23::relation_identity_failure(&p, &q, &rel, 0, top)? {
        return Err(Error::consistency("relation", n));
    }
    let tag = relation23::classify(&rel)?.tag;
    ensure(tag == CaseTag::NonDegenerate23, "classification", 3)?;
    for n in 2..=depth {
        ensure(!rel.t(n)?.is_zero(), "t_nonzero", n)?;
        ensure(!rel.r(n)?.is_zero(), "r_nonzero", n)?;
    }
    let mut odd_gap_indices = Vec::new();
    for n in (3..=depth).step_by(2) {
        ensure(rel.projection_gap(n)?.is_zero(), "odd_gap", n)?;
        odd_gap_indices.push(n);
    }

    let shifted = u.left_multiply(&Polynomial::x_minus(int(1)))?.recurrence_from_moments();
    let shifted_first_singular = shifted
        .first_singular
        .ok_or_else(|| Error::consistency("shifted_singular", 0))?;

    let by_equations = certified(relation23::check_by_equations(&rec, &rel, depth), "by_equations")?;
    ensure(by_equations.is_mops, "by_equations", first_failure_index(&by_equations))?;
    let by_constants = certified(relation23::check_by_constants(&rec, &rel, depth), "by_constants")?;
    ensure(by_constants.is_mops, "by_constants", first_failure_index(&by_constants))?;
    let tilde = by_equations.tilde.clone();
    for n in 0..=depth {
        ensure(tilde.beta(n)? == kind4.beta(n)?, "tilde_beta", n)?;
        if n >= 1 {
            ensure(tilde.gamma(n)? == kind4.gamma(n)?, "tilde_gamma", n)?;
        }
    }

    let constants = certified(relation23::relation_constants(&rec, &tilde, &rel), "constants")?;
    let abc = by_constants
        .constants
        .clone()
        .ok_or_else(|| Error::consistency("abc_constant", 3))?;
    ensure(
        (abc.a.clone(), abc.b.clone(), abc.c.clone())
            == (constants.a.clone(), constants.b.clone(), constants.c.clone()),
        "abc_vs_constants",
        3,
    )?;
    ensure(
        (constants.a.clone(), constants.b.clone(), constants.c.clone()) == (int(1), int(0), int(1)),
        "constants_value",
        3,
    )?;
    let abc_seq = relation23::abc_sequences(&rec, &rel, depth)?;

    let w4 = kind4.moments(2 * top)?;
    let functional_relation = relation23::verify_functional_relation(&u, &w4, &constants, depth)?;
    ensure(
        functional_relation.holds,
        "functional_relation",
        functional_relation.first_failure.unwrap_or(0),
    )?;

    let regularity = relation23::regularity_criterion(&p, &constants.c, &rel, depth)?;
    ensure(
        !regularity.functional_side && !regularity.relation_side,
        "regularity_criterion",
        depth,
    )?;

    let identity_failures = relation23::check_moment_identities(&u, &p, &q, &rel, depth)?;
    if let Some(f) = identity_failures.first() {
        return Err(Error::consistency(format!("moment_identity {}", f.condition), f.n));
    }

    Ok(ChebyshevCaseReport {
        depth,
        lambda_seq,
        a_seq,
        b_seq,
        rel,
        tag,
        recurrence: rec.truncated(depth + 2, depth + 1),
        tilde,
        by_equations,
        by_constants,
        abc: abc_seq,
        constants,
        functional_relation,
        regularity,
        shifted_first_singular,
        odd_gap_indices,
    })
}

/// Outcome of a chain run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ChainStatus {
    Verified,
    /// A parameter condition or a regularity requirement failed.
    Inadmissible {
        condition: String,
        n: usize,
        message: String,
    },
    /// The construction goes through but the relation is degenerate.
    Degenerate { condition: String, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityFlag {
    pub condition: String,
    pub holds: bool,
}

/// Total masses of the unnormalized functionals in the chain (`<w, 1> = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMasses {
    #[serde(with = "serde_scalar")]
    pub w_tilde: Scalar,
    #[serde(with = "serde_scalar")]
    pub u: Scalar,
    #[serde(with = "serde_scalar")]
    pub v: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDetails {
    pub masses: ChainMasses,
    pub rel: Relation23,
    pub tag: CaseTag,
    /// Recurrence of `u`'s MOPS.
    pub recurrence: RecurrencePair,
    pub tilde: RecurrencePair,
    pub by_equations: InverseVerdict,
    pub by_constants: InverseVerdict,
    pub abc: AbcSequences,
    pub constants: FunctionalRelation,
    pub functional_relation: FunctionalCheck,
    pub regularity: RegularityCriterion,
    /// Whether the closed forms for `a_n`, `b_n` (symmetric parameters `1/2`) were compared.
    pub closed_forms_checked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiChainReport {
    pub params: JacobiParams,
    #[serde(with = "serde_scalar")]
    pub a1: Scalar,
    #[serde(with = "serde_scalar")]
    pub c1: Scalar,
    pub depth: usize,
    pub admissibility: Vec<AdmissibilityFlag>,
    #[serde(flatten)]
    pub status: ChainStatus,
    /// `W~_n = W_n + a_n W_{n-1}`
    pub a_seq: IndexedSeq,
    /// `W~_n = P_n + b_n P_{n-1}`
    pub b_seq: IndexedSeq,
    /// `Q_n = W_n + c_n W_{n-1}`
    pub c_seq: IndexedSeq,
    pub details: Option<ChainDetails>,
}

impl JacobiChainReport {
    pub fn is_verified(&self) -> bool {
        self.status == ChainStatus::Verified
    }

    pub fn rows(&self) -> Vec<CaseRow> {
        match &self.details {
            Some(d) => table_rows(
                self.depth,
                Some(&self.a_seq),
                Some(&self.b_seq),
                Some(&self.c_seq),
                &d.rel,
                &d.tilde,
                &d.abc,
            ),
            None => Vec::new(),
        }
    }
}

/// Forward solution of `x_{n+1} = beta_n + shift - gamma_n / x_n`; stops at the
/// first zero term (its index is returned as the error).
fn riccati(rec: &RecurrencePair, first: &Scalar, shift: &Scalar, top: usize) -> std::result::Result<IndexedSeq, usize> {
    let mut values = vec![first.clone()];
    for n in 1..top {
        let prev = &values[n - 1];
        let next = rec.beta(n).unwrap() + shift - rec.gamma(n).unwrap() / prev;
        if next.is_zero() {
            return Err(n + 1);
        }
        values.push(next);
    }
    Ok(IndexedSeq::new(1, values))
}

/// Builds and certifies the Jacobi chain through `depth`.
///
/// Parameter conditions, breakdown of the difference equations and loss of
/// regularity give [`ChainStatus::Inadmissible`]; `a_n = c_n` for some
/// `n >= 2` gives [`ChainStatus::Degenerate`]. A failed identity in an
/// admissible chain is an internal inconsistency and aborts with an error.
pub fn jacobi_chain(
    params: &JacobiParams,
    a1: &Scalar,
    c1: &Scalar,
    depth: usize,
) -> Result<JacobiChainReport> {
    if depth < 5 {
        return Err(Error::Domain("jacobi_chain needs depth >= 5".into()));
    }
    let (alpha, beta) = (params.alpha(), params.beta());
    let sum2 = alpha + beta + int(2);
    let conditions: [(&str, bool, &str); 5] = [
        ("a1_nonzero", !a1.is_zero(), "a1 must be nonzero"),
        ("c1_nonzero", !c1.is_zero(), "c1 must be nonzero"),
        (
            "w_tilde_defined",
            !(int(2) * (alpha + int(1)) + a1 * &sum2).is_zero(),
            "2(alpha+1) + a1(alpha+beta+2) must be nonzero",
        ),
        (
            "u_mass_nonzero",
            !(int(2) * (beta + int(1)) - a1 * &sum2).is_zero(),
            "2(beta+1) - a1(alpha+beta+2) must be nonzero",
        ),
        (
            "v_defined",
            !(int(2) * (beta + int(1)) - c1 * &sum2).is_zero(),
            "2(beta+1) - c1(alpha+beta+2) must be nonzero",
        ),
    ];
    let admissibility = conditions
        .iter()
        .map(|(c, holds, _)| AdmissibilityFlag {
            condition: c.to_string(),
            holds: *holds,
        })
        .collect();
    let empty = || IndexedSeq::new(1, vec![]);
    let mut report = JacobiChainReport {
        params: params.clone(),
        a1: a1.clone(),
        c1: c1.clone(),
        depth,
        admissibility,
        status: ChainStatus::Verified,
        a_seq: empty(),
        b_seq: empty(),
        c_seq: empty(),
        details: None,
    };
    let inadmissible = |mut report: JacobiChainReport, condition: &str, n: usize, message: String| {
        report.status = ChainStatus::Inadmissible {
            condition: condition.to_string(),
            n,
            message,
        };
        Ok(report)
    };
    if let Some((c, _, msg)) = conditions.iter().find(|(_, holds, _)| !holds) {
        return inadmissible(report, c, 1, msg.to_string());
    }

    let top = depth + 2;
    let moment_depth = 2 * top + 2;
    let rec_w = families::jacobi_recurrence(params, moment_depth / 2 + 2)?;
    let w = rec_w.moments(moment_depth)?;

    let a_seq = match riccati(&rec_w, a1, &int(-1), top) {
        Ok(s) => s,
        Err(n) => return inadmissible(report, "a_nonzero", n, format!("a_{n} vanishes")),
    };
    report.a_seq = a_seq.clone();
    let c_seq = match riccati(&rec_w, c1, &int(1), top) {
        Ok(s) => s,
        Err(n) => return inadmissible(report, "c_nonzero", n, format!("c_{n} vanishes")),
    };
    report.c_seq = c_seq.clone();
    let a = |n: usize| a_seq.get(n).unwrap().clone();
    let c = |n: usize| c_seq.get(n).unwrap().clone();

    let beta0 = rec_w.beta(0)?.clone();
    let w_tilde_mass = Scalar::one() / (int(1) - &beta0 + a1);
    let w_tilde = w.scaled(&int(-1)).divide_by_linear(&int(1), &w_tilde_mass);
    let u_raw = w_tilde.left_multiply(&Polynomial::from_ints(&[1, 1]))?;
    let u_mass = int(2) * &w_tilde_mass - int(1);
    ensure(*u_raw.mass() == u_mass, "u_mass", 0)?;
    let v_mass = Scalar::one() / (int(1) + &beta0 - c1);
    let v_raw = w.divide_by_linear(&int(-1), &v_mass);

    let w_tilde_report = w_tilde.normalized()?.recurrence_from_moments();
    if !w_tilde_report.regular_through_order(top) {
        let n = w_tilde_report.first_singular.unwrap_or(0);
        return inadmissible(report, "w_tilde_regular", n, format!("Hankel order {n} of w~ vanishes"));
    }
    let u = u_raw.normalized()?;
    let u_report = u.recurrence_from_moments();
    if !u_report.regular_through_order(top) {
        let n = u_report.first_singular.unwrap_or(0);
        return inadmissible(report, "u_regular", n, format!("Hankel order {n} of u vanishes"));
    }
    let v = v_raw.normalized()?;
    let v_report = v.recurrence_from_moments();
    if !v_report.regular_through_order(top) {
        let n = v_report.first_singular.unwrap_or(0);
        return inadmissible(report, "v_regular", n, format!("Hankel order {n} of v vanishes"));
    }

    let rec_wt = w_tilde_report.recurrence;
    let rec = u_report.recurrence;
    let rec_v = v_report.recurrence;
    let ww = rec_w.mops(top + 1)?;
    let wt = rec_wt.mops(top + 1)?;
    let p = rec.mops(top + 1)?;
    let q = rec_v.mops(top + 1)?;

    // <w~, W~_n^2> / <u, P_{n-1}^2>, both unnormalized
    let b_seq = IndexedSeq::from_fn(1, top, |n| {
        let wt_norm = &w_tilde_mass * rec_wt.norm_squared(n).unwrap();
        let p_norm = &u_mass * rec.norm_squared(n - 1).unwrap();
        wt_norm / p_norm
    });
    report.b_seq = b_seq.clone();
    let b = |n: usize| b_seq.get(n).unwrap().clone();

    for n in 1..=top {
        let wt_n = wt.get(n)?;
        ensure(*wt_n == ww.get(n)? + &ww.get(n - 1)?.scale(&a(n)), "w_tilde_link", n)?;
        ensure(*wt_n == p.get(n)? + &p.get(n - 1)?.scale(&b(n)), "p_link", n)?;
        ensure(*q.get(n)? == ww.get(n)? + &ww.get(n - 1)?.scale(&c(n)), "q_link", n)?;
        ensure(
            ww.get(n)? + &ww.get(n - 1)?.scale(&a(n)) == p.get(n)? + &p.get(n - 1)?.scale(&b(n)),
            "two_two",
            n,
        )?;
        let wt_norm = &w_tilde_mass * rec_wt.norm_squared(n)?;
        ensure(wt_norm == -a(n) * rec_w.norm_squared(n - 1)?, "w_tilde_norm", n)?;
        let v_norm = &v_mass * rec_v.norm_squared(n)?;
        let p_norm = &u_mass * rec.norm_squared(n - 1)?;
        ensure(v_norm * a(n) == -c(n) * b(n) * p_norm, "v_norm", n)?;
    }

    if let Some(n) = (2..=top).find(|&n| a(n) == c(n)) {
        report.status = ChainStatus::Degenerate {
            condition: "a_equals_c".into(),
            n,
        };
        return Ok(report);
    }

    let mut r = vec![Scalar::zero(); top + 1];
    let mut s = vec![Scalar::zero(); top + 1];
    let mut t = vec![Scalar::zero(); top + 1];
    s[1] = b(1) + c(1) - a(1);
    for n in 2..=top {
        if n == 2 && a(1) == c(1) {
            r[2] = a(2) - c(2);
            s[2] = b(2);
            t[2] = (a(2) - c(2)) * c(1);
            continue;
        }
        let ratio = (a(n) - c(n)) / (a(n - 1) - c(n - 1));
        r[n] = a(n - 1) * &ratio;
        s[n] = b(n) + c(n - 1) * &ratio;
        t[n] = b(n - 1) * c(n - 1) * &ratio;
    }
    let rel = Relation23::new(r, s, t)?;
    if let Some(n) = relation23::relation_identity_failure(&p, &q, &rel, 0, top)? {
        return Err(Error::consistency("relation", n));
    }
    let tag = relation23::classify(&rel)?.tag;
    if tag != CaseTag::NonDegenerate23 {
        report.status = ChainStatus::Degenerate {
            condition: format!("classified_{tag}"),
            n: 3,
        };
        return Ok(report);
    }

    let by_equations = certified(relation23::check_by_equations(&rec, &rel, depth), "by_equations")?;
    ensure(by_equations.is_mops, "by_equations", first_failure_index(&by_equations))?;
    let by_constants = certified(relation23::check_by_constants(&rec, &rel, depth), "by_constants")?;
    ensure(by_constants.is_mops, "by_constants", first_failure_index(&by_constants))?;
    let tilde = by_equations.tilde.clone();
    for n in 0..=depth {
        ensure(tilde.beta(n)? == rec_v.beta(n)?, "tilde_beta", n)?;
        if n >= 1 {
            ensure(tilde.gamma(n)? == rec_v.gamma(n)?, "tilde_gamma", n)?;
        }
    }

    let constants = certified(relation23::relation_constants(&rec, &tilde, &rel), "constants")?;
    let abc = by_constants
        .constants
        .clone()
        .ok_or_else(|| Error::consistency("abc_constant", 3))?;
    ensure(
        (abc.a.clone(), abc.b.clone(), abc.c.clone())
            == (constants.a.clone(), constants.b.clone(), constants.c.clone()),
        "abc_vs_constants",
        3,
    )?;
    ensure(
        (constants.a.clone(), constants.b.clone(), constants.c.clone()) == (int(2), int(1), int(1)),
        "constants_value",
        3,
    )?;
    ensure(constants.lambda == -&u_mass / &v_mass, "lambda", 0)?;
    let abc_seq = relation23::abc_sequences(&rec, &rel, depth)?;

    let functional_relation = relation23::verify_functional_relation(&u, &v, &constants, depth)?;
    ensure(
        functional_relation.holds,
        "functional_relation",
        functional_relation.first_failure.unwrap_or(0),
    )?;
    // the same relation straight from the unnormalized functionals
    let lhs = u_raw.left_multiply(&Polynomial::from_ints(&[1, -1]))?;
    let rhs = v_raw.left_multiply(&Polynomial::from_ints(&[1, 2, 1]))?;
    for n in 0..=depth {
        ensure(lhs.moment(n)? == rhs.moment(n)?, "raw_functional_relation", n)?;
    }

    let regularity = relation23::regularity_criterion(&p, &constants.c, &rel, depth)?;
    ensure(
        regularity.functional_side && regularity.relation_side,
        "regularity_criterion",
        depth,
    )?;
    let shifted = u.left_multiply(&Polynomial::x_minus(int(1)))?.recurrence_from_moments();
    ensure(shifted.regular_through_order(depth), "shifted_regular", depth)?;

    let identity_failures = relation23::check_moment_identities(&u, &p, &q, &rel, depth)?;
    if let Some(f) = identity_failures.first() {
        return Err(Error::consistency(format!("moment_identity {}", f.condition), f.n));
    }

    let half = rat(1, 2);
    let closed_forms_checked = *alpha == half && *beta == half;
    if closed_forms_checked {
        let (ca, cb) = half_case_closed_forms(a1, top)?;
        for n in 1..=top {
            ensure(ca.get(n) == a_seq.get(n), "closed_form_a", n)?;
            ensure(cb.get(n) == b_seq.get(n), "closed_form_b", n)?;
        }
        let (qa, qc) = half_case_quotient_forms(a1, c1, top)?;
        for n in 1..=top {
            ensure(qa.get(n) == a_seq.get(n), "quotient_form_a", n)?;
            ensure(qc.get(n) == c_seq.get(n), "quotient_form_c", n)?;
        }
    }

    report.details = Some(ChainDetails {
        masses: ChainMasses {
            w_tilde: w_tilde_mass,
            u: u_mass,
            v: v_mass,
        },
        rel,
        tag,
        recurrence: rec.truncated(depth + 2, depth + 1),
        tilde,
        by_equations,
        by_constants,
        abc: abc_seq,
        constants,
        functional_relation,
        regularity,
        closed_forms_checked,
    });
    Ok(report)
}

fn half_case_domain(a1: &Scalar) -> Result<()> {
    let excluded = (*a1 > rat(-1, 2) && *a1 <= int(0)) || *a1 == int(1) || *a1 == int(-1);
    if excluded {
        return Err(Error::Domain(format!(
            "a1 = {a1} lies in (-1/2, 0] or is +-1"
        )));
    }
    Ok(())
}

/// Closed forms for symmetric parameters `1/2`, `1 <= n <= count`:
///
/// ```text
/// a_n = -1/2 (1 - (1 + 2 a1) n) / (1 - (1 + 2 a1)(n - 1))
/// b_n = -a_n ((2n-1)(1+a1) - (1+2a1)(n-1)n) / ((2n+1)(1+a1) - (1+2a1)n(n+1))
/// ```
pub fn half_case_closed_forms(a1: &Scalar, count: usize) -> Result<(IndexedSeq, IndexedSeq)> {
    half_case_domain(a1)?;
    let k = int(1) + int(2) * a1;
    let h = int(1) + a1;
    let mut a = Vec::with_capacity(count);
    let mut b = Vec::with_capacity(count);
    for n in 1..=count {
        let nn = int(n as i64);
        let den_a = int(1) - &k * (&nn - int(1));
        if den_a.is_zero() {
            return Err(Error::Domain(format!("a_{n}: vanishing denominator")));
        }
        let an = rat(-1, 2) * (int(1) - &k * &nn) / den_a;
        let den_b = int(2 * n as i64 + 1) * &h - &k * &nn * (&nn + int(1));
        if den_b.is_zero() {
            return Err(Error::Domain(format!("b_{n}: vanishing denominator")));
        }
        let bn = -&an * (int(2 * n as i64 - 1) * &h - &k * (&nn - int(1)) * &nn) / den_b;
        a.push(an);
        b.push(bn);
    }
    Ok((IndexedSeq::new(1, a), IndexedSeq::new(1, b)))
}

/// `a_n` and `c_n` for symmetric parameters `1/2` from the Gamma-quotient
/// forms, which reduce to rational expressions there:
///
/// ```text
/// a_n = -1/2 (2 + M (n+1)) / (2 + M n),   M = -(1 + 2 a1) / (1 + a1)
/// c_n =  1/2 (2 + N (n+1)) / (2 + N n),   N = -(1 - 2 c1) / (1 - c1)
/// ```
pub fn half_case_quotient_forms(
    a1: &Scalar,
    c1: &Scalar,
    count: usize,
) -> Result<(IndexedSeq, IndexedSeq)> {
    if *a1 == int(-1) || *c1 == int(1) {
        return Err(Error::Domain("a1 = -1 or c1 = 1".into()));
    }
    let m = -(int(1) + int(2) * a1) / (int(1) + a1);
    let big_n = -(int(1) - int(2) * c1) / (int(1) - c1);
    let form = |sign: Scalar, k: &Scalar, n: usize| -> Result<Scalar> {
        let den = int(2) + k * int(n as i64);
        if den.is_zero() {
            return Err(Error::Domain(format!("index {n}: vanishing denominator")));
        }
        Ok(sign * (int(2) + k * int(n as i64 + 1)) / den)
    };
    let a = (1..=count)
        .map(|n| form(rat(-1, 2), &m, n))
        .collect::<Result<Vec<_>>>()?;
    let c = (1..=count)
        .map(|n| form(rat(1, 2), &big_n, n))
        .collect::<Result<Vec<_>>>()?;
    Ok((IndexedSeq::new(1, a), IndexedSeq::new(1, c)))
}

/// Moments of `(x - c) u` restricted to a first failing Hankel order, for reports.
pub fn shifted_first_singular(u: &MomentFunctional, c: &Scalar) -> Result<Option<usize>> {
    Ok(u.left_multiply(&Polynomial::x_minus(c.clone()))?
        .recurrence_from_moments()
        .first_singular)
}

/// Failures as `ConditionFailure` values, for uniform reporting.
pub fn status_failure(status: &ChainStatus) -> Option<ConditionFailure> {
    match status {
        ChainStatus::Verified => None,
        ChainStatus::Inadmissible { condition, n, .. } | ChainStatus::Degenerate { condition, n } => {
            Some(ConditionFailure {
                condition: condition.clone(),
                n: *n,
            })
        }
    }
}

/// Helper used by reports: the polynomial sequences of a chain are simple sets.
pub fn is_simple_set(seq: &PolySeq) -> bool {
    seq.polys()
        .iter()
        .enumerate()
        .all(|(n, p)| p.degree() == Some(n) && p.is_monic())
}
