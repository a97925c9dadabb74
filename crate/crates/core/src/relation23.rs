//! 2-3 type structure relations
//!
//! ```text
//! Q_n + r_n Q_{n-1} = P_n + s_n P_{n-1} + t_n P_{n-2},   r_0 = s_0 = t_0 = t_1 = 0
//! ```
//!
//! Given the recurrence data of a MOPS `(P_n)`, this module classifies the
//! relation into its degenerate and non-degenerate cases, decides whether
//! the generated `(Q_n)` is again a MOPS (two independent checkers), and
//! computes the constants of `lambda (x - c) u = (x^2 + a x + b) v`.
//!
//! All "for every n" statements are certified only through an explicit
//! `depth`.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{MomentFunctional, PolySeq, RecurrencePair};
use crate::poly::Polynomial;
use crate::scalar::{serde_scalar, serde_scalar_vec, Scalar};
use crate::seq::IndexedSeq;

/// Coefficient sequences `r_n, s_n, t_n`, all indexed from 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRelation", into = "RawRelation")]
pub struct Relation23 {
    r: Vec<Scalar>,
    s: Vec<Scalar>,
    t: Vec<Scalar>,
}

#[derive(Serialize, Deserialize)]
struct RawRelation {
    #[serde(with = "serde_scalar_vec")]
    r: Vec<Scalar>,
    #[serde(with = "serde_scalar_vec")]
    s: Vec<Scalar>,
    #[serde(with = "serde_scalar_vec")]
    t: Vec<Scalar>,
}

impl TryFrom<RawRelation> for Relation23 {
    type Error = Error;
    fn try_from(raw: RawRelation) -> Result<Self> {
        Relation23::new(raw.r, raw.s, raw.t)
    }
}

impl From<Relation23> for RawRelation {
    fn from(rel: Relation23) -> Self {
        RawRelation {
            r: rel.r,
            s: rel.s,
            t: rel.t,
        }
    }
}

impl Relation23 {
    /// Validates equal lengths (at least 2) and `r_0 = s_0 = t_0 = t_1 = 0`.
    pub fn new(r: Vec<Scalar>, s: Vec<Scalar>, t: Vec<Scalar>) -> Result<Self> {
        if r.len() != s.len() || s.len() != t.len() {
            return Err(Error::Domain(format!(
                "r, s, t must have equal lengths (got {}, {}, {})",
                r.len(),
                s.len(),
                t.len()
            )));
        }
        if r.len() < 2 {
            return Err(Error::Domain("relation needs entries for n = 0 and n = 1".into()));
        }
        if !(r[0].is_zero() && s[0].is_zero() && t[0].is_zero() && t[1].is_zero()) {
            return Err(Error::Domain("convention r0=s0=t0=t1=0 violated".into()));
        }
        Ok(Relation23 { r, s, t })
    }

    /// The identity relation `Q_n = P_n` with indices `0..len`.
    pub fn zero(len: usize) -> Self {
        let zeros = vec![Scalar::zero(); len.max(2)];
        Relation23 {
            r: zeros.clone(),
            s: zeros.clone(),
            t: zeros,
        }
    }

    /// Number of stored indices; the largest usable index is `len() - 1`.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn r(&self, n: usize) -> Result<&Scalar> {
        self.r.get(n).ok_or_else(|| Error::depth("r", n, self.len() - 1))
    }

    pub fn s(&self, n: usize) -> Result<&Scalar> {
        self.s.get(n).ok_or_else(|| Error::depth("s", n, self.len() - 1))
    }

    pub fn t(&self, n: usize) -> Result<&Scalar> {
        self.t.get(n).ok_or_else(|| Error::depth("t", n, self.len() - 1))
    }

    pub fn rs(&self) -> &[Scalar] {
        &self.r
    }

    pub fn ss(&self) -> &[Scalar] {
        &self.s
    }

    pub fn ts(&self) -> &[Scalar] {
        &self.t
    }

    pub fn require(&self, max_index: usize, what: &'static str) -> Result<()> {
        if max_index >= self.len() {
            return Err(Error::depth(what, max_index, self.len() - 1));
        }
        Ok(())
    }

    /// Copy with one entry replaced (`which` is `'r'`, `'s'` or `'t'`).
    /// The conventions are re-validated.
    pub fn with_entry(&self, which: char, n: usize, value: Scalar) -> Result<Self> {
        let mut out = self.clone();
        let slot = match which {
            'r' => out.r.get_mut(n),
            's' => out.s.get_mut(n),
            't' => out.t.get_mut(n),
            _ => return Err(Error::Domain(format!("unknown sequence {which:?}"))),
        }
        .ok_or_else(|| Error::depth("with_entry", n, self.len() - 1))?;
        *slot = value;
        Relation23::new(out.r, out.s, out.t)
    }

    pub fn truncated(&self, len: usize) -> Result<Self> {
        Relation23::new(
            self.r[..len.min(self.len())].to_vec(),
            self.s[..len.min(self.len())].to_vec(),
            self.t[..len.min(self.len())].to_vec(),
        )
    }

    /// `s_1 - r_1`
    fn k1(&self) -> Scalar {
        &self.s[1] - &self.r[1]
    }

    /// `t_n - r_n (s_{n-1} - r_{n-1})` for `n >= 2`.
    pub fn projection_gap(&self, n: usize) -> Result<Scalar> {
        Ok(self.t(n)? - self.r(n)? * (self.s(n - 1)? - self.r(n - 1)?))
    }
}

/// The six cases of the classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    Trivial11,
    Type12,
    Type13,
    Type21,
    Type22,
    NonDegenerate23,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::Trivial11 => "Trivial11",
            CaseTag::Type12 => "Type12",
            CaseTag::Type13 => "Type13",
            CaseTag::Type21 => "Type21",
            CaseTag::Type22 => "Type22",
            CaseTag::NonDegenerate23 => "NonDegenerate23",
        };
        f.write_str(s)
    }
}

/// Coefficients of the reduced relation a degenerate case collapses to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReducedCoefficients {
    /// `Q_n = P_n`
    Identity,
    /// `Q_n = P_n + a_n P_{n-1}`
    OneTwo { a: IndexedSeq },
    /// `Q_n = P_n + a_n P_{n-1} + b_n P_{n-2}`
    OneThree { a: IndexedSeq, b: IndexedSeq },
    /// `Q_n + c_n Q_{n-1} = P_n`
    TwoOne { c: IndexedSeq },
    /// `Q_n + c_n Q_{n-1} = P_n + d_n P_{n-1}`; when `s_1 = r_1` the `n = 2`
    /// equation keeps the constant `t_2` on the right.
    TwoTwo {
        c: IndexedSeq,
        d: IndexedSeq,
        #[serde(with = "crate::scalar::serde_scalar_opt")]
        constant_at_2: Option<Scalar>,
    },
    /// Genuine 2-3 relation, nothing to reduce.
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCase {
    pub tag: CaseTag,
    pub reduced: ReducedCoefficients,
}

/// Classifies the relation from `r_1, r_2, r_3, s_1, s_2, t_2, t_3` alone.
/// Reduced coefficients are listed for every stored index.
pub fn classify(rel: &Relation23) -> Result<RelationCase> {
    rel.require(3, "classify")?;
    let tag = classify_tag(rel);
    let last = rel.len() - 1;
    let r = |n: usize| &rel.r[n];
    let s = |n: usize| &rel.s[n];
    let t = |n: usize| &rel.t[n];
    let reduced = match tag {
        CaseTag::Trivial11 => ReducedCoefficients::Identity,
        CaseTag::Type12 => ReducedCoefficients::OneTwo {
            a: IndexedSeq::from_fn(1, last, |n| s(n) - r(n)),
        },
        CaseTag::Type13 => ReducedCoefficients::OneThree {
            a: IndexedSeq::from_fn(1, last, |n| s(n) - r(n)),
            b: IndexedSeq::from_fn(2, last, |n| t(n) - r(n) * (s(n - 1) - r(n - 1))),
        },
        CaseTag::Type21 => ReducedCoefficients::TwoOne {
            c: IndexedSeq::from_fn(1, last, |n| r(n) - s(n)),
        },
        CaseTag::Type22 => {
            let k = rel.k1();
            if k.is_zero() {
                ReducedCoefficients::TwoTwo {
                    c: IndexedSeq::from_fn(1, last, |n| r(n).clone()),
                    d: IndexedSeq::from_fn(1, last, |n| s(n).clone()),
                    constant_at_2: Some(t(2).clone()),
                }
            } else {
                // only c_1 - d_1 = r_1 - s_1 is determined; keep c_1 = r_1, d_1 = s_1
                let shift = t(2) / &k;
                ReducedCoefficients::TwoTwo {
                    c: IndexedSeq::from_fn(1, last, |n| match n {
                        2 => r(2) - &shift,
                        _ => r(n).clone(),
                    }),
                    d: IndexedSeq::from_fn(1, last, |n| match n {
                        2 => s(2) - &shift,
                        _ => s(n).clone(),
                    }),
                    constant_at_2: None,
                }
            }
        }
        CaseTag::NonDegenerate23 => ReducedCoefficients::None,
    };
    Ok(RelationCase { tag, reduced })
}

fn classify_tag(rel: &Relation23) -> CaseTag {
    let k = rel.k1();
    let gap2 = &rel.t[2] - &rel.r[2] * &k;
    if gap2.is_zero() {
        if k.is_zero() {
            CaseTag::Trivial11
        } else {
            CaseTag::Type12
        }
    } else if rel.r[3].is_zero() {
        CaseTag::Type13
    } else if rel.t[3].is_zero() {
        if rel.t[2] == &rel.s[2] * &k {
            CaseTag::Type21
        } else {
            CaseTag::Type22
        }
    } else {
        CaseTag::NonDegenerate23
    }
}

fn require_nondegenerate(rel: &Relation23, op: &str) -> Result<()> {
    rel.require(3, "classify")?;
    let tag = classify_tag(rel);
    if tag != CaseTag::NonDegenerate23 {
        return Err(Error::Contract(format!(
            "{op} needs a non-degenerate 2-3 relation, classification gives {tag}"
        )));
    }
    Ok(())
}

/// `Q_0, ..., Q_{p.len()-1}` from
/// `Q_{n} = P_{n} + s_{n} P_{n-1} + t_{n} P_{n-2} - r_{n} Q_{n-1}`.
pub fn generate_q(p: &PolySeq, rel: &Relation23) -> Result<PolySeq> {
    if !p.is_empty() {
        rel.require(p.len() - 1, "generate_q")?;
    }
    let mut q: Vec<Polynomial> = Vec::with_capacity(p.len());
    for n in 0..p.len() {
        let mut next = p.get(n)?.clone();
        if n >= 1 {
            next = &next + &p.get(n - 1)?.scale(&rel.s[n]);
            next = &next - &q[n - 1].scale(&rel.r[n]);
        }
        if n >= 2 {
            next = &next + &p.get(n - 2)?.scale(&rel.t[n]);
        }
        q.push(next);
    }
    PolySeq::new(q)
}

/// First `n` in `from..=to` where the relation fails as a polynomial
/// identity between the given sequences, or `None` when it holds throughout.
pub fn relation_identity_failure(
    p: &PolySeq,
    q: &PolySeq,
    rel: &Relation23,
    from: usize,
    to: usize,
) -> Result<Option<usize>> {
    for n in from..=to {
        let lhs = q.get(n)? + &q.get_signed(n as isize - 1)?.scale(rel.r(n)?);
        let rhs = &(p.get(n)? + &p.get_signed(n as isize - 1)?.scale(rel.s(n)?))
            + &p.get_signed(n as isize - 2)?.scale(rel.t(n)?);
        if lhs != rhs {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Coordinates of `y` in the basis `P_0, P_1, ...` (entry `k` multiplies `P_k`).
pub fn expand_in_basis(y: &Polynomial, p: &PolySeq) -> Result<Vec<Scalar>> {
    let Some(deg) = y.degree() else {
        return Ok(Vec::new());
    };
    let mut rest = y.clone();
    let mut coords = vec![Scalar::zero(); deg + 1];
    for k in (0..=deg).rev() {
        let c = rest.coeff(k);
        if !c.is_zero() {
            rest = &rest - &p.get(k)?.scale(&c);
            coords[k] = c;
        }
    }
    Ok(coords)
}

/// Recovers a 2-3 relation linking two given simple sets, if one exists.
///
/// `r_1 = 0` and the free value `r_2` are fixed by the caller's choice
/// (only `s_1 - r_1` and, at `n = 2`, `t_2 - r_2 (s_1 - r_1)` are intrinsic).
/// For `n >= 3`, `r_n` is forced by cancelling the coordinates below `P_{n-2}`.
pub fn fit_relation(p: &PolySeq, q: &PolySeq, r2: Scalar) -> Result<Relation23> {
    let len = p.len().min(q.len());
    if len < 2 {
        return Err(Error::depth("fit_relation", 1, len.saturating_sub(1)));
    }
    let mut r = vec![Scalar::zero(); len];
    let mut s = vec![Scalar::zero(); len];
    let mut t = vec![Scalar::zero(); len];
    for n in 1..len {
        let diff = expand_in_basis(&(q.get(n)? - p.get(n)?), p)?;
        let prev = expand_in_basis(q.get(n - 1)?, p)?;
        let coord = |v: &[Scalar], k: usize| v.get(k).cloned().unwrap_or_else(Scalar::zero);
        let rn = match n {
            1 => Scalar::zero(),
            2 => r2.clone(),
            _ => {
                // any nonzero coordinate below P_{n-2} fixes r_n
                let Some(k) = (0..=n - 3).rev().find(|&k| !coord(&prev, k).is_zero()) else {
                    return Err(Error::Domain(format!(
                        "cannot determine r_{n}: Q_{} has no component below P_{}",
                        n - 1,
                        n - 2
                    )));
                };
                -coord(&diff, k) / coord(&prev, k)
            }
        };
        let combined: Vec<Scalar> = (0..n)
            .map(|k| coord(&diff, k) + &rn * coord(&prev, k))
            .collect();
        if let Some(k) = (0..n.saturating_sub(2)).find(|&k| !combined[k].is_zero()) {
            return Err(Error::Domain(format!(
                "no 2-3 relation at n = {n}: P_{k} coordinate does not vanish"
            )));
        }
        s[n] = coord(&combined, n - 1);
        if n >= 2 {
            t[n] = coord(&combined, n - 2);
        }
        r[n] = rn;
    }
    Relation23::new(r, s, t)
}

/// Candidate recurrence coefficients of `(Q_n)`:
///
/// ```text
/// beta~_n  = beta_n + s_n - s_{n+1} - r_n + r_{n+1}
/// gamma~_n = gamma_n + t_n - t_{n+1} + s_n (s_{n+1} - s_n - beta_n + beta_{n-1})
///            - r_n (r_{n+1} - r_n - beta~_n + beta~_{n-1})
/// ```
///
/// As many terms as the inputs allow are produced; `gamma~_n` may vanish.
pub fn candidate_tilde(rec: &RecurrencePair, rel: &Relation23) -> Result<RecurrencePair> {
    if rec.beta_len() == 0 {
        return Err(Error::depth("candidate_tilde: beta", 0, 0));
    }
    let beta_max = (rec.beta_len() - 1).min(rel.len() - 2);
    let (r, s, t) = (rel.rs(), rel.ss(), rel.ts());
    let beta = rec.betas();
    let bt: Vec<Scalar> = (0..=beta_max)
        .map(|n| &beta[n] + &s[n] - &s[n + 1] - &r[n] + &r[n + 1])
        .collect();
    let gamma_max = rec.gamma_len().min(beta_max);
    let gt: Vec<Scalar> = (1..=gamma_max)
        .map(|n| {
            rec.gammas()[n - 1].clone() + &t[n] - &t[n + 1]
                + &s[n] * (&s[n + 1] - &s[n] - &beta[n] + &beta[n - 1])
                - &r[n] * (&r[n + 1] - &r[n] - &bt[n] + &bt[n - 1])
        })
        .collect();
    Ok(RecurrencePair::unchecked(bt, gt))
}

/// The auxiliary sequences
///
/// ```text
/// a_n = gamma_n + t_n - t_{n+1} + s_n (s_{n+1} - s_n - beta_n + beta_{n-1})   n >= 1
/// b_n = s_n gamma_{n-1} + t_n (s_{n+1} - s_n - beta_n + beta_{n-2})         n >= 2
/// c_n = t_n gamma_{n-2}                                                     n >= 3
/// d_n = r_n gamma~_{n-1}                                                    n >= 2
/// ```
///
/// with `gamma_0` read as zero in `b_2` (it multiplies `s_2 gamma_1`, never `gamma_0`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbcdSequences {
    pub a: IndexedSeq,
    pub b: IndexedSeq,
    pub c: IndexedSeq,
    pub d: IndexedSeq,
}

/// Evaluates the four auxiliary sequences for all indices up to `upto`.
pub fn abcd_sequences(
    rec: &RecurrencePair,
    tilde: &RecurrencePair,
    rel: &Relation23,
    upto: usize,
) -> Result<AbcdSequences> {
    if upto < 1 {
        return Err(Error::Domain("abcd_sequences needs upto >= 1".into()));
    }
    rel.require(upto + 1, "abcd_sequences")?;
    rec.beta(upto)?;
    rec.gamma(upto)?;
    if upto >= 2 {
        tilde.gamma(upto - 1)?;
    }
    let (r, s, t) = (rel.rs(), rel.ss(), rel.ts());
    let beta = rec.betas();
    let gamma = |n: usize| rec.gammas()[n - 1].clone();

    let a = IndexedSeq::from_fn(1, upto, |n| {
        gamma(n) + &t[n] - &t[n + 1] + &s[n] * (&s[n + 1] - &s[n] - &beta[n] + &beta[n - 1])
    });
    let (b, d) = if upto >= 2 {
        (
            IndexedSeq::from_fn(2, upto, |n| {
                &s[n] * gamma(n - 1) + &t[n] * (&s[n + 1] - &s[n] - &beta[n] + &beta[n - 2])
            }),
            IndexedSeq::from_fn(2, upto, |n| &r[n] * &tilde.gammas()[n - 2]),
        )
    } else {
        (IndexedSeq::new(2, vec![]), IndexedSeq::new(2, vec![]))
    };
    let c = if upto >= 3 {
        IndexedSeq::from_fn(3, upto, |n| &t[n] * gamma(n - 2))
    } else {
        IndexedSeq::new(3, vec![])
    };
    Ok(AbcdSequences { a, b, c, d })
}

/// A violated condition, e.g. `{"condition": "eqn2", "n": 7}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionFailure {
    pub condition: String,
    pub n: usize,
}

impl ConditionFailure {
    fn new(condition: &str, n: usize) -> Self {
        ConditionFailure {
            condition: condition.to_string(),
            n,
        }
    }
}

impl fmt::Display for ConditionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at n = {}", self.condition, self.n)
    }
}

/// The three constants `A`, `B`, `C` of the constant-sequence characterization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbcConstants {
    #[serde(rename = "A", with = "serde_scalar")]
    pub a: Scalar,
    #[serde(rename = "B", with = "serde_scalar")]
    pub b: Scalar,
    #[serde(rename = "C", with = "serde_scalar")]
    pub c: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseVerdict {
    /// `Q_0, ..., Q_{depth+1}` follow the three-term recurrence with the
    /// candidate coefficients, which are nonzero where stored.
    pub is_mops: bool,
    pub depth: usize,
    pub tilde: RecurrencePair,
    pub failures: Vec<ConditionFailure>,
    pub constants: Option<AbcConstants>,
}

impl InverseVerdict {
    fn finish(
        depth: usize,
        tilde: RecurrencePair,
        mut failures: Vec<ConditionFailure>,
        constants: Option<AbcConstants>,
    ) -> Self {
        // every stored gamma~ must be nonzero for a MOPS
        for (k, g) in tilde.gammas().iter().enumerate() {
            let n = k + 1;
            if g.is_zero() && !failures.iter().any(|f| f.condition == "gamma_tilde" && f.n == n) {
                failures.push(ConditionFailure::new("gamma_tilde", n));
            }
        }
        InverseVerdict {
            is_mops: failures.is_empty(),
            depth,
            tilde,
            failures,
            constants,
        }
    }
}

/// Orthogonality of the generated `(Q_n)` through the system of equations
/// `(ci1)-(ci3)` and `(eqn1)-(eqn3)` for `4 <= n <= depth`.
///
/// Needs `r, s, t` through `depth + 1` and `beta, gamma` through `depth`.
pub fn check_by_equations(rec: &RecurrencePair, rel: &Relation23, depth: usize) -> Result<InverseVerdict> {
    require_nondegenerate(rel, "check_by_equations")?;
    if depth < 3 {
        return Err(Error::Contract("check_by_equations needs depth >= 3".into()));
    }
    rel.require(depth + 1, "check_by_equations")?;
    let tilde = candidate_tilde(rec, rel)?.truncated(depth + 1, depth);
    tilde.beta(depth)?;
    tilde.gamma(depth)?;
    let aux = abcd_sequences(rec, &tilde, rel, depth)?;
    let (r, s, t) = (rel.rs(), rel.ss(), rel.ts());
    let a = |n: usize| aux.a.get(n).unwrap();
    let b = |n: usize| aux.b.get(n).unwrap();
    let c = |n: usize| aux.c.get(n).unwrap();
    let d = |n: usize| aux.d.get(n).unwrap();
    let k = &s[1] - &r[1];

    let mut failures = Vec::new();
    let mut fail = |name: &str, n: usize| failures.push(ConditionFailure::new(name, n));

    for n in 1..=2 {
        if tilde.gammas()[n - 1].is_zero() {
            fail("gamma_tilde", n);
        }
    }
    for n in 3..=depth {
        if r[n].is_zero() || t[n].is_zero() {
            fail("rt_nonzero", n);
        }
    }
    if b(2) - d(2) != a(2) * &k {
        fail("ci1", 2);
    }
    if b(3) - d(3) != a(3) * (&s[2] - &r[2]) {
        fail("ci2", 3);
    }
    if c(3) - b(3) * &k != a(3) * (&t[2] - &s[2] * &k) {
        fail("ci3", 3);
    }
    for n in 4..=depth {
        if *b(n) != a(n) * &s[n - 1] {
            fail("eqn1", n);
        }
        if *c(n) != a(n) * &t[n - 1] {
            fail("eqn2", n);
        }
        if *d(n) != a(n) * &r[n - 1] {
            fail("eqn3", n);
        }
    }
    Ok(InverseVerdict::finish(depth, tilde, failures, None))
}

/// Orthogonality of the generated `(Q_n)` through the constant-sequence
/// characterization: initial conditions, `t_4 gamma_2 = a_4 t_3`, and
/// constancy of
///
/// ```text
/// A_n = s_n a_{n+1} / t_{n+1} - beta_{n-1} - beta_n + s_{n+1}
/// B_n = a_n a_{n+1} / t_{n+1}
///       + (s_n - beta_{n-1}) (s_n a_{n+1} / t_{n+1} - beta_n - s_n + s_{n+1})
///       + t_n - a_n - gamma_{n-1}
/// C_n = beta~_n - r_{n+1} - gamma~_n / r_n
/// ```
///
/// for `3 <= n <= depth`. `A_n` reaches one index further than
/// [`check_by_equations`], so this needs `r, s, t` through `depth + 2` and
/// `beta, gamma` through `depth + 1`. The initial conditions are checked
/// here as polynomial identities in `P_0, P_1, Q_0, Q_1` rather than as
/// scalar equations.
pub fn check_by_constants(rec: &RecurrencePair, rel: &Relation23, depth: usize) -> Result<InverseVerdict> {
    require_nondegenerate(rel, "check_by_constants")?;
    if depth < 3 {
        return Err(Error::Contract("check_by_constants needs depth >= 3".into()));
    }
    rel.require(depth + 2, "check_by_constants")?;
    let (r, s, t) = (rel.rs(), rel.ss(), rel.ts());
    for n in 3..=depth {
        if r[n].is_zero() {
            return Err(Error::Contract(format!(
                "r_{n} = 0 in C_{n}: data is not of the non-degenerate kind"
            )));
        }
        if t[n + 1].is_zero() {
            return Err(Error::Contract(format!(
                "t_{} = 0 in A_{n}: data is not of the non-degenerate kind",
                n + 1
            )));
        }
    }
    let full_tilde = candidate_tilde(rec, rel)?;
    full_tilde.gamma(depth)?;
    let aux = abcd_sequences(rec, &full_tilde, rel, depth + 1)?;
    let tilde = full_tilde.truncated(depth + 1, depth);
    let gamma = |n: usize| rec.gammas()[n - 1].clone();
    let a = |n: usize| aux.a.get(n).unwrap().clone();
    let gt = |n: usize| tilde.gammas()[n - 1].clone();

    let mut failures = Vec::new();
    for n in 1..=2 {
        if gt(n).is_zero() {
            failures.push(ConditionFailure::new("gamma_tilde", n));
        }
    }

    // (d_n - r_{n-1} a_n) Q_{n-2} = (b_n - s_{n-1} a_n) P_{n-2} + (c_n - t_{n-1} a_n) P_{n-3}
    // for n = 2, 3, compared coefficientwise.
    let p = rec.mops(2)?;
    let q = generate_q(&p, rel)?;
    let lhs2 = q.get(0)?.scale(&(aux.d.get(2).unwrap() - &r[1] * a(2)));
    let rhs2 = p.get(0)?.scale(&(aux.b.get(2).unwrap() - &s[1] * a(2)));
    if lhs2 != rhs2 {
        failures.push(ConditionFailure::new("ci1", 2));
    }
    let lhs3 = q.get(1)?.scale(&(aux.d.get(3).unwrap() - &r[2] * a(3)));
    let rhs3 = &p.get(1)?.scale(&(aux.b.get(3).unwrap() - &s[2] * a(3)))
        + &p.get(0)?.scale(&(aux.c.get(3).unwrap() - &t[2] * a(3)));
    if lhs3.coeff(1) != rhs3.coeff(1) {
        failures.push(ConditionFailure::new("ci2", 3));
    }
    if lhs3.coeff(0) != rhs3.coeff(0) {
        failures.push(ConditionFailure::new("ci3", 3));
    }

    if &t[4] * gamma(2) != a(4) * &t[3] {
        failures.push(ConditionFailure::new("start_condition", 4));
    }

    let abc = abc_sequences_from(rec, &tilde, &aux, rel, depth);
    let (a3, b3, c3) = (abc.a.values[0].clone(), abc.b.values[0].clone(), abc.c.values[0].clone());
    let mut constant = true;
    for n in 4..=depth {
        if abc.a.get(n) != Some(&a3) {
            failures.push(ConditionFailure::new("A_constant", n));
            constant = false;
        }
        if abc.b.get(n) != Some(&b3) {
            failures.push(ConditionFailure::new("B_constant", n));
            constant = false;
        }
        if abc.c.get(n) != Some(&c3) {
            failures.push(ConditionFailure::new("C_constant", n));
            constant = false;
        }
    }
    let constants = constant.then_some(AbcConstants {
        a: a3,
        b: b3,
        c: c3,
    });
    Ok(InverseVerdict::finish(depth, tilde, failures, constants))
}

/// The sequences `A_n`, `B_n`, `C_n` for `3 <= n <= depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbcSequences {
    #[serde(rename = "A")]
    pub a: IndexedSeq,
    #[serde(rename = "B")]
    pub b: IndexedSeq,
    #[serde(rename = "C")]
    pub c: IndexedSeq,
}

/// Evaluates `A_n`, `B_n`, `C_n` (see [`check_by_constants`]) for `3 <= n <= depth`.
/// Needs `r_n != 0` and `t_{n+1} != 0` throughout.
pub fn abc_sequences(rec: &RecurrencePair, rel: &Relation23, depth: usize) -> Result<AbcSequences> {
    if depth < 3 {
        return Err(Error::Contract("abc_sequences needs depth >= 3".into()));
    }
    rel.require(depth + 2, "abc_sequences")?;
    for n in 3..=depth {
        if rel.rs()[n].is_zero() || rel.ts()[n + 1].is_zero() {
            return Err(Error::Contract(format!("r_{n} t_{} = 0", n + 1)));
        }
    }
    let tilde = candidate_tilde(rec, rel)?;
    tilde.gamma(depth)?;
    let aux = abcd_sequences(rec, &tilde, rel, depth + 1)?;
    Ok(abc_sequences_from(rec, &tilde, &aux, rel, depth))
}

fn abc_sequences_from(
    rec: &RecurrencePair,
    tilde: &RecurrencePair,
    aux: &AbcdSequences,
    rel: &Relation23,
    depth: usize,
) -> AbcSequences {
    let (r, s, t) = (rel.rs(), rel.ss(), rel.ts());
    let beta = rec.betas();
    let gamma = |n: usize| rec.gammas()[n - 1].clone();
    let a = |n: usize| aux.a.get(n).unwrap().clone();
    let bt = tilde.betas();
    let gt = |n: usize| tilde.gammas()[n - 1].clone();
    AbcSequences {
        a: IndexedSeq::from_fn(3, depth, |n| {
            &s[n] * a(n + 1) / &t[n + 1] - &beta[n - 1] - &beta[n] + &s[n + 1]
        }),
        b: IndexedSeq::from_fn(3, depth, |n| {
            let ratio = a(n + 1) / &t[n + 1];
            a(n) * &ratio
                + (&s[n] - &beta[n - 1]) * (&s[n] * &ratio - &beta[n] - &s[n] + &s[n + 1])
                + &t[n]
                - a(n)
                - gamma(n - 1)
        }),
        c: IndexedSeq::from_fn(3, depth, |n| &bt[n] - &r[n + 1] - gt(n) / &r[n]),
    }
}

/// Constants of `lambda (x - c) u = (x^2 + a x + b) v` for normalized `u`, `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalRelation {
    #[serde(with = "serde_scalar")]
    pub lambda: Scalar,
    #[serde(with = "serde_scalar")]
    pub c: Scalar,
    #[serde(with = "serde_scalar")]
    pub a: Scalar,
    #[serde(with = "serde_scalar")]
    pub b: Scalar,
}

impl FunctionalRelation {
    pub fn new(lambda: Scalar, c: Scalar, a: Scalar, b: Scalar) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::Domain("lambda must be nonzero".into()));
        }
        Ok(FunctionalRelation { lambda, c, a, b })
    }

    /// `x^2 + a x + b`
    pub fn quadratic(&self) -> Polynomial {
        Polynomial::from_coeffs(vec![self.b.clone(), self.a.clone(), Scalar::one()])
    }

    /// `lambda (x - c)`
    pub fn linear(&self) -> Polynomial {
        Polynomial::x_minus(self.c.clone()).scale(&self.lambda)
    }
}

/// Closed forms for `c`, `lambda`, `a`, `b` in terms of the first few
/// relation parameters and recurrence coefficients.
pub fn relation_constants(
    rec: &RecurrencePair,
    tilde: &RecurrencePair,
    rel: &Relation23,
) -> Result<FunctionalRelation> {
    rel.require(3, "relation_constants")?;
    let (r, s, t) = (rel.rs(), rel.ss(), rel.ts());
    let k = &s[1] - &r[1];
    let gap2 = &t[2] - &r[2] * &k;
    if gap2.is_zero() {
        return Err(Error::Domain("t_2 = r_2 (s_1 - r_1)".into()));
    }
    if r[3].is_zero() {
        return Err(Error::Domain("r_3 = 0".into()));
    }
    if t[3].is_zero() {
        return Err(Error::Domain("t_3 = 0".into()));
    }
    let gamma1 = rec.gamma(1)?;
    if gamma1.is_zero() {
        return Err(Error::Domain("gamma_1 = 0".into()));
    }
    let (gt1, gt2) = (tilde.gamma(1)?, tilde.gamma(2)?);
    if gt1.is_zero() || gt2.is_zero() {
        return Err(Error::Domain("gamma~_1 gamma~_2 = 0".into()));
    }
    let (bt0, bt1) = (tilde.beta(0)?, tilde.beta(1)?);
    let beta0 = rec.beta(0)?;

    let gap3 = &t[3] - &r[3] * (&s[2] - &r[2]);
    let mix = (&r[3] * &t[2] + (&t[3] - &r[3] * &s[2]) * &k) / &gap2;

    let c = beta0 - gamma1 / &r[3] * &gap3 / &gap2;
    let lambda = &r[3] / &t[3] * (gt1 * gt2) / gamma1;
    let a = -bt0 - bt1 + gt2 / &t[3] * &mix;
    let b = bt0 * bt1 - gt1 - bt0 * gt2 / &t[3] * &mix + gt1 * gt2 / &t[3] * &gap3 / &gap2;
    FunctionalRelation::new(lambda, c, a, b)
}

/// Moments of `v` from `lambda (x - c) u = (x^2 + a x + b) v` with
/// `m_0 = 1`, `m_1 = beta~_0`:
/// `m_{n+2} = lambda (mu_{n+1} - c mu_n) - a m_{n+1} - b m_n`.
pub fn v_moments_from_relation(
    u: &MomentFunctional,
    fr: &FunctionalRelation,
    beta0_tilde: &Scalar,
) -> Result<MomentFunctional> {
    if fr.lambda.is_zero() {
        return Err(Error::Domain("lambda must be nonzero".into()));
    }
    if !u.is_normalized() {
        return Err(Error::Domain("u must be normalized (mu_0 = 1)".into()));
    }
    let mu = u.moments();
    let depth = u.depth();
    let mut m = vec![Scalar::one(), beta0_tilde.clone()];
    for n in 0..depth.saturating_sub(1) {
        let next = &fr.lambda * (&mu[n + 1] - &fr.c * &mu[n]) - &fr.a * &m[n + 1] - &fr.b * &m[n];
        m.push(next);
    }
    m.truncate(depth + 1);
    MomentFunctional::new(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalCheck {
    pub holds: bool,
    pub first_failure: Option<usize>,
    pub depth: usize,
}

/// `lambda (mu_{n+1} - c mu_n) = m_{n+2} + a m_{n+1} + b m_n` for `0 <= n <= depth`.
pub fn verify_functional_relation(
    u: &MomentFunctional,
    v: &MomentFunctional,
    fr: &FunctionalRelation,
    depth: usize,
) -> Result<FunctionalCheck> {
    if depth + 1 > u.depth() {
        return Err(Error::depth("verify_functional_relation: u", depth + 1, u.depth()));
    }
    if depth + 2 > v.depth() {
        return Err(Error::depth("verify_functional_relation: v", depth + 2, v.depth()));
    }
    let (mu, m) = (u.moments(), v.moments());
    let first_failure = (0..=depth).find(|&n| {
        &fr.lambda * (&mu[n + 1] - &fr.c * &mu[n]) != &m[n + 2] + &fr.a * &m[n + 1] + &fr.b * &m[n]
    });
    Ok(FunctionalCheck {
        holds: first_failure.is_none(),
        first_failure,
        depth,
    })
}

/// The two sides of the regularity criterion for `(x - c) u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityCriterion {
    /// `P_n(c) != 0` for `0 <= n <= depth`.
    pub functional_side: bool,
    /// `t_n != r_n (s_{n-1} - r_{n-1})` for `2 <= n <= depth`.
    pub relation_side: bool,
}

impl RegularityCriterion {
    pub fn agree(&self) -> bool {
        self.functional_side == self.relation_side
    }
}

pub fn regularity_criterion(
    p: &PolySeq,
    c: &Scalar,
    rel: &Relation23,
    depth: usize,
) -> Result<RegularityCriterion> {
    require_nondegenerate(rel, "regularity_criterion")?;
    let mut functional_side = true;
    for n in 0..=depth {
        if p.get(n)?.eval(c).is_zero() {
            functional_side = false;
        }
    }
    let mut relation_side = true;
    for n in 2..=depth {
        if rel.projection_gap(n)?.is_zero() {
            relation_side = false;
        }
    }
    Ok(RegularityCriterion {
        functional_side,
        relation_side,
    })
}

/// Moment identities implied by the relation for a normalized `u` with MOPS `p`:
///
/// ```text
/// <u, Q_1> = s_1 - r_1,   <u, Q_2> = t_2 - r_2 (s_1 - r_1),   <u, Q_n> = -r_n <u, Q_{n-1}>  (n >= 3)
/// <u, Q_n P_{n-1}> = (s_n - r_n) <u, P_{n-1}^2>                              (n >= 1)
/// <u, Q_n P_{n-2}> = [t_n - r_n (s_{n-1} - r_{n-1})] <u, P_{n-2}^2>          (n >= 2)
/// ```
///
/// Returns every violated identity for `n <= depth`.
pub fn check_moment_identities(
    u: &MomentFunctional,
    p: &PolySeq,
    q: &PolySeq,
    rel: &Relation23,
    depth: usize,
) -> Result<Vec<ConditionFailure>> {
    if !u.is_normalized() {
        return Err(Error::Domain("u must be normalized (mu_0 = 1)".into()));
    }
    let mut failures = Vec::new();
    let (r, s, t) = (rel.r(depth)?, rel.s(depth)?, rel.t(depth)?);
    let _ = (r, s, t);
    let k = rel.s(1)? - rel.r(1)?;
    let mut prev_uq = Scalar::one();
    for n in 1..=depth {
        let qn = q.get(n)?;
        let uq = u.apply(qn)?;
        let expected = match n {
            1 => k.clone(),
            2 => rel.projection_gap(2)?,
            _ => -rel.r(n)? * &prev_uq,
        };
        if uq != expected {
            failures.push(ConditionFailure::new("uQn", n));
        }
        prev_uq = uq;

        let p1 = p.get(n - 1)?;
        let lhs = u.apply(&(qn * p1))?;
        let rhs = (rel.s(n)? - rel.r(n)?) * u.apply(&(p1 * p1))?;
        if lhs != rhs {
            failures.push(ConditionFailure::new("uQnPn-1", n));
        }
        if n >= 2 {
            let p2 = p.get(n - 2)?;
            let lhs = u.apply(&(qn * p2))?;
            let rhs = rel.projection_gap(n)? * u.apply(&(p2 * p2))?;
            if lhs != rhs {
                failures.push(ConditionFailure::new("uQnPn-2", n));
            }
        }
    }
    Ok(failures)
}
