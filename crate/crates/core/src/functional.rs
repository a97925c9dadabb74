//! Moment linear functionals and the recurrence data of their MOPS.
//!
//! A [`MomentFunctional`] is known only through `mu_0..=mu_depth`, so every
//! statement about it (regularity in particular) holds "through degree k"
//! for some finite `k`. Operations never mutate; each returns a new value
//! with its depth recomputed.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{serde_scalar_vec, Scalar};

/// Truncated moment sequence `mu_0, ..., mu_depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentFunctional {
    #[serde(with = "serde_scalar_vec")]
    moments: Vec<Scalar>,
}

impl MomentFunctional {
    pub fn new(moments: Vec<Scalar>) -> Result<Self> {
        if moments.is_empty() {
            return Err(Error::Domain(
                "a moment functional needs at least mu_0".into(),
            ));
        }
        Ok(MomentFunctional { moments })
    }

    /// The functional with all moments zero through `depth`.
    pub fn zero(depth: usize) -> Self {
        MomentFunctional {
            moments: vec![Scalar::zero(); depth + 1],
        }
    }

    pub fn depth(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn moments(&self) -> &[Scalar] {
        &self.moments
    }

    pub fn moment(&self, n: usize) -> Result<&Scalar> {
        self.moments
            .get(n)
            .ok_or_else(|| Error::depth("moment", n, self.depth()))
    }

    pub fn mass(&self) -> &Scalar {
        &self.moments[0]
    }

    pub fn is_normalized(&self) -> bool {
        self.moments[0].is_one()
    }

    /// Divides every moment by `mu_0`.
    pub fn normalized(&self) -> Result<Self> {
        let m0 = self.mass();
        if m0.is_zero() {
            return Err(Error::Domain(
                "cannot normalize a functional with mu_0 = 0".into(),
            ));
        }
        Ok(MomentFunctional {
            moments: self.moments.iter().map(|m| m / m0).collect(),
        })
    }

    pub fn scaled(&self, k: &Scalar) -> Self {
        MomentFunctional {
            moments: self.moments.iter().map(|m| m * k).collect(),
        }
    }

    pub fn truncated(&self, depth: usize) -> Result<Self> {
        if depth > self.depth() {
            return Err(Error::depth("truncation", depth, self.depth()));
        }
        Ok(MomentFunctional {
            moments: self.moments[..=depth].to_vec(),
        })
    }

    /// `<f, p> = sum_k p_k mu_k`
    pub fn apply(&self, p: &Polynomial) -> Result<Scalar> {
        if let Some(d) = p.degree() {
            if d > self.depth() {
                return Err(Error::depth("apply", d, self.depth()));
            }
        }
        Ok(p
            .coeffs()
            .iter()
            .zip(&self.moments)
            .map(|(c, m)| c * m)
            .sum())
    }

    /// The functional `phi f` defined by `<phi f, p> = <f, phi p>`.
    ///
    /// Depth drops by `deg phi`; the result is not renormalized.
    pub fn left_multiply(&self, phi: &Polynomial) -> Result<Self> {
        let deg = match phi.degree() {
            None => return Ok(MomentFunctional::zero(self.depth())),
            Some(d) => d,
        };
        if deg > self.depth() {
            return Err(Error::depth("left_multiply", deg, self.depth()));
        }
        let moments = (0..=self.depth() - deg)
            .map(|n| {
                phi.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * &self.moments[n + k])
                    .sum()
            })
            .collect();
        Ok(MomentFunctional { moments })
    }

    /// `f + mass * delta_xi`
    pub fn add_point_mass(&self, xi: &Scalar, mass: &Scalar) -> Self {
        let mut power = Scalar::one();
        let moments = self
            .moments
            .iter()
            .map(|m| {
                let out = m + mass * &power;
                power *= xi;
                out
            })
            .collect();
        MomentFunctional { moments }
    }

    /// A solution `sigma` of `(x - c) sigma = f` with `<sigma, 1> = free_first_moment`.
    ///
    /// The solution set is a line (any multiple of `delta_c` can be added);
    /// the free first moment picks one member. The moments obey
    /// `nu_{n+1} = c nu_n + mu_n`, so the result has depth `depth + 1`.
    /// A division by `(c - x)` is `divide_by_linear(-f, c, m)`.
    pub fn divide_by_linear(&self, c: &Scalar, free_first_moment: &Scalar) -> Self {
        let mut moments = Vec::with_capacity(self.moments.len() + 1);
        let mut nu = free_first_moment.clone();
        for mu in &self.moments {
            let next = c * &nu + mu;
            moments.push(nu);
            nu = next;
        }
        moments.push(nu);
        MomentFunctional { moments }
    }

    /// Recurrence coefficients of the MOPS of this functional, as far as the
    /// moments determine them, by the (modified-moment free) Chebyshev
    /// algorithm.
    ///
    /// With `sigma_{k,l} = <f, P_k x^l>` the algorithm advances
    /// `sigma_{k,l} = sigma_{k-1,l+1} - beta_{k-1} sigma_{k-1,l} - gamma_{k-1} sigma_{k-2,l}`.
    /// `sigma_{k,k}` is the ratio of consecutive Hankel determinants, so the
    /// first vanishing one is the first singular Hankel index.
    pub fn recurrence_from_moments(&self) -> RegularityReport {
        let depth = self.depth();
        let mut beta = Vec::new();
        let mut gamma = Vec::new();

        let mut prev: Vec<Scalar> = Vec::new(); // sigma_{k-2, .}
        let mut cur: Vec<Scalar> = self.moments.clone(); // sigma_{k-1, .}, index = l
        if cur[0].is_zero() {
            return RegularityReport {
                recurrence: RecurrencePair::unchecked(beta, gamma),
                regular_through: None,
                first_singular: Some(0),
                depth,
            };
        }
        if depth >= 1 {
            beta.push(&cur[1] / &cur[0]);
        }

        let mut k = 1;
        while 2 * k <= depth {
            // sigma_{k,l} for l in k..=depth-k
            let beta_prev = &beta[k - 1];
            let mut next = vec![Scalar::zero(); depth - k + 1];
            for (l, slot) in next.iter_mut().enumerate().skip(k) {
                let mut v = &cur[l + 1] - beta_prev * &cur[l];
                if k >= 2 {
                    v -= &gamma[k - 2] * &prev[l];
                }
                *slot = v;
            }
            if next[k].is_zero() {
                return RegularityReport {
                    recurrence: RecurrencePair::unchecked(beta, gamma),
                    regular_through: Some(k - 1),
                    first_singular: Some(k),
                    depth,
                };
            }
            gamma.push(&next[k] / &cur[k - 1]);
            if 2 * k < depth {
                beta.push(&next[k + 1] / &next[k] - &cur[k] / &cur[k - 1]);
            }
            prev = cur;
            cur = next;
            k += 1;
        }

        RegularityReport {
            recurrence: RecurrencePair::unchecked(beta, gamma),
            regular_through: Some(depth / 2),
            first_singular: None,
            depth,
        }
    }
}

/// Outcome of [`MomentFunctional::recurrence_from_moments`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub recurrence: RecurrencePair,
    /// Largest `k` such that the Hankel determinants of orders `0..=k` are
    /// all nonzero (order `k` meaning the `(k+1) x (k+1)` matrix `(mu_{i+j})`).
    pub regular_through: Option<usize>,
    /// First vanishing Hankel order, if one was reached within the data.
    pub first_singular: Option<usize>,
    pub depth: usize,
}

impl RegularityReport {
    /// True when no Hankel determinant vanished within the available moments.
    pub fn regular_within_depth(&self) -> bool {
        self.first_singular.is_none()
    }

    /// True when the functional is regular at least through Hankel order `k`.
    pub fn regular_through_order(&self, k: usize) -> bool {
        self.regular_through.is_some_and(|r| r >= k)
    }
}

/// `beta_0, beta_1, ...` and `gamma_1, gamma_2, ...` of
/// `P_{n+1} = (x - beta_n) P_n - gamma_n P_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrencePair {
    #[serde(with = "serde_scalar_vec")]
    beta: Vec<Scalar>,
    /// `gamma[0]` holds `gamma_1`.
    #[serde(with = "serde_scalar_vec")]
    gamma: Vec<Scalar>,
}

impl RecurrencePair {
    /// Recurrence data of a regular functional: every stored `gamma_n` is nonzero.
    pub fn new(beta: Vec<Scalar>, gamma: Vec<Scalar>) -> Result<Self> {
        let pair = Self::unchecked(beta, gamma);
        if let Some(n) = pair.first_zero_gamma() {
            return Err(Error::Domain(format!(
                "gamma_{n} = 0: recurrence is not regular"
            )));
        }
        Ok(pair)
    }

    /// Stores the sequences as given; zero `gamma_n` are allowed.
    pub fn unchecked(beta: Vec<Scalar>, gamma: Vec<Scalar>) -> Self {
        RecurrencePair { beta, gamma }
    }

    /// Constant sequences `beta_n = b`, `gamma_n = g` with `count` entries each.
    pub fn constant(b: Scalar, g: Scalar, count: usize) -> Result<Self> {
        Self::new(vec![b; count], vec![g; count])
    }

    pub fn betas(&self) -> &[Scalar] {
        &self.beta
    }

    /// `gammas()[k]` is `gamma_{k+1}`.
    pub fn gammas(&self) -> &[Scalar] {
        &self.gamma
    }

    pub fn beta(&self, n: usize) -> Result<&Scalar> {
        self.beta
            .get(n)
            .ok_or_else(|| Error::depth("beta", n, self.beta.len().wrapping_sub(1)))
    }

    /// `gamma_n` for `n >= 1`.
    pub fn gamma(&self, n: usize) -> Result<&Scalar> {
        n.checked_sub(1)
            .and_then(|k| self.gamma.get(k))
            .ok_or_else(|| Error::depth("gamma", n, self.gamma.len()))
    }

    /// Largest `n` with `beta_n` stored.
    pub fn beta_len(&self) -> usize {
        self.beta.len()
    }

    /// Largest `n` with `gamma_n` stored.
    pub fn gamma_len(&self) -> usize {
        self.gamma.len()
    }

    pub fn first_zero_gamma(&self) -> Option<usize> {
        self.gamma.iter().position(Zero::is_zero).map(|k| k + 1)
    }

    pub fn truncated(&self, beta_count: usize, gamma_count: usize) -> Self {
        RecurrencePair {
            beta: self.beta[..beta_count.min(self.beta.len())].to_vec(),
            gamma: self.gamma[..gamma_count.min(self.gamma.len())].to_vec(),
        }
    }

    /// `<u, P_n^2>` for the normalized functional: `gamma_1 ... gamma_n`.
    /// Multiply by `mu_0` for an unnormalized one.
    pub fn norm_squared(&self, n: usize) -> Result<Scalar> {
        (1..=n).try_fold(Scalar::one(), |acc, k| Ok(acc * self.gamma(k)?))
    }

    /// `P_0, ..., P_{count-1}` by the three-term recurrence.
    pub fn mops(&self, count: usize) -> Result<PolySeq> {
        let mut polys: Vec<Polynomial> = Vec::with_capacity(count);
        for n in 0..count {
            let next = match n {
                0 => Polynomial::one(),
                1 => Polynomial::x_minus(self.beta(0)?.clone()),
                _ => {
                    let k = n - 1;
                    let p = &polys[k];
                    &(&p.shift_up() - &p.scale(self.beta(k)?))
                        - &polys[k - 1].scale(self.gamma(k)?)
                }
            };
            polys.push(next);
        }
        Ok(PolySeq { polys })
    }

    /// Moments `mu_0 = 1, ..., mu_depth` of the normalized functional for
    /// which this recurrence is orthogonal.
    ///
    /// Expands `x^n = sum_k c_{n,k} P_k` via `x P_k = P_{k+1} + beta_k P_k + gamma_k P_{k-1}`
    /// and reads `mu_n = c_{n,0}`. Only heights that can still return to
    /// zero by step `depth` are kept, so `beta_k` is needed for
    /// `k <= (depth - 1) / 2` and `gamma_k` for `k <= depth / 2`.
    pub fn moments(&self, depth: usize) -> Result<MomentFunctional> {
        if depth >= 1 && self.beta.len() < (depth - 1) / 2 + 1 {
            return Err(Error::depth("moments: beta", (depth - 1) / 2, self.beta.len().wrapping_sub(1)));
        }
        if self.gamma.len() < depth / 2 {
            return Err(Error::depth("moments: gamma", depth / 2, self.gamma.len()));
        }
        let mut moments = Vec::with_capacity(depth + 1);
        let mut coeffs = vec![Scalar::one()];
        moments.push(Scalar::one());
        for n in 0..depth {
            let height = (n + 1).min(depth - n - 1);
            let mut next = vec![Scalar::zero(); height + 1];
            for (k, slot) in next.iter_mut().enumerate() {
                let mut v = Scalar::zero();
                if k >= 1 {
                    if let Some(c) = coeffs.get(k - 1) {
                        v += c;
                    }
                }
                if let Some(c) = coeffs.get(k) {
                    v += &self.beta[k] * c;
                }
                if let Some(c) = coeffs.get(k + 1) {
                    v += &self.gamma[k] * c;
                }
                *slot = v;
            }
            moments.push(next[0].clone());
            coeffs = next;
        }
        Ok(MomentFunctional { moments })
    }
}

/// `P_0, P_1, ...` with `P_n` monic of degree `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolySeq {
    polys: Vec<Polynomial>,
}

impl PolySeq {
    /// Validates the simple-set invariant: entry `n` is monic of degree `n`.
    pub fn new(polys: Vec<Polynomial>) -> Result<Self> {
        for (n, p) in polys.iter().enumerate() {
            if p.degree() != Some(n) || !p.is_monic() {
                return Err(Error::Domain(format!(
                    "entry {n} is not monic of degree {n}"
                )));
            }
        }
        Ok(PolySeq { polys })
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn get(&self, n: usize) -> Result<&Polynomial> {
        self.polys
            .get(n)
            .ok_or_else(|| Error::depth("polynomial", n, self.polys.len().wrapping_sub(1)))
    }

    /// `P_n`, with `P_{-1} = 0` expressed as `n < 0` through [`Self::get_signed`].
    pub fn get_signed(&self, n: isize) -> Result<Polynomial> {
        if n < 0 {
            Ok(Polynomial::zero())
        } else {
            self.get(n as usize).cloned()
        }
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn cheb_u(count: usize) -> RecurrencePair {
        RecurrencePair::constant(Scalar::zero(), rat(1, 4), count).unwrap()
    }

    /// Independent oracle: `<u, P_n> = 0` for `n >= 1` is a triangular system
    /// in the moments.
    fn moments_by_triangular_solve(rec: &RecurrencePair, depth: usize) -> Vec<Scalar> {
        let polys = rec.mops(depth + 1).unwrap();
        let mut mu = vec![Scalar::one()];
        for n in 1..=depth {
            let p = polys.get(n).unwrap();
            let s: Scalar = (0..n).map(|k| p.coeff(k) * &mu[k]).sum();
            mu.push(-s);
        }
        mu
    }

    #[test]
    fn mops_examples() {
        let seq = cheb_u(4).mops(3).unwrap();
        assert_eq!(seq.get(0).unwrap(), &Polynomial::one());
        assert_eq!(seq.get(1).unwrap(), &Polynomial::x());
        assert_eq!(
            seq.get(2).unwrap(),
            &Polynomial::from_coeffs(vec![rat(-1, 4), int(0), int(1)])
        );
        let seq4 = cheb_u(4).mops(4).unwrap();
        assert_eq!(
            seq4.get(3).unwrap(),
            &Polynomial::from_coeffs(vec![int(0), rat(-1, 2), int(0), int(1)])
        );
        assert_eq!(cheb_u(0).mops(1).unwrap().polys(), &[Polynomial::one()]);
        assert!(matches!(cheb_u(1).mops(4), Err(Error::Depth { .. })));
    }

    #[test]
    fn moments_of_chebyshev_u() {
        let f = cheb_u(6).moments(8).unwrap();
        let expected = [
            int(1),
            int(0),
            rat(1, 4),
            int(0),
            rat(1, 8),
            int(0),
            rat(5, 64),
            int(0),
            rat(14, 256),
        ];
        assert_eq!(f.moments(), &expected);
        assert_eq!(f.moments(), moments_by_triangular_solve(&cheb_u(8), 8).as_slice());
    }

    #[test]
    fn moments_first_two() {
        let rec = RecurrencePair::new(
            vec![rat(2, 3), rat(-1, 5), int(3)],
            vec![rat(7, 2), rat(1, 9), int(2)],
        )
        .unwrap();
        let f = rec.moments(5).unwrap();
        assert_eq!(f.moment(1).unwrap(), rec.beta(0).unwrap());
        let mu2 = rec.gamma(1).unwrap() + rec.beta(0).unwrap() * f.moment(1).unwrap();
        assert_eq!(f.moment(2).unwrap(), &mu2);
        // entries beyond those the moments depend on are arbitrary for the oracle
        let longer = RecurrencePair::new(
            vec![rat(2, 3), rat(-1, 5), int(3), int(-4), rat(1, 2)],
            vec![rat(7, 2), rat(1, 9), int(2), int(5), int(1)],
        )
        .unwrap();
        assert_eq!(f.moments(), moments_by_triangular_solve(&longer, 5).as_slice());
        assert!(matches!(rec.moments(7), Err(Error::Depth { .. })));
    }

    #[test]
    fn apply_examples() {
        let f = cheb_u(4).moments(6).unwrap();
        assert_eq!(f.apply(&Polynomial::one()).unwrap(), int(1));
        let b0 = rat(3, 7);
        let p = Polynomial::x_minus(b0.clone());
        assert_eq!(
            f.apply(&p).unwrap(),
            f.moment(1).unwrap() - &b0 * f.moment(0).unwrap()
        );
        let p2 = Polynomial::from_coeffs(vec![rat(-1, 4), int(0), int(1)]);
        assert_eq!(f.apply(&p2).unwrap(), int(0));
        assert!(matches!(
            f.apply(&Polynomial::monomial(7)),
            Err(Error::Depth { .. })
        ));
    }

    #[test]
    fn left_multiply_examples() {
        let f = MomentFunctional::new((1..=6).map(|k| rat(k, 3)).collect()).unwrap();
        assert_eq!(f.left_multiply(&Polynomial::one()).unwrap(), f);
        let shifted = f.left_multiply(&Polynomial::x()).unwrap();
        assert_eq!(shifted.moments(), &f.moments()[1..]);
        let c = rat(-2, 5);
        let g = f.left_multiply(&Polynomial::x_minus(c.clone())).unwrap();
        assert_eq!(g.depth(), f.depth() - 1);
        for n in 0..=g.depth() {
            assert_eq!(
                g.moment(n).unwrap(),
                &(f.moment(n + 1).unwrap() - &c * f.moment(n).unwrap())
            );
        }
        assert!(f.left_multiply(&Polynomial::monomial(6)).is_err());
    }

    #[test]
    fn point_mass_examples() {
        let f = MomentFunctional::new(vec![int(1), rat(1, 2), rat(1, 3)]).unwrap();
        assert_eq!(f.add_point_mass(&int(5), &int(0)), f);
        let dirac = MomentFunctional::zero(4).add_point_mass(&int(1), &int(1));
        assert!(dirac.moments().iter().all(One::is_one));
        let m = rat(2, 3);
        let g = f.add_point_mass(&int(-1), &m);
        assert_eq!(g.moment(1).unwrap(), &(rat(1, 2) - &m));
        assert_eq!(g.moment(2).unwrap(), &(rat(1, 3) + &m));
        let p = Polynomial::from_coeffs(vec![rat(1, 2), int(-3), int(2)]);
        assert_eq!(
            g.apply(&p).unwrap(),
            f.apply(&p).unwrap() + &m * p.eval(&int(-1))
        );
    }

    #[test]
    fn divide_by_linear_examples() {
        let f = MomentFunctional::new((0..6).map(|k| rat(k * k - 2, k + 1)).collect()).unwrap();
        for c in [int(1), rat(-1, 3)] {
            for m in [int(0), int(1), rat(5, 2)] {
                let sigma = f.divide_by_linear(&c, &m);
                assert_eq!(sigma.moment(0).unwrap(), &m);
                assert_eq!(sigma.depth(), f.depth() + 1);
                assert_eq!(sigma.left_multiply(&Polynomial::x_minus(c.clone())).unwrap(), f);
            }
        }
        let delta_one = MomentFunctional::zero(5).divide_by_linear(&int(1), &int(1));
        assert!(delta_one.moments().iter().all(One::is_one));
    }

    #[test]
    fn recurrence_round_trip_chebyshev_u() {
        let f = cheb_u(10).moments(20).unwrap();
        let report = f.recurrence_from_moments();
        assert!(report.regular_within_depth());
        assert_eq!(report.regular_through, Some(10));
        assert!(report.recurrence.betas().iter().all(Zero::is_zero));
        assert!(report.recurrence.gammas().iter().all(|g| *g == rat(1, 4)));
        assert_eq!(report.recurrence.beta_len(), 10);
        assert_eq!(report.recurrence.gamma_len(), 10);
    }

    #[test]
    fn singular_hankel_reports() {
        let f = MomentFunctional::new(vec![int(1), int(0), int(0), int(0), int(0)]).unwrap();
        let report = f.recurrence_from_moments();
        assert_eq!(report.first_singular, Some(1));
        assert_eq!(report.regular_through, Some(0));

        // x w_2 has <x w_2, 1> = 0
        let xw2 = cheb_u(8)
            .moments(12)
            .unwrap()
            .left_multiply(&Polynomial::x())
            .unwrap();
        let report = xw2.recurrence_from_moments();
        assert_eq!(report.first_singular, Some(0));
        assert_eq!(report.regular_through, None);
    }

    #[test]
    fn norm_squared_examples() {
        let rec = cheb_u(4);
        assert_eq!(rec.norm_squared(0).unwrap(), int(1));
        assert_eq!(rec.norm_squared(2).unwrap(), rat(1, 16));
        let f = rec.moments(8).unwrap();
        let polys = rec.mops(5).unwrap();
        for n in 0..5 {
            let p = polys.get(n).unwrap();
            assert_eq!(f.apply(&(p * p)).unwrap(), rec.norm_squared(n).unwrap());
        }
        assert!(rec.norm_squared(5).is_err());
    }

    #[test]
    fn recurrence_pair_rejects_zero_gamma() {
        assert!(RecurrencePair::new(vec![int(0)], vec![int(0)]).is_err());
        let raw = RecurrencePair::unchecked(vec![int(0)], vec![int(1), int(0)]);
        assert_eq!(raw.first_zero_gamma(), Some(2));
    }

    #[test]
    fn poly_seq_validation() {
        assert!(PolySeq::new(vec![Polynomial::one(), Polynomial::x()]).is_ok());
        assert!(PolySeq::new(vec![Polynomial::one(), Polynomial::from_ints(&[0, 2])]).is_err());
        assert!(PolySeq::new(vec![Polynomial::x()]).is_err());
    }

    #[test]
    fn serde_shapes() {
        let f = MomentFunctional::new(vec![int(1), int(0), rat(1, 4)]).unwrap();
        assert_eq!(
            serde_json::to_string(&f).unwrap(),
            r#"{"moments":["1","0","1/4"]}"#
        );
        let rec: RecurrencePair =
            serde_json::from_str(r#"{"beta":["0","1/2"],"gamma":["1/4"]}"#).unwrap();
        assert_eq!(rec.beta(1).unwrap(), &rat(1, 2));
        assert_eq!(rec.gamma(1).unwrap(), &rat(1, 4));
    }
}
