//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{self, Scalar};

/// Coefficients in ascending degree, always in canonical form: the zero
/// polynomial is the empty vector, otherwise the last entry is nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn x() -> Self {
        Polynomial {
            coeffs: vec![Scalar::zero(), Scalar::one()],
        }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `x - c`
    pub fn x_minus(c: Scalar) -> Self {
        Self::from_coeffs(vec![-c, Scalar::one()])
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); k + 1];
        coeffs[k] = Scalar::one();
        Polynomial { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| scalar::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// `x * self`
    pub fn shift_up(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Scalar::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Scalar::zero();
        let coeffs = (0..n)
            .map(|k| {
                f(
                    self.coeffs.get(k).unwrap_or(&zero),
                    other.coeffs.get(k).unwrap_or(&zero),
                )
            })
            .collect();
        Self::from_coeffs(coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(coeffs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        scalar::serde_scalar_vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        scalar::serde_scalar_vec::deserialize(d).map(Polynomial::from_coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;

    fn p(coeffs: &[(i64, i64)]) -> Polynomial {
        Polynomial::from_coeffs(coeffs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn add_examples() {
        let x_plus_1 = Polynomial::from_ints(&[1, 1]);
        let minus_x = Polynomial::from_ints(&[0, -1]);
        assert_eq!(&x_plus_1 + &minus_x, Polynomial::one());

        let q = p(&[(3, 2), (-1, 7), (2, 1)]);
        assert_eq!(&Polynomial::zero() + &q, q);

        let x2_minus_quarter = p(&[(-1, 4), (0, 1), (1, 1)]);
        assert_eq!(
            &x2_minus_quarter + &Polynomial::constant(rat(1, 4)),
            Polynomial::monomial(2)
        );
    }

    #[test]
    fn cancellation_is_canonical() {
        let a = Polynomial::from_ints(&[1, 2, 3]);
        let b = Polynomial::from_ints(&[0, 0, 3]);
        let d = &a - &b;
        assert_eq!(d.degree(), Some(1));
        assert_eq!(d.coeffs().len(), 2);
        assert!((&a - &a).is_zero());
        assert_eq!((&a - &a).degree(), None);
    }

    #[test]
    fn mul_examples() {
        let prod = Polynomial::from_ints(&[-1, 1]) * Polynomial::from_ints(&[1, 1]);
        assert_eq!(prod, Polynomial::from_ints(&[-1, 0, 1]));

        let x_times = Polynomial::x() * Polynomial::from_ints(&[1, 1]);
        assert_eq!(x_times, Polynomial::from_ints(&[0, 1, 1]));

        let q = Polynomial::from_ints(&[4, 5]);
        assert!((Polynomial::zero() * q).is_zero());
    }

    #[test]
    fn eval_examples() {
        let p1 = Polynomial::from_ints(&[-1, 0, 1]);
        assert_eq!(p1.eval(&int(1)), int(0));
        let p2 = p(&[(1, 2), (1, 1)]);
        assert_eq!(p2.eval(&rat(-1, 2)), int(0));
        assert_eq!(Polynomial::monomial(3).eval(&int(2)), int(8));
    }

    #[test]
    fn monic_and_serde() {
        let q = p(&[(-1, 4), (0, 1), (1, 1)]);
        assert!(q.is_monic());
        assert!(!Polynomial::from_ints(&[1, 2]).is_monic());
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, r#"["-1/4","0","1"]"#);
        let back: Polynomial = serde_json::from_str(r#"["-1/4","0","1","0"]"#).unwrap();
        assert_eq!(back, q);
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((-6i64..=6, 1i64..=4), 0..5).prop_map(|cs| {
            Polynomial::from_coeffs(cs.into_iter().map(|(n, d)| rat(n, d)).collect())
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn degree_of_product(a in small_poly(), b in small_poly()) {
            let prod = &a * &b;
            match (a.degree(), b.degree()) {
                (Some(da), Some(db)) => prop_assert_eq!(prod.degree(), Some(da + db)),
                _ => prop_assert!(prod.is_zero()),
            }
        }

        #[test]
        fn eval_is_multiplicative(a in small_poly(), b in small_poly(), n in -5i64..=5, d in 1i64..=3) {
            let x = rat(n, d);
            prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
        }
    }
}
