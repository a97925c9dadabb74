//! Recurrence data of the Jacobi functionals `w^(alpha, beta)` and of the
//! Chebyshev functionals of the second, third and fourth kinds.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::functional::RecurrencePair;
use crate::scalar::{self, int, serde_scalar, Scalar};

/// Relative tolerance for float-mode diagnostics.
pub const FLOAT_RTOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiParams {
    #[serde(with = "serde_scalar")]
    alpha: Scalar,
    #[serde(with = "serde_scalar")]
    beta: Scalar,
}

impl JacobiParams {
    pub fn new(alpha: Scalar, beta: Scalar) -> Result<Self> {
        let minus_one = -Scalar::one();
        if alpha <= minus_one || beta <= minus_one {
            return Err(Error::Domain(format!(
                "Jacobi parameters must exceed -1 (alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(JacobiParams { alpha, beta })
    }

    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }

    pub fn beta(&self) -> &Scalar {
        &self.beta
    }

    pub fn beta_n(&self, n: usize) -> Scalar {
        let (a, b) = (&self.alpha, &self.beta);
        let s = a + b;
        if n == 0 {
            // removable singularity at alpha + beta = 0
            return (b - a) / (&s + int(2));
        }
        let m = int(2 * n as i64) + &s;
        (b * b - a * a) / (&m * (&m + int(2)))
    }

    pub fn gamma_n(&self, n: usize) -> Scalar {
        assert!(n >= 1, "gamma_n is defined for n >= 1");
        let (a, b) = (&self.alpha, &self.beta);
        let s = a + b;
        if n == 1 {
            // removable singularity at alpha + beta = -1
            let two = &s + int(2);
            return int(4) * (a + int(1)) * (b + int(1)) / (&two * &two * (&s + int(3)));
        }
        let nn = int(n as i64);
        let m = int(2 * n as i64) + &s;
        int(4) * &nn * (&nn + a) * (&nn + b) * (&nn + &s)
            / ((&m - int(1)) * &m * &m * (&m + int(1)))
    }
}

/// `beta_0..beta_{count-1}` and `gamma_1..gamma_count`.
pub fn jacobi_recurrence(params: &JacobiParams, count: usize) -> Result<RecurrencePair> {
    if count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    RecurrencePair::new(
        (0..count).map(|n| params.beta_n(n)).collect(),
        (1..=count).map(|n| params.gamma_n(n)).collect(),
    )
}

/// Jacobi parameters of the Chebyshev functional of kind 2, 3 or 4.
pub fn chebyshev_params(kind: u8) -> Result<JacobiParams> {
    let half = scalar::rat(1, 2);
    let (a, b) = match kind {
        2 => (half.clone(), half),
        3 => (-half.clone(), half),
        4 => (half.clone(), -half),
        _ => {
            return Err(Error::Domain(format!(
                "Chebyshev kind must be 2, 3 or 4, got {kind}"
            )))
        }
    };
    JacobiParams::new(a, b)
}

pub fn chebyshev_kind(kind: u8, count: usize) -> Result<RecurrencePair> {
    jacobi_recurrence(&chebyshev_params(kind)?, count)
}

/// `<w, W_n^2> / <w, 1> = gamma_1 ... gamma_n`.
pub fn jacobi_norm_ratio(params: &JacobiParams, n: usize) -> Scalar {
    (1..=n).map(|k| params.gamma_n(k)).product()
}

/// The same ratio from the Gamma-function closed forms of `<w, W_n^2>` and
/// `w_0`, in floating point.
pub fn jacobi_norm_ratio_gamma_form(params: &JacobiParams, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let a = scalar::to_f64(&params.alpha);
    let b = scalar::to_f64(&params.beta);
    let nf = n as f64;
    let ln_norm = (2.0 * nf + a + b + 1.0) * std::f64::consts::LN_2
        + ln_gamma(nf + 1.0)
        + ln_gamma(nf + a + 1.0)
        + ln_gamma(nf + b + 1.0)
        + ln_gamma(nf + a + b + 1.0)
        - ln_gamma(2.0 * nf + a + b + 1.0)
        - ln_gamma(2.0 * nf + a + b + 2.0);
    let ln_w0 = (a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0);
    (ln_norm - ln_w0).exp()
}

/// Float-mode diagnostic: exact ratio plus agreement with the Gamma form at
/// relative tolerance [`FLOAT_RTOL`].
pub fn jacobi_norm_ratio_checked(params: &JacobiParams, n: usize) -> Result<(Scalar, f64)> {
    let exact = jacobi_norm_ratio(params, n);
    let approx = jacobi_norm_ratio_gamma_form(params, n);
    let exact_f = scalar::to_f64(&exact);
    let rel = ((approx - exact_f) / exact_f).abs();
    if !(rel <= FLOAT_RTOL) {
        return Err(Error::consistency(
            format!("gamma-form norm ratio (relative error {rel:e})"),
            n,
        ));
    }
    Ok((exact, approx))
}

/// True when every stored `gamma_n` is positive (the positive-definite case).
pub fn is_positive_definite(rec: &RecurrencePair) -> bool {
    rec.gammas().iter().all(Signed::is_positive)
}
