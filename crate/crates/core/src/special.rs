//! Small numerical helpers shared by the evaluators.

use statrs::distribution::{ContinuousCDF, Normal};

/// `ln(1 - exp(x))` for `x <= 0`, accurate at both ends.
pub fn ln_one_minus_exp(x: f64) -> f64 {
    if x > 0.0 {
        f64::NAN
    } else if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `1 - exp(x)` for `x <= 0`.
#[inline]
pub fn one_minus_exp(x: f64) -> f64 {
    -x.exp_m1()
}

/// `coef * ln_value` with the convention `0 * (-inf) = 0`.
///
/// The density brackets are raised to exponents such as `a - 1` that are
/// exactly zero in the reduced models, while the bracket itself may vanish at
/// a support endpoint.
#[inline]
pub fn scaled_log(coef: f64, ln_value: f64) -> f64 {
    if coef == 0.0 {
        0.0
    } else {
        coef * ln_value
    }
}

/// Generalized binomial coefficient `C(x, k)` for real `x`.
pub fn binomial(x: f64, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c *= (x - i as f64) / (i as f64 + 1.0);
    }
    c
}

/// Returns `Some(n)` when `x` is a nonnegative integer (within 1e-12).
pub fn as_nonneg_integer(x: f64) -> Option<usize> {
    let r = x.round();
    if r >= 0.0 && (x - r).abs() <= 1e-12 * r.max(1.0) {
        Some(r as usize)
    } else {
        None
    }
}

/// Two-sided standard-normal critical value for a confidence `level`.
pub fn normal_critical(level: f64) -> f64 {
    let n = Normal::standard();
    n.inverse_cdf(0.5 + level / 2.0)
}

pub fn ln_factorial(n: usize) -> f64 {
    statrs::function::factorial::ln_factorial(n as u64)
}
