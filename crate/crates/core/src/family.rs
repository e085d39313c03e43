//! The Kw ∘ GMO composition.
//!
//! With `u = αḠ / (1 - ᾱḠ)`, `w = u^θ` (the GMO survival), `v = (1 - w)^a`,
//! the family survival is `(1 - v)^b`. All quantities are carried as logs;
//! `ln(1 - w)` and `ln(1 - v)` are formed with `ln_one_minus_exp` so neither
//! bracket loses precision near 0 or 1.

use crate::baseline::{Baseline, BaselinePoint};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::rng::UniformStream;
use crate::special::{ln_one_minus_exp, scaled_log};

/// The four generator parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub theta: f64,
}

impl FamilyParams {
    pub fn new(a: f64, b: f64, alpha: f64, theta: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("alpha", alpha), ("theta", theta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    value: v,
                    reason: "must be strictly positive",
                });
            }
        }
        Ok(Self { a, b, alpha, theta })
    }

    pub fn ones() -> Self {
        Self {
            a: 1.0,
            b: 1.0,
            alpha: 1.0,
            theta: 1.0,
        }
    }

    /// `ᾱ = 1 - α`; negative when `α > 1`.
    pub fn alpha_bar(&self) -> f64 {
        1.0 - self.alpha
    }
}

/// Every intermediate of one evaluation, in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub base: BaselinePoint,
    /// `ln u`
    pub ln_u: f64,
    /// `ln(1 - ᾱḠ) = ln(αḠ + G)`
    pub ln_den: f64,
    /// `ln(1 - u^θ)`, the log GMO cdf
    pub ln_1mw: f64,
    /// `ln(1 - (1 - u^θ)^a)`
    pub ln_1mv: f64,
    pub ln_pdf: f64,
}

impl Evaluation {
    pub fn ln_sf(&self, b: f64) -> f64 {
        b * self.ln_1mv
    }
}

/// `ln u` and `ln(αḠ + G)` from a baseline point.
pub(crate) fn gmo_core(alpha: f64, base: &BaselinePoint) -> (f64, f64) {
    let l = base.ln_sf;
    let g = base.cdf;
    if g == 0.0 {
        return (0.0, alpha.ln() + l);
    }
    if l == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, 0.0);
    }
    let s = l.exp();
    let r = g / (alpha * s);
    if r <= 1.0 {
        let lr = r.ln_1p();
        (-lr, alpha.ln() + l + lr)
    } else {
        let ln_den = (alpha * s + g).ln();
        (alpha.ln() + l - ln_den, ln_den)
    }
}

/// `ln(1 - u^θ)`. Where `r = G / (αḠ)` is below double precision the
/// leading term `θr` is taken from logs, so the result stays finite after
/// `G` itself underflows.
pub(crate) fn ln_gmo_cdf(alpha: f64, theta: f64, ln_u: f64, base: &BaselinePoint) -> f64 {
    let ln_r = base.ln_cdf - alpha.ln() - base.ln_sf;
    if ln_r < -40.0 {
        theta.ln() + ln_r
    } else {
        ln_one_minus_exp(theta * ln_u)
    }
}

/// `ln(1 - (1 - w)^a)` from `ln w` and `ln(1 - w)`. For tiny `w` this is
/// `ln(aw)`, which stays finite after `1 - w` rounds to one.
pub(crate) fn ln_kw_sf_base(a: f64, ln_w: f64, ln_1mw: f64) -> f64 {
    if ln_w < -40.0 {
        a.ln() + ln_w
    } else {
        ln_one_minus_exp(a * ln_1mw)
    }
}

/// GMO survival `[αḠ / (1 - ᾱḠ)]^θ` of `baseline` at `t`.
pub fn gmo_sf(baseline: &Baseline, alpha: f64, theta: f64, t: f64) -> f64 {
    let (ln_u, _) = gmo_core(alpha, &baseline.eval(t));
    (theta * ln_u).exp()
}

/// `ln(1 - exp(-e^{le}))`.
fn ln_one_minus_exp_neg_exp(le: f64) -> f64 {
    if le < -20.0 {
        le - 0.5 * le.exp()
    } else {
        ln_one_minus_exp(-le.exp())
    }
}

/// `ln(-ln(1 - e^x))` for `x <= 0`.
fn ln_neg_ln_one_minus_exp(x: f64) -> f64 {
    if x < -20.0 {
        x + 0.5 * x.exp()
    } else {
        (-ln_one_minus_exp(x)).ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KwGMODistribution {
    baseline: Baseline,
    params: FamilyParams,
}

impl KwGMODistribution {
    pub fn new(baseline: Baseline, params: FamilyParams) -> Self {
        Self { baseline, params }
    }

    pub fn baseline(&self) -> &Baseline {
        &self.baseline
    }

    pub fn params(&self) -> FamilyParams {
        self.params
    }

    /// The inner GMO distribution (`a = b = 1`).
    pub fn gmo(&self) -> KwGMODistribution {
        Self {
            baseline: self.baseline.clone(),
            params: FamilyParams {
                a: 1.0,
                b: 1.0,
                ..self.params
            },
        }
    }

    /// The same model with the GMO exponent replaced.
    pub fn with_theta(&self, theta: f64) -> KwGMODistribution {
        Self {
            baseline: self.baseline.clone(),
            params: FamilyParams {
                theta,
                ..self.params
            },
        }
    }

    pub fn eval(&self, t: f64) -> Evaluation {
        let FamilyParams { a, b, alpha, theta } = self.params;
        let base = self.baseline.eval(t);
        let (ln_u, ln_den) = gmo_core(alpha, &base);
        let ln_1mw = ln_gmo_cdf(alpha, theta, ln_u, &base);
        let ln_1mv = ln_kw_sf_base(a, theta * ln_u, ln_1mw);
        let ln_pdf = if t < self.baseline.support().lower {
            f64::NEG_INFINITY
        } else {
            let v = (a * b * theta).ln()
                + theta * alpha.ln()
                + base.ln_pdf
                + scaled_log(theta - 1.0, base.ln_sf)
                - (theta + 1.0) * ln_den
                + scaled_log(a - 1.0, ln_1mw)
                + scaled_log(b - 1.0, ln_1mv);
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        };
        Evaluation {
            base,
            ln_u,
            ln_den,
            ln_1mw,
            ln_1mv,
            ln_pdf,
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        self.eval(t).ln_pdf.exp()
    }

    pub fn log_pdf(&self, t: f64) -> f64 {
        self.eval(t).ln_pdf
    }

    pub fn ln_sf(&self, t: f64) -> f64 {
        self.eval(t).ln_sf(self.params.b)
    }

    pub fn sf(&self, t: f64) -> f64 {
        self.ln_sf(t).exp()
    }

    pub fn cdf(&self, t: f64) -> f64 {
        -self.ln_sf(t).exp_m1()
    }

    pub fn ln_cdf(&self, t: f64) -> f64 {
        ln_one_minus_exp(self.ln_sf(t))
    }

    /// Hazard `f / F̄`; `+∞` where the survival vanishes.
    pub fn hrf(&self, t: f64) -> f64 {
        let e = self.eval(t);
        if e.ln_1mv == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        let FamilyParams { a, b, alpha, theta } = self.params;
        ((a * b * theta).ln()
            + theta * alpha.ln()
            + e.base.ln_pdf
            + scaled_log(theta - 1.0, e.base.ln_sf)
            - (theta + 1.0) * e.ln_den
            + scaled_log(a - 1.0, e.ln_1mw)
            - e.ln_1mv)
            .exp()
    }

    /// Reversed hazard `f / F`; `+∞` where the cdf vanishes.
    pub fn rhrf(&self, t: f64) -> f64 {
        let e = self.eval(t);
        let ln_cdf = ln_one_minus_exp(e.ln_sf(self.params.b));
        if ln_cdf == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        (e.ln_pdf - ln_cdf).exp()
    }

    /// Cumulative hazard `-b ln(1 - (1 - u^θ)^a)`.
    pub fn chrf(&self, t: f64) -> f64 {
        -self.params.b * self.eval(t).ln_1mv
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level {p} not in (0, 1)")));
        }
        Ok(if p < 0.5 {
            self.quantile_ln_cdf(p.ln())
        } else {
            self.quantile_ln_sf((-p).ln_1p())
        })
    }

    /// Quantile addressed by `ln F`, exact deep into the lower tail.
    pub fn quantile_ln_cdf(&self, ln_p: f64) -> f64 {
        let FamilyParams { a, b, theta, .. } = self.params;
        let ln_c = ln_one_minus_exp_neg_exp(ln_neg_ln_one_minus_exp(ln_p) - b.ln());
        let ln_d = ln_one_minus_exp(ln_c / a);
        let ln_x = ln_d / theta;
        let ln_1mx = ln_one_minus_exp_neg_exp(ln_neg_ln_one_minus_exp(ln_c / a) - theta.ln());
        self.baseline_quantile(ln_x, ln_1mx)
    }

    /// Quantile addressed by `ln F̄`, exact deep into the upper tail.
    pub fn quantile_ln_sf(&self, ln_q: f64) -> f64 {
        let FamilyParams { a, b, theta, .. } = self.params;
        let ln_d = ln_one_minus_exp_neg_exp(ln_neg_ln_one_minus_exp(ln_q / b) - a.ln());
        let ln_x = ln_d / theta;
        let ln_1mx = ln_one_minus_exp(ln_x);
        self.baseline_quantile(ln_x, ln_1mx)
    }

    /// Maps the GMO survival level `X = u^θ` back to `G⁻¹(1 - X / (α + ᾱX))`.
    fn baseline_quantile(&self, ln_x: f64, ln_1mx: f64) -> f64 {
        let alpha = self.params.alpha;
        let alpha_bar = self.params.alpha_bar();
        // ln(α + ᾱX) and ln α - ln(α + ᾱX), each from the side that is exact
        let (ln_den, ln_ratio) = if ln_x < -std::f64::consts::LN_2 {
            let l = (alpha_bar * ln_x.exp() / alpha).ln_1p();
            (alpha.ln() + l, -l)
        } else {
            let l = (-alpha_bar * ln_1mx.exp()).ln_1p();
            (l, alpha.ln() - l)
        };
        let ln_sf = ln_x - ln_den;
        let ln_cdf = ln_1mx + ln_ratio;
        self.baseline
            .quantile_from_logs(ln_cdf.min(0.0), ln_sf.min(0.0))
    }

    /// `n` inversion draws from the seeded uniform stream.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        self.sample_with(n, seed, Execution::default())
    }

    /// As [`sample`](Self::sample); the uniforms are drawn in order and
    /// only the inversions are distributed, so both modes give identical
    /// output.
    pub fn sample_with(&self, n: usize, seed: u64, exec: Execution) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        let mut stream = UniformStream::new(seed);
        let u: Vec<f64> = (0..n).map(|_| stream.next_open01()).collect();
        Ok(par::map_slice(exec, &u, |&p| {
            if p < 0.5 {
                self.quantile_ln_cdf(p.ln())
            } else {
                self.quantile_ln_sf((-p).ln_1p())
            }
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> Baseline {
        Baseline::from_id("exp", &[1.0]).unwrap()
    }

    #[test]
    fn gmo_sf_examples() {
        let b = exp1();
        let t = -(0.3f64).ln();
        assert!((gmo_sf(&b, 1.0, 1.0, t) - 0.3).abs() < 1e-15);
        let t = std::f64::consts::LN_2;
        assert!((gmo_sf(&b, 2.0, 1.0, t) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(gmo_sf(&b, 0.3, 2.5, 0.0), 1.0);
    }

    #[test]
    fn all_ones_is_the_baseline() {
        let d = KwGMODistribution::new(exp1(), FamilyParams::ones());
        assert!((d.pdf(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((d.quantile(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        for &t in &[0.1, 1.0, 5.0, 30.0] {
            assert!((d.hrf(t) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoints() {
        let p = FamilyParams::new(1.5, 0.7, 2.0, 0.4).unwrap();
        let d = KwGMODistribution::new(exp1(), p);
        assert_eq!(d.cdf(0.0), 0.0);
        assert_eq!(d.sf(0.0), 1.0);
        assert!(d.cdf(1e4) == 1.0);
        assert_eq!(d.rhrf(0.0), f64::INFINITY);
        assert_eq!(d.hrf(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn quantile_round_trip_both_tails() {
        let p = FamilyParams::new(0.6, 2.5, 3.0, 0.5).unwrap();
        let w = Baseline::from_id("weibull", &[1.3, 0.8]).unwrap();
        let d = KwGMODistribution::new(w, p);
        for &q in &[1e-12, 1e-6, 0.01, 0.25, 0.5, 0.9, 0.999] {
            let t = d.quantile(q).unwrap();
            assert!(
                (d.cdf(t) - q).abs() <= 1e-8 * q.max(1e-3),
                "{q}: {}",
                d.cdf(t)
            );
        }
        for &ln_q in &[-5.0, -50.0, -300.0] {
            let t = d.quantile_ln_sf(ln_q);
            assert!((d.ln_sf(t) - ln_q).abs() < 1e-8 * ln_q.abs(), "{ln_q}");
        }
        for &ln_p in &[-5.0, -50.0, -300.0] {
            let t = d.quantile_ln_cdf(ln_p);
            assert!((d.ln_cdf(t) - ln_p).abs() < 1e-8 * ln_p.abs(), "{ln_p}");
        }
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0).is_err());
    }

    #[test]
    fn density_survives_baseline_underflow() {
        // Fréchet G(t) = exp(-(δ/t)^λ) is far below the smallest double here
        let base = Baseline::from_id("frechet", &[1.5, 1.1]).unwrap();
        let (a, b, alpha, theta) = (0.62, 2.9, 4.3, 1.3);
        let d =
            KwGMODistribution::new(base.clone(), FamilyParams::new(a, b, alpha, theta).unwrap());
        let t = 0.01;
        let p = base.eval(t);
        assert_eq!(p.cdf, 0.0);
        let leading = (theta * a * b / alpha).ln()
            + p.ln_pdf
            + (a - 1.0) * (theta.ln() + p.ln_cdf - alpha.ln());
        let got = d.log_pdf(t);
        assert!(
            (got - leading).abs() < 1e-9 * leading.abs(),
            "{got} vs {leading}"
        );
        assert!(d.pdf(t) > 0.0);
    }

    #[test]
    fn upper_tail_with_small_b() {
        // w = u^θ underflows at t = 800 for the unit exponential
        let (a, b, alpha, theta) = (1.6, 0.5, 1.5, 1.2);
        let d = KwGMODistribution::new(exp1(), FamilyParams::new(a, b, alpha, theta).unwrap());
        let t = 800.0;
        let ln_w = theta * (alpha.ln() - t);
        let sf = b * (a.ln() + ln_w);
        assert!((d.ln_sf(t) - sf).abs() < 1e-12 * sf.abs());
        let pdf = (a * b * theta).ln() + theta * alpha.ln() - t
            + (theta - 1.0) * -t
            + (b - 1.0) * (a.ln() + ln_w);
        assert!(
            (d.log_pdf(t) - pdf).abs() < 1e-9 * pdf.abs(),
            "{} vs {pdf}",
            d.log_pdf(t)
        );
    }

    #[test]
    fn sampling_is_reproducible() {
        let d = KwGMODistribution::new(exp1(), FamilyParams::new(2.0, 0.5, 1.5, 0.8).unwrap());
        let a = d.sample(100, 9).unwrap();
        let b = d.sample_with(100, 9, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        let one = d.sample(1, 9).unwrap();
        let u = UniformStream::new(9).next_open01();
        assert_eq!(one[0], d.quantile(u).unwrap());
        assert!(d.sample(0, 9).is_err());
    }

    #[test]
    fn reduced_exponential_sample_mean() {
        let d = KwGMODistribution::new(exp1(), FamilyParams::ones());
        let xs = d.sample(100_000, 2024).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn rejects_non_positive_params() {
        assert!(FamilyParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(FamilyParams::new(1.0, 1.0, -1.0, 1.0).is_err());
        assert!(FamilyParams::new(1.0, f64::NAN, 1.0, 1.0).is_err());
    }
}
