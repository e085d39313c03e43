//! Series expansions of the family in powers of the GMO cdf/survival, and
//! the moments, PWMs, mgf and Rényi entropy built on them.
//!
//! Every series quantity has a quadrature counterpart computed in
//! probability space, `∫ φ(Q(v)) dv`, through [`quadrature::expectation`].
//! For integer `a`, `b` the expansions are finite and exact; otherwise they
//! use generalized binomials truncated at a caller-chosen order and are
//! flagged `approximate`.

use crate::error::{Error, Result};
use crate::family::{ln_kw_sf_base, FamilyParams, KwGMODistribution};
use crate::quadrature::{self, Tolerance};
use crate::special::{as_nonneg_integer, binomial, ln_factorial, scaled_log};
use crate::Baseline;

/// Default truncation order for non-integer exponents.
pub const DEFAULT_TRUNCATION: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientKind {
    /// Weights of `F_GMO^{a(j+1)-1} f_GMO`.
    PdfA,
    /// Weights of `F̄_GMO^k f_GMO`.
    PdfB,
    /// Weights of `F_GMO^{al}` in the survival function.
    SfC,
    /// Weights of `F̄_GMO^m` in the survival function.
    SfDelta,
    /// Weights of `F̄_GMO^r f_GMO` in an order-statistic density.
    OrderEta,
    /// Weights of the Rényi integrals.
    RenyiZ,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    pub kind: CoefficientKind,
    pub values: Vec<f64>,
    /// Index of the last retained term.
    pub truncation_order: usize,
    /// Magnitude of the last retained coefficient; zero for exact sums.
    pub truncation_residual: f64,
    /// Set when the underlying binomial exponent is non-integer.
    pub approximate: bool,
}

impl SeriesCoefficients {
    fn new(kind: CoefficientKind, values: Vec<f64>, approximate: bool) -> Self {
        let truncation_order = values.len().saturating_sub(1);
        let truncation_residual = if approximate {
            values.last().map_or(0.0, |v| v.abs())
        } else {
            0.0
        };
        Self {
            kind,
            values,
            truncation_order,
            truncation_residual,
            approximate,
        }
    }
}

/// Number of terms of `Σ_k C(x, k) ...`: exact for nonnegative integer `x`.
fn binomial_terms(x: f64, truncation: usize) -> (usize, bool) {
    match as_nonneg_integer(x) {
        Some(n) => (n + 1, false),
        None => (truncation + 1, true),
    }
}

/// `ln F_GMO`, `ln F̄_GMO` and `ln f_GMO` at `t`.
fn gmo_logs(dist: &KwGMODistribution, t: f64) -> (f64, f64, f64) {
    let FamilyParams { alpha, theta, .. } = dist.params();
    let e = dist.eval(t);
    let ln_f = if t < dist.baseline().support().lower {
        f64::NEG_INFINITY
    } else {
        theta.ln() + theta * alpha.ln() + e.base.ln_pdf + scaled_log(theta - 1.0, e.base.ln_sf)
            - (theta + 1.0) * e.ln_den
    };
    (e.ln_1mw, theta * e.ln_u, ln_f)
}

fn check_truncation(j: usize) -> Result<()> {
    if j == 0 {
        return Err(Error::Domain("truncation order must be at least 1".into()));
    }
    Ok(())
}

/// The two mixture representations of the density.
#[derive(Debug, Clone, PartialEq)]
pub struct PdfExpansion {
    dist: KwGMODistribution,
    pub a_form: SeriesCoefficients,
    pub b_form: SeriesCoefficients,
}

impl PdfExpansion {
    /// `Σ_j A_j F_GMO^{a(j+1)-1} f_GMO`.
    pub fn pdf_a(&self, t: f64) -> f64 {
        let a = self.dist.params().a;
        let (ln_cdf, _, ln_f) = gmo_logs(&self.dist, t);
        if ln_f == f64::NEG_INFINITY {
            return 0.0;
        }
        self.a_form
            .values
            .iter()
            .enumerate()
            .map(|(j, c)| c * (scaled_log(a * (j as f64 + 1.0) - 1.0, ln_cdf) + ln_f).exp())
            .sum()
    }

    /// `Σ_k B_k F̄_GMO^k f_GMO`, i.e. a mixture of GMO densities with
    /// exponents `θ(k+1)` and weights `B_k / (k+1)`.
    pub fn pdf_b(&self, t: f64) -> f64 {
        let (_, ln_sf, ln_f) = gmo_logs(&self.dist, t);
        if ln_f == f64::NEG_INFINITY {
            return 0.0;
        }
        self.b_form
            .values
            .iter()
            .enumerate()
            .map(|(k, c)| c * (scaled_log(k as f64, ln_sf) + ln_f).exp())
            .sum()
    }
}

/// Expands the density to truncation order `truncation` (ignored where
/// the sums terminate).
pub fn expand_pdf(dist: &KwGMODistribution, truncation: usize) -> Result<PdfExpansion> {
    check_truncation(truncation)?;
    let FamilyParams { a, b, .. } = dist.params();
    let (n_a, approx_a) = binomial_terms(b - 1.0, truncation);
    let a_values: Vec<f64> = (0..n_a)
        .map(|j| a * b * sign(j) * binomial(b - 1.0, j))
        .collect();

    // F^{a(j+1)-1} = Σ_k (-1)^k C(a(j+1)-1, k) F̄^k
    let mut n_b = 0;
    let mut approx_b = approx_a;
    for j in 0..n_a {
        let (n, approx) = binomial_terms(a * (j as f64 + 1.0) - 1.0, truncation);
        n_b = n_b.max(n);
        approx_b |= approx;
    }
    let mut b_values = vec![0.0; n_b];
    for (j, aj) in a_values.iter().enumerate() {
        let x = a * (j as f64 + 1.0) - 1.0;
        let (n, _) = binomial_terms(x, truncation);
        for (k, bk) in b_values.iter_mut().enumerate().take(n) {
            *bk += aj * sign(k) * binomial(x, k);
        }
    }
    Ok(PdfExpansion {
        dist: dist.clone(),
        a_form: SeriesCoefficients::new(CoefficientKind::PdfA, a_values, approx_a),
        b_form: SeriesCoefficients::new(CoefficientKind::PdfB, b_values, approx_b),
    })
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// The two power-series representations of the survival function.
#[derive(Debug, Clone, PartialEq)]
pub struct SfExpansion {
    dist: KwGMODistribution,
    pub c_form: SeriesCoefficients,
    pub delta_form: SeriesCoefficients,
}

impl SfExpansion {
    /// `Σ_l C_l F_GMO^{al}`.
    pub fn sf_c(&self, t: f64) -> f64 {
        let a = self.dist.params().a;
        let (ln_cdf, _, _) = gmo_logs(&self.dist, t);
        self.c_form
            .values
            .iter()
            .enumerate()
            .map(|(l, c)| c * scaled_log(a * l as f64, ln_cdf).exp())
            .sum()
    }

    /// `Σ_m δ_m F̄_GMO^m`.
    pub fn sf_delta(&self, t: f64) -> f64 {
        let (_, ln_sf, _) = gmo_logs(&self.dist, t);
        self.delta_form
            .values
            .iter()
            .enumerate()
            .map(|(m, c)| c * scaled_log(m as f64, ln_sf).exp())
            .sum()
    }
}

pub fn expand_sf(dist: &KwGMODistribution, truncation: usize) -> Result<SfExpansion> {
    check_truncation(truncation)?;
    let FamilyParams { a, b, .. } = dist.params();
    let (n_c, approx_c) = binomial_terms(b, truncation);
    let c_values: Vec<f64> = (0..n_c).map(|l| sign(l) * binomial(b, l)).collect();

    // F^{al} = Σ_m (-1)^m C(al, m) F̄^m, collected over every (l, m) pair
    let mut n_d = 0;
    let mut approx_d = approx_c;
    for l in 0..n_c {
        let (n, approx) = binomial_terms(a * l as f64, truncation);
        n_d = n_d.max(n);
        approx_d |= approx;
    }
    let mut d_values = vec![0.0; n_d];
    for (l, cl) in c_values.iter().enumerate() {
        let x = a * l as f64;
        let (n, _) = binomial_terms(x, truncation);
        for (m, dm) in d_values.iter_mut().enumerate().take(n) {
            *dm += cl * sign(m) * binomial(x, m);
        }
    }
    Ok(SfExpansion {
        dist: dist.clone(),
        c_form: SeriesCoefficients::new(CoefficientKind::SfC, c_values, approx_c),
        delta_form: SeriesCoefficients::new(CoefficientKind::SfDelta, d_values, approx_d),
    })
}

fn check_order_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::OrderIndex { i, n });
    }
    Ok(())
}

fn ln_order_constant(i: usize, n: usize) -> f64 {
    ln_factorial(n) - ln_factorial(i - 1) - ln_factorial(n - i)
}

/// Density of the `i`-th smallest of `n` draws.
pub fn order_stat_pdf(dist: &KwGMODistribution, i: usize, n: usize, t: f64) -> Result<f64> {
    check_order_index(i, n)?;
    let e = dist.eval(t);
    if e.ln_pdf == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let ln_sf = e.ln_sf(dist.params().b);
    let ln_cdf = crate::special::ln_one_minus_exp(ln_sf);
    let v = ln_order_constant(i, n)
        + e.ln_pdf
        + scaled_log((i - 1) as f64, ln_cdf)
        + scaled_log((n - i) as f64, ln_sf);
    Ok(v.exp())
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn poly_pow(p: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..k {
        out = poly_mul(&out, p);
    }
    out
}

fn require_integer_shapes(dist: &KwGMODistribution) -> Result<()> {
    let FamilyParams { a, b, .. } = dist.params();
    if as_nonneg_integer(a).is_none() || as_nonneg_integer(b).is_none() {
        return Err(Error::Domain(
            "the finite order-statistic expansion needs integer a and b".into(),
        ));
    }
    Ok(())
}

/// Coefficients `η_r` with `f_{i:n}(t) = f_GMO(t) Σ_r η_r F̄_GMO(t)^r`,
/// obtained by expanding `f F^{i-1} F̄^{n-i}` exactly as a polynomial in
/// `F̄_GMO`. Requires integer `a`, `b`.
pub fn order_stat_coefficients(
    dist: &KwGMODistribution,
    i: usize,
    n: usize,
) -> Result<SeriesCoefficients> {
    check_order_index(i, n)?;
    require_integer_shapes(dist)?;
    let pdf = expand_pdf(dist, DEFAULT_TRUNCATION)?;
    let sf = expand_sf(dist, DEFAULT_TRUNCATION)?;
    let survival = &sf.delta_form.values;
    let mut cdf: Vec<f64> = survival.iter().map(|c| -c).collect();
    cdf[0] += 1.0;
    let mut eta = poly_mul(&pdf.b_form.values, &poly_pow(&cdf, i - 1));
    eta = poly_mul(&eta, &poly_pow(survival, n - i));
    let scale = ln_order_constant(i, n).exp();
    for c in &mut eta {
        *c *= scale;
    }
    Ok(SeriesCoefficients::new(
        CoefficientKind::OrderEta,
        eta,
        false,
    ))
}

/// Order-statistic density from the finite `η` expansion.
pub fn order_stat_pdf_series(dist: &KwGMODistribution, i: usize, n: usize, t: f64) -> Result<f64> {
    let eta = order_stat_coefficients(dist, i, n)?;
    let (_, ln_sf, ln_f) = gmo_logs(dist, t);
    if ln_f == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(eta
        .values
        .iter()
        .enumerate()
        .map(|(r, c)| c * (scaled_log(r as f64, ln_sf) + ln_f).exp())
        .sum())
}

/// `∫_0^1 φ(Q(v)) dv` over the quantile function of `dist`.
fn expect<P>(dist: &KwGMODistribution, ln_phi: P, tol: Tolerance) -> Result<f64>
where
    P: Fn(f64, f64, f64) -> f64,
{
    quadrature::expectation(
        |ln_p| dist.quantile_ln_cdf(ln_p),
        |ln_q| dist.quantile_ln_sf(ln_q),
        ln_phi,
        tol,
    )
}

fn gmo_pwm(gmo: &KwGMODistribution, p: f64, q: f64, r: f64, tol: Tolerance) -> Result<f64> {
    expect(
        gmo,
        |t, ln_v, ln_w| scaled_log(p, t.ln()) + scaled_log(q, ln_v) + scaled_log(r, ln_w),
        tol,
    )
}

/// Probability weighted moment `Γ_{p,q,r} = E[T^p F^q F̄^r]` of the GMO
/// distribution over `baseline`.
pub fn pwm_gmo(baseline: &Baseline, alpha: f64, theta: f64, p: f64, q: f64, r: f64) -> Result<f64> {
    let params = FamilyParams::new(1.0, 1.0, alpha, theta)?;
    let gmo = KwGMODistribution::new(baseline.clone(), params);
    gmo_pwm(&gmo, p, q, r, Tolerance::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series,
    Quadrature,
}

/// `E[T^s]`.
pub fn moment(dist: &KwGMODistribution, s: u32, method: Method) -> Result<f64> {
    if s == 0 {
        return Ok(1.0);
    }
    let s = s as f64;
    let tol = Tolerance::default();
    match method {
        Method::Quadrature => expect(dist, |t, _, _| s * t.ln(), tol),
        Method::Series => {
            let a = dist.params().a;
            let gmo = dist.gmo();
            let expansion = expand_pdf(dist, DEFAULT_TRUNCATION)?;
            let mut total = 0.0;
            for (j, aj) in expansion.a_form.values.iter().enumerate() {
                // E over f_GMO of T^s F^{a(j+1)-1}
                let q = a * (j as f64 + 1.0) - 1.0;
                total += aj * gmo_pwm(&gmo, s, q, 0.0, tol)?;
            }
            Ok(total)
        }
    }
}

/// `E[T_{i:n}^s]`.
pub fn order_stat_moment(
    dist: &KwGMODistribution,
    i: usize,
    n: usize,
    s: u32,
    method: Method,
) -> Result<f64> {
    check_order_index(i, n)?;
    let s = s as f64;
    let tol = Tolerance::default();
    match method {
        Method::Quadrature => {
            // F(Q(v)) = v, so the order-statistic weight is a beta kernel
            let c = ln_order_constant(i, n);
            expect(
                dist,
                |t, ln_v, ln_w| {
                    scaled_log(s, t.ln())
                        + c
                        + scaled_log((i - 1) as f64, ln_v)
                        + scaled_log((n - i) as f64, ln_w)
                },
                tol,
            )
        }
        Method::Series => {
            let eta = order_stat_coefficients(dist, i, n)?;
            let gmo = dist.gmo();
            let mut total = 0.0;
            for (r, c) in eta.values.iter().enumerate() {
                if *c != 0.0 {
                    total += c * gmo_pwm(&gmo, s, 0.0, r as f64, tol)?;
                }
            }
            Ok(total)
        }
    }
}

/// Moment generating function `E[e^{sT}]`.
pub fn mgf(dist: &KwGMODistribution, s: f64, method: Method) -> Result<f64> {
    if s == 0.0 {
        return Ok(1.0);
    }
    let tol = Tolerance::default();
    match method {
        Method::Quadrature => expect(dist, |t, _, _| s * t, tol),
        Method::Series => {
            // mixture of GMO laws with exponents θ(k+1) and weights B_k/(k+1)
            let expansion = expand_pdf(dist, DEFAULT_TRUNCATION)?;
            let gmo = dist.gmo();
            let theta = dist.params().theta;
            let mut total = 0.0;
            for (k, bk) in expansion.b_form.values.iter().enumerate() {
                if *bk == 0.0 {
                    continue;
                }
                let component = gmo.with_theta(theta * (k as f64 + 1.0));
                total += bk / (k as f64 + 1.0) * expect(&component, |t, _, _| s * t, tol)?;
            }
            Ok(total)
        }
    }
}

/// Coefficients `Z_i = (ab)^δ (-1)^i C(δ(b-1), i)` of the Rényi expansion.
pub fn renyi_coefficients(
    dist: &KwGMODistribution,
    delta: f64,
    truncation: usize,
) -> Result<SeriesCoefficients> {
    check_truncation(truncation)?;
    let FamilyParams { a, b, .. } = dist.params();
    let x = delta * (b - 1.0);
    let (n, approx) = binomial_terms(x, truncation);
    let scale = (a * b).powf(delta);
    let values = (0..n).map(|i| scale * sign(i) * binomial(x, i)).collect();
    Ok(SeriesCoefficients::new(
        CoefficientKind::RenyiZ,
        values,
        approx,
    ))
}

/// Rényi entropy `(1 - δ)^{-1} ln ∫ f^δ`.
pub fn renyi_entropy(dist: &KwGMODistribution, delta: f64, method: Method) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) || delta == 1.0 {
        return Err(Error::Domain(format!(
            "Rényi order must be positive and different from 1, got {delta}"
        )));
    }
    let tol = Tolerance::default();
    let integral = match method {
        Method::Quadrature => expect(dist, |t, _, _| (delta - 1.0) * dist.log_pdf(t), tol)?,
        Method::Series => {
            let a = dist.params().a;
            let z = renyi_coefficients(dist, delta, DEFAULT_TRUNCATION)?;
            let gmo = dist.gmo();
            let mut total = 0.0;
            for (i, zi) in z.values.iter().enumerate() {
                // ∫ f_GMO^δ F^{δ(a-1)+ai} dt = ∫ f_GMO(Q(v))^{δ-1} v^{a(i+δ)-δ} dv
                let q = a * (i as f64 + delta) - delta;
                total += zi
                    * expect(
                        &gmo,
                        |t, ln_v, _| (delta - 1.0) * gmo.log_pdf(t) + scaled_log(q, ln_v),
                        tol,
                    )?;
            }
            total
        }
    };
    if integral.is_nan() || integral <= 0.0 {
        return Err(Error::Domain(format!(
            "∫ f^δ evaluated to {integral}; entropy undefined"
        )));
    }
    Ok(integral.ln() / (1.0 - delta))
}

/// Approximants as `G(t) → 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginAsymptote {
    pub pdf: f64,
    pub cdf: f64,
    pub hrf: f64,
}

/// Approximants as `t → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailAsymptote {
    pub pdf: f64,
    pub sf: f64,
    pub hrf: f64,
}

pub fn asymptote_origin(dist: &KwGMODistribution, t: f64) -> OriginAsymptote {
    let FamilyParams { a, b, alpha, theta } = dist.params();
    let e = dist.eval(t);
    let ln = (theta * a * b / alpha).ln() + e.base.ln_pdf + scaled_log(a - 1.0, e.ln_1mw);
    let v = ln.exp();
    OriginAsymptote {
        pdf: v,
        cdf: 0.0,
        hrf: v,
    }
}

pub fn asymptote_tail(dist: &KwGMODistribution, t: f64) -> TailAsymptote {
    let FamilyParams { a, b, alpha, theta } = dist.params();
    let base = dist.baseline().eval(t);
    // ln(1 - [1 - (αḠ)^θ]^a)
    let ln_w = theta * (alpha.ln() + base.ln_sf);
    let ln_bracket = ln_kw_sf_base(a, ln_w, crate::special::ln_one_minus_exp(ln_w));
    let ln_core = (a * b * theta).ln()
        + theta * alpha.ln()
        + base.ln_pdf
        + scaled_log(theta - 1.0, base.ln_sf);
    TailAsymptote {
        pdf: (ln_core + scaled_log(b - 1.0, ln_bracket)).exp(),
        sf: (b * ln_bracket).exp(),
        hrf: (ln_core - ln_bracket).exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(id: &str, p: &[f64], a: f64, b: f64, alpha: f64, theta: f64) -> KwGMODistribution {
        KwGMODistribution::new(
            Baseline::from_id(id, p).unwrap(),
            FamilyParams::new(a, b, alpha, theta).unwrap(),
        )
    }

    #[test]
    fn single_term_when_b_is_one() {
        let d = dist("exp", &[1.0], 2.5, 1.0, 0.7, 1.3);
        let e = expand_pdf(&d, 10).unwrap();
        assert_eq!(e.a_form.values, vec![2.5]);
        assert!(!e.a_form.approximate);
        let s = expand_sf(&d, 10).unwrap();
        assert_eq!(s.c_form.values, vec![1.0, -1.0]);
    }

    #[test]
    fn b_two_coefficients() {
        let d = dist("weibull", &[1.0, 1.5], 1.7, 2.0, 0.7, 1.3);
        let e = expand_pdf(&d, 10).unwrap();
        assert!((e.a_form.values[0] - 3.4).abs() < 1e-15);
        assert!((e.a_form.values[1] + 3.4).abs() < 1e-15);
        for i in 1..50 {
            let t = 0.05 * i as f64;
            assert!((e.pdf_a(t) - d.pdf(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn non_integer_b_is_flagged() {
        let d = dist("exp", &[1.0], 2.0, 2.5, 1.0, 1.0);
        let e = expand_pdf(&d, 30).unwrap();
        assert!(e.a_form.approximate);
        assert_eq!(e.a_form.truncation_order, 30);
        assert!(e.a_form.truncation_residual > 0.0);
        assert!(expand_pdf(&d, 0).is_err());
    }

    #[test]
    fn sf_series_is_one_at_origin() {
        let d = dist("exp", &[1.0], 2.0, 3.0, 0.6, 1.4);
        let s = expand_sf(&d, 10).unwrap();
        assert!((s.sf_c(0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reduced_exponential_moments_and_mgf() {
        let d = dist("exp", &[1.0], 1.0, 1.0, 1.0, 1.0);
        for m in [Method::Quadrature, Method::Series] {
            assert!((moment(&d, 1, m).unwrap() - 1.0).abs() < 1e-8);
            assert!((moment(&d, 2, m).unwrap() - 2.0).abs() < 1e-8);
            assert!((mgf(&d, 0.5, m).unwrap() - 2.0).abs() < 1e-7);
        }
        assert_eq!(moment(&d, 0, Method::Quadrature).unwrap(), 1.0);
        assert_eq!(mgf(&d, 0.0, Method::Quadrature).unwrap(), 1.0);
        assert!(matches!(
            mgf(&d, 1.5, Method::Quadrature),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn pwm_identities() {
        let b = Baseline::from_id("weibull", &[0.8, 1.7]).unwrap();
        assert!((pwm_gmo(&b, 0.4, 2.2, 0.0, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-8);
        assert!((pwm_gmo(&b, 0.4, 2.2, 0.0, 1.0, 0.0).unwrap() - 0.5).abs() < 1e-8);
        let e = Baseline::from_id("exp", &[1.0]).unwrap();
        assert!((pwm_gmo(&e, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn heavy_tail_moment_diverges() {
        // Lomax tail index β·θ·b = 1.5 < 2
        let d = dist("lomax", &[1.5, 1.0], 1.0, 1.0, 1.0, 1.0);
        assert!(moment(&d, 1, Method::Quadrature).is_ok());
        assert!(matches!(
            moment(&d, 2, Method::Quadrature),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn renyi_reduced_exponential() {
        let d = dist("exp", &[1.0], 1.0, 1.0, 1.0, 1.0);
        let r = renyi_entropy(&d, 2.0, Method::Quadrature).unwrap();
        assert!((r - std::f64::consts::LN_2).abs() < 1e-8);
        let d2 = dist("exp", &[2.0], 1.0, 1.0, 1.0, 1.0);
        let r2 = renyi_entropy(&d2, 2.0, Method::Quadrature).unwrap();
        assert!((r2 - r + std::f64::consts::LN_2).abs() < 1e-6);
        assert!(renyi_entropy(&d, 1.0, Method::Quadrature).is_err());
    }

    #[test]
    fn order_statistic_basics() {
        let d = dist("weibull", &[1.0, 1.4], 2.0, 3.0, 0.8, 1.2);
        for &t in &[0.2, 0.7, 1.5] {
            assert_eq!(order_stat_pdf(&d, 1, 1, t).unwrap(), d.pdf(t));
            let max = 4.0 * d.pdf(t) * d.cdf(t).powi(3);
            assert!((order_stat_pdf(&d, 4, 4, t).unwrap() - max).abs() < 1e-13);
            let mix: f64 = (1..=5)
                .map(|i| order_stat_pdf(&d, i, 5, t).unwrap())
                .sum::<f64>()
                / 5.0;
            assert!((mix - d.pdf(t)).abs() < 1e-10);
            let series = order_stat_pdf_series(&d, 2, 3, t).unwrap();
            assert!((series - order_stat_pdf(&d, 2, 3, t).unwrap()).abs() < 1e-10);
        }
        assert!(order_stat_pdf(&d, 0, 3, 1.0).is_err());
        assert!(order_stat_pdf(&d, 4, 3, 1.0).is_err());
    }

    #[test]
    fn asymptotes_collapse_in_reduced_case() {
        let d = dist("weibull", &[1.0, 1.4], 1.0, 1.0, 1.0, 1.0);
        let g = d.baseline().pdf(0.3);
        assert!((asymptote_origin(&d, 0.3).pdf - g).abs() < 1e-15);
    }
}
