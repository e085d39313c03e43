//! Baseline lifetime distributions G that the generator transforms act on.
//!
//! Every family is evaluated through a single [`Baseline::eval`] call that
//! returns `ln g`, `ln Ḡ` and `G` computed directly (never as `1 - Ḡ` or the
//! log of a rounded density), which is what keeps the composed family
//! accurate in both tails.

use std::fmt;

use crate::error::{Error, Result};
use crate::special::{ln_one_minus_exp, one_minus_exp, scaled_log};

/// The auxiliary function `Z(t)` of the extended-Weibull baseline,
/// `G(t) = 1 - exp(-δ Z(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZFunction {
    /// `Z(t) = t`
    Linear,
    /// `Z(t) = t²`
    Square,
    /// `Z(t) = ln(t / k)` on `t > k`, with `k` a fixed threshold.
    LogRatio { k: f64 },
    /// `Z(t) = (e^{βt} - 1) / β`; `β` is a free parameter.
    GompertzLink,
}

impl ZFunction {
    fn id(&self) -> String {
        match self {
            ZFunction::Linear => "linear".into(),
            ZFunction::Square => "square".into(),
            ZFunction::LogRatio { k } if *k == 1.0 => "logratio".into(),
            ZFunction::LogRatio { k } => format!("logratio@{k}"),
            ZFunction::GompertzLink => "gompertz".into(),
        }
    }

    /// `Z(t)` and `ln z(t)`.
    fn eval(&self, t: f64, link: f64) -> (f64, f64) {
        match *self {
            ZFunction::Linear => (t, 0.0),
            ZFunction::Square => (t * t, (2.0 * t).ln()),
            ZFunction::LogRatio { k } => ((t / k).ln(), -t.ln()),
            ZFunction::GompertzLink => ((link * t).exp_m1() / link, link * t),
        }
    }

    fn inverse(&self, z: f64, link: f64) -> f64 {
        match *self {
            ZFunction::Linear => z,
            ZFunction::Square => z.sqrt(),
            ZFunction::LogRatio { k } => k * z.exp(),
            ZFunction::GompertzLink => (link * z).ln_1p() / link,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineFamily {
    Exponential,
    Weibull,
    Lomax,
    Frechet,
    Gompertz,
    ExtendedWeibull(ZFunction),
    ModifiedWeibull,
    /// Exponentiated Pareto above the fixed threshold `t_min`.
    ExponentiatedPareto {
        t_min: f64,
    },
}

impl BaselineFamily {
    /// Parses the string ids used on the command line and in fit reports:
    /// `exp`, `weibull`, `lomax`, `frechet`, `gompertz`, `ew:<zkind>`, `mw`,
    /// `ep`. Fixed thresholds may be given as `ew:logratio@2.5` or `ep@1.5`.
    pub fn parse(id: &str) -> Result<Self> {
        let unknown = || Error::UnknownBaseline(id.to_string());
        let (head, threshold) = match id.split_once('@') {
            Some((h, v)) => (h, Some(v.parse::<f64>().map_err(|_| unknown())?)),
            None => (id, None),
        };
        if let Some(t) = threshold {
            if !(t.is_finite() && t > 0.0) {
                return Err(unknown());
            }
        }
        let family = match head {
            "exp" => BaselineFamily::Exponential,
            "weibull" => BaselineFamily::Weibull,
            "lomax" => BaselineFamily::Lomax,
            "frechet" => BaselineFamily::Frechet,
            "gompertz" => BaselineFamily::Gompertz,
            "mw" => BaselineFamily::ModifiedWeibull,
            "ep" => BaselineFamily::ExponentiatedPareto {
                t_min: threshold.unwrap_or(1.0),
            },
            "ew:linear" => BaselineFamily::ExtendedWeibull(ZFunction::Linear),
            "ew:square" => BaselineFamily::ExtendedWeibull(ZFunction::Square),
            "ew:logratio" => BaselineFamily::ExtendedWeibull(ZFunction::LogRatio {
                k: threshold.unwrap_or(1.0),
            }),
            "ew:gompertz" => BaselineFamily::ExtendedWeibull(ZFunction::GompertzLink),
            _ => return Err(unknown()),
        };
        let takes_threshold = matches!(
            family,
            BaselineFamily::ExponentiatedPareto { .. }
                | BaselineFamily::ExtendedWeibull(ZFunction::LogRatio { .. })
        );
        if threshold.is_some() && !takes_threshold {
            return Err(unknown());
        }
        Ok(family)
    }

    pub fn id(&self) -> String {
        match self {
            BaselineFamily::Exponential => "exp".into(),
            BaselineFamily::Weibull => "weibull".into(),
            BaselineFamily::Lomax => "lomax".into(),
            BaselineFamily::Frechet => "frechet".into(),
            BaselineFamily::Gompertz => "gompertz".into(),
            BaselineFamily::ExtendedWeibull(z) => format!("ew:{}", z.id()),
            BaselineFamily::ModifiedWeibull => "mw".into(),
            BaselineFamily::ExponentiatedPareto { t_min } if *t_min == 1.0 => "ep".into(),
            BaselineFamily::ExponentiatedPareto { t_min } => format!("ep@{t_min}"),
        }
    }

    /// Names of the free parameters, in their fixed order.
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            BaselineFamily::Exponential => &["lambda"],
            BaselineFamily::Weibull => &["lambda", "beta"],
            BaselineFamily::Lomax => &["beta", "delta"],
            BaselineFamily::Frechet => &["lambda", "delta"],
            BaselineFamily::Gompertz => &["beta", "lambda"],
            BaselineFamily::ExtendedWeibull(ZFunction::GompertzLink) => &["delta", "beta"],
            BaselineFamily::ExtendedWeibull(_) => &["delta"],
            BaselineFamily::ModifiedWeibull => &["sigma", "beta", "gamma"],
            BaselineFamily::ExponentiatedPareto { .. } => &["k", "gamma"],
        }
    }

    pub fn n_params(&self) -> usize {
        self.param_names().len()
    }

    /// Indices of parameters that may be exactly zero (Modified Weibull's
    /// σ and β, though not both).
    pub fn zero_allowed(&self, index: usize) -> bool {
        matches!(self, BaselineFamily::ModifiedWeibull) && index < 2
    }

    /// All eight families with their default thresholds.
    pub fn all() -> Vec<BaselineFamily> {
        vec![
            BaselineFamily::Exponential,
            BaselineFamily::Weibull,
            BaselineFamily::Lomax,
            BaselineFamily::Frechet,
            BaselineFamily::Gompertz,
            BaselineFamily::ExtendedWeibull(ZFunction::Linear),
            BaselineFamily::ExtendedWeibull(ZFunction::Square),
            BaselineFamily::ExtendedWeibull(ZFunction::LogRatio { k: 1.0 }),
            BaselineFamily::ExtendedWeibull(ZFunction::GompertzLink),
            BaselineFamily::ModifiedWeibull,
            BaselineFamily::ExponentiatedPareto { t_min: 1.0 },
        ]
    }
}

impl fmt::Display for BaselineFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
}

impl Support {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.lower && t <= self.upper
    }
}

/// `ln g(t)`, `ln Ḡ(t)`, `G(t)` and `ln G(t)` at one point. `ln_cdf` stays
/// finite where `cdf` underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselinePoint {
    pub ln_pdf: f64,
    pub ln_sf: f64,
    pub cdf: f64,
    pub ln_cdf: f64,
}

impl BaselinePoint {
    pub fn sf(&self) -> f64 {
        self.ln_sf.exp()
    }
}

/// A baseline distribution with validated parameters. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    family: BaselineFamily,
    params: Vec<f64>,
}

impl Baseline {
    pub fn new(family: BaselineFamily, params: &[f64]) -> Result<Self> {
        let names = family.param_names();
        if params.len() != names.len() {
            return Err(Error::InvalidParameter {
                name: family.id(),
                value: params.len() as f64,
                reason: "wrong number of parameters",
            });
        }
        for (i, (&v, &name)) in params.iter().zip(names).enumerate() {
            let ok = v.is_finite() && (v > 0.0 || (v == 0.0 && family.zero_allowed(i)));
            if !ok {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    value: v,
                    reason: "must be strictly positive",
                });
            }
        }
        if family == BaselineFamily::ModifiedWeibull && params[0] + params[1] <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "sigma + beta".into(),
                value: 0.0,
                reason: "sigma and beta cannot both be zero",
            });
        }
        Ok(Self {
            family,
            params: params.to_vec(),
        })
    }

    pub fn from_id(id: &str, params: &[f64]) -> Result<Self> {
        Self::new(BaselineFamily::parse(id)?, params)
    }

    pub fn family(&self) -> BaselineFamily {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        self.family.param_names()
    }

    pub fn with_params(&self, params: &[f64]) -> Result<Self> {
        Self::new(self.family, params)
    }

    pub fn support(&self) -> Support {
        let lower = match self.family {
            BaselineFamily::ExtendedWeibull(ZFunction::LogRatio { k }) => k,
            BaselineFamily::ExponentiatedPareto { t_min } => t_min,
            _ => 0.0,
        };
        Support {
            lower,
            upper: f64::INFINITY,
        }
    }

    /// Evaluates the baseline at `t`. Below the support the point carries
    /// `G = 0`, `Ḡ = 1` and a zero density.
    pub fn eval(&self, t: f64) -> BaselinePoint {
        let lower = self.support().lower;
        if t.is_nan() {
            return BaselinePoint {
                ln_pdf: f64::NAN,
                ln_sf: f64::NAN,
                cdf: f64::NAN,
                ln_cdf: f64::NAN,
            };
        }
        if t < lower {
            return BaselinePoint {
                ln_pdf: f64::NEG_INFINITY,
                ln_sf: 0.0,
                cdf: 0.0,
                ln_cdf: f64::NEG_INFINITY,
            };
        }
        if t == f64::INFINITY {
            return BaselinePoint {
                ln_pdf: f64::NEG_INFINITY,
                ln_sf: f64::NEG_INFINITY,
                cdf: 1.0,
                ln_cdf: 0.0,
            };
        }
        let p = &self.params;
        // cumulative-hazard families: Ḡ = exp(-H), g = h·exp(-H)
        let hazard = |cum: f64, ln_h: f64| BaselinePoint {
            ln_pdf: ln_h - cum,
            ln_sf: -cum,
            cdf: one_minus_exp(-cum),
            ln_cdf: ln_one_minus_exp(-cum),
        };
        // cdf-power families: G = exp(lnG)
        let from_ln_cdf = |ln_cdf: f64, ln_pdf: f64| BaselinePoint {
            ln_pdf,
            ln_sf: ln_one_minus_exp(ln_cdf),
            cdf: ln_cdf.exp(),
            ln_cdf,
        };
        let point = match self.family {
            BaselineFamily::Exponential => hazard(p[0] * t, p[0].ln()),
            BaselineFamily::Weibull => {
                let (lam, beta) = (p[0], p[1]);
                hazard(
                    lam * t.powf(beta),
                    lam.ln() + beta.ln() + scaled_log(beta - 1.0, t.ln()),
                )
            }
            BaselineFamily::Lomax => {
                let (beta, delta) = (p[0], p[1]);
                let l = (t / delta).ln_1p();
                hazard(beta * l, (beta / delta).ln() - l)
            }
            BaselineFamily::Frechet => {
                let (lam, delta) = (p[0], p[1]);
                if t == 0.0 {
                    BaselinePoint {
                        ln_pdf: f64::NEG_INFINITY,
                        ln_sf: 0.0,
                        cdf: 0.0,
                        ln_cdf: f64::NEG_INFINITY,
                    }
                } else {
                    let ln_cdf = -(delta / t).powf(lam);
                    let ln_pdf = lam.ln() + lam * delta.ln() - (lam + 1.0) * t.ln() + ln_cdf;
                    from_ln_cdf(ln_cdf, ln_pdf)
                }
            }
            BaselineFamily::Gompertz => {
                let (beta, lam) = (p[0], p[1]);
                hazard(beta / lam * (lam * t).exp_m1(), beta.ln() + lam * t)
            }
            BaselineFamily::ExtendedWeibull(z) => {
                let delta = p[0];
                let link = p.get(1).copied().unwrap_or(1.0);
                let (zt, ln_dz) = z.eval(t, link);
                hazard(delta * zt, delta.ln() + ln_dz)
            }
            BaselineFamily::ModifiedWeibull => {
                let (sigma, beta, gamma) = (p[0], p[1], p[2]);
                let tg = if beta > 0.0 { t.powf(gamma) } else { 0.0 };
                let rate = sigma
                    + if beta > 0.0 {
                        beta * gamma * (scaled_log(gamma - 1.0, t.ln())).exp()
                    } else {
                        0.0
                    };
                hazard(sigma * t + beta * tg, rate.ln())
            }
            BaselineFamily::ExponentiatedPareto { t_min } => {
                let (k, gamma) = (p[0], p[1]);
                let r = (t_min / t).powf(k);
                let ln_inner = (-r).ln_1p();
                let ln_pdf = gamma.ln() + k.ln() + k * t_min.ln() - (k + 1.0) * t.ln()
                    + scaled_log(gamma - 1.0, ln_inner);
                from_ln_cdf(gamma * ln_inner, ln_pdf)
            }
        };
        if point.ln_pdf.is_nan() {
            BaselinePoint {
                ln_pdf: f64::NEG_INFINITY,
                ..point
            }
        } else {
            point
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        self.eval(t).ln_pdf.exp()
    }

    pub fn ln_pdf(&self, t: f64) -> f64 {
        self.eval(t).ln_pdf
    }

    pub fn cdf(&self, t: f64) -> f64 {
        self.eval(t).cdf
    }

    pub fn sf(&self, t: f64) -> f64 {
        self.eval(t).sf()
    }

    pub fn ln_sf(&self, t: f64) -> f64 {
        self.eval(t).ln_sf
    }

    pub fn hazard(&self, t: f64) -> f64 {
        let p = self.eval(t);
        (p.ln_pdf - p.ln_sf).exp()
    }

    /// Quantile `G⁻¹(p)` for `p ∈ (0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level {p} not in (0, 1)")));
        }
        Ok(self.quantile_from_logs(p.ln(), (-p).ln_1p()))
    }

    /// The point `t` with `ln G(t) = ln_cdf` and `ln Ḡ(t) = ln_sf`.
    ///
    /// Both logs describe the same probability; callers pass both so that
    /// each family inverts whichever side is numerically exact in its tail.
    pub fn quantile_from_logs(&self, ln_cdf: f64, ln_sf: f64) -> f64 {
        let lower = self.support().lower;
        let cdf_side = matches!(
            self.family,
            BaselineFamily::Frechet | BaselineFamily::ExponentiatedPareto { .. }
        );
        let (at_lower, at_upper) = if cdf_side {
            (ln_cdf == f64::NEG_INFINITY, ln_cdf >= 0.0)
        } else {
            (ln_sf >= 0.0, ln_sf == f64::NEG_INFINITY)
        };
        if at_lower {
            return lower;
        }
        if at_upper {
            return f64::INFINITY;
        }
        let cum = -ln_sf;
        let p = &self.params;
        match self.family {
            BaselineFamily::Exponential => cum / p[0],
            BaselineFamily::Weibull => (cum / p[0]).powf(1.0 / p[1]),
            BaselineFamily::Lomax => p[1] * (cum / p[0]).exp_m1(),
            BaselineFamily::Frechet => p[1] * (-ln_cdf).powf(-1.0 / p[0]),
            BaselineFamily::Gompertz => (p[1] * cum / p[0]).ln_1p() / p[1],
            BaselineFamily::ExtendedWeibull(z) => {
                z.inverse(cum / p[0], p.get(1).copied().unwrap_or(1.0))
            }
            BaselineFamily::ModifiedWeibull => modified_weibull_root(p[0], p[1], p[2], cum),
            BaselineFamily::ExponentiatedPareto { t_min } => {
                let r = one_minus_exp(ln_cdf / p[1]);
                t_min * r.powf(-1.0 / p[0])
            }
        }
    }

    /// Analytic gradients of `ln g(t)` and `ln Ḡ(t)` with respect to the
    /// parameters, where implemented.
    pub fn param_gradient(&self, t: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let p = &self.params;
        match self.family {
            BaselineFamily::Exponential => Some((vec![1.0 / p[0] - t], vec![-t])),
            BaselineFamily::Weibull => {
                let (lam, beta) = (p[0], p[1]);
                let tb = t.powf(beta);
                let lt = t.ln();
                Some((
                    vec![1.0 / lam - tb, 1.0 / beta + lt - lam * tb * lt],
                    vec![-tb, -lam * tb * lt],
                ))
            }
            _ => None,
        }
    }
}

/// Solves `σt + βt^γ = cum` by safeguarded Newton iteration inside a
/// bisection bracket.
fn modified_weibull_root(sigma: f64, beta: f64, gamma: f64, cum: f64) -> f64 {
    if beta == 0.0 {
        return cum / sigma;
    }
    if sigma == 0.0 {
        return (cum / beta).powf(1.0 / gamma);
    }
    let h = |t: f64| sigma * t + beta * t.powf(gamma) - cum;
    let mut lo = 0.0;
    let mut hi = (cum / sigma).min((cum / beta).powf(1.0 / gamma));
    if !hi.is_finite() || hi <= 0.0 {
        hi = 1.0;
    }
    while h(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let v = h(t);
        if v == 0.0 {
            return t;
        }
        if v < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let slope = sigma + beta * gamma * t.powf(gamma - 1.0);
        let newton = t - v / slope;
        t = if newton > lo && newton < hi && slope.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo) <= 4.0 * f64::EPSILON * hi {
            break;
        }
        if (t - lo).min(hi - t) == 0.0 {
            break;
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn exponential_density_and_median() {
        let e = Baseline::from_id("exp", &[1.0]).unwrap();
        assert!((e.pdf(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((e.cdf(std::f64::consts::LN_2) - 0.5).abs() < 1e-15);
        let e2 = Baseline::from_id("exp", &[2.0]).unwrap();
        assert!((e2.quantile(0.5).unwrap() - 0.346_573_590_279_972_6).abs() < 1e-12);
    }

    #[test]
    fn weibull_shape_one_is_exponential() {
        let w = Baseline::from_id("weibull", &[1.0, 1.0]).unwrap();
        let e = Baseline::from_id("exp", &[1.0]).unwrap();
        for &t in &[0.0, 0.1, 1.0, 3.7] {
            assert!((w.pdf(t) - e.pdf(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn lomax_density_matches_numeric_derivative_of_cdf() {
        let l = Baseline::from_id("lomax", &[2.0, 1.0]).unwrap();
        assert!((l.pdf(1.0) - 0.25).abs() < 1e-15);
        let h = 1e-5;
        let numeric = (l.cdf(1.0 + h) - l.cdf(1.0 - h)) / (2.0 * h);
        assert!((numeric - 0.25).abs() < 1e-9);
    }

    #[test]
    fn frechet_at_scale_point() {
        let f = Baseline::from_id("frechet", &[1.0, 1.0]).unwrap();
        assert!((f.cdf(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(f.cdf(0.0), 0.0);
        assert_eq!(f.pdf(0.0), 0.0);
    }

    #[test]
    fn modified_weibull_degenerate_and_root() {
        let mw = Baseline::from_id("mw", &[1.0, 0.0, 1.0]).unwrap();
        assert!((mw.cdf(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);

        let mw = Baseline::from_id("mw", &[1.0, 1.0, 2.0]).unwrap();
        let t = mw.quantile(0.5).unwrap();
        // bisection oracle on σt + βt^γ = ln 2
        let (mut lo, mut hi) = (0.0f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid + mid * mid < std::f64::consts::LN_2 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(rel(t, lo) < 1e-12, "{t} vs {lo}");
        assert!(Baseline::from_id("mw", &[0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn gompertz_quantile_at_unit_time() {
        let g = Baseline::from_id("gompertz", &[1.0, 1.0]).unwrap();
        let e = std::f64::consts::E;
        let p = 1.0 - (-(e - 1.0)).exp();
        assert!(rel(g.quantile(p).unwrap(), 1.0) < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters_and_levels() {
        assert!(Baseline::from_id("weibull", &[1.0]).is_err());
        assert!(Baseline::from_id("weibull", &[1.0, -2.0]).is_err());
        assert!(Baseline::from_id("nope", &[1.0]).is_err());
        assert!(BaselineFamily::parse("weibull@2").is_err());
        let e = Baseline::from_id("exp", &[1.0]).unwrap();
        assert!(e.quantile(0.0).is_err());
        assert!(e.quantile(1.0).is_err());
    }

    #[test]
    fn ids_round_trip() {
        for fam in BaselineFamily::all() {
            assert_eq!(BaselineFamily::parse(&fam.id()).unwrap(), fam);
        }
        assert_eq!(
            BaselineFamily::parse("ep@2.5").unwrap(),
            BaselineFamily::ExponentiatedPareto { t_min: 2.5 }
        );
    }

    #[test]
    fn below_support_is_limiting() {
        let ep = Baseline::from_id("ep", &[2.0, 1.5]).unwrap();
        assert_eq!(ep.cdf(0.5), 0.0);
        assert_eq!(ep.sf(0.5), 1.0);
        assert_eq!(ep.pdf(0.5), 0.0);
    }

    #[test]
    fn extended_weibull_particular_cases() {
        let lin = Baseline::from_id("ew:linear", &[1.7]).unwrap();
        let exp = Baseline::from_id("exp", &[1.7]).unwrap();
        let sq = Baseline::from_id("ew:square", &[0.8]).unwrap();
        let ray = Baseline::from_id("weibull", &[0.8, 2.0]).unwrap();
        for i in 1..100 {
            let t = i as f64 * 0.05;
            assert!((lin.pdf(t) - exp.pdf(t)).abs() < 1e-12);
            assert!((lin.cdf(t) - exp.cdf(t)).abs() < 1e-12);
            assert!((sq.pdf(t) - ray.pdf(t)).abs() < 1e-12);
            assert!((sq.cdf(t) - ray.cdf(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_gradients_match_differences() {
        for (id, p) in [("exp", vec![1.3]), ("weibull", vec![0.7, 2.2])] {
            let b = Baseline::from_id(id, &p).unwrap();
            let t = 1.4;
            let (gl, gs) = b.param_gradient(t).unwrap();
            for j in 0..p.len() {
                let h = 1e-6 * p[j];
                let mut up = p.clone();
                let mut dn = p.clone();
                up[j] += h;
                dn[j] -= h;
                let bu = b.with_params(&up).unwrap();
                let bd = b.with_params(&dn).unwrap();
                let nl = (bu.ln_pdf(t) - bd.ln_pdf(t)) / (2.0 * h);
                let ns = (bu.ln_sf(t) - bd.ln_sf(t)) / (2.0 * h);
                assert!((nl - gl[j]).abs() < 1e-6, "{id} {j}");
                assert!((ns - gs[j]).abs() < 1e-6, "{id} {j}");
            }
        }
    }
}
