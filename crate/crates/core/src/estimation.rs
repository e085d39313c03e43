//! Maximum-likelihood fitting.
//!
//! Parameters are laid out as `(θ, α, a, b, β₁, …, β_q)`. Reduced families
//! fix some of the four generator parameters at 1 and expose only the free
//! ones, in the same relative order.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::baseline::{Baseline, BaselineFamily};
use crate::error::{Error, Result};
use crate::family::{FamilyParams, KwGMODistribution};
use crate::optimize::{bfgs, nelder_mead, BfgsOptions, Minimum, SimplexOptions};
use crate::par::{self, Execution};
use crate::rng::UniformStream;
use crate::special::normal_critical;

pub const GENERATOR_NAMES: [&str; 4] = ["theta", "alpha", "a", "b"];

/// Box on α and θ during optimization.
pub const SHAPE_BOX: (f64, f64) = (1e-6, 1e6);
/// Box on every other parameter.
pub const OTHER_BOX: (f64, f64) = (1e-10, 1e10);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    KwGmo,
    Gmo,
    Kw,
    BaselineOnly,
}

impl ModelFamily {
    /// Indices into `(θ, α, a, b)` that are free.
    pub fn free_generators(&self) -> &'static [usize] {
        match self {
            ModelFamily::KwGmo => &[0, 1, 2, 3],
            ModelFamily::Gmo => &[0, 1],
            ModelFamily::Kw => &[2, 3],
            ModelFamily::BaselineOnly => &[],
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            ModelFamily::KwGmo => "kwgmo",
            ModelFamily::Gmo => "gmo",
            ModelFamily::Kw => "kw",
            ModelFamily::BaselineOnly => "baseline",
        }
    }
}

/// A family/baseline combination, e.g. `kwgmo:weibull`, `gmo:exp`,
/// `kw:lomax`, or a bare baseline id (`weibull`, `baseline:weibull`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub baseline: BaselineFamily,
}

impl ModelSpec {
    pub fn new(family: ModelFamily, baseline: BaselineFamily) -> Self {
        Self { family, baseline }
    }

    pub fn parse(id: &str) -> Result<Self> {
        let (family, rest) = match id.split_once(':') {
            Some(("kwgmo", rest)) => (ModelFamily::KwGmo, rest),
            Some(("gmo", rest)) => (ModelFamily::Gmo, rest),
            Some(("kw", rest)) => (ModelFamily::Kw, rest),
            Some(("baseline", rest)) => (ModelFamily::BaselineOnly, rest),
            _ => (ModelFamily::BaselineOnly, id),
        };
        let baseline = BaselineFamily::parse(rest).map_err(|_| Error::UnknownFamily(id.into()))?;
        Ok(Self { family, baseline })
    }

    pub fn id(&self) -> String {
        match self.family {
            ModelFamily::BaselineOnly => self.baseline.id(),
            f => format!("{}:{}", f.id(), self.baseline.id()),
        }
    }

    /// Names of the free parameters in layout order.
    pub fn param_names(&self) -> Vec<String> {
        self.family
            .free_generators()
            .iter()
            .map(|&i| GENERATOR_NAMES[i].to_string())
            .chain(self.baseline.param_names().iter().map(|s| s.to_string()))
            .collect()
    }

    /// Number of free parameters.
    pub fn k(&self) -> usize {
        self.family.free_generators().len() + self.baseline.n_params()
    }

    /// Expands free parameters to the full `(θ, α, a, b, β…)` vector.
    pub fn full_params(&self, free: &[f64]) -> Result<ParameterVector> {
        if free.len() != self.k() {
            return Err(Error::Domain(format!(
                "{} expects {} parameters, got {}",
                self.id(),
                self.k(),
                free.len()
            )));
        }
        let gens = self.family.free_generators();
        let mut g = [1.0; 4];
        for (slot, &i) in gens.iter().enumerate() {
            g[i] = free[slot];
        }
        Ok(ParameterVector {
            theta: g[0],
            alpha: g[1],
            a: g[2],
            b: g[3],
            baseline: free[gens.len()..].to_vec(),
        })
    }

    pub fn free_params(&self, full: &ParameterVector) -> Vec<f64> {
        let g = [full.theta, full.alpha, full.a, full.b];
        self.family
            .free_generators()
            .iter()
            .map(|&i| g[i])
            .chain(full.baseline.iter().copied())
            .collect()
    }

    pub fn distribution(&self, free: &[f64]) -> Result<KwGMODistribution> {
        self.full_params(free)?.distribution(self.baseline)
    }

    /// Optimization box for free parameter `j`.
    fn bounds(&self, j: usize) -> (f64, f64) {
        let gens = self.family.free_generators();
        if j < gens.len() && gens[j] <= 1 {
            SHAPE_BOX
        } else {
            OTHER_BOX
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// The full parameter vector `(θ, α, a, b, β…)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    pub theta: f64,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub baseline: Vec<f64>,
}

impl ParameterVector {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.theta, self.alpha, self.a, self.b];
        v.extend_from_slice(&self.baseline);
        v
    }

    pub fn family_params(&self) -> Result<FamilyParams> {
        FamilyParams::new(self.a, self.b, self.alpha, self.theta)
    }

    pub fn distribution(&self, baseline: BaselineFamily) -> Result<KwGMODistribution> {
        Ok(KwGMODistribution::new(
            Baseline::new(baseline, &self.baseline)?,
            self.family_params()?,
        ))
    }
}

/// Sum of log-densities; `-∞` for invalid parameters or data outside the
/// support, so optimizers can retreat.
pub fn log_likelihood(spec: &ModelSpec, params: &[f64], data: &[f64]) -> f64 {
    let Ok(dist) = spec.distribution(params) else {
        return f64::NEG_INFINITY;
    };
    let mut total = 0.0;
    for &t in data {
        let l = dist.log_pdf(t);
        if l.is_nan() || l == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        total += l;
    }
    total
}

/// The log-likelihood assembled term by term from its sums over `ln g`,
/// `ln Ḡ` and the three brackets, using the survival `Ḡ` directly. Used to
/// cross-check [`log_likelihood`].
pub fn log_likelihood_expanded(spec: &ModelSpec, params: &[f64], data: &[f64]) -> f64 {
    let Ok(full) = spec.full_params(params) else {
        return f64::NEG_INFINITY;
    };
    let Ok(base) = Baseline::new(spec.baseline, &full.baseline) else {
        return f64::NEG_INFINITY;
    };
    let ParameterVector {
        theta, alpha, a, b, ..
    } = full;
    let alpha_bar = 1.0 - alpha;
    let n = data.len() as f64;
    let mut sum_ln_g = 0.0;
    let mut sum_ln_sf = 0.0;
    let mut sum_ln_den = 0.0;
    let mut sum_ln_1mw = 0.0;
    let mut sum_ln_1mv = 0.0;
    for &t in data {
        let s = base.sf(t);
        let u = alpha * s / (1.0 - alpha_bar * s);
        let w = u.powf(theta);
        sum_ln_g += base.ln_pdf(t);
        sum_ln_sf += s.ln();
        sum_ln_den += (-alpha_bar * s).ln_1p();
        sum_ln_1mw += (-w).ln_1p();
        sum_ln_1mv += (-(1.0 - w).powf(a)).ln_1p();
    }
    n * (a * b).ln()
        + n * theta.ln()
        + n * theta * alpha.ln()
        + sum_ln_g
        + (theta - 1.0) * sum_ln_sf
        - (theta + 1.0) * sum_ln_den
        + (a - 1.0) * sum_ln_1mw
        + (b - 1.0) * sum_ln_1mv
}

/// Per-observation derivative of `ln f` along `L = ln Ḡ` and the
/// generator partials `(θ, α, a, b)`.
struct ObservationScore {
    generators: [f64; 4],
    d_ln_sf: f64,
}

fn observation_score(dist: &KwGMODistribution, t: f64) -> ObservationScore {
    let FamilyParams { a, b, alpha, theta } = dist.params();
    let alpha_bar = 1.0 - alpha;
    let e = dist.eval(t);
    let lu = e.ln_u;
    let ln_w = theta * lu;
    let m = e.ln_1mw;
    let ln_v = a * m;
    let s = e.base.ln_sf.exp();
    let g = e.base.cdf;
    let den = e.ln_den.exp();

    // K = ∂/∂(ln u) of the two bracket terms, divided by θ
    let w_ratio = (ln_w - m).exp();
    let v_term = ((a - 1.0) * m + ln_w - e.ln_1mv).exp();
    let k = -(a - 1.0) * w_ratio + (b - 1.0) * a * v_term;

    let rho = g / (alpha * den);
    let u_theta = 1.0 / theta + lu + lu * k;
    let u_alpha = theta / alpha - (theta + 1.0) * s / den + theta * rho * k;
    let u_a = 1.0 / a + m - (b - 1.0) * (ln_v - e.ln_1mv).exp() * m;
    let u_b = 1.0 / b + e.ln_1mv;
    let d_ln_sf = (theta - 1.0) + (theta + 1.0) * alpha_bar * s / den + theta * k / den;
    ObservationScore {
        generators: [u_theta, u_alpha, u_a, u_b],
        d_ln_sf,
    }
}

/// Gradients of `ln g(t)` and `ln Ḡ(t)` in the baseline parameters,
/// analytic where available and central differences otherwise.
fn baseline_gradient(base: &Baseline, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(g) = base.param_gradient(t) {
        return Ok(g);
    }
    let p = base.params();
    let mut d_pdf = Vec::with_capacity(p.len());
    let mut d_sf = Vec::with_capacity(p.len());
    for j in 0..p.len() {
        let h = 1e-6 * p[j].abs().max(1e-8);
        let mut up = p.to_vec();
        let mut dn = p.to_vec();
        up[j] += h;
        dn[j] -= h;
        let bu = base.with_params(&up)?;
        let bd = base.with_params(&dn)?;
        let (pu, pd) = (bu.eval(t), bd.eval(t));
        d_pdf.push((pu.ln_pdf - pd.ln_pdf) / (2.0 * h));
        d_sf.push((pu.ln_sf - pd.ln_sf) / (2.0 * h));
    }
    Ok((d_pdf, d_sf))
}

/// Score vector over the free parameters.
pub fn score(spec: &ModelSpec, params: &[f64], data: &[f64]) -> Result<Vec<f64>> {
    let full = spec.full_params(params)?;
    for (name, &v) in spec.param_names().iter().zip(params) {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: name.clone(),
                value: v,
                reason: "score needs an interior point",
            });
        }
    }
    let dist = full.distribution(spec.baseline)?;
    let q = full.baseline.len();
    let mut total = vec![0.0; 4 + q];
    for &t in data {
        let obs = observation_score(&dist, t);
        for (acc, g) in total.iter_mut().zip(obs.generators) {
            *acc += g;
        }
        let (d_pdf, d_sf) = baseline_gradient(dist.baseline(), t)?;
        for j in 0..q {
            total[4 + j] += d_pdf[j] + obs.d_ln_sf * d_sf[j];
        }
    }
    let gens = spec.family.free_generators();
    Ok(gens
        .iter()
        .map(|&i| total[i])
        .chain(total[4..].iter().copied())
        .collect())
}

/// Analytic second derivatives `∂²ℓ/∂θ²`, `∂²ℓ/∂α²`, `∂²ℓ/∂a²`, `∂²ℓ/∂b²`.
/// They do not involve the baseline parameters.
pub fn generator_curvature(spec: &ModelSpec, params: &[f64], data: &[f64]) -> Result<[f64; 4]> {
    let dist = spec.distribution(params)?;
    let FamilyParams { a, b, alpha, theta } = dist.params();
    let n = data.len() as f64;
    let mut out = [
        -n / (theta * theta),
        -n * theta / (alpha * alpha),
        -n / (a * a),
        -n / (b * b),
    ];
    for &t in data {
        let e = dist.eval(t);
        let lu = e.ln_u;
        let ln_w = theta * lu;
        let m = e.ln_1mw;
        let ln_1mv = e.ln_1mv;
        let s = e.base.ln_sf.exp();
        let g = e.base.cdf;
        let den = e.ln_den.exp();

        let k =
            -(a - 1.0) * (ln_w - m).exp() + (b - 1.0) * a * ((a - 1.0) * m + ln_w - ln_1mv).exp();
        // derivative of K with respect to ln u
        let dk = theta
            * (-(a - 1.0) * (ln_w - 2.0 * m).exp()
                + (b - 1.0)
                    * a
                    * ((ln_w + (a - 2.0) * m - ln_1mv).exp() * (1.0 - a * ln_w.exp())
                        - a * (2.0 * ln_w + (2.0 * a - 2.0) * m - 2.0 * ln_1mv).exp()));

        out[0] += lu * lu * dk / theta;

        let rho = g / (alpha * den);
        let d_rho = -g * (2.0 * alpha * s + g) / (alpha * alpha * den * den);
        out[1] += (theta + 1.0) * s * s / (den * den) + theta * (d_rho * k + rho * rho * dk);

        out[2] -= (b - 1.0) * m * m * (a * m - 2.0 * ln_1mv).exp();
    }
    Ok(out)
}

/// Observed information (negative Hessian) on the original scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Information {
    pub matrix: DMatrix<f64>,
    pub vcov: DMatrix<f64>,
    /// Set when eigenvalues had to be clipped to invert.
    pub degenerate: bool,
}

fn hessian_step(x: f64) -> f64 {
    (1e-4 * x.abs()).max(1e-6).min(0.5 * x.abs())
}

/// Central-difference observed information at `params`, with its
/// eigenvalue-clipped pseudo-inverse.
pub fn observed_information(spec: &ModelSpec, params: &[f64], data: &[f64]) -> Result<Information> {
    let k = params.len();
    if k != spec.k() {
        return Err(Error::Domain(format!("expected {} parameters", spec.k())));
    }
    let f = |x: &[f64]| log_likelihood(spec, x, data);
    let f0 = f(params);
    if !f0.is_finite() {
        return Err(Error::Domain(
            "log-likelihood is not finite at the requested point".into(),
        ));
    }
    let h: Vec<f64> = params.iter().map(|&x| hessian_step(x)).collect();
    let shifted = |moves: &[(usize, f64)]| {
        let mut x = params.to_vec();
        for &(j, d) in moves {
            x[j] += d;
        }
        f(&x)
    };
    let mut hess = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        let up = shifted(&[(i, h[i])]);
        let dn = shifted(&[(i, -h[i])]);
        hess[(i, i)] = (up - 2.0 * f0 + dn) / (h[i] * h[i]);
        for j in 0..i {
            let pp = shifted(&[(i, h[i]), (j, h[j])]);
            let pm = shifted(&[(i, h[i]), (j, -h[j])]);
            let mp = shifted(&[(i, -h[i]), (j, h[j])]);
            let mm = shifted(&[(i, -h[i]), (j, -h[j])]);
            let v = (pp - pm - mp + mm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let info = -(&hess + hess.transpose()) * 0.5;
    if info.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite Hessian entry".into()));
    }
    let (vcov, degenerate) = pseudo_inverse(&info);
    Ok(Information {
        matrix: info,
        vcov,
        degenerate,
    })
}

fn pseudo_inverse(m: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let k = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let max = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let threshold = 1e-10 * max;
    let mut degenerate = false;
    let mut out = DMatrix::<f64>::zeros(k, k);
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= threshold {
            degenerate = true;
            continue;
        }
        let v = eig.eigenvectors.column(idx);
        out += (v * v.transpose()) / lambda;
    }
    let sym = (&out + out.transpose()) * 0.5;
    (sym, degenerate)
}

/// Wald intervals `estimate ± z·se` on the original scale.
pub fn confidence_intervals(estimates: &[f64], se: &[f64], level: f64) -> Result<Vec<(f64, f64)>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!(
            "confidence level {level} not in (0, 1)"
        )));
    }
    let z = normal_critical(level);
    Ok(estimates
        .iter()
        .zip(se)
        .map(|(e, s)| (e - z * s, e + z * s))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationCriteria {
    pub aic: f64,
    pub bic: f64,
    pub caic: f64,
    pub hqic: f64,
}

pub fn information_criteria(loglik: f64, k: usize, n: usize) -> Result<InformationCriteria> {
    if n <= k + 1 {
        return Err(Error::Domain(format!(
            "need n > k + 1 for the corrected AIC (n = {n}, k = {k})"
        )));
    }
    let kf = k as f64;
    let nf = n as f64;
    let aic = 2.0 * kf - 2.0 * loglik;
    Ok(InformationCriteria {
        aic,
        bic: kf * nf.ln() - 2.0 * loglik,
        caic: aic + 2.0 * kf * (kf + 1.0) / (nf - kf - 1.0),
        hqic: 2.0 * kf * nf.ln().ln() - 2.0 * loglik,
    })
}

/// Name → value pairs serialized as a JSON object in insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Named<T>(pub Vec<(String, T)>);

impl<T> Named<T> {
    pub fn get(&self, name: &str) -> Option<&T> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.0.iter().map(|(_, v)| v)
    }
}

impl<T: Serialize> Serialize for Named<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Named<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct OrderedVisitor<T>(std::marker::PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for OrderedVisitor<T> {
            type Value = Named<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map of parameter names")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = access.next_entry()? {
                    out.push((k, v));
                }
                Ok(Named(out))
            }
        }
        deserializer.deserialize_map(OrderedVisitor(std::marker::PhantomData))
    }
}

/// Outcome of [`fit_mle`]. The leading fields, in order, form the stable
/// JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub estimates: Named<f64>,
    pub se: Named<f64>,
    pub ci: Named<[f64; 2]>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub caic: f64,
    pub hqic: f64,
    pub converged: bool,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub model: String,
    pub level: f64,
    pub vcov: Vec<Vec<f64>>,
    pub vcov_degenerate: bool,
    pub n_starts: usize,
    pub best_start_index: usize,
    /// Largest `|x_j ∂ℓ/∂x_j| / n` at the estimate.
    pub max_scaled_score: f64,
}

impl FitResult {
    pub fn estimate_values(&self) -> Vec<f64> {
        self.estimates.values().copied().collect()
    }

    pub fn spec(&self) -> Result<ModelSpec> {
        ModelSpec::parse(&self.model)
    }
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub starts: usize,
    pub seed: u64,
    pub level: f64,
    pub exec: Execution,
    pub simplex: SimplexOptions,
    /// Overrides the baseline-only anchor with explicit free parameters.
    pub initial: Option<Vec<f64>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            starts: 20,
            seed: 0,
            level: 0.95,
            exec: Execution::default(),
            simplex: SimplexOptions::default(),
            initial: None,
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len().max(2) - 1) as f64).sqrt()
}

/// Moment-style starting values for the baseline parameters.
fn baseline_start(family: BaselineFamily, data: &[f64]) -> Vec<f64> {
    use crate::baseline::ZFunction;
    let m = mean(data);
    let logs: Vec<f64> = data.iter().map(|t| t.ln()).collect();
    let slog = sd(&logs).max(1e-3);
    let shape = std::f64::consts::PI / (slog * 6f64.sqrt());
    let safe = |v: f64| if v.is_finite() && v > 0.0 { v } else { 1.0 };
    let start = match family {
        BaselineFamily::Exponential => vec![1.0 / m],
        BaselineFamily::Weibull => {
            let mb = mean(&data.iter().map(|t| t.powf(shape)).collect::<Vec<_>>());
            vec![1.0 / mb, shape]
        }
        BaselineFamily::Lomax => vec![3.0, 2.0 * m],
        BaselineFamily::Frechet => vec![shape, (mean(&logs) - 0.577_215_664_9 / shape).exp()],
        BaselineFamily::Gompertz => vec![1.0 / m, 1.0 / m],
        BaselineFamily::ExtendedWeibull(z) => match z {
            ZFunction::Linear => vec![1.0 / m],
            ZFunction::Square => vec![1.0 / mean(&data.iter().map(|t| t * t).collect::<Vec<_>>())],
            ZFunction::LogRatio { k } => {
                vec![1.0 / mean(&data.iter().map(|t| (t / k).ln()).collect::<Vec<_>>())]
            }
            ZFunction::GompertzLink => {
                let beta = 1.0 / m;
                let z = mean(
                    &data
                        .iter()
                        .map(|t| (beta * t).exp_m1() / beta)
                        .collect::<Vec<_>>(),
                );
                vec![1.0 / z, beta]
            }
        },
        BaselineFamily::ModifiedWeibull => vec![0.5 / m, 0.5 / m, 1.0],
        BaselineFamily::ExponentiatedPareto { t_min } => {
            vec![
                1.0 / mean(&data.iter().map(|t| (t / t_min).ln()).collect::<Vec<_>>()),
                1.0,
            ]
        }
    };
    start.into_iter().map(safe).collect()
}

/// Negative log-likelihood over log-parameters, `+∞` outside the box.
fn objective(spec: &ModelSpec, data: &[f64], y: &[f64]) -> f64 {
    let mut x = Vec::with_capacity(y.len());
    for (j, &yj) in y.iter().enumerate() {
        let v = yj.exp();
        let (lo, hi) = spec.bounds(j);
        if !(v >= lo && v <= hi) {
            return f64::INFINITY;
        }
        x.push(v);
    }
    -log_likelihood(spec, &x, data)
}

fn check_data(spec: &ModelSpec, data: &[f64]) -> Result<()> {
    let k = spec.k();
    if data.len() < k + 2 {
        return Err(Error::Domain(format!(
            "{} needs at least {} observations, got {}",
            spec.id(),
            k + 2,
            data.len()
        )));
    }
    let lower = Baseline::new(spec.baseline, &baseline_start(spec.baseline, &[2.0, 3.0]))?
        .support()
        .lower;
    if let Some(bad) = data.iter().find(|&&t| !(t.is_finite() && t > lower)) {
        return Err(Error::Domain(format!(
            "observation {bad} lies outside the support (t > {lower})"
        )));
    }
    Ok(())
}

/// Runs one start: simplex, then a simplex restart from its best vertex.
fn run_start(spec: &ModelSpec, data: &[f64], y0: &[f64], opts: SimplexOptions) -> Minimum {
    let f = |y: &[f64]| objective(spec, data, y);
    let first = nelder_mead(f, y0, opts);
    let second = nelder_mead(
        f,
        &first.x,
        SimplexOptions {
            initial_step: 0.1,
            ..opts
        },
    );
    let evaluations = first.evaluations + second.evaluations;
    let best = if second.value <= first.value {
        second
    } else {
        first
    };
    Minimum {
        evaluations,
        ..best
    }
}

/// Multi-start maximum-likelihood fit.
pub fn fit_mle(spec: &ModelSpec, data: &[f64], options: &FitOptions) -> Result<FitResult> {
    check_data(spec, data)?;
    if options.starts == 0 {
        return Err(Error::Domain("at least one start is required".into()));
    }
    let n_gen = spec.family.free_generators().len();

    let anchor: Vec<f64> = match &options.initial {
        Some(init) => {
            spec.full_params(init)?;
            init.iter().map(|v| v.ln()).collect()
        }
        None => {
            // stage 0: the baseline on its own
            let base_spec = ModelSpec::new(ModelFamily::BaselineOnly, spec.baseline);
            let y0: Vec<f64> = baseline_start(spec.baseline, data)
                .iter()
                .map(|v| v.ln())
                .collect();
            let base_fit = run_start(&base_spec, data, &y0, options.simplex);
            let base_y = if base_fit.value.is_finite() {
                base_fit.x
            } else {
                y0
            };
            std::iter::repeat_n(0.0, n_gen).chain(base_y).collect()
        }
    };

    let starts: Vec<Minimum> = par::map_indices(options.exec, options.starts, |i| {
        let mut y = anchor.clone();
        if i > 0 {
            let mut stream = UniformStream::substream(options.seed, i as u64);
            for v in &mut y {
                *v += stream.next_range(-0.5, 0.5);
            }
        }
        run_start(spec, data, &y, options.simplex)
    });

    let (best_index, best) = starts
        .iter()
        .enumerate()
        .filter(|(_, m)| m.value.is_finite())
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .ok_or(Error::AllStartsFailed)?;

    let f = |y: &[f64]| objective(spec, data, y);
    let grad = |y: &[f64]| {
        let x: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        match score(spec, &x, data) {
            Ok(s) => s.iter().zip(&x).map(|(g, xi)| -g * xi).collect(),
            Err(_) => vec![f64::NAN; y.len()],
        }
    };
    let polished = bfgs(f, grad, &best.x, BfgsOptions::default());
    let y_hat = if polished.value < best.value {
        polished.x
    } else {
        best.x.clone()
    };

    let estimates: Vec<f64> = y_hat.iter().map(|v| v.exp()).collect();
    let loglik = log_likelihood(spec, &estimates, data);
    let n = data.len();
    let scaled_score = score(spec, &estimates, data)?
        .iter()
        .zip(&estimates)
        .map(|(g, x)| (g * x).abs() / n as f64)
        .fold(0.0, f64::max);
    let near_edge = y_hat.iter().enumerate().any(|(j, y)| {
        let (lo, hi) = spec.bounds(j);
        y - lo.ln() < 1e-2 || hi.ln() - y < 1e-2
    });
    let converged = best.converged && scaled_score < 1e-3 && !near_edge;

    let names = spec.param_names();
    let (vcov, degenerate) = match observed_information(spec, &estimates, data) {
        Ok(info) => (info.vcov, info.degenerate),
        Err(_) => (DMatrix::from_element(spec.k(), spec.k(), f64::NAN), true),
    };
    let se: Vec<f64> = (0..spec.k())
        .map(|j| vcov[(j, j)].max(0.0).sqrt())
        .collect();
    let ci = confidence_intervals(&estimates, &se, options.level)?;
    let ic = information_criteria(loglik, spec.k(), n)?;

    let zip_names = |vals: &[f64]| Named(names.iter().cloned().zip(vals.iter().copied()).collect());
    Ok(FitResult {
        estimates: zip_names(&estimates),
        se: zip_names(&se),
        ci: Named(
            names
                .iter()
                .cloned()
                .zip(ci.iter().map(|&(lo, hi)| [lo, hi]))
                .collect(),
        ),
        loglik,
        aic: ic.aic,
        bic: ic.bic,
        caic: ic.caic,
        hqic: ic.hqic,
        converged,
        n,
        k: spec.k(),
        seed: options.seed,
        model: spec.id(),
        level: options.level,
        vcov: vcov
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect(),
        vcov_degenerate: degenerate,
        n_starts: options.starts,
        best_start_index: best_index,
        max_scaled_score: scaled_score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric_gradient(spec: &ModelSpec, x: &[f64], data: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|j| {
                let h = 1e-6 * x[j];
                let mut up = x.to_vec();
                let mut dn = x.to_vec();
                up[j] += h;
                dn[j] -= h;
                (log_likelihood(spec, &up, data) - log_likelihood(spec, &dn, data)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn spec_parsing_and_counts() {
        let s = ModelSpec::parse("kwgmo:weibull").unwrap();
        assert_eq!(s.k(), 6);
        assert_eq!(
            s.param_names(),
            vec!["theta", "alpha", "a", "b", "lambda", "beta"]
        );
        assert_eq!(ModelSpec::parse("gmo:exp").unwrap().k(), 3);
        assert_eq!(ModelSpec::parse("kw:exp").unwrap().k(), 3);
        assert_eq!(ModelSpec::parse("kwgmo:exp").unwrap().k(), 5);
        let b = ModelSpec::parse("weibull").unwrap();
        assert_eq!(b.family, ModelFamily::BaselineOnly);
        assert_eq!(ModelSpec::parse("kwgmo:ew:linear").unwrap().k(), 5);
        assert_eq!(ModelSpec::parse("ew:square").unwrap().k(), 1);
        assert!(ModelSpec::parse("kwgmo:nope").is_err());
        for id in [
            "kwgmo:weibull",
            "gmo:exp",
            "kw:lomax",
            "weibull",
            "kwgmo:ep@2",
        ] {
            assert_eq!(ModelSpec::parse(id).unwrap().id(), id);
        }
    }

    #[test]
    fn reduced_exponential_loglik() {
        let spec = ModelSpec::parse("kwgmo:exp").unwrap();
        let data = [1.0, 2.0, 3.0];
        let l = log_likelihood(&spec, &[1.0, 1.0, 1.0, 1.0, 1.0], &data);
        assert!((l + 6.0).abs() < 1e-12);
        let lam = 0.4;
        let l = log_likelihood(&spec, &[1.0, 1.0, 1.0, 1.0, lam], &data);
        assert!((l - (3.0 * f64::ln(lam) - 6.0 * lam)).abs() < 1e-12);
        assert_eq!(
            log_likelihood(&spec, &[1.0, 1.0, 1.0, 1.0, 1.0], &[-1.0]),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn expanded_form_agrees() {
        let spec = ModelSpec::parse("kwgmo:weibull").unwrap();
        let data = [0.3, 0.9, 1.4, 2.2, 3.1];
        let x = [1.3, 0.6, 2.1, 0.8, 0.9, 1.6];
        let a = log_likelihood(&spec, &x, &data);
        let b = log_likelihood_expanded(&spec, &x, &data);
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }

    #[test]
    fn score_single_datum_is_zero_in_b() {
        let spec = ModelSpec::parse("kwgmo:exp").unwrap();
        let s = score(&spec, &[1.0; 5], &[1.0]).unwrap();
        assert!(s[3].abs() < 1e-14);
        assert!(score(&spec, &[1.0, 1.0, 1.0, 0.0, 1.0], &[1.0]).is_err());
    }

    #[test]
    fn score_matches_differences_for_every_baseline() {
        let cases: &[(&str, &[f64])] = &[
            ("kwgmo:exp", &[0.8, 1.7, 1.3, 0.6, 0.9]),
            ("kwgmo:weibull", &[1.3, 0.6, 2.1, 0.8, 0.9, 1.6]),
            ("kwgmo:lomax", &[1.1, 2.0, 0.7, 1.9, 2.5, 1.3]),
            ("kwgmo:frechet", &[0.9, 1.4, 1.2, 0.7, 1.8, 1.1]),
            ("kwgmo:gompertz", &[1.2, 0.5, 1.5, 1.1, 0.4, 0.3]),
            ("kwgmo:mw", &[1.2, 0.5, 1.5, 1.1, 0.4, 0.3, 1.2]),
            ("gmo:exp", &[0.8, 1.7, 0.9]),
            ("kw:weibull", &[1.3, 0.6, 0.9, 1.6]),
        ];
        let data = [0.3, 0.9, 1.4, 2.2, 3.1];
        for (id, x) in cases {
            let spec = ModelSpec::parse(id).unwrap();
            let s = score(&spec, x, &data).unwrap();
            let g = numeric_gradient(&spec, x, &data);
            for j in 0..x.len() {
                let scale = g[j].abs().max(1.0);
                assert!(
                    (s[j] - g[j]).abs() / scale < 1e-5,
                    "{id} {j}: {} vs {}",
                    s[j],
                    g[j]
                );
            }
        }
    }

    #[test]
    fn curvature_matches_numeric_hessian() {
        let spec = ModelSpec::parse("kwgmo:exp").unwrap();
        let data = [0.3, 0.9, 1.4, 2.2, 3.1, 0.05, 4.0];
        let x = [0.8, 1.7, 1.3, 2.0, 0.9];
        let c = generator_curvature(&spec, &x, &data).unwrap();
        let info = observed_information(&spec, &x, &data).unwrap();
        for j in 0..4 {
            let num = -info.matrix[(j, j)];
            assert!(
                (c[j] - num).abs() / num.abs() < 1e-3,
                "{j}: {} vs {num}",
                c[j]
            );
        }
        assert_eq!(c[3], -(data.len() as f64) / 4.0);
    }

    #[test]
    fn information_is_symmetric() {
        let spec = ModelSpec::parse("kwgmo:weibull").unwrap();
        let data = [0.3, 0.9, 1.4, 2.2, 3.1, 0.5, 1.1, 1.9];
        let info = observed_information(&spec, &[1.3, 0.6, 2.1, 0.8, 0.9, 1.6], &data).unwrap();
        assert_eq!(info.matrix, info.matrix.transpose());
    }

    #[test]
    fn ic_examples() {
        let ic = information_criteria(0.0, 0, 10).unwrap();
        assert_eq!((ic.aic, ic.bic, ic.caic, ic.hqic), (0.0, 0.0, 0.0, 0.0));
        assert!(information_criteria(-1.0, 6, 7).is_err());
        let ci = confidence_intervals(&[0.0], &[1.0], 0.5).unwrap();
        assert!((ci[0].1 - 0.674_489_750_196_08).abs() < 1e-9);
    }

    #[test]
    fn fit_recovers_exponential_rate() {
        let d = KwGMODistribution::new(
            Baseline::from_id("exp", &[2.0]).unwrap(),
            FamilyParams::ones(),
        );
        let data = d.sample(500, 3).unwrap();
        let spec = ModelSpec::parse("exp").unwrap();
        let fit = fit_mle(&spec, &data, &FitOptions::default()).unwrap();
        let mle = 1.0 / mean(&data);
        assert!((fit.estimates.get("lambda").unwrap() - mle).abs() < 1e-6);
        assert!(fit.converged);
        let se = fit.se.get("lambda").unwrap();
        assert!((se - mle / (500f64).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn fit_rejects_tiny_samples() {
        let spec = ModelSpec::parse("kwgmo:weibull").unwrap();
        assert!(fit_mle(&spec, &[1.0, 2.0, 3.0], &FitOptions::default()).is_err());
    }

    #[test]
    fn json_field_order() {
        let d = KwGMODistribution::new(
            Baseline::from_id("exp", &[1.0]).unwrap(),
            FamilyParams::ones(),
        );
        let data = d.sample(50, 1).unwrap();
        let fit = fit_mle(
            &ModelSpec::parse("exp").unwrap(),
            &data,
            &FitOptions::default(),
        )
        .unwrap();
        let json = serde_json::to_string(&fit).unwrap();
        let keys = [
            "\"estimates\"",
            "\"se\"",
            "\"ci\"",
            "\"loglik\"",
            "\"aic\"",
            "\"bic\"",
            "\"caic\"",
            "\"hqic\"",
            "\"converged\"",
            "\"n\"",
            "\"k\"",
            "\"seed\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{json}");
        let back: FitResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fit);
    }
}
