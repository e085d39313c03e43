//! Adaptive Gauss-Kronrod quadrature and the probability-space integrator
//! used by the moment, mgf, PWM and entropy evaluators.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::special::ln_one_minus_exp;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const MAX_SUBDIVISIONS: usize = 4000;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Kronrod panel with its embedded 10-point Gauss estimate.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over the finite interval `[a, b]` by global adaptive
/// bisection of the panel with the largest error estimate.
///
/// Endpoints are never evaluated, so integrable endpoint singularities are
/// tolerated.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e) = gk21(&f, a, b);
    let mut evaluations = 21;
    if !v.is_finite() {
        return Err(Error::NoConvergence(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut total_err = e;
    while total_err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= MAX_SUBDIVISIONS {
            return Err(Error::NoConvergence(format!(
                "subdivision limit reached on [{a}, {b}] (estimate {total:e}, error {total_err:e})"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            heap.push(worst);
            break;
        }
        let (lv, le) = gk21(&f, worst.a, mid);
        let (rv, re) = gk21(&f, mid, worst.b);
        evaluations += 42;
        if !(lv.is_finite() && rv.is_finite()) {
            return Err(Error::NoConvergence(format!(
                "non-finite integrand near [{}, {}]",
                worst.a, worst.b
            )));
        }
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
    }
    // re-sum to shed accumulated drift from the running updates
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Ok(Integral {
        value,
        error,
        evaluations,
    })
}

/// Integrates over `[a, inf)` through the map `t = a + x / (1 - x)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<Integral> {
    integrate(
        |x| {
            let one_minus = 1.0 - x;
            let ft = f(a + x / one_minus);
            if ft == 0.0 {
                0.0
            } else {
                ft / (one_minus * one_minus)
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Width of one tail chunk in the log-probability coordinate.
const CHUNK: f64 = 2.0;
/// Far enough that `e^{-y}` is below any representable probability mass.
const MAX_LOG_DEPTH: f64 = 800.0;

/// Integrates `∫_0^∞ e^{h(y)} dy` chunk by chunk, stopping once the chunks
/// become negligible and reporting divergence when they stop shrinking.
fn integrate_log_tail<H: Fn(f64) -> f64>(h: H, tol: Tolerance) -> Result<f64> {
    let mut total = 0.0;
    let mut y = 0.0;
    let mut prev: Option<f64> = None;
    let mut quiet = 0;
    let mut growing = 0;
    let chunk_tol = Tolerance {
        abs: tol.abs * 0.1,
        rel: tol.rel * 0.1,
    };
    while y < MAX_LOG_DEPTH {
        let piece = integrate(
            |s| {
                let v = h(s).exp();
                if v.is_nan() {
                    0.0
                } else {
                    v
                }
            },
            y,
            y + CHUNK,
            chunk_tol,
        )
        .map_err(|e| Error::Divergent(format!("tail chunk at depth {y}: {e}")))?;
        let c = piece.value;
        if !c.is_finite() {
            return Err(Error::Divergent(format!(
                "tail chunk at depth {y} is infinite"
            )));
        }
        total += c;
        if c.abs() <= (tol.abs * 0.01).max(tol.rel * 0.01 * total.abs()) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        if let Some(p) = prev {
            if y > 20.0 && c >= 0.999 * p && c > 0.0 {
                growing += 1;
                if growing >= 4 {
                    return Err(Error::Divergent(format!(
                        "tail contributions stopped decaying beyond depth {y}"
                    )));
                }
            } else {
                growing = 0;
            }
        }
        prev = Some(c);
        y += CHUNK;
    }
    Err(Error::Divergent(
        "tail mass not exhausted at the deepest representable probability".into(),
    ))
}

/// Computes `∫_0^1 φ(Q(v)) dv` for a positive integrand given as `ln φ`.
///
/// `quantile_lower(ln p)` and `quantile_upper(ln q)` must both return the
/// quantile, addressed respectively by the log of the lower-tail probability
/// `p = v` and of the upper-tail probability `q = 1 - v`. The callback
/// receives `(t, ln v, ln(1 - v))`. Each half of the unit interval is mapped
/// to `[0, ∞)` by `v = e^{-y} / 2`, so heavy tails surface as slowly decaying
/// chunks.
pub fn expectation<QL, QU, P>(
    quantile_lower: QL,
    quantile_upper: QU,
    ln_phi: P,
    tol: Tolerance,
) -> Result<f64>
where
    QL: Fn(f64) -> f64,
    QU: Fn(f64) -> f64,
    P: Fn(f64, f64, f64) -> f64,
{
    let ln_half = -std::f64::consts::LN_2;
    let lower = integrate_log_tail(
        |y| {
            let ln_v = ln_half - y;
            let ln_w = ln_one_minus_exp(ln_v);
            let t = quantile_lower(ln_v);
            ln_phi(t, ln_v, ln_w) + ln_v
        },
        tol,
    )?;
    let upper = integrate_log_tail(
        |y| {
            let ln_w = ln_half - y;
            let ln_v = ln_one_minus_exp(ln_w);
            let t = quantile_upper(ln_w);
            ln_phi(t, ln_v, ln_w) + ln_w
        },
        tol,
    )?;
    Ok(lower + upper)
}
