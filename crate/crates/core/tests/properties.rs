use proptest::prelude::*;

use kwgmo::{Baseline, BaselineFamily, FamilyParams, KwGMODistribution};

fn family() -> impl Strategy<Value = BaselineFamily> {
    prop::sample::select(BaselineFamily::all())
}

fn baseline() -> impl Strategy<Value = Baseline> {
    family().prop_flat_map(|f| {
        prop::collection::vec(0.3f64..3.0, f.n_params())
            .prop_map(move |p| Baseline::new(f, &p).unwrap())
    })
}

fn model() -> impl Strategy<Value = KwGMODistribution> {
    (
        baseline(),
        0.3f64..4.0,
        0.3f64..4.0,
        0.1f64..10.0,
        0.3f64..4.0,
    )
        .prop_map(|(base, a, b, alpha, theta)| {
            KwGMODistribution::new(base, FamilyParams::new(a, b, alpha, theta).unwrap())
        })
}

proptest! {
    #[test]
    fn baseline_cdf_plus_sf(base in baseline(), p in 0.001f64..0.999) {
        let t = base.quantile(p).unwrap();
        prop_assert!((base.cdf(t) + base.sf(t) - 1.0).abs() < 1e-14);
        prop_assert!((base.cdf(t) - p).abs() < 1e-12);
    }

    #[test]
    fn model_quantile_round_trip(d in model(), p in 0.0005f64..0.9995) {
        let t = d.quantile(p).unwrap();
        prop_assert!((d.cdf(t) - p).abs() < 1e-9, "F(Q({p})) = {}", d.cdf(t));
        prop_assert!((d.cdf(t) + d.sf(t) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lower_tail_quantiles_are_monotone(d in model(), e in 2.0f64..200.0) {
        let ln_p = -e;
        let t0 = d.quantile_ln_cdf(ln_p);
        let t1 = d.quantile_ln_cdf(ln_p + 0.5);
        prop_assert!(t0 <= t1);
        let lower = d.baseline().support().lower;
        prop_assert!(t0 >= lower);
    }

    #[test]
    fn density_is_finite_and_non_negative(d in model(), p in 0.0f64..1.0) {
        let t = d.quantile(p.clamp(1e-9, 1.0 - 1e-9)).unwrap();
        let f = d.pdf(t);
        prop_assert!(f.is_finite() && f >= 0.0, "pdf({t}) = {f}");
        prop_assert!(d.chrf(t) >= 0.0);
    }
}
