use proptest::prelude::*;
use rug::float::Round;
use rug::Float;

use bwcurve::curve::{bw_verdict, eval_curve, k_norm, BwVerdict};
use bwcurve::diophantine::nearest_int_dist;
use bwcurve::lower::{lower_from_poly, universal_lower, vanishing_poly};
use bwcurve::numerics::{BigComplex, ComplexInterval, RealInterval};
use bwcurve::poly::{dim_pn, multi_indices};
use bwcurve::report::Decimal;
use bwcurve::upper::{cert_upper, lemma_dist_rhs};
use bwcurve::{BigReal, Error, ExponentVector, Poly, PrecisionContext};

fn ctx() -> PrecisionContext {
    PrecisionContext { circle_samples: 256, torus_samples: 256, ..PrecisionContext::default() }
}

fn poly_from(n: u32, d: usize, coeffs: &[(f64, f64)]) -> Poly {
    let terms = multi_indices(n, d).into_iter().zip(coeffs.iter().cycle()).map(|(i, &(re, im))| (i, BigComplex::from_f64(128, re, im)));
    Poly::from_terms(n, d, terms).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..12)
}

fn fixture() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["golden", "sqrt2m1", "sqrt3m1", "liouville(2,2)", "sqrt2m1,sqrt3m1"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multi_indices_are_graded_lex(n in 0u32..9, d in 1usize..4) {
        let idx = multi_indices(n, d);
        prop_assert_eq!(idx.len(), dim_pn(n, d));
        for w in idx.windows(2) {
            prop_assert!(w[0] < w[1]);
            prop_assert!(w[0].degree() <= w[1].degree());
        }
        prop_assert!(idx.iter().all(|i| i.degree() <= n && i.d() == d));
    }

    #[test]
    fn interval_ops_enclose_high_precision_values(a in -50.0..50.0f64, b in -50.0..50.0f64, bits in 64u32..300) {
        let ia = RealInterval::from_f64(bits, a);
        let ib = RealInterval::from_f64(bits, b);
        let fa = Float::with_val(1024, a);
        let fb = Float::with_val(1024, b);
        prop_assert!(ia.add(&ib).contains(&Float::with_val(1024, &fa + &fb)));
        prop_assert!(ia.mul(&ib).contains(&Float::with_val(1024, &fa * &fb)));
        prop_assert!(ia.sin().contains(&Float::with_val(1024, fa.sin_ref())));
        prop_assert!(ia.cos().contains(&Float::with_val(1024, fa.cos_ref())));
        let small = Float::with_val(1024, &fa / 10u32);
        prop_assert!(ia.div_u64(10).exp().contains(&Float::with_val(1024, small.exp_ref())));
        if a > 0.0 {
            prop_assert!(ia.ln().unwrap().contains(&Float::with_val(1024, fa.ln_ref())));
        }
    }

    #[test]
    fn nearest_integer_distance(t in -1.0e6..1.0e6f64) {
        let (p, dist) = nearest_int_dist(&RealInterval::from_f64(256, t)).unwrap();
        let want = (t - t.round()).abs();
        prop_assert!(dist.lo().to_f64() <= want + 1e-300 && want <= dist.hi().to_f64() + 1e-300);
        prop_assert!(dist.hi().to_f64() <= 0.5);
        prop_assert!((p.to_f64() - t).abs() <= 0.5);
    }

    #[test]
    fn universal_lower_is_monotone(n in 0u32..40, d in 1usize..4) {
        prop_assert!(universal_lower(n, d).0 <= universal_lower(n + 1, d).0);
        prop_assert!(universal_lower(n, d).0 >= 0);
    }

    #[test]
    fn distance_lemma_bounds_the_product(xa in -30i64..30, len in 0i64..20, alpha in -10.0..10.0f64) {
        prop_assume!(alpha != alpha.round());
        let a = RealInterval::from_f64(256, alpha);
        let yb = xa + len;
        let mut lhs = RealInterval::zero(256);
        for j in xa..=yb {
            lhs = lhs.add(&RealInterval::from_i64(256, j).sub(&a).abs().ln().unwrap());
        }
        let rhs = lemma_dist_rhs(xa, yb, &a).unwrap();
        prop_assert!(rhs.log_abs().unwrap().lo() <= lhs.hi());
    }

    #[test]
    fn poly_record_roundtrip(n in 0u32..4, d in 1usize..3, c in coeffs()) {
        let p = poly_from(n, d, &c);
        let text = serde_json::to_string(&p.to_record()).unwrap();
        let back = Poly::from_record(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn directed_decimals_bracket_the_value(v in -1.0e8..1.0e8f64, bits in 64u32..256) {
        let exact = BigReal(Float::with_val(bits, v) / 7u32);
        let down: Float = Float::with_val(512, Float::parse(Decimal::new(&exact, bits, Round::Down).value).unwrap());
        let up: Float = Float::with_val(512, Float::parse(Decimal::new(&exact, bits, Round::Up).value).unwrap());
        prop_assert!(down <= exact.0 && exact.0 <= up);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_decimal_sandwich(digits in 1u32..1000, n in 1u32..5) {
        let x: ExponentVector = format!("0.{digits:03}").parse().unwrap();
        let c = ctx();
        let upper = match cert_upper(n, &x, &c) {
            Ok(u) => u.log_abs().unwrap().hi().clone(),
            Err(Error::IndependenceViolation { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let p = vanishing_poly(n, &x, &c).unwrap();
        let lower = lower_from_poly(&p, &x, &c).unwrap().bound;
        prop_assert!(universal_lower(n, 1).0 <= upper);
        prop_assert!(lower.0 <= upper);
    }

    #[test]
    fn k_norm_bounds_circle_values(x in fixture(), n in 1u32..4, c in coeffs(), theta in 0.0..std::f64::consts::TAU) {
        let x: ExponentVector = x.parse().unwrap();
        let p = poly_from(n, x.d(), &c);
        let k = k_norm(&p, &x, 256, &ctx()).unwrap().interval;
        let z = BigComplex::from_f64(256, theta.cos(), theta.sin()).enclose(256);
        let v = eval_curve(&p, &x, &z, 256).abs();
        prop_assert!(v.lo() <= k.hi());
        prop_assert!(k.lo() <= k.hi());
    }

    #[test]
    fn bernstein_walsh_never_violated(x in fixture(), n in 1u32..4, c in coeffs(), r in 0.2..3.0f64, t in 0.0..std::f64::consts::TAU) {
        let x: ExponentVector = x.parse().unwrap();
        let p = poly_from(n, x.d(), &c);
        let cc = ctx();
        let e = cert_upper(n, &x, &cc).unwrap();
        let z: Vec<ComplexInterval> = (0..=x.d())
            .map(|k| BigComplex::from_f64(256, r * (t + k as f64).cos(), r * (t + k as f64).sin()).enclose(256))
            .collect();
        prop_assert_ne!(bw_verdict(&p, &x, &z, &e, &cc).unwrap(), BwVerdict::Violated);
    }
}
