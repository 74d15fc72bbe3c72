//! Derived quantities checked against independent direct computations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};

use bwcurve::curve::{curve_point, eval_curve, frequencies, k_norm};
use bwcurve::diophantine::scan;
use bwcurve::lower::{lower_from_poly, optimizer_lower, universal_lower, vanishing_poly};
use bwcurve::numerics::{BigComplex, ComplexInterval, RealInterval, Sign};
use bwcurve::poly::multi_indices;
use bwcurve::upper::{beta_log, beta_table, cert_upper, eval_real_poly, r_poly_coeffs};
use bwcurve::{Cone, ExponentVector, MultiIndex, OptimizerConfig, Poly, PrecisionContext};

fn ctx(bits: u32) -> PrecisionContext {
    PrecisionContext::with_bits(bits).unwrap()
}

fn lam(idx: &MultiIndex, xs: &[Float], prec: u32) -> Float {
    let mut v = Float::with_val(prec, idx.j0);
    for (j, x) in idx.j.iter().zip(xs) {
        v += Float::with_val(prec, x * *j);
    }
    v
}

fn direct_beta(idx: &MultiIndex, n: u32, xs: &[Float], prec: u32) -> Float {
    let t = lam(idx, xs, prec);
    let mut prod = Float::with_val(prec, 1);
    for j in multi_indices(n, xs.len()) {
        if &j != idx {
            prod *= Float::with_val(prec, &t - lam(&j, xs, prec));
        }
    }
    prod
}

fn sqrt2m1(prec: u32) -> Float {
    Float::with_val(prec, 2).sqrt() - 1u32
}

#[test]
fn beta_matches_direct_product() {
    let x: ExponentVector = "sqrt2m1".parse().unwrap();
    let prec = 1200;
    let xs = [sqrt2m1(prec)];
    let tol = Float::with_val(64, Float::i_exp(1, -900));
    for idx in multi_indices(2, 1) {
        let got = beta_log(&idx, 2, &x, &ctx(1024)).unwrap();
        let want = direct_beta(&idx, 2, &xs, prec);
        let sign = if want < 0 { Sign::Minus } else { Sign::Plus };
        assert_eq!(got.sign(), Some(sign), "{idx}");
        let log = got.log_abs().unwrap();
        let lw = Float::with_val(prec, want.abs_ref()).ln();
        assert!(log.contains(&lw) || Float::with_val(prec, log.mid() - &lw).abs() < tol, "{idx}");
    }
}

#[test]
fn vanishing_kernel_is_inverse_beta() {
    let x = ExponentVector::golden();
    let n = 3;
    let p = vanishing_poly(n, &x, &ctx(256)).unwrap();
    let prec = 512;
    let xs = [Float::with_val(prec, (Float::with_val(prec, 5).sqrt() - 1u32) / 2u32)];
    let mut scale: Option<Float> = None;
    for idx in multi_indices(n, 1) {
        let c = p.coeff(&idx).expect("every coefficient is nonzero");
        let cb = Float::with_val(prec, &c.re * direct_beta(&idx, n, &xs, prec));
        assert!(c.im.is_zero());
        match &scale {
            None => scale = Some(cb),
            Some(s) => {
                let rel = Float::with_val(prec, (cb / s) - 1u32).abs();
                assert!(rel < Float::with_val(64, Float::i_exp(1, -150)), "{idx}: {rel}");
            }
        }
    }
}

#[test]
fn r_polynomial_recovers_beta_and_is_dominated() {
    let x: ExponentVector = "sqrt2m1".parse().unwrap();
    let n = 3;
    let prec = 256;
    let enc = x.at(prec);
    let big_n = multi_indices(n, 1).len() as u32 - 1;
    for idx in multi_indices(n, 1) {
        let a = r_poly_coeffs(&idx, n, &x, prec);
        assert_eq!(a.len() as u32, big_n + 1);
        let at_root = eval_real_poly(&a, &enc.frequency(&idx));
        let beta = beta_log(&idx, n, &x, &ctx(prec)).unwrap();
        let from_r = at_root.abs().ln().unwrap();
        assert!(from_r.intersect(beta.log_abs().unwrap()).is_some(), "{idx}");

        for l in 1..=n as i64 {
            let lambda = RealInterval::from_i64(prec, l);
            let abs_sum: Vec<RealInterval> = a.iter().map(RealInterval::abs).collect();
            let lhs = eval_real_poly(&abs_sum, &lambda);
            let rhs = RealInterval::from_i64(prec, l + i64::from(n)).powi(big_n);
            assert!(lhs.certainly_le(&rhs), "{idx} at λ = {l}");
        }
    }
}

#[test]
fn min_gap_matches_pairwise_brute_force() {
    let x: ExponentVector = "sqrt2m1,sqrt3m1".parse().unwrap();
    let f = frequencies(4, &x, &ctx(256)).unwrap();
    let prec = 300;
    let xs = [sqrt2m1(prec), Float::with_val(prec, 3).sqrt() - 1u32];
    let idx = multi_indices(4, 2);
    let mut best: Option<Float> = None;
    for (a, ia) in idx.iter().enumerate() {
        for ib in &idx[a + 1..] {
            let g = Float::with_val(prec, lam(ia, &xs, prec) - lam(ib, &xs, prec)).abs();
            if best.as_ref().is_none_or(|b| g < *b) {
                best = Some(g);
            }
        }
    }
    let gap = f.min_gap.unwrap();
    let want = best.unwrap();
    assert!(Float::with_val(prec, gap.mid() - &want).abs() < Float::with_val(64, Float::i_exp(1, -200)));
    assert_eq!(f.entries.len(), idx.len());
}

fn golden_max(f: impl Fn(f64) -> f64) -> f64 {
    let n = 1 << 14;
    let step = std::f64::consts::TAU / n as f64;
    let (mut best_t, mut best) = (0.0, f64::MIN);
    for k in 0..n {
        let t = k as f64 * step;
        if f(t) > best {
            best = f(t);
            best_t = t;
        }
    }
    let (mut a, mut b) = (best_t - step, best_t + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f((a + b) / 2.0)
}

#[test]
fn k_norm_refines_and_contains_true_maximum() {
    let x: ExponentVector = "0.5".parse().unwrap();
    let p = Poly::from_terms(
        1,
        1,
        [
            (MultiIndex::new(1, vec![0]), BigComplex::from_f64(128, 1.0, 0.0)),
            (MultiIndex::new(0, vec![1]), BigComplex::from_f64(128, -1.0, 0.0)),
        ],
    )
    .unwrap();
    let c = ctx(256);
    let coarse = k_norm(&p, &x, 1 << 10, &c).unwrap().interval;
    let fine = k_norm(&p, &x, 1 << 16, &c).unwrap().interval;
    assert!(fine.width() <= coarse.width());
    assert!(coarse.intersect(&fine).is_some());
    let truth = golden_max(|t| {
        let (s, co) = t.sin_cos();
        let e1 = (co.exp() * s.cos(), co.exp() * s.sin());
        let e2 = ((co / 2.0).exp() * (s / 2.0).cos(), (co / 2.0).exp() * (s / 2.0).sin());
        (e1.0 - e2.0).hypot(e1.1 - e2.1)
    });
    for iv in [&coarse, &fine] {
        assert!(iv.lo().to_f64() <= truth + 1e-12 && truth <= iv.hi().to_f64() + 1e-12, "{} not in {iv:?}", truth);
    }
}

fn random_poly(rng: &mut ChaCha8Rng, n: u32, d: usize) -> Poly {
    let terms = multi_indices(n, d).into_iter().map(|i| (i, BigComplex::from_f64(128, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
    Poly::from_terms(n, d, terms).unwrap()
}

#[test]
fn eval_curve_agrees_with_polynomial_at_curve_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let fixtures = ["golden", "sqrt2m1", "0.3", "sqrt2m1,sqrt3m1", "golden,1/7"];
    let prec = 320;
    let tol = Float::with_val(64, Float::i_exp(1, -200));
    for k in 0..100 {
        let x: ExponentVector = fixtures[k % fixtures.len()].parse().unwrap();
        let deg = rng.gen_range(1..=4);
        let p = random_poly(&mut rng, deg, x.d());
        let z = BigComplex::from_f64(prec, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)).enclose(prec);
        let a = eval_curve(&p, &x, &z, prec);
        let b = p.eval(&curve_point(&x, &z, prec), prec);
        for (u, v) in [(&a.re, &b.re), (&a.im, &b.im)] {
            assert!(u.intersect(v).is_some(), "instance {k}");
            assert!(u.width() < tol && v.width() < tol, "instance {k}");
        }
    }
}

#[test]
fn value_at_origin_is_below_curve_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let c = PrecisionContext { circle_samples: 256, ..ctx(256) };
    for _ in 0..10 {
        let x = ExponentVector::golden();
        let p = random_poly(&mut rng, 3, 1);
        let ones = vec![ComplexInterval::one(128); 2];
        let at_one = p.polydisk_lower(&[ones], 128);
        let k = k_norm(&p, &x, c.circle_samples, &c).unwrap().interval;
        assert!(at_one <= *k.hi());
    }
}

#[test]
fn vanishing_lower_bound_beats_universal_minus_one() {
    let x = ExponentVector::golden();
    let c = ctx(256);
    let p = vanishing_poly(6, &x, &c).unwrap();
    let got = lower_from_poly(&p, &x, &c).unwrap().bound;
    let floor = universal_lower(6, 1).to_f64() - 1.0;
    assert!(got.to_f64() >= floor, "{} < {floor}", got.to_f64());
}

#[test]
fn optimizer_stays_inside_the_sandwich() {
    let x = ExponentVector::golden();
    let c = ctx(256);
    let cfg = OptimizerConfig { restarts: 2, ..OptimizerConfig::default() };
    let r = optimizer_lower(6, &x, &cfg, &c).unwrap();
    let upper = cert_upper(6, &x, &c).unwrap().log_abs().unwrap().hi().clone();
    assert!(r.bound.0 >= universal_lower(6, 1).0);
    assert!(r.bound.0 <= upper);
    assert!(optimizer_lower(0, &x, &cfg, &c).unwrap().bound.0.is_zero());
}

#[test]
fn two_dimensional_scan_exponent() {
    // Brute force at 60 digits: the largest ratio comes from ‖q‖ = 5, q = ±(5, 4),
    // with <q·x> = 7.28957859015581881771e-4.
    let x: ExponentVector = "sqrt2m1,sqrt3m1".parse().unwrap();
    let prof = scan(&x, 100, Cone::All, &ctx(256)).unwrap();
    let mu = prof.mu_hat.unwrap().to_f64();
    assert!((mu - 4.488_458_099_799_644).abs() < 1e-12, "mu_hat = {mu}");
    let r5 = &prof.minima[4];
    assert_eq!(r5.q.iter().map(|v| v.abs()).collect::<Vec<_>>(), [5, 4]);
    assert!((r5.dist.to_f64() - 7.289_578_590_155_819e-4).abs() < 1e-18);
    assert!(!prof.dirichlet_violation);
    assert_eq!(prof.minima.len(), 100);
}

#[test]
fn cert_upper_degree_one_closed_form() {
    let text = "0.7071067811865475";
    let x: ExponentVector = text.parse().unwrap();
    let prec = 256;
    let xv = Float::with_val(prec, Rational::from_str_radix("7071067811865475/10000000000000000", 10).unwrap());
    // frequencies 0, 1, x; the smallest |β| is x(1 − x)
    let min_beta = Float::with_val(prec, &xv * Float::with_val(prec, 1u32 - &xv));
    let want = Float::with_val(prec, 3u32).ln() * 3u32 - min_beta.ln();
    let got = cert_upper(1, &x, &ctx(prec)).unwrap();
    let hi = got.log_abs().unwrap().hi().clone();
    assert!(hi >= want);
    assert!(Float::with_val(prec, &hi - &want) < Float::with_val(64, Float::i_exp(1, -200)));
    assert_eq!(beta_table(1, &x, &ctx(prec)).unwrap().entries.len(), 3);
}
