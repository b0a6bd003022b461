use approx::assert_relative_eq;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_4, PI};
use wvtract::maxmod::{
    growth_profile, log_grid, max_on_circle, regular_radii, tyler_real_threshold, tyler_trace,
};
use wvtract::{Complex, Map};

/// `max log|cos(z) e^z|` over `n` equally spaced angles, from the closed
/// form `x + log(cos^2 x + sinh^2 y) / 2`, with the best angle.
fn brute_cos_exp(r: f64, n: usize) -> (f64, f64) {
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64 - PI;
            let (x, y) = (r * t.cos(), r * t.sin());
            (x + 0.5 * (x.cos().powi(2) + y.sinh().powi(2)).ln(), t)
        })
        .fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a })
}

#[test]
fn exp_circle_maximum() {
    let m = max_on_circle(&Map::exp(1.0), 10.0, 1.0).unwrap();
    assert_relative_eq!(m.b, 10.0, max_relative = 1e-12);
    assert_eq!(m.argmax_args.len(), 1);
    assert!(m.argmax_args[0].abs() < 1e-6);
}

#[test]
fn cos_exp_maximum_matches_brute_force() {
    let m = max_on_circle(&Map::cos_exp(1.0), 100.0, 1.0).unwrap();
    let (b, t) = brute_cos_exp(100.0, 1 << 20);
    assert!((m.b - b).abs() < 1e-6, "{} vs {}", m.b, b);
    assert!(m.b >= b - 1e-9);
    assert_eq!(m.argmax_args.len(), 2);
    let (lo, hi) = (m.argmax_args[0], m.argmax_args[1]);
    assert_relative_eq!(lo, -hi, max_relative = 1e-6);
    assert!((hi - t.abs()).abs() < 1e-5);
    // just inside the diagonal
    assert!(hi < FRAC_PI_4 && FRAC_PI_4 - hi < 0.05);
}

#[test]
fn exp_profile_closed_form() {
    let grid = log_grid(50.0, 200.0, 1.02);
    let p = growth_profile(&Map::exp(2.0), &grid, 2.0).unwrap();
    for s in &p.samples[1..p.samples.len() - 1] {
        assert_relative_eq!(s.b, s.r - 2f64.ln(), max_relative = 1e-9);
        assert_relative_eq!(s.a, s.r, max_relative = 0.01);
    }
    let (b, _) = p.interpolate(100.0).unwrap();
    assert_relative_eq!(b, 100.0 - 2f64.ln(), max_relative = 1e-9);
}

#[test]
fn cos_exp_a_matches_differentiated_brute_force() {
    let grid = log_grid(50.0, 200.0, 1.02);
    let p = growth_profile(&Map::cos_exp(1.0), &grid, 1.0).unwrap();
    let s = p.samples.iter().min_by(|x, y| (x.r - 100.0).abs().partial_cmp(&(y.r - 100.0).abs()).unwrap()).unwrap();
    let h: f64 = 1e-3;
    let bp = brute_cos_exp(s.r * h.exp(), 1 << 18).0;
    let bm = brute_cos_exp(s.r * (-h).exp(), 1 << 18).0;
    let oracle = (bp - bm) / (2.0 * h);
    assert_relative_eq!(s.a, oracle, max_relative = 1e-3);
    // frozen: a(r)/r near r = 100, slightly below sqrt 2 from the diagonal
    assert!((s.a / s.r - std::f64::consts::SQRT_2).abs() < 0.01, "{}", s.a / s.r);
}

#[test]
fn profiles_are_monotone_and_convex() {
    for m in [Map::exp(1.0), Map::cos_exp(1.0)] {
        let p = growth_profile(&m, &log_grid(50.0, 500.0, 1.03), 1.0).unwrap();
        for w in p.samples.windows(2) {
            assert!(w[1].b >= w[0].b);
            assert!(w[1].a >= w[0].a - 1e-6 * w[1].a);
        }
        assert!(p.samples.iter().all(|s| s.a >= 0.0));
    }
}

#[test]
fn regular_radii_filters() {
    let exp = Map::exp(1.0);
    let p = growth_profile(&exp, &log_grid(50.0, 200.0, 1.02), 1.0).unwrap();
    let reg = regular_radii(&exp, &p, 0.1, 0.2, 0.3).unwrap();
    assert_eq!(reg.len(), p.samples.len() - 2);

    let ce = Map::cos_exp(1.0);
    let pc = growth_profile(&ce, &log_grid(50.0, 200.0, 1.02), 1.0).unwrap();
    assert!(!regular_radii(&ce, &pc, 0.1, 0.2, 0.3).unwrap().is_empty());

    // a dip in B larger than the slack a^(1-alpha-beta) = 10 breaks the growth inequality there
    let mut bad = p.clone();
    let k = bad.samples.len() / 2;
    bad.samples[k].b -= 30.0;
    let reg = regular_radii(&exp, &bad, 0.1, 0.2, 0.3).unwrap();
    assert!(!reg.contains(&bad.samples[k].r));
    assert_eq!(reg.len(), p.samples.len() - 3);
}

#[test]
fn tyler_threshold_on_real_axis() {
    let x = tyler_real_threshold(&Map::cos_exp(1.0), 0.01, 0.99).unwrap();
    // independent bisection on x (1 + tan^2 x) - (1 - tan x)
    let h = |x: f64| x * (1.0 + x.tan().powi(2)) - (1.0 - x.tan());
    let (mut a, mut b) = (0.01, 0.99);
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if h(a).signum() == h(mid).signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    assert_relative_eq!(x, a, max_relative = 1e-9);
    assert!((x - 0.43).abs() < 0.01);
}

#[test]
fn tyler_trace_properties() {
    let tr = tyler_trace(&Map::cos_exp(1.0), &log_grid(20.0, 200.0, 1.05)).unwrap();
    let last = tr.last().unwrap();
    assert_relative_eq!(last.r, 200.0, max_relative = 1e-12);
    assert!(last.a.im.abs() < 1e-8 * last.a.norm().max(1.0));
    assert!(last.a.re > 0.0);
    assert!((last.z.arg().abs() - FRAC_PI_4).abs() < 0.05);

    let tr = tyler_trace(&Map::exp(1.0), &[5.0, 10.0, 20.0]).unwrap();
    for p in tr {
        assert!(p.z.im.abs() < 1e-9);
        assert_relative_eq!(p.a.re, p.z.re, max_relative = 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn circle_maximum_dominates_samples(r in 5.0f64..300.0, t in -PI..PI) {
        let m = Map::cos_exp(1.0);
        let cm = max_on_circle(&m, r, 1.0).unwrap();
        let v = m.log_modulus(Complex::from_polar(r, t));
        prop_assert!(cm.b >= v - 1e-9);
        prop_assert!((m.log_modulus(cm.z_r()) - cm.b).abs() < 1e-9 * cm.b.max(1.0));
    }
}
