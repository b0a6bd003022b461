use approx::assert_relative_eq;
use proptest::prelude::*;
use std::f64::consts::PI;
use wvtract::branches::{
    chart_level_lines, covering_check, f_eval, f_prime, koebe_check, length_inside, level_anchor,
    level_curve_trace, principal_log_f, square_sr, BranchContinuation, Rect, RectFamily, Strip,
};
use wvtract::maxmod::max_on_circle;
use wvtract::{Complex, Map};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Geometric midpoint of the critical values `k` and `k + 1` of `cos(z) e^z`.
fn cos_exp_midpoint(k: i64) -> f64 {
    (PI * (k as f64 + 0.5) + PI / 4.0 - 0.5 * 2f64.ln()).exp()
}

#[test]
fn exp_transform_is_exponential() {
    let m = Map::exp(1.0);
    for w in [c(0.3, 0.2), c(1.0, -1.0), c(-0.5, 2.0)] {
        let f = principal_log_f(&m, w.exp());
        assert!((f - w.exp()).norm() < 1e-12);
        let shifted = principal_log_f(&m, (w + c(0.0, 2.0 * PI)).exp());
        assert!((shifted - f).norm() < 1e-12);
        assert!((f_prime(&m, w) - w.exp()).norm() < 1e-12);
    }
}

#[test]
fn cos_exp_transform_on_real_axis() {
    let m = Map::cos_exp(1.0);
    for x in [0.1f64, 0.5, 1.2, 1.5] {
        let w = c(x.ln(), 0.0);
        let direct = principal_log_f(&m, w.exp());
        assert_relative_eq!(direct.re, x + x.cos().ln(), max_relative = 1e-12);
        assert!(direct.im.abs() < 1e-12);
        // continued from the point 0.1 on the real axis
        let anchor = c(0.1f64.ln(), 0.0);
        let cont = f_eval(&m, w, anchor, principal_log_f(&m, anchor.exp())).unwrap();
        assert!((cont - direct).norm() < 1e-10);
    }
}

#[test]
fn exp_inverse_branches_are_logarithms() {
    let m = Map::exp(1.0);
    let z_r = c(100.0, 0.0);
    for s in [-2i64, 0, 3] {
        let mut g = BranchContinuation::g_branch(&m, z_r, s);
        for t in [c(95.0, 3.0), c(104.0, -2.0), c(100.0, 0.5)] {
            let p = g.invert(&m, t).unwrap();
            let exact = t.ln() + c(0.0, 2.0 * PI * s as f64);
            assert!((p - exact).norm() < 1e-12, "{p} vs {exact}");
        }
    }
}

#[test]
fn cos_exp_anchor_round_trip_and_slope() {
    let m = Map::cos_exp(1.0);
    let r = cos_exp_midpoint(1);
    let z_r = max_on_circle(&m, r, 1.0).unwrap().z_r();
    let w_r = c(r.ln(), z_r.arg());
    let a = m.log_derivative(z_r).unwrap().re;
    for s in [0i64, 1, -4] {
        let mut g = BranchContinuation::g_branch(&m, z_r, s);
        let target = principal_log_f(&m, z_r);
        let away = target + c(0.7, -0.4);
        g.invert(&m, away).unwrap();
        let back = g.invert_along(&m, &[away, target]).unwrap();
        let w_rs = w_r + c(0.0, 2.0 * PI * s as f64);
        assert!((back[1] - w_rs).norm() < 1e-10);
        // |G_s'(F(w_rs))| = 1 / |F'(w_rs)| = 1 / a
        let gp = 1.0 / f_prime(&m, w_rs).norm();
        assert_relative_eq!(gp * a, 1.0, max_relative = 0.01);
    }
}

#[test]
fn exp_expansion_bound_closed_form() {
    let m = Map::exp(1.0);
    let (r, lambda) = (100.0f64, 2.0);
    let zeta0 = level_anchor(&m, r, 0.0).unwrap();
    assert_relative_eq!(zeta0.re, r.ln().ln(), max_relative = 1e-12);
    let f0 = principal_log_f(&m, zeta0.exp());
    let strip = Strip::new(r, lambda);
    let (grid, half) = (40usize, 10.0);
    let mut h = BranchContinuation::h_branch(zeta0, f0, 0);
    let rep = koebe_check(&m, &mut h, &strip, grid, half).unwrap();
    // H = log, so |H'(w)| = 1/|w| on the same grid
    let mut oracle = 0.0f64;
    for j in 0..grid {
        let y = f0.im + half * ((j as f64 + 0.5) / grid as f64 * 2.0 - 1.0);
        for i in 0..grid {
            let x = strip.lo + strip.width() * (i as f64 + 0.5) / grid as f64;
            let w = c(x, y);
            oracle = oracle.max(strip.dist_to_boundary(w) / (4.0 * PI * w.norm()));
        }
    }
    assert_relative_eq!(rep.max_violation, oracle, max_relative = 1e-9);
    assert!(rep.max_violation < 1.0);
    assert_eq!(rep.samples, grid * grid);
    // at the strip center dist = log lambda
    assert_relative_eq!(strip.dist_to_boundary(c(r.ln(), 0.0)), lambda.ln(), max_relative = 1e-12);
}

#[test]
fn cos_exp_expansion_bound() {
    let m = Map::cos_exp(1.0);
    let r = cos_exp_midpoint(1);
    let z_r = max_on_circle(&m, r, 1.0).unwrap().z_r();
    let zeta0 = level_anchor(&m, r, z_r.arg()).unwrap();
    let mut h = BranchContinuation::h_branch(zeta0, principal_log_f(&m, zeta0.exp()), 0);
    let rep = koebe_check(&m, &mut h, &Strip::new(r, 2.0), 100, 20.0).unwrap();
    assert_eq!(rep.samples, 10_000);
    assert!(rep.max_violation <= 1.0);
}

#[test]
fn exp_square_covers() {
    let m = Map::exp(1.0);
    let (r, tau) = (100.0f64, 0.3);
    let z_r = c(r, 0.0);
    let sr = square_sr(z_r, r, tau);
    let rects = RectFamily::new(principal_log_f(&m, z_r), r, tau, 0.0);
    let rep = covering_check(&m, &sr, &rects.q_hat).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.windings.len(), 5);
    for w in &rep.windings {
        assert!((w - 1.0).abs() < 0.01);
    }
    // degenerate target: Q^ shrunk to its center
    let point = Rect::square(rects.q_hat.center, 0.0);
    let rep = covering_check(&m, &sr, &point).unwrap();
    assert!((rep.windings[0] - 1.0).abs() < 0.01);
}

#[test]
fn exp_level_curve_residual() {
    let m = Map::exp(1.0);
    let r: f64 = 50.0;
    let start = c(r.ln().ln(), 0.0);
    let curve = level_curve_trace(&m, start, r.ln(), 0.01, 1.0, None, false).unwrap();
    assert!(curve.max_residual < 1e-9);
    // e^x cos y = log r, so x = log log r - log cos y
    for p in &curve.points {
        assert!((p.re - (r.ln().ln() - p.im.cos().ln())).abs() < 1e-9);
    }
    assert!(curve.length >= 1.0 - 0.02);
}

#[test]
fn cos_exp_level_lines_meet_inner_square() {
    let m = Map::cos_exp(1.0);
    let tau = 0.3;
    for k in [1i64, 2] {
        let r = cos_exp_midpoint(k);
        let z_r = max_on_circle(&m, r, 1.0).unwrap().z_r();
        let a = m.log_derivative(z_r).unwrap().re;
        let rects = RectFamily::new(principal_log_f(&m, z_r), a, tau, 1e-6);
        let charts = m.far_field_charts();
        let lines = chart_level_lines(&charts, &rects.q_second, r.ln(), 20.0);
        let need = (a.powf(1.0 - tau) / (16.0 * PI)).floor() as usize;
        assert!(lines.len() >= need, "{} < {need}", lines.len());
        for l in chart_level_lines(&charts, &rects.q_prime, r.ln(), 20.0) {
            let pts: Vec<Complex> = (0..=64)
                .map(|i| c(l.x_lo + (l.x_hi - l.x_lo) * i as f64 / 64.0, l.im))
                .collect();
            let (len, _) = length_inside(&pts, &rects.q, &rects.q_second);
            assert!(len >= a.powf(1.0 - tau) / 16.0 - rects.d);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn exp_branch_inverts_transform(dx in -0.2f64..0.2, dy in -0.2f64..0.2, s in -3i64..3) {
        let m = Map::exp(1.0);
        let z_r = c(30.0, 0.0);
        let mut g = BranchContinuation::g_branch(&m, z_r, s);
        let w = c(30f64.ln() + dx, dy + 2.0 * PI * s as f64);
        let p = g.invert(&m, w.exp()).unwrap();
        prop_assert!((p - w).norm() < 1e-10);
    }
}
