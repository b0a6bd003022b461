use approx::assert_relative_eq;
use proptest::prelude::*;
use std::f64::consts::PI;
use wvtract::function::{continue_log, truncate_lacunary, LogValue};
use wvtract::{Complex, Map, Map32};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

#[test]
fn exp_at_origin_is_one() {
    let v = Map::exp(1.0).eval(c(0.0, 0.0)).unwrap();
    assert_relative_eq!(v.re, 1.0);
    assert_eq!(v.im, 0.0);
}

#[test]
fn cos_exp_at_i_pi() {
    // cos(i pi) = cosh(pi) and e^(i pi) = -1
    let cosh_pi = (PI.exp() + (-PI).exp()) / 2.0;
    let v = Map::cos_exp(1.0).eval(c(0.0, PI)).unwrap();
    assert_relative_eq!(v.re, -cosh_pi, max_relative = 1e-13);
    assert!(v.im.abs() < 1e-13);
    assert_relative_eq!(v.re, -11.591953275521519, max_relative = 1e-13);
}

#[test]
fn lacunary_at_origin_is_one() {
    let v = Map::exp_neg_lacunary(3, 1.0).eval(c(0.0, 0.0)).unwrap();
    assert_eq!(v, c(1.0, 0.0));
}

#[test]
fn cos_exp_log_modulus_closed_form() {
    let m = Map::cos_exp(1.0);
    for &(x, y) in &[(0.3, 2.0), (5.0, -1.0), (-2.0, 0.7), (12.0, 3.0)] {
        let lhs = m.log_modulus(c(x, y));
        let rhs = x + 0.5 * (x.cos().powi(2) + y.sinh().powi(2)).ln();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-12);
    }
}

#[test]
fn lacunary_log_modulus_at_twenty() {
    // 10^2 + 5^4 + 2.5^8 is exact in binary
    let g = 100.0 + 625.0 + 1525.87890625;
    assert_eq!(Map::exp_neg_lacunary(3, 1.0).log_modulus(c(20.0, 0.0)), -g);
    assert_relative_eq!(-g, -2250.87890625);
}

#[test]
fn exp_log_derivative_is_identity() {
    let z = c(3.0, -2.0);
    assert_relative_eq!((Map::exp(1.0).log_derivative(z).unwrap() - z).norm(), 0.0, epsilon = 1e-15);
}

#[test]
fn cos_exp_log_derivative_on_real_axis() {
    // A(x) = x (1 - tan x)
    let a = Map::cos_exp(1.0).log_derivative(c(0.2, 0.0)).unwrap();
    assert_relative_eq!(a.re, 0.2 * (1.0 - 0.2f64.tan()), max_relative = 1e-14);
    assert_relative_eq!(a.re, 0.15946, max_relative = 1e-4);
}

#[test]
fn lacunary_log_derivative_matches_difference_quotient() {
    let m = Map::exp_neg_lacunary(4, 1.0);
    let z = c(3.0, 1.5);
    let h = 1e-5;
    let fd = (m.log_value(z + h) - m.log_value(z - h)) / (2.0 * h);
    let a = m.log_derivative(z).unwrap();
    assert!((a - z * fd).norm() < 1e-6 * a.norm());
}

#[test]
fn continuation_along_vertical_path() {
    let m = Map::exp(1.0);
    let seed = LogValue::new(0.0, 0.0);
    let end = continue_log(&m, &[c(0.0, 0.0), c(0.0, 2.0 * PI)], seed).unwrap();
    assert!(end.log_modulus.abs() < 1e-14);
    assert_relative_eq!(end.argument, 2.0 * PI, max_relative = 1e-14);
    let same = continue_log(&m, &[c(1.0, 1.0)], LogValue::new(1.0, 1.0)).unwrap();
    assert_eq!(same, LogValue::new(1.0, 1.0));
}

#[test]
fn continuation_winds_once_around_simple_zero() {
    let m = Map::cos_exp(1.0);
    let center = c(PI / 2.0, 0.0);
    let n = 400;
    let path: Vec<Complex> = (0..=n)
        .map(|k| center + Complex::from_polar(0.5, 2.0 * PI * k as f64 / n as f64))
        .collect();
    let lv = m.log_value(path[0]);
    let end = continue_log(&m, &path, LogValue::new(lv.re, lv.im)).unwrap();
    // independent winding oracle: wrapped argument differences of f
    let dense = 100_000;
    let mut turn = 0.0;
    let mut prev = m.eval(path[0]).unwrap().arg();
    for k in 1..=dense {
        let z = center + Complex::from_polar(0.5, 2.0 * PI * k as f64 / dense as f64);
        let a = m.eval(z).unwrap().arg();
        let mut d = a - prev;
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        turn += d;
        prev = a;
    }
    assert_relative_eq!(turn, 2.0 * PI, max_relative = 1e-9);
    assert_relative_eq!(end.argument - lv.im, turn, max_relative = 1e-9);
}

/// Smallest `K` whose dropped tail `sum_{k>K} (r/2^k)^(2^k)` is below `tol`,
/// summed term by term in plain floating point.
fn tail_oracle(r: f64, tol: f64) -> u32 {
    (1..40u32)
        .find(|&big_k| {
            let tail: f64 = ((big_k + 1)..12).map(|k| (r / 2f64.powi(k as i32)).powi(1 << k)).sum();
            tail < tol
        })
        .unwrap()
}

#[test]
fn truncation_orders() {
    assert_eq!(tail_oracle(20.0, 1e-12), 5);
    assert_eq!(truncate_lacunary(20.0, 1e-12), 5);
    assert_eq!(tail_oracle(1.0, 1e-12), 3);
    assert_eq!(truncate_lacunary(1.0, 1e-12), 3);
    assert_eq!(truncate_lacunary(0.5, 0.5), 1);
}

#[test]
fn single_precision_agrees() {
    let m32 = Map32::cos_exp(1.0);
    let m64 = Map::cos_exp(1.0);
    let a = m32.log_modulus(num_complex::Complex::new(2.0f32, 1.5));
    let b = m64.log_modulus(c(2.0, 1.5));
    assert!((a as f64 - b).abs() < 1e-5);
}

fn maps() -> Vec<Map> {
    vec![Map::exp(1.0), Map::cos_exp(1.0), Map::exp_neg_lacunary(3, 1.0)]
}

proptest! {
    #[test]
    fn derivative_matches_central_difference(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let z = c(x, y);
        for m in maps() {
            let f = m.eval(z).unwrap();
            prop_assume!(f.norm() > 1e-3);
            let h = 1e-5;
            let fd = (m.eval(z + h).unwrap() - m.eval(z - h).unwrap()) / (2.0 * h);
            let d = m.derivative(z).unwrap();
            prop_assert!((d - fd).norm() <= 1e-6 * d.norm().max(1.0), "{} at {z}", m.name);
        }
    }

    #[test]
    fn real_coefficients_give_conjugate_values(x in -4.0f64..4.0, y in -4.0f64..4.0) {
        let z = c(x, y);
        for m in maps() {
            prop_assert!(m.has_real_coefficients());
            let a = m.eval(z).unwrap();
            let b = m.eval(z.conj()).unwrap();
            prop_assert!((a.conj() - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn log_modulus_matches_eval(x in -4.0f64..4.0, y in -4.0f64..4.0) {
        let z = c(x, y);
        for m in maps() {
            let f = m.eval(z).unwrap();
            prop_assume!(f.norm() > 1e-8);
            prop_assert!((m.log_modulus(z) - f.norm().ln()).abs() < 1e-10);
        }
    }
}
