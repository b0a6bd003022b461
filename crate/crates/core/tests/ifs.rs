use approx::assert_relative_eq;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;
use wvtract::ifs::{
    assemble_ifs, bowen_dimension, pressure, pressure_lower_bound_direct, ConformalIFS, IfsAssembly, IfsSetup,
};
use wvtract::{Error, Map};

/// Geometric midpoint of the critical values `k` and `k + 1` of `cos(z) e^z`.
fn cos_exp_midpoint(k: i64) -> f64 {
    (PI * (k as f64 + 0.5) + PI / 4.0 - 0.5 * 2f64.ln()).exp()
}

fn example_system() -> &'static IfsAssembly {
    static CELL: OnceLock<IfsAssembly> = OnceLock::new();
    CELL.get_or_init(|| assemble_ifs(&Map::cos_exp(1.0), &IfsSetup::new(cos_exp_midpoint(5), 2.0, 0.3)).unwrap())
}

#[test]
fn cantor_fixture_shape() {
    let ifs = ConformalIFS::similarity_fixture(2, 1.0 / 3.0).unwrap();
    assert_eq!(ifs.maps.len(), 2);
    for i in 0..2 {
        assert_relative_eq!(ifs.log_min_deriv(i).exp(), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(ifs.log_max_deriv(i).exp(), 1.0 / 3.0, max_relative = 1e-15);
    }
    assert!(ifs.disjoint);
}

#[test]
fn pressure_closed_forms() {
    let cantor = ConformalIFS::similarity_fixture(2, 1.0 / 3.0).unwrap();
    let p = pressure(&cantor, 2f64.ln() / 3f64.ln(), 4);
    assert!(p.lower.abs() < 1e-12 && p.upper.abs() < 1e-12);
    for (m, c) in [(3usize, 0.5f64), (5, 0.2), (4, 0.25)] {
        let ifs = ConformalIFS::similarity_fixture(m, c).unwrap();
        for t in [0.0, 0.4, 1.0, 2.5] {
            let p = pressure(&ifs, t, 3);
            assert_relative_eq!(p.lower, (m as f64 * c.powf(t)).ln(), epsilon = 1e-12);
            assert_relative_eq!(p.upper, p.lower, epsilon = 1e-12);
        }
    }
}

#[test]
fn direct_lower_bounds() {
    let cantor = ConformalIFS::similarity_fixture(2, 1.0 / 3.0).unwrap();
    assert_relative_eq!(pressure_lower_bound_direct(&cantor), (2.0f64 / 3.0).ln(), max_relative = 1e-12);
    let three = ConformalIFS::similarity_fixture(3, 0.5).unwrap();
    assert_relative_eq!(pressure_lower_bound_direct(&three), 1.5f64.ln(), max_relative = 1e-12);
}

#[test]
fn similarity_dimensions() {
    for (m, c) in [(2usize, 1.0 / 3.0), (3, 0.5), (4, 0.25)] {
        let ifs = ConformalIFS::similarity_fixture(m, c).unwrap();
        let d = bowen_dimension(&ifs, 1e-12).unwrap();
        let exact = (m as f64).ln() / (1.0 / c).ln();
        assert!((d.lo - exact).abs() < 1e-12 && (d.hi - exact).abs() < 1e-12);
        assert!(d.lo <= d.hi);
    }
    let cantor = bowen_dimension(&ConformalIFS::similarity_fixture(2, 1.0 / 3.0).unwrap(), 1e-12).unwrap();
    assert!((cantor.lo - 0.63093).abs() < 1e-3);
}

#[test]
fn far_family_yields_too_few_maps() {
    let mut setup = IfsSetup::new(cos_exp_midpoint(2), 2.0, 0.3);
    setup.log_s_range = Some((0.0, 1.0));
    let err = assemble_ifs(&Map::cos_exp(1.0), &setup).unwrap_err();
    assert!(matches!(err, Error::TooFewMaps { count: 0 }));
}

#[test]
fn example_system_counts_and_diameters() {
    let a = example_system();
    assert!(a.ifs.log_map_count() > 2f64.ln());
    assert!(a.log_d < 0.0);
    for m in &a.ifs.maps {
        assert!(m.log_diameter <= a.log_d + 1e-9);
    }
    assert!(a.g0_in_sr && a.covering.pass);
    // a |G_0'| is close to one over Q
    assert!(a.g0_scaled_range.0 > 0.99 && a.g0_scaled_range.1 < 1.01);
    // a from the profile and Re A(z_r) agree
    assert_relative_eq!(a.a, a.a_direct, max_relative = 1e-6);
    let need = (a.a.powf(0.7) / (16.0 * PI)).floor() as usize;
    assert!(a.lines_meeting_q_second >= need);
}

#[test]
fn example_system_junction_with_chart() {
    let j = &example_system().junction;
    assert!(j.max_chart_residual < 1e-8);
    assert!(j.max_derivative_mismatch < 1e-8);
    assert!(j.max_inverse_gap < 1e-8);
}

#[test]
fn example_system_dimension_exceeds_one() {
    let a = example_system();
    let p1 = pressure(&a.ifs, 1.0, 1);
    assert!(p1.lower > 0.0);
    assert!(pressure_lower_bound_direct(&a.ifs) > 0.0);
    let d = bowen_dimension(&a.ifs, 1e-12).unwrap();
    assert!(d.lo > 1.0 && d.hi >= d.lo && d.hi < 2.0);
    // predicted sum a^(1 - 2 tau) / (32 pi^2) in log scale, up to distortion
    let predicted = (a.a.powf(0.4) / (32.0 * PI * PI)).ln();
    assert!((p1.lower - predicted).abs() < 1.0, "{} vs {predicted}", p1.lower);
}

proptest! {
    #[test]
    fn similarity_dimension_oracle(m in 2usize..10, frac in 0.05f64..0.95) {
        let k = (m as f64).sqrt().ceil();
        let c = frac / k;
        let ifs = ConformalIFS::similarity_fixture(m, c).unwrap();
        let exact = (m as f64).ln() / (1.0 / c).ln();
        prop_assume!(exact < 4.0);
        let d = bowen_dimension(&ifs, 1e-12).unwrap();
        prop_assert!((d.lo - exact).abs() < 1e-9 && (d.hi - exact).abs() < 1e-9);
    }

    #[test]
    fn pressure_decreases_in_t(t1 in 0.0f64..3.0, t2 in 0.0f64..3.0) {
        prop_assume!(t1 < t2);
        let ifs = ConformalIFS::similarity_fixture(3, 0.3).unwrap();
        prop_assert!(pressure(&ifs, t1, 1).lower > pressure(&ifs, t2, 1).lower);
    }
}
