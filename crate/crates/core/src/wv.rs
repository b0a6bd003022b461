//! Measured error of the Wiman-Valiron approximation
//! `log f(z) = log f(z_r) + a log(z/z_r) + g(z)` on discs around `z_r`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{continue_log, AnalyticMap, LogValue};
use crate::maxmod::{max_on_circle, GrowthProfile};
use crate::num::{lit, to_f64, wrap_angle, Real, C};
use crate::tract::disc_in_tract;

/// `sqrt(1 - 2 tau)` below one half, 0 from one half on.
pub fn xi<T: Real>(tau: T) -> T {
    let one_minus = T::one() - tau - tau;
    if one_minus > T::zero() {
        one_minus.sqrt()
    } else {
        T::zero()
    }
}

/// Exponents with `1 - alpha - beta = xi(tau)`, `beta = 0.99 tau`; falls
/// back to `alpha = beta / 2` when that `alpha` is not in `(0, beta)`.
pub fn default_alpha_beta<T: Real>(tau: T) -> (T, T) {
    let beta = tau * lit(0.99);
    let alpha = T::one() - xi(tau) - beta;
    if alpha > T::zero() && alpha < beta {
        (alpha, beta)
    } else {
        (beta * lit(0.5), beta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WVDiscReport<T> {
    pub r: T,
    pub tau: T,
    pub xi: T,
    /// `a(r, v)` used for the disc.
    pub a: T,
    pub z_r: C<T>,
    /// `r / a^tau`
    pub radius: T,
    pub in_tract: bool,
    /// Minimum of `log|f| - log R` on the disc samples.
    pub margin: T,
    /// `sup |g|` over the samples; `None` when the disc leaves the tract.
    pub sup_g: Option<T>,
    /// `a^xi`
    pub bound: T,
    /// `sup|g| / a^xi` for `tau < 1/2`, `sup |e^g - 1|` for `tau > 1/2`.
    pub ratio: Option<T>,
    /// True when the ratio is the multiplicative error `|e^g - 1|`.
    pub multiplicative: bool,
    pub samples: usize,
    /// Doubling the sample count changed `sup|g|` by less than 5%.
    pub converged: bool,
}

/// Points on `ceil(sqrt(n))` rings times as many angles; just the center
/// for `n <= 1`.
pub fn ring_samples<T: Real>(center: C<T>, radius: T, n: usize) -> Vec<C<T>> {
    if n <= 1 {
        return vec![center];
    }
    let m = (n as f64).sqrt().ceil() as usize;
    let two_pi = T::PI() + T::PI();
    let mut out = Vec::with_capacity(m * m);
    for k in 1..=m {
        let rho = radius * lit(k as f64 / m as f64);
        for q in 0..m {
            // stagger rings so angles do not line up radially
            let th = two_pi * lit((q as f64 + 0.5 * (k % 2) as f64) / m as f64);
            out.push(center + C::from_polar(rho, th));
        }
    }
    out
}

/// `g(z)` at each point, continuing `log f` radially from `z_r` where the
/// principal value is taken, so that `g(z_r) = 0`.
pub fn g_values<T: Real>(map: &AnalyticMap<T>, z_r: C<T>, a: T, points: &[C<T>]) -> Result<Vec<C<T>>> {
    let base = map.log_value(z_r);
    let seed = LogValue::new(base.re, wrap_angle(base.im));
    points
        .par_iter()
        .map(|&z| {
            let lf = continue_log(map, &[z_r, z], seed).map_err(|e| match e {
                Error::ZeroOnPath(x, y) | Error::StepTooLarge(x, y) => Error::BranchLoss(x, y),
                other => other,
            })?;
            Ok(lf.as_complex() - seed.as_complex() - (z / z_r).ln() * a)
        })
        .collect()
}

fn sup_error<T: Real>(g: &[C<T>], multiplicative: bool) -> (T, T) {
    let one = C::new(T::one(), T::zero());
    let sup_g = g.iter().map(|x| x.norm()).fold(T::zero(), T::max);
    let sup_m = g.iter().map(|x| (x.exp() - one).norm()).fold(T::zero(), T::max);
    (sup_g, if multiplicative { sup_m } else { sup_g })
}

/// Measures `g` on `D(z_r, r / a^tau)` with `a` taken from `profile`.
pub fn measure_g<T: Real>(
    map: &AnalyticMap<T>,
    profile: &GrowthProfile<T>,
    r: T,
    tau: T,
    n_samples: usize,
) -> Result<WVDiscReport<T>> {
    let (_, a) = profile.interpolate(r).ok_or_else(|| {
        Error::InvalidInput(format!("r = {} lies outside the growth profile", to_f64(r)))
    })?;
    let z_r = max_on_circle(map, r, profile.boundary_value)?.z_r();
    measure_g_at(map, profile.boundary_value, z_r, a, tau, n_samples)
}

/// As [`measure_g`] with `z_r` and `a` supplied directly.
pub fn measure_g_at<T: Real>(
    map: &AnalyticMap<T>,
    boundary_value: T,
    z_r: C<T>,
    a: T,
    tau: T,
    n_samples: usize,
) -> Result<WVDiscReport<T>> {
    let r = z_r.norm();
    let radius = r / a.powf(tau);
    let x = xi(tau);
    let multiplicative = tau > lit(0.5);
    let disc = disc_in_tract(map, boundary_value, z_r, radius, n_samples.max(400));
    let mut report = WVDiscReport {
        r,
        tau,
        xi: x,
        a,
        z_r,
        radius,
        in_tract: disc.inside,
        margin: disc.margin,
        sup_g: None,
        bound: a.powf(x),
        ratio: None,
        multiplicative,
        samples: n_samples,
        converged: false,
    };
    if !disc.inside {
        return Ok(report);
    }
    let g1 = g_values(map, z_r, a, &ring_samples(z_r, radius, n_samples))?;
    let (s1, e1) = sup_error(&g1, multiplicative);
    let converged = if n_samples <= 1 {
        true
    } else {
        let g2 = g_values(map, z_r, a, &ring_samples(z_r, radius, 2 * n_samples))?;
        let (_, e2) = sup_error(&g2, multiplicative);
        (e2 - e1).abs() <= lit::<T>(0.05) * e2.max(T::min_positive_value())
    };
    report.sup_g = Some(s1);
    report.ratio = Some(if multiplicative { e1 } else { s1 / report.bound });
    report.converged = converged;
    Ok(report)
}

/// `a <= B^(1+eps)` at every sample of the profile.
pub fn check_epsilon<T: Real>(profile: &GrowthProfile<T>, eps: T) -> Vec<bool> {
    profile
        .samples
        .iter()
        .map(|s| s.a <= s.b.powf(T::one() + eps))
        .collect()
}

/// `max_s B(s) - [B(r) + a log(s/r) + a^(1-alpha-beta)]` over 41 values of
/// `log(s/r)` in `[-a^-beta, a^-beta]`, with `B(s)` interpolated from the
/// profile. The growth inequality holds when this is `<= 1e-9`.
pub fn check_growth<T: Real>(profile: &GrowthProfile<T>, r: T, alpha: T, beta: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < beta) {
        return Err(Error::InvalidInput("need 0 < alpha < beta".into()));
    }
    let (b, a) = profile.interpolate(r).ok_or(Error::SRangeOutsideGrid {
        r: to_f64(r),
        half_width: 0.0,
    })?;
    let w = a.powf(-beta);
    let slack = a.powf(T::one() - alpha - beta);
    let out_of_grid = || Error::SRangeOutsideGrid {
        r: to_f64(r),
        half_width: to_f64(w),
    };
    let mut worst = T::neg_infinity();
    for k in 0..=40 {
        let t = w * lit((k as f64 - 20.0) / 20.0);
        let (bs, _) = profile.interpolate(r * t.exp()).ok_or_else(out_of_grid)?;
        worst = worst.max(bs - (b + a * t + slack));
    }
    Ok(worst)
}
