//! Maximum modulus on circles and the growth functionals `B(r, v)`, `a(r, v)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::AnalyticMap;
use crate::num::{lit, to_f64, Real, C};

const COARSE_SAMPLES: usize = 4096;
const MAX_SAMPLES: usize = 1 << 20;
const GOLDEN_ITERS: usize = 80;

/// Maximum of `v` on one circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMax<T> {
    pub r: T,
    /// `B(r, v)`
    pub b: T,
    /// Angles in `(-pi, pi]` attaining `B` within [`argmax_tolerance`].
    pub argmax_args: Vec<T>,
    /// Number of angles in the final scan.
    pub samples: usize,
}

impl<T: Real> CircleMax<T> {
    /// The distinguished maximum point `z_r`: `Im z_r >= 0` first, then the
    /// smallest nonnegative angle.
    pub fn z_r(&self) -> C<T> {
        C::from_polar(self.r, select_angle(&self.argmax_args))
    }
}

/// Tolerance under which two maxima count as equal, relative for large `B`.
pub fn argmax_tolerance<T: Real>(b: T) -> T {
    lit::<T>(1e-6).max(b.abs() * lit(1e-12))
}

/// Picks the representative angle: least element of `theta mod 2 pi`, with
/// angles within `1e-9` of zero snapped to zero.
pub fn select_angle<T: Real>(args: &[T]) -> T {
    let two_pi = T::PI() + T::PI();
    let key = |t: T| {
        if t.abs() < lit(1e-9) {
            T::zero()
        } else {
            let m = t % two_pi;
            if m < T::zero() {
                m + two_pi
            } else {
                m
            }
        }
    };
    args.iter()
        .copied()
        .min_by(|a, b| key(*a).partial_cmp(&key(*b)).unwrap())
        .unwrap_or_else(T::zero)
}

/// `B(r, v) = max_{|z|=r} v(z)` with all maximizing angles.
pub fn max_on_circle<T: Real>(map: &AnalyticMap<T>, r: T, boundary_value: T) -> Result<CircleMax<T>> {
    if !(r > T::zero()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {}", r)));
    }
    let (best, args, samples) = circle_argmax(map, r);
    let b = best - boundary_value.ln();
    if !(b > T::zero()) {
        return Err(Error::TractEmptyOnCircle { r: to_f64(r) });
    }
    Ok(CircleMax {
        r,
        b,
        argmax_args: args,
        samples,
    })
}

/// Maximum of `log|f|` on `|z| = r`, its angles and the final sample count.
/// The scan doubles from 4096 angles until the argmax set is stable.
pub fn circle_argmax<T: Real>(map: &AnalyticMap<T>, r: T) -> (T, Vec<T>, usize) {
    let lm = |t: T| map.log_modulus(C::from_polar(r, t));
    let mut n = COARSE_SAMPLES;
    let mut prev: Option<Vec<T>> = None;
    loop {
        let (best, args) = scan_and_refine(&lm, n);
        let stable = prev.as_ref().is_some_and(|p| {
            p.len() == args.len() && p.iter().zip(&args).all(|(a, b)| (*a - *b).abs() < lit(1e-6))
        });
        if stable || n >= MAX_SAMPLES || best == T::neg_infinity() {
            return (best, args, n);
        }
        prev = Some(args);
        n *= 2;
    }
}

fn scan_and_refine<T: Real, F: Fn(T) -> T + Sync>(lm: &F, n: usize) -> (T, Vec<T>) {
    let two_pi = T::PI() + T::PI();
    let step = two_pi / lit(n as f64);
    // angles in (-pi, pi]
    let theta = |k: usize| -T::PI() + step * lit((k + 1) as f64);
    let vals: Vec<T> = (0..n).into_par_iter().map(|k| lm(theta(k))).collect();
    let coarse_max = vals.iter().copied().fold(T::neg_infinity(), T::max);
    if coarse_max == T::neg_infinity() {
        return (coarse_max, Vec::new());
    }
    // local maxima of the periodic sample sequence
    let mut peaks: Vec<(T, T)> = (0..n)
        .into_par_iter()
        .filter_map(|k| {
            let prev = vals[(k + n - 1) % n];
            let next = vals[(k + 1) % n];
            let v = vals[k];
            if v >= prev && v >= next && v.is_finite() {
                let t = theta(k);
                let (tb, vb) = golden_max(lm, t - step, t + step);
                Some((wrap(tb), vb))
            } else {
                None
            }
        })
        .collect();
    let best = peaks.iter().map(|p| p.1).fold(coarse_max, T::max);
    let tol = argmax_tolerance(best);
    peaks.retain(|p| best - p.1 <= tol);
    peaks.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut args: Vec<T> = Vec::new();
    for (t, _) in peaks {
        let dup = args.last().is_some_and(|last| (t - *last).abs() < lit(1e-6))
            || args.first().is_some_and(|first| {
                (t - *first - T::PI() - T::PI()).abs() < lit(1e-6)
            });
        if !dup {
            args.push(t);
        }
    }
    (best, args)
}

fn wrap<T: Real>(t: T) -> T {
    crate::num::wrap_angle(t)
}

/// Golden-section maximization on `[a, b]`.
fn golden_max<T: Real, F: Fn(T) -> T>(f: &F, mut a: T, mut b: T) -> (T, T) {
    let g: T = lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() <= T::epsilon() * lit(4.0) * (T::one() + a.abs()) {
            break;
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// One radius of a growth profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample<T> {
    pub r: T,
    /// `B(r, v)`
    pub b: T,
    /// `a(r, v) = dB/d log r`
    pub a: T,
    pub argmax_args: Vec<T>,
    /// False when monotonicity or convexity in `log r` fails beyond `1e-6`.
    pub regular: bool,
}

impl<T: Real> GrowthSample<T> {
    pub fn z_r(&self) -> C<T> {
        C::from_polar(self.r, select_angle(&self.argmax_args))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile<T> {
    pub samples: Vec<GrowthSample<T>>,
    pub boundary_value: T,
}

impl<T: Real> GrowthProfile<T> {
    pub fn radii(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.r).collect()
    }

    /// `(B, a)` at `r`, or `None` outside the grid. `B` is cubic Hermite
    /// in `log r` using `a = dB/dlog r`; `a` is linear in `log r`.
    pub fn interpolate(&self, r: T) -> Option<(T, T)> {
        let s = &self.samples;
        if s.is_empty() || r < s[0].r || r > s[s.len() - 1].r {
            return None;
        }
        let i = s.partition_point(|x| x.r < r);
        if i == 0 {
            return Some((s[0].b, s[0].a));
        }
        let (p, q) = (&s[i - 1], &s[i]);
        let h = q.r.ln() - p.r.ln();
        let w = (r.ln() - p.r.ln()) / h;
        let (w2, w3) = (w * w, w * w * w);
        let two: T = lit(2.0);
        let three: T = lit(3.0);
        let b = (two * w3 - three * w2 + T::one()) * p.b
            + (w3 - two * w2 + w) * h * p.a
            + (three * w2 - two * w3) * q.b
            + (w3 - w2) * h * q.a;
        Some((b, p.a + w * (q.a - p.a)))
    }
}

/// `n` radii from `r0` to `r1`, uniformly spaced in `log r`, with ratio at
/// most `max_ratio` between neighbours.
pub fn log_grid<T: Real>(r0: T, r1: T, max_ratio: T) -> Vec<T> {
    let span = (r1 / r0).ln();
    let n = (span / max_ratio.ln()).ceil().to_usize().unwrap_or(1).max(4) + 1;
    let h = span / lit((n - 1) as f64);
    (0..n).map(|k| (r0.ln() + h * lit(k as f64)).exp()).collect()
}

/// `B` and `a` over a log-uniform radius grid.
///
/// `a` uses centered differences with one Richardson step, one-sided
/// second-order differences at the ends.
pub fn growth_profile<T: Real>(
    map: &AnalyticMap<T>,
    radii: &[T],
    boundary_value: T,
) -> Result<GrowthProfile<T>> {
    let n = radii.len();
    if n < 5 {
        return Err(Error::InvalidInput(format!("growth grid needs at least 5 radii, got {n}")));
    }
    let logs: Vec<T> = radii.iter().map(|r| r.ln()).collect();
    let h = (logs[n - 1] - logs[0]) / lit((n - 1) as f64);
    for w in logs.windows(2) {
        let step = w[1] - w[0];
        if step <= T::zero() || step > lit(1.05f64.ln() + 1e-12) {
            return Err(Error::InvalidInput("radii must increase with ratio <= 1.05".into()));
        }
        if (step - h).abs() > h * lit(1e-6) {
            return Err(Error::InvalidInput("radii must be uniformly spaced in log r".into()));
        }
    }
    let maxima: Vec<CircleMax<T>> = radii
        .par_iter()
        .map(|&r| max_on_circle(map, r, boundary_value))
        .collect::<Result<_>>()?;
    let b: Vec<T> = maxima.iter().map(|m| m.b).collect();
    let two: T = lit(2.0);
    let a: Vec<T> = (0..n)
        .map(|i| {
            if i == 0 {
                (-lit::<T>(3.0) * b[0] + lit::<T>(4.0) * b[1] - b[2]) / (two * h)
            } else if i == n - 1 {
                (lit::<T>(3.0) * b[n - 1] - lit::<T>(4.0) * b[n - 2] + b[n - 3]) / (two * h)
            } else {
                let d1 = (b[i + 1] - b[i - 1]) / (two * h);
                if i >= 2 && i + 2 < n {
                    let d2 = (b[i + 2] - b[i - 2]) / (lit::<T>(4.0) * h);
                    (lit::<T>(4.0) * d1 - d2) / lit(3.0)
                } else {
                    d1
                }
            }
        })
        .collect();
    let slack: T = lit(1e-6);
    let samples = maxima
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            let mut regular = true;
            if i > 0 && b[i] < b[i - 1] - slack {
                regular = false;
            }
            if i > 0 && i + 1 < n && b[i + 1] - two * b[i] + b[i - 1] < -slack {
                regular = false;
            }
            GrowthSample {
                r: m.r,
                b: m.b,
                a: a[i],
                argmax_args: m.argmax_args,
                regular,
            }
        })
        .collect();
    Ok(GrowthProfile {
        samples,
        boundary_value,
    })
}

/// Interior radii of `profile` where `a <= B^(1+eps)` and the growth
/// inequality `B(s) <= B(r) + a log(s/r) + a^(1-alpha-beta)` holds at
/// `s = r exp(±a^(-beta))`, with `B(s)` evaluated directly on `map`.
///
/// A heuristic stand-in for "outside the exceptional set": it filters
/// radii where the computed profile misbehaves, nothing more.
pub fn regular_radii<T: Real>(
    map: &AnalyticMap<T>,
    profile: &GrowthProfile<T>,
    eps: T,
    alpha: T,
    beta: T,
) -> Result<Vec<T>> {
    if !(alpha > T::zero() && alpha < beta && eps > T::zero()) {
        return Err(Error::InvalidInput("need 0 < alpha < beta and eps > 0".into()));
    }
    let s = &profile.samples;
    if s.len() < 3 {
        return Ok(Vec::new());
    }
    let checked: Vec<Option<T>> = s[1..s.len() - 1]
        .par_iter()
        .map(|x| {
            if !x.regular || !(x.a > T::zero()) || x.a > x.b.powf(T::one() + eps) {
                return Ok(None);
            }
            let step = x.a.powf(-beta);
            let slack = x.a.powf(T::one() - alpha - beta);
            for sign in [T::one(), -T::one()] {
                let rs = x.r * (sign * step).exp();
                let bs = match max_on_circle(map, rs, profile.boundary_value) {
                    Ok(m) => m.b,
                    Err(Error::TractEmptyOnCircle { .. }) => T::zero(),
                    Err(e) => return Err(e),
                };
                if bs > x.b + x.a * sign * step + slack {
                    return Ok(None);
                }
            }
            Ok(Some(x.r))
        })
        .collect::<Result<_>>()?;
    Ok(checked.into_iter().flatten().collect())
}

/// A point on a maximum-modulus curve: `A(z) = z f'/f` real and positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TylerPoint<T> {
    pub r: T,
    pub z: C<T>,
    pub a: C<T>,
    /// `B(z) = z A'(z)`.
    pub b: C<T>,
}

/// Traces `Im A(z) = 0, Re A(z) > 0` through `radii` (increasing) by
/// Newton in the angle, seeded from the maximum at the first radius.
pub fn tyler_trace<T: Real>(map: &AnalyticMap<T>, radii: &[T]) -> Result<Vec<TylerPoint<T>>> {
    let Some(&r0) = radii.first() else {
        return Ok(Vec::new());
    };
    let mut theta = select_angle(&circle_argmax(map, r0).1);
    let mut out: Vec<TylerPoint<T>> = Vec::with_capacity(radii.len());
    for &r in radii {
        let start = C::from_polar(r0, theta);
        let lost = |last: &[TylerPoint<T>]| {
            let p = last.last().map(|p| p.z).unwrap_or(start);
            Error::LostCurve {
                r: to_f64(r),
                re: to_f64(p.re),
                im: to_f64(p.im),
            }
        };
        let mut converged = false;
        for _ in 0..60 {
            let z = C::from_polar(r, theta);
            let a = map.log_derivative(z)?;
            let b = map.tyler_b(z);
            if a.im.abs() < lit::<T>(1e-10) * (T::one() + a.norm()) {
                converged = true;
                break;
            }
            let dtheta = a.im / b.re;
            if !dtheta.is_finite() || dtheta.abs() > lit(0.5) {
                return Err(lost(&out));
            }
            theta = theta - dtheta;
        }
        let z = C::from_polar(r, theta);
        let a = map.log_derivative(z)?;
        if !converged || !(a.re > T::zero()) {
            return Err(lost(&out));
        }
        out.push(TylerPoint {
            r,
            z,
            a,
            b: map.tyler_b(z),
        });
    }
    Ok(out)
}

/// Sign change of `B(x) = x A'(x)` on the real segment `(lo, hi)` by
/// bisection; `None` if the endpoint signs agree.
pub fn tyler_real_threshold<T: Real>(map: &AnalyticMap<T>, lo: T, hi: T) -> Option<T> {
    let f = |x: T| map.tyler_b(C::new(x, T::zero())).re;
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    if fa.signum() == f(b).signum() {
        return None;
    }
    for _ in 0..200 {
        let m = (a + b) * lit(0.5);
        if m <= a || m >= b {
            break;
        }
        if f(m).signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Some((a + b) * lit(0.5))
}
