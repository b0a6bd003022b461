//! The logarithmic transform `F(w) = log f(e^w)`, continuation of its
//! inverse branches, and the geometric checks built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{track_log, track_log_all, AnalyticMap, FarFieldChart};
use crate::num::{lit, to_f64, winding_number, wrap_angle, Real, C};

/// Vertical strip `log(r/lambda) < Re w < log(lambda r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Strip<T> {
    pub fn new(r: T, lambda: T) -> Self {
        Self {
            lo: (r / lambda).ln(),
            hi: (lambda * r).ln(),
        }
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn contains(&self, w: C<T>) -> bool {
        w.re > self.lo && w.re < self.hi
    }

    pub fn dist_to_boundary(&self, w: C<T>) -> T {
        (w.re - self.lo).min(self.hi - w.re)
    }
}

/// Axis-aligned rectangle `|Re w - c.re| < half_re`, `|Im w - c.im| < half_im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect<T> {
    pub center: C<T>,
    pub half_re: T,
    pub half_im: T,
}

impl<T: Real> Rect<T> {
    pub fn square(center: C<T>, half: T) -> Self {
        Self {
            center,
            half_re: half,
            half_im: half,
        }
    }

    pub fn contains(&self, w: C<T>) -> bool {
        (w.re - self.center.re).abs() < self.half_re && (w.im - self.center.im).abs() < self.half_im
    }

    /// Signed distance to the boundary in the max-norm sense: positive
    /// inside, negative outside.
    pub fn inner_margin(&self, w: C<T>) -> T {
        (self.half_re - (w.re - self.center.re).abs()).min(self.half_im - (w.im - self.center.im).abs())
    }

    pub fn corners(&self) -> [C<T>; 4] {
        let (c, x, y) = (self.center, self.half_re, self.half_im);
        [
            c + C::new(x, y),
            c + C::new(-x, y),
            c + C::new(-x, -y),
            c + C::new(x, -y),
        ]
    }

    pub fn diameter(&self) -> T {
        (self.half_re * self.half_re + self.half_im * self.half_im).sqrt() * lit(2.0)
    }

    /// Same center, half-sides reduced by `d`.
    pub fn shrink(&self, d: T) -> Self {
        Self {
            center: self.center,
            half_re: self.half_re - d,
            half_im: self.half_im - d,
        }
    }

    /// Closed counter-clockwise boundary, `per_side` points per edge.
    pub fn boundary(&self, per_side: usize) -> Vec<C<T>> {
        let c = self.corners();
        let order = [c[2], c[3], c[0], c[1]];
        let mut out = Vec::with_capacity(4 * per_side + 1);
        for k in 0..4 {
            let (a, b) = (order[k], order[(k + 1) % 4]);
            for s in 0..per_side {
                out.push(a + (b - a) * lit::<T>(s as f64 / per_side as f64));
            }
        }
        out.push(order[0]);
        out
    }

    /// `k x k` grid of interior points (cell centers).
    pub fn grid(&self, k: usize) -> Vec<C<T>> {
        let mut out = Vec::with_capacity(k * k);
        for j in 0..k {
            for i in 0..k {
                let fx: T = lit((i as f64 + 0.5) / k as f64 * 2.0 - 1.0);
                let fy: T = lit((j as f64 + 0.5) / k as f64 * 2.0 - 1.0);
                out.push(self.center + C::new(fx * self.half_re, fy * self.half_im));
            }
        }
        out
    }
}

/// The square `S_r` around `w_r = log r + i Arg z_r`, side `a^-tau`.
pub fn square_sr<T: Real>(z_r: C<T>, a: T, tau: T) -> Rect<T> {
    Rect::square(C::new(z_r.norm().ln(), z_r.arg()), a.powf(-tau) * lit(0.5))
}

/// `Q`, `Q^`, `Q'` and `Q''` around `log f(z_r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectFamily<T> {
    pub q: Rect<T>,
    pub q_hat: Rect<T>,
    pub q_prime: Rect<T>,
    pub q_second: Rect<T>,
    pub d: T,
}

impl<T: Real> RectFamily<T> {
    /// Half-sides `a^(1-tau)` times 1/8, 1/4, 1/8 (minus `d`), 1/16.
    pub fn new(center: C<T>, a: T, tau: T, d: T) -> Self {
        let s = a.powf(T::one() - tau);
        let q = Rect::square(center, s / lit(8.0));
        Self {
            q,
            q_hat: Rect::square(center, s / lit(4.0)),
            q_prime: q.shrink(d),
            q_second: Rect::square(center, s / lit(16.0)),
            d,
        }
    }

    pub fn nested(&self) -> bool {
        self.q_second.half_re < self.q_prime.half_re && self.q_prime.half_re <= self.q.half_re
    }
}

/// `log f(z)` with principal argument.
pub fn principal_log_f<T: Real>(map: &AnalyticMap<T>, z: C<T>) -> C<T> {
    let l = map.log_value(z);
    C::new(l.re, wrap_angle(l.im))
}

/// Any determination of `F(w) = log f(e^w)`.
fn f_rep<T: Real>(map: &AnalyticMap<T>, w: C<T>) -> C<T> {
    map.log_value(w.exp())
}

/// `F'(w) = z f'(z)/f(z)` at `z = e^w`.
pub fn f_prime<T: Real>(map: &AnalyticMap<T>, w: C<T>) -> C<T> {
    let z = w.exp();
    z * map.dlog(z)
}

/// `F(w)` continued along the segment from `anchor` (where `F = anchor_value`).
pub fn f_eval<T: Real>(map: &AnalyticMap<T>, w: C<T>, anchor: C<T>, anchor_value: C<T>) -> Result<C<T>> {
    track_log(&[anchor, w], anchor_value, |x| f_rep(map, x), |x| f_prime(map, x)).map_err(branch_loss)
}

/// `F` continued along a polyline, value at every vertex.
pub fn f_along<T: Real>(map: &AnalyticMap<T>, path: &[C<T>], seed: C<T>) -> Result<Vec<C<T>>> {
    track_log_all(path, seed, |x| f_rep(map, x), |x| f_prime(map, x)).map_err(branch_loss)
}

fn branch_loss(e: Error) -> Error {
    match e {
        Error::ZeroOnPath(x, y) | Error::StepTooLarge(x, y) => Error::BranchLoss(x, y),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum BranchKind {
    /// Inverse branch onto `S_r + 2 pi i s`.
    G(i64),
    /// Inverse branch on the strip through `zeta_0 + 2 pi i u`.
    H(i64),
}

/// An inverse branch of `F` fixed by one (target, preimage) pair and
/// extended by continuation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchContinuation<T> {
    pub kind: BranchKind,
    pub anchor_target: C<T>,
    pub anchor_preimage: C<T>,
    /// Solved `(target, preimage)` pairs in the order they were reached.
    pub cache: Vec<(C<T>, C<T>)>,
}

const NEWTON_MAX: usize = 25;
const NEWTON_SLOW: usize = 5;

impl<T: Real> BranchContinuation<T> {
    /// `G_s` with `G_s(F(w_r)) = w_r + 2 pi i s`, `F(w_r)` principal.
    pub fn g_branch(map: &AnalyticMap<T>, z_r: C<T>, s: i64) -> Self {
        let w_r = C::new(z_r.norm().ln(), z_r.arg());
        let two_pi = T::PI() + T::PI();
        Self {
            kind: BranchKind::G(s),
            anchor_target: principal_log_f(map, z_r),
            anchor_preimage: w_r + C::new(T::zero(), two_pi * lit(s as f64)),
            cache: Vec::new(),
        }
    }

    /// `H_u` with `H_u(F(zeta_0)) = zeta_0 + 2 pi i u`.
    pub fn h_branch(zeta0: C<T>, f_zeta0: C<T>, u: i64) -> Self {
        let two_pi = T::PI() + T::PI();
        Self {
            kind: BranchKind::H(u),
            anchor_target: f_zeta0,
            anchor_preimage: zeta0 + C::new(T::zero(), two_pi * lit(u as f64)),
            cache: Vec::new(),
        }
    }

    /// Same branch shifted by `2 pi i k` in the preimage.
    pub fn translated(&self, k: i64) -> Self {
        let two_pi = T::PI() + T::PI();
        let shift = C::new(T::zero(), two_pi * lit(k as f64));
        let kind = match self.kind {
            BranchKind::G(s) => BranchKind::G(s + k),
            BranchKind::H(u) => BranchKind::H(u + k),
        };
        Self {
            kind,
            anchor_target: self.anchor_target,
            anchor_preimage: self.anchor_preimage + shift,
            cache: self.cache.iter().map(|&(t, p)| (t, p + shift)).collect(),
        }
    }

    /// Preimage of `target` continued along the straight segment from the
    /// anchor target.
    pub fn invert(&mut self, map: &AnalyticMap<T>, target: C<T>) -> Result<C<T>> {
        let out = self.invert_along(map, &[self.anchor_target, target])?;
        Ok(*out.last().unwrap())
    }

    /// Preimages along a polyline of targets starting at the anchor target
    /// (or at any previously solved target).
    pub fn invert_along(&mut self, map: &AnalyticMap<T>, path: &[C<T>]) -> Result<Vec<C<T>>> {
        let Some(&first) = path.first() else {
            return Ok(Vec::new());
        };
        let mut cur = if first == self.anchor_target {
            self.anchor_preimage
        } else {
            self.cache
                .iter()
                .find(|(t, _)| *t == first)
                .map(|p| p.1)
                .ok_or_else(|| Error::InvalidInput("path must start at a solved target".into()))?
        };
        let mut out = Vec::with_capacity(path.len());
        out.push(cur);
        for seg in path.windows(2) {
            cur = continue_inverse(map, seg[0], seg[1], cur)?;
            self.cache.push((seg[1], cur));
            out.push(cur);
        }
        Ok(out)
    }
}

/// Newton for `F(p) = target` from `p`, residual taken modulo `2 pi i`.
/// Returns the polished point and the iteration count.
pub fn newton_f<T: Real>(map: &AnalyticMap<T>, target: C<T>, mut p: C<T>) -> Result<(C<T>, usize)> {
    let tol = lit::<T>(1e-12) * target.norm().max(T::one());
    for it in 0..NEWTON_MAX {
        let fp = f_prime(map, p);
        if !(fp.norm() > lit(1e-300)) || !fp.re.is_finite() {
            return Err(Error::SingularJacobian(to_f64(p.re), to_f64(p.im)));
        }
        let raw = f_rep(map, p) - target;
        let res = C::new(raw.re, wrap_angle(raw.im));
        if res.norm() <= tol {
            return Ok((p, it));
        }
        let dp = res / fp;
        p = p - dp;
        if dp.norm() <= T::epsilon() * lit(8.0) * p.norm().max(T::one()) {
            return Ok((p, it + 1));
        }
    }
    Err(Error::StepLimit)
}

/// Predictor-corrector continuation of an inverse branch from `(t0, p0)`
/// to `t1`, halving the step when Newton is slow or the preimage jumps by
/// `pi` or more.
fn continue_inverse<T: Real>(map: &AnalyticMap<T>, t0: C<T>, t1: C<T>, p0: C<T>) -> Result<C<T>> {
    let (mut t, mut p) = (t0, p0);
    let mut frac = T::one();
    let max_dw: T = lit(0.25);
    let mut halvings = 0;
    while t != t1 {
        let fp = f_prime(map, p);
        if !(fp.norm() > lit(1e-300)) {
            return Err(Error::SingularJacobian(to_f64(p.re), to_f64(p.im)));
        }
        let remaining = t1 - t;
        // keep the predicted preimage step below max_dw
        let cap = max_dw * fp.norm() / remaining.norm();
        let h = frac.min(cap).min(T::one());
        let next_t = if h >= T::one() { t1 } else { t + remaining * h };
        let guess = p + (next_t - t) / fp;
        match newton_f(map, next_t, guess) {
            Ok((q, iters)) if iters <= NEWTON_SLOW && (q - p).norm() < T::PI() => {
                t = next_t;
                p = q;
                frac = (frac + frac).min(T::one());
            }
            Ok(_) | Err(Error::StepLimit) => {
                frac = h * lit(0.5);
                halvings += 1;
                if halvings > 200 || frac < lit(1e-14) {
                    return Err(Error::StepLimit);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(p)
}

/// A point `zeta_0` with `|f(e^zeta_0)| = r` on the ray `arg z = theta`,
/// found by bisection on `|z|` in `(0, r]`.
pub fn level_anchor<T: Real>(map: &AnalyticMap<T>, r: T, theta: T) -> Result<C<T>> {
    let target = r.ln();
    let h = |t: T| map.log_modulus(C::from_polar(t, theta)) - target;
    let mut hi = r;
    if !(h(hi) > T::zero()) {
        return Err(Error::InvalidInput("no level crossing on the ray".into()));
    }
    let mut lo = r * lit(1e-12);
    if h(lo) > T::zero() {
        return Err(Error::InvalidInput("ray starts above the level".into()));
    }
    for _ in 0..200 {
        let m = (lo + hi) * lit(0.5);
        if m <= lo || m >= hi {
            break;
        }
        if h(m) > T::zero() {
            hi = m;
        } else {
            lo = m;
        }
    }
    Ok(C::new(((lo + hi) * lit(0.5)).ln(), theta))
}

/// Outcome of [`koebe_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KoebeReport<T> {
    /// `max |H'(w)| dist(w, boundary) / (4 pi)`; the bound holds when <= 1.
    pub max_violation: T,
    pub worst_w: C<T>,
    pub samples: usize,
}

/// Samples `|H'| = 1/|F'(H(w))|` on an `m x m` grid of the strip, with
/// `|Im w - Im F(zeta_0)| <= im_half_range`, marching the branch through
/// the grid in snake order.
pub fn koebe_check<T: Real>(
    map: &AnalyticMap<T>,
    branch: &mut BranchContinuation<T>,
    strip: &Strip<T>,
    m: usize,
    im_half_range: T,
) -> Result<KoebeReport<T>> {
    let c_im = branch.anchor_target.im;
    let mut path = vec![branch.anchor_target];
    for j in 0..m {
        let y = c_im + im_half_range * lit((j as f64 + 0.5) / m as f64 * 2.0 - 1.0);
        for k in 0..m {
            let i = if j % 2 == 0 { k } else { m - 1 - k };
            let x = strip.lo + strip.width() * lit((i as f64 + 0.5) / m as f64);
            path.push(C::new(x, y));
        }
    }
    let pre = branch.invert_along(map, &path)?;
    let four_pi = lit::<T>(4.0) * T::PI();
    let mut worst = (T::neg_infinity(), path[1]);
    for (w, zeta) in path.iter().zip(&pre).skip(1) {
        let hp = T::one() / f_prime(map, *zeta).norm();
        let v = hp * strip.dist_to_boundary(*w) / four_pi;
        if v > worst.0 {
            worst = (v, *w);
        }
    }
    Ok(KoebeReport {
        max_violation: worst.0,
        worst_w: worst.1,
        samples: m * m,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport<T> {
    /// Probe points: center of `Q^` then its four corners.
    pub probes: Vec<C<T>>,
    pub windings: Vec<T>,
    pub max_residual: T,
    /// Smallest max-norm distance from the image curve to `Q^` (negative
    /// if the curve enters it).
    pub min_distance: T,
    pub points: usize,
    pub pass: bool,
}

/// Traces `F(boundary of S_r)` and winds it around the center and corners
/// of `Q^`.
pub fn covering_check<T: Real>(map: &AnalyticMap<T>, sr: &Rect<T>, q_hat: &Rect<T>) -> Result<CoveringReport<T>> {
    let w_r = sr.center;
    let f_r = principal_log_f(map, w_r.exp());
    let mut probes = vec![q_hat.center];
    probes.extend(q_hat.corners());
    // refine until consecutive image points are close relative to the probes
    let mut per_side = 1024;
    loop {
        let boundary = sr.boundary(per_side);
        let mut path = vec![w_r];
        path.extend(&boundary);
        let image = f_along(map, &path, f_r)?[1..].to_vec();
        let min_probe_dist = image
            .iter()
            .flat_map(|z| probes.iter().map(move |p| (*z - *p).norm()))
            .fold(T::infinity(), T::min);
        let max_gap = image
            .windows(2)
            .map(|s| (s[1] - s[0]).norm())
            .fold(T::zero(), T::max);
        if max_gap < min_probe_dist * lit(0.1) || per_side >= 1 << 16 {
            let windings: Vec<T> = probes.iter().map(|p| winding_number(&image, *p)).collect();
            let max_residual = windings
                .iter()
                .map(|w| (*w - w.round()).abs())
                .fold(T::zero(), T::max);
            if max_residual > lit(0.01) {
                return Err(Error::CurveSelfIntersectionSuspected {
                    winding: to_f64(windings.iter().copied().fold(T::zero(), T::max)),
                });
            }
            let min_distance = image
                .iter()
                .map(|z| -q_hat.inner_margin(*z))
                .fold(T::infinity(), T::min);
            let pass = windings.iter().all(|w| w.round() == T::one()) && min_distance > T::zero();
            return Ok(CoveringReport {
                probes,
                windings,
                max_residual,
                min_distance,
                points: image.len(),
                pass,
            });
        }
        per_side *= 2;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCurve<T> {
    pub points: Vec<C<T>>,
    pub length: T,
    /// Max of `|Re F - level|` along the trace.
    pub max_residual: T,
}

/// Traces `Re F = level` from `start` in the direction `i / F'` (or its
/// negative with `reverse`), stopping after `budget` arclength or on
/// leaving `bounds`.
pub fn level_curve_trace<T: Real>(
    map: &AnalyticMap<T>,
    start: C<T>,
    level: T,
    step: T,
    budget: T,
    bounds: Option<&Rect<T>>,
    reverse: bool,
) -> Result<LevelCurve<T>> {
    let re_f = |z: C<T>| map.log_modulus(z.exp());
    let correct = |mut z: C<T>| -> Result<C<T>> {
        for _ in 0..30 {
            let fp = f_prime(map, z);
            if fp.norm() < lit(1e-10) {
                return Err(Error::CriticalPointOnCurve(to_f64(z.re), to_f64(z.im)));
            }
            let e = re_f(z) - level;
            let dz = fp.conj() * (e / fp.norm_sqr());
            z = z - dz;
            if e.abs() < lit::<T>(1e-12) * level.abs().max(T::one()) {
                break;
            }
        }
        Ok(z)
    };
    let sign = if reverse { -T::one() } else { T::one() };
    let mut z = correct(start)?;
    let mut points = vec![z];
    let mut length = T::zero();
    let mut max_residual = (re_f(z) - level).abs();
    while length < budget {
        let fp = f_prime(map, z);
        if fp.norm() < lit(1e-10) {
            return Err(Error::CriticalPointOnCurve(to_f64(z.re), to_f64(z.im)));
        }
        let dir = C::new(T::zero(), sign) * fp.conj() / fp.norm();
        let next = correct(z + dir * step)?;
        length = length + (next - z).norm();
        z = next;
        max_residual = max_residual.max((re_f(z) - level).abs());
        points.push(z);
        if let Some(b) = bounds {
            if !b.contains(z) {
                break;
            }
        }
    }
    Ok(LevelCurve {
        points,
        length,
        max_residual,
    })
}

/// Length of the part of a polyline inside `rect`, and whether it meets
/// `inner`.
pub fn length_inside<T: Real>(points: &[C<T>], rect: &Rect<T>, inner: &Rect<T>) -> (T, bool) {
    let mut len = T::zero();
    let mut meets = false;
    for s in points.windows(2) {
        if rect.contains(s[0]) && rect.contains(s[1]) {
            len = len + (s[1] - s[0]).norm();
        }
        meets |= inner.contains(s[0]);
    }
    (len, meets)
}

/// One horizontal level line `Im zeta = im` of a far-field chart across a
/// rectangle, valid for `x_lo <= Re zeta <= x_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartLine<T> {
    /// Index `u` of the `2 pi i u` translate.
    pub u: i64,
    /// +1 for the arm with `Im F -> +inf`, -1 for the other.
    pub arm: i8,
    pub im: T,
    pub x_lo: T,
    pub x_hi: T,
    /// `|c|` of the chart the line belongs to.
    pub slope_norm: T,
    /// Natural log of a bound on the vertical deviation of the true level
    /// curve from the line over `[x_lo, x_hi]`.
    pub log_deviation: T,
}

/// Level lines `Re F = level` of the far-field charts crossing `rect`,
/// computed in log scale. Inside a chart `F = c e^zeta + d`, so
/// `Re F = level` is `Im zeta = ±pi/2 - arg c + 2 pi u` up to a deviation
/// of order `|level - Re d| / (|c| e^(Re zeta))`.
pub fn chart_level_lines<T: Real>(charts: &[FarFieldChart<T>], rect: &Rect<T>, level: T, min_im: T) -> Vec<ChartLine<T>> {
    let two_pi = T::PI() + T::PI();
    let x_lo = rect.center.re - rect.half_re;
    let x_hi = rect.center.re + rect.half_re;
    let y_lo = rect.center.im - rect.half_im;
    let y_hi = rect.center.im + rect.half_im;
    let mut out = Vec::new();
    for ch in charts {
        for arm in [1i8, -1] {
            let phi = T::FRAC_PI_2() * lit(arm as f64) - ch.slope.arg();
            if !ch.covers(C::new(x_lo, phi), min_im) || !ch.covers(C::new(x_hi, phi), min_im) {
                continue;
            }
            let dev = (level - ch.offset.re).abs().max(lit(1e-300)).ln()
                - ch.slope.norm().ln()
                - x_lo
                + lit::<T>(2.0).ln();
            let u0 = ((y_lo - phi) / two_pi).ceil().to_i64().unwrap_or(0);
            let u1 = ((y_hi - phi) / two_pi).floor().to_i64().unwrap_or(-1);
            for u in u0..=u1 {
                let im = phi + two_pi * lit(u as f64);
                if im > y_lo && im < y_hi {
                    out.push(ChartLine {
                        u,
                        arm,
                        im,
                        x_lo,
                        x_hi,
                        slope_norm: ch.slope.norm(),
                        log_deviation: dev,
                    });
                }
            }
        }
    }
    out.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
    out
}

/// Natural log of the number of integers `s` with `2 pi s` in
/// `[|c| e^x0, |c| e^x1)`, i.e. the targets `w_r + 2 pi i s` whose
/// preimages on one arm have `x0 <= Re zeta < x1`. Exact floor below
/// `e^40`, continuous above (relative error below `e^-40`).
pub fn log_target_count<T: Real>(slope_norm: T, x0: T, x1: T) -> T {
    let two_pi = T::PI() + T::PI();
    let ln_c = slope_norm.ln();
    let log_hi = x1 + ln_c - two_pi.ln();
    if log_hi < lit(40.0) {
        let hi = log_hi.exp();
        let lo = (x0 + ln_c - two_pi.ln()).exp();
        let n = hi.ceil() - lo.ceil();
        return if n > T::zero() { n.ln() } else { T::neg_infinity() };
    }
    // log(e^x1 - e^x0) = x1 + log(1 - e^(x0 - x1)), minus one for the floor
    log_hi + (-(x0 - x1).exp()).ln_1p() + (-(-log_hi).exp()).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    type C64 = C<f64>;

    #[test]
    fn f_of_exp_is_exp() {
        let m = AnalyticMap::<f64>::exp(1.0);
        let w = C64::new(1.2, 0.4);
        let f = f_eval(&m, w, C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        assert!((f - w.exp()).norm() < 1e-12);
        let f2 = f_eval(&m, w + C64::new(0.0, 2.0 * PI), C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        assert!((f2 - f).norm() < 1e-10);
    }

    #[test]
    fn exp_inverse_branches() {
        let m = AnalyticMap::<f64>::exp(1.0);
        let z_r = C64::new(100.0, 0.0);
        let mut g0 = BranchContinuation::g_branch(&m, z_r, 0);
        let mut g3 = BranchContinuation::g_branch(&m, z_r, 3);
        let target = C64::new(103.0, 5.0);
        let p0 = g0.invert(&m, target).unwrap();
        let p3 = g3.invert(&m, target).unwrap();
        assert!((p0 - target.ln()).norm() < 1e-12);
        assert!((p3 - p0 - C64::new(0.0, 6.0 * PI)).norm() < 1e-9);
    }

    #[test]
    fn rect_geometry() {
        let r = Rect::square(C64::new(0.0, 0.0), 2.0);
        assert!(r.contains(C64::new(1.9, -1.9)));
        assert!(!r.contains(C64::new(2.1, 0.0)));
        assert_relative_eq!(r.inner_margin(C64::new(1.5, 0.0)), 0.5);
        let b = r.boundary(8);
        assert_eq!(b.len(), 33);
        assert_relative_eq!(winding_number(&b, C64::new(0.3, 0.1)), 1.0, epsilon = 1e-12);
        let fam = RectFamily::new(C64::new(0.0, 0.0), 1.0e4, 0.3, 0.5);
        assert!(fam.nested());
    }

    #[test]
    fn level_trace_exp() {
        // F(w) = e^w; Re F = log r is e^x cos y = log r
        let m = AnalyticMap::<f64>::exp(1.0);
        let level = 100f64.ln();
        let start = C64::new(level.ln(), 0.0);
        let c = level_curve_trace(&m, start, level, 0.01, 1.0, None, false).unwrap();
        assert!(c.max_residual < 1e-9);
        assert!(c.points.last().unwrap().im.abs() > 0.5);
    }

    #[test]
    fn target_counts() {
        // 2 pi s in [e^3, e^5) with |c| = 1: s from ceil(3.197) to 23
        let n = log_target_count(1.0f64, 3.0, 5.0).exp();
        let expect = ((5f64).exp() / (2.0 * PI)).ceil() - ((3f64).exp() / (2.0 * PI)).ceil();
        assert_relative_eq!(n, expect, max_relative = 1e-12);
        let big: f64 = log_target_count(2f64.sqrt(), 1.0e7, 1.0e7 + 0.5);
        let expect = 1.0e7 + 0.5 + 0.5 * 2f64.ln() - (2.0 * PI).ln() + (-(-0.5f64).exp()).ln_1p();
        assert_relative_eq!(big, expect, max_relative = 1e-15);
    }
}
