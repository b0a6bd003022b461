//! Finite conformal iterated function systems, their pressure and
//! Bowen-zero dimension bounds, and assembly of the system
//! `{H_u o G_s : Q -> Q}` for a function with far-field charts.
//!
//! All derivative data is kept as natural logarithms: at the radii where
//! the pressure becomes positive the map derivatives are of size
//! `e^(-10^8)` and the multiplicities of size `e^(10^8)`.
//!
//! Every map of a system is stored as `|phi_i'(w)| = base(w) * k_i` with a
//! shared sampled factor `base` over `Q` and a per-map interval for `k_i`.
//! Maps with identical bounds are aggregated with a multiplicity. With all
//! compositions admissible the word sums factorize, so the pressure is
//! `log sum_i m_i k_i^t` and the word length cancels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branches::{
    chart_level_lines, covering_check, log_target_count, principal_log_f, square_sr,
    BranchContinuation, CoveringReport, Rect, RectFamily,
};
use crate::error::{Error, Result};
use crate::maxmod::{growth_profile, log_grid, max_on_circle};
use crate::num::{log_sum_exp, C};
use crate::Map;

type C64 = C<f64>;

/// Which maps an entry of a system stands for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapLabel {
    /// One explicitly given map.
    Single { index: usize },
    /// All `H_u o G_s` whose image lies on a level line of the given arm
    /// with `x_lo <= Re zeta < x_hi`, over `lines` parallel lines.
    Block { arm: i8, lines: u64, x_lo: f64, x_hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionMap {
    pub label: MapLabel,
    /// Natural log of the number of maps this entry stands for.
    pub log_multiplicity: f64,
    /// `log k_i` lower and upper bound.
    pub log_offset_lo: f64,
    pub log_offset_hi: f64,
    /// Natural log of a bound on the image diameter.
    pub log_diameter: f64,
    /// Bounding box of the image (of the union for blocks).
    pub image_bounds: Rect<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalIFS {
    pub q: Rect<f64>,
    /// `log base(w)` at the derivative sample points of `Q`.
    pub log_base: Vec<f64>,
    pub maps: Vec<ContractionMap>,
    pub disjoint: bool,
}

impl ConformalIFS {
    /// Builds a system from explicit maps and checks pairwise disjointness
    /// of image boxes (open interiors).
    pub fn new(q: Rect<f64>, log_base: Vec<f64>, maps: Vec<ContractionMap>) -> Result<Self> {
        if maps.is_empty() || log_sum_exp(maps.iter().map(|m| m.log_multiplicity)) < 2f64.ln() - 1e-12 {
            return Err(Error::TooFewMaps {
                count: maps.len(),
            });
        }
        for (i, m) in maps.iter().enumerate() {
            if !inside(&m.image_bounds, &q) {
                return Err(Error::InvalidInput(format!("image of map {i} leaves Q")));
            }
        }
        for i in 0..maps.len() {
            for j in i + 1..maps.len() {
                if overlap(&maps[i].image_bounds, &maps[j].image_bounds) {
                    return Err(Error::DisjointnessFailure(i, j));
                }
            }
        }
        Ok(Self {
            q,
            log_base,
            maps,
            disjoint: true,
        })
    }

    /// `m` similarities of ratio `c` of the unit square, images on a
    /// `ceil(sqrt m)` grid.
    pub fn similarity_fixture(m: usize, c: f64) -> Result<Self> {
        let q = Rect::square(C64::new(0.5, 0.5), 0.5);
        let k = (m as f64).sqrt().ceil() as usize;
        let maps = (0..m)
            .map(|i| {
                let (gx, gy) = ((i % k) as f64 / k as f64, (i / k) as f64 / k as f64);
                ContractionMap {
                    label: MapLabel::Single { index: i },
                    log_multiplicity: 0.0,
                    log_offset_lo: c.ln(),
                    log_offset_hi: c.ln(),
                    log_diameter: (c * 2f64.sqrt()).ln(),
                    image_bounds: Rect::square(C64::new(gx + c / 2.0, gy + c / 2.0), c / 2.0),
                }
            })
            .collect();
        Self::new(q, vec![0.0], maps)
    }

    pub fn base_range(&self) -> (f64, f64) {
        let lo = self.log_base.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.log_base.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn log_min_deriv(&self, i: usize) -> f64 {
        self.base_range().0 + self.maps[i].log_offset_lo
    }

    pub fn log_max_deriv(&self, i: usize) -> f64 {
        self.base_range().1 + self.maps[i].log_offset_hi
    }

    /// Natural log of the number of maps.
    pub fn log_map_count(&self) -> f64 {
        log_sum_exp(self.maps.iter().map(|m| m.log_multiplicity))
    }

    /// Largest `log(max_deriv / min_deriv)` over the maps.
    pub fn log_distortion(&self) -> f64 {
        (0..self.maps.len())
            .map(|i| self.log_max_deriv(i) - self.log_min_deriv(i))
            .fold(0.0, f64::max)
    }
}

fn inside(a: &Rect<f64>, q: &Rect<f64>) -> bool {
    (a.center.re - q.center.re).abs() + a.half_re <= q.half_re + 1e-12 * q.half_re
        && (a.center.im - q.center.im).abs() + a.half_im <= q.half_im + 1e-12 * q.half_im
}

fn overlap(a: &Rect<f64>, b: &Rect<f64>) -> bool {
    (a.center.re - b.center.re).abs() < a.half_re + b.half_re
        && (a.center.im - b.center.im).abs() < a.half_im + b.half_im
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureEstimate {
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Pressure bounds at `t`. Word sums over length `n` factorize to `n`
/// times the single-letter sum, so `n` only scales and cancels.
pub fn pressure(ifs: &ConformalIFS, t: f64, n: usize) -> PressureEstimate {
    assert!(n >= 1 && t >= 0.0);
    let (lo_b, hi_b) = ifs.base_range();
    let sum = |base: f64, hi: bool| {
        log_sum_exp(ifs.maps.iter().map(|m| {
            let off = if hi { m.log_offset_hi } else { m.log_offset_lo };
            m.log_multiplicity + t * (base + off)
        }))
    };
    PressureEstimate {
        t,
        lower: sum(lo_b, false),
        upper: sum(hi_b, true),
    }
}

/// `log min_w sum_i m_i |phi_i'(w)|` over the derivative samples.
pub fn pressure_lower_bound_direct(ifs: &ConformalIFS) -> f64 {
    let (lo_b, _) = ifs.base_range();
    lo_b + log_sum_exp(ifs.maps.iter().map(|m| m.log_multiplicity + m.log_offset_lo))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionInterval {
    /// Zero of the lower pressure curve (a lower bound for the dimension).
    pub lo: f64,
    /// Zero of the upper pressure curve.
    pub hi: f64,
    pub tol: f64,
    /// `hi - lo`, the part of the width due to distortion.
    pub distortion_gap: f64,
    pub p1: PressureEstimate,
}

const T_MAX: f64 = 4.0;

/// Zeros of the lower and upper pressure curves by bisection, each run to
/// machine precision; `lo` keeps `P_lower(lo) >= 0` and `hi` keeps
/// `P_upper(hi) <= 0`.
pub fn bowen_dimension(ifs: &ConformalIFS, tol: f64) -> Result<DimensionInterval> {
    let lower = |t: f64| pressure(ifs, t, 1).lower;
    let upper = |t: f64| pressure(ifs, t, 1).upper;
    let bracket = |p: &dyn Fn(f64) -> f64| -> Result<(f64, f64)> {
        if !(p(0.0) > 0.0) {
            return Err(Error::NoBracket { t_max: 0.0 });
        }
        let mut b = 0.5;
        while p(b) >= 0.0 {
            b *= 2.0;
            if b > T_MAX {
                return Err(Error::NoBracket { t_max: T_MAX });
            }
        }
        let (mut a, mut b) = (0.0, b);
        for _ in 0..400 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if p(m) >= 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        Ok((a, b))
    };
    let (lo, _) = bracket(&lower)?;
    let (_, hi) = bracket(&upper)?;
    Ok(DimensionInterval {
        lo,
        hi,
        tol,
        distortion_gap: hi - lo,
        p1: pressure(ifs, 1.0, 1),
    })
}

/// Parameters of [`assemble_ifs`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsSetup {
    pub r: f64,
    pub lambda: f64,
    pub tau: f64,
    /// Initial derivative grid per axis over `Q` (doubled until stable).
    pub grid: usize,
    /// Width in `Re zeta` of one aggregated block of maps.
    pub block_width: f64,
    /// Restrict level lines to these translate indices.
    pub u_range: Option<(i64, i64)>,
    /// Restrict blocks to `log|s|` in this range.
    pub log_s_range: Option<(f64, f64)>,
    /// Minimum `|Im|` of every cosine argument for a chart to be used.
    pub chart_min_im: f64,
}

impl IfsSetup {
    pub fn new(r: f64, lambda: f64, tau: f64) -> Self {
        Self {
            r,
            lambda,
            tau,
            grid: 16,
            block_width: 0.5,
            u_range: None,
            log_s_range: None,
            chart_min_im: 20.0,
        }
    }
}

/// Comparison of numerically continued `H` with the far-field chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JunctionReport {
    pub s_values: Vec<i64>,
    /// `|c e^zeta + d - target|` modulo `2 pi i` at the continued points.
    pub max_chart_residual: f64,
    /// Max relative difference between `|F'(zeta)|` and `|c| e^(Re zeta)`.
    pub max_derivative_mismatch: f64,
    /// Max distance between the continued point and the chart inverse
    /// of the same target (nearest `2 pi i` translate).
    pub max_inverse_gap: f64,
    /// Max of the chart's own error bound at the continued points.
    pub max_chart_error_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsAssembly {
    pub ifs: ConformalIFS,
    pub rects: RectFamily<f64>,
    pub sr: Rect<f64>,
    pub z_r: C64,
    /// `a(r, v)` from the growth profile.
    pub a: f64,
    /// `Re A(z_r)`, the direct value of the same quantity.
    pub a_direct: f64,
    /// Range of `a |G_0'|` over `Q`.
    pub g0_scaled_range: (f64, f64),
    pub g0_grid: usize,
    /// `G_0(Q)` sampled inside `S_r`.
    pub g0_in_sr: bool,
    pub covering: CoveringReport<f64>,
    pub lines_in_q: usize,
    pub lines_meeting_q_second: usize,
    pub log_d: f64,
    pub junction: JunctionReport,
    pub disjointness: String,
}

fn a_from_profile(map: &Map, r: f64) -> Result<f64> {
    let grid = log_grid(r / 1.04, r * 1.04, 1.02);
    let p = growth_profile(map, &grid, map.boundary_value)?;
    Ok(p.interpolate(r).expect("r inside its own grid").1)
}

/// `log|G_0'|` on a `k x k` grid of `Q` plus its boundary, and whether
/// every sampled preimage lies in `S_r`.
fn sample_g0(map: &Map, z_r: C64, q: &Rect<f64>, sr: &Rect<f64>, k: usize) -> Result<(Vec<f64>, bool)> {
    let mut pts = q.grid(k);
    pts.extend(q.boundary(k));
    let res: Vec<(f64, bool)> = pts
        .par_iter()
        .map(|&w| {
            let mut g = BranchContinuation::g_branch(map, z_r, 0);
            let p = g.invert(map, w)?;
            let fp = crate::branches::f_prime(map, p);
            Ok((-fp.norm().ln(), sr.contains(p)))
        })
        .collect::<Result<_>>()?;
    Ok((res.iter().map(|x| x.0).collect(), res.iter().all(|x| x.1)))
}

/// Continues `H_0` numerically to `w_r + 2 pi i s` for a few moderate `s`
/// and compares with the chart formula.
const JUNCTION_MIN_IM: f64 = 5.0;

pub fn junction_check(map: &Map, z_r: C64, s_values: &[i64]) -> Result<JunctionReport> {
    let r = z_r.norm();
    let zeta0 = crate::branches::level_anchor(map, r, z_r.arg())?;
    let f0 = principal_log_f(map, zeta0.exp());
    let charts = map.far_field_charts();
    let two_pi = 2.0 * std::f64::consts::PI;
    let w_r = C64::new(r.ln(), z_r.arg());
    let mut rep = JunctionReport {
        s_values: s_values.to_vec(),
        max_chart_residual: 0.0,
        max_derivative_mismatch: 0.0,
        max_inverse_gap: 0.0,
        max_chart_error_bound: 0.0,
    };
    for &s in s_values {
        let mut h = BranchContinuation::h_branch(zeta0, f0, 0);
        let target = w_r + C64::new(0.0, two_pi * s as f64);
        // vertical path inside the strip, then across to the target
        let path = [f0, C64::new(f0.re, target.im), target];
        let zeta = *h.invert_along(map, &path)?.last().unwrap();
        let chart = charts
            .iter()
            .find(|c| c.covers(zeta, JUNCTION_MIN_IM))
            .ok_or_else(|| Error::InvalidInput(format!("no chart covers H_0 at s = {s}")))?;
        let diff = chart.slope * zeta.exp() + chart.offset - target;
        let k = (diff.im / two_pi).round();
        let res = C64::new(diff.re, diff.im - two_pi * k).norm();
        let fp = crate::branches::f_prime(map, zeta).norm();
        let model = chart.slope.norm() * zeta.re.exp();
        let inv = chart.invert(target + C64::new(0.0, two_pi * k));
        let m = ((zeta.im - inv.im) / two_pi).round();
        let gap = (inv + C64::new(0.0, two_pi * m) - zeta).norm();
        rep.max_chart_residual = rep.max_chart_residual.max(res);
        rep.max_derivative_mismatch = rep.max_derivative_mismatch.max((fp - model).abs() / model);
        rep.max_inverse_gap = rep.max_inverse_gap.max(gap);
        rep.max_chart_error_bound = rep.max_chart_error_bound.max(chart.error_bound(zeta));
    }
    Ok(rep)
}

/// Assembles `{H_u o G_s}` with images in `Q` at radius `setup.r`.
///
/// `G_0` is continued numerically over `Q`, `G_s = G_0 + 2 pi i s`. The
/// images `H_u(G_s(Q))` lie at `Re zeta ~ log|f(z_r)|` where `F` equals a
/// far-field chart `c e^zeta + d` to within `e^(-2|Im u|)`; there the
/// level lines are horizontal, and maps are aggregated in blocks of
/// `Re zeta` using `|(H_u o G_s)'(w)| = |G_0'(w)| / (|c| e^(Re zeta))`.
pub fn assemble_ifs(map: &Map, setup: &IfsSetup) -> Result<IfsAssembly> {
    let r = setup.r;
    let tau = setup.tau;
    if !(tau > 0.0 && tau < 0.5) || !(setup.lambda > 1.0) {
        return Err(Error::InvalidInput("need 0 < tau < 1/2 and lambda > 1".into()));
    }
    let charts = map.far_field_charts();
    if charts.is_empty() {
        return Err(Error::InvalidInput(format!("{} has no far-field chart", map.name)));
    }
    let cm = max_on_circle(map, r, map.boundary_value)?;
    let z_r = cm.z_r();
    let a_direct = map.log_derivative(z_r)?.re;
    let a = a_from_profile(map, r)?;
    let sr = square_sr(z_r, a, tau);
    if sr.half_re >= setup.lambda.sqrt().ln() {
        return Err(Error::InvalidInput("S_r is wider than the Koebe strip".into()));
    }
    let center = principal_log_f(map, z_r);
    let provisional = RectFamily::new(center, a, tau, 0.0);
    let covering = covering_check(map, &sr, &provisional.q_hat)?;
    if !covering.pass {
        return Err(Error::InvalidInput("F(S_r) does not cover Q^".into()));
    }

    let mut k = setup.grid.max(4);
    let (mut base, mut in_sr) = sample_g0(map, z_r, &provisional.q, &sr, k)?;
    loop {
        let (b2, in2) = sample_g0(map, z_r, &provisional.q, &sr, 2 * k)?;
        let range = |b: &[f64]| {
            (
                b.iter().copied().fold(f64::INFINITY, f64::min),
                b.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            )
        };
        let (l1, h1) = range(&base);
        let (l2, h2) = range(&b2);
        base = b2;
        in_sr &= in2;
        k *= 2;
        if ((l2 - l1).abs() < 0.01f64.ln_1p() && (h2 - h1).abs() < 0.01f64.ln_1p()) || k >= 128 {
            break;
        }
    }
    let (base_lo, base_hi) = (
        base.iter().copied().fold(f64::INFINITY, f64::min),
        base.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );

    // diameter of Q_{u,s} <= max |(H_u o G_s)'| diam Q, largest at the
    // left edge of Q where |F'| = |c| e^(Re zeta) is smallest
    let q = provisional.q;
    let x_left = q.center.re - q.half_re;
    let min_slope_ln = charts
        .iter()
        .map(|c| c.slope.norm().ln())
        .fold(f64::INFINITY, f64::min);
    let log_d = base_hi + q.diameter().ln() - min_slope_ln - x_left;
    let rects = RectFamily::new(center, a, tau, log_d.exp());

    let level = r.ln();
    let mut lines = chart_level_lines(&charts, &rects.q_prime, level, setup.chart_min_im);
    if let Some((u0, u1)) = setup.u_range {
        lines.retain(|l| l.u >= u0 && l.u <= u1);
    }
    let lines_meeting_q_second = chart_level_lines(&charts, &rects.q_second, level, setup.chart_min_im).len();
    let lines_in_q = lines.len();

    // consecutive lines must be further apart than the deviation of the
    // true level curves from them plus the image heights
    let max_dev = lines.iter().map(|l| l.log_deviation).fold(f64::NEG_INFINITY, f64::max);
    let min_sep = lines
        .windows(2)
        .map(|w| w[1].im - w[0].im)
        .fold(f64::INFINITY, f64::min);
    let slack = (max_dev.exp() + log_d.exp()) * 2.0;
    if lines.len() >= 2 && !(min_sep > slack) {
        return Err(Error::DisjointnessFailure(0, 1));
    }
    let height_ok = sr.half_im * 2.0 < 2.0 * std::f64::consts::PI;
    if !(in_sr && height_ok) {
        return Err(Error::DisjointnessFailure(0, 0));
    }

    let x_lo = rects.q_prime.center.re - rects.q_prime.half_re;
    let x_hi = rects.q_prime.center.re + rects.q_prime.half_re;
    let n_blocks = ((x_hi - x_lo) / setup.block_width).ceil().max(1.0) as usize;
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    let mut maps = Vec::new();
    let mut arms: Vec<(i8, f64, u64)> = Vec::new();
    for l in &lines {
        let cn = l.slope_norm;
        match arms.iter_mut().find(|(arm, c, _)| *arm == l.arm && *c == cn) {
            Some(e) => e.2 += 1,
            None => arms.push((l.arm, cn, 1)),
        }
    }
    let y_halfspan = 2.0 * max_dev.exp() + log_d.exp();
    for &(arm, c_norm, count) in &arms {
        for b in 0..n_blocks {
            let x0 = x_lo + setup.block_width * b as f64;
            let x1 = (x0 + setup.block_width).min(x_hi);
            if let Some((s0, s1)) = setup.log_s_range {
                let ls0 = x0 + c_norm.ln() - ln_2pi;
                let ls1 = x1 + c_norm.ln() - ln_2pi;
                if ls1 <= s0 || ls0 >= s1 {
                    continue;
                }
            }
            let log_count = log_target_count(c_norm, x0, x1);
            if log_count == f64::NEG_INFINITY {
                continue;
            }
            let image_bounds = Rect {
                center: C64::new(0.5 * (x0 + x1), rects.q.center.im),
                half_re: 0.5 * (x1 - x0) + log_d.exp(),
                half_im: rects.q_prime.half_im + y_halfspan,
            };
            maps.push(ContractionMap {
                label: MapLabel::Block {
                    arm,
                    lines: count,
                    x_lo: x0,
                    x_hi: x1,
                },
                log_multiplicity: (count as f64).ln() + log_count,
                // relative slack covers rounding of Re zeta at this scale
                log_offset_lo: -x1 - c_norm.ln() - 1e-12 * x1.abs(),
                log_offset_hi: -x0 - c_norm.ln() + 1e-12 * x0.abs(),
                log_diameter: base_hi + q.diameter().ln() - c_norm.ln() - x0,
                image_bounds,
            });
        }
    }
    let total = if maps.is_empty() {
        f64::NEG_INFINITY
    } else {
        log_sum_exp(maps.iter().map(|m| m.log_multiplicity))
    };
    if maps.is_empty() || total < 2f64.ln() - 1e-12 {
        return Err(Error::TooFewMaps { count: maps.len() });
    }
    let junction = junction_check(map, z_r, &[64, 512, 4096, -64, -512, -4096])?;
    let ifs = ConformalIFS {
        q: rects.q,
        log_base: base,
        maps,
        disjoint: true,
    };
    Ok(IfsAssembly {
        ifs,
        rects,
        sr,
        z_r,
        a,
        a_direct,
        g0_scaled_range: ((base_lo + a.ln()).exp(), (base_hi + a.ln()).exp()),
        g0_grid: k,
        g0_in_sr: in_sr,
        covering,
        lines_in_q,
        lines_meeting_q_second,
        log_d,
        junction,
        disjointness: "G_0(Q) lies in S_r of height a^-tau < 2 pi, so the G_s(Q) are pairwise \
                       disjoint; distinct branches H_u have disjoint images and each is injective; \
                       level lines are separated by more than their deviation"
            .into(),
    })
}

/// Compact summary of an assembled system and its dimension bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub r: f64,
    pub tau: f64,
    pub a: f64,
    pub a_direct: f64,
    pub map_entries: usize,
    pub log_map_count: f64,
    pub log_d: f64,
    /// Largest `log(max|phi'| / min|phi'|)` over the maps.
    pub log_distortion: f64,
    pub g0_scaled_range: (f64, f64),
    pub g0_grid: usize,
    pub lines_in_q: usize,
    pub lines_meeting_q_second: usize,
    pub covering_pass: bool,
    pub junction: JunctionReport,
    pub pressure_lower_bound_direct: f64,
    pub dimension: DimensionInterval,
    pub disjointness: String,
}

impl IfsAssembly {
    pub fn report(&self, tau: f64, tol: f64) -> Result<DimensionReport> {
        Ok(DimensionReport {
            r: self.z_r.norm(),
            tau,
            a: self.a,
            a_direct: self.a_direct,
            map_entries: self.ifs.maps.len(),
            log_map_count: self.ifs.log_map_count(),
            log_d: self.log_d,
            log_distortion: self.ifs.log_distortion(),
            g0_scaled_range: self.g0_scaled_range,
            g0_grid: self.g0_grid,
            lines_in_q: self.lines_in_q,
            lines_meeting_q_second: self.lines_meeting_q_second,
            covering_pass: self.covering.pass,
            junction: self.junction.clone(),
            pressure_lower_bound_direct: pressure_lower_bound_direct(&self.ifs),
            dimension: bowen_dimension(&self.ifs, tol)?,
            disjointness: self.disjointness.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cantor_pressure_vanishes_at_similarity_dimension() {
        let ifs = ConformalIFS::similarity_fixture(2, 1.0 / 3.0).unwrap();
        let t = 2f64.ln() / 3f64.ln();
        let p = pressure(&ifs, t, 5);
        assert!(p.lower.abs() < 1e-12 && p.upper.abs() < 1e-12);
    }

    #[test]
    fn closed_form_pressure() {
        let ifs = ConformalIFS::similarity_fixture(3, 0.5).unwrap();
        let p = pressure(&ifs, 0.7, 3);
        assert_relative_eq!(p.lower, (3.0 * 0.5f64.powf(0.7)).ln(), max_relative = 1e-12);
        assert_relative_eq!(pressure_lower_bound_direct(&ifs), 1.5f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn overlapping_images_rejected() {
        let q = Rect::square(C64::new(0.0, 0.0), 1.0);
        let m = |x: f64| ContractionMap {
            label: MapLabel::Single { index: 0 },
            log_multiplicity: 0.0,
            log_offset_lo: -1.0,
            log_offset_hi: -1.0,
            log_diameter: -1.0,
            image_bounds: Rect::square(C64::new(x, 0.0), 0.3),
        };
        assert!(matches!(
            ConformalIFS::new(q, vec![0.0], vec![m(0.0), m(0.5)]),
            Err(Error::DisjointnessFailure(0, 1))
        ));
        assert!(ConformalIFS::new(q, vec![0.0], vec![m(-0.5), m(0.5)]).is_ok());
        assert!(matches!(
            ConformalIFS::new(q, vec![0.0], vec![m(0.0)]),
            Err(Error::TooFewMaps { .. })
        ));
    }

    #[test]
    fn no_bracket_for_single_contraction_pair_at_zero() {
        // two maps of ratio 0.99 have dimension log 2 / log(1/0.99) > 4
        let ifs = ConformalIFS::similarity_fixture(2, 0.49).unwrap();
        assert!(bowen_dimension(&ifs, 1e-6).is_ok());
        let q = Rect::square(C64::new(0.5, 0.5), 0.5);
        let big = ContractionMap {
            label: MapLabel::Single { index: 0 },
            log_multiplicity: 0.0,
            log_offset_lo: 0.99f64.ln(),
            log_offset_hi: 0.99f64.ln(),
            log_diameter: 0.0,
            image_bounds: Rect::square(C64::new(0.25, 0.5), 0.25),
        };
        let mut other = big.clone();
        other.image_bounds = Rect::square(C64::new(0.75, 0.5), 0.25);
        let ifs = ConformalIFS::new(q, vec![0.0], vec![big, other]).unwrap();
        assert!(matches!(bowen_dimension(&ifs, 1e-6), Err(Error::NoBracket { .. })));
    }
}
