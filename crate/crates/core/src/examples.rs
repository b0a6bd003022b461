//! Scenario drivers for two worked functions: `cos(z) e^z`, whose critical
//! values have moduli `exp(pi k + pi/4)/sqrt 2`, and `exp(-g)` with the
//! lacunary series `g(z) = sum (z/2^k)^(2^k)`, whose tract contains a
//! binary tree and whose critical values are separated by huge gaps.

use std::f64::consts::{FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branches::{
    covering_check, koebe_check, level_anchor, principal_log_f, square_sr, BranchContinuation,
    KoebeReport, RectFamily, Strip,
};
use crate::error::{Error, Result};
use crate::function::{lacunary, track_log, truncate_lacunary, Factor};
use crate::ifs::{assemble_ifs, DimensionReport, IfsSetup};
use crate::maxmod::{growth_profile, log_grid, max_on_circle, regular_radii, tyler_real_threshold, tyler_trace};
use crate::tract::{compute_tract_mask, critical_points, fprime_winding, singular_free_annulus, Window};
use crate::wv::{default_alpha_beta, measure_g, WVDiscReport};
use crate::{Complex, Map};

/// Radii of one level of the tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeLevel {
    pub n: u32,
    /// `(1 + eps) 2^(n+1)`
    pub r: f64,
    /// `(1 - 2 eps) 2^(n+2)`
    pub r_prime: f64,
    /// `(1 + 2 eps) 2^(n+1)`
    pub rho: f64,
    /// `(1 - 3 eps) 2^(n+2)`
    pub rho_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// Radial segment `B_{j,n}`.
    Radial,
    /// Spiralling segment `C_{j,n}^+`.
    TurnUp,
    /// Spiralling segment `C_{j,n}^-`.
    TurnDown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSegment {
    pub n: u32,
    pub j: u32,
    pub kind: SegmentKind,
    pub points: Vec<Complex>,
}

/// The binary tree on which `Re g` is very negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeT {
    pub epsilon: f64,
    pub levels: Vec<TreeLevel>,
}

impl TreeT {
    pub fn new(epsilon: f64, n_max: u32) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.125) {
            return Err(Error::InvalidInput(format!("epsilon must lie in (0, 1/8], got {epsilon}")));
        }
        let levels = (1..=n_max.max(1) + 1)
            .map(|n| {
                let p = 2f64.powi(n as i32);
                TreeLevel {
                    n,
                    r: (1.0 + epsilon) * 2.0 * p,
                    r_prime: (1.0 - 2.0 * epsilon) * 4.0 * p,
                    rho: (1.0 + 2.0 * epsilon) * 2.0 * p,
                    rho_prime: (1.0 - 3.0 * epsilon) * 4.0 * p,
                }
            })
            .collect();
        Ok(Self { epsilon, levels })
    }

    pub fn level(&self, n: u32) -> Option<&TreeLevel> {
        self.levels.iter().find(|l| l.n == n)
    }

    /// `r_n < r_n' < r_{n+1}` and `rho_n <= rho_n'` at every stored level;
    /// `rho_n = rho_n'` exactly when `eps = 1/8`.
    pub fn radii_ordered(&self) -> bool {
        self.levels.windows(2).all(|w| w[0].r < w[0].r_prime && w[0].r_prime < w[1].r)
            && self.levels.iter().all(|l| l.rho <= l.rho_prime)
    }

    /// Sampled `B_{j,n}` and `C_{j,n}^+-` for `j = 0..2^n`, `per_segment`
    /// points each, endpoints included.
    pub fn segments(&self, n: u32, per_segment: usize) -> Result<Vec<TreeSegment>> {
        let l = self.level(n).ok_or_else(|| Error::InvalidInput(format!("level {n} not stored")))?;
        let next = self
            .level(n + 1)
            .ok_or_else(|| Error::InvalidInput(format!("level {} not stored", n + 1)))?;
        let m = per_segment.max(2);
        let p = 2f64.powi(n as i32);
        let mut out = Vec::new();
        for j in 0..(1u32 << n) {
            let base = PI / p + 2.0 * PI * j as f64 / p;
            let t = |k: usize| k as f64 / (m - 1) as f64;
            out.push(TreeSegment {
                n,
                j,
                kind: SegmentKind::Radial,
                points: (0..m)
                    .map(|k| Complex::from_polar(l.r + (l.r_prime - l.r) * t(k), base))
                    .collect(),
            });
            for (kind, sign) in [(SegmentKind::TurnUp, 1.0), (SegmentKind::TurnDown, -1.0)] {
                out.push(TreeSegment {
                    n,
                    j,
                    kind,
                    points: (0..m)
                        .map(|k| {
                            let rad = l.r_prime + (next.r - l.r_prime) * t(k);
                            let turn = (rad - l.r_prime) / (next.r - l.r_prime) * PI / (2.0 * p);
                            Complex::from_polar(rad, base + sign * turn)
                        })
                        .collect(),
                });
            }
        }
        Ok(out)
    }
}

/// Number of lacunary terms of an `exp(-g)` map.
pub fn lacunary_terms(map: &Map) -> Result<u32> {
    map.factors
        .iter()
        .find_map(|f| match f {
            Factor::ExpNegLacunary { terms } => Some(*terms),
            _ => None,
        })
        .ok_or_else(|| Error::InvalidInput(format!("{} has no lacunary factor", map.name)))
}

/// `exp(-g)` truncated so that the dropped tail is below `1e-12` on
/// `|z| <= radius`.
pub fn lacunary_map(radius: f64, boundary_value: f64) -> Map {
    Map::exp_neg_lacunary(truncate_lacunary(radius, 1e-12), boundary_value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeLevelReport {
    pub n: u32,
    /// Minimum of `-Re g = log|f|` over the level's segments.
    pub min_neg_re_g: f64,
    pub worst: Complex,
    /// `2^(2^n)`
    pub bound: f64,
    pub holds: bool,
}

/// Minimum of `-Re g` over dense samples of all segments of level `n`.
pub fn tree_min_modulus(map: &Map, tree: &TreeT, n: u32, per_segment: usize) -> Result<TreeLevelReport> {
    let segs = tree.segments(n, per_segment)?;
    let (min, worst) = segs
        .par_iter()
        .flat_map_iter(|s| s.points.iter().map(|&z| (map.log_modulus(z), z)))
        .reduce(|| (f64::INFINITY, Complex::new(0.0, 0.0)), |a, b| if b.0 < a.0 { b } else { a });
    let bound = 2f64.powf(2f64.powi(n as i32));
    Ok(TreeLevelReport {
        n,
        min_neg_re_g: min,
        worst,
        bound,
        holds: min > bound,
    })
}

/// Smallest level from which the tree bound holds at every later stored
/// level (the last stored level only serves as `r_{n+1}`).
pub fn tree_onset(map: &Map, tree: &TreeT, per_segment: usize) -> Result<(Vec<TreeLevelReport>, Option<u32>)> {
    let top = tree.levels.last().map(|l| l.n).unwrap_or(1);
    let reports = (1..top)
        .map(|n| tree_min_modulus(map, tree, n, per_segment))
        .collect::<Result<Vec<_>>>()?;
    let mut onset = None;
    for r in reports.iter().rev() {
        if r.holds {
            onset = Some(r.n);
        } else {
            break;
        }
    }
    Ok((reports, onset))
}

/// `max |g(z) / (z/2^n)^(2^n) - 1|` over `samples` points of
/// `r_n <= |z| <= r_n'`.
pub fn eta_max(map: &Map, tree: &TreeT, n: u32, samples: usize) -> Result<f64> {
    let terms = lacunary_terms(map)?;
    let l = tree.level(n).ok_or_else(|| Error::InvalidInput(format!("level {n} not stored")))?;
    let p = 2f64.powi(n as i32);
    Ok(annulus_samples(l.r, l.r_prime, samples)
        .par_iter()
        .map(|&z| {
            let (g, _, _) = lacunary(z, terms);
            (g / (z / p).powf(p) - 1.0).norm()
        })
        .reduce(|| 0.0, f64::max))
}

fn annulus_samples(r0: f64, r1: f64, samples: usize) -> Vec<Complex> {
    let rings = if r1 > r0 { ((samples as f64).sqrt() / 4.0).ceil().max(2.0) as usize } else { 1 };
    let per = samples.div_ceil(rings);
    let mut out = Vec::with_capacity(rings * per);
    for i in 0..rings {
        let rad = if rings == 1 { r0 } else { r0 + (r1 - r0) * i as f64 / (rings - 1) as f64 };
        for k in 0..per {
            out.push(Complex::from_polar(rad, 2.0 * PI * (k as f64 + 0.5) / per as f64));
        }
    }
    out
}

/// `|z g'(z) - 2^n g(z)| / |g(z)|`.
pub fn third_key_ratio_at(terms: u32, n: u32, z: Complex) -> f64 {
    let (g, g1, _) = lacunary(z, terms);
    (z * g1 - g * 2f64.powi(n as i32)).norm() / g.norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub n: u32,
    pub max_ratio: f64,
    pub worst: Complex,
    pub samples: usize,
    pub pass: bool,
}

/// Max of `|z g' - 2^n g| / |g|` over `rho_n <= |z| <= rho_n'`.
pub fn third_key_check(map: &Map, tree: &TreeT, n: u32, samples: usize) -> Result<RatioReport> {
    let terms = lacunary_terms(map)?;
    let l = tree.level(n).ok_or_else(|| Error::InvalidInput(format!("level {n} not stored")))?;
    let pts = annulus_samples(l.rho, l.rho_prime, samples);
    let (max, worst) = pts
        .par_iter()
        .map(|&z| (third_key_ratio_at(terms, n, z), z))
        .reduce(|| (0.0, Complex::new(0.0, 0.0)), |a, b| if b.0 > a.0 { b } else { a });
    Ok(RatioReport {
        n,
        max_ratio: max,
        worst,
        samples: pts.len(),
        pass: max < 0.5,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcReport {
    pub n: u32,
    pub r: f64,
    pub threshold: f64,
    /// Maximal arcs of `Re g < threshold` among `2^16` angles.
    pub arcs: usize,
    /// The whole circle satisfies the inequality.
    pub degenerate: bool,
    /// Turns of `arg g` over the circle.
    pub winding: f64,
    /// `min d(arg g)/d theta = min Re(z g'/g)`.
    pub min_arg_rate: f64,
    pub pass: bool,
}

const ARC_SCAN: usize = 1 << 16;

/// Counts arcs of `|z| = r` where `Re g < threshold` and the winding of
/// `g` around the circle; passes when both equal `2^n`.
pub fn fourth_key_check(map: &Map, r: f64, n: u32, threshold: f64) -> Result<ArcReport> {
    let terms = lacunary_terms(map)?;
    let vals: Vec<(bool, f64)> = (0..ARC_SCAN)
        .into_par_iter()
        .map(|k| {
            let z = Complex::from_polar(r, 2.0 * PI * k as f64 / ARC_SCAN as f64);
            let (g, g1, _) = lacunary(z, terms);
            (g.re < threshold, (z * g1 / g).re)
        })
        .collect();
    let inside = vals.iter().filter(|v| v.0).count();
    let degenerate = inside == ARC_SCAN;
    let arcs = if degenerate {
        1
    } else {
        (0..ARC_SCAN).filter(|&k| vals[k].0 && !vals[(k + ARC_SCAN - 1) % ARC_SCAN].0).count()
    };
    let circle: Vec<Complex> = (0..=4096)
        .map(|k| Complex::from_polar(r, 2.0 * PI * k as f64 / 4096.0))
        .collect();
    let seed = lacunary(circle[0], terms).0.ln();
    let end = track_log(&circle, seed, |z| lacunary(z, terms).0.ln(), |z| {
        let (g, g1, _) = lacunary(z, terms);
        g1 / g
    })?;
    let winding = (end.im - seed.im) / (2.0 * PI);
    let min_arg_rate = vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let target = 2f64.powi(n as i32);
    Ok(ArcReport {
        n,
        r,
        threshold,
        arcs,
        degenerate,
        winding,
        min_arg_rate,
        pass: !degenerate && arcs as f64 == target && (winding - target).abs() < 1e-6,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub n: u32,
    pub rho: f64,
    /// Zeros of `g'` (critical points of `f`) in `D(0, rho_n)` by the
    /// argument principle.
    pub argument_count: i64,
    pub residual: f64,
    /// Distinct Newton zeros inside the disc, with multiplicity.
    pub harvested: usize,
    pub expected: i64,
}

/// Zeros of `f' = -g' f` in `D(0, rho_n)` by the winding of `f'` on the
/// circle, cross-checked by a Newton harvest.
pub fn gprime_zero_count(map: &Map, tree: &TreeT, n: u32, seeds_per_axis: usize) -> Result<ZeroCount> {
    let l = tree.level(n).ok_or_else(|| Error::InvalidInput(format!("level {n} not stored")))?;
    let circle: Vec<Complex> = (0..=2048)
        .map(|k| Complex::from_polar(l.rho, 2.0 * PI * k as f64 / 2048.0))
        .collect();
    let w = fprime_winding(map, &circle)?;
    let count = w.round();
    let window = Window::square(Complex::new(0.0, 0.0), l.rho, 64)?;
    let report = critical_points(map, &window, seeds_per_axis)?;
    let harvested = report
        .critical_points
        .iter()
        .filter(|c| c.z.norm() < l.rho)
        .map(|c| c.multiplicity as usize)
        .sum();
    Ok(ZeroCount {
        n,
        rho: l.rho,
        argument_count: count as i64,
        residual: (w - count).abs(),
        harvested,
        expected: (1i64 << n) - 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub z: Complex,
    /// Annulus group: `rho'_{n-1} < |z| < rho_n` (`n = 0` for the origin).
    pub group: u32,
    pub log_modulus: f64,
    pub in_tract: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub lower: f64,
    pub upper: f64,
    /// Largest `lambda` with `A(r/lambda, lambda r)` free for some `r`.
    pub max_lambda_log: f64,
    /// Geometric midpoint when the gap exceeds `lambda^2`.
    pub admissible_radius_log: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSequence {
    pub lambda: f64,
    pub critical_values: Vec<CriticalValue>,
    /// `(n, critical points in D(0, rho_n))`.
    pub cumulative_counts: Vec<(u32, usize)>,
    /// Sorted log-moduli of critical values in the tract.
    pub sorted_log_moduli: Vec<f64>,
    pub gaps: Vec<Gap>,
    /// `(n, log a >= 2^(2^(n-1)) for every value of group n)` for groups
    /// whose previous tree level certifies the bound.
    pub lower_bounds: Vec<(u32, bool)>,
}

/// Harvests critical points of `exp(-g)` in `D(0, rho_{n_max})`, checks
/// the counts `2^n - 1` and lists the gaps between critical-value moduli.
pub fn gap_sequence(
    map: &Map,
    tree: &TreeT,
    n_max: u32,
    lambda: f64,
    seeds_per_axis: usize,
    certified_onset: Option<u32>,
) -> Result<GapSequence> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidInput(format!("lambda must exceed 1, got {lambda}")));
    }
    let top = tree.level(n_max).ok_or_else(|| Error::InvalidInput(format!("level {n_max} not stored")))?;
    let window = Window::square(Complex::new(0.0, 0.0), top.rho, 64)?;
    let report = critical_points(map, &window, seeds_per_axis)?;
    let log_r = map.boundary_value.ln();
    let group_of = |z: Complex| -> u32 {
        let m = z.norm();
        if m < 1e-9 {
            return 0;
        }
        (1..=n_max).find(|&n| m < tree.level(n).unwrap().rho).unwrap_or(n_max + 1)
    };
    let critical_values: Vec<CriticalValue> = report
        .critical_points
        .iter()
        .filter(|c| c.z.norm() < top.rho)
        .map(|c| {
            let lm = map.log_modulus(c.z);
            CriticalValue {
                z: c.z,
                group: group_of(c.z),
                log_modulus: lm,
                in_tract: lm > log_r,
            }
        })
        .collect();
    let mut cumulative_counts = Vec::new();
    for n in 1..=n_max {
        let rho = tree.level(n).unwrap().rho;
        let count = critical_values.iter().filter(|c| c.z.norm() < rho).count();
        if count != (1usize << n) - 1 {
            return Err(Error::CountMismatch {
                newton: count,
                argument: (1i64 << n) - 1,
            });
        }
        cumulative_counts.push((n, count));
    }
    let mut sorted: Vec<f64> = critical_values.iter().filter(|c| c.in_tract).map(|c| c.log_modulus).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ll = lambda.ln();
    let gaps = sorted
        .windows(2)
        .map(|w| Gap {
            lower: w[0],
            upper: w[1],
            max_lambda_log: 0.5 * (w[1] - w[0]),
            admissible_radius_log: (w[1] - w[0] > 2.0 * ll).then_some(0.5 * (w[0] + w[1])),
        })
        .collect();
    let lower_bounds = (2..=n_max)
        .filter(|&n| certified_onset.is_some_and(|o| n > o))
        .map(|n| {
            let bound = 2f64.powf(2f64.powi(n as i32 - 1));
            let ok = critical_values
                .iter()
                .filter(|c| c.group == n && c.in_tract)
                .all(|c| c.log_modulus >= bound);
            (n, ok)
        })
        .collect();
    Ok(GapSequence {
        lambda,
        critical_values,
        cumulative_counts,
        sorted_log_moduli: sorted,
        gaps,
        lower_bounds,
    })
}

/// Settings for [`example2_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example2Config {
    pub epsilon: f64,
    pub n_max: u32,
    pub boundary_value: f64,
    pub lambda: f64,
    pub tree_samples: usize,
    pub ratio_samples: usize,
    pub seeds_per_axis: usize,
}

impl Default for Example2Config {
    fn default() -> Self {
        Self {
            epsilon: 0.125,
            n_max: 3,
            boundary_value: std::f64::consts::E,
            lambda: 2.0,
            tree_samples: 512,
            ratio_samples: 10_000,
            seeds_per_axis: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example2Report {
    pub config: Example2Config,
    pub terms: u32,
    pub tree: TreeT,
    pub radii_ordered: bool,
    pub tree_levels: Vec<TreeLevelReport>,
    pub tree_onset: Option<u32>,
    pub eta_max: Vec<(u32, f64)>,
    pub third_key: Vec<RatioReport>,
    pub fourth_key: Vec<ArcReport>,
    pub zero_counts: Vec<ZeroCount>,
    pub gaps: GapSequence,
}

pub fn example2_report(cfg: &Example2Config) -> Result<Example2Report> {
    let tree = TreeT::new(cfg.epsilon, cfg.n_max + 1)?;
    let outer = tree.levels.last().unwrap().r * 1.5;
    let map = lacunary_map(outer, cfg.boundary_value);
    let terms = lacunary_terms(&map)?;
    let (tree_levels, onset) = tree_onset(&map, &tree, cfg.tree_samples)?;
    let ns: Vec<u32> = (2..=cfg.n_max).collect();
    let eta = ns
        .iter()
        .map(|&n| Ok((n, eta_max(&map, &tree, n, cfg.ratio_samples)?)))
        .collect::<Result<_>>()?;
    let third_key = ns
        .iter()
        .map(|&n| third_key_check(&map, &tree, n, cfg.ratio_samples))
        .collect::<Result<_>>()?;
    let fourth_key = ns
        .iter()
        .map(|&n| {
            let l = tree.level(n).unwrap();
            fourth_key_check(&map, (l.rho * l.rho_prime).sqrt(), n, cfg.boundary_value.ln())
        })
        .collect::<Result<_>>()?;
    let zero_counts = ns
        .iter()
        .map(|&n| gprime_zero_count(&map, &tree, n, cfg.seeds_per_axis))
        .collect::<Result<_>>()?;
    let gaps = gap_sequence(&map, &tree, cfg.n_max, cfg.lambda, cfg.seeds_per_axis, onset)?;
    Ok(Example2Report {
        config: cfg.clone(),
        terms,
        radii_ordered: tree.radii_ordered(),
        tree,
        tree_levels,
        tree_onset: onset,
        eta_max: eta,
        third_key,
        fourth_key,
        zero_counts,
        gaps,
    })
}

/// `|f(pi/4 + k pi)|` for `cos(z) e^z` in closed form, as a logarithm.
pub fn cos_exp_critical_log_modulus(k: i64) -> f64 {
    PI * k as f64 + FRAC_PI_4 - 0.5 * 2f64.ln()
}

/// Settings for [`example1_pipeline`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Config {
    pub boundary_value: f64,
    pub lambda: f64,
    pub tau: f64,
    /// Critical points `pi/4 + k pi` harvested for `k = 0..=k_max`.
    pub k_max: u32,
    /// Radii for the disc, covering and expansion checks; admissible radii
    /// below `1e5` when empty.
    pub check_radii: Vec<f64>,
    /// Radius of the assembled system; the largest admissible radius when
    /// absent.
    pub ifs_radius: Option<f64>,
    pub tyler_radii: (f64, f64),
    pub render_half_width: f64,
    pub render_resolution: usize,
    pub wv_samples: usize,
    pub koebe_grid: usize,
}

impl Default for Example1Config {
    fn default() -> Self {
        Self {
            boundary_value: 1.0,
            lambda: 2.0,
            tau: 0.3,
            k_max: 6,
            check_radii: Vec::new(),
            ifs_radius: None,
            tyler_radii: (20.0, 200.0),
            render_half_width: 15.0,
            render_resolution: 256,
            wv_samples: 400,
            koebe_grid: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusChecks {
    pub r: f64,
    pub regular: bool,
    pub wv: WVDiscReport<f64>,
    pub covering_windings: Vec<f64>,
    pub covering_pass: bool,
    pub koebe: KoebeReport<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Report {
    pub config: Example1Config,
    pub tract_components: usize,
    /// `v > 0` at `(x, +-1)` for `x = 1..10`.
    pub strip_in_tract: bool,
    pub tyler_threshold: Option<f64>,
    /// Largest `|arg z - pi/4|` along the traced maximum curve at the last
    /// radius.
    pub tyler_end_angle_offset: f64,
    pub critical_log_moduli: Vec<f64>,
    /// Max relative error of `|f(pi/4 + k pi)|` against the closed form.
    pub critical_value_rel_err: f64,
    pub admissible_radii: Vec<f64>,
    pub radius_checks: Vec<RadiusChecks>,
    pub dimension: DimensionReport,
    pub claims_hold: bool,
}

pub fn example1_pipeline(cfg: &Example1Config) -> Result<Example1Report> {
    let map = Map::cos_exp(cfg.boundary_value);
    let mask = compute_tract_mask(
        &map,
        cfg.boundary_value,
        Window::square(Complex::new(0.0, 0.0), cfg.render_half_width, cfg.render_resolution)?,
    )?;
    let strip_in_tract = (1..=10).all(|x| {
        [1.0, -1.0]
            .iter()
            .all(|&y| map.v(Complex::new(x as f64, y)) > 0.0)
    });
    let tyler_threshold = tyler_real_threshold(&map, 0.01, 0.99);
    let trace = tyler_trace(&map, &log_grid(cfg.tyler_radii.0, cfg.tyler_radii.1, 1.05))?;
    let tyler_end_angle_offset = trace.last().map(|p| (p.z.arg().abs() - FRAC_PI_4).abs()).unwrap_or(f64::NAN);

    let half = PI * (cfg.k_max as f64 + 0.5) * 0.5 + 0.5;
    let window = Window::new(Complex::new(half - 0.5, 0.0), half, 1.0, 64)?;
    let singular = critical_points(&map, &window, 64)?;
    let mut crit = singular.critical_value_log_moduli.clone();
    crit.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let critical_value_rel_err = crit
        .iter()
        .enumerate()
        .map(|(k, lm)| {
            let exact = cos_exp_critical_log_modulus(k as i64);
            ((lm - exact).exp() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    let candidates: Vec<f64> = crit.windows(2).map(|w| (0.5 * (w[0] + w[1])).exp()).collect();
    let admissible_radii = singular_free_annulus(&singular, cfg.lambda, &candidates)?;

    let check_radii = if cfg.check_radii.is_empty() {
        admissible_radii.iter().copied().filter(|&r| r > 100.0 && r < 1e5).collect()
    } else {
        cfg.check_radii.clone()
    };
    let (alpha, beta) = default_alpha_beta(cfg.tau);
    let radius_checks = check_radii
        .iter()
        .map(|&r| radius_checks(&map, cfg, r, alpha, beta))
        .collect::<Result<Vec<_>>>()?;

    let ifs_r = cfg
        .ifs_radius
        .or_else(|| admissible_radii.last().copied())
        .ok_or_else(|| Error::InvalidInput("no admissible radius for the iterated system".into()))?;
    let assembly = assemble_ifs(&map, &IfsSetup::new(ifs_r, cfg.lambda, cfg.tau))?;
    let dimension = assembly.report(cfg.tau, 1e-12)?;

    let claims_hold = strip_in_tract
        && tyler_end_angle_offset < 0.05
        && critical_value_rel_err < 1e-9
        && dimension.dimension.lo > 1.0;
    Ok(Example1Report {
        config: cfg.clone(),
        tract_components: mask.components.len(),
        strip_in_tract,
        tyler_threshold,
        tyler_end_angle_offset,
        critical_log_moduli: crit,
        critical_value_rel_err,
        admissible_radii,
        radius_checks,
        dimension,
        claims_hold,
    })
}

/// Disc, covering and expansion checks at one radius, with the growth
/// regularity exponents `alpha`, `beta`.
pub fn radius_checks(map: &Map, cfg: &Example1Config, r: f64, alpha: f64, beta: f64) -> Result<RadiusChecks> {
    let grid = log_grid(r / 1.1, r * 1.1, 1.02);
    let profile = growth_profile(map, &grid, cfg.boundary_value)?;
    let regular = regular_radii(map, &profile, 0.1, alpha, beta)?;
    let near = regular.iter().any(|&s| (s / r).ln().abs() < 0.021);
    let wv = measure_g(map, &profile, r, cfg.tau, cfg.wv_samples)?;
    let cm = max_on_circle(map, r, cfg.boundary_value)?;
    let z_r = cm.z_r();
    let sr = square_sr(z_r, wv.a, cfg.tau);
    let rects = RectFamily::new(principal_log_f(map, z_r), wv.a, cfg.tau, 0.0);
    let covering = covering_check(map, &sr, &rects.q_hat)?;
    let zeta0 = level_anchor(map, r, z_r.arg())?;
    let mut branch = BranchContinuation::h_branch(zeta0, principal_log_f(map, zeta0.exp()), 0);
    let koebe = koebe_check(map, &mut branch, &Strip::new(r, cfg.lambda), cfg.koebe_grid, 20.0)?;
    Ok(RadiusChecks {
        r,
        regular: near,
        wv,
        covering_windings: covering.windings,
        covering_pass: covering.pass,
        koebe,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tree_radii() {
        let t = TreeT::new(0.125, 4).unwrap();
        let l2 = t.level(2).unwrap();
        assert_relative_eq!(l2.rho, 10.0);
        assert_relative_eq!(l2.rho_prime, 10.0);
        assert_relative_eq!(l2.r, 9.0);
        assert_relative_eq!(l2.r_prime, 12.0);
        assert!(t.radii_ordered());
        assert!(TreeT::new(0.2, 3).is_err());
    }

    #[test]
    fn segments_join_end_to_end() {
        let t = TreeT::new(0.1, 3).unwrap();
        let segs = t.segments(2, 17).unwrap();
        assert_eq!(segs.len(), 3 * 4);
        for chunk in segs.chunks(3) {
            let b_end = *chunk[0].points.last().unwrap();
            for c in &chunk[1..] {
                assert!((c.points[0] - b_end).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_power_ratio_is_zero() {
        // with one term g = (z/2)^2 and z g' = 2 g exactly
        let z = Complex::new(1.3, -0.7);
        assert!(third_key_ratio_at(1, 1, z) < 1e-15);
    }

    #[test]
    fn tree_value_matches_series() {
        let t = TreeT::new(0.125, 3).unwrap();
        let map = lacunary_map(40.0, 1.0);
        let k = lacunary_terms(&map).unwrap();
        let z = t.segments(2, 2).unwrap()[0].points[0];
        let (g, _, _) = lacunary(z, k);
        assert_relative_eq!(map.log_modulus(z), -g.re, max_relative = 1e-12);
    }

    #[test]
    fn closed_form_critical_moduli() {
        let m = Map::cos_exp(1.0);
        for k in 0..4 {
            let z = Complex::new(FRAC_PI_4 + PI * k as f64, 0.0);
            assert_relative_eq!(m.log_modulus(z), cos_exp_critical_log_modulus(k), max_relative = 1e-12);
        }
    }

    #[test]
    fn degenerate_arc_flagged() {
        let map = lacunary_map(20.0, 1.0);
        let rep = fourth_key_check(&map, 10.0, 2, 1e9).unwrap();
        assert!(rep.degenerate && !rep.pass && rep.arcs == 1);
    }
}
