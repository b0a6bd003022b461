//! Tracts as components of `{v > 0}` in a window, disc containment,
//! critical points of `f` and singular-value-free annuli.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{track_log, AnalyticMap};
use crate::num::{lit, to_f64, Real, C};

/// Rectangular viewport with square pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window<T> {
    pub center: C<T>,
    pub half_width: T,
    pub half_height: T,
    /// Pixels along the longer axis.
    pub resolution: usize,
}

impl<T: Real> Window<T> {
    pub fn new(center: C<T>, half_width: T, half_height: T, resolution: usize) -> Result<Self> {
        if resolution < 64 {
            return Err(Error::InvalidInput(format!("resolution must be >= 64, got {resolution}")));
        }
        if !(half_width > T::zero() && half_height > T::zero()) {
            return Err(Error::InvalidInput("window half-sizes must be positive".into()));
        }
        Ok(Self {
            center,
            half_width,
            half_height,
            resolution,
        })
    }

    /// Square window `[cx - h, cx + h] x [cy - h, cy + h]`.
    pub fn square(center: C<T>, half: T, resolution: usize) -> Result<Self> {
        Self::new(center, half, half, resolution)
    }

    pub fn pixel_size(&self) -> T {
        (self.half_width.max(self.half_height) + self.half_width.max(self.half_height))
            / lit(self.resolution as f64)
    }

    /// `(nx, ny)` pixel counts.
    pub fn dims(&self) -> (usize, usize) {
        let px = self.pixel_size();
        let count = |h: T| ((h + h) / px).round().to_usize().unwrap_or(1).max(1);
        (count(self.half_width), count(self.half_height))
    }

    /// Center of pixel `(i, j)`; `j = 0` is the top row.
    pub fn pixel_center(&self, i: usize, j: usize) -> C<T> {
        let (nx, ny) = self.dims();
        let px = self.pixel_size();
        let half: T = lit(0.5);
        let x0 = self.center.re - px * lit(nx as f64) * half;
        let y1 = self.center.im + px * lit(ny as f64) * half;
        C::new(
            x0 + px * (lit::<T>(i as f64) + half),
            y1 - px * (lit::<T>(j as f64) + half),
        )
    }

    /// Pixel containing `z`, if inside.
    pub fn pixel_of(&self, z: C<T>) -> Option<(usize, usize)> {
        let (nx, ny) = self.dims();
        let px = self.pixel_size();
        let half: T = lit(0.5);
        let x0 = self.center.re - px * lit(nx as f64) * half;
        let y1 = self.center.im + px * lit(ny as f64) * half;
        let fi = (z.re - x0) / px;
        let fj = (y1 - z.im) / px;
        if fi < T::zero() || fj < T::zero() {
            return None;
        }
        let (i, j) = (fi.floor().to_usize()?, fj.floor().to_usize()?);
        (i < nx && j < ny).then_some((i, j))
    }

    /// Counter-clockwise boundary with `per_side` points per edge, closed.
    pub fn boundary(&self, per_side: usize) -> Vec<C<T>> {
        let c = self.center;
        let (w, h) = (self.half_width, self.half_height);
        let corners = [
            c + C::new(-w, -h),
            c + C::new(w, -h),
            c + C::new(w, h),
            c + C::new(-w, h),
        ];
        let mut out = Vec::with_capacity(4 * per_side + 1);
        for k in 0..4 {
            let (a, b) = (corners[k], corners[(k + 1) % 4]);
            for s in 0..per_side {
                let t: T = lit(s as f64 / per_side as f64);
                out.push(a + (b - a) * t);
            }
        }
        out.push(corners[0]);
        out
    }
}

/// Per-component flags of a [`TractMask`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentMeta {
    pub id: u32,
    pub pixels: usize,
    pub touches_edge: bool,
    /// Complement components enclosed by this component inside the window.
    pub holes: usize,
    /// Number of boundary polylines adjacent to the component.
    pub boundary_curves: usize,
    /// No holes and a single boundary curve inside the window.
    pub simply_connected_at_window_scale: bool,
}

/// Labelled components of `{v > 0}` with their zero-level contours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TractMask<T> {
    pub window: Window<T>,
    pub nx: usize,
    pub ny: usize,
    /// Row-major, top row first; 0 marks the complement.
    pub labels: Vec<u32>,
    pub boundary_polylines: Vec<Vec<C<T>>>,
    pub components: Vec<ComponentMeta>,
}

impl<T: Real> TractMask<T> {
    pub fn label_at(&self, i: usize, j: usize) -> u32 {
        self.labels[j * self.nx + i]
    }

    /// Label of the pixel containing `z` (0 outside the window too).
    pub fn label_of(&self, z: C<T>) -> u32 {
        self.window
            .pixel_of(z)
            .map(|(i, j)| self.label_at(i, j))
            .unwrap_or(0)
    }

    pub fn component(&self, id: u32) -> Option<&ComponentMeta> {
        self.components.iter().find(|c| c.id == id)
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Labels connected pixels where `inside` holds; 4- or 8-connectivity.
/// Labels are 1-based in raster order of first appearance.
fn label_components(inside: &[bool], nx: usize, ny: usize, eight: bool) -> (Vec<u32>, u32) {
    let mut uf = UnionFind::new(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            if !inside[k] {
                continue;
            }
            if i > 0 && inside[k - 1] {
                uf.union(k as u32, (k - 1) as u32);
            }
            if j > 0 && inside[k - nx] {
                uf.union(k as u32, (k - nx) as u32);
            }
            if eight && j > 0 {
                if i > 0 && inside[k - nx - 1] {
                    uf.union(k as u32, (k - nx - 1) as u32);
                }
                if i + 1 < nx && inside[k - nx + 1] {
                    uf.union(k as u32, (k - nx + 1) as u32);
                }
            }
        }
    }
    let mut ids: HashMap<u32, u32> = HashMap::new();
    let mut labels = vec![0u32; nx * ny];
    for k in 0..nx * ny {
        if inside[k] {
            let root = uf.find(k as u32);
            let next = ids.len() as u32 + 1;
            labels[k] = *ids.entry(root).or_insert(next);
        }
    }
    (labels, ids.len() as u32)
}

/// Components of `{log|f| > log R}` in `window`.
pub fn compute_tract_mask<T: Real>(map: &AnalyticMap<T>, boundary_value: T, window: Window<T>) -> Result<TractMask<T>> {
    let (nx, ny) = window.dims();
    let ln_r = boundary_value.ln();
    // signed level: log|f| - log R, with zeros of f clamped for interpolation
    let floor: T = lit(-1e6);
    let level: Vec<T> = (0..nx * ny)
        .into_par_iter()
        .map(|k| (map.log_modulus(window.pixel_center(k % nx, k / nx)) - ln_r).max(floor))
        .collect();
    let inside: Vec<bool> = level.iter().map(|&s| s > T::zero()).collect();
    let (labels, count) = label_components(&inside, nx, ny, false);

    // complement with 8-connectivity; enclosed pieces are holes
    let outside: Vec<bool> = inside.iter().map(|b| !b).collect();
    let (holes_lab, hole_count) = label_components(&outside, nx, ny, true);
    let mut hole_touches = vec![false; hole_count as usize + 1];
    let mut hole_owner = vec![0u32; hole_count as usize + 1];
    let mut meta: Vec<ComponentMeta> = (1..=count)
        .map(|id| ComponentMeta {
            id,
            pixels: 0,
            touches_edge: false,
            holes: 0,
            boundary_curves: 0,
            simply_connected_at_window_scale: false,
        })
        .collect();
    let mut bbox = vec![(usize::MAX, 0usize, usize::MAX, 0usize); count as usize + 1];
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let edge = i == 0 || j == 0 || i + 1 == nx || j + 1 == ny;
            let l = labels[k];
            if l > 0 {
                let m = &mut meta[l as usize - 1];
                m.pixels += 1;
                m.touches_edge |= edge;
                let b = &mut bbox[l as usize];
                *b = (b.0.min(i), b.1.max(i), b.2.min(j), b.3.max(j));
            } else {
                let h = holes_lab[k] as usize;
                hole_touches[h] |= edge;
                if hole_owner[h] == 0 {
                    let nb = [
                        (i > 0).then(|| labels[k - 1]),
                        (i + 1 < nx).then(|| labels[k + 1]),
                        (j > 0).then(|| labels[k - nx]),
                        (j + 1 < ny).then(|| labels[k + nx]),
                    ];
                    if let Some(o) = nb.into_iter().flatten().find(|&o| o > 0) {
                        hole_owner[h] = o;
                    }
                }
            }
        }
    }
    for h in 1..=hole_count as usize {
        if !hole_touches[h] && hole_owner[h] > 0 {
            meta[hole_owner[h] as usize - 1].holes += 1;
        }
    }
    for m in &meta {
        let b = bbox[m.id as usize];
        if !m.touches_edge && (b.1 == b.0 || b.3 == b.2) {
            return Err(Error::ResolutionTooCoarse { component: m.id as usize });
        }
    }

    let polylines = marching_squares(&window, &level, nx, ny);
    for line in &polylines {
        let mut seen: Vec<u32> = Vec::new();
        for z in line.iter().take(8) {
            let px = window.pixel_size() * lit(0.5);
            for d in [C::new(px, T::zero()), C::new(-px, T::zero()), C::new(T::zero(), px), C::new(T::zero(), -px)] {
                if let Some((i, j)) = window.pixel_of(*z + d) {
                    let l = labels[j * nx + i];
                    if l > 0 && !seen.contains(&l) {
                        seen.push(l);
                    }
                }
            }
        }
        for l in seen {
            meta[l as usize - 1].boundary_curves += 1;
        }
    }
    for m in &mut meta {
        m.simply_connected_at_window_scale = m.holes == 0 && m.boundary_curves <= 1;
    }
    Ok(TractMask {
        window,
        nx,
        ny,
        labels,
        boundary_polylines: polylines,
        components: meta,
    })
}

/// Zero contours of the node field `level` (pixel centers) as polylines.
fn marching_squares<T: Real>(window: &Window<T>, level: &[T], nx: usize, ny: usize) -> Vec<Vec<C<T>>> {
    // Edge keys: horizontal edge (i,j)-(i+1,j) => 2*(j*nx+i); vertical (i,j)-(i,j+1) => 2*(j*nx+i)+1.
    let val = |i: usize, j: usize| level[j * nx + i];
    let point_on = |key: usize| -> C<T> {
        let node = key / 2;
        let (i, j) = (node % nx, node / nx);
        let (i2, j2) = if key % 2 == 0 { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (val(i, j), val(i2, j2));
        let t = a / (a - b);
        let p = window.pixel_center(i, j);
        let q = window.pixel_center(i2, j2);
        p + (q - p) * t
    };
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let v = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
            let mask = v.iter().enumerate().fold(0u8, |m, (k, &x)| m | (((x > T::zero()) as u8) << k));
            if mask == 0 || mask == 15 {
                continue;
            }
            // cell edges: 0 top (0-1), 1 right (1-2), 2 bottom (3-2), 3 left (0-3)
            let e = [
                2 * (j * nx + i),
                2 * (j * nx + i + 1) + 1,
                2 * ((j + 1) * nx + i),
                2 * (j * nx + i) + 1,
            ];
            let inside = |k: usize| mask & (1 << k) != 0;
            let crossed: Vec<usize> = (0..4)
                .filter(|&k| {
                    let (a, b) = [(0, 1), (1, 2), (3, 2), (0, 3)][k];
                    inside(a) != inside(b)
                })
                .collect();
            if crossed.len() == 2 {
                segments.push((e[crossed[0]], e[crossed[1]]));
            } else {
                // saddle: decide by the cell average
                let center_in = (v[0] + v[1] + v[2] + v[3]) > T::zero();
                let pair_corner0 = inside(0) == center_in;
                if pair_corner0 {
                    // corner 0 connects to the center: cut corners 1 and 3
                    segments.push((e[0], e[1]));
                    segments.push((e[2], e[3]));
                } else {
                    segments.push((e[3], e[0]));
                    segments.push((e[1], e[2]));
                }
            }
        }
    }
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(s);
        adj.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    // open chains first (start at degree-1 keys), then closed loops
    let mut starts: Vec<usize> = adj
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(k, _)| *k)
        .collect();
    starts.sort_unstable();
    let mut all_keys: Vec<usize> = adj.keys().copied().collect();
    all_keys.sort_unstable();
    starts.extend(all_keys);
    for start in starts {
        let mut key = start;
        let mut chain = vec![key];
        loop {
            let next = adj[&key].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (a, b) = segments[s];
            key = if a == key { b } else { a };
            chain.push(key);
        }
        if chain.len() > 1 {
            lines.push(chain.into_iter().map(point_on).collect());
        }
    }
    lines
}

/// Result of sampling `v` on a disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscCheck<T> {
    pub inside: bool,
    /// Minimum of `log|f| - log R` over the samples (negative when outside).
    pub margin: T,
    pub samples: usize,
}

/// Samples the disc on `ceil(sqrt(samples))` rings times as many angles,
/// plus the center.
pub fn disc_in_tract<T: Real>(
    map: &AnalyticMap<T>,
    boundary_value: T,
    center: C<T>,
    radius: T,
    samples: usize,
) -> DiscCheck<T> {
    let m = (samples as f64).sqrt().ceil().max(1.0) as usize;
    let ln_r = boundary_value.ln();
    let two_pi = T::PI() + T::PI();
    let ring_min = (1..=m)
        .into_par_iter()
        .map(|k| {
            let rho = radius * lit(k as f64 / m as f64);
            (0..m)
                .map(|q| {
                    let th = two_pi * lit(q as f64 / m as f64);
                    map.log_modulus(center + C::from_polar(rho, th)) - ln_r
                })
                .fold(T::infinity(), T::min)
        })
        .reduce(T::infinity, T::min);
    // dense boundary scan, then golden-section refinement of its minimum
    let n_out = (4 * m).max(1024);
    let edge = |th: T| map.log_modulus(center + C::from_polar(radius, th)) - ln_r;
    let step = two_pi / lit(n_out as f64);
    let (k_min, e_min) = (0..n_out)
        .into_par_iter()
        .map(|k| (k, edge(step * lit(k as f64))))
        .reduce(|| (0, T::infinity()), |a, b| if b.1 < a.1 { b } else { a });
    let mut lo = step * lit(k_min as f64 - 1.0);
    let mut hi = step * lit(k_min as f64 + 1.0);
    let g: T = lit(0.618_033_988_749_895);
    let mut best = e_min;
    for _ in 0..60 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        let (f1, f2) = (edge(x1), edge(x2));
        best = best.min(f1).min(f2);
        if f1 < f2 {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let margin = ring_min.min(best).min(map.log_modulus(center) - ln_r);
    DiscCheck {
        inside: margin > T::zero(),
        margin,
        samples: m * m + 1 + n_out + 120,
    }
}

/// A zero of `f'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint<T> {
    pub z: C<T>,
    pub multiplicity: u32,
    /// `|f'/f|` at the polished point.
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport<T> {
    pub critical_points: Vec<CriticalPoint<T>>,
    pub critical_value_log_moduli: Vec<T>,
    /// `log|a|` for each configured asymptotic value (`-inf` for 0).
    pub asymptotic_value_log_moduli: Vec<T>,
    /// Zeros of `f'` inside the window boundary by the argument principle.
    pub argument_count: i64,
    pub argument_residual: T,
    /// `(r, lambda)` pairs accepted by [`singular_free_annulus`].
    pub annuli_free: Vec<(T, T)>,
}

impl<T: Real> SingularityReport<T> {
    /// Report without critical points, e.g. for `e^z`.
    pub fn empty() -> Self {
        Self {
            critical_points: Vec::new(),
            critical_value_log_moduli: Vec::new(),
            asymptotic_value_log_moduli: Vec::new(),
            argument_count: 0,
            argument_residual: T::zero(),
            annuli_free: Vec::new(),
        }
    }
}

/// Winding of `f'` along a closed polyline, tracked through `log f'`.
pub fn fprime_winding<T: Real>(map: &AnalyticMap<T>, closed: &[C<T>]) -> Result<T> {
    let seed = map.log_fprime(closed[0]);
    let end = track_log(closed, seed, |z| map.log_fprime(z), |z| map.dlog_fprime(z))?;
    Ok((end.im - seed.im) / (T::PI() + T::PI()))
}

/// Zeros of `f'` in `window` by Newton from a grid of seeds, cross-checked
/// against the argument principle on the window boundary.
pub fn critical_points<T: Real>(map: &AnalyticMap<T>, window: &Window<T>, seeds_per_axis: usize) -> Result<SingularityReport<T>> {
    let inside = |z: C<T>| {
        (z.re - window.center.re).abs() < window.half_width && (z.im - window.center.im).abs() < window.half_height
    };
    let n = seeds_per_axis.max(2);
    let mut found: Vec<C<T>> = (0..n * n)
        .into_par_iter()
        .filter_map(|k| {
            let (i, j) = (k % n, k / n);
            let fx: T = lit((i as f64 + 0.5) / n as f64 * 2.0 - 1.0);
            let fy: T = lit((j as f64 + 0.5) / n as f64 * 2.0 - 1.0);
            let mut z = window.center + C::new(fx * window.half_width, fy * window.half_height);
            for _ in 0..100 {
                let step = map.critical_newton_step(z);
                if !(step.re.is_finite() && step.im.is_finite()) {
                    return None;
                }
                z = z - step;
                if step.norm() <= lit::<T>(1e-14) * (T::one() + z.norm()) {
                    break;
                }
            }
            let l = map.dlog(z);
            (inside(z) && l.norm() < lit(1e-8)).then_some(z)
        })
        .collect();
    found.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    let mut distinct: Vec<C<T>> = Vec::new();
    for z in found {
        if !distinct.iter().any(|d| (*d - z).norm() < lit(1e-6)) {
            distinct.push(z);
        }
    }
    let two_pi = T::PI() + T::PI();
    let mut points = Vec::with_capacity(distinct.len());
    for z in distinct {
        let circle: Vec<C<T>> = (0..=64)
            .map(|k| z + C::from_polar(lit(1e-4), two_pi * lit(k as f64 / 64.0)))
            .collect();
        let w = fprime_winding(map, &circle)?;
        points.push(CriticalPoint {
            z,
            multiplicity: w.round().to_u32().unwrap_or(1).max(1),
            residual: map.dlog(z).norm(),
        });
    }
    let w = fprime_winding(map, &window.boundary(256))?;
    let count = w.round();
    let harvested: u32 = points.iter().map(|p| p.multiplicity).sum();
    if count.to_i64() != Some(harvested as i64) {
        return Err(Error::CountMismatch {
            newton: harvested as usize,
            argument: count.to_i64().unwrap_or(i64::MIN),
        });
    }
    Ok(SingularityReport {
        critical_value_log_moduli: points.iter().map(|p| map.log_modulus(p.z)).collect(),
        critical_points: points,
        asymptotic_value_log_moduli: map.asymptotic_values.iter().map(|a| a.norm().ln()).collect(),
        argument_count: count.to_i64().unwrap_or(0),
        argument_residual: (w - count).abs(),
        annuli_free: Vec::new(),
    })
}

/// Radii `r` whose annulus `A(r/lambda, lambda r)` contains no critical or
/// asymptotic value modulus of `report`.
pub fn singular_free_annulus<T: Real>(report: &SingularityReport<T>, lambda: T, candidates: &[T]) -> Result<Vec<T>> {
    if !(lambda > T::one()) {
        return Err(Error::InvalidInput(format!("lambda must exceed 1, got {}", to_f64(lambda))));
    }
    let ll = lambda.ln();
    Ok(candidates
        .iter()
        .copied()
        .filter(|r| {
            let (lo, hi) = (r.ln() - ll, r.ln() + ll);
            report
                .critical_value_log_moduli
                .iter()
                .chain(&report.asymptotic_value_log_moduli)
                .all(|&m| !(m > lo && m < hi))
        })
        .collect())
}
