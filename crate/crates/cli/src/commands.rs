use anyhow::Result;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;
use wvtract::examples::{example1_pipeline, example2_report, radius_checks};
use wvtract::ifs::{
    assemble_ifs, bowen_dimension, pressure_lower_bound_direct, ConformalIFS, DimensionInterval, IfsSetup,
};
use wvtract::maxmod::{growth_profile, log_grid, regular_radii, tyler_real_threshold, tyler_trace};
use wvtract::tract::{compute_tract_mask, Window};
use wvtract::wv::{check_epsilon, default_alpha_beta, measure_g};
use wvtract::Complex;

use crate::report::{num, write_csv, write_pgm, write_ppm, RunReport};
use crate::scenario::{FunctionSpec, Loaded};
use crate::ValidationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    RenderTract,
    Growth,
    Maxcurve,
    WvCheck,
    CoverCheck,
    Dimension,
    Example1,
    Example2,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::RenderTract => "render-tract",
            Command::Growth => "growth",
            Command::Maxcurve => "maxcurve",
            Command::WvCheck => "wv-check",
            Command::CoverCheck => "cover-check",
            Command::Dimension => "dimension",
            Command::Example1 => "example1",
            Command::Example2 => "example2",
        }
    }
}

/// Run context shared by the commands.
pub struct Ctx<'a> {
    pub loaded: &'a Loaded,
    pub out: &'a Path,
    pub verbose: bool,
    pub timings: bool,
    /// Lines for standard output, printed after the report is written.
    pub stdout: Vec<String>,
}

impl Ctx<'_> {
    fn note(&self, msg: &str) {
        if self.verbose {
            eprintln!("[{}] {msg}", self.loaded.input_hash.get(..8).unwrap_or(""));
        }
    }

    fn timed<T>(&self, report: &mut RunReport, name: &str, f: impl FnOnce() -> T) -> T {
        self.note(name);
        let t0 = Instant::now();
        let v = f();
        if self.timings {
            report
                .timings_ms
                .get_or_insert_with(Default::default)
                .insert(name.into(), t0.elapsed().as_millis());
        }
        v
    }
}

/// Runs `cmd`, filling `report`. Validation problems surface as
/// [`ValidationError`]; anything else is a computation error.
pub fn run(cmd: Command, ctx: &mut Ctx, report: &mut RunReport) -> Result<()> {
    match cmd {
        Command::RenderTract => render_tract(ctx, report),
        Command::Growth => growth(ctx, report),
        Command::Maxcurve => maxcurve(ctx, report),
        Command::WvCheck => wv_check(ctx, report),
        Command::CoverCheck => cover_check(ctx, report),
        Command::Dimension => dimension(ctx, report),
        Command::Example1 => example1(ctx, report),
        Command::Example2 => example2(ctx, report),
    }
}

/// Deterministic colour of component `id`.
fn palette(id: u32) -> [u8; 3] {
    let h = id.wrapping_mul(2_654_435_761);
    [128 | (h >> 24) as u8, 128 | (h >> 16) as u8, 128 | (h >> 8) as u8]
}

#[derive(Serialize)]
struct RenderSummary {
    nx: usize,
    ny: usize,
    pixel_size: f64,
    inside_pixels: usize,
    components: Vec<wvtract::tract::ComponentMeta>,
    boundary_polylines: usize,
    /// Distance from the window center to the nearest boundary vertex.
    boundary_distance_to_center: f64,
}

fn render_tract(ctx: &mut Ctx, report: &mut RunReport) -> Result<()> {
    let s = &ctx.loaded.scenario;
    let w = &s.window;
    let center = Complex::new(w.center[0], w.center[1]);
    let window = Window::new(center, w.half_width, w.half_height, w.resolution)?;
    let mask = ctx.timed(report, "mask", || compute_tract_mask(&s.map(), s.boundary_value, window))?;
    let grey: Vec<u8> = mask.labels.iter().map(|&l| if l > 0 { 255 } else { 0 }).collect();
    let rgb: Vec<u8> = mask
        .labels
        .iter()
        .flat_map(|&l| if l > 0 { palette(l) } else { [0, 0, 0] })
        .collect();
    write_pgm(&ctx.out.join("tract.pgm"), mask.nx, mask.ny, &grey)?;
    write_ppm(&ctx.out.join("tract.ppm"), mask.nx, mask.ny, &rgb)?;
    let summary = RenderSummary {
        nx: mask.nx,
        ny: mask.ny,
        pixel_size: mask.window.pixel_size(),
        inside_pixels: grey.iter().filter(|&&p| p > 0).count(),
        components: mask.components.clone(),
        boundary_polylines: mask.boundary_polylines.len(),
        boundary_distance_to_center: mask
            .boundary_polylines
            .iter()
            .flatten()
            .map(|z| (z - center).norm())
            .fold(f64::INFINITY, f64::min),
    };
    report.stage("render", w, None, &summary)
}

fn grid(ctx: &Ctx) -> Vec<f64> {
    let r = &ctx.loaded.scenario.radii;
    log_grid(r.min, r.max, r.max_ratio)
}

fn growth(ctx: &mut Ctx, report: &mut RunReport) -> Result<()> {
    let s = &ctx.loaded.scenario;
    let map = s.map();
    let radii = grid(ctx);
    let profile = ctx.timed(report, "profile", || growth_profile(&map, &radii, s.boundary_value))?;
    let (alpha, beta) = default_alpha_beta(s.tau);
    let regular = regular_radii(&map, &profile, 0.1, alpha, beta)?;
    let eps_ok = check_epsilon(&profile, 0.1);
    let rows: Vec<Vec<String>> = profile
        .samples
        .iter()
        .zip(&eps_ok)
        .map(|(p, &e)| {
            let args: Vec<String> = p.argmax_args.iter().map(|&t| num(t)).collect();
            vec![
                num(p.r),
                num(p.b),
                num(p.a),
                p.regular.to_string(),
                regular.contains(&p.r).to_string(),
                e.to_string(),
                args.join(";"),
            ]
        })
        .collect();
    write_csv(
        ctx.out,
        "growth.csv",
        &["r", "B", "a", "convex", "regular", "epsilon_ok", "argmax_args"],
        &rows,
    )?;
    if s.function == FunctionSpec::Exp {
        // B = r - log R, a = r, z_r = r in closed form
        let inner = &profile.samples[1..profile.samples.len() - 1];
        let pass = inner.iter().all(|p| {
            ((p.b - (p.r - s.boundary_value.ln())) / p.b).abs() < 1e-9
                && ((p.a - p.r) / p.r).abs() < 0.01
                && p.argmax_args.iter().all(|t| t.abs() < 1e-6)
        });
        report.criterion("C1", pass);
    }
    report.stage("growth_profile", &s.radii, None, &profile)?;
    report.stage("regular_radii", &(alpha, beta), None, &regular)
}

fn maxcurve(ctx: &mut Ctx, report: &mut RunReport) -> Result<()> {
    let s = &ctx.loaded.scenario;
    let map = s.map();
    let radii = grid(ctx);
    let trace = ctx.timed(report, "trace", || tyler_trace(&map, &radii))?;
    let rows: Vec<Vec<String>> = trace
        .iter()
        .map(|p| {
            vec![
                num(p.r),
                num(p.z.re),
                num(p.z.im),
                num(p.z.arg()),
                num(p.a.re),
                num(p.a.im),
                num(p.b.re),
                num(p.b.im),
            ]
        })
        .collect();
    write_csv(
        ctx.out,
        "maxcurve.csv",
        &["r", "x", "y", "arg", "A_re", "A_im", "B_re", "B_im"],
        &rows,
    )?;
    report.stage("tyler_trace", &s.radii, None, &trace)?;
    if map.has_real_coefficients() {
        let threshold = tyler_real_threshold(&map, 0.01, 0.99);
        if s.function == FunctionSpec::CosExp {
            report.criterion("C3", threshold.is_some_and(|x| (x - 0.43).abs() < 0.01));
        }
        report.stage("tyler_real_threshold", &(0.01, 0.99), None, &threshold)?;
    }
    Ok(())
}

fn wv_check(ctx: &mut Ctx, report: &mut RunReport) -> Result<()> {
    let s = &ctx.loaded.scenario;
    let map = s.map();
    let mut rows = Vec::new();
    let mut discs = Vec::new();
    for &r in &s.radii.check {
        let profile = growth_profile(&map, &log_grid(r / 1.1, r * 1.1, 1.02), s.boundary_value)?;
        let rep = ctx.timed(report, &format!("wv r={r}"), || measure_g(&map, &profile, r, s.tau, s.sampling.wv_samples))?;
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        rows.push(vec![
            num(r),
            num(rep.a),
            num(rep.radius),
            rep.in_tract.to_string(),
            num(rep.margin),
            opt(rep.sup_g),
            num(rep.bound),
            opt(rep.ratio),
            rep.multiplicative.to_string(),
            rep.converged.to_string(),
        ]);
        discs.push(rep);
    }
    write_csv(
        ctx.out,
        "wv.csv",
        &["r", "a", "radius", "in_tract", "margin", "sup_g", "bound", "ratio", "multiplicative", "converged"],
        &rows,
    )?;
    let pass = discs.iter().all(|d| d.in_tract && d.ratio.is_some_and(|x| x < 1.0));
    report.stage("wv_discs", &(s.tau, &s.radii.check, s.sampling.wv_samples), Some(pass), &discs)
}

fn cover_check(ctx: &mut Ctx, report: &mut RunReport) -> Result<()> {
    let s = &ctx.loaded.scenario;
    let map = s.map();
    let cfg = s.example1_config();
    let (alpha, beta) = default_alpha_beta(s.tau);
    let mut checks = Vec::new();
    for &r in &s.radii.check {
        checks.push(ctx.timed(report, &format!("cover r={r}"), || radius_checks(&map, &cfg, r, alpha, beta))?);
    }
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            let w: Vec<String> = c.covering_windings.iter().map(|&x| num(x)).collect();
            vec![num(c.r), w.join(";"), c.covering_pass.to_string(), num(c.koebe.max_violation)]
        })
        .collect();
    write_csv(ctx.out, "cover.csv", &["r", "windings", "covering_pass", "koebe_max_violation"], &rows)?;
    let covering = checks.iter().all(|c| c.covering_pass);
    let koebe = checks.iter().all(|c| c.koebe.max_violation <= 1.0);
    if s.function == FunctionSpec::CosExp && checks.len() >= 3 {
        report.criterion("C5", koebe);
        report.criterion("C8", covering);
    }
    report.stage("radius_checks", &(&s.radii.check, s.lambda, s.tau), Some(covering && koebe), &checks)
}

#[derive(Serialize)]
struct FixtureSummary {
    maps: usize,
    ratio: f64,
    exact: f64,
    dimension: DimensionInterval,
    pressure_lower_bound_direct: f64,
}

/// Final stdout line of the dimension commands.
pub fn dim_line(d: &DimensionInterval) -> String {
    format!("dim_lo={:.12} dim_hi={:.12} P1={:.12}", d.lo, d.hi, d.p1.lower)
}

fn dimension(ctx: &mut Ctx, report: &mut RunReport) -> Result<()> {
    let s = &ctx.loaded.scenario;
    let interval = if let Some(f) = &s.ifs.fixture {
        let ifs = ConformalIFS::similarity_fixture(f.maps, f.ratio)?;
        let d = bowen_dimension(&ifs, s.ifs.tol)?;
        let exact = (f.maps as f64).ln() / (1.0 / f.ratio).ln();
        report.criterion("C9", (d.lo - exact).abs() < 1e-3 && (d.hi - exact).abs() < 1e-3);
        let summary = FixtureSummary {
            maps: f.maps,
            ratio: f.ratio,
            exact,
            dimension: d,
            pressure_lower_bound_direct: pressure_lower_bound_direct(&ifs),
        };
        report.stage("fixture_dimension", &s.ifs, Some(d.lo <= exact + 1e-3 && d.hi >= exact - 1e-3), &summary)?;
        d
    } else {
        let r = s
            .ifs
            .radius
            .ok_or_else(|| ValidationError("dimension needs ifs.radius or ifs.fixture".into()))?;
        let mut setup = IfsSetup::new(r, s.lambda, s.tau);
        setup.u_range = s.ifs.u_range;
        setup.log_s_range = s.ifs.log_s_range;
        let assembly = ctx.timed(report, "assemble", || assemble_ifs(&s.map(), &setup))?;
        let dim = ctx.timed(report, "bowen", || assembly.report(s.tau, s.ifs.tol))?;
        let pass = dim.pressure_lower_bound_direct > 0.0 && dim.dimension.lo > 1.0;
        if s.function == FunctionSpec::CosExp {
            report.criterion("C10", pass);
        }
        report.stage("ifs_dimension", &setup, Some(pass), &dim)?;
        dim.dimension
    };
    ctx.stdout.push(dim_line(&interval));
    Ok(())
}

fn example1(ctx: &mut Ctx, report: &mut RunReport) -> Result<()> {
    let s = &ctx.loaded.scenario;
    if s.function != FunctionSpec::CosExp {
        return Err(ValidationError("example1 needs function kind cos_exp".into()).into());
    }
    let cfg = s.example1_config();
    let rep = ctx.timed(report, "example1", || example1_pipeline(&cfg))?;
    report.criterion("C3", rep.tyler_threshold.is_some_and(|x| (x - 0.43).abs() < 0.01));
    report.criterion(
        "C4",
        rep.critical_value_rel_err < 1e-9 && rep.admissible_radii.iter().filter(|&&r| r < (6.0 * PI).exp()).count() >= 5,
    );
    let enough = rep.radius_checks.len() >= 3;
    report.criterion("C5", enough && rep.radius_checks.iter().all(|c| c.koebe.max_violation <= 1.0));
    report.criterion("C8", enough && rep.radius_checks.iter().all(|c| c.covering_pass));
    report.criterion(
        "C10",
        rep.dimension.pressure_lower_bound_direct > 0.0 && rep.dimension.dimension.lo > 1.0,
    );
    let rows: Vec<Vec<String>> = rep
        .radius_checks
        .iter()
        .map(|c| {
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            vec![
                num(c.r),
                c.regular.to_string(),
                c.wv.in_tract.to_string(),
                opt(c.wv.ratio),
                c.covering_pass.to_string(),
                num(c.koebe.max_violation),
            ]
        })
        .collect();
    write_csv(
        ctx.out,
        "example1_radii.csv",
        &["r", "regular", "wv_in_tract", "wv_ratio", "covering_pass", "koebe_max_violation"],
        &rows,
    )?;
    ctx.stdout.push(dim_line(&rep.dimension.dimension));
    report.stage("example1", &cfg, Some(rep.claims_hold), &rep)
}

fn example2(ctx: &mut Ctx, report: &mut RunReport) -> Result<()> {
    let s = &ctx.loaded.scenario;
    let cfg = s.example2_config();
    let rep = ctx.timed(report, "example2", || example2_report(&cfg))?;
    let level = |n: u32| rep.zero_counts.iter().find(|z| z.n == n);
    report.criterion(
        "C11",
        [2, 3].iter().all(|&n| {
            level(n).is_some_and(|z| z.argument_count == (1i64 << n) - 1 && z.residual < 0.01)
        }),
    );
    if let Some(t) = rep.third_key.iter().find(|t| t.n == 3) {
        report.criterion("C12", t.pass);
    }
    report.criterion("C13", rep.fourth_key.iter().all(|f| f.pass));
    let rows: Vec<Vec<String>> = rep
        .gaps
        .critical_values
        .iter()
        .map(|c| {
            vec![
                num(c.z.re),
                num(c.z.im),
                c.group.to_string(),
                num(c.log_modulus),
                c.in_tract.to_string(),
            ]
        })
        .collect();
    write_csv(
        ctx.out,
        "example2_critical_values.csv",
        &["re", "im", "group", "log_modulus", "in_tract"],
        &rows,
    )?;
    let pass = rep.zero_counts.iter().all(|z| z.argument_count == z.expected)
        && rep.third_key.iter().all(|t| t.pass)
        && rep.fourth_key.iter().all(|f| f.pass);
    report.stage("example2", &cfg, Some(pass), &rep)
}
