use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;
use wvtract::examples::{lacunary_map, Example1Config, Example2Config};
use wvtract::Map;

use crate::ValidationError;

/// Entire function under study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Exp,
    CosExp,
    /// `exp(-g)` with the lacunary series `g`, truncated for `|z| <= radius`.
    Lacunary { radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadiusGrid {
    pub min: f64,
    pub max: f64,
    /// Largest ratio between consecutive grid radii.
    pub max_ratio: f64,
    /// Radii for the disc, covering and expansion checks.
    pub check: Vec<f64>,
}

impl Default for RadiusGrid {
    fn default() -> Self {
        Self {
            min: 50.0,
            max: 200.0,
            max_ratio: 1.02,
            check: vec![100.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowSpec {
    pub center: [f64; 2],
    pub half_width: f64,
    pub half_height: f64,
    /// Pixels along the longer side.
    pub resolution: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            center: [0.0, 0.0],
            half_width: 15.0,
            half_height: 15.0,
            resolution: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    pub wv_samples: usize,
    pub koebe_grid: usize,
    pub seeds_per_axis: usize,
    pub tree_samples: usize,
    pub ratio_samples: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            wv_samples: 400,
            koebe_grid: 100,
            seeds_per_axis: 64,
            tree_samples: 512,
            ratio_samples: 10_000,
        }
    }
}

/// Similarity system of `maps` maps with ratio `ratio` in the unit square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub maps: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IfsSpec {
    /// Radius of the assembled system. `dimension` needs it unless a
    /// fixture is given; `example1` falls back to its largest admissible
    /// radius.
    pub radius: Option<f64>,
    pub u_range: Option<(i64, i64)>,
    pub log_s_range: Option<(f64, f64)>,
    /// Use a similarity fixture instead of assembling from the function.
    pub fixture: Option<Fixture>,
    pub tol: f64,
}

impl Default for IfsSpec {
    fn default() -> Self {
        Self {
            radius: None,
            u_range: None,
            log_s_range: None,
            fixture: None,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeSpec {
    pub epsilon: f64,
    pub n_max: u32,
}

impl Default for TreeSpec {
    fn default() -> Self {
        Self { epsilon: 0.125, n_max: 3 }
    }
}

/// One run configuration. Every algorithm is deterministic, so there is
/// no seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub function: FunctionSpec,
    /// Boundary value `R` of the tract.
    #[serde(default = "one")]
    pub boundary_value: f64,
    #[serde(default = "two")]
    pub lambda: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub radii: RadiusGrid,
    #[serde(default)]
    pub window: WindowSpec,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub ifs: IfsSpec,
    #[serde(default)]
    pub tree: TreeSpec,
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn default_tau() -> f64 {
    0.3
}

/// A validated scenario with the hash of its source text.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub input_hash: String,
    /// Validation notes that do not stop the run.
    pub warnings: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load(path: &Path) -> Result<Loaded, ValidationError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ValidationError(format!("cannot read scenario {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Loaded, ValidationError> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| ValidationError(format!("scenario: {e}")))?;
    let warnings = scenario.validate()?;
    Ok(Loaded {
        scenario,
        input_hash: sha256_hex(text.as_bytes()),
        warnings,
    })
}

impl Scenario {
    /// Rejects inconsistent parameters and returns warnings for the
    /// borderline ones.
    pub fn validate(&self) -> Result<Vec<String>, ValidationError> {
        let bad = |m: String| Err(ValidationError(m));
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(ValidationError(format!("{name} must be positive and finite, got {x}")))
            }
        };
        if !(self.lambda.is_finite() && self.lambda > 1.0) {
            return bad(format!("lambda must exceed 1, got {}", self.lambda));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return bad(format!("tau must lie in (0, 1), got {}", self.tau));
        }
        positive("boundary_value", self.boundary_value)?;
        positive("radii.min", self.radii.min)?;
        if !(self.radii.max > self.radii.min) {
            return bad(format!("radii.max {} must exceed radii.min {}", self.radii.max, self.radii.min));
        }
        if !(self.radii.max_ratio > 1.0) {
            return bad(format!("radii.max_ratio must exceed 1, got {}", self.radii.max_ratio));
        }
        for &r in &self.radii.check {
            positive("radii.check entry", r)?;
        }
        positive("window.half_width", self.window.half_width)?;
        positive("window.half_height", self.window.half_height)?;
        if self.window.resolution < 2 {
            return bad("window.resolution must be at least 2".into());
        }
        if let FunctionSpec::Lacunary { radius } = self.function {
            positive("function.radius", radius)?;
        }
        if let Some(f) = &self.ifs.fixture {
            if f.maps < 2 || !(f.ratio > 0.0 && f.ratio * (f.maps as f64).sqrt().ceil() < 1.0) {
                return bad(format!("fixture needs maps >= 2 and ratio * ceil(sqrt(maps)) < 1, got {f:?}"));
            }
        }
        if let Some(r) = self.ifs.radius {
            positive("ifs.radius", r)?;
        }
        if !(self.tree.epsilon > 0.0 && self.tree.epsilon <= 0.125) {
            return bad(format!("tree.epsilon must lie in (0, 1/8], got {}", self.tree.epsilon));
        }
        if self.tree.n_max < 2 {
            return bad("tree.n_max must be at least 2".into());
        }
        let mut warnings = Vec::new();
        if (self.tau - 0.5).abs() < 1e-12 {
            warnings.push("tau = 0.5: the additive and multiplicative disc bounds coincide in type".into());
        }
        Ok(warnings)
    }

    pub fn map(&self) -> Map {
        match self.function {
            FunctionSpec::Exp => Map::exp(self.boundary_value),
            FunctionSpec::CosExp => Map::cos_exp(self.boundary_value),
            FunctionSpec::Lacunary { radius } => lacunary_map(radius, self.boundary_value),
        }
    }

    pub fn example1_config(&self) -> Example1Config {
        Example1Config {
            boundary_value: self.boundary_value,
            lambda: self.lambda,
            tau: self.tau,
            check_radii: self.radii.check.clone(),
            ifs_radius: self.ifs.radius,
            render_half_width: self.window.half_width,
            render_resolution: self.window.resolution,
            wv_samples: self.sampling.wv_samples,
            koebe_grid: self.sampling.koebe_grid,
            ..Example1Config::default()
        }
    }

    pub fn example2_config(&self) -> Example2Config {
        Example2Config {
            epsilon: self.tree.epsilon,
            n_max: self.tree.n_max,
            boundary_value: self.boundary_value,
            lambda: self.lambda,
            tree_samples: self.sampling.tree_samples,
            ratio_samples: self.sampling.ratio_samples,
            seeds_per_axis: self.sampling.seeds_per_axis,
        }
    }
}
