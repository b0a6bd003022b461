use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Positions are reported as `(re, im)` pairs in `f64` regardless of the
/// scalar type the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("overflow: log|f| = {log_modulus} is not representable, use the log-scale accessor")]
    Overflow { log_modulus: f64 },
    #[error("f is numerically zero at ({0}, {1})")]
    NearZeroOfF(f64, f64),
    #[error("path passes through a zero of f near ({0}, {1})")]
    ZeroOnPath(f64, f64),
    #[error("adaptive subdivision limit reached near ({0}, {1})")]
    StepTooLarge(f64, f64),
    #[error("v <= 0 on the whole circle |z| = {r}")]
    TractEmptyOnCircle { r: f64 },
    #[error("lost the maximum-modulus curve after r = {r} (last point ({re}, {im}))")]
    LostCurve { r: f64, re: f64, im: f64 },
    #[error("component {component} is one pixel wide; double the resolution")]
    ResolutionTooCoarse { component: usize },
    #[error("zero count mismatch: newton harvest {newton}, argument principle {argument}")]
    CountMismatch { newton: usize, argument: i64 },
    #[error("branch continuation lost near ({0}, {1})")]
    BranchLoss(f64, f64),
    #[error("F' vanishes near ({0}, {1}): critical point in the working region")]
    SingularJacobian(f64, f64),
    #[error("continuation step limit reached")]
    StepLimit,
    #[error("winding number {winding} is not an integer")]
    CurveSelfIntersectionSuspected { winding: f64 },
    #[error("critical point of f on the level curve near ({0}, {1})")]
    CriticalPointOnCurve(f64, f64),
    #[error("only {count} maps land inside Q")]
    TooFewMaps { count: usize },
    #[error("images of maps {0} and {1} overlap")]
    DisjointnessFailure(usize, usize),
    #[error("pressure has no sign change on [0, {t_max}]")]
    NoBracket { t_max: f64 },
    #[error("s-range |log(s/r)| <= {half_width} around r = {r} leaves the profile grid")]
    SRangeOutsideGrid { r: f64, half_width: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
