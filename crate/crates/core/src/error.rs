use thiserror::Error;

use crate::conditions::ConditionReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    // --- input validation -------------------------------------------------
    #[error("breakpoint lists must be nonempty and of equal length (got {xs} abscissae, {ys} ordinates)")]
    MalformedInput { xs: usize, ys: usize },

    #[error("invalid domain [{a}, {b}]: endpoints must be finite with a < b, and xs must start at a and end at b")]
    InvalidDomain { a: f64, b: f64 },

    #[error("abscissae are not strictly increasing at index {index}")]
    UnsortedAbscissae { index: usize },

    #[error("ordinate {value} at x = {x} lies outside the domain [{a}, {b}] (not a self-map)")]
    NonSelfMap { x: f64, value: f64, a: f64, b: f64 },

    #[error("flat segment between x = {x0} and x = {x1} (consecutive ordinates are equal)")]
    FlatSegment { x0: f64, x1: f64 },

    // --- evaluation -------------------------------------------------------
    #[error("x = {x} lies outside the domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("range of the inner map [{lo}, {hi}] is not contained in the domain of the outer map")]
    RangeMismatch { lo: f64, hi: f64 },

    #[error("breakpoint budget exceeded: {breakpoints} breakpoints > budget {budget}")]
    BudgetExceeded { breakpoints: usize, budget: usize },

    #[error("no characteristic interval: {reason}")]
    NoCharacteristicInterval { reason: String },

    #[error("y = {y} is outside the image [{lo}, {hi}] of lap {lap}")]
    OutOfLapRange { lap: usize, y: f64, lo: f64, hi: f64 },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    // --- hypothesis checks ------------------------------------------------
    #[error("characteristic interval is lap {lap} of {laps}; this check requires {expected}")]
    WrongLap { lap: usize, laps: usize, expected: &'static str },

    #[error("no admissible fort pattern: {detail}")]
    NoPattern { detail: String, report: Box<ConditionReport> },

    #[error("map is not reversing-correspondence on the characteristic interval: {detail}")]
    NotReversing { detail: String },

    #[error("{count} fixed points on the interval: an order-reversing pairing has no center")]
    EvenFixedPointCount { count: usize },

    #[error("fixed points are not isolated: the map is the identity on [{from}, {to}]")]
    NonIsolatedFixedPoints { from: f64, to: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    // --- kernel -----------------------------------------------------------
    #[error("anchor {what} = {value} is not admissible (expected {expected})")]
    AnchorOutOfRange { what: String, value: f64, expected: String },

    #[error("orbit of x = {x} not located within {cap} steps")]
    OrbitCapExceeded { x: f64, cap: usize },

    #[error("{count} interior fixed points on the characteristic interval; exactly one is supported")]
    MultipleInteriorFixedPoints { count: usize },

    // --- assembly ---------------------------------------------------------
    #[error("conditions of {theorem} not met: {clause}")]
    ConditionsNotMet { theorem: String, clause: String },

    #[error("image [{image_lo}, {image_hi}] of lap {lap} escapes the range [{range_lo}, {range_hi}] of its inverse map (lap {source_lap})")]
    RangeViolation {
        lap: usize,
        source_lap: usize,
        image_lo: f64,
        image_hi: f64,
        range_lo: f64,
        range_hi: f64,
    },

    #[error("pocket {pocket} ({side}) admits several inverse maps: {candidates:?}")]
    AssemblyAmbiguous { side: &'static str, pocket: usize, candidates: Vec<String> },

    #[error("junction discontinuity at x = {x}: gap {gap}")]
    JunctionDiscontinuity { x: f64, gap: f64 },

    #[error("no applicable construction: {reason}")]
    NoApplicableTheorem { reason: String, reports: Vec<ConditionReport> },

    #[error("evaluation failed at x = {x}: {reason}")]
    EvaluationFailure { x: f64, reason: String },

    #[error("recipe error: {0}")]
    Recipe(String),
}
