use thiserror::Error;

use crate::space::PointId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("empty compact set")]
    EmptyCompact,
    #[error("point {0} is not in the space")]
    UnknownPoint(PointId),
    #[error("unknown builtin space {0:?}")]
    UnknownBuiltin(String),
    #[error("invalid space: {0}")]
    Invalid(String),
    #[error("metric axiom {axiom} fails at points {points:?}")]
    MetricAxiom { axiom: &'static str, points: Vec<PointId> },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("operator {label:?} has {got} samples, space has {expected}")]
    SizeMismatch { label: String, expected: usize, got: usize },
    #[error("operator {label:?} has a non-positive or non-finite weight at point {point}")]
    BadWeight { label: String, point: PointId },
    #[error("operator {label:?} round trip moves point {point} by {displacement}")]
    RoundTrip { label: String, point: PointId, displacement: f64 },
    #[error("uniform boundedness violated: sup weight {sup} exceeds {bound} (member {member})")]
    Unbounded { member: usize, sup: f64, bound: f64 },
    #[error("word cap must be at least 1")]
    WordCap,
    #[error("empty operator family")]
    EmptyFamily,
    #[error("equicontinuity precondition fails on compact {compact}: member {member} sends ({s}, {t}) at distance {d_st} to distance {d_images}")]
    NotEquicontinuous { compact: usize, member: usize, s: PointId, t: PointId, d_st: f64, d_images: f64 },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("tuple lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("resolution too coarse for disjointness at step {0}")]
    ResolutionTooCoarse(usize),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TupleError {
    #[error("enumeration index must be at least 1")]
    ZeroIndex,
    #[error("invalid consecutive index: start {start}, length {len}")]
    BadIndex { start: u64, len: u64 },
    #[error("C = {0} is outside (1, 1.1]")]
    ConstantOutOfRange(f64),
    #[error("(p, q) = ({p}, {q}) is outside the admissible range for the tuple")]
    ExceptionalBounds { p: u64, q: u64 },
    #[error("class of tuple {0} is not registered")]
    Unregistered(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("group is not isometric: element {element} has weight {weight} at point {point}")]
    NotIsometric { element: usize, point: PointId, weight: f64 },
    #[error("depth must be at least 2")]
    Depth,
    #[error("label {gamma} is outside the orbit table of base point {base}")]
    Label { base: usize, gamma: u32 },
    #[error("base index {0} exceeds the selected base points")]
    BaseIndex(u64),
    #[error("hypothesis violation at index {index}: value {value}")]
    Hypothesis { index: usize, value: f64 },
    #[error("triangular system is malformed: {0}")]
    Malformed(String),
    #[error("zeta bound violated at ({row}, {col}): {value} > {bound}")]
    ZetaBound { row: usize, col: usize, value: f64, bound: f64 },
    #[error("beta entry {index} = {value} is outside the window [{lo}, {hi}]")]
    BetaWindow { index: usize, value: f64, lo: f64, hi: f64 },
    #[error("witness infeasible: {0}")]
    Witness(String),
    #[error("comparison precondition fails: {0}")]
    Comparison(String),
    #[error("tuple does not resolve to a registered class: {0}")]
    Unresolved(String),
    #[error(transparent)]
    Tuple(#[from] TupleError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundedError {
    #[error("group unbounded at word cap {cap}: sup weight {sup} exceeds {bound}")]
    Unbounded { cap: usize, sup: f64, bound: f64 },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Bounded(#[from] BoundedError),
}
