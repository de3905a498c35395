use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("degenerate edge: endpoints closer than the incidence tolerance")]
    DegenerateEdge,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("incidence tolerance {0} outside (0, 1e-6)")]
    BadEpsilon(f64),
    #[error("working digits {0} outside 16..=76")]
    BadDigits(u32),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolygonError {
    #[error("N must be at least {min}, got {got}")]
    InvalidN { got: i64, min: i64 },
    #[error("vertex {0} has no rational angle")]
    IrrationalAngle(usize),
    #[error("polygon needs at least 3 vertices")]
    TooFewVertices,
    #[error("polygon is not simple")]
    NotSimple,
    #[error("vertices are not counterclockwise")]
    Clockwise,
    #[error("angle fraction {0} is not a reduced rational in (0, 2)")]
    BadAngle(String),
    #[error("angle fractions sum to {got}, expected {expected}")]
    AngleSum { got: String, expected: i64 },
    #[error("angle at vertex {vertex} measures {measured}, declared {declared}")]
    AngleMismatch { vertex: usize, measured: f64, declared: f64 },
    #[error("side label count {got} does not match vertex count {expected}")]
    LabelCount { got: usize, expected: usize },
    #[error("bad coordinate expression `{expr}`: {reason}")]
    Expr { expr: String, reason: String },
    #[error("bad gluing: {0}")]
    Gluing(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumError {
    #[error("node budget of {budget} exceeded after {partial} items")]
    ExplosionGuard { budget: u64, partial: usize },
    #[error("predicate still ambiguous at {digits} digits")]
    DegeneracyUnresolved { digits: u32 },
    #[error("enumeration requires a convex polygon")]
    NonConvex,
    #[error("empty sample")]
    EmptySample,
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstantsError {
    #[error("m must be at least 2, got {0}")]
    InvalidM(i64),
    #[error("N must be at least {min}, got {got}")]
    InvalidN { got: i64, min: i64 },
    #[error("holonomies {0} and {1} are parallel")]
    ParallelHolonomies(usize, usize),
    #[error("need at least two holonomies")]
    TooFewHolonomies,
    #[error("zero-length cusp representative")]
    ZeroLengthRep,
    #[error("empty representative list")]
    EmptyReps,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountError {
    #[error("no polygons supplied")]
    EmptyList,
    #[error("no convention reproduces the sampled counts:\n{table}")]
    CalibrationFailed { table: String },
    #[error("t must be at least 1")]
    ZeroLength,
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Constants(#[from] ConstantsError),
}
