use thiserror::Error;

/// Errors raised by the algebra, geometry and verification pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("rational function is identically zero")]
    IdenticallyZero,
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("point is not supported by this operation: {0}")]
    UnsupportedPoint(String),
    #[error("exact (rational) coefficients are required")]
    RequiresExactMode,
    #[error("Moebius transform is singular (ad - bc = 0)")]
    SingularMoebius,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("cannot place {requested} samples with the requested exclusion radius")]
    InfeasibleSampling { requested: usize },
    #[error("boundary exponent is undefined on annulus circles")]
    ExponentUndefined,
    #[error("path passes through a pole of the metric near {0}")]
    InvalidPath(String),
    #[error("finite-difference stencil hits a pole or zero of the conformal factor")]
    BadStencil,
    #[error("the map is constant; exceptional values are not defined")]
    ConstantMap,
    #[error("both Gauss map components are constant (flat surface)")]
    FlatSurface,
    #[error("phi_1 - i phi_2 vanishes identically")]
    DegenerateFrame,
    #[error("degenerate point: |S1|^2 + |S2|^2 = 0")]
    Degenerate,
    #[error("immersion is multivalued: some residue is not real")]
    MultivaluedImmersion,
    #[error("f has a zero on the unit circle near {0}")]
    ConditionCViolated(String),
    #[error("nonzero period residue {0}")]
    PeriodObstruction(String),
    #[error("no admissible odd k up to {cap}")]
    KSearchExhausted { cap: u32 },
    #[error("invalid covering degree k = {k}: {reason}")]
    InvalidCover { k: u32, reason: String },
    #[error("invalid Laurent data: {0}")]
    InvalidLaurent(String),
    #[error("forms are not conformal: sum of squares is not identically zero")]
    NotConformal,
    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },
    #[error("mesh export refused: {0}")]
    ExportRefused(String),
    #[error("malformed mesh text at line {line}: {msg}")]
    MeshFormat { line: usize, msg: String },
    #[error("stage `{stage}` failed: {reason}")]
    Stage { stage: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
