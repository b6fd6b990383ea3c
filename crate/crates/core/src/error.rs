use std::fmt;

use thiserror::Error;

/// Errors raised by the kernel.
///
/// Every variant has a stable short code (see [`Error::code`]) which the
/// command-line front end reports verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("modulus is not irreducible over F_{p}")]
    ReducibleModulus { p: u64 },
    #[error("operands belong to different fields")]
    MixedField,
    #[error("operands belong to different rings")]
    MixedRing,
    #[error("division by zero")]
    DivisionByZero,
    #[error("every coefficient of the linearized equation is zero")]
    AllCoefficientsZero,
    #[error("cannot invert an element of valuation {0}")]
    NonUnitInverse(Val),
    #[error("result has negative valuation and leaves the valuation ring")]
    PrecisionLoss,
    #[error("insufficient precision: {needed} digits needed, {available} available")]
    InsufficientPrecision { needed: i64, available: u32 },
    #[error("series truncated at Y-degree {bound} cannot be evaluated exactly mod p^{precision} at this point")]
    TruncationUnsound { bound: u32, precision: u32 },
    #[error("series is not regular in {0}")]
    NotRegular(String),
    #[error("denominator vanishes at the prolongation point")]
    QuotientSingularity,
    #[error("linear approximation vanishes identically")]
    ZeroGradient,
    #[error("residue equation has no root in F_{p}^{k} (extension required: {extension_required})")]
    ResidueUnsolvable {
        p: u64,
        k: usize,
        extension_required: bool,
    },
    #[error("no progress: {0}")]
    StalledProgress(String),
    #[error("configuration rejected: {0}")]
    ConfigRejected(String),
    #[error("syntax error at column {column}: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown series `{0}`")]
    UnknownSeries(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("cannot parse `{0}`")]
    Parse(String),
}

impl Error {
    /// Stable identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "E_NOT_PRIME",
            Error::InvalidParameters(_) => "E_INVALID_PARAMETERS",
            Error::ReducibleModulus { .. } => "E_REDUCIBLE_MODULUS",
            Error::MixedField => "E_MIXED_FIELD",
            Error::MixedRing => "E_MIXED_RING",
            Error::DivisionByZero => "E_DIVISION_BY_ZERO",
            Error::AllCoefficientsZero => "E_ALL_COEFFICIENTS_ZERO",
            Error::NonUnitInverse(_) => "E_NON_UNIT_INVERSE",
            Error::PrecisionLoss => "E_PRECISION_LOSS",
            Error::InsufficientPrecision { .. } => "E_INSUFFICIENT_PRECISION",
            Error::TruncationUnsound { .. } => "E_TRUNCATION_UNSOUND",
            Error::NotRegular(_) => "E_NOT_REGULAR",
            Error::QuotientSingularity => "E_QUOTIENT_SINGULARITY",
            Error::ZeroGradient => "E_ZERO_GRADIENT",
            Error::ResidueUnsolvable { .. } => "E_RESIDUE_UNSOLVABLE",
            Error::StalledProgress(_) => "E_STALLED_PROGRESS",
            Error::ConfigRejected(_) => "E_CONFIG_REJECTED",
            Error::Syntax { .. } => "E_SYNTAX",
            Error::UnknownSeries(_) => "E_UNKNOWN_SERIES",
            Error::Arity(_) => "E_ARITY",
            Error::Parse(_) => "E_PARSE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// A valuation in `Z ∪ {∞}`.
///
/// At finite precision `N`, `Inf` means "at least `N`".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Fin(i64),
    Inf,
}

impl Val {
    pub fn is_inf(self) -> bool {
        matches!(self, Val::Inf)
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Val::Fin(v) => Some(v),
            Val::Inf => None,
        }
    }
}

impl std::ops::Add for Val {
    type Output = Val;

    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a + b),
            _ => Val::Inf,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(v) => write!(f, "{v}"),
            Val::Inf => write!(f, "inf"),
        }
    }
}
