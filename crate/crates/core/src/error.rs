use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes are incompatible.
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    /// Input violates a documented precondition.
    Validation(String),
    /// A NaN or infinite value where a finite one is required.
    NonFinite {
        row: usize,
        col: usize,
    },
    /// Jacobi sweeps ran out before the off-diagonal norm fell below tolerance.
    Convergence {
        sweeps: usize,
        residual: f64,
    },
    /// A zero-variance column where variance is required.
    DegenerateColumn {
        indicator: String,
    },
    /// A qualitative label with no 0/1 mapping.
    UnmappedLabel {
        label: String,
    },
    InsufficientObjects {
        found: usize,
        required: usize,
    },
    /// Every indicator has entropy 1, so there is no information to weight.
    DegenerateWeights,
    /// A value outside the domain of the operation.
    Domain {
        value: f64,
        lower: f64,
        upper: f64,
    },
}

impl Error {
    /// True for failures caused by the numbers rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::DegenerateColumn { .. }
                | Error::DegenerateWeights
                | Error::InsufficientObjects { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape { op, left, right } => write!(
                f,
                "shape mismatch in {op}: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::Validation(msg) => write!(f, "invalid input: {msg}"),
            Error::NonFinite { row, col } => {
                write!(f, "non-finite value at row {row}, column {col}")
            }
            Error::Convergence { sweeps, residual } => write!(
                f,
                "eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})"
            ),
            Error::DegenerateColumn { indicator } => {
                write!(f, "indicator '{indicator}' has zero variance")
            }
            Error::UnmappedLabel { label } => {
                write!(f, "label '{label}' has no 0/1 mapping")
            }
            Error::InsufficientObjects { found, required } => write!(
                f,
                "need at least {required} evaluated objects, found {found}"
            ),
            Error::DegenerateWeights => write!(
                f,
                "every indicator has entropy 1; weights are undefined"
            ),
            Error::Domain {
                value,
                lower,
                upper,
            } => write!(f, "value {value} outside [{lower}, {upper}]"),
        }
    }
}

impl core::error::Error for Error {}
