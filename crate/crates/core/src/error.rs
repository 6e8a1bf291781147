use num_bigint::BigUint;
use std::fmt;

/// Errors shared across the crate. Variants carry enough context to
/// reconstruct what was asked for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An element id is not a valid canonical id for its group.
    InvalidElement { id: BigUint, order: BigUint },
    /// A digit exceeds the base at its position.
    DigitOutOfRange { position: usize, digit: u64, base: u64 },
    /// A digit vector has the wrong number of digits for the codec.
    LengthMismatch { expected: usize, got: usize },
    /// Codec order does not equal the ambient group order.
    OrderMismatch { codec_order: BigUint, group_order: BigUint },
    /// A query exceeded its declared probe budget.
    ProbeBudgetExceeded { budget: usize },
    /// A probe addressed a cell outside the memory.
    OutOfBoundsProbe { index: usize, cells: usize },
    /// Parameters violate an operation's precondition.
    InvalidParameters(String),
    /// The group exceeds a configured desk-scale cap.
    GroupTooLarge { order: BigUint, cap: BigUint },
    /// The group is too small for the construction to be guaranteed.
    GroupTooSmall { order: BigUint, required: BigUint },
    /// A butterfly node label is out of range.
    LabelOutOfRange { label: u64, limit: u64 },
    /// The requested encoding mode is not available for these parameters.
    UnsupportedMode(String),
    /// Encoding parameters exceed the desk-scale cap.
    ParameterOverflow(String),
    /// A realization family does not cover every subset of the query set.
    IncompleteCover { expected: u64, got: u64 },
    /// The two halves of an immunized-function input are equal.
    EqualHalves,
    /// A function-table input lies outside the domain.
    OutOfDomain { x: u64, domain: u64 },
    /// Average degree too small for the girth bound to say anything.
    DegreeTooSmall { edges: usize, nodes: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidElement { id, order } => {
                write!(f, "element id {} is not below group order {}", id, order)
            }
            Error::DigitOutOfRange { position, digit, base } => {
                write!(f, "digit {} at position {} exceeds base {}", digit, position, base)
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "expected {} digits, got {}", expected, got)
            }
            Error::OrderMismatch { codec_order, group_order } => {
                write!(f, "codec order {} does not match group order {}", codec_order, group_order)
            }
            Error::ProbeBudgetExceeded { budget } => {
                write!(f, "probe budget of {} cells exceeded", budget)
            }
            Error::OutOfBoundsProbe { index, cells } => {
                write!(f, "probe of cell {} out of bounds for {} cells", index, cells)
            }
            Error::InvalidParameters(msg) => write!(f, "invalid parameters: {}", msg),
            Error::GroupTooLarge { order, cap } => {
                write!(f, "group order {} exceeds cap {}", order, cap)
            }
            Error::GroupTooSmall { order, required } => {
                write!(f, "group order {} is below required {}", order, required)
            }
            Error::LabelOutOfRange { label, limit } => {
                write!(f, "node label {} out of range [0, {})", label, limit)
            }
            Error::UnsupportedMode(msg) => write!(f, "unsupported mode: {}", msg),
            Error::ParameterOverflow(msg) => write!(f, "parameter overflow: {}", msg),
            Error::IncompleteCover { expected, got } => {
                write!(f, "realizations cover {} subsets, expected {}", got, expected)
            }
            Error::EqualHalves => write!(f, "input halves must differ"),
            Error::OutOfDomain { x, domain } => {
                write!(f, "input {} outside domain [0, {})", x, domain)
            }
            Error::DegreeTooSmall { edges, nodes } => {
                write!(f, "average degree 2*{}/{} is not above 2", edges, nodes)
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
