use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An edge record carries an empty user or object token.
    EmptyToken,
    /// No edges at all; there is no graph to build.
    EmptyGraph,
    /// Zero-degree nodes under the reject policy.
    IsolatedNodes {
        objects: Vec<String>,
        users: Vec<String>,
    },
    /// The operation needs a single connected component. Each inner list
    /// holds the object labels of one component.
    Disconnected {
        components: Vec<Vec<String>>,
    },
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    /// Dense materialization refused above the size cap.
    TooLarge {
        n: usize,
        max_n: usize,
    },
    InvalidParameter(String),
    /// An iterative method stopped at its iteration cap.
    NotConverged {
        iterations: usize,
        estimate: f64,
        residual: f64,
    },
    /// A numerical self-check failed. This points at a bug in the operator.
    Verification(String),
    /// No probe edge could be evaluated.
    EmptyProbeSet {
        skipped: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyToken => write!(f, "edge record has an empty user or object token"),
            Error::EmptyGraph => write!(f, "no edges: cannot build a graph"),
            Error::IsolatedNodes { objects, users } => write!(
                f,
                "zero-degree nodes: objects {:?}, users {:?}",
                objects, users
            ),
            Error::Disconnected { components } => {
                write!(
                    f,
                    "graph has {} connected components (one required):",
                    components.len()
                )?;
                for (i, objects) in components.iter().enumerate() {
                    write!(f, " [{}: objects {:?}]", i, objects)?;
                }
                Ok(())
            }
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected length {expected}, found {found}"),
            Error::IndexOutOfRange { what, index, len } => {
                write!(f, "{what} index {index} out of range (len {len})")
            }
            Error::TooLarge { n, max_n } => {
                write!(f, "refusing to materialize {n}x{n} dense matrix (max {max_n})")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NotConverged {
                iterations,
                estimate,
                residual,
            } => write!(
                f,
                "no convergence after {iterations} iterations (estimate {estimate}, residual {residual:e})"
            ),
            Error::Verification(msg) => write!(f, "verification failed: {msg}"),
            Error::EmptyProbeSet { skipped } => {
                write!(f, "no evaluable probe edges ({skipped} skipped)")
            }
        }
    }
}

impl core::error::Error for Error {}
