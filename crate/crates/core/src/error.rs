use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared across the crate.
///
/// `Config` covers anything the caller can fix by changing inputs;
/// `Numerical` is reserved for solver breakdowns.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input parameter violates a documented precondition.
    Config(&'static str),
    /// A special function was evaluated outside its domain.
    Domain { function: &'static str, arg: f64 },
    /// A quantity is undefined for the supplied geometry (e.g. Doppler
    /// spread of a single pulse).
    Unsupported(&'static str),
    /// An iterative solver ran out of iterations.
    NoConvergence { solver: &'static str, index: usize, iterations: usize },
    /// A correlation matrix has an eigenvalue below the PSD tolerance.
    NotPositiveSemidefinite { min_eigenvalue: f64, tolerance: f64 },
    /// A density handed to an entropy routine does not integrate to one.
    Unnormalized { total_mass: f64 },
}

impl Error {
    /// True for errors caused by caller input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Domain { .. } | Error::Unsupported(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Domain { function, arg } => {
                write!(f, "{function}: argument {arg} outside domain")
            }
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::NoConvergence { solver, index, iterations } => {
                write!(f, "{solver} did not converge for index {index} after {iterations} iterations")
            }
            Error::NotPositiveSemidefinite { min_eigenvalue, tolerance } => write!(
                f,
                "correlation matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e} < {tolerance:e}"
            ),
            Error::Unnormalized { total_mass } => {
                write!(f, "density integrates to {total_mass}, expected 1")
            }
        }
    }
}

impl core::error::Error for Error {}
