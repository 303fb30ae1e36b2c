use thiserror::Error;

/// Errors raised while building circuits, evaluating elements or running solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("component references undeclared node `{0}`")]
    DanglingNode(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("component `{component}`: parameter `{parameter}` must be strictly positive (got {value})")]
    NonPositive { component: String, parameter: String, value: f64 },
    #[error("no ground node declared")]
    MissingGround,
    #[error("ground node declared more than once")]
    DuplicateGround,
    #[error("component `{component}` needs {expected} terminals, got {got}")]
    TerminalCount { component: String, expected: usize, got: usize },
    #[error("node `{0}` is not connected to ground")]
    Disconnected(String),
    #[error("resistor `{0}` has no grounded terminal")]
    FloatingResistor(String),
    #[error("unknown CPW geometry `{0}`")]
    UnknownGeometry(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("no sign change on [{a}, {b}]")]
    NoBracket { a: f64, b: f64 },
    #[error("gap integral does not change sign across gap {0}")]
    NoSignChange(usize),
    #[error("maximum iterations ({0}) exceeded")]
    MaxIterations(usize),
    #[error("iteration diverged from seed {seed_re}+{seed_im}j")]
    Diverged { seed_re: f64, seed_im: f64 },
    #[error("quadrature did not converge (estimate {estimate}, error {error})")]
    NotConverged { estimate: f64, error: f64 },
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("capacitance matrix asymmetry {0:e} exceeds tolerance")]
    AsymmetryTooLarge(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("mode has no inductive energy")]
    ZeroInductiveEnergy,
    #[error("evaluation point lies on a pole of `{0}`")]
    Pole(String),
    #[error("singular matrix")]
    Singular,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for problems with the input (syntax, schema, geometry or circuit
    /// validation) as opposed to solver failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DanglingNode(_)
                | Error::DuplicateName(_)
                | Error::NonPositive { .. }
                | Error::MissingGround
                | Error::DuplicateGround
                | Error::TerminalCount { .. }
                | Error::Disconnected(_)
                | Error::FloatingResistor(_)
                | Error::UnknownGeometry(_)
                | Error::Geometry(_)
                | Error::Domain(_)
                | Error::Parse(_)
                | Error::Schema(_)
        )
    }
}
