use std::fmt;
use std::process::ExitCode;

use git_height::bounds::BoundsError;
use git_height::conj_git::ConjError;
use git_height::exactpoly::PolyError;
use git_height::heights::HeightError;
use git_height::places::PlacesError;
use git_height::torus_git::TorusError;

#[derive(Debug)]
pub enum CliError {
    /// Unstable point, nilpotent matrix and similar: exit 1.
    Domain(String),
    /// Malformed input: exit 2.
    Parse(String),
    /// A numerical solver gave up: exit 3.
    Convergence(String),
    /// The regression suite found failures: exit 1.
    SuiteFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Domain(_) | CliError::SuiteFailed(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Convergence(_) => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(m) => write!(f, "error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Convergence(m) => write!(f, "convergence failure: {m}"),
            CliError::SuiteFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<PlacesError> for CliError {
    fn from(e: PlacesError) -> Self {
        match e {
            PlacesError::Parse(_) | PlacesError::NotPrime(_) => CliError::Parse(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<HeightError> for CliError {
    fn from(e: HeightError) -> Self {
        match e {
            HeightError::Places(p) => p.into(),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::NoConvergence { .. } => CliError::Convergence(e.to_string()),
            PolyError::NonSquare { .. } => CliError::Parse(e.to_string()),
            PolyError::Places(p) => p.into(),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<TorusError> for CliError {
    fn from(e: TorusError) -> Self {
        match e {
            TorusError::Unstable => CliError::Domain(e.to_string()),
            TorusError::NoConvergence { .. } => CliError::Convergence(e.to_string()),
            TorusError::Height(h) => h.into(),
            TorusError::Places(p) => p.into(),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<ConjError> for CliError {
    fn from(e: ConjError) -> Self {
        match e {
            ConjError::Nilpotent | ConjError::ZeroMatrix => CliError::Domain(e.to_string()),
            ConjError::Poly(p) => p.into(),
            ConjError::Height(h) => h.into(),
            ConjError::Places(p) => p.into(),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        CliError::Parse(e.to_string())
    }
}
