use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported size: {n_atoms} atoms exceeds the limit of {limit}")]
    UnsupportedSize { n_atoms: usize, limit: usize },

    /// A branch with zero probability was selected or normalized.
    #[error("degenerate branch: {0}")]
    DegenerateBranch(String),

    /// Strict clamping refused a state whose scattering weight exceeds one.
    #[error("parameter regime violated: xi_s * n^2 = {value} > 1 at occupancy {occupancy}")]
    ParameterRegime { occupancy: usize, value: f64 },

    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("at detection event {event}: {source}")]
    AtEvent {
        event: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("trajectory with seed {seed} failed: {source}")]
    Trajectory {
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Stable machine-readable category, looking through event/seed wrappers.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::UnsupportedSize { .. } => "unsupported-size",
            Error::DegenerateBranch(_) => "degenerate-branch",
            Error::ParameterRegime { .. } => "parameter-regime",
            Error::NoConvergence(_) => "no-convergence",
            Error::AtEvent { source, .. } | Error::Trajectory { source, .. } => source.category(),
        }
    }

    pub(crate) fn at_event(self, event: usize) -> Self {
        Error::AtEvent {
            event,
            source: Box::new(self),
        }
    }

    pub(crate) fn in_trajectory(self, seed: u64) -> Self {
        Error::Trajectory {
            seed,
            source: Box::new(self),
        }
    }
}
