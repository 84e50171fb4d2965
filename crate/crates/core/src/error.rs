use thiserror::Error;

/// Every failure the library can report.
///
/// Resident and hospital ids in messages are 1-based, matching the text formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("{neighbor} is not on the preference list of {vertex}")]
    NotAcceptable { vertex: String, neighbor: String },

    #[error("asymmetric edge: {0}")]
    AsymmetricEdge(String),

    #[error("hospital h{hospital}: lower quota {lower} exceeds upper quota {upper}")]
    Quota { hospital: usize, lower: u32, upper: u32 },

    #[error("duplicate entry {entry} in the preference list of {vertex}")]
    DuplicatePreference { vertex: String, entry: usize },

    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: usize },

    #[error("(r{resident}, h{hospital}) is not an edge of the instance")]
    NotAnEdge { resident: usize, hospital: usize },

    #[error("resident r{0} is matched more than once")]
    DuplicateResident(usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("lower-quota budget {budget} exceeds the {available} positions of the chosen hospitals")]
    InfeasibleQuotaBudget { budget: u64, available: u64 },

    #[error("no feasible-but-unstable instance after {0} attempts")]
    RetriesExhausted(usize),

    #[error("instance admits no feasible matching")]
    InfeasibleInstance,

    #[error("hospital h{0} is not under-subscribed")]
    NotUndersubscribed(usize),

    #[error("instance too large for exhaustive search: {residents} residents (cap {cap})")]
    TooLarge { residents: usize, cap: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
