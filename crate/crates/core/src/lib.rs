//! 2SAT satisfiability decided by a single linear optimization.
//!
//! The library builds, for a formula with `n` boolean variables, an explicit
//! multicommodity-flow LP on a complete bidirected literal graph: `2n`
//! commodities, one per literal, each trying to route one unit of flow from
//! the literal to its negation. Clauses of the formula select which
//! literal-to-literal arcs are usable; a penalty objective confines optima to
//! that face. The formula is unsatisfiable exactly when some variable and its
//! negation both route their unit, and both satisfiability and
//! unsatisfiability certificates can be decoded from the optimal flows.
//!
//! Modules:
//! - [`formula`]: clauses, literal arithmetic, DIMACS I/O, indicator vectors;
//! - [`implication`]: implication graph, SCCs, the linear-time path oracle;
//! - [`lp_model`]: the flow LP (variables, conservation rows, objectives);
//! - [`mps`]: deterministic MPS export and re-import;
//! - [`simplex`]: bounded-variable primal simplex, float or exact rational;
//! - [`certificate`]: decoding optimal flows into checkable certificates;
//! - [`oracle`]: brute-force and hull-enumeration ground truth at desk scale.

pub mod certificate;
pub mod formula;
pub mod implication;
pub mod lp_model;
pub mod mps;
pub mod oracle;
pub mod simplex;

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed DIMACS or MPS input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// An optimal solution could not be decoded (non-integral flow values).
    #[error("decode error: {0}")]
    Decode(String),
    /// A state the underlying theory rules out; indicates a solver bug.
    #[error("internal consistency error: {0}")]
    Internal(String),
    /// Instance size exceeds a hard cap of the requested oracle.
    #[error("instance too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
