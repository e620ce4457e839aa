use thiserror::Error;

/// Failures surfaced by library operations. Messages are complete sentences
/// fit for direct CLI display; anything structural a caller might branch on
/// gets its own variant.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid token name `{name}`")]
    InvalidTokenName { name: String },

    #[error("duplicate token `{name}`")]
    DuplicateToken { name: String },

    #[error("unknown token `{name}`")]
    UnknownToken { name: String },

    #[error("singleton conflicts forbidden: {set}")]
    SingletonConflict { set: String },

    #[error("inconsistent premise set {set}")]
    InconsistentPremise { set: String },

    #[error("premise is not an information state: closure of {set} adds {missing}")]
    NotAState { set: String, missing: String },

    #[error("skeptical relation requires trivial entailment")]
    NontrivialEntailment,

    #[error("relation instance {premise} |~ {conclusion} has an inconsistent conclusion")]
    InconsistentConclusion { premise: String, conclusion: String },

    #[error("base instances inconsistent with Con: {witness}")]
    BaseInconsistent { witness: String },

    #[error("not an abstract nonmonotonic system: axiom {axiom} fails ({witness})")]
    AxiomViolation { axiom: String, witness: String },

    #[error("requires cumulative system: cautious monotony fails ({witness})")]
    NotCumulative { witness: String },

    #[error("representation was built in {actual} mode, operation needs {expected} mode")]
    WrongMode { expected: String, actual: String },

    #[error("label name `{name}` collides with an existing token")]
    LabelCollision { name: String },

    #[error("exhaustive oracle infeasible for {tokens} tokens (cap {cap})")]
    OracleInfeasible { tokens: usize, cap: usize },

    #[error("universe has {tokens} tokens, exceeding the cap of {cap}")]
    TooLarge { tokens: usize, cap: usize },

    #[error("internal invariant breach: {0}")]
    Internal(String),
}
