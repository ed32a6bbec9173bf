use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("no domain for {0}")]
    NoDomain(String),
    #[error("invalid theory: {0}")]
    InvalidTheory(String),
    #[error("incomplete initial state {0}")]
    IncompleteState(String),
    #[error("inconsistent initial state {0}")]
    InconsistentState(String),
    #[error("action {action} is not executable in {state}")]
    NotExecutable { action: String, state: String },
    #[error("condition of {outcome} does not hold in {state}")]
    ConditionFails { outcome: String, state: String },
    #[error("{0} is not an initial state")]
    NotInitial(String),
    #[error("policy undefined at {0}")]
    PolicyUndefined(String),
    #[error("belief is not normalized (total mass {0})")]
    UnnormalizedBelief(String),
    #[error("belief update has total mass 0")]
    ZeroMass,
    #[error("horizon must be at least {min}, got {got}")]
    Horizon { min: usize, got: usize },
    #[error("unbounded sort for variable {0}")]
    UnboundedSort(String),
    #[error("negated literal outside the boolean fragment: {0}")]
    NonBooleanNegation(String),
    #[error("fixpoint did not converge within {0} iterations")]
    FixpointCap(usize),
    #[error("rule without schema provenance: {0}")]
    MissingOrigin(String),
    #[error("annotation other than 1 in normal rule: {0}")]
    NonUnitAnnotation(String),
    #[error("program is not tight, positive cycle: {0}")]
    NotTight(String),
    #[error("assignment does not cover variable {0}")]
    IncompleteAssignment(usize),
    #[error("multiple value atoms at horizon {0}")]
    MultipleValues(usize),
    #[error("report is not valid")]
    InvalidReport,
    #[error("holds atoms at time {0} do not form a complete consistent state")]
    BadState(usize),
    #[error("malformed DIMACS: {0}")]
    Dimacs(String),
    #[error("program syntax error at line {line}: {message}")]
    ProgramSyntax { line: usize, message: String },
    #[error("search space too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
