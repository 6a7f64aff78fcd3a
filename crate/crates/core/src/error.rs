use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("binding set did not converge after {rounds} rounds; still bound: {remaining}")]
    CyclicBindings { rounds: usize, remaining: String },

    #[error("cannot raise multi-term binding for `{symbol}` to negative power {power}")]
    NotInvertible { symbol: String, power: i32 },

    #[error("division by zero scalar")]
    DivisionByZero,

    #[error("unbound symbol `{0}` in numeric evaluation")]
    UnboundSymbol(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("rewrite budget of {budget} steps exhausted at term {term}")]
    RewriteBudget { budget: usize, term: String },

    #[error("order {order} outside supported range {min}..={max}")]
    OrderOutOfRange { order: i32, min: i32, max: i32 },

    #[error("expression is not of the expected form: {0}")]
    UnexpectedForm(String),

    #[error("required assumption `{0}` is disabled")]
    MissingAssumption(&'static str),

    #[error("energy operator is not isolated in term {0}")]
    EnergyNotIsolated(String),

    #[error("partition leaves {count} uncovered terms: {terms}")]
    PartitionLeftover { count: usize, terms: String },

    #[error("cancellation check failed: {left} + {right} != 0")]
    CancellationFailed { left: String, right: String },

    #[error("eigenbasis ill-conditioned (condition number {0:e}); perturb the input")]
    IllConditioned(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance: estimated error {estimate:e} after {evaluations} evaluations")]
    QuadratureBudget { estimate: f64, evaluations: usize },

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("report schema violation: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
