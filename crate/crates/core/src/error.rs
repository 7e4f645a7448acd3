use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("symbol `{symbol}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("invalid algebra: {0}")]
    Algebra(String),

    #[error("table `{symbol}` has {found} entries, expected {expected}")]
    TableLength {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("table `{symbol}` entry {value} is out of range for carrier size {size}")]
    EntryOutOfRange {
        symbol: String,
        value: usize,
        size: usize,
    },

    #[error("missing table for symbol `{0}`")]
    MissingTable(String),

    #[error("element {element} is outside the carrier of size {size}")]
    ElementOutOfRange { element: usize, size: usize },

    #[error("invalid witness: {0}")]
    Witness(String),

    #[error("unbound variable {0}")]
    UnboundVariable(String),

    #[error("evaluation budget of {limit} exceeded")]
    BudgetExceeded { limit: u64 },

    #[error("the subset must be nonempty")]
    EmptySubset,

    #[error("subset {0} is not an ideal")]
    NotAnIdeal(String),

    #[error("{0} congruences share the kernel {1}; the algebra is not ideal-determined")]
    KernelNotUnique(usize, String),

    #[error("operation symbol `{0}` already exists in the signature")]
    SymbolClash(String),

    #[error("signature `{0}` does not extend the base signature")]
    NotAnExtension(String),

    #[error("unknown variety `{0}`")]
    UnknownVariety(String),

    #[error("the semi-abelian refinement requires a semi-abelian variety")]
    NotSemiAbelian,
}

impl Error {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            pos,
            msg: msg.into(),
        }
    }
}
