use thiserror::Error;

use crate::Elem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("algebra `{algebra}`: table of `{symbol}` has entry {value} at position {position}, outside 0..{size}")]
    EntryOutOfRange {
        algebra: String,
        symbol: String,
        position: usize,
        value: usize,
        size: usize,
    },

    #[error("algebra `{algebra}`: table of `{symbol}` has length {found}, expected {expected}")]
    TableLength {
        algebra: String,
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),

    #[error("designated constant `{0}` does not have arity 0")]
    DesignatedNotConstant(String),

    #[error("invalid symbol name `{0}`")]
    InvalidSymbolName(String),

    #[error("algebra size must be positive")]
    EmptyUniverse,

    #[error("element {element} is outside the universe 0..{size}")]
    ElementOutOfRange { element: Elem, size: usize },

    #[error("element {element} produced inside `{algebra}` leaves the proposed subuniverse")]
    NotClosed { algebra: String, element: Elem },

    #[error("signatures of `{0}` and `{1}` differ")]
    SignatureMismatch(String, String),

    #[error("map has {found} entries, expected {expected}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("map into `{cod}` is not a homomorphism: `{symbol}` fails at {args:?}")]
    NotHomomorphism {
        cod: String,
        symbol: String,
        args: Vec<Elem>,
    },

    #[error("signature of `{0}` is not pointed (needs exactly one constant, designated)")]
    NotPointed(String),

    #[error("codomains differ: `{0}` vs `{1}`")]
    CodomainMismatch(String, String),

    #[error("{what}: size cap {cap} exceeded (bound {bound})")]
    CapExceeded {
        what: String,
        cap: usize,
        bound: String,
    },

    #[error("unbound variable x{}", .0 + 1)]
    UnboundVariable(usize),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("symbol `{symbol}` applied to {found} arguments, arity is {arity}")]
    ArityMismatch {
        symbol: String,
        arity: usize,
        found: usize,
    },

    #[error("elements {0} and {1} are not related by the congruence")]
    NotRelated(Elem, Elem),

    #[error("congruence carries no derivation trace")]
    MissingTrace,

    #[error("split law fails: p(s({0})) != {0}")]
    SplitLaw(Elem),

    #[error("malformed witness: {0}")]
    MalformedWitness(String),

    #[error("malformed groupoid: {0}")]
    MalformedGroupoid(String),

    #[error("unknown reference `{0}`")]
    DanglingReference(String),

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
