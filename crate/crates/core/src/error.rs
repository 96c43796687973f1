use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("open term: free variable `{0}`")]
    OpenTerm(String),
    #[error("monitor is not reactive: {0}")]
    NotReactive(String),
    #[error("monitor is not regular")]
    NotRegular,
    #[error("monitor is inconsistent: {0}")]
    Inconsistent(String),
    #[error("automaton is not extension-closed")]
    NotExtensionClosed,
    #[error("formula is not in the {0} fragment")]
    WrongFragment(&'static str),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid document: {0}")]
    Document(String),
}
