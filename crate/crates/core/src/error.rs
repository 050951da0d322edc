use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: atom `{atom}` is not in the declared vocabulary")]
    UndeclaredAtom {
        atom: String,
        line: usize,
        column: usize,
    },
    #[error("atom `{0}` is not in the vocabulary")]
    UnknownAtom(String),
    #[error("vocabulary has {size} atoms; SE enumeration supports at most {max}")]
    VocabularyTooLarge { size: usize, max: usize },
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("program has {size} rules; subset enumeration supports at most {max}")]
    ProgramTooLarge { size: usize, max: usize },
    #[error("SE set is not well-defined: ({here},{there}) present without ({there},{there})")]
    NotWellDefined { here: String, there: String },
    #[error("SE sets range over different vocabularies")]
    VocabularyMismatch,
    #[error("invalid ensconcement: {0}")]
    InvalidEnsconcement(String),
    #[error("invalid selection policy: {0}")]
    InvalidPolicy(String),
    #[error("rule `{0}` is not in the program")]
    RuleNotInProgram(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
