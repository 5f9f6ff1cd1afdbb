use thiserror::Error;

/// Errors surfaced by the library. Most operations are total on their stated
/// domains; these cover precondition violations and parsing.
#[derive(Debug, Error)]
pub enum QbracketError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("singular system: {0}")]
    Singular(String),
}
