use fiblang_core::Id;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}{message}", at(.line))]
    Reference {
        message: String,
        line: Option<usize>,
    },
    #[error("{}{context}: {source}", at(.line))]
    Invalid {
        context: String,
        line: Option<usize>,
        source: fiblang_core::Error,
    },
    #[error("event {index} (`{id}`, {kind}): {source}")]
    Event {
        index: usize,
        id: Id,
        kind: &'static str,
        source: fiblang_core::Error,
    },
}

fn at(line: &Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

impl ScenarioError {
    /// 1 for a well-formed scenario whose events or assertions fail, 2 for
    /// anything structural.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Event { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, ScenarioError>;
