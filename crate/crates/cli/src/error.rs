use std::fmt;
use std::path::Path;

use transpiece::corpus::CorpusError;
use transpiece::decoding::{DecodeError, LexiconError, ModelError};
use transpiece::evaluation::EvalError;
use transpiece::pieces::TableError;
use transpiece::retrieval::IndexError;

/// Input problems exit with 2, everything else with 1.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Runtime(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn write(path: &Path, e: std::io::Error) -> Self {
        CliError::Runtime(format!("cannot write {}: {e}", path.display()))
    }

    pub fn read(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> Self {
        CliError::Input(format!("index: {e}"))
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(format!("model: {e}"))
    }
}

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> Self {
        CliError::Input(format!("lexicon: {e}"))
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> Self {
        CliError::Input(format!("piece table: {e}"))
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<DecodeError> for CliError {
    fn from(e: DecodeError) -> Self {
        match e {
            DecodeError::InvalidConfig(_) => CliError::Input(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}
