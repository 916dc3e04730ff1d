use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },

    #[error("{0}")]
    Domain(fpf_core::Error),

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn validation(path: impl Into<String>, message: impl ToString) -> Self {
        CliError::Validation { path: path.into(), message: message.to_string() }
    }

    /// Classifies a core error raised while executing a query.
    pub fn from_core(path: &str, err: fpf_core::Error) -> Self {
        if err.is_domain() {
            CliError::Domain(err)
        } else if let fpf_core::Error::NumericalCheck(msg) = err {
            CliError::Numerical(msg)
        } else {
            CliError::validation(path, err)
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "SYNTAX_ERROR",
            CliError::Schema { .. } => "SCHEMA_ERROR",
            CliError::Validation { .. } => "VALIDATION_ERROR",
            CliError::Domain(e) => e.code(),
            CliError::Numerical(_) => "NUMERICAL_CHECK_FAILED",
            CliError::Io(_) => "IO_ERROR",
        }
    }

    /// 2 validation failure, 3 domain error, 4 internal numerical check.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 3,
            CliError::Numerical(_) => 4,
            _ => 2,
        }
    }

    /// One line for the diagnostic stream: `CODE: message`.
    pub fn diagnostic_line(&self) -> String {
        format!("{}: {}", self.code(), self.to_string().replace('\n', " "))
    }
}
