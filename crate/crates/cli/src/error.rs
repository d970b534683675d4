use std::fmt;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_TRUNCATION: i32 = 4;
pub const EXIT_RESOURCE: i32 = 5;

#[derive(Debug)]
pub enum CliError {
    /// A flag value was rejected; `flag` includes the leading dashes.
    Validation {
        flag: String,
        message: String,
    },
    Io {
        path: Option<PathBuf>,
        source: std::io::Error,
    },
    Resource(String),
}

impl CliError {
    pub fn validation(flag: &str, message: impl Into<String>) -> Self {
        CliError::Validation {
            flag: flag.to_string(),
            message: message.into(),
        }
    }

    pub fn missing(flag: &str, context: &str) -> Self {
        Self::validation(flag, format!("required {context}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
            CliError::Resource(_) => EXIT_RESOURCE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation { flag, message } => write!(f, "invalid {flag}: {message}"),
            CliError::Io {
                path: Some(p),
                source,
            } => write!(f, "cannot write {}: {source}", p.display()),
            CliError::Io { path: None, source } => write!(f, "i/o error: {source}"),
            CliError::Resource(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn flag_for(field: &str) -> String {
    match field {
        "horizon" => "--n".to_string(),
        "moments" | "m" => "--moments".to_string(),
        other => format!("--{}", other.replace('_', "-")),
    }
}

impl From<symbounds::Error> for CliError {
    fn from(e: symbounds::Error) -> Self {
        match e {
            symbounds::Error::Invalid { field, reason } => CliError::Validation {
                flag: flag_for(field),
                message: reason,
            },
            symbounds::Error::Domain { operation, reason } => CliError::Validation {
                flag: "arguments".to_string(),
                message: format!("{operation}: {reason}"),
            },
            e @ symbounds::Error::ResourceGuard { .. } => CliError::Resource(e.to_string()),
        }
    }
}
