use std::fmt;

use serde_json::{json, Value};

#[derive(Debug)]
pub enum CliError {
    Io { file: String, message: String },
    Parse { file: String, line: usize, column: usize, message: String },
    Schema { file: String, path: String, message: String },
    Usage(String),
    Cap { what: &'static str, value: u128, cap: u128 },
    Core(sheaf_core::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn schema(file: &str, path: &str, message: impl Into<String>) -> CliError {
        CliError::Schema { file: file.to_string(), path: path.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Cap { .. } | CliError::Core(sheaf_core::Error::TooManyOpens { .. }) => 3,
            _ => 2,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "IoError",
            CliError::Parse { .. } => "ParseError",
            CliError::Schema { .. } => "SchemaError",
            CliError::Usage(_) => "UsageError",
            CliError::Cap { .. } => "CapExceeded",
            CliError::Core(e) => core_code(e),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut err = json!({ "code": self.code(), "message": self.to_string() });
        match self {
            CliError::Io { file, .. } => err["file"] = json!(file),
            CliError::Parse { file, line, column, .. } => {
                err["file"] = json!(file);
                err["line"] = json!(line);
                err["column"] = json!(column);
            }
            CliError::Schema { file, path, .. } => {
                err["file"] = json!(file);
                err["path"] = json!(path);
            }
            CliError::Cap { what, value, cap } => {
                err["cap"] = json!(what);
                err["value"] = json!(value.to_string());
                err["limit"] = json!(cap.to_string());
            }
            CliError::Usage(_) | CliError::Core(_) => {}
        }
        json!({ "format_version": 1, "kind": "error", "error": err })
    }
}

fn core_code(e: &sheaf_core::Error) -> &'static str {
    use sheaf_core::Error::*;
    match e {
        DimensionMismatch(_) => "DimensionMismatch",
        IllFormedHom(_) => "IllFormedHom",
        AmbientMismatch => "AmbientMismatch",
        NotAComplex(_) => "NotAComplex",
        ChainMismatch(_) => "ChainMismatch",
        NotAntisymmetric { .. } => "NotAntisymmetric",
        UnknownPoint(_) => "UnknownPoint",
        UnknownName(_) => "UnknownName",
        DuplicatePoint(_) => "DuplicatePoint",
        TooManyOpens { .. } => "TooManyOpens",
        NotComparable(..) => "NotComparable",
        FunctorialityViolation { .. } => "FunctorialityViolation",
        MissingRestriction(..) => "MissingRestriction",
        NotOpen(_) => "NotOpen",
        NotACover(_) => "NotACover",
        NaturalityViolation(_) => "NaturalityViolation",
        NotExactInput(_) => "NotExactInput",
        SignViolation(_) => "SignViolation",
        NotStabilized { .. } => "NotStabilized",
        NotAResolution(_) => "NotAResolution",
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { file, message } => write!(f, "{file}: {message}"),
            CliError::Parse { file, line, column, message } => write!(f, "{file}:{line}:{column}: {message}"),
            CliError::Schema { file, path, message } => write!(f, "{file}: at {path}: {message}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Cap { what, value, cap } => write!(f, "{what} {value} exceeds the cap {cap}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<sheaf_core::Error> for CliError {
    fn from(e: sheaf_core::Error) -> Self {
        CliError::Core(e)
    }
}
