//! Exit codes and the one-line diagnostic format.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configuration or parameter values.
    Usage(String),
    /// A numerical routine could not deliver its accuracy contract.
    Numerical(String),
    /// Reading or writing files, including malformed input files.
    Io(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }

    /// `error kind=<kind> code=<n> message="<escaped>"`.
    pub fn diagnostic(&self) -> String {
        let escaped: String = self
            .message()
            .trim()
            .chars()
            .flat_map(|c| match c {
                '"' => vec!['\\', '"'],
                '\\' => vec!['\\', '\\'],
                '\n' | '\r' | '\t' => vec![' '],
                c => vec![c],
            })
            .collect();
        format!("error kind={} code={} message=\"{escaped}\"", self.kind(), self.code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

impl From<risop_core::Error> for CliError {
    fn from(e: risop_core::Error) -> Self {
        use risop_core::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidParams(_) => CliError::Usage(msg),
            E::Io(_) | E::Format(_) => CliError::Io(msg),
            _ => CliError::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
