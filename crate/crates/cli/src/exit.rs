use std::fmt;

/// Process exit codes. Usage errors reported by clap also exit with 2.
pub const DECODE: u8 = 1;
pub const CONFIG: u8 = 2;
pub const WRITE: u8 = 3;
pub const RUNTIME: u8 = 4;

/// An error carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // many library errors already embed their source in the message
        let mut text = String::new();
        for cause in self.error.chain().map(|c| c.to_string()) {
            if text.contains(&cause) {
                continue;
            }
            if !text.is_empty() {
                text.push_str(": ");
            }
            text.push_str(&cause);
        }
        f.write_str(&text)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches an exit code to any error.
pub trait Code<T> {
    fn code(self, code: u8) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Code<T> for Result<T, E> {
    fn code(self, code: u8) -> CliResult<T> {
        self.map_err(|e| CliError::new(code, e))
    }
}
