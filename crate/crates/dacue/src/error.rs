use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}line {line}: {message}", location(.file))]
    Parse {
        file: Option<PathBuf>,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Data(#[from] dacue_core::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write {0}")]
    Unwritable(String),
    #[error("{0}")]
    Usage(String),
}

fn location(file: &Option<PathBuf>) -> String {
    file.as_ref()
        .map(|f| format!("{}: ", f.display()))
        .unwrap_or_default()
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: None,
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Exit status: 1 for invalid invocations, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            _ => 2,
        }
    }

    /// Attaches the file name to parse errors.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            Error::Parse { line, message, .. } => Error::Parse {
                file: Some(path.to_path_buf()),
                line,
                message,
            },
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(source: std::io::Error) -> Self {
        Error::io("<stream>", source)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
