use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pcc_core::Error),
    #[error("{}", first_line(.0))]
    Usage(clap::Error),
    #[error("invalid grid {0:?}: {1}")]
    BadGrid(String, String),
    #[error("empty grid")]
    EmptyGrid,
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("{0}")]
    Conflict(String),
    #[error("row has {got} values, table has {expected} columns")]
    RowLength { expected: usize, got: usize },
    #[error("non-finite value in column {0}")]
    NonFinite(String),
    #[error("cannot write {}: {source}", .path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write to stdout: {0}")]
    Stdout(std::io::Error),
}

fn first_line(e: &clap::Error) -> String {
    let text = e.to_string();
    let line = text.lines().next().unwrap_or_default();
    line.strip_prefix("error: ").unwrap_or(line).to_string()
}

pub type Result<T> = std::result::Result<T, CliError>;
