use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use isocone_core::poset::{hasse, Poset};
use isocone_core::{Error, ToleranceConfig};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const EXIT_PARSE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_NO_INPUT: u8 = 66;
pub const EXIT_SOFTWARE: u8 = 70;
pub const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub enum CliError {
    Read(PathBuf, std::io::Error),
    Write(PathBuf, std::io::Error),
    Core(Option<PathBuf>, Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Read(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            CliError::Write(p, e) => write!(f, "cannot write {}: {e}", p.display()),
            CliError::Core(Some(p), e) => write!(f, "{}: {e}", p.display()),
            CliError::Core(None, e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read(..) => EXIT_NO_INPUT,
            CliError::Write(..) => EXIT_IO,
            CliError::Usage(_) => EXIT_PARSE,
            CliError::Core(_, e) => match e {
                Error::Parse(_) => EXIT_PARSE,
                Error::Derogatory(_) | Error::Resource(_) | Error::Input(_) | Error::Dimension { .. } => EXIT_DATA,
                _ => EXIT_SOFTWARE,
            },
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(None, e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Input file contents together with their SHA-256.
pub struct Input {
    pub path: PathBuf,
    pub text: String,
    pub sha256: String,
}

pub fn read_input(path: &Path) -> CliResult<Input> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Read(path.to_owned(), e))?;
    let sha256 = Sha256::digest(text.as_bytes()).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    });
    Ok(Input { path: path.to_owned(), text, sha256 })
}

impl Input {
    /// Attaches the file path to a library error.
    pub fn ctx<T>(&self, r: isocone_core::Result<T>) -> CliResult<T> {
        r.map_err(|e| CliError::Core(Some(self.path.clone()), e))
    }
}

pub fn write_output(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Write(path.to_owned(), e))
}

#[derive(Serialize)]
pub struct Report<R: Serialize> {
    pub command: &'static str,
    pub seed: u64,
    pub tolerance: ToleranceConfig<f64>,
    pub spec_sha256: String,
    pub warnings: Vec<String>,
    pub result: R,
}

impl<R: Serialize> Report<R> {
    pub fn header(&self) -> String {
        format!("# seed={} tol={:e} spec-sha256={}", self.seed, self.tolerance.abs, self.spec_sha256)
    }

    pub fn emit(&self, path: Option<&Path>) -> CliResult<()> {
        if let Some(p) = path {
            let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
            s.push('\n');
            write_output(p, &s)?;
        }
        Ok(())
    }
}

/// Hasse diagram of an inner ordering; node `k` is the `k`-th smallest eigenvalue.
pub fn inner_order_dot(order: &Poset, values: &[f64]) -> String {
    let mut s = String::from("digraph inner_order {\n  rankdir=BT;\n  node [shape=box];\n");
    for (k, v) in values.iter().enumerate() {
        let _ = writeln!(s, "  n{} [label=\"{}: {:.6}\"];", k + 1, k + 1, v);
    }
    for (x, y) in hasse(order) {
        let _ = writeln!(s, "  n{} -> n{};", x + 1, y + 1);
    }
    s.push_str("}\n");
    s
}
