use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use looptrace::Error;

/// Process exit codes.
pub const EXIT_FLAGGED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::UnknownMethod(_) => EXIT_USAGE,
            _ => EXIT_INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, Failure>;

pub fn open_input(path: &Path) -> CliResult<Box<dyn Read>> {
    if path == Path::new("-") {
        return Ok(Box::new(std::io::stdin().lock()));
    }
    File::open(path)
        .map(|f| Box::new(std::io::BufReader::new(f)) as Box<dyn Read>)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

/// Writes `name` under `dir` through a temporary file renamed into place, so
/// readers never see a partial file.
pub fn write_atomic(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut dyn Write) -> looptrace::Result<()>,
) -> CliResult<PathBuf> {
    let fail = |e: &dyn std::fmt::Display| Failure::input(format!("cannot write {}: {e}", dir.join(name).display()));
    std::fs::create_dir_all(dir).map_err(|e| fail(&e))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w).map_err(|e| fail(&e))?;
        w.flush().map_err(|e| fail(&e))?;
    }
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| fail(&e.error))?;
    Ok(path)
}

pub fn write_json<T: serde::Serialize + ?Sized>(dir: &Path, name: &str, value: &T) -> CliResult<PathBuf> {
    write_atomic(dir, name, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")?;
        Ok(())
    })
}
