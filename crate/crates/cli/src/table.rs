//! Tab-separated tables with one header line. Floats are written as
//! `{:.12e}`, so identical runs produce identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

pub fn float(x: f64) -> String {
    format!("{x:.12e}")
}

pub struct Table {
    path: PathBuf,
    out: BufWriter<File>,
    columns: usize,
    rows: usize,
}

impl Table {
    pub fn create(path: &Path, header: &[&str]) -> CliResult<Self> {
        let file = File::create(path).map_err(CliError::io(path))?;
        let mut t = Self { path: path.to_owned(), out: BufWriter::new(file), columns: header.len(), rows: 0 };
        t.line(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>())?;
        Ok(t)
    }

    pub fn row(&mut self, cells: &[String]) -> CliResult<()> {
        debug_assert_eq!(cells.len(), self.columns);
        self.rows += 1;
        self.line(cells)
    }

    fn line(&mut self, cells: &[String]) -> CliResult<()> {
        writeln!(self.out, "{}", cells.join("\t")).map_err(CliError::io(&self.path))
    }

    /// Flushes and returns the number of data rows.
    pub fn finish(mut self) -> CliResult<usize> {
        self.out.flush().map_err(CliError::io(&self.path))?;
        Ok(self.rows)
    }
}
