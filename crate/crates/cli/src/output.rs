//! Deterministic numeric formatting and CSV sinks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use nonmarkov::dynamics::DecayRate;

use crate::config::{CliError, CliResult};

/// Scientific notation with the given number of significant digits; no
/// locale dependence, `-0` normalized away.
pub fn sig(x: f64, digits: usize) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.*e}", digits.saturating_sub(1), x)
}

/// Fixed-point with the given number of decimals, for summary lines.
pub fn fixed(x: f64, decimals: usize) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.decimals$}")
}

/// Decay rate cell: poles are emitted as the literal token `inf`.
pub fn rate_cell(rate: DecayRate<f64>, digits: usize) -> String {
    match rate {
        DecayRate::Finite(g) => sig(g, digits),
        DecayRate::Pole => "inf".to_string(),
    }
}

/// Where CSV rows go: a file when `--out` is given, stdout otherwise.
pub enum CsvSink {
    File(BufWriter<File>),
    Stdout(io::Stdout),
}

impl CsvSink {
    pub fn open(out: Option<&Path>) -> CliResult<Self> {
        match out {
            Some(path) => {
                let file = File::create(path).map_err(|e| {
                    CliError::Runtime(format!(
                        "cannot write output path {}: {e}",
                        path.display()
                    ))
                })?;
                Ok(CsvSink::File(BufWriter::new(file)))
            }
            None => Ok(CsvSink::Stdout(io::stdout())),
        }
    }

    pub fn row(&mut self, cells: &[String]) -> CliResult<()> {
        let line = cells.join(",");
        self.write_line(&line)
    }

    pub fn header(&mut self, header: &str) -> CliResult<()> {
        self.write_line(header)
    }

    fn write_line(&mut self, line: &str) -> CliResult<()> {
        let result = match self {
            CsvSink::File(w) => writeln!(w, "{line}"),
            CsvSink::Stdout(w) => writeln!(w, "{line}"),
        };
        result.map_err(|e| CliError::Runtime(format!("write failed: {e}")))
    }

    pub fn finish(self) -> CliResult<()> {
        if let CsvSink::File(mut w) = self {
            w.flush()
                .map_err(|e| CliError::Runtime(format!("flush failed: {e}")))?;
        }
        Ok(())
    }

    /// Summaries go to stdout when the CSV went to a file, to stderr when
    /// the CSV occupies stdout.
    pub fn summary_to_stderr(&self) -> bool {
        matches!(self, CsvSink::Stdout(_))
    }
}
