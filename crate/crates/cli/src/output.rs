use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::CliResult;

/// Arguments as given, minus the output destination, so a file's header can
/// be replayed to regenerate it.
pub fn replay_args(argv: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
            continue;
        }
        if a == "-o" || a == "--output" {
            skip = true;
            continue;
        }
        if a.starts_with("--output=") || (a.starts_with("-o") && a.len() > 2 && !a.starts_with("--")) {
            continue;
        }
        out.push(a.clone());
    }
    out
}

/// CSV artifact with a `#` provenance header.
pub struct CsvOut {
    writer: csv::Writer<Box<dyn Write>>,
}

impl CsvOut {
    /// Opens `path` (or stdout), writes the header comment lines and the
    /// column names.
    pub fn create(
        path: Option<&Path>,
        argv: &[String],
        params: &[(&str, String)],
        columns: &[&str],
    ) -> CliResult<Self> {
        let mut sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        writeln!(sink, "# discos {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(
            sink,
            "# args: {}",
            serde_json::to_string(&replay_args(argv)).expect("strings serialize")
        )?;
        let line: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(sink, "# {}", line.join(" "))?;
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(columns)?;
        Ok(Self { writer })
    }

    pub fn row(&mut self, fields: &[String]) -> CliResult<()> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// 17 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}
