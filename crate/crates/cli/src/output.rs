//! CSV assembly with `#` comment lines.

use crate::CliError;

/// Shortest text that still round-trips: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV document built in memory, so output is written in one piece.
#[derive(Debug, Default)]
pub struct CsvDoc {
    buf: Vec<u8>,
}

impl CsvDoc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, line: impl AsRef<str>) {
        for l in line.as_ref().lines() {
            self.buf.extend_from_slice(b"# ");
            self.buf.extend_from_slice(l.as_bytes());
            self.buf.push(b'\n');
        }
    }

    pub fn record<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut self.buf);
        w.write_record(fields)
            .map_err(|e| CliError::Failed(e.to_string()))?;
        w.flush()?;
        Ok(())
    }

    pub fn into_string(self) -> String {
        String::from_utf8(self.buf).expect("CSV fields are UTF-8")
    }
}
