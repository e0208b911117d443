use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::ExportError;
use crate::pipeline::{ReceiverRecord, ResultSet};

/// One receiver object per line, in receiver-index order. Floats are
/// written in shortest round-trip form so the records reload exactly.
pub fn write_jsonl(rs: &ResultSet, path: &Path) -> Result<(), ExportError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for rec in &rs.records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<ReceiverRecord>, ExportError> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
