//! Table output: CSV with a fixed header, or a JSON array with identical keys.

use std::io::Write;

use qgbound::sweep::{ResultRow, COLUMNS};

use crate::config::Format;

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn emit<W: Write>(rows: &[ResultRow], format: Format, out: W) -> Result<(), EmitError> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, out),
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), EmitError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[ResultRow], mut out: W) -> Result<(), EmitError> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn to_bytes(rows: &[ResultRow], format: Format) -> Result<Vec<u8>, EmitError> {
    let mut buf = Vec::new();
    emit(rows, format, &mut buf)?;
    Ok(buf)
}

pub fn parse_csv(bytes: &[u8]) -> Result<Vec<ResultRow>, EmitError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn parse_json(bytes: &[u8]) -> Result<Vec<ResultRow>, EmitError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn parse(bytes: &[u8], format: Format) -> Result<Vec<ResultRow>, EmitError> {
    match format {
        Format::Csv => parse_csv(bytes),
        Format::Json => parse_json(bytes),
    }
}
