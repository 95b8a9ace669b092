//! Versioned CSV and JSON-lines record files.
//!
//! CSV files open with a `# yb-readout <kind> v<version>` comment line
//! followed by a mandatory header row. JSON-lines files open with a header
//! object `{"format":"yb-readout","kind":...,"version":...}` and then hold
//! one record per line.

use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "yb-readout";

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("bad file header: {0}")]
    Header(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::Jsonl),
            other => Err(format!("unknown format {other:?} (expected csv or jsonl)")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonHeader {
    format: String,
    kind: String,
    version: u32,
}

/// Marker for types that can be stored with [`write_records`].
pub trait Record: Serialize + DeserializeOwned {
    const KIND: &'static str;
}

impl Record for super::TransitRecord {
    const KIND: &'static str = "transit";
}

impl Record for super::CountRecord {
    const KIND: &'static str = "window";
}

pub fn write_records<W: Write, T: Record>(mut out: W, format: Format, records: &[T]) -> Result<(), IoError> {
    write_rows(&mut out, format, T::KIND, records)
}

/// Writes any serializable rows under a `kind` header.
pub fn write_rows<W: Write, T: Serialize>(out: &mut W, format: Format, kind: &str, rows: &[T]) -> Result<(), IoError> {
    match format {
        Format::Csv => {
            writeln!(out, "# {MAGIC} {kind} v{FORMAT_VERSION}")?;
            let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(&mut *out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let header = JsonHeader {
                format: MAGIC.into(),
                kind: kind.into(),
                version: FORMAT_VERSION,
            };
            serde_json::to_writer(&mut *out, &header)?;
            writeln!(out)?;
            for r in rows {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_records<R: BufRead, T: Record>(input: R, format: Format) -> Result<Vec<T>, IoError> {
    read_rows(input, format, T::KIND)
}

pub fn read_rows<R: BufRead, T: DeserializeOwned>(mut input: R, format: Format, kind: &str) -> Result<Vec<T>, IoError> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let first = first.trim_end();
    match format {
        Format::Csv => {
            let expect = format!("# {MAGIC} {kind} v{FORMAT_VERSION}");
            if first != expect {
                return Err(IoError::Header(format!("expected {expect:?}, found {first:?}")));
            }
            let mut r = csv::ReaderBuilder::new()
                .has_headers(true)
                .comment(Some(b'#'))
                .from_reader(input);
            Ok(r.deserialize().collect::<Result<Vec<T>, _>>()?)
        }
        Format::Jsonl => {
            let h: JsonHeader = serde_json::from_str(first)
                .map_err(|e| IoError::Header(format!("unreadable header line: {e}")))?;
            if h.format != MAGIC || h.kind != kind || h.version != FORMAT_VERSION {
                return Err(IoError::Header(format!(
                    "expected {MAGIC} {kind} v{FORMAT_VERSION}, found {} {} v{}",
                    h.format, h.kind, h.version
                )));
            }
            let mut out = Vec::new();
            for line in input.lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                out.push(serde_json::from_str(&line)?);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{CountRecord, TransitRecord};
    use super::*;
    use crate::atomic::Spin;

    fn transit() -> TransitRecord {
        TransitRecord {
            initial_spin: Spin::Up,
            final_spin: Spin::Down,
            counts_sigma_plus: 4,
            counts_sigma_minus: 1,
            emitted_sigma_plus: 19,
            emitted_sigma_minus: 6,
            spin_flips: 1,
            transit_duration: 4.048_582_995_951_417e-4,
            peak_coupling: 8.093e6,
            impact_x: -1.234_567_890_123e-5,
            impact_z: 3.3e-6,
        }
    }

    #[test]
    fn csv_and_jsonl_roundtrip() {
        let recs = vec![transit(), TransitRecord { impact_x: 0.1, ..transit() }];
        for f in [Format::Csv, Format::Jsonl] {
            let mut buf = Vec::new();
            write_records(&mut buf, f, &recs).unwrap();
            let back: Vec<TransitRecord> = read_records(buf.as_slice(), f).unwrap();
            assert_eq!(back, recs);
        }
    }

    #[test]
    fn csv_header_is_versioned() {
        let mut buf = Vec::new();
        let rec = CountRecord {
            initial_spin: Spin::Down,
            window: 2e-3,
            atom_count: 1,
            counts_sigma_plus: 3,
            counts_sigma_minus: 7,
            dark_sigma_plus: 2,
            dark_sigma_minus: 1,
        };
        write_records(&mut buf, Format::Csv, &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# yb-readout window v1"));
        assert!(lines.next().unwrap().starts_with("initial_spin,window,atom_count"));
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let mut buf = Vec::new();
        write_records(&mut buf, Format::Jsonl, &[transit()]).unwrap();
        assert!(matches!(
            read_records::<_, CountRecord>(buf.as_slice(), Format::Jsonl),
            Err(IoError::Header(_))
        ));
    }
}
