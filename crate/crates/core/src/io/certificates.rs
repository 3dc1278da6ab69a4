//! Match certificates as a delimited table, one row per (round, block).

use super::{fmt_f64, parse_f64, parse_usize};
use crate::construction::MatchCertificate;
use crate::error::{Error, Result};

const HEADER: [&str; 12] =
    ["round", "block", "theta", "delta_star", "p", "residual", "support_lo", "support_hi", "a1", "a2", "a3", "a4"];

pub fn write_certificates(certs: &[MatchCertificate]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).map_err(csv_error)?;
    for c in certs {
        let mut row = vec![
            c.round.to_string(),
            c.block.to_string(),
            fmt_f64(c.theta),
            fmt_f64(c.delta_star),
            c.p.to_string(),
            fmt_f64(c.residual),
            fmt_f64(c.support.0),
            fmt_f64(c.support.1),
        ];
        row.extend(c.amplitudes.iter().map(|&a| fmt_f64(a)));
        w.write_record(&row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_certificates(text: &str) -> Result<Vec<MatchCertificate>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = r.headers().map_err(csv_error)?.clone();
    if headers.iter().ne(HEADER) {
        return Err(Error::Parse { line: 1, message: format!("unexpected certificate header {:?}", headers.as_slice()) });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(csv_error)?;
        if rec.len() != HEADER.len() {
            return Err(Error::Parse { line, message: format!("expected {} fields, found {}", HEADER.len(), rec.len()) });
        }
        let f = |k: usize| parse_f64(&rec[k], line, HEADER[k]);
        out.push(MatchCertificate {
            round: parse_usize(&rec[0], line, "round")?,
            block: parse_usize(&rec[1], line, "block")?,
            theta: f(2)?,
            delta_star: f(3)?,
            p: parse_usize(&rec[4], line, "p")?,
            residual: f(5)?,
            support: (f(6)?, f(7)?),
            amplitudes: [f(8)?, f(9)?, f(10)?, f(11)?],
        });
    }
    Ok(out)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse { line, message: e.to_string() }
}
