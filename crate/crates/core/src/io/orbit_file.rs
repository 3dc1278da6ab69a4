//! Orbit export: one bounce per row after a summary comment line.
//!
//! ```text
//! # period=8 perimeter=6.1229349178414458e0 closure_residual=0e0
//! s,phi,x,y,chord
//! ```

use super::{fmt_f64, parse_f64, parse_usize};
use crate::curve::BilliardTable;
use crate::dynamics::Orbit;
use crate::error::{Error, Result};

const HEADER: [&str; 5] = ["s", "phi", "x", "y", "chord"];

/// One exported bounce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitRow {
    pub s: f64,
    pub phi: f64,
    pub x: f64,
    pub y: f64,
    pub chord: f64,
}

/// Parsed orbit file.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPoints {
    pub period: usize,
    pub perimeter: f64,
    pub closure_residual: f64,
    pub rows: Vec<OrbitRow>,
}

pub fn write_orbit(table: &BilliardTable, orbit: &Orbit) -> String {
    let mut out = format!(
        "# period={} perimeter={} closure_residual={}\n{}\n",
        orbit.period,
        fmt_f64(orbit.perimeter),
        fmt_f64(orbit.closure_residual),
        HEADER.join(",")
    );
    for (st, chord) in orbit.states.iter().zip(&orbit.chords) {
        let p = table.point(st.s);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(st.s),
            fmt_f64(st.phi),
            fmt_f64(p.x),
            fmt_f64(p.y),
            fmt_f64(*chord)
        ));
    }
    out
}

pub fn parse_orbit(text: &str) -> Result<OrbitPoints> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let summary = first
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse { line: 1, message: "missing orbit summary line".into() })?;
    let (mut period, mut perimeter, mut closure) = (None, None, None);
    for field in summary.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: 1, message: format!("malformed summary field {field:?}") })?;
        match k {
            "period" => period = Some(parse_usize(v, 1, k)?),
            "perimeter" => perimeter = Some(parse_f64(v, 1, k)?),
            "closure_residual" => closure = Some(parse_f64(v, 1, k)?),
            _ => return Err(Error::Parse { line: 1, message: format!("unknown summary key {k:?}") }),
        }
    }
    let missing = |k: &str| Error::Parse { line: 1, message: format!("summary lacks {k}") };
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse { line: 2, message: e.to_string() })?;
    if headers.iter().ne(HEADER) {
        return Err(Error::Parse { line: 2, message: format!("unexpected orbit header {:?}", headers.as_slice()) });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 3;
        let rec = rec.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        if rec.len() != HEADER.len() {
            return Err(Error::Parse { line, message: format!("expected {} fields", HEADER.len()) });
        }
        let f = |k: usize| parse_f64(&rec[k], line, HEADER[k]);
        rows.push(OrbitRow { s: f(0)?, phi: f(1)?, x: f(2)?, y: f(3)?, chord: f(4)? });
    }
    Ok(OrbitPoints {
        period: period.ok_or_else(|| missing("period"))?,
        perimeter: perimeter.ok_or_else(|| missing("perimeter"))?,
        closure_residual: closure.ok_or_else(|| missing("closure_residual"))?,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{close_table, BuildingBlock};
    use crate::dynamics::closed_orbit_from_match;
    use std::f64::consts::PI;

    #[test]
    fn octagon_round_trip() {
        let c = close_table(&vec![BuildingBlock::arc(1.0, PI / 2.0).unwrap(); 4]).unwrap();
        let o = closed_orbit_from_match(&c, PI / 8.0).unwrap();
        let text = write_orbit(&c, &o);
        let back = parse_orbit(&text).unwrap();
        assert_eq!(back.period, 8);
        assert_eq!(back.rows.len(), 8);
        assert!((back.perimeter - 16.0 * (PI / 8.0).sin()).abs() < 1e-12);
        // the unit circle starts at the origin with its centre at (0, 1)
        for r in &back.rows {
            assert!((r.x.hypot(r.y - 1.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn missing_summary() {
        assert!(matches!(parse_orbit("s,phi,x,y,chord\n"), Err(Error::Parse { line: 1, .. })));
    }
}
