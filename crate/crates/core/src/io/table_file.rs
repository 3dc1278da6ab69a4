//! Tables as their list of block curvature profiles, in gluing order.
//!
//! ```text
//! billiard-table 1
//! blocks 2
//! block <base> <length> <bump count>
//! bump <center> <halfwidth> <amplitude>
//! ...
//! ```
//!
//! Blank lines and lines starting with `#` are ignored by the parser.

use super::{fmt_f64, parse_f64, parse_usize};
use crate::curve::{close_table, BilliardTable, BuildingBlock, Bump, CurvatureProfile};
use crate::error::{Error, Result};

const MAGIC: &str = "billiard-table";
const VERSION: usize = 1;

pub fn write_table(table: &BilliardTable) -> String {
    let mut out = format!("{MAGIC} {VERSION}\nblocks {}\n", table.blocks().len());
    for b in table.blocks() {
        let p = b.profile();
        out.push_str(&format!("block {} {} {}\n", fmt_f64(p.base), fmt_f64(p.length), p.bumps.len()));
        for w in &p.bumps {
            out.push_str(&format!("bump {} {} {}\n", fmt_f64(w.center), fmt_f64(w.halfwidth), fmt_f64(w.amplitude)));
        }
    }
    out
}

/// Parses the blocks and glues them; closure is checked as for any table.
pub fn parse_table(text: &str) -> Result<BilliardTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |expect: &str| -> Result<(usize, Vec<&str>)> {
        let (no, l) = lines.next().ok_or_else(|| Error::Parse { line: 0, message: format!("unexpected end of file, expected {expect}") })?;
        let tokens: Vec<&str> = l.split_whitespace().collect();
        if tokens[0] != expect {
            return Err(Error::Parse { line: no, message: format!("expected {expect:?}, found {:?}", tokens[0]) });
        }
        Ok((no, tokens))
    };
    let (no, head) = next(MAGIC)?;
    if head.len() != 2 || parse_usize(head[1], no, "version")? != VERSION {
        return Err(Error::Parse { line: no, message: format!("unsupported header {:?}", head.join(" ")) });
    }
    let (no, count) = next("blocks")?;
    let count = parse_usize(count.get(1).copied().unwrap_or(""), no, "block count")?;
    let mut blocks = Vec::with_capacity(count);
    for _ in 0..count {
        let (no, t) = next("block")?;
        if t.len() != 4 {
            return Err(Error::Parse { line: no, message: "block needs base, length and bump count".into() });
        }
        let base = parse_f64(t[1], no, "base")?;
        let length = parse_f64(t[2], no, "length")?;
        let nb = parse_usize(t[3], no, "bump count")?;
        let mut bumps = Vec::with_capacity(nb);
        for _ in 0..nb {
            let (no, t) = next("bump")?;
            if t.len() != 4 {
                return Err(Error::Parse { line: no, message: "bump needs center, halfwidth and amplitude".into() });
            }
            bumps.push(Bump::new(parse_f64(t[1], no, "center")?, parse_f64(t[2], no, "halfwidth")?, parse_f64(t[3], no, "amplitude")?));
        }
        let profile = CurvatureProfile::new(base, length, bumps).map_err(|e| Error::Parse { line: no, message: e.to_string() })?;
        blocks.push(BuildingBlock::new(profile)?);
    }
    if let Some((no, _)) = lines.next() {
        return Err(Error::Parse { line: no, message: "trailing content after the last block".into() });
    }
    close_table(&blocks)
}
