//! Text formats of the artifacts: tables, certificates, orbits, run
//! configuration and manifest, and SVG drawings.
//!
//! Every float is written with 17 significant digits so that a
//! write-parse-write cycle is byte-identical.

pub mod certificates;
pub mod config;
pub mod manifest;
pub mod orbit_file;
pub mod svg;
pub mod table_file;

pub use certificates::{parse_certificates, write_certificates};
pub use config::{parse_config, GlancingSettings, InvariantSettings, RunConfig};
pub use manifest::RunManifest;
pub use orbit_file::{parse_orbit, write_orbit, OrbitPoints};
pub use svg::{render_svg, Panel};
pub use table_file::{parse_table, write_table};

/// Float formatting used by every writer.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn parse_f64(token: &str, line: usize, what: &str) -> crate::Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| crate::Error::Parse { line, message: format!("{what}: cannot parse {token:?} as a number") })
}

pub(crate) fn parse_usize(token: &str, line: usize, what: &str) -> crate::Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| crate::Error::Parse { line, message: format!("{what}: cannot parse {token:?} as a count") })
}
