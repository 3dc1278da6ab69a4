//! Independent re-check of a constructed pair of tables against its
//! certificates: matched orbits, invariants and non-congruence.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::construction::{MatchCertificate, NON_CONGRUENCE_THRESHOLD};
use crate::curve::BilliardTable;
use crate::dynamics::closed_orbit_from_match;
use crate::error::{Error, Result};
use crate::invariants::compare_tables;

/// Relative perimeter agreement required of matched orbits.
pub const PERIMETER_REL_TOL: f64 = 1e-8;
/// Relative agreement required of the quadrature invariants.
pub const QUADRATURE_REL_TOL: f64 = 1e-12;
/// Relative agreement required of the fitted coefficients `c_1`, `c_2`.
pub const FIT_REL_TOL: f64 = 1e-4;

/// Thresholds of [`verify_pair`], all multiplied by `scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    pub grid: Vec<usize>,
    pub terms: usize,
    pub scale: f64,
}

/// One line of the verification table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    /// `None` for informational rows.
    pub threshold: Option<f64>,
    pub pass: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub rows: Vec<CheckRow>,
    pub congruence_distance: f64,
    /// First closure failure, if a certificate angle no longer closes.
    pub closure_failure: Option<(f64, f64)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn congruent(&self) -> bool {
        self.congruence_distance < NON_CONGRUENCE_THRESHOLD
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{:<22} {:>12} {:>10}  {:<4}  note\n", "check", "value", "threshold", "");
        for r in &self.rows {
            let thr = r.threshold.map(|t| format!("{t:.1e}")).unwrap_or_else(|| "-".into());
            let flag = if r.pass { "pass" } else { "FAIL" };
            out.push_str(&format!("{:<22} {:>12.3e} {:>10}  {flag:<4}  {}\n", r.name, r.value, thr, r.note));
        }
        out
    }
}

fn row(name: String, value: f64, threshold: f64, note: String) -> CheckRow {
    CheckRow { name, value, threshold: Some(threshold), pass: value <= threshold, note }
}

/// Re-runs every certified angle on both tables and compares the
/// invariants of the pair.
pub fn verify_pair(
    a: &BilliardTable,
    b: &BilliardTable,
    certificates: &[MatchCertificate],
    settings: &VerifySettings,
) -> Result<VerifyReport> {
    if certificates.is_empty() {
        return Err(Error::Domain("no certificates to verify".into()));
    }
    let n = a.blocks().len();
    // expected period per round from the certificates
    let mut rounds: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for c in certificates {
        let e = rounds.entry(c.round).or_insert((c.theta, c.p));
        if e.0 != c.theta || e.1 != c.p {
            return Err(Error::Domain(format!("round {} certificates disagree on angle or count", c.round)));
        }
    }
    let mut rows = Vec::new();
    let mut closure_failure = None;
    for (&round, &(theta, p)) in &rounds {
        let expected = 2 * p * n;
        match (closed_orbit_from_match(a, theta), closed_orbit_from_match(b, theta)) {
            (Ok(oa), Ok(ob)) => {
                let same = oa.period == ob.period && oa.period == expected;
                rows.push(CheckRow {
                    name: format!("round {round} period"),
                    value: oa.period as f64,
                    threshold: None,
                    pass: same,
                    note: format!("{} vs {} (expected {expected})", oa.period, ob.period),
                });
                let rel = (oa.perimeter - ob.perimeter).abs() / oa.perimeter.max(ob.perimeter);
                rows.push(row(
                    format!("round {round} perimeter"),
                    rel,
                    PERIMETER_REL_TOL * settings.scale,
                    format!("{:.17e}", oa.perimeter),
                ));
            }
            (ra, rb) => {
                let err = ra.err().or(rb.err()).expect("one side failed");
                if let Error::ClosureFailure { theta, residual } = err {
                    closure_failure.get_or_insert((theta, residual));
                }
                for what in ["period", "perimeter"] {
                    rows.push(CheckRow {
                        name: format!("round {round} {what}"),
                        value: f64::NAN,
                        threshold: None,
                        pass: false,
                        note: err.to_string(),
                    });
                }
            }
        }
    }

    let cmp = compare_tables(a, b, &settings.grid, settings.terms)?;
    for (name, tol) in
        [("ell0", QUADRATURE_REL_TOL), ("ell1_quad", QUADRATURE_REL_TOL), ("ell2_quad", QUADRATURE_REL_TOL), ("c1", FIT_REL_TOL), ("c2", FIT_REL_TOL)]
    {
        let d = cmp.first.diff(name).expect("comparison records every invariant");
        rows.push(row(format!("{name} rel diff"), d.rel, tol * settings.scale, format!("abs {:.3e}", d.abs)));
    }
    let distance = cmp.congruence_distance;
    rows.push(CheckRow {
        name: "congruence distance".into(),
        value: distance,
        threshold: None,
        pass: true,
        note: if distance < NON_CONGRUENCE_THRESHOLD {
            "congruent, not a counterexample".into()
        } else {
            "non-congruent".into()
        },
    });
    Ok(VerifyReport { rows, congruence_distance: distance, closure_failure })
}
