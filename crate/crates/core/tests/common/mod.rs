#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::OnceLock;

use billiard_blocks::construction::{run_scheme, SchemeConfig, SchemeOutcome};
use billiard_blocks::curve::{close_table, BilliardTable, BuildingBlock, Bump, CurvatureProfile};

pub const QUARTER: f64 = PI / 2.0;

pub fn quarter() -> BuildingBlock {
    BuildingBlock::arc(1.0, QUARTER).unwrap()
}

pub fn circle() -> BilliardTable {
    close_table(&vec![quarter(); 4]).unwrap()
}

/// Quarter block with symmetric bump pairs and the base lowered so that it
/// still turns by π/2.
pub fn bumped_quarter(bumps: &[(f64, f64, f64)]) -> BuildingBlock {
    let a = QUARTER;
    let mut all = Vec::new();
    let mut turning = 0.0;
    for &(c, h, amp) in bumps {
        let b = Bump::new(c, h, amp);
        turning += 2.0 * b.turning();
        all.push(b);
        all.push(b.mirrored(a));
    }
    let base = 1.0 - turning / a;
    BuildingBlock::new(CurvatureProfile::new(base, a, all).unwrap()).unwrap()
}

/// Four copies of a bumped quarter block; closes because each copy turns
/// by exactly π/2.
pub fn oval_with(bumps: &[(f64, f64, f64)]) -> BilliardTable {
    close_table(&vec![bumped_quarter(bumps); 4]).unwrap()
}

pub fn oval() -> BilliardTable {
    oval_with(&[(0.45, 0.3, 0.4)])
}

/// The default construction, computed once per test binary.
pub fn default_outcome() -> &'static SchemeOutcome {
    static OUT: OnceLock<SchemeOutcome> = OnceLock::new();
    OUT.get_or_init(|| run_scheme(&SchemeConfig::default()).expect("default scheme runs"))
}
