//! Marvizi-Melrose invariants: closed-form integrals over the boundary and
//! a least-squares fit of the maximal n-gon perimeters `L_n`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{congruence_distance, BilliardTable, CurvatureProfile};
use crate::dynamics::ngon::max_perimeter_ngon_with;
use crate::error::{Error, Result};
use crate::lazutkin::build_chart;
use crate::numeric::quad;

/// Default `n`-grid for the `L_n` fit.
pub const DEFAULT_GRID: [usize; 9] = [16, 24, 32, 48, 64, 96, 128, 192, 256];
/// Default number of inverse-power terms in the fit.
pub const DEFAULT_TERMS: usize = 3;
/// Largest accepted condition estimate of the normal equations.
pub const MAX_CONDITION: f64 = 1e12;

/// `ℓ_0`, `ℓ_1`, `ℓ_2` from their integral formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub ell0: f64,
    pub ell1: f64,
    pub ell2: f64,
}

/// Integrals of one profile: `(∫ 1, ∫ ρ^{2/3}, ∫ 9ρ^{4/3} + 8ρ^{-8/3}ρ̇²)`.
fn profile_integrals(p: &CurvatureProfile) -> (f64, f64, f64) {
    let br = p.breakpoints();
    let i1 = quad::integrate(|s| p.kappa(s).powf(-2.0 / 3.0), 0.0, p.length, &br, 1e-15);
    let i2 = quad::integrate(
        |s| {
            let (k, k1, _) = p.kappa_derivs(s);
            // ρ^{-8/3} ρ̇² = κ'² κ^{-4/3}
            let r43 = k.powf(-4.0 / 3.0);
            9.0 * r43 + 8.0 * k1 * k1 * r43
        },
        0.0,
        p.length,
        &br,
        1e-15,
    );
    (p.length, i1, i2)
}

/// Evaluates the invariant integrals block by block and sums them.
pub fn mm_quadrature(table: &BilliardTable) -> Quadrature {
    let (mut l0, mut i1, mut i2) = (0.0, 0.0, 0.0);
    for b in table.blocks() {
        let (a, x, y) = profile_integrals(b.profile());
        l0 += a;
        i1 += x;
        i2 += y;
    }
    Quadrature { ell0: l0, ell1: -2.0 * i1, ell2: i2 / 1080.0 }
}

/// Result of [`fit_expansion`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub ell0: f64,
    /// Coefficients of `n^{-2}`, `n^{-4}`, ...
    pub coeffs: Vec<f64>,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// Condition estimate of the scaled normal equations.
    pub condition: f64,
}

/// Weighted least-squares fit of `L_n ≈ ℓ_0 + Σ_k c_k n^{-2k}`, `k = 1..=terms`,
/// with weights `n⁴`.
pub fn fit_expansion(samples: &[(usize, f64)], terms: usize) -> Result<ExpansionFit> {
    let m = samples.len();
    let cols = terms + 1;
    if m < terms + 3 {
        return Err(Error::Domain(format!("{m} samples are too few for {terms} terms (need {})", terms + 3)));
    }
    let mut ns: Vec<usize> = samples.iter().map(|s| s.0).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() != m {
        return Err(Error::Domain("sample sizes n must be distinct".into()));
    }
    if ns[0] == 0 || ns[m - 1] < 2 * ns[0] {
        return Err(Error::Domain("sample sizes must span at least one octave".into()));
    }
    let mut a = DMatrix::<f64>::zeros(m, cols);
    let mut rhs = DVector::<f64>::zeros(m);
    for (i, &(n, value)) in samples.iter().enumerate() {
        let inv2 = 1.0 / (n as f64 * n as f64);
        let w = n as f64 * n as f64; // square root of the n⁴ weight
        let mut basis = 1.0;
        for j in 0..cols {
            a[(i, j)] = w * basis;
            basis *= inv2;
        }
        rhs[i] = w * value;
    }
    let scales: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = (smax / smin).powi(2);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let x = svd.solve(&rhs, 0.0).map_err(|e| Error::NoConvergence(e.to_string()))?;
    let coef: Vec<f64> = (0..cols).map(|j| x[j] / scales[j]).collect();
    let mut ss = 0.0;
    for &(n, value) in samples {
        let inv2 = 1.0 / (n as f64 * n as f64);
        let mut basis = 1.0;
        let mut fit = 0.0;
        for c in &coef {
            fit += c * basis;
            basis *= inv2;
        }
        ss += (value - fit).powi(2);
    }
    Ok(ExpansionFit { ell0: coef[0], coeffs: coef[1..].to_vec(), residual: (ss / m as f64).sqrt(), condition })
}

/// `L_n` for each `n` of the grid, computed in parallel.
pub fn perimeter_samples(table: &BilliardTable, grid: &[usize]) -> Result<Vec<(usize, f64)>> {
    let chart = build_chart(table);
    grid.par_iter()
        .map(|&n| max_perimeter_ngon_with(table, &chart, n).map(|o| (n, o.perimeter)))
        .collect()
}

/// Absolute and relative difference of one invariant across a pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantDiff {
    pub name: String,
    pub abs: f64,
    pub rel: f64,
}

/// Invariants of one table, with differences against its counterpart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub ell0: f64,
    pub ell1_quad: f64,
    pub ell2_quad: f64,
    pub fit: ExpansionFit,
    pub samples: Vec<(usize, f64)>,
    pub counterpart_diffs: Vec<InvariantDiff>,
}

impl InvariantReport {
    fn named_values(&self) -> Vec<(String, f64)> {
        let mut v = vec![
            ("ell0".to_string(), self.ell0),
            ("ell1_quad".to_string(), self.ell1_quad),
            ("ell2_quad".to_string(), self.ell2_quad),
            ("ell0_fit".to_string(), self.fit.ell0),
        ];
        for (k, c) in self.fit.coeffs.iter().enumerate() {
            v.push((format!("c{}", k + 1), *c));
        }
        v
    }

    /// Human-readable invariant table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, value) in self.named_values() {
            out.push_str(&format!("{name:<10} {value:+.16e}\n"));
        }
        out.push_str(&format!("{:<10} {:.3e}\n", "fit_rms", self.fit.residual));
        out
    }

    /// Looks up a recorded difference by invariant name.
    pub fn diff(&self, name: &str) -> Option<&InvariantDiff> {
        self.counterpart_diffs.iter().find(|d| d.name == name)
    }
}

/// Both reports of a pair plus the congruence distance between the tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub first: InvariantReport,
    pub second: InvariantReport,
    pub congruence_distance: f64,
}

/// Invariants of one table on the given grid.
pub fn invariant_report(table: &BilliardTable, grid: &[usize], terms: usize) -> Result<InvariantReport> {
    let q = mm_quadrature(table);
    let samples = perimeter_samples(table, grid)?;
    let fit = fit_expansion(&samples, terms)?;
    Ok(InvariantReport { ell0: q.ell0, ell1_quad: q.ell1, ell2_quad: q.ell2, fit, samples, counterpart_diffs: Vec::new() })
}

/// Computes both reports and fills their cross differences.
pub fn compare_tables(a: &BilliardTable, b: &BilliardTable, grid: &[usize], terms: usize) -> Result<Comparison> {
    let (ra, rb) = rayon::join(|| invariant_report(a, grid, terms), || invariant_report(b, grid, terms));
    let (mut ra, mut rb) = (ra?, rb?);
    let diffs: Vec<InvariantDiff> = ra
        .named_values()
        .into_iter()
        .zip(rb.named_values())
        .map(|((name, x), (_, y))| {
            let abs = (x - y).abs();
            let scale = x.abs().max(y.abs());
            InvariantDiff { name, abs, rel: if scale > 0.0 { abs / scale } else { 0.0 } }
        })
        .collect();
    ra.counterpart_diffs = diffs.clone();
    rb.counterpart_diffs = diffs;
    Ok(Comparison { first: ra, second: rb, congruence_distance: congruence_distance(a, b) })
}
