//! Lazutkin coordinates `x(s) = C ∫_0^s ρ^{-2/3}`, `y = 4Cρ^{1/3} sin(φ/2)`,
//! block Lazutkin perimeters and the glancing-orbit estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{BilliardTable, BuildingBlock, CurvatureProfile};
use crate::dynamics::map::advance;
use crate::dynamics::PhaseState;
use crate::error::{Error, Result};
use crate::numeric::cumulative::Cumulative;
use crate::numeric::quad;

const TWO_THIRDS: f64 = 2.0 / 3.0;

/// The boundary coordinate `x` of a table together with its inverse.
#[derive(Debug, Clone)]
pub struct LazutkinChart {
    profile: CurvatureProfile,
    c_omega: f64,
    length: f64,
    cumulative: Cumulative,
    knots: Vec<(f64, f64)>,
}

/// Point of the Lazutkin phase cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LazutkinState {
    pub x: f64,
    pub y: f64,
}

/// Builds the chart of `table`.
pub fn build_chart(table: &BilliardTable) -> LazutkinChart {
    let profile = table.profile();
    let l = table.length();
    let cumulative = Cumulative::new(
        |s| profile.kappa(s).powf(TWO_THIRDS),
        0.0,
        l,
        &profile.breakpoints(),
        0.25 / profile.max_kappa(),
        1e-15,
    );
    let knots = cumulative.knots().collect();
    LazutkinChart { profile: profile.clone(), c_omega: 1.0 / cumulative.total(), length: l, cumulative, knots }
}

impl LazutkinChart {
    /// Normalization `C = 1 / ∫ ρ^{-2/3}`.
    pub fn c_omega(&self) -> f64 {
        self.c_omega
    }

    /// `x(s)` for `s ∈ [0, ℓ_0]`, in `[0, 1]`.
    pub fn x_of_s(&self, s: f64) -> f64 {
        if s >= self.length {
            return 1.0;
        }
        self.c_omega * self.cumulative.value(s)
    }

    /// `x` lifted to the universal cover: `x(s + ℓ_0) = x(s) + 1`.
    pub fn x_lifted(&self, s: f64) -> f64 {
        let laps = (s / self.length).floor();
        laps + self.x_of_s(s - laps * self.length)
    }

    /// Inverse of [`x_of_s`](Self::x_of_s) on `[0, 1]`.
    pub fn s_of_x(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return self.length;
        }
        let target = x / self.c_omega;
        let i = self.knots.partition_point(|k| k.1 <= target).clamp(1, self.knots.len() - 1);
        let (s0, f0) = self.knots[i - 1];
        let (s1, f1) = self.knots[i];
        let mut s = s0 + (s1 - s0) * (target - f0) / (f1 - f0);
        for _ in 0..8 {
            let rate = self.cumulative_rate(s);
            let ds = (self.cumulative.value(s) - target) / rate;
            s = (s - ds).clamp(s0, s1);
            if ds.abs() <= 1e-16 * self.length {
                break;
            }
        }
        s
    }

    /// Lifted inverse: `s_of_x(x + 1) = s_of_x(x) + ℓ_0`.
    pub fn s_lifted(&self, x: f64) -> f64 {
        let laps = x.floor();
        laps * self.length + self.s_of_x(x - laps)
    }

    fn cumulative_rate(&self, s: f64) -> f64 {
        self.profile.kappa(s).powf(TWO_THIRDS)
    }
}

/// `(s, φ) ↦ (x, y)`.
pub fn to_lazutkin(chart: &LazutkinChart, table: &BilliardTable, state: PhaseState) -> LazutkinState {
    let s = state.s.rem_euclid(table.length());
    let rho = 1.0 / table.kappa(s);
    LazutkinState { x: chart.x_of_s(s), y: 4.0 * chart.c_omega * rho.cbrt() * (0.5 * state.phi).sin() }
}

/// `(x, y) ↦ (s, φ)`.
pub fn from_lazutkin(chart: &LazutkinChart, table: &BilliardTable, state: LazutkinState) -> PhaseState {
    let s = chart.s_of_x(state.x.rem_euclid(1.0));
    let rho = 1.0 / table.kappa(s);
    let ratio = (state.y / (4.0 * chart.c_omega * rho.cbrt())).clamp(-1.0, 1.0);
    PhaseState::new(s, 2.0 * ratio.asin())
}

/// Unnormalized Lazutkin perimeter `∫ ρ^{-2/3} ds` of a profile.
pub fn profile_lazutkin_perimeter(profile: &CurvatureProfile) -> f64 {
    quad::integrate(|s| profile.kappa(s).powf(TWO_THIRDS), 0.0, profile.length, &profile.breakpoints(), 1e-14)
}

/// Unnormalized Lazutkin perimeter of a block.
pub fn lazutkin_perimeter(block: &BuildingBlock) -> f64 {
    profile_lazutkin_perimeter(block.profile())
}

/// Deviations of one glancing orbit from the linearized Lazutkin motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlancingRow {
    pub y0: f64,
    pub bounces: usize,
    /// `max_k |y_k - y_0|`
    pub d_y: f64,
    /// `max_k |x_k - x_0 - k y_0|` with `x` lifted
    pub d_x: f64,
}

/// Fitted decay exponents of the glancing deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlancingReport {
    pub rows: Vec<GlancingRow>,
    /// Slope of `log D_y` against `log N`; `+∞` when `y` is conserved to
    /// rounding (`D_y ≤` [`Y_CONSERVED`] for every orbit).
    pub e_y: f64,
    pub e_x: f64,
}

/// Threshold below which `D_y` counts as exact conservation.
pub const Y_CONSERVED: f64 = 1e-12;

impl GlancingReport {
    /// Delimited text table `y0,N,D_y,D_x`.
    pub fn to_delimited(&self) -> String {
        let mut out = String::from("y0,N,D_y,D_x\n");
        for r in &self.rows {
            out.push_str(&format!("{:.16e},{},{:.16e},{:.16e}\n", r.y0, r.bounces, r.d_y, r.d_x));
        }
        out
    }
}

/// Default number of launch points per `y0`: a single orbit from `x = 0`.
pub const LAUNCH_POINTS: usize = 1;

/// Runs one glancing orbit per `y0` (launched from `x = 0`) for
/// `N = ⌈1/y0⌉` bounces and fits the decay of the deviations in `N`.
pub fn verify_glancing_estimates(table: &BilliardTable, y0_list: &[f64]) -> Result<GlancingReport> {
    verify_glancing_estimates_from(table, y0_list, LAUNCH_POINTS)
}

/// As [`verify_glancing_estimates`], launching from `launches` points equally
/// spaced in `x` and keeping the worst deviations.
pub fn verify_glancing_estimates_from(
    table: &BilliardTable,
    y0_list: &[f64],
    launches: usize,
) -> Result<GlancingReport> {
    if launches == 0 {
        return Err(Error::Domain("at least one launch point is needed".into()));
    }
    let chart = build_chart(table);
    let mut rows = Vec::with_capacity(y0_list.len());
    for &y0 in y0_list {
        if !(y0 > 0.0 && y0 <= 0.05) {
            return Err(Error::Domain(format!("y0 = {y0} outside the glancing range (0, 0.05]")));
        }
        let n = (1.0 / y0).ceil() as usize;
        let worst = (0..launches)
            .into_par_iter()
            .map(|j| glancing_deviation(&chart, table, j as f64 / launches as f64, y0, n))
            .collect::<Result<Vec<_>>>()?;
        let (d_y, d_x) = worst.iter().fold((0.0f64, 0.0f64), |acc, d| (acc.0.max(d.0), acc.1.max(d.1)));
        rows.push(GlancingRow { y0, bounces: n, d_y, d_x });
    }
    let e_y = if rows.iter().all(|r| r.d_y <= Y_CONSERVED) {
        f64::INFINITY
    } else {
        log_slope(rows.iter().map(|r| (r.bounces as f64, r.d_y)))
    };
    let e_x = log_slope(rows.iter().map(|r| (r.bounces as f64, r.d_x)));
    Ok(GlancingReport { rows, e_y, e_x })
}

fn glancing_deviation(chart: &LazutkinChart, table: &BilliardTable, x0: f64, y0: f64, n: usize) -> Result<(f64, f64)> {
    let start = from_lazutkin(chart, table, LazutkinState { x: x0, y: y0 });
    let x_start = chart.x_lifted(start.s);
    let (mut s, mut phi) = (start.s, start.phi);
    let (mut d_y, mut d_x) = (0.0f64, 0.0f64);
    for k in 1..=n {
        (s, phi) = advance(table, s, phi).ok_or_else(|| Error::NoConvergence("billiard map failed".into()))?;
        let y = to_lazutkin(chart, table, PhaseState::new(s, phi)).y;
        d_y = d_y.max((y - y0).abs());
        d_x = d_x.max((chart.x_lifted(s) - x_start - k as f64 * y0).abs());
    }
    Ok((d_y, d_x))
}

/// Glancing bounce count of a single block against its Lazutkin perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BounceLaw {
    /// Launch value of `y` in the block's own chart (normalization 1).
    pub y0: f64,
    pub theta: f64,
    pub bounces: usize,
    /// `y0 · bounces`, which tends to the Lazutkin perimeter as `y0 → 0`.
    pub scaled: f64,
    pub perimeter: f64,
}

/// Shoots a glancing ray into `block` from its start with `y = y0` in the
/// unnormalized chart `y = 4ρ^{1/3} sin(φ/2)` and counts the bounces.
pub fn bounce_law(block: &BuildingBlock, y0: f64) -> Result<BounceLaw> {
    let rho0 = 1.0 / block.profile().kappa(0.0);
    let ratio = y0 / (4.0 * rho0.cbrt());
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Domain(format!("y0 = {y0} gives no launch angle")));
    }
    let theta = 2.0 * ratio.asin();
    let shot = crate::dynamics::shoot_wall(block, theta)?;
    let bounces = shot.escape_index();
    Ok(BounceLaw { y0, theta, bounces, scaled: y0 * bounces as f64, perimeter: lazutkin_perimeter(block) })
}

/// Least-squares slope of `log v` against `log n`, skipping non-positive values.
fn log_slope(points: impl Iterator<Item = (f64, f64)>) -> f64 {
    let pts: Vec<(f64, f64)> = points.filter(|p| p.1 > 0.0).map(|(n, v)| (n.ln(), v.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
