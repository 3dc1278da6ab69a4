//! The counterexample: circle-arc blocks, fingerprints that make them
//! pairwise different, and rounds of perturbations that make a decreasing
//! sequence of angles match every block.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::perturb::PAIRS;
use crate::curve::{close_table, congruence_distance, perturb_block, BilliardTable, BuildingBlock, Window};
use crate::dynamics::wall::{match_of, shoot_wall};
use crate::error::{Error, Result};
use crate::numeric::roots;

/// Slot of the free bump in matching perturbations (an inner slot keeps
/// the solved amplitudes no larger than the free one).
const MATCH_LEAD: usize = 1;
/// Congruence distance required between the final tables.
pub const NON_CONGRUENCE_THRESHOLD: f64 = 1e-7;

/// Parameters of a construction run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeConfig {
    /// Number of blocks.
    pub n: usize,
    /// Gluing order of the second table, 1-based.
    pub permutation: Vec<usize>,
    /// Number of matching rounds.
    pub rounds: usize,
    /// Global perturbation budget (sup norm of the curvature change).
    pub epsilon: f64,
    /// Initial angle guess; fixes the bounce count of the first round.
    pub theta_seed: f64,
    pub seed: u64,
    /// Fingerprint size as a fraction of `epsilon` (at most 1/4).
    pub fingerprint_fraction: f64,
    /// Grid intervals of the perturbation sweep.
    pub sweep_points: usize,
    /// Smallest admissible support, as a fraction of the block length.
    pub min_support_fraction: f64,
    /// Midpoint tolerance of a match, relative to the block length.
    pub match_tol: f64,
    /// Tolerance of the final re-verification, relative to the block length.
    pub reverify_tol: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            n: 4,
            permutation: vec![1, 3, 2, 4],
            rounds: 3,
            epsilon: 0.02,
            theta_seed: 0.1,
            seed: 1,
            fingerprint_fraction: 0.025,
            sweep_points: 16,
            min_support_fraction: 1.0 / 50.0,
            match_tol: 1e-9,
            reverify_tol: 1e-8,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::Config(format!("n must be at least 4, got {}", self.n)));
        }
        check_permutation(&self.permutation, self.n)?;
        if self.rounds < 1 {
            return Err(Error::Config("rounds must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.theta_seed > 0.0 && self.theta_seed < PI / 2.0) {
            return Err(Error::Config(format!("theta_seed must lie in (0, π/2), got {}", self.theta_seed)));
        }
        if !(self.fingerprint_fraction >= 0.0 && self.fingerprint_fraction <= 0.25) {
            return Err(Error::Config("fingerprint_fraction must lie in [0, 1/4]".into()));
        }
        if self.sweep_points < 2 {
            return Err(Error::Config("sweep_points must be at least 2".into()));
        }
        if !(self.min_support_fraction > 0.0 && self.min_support_fraction < 0.5) {
            return Err(Error::Config("min_support_fraction must lie in (0, 1/2)".into()));
        }
        if !(self.match_tol > 0.0 && self.reverify_tol >= self.match_tol) {
            return Err(Error::Config("need 0 < match_tol <= reverify_tol".into()));
        }
        Ok(())
    }
}

/// Proof that an angle matches a block after a round's perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchCertificate {
    pub round: usize,
    /// 1-based block index.
    pub block: usize,
    pub theta: f64,
    pub delta_star: f64,
    /// 1-based index of the midpoint bounce.
    pub p: usize,
    pub residual: f64,
    pub support: (f64, f64),
    pub amplitudes: [f64; PAIRS],
}

/// A fingerprint applied to one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub block: usize,
    pub window: Window,
    pub delta: f64,
    pub amplitudes: [f64; PAIRS],
}

/// `n` unit-curvature arcs of length `2π/n`.
pub fn init_circle_blocks(n: usize) -> Result<Vec<BuildingBlock>> {
    if n < 4 {
        return Err(Error::Domain(format!("the construction needs n >= 4 blocks, got {n}")));
    }
    let b = BuildingBlock::arc(1.0, 2.0 * PI / n as f64)?;
    Ok(vec![b; n])
}

fn is_bijection(perm: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    perm.len() == n
        && perm.iter().all(|&k| {
            if k == 0 || k > n || seen[k - 1] {
                return false;
            }
            seen[k - 1] = true;
            true
        })
}

/// Why a permutation cannot produce a non-congruent pair, if it cannot.
fn permutation_defect(perm: &[usize], n: usize) -> Option<String> {
    if !is_bijection(perm, n) {
        return Some(format!("{perm:?} is not a bijection on 1..={n}"));
    }
    let ni = n as i64;
    let shift = |l: usize| (perm[l] as i64 - (l as i64 + 1)).rem_euclid(ni);
    if (0..n).all(|l| shift(l) == shift(0)) {
        return Some(format!("{perm:?} is a rotation ℓ ↦ ℓ + {} (mod {n})", shift(0)));
    }
    let sum = |l: usize| (perm[l] as i64 + l as i64 + 1).rem_euclid(ni);
    if (0..n).all(|l| sum(l) == sum(0)) {
        return Some(format!("{perm:?} is a reflection ℓ ↦ {} - ℓ (mod {n})", sum(0)));
    }
    None
}

/// True iff `perm` is a bijection on `1..=n` that is neither a rotation
/// `ℓ ↦ ℓ + a` nor a reflection `ℓ ↦ a - ℓ` modulo `n`.
pub fn valid_permutation(perm: &[usize], n: usize) -> bool {
    permutation_defect(perm, n).is_none()
}

/// Like [`valid_permutation`] but explains the rejection.
pub fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    match permutation_defect(perm, n) {
        None => Ok(()),
        Some(msg) => Err(Error::InvalidPermutation(msg)),
    }
}

/// Curvature change per unit `delta` of a perturbation in `window`.
fn gain(block: &BuildingBlock, window: Window, probe: f64) -> Result<f64> {
    Ok(perturb_block(block, window, probe)?.sup_change / probe)
}

/// Applies a distinct, seeded perturbation of size at most
/// `fraction · epsilon` to every block.
pub fn fingerprint_perturb(
    blocks: &[BuildingBlock],
    epsilon: f64,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<BuildingBlock>, Vec<Fingerprint>)> {
    if epsilon == 0.0 || fraction == 0.0 {
        return Ok((blocks.to_vec(), Vec::new()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = blocks.len();
    let mut out = Vec::with_capacity(n);
    let mut prints = Vec::with_capacity(n);
    for (k, b) in blocks.iter().enumerate() {
        let half = 0.5 * b.length();
        let lo = half * rng.random_range(0.05..0.3);
        let hi = half * rng.random_range(0.6..0.95);
        let lead = rng.random_range(0..PAIRS);
        // sizes spread over [0.4, 1] of the allowance, sign alternating with k
        let size = fraction * epsilon * (0.4 + 0.6 * (k as f64 + rng.random::<f64>()) / n as f64);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let window = Window::new(lo, hi, lead);
        let mut delta = sign * size / gain(b, window, 1e-3)?;
        let mut pb = perturb_block(b, window, delta)?;
        while pb.sup_change > fraction * epsilon {
            delta *= 0.9 * fraction * epsilon / pb.sup_change;
            pb = perturb_block(b, window, delta)?;
        }
        prints.push(Fingerprint { block: k + 1, window, delta, amplitudes: pb.amplitudes });
        out.push(pb.block);
    }
    Ok((out, prints))
}

/// Largest curvature difference between two blocks of equal length.
pub fn profile_distance(a: &BuildingBlock, b: &BuildingBlock) -> f64 {
    let len = a.length();
    let samples = 4096;
    (0..=samples)
        .map(|j| {
            let s = len * j as f64 / samples as f64;
            (a.profile().kappa(s) - b.profile().kappa(s * b.length() / len)).abs()
        })
        .fold((a.length() - b.length()).abs(), f64::max)
}

/// Outcome of matching one block in one round.
#[derive(Debug, Clone)]
pub struct BlockMatch {
    pub block: BuildingBlock,
    pub delta_star: f64,
    pub p: usize,
    pub residual: f64,
    pub amplitudes: [f64; PAIRS],
}

/// Perturbs `block` inside `window` so that `theta` matches it.
///
/// The perturbation parameter is swept over `sweep_points` intervals of
/// `[-δ_max, δ_max]`, where `δ_max` keeps the curvature change within
/// `budget`. Each jump of the escape count is located by bisection and
/// accepted when it comes with a bounce at the midpoint. `index` is only
/// used in error reports.
pub fn match_angle_to_block(
    block: &BuildingBlock,
    theta: f64,
    window: Window,
    budget: f64,
    tol: f64,
    sweep_points: usize,
    index: usize,
) -> Result<BlockMatch> {
    let a = block.length();
    let tol_abs = tol * a;
    let base_shot = shoot_wall(block, theta)?;
    let m0 = match_of(&base_shot, a, tol_abs);
    if m0.matched {
        return Ok(BlockMatch { block: block.clone(), delta_star: 0.0, p: m0.p, residual: m0.residual, amplitudes: [0.0; PAIRS] });
    }
    let delta_max = if budget > 0.0 { 0.98 * budget / gain(block, window, budget)? } else { 0.0 };
    let escape_count = |delta: f64| -> Result<usize> {
        let pb = perturb_block(block, window, delta)?;
        Ok(shoot_wall(&pb.block, theta)?.escape_index())
    };
    let grid: Vec<f64> = (0..=sweep_points)
        .map(|i| delta_max * (2.0 * i as f64 / sweep_points as f64 - 1.0))
        .collect();
    let counts = grid.iter().map(|&d| escape_count(d)).collect::<Result<Vec<_>>>()?;
    let mut jumps = 0;
    for i in 0..sweep_points {
        if counts[i] == counts[i + 1] {
            continue;
        }
        jumps += 1;
        let upper = counts[i + 1];
        let mut failure = None;
        let (lo, hi) = roots::bisect_predicate(
            |d| match escape_count(d) {
                Ok(k) => k == upper,
                Err(e) => {
                    failure.get_or_insert(e);
                    false
                }
            },
            grid[i],
            grid[i + 1],
            200,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let mut best: Option<BlockMatch> = None;
        for d in [lo, hi] {
            let pb = perturb_block(block, window, d)?;
            let shot = shoot_wall(&pb.block, theta)?;
            let m = match_of(&shot, a, tol_abs);
            if m.matched && best.as_ref().is_none_or(|b| m.residual < b.residual) {
                best = Some(BlockMatch {
                    block: pb.block,
                    delta_star: d,
                    p: m.p,
                    residual: m.residual,
                    amplitudes: pb.amplitudes,
                });
            }
        }
        if let Some(found) = best {
            return Ok(found);
        }
    }
    if jumps == 0 {
        Err(Error::NoDiscontinuity { block: index })
    } else {
        Err(Error::NoOddJump { block: index })
    }
}

/// Midpoint residual `s_p - a/2` of the shot at `theta`.
fn midpoint_offset(block: &BuildingBlock, theta: f64, p: usize) -> Result<f64> {
    let shot = shoot_wall(block, theta)?;
    let a = block.length();
    Ok(match shot.bounces.get(p - 1) {
        Some(&s) => s - 0.5 * a,
        None => 0.5 * a,
    })
}

/// Angle whose `p`-th bounce lands on the midpoint of `block`.
pub fn resonant_angle(block: &BuildingBlock, p: usize) -> Result<f64> {
    let guess = block.turning() / (4.0 * p as f64);
    let mut failure = None;
    let f = |t: f64| match midpoint_offset(block, t, p) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let root = roots::brent(f, 0.8 * guess, (1.25 * guess).min(0.499 * PI), 1e-16, 200);
    if let Some(e) = failure {
        return Err(e);
    }
    root.ok_or_else(|| Error::NoConvergence(format!("no resonant angle with {p} bounces to the midpoint")))
}

/// Widest gap between recorded bounces in `(0, a/2)`, shrunk by 10% margins.
pub fn select_support(recorded: &[f64], length: f64) -> (f64, f64) {
    let half = 0.5 * length;
    let mut pts = vec![0.0];
    pts.extend(recorded.iter().copied().filter(|&s| s > 0.0 && s < half));
    pts.push(half);
    pts.sort_by(f64::total_cmp);
    let mut best = (0.0, 0.0);
    for w in pts.windows(2) {
        if w[1] - w[0] > best.1 - best.0 {
            best = (w[0], w[1]);
        }
    }
    let margin = 0.1 * (best.1 - best.0);
    (best.0 + margin, best.1 - margin)
}

/// Everything produced by [`run_scheme`].
#[derive(Debug, Clone)]
pub struct SchemeOutcome {
    pub config: SchemeConfig,
    /// Blocks in their natural order `γ_1, …, γ_n`.
    pub blocks: Vec<BuildingBlock>,
    /// `γ_1 ♯ … ♯ γ_n`.
    pub table_a: BilliardTable,
    /// `γ_{k_1} ♯ … ♯ γ_{k_n}`.
    pub table_b: BilliardTable,
    pub certificates: Vec<MatchCertificate>,
    pub fingerprints: Vec<Fingerprint>,
    /// Matched angles, strictly decreasing.
    pub thetas: Vec<f64>,
    /// Bounces per block until the midpoint, per round.
    pub midpoint_counts: Vec<usize>,
    pub congruence_distance: f64,
    /// Human-readable account of the run.
    pub log: Vec<String>,
}

impl SchemeOutcome {
    /// Period of the closed orbit at the round-`j` angle (0-based `j`).
    pub fn period(&self, j: usize) -> usize {
        2 * self.midpoint_counts[j] * self.blocks.len()
    }
}

/// Runs the truncated matching scheme.
pub fn run_scheme(config: &SchemeConfig) -> Result<SchemeOutcome> {
    config.validate()?;
    let n = config.n;
    let mut log = Vec::new();
    log.push(format!(
        "config n={} permutation={:?} rounds={} epsilon={:e} theta_seed={:e} seed={}",
        n, config.permutation, config.rounds, config.epsilon, config.theta_seed, config.seed
    ));
    log.push(format!(
        "tolerances match={:e}·a reverify={:e}·a closure={:e} min_support={:e}·a sweep_points={}",
        config.match_tol,
        config.reverify_tol,
        crate::curve::table::CLOSURE_TOL,
        config.min_support_fraction,
        config.sweep_points
    ));

    let circle = init_circle_blocks(n)?;
    let (mut blocks, fingerprints) =
        fingerprint_perturb(&circle, config.epsilon, config.fingerprint_fraction, config.seed)?;
    for f in &fingerprints {
        log.push(format!(
            "fingerprint block={} window=[{:.6e}, {:.6e}] lead={} delta={:+.6e}",
            f.block, f.window.lo, f.window.hi, f.window.lead, f.delta
        ));
    }
    let a = blocks[0].length();

    // bounce records per block, one list per round
    let mut records: Vec<Vec<Vec<f64>>> = vec![Vec::new(); n];
    let mut certificates = Vec::new();
    let mut thetas: Vec<f64> = Vec::new();
    let mut counts = Vec::new();
    let mut p = ((blocks[0].turning() / (4.0 * config.theta_seed)).round() as usize).max(4);

    for round in 1..=config.rounds {
        let budget = config.epsilon / 2f64.powi(round as i32);
        let mut windows = Vec::with_capacity(n);
        for (k, rec) in records.iter().enumerate() {
            let all: Vec<f64> = rec.iter().flatten().copied().collect();
            let (lo, hi) = select_support(&all, a);
            if hi - lo < config.min_support_fraction * a {
                return Err(Error::SupportExhausted { block: k + 1, min_width: config.min_support_fraction * a });
            }
            windows.push(Window::new(lo, hi, MATCH_LEAD));
        }

        // reachable angle range of each block at this bounce count
        let ranges = blocks
            .par_iter()
            .zip(&windows)
            .map(|(b, &w)| -> Result<(f64, f64)> {
                let dmax = 0.98 * budget / gain(b, w, budget)?;
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for d in [-dmax, 0.0, dmax] {
                    let t = resonant_angle(&perturb_block(b, w, d)?.block, p)?;
                    lo = lo.min(t);
                    hi = hi.max(t);
                }
                Ok((lo, hi))
            })
            .collect::<Result<Vec<_>>>()?;
        let lo = ranges.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
        let hi = ranges.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        log.push(format!(
            "round {round}: bounces to midpoint p={p} budget={budget:e} common angle window [{lo:.17e}, {hi:.17e}]"
        ));
        if !(lo < hi) {
            return Err(Error::AngleWindowEmpty { round });
        }
        let theta = 0.5 * (lo + hi);
        if thetas.last().is_some_and(|&prev| theta >= prev) {
            return Err(Error::AngleWindowEmpty { round });
        }

        let matches = blocks
            .par_iter()
            .zip(&windows)
            .enumerate()
            .map(|(k, (b, &w))| {
                match_angle_to_block(b, theta, w, budget, config.match_tol, config.sweep_points, k + 1)
            })
            .collect::<Result<Vec<_>>>()?;
        for (k, m) in matches.into_iter().enumerate() {
            let w = windows[k];
            log.push(format!(
                "round {round} block {}: support=[{:.6e}, {:.6e}] delta*={:+.17e} p={} residual={:.3e}",
                k + 1,
                w.lo,
                w.hi,
                m.delta_star,
                m.p,
                m.residual
            ));
            // the support must avoid every earlier bounce
            let clearance = records[k]
                .iter()
                .flatten()
                .map(|&s| if s >= w.lo && s <= w.hi { 0.0 } else { (s - w.lo).abs().min((s - w.hi).abs()) })
                .fold(f64::INFINITY, f64::min);
            if !(clearance > 0.0) {
                return Err(Error::SupportExhausted { block: k + 1, min_width: config.min_support_fraction * a });
            }
            certificates.push(MatchCertificate {
                round,
                block: k + 1,
                theta,
                delta_star: m.delta_star,
                p: m.p,
                residual: m.residual,
                support: (w.lo, w.hi),
                amplitudes: m.amplitudes,
            });
            let shot = shoot_wall(&m.block, theta)?;
            records[k].push(shot.bounces);
            blocks[k] = m.block;
        }
        thetas.push(theta);
        counts.push(p);
        p *= 2;
    }

    // every angle must still match every block
    for (j, &theta) in thetas.iter().enumerate() {
        for (k, b) in blocks.iter().enumerate() {
            let m = match_of(&shoot_wall(b, theta)?, a, config.reverify_tol * a);
            if !m.matched || m.p != counts[j] {
                return Err(Error::MatchLost { round: j + 1, block: k + 1, residual: m.residual });
            }
        }
    }
    log.push(format!("re-verified {} angles on {n} blocks at {:e}·a", thetas.len(), config.reverify_tol));

    let table_a = close_table(&blocks)?;
    let ordered: Vec<BuildingBlock> = config.permutation.iter().map(|&k| blocks[k - 1].clone()).collect();
    let table_b = close_table(&ordered)?;
    let distance = congruence_distance(&table_a, &table_b);
    log.push(format!("congruence distance {distance:.6e}"));
    if distance < NON_CONGRUENCE_THRESHOLD {
        return Err(Error::Congruent { distance });
    }
    Ok(SchemeOutcome {
        config: config.clone(),
        blocks,
        table_a,
        table_b,
        certificates,
        fingerprints,
        thetas,
        midpoint_counts: counts,
        congruence_distance: distance,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_blocks() {
        let b = init_circle_blocks(6).unwrap();
        assert_eq!(b.len(), 6);
        assert!((b[0].turning() - PI / 3.0).abs() < 1e-15);
        assert!(close_table(&b).is_ok());
        assert!(init_circle_blocks(3).is_err());
    }

    #[test]
    fn permutations() {
        assert!(valid_permutation(&[1, 3, 2, 4], 4));
        assert!(!valid_permutation(&[2, 3, 4, 1], 4));
        assert!(!valid_permutation(&[4, 3, 2, 1], 4));
        assert!(!valid_permutation(&[1, 2, 3, 4], 4));
        assert!(!valid_permutation(&[1, 1, 2, 4], 4));
        let err = check_permutation(&[2, 3, 4, 1], 4).unwrap_err();
        assert!(err.to_string().contains("rotation"));
    }

    #[test]
    fn already_matched_needs_no_perturbation() {
        let b = BuildingBlock::arc(1.0, PI / 2.0).unwrap();
        let w = Window::new(0.1, 0.7, MATCH_LEAD);
        let m = match_angle_to_block(&b, PI / 24.0, w, 0.01, 1e-9, 16, 1).unwrap();
        assert_eq!(m.delta_star, 0.0);
        assert_eq!(m.p, 3);
    }

    #[test]
    fn zero_budget_has_no_discontinuity() {
        let b = BuildingBlock::arc(1.0, PI / 2.0).unwrap();
        let w = Window::new(0.1, 0.7, MATCH_LEAD);
        let err = match_angle_to_block(&b, PI / 32.0 * (1.0 + 1e-4), w, 0.0, 1e-9, 16, 2).unwrap_err();
        assert_eq!(err, Error::NoDiscontinuity { block: 2 });
    }

    #[test]
    fn near_resonant_angle_is_matched() {
        let b = BuildingBlock::arc(1.0, PI / 2.0).unwrap();
        let w = Window::new(0.1, 0.7, MATCH_LEAD);
        let theta = PI / 32.0 * (1.0 + 3e-4);
        let m = match_angle_to_block(&b, theta, w, 0.01, 1e-9, 16, 1).unwrap();
        assert!(m.delta_star != 0.0);
        assert!(m.residual <= 1e-9 * PI / 2.0);
        assert_eq!(m.p, 4);
        assert!((m.block.turning() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn fingerprints_are_distinct_and_small() {
        let circle = init_circle_blocks(4).unwrap();
        let (fp, prints) = fingerprint_perturb(&circle, 0.02, 0.25, 7).unwrap();
        assert_eq!(prints.len(), 4);
        for i in 0..4 {
            assert!(profile_distance(&fp[i], &circle[i]) <= 0.005 + 1e-15);
            for j in 0..i {
                assert!(profile_distance(&fp[i], &fp[j]) >= 100.0 * 1e-9);
            }
        }
        let (same, none) = fingerprint_perturb(&circle, 0.0, 0.25, 7).unwrap();
        assert_eq!(same, circle);
        assert!(none.is_empty());
    }

    #[test]
    fn support_selection() {
        let (lo, hi) = select_support(&[0.2, 0.5, 0.6], 2.0);
        assert!((lo - 0.64).abs() < 1e-15 && (hi - 0.96).abs() < 1e-15);
    }
}
