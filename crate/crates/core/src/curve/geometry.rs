//! Frenet reconstruction of a curve from its curvature profile.
//!
//! The arclength interval is split into panels on which the curvature is
//! resolved to machine precision by a degree-16 Chebyshev interpolant. The
//! tangent angle `θ(s) = ∫κ` and the position `γ(s) = ∫(cos θ, sin θ)` are
//! then integrated spectrally panel by panel, so every evaluation costs a
//! binary search and three Clenshaw sums.

use nalgebra::Vector2;

use super::profile::CurvatureProfile;
use crate::numeric::cheb::{self, NODES};

pub type Vec2 = Vector2<f64>;

const SERIES: usize = NODES + 1;
/// Largest turning allowed inside one panel.
const MAX_PANEL_TURNING: f64 = 0.25;

#[derive(Debug, Clone)]
struct Panel {
    lo: f64,
    hi: f64,
    theta: [f64; SERIES],
    x: [f64; SERIES],
    y: [f64; SERIES],
}

impl Panel {
    #[inline]
    fn local(&self, s: f64) -> f64 {
        let mid = 0.5 * (self.lo + self.hi);
        let hw = 0.5 * (self.hi - self.lo);
        ((s - mid) / hw).clamp(-1.0, 1.0)
    }
}

/// Evaluated point on a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub point: Vec2,
    pub tangent_angle: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
}

impl CurvePoint {
    #[inline]
    pub fn tangent(&self) -> Vec2 {
        Vec2::new(self.tangent_angle.cos(), self.tangent_angle.sin())
    }

    /// Inward unit normal (the curve is positively oriented).
    #[inline]
    pub fn normal(&self) -> Vec2 {
        Vec2::new(-self.tangent_angle.sin(), self.tangent_angle.cos())
    }
}

/// Spectrally integrated geometry of a profile over `[lo, hi]`, with
/// `γ(lo) = 0` and `θ(lo) = 0`.
#[derive(Debug, Clone)]
pub struct Geometry {
    profile: CurvatureProfile,
    lo: f64,
    hi: f64,
    panels: Vec<Panel>,
    end_theta: f64,
    end_point: Vec2,
}

struct LocalPanel {
    lo: f64,
    hi: f64,
    theta: [f64; SERIES],
    cos_int: [f64; SERIES],
    sin_int: [f64; SERIES],
}

impl Geometry {
    /// Geometry of the whole profile `[0, length]`.
    pub fn new(profile: &CurvatureProfile) -> Self {
        Self::on_range(profile, 0.0, profile.length)
    }

    /// Geometry of the sub-arc `[lo, hi]`, started at the origin with zero
    /// tangent angle.
    pub fn on_range(profile: &CurvatureProfile, lo: f64, hi: f64) -> Self {
        let kappa_scale = profile.max_kappa().max(profile.base);
        let max_width = (MAX_PANEL_TURNING / kappa_scale).min((hi - lo) / 4.0);
        let min_width = (hi - lo) * 1e-12;
        let tol = 1e-15 * kappa_scale;

        let mut breaks = vec![lo];
        breaks.extend(profile.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
        breaks.push(hi);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= min_width);
        if let Some(last) = breaks.last_mut() {
            *last = hi;
        }

        let mut locals = Vec::new();
        for w in breaks.windows(2) {
            split_panel(profile, w[0], w[1], max_width, min_width, tol, &mut locals);
        }

        let mut panels = Vec::with_capacity(locals.len());
        let (mut th0, mut x0, mut y0) = (0.0f64, 0.0f64, 0.0f64);
        for lp in locals {
            let (c, s) = (th0.cos(), th0.sin());
            let mut theta = lp.theta;
            theta[0] += th0;
            let mut x = [0.0; SERIES];
            let mut y = [0.0; SERIES];
            for k in 0..SERIES {
                x[k] = c * lp.cos_int[k] - s * lp.sin_int[k];
                y[k] = s * lp.cos_int[k] + c * lp.sin_int[k];
            }
            x[0] += x0;
            y[0] += y0;
            th0 = cheb::eval(&theta, 1.0);
            x0 = cheb::eval(&x, 1.0);
            y0 = cheb::eval(&y, 1.0);
            panels.push(Panel { lo: lp.lo, hi: lp.hi, theta, x, y });
        }

        Self {
            profile: profile.clone(),
            lo,
            hi,
            panels,
            end_theta: th0,
            end_point: Vec2::new(x0, y0),
        }
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// Tangent angle at the end of the range (total turning).
    pub fn end_theta(&self) -> f64 {
        self.end_theta
    }

    pub fn end_point(&self) -> Vec2 {
        self.end_point
    }

    #[inline]
    fn panel(&self, s: f64) -> &Panel {
        let i = self.panels.partition_point(|p| p.hi < s);
        &self.panels[i.min(self.panels.len() - 1)]
    }

    /// Tangent angle at `s` (clamped into the range).
    #[inline]
    pub fn theta(&self, s: f64) -> f64 {
        if s <= self.lo {
            return 0.0;
        }
        let p = self.panel(s);
        cheb::eval(&p.theta, p.local(s))
    }

    #[inline]
    pub fn point(&self, s: f64) -> Vec2 {
        if s <= self.lo {
            return Vec2::zeros();
        }
        let p = self.panel(s);
        let t = p.local(s);
        Vec2::new(cheb::eval(&p.x, t), cheb::eval(&p.y, t))
    }

    /// Position and tangent angle.
    #[inline]
    pub fn point_theta(&self, s: f64) -> (Vec2, f64) {
        if s <= self.lo {
            return (Vec2::zeros(), 0.0);
        }
        let p = self.panel(s);
        let t = p.local(s);
        (Vec2::new(cheb::eval(&p.x, t), cheb::eval(&p.y, t)), cheb::eval(&p.theta, t))
    }

    pub fn eval(&self, s: f64) -> CurvePoint {
        let (point, tangent_angle) = self.point_theta(s);
        let (kappa, kappa_prime, _) = self.profile.kappa_derivs(s);
        CurvePoint { point, tangent_angle, kappa, kappa_prime }
    }
}

fn split_panel(
    profile: &CurvatureProfile,
    lo: f64,
    hi: f64,
    max_width: f64,
    min_width: f64,
    tol: f64,
    out: &mut Vec<LocalPanel>,
) {
    let width = hi - lo;
    if width > max_width && width > 2.0 * min_width {
        let parts = (width / max_width).ceil() as usize;
        if parts > 1 {
            for j in 0..parts {
                let a = lo + width * j as f64 / parts as f64;
                let b = if j + 1 == parts { hi } else { lo + width * (j + 1) as f64 / parts as f64 };
                split_panel(profile, a, b, max_width, min_width, tol, out);
            }
            return;
        }
    }
    let mid = 0.5 * (lo + hi);
    let hw = 0.5 * width;
    let nodes = cheb::nodes();
    let mut kv = [0.0; NODES];
    for (j, &t) in nodes.iter().enumerate() {
        kv[j] = profile.kappa(mid + hw * t);
    }
    let kc = cheb::coefficients(&kv);
    if cheb::tail(&kc) > tol && width > 2.0 * min_width {
        split_panel(profile, lo, mid, max_width, min_width, tol, out);
        split_panel(profile, mid, hi, max_width, min_width, tol, out);
        return;
    }
    let theta = cheb::integrate(&kc, hw);
    let mut cv = [0.0; NODES];
    let mut sv = [0.0; NODES];
    for (j, &t) in nodes.iter().enumerate() {
        let th = cheb::eval(&theta, t);
        cv[j] = th.cos();
        sv[j] = th.sin();
    }
    let cos_int = cheb::integrate(&cheb::coefficients(&cv), hw);
    let sin_int = cheb::integrate(&cheb::coefficients(&sv), hw);
    out.push(LocalPanel { lo, hi, theta, cos_int, sin_int });
}
