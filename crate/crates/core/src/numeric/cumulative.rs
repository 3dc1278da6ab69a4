//! Piecewise-Chebyshev representation of `F(s) = ∫_lo^s f`.

use super::cheb::{self, NODES};

const SERIES: usize = NODES + 1;

#[derive(Debug, Clone)]
struct Piece {
    lo: f64,
    hi: f64,
    series: [f64; SERIES],
}

/// Cumulative integral of a smooth function, resolved adaptively so that
/// `f` is represented to relative accuracy `rel_tol` on every piece.
#[derive(Debug, Clone)]
pub struct Cumulative {
    pieces: Vec<Piece>,
    total: f64,
}

impl Cumulative {
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breaks: &[f64], max_width: f64, rel_tol: f64) -> Self {
        let min_width = (hi - lo) * 1e-12;
        let mut pts = vec![lo];
        pts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
        pts.push(hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= min_width);
        if let Some(last) = pts.last_mut() {
            *last = hi;
        }
        let mut raw = Vec::new();
        for w in pts.windows(2) {
            split(&f, w[0], w[1], max_width, min_width, rel_tol, &mut raw);
        }
        let mut acc = 0.0;
        let mut pieces = Vec::with_capacity(raw.len());
        for (a, b, mut series) in raw {
            series[0] += acc;
            acc = cheb::eval(&series, 1.0);
            pieces.push(Piece { lo: a, hi: b, series });
        }
        Self { pieces, total: acc }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// `F(s)`, with `s` clamped into the range.
    pub fn value(&self, s: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.hi < s).min(self.pieces.len() - 1);
        let p = &self.pieces[i];
        let mid = 0.5 * (p.lo + p.hi);
        let hw = 0.5 * (p.hi - p.lo);
        cheb::eval(&p.series, ((s - mid) / hw).clamp(-1.0, 1.0))
    }

    /// Piece boundaries with the cumulative value at each, for inversion.
    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        std::iter::once((self.pieces[0].lo, 0.0)).chain(self.pieces.iter().map(|p| (p.hi, cheb::eval(&p.series, 1.0))))
    }
}

fn split<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    max_width: f64,
    min_width: f64,
    rel_tol: f64,
    out: &mut Vec<(f64, f64, [f64; SERIES])>,
) {
    let width = hi - lo;
    if width > max_width && width > 2.0 * min_width {
        let parts = (width / max_width).ceil() as usize;
        if parts > 1 {
            for j in 0..parts {
                let a = lo + width * j as f64 / parts as f64;
                let b = if j + 1 == parts { hi } else { lo + width * (j + 1) as f64 / parts as f64 };
                split(f, a, b, max_width, min_width, rel_tol, out);
            }
            return;
        }
    }
    let mid = 0.5 * (lo + hi);
    let hw = 0.5 * width;
    let mut v = [0.0; NODES];
    let mut scale = 0.0f64;
    for (j, &t) in cheb::nodes().iter().enumerate() {
        v[j] = f(mid + hw * t);
        scale = scale.max(v[j].abs());
    }
    let c = cheb::coefficients(&v);
    if cheb::tail(&c) > rel_tol * scale.max(f64::MIN_POSITIVE) && width > 2.0 * min_width {
        split(f, lo, mid, max_width, min_width, rel_tol, out);
        split(f, mid, hi, max_width, min_width, rel_tol, out);
        return;
    }
    out.push((lo, hi, cheb::integrate(&c, hw)));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_cosine() {
        let c = Cumulative::new(f64::cos, 0.0, 3.0, &[], 0.5, 1e-15);
        for &s in &[0.0, 0.7, 2.2, 3.0] {
            assert!((c.value(s) - s.sin()).abs() < 1e-15);
        }
        assert!((c.total() - 3f64.sin()).abs() < 1e-15);
    }
}
