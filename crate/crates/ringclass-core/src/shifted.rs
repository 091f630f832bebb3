//! Shifted convolution sums `Σ_γ λ(γ² + q) V(|γ² + q|/Y)` over the integers
//! and least-squares fits of their decay exponents.

use alloc::vec::Vec;

use crate::error::{coverage_err, domain_err};
use crate::exec::chunked_sum;
use crate::lseries::{DELTA, THETA};
#[allow(unused_imports)]
use crate::num::Float;
use crate::Result;

/// The smooth weight `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    /// `exp(1 - 1/(1 - u²))` with `u = log₂ y`, supported on `(1/2, 2)`.
    CompactBump,
    /// `exp(-(log y)²)`, cut where it drops below `cut`.
    Gaussian { cut: f64 },
}

impl Window {
    pub const GAUSSIAN: Window = Window::Gaussian { cut: 1e-12 };

    pub fn eval(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match *self {
            Window::CompactBump => {
                let u = y.log2();
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - u * u)).exp()
                }
            }
            Window::Gaussian { cut } => {
                let l = y.ln();
                if l * l > -cut.ln() {
                    0.0
                } else {
                    (-l * l).exp()
                }
            }
        }
    }

    /// `(y_lo, y_hi)` outside of which `V` is zero.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Window::CompactBump => (0.5, 2.0),
            Window::Gaussian { cut } => {
                let r = (-cut.ln()).sqrt();
                ((-r).exp(), r.exp())
            }
        }
    }

    /// `∫ V(y) dy/y`, by the trapezoid rule in `log y`.
    pub fn mass(&self) -> f64 {
        let (lo, hi) = self.support();
        let (a, b) = (lo.ln(), hi.ln());
        let n = 4000;
        let h = (b - a) / n as f64;
        (1..n).map(|i| self.eval((a + i as f64 * h).exp())).sum::<f64>() * h
    }
}

/// One shifted sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedSum {
    pub q: i64,
    pub y: f64,
    /// `S(V) = Σ_γ λ(|γ² + q|) V(|γ² + q|/Y)`.
    pub s: f64,
    /// `𝒮(V) = Σ_γ λ(|γ² + q|) |γ² + q|^{-1/2} V(|γ² + q|/Y)`.
    pub s_normalized: f64,
    pub gamma_max: u64,
    /// True when some `γ² + q < 0` entered through `λ(|γ² + q|)`.
    pub negative_values: bool,
}

/// Largest `|γ² + q|` the sum can reach.
pub fn shifted_reach(q: i64, y: f64, window: Window) -> u64 {
    let top = (window.support().1 * y).floor() as u64;
    top.max(q.unsigned_abs())
}

fn check(coefficients: &[f64], q: i64, y: f64, window: Window) -> Result<u64> {
    if q == 0 {
        return Err(domain_err!("the shift q must be nonzero"));
    }
    if y.is_nan() || y < 4.0 * q.unsigned_abs() as f64 {
        return Err(domain_err!("Y = {y} must be at least 4|q| = {}", 4 * q.unsigned_abs()));
    }
    let reach = shifted_reach(q, y, window);
    if reach as usize >= coefficients.len() {
        return Err(coverage_err!(
            "shifted sum with q = {q}, Y = {y} reaches {reach}, coefficients stop at {}",
            coefficients.len().saturating_sub(1)
        ));
    }
    Ok(reach)
}

/// `S` and `𝒮` summed over `γ >= 0`, each `γ > 0` counted twice.
pub fn shifted_sum(coefficients: &[f64], q: i64, y: f64, window: Window) -> Result<ShiftedSum> {
    let reach = check(coefficients, q, y, window)?;
    let gamma_max = ((reach as i128 - q as i128).max(0) as f64).sqrt() as u64 + 1;
    let term = |g: u64| -> (f64, f64) {
        let v = g as i128 * g as i128 + q as i128;
        if v == 0 {
            return (0.0, 0.0);
        }
        let n = v.unsigned_abs() as u64;
        if n > reach {
            return (0.0, 0.0);
        }
        let w = window.eval(n as f64 / y);
        if w == 0.0 {
            return (0.0, 0.0);
        }
        let mult = if g == 0 { 1.0 } else { 2.0 };
        let t = mult * coefficients[n as usize] * w;
        (t, t / (n as f64).sqrt())
    };
    let len = gamma_max as usize + 1;
    let s = chunked_sum(len, |g| term(g as u64).0);
    let s_normalized = chunked_sum(len, |g| term(g as u64).1);
    Ok(ShiftedSum { q, y, s, s_normalized, gamma_max, negative_values: q < 0 && window.eval(1.0 / y) > 0.0 })
}

/// The same sums over `-γ_max <= γ <= γ_max`, term by term.
pub fn shifted_sum_two_sided(coefficients: &[f64], q: i64, y: f64, window: Window) -> Result<(f64, f64)> {
    let reach = check(coefficients, q, y, window)?;
    let g_max = ((reach as i128 - q as i128).max(0) as f64).sqrt() as i64 + 1;
    let (mut s, mut s_norm) = (0.0, 0.0);
    for g in -g_max..=g_max {
        let v = g as i128 * g as i128 + q as i128;
        let n = v.unsigned_abs() as u64;
        if v == 0 || n > reach {
            continue;
        }
        let t = coefficients[n as usize] * window.eval(n as f64 / y);
        s += t;
        s_norm += t / (n as f64).sqrt();
    }
    Ok((s, s_norm))
}

/// Exponents of `Y` and `q` in the error term
/// `Y^{1/4} q^{δ - 1/2} (q/Y)^{1/2 - θ/2}` bounding `𝒮`; the bound for `S`
/// carries an extra `Y^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSlopes {
    pub y: f64,
    pub q: f64,
    pub y_unnormalized: f64,
}

impl BoundSlopes {
    pub fn new(theta: f64, delta: f64) -> Self {
        let e = 0.5 - theta / 2.0;
        let y = 0.25 - e;
        BoundSlopes { y, q: delta - 0.5 + e, y_unnormalized: y + 0.5 }
    }

    pub fn best_known() -> Self {
        BoundSlopes::new(THETA, DELTA)
    }
}

/// A least-squares line `log|𝒮| = a + slope · log x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    /// The value held fixed (`q` for slopes in `Y`, `Y` for slopes in `q`).
    pub fixed: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square residual of the fit.
    pub residual: f64,
}

fn least_squares(fixed: f64, points: &[(f64, f64)]) -> SlopeFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    SlopeFit { fixed, slope, intercept, residual }
}

/// Shifted sums over a `(Y, q)` grid with slopes of `log|𝒮|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub grid: Vec<ShiftedSum>,
    /// Slope in `log Y`, one fit per `q`.
    pub y_slopes: Vec<SlopeFit>,
    /// Slope in `log q`, one fit per `Y`.
    pub q_slopes: Vec<SlopeFit>,
    /// Slope in `log Y` with one intercept per `q` and a common slope.
    pub pooled_y_slope: f64,
    pub bound: BoundSlopes,
}

impl ExponentFit {
    pub fn max_y_slope(&self) -> f64 {
        self.y_slopes.iter().map(|f| f.slope).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_q_slope(&self) -> f64 {
        self.q_slopes.iter().map(|f| f.slope).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Median over `Y` and `q` of `|𝒮(2q)| / |𝒮(q)|` where both are on the
    /// grid.
    pub fn doubling_ratio_median(&self) -> Option<f64> {
        let mut ratios: Vec<f64> = Vec::new();
        for a in &self.grid {
            if let Some(b) = self.grid.iter().find(|b| b.y == a.y && b.q == 2 * a.q) {
                ratios.push(b.s_normalized.abs() / a.s_normalized.abs());
            }
        }
        if ratios.is_empty() {
            return None;
        }
        ratios.sort_by(f64::total_cmp);
        Some(ratios[ratios.len() / 2])
    }
}

/// Evaluates `𝒮` on the grid `ys × qs` and fits its decay. Needs at least
/// four values on each axis and `Y` spanning two decades.
pub fn exponent_fit(coefficients: &[f64], qs: &[i64], ys: &[f64], window: Window) -> Result<ExponentFit> {
    if qs.len() < 4 || ys.len() < 4 {
        return Err(domain_err!("exponent fit needs at least 4 values of q and of Y"));
    }
    let (lo, hi) = ys.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &y| (l.min(y), h.max(y)));
    if hi / lo < 100.0 {
        return Err(domain_err!("Y must span at least two decades, got [{lo}, {hi}]"));
    }
    let mut grid = Vec::with_capacity(qs.len() * ys.len());
    for &y in ys {
        for &q in qs {
            grid.push(shifted_sum(coefficients, q, y, window)?);
        }
    }
    let log_abs = |s: &ShiftedSum| s.s_normalized.abs().max(f64::MIN_POSITIVE).ln();
    let y_slopes: Vec<SlopeFit> = qs
        .iter()
        .map(|&q| {
            let pts: Vec<(f64, f64)> = grid.iter().filter(|s| s.q == q).map(|s| (s.y.ln(), log_abs(s))).collect();
            least_squares(q as f64, &pts)
        })
        .collect();
    let q_slopes: Vec<SlopeFit> = ys
        .iter()
        .map(|&y| {
            let pts: Vec<(f64, f64)> =
                grid.iter().filter(|s| s.y == y).map(|s| ((s.q.unsigned_abs() as f64).ln(), log_abs(s))).collect();
            least_squares(y, &pts)
        })
        .collect();
    // Common slope after removing the mean of each q row.
    let mut centred = Vec::with_capacity(grid.len());
    for &q in qs {
        let row: Vec<(f64, f64)> = grid.iter().filter(|s| s.q == q).map(|s| (s.y.ln(), log_abs(s))).collect();
        let n = row.len() as f64;
        let (mx, my) = (row.iter().map(|p| p.0).sum::<f64>() / n, row.iter().map(|p| p.1).sum::<f64>() / n);
        centred.extend(row.iter().map(|p| (p.0 - mx, p.1 - my)));
    }
    let pooled_y_slope = least_squares(0.0, &centred).slope;
    Ok(ExponentFit { grid, y_slopes, q_slopes, pooled_y_slope, bound: BoundSlopes::best_known() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::Eigenform;

    #[test]
    fn bound_slopes_from_exponents() {
        let b = BoundSlopes::best_known();
        assert!((b.y - (-0.25 + 7.0 / 128.0)).abs() < 1e-15);
        assert!((b.q - (103.0 / 512.0 - 7.0 / 128.0)).abs() < 1e-15);
        assert!((b.y_unnormalized - b.y - 0.5).abs() < 1e-15);
    }

    #[test]
    fn windows() {
        assert_eq!(Window::CompactBump.eval(1.0), 1.0);
        assert_eq!(Window::CompactBump.eval(2.0), 0.0);
        assert_eq!(Window::CompactBump.eval(0.5), 0.0);
        assert!((Window::GAUSSIAN.eval(1.0) - 1.0).abs() < 1e-15);
        assert!(Window::GAUSSIAN.eval(Window::GAUSSIAN.support().1 * 1.01) == 0.0);
        assert!(Window::CompactBump.mass() > 0.0);
    }

    #[test]
    fn one_and_two_sided_sums_agree() {
        let f = Eigenform::delta(5000).unwrap();
        let lam = f.coefficients(5000).unwrap();
        for q in [1i64, 2, -3, 7, -50, 100] {
            for w in [Window::CompactBump, Window::GAUSSIAN] {
                let y = match w {
                    Window::CompactBump => 2000.0,
                    _ => 20.0,
                };
                if y < 4.0 * q.unsigned_abs() as f64 {
                    continue;
                }
                let a = shifted_sum(&lam, q, y, w).unwrap();
                let (s, sn) = shifted_sum_two_sided(&lam, q, y, w).unwrap();
                assert!((a.s - s).abs() < 1e-11 * (1.0 + s.abs()), "q {q}: {} vs {s}", a.s);
                assert!((a.s_normalized - sn).abs() < 1e-12 * (1.0 + sn.abs()));
            }
        }
    }

    #[test]
    fn errors() {
        let lam = Eigenform::delta(100).unwrap().coefficients(100).unwrap();
        assert!(matches!(shifted_sum(&lam, 0, 40.0, Window::CompactBump), Err(crate::Error::Domain(_))));
        assert!(matches!(shifted_sum(&lam, 20, 40.0, Window::CompactBump), Err(crate::Error::Domain(_))));
        assert!(matches!(shifted_sum(&lam, 1, 80.0, Window::CompactBump), Err(crate::Error::Coverage(_))));
    }
}
