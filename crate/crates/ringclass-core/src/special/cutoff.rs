//! Archimedean factors and the cutoff functions
//! `V_m(y) = (1/2πi) ∫_(2) G_m(s) L_∞(s + 1/2)/L_∞(1/2) y^{-s} ds`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{digamma, log_gamma, Contour};
use crate::error::domain_err;
use crate::exec::map_indices;
#[allow(unused_imports)]
use crate::num::Float;
use crate::num::{C64, PI};
use crate::Result;

/// `L_∞(s) = ∏_μ Γ_R(s - μ)` with `Γ_R(s) = π^{-s/2} Γ(s/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchFactor {
    pub gamma_shifts: Vec<C64>,
}

impl ArchFactor {
    pub fn new(gamma_shifts: Vec<C64>) -> Result<Self> {
        if gamma_shifts.is_empty() {
            return Err(domain_err!("an archimedean factor needs at least one gamma factor"));
        }
        Ok(ArchFactor { gamma_shifts })
    }

    /// The factor of `L(s, Π_K ⊗ Ω)` for `Π` the tensor product of
    /// holomorphic forms of the given weights: `∏ Γ_C(s + a/2)` over the
    /// `2^N` values `a = |Σ_j ±(k_j - 1)|`, with
    /// `Γ_C(s) = Γ_R(s) Γ_R(s + 1)`.
    pub fn from_weights(weights: &[u32]) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|&k| k < 1) {
            return Err(domain_err!("weights must be positive, got {weights:?}"));
        }
        let n = weights.len();
        let mut shifts = Vec::with_capacity(2 << n);
        for signs in 0u32..(1 << n) {
            let a: i64 = weights
                .iter()
                .enumerate()
                .map(|(j, &k)| if signs >> j & 1 == 1 { k as i64 - 1 } else { 1 - k as i64 })
                .sum();
            let half = a.unsigned_abs() as f64 / 2.0;
            shifts.push(C64::new(-half, 0.0));
            shifts.push(C64::new(-half - 1.0, 0.0));
        }
        ArchFactor::new(shifts)
    }

    /// `log L_∞(s)` (up to a multiple of 2πi).
    pub fn log_value(&self, s: C64) -> Result<C64> {
        let ln_pi = PI.ln();
        let mut acc = C64::new(0.0, 0.0);
        for &mu in &self.gamma_shifts {
            let z = s - mu;
            acc += -0.5 * z * ln_pi + log_gamma(0.5 * z)?;
        }
        Ok(acc)
    }

    /// `L_∞'(s) / L_∞(s)`.
    pub fn log_derivative(&self, s: C64) -> Result<C64> {
        let ln_pi = PI.ln();
        let mut acc = C64::new(0.0, 0.0);
        for &mu in &self.gamma_shifts {
            acc += -0.5 * ln_pi + 0.5 * digamma(0.5 * (s - mu))?;
        }
        Ok(acc)
    }

    /// Largest real part of a pole of `L_∞`.
    pub fn rightmost_pole(&self) -> f64 {
        self.gamma_shifts.iter().map(|m| m.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn signature(&self) -> String {
        let parts: Vec<String> = self.gamma_shifts.iter().map(|m| format!("{}{:+}i", m.re, m.im)).collect();
        parts.join(",")
    }
}

/// `G_m(s) = exp(a s²) / s^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub m: u32,
    pub a: f64,
}

impl TestFunction {
    pub fn new(m: u32, a: f64) -> Result<Self> {
        if !(1..=2).contains(&m) {
            return Err(domain_err!("test function pole order must be 1 or 2, got {m}"));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return Err(domain_err!("test function damping must be finite and non-negative, got {a}"));
        }
        Ok(TestFunction { m, a })
    }

    pub fn eval(&self, s: C64) -> C64 {
        (self.a * s * s).exp() / s.powu(self.m)
    }
}

/// Numerical design constants of the cutoff evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffTolerances {
    /// Smallest tabulated `y`; below it values are computed directly.
    pub y_min: f64,
    /// Largest `y` considered; beyond the decay point values are zero.
    pub y_max: f64,
    /// Tabulation nodes per decade of `y`.
    pub nodes_per_decade: usize,
    /// Gauss-Legendre panel width along vertical lines.
    pub panel_width: f64,
    /// Relative magnitude below which the line integrand is truncated.
    pub truncation: f64,
    /// Maximum number of panels before reporting non-convergence.
    pub max_panels: usize,
    /// `|V(y)|` below which the function counts as decayed.
    pub decayed: f64,
}

impl Default for CutoffTolerances {
    fn default() -> Self {
        CutoffTolerances {
            y_min: 1e-12,
            y_max: 1e12,
            nodes_per_decade: 512,
            panel_width: 0.25,
            truncation: 1e-16,
            max_panels: 8000,
            decayed: 1e-18,
        }
    }
}

/// Line on `Re s = 2`, and for small `y` the residue at `s = 0` plus a line
/// left of it.
#[derive(Debug, Clone)]
struct Contours {
    right: Contour,
    residue: Contour,
    left: Contour,
}

impl Contours {
    fn scaled(&self, g: impl Fn(C64) -> C64 + Copy) -> Contours {
        Contours { right: self.right.scaled(g), residue: self.residue.scaled(g), left: self.left.scaled(g) }
    }

    /// Evaluates on whichever contour has the smaller cancellation scale.
    fn eval(&self, log_y: f64) -> f64 {
        let right = self.right.magnitude(log_y);
        let left = self.left.magnitude(log_y) + self.residue.magnitude(log_y);
        if right <= left {
            self.right.eval(log_y)
        } else {
            self.residue.eval(log_y) + self.left.eval(log_y)
        }
    }
}

/// Values on a uniform grid in `log y` with four-point Lagrange
/// interpolation.
#[derive(Debug, Clone)]
struct Table {
    u0: f64,
    du: f64,
    values: Vec<f64>,
}

impl Table {
    fn build(contours: &Contours, tol: &CutoffTolerances, u_end: f64) -> Table {
        let u0 = tol.y_min.ln();
        let du = core::f64::consts::LN_10 / tol.nodes_per_decade as f64;
        let n = ((u_end - u0) / du).ceil() as usize + 3;
        let values = map_indices(n + 1, |i| contours.eval(u0 + (i as f64 - 1.0) * du));
        Table { u0: u0 - du, du, values }
    }

    fn u_max(&self) -> f64 {
        self.u0 + (self.values.len() - 3) as f64 * self.du
    }

    fn get(&self, u: f64) -> Option<f64> {
        let x = (u - self.u0) / self.du;
        if x < 1.0 || u > self.u_max() {
            return None;
        }
        let i = x.floor() as usize;
        let t = x - i as f64;
        let (p0, p1, p2, p3) = (self.values[i - 1], self.values[i], self.values[i + 1], self.values[i + 2]);
        let (a, b, c, d) = (t + 1.0, t, t - 1.0, t - 2.0);
        Some(-p0 * b * c * d / 6.0 + p1 * a * c * d / 2.0 - p2 * a * b * d / 2.0 + p3 * a * b * c / 6.0)
    }
}

fn decay_point(contours: &Contours, tol: &CutoffTolerances) -> f64 {
    let scale = contours.eval(0.0).abs().max(1.0);
    let mut y = 1.0f64;
    while y < tol.y_max {
        let a = contours.eval(y.ln()).abs();
        let b = contours.eval((2.0 * y).ln()).abs();
        if a < tol.decayed * scale && b < tol.decayed * scale {
            return y.ln();
        }
        y *= 2.0;
    }
    tol.y_max.ln()
}

/// `V_{k+1}` for a given archimedean factor and test function `G_{k+1}`.
#[derive(Debug, Clone)]
pub struct CutoffFunction {
    pub k: u32,
    pub arch: ArchFactor,
    pub test: TestFunction,
    pub tolerances: CutoffTolerances,
    log_l_half: C64,
    contours: Contours,
    table: Table,
    /// `log y` beyond which the function is treated as zero.
    u_zero: f64,
}

impl CutoffFunction {
    pub fn new(arch: ArchFactor, test: TestFunction) -> Result<Self> {
        Self::with_tolerances(arch, test, CutoffTolerances::default())
    }

    pub fn with_tolerances(arch: ArchFactor, test: TestFunction, tolerances: CutoffTolerances) -> Result<Self> {
        let log_l_half = arch.log_value(C64::new(0.5, 0.0))?;
        let nearest = arch.rightmost_pole() - 0.5;
        if nearest >= 0.0 {
            return Err(domain_err!("L_∞(s + 1/2) has a pole at Re s = {nearest} >= 0"));
        }
        let sigma_left = (0.5 * nearest).max(-4.0);
        let radius = (-sigma_left).min(0.5);
        let vhat = |s: C64| -> Result<C64> {
            Ok(test.eval(s) * (arch.log_value(s + 0.5)? - log_l_half).exp())
        };
        let tol = tolerances;
        let contours = Contours {
            right: Contour::vertical_line(vhat, 2.0, tol.panel_width, tol.truncation, tol.max_panels)?,
            residue: Contour::circle(vhat, C64::new(0.0, 0.0), radius)?,
            left: Contour::vertical_line(vhat, sigma_left, tol.panel_width, tol.truncation, tol.max_panels)?,
        };
        let u_zero = decay_point(&contours, &tol);
        let table = Table::build(&contours, &tol, u_zero);
        Ok(CutoffFunction { k: test.m - 1, arch, test, tolerances, log_l_half, contours, table, u_zero })
    }

    /// `V̂(s) = G(s) L_∞(s + 1/2)/L_∞(1/2)`.
    pub fn mellin(&self, s: C64) -> Result<C64> {
        Ok(self.test.eval(s) * (self.arch.log_value(s + 0.5)? - self.log_l_half).exp())
    }

    /// `V(y)` from the contour sums, bypassing the table.
    pub fn eval_direct(&self, y: f64) -> Result<f64> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(domain_err!("cutoff argument must be positive, got {y}"));
        }
        Ok(self.contours.eval(y.ln()))
    }

    /// `V(y)`, interpolated from the table inside its range.
    pub fn eval(&self, y: f64) -> f64 {
        let u = y.ln();
        if u > self.u_zero {
            return 0.0;
        }
        match self.table.get(u) {
            Some(v) => v,
            None => self.contours.eval(u),
        }
    }

    /// The `y` beyond which `V(y)` is treated as zero.
    pub fn decay_point(&self) -> f64 {
        self.u_zero.exp()
    }

    /// `lim_{y→0} (V(y) - (-log y)^k)`: 0 for `k = 0` and
    /// `L_∞'/L_∞(1/2)` for `k = 1` (the test function is even).
    pub fn small_y_constant(&self) -> Result<f64> {
        Ok(if self.k == 0 { 0.0 } else { self.arch.log_derivative(C64::new(0.5, 0.0))?.re })
    }

    /// `V_ρ(y) = (1/2πi) ∫_(2) V̂(s) (1 - ρ^{r s}) y^{-s} ds`, which equals
    /// `V(y) - V(y ρ^{-r})`.
    pub fn modified(&self, ratio: f64, r: u32) -> Result<ModifiedCutoff> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(domain_err!("modified cutoff ratio must be positive, got {ratio}"));
        }
        let scale = r as f64 * ratio.ln();
        let contours = self.contours.scaled(|s| 1.0 - (scale * s).exp());
        let u_zero = if ratio < 1.0 { self.u_zero - scale } else { self.u_zero };
        let table = Table::build(&contours, &self.tolerances, u_zero);
        Ok(ModifiedCutoff { ratio, r, contours, table, u_zero })
    }
}

/// The cutoff with the extra factor `1 - ρ^{r s}` in its Mellin transform.
#[derive(Debug, Clone)]
pub struct ModifiedCutoff {
    pub ratio: f64,
    pub r: u32,
    contours: Contours,
    table: Table,
    u_zero: f64,
}

impl ModifiedCutoff {
    pub fn eval_direct(&self, y: f64) -> Result<f64> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(domain_err!("cutoff argument must be positive, got {y}"));
        }
        Ok(self.contours.eval(y.ln()))
    }

    pub fn eval(&self, y: f64) -> f64 {
        let u = y.ln();
        if u > self.u_zero {
            return 0.0;
        }
        match self.table.get(u) {
            Some(v) => v,
            None => self.contours.eval(u),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta_cutoff(m: u32, a: f64) -> CutoffFunction {
        CutoffFunction::new(ArchFactor::from_weights(&[12]).unwrap(), TestFunction::new(m, a).unwrap()).unwrap()
    }

    #[test]
    fn weights_to_shifts() {
        let a = ArchFactor::from_weights(&[12, 12]).unwrap();
        let mut re: Vec<f64> = a.gamma_shifts.iter().map(|m| m.re).collect();
        re.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(re, [-12.0, -12.0, -11.0, -11.0, -1.0, -1.0, 0.0, 0.0]);
        let d = ArchFactor::from_weights(&[12]).unwrap();
        // Γ_C(s + 11/2)² at s = 1/2: log-derivative 2(ψ(6) - log 2π)
        let want = 2.0 * (super::super::digamma_real(6.0).unwrap() - (2.0 * PI).ln());
        assert!((d.log_derivative(C64::new(0.5, 0.0)).unwrap().re - want).abs() < 1e-13);
    }

    #[test]
    fn contours_agree_where_both_apply() {
        let v = delta_cutoff(1, 0.0);
        for y in [0.3f64, 0.7, 1.0, 1.5] {
            let u = y.ln();
            let right = v.contours.right.eval(u);
            let left = v.contours.residue.eval(u) + v.contours.left.eval(u);
            assert!((right - left).abs() < 1e-12, "y = {y}: {right} vs {left}");
        }
    }

    #[test]
    fn table_interpolation_error() {
        for m in [1, 2] {
            let v = delta_cutoff(m, 0.0);
            let mut y = 1.3e-11;
            while y < v.decay_point() {
                let a = v.eval(y);
                let b = v.eval_direct(y).unwrap();
                assert!((a - b).abs() < 1e-8, "m = {m}, y = {y}: {a} vs {b}");
                y *= 1.37;
            }
        }
    }

    #[test]
    fn small_y_limits() {
        let v1 = delta_cutoff(1, 0.0);
        assert!((v1.eval(1e-10) - 1.0).abs() < 1e-4);
        let v2 = delta_cutoff(2, 0.0);
        let c = v2.small_y_constant().unwrap();
        for y in [1e-10f64, 1e-8] {
            assert!((v2.eval(y) - (-y.ln() + c)).abs() < 1e-3, "y = {y}");
        }
    }

    #[test]
    fn modified_is_difference_of_cutoffs() {
        let v = delta_cutoff(2, 0.0);
        for (ratio, r) in [(0.5, 2u32), (1.0 / 3.0, 2), (0.2, 4)] {
            let w = v.modified(ratio, r).unwrap();
            let stretch = ratio.powi(-(r as i32));
            for y in [1e-6, 1e-3, 0.05, 0.4, 1.0, 3.0] {
                let direct = v.eval_direct(y).unwrap() - v.eval_direct(y * stretch).unwrap();
                assert!((w.eval_direct(y).unwrap() - direct).abs() < 1e-10, "ratio {ratio}, y {y}");
                assert!((w.eval(y) - direct).abs() < 1e-8);
            }
        }
        let one = v.modified(1.0, 2).unwrap();
        assert_eq!(one.eval_direct(0.3).unwrap(), 0.0);
    }
}
