//! Complex gamma machinery, archimedean factors, cutoff functions of the
//! approximate functional equation and Whittaker functions.
//!
//! Every inverse Mellin transform in this module is evaluated as a finite
//! sum `Re Σ_j w_j y^{-s_j}` over precomputed contour nodes: Gauss-Legendre
//! panels on vertical lines and trapezoidal circles around poles. See
//! [`Contour`].

mod cutoff;
mod whittaker;

use alloc::vec::Vec;

pub use cutoff::{ArchFactor, CutoffFunction, CutoffTolerances, ModifiedCutoff, TestFunction};
pub use whittaker::{
    normalized_whittaker, whittaker, whittaker_growth_fit, whittaker_small_y_exponent, ExponentFitResult,
    WhittakerParams,
};

use crate::error::{numeric_err, pole_err};
#[allow(unused_imports)]
use crate::num::Float;
use crate::num::{C64, PI};
use crate::Result;

/// `B_{2k}` for `k = 1..=10`.
pub(crate) const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Radius beyond which the asymptotic series are used directly.
const STIRLING_RADIUS: f64 = 15.0;

fn is_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Principal branch of `log Γ(z)`, continuous off the negative real axis and
/// satisfying `log Γ(z + 1) = log Γ(z) + log z` with principal logarithms.
pub fn log_gamma(z: C64) -> Result<C64> {
    if is_pole(z) {
        return Err(pole_err!("Γ has a pole at {}", z.re));
    }
    let mut w = z;
    let mut shift = C64::new(0.0, 0.0);
    while w.re < 0.5 || w.norm() < STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = C64::new(0.0, 0.0);
    let mut pow = inv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k + 1) as f64;
        series += pow * (b / (n * (n - 1.0)));
        pow *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift)
}

/// `Γ(z)`.
pub fn gamma(z: C64) -> Result<C64> {
    Ok(log_gamma(z)?.exp())
}

/// `Γ(x)` for real `x`, with the correct sign on the negative axis.
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma(C64::new(x, 0.0))?.re)
}

/// `ψ(z) = Γ'(z)/Γ(z)`.
pub fn digamma(z: C64) -> Result<C64> {
    if is_pole(z) {
        return Err(pole_err!("ψ has a pole at {}", z.re));
    }
    let mut w = z;
    let mut shift = C64::new(0.0, 0.0);
    while w.re < 0.5 || w.norm() < STIRLING_RADIUS {
        shift += w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = C64::new(0.0, 0.0);
    let mut pow = inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        series += pow * (b / (2.0 * (k + 1) as f64));
        pow *= inv2;
    }
    Ok(w.ln() - 0.5 * inv - series - shift)
}

/// `ψ(x)` for real `x`.
pub fn digamma_real(x: f64) -> Result<f64> {
    Ok(digamma(C64::new(x, 0.0))?.re)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = p0;
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Points per Gauss-Legendre panel on vertical lines.
const PANEL_POINTS: usize = 20;
/// Points on residue circles.
const CIRCLE_POINTS: usize = 96;

/// A contour integral `(1/2πi) ∫ F(s) y^{-s} ds` frozen as weighted nodes:
/// the value at `y` is `Re Σ_j w_j y^{-s_j}`.
#[derive(Debug, Clone, Default)]
pub struct Contour {
    nodes: Vec<(C64, C64)>,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Appends the nodes of another contour.
    pub fn extend(&mut self, other: Contour) {
        self.nodes.extend(other.nodes);
    }

    /// Multiplies every weight by `g(s_j)`.
    pub fn scaled(&self, g: impl Fn(C64) -> C64) -> Contour {
        Contour { nodes: self.nodes.iter().map(|&(s, w)| (s, w * g(s))).collect() }
    }

    /// Upper bound on `Σ |w_j y^{-s_j}|`, the scale of cancellation.
    pub fn magnitude(&self, log_y: f64) -> f64 {
        self.nodes.iter().map(|&(s, w)| w.norm() * (-s.re * log_y).exp()).sum()
    }

    pub fn eval(&self, log_y: f64) -> f64 {
        let mut acc = 0.0;
        for &(s, w) in &self.nodes {
            let (sin, cos) = (s.im * log_y).sin_cos();
            let m = (-s.re * log_y).exp();
            // Re[w · e^{-σ log y} (cos - i sin)]
            acc += m * (w.re * cos + w.im * sin);
        }
        acc
    }

    /// The vertical line `Re s = σ` for an integrand with
    /// `F(conj s) = conj F(s)`, folded onto `t >= 0`. Panels of width `h`
    /// are added until two consecutive panels fall below
    /// `cutoff · max |F|`.
    pub fn vertical_line(
        f: impl Fn(C64) -> Result<C64>,
        sigma: f64,
        h: f64,
        cutoff: f64,
        max_panels: usize,
    ) -> Result<Contour> {
        let (gx, gw) = gauss_legendre(PANEL_POINTS);
        let mut nodes = Vec::new();
        let mut running_max: f64 = 0.0;
        let mut quiet = 0;
        for panel in 0..max_panels {
            let t0 = panel as f64 * h;
            let mut panel_max: f64 = 0.0;
            for (x, w) in gx.iter().zip(&gw) {
                let t = t0 + 0.5 * h * (x + 1.0);
                let s = C64::new(sigma, t);
                let v = f(s)?;
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(numeric_err!("integrand not finite at s = {s}"));
                }
                panel_max = panel_max.max(v.norm());
                // (1/2πi) ∫ ds = (1/2π) ∫ dt, doubled by the fold.
                nodes.push((s, v * (0.5 * h * w / PI)));
            }
            running_max = running_max.max(panel_max);
            if panel_max < cutoff * running_max {
                quiet += 1;
                if quiet >= 2 {
                    return Ok(Contour { nodes });
                }
            } else {
                quiet = 0;
            }
        }
        Err(numeric_err!(
            "line integral on Re s = {sigma} did not decay below {cutoff:e} of its maximum within t = {}",
            max_panels as f64 * h
        ))
    }

    /// A positively oriented circle; its contribution is the sum of the
    /// residues of `F(s) y^{-s}` inside.
    pub fn circle(f: impl Fn(C64) -> Result<C64>, center: C64, radius: f64) -> Result<Contour> {
        let k = CIRCLE_POINTS;
        let mut nodes = Vec::with_capacity(k);
        for j in 0..k {
            let theta = 2.0 * PI * (j as f64 + 0.5) / k as f64;
            let d = C64::from_polar(radius, theta);
            let s = center + d;
            nodes.push((s, f(s)? * d / k as f64));
        }
        Ok(Contour { nodes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn log_gamma_values() {
        assert!(log_gamma(C64::new(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(log_gamma(C64::new(2.0, 0.0)).unwrap().norm() < 1e-15);
        let half = log_gamma(C64::new(0.5, 0.0)).unwrap();
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14);
        // Γ(5) = 24
        assert!((gamma_real(5.0).unwrap() - 24.0).abs() < 1e-12);
        // Γ(-1/2) = -2√π
        assert!((gamma_real(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(log_gamma(C64::new(-3.0, 0.0)).is_err());
    }

    #[test]
    fn log_gamma_recurrence() {
        for z in [C64::new(3.0, 4.0), C64::new(-7.3, 2.0), C64::new(0.1, -30.0), C64::new(250.0, 700.0)] {
            let lhs = log_gamma(z + 1.0).unwrap();
            let rhs = log_gamma(z).unwrap() + z.ln();
            assert!(close(lhs, rhs, 1e-13), "z = {z}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn reflection_formula() {
        for z in [C64::new(0.3, 0.7), C64::new(2.5, -1.5), C64::new(-3.2, 0.4)] {
            let lhs = gamma(z).unwrap() * gamma(1.0 - z).unwrap();
            let rhs = PI / (z * PI).sin();
            assert!(close(lhs, rhs, 1e-12), "z = {z}");
        }
    }

    #[test]
    fn digamma_values() {
        use crate::num::EULER_GAMMA;
        assert!((digamma_real(1.0).unwrap() + EULER_GAMMA).abs() < 1e-15);
        // ψ(1/2) = -γ - 2 log 2
        assert!((digamma_real(0.5).unwrap() + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-14);
        // ψ(6) = H_5 - γ
        let h5 = 1.0 + 0.5 + 1.0 / 3.0 + 0.25 + 0.2;
        assert!((digamma_real(6.0).unwrap() - (h5 - EULER_GAMMA)).abs() < 1e-14);
        // difference quotient of log Γ at a complex point
        let z = C64::new(1.5, 3.0);
        let h = 1e-5;
        let dq = (log_gamma(z + h).unwrap() - log_gamma(z - h).unwrap()) / (2.0 * h);
        assert!(close(digamma(z).unwrap(), dq, 1e-9));
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(20);
        for deg in 0..40u32 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
            assert!((got - want).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn contour_recovers_exponential() {
        // e^{-y} = (1/2πi) ∫_(1) Γ(s) y^{-s} ds
        let line = Contour::vertical_line(gamma, 1.0, 0.25, 1e-17, 4000).unwrap();
        for y in [0.3f64, 1.0, 2.5] {
            assert!((line.eval(y.ln()) - (-y).exp()).abs() < 1e-13, "y = {y}");
        }
        let residue = Contour::circle(gamma, C64::new(0.0, 0.0), 0.3).unwrap();
        assert!((residue.eval(0.7f64.ln()) - 1.0).abs() < 1e-13);
    }
}
