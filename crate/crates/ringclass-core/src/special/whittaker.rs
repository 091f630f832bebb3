//! Whittaker functions from the Mellin-Barnes integral
//! `e^{-y/2} W_{p,ν}(y) = (1/2πi) ∫ Γ(1/2 + s + ν) Γ(1/2 + s - ν) / Γ(1 + s - p) y^{-s} ds`.
//!
//! For small `y` the contour is moved left across the poles at
//! `s = -1/2 ± ν - j`, whose residues are taken on small circles around
//! clusters of nearby poles; the remaining line integral is then of size
//! `y^{|σ|}`. Otherwise the line sits near the saddle point `Re s ≈ y`.

use alloc::vec::Vec;

use super::{log_gamma, Contour};
use crate::error::{domain_err, pole_err};
#[allow(unused_imports)]
use crate::num::Float;
use crate::num::{C64, PI};
use crate::Result;

/// Parameters of `W_{p,ν}`, or with `normalized` set, of the normalized
/// function with `p = q/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerParams {
    pub p: f64,
    pub nu: C64,
    pub normalized: bool,
}

const PARAM_LIMIT: f64 = 50.0;
const Y_MIN: f64 = 1e-6;
const Y_MAX: f64 = 50.0;
/// Below this `y` the contour is shifted left.
const LEFT_SHIFT_BELOW: f64 = 0.1;

fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && (z.re - z.re.round()).abs() < 1e-12
}

fn check_params(p: f64, nu: C64) -> Result<()> {
    if nu.re != 0.0 && nu.im != 0.0 {
        return Err(domain_err!("ν must be real or purely imaginary, got {nu}"));
    }
    if p.abs() > PARAM_LIMIT || nu.norm() > PARAM_LIMIT {
        return Err(domain_err!("|p|, |ν| must be at most {PARAM_LIMIT}"));
    }
    Ok(())
}

/// `F(s) y^{-s}` with `F` the Mellin transform of `e^{-y/2} W_{p,ν}(y)`.
fn integrand(p: f64, nu: C64, log_y: f64) -> impl Fn(C64) -> Result<C64> {
    move |s: C64| {
        let d = 1.0 + s - p;
        if is_nonpositive_integer(d) {
            return Ok(C64::new(0.0, 0.0));
        }
        let l = log_gamma(0.5 + s + nu)? + log_gamma(0.5 + s - nu)? - log_gamma(d)? - s * log_y;
        Ok(l.exp())
    }
}

/// Poles `-1/2 ± ν - j` with real part above `sigma`.
fn poles_right_of(nu: C64, sigma: f64) -> Vec<C64> {
    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        let mut j = 0.0;
        loop {
            let s = -0.5 + sign * nu - j;
            if s.re <= sigma {
                break;
            }
            out.push(s);
            j += 1.0;
        }
    }
    out
}

/// Residue circles around clusters of poles, each cluster separated from
/// every other pole.
fn residue_circles(poles: &[C64], all: &[C64], f: &impl Fn(C64) -> Result<C64>) -> Result<Contour> {
    let mut cluster_of: Vec<usize> = (0..poles.len()).collect();
    fn root(c: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while c[i] != i {
            c[i] = c[c[i]];
            i = c[i];
        }
        i
    }
    for i in 0..poles.len() {
        for j in 0..i {
            if (poles[i] - poles[j]).norm() < 0.45 {
                let (a, b) = (root(&mut cluster_of, i), root(&mut cluster_of, j));
                cluster_of[a] = b;
            }
        }
    }
    let mut contour = Contour::default();
    for i in 0..poles.len() {
        if root(&mut cluster_of, i) != i {
            continue;
        }
        let members: Vec<C64> =
            (0..poles.len()).filter(|&j| root(&mut cluster_of, j) == i).map(|j| poles[j]).collect();
        let center = members.iter().sum::<C64>() / members.len() as f64;
        let spread = members.iter().map(|m| (m - center).norm()).fold(0.0, f64::max);
        let gap = all
            .iter()
            .filter(|q| !members.iter().any(|m| (*m - **q).norm() < 1e-9))
            .map(|q| (q - center).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = spread + (0.5 * (gap - spread)).min(0.2);
        contour.extend(Contour::circle(f, center, radius)?);
    }
    Ok(contour)
}

/// `e^{-y/2} W_{p,ν}(y)`.
fn damped_whittaker(p: f64, nu: C64, y: f64) -> Result<f64> {
    let log_y = y.ln();
    let f = integrand(p, nu, log_y);
    let a = nu.re.abs();
    if y < LEFT_SHIFT_BELOW {
        let columns = ((17.0 / -y.log10()).ceil() as usize + 1).clamp(2, 60) as f64;
        // a line between poles, as far as possible from both families
        let base = -a - columns;
        let far = |sigma: f64| {
            poles_right_of(nu, sigma - 3.0)
                .iter()
                .map(|s| (s.re - sigma).abs())
                .fold(f64::INFINITY, f64::min)
        };
        let sigma = [0.0, 0.1, -0.1, 0.2, -0.2, 0.3, -0.3, 0.4, -0.4]
            .iter()
            .map(|d| base + d)
            .max_by(|x, y| far(*x).partial_cmp(&far(*y)).unwrap())
            .unwrap();
        let inside = poles_right_of(nu, sigma);
        let neighbours = poles_right_of(nu, sigma - 2.0);
        let mut contour = residue_circles(&inside, &neighbours, &f)?;
        contour.extend(Contour::vertical_line(&f, sigma, 0.25, 1e-17, 20_000)?);
        Ok(contour.eval(0.0))
    } else {
        let sigma = y.max(a - 0.5 + 0.5).max(0.5);
        Ok(Contour::vertical_line(&f, sigma, 0.25, 1e-17, 20_000)?.eval(0.0))
    }
}

/// `W_{p,ν}(y)` for real `p`, real or imaginary `ν`, `10^{-6} <= y <= 50`.
pub fn whittaker(p: f64, nu: C64, y: f64) -> Result<f64> {
    check_params(p, nu)?;
    if !(Y_MIN..=Y_MAX).contains(&y) {
        return Err(domain_err!("Whittaker argument {y} outside [{Y_MIN}, {Y_MAX}]"));
    }
    Ok((0.5 * y).exp() * damped_whittaker(p, nu, y)?)
}

/// The normalized function
/// `i^{±q/2} W_{±q/2,ν}(4π|y|) / sqrt(Γ(1/2 - ν ± q/2) Γ(1/2 + ν ± q/2))`,
/// with the sign of `y`, set to zero when a gamma argument is a
/// nonpositive integer.
pub fn normalized_whittaker(q: i32, nu: C64, y: f64) -> Result<C64> {
    if y == 0.0 {
        return Err(domain_err!("normalized Whittaker function needs y != 0"));
    }
    let real = nu.im == 0.0;
    let imaginary = nu.re == 0.0;
    let allowed = if q.rem_euclid(2) == 0 {
        imaginary || (real && (nu.re.abs() < 0.5 || (nu.re - 0.5).fract() == 0.0))
    } else {
        imaginary || (real && nu.re.fract() == 0.0)
    };
    if !allowed {
        return Err(domain_err!("ν = {nu} is outside the admissible set for q = {q}"));
    }
    let p = y.signum() * q as f64 / 2.0;
    let g1 = 0.5 - nu + p;
    let g2 = 0.5 + nu + p;
    if is_nonpositive_integer(g1) || is_nonpositive_integer(g2) {
        return Ok(C64::new(0.0, 0.0));
    }
    let prod = (log_gamma(g1)? + log_gamma(g2)?).exp();
    if prod.re <= 0.0 || prod.im.abs() > 1e-10 * prod.re.abs() {
        return Err(domain_err!("Γ(1/2 ± ν + p) product {prod} is not positive"));
    }
    let w = whittaker(p, nu, 4.0 * PI * y.abs())?;
    Ok(C64::from_polar(1.0, 0.5 * PI * p) * (w / prod.re.sqrt()))
}

impl WhittakerParams {
    pub fn eval(&self, y: f64) -> Result<C64> {
        if self.normalized {
            let q = (2.0 * self.p).round();
            if (q - 2.0 * self.p).abs() > 1e-12 {
                return Err(domain_err!("normalized functions need p = q/2 with q an integer"));
            }
            normalized_whittaker(q as i32, self.nu, y)
        } else {
            Ok(C64::new(whittaker(self.p, self.nu, y)?, 0.0))
        }
    }
}

/// A least-squares slope of `log |f|` against `log y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFitResult {
    pub exponent: f64,
    /// Root mean square residual of the fit.
    pub residual: f64,
    /// Points used in the fit.
    pub points: usize,
    /// Whether the fit was taken over local maxima of an oscillating
    /// function rather than over every sample.
    pub envelope: bool,
}

pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Exponent `e` in `|W̃_{q/2,ν}(y)| ≈ C y^e` on `[y_lo, y_hi]`. For
/// `ν = iβ`, the function oscillates like `cos(β log y + φ)`, and the fit
/// runs over the maxima of `|W̃|` in windows of one half-period `π/|β|`
/// in `log y`.
pub fn whittaker_small_y_exponent(q: i32, nu: C64, y_lo: f64, y_hi: f64, samples: usize) -> Result<ExponentFitResult> {
    if !(y_lo > 0.0 && y_hi > y_lo) || samples < 8 {
        return Err(domain_err!("degenerate fit range [{y_lo}, {y_hi}] with {samples} samples"));
    }
    let (u_lo, u_hi) = (y_lo.ln(), y_hi.ln());
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    for i in 0..samples {
        let u = u_lo + (u_hi - u_lo) * i as f64 / (samples - 1) as f64;
        let v = normalized_whittaker(q, nu, u.exp())?.norm();
        if v == 0.0 {
            return Err(pole_err!("normalized Whittaker function vanishes identically here"));
        }
        xs.push(u);
        ys.push(v.ln());
    }
    let beta = nu.im.abs();
    let window = if beta > 0.0 { PI / beta } else { f64::INFINITY };
    if window * 4.0 <= u_hi - u_lo {
        let mut ex = Vec::new();
        let mut ey = Vec::new();
        let mut start = u_lo;
        while start + window <= u_hi + 1e-12 {
            let best = xs
                .iter()
                .zip(&ys)
                .filter(|(x, _)| **x >= start && **x < start + window)
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap());
            if let Some((x, y)) = best {
                ex.push(*x);
                ey.push(*y);
            }
            start += window;
        }
        let (slope, _, res) = least_squares(&ex, &ey);
        return Ok(ExponentFitResult { exponent: slope, residual: res, points: ex.len(), envelope: true });
    }
    let (slope, _, res) = least_squares(&xs, &ys);
    Ok(ExponentFitResult { exponent: slope, residual: res, points: xs.len(), envelope: false })
}

/// The smallest `A >= 0` with `|W̃_{q/2,ν}(y)| <= C (1 + |q| + |ν|)^A` over
/// the given spectral parameters at fixed `y`, where `C` is the larger of
/// `y^{1/2}` and the value at the first parameter.
pub fn whittaker_growth_fit(q: i32, nus: &[C64], y: f64) -> Result<f64> {
    let Some(&first) = nus.first() else {
        return Err(domain_err!("growth fit needs at least one spectral parameter"));
    };
    let reference = normalized_whittaker(q, first, y)?.norm().max(y.sqrt());
    let mut a: f64 = 0.0;
    for &nu in &nus[1..] {
        let base = (1.0 + q.unsigned_abs() as f64 + nu.norm()).ln();
        let excess = (normalized_whittaker(q, nu, y)?.norm() / reference).ln();
        if excess > 0.0 && base > 0.0 {
            a = a.max(excess / base);
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `W_{0,ν}(y) = sqrt(y/π) K_ν(y/2)` with
    /// `K_ν(x) = ∫_0^∞ e^{-x cosh t} cosh(ν t) dt` by the trapezoid rule.
    fn bessel_oracle(nu: f64, y: f64) -> f64 {
        let x = y / 2.0;
        let h = 0.005;
        let mut s = 0.5 * (-x).exp();
        let mut t = h;
        loop {
            let term = (-x * t.cosh()).exp() * (nu * t).cosh();
            s += term;
            if term < 1e-300 || t > 60.0 {
                break;
            }
            t += h;
        }
        (y / PI).sqrt() * s * h
    }

    #[test]
    fn elementary_case() {
        // W_{0,1/2}(y) = e^{-y/2}
        for y in [1e-4, 0.05, 1.0, 7.5, 30.0] {
            let w = whittaker(0.0, C64::new(0.5, 0.0), y).unwrap();
            assert!((w / (-0.5 * y).exp() - 1.0).abs() < 1e-10, "y = {y}: {w}");
        }
        // W_{1/2,0}(y) = y^{1/2} e^{-y/2}
        for y in [1e-5, 0.3, 4.0] {
            let w = whittaker(0.5, C64::new(0.0, 0.0), y).unwrap();
            assert!((w / (y.sqrt() * (-0.5 * y).exp()) - 1.0).abs() < 1e-10, "y = {y}");
        }
    }

    #[test]
    fn bessel_identity() {
        for nu in [0.0, 0.25, 1.3] {
            for y in [1e-3, 0.08, 0.2, 2.0, 12.0] {
                let w = whittaker(0.0, C64::new(nu, 0.0), y).unwrap();
                let k = bessel_oracle(nu, y);
                assert!((w / k - 1.0).abs() < 1e-9, "ν = {nu}, y = {y}: {w} vs {k}");
            }
        }
    }

    #[test]
    fn normalized_zero_convention() {
        // q = -2, ν = 1/2: the argument 1/2 - ν + p is -1
        let z = normalized_whittaker(-2, C64::new(0.5, 0.0), 0.1).unwrap();
        assert_eq!(z, C64::new(0.0, 0.0));
        assert!(normalized_whittaker(0, C64::new(0.7, 0.0), 0.1).is_err());
    }
}
