//! Units and principal-form representation counts in real quadratic fields.

use crate::arith::{is_fundamental_discriminant, isqrt};
use crate::error::{domain_err, numeric_err};
#[allow(unused_imports)]
use crate::num::Float;
use crate::Result;

/// A solution of `x² - D y² = ±4`, i.e. the unit `(x + y√D)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PellSolution {
    pub x: i128,
    pub y: i128,
    /// `+1` or `-1`: the norm of the unit.
    pub norm: i32,
}

impl PellSolution {
    /// The unit as a real number.
    pub fn value(&self, d: i64) -> f64 {
        (self.x as f64 + self.y as f64 * (d as f64).sqrt()) / 2.0
    }

    /// The square of the unit.
    pub fn square(&self, d: i64) -> Option<PellSolution> {
        let x = self.x.checked_mul(self.x)?.checked_add((d as i128).checked_mul(self.y.checked_mul(self.y)?)?)? / 2;
        let y = self.x.checked_mul(self.y)?;
        Some(PellSolution { x, y, norm: 1 })
    }
}

/// Fundamental solution of `x² - D y² = ±4` for a positive fundamental
/// discriminant, from the continued fraction of `ω = (s + √D)/2`,
/// `s = D mod 2`.
pub fn pell_fundamental(d: i64) -> Result<PellSolution> {
    if d <= 1 || !is_fundamental_discriminant(d) {
        return Err(domain_err!("{d} is not a positive fundamental discriminant"));
    }
    let s = d.rem_euclid(2) as i128;
    let dd = d as i128;
    let r = isqrt(d as u64) as i128;
    // ω = (P + √D)/Q with Q | D - P²
    let (mut p, mut q) = (s, 2i128);
    let (mut h0, mut h1) = (1i128, 0i128);
    let (mut k0, mut k1) = (0i128, 1i128);
    // trace and norm of ω
    let tr = s;
    let nm = (s * s - dd) / 4;
    for _ in 0..10_000 {
        let a = (p + r).div_euclid(q);
        let h = a.checked_mul(h0).and_then(|t| t.checked_add(h1));
        let k = a.checked_mul(k0).and_then(|t| t.checked_add(k1));
        let (Some(h), Some(k)) = (h, k) else {
            return Err(numeric_err!("fundamental unit of Q(√{d}) exceeds 128-bit range"));
        };
        (h1, h0) = (h0, h);
        (k1, k0) = (k0, k);
        // N(h - k ω) = h² - h k tr + k² nm
        let norm = h * h - h * k * tr + k * k * nm;
        if norm == 1 || norm == -1 {
            return Ok(PellSolution { x: 2 * h - k * s, y: k, norm: norm as i32 });
        }
        p = a * q - p;
        q = (dd - p * p) / q;
    }
    Err(numeric_err!("continued fraction of √{d} did not close"))
}

/// Number of principal ideals of norm `n` in the maximal order of a real
/// quadratic field, counted as solutions `(a, b)` of `Q(a, b) = n` for the
/// principal form `Q = a(x + z y)(x + z̄ y)` in the fundamental domain
/// `1 <= (a + z̄ b)/(a + z b) < ε₊²`, divided by `w = 2`. Here `ε₊` generates
/// the totally positive units.
pub fn count_principal_real(d: i64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(domain_err!("n must be positive"));
    }
    let unit = pell_fundamental(d)?;
    let plus = if unit.norm == 1 { unit } else { unit.square(d).ok_or_else(|| numeric_err!("unit overflow"))? };
    let eps = plus.value(d);
    let s = d.rem_euclid(2);
    let sd = (d as f64).sqrt();
    // principal form x² + s x y + (s - D)/4 y², z = (s + √D)/2, z̄ = (s - √D)/2
    let (z, zb) = ((s as f64 + sd) / 2.0, (s as f64 - sd) / 2.0);
    let cc = (s - d) / 4;
    let nf = n as f64;
    // |a + z b| ∈ (√n/ε, √n] and |a + z̄ b| ∈ [√n, ε√n) up to sign
    let bmax = ((nf.sqrt() * (1.0 + eps)) / sd).ceil() as i64 + 1;
    let mut count = 0u64;
    for b in -bmax..=bmax {
        // Q(a, b) = n as a quadratic in a: a² + s b a + (cc b² - n) = 0
        let disc = (s * b) as i128 * (s * b) as i128 - 4 * ((cc as i128) * (b as i128) * (b as i128) - n as i128);
        if disc < 0 {
            continue;
        }
        let r = isqrt(disc as u64) as i128;
        if r * r != disc {
            continue;
        }
        for num in [-(s * b) as i128 + r, -(s * b) as i128 - r] {
            if num % 2 != 0 {
                continue;
            }
            if r == 0 && num != -(s * b) as i128 + r {
                continue;
            }
            let a = (num / 2) as f64;
            // evaluate the conjugate without cancellation, then use α ᾱ = n
            let (alpha, alphab) = (a + z * b as f64, a + zb * b as f64);
            let ratio = if alphab.abs() >= alpha.abs() { alphab * alphab / nf } else { nf / (alpha * alpha) };
            // ratio = n / α² is invariant under ±; the tolerance absorbs rounding at the endpoints
            if ratio >= 1.0 - 1e-9 && ratio < eps * eps * (1.0 - 1e-9) {
                count += 1;
            }
        }
    }
    if count % 2 != 0 {
        return Err(numeric_err!("fundamental domain count for n = {n} is not symmetric under ±1"));
    }
    Ok(count / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn pell_examples() {
        assert_eq!(pell_fundamental(5).unwrap(), PellSolution { x: 1, y: 1, norm: -1 });
        assert_eq!(pell_fundamental(8).unwrap(), PellSolution { x: 2, y: 1, norm: -1 });
        assert_eq!(pell_fundamental(12).unwrap(), PellSolution { x: 4, y: 1, norm: 1 });
        assert_eq!(pell_fundamental(13).unwrap(), PellSolution { x: 3, y: 1, norm: -1 });
        let u = pell_fundamental(94 * 4).unwrap();
        assert_eq!((u.x / 2, u.y), (2143295, 221064));
    }

    #[test]
    fn counts_match_divisor_sums_class_number_one() {
        for d in [5i64, 8, 13, 17, 29, 37, 41] {
            let chi: Vec<i32> = (0..=60).map(|k| crate::arith::kronecker_symbol(d, k)).collect();
            for n in 1..=60u64 {
                let s: i32 = (1..=n).filter(|k| n % k == 0).map(|k| chi[k as usize]).sum();
                assert_eq!(count_principal_real(d, n).unwrap() as i32, s, "D = {d}, n = {n}");
            }
        }
    }
}
