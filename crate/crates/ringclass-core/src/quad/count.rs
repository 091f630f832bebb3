//! Representation numbers `r_A(n)` and genus theory.

use alloc::vec;
use alloc::vec::Vec;

use super::form::Form;
use super::group::{Character, ClassGroup};
use super::unit_count;
use crate::arith::{gcd, isqrt, kronecker_symbol, prime_divisors};
use crate::error::domain_err;
use crate::Result;

/// Number of solutions of `f(x, y) = n` for `1 <= n <= n_max` (index 0 unused).
pub fn form_representations(f: &Form, n_max: usize) -> Vec<u32> {
    let mut out = vec![0u32; n_max + 1];
    let (a, b) = (f.a as i128, f.b as i128);
    let absd = -(f.disc() as i128);
    let nm = n_max as i128;
    let ymax = isqrt(((4 * a * nm) / absd) as u64) as i128;
    for y in 0..=ymax {
        let rad = 4 * a * nm - absd * y * y;
        if rad < 0 {
            continue;
        }
        let s = isqrt(rad as u64) as i128;
        let lo = (-b * y - s).div_euclid(2 * a) - 1;
        let hi = (-b * y + s).div_euclid(2 * a) + 1;
        let weight = if y == 0 { 1 } else { 2 };
        for x in lo..=hi {
            let v = f.eval(x as i64, y as i64);
            if v >= 1 && v <= nm {
                out[v as usize] += weight;
            }
        }
    }
    out
}

/// `r_A(n)` for every class `A` of a class group and `n <= n_max`: the number
/// of representations of `n` by the reduced form of `A`, divided by `w(Δ)`.
/// This equals the number of invertible ideals of norm `n` in the class.
#[derive(Debug, Clone)]
pub struct RepresentationTable {
    disc: i64,
    h: usize,
    n_max: usize,
    counts: Vec<u32>,
}

impl RepresentationTable {
    pub fn new(group: &ClassGroup, n_max: usize) -> Self {
        let h = group.order();
        let w = unit_count(group.disc());
        let mut counts = vec![0u32; (n_max + 1) * h];
        for (i, f) in group.forms().iter().enumerate() {
            let reps = form_representations(f, n_max);
            for (n, r) in reps.into_iter().enumerate() {
                debug_assert_eq!(r % w, 0);
                counts[n * h + i] = r / w;
            }
        }
        RepresentationTable { disc: group.disc(), h, n_max, counts }
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn classes(&self) -> usize {
        self.h
    }

    /// `r_A(n)`.
    pub fn r(&self, class: usize, n: usize) -> u32 {
        self.counts[n * self.h + class]
    }

    /// Counts of all classes at `n`.
    pub fn row(&self, n: usize) -> &[u32] {
        &self.counts[n * self.h..(n + 1) * self.h]
    }

    /// `Σ_A r_A(n)`.
    pub fn total(&self, n: usize) -> u32 {
        self.row(n).iter().sum()
    }

    /// `C_Ω(n) = Σ_A r_A(n) Ω(A)`, which is real because `r_A = r_{A^{-1}}`.
    pub fn character_sum(&self, chi: &Character, n: usize) -> f64 {
        self.row(n).iter().enumerate().filter(|(_, &r)| r != 0).map(|(a, &r)| r as f64 * chi.cos(a)).sum()
    }

    /// Mean of `r_A(n)` over a set of classes. Over the principal genus this
    /// is the genus average `g(n)`.
    pub fn average_over(&self, classes: &[usize], n: usize) -> f64 {
        let s: u64 = classes.iter().map(|&a| self.r(a, n) as u64).sum();
        s as f64 / classes.len() as f64
    }
}

/// Assigned genus characters of a negative discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenusCharacter {
    /// `(m / p)` for an odd prime `p | Δ`.
    Legendre(u64),
    /// `δ(m) = (-1)^{(m-1)/2}`.
    Delta,
    /// `ε(m) = (-1)^{(m²-1)/8}`.
    Epsilon,
    /// `δ ε`.
    DeltaEpsilon,
}

impl GenusCharacter {
    /// Value at an odd `m` prime to the discriminant.
    pub fn eval(&self, m: i64) -> i32 {
        let delta = if m.rem_euclid(4) == 1 { 1 } else { -1 };
        let eps = if matches!(m.rem_euclid(8), 1 | 7) { 1 } else { -1 };
        match *self {
            GenusCharacter::Legendre(p) => kronecker_symbol(m, p as i64),
            GenusCharacter::Delta => delta,
            GenusCharacter::Epsilon => eps,
            GenusCharacter::DeltaEpsilon => delta * eps,
        }
    }
}

/// The assigned characters: Legendre symbols at odd primes dividing `Δ`, and
/// for `Δ = -4n` the 2-adic characters determined by `n mod 8`.
pub fn genus_characters(disc: i64) -> Result<Vec<GenusCharacter>> {
    if disc >= 0 || disc.rem_euclid(4) > 1 {
        return Err(domain_err!("{disc} is not a negative discriminant"));
    }
    let mut out: Vec<GenusCharacter> = prime_divisors(disc.unsigned_abs())
        .into_iter()
        .filter(|&p| p != 2)
        .map(GenusCharacter::Legendre)
        .collect();
    if disc.rem_euclid(4) == 0 {
        let n = -disc / 4;
        use GenusCharacter::*;
        match n.rem_euclid(8) {
            3 | 7 => {}
            1 | 5 => out.push(Delta),
            2 => out.push(DeltaEpsilon),
            6 => out.push(Epsilon),
            4 => out.push(Delta),
            _ => {
                out.push(Delta);
                out.push(Epsilon);
            }
        }
    }
    Ok(out)
}

/// Values of the assigned characters on the genus of a form, evaluated at a
/// represented integer prime to `2Δ`.
pub fn genus_of(f: &Form, chars: &[GenusCharacter]) -> Vec<i32> {
    let modulus = 2 * f.disc().unsigned_abs();
    for s in 1i64.. {
        for x in -s..=s {
            for y in [-s, s] {
                let v = f.eval(x, y);
                if v > 0 && gcd((v % modulus as i128) as u64, modulus) == 1 {
                    return chars.iter().map(|c| c.eval(v as i64)).collect();
                }
            }
            let v = f.eval(s, x);
            if v > 0 && gcd((v % modulus as i128) as u64, modulus) == 1 {
                return chars.iter().map(|c| c.eval(v as i64)).collect();
            }
        }
    }
    unreachable!("primitive forms represent integers prime to any modulus")
}

/// Classes in the genus of the principal form.
pub fn principal_genus(group: &ClassGroup) -> Result<Vec<usize>> {
    let chars = genus_characters(group.disc())?;
    Ok((0..group.order())
        .filter(|&i| genus_of(&group.form(i), &chars).iter().all(|&v| v == 1))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_two_squares() {
        let g = ClassGroup::new(-4).unwrap();
        let t = RepresentationTable::new(&g, 50);
        // r_2(n)/4 = Σ_{d|n} χ_{-4}(d)
        for n in 1..=50 {
            let s: i32 = (1..=n).filter(|d| n % d == 0).map(|d| kronecker_symbol(-4, d as i64)).sum();
            assert_eq!(t.total(n) as i32, s, "n = {n}");
        }
    }

    #[test]
    fn coprime_counts_match_the_maximal_order() {
        for d in [-3i64, -4, -7, -20, -23, -47] {
            let top = RepresentationTable::new(&ClassGroup::new(d).unwrap(), 2000);
            for c in 2..=8u64 {
                let t = RepresentationTable::new(&ClassGroup::new(d * (c * c) as i64).unwrap(), 2000);
                for n in (1..=2000).filter(|&n| crate::arith::gcd(n as u64, c) == 1) {
                    assert_eq!(t.total(n), top.total(n), "D = {d}, c = {c}, n = {n}");
                }
            }
        }
    }

    #[test]
    fn principal_class_of_the_order_is_smaller() {
        // (2 + i) is principal in Z[i] but x² + 9y² = 5 has no solution.
        let top = RepresentationTable::new(&ClassGroup::new(-4).unwrap(), 10);
        let t = RepresentationTable::new(&ClassGroup::new(-36).unwrap(), 10);
        assert_eq!(top.r(0, 5), 2);
        assert_eq!(t.r(0, 5), 0);
        assert_eq!(t.total(5), 2);
    }

    #[test]
    fn genus_examples() {
        let g = ClassGroup::new(-20).unwrap();
        assert_eq!(principal_genus(&g).unwrap(), vec![0]);
        let g = ClassGroup::new(-23).unwrap();
        assert_eq!(principal_genus(&g).unwrap().len(), 3);
    }
}
