//! Orders in imaginary quadratic fields, ring class groups and counting
//! functions; principal-form counts in real quadratic fields.

mod count;
mod form;
mod group;
mod real;

use alloc::vec::Vec;

pub use count::{form_representations, genus_characters, principal_genus, GenusCharacter, RepresentationTable};
pub use form::{reduced_forms, Form};
pub use group::{class_map, Character, ClassGroup};
pub use real::{count_principal_real, pell_fundamental, PellSolution};

use crate::arith::{divisors, factorize, is_fundamental_discriminant, kronecker_symbol};
use crate::error::domain_err;
use crate::Result;

/// The order `O_c = Z + c O_K` of conductor `c` in `K = Q(√D_K)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadOrder {
    pub d_k: i64,
    pub c: u64,
}

impl QuadOrder {
    pub fn new(d_k: i64, c: u64) -> Result<Self> {
        if !is_fundamental_discriminant(d_k) {
            return Err(domain_err!("{d_k} is not a fundamental discriminant"));
        }
        if c == 0 {
            return Err(domain_err!("conductor must be positive"));
        }
        let disc = d_k as i128 * (c as i128) * (c as i128);
        if disc.unsigned_abs() > (i64::MAX as u128) / 16 {
            return Err(domain_err!("discriminant {d_k}·{c}² too large"));
        }
        Ok(QuadOrder { d_k, c })
    }

    pub fn maximal(d_k: i64) -> Result<Self> {
        Self::new(d_k, 1)
    }

    pub fn disc(&self) -> i64 {
        self.d_k * (self.c * self.c) as i64
    }

    pub fn is_imaginary(&self) -> bool {
        self.d_k < 0
    }

    /// Number of roots of unity in the order.
    pub fn units(&self) -> u32 {
        unit_count(self.disc())
    }

    /// `η(n) = (D_K / n)`.
    pub fn eta(&self, n: i64) -> i32 {
        kronecker_symbol(self.d_k, n)
    }
}

/// `w(Δ)`: 6 for `Δ = -3`, 4 for `Δ = -4`, else 2.
pub fn unit_count(disc: i64) -> u32 {
    match disc {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// Dedekind's formula
/// `h(O_c) = h_K c / [O_K^× : O_c^×] · ∏_{p | c} (1 - η(p)/p)`, evaluated in
/// integers.
pub fn dedekind_class_number(d_k: i64, c: u64, h_k: u64) -> Result<u64> {
    let order = QuadOrder::new(d_k, c)?;
    let mut num: u64 = h_k;
    for (p, e) in factorize(c)? {
        let eta = kronecker_symbol(d_k, p as i64) as i64;
        num *= p.pow(e - 1) * (p as i64 - eta) as u64;
    }
    let index = (unit_count(d_k) / order.units()) as u64;
    if num % index != 0 {
        return Err(crate::error::numeric_err!("unit index does not divide class number numerator"));
    }
    Ok(num / index)
}

/// Class groups of every order `O_e`, `e | c`, with the projections from the
/// top group `Pic(O_c)`.
#[derive(Debug, Clone)]
pub struct OrderTower {
    pub order: QuadOrder,
    /// Divisors of `c` in increasing order.
    pub divisors: Vec<u64>,
    groups: Vec<ClassGroup>,
    maps: Vec<Vec<usize>>,
}

impl OrderTower {
    pub fn new(order: QuadOrder) -> Result<Self> {
        if !order.is_imaginary() {
            return Err(domain_err!("ring class groups are implemented for imaginary fields only"));
        }
        let divisors = divisors(order.c)?;
        let groups = divisors
            .iter()
            .map(|&e| ClassGroup::new(order.d_k * (e * e) as i64))
            .collect::<Result<Vec<_>>>()?;
        let top = groups.last().expect("c has divisors");
        let maps = divisors
            .iter()
            .zip(&groups)
            .map(|(&e, g)| class_map(top, g, order.c / e))
            .collect::<Result<Vec<_>>>()?;
        Ok(OrderTower { order, divisors, groups, maps })
    }

    pub fn top(&self) -> &ClassGroup {
        self.groups.last().unwrap()
    }

    fn pos(&self, e: u64) -> Result<usize> {
        self.divisors
            .iter()
            .position(|&d| d == e)
            .ok_or_else(|| domain_err!("{e} does not divide {}", self.order.c))
    }

    pub fn group(&self, e: u64) -> Result<&ClassGroup> {
        Ok(&self.groups[self.pos(e)?])
    }

    /// Projection `Pic(O_c) -> Pic(O_e)` as a table of class indices.
    pub fn map_to(&self, e: u64) -> Result<&[usize]> {
        Ok(&self.maps[self.pos(e)?])
    }

    /// Classes of `Pic(O_c)` with trivial image in `Pic(O_e)`.
    pub fn kernel(&self, e: u64) -> Result<Vec<usize>> {
        Ok(self.map_to(e)?.iter().enumerate().filter(|(_, &t)| t == 0).map(|(i, _)| i).collect())
    }

    /// The smallest `e | c` such that the character factors through
    /// `Pic(O_e)`.
    pub fn conductor(&self, chi: &Character) -> u64 {
        for &e in &self.divisors {
            let kernel = self.kernel(e).expect("divisor");
            if kernel.iter().all(|&i| chi.values[i] == 0) {
                return e;
            }
        }
        self.order.c
    }

    /// The character of `Pic(O_e)` whose pullback to `Pic(O_c)` is `chi`,
    /// for `e` a multiple of the conductor of `chi`.
    pub fn descend(&self, chi: &Character, e: u64) -> Result<Character> {
        let map = self.map_to(e)?;
        let m = chi.modulus as u128;
        self.group(e)?
            .characters()
            .into_iter()
            .find(|psi| {
                let n = psi.modulus as u128;
                map.iter().zip(&chi.values).all(|(&b, &v)| psi.values[b] as u128 * m == v as u128 * n)
            })
            .ok_or_else(|| domain_err!("character does not factor through Pic(O_{e})"))
    }

    /// All characters of `Pic(O_c)` together with their conductors.
    pub fn characters(&self) -> Vec<RingClassCharacter> {
        self.top()
            .characters()
            .into_iter()
            .enumerate()
            .map(|(index, chi)| RingClassCharacter { conductor: self.conductor(&chi), index, chi })
            .collect()
    }

    /// `h(O_e)` for each divisor, in the order of [`OrderTower::divisors`].
    pub fn class_numbers(&self) -> Vec<u64> {
        self.groups.iter().map(|g| g.order() as u64).collect()
    }
}

/// A character of `Pic(O_c)` and the conductor of the order it is primitive
/// on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingClassCharacter {
    pub index: usize,
    pub chi: Character,
    pub conductor: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedekind_examples() {
        assert_eq!(dedekind_class_number(-4, 1, 1).unwrap(), 1);
        // Z[5i]: h = 1·5/2·(1 - 1/5) = 2
        assert_eq!(dedekind_class_number(-4, 5, 1).unwrap(), 2);
        // Z[3√-3]... conductor 3 in Q(√-3): 1·3/3·(1 - 0) = 1
        assert_eq!(dedekind_class_number(-3, 3, 1).unwrap(), 1);
        assert_eq!(dedekind_class_number(-23, 5, 3).unwrap(), 18);
    }

    #[test]
    fn conductors_partition() {
        let tower = OrderTower::new(QuadOrder::new(-4, 6).unwrap()).unwrap();
        let chars = tower.characters();
        for (e, h) in tower.divisors.iter().zip(tower.class_numbers()) {
            let through_e = chars.iter().filter(|x| e % x.conductor == 0).count();
            assert_eq!(through_e as u64, h, "characters factoring through O_{e}");
        }
    }
}
