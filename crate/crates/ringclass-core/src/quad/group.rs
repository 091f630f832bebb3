//! Form class groups as abstract finite abelian groups, and their characters.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::form::{reduced_forms, Form};
use crate::arith::mod_inverse;
use crate::error::domain_err;
use crate::Result;

/// The form class group of a negative discriminant, with an explicit
/// decomposition `⊕ Z/d_j` (`d_1 | d_2 | ...`, all `d_j > 1`).
#[derive(Debug, Clone)]
pub struct ClassGroup {
    disc: i64,
    forms: Vec<Form>,
    index: BTreeMap<Form, usize>,
    invariants: Vec<u64>,
    generators: Vec<usize>,
    dlog: Vec<Vec<u64>>,
}

impl ClassGroup {
    pub fn new(disc: i64) -> Result<Self> {
        let forms = reduced_forms(disc)?;
        let index = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut g = ClassGroup {
            disc,
            forms,
            index,
            invariants: Vec::new(),
            generators: Vec::new(),
            dlog: Vec::new(),
        };
        g.compute_structure()?;
        Ok(g)
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn order(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn form(&self, i: usize) -> Form {
        self.forms[i]
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Coordinates of class `i` in the invariant decomposition.
    pub fn dlog(&self, i: usize) -> &[u64] {
        &self.dlog[i]
    }

    /// Exponent of the group (largest invariant, 1 for the trivial group).
    pub fn exponent(&self) -> u64 {
        self.invariants.last().copied().unwrap_or(1)
    }

    /// Index of the class of an arbitrary form of this discriminant.
    pub fn class_of(&self, f: &Form) -> Result<usize> {
        if f.disc() != self.disc {
            return Err(domain_err!("form {f} has discriminant {}, expected {}", f.disc(), self.disc));
        }
        self.index
            .get(&f.reduced())
            .copied()
            .ok_or_else(|| domain_err!("form {f} is not primitive"))
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.index[&self.forms[i].compose(&self.forms[j])]
    }

    pub fn inv(&self, i: usize) -> usize {
        self.index[&self.forms[i].inverse()]
    }

    pub fn pow(&self, i: usize, mut e: u64) -> usize {
        let mut acc = 0usize;
        let mut base = i;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Builds a triangular relation matrix from greedily chosen generators,
    /// then diagonalizes it.
    fn compute_structure(&mut self) -> Result<()> {
        let h = self.order();
        // coordinates of subgroup elements in the greedy generators
        let mut coords: Vec<Option<Vec<i64>>> = vec![None; h];
        coords[0] = Some(Vec::new());
        let mut members = vec![0usize];
        let mut gens: Vec<usize> = Vec::new();
        let mut relations: Vec<Vec<i64>> = Vec::new();
        for g in 0..h {
            if coords[g].is_some() {
                continue;
            }
            let k = gens.len();
            // smallest e with g^e in the current subgroup
            let mut e = 1i64;
            let mut x = g;
            while coords[x].is_none() {
                x = self.mul(x, g);
                e += 1;
            }
            let mut rel: Vec<i64> = coords[x].clone().unwrap().iter().map(|v| -v).collect();
            rel.resize(k, 0);
            rel.push(e);
            for r in relations.iter_mut() {
                r.push(0);
            }
            relations.push(rel);
            for c in coords.iter_mut().flatten() {
                c.resize(k + 1, 0);
            }
            let old = members.clone();
            let mut gj = 0usize;
            for j in 1..e {
                gj = self.mul(gj, g);
                for &m in &old {
                    let y = self.mul(m, gj);
                    let mut cy = coords[m].clone().unwrap();
                    cy[k] = j;
                    coords[y] = Some(cy);
                    members.push(y);
                }
            }
            gens.push(g);
        }
        if members.len() != h {
            return Err(crate::error::numeric_err!("class group enumeration inconsistent"));
        }
        let k = gens.len();
        let (diag, v) = smith_diagonal(relations);
        let keep: Vec<usize> = (0..k).filter(|&j| diag[j] > 1).collect();
        self.invariants = keep.iter().map(|&j| diag[j] as u64).collect();
        self.dlog = (0..h)
            .map(|i| {
                let x = coords[i].as_ref().unwrap();
                keep.iter()
                    .map(|&j| {
                        let s: i128 = (0..k).map(|t| x[t] as i128 * v[t][j] as i128).sum();
                        s.rem_euclid(diag[j] as i128) as u64
                    })
                    .collect()
            })
            .collect();
        self.generators = (0..self.invariants.len())
            .map(|j| {
                (0..h)
                    .find(|&i| self.dlog[i].iter().enumerate().all(|(t, &x)| x == u64::from(t == j)))
                    .expect("unit vector present")
            })
            .collect();
        Ok(())
    }

    /// All characters of the group, trivial character first.
    pub fn characters(&self) -> Vec<Character> {
        let mut out = vec![Vec::<u64>::new()];
        for &d in &self.invariants {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..d).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(|exps| Character::new(self, exps)).collect()
    }
}

/// Diagonal of the Smith normal form of a square integer matrix together with
/// the unimodular column transform `V` (so `U R V = diag`).
fn smith_diagonal(mut a: Vec<Vec<i64>>) -> (Vec<i64>, Vec<Vec<i64>>) {
    let n = a.len();
    let mut v: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for t in 0..n {
        loop {
            // pivot: smallest nonzero entry in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for j in t..n {
                        a[i][j] -= q * a[t][j];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    for i in t..n {
                        a[i][j] -= q * a[i][t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let bad = (t + 1..n).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
            match bad {
                Some((i, _)) => {
                    for j in t..n {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for i in t..n {
                a[i][t] = -a[i][t];
            }
            for row in v.iter_mut() {
                row[t] = -row[t];
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// A character of a class group, stored as exponents of a primitive root of
/// unity of order `exponent` on each class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    /// Coordinates `χ_j ∈ Z/d_j` in the dual basis.
    pub exps: Vec<u64>,
    /// Value on class `A` is `exp(2πi values[A] / modulus)`.
    pub values: Vec<u64>,
    pub modulus: u64,
}

impl Character {
    pub fn new(g: &ClassGroup, exps: Vec<u64>) -> Self {
        let e = g.exponent();
        let values = (0..g.order())
            .map(|i| {
                let s: u128 = g.dlog(i)
                    .iter()
                    .zip(&exps)
                    .zip(g.invariants())
                    .map(|((&x, &chi), &d)| x as u128 * chi as u128 * (e / d) as u128)
                    .sum();
                (s % e as u128) as u64
            })
            .collect();
        Character { exps, values, modulus: e }
    }

    pub fn trivial(g: &ClassGroup) -> Self {
        Character::new(g, vec![0; g.invariants().len()])
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Order of the character as an element of the dual group.
    pub fn order(&self) -> u64 {
        let g = self.values.iter().fold(self.modulus, |acc, &v| crate::arith::gcd(acc, v));
        self.modulus / g
    }

    /// `Re Ω(A) = cos(2π v / m)`.
    pub fn cos(&self, class: usize) -> f64 {
        use crate::num::Float;
        let t = 2.0 * crate::num::PI * self.values[class] as f64 / self.modulus as f64;
        Float::cos(t)
    }

    /// The pointwise product `χ · ψ^{-1}` on the same group.
    pub fn div(&self, other: &Character) -> Character {
        let m = self.modulus;
        Character {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| (a + m - b % m) % m).collect(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| (a + m - b) % m).collect(),
            modulus: m,
        }
    }

    /// Exact test of `Σ_A χ(A) = h·[χ trivial]`: the values of a character of
    /// order `o` are equidistributed over the `o`-th roots of unity.
    pub fn sum_is_exact(&self) -> (bool, i64) {
        let h = self.values.len() as u64;
        let o = self.order();
        let step = self.modulus / o;
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for &v in &self.values {
            *counts.entry(v).or_default() += 1;
        }
        let uniform = counts.len() as u64 == o
            && counts.iter().all(|(&v, &n)| v % step == 0 && n == h / o);
        (uniform, if o == 1 { h as i64 } else { 0 })
    }
}

/// Image of each class of discriminant `d f²` in the class group of
/// discriminant `d`, via extension of ideals prime to `f`.
pub fn class_map(from: &ClassGroup, to: &ClassGroup, f: u64) -> Result<Vec<usize>> {
    if from.disc() as i128 != to.disc() as i128 * (f as i128) * (f as i128) {
        return Err(domain_err!("discriminants {} and {} do not differ by {f}²", from.disc(), to.disc()));
    }
    let d_to = to.disc() as i128;
    from.forms()
        .iter()
        .map(|form| {
            let g = form.with_leading_coprime_to(f);
            let (a, b) = (g.a as i128, g.b as i128);
            // b' f ≡ b (mod 2a) when f is odd; otherwise b' ≡ b/f (mod a), b' ≡ d (mod 2)
            let bp = if f % 2 == 1 {
                let inv = mod_inverse(f as i128, 2 * a).expect("f prime to 2a");
                (b * inv).rem_euclid(2 * a)
            } else {
                let inv = mod_inverse(f as i128, a).expect("f prime to a");
                let r = (b * inv).rem_euclid(a);
                if (r - d_to).rem_euclid(2) == 0 { r } else { r + a }
            };
            let cp = (bp * bp - d_to) / (4 * a);
            debug_assert_eq!((bp * bp - d_to) % (4 * a), 0);
            to.class_of(&Form::new(a as i64, bp as i64, cp as i64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_examples() {
        assert_eq!(ClassGroup::new(-23).unwrap().invariants(), &[3]);
        assert_eq!(ClassGroup::new(-84).unwrap().invariants(), &[2, 2]);
        assert_eq!(ClassGroup::new(-4).unwrap().invariants(), &[] as &[u64]);
        // h(-3299) = 27 with structure Z/3 x Z/9
        assert_eq!(ClassGroup::new(-3299).unwrap().invariants(), &[3, 9]);
        // h(-4·5·5·... ) sanity: -4·1365 has 2-rank 4
        assert_eq!(ClassGroup::new(-5460).unwrap().invariants(), &[2, 2, 2, 2]);
    }

    #[test]
    fn dlog_is_homomorphism() {
        let g = ClassGroup::new(-3299).unwrap();
        for i in 0..g.order() {
            for j in 0..g.order() {
                let k = g.mul(i, j);
                for t in 0..g.invariants().len() {
                    let d = g.invariants()[t];
                    assert_eq!((g.dlog(i)[t] + g.dlog(j)[t]) % d, g.dlog(k)[t]);
                }
            }
        }
    }

    #[test]
    fn class_map_is_homomorphism() {
        let big = ClassGroup::new(-23 * 25).unwrap();
        let small = ClassGroup::new(-23).unwrap();
        let m = class_map(&big, &small, 5).unwrap();
        for i in 0..big.order() {
            for j in 0..big.order() {
                assert_eq!(m[big.mul(i, j)], small.mul(m[i], m[j]));
            }
        }
        let counts = (0..small.order()).map(|t| m.iter().filter(|&&x| x == t).count());
        for c in counts {
            assert_eq!(c, big.order() / small.order());
        }
    }
}
