//! Hecke eigenvalue systems of holomorphic newforms and coefficients of
//! their tensor products.
//!
//! Eigenvalues are unitarily normalized: `λ(p) = a_p / p^{(k-1)/2}`, so the
//! Ramanujan bound reads `|λ(p)| <= 2` at good primes.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{factorize, gcd, is_prime, prime_divisors, Sieve};
use crate::error::{coverage_err, domain_err, numeric_err};
#[allow(unused_imports)]
use crate::num::Float;
use crate::Result;

/// Slack allowed on the Ramanujan bound when validating supplied tables.
pub const RAMANUJAN_TOL: f64 = 1e-9;

/// Eigenvalues `λ(p)` of a newform at every prime `p <= p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenform {
    pub label: String,
    pub weight: u32,
    pub level: u64,
    /// Root number of the form itself.
    pub sign: i32,
    p_max: u64,
    /// `λ(p)` stored at index `p`; zero at non-primes.
    lambda: Vec<f64>,
}

impl Eigenform {
    /// Builds a system from `(p, λ(p))` pairs covering every prime up to the
    /// largest one listed. `sign = None` derives the root number from the
    /// eigenvalues at primes dividing the level.
    pub fn from_prime_values(
        label: &str,
        weight: u32,
        level: u64,
        sign: Option<i32>,
        values: &[(u64, f64)],
    ) -> Result<Self> {
        if weight < 2 || weight % 2 == 1 {
            return Err(domain_err!("weight {weight} must be even and at least 2"));
        }
        if level == 0 {
            return Err(domain_err!("level must be positive"));
        }
        let p_max = values.last().map(|v| v.0).unwrap_or(1);
        let mut lambda = vec![0.0; p_max as usize + 1];
        let mut prev = 0u64;
        for &(p, l) in values {
            if p <= prev {
                return Err(domain_err!("primes must be strictly increasing ({p} after {prev})"));
            }
            if !is_prime(p) {
                return Err(domain_err!("{p} is not prime"));
            }
            if !l.is_finite() {
                return Err(domain_err!("λ({p}) is not finite"));
            }
            let bound = if level % p == 0 { 1.0 / (p as f64).sqrt() } else { 2.0 };
            if l.abs() > bound + RAMANUJAN_TOL {
                return Err(domain_err!("|λ({p})| = {} exceeds the bound {bound}", l.abs()));
            }
            lambda[p as usize] = l;
            prev = p;
        }
        let listed = values.len();
        let expected = Sieve::new(p_max as usize).primes().count();
        if listed != expected {
            return Err(coverage_err!("table lists {listed} primes but {expected} primes lie below {p_max}"));
        }
        let mut f = Eigenform { label: label.to_string(), weight, level, sign: 1, p_max, lambda };
        f.sign = match sign {
            Some(s) if s == 1 || s == -1 => s,
            Some(s) => return Err(domain_err!("sign must be ±1, got {s}")),
            None => f.derived_sign()?,
        };
        Ok(f)
    }

    /// Ramanujan's Δ with `λ(p) = τ(p)/p^{11/2}` for `p <= p_max`.
    pub fn delta(p_max: u64) -> Result<Self> {
        let tau = tau_coefficients(p_max as usize)?;
        let values: Vec<(u64, f64)> = Sieve::new(p_max as usize)
            .primes()
            .map(|p| (p, tau[p as usize] as f64 / (p as f64).powf(5.5)))
            .collect();
        Eigenform::from_prime_values("Delta", 12, 1, Some(1), &values)
    }

    /// The weight 2 form of an elliptic curve over Q, from point counts on a
    /// minimal model.
    pub fn elliptic_curve(curve: &EllipticCurve, p_max: u64, level: Option<u64>) -> Result<Self> {
        let level = match level {
            Some(n) => n,
            None => curve.level_heuristic()?,
        };
        let values: Vec<(u64, f64)> = Sieve::new(p_max as usize)
            .primes()
            .map(|p| (p, curve.ap(p) as f64 / (p as f64).sqrt()))
            .collect();
        Eigenform::from_prime_values(&curve.label(), 2, level, None, &values)
    }

    /// Root number `i^k ∏_{p | N} (-λ(p) √p)` for squarefree level `N`.
    fn derived_sign(&self) -> Result<i32> {
        let mut s = if self.weight % 4 == 0 { 1.0 } else { -1.0 };
        for (p, e) in factorize(self.level)? {
            if e > 1 {
                return Err(domain_err!("root number needs a squarefree level, got {}", self.level));
            }
            s *= -self.lambda_p(p)? * (p as f64).sqrt();
        }
        let r = s.round();
        if (s - r).abs() > 1e-6 || r.abs() != 1.0 {
            return Err(domain_err!("eigenvalues at the level do not give a root number ±1 ({s})"));
        }
        Ok(r as i32)
    }

    /// Largest `P` such that every prime `p <= P` is covered.
    pub fn p_max(&self) -> u64 {
        self.p_max
    }

    pub fn lambda_p(&self, p: u64) -> Result<f64> {
        if p > self.p_max {
            return Err(coverage_err!("λ({p}) requested but {} covers p <= {}", self.label, self.p_max));
        }
        Ok(self.lambda[p as usize])
    }

    /// All primes covered, with their eigenvalues.
    pub fn prime_values(&self) -> Vec<(u64, f64)> {
        (2..=self.p_max).filter(|&p| is_prime(p)).map(|p| (p, self.lambda[p as usize])).collect()
    }

    /// `λ(p^e)` from the Hecke relations.
    pub fn prime_power(&self, p: u64, e: u32) -> Result<f64> {
        let l = self.lambda_p(p)?;
        if self.level % p == 0 {
            return Ok(l.powi(e as i32));
        }
        let (mut a, mut b) = (1.0, l);
        if e == 0 {
            return Ok(1.0);
        }
        for _ in 1..e {
            (a, b) = (b, l * b - a);
        }
        Ok(b)
    }

    /// `λ(n)` for a single `n >= 1`.
    pub fn lambda_at(&self, n: u64) -> Result<f64> {
        let mut v = 1.0;
        for (p, e) in factorize(n)? {
            v *= self.prime_power(p, e)?;
        }
        Ok(v)
    }

    /// `λ(n)` for `0 <= n <= n_max` (with `λ(0) = 0`).
    pub fn coefficients(&self, n_max: usize) -> Result<Vec<f64>> {
        if n_max as u64 > self.p_max.max(1) && n_max >= 2 {
            let largest = (2..=n_max).rev().find(|&n| is_prime(n as u64)).unwrap_or(1);
            if largest as u64 > self.p_max {
                return Err(coverage_err!(
                    "{} covers primes up to {} but coefficients up to {n_max} need {largest}",
                    self.label,
                    self.p_max
                ));
            }
        }
        let sieve = Sieve::new(n_max.max(2));
        let mut out = vec![0.0; n_max + 1];
        if n_max >= 1 {
            out[1] = 1.0;
        }
        for n in 2..=n_max {
            let (p, pe, m) = sieve.split(n);
            out[n] = if m > 1 {
                out[pe] * out[m]
            } else if pe == p {
                self.lambda[p]
            } else if self.level % p as u64 == 0 {
                self.lambda[p] * out[n / p]
            } else {
                self.lambda[p] * out[n / p] - out[n / (p * p)]
            };
        }
        Ok(out)
    }

    /// `λ(a²)` for `0 <= a <= a_max` (with index 0 set to zero).
    pub fn square_coefficients(&self, a_max: usize) -> Result<Vec<f64>> {
        if a_max as u64 > self.p_max && a_max >= 2 {
            let largest = (2..=a_max).rev().find(|&n| is_prime(n as u64)).unwrap_or(1);
            if largest as u64 > self.p_max {
                return Err(coverage_err!(
                    "{} covers primes up to {} but squares up to {a_max}² need {largest}",
                    self.label,
                    self.p_max
                ));
            }
        }
        let sieve = Sieve::new(a_max.max(2));
        let mut out = vec![0.0; a_max + 1];
        if a_max >= 1 {
            out[1] = 1.0;
        }
        for a in 2..=a_max {
            let (p, pe, m) = sieve.split(a);
            out[a] = if m > 1 {
                out[pe] * out[m]
            } else {
                let (mut e, mut q) = (0, pe);
                while q > 1 {
                    q /= p;
                    e += 1;
                }
                self.prime_power(p as u64, 2 * e)?
            };
        }
        Ok(out)
    }
}

/// `C_Π(n) = ∏_j λ_j(n)` for `Π = π_1 ⊗ ... ⊗ π_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorProduct {
    pub factors: Vec<Eigenform>,
}

impl TensorProduct {
    pub fn new(factors: Vec<Eigenform>) -> Result<Self> {
        if factors.is_empty() {
            return Err(domain_err!("a tensor product needs at least one factor"));
        }
        if factors.len() > 6 {
            return Err(domain_err!("at most 6 factors are supported"));
        }
        Ok(TensorProduct { factors })
    }

    pub fn single(f: Eigenform) -> Self {
        TensorProduct { factors: vec![f] }
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    /// Degree `r = 2^N`.
    pub fn degree(&self) -> u32 {
        1 << self.factors.len()
    }

    pub fn weights(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.weight).collect()
    }

    pub fn label(&self) -> String {
        let labels: Vec<&str> = self.factors.iter().map(|f| f.label.as_str()).collect();
        labels.join("x")
    }

    pub fn p_max(&self) -> u64 {
        self.factors.iter().map(|f| f.p_max()).min().unwrap_or(0)
    }

    pub fn coefficients(&self, n_max: usize) -> Result<Vec<f64>> {
        let mut out = self.factors[0].coefficients(n_max)?;
        for f in &self.factors[1..] {
            for (o, l) in out.iter_mut().zip(f.coefficients(n_max)?) {
                *o *= l;
            }
        }
        Ok(out)
    }

    /// `C_Π(a²)` for `0 <= a <= a_max`.
    pub fn square_coefficients(&self, a_max: usize) -> Result<Vec<f64>> {
        let mut out = self.factors[0].square_coefficients(a_max)?;
        for f in &self.factors[1..] {
            for (o, l) in out.iter_mut().zip(f.square_coefficients(a_max)?) {
                *o *= l;
            }
        }
        Ok(out)
    }

    pub fn coefficient_at(&self, n: u64) -> Result<f64> {
        self.factors.iter().try_fold(1.0, |acc, f| Ok(acc * f.lambda_at(n)?))
    }

    /// Conductor exponents of `Π` at the primes dividing the levels. With
    /// squarefree levels and `t` Steinberg factors at `p`, the exponent is
    /// `2^{N-t} (2^t - binom(t, ⌊t/2⌋))`.
    pub fn conductor_exponents(&self) -> Result<Vec<(u64, u32)>> {
        let n = self.factors.len() as u32;
        let mut primes: Vec<u64> = self.factors.iter().flat_map(|f| prime_divisors(f.level)).collect();
        primes.sort_unstable();
        primes.dedup();
        let mut out = Vec::new();
        for p in primes {
            let mut t = 0u32;
            for f in &self.factors {
                if f.level % (p * p) == 0 {
                    return Err(domain_err!("level {} of {} is not squarefree", f.level, f.label));
                }
                if f.level % p == 0 {
                    t += 1;
                }
            }
            out.push((p, (1 << (n - t)) * ((1 << t) - binomial(t, t / 2))));
        }
        Ok(out)
    }

    /// The conductor `f(Π)` as an integer, when it fits.
    pub fn conductor(&self) -> Result<u64> {
        self.conductor_exponents()?.into_iter().try_fold(1u64, |acc, (p, e)| {
            p.checked_pow(e).and_then(|q| acc.checked_mul(q)).ok_or_else(|| numeric_err!("conductor overflows u64"))
        })
    }

    /// True when every level is prime to `m`.
    pub fn levels_coprime_to(&self, m: u64) -> bool {
        self.factors.iter().all(|f| gcd(f.level, m) == 1)
    }
}

fn binomial(n: u32, k: u32) -> u32 {
    (0..k).fold(1u32, |acc, i| acc * (n - i) / (i + 1))
}

/// Jacobi's sparse series `∏(1 - q^n)³ = Σ_k (-1)^k (2k+1) q^{k(k+1)/2}`,
/// terms below `q^len`.
fn eta_cubed(len: usize) -> Vec<(usize, i64)> {
    (0usize..)
        .map(|k| (k * (k + 1) / 2, if k % 2 == 0 { (2 * k + 1) as i64 } else { -((2 * k + 1) as i64) }))
        .take_while(|&(t, _)| t < len.max(1))
        .collect()
}

/// Crossover between the sparse product and the transform route.
const TAU_DIRECT_MAX: usize = 30_000;

/// `τ(n)` for `0 <= n <= n_max` (with `τ(0) = 0`), exact.
pub fn tau_coefficients(n_max: usize) -> Result<Vec<i128>> {
    if n_max <= TAU_DIRECT_MAX {
        tau_direct(n_max)
    } else {
        tau_transform(n_max)
    }
}

/// `τ(n)` from `Δ = q ∏(1 - q^n)^24` as seven sparse-by-dense products with
/// the cube of the Euler product. Overflow is reported rather than wrapped.
pub fn tau_direct(n_max: usize) -> Result<Vec<i128>> {
    let len = n_max.max(1);
    let sparse = eta_cubed(len);
    let mut cur = vec![0i128; len];
    for &(t, c) in &sparse {
        cur[t] = c as i128;
    }
    let overflow = || numeric_err!("τ expansion overflows i128");
    for _ in 1..8 {
        let mut next = vec![0i128; len];
        for &(t, c) in &sparse {
            for n in 0..len - t {
                let v = cur[n];
                if v != 0 {
                    let prod = v.checked_mul(c as i128).ok_or_else(overflow)?;
                    next[n + t] = next[n + t].checked_add(prod).ok_or_else(overflow)?;
                }
            }
        }
        cur = next;
    }
    Ok(shift_by_q(&cur, n_max))
}

/// `τ(n)` from the sixth power of the Euler product squared twice by
/// number-theoretic transforms. Exactness needs `|τ(n)| < 2^127`, which is
/// checked against `|τ(n)| <= d(n) n^{11/2}` before reconstruction.
pub fn tau_transform(n_max: usize) -> Result<Vec<i128>> {
    let len = n_max.max(1);
    if (2 * len).next_power_of_two() > crate::ntt::MAX_LEN {
        return Err(domain_err!("τ(n) by transforms supports n <= {}", crate::ntt::MAX_LEN / 2));
    }
    let mut divisor_count = vec![0u32; n_max + 1];
    for d in 1..=n_max {
        for m in (d..=n_max).step_by(d) {
            divisor_count[m] += 1;
        }
    }
    let max_d = divisor_count.iter().copied().max().unwrap_or(1) as f64;
    if max_d * (n_max as f64).powf(5.5) >= 2f64.powi(127) {
        return Err(domain_err!("τ(n) for n <= {n_max} may exceed the exact reconstruction range"));
    }
    let mut sixth = vec![0i64; len];
    let cube = eta_cubed(len);
    for &(t1, c1) in &cube {
        for &(t2, c2) in cube.iter().take_while(|x| x.0 + t1 < len) {
            sixth[t1 + t2] += c1 * c2;
        }
    }
    let product = crate::ntt::power_of_two_power(&sixth, len, 2);
    Ok(shift_by_q(&product, n_max))
}

fn shift_by_q(series: &[i128], n_max: usize) -> Vec<i128> {
    let mut tau = vec![0i128; n_max + 1];
    tau[1..].copy_from_slice(&series[..n_max]);
    tau
}

/// An elliptic curve in long Weierstrass form `[a1, a2, a3, a4, a6]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EllipticCurve {
    pub a: [i64; 5],
}

impl EllipticCurve {
    pub fn new(a: [i64; 5]) -> Result<Self> {
        let e = EllipticCurve { a };
        if e.discriminant() == 0 {
            return Err(domain_err!("singular Weierstrass model {a:?}"));
        }
        Ok(e)
    }

    /// A short model `y² = x³ + a4 x + a6`, replaced by a globally minimal
    /// model so that point counts at 2 and 3 are meaningful.
    pub fn from_short(a4: i64, a6: i64) -> Result<Self> {
        let c4 = -48 * a4 as i128;
        let c6 = -864 * a6 as i128;
        minimal_from_invariants(c4, c6)
    }

    pub fn label(&self) -> String {
        let [a1, a2, a3, a4, a6] = self.a;
        alloc::format!("E[{a1},{a2},{a3},{a4},{a6}]")
    }

    fn b_invariants(&self) -> (i128, i128, i128, i128) {
        let [a1, a2, a3, a4, a6] = self.a.map(|x| x as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        (b2, b4, b6, b8)
    }

    pub fn c_invariants(&self) -> (i128, i128) {
        let (b2, b4, b6, _) = self.b_invariants();
        (b2 * b2 - 24 * b4, -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6)
    }

    pub fn discriminant(&self) -> i128 {
        let (b2, b4, b6, b8) = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    /// Product of the primes dividing the discriminant. Equals the conductor
    /// for semistable curves given by a minimal model.
    pub fn level_heuristic(&self) -> Result<u64> {
        let d = self.discriminant().unsigned_abs();
        let d = u64::try_from(d).map_err(|_| domain_err!("discriminant too large to factor"))?;
        Ok(prime_divisors(d).into_iter().product())
    }

    /// `a_p = p + 1 - #E(F_p)`, counting the singular point at bad primes.
    pub fn ap(&self, p: u64) -> i64 {
        if p == 2 {
            let [a1, a2, a3, a4, a6] = self.a;
            let m = |x: i64| x.rem_euclid(2);
            let mut count = 1i64;
            for x in 0..2i64 {
                for y in 0..2i64 {
                    let lhs = y * y + m(a1) * x * y + m(a3) * y;
                    let rhs = x * x * x + m(a2) * x * x + m(a4) * x + m(a6);
                    if (lhs - rhs).rem_euclid(2) == 0 {
                        count += 1;
                    }
                }
            }
            return 3 - count;
        }
        let (b2, b4, b6, _) = self.b_invariants();
        let pi = p as i128;
        let (b2, b4, b6) = (b2.rem_euclid(pi) as u64, b4.rem_euclid(pi) as u64, b6.rem_euclid(pi) as u64);
        let mut is_sq = vec![false; p as usize];
        for x in 1..p {
            is_sq[(x * x % p) as usize] = true;
        }
        // (2y + a1 x + a3)² = 4x³ + b2 x² + 2 b4 x + b6
        let mut s = 0i64;
        for x in 0..p {
            let v = ((((4 * x + b2) % p) * x + 2 * b4) % p * x + b6) % p;
            if v != 0 {
                s += if is_sq[v as usize] { 1 } else { -1 };
            }
        }
        -s
    }
}

fn v_p(mut n: i128, p: i128) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Kraus' conditions for `(c4, c6)` to come from an integral model.
fn kraus(c4: i128, c6: i128) -> bool {
    let v3 = v_p(c6, 3);
    if v3 == 2 {
        return false;
    }
    if c6.rem_euclid(4) == 3 {
        return true;
    }
    v_p(c4, 2) >= 4 && matches!(c6.rem_euclid(32), 0 | 8)
}

/// Minimal integral model with invariants `(c4/u⁴, c6/u⁶)` for the largest
/// admissible `u`.
fn minimal_from_invariants(c4: i128, c6: i128) -> Result<EllipticCurve> {
    let disc1728 = c4 * c4 * c4 - c6 * c6;
    if disc1728 == 0 || disc1728 % 1728 != 0 {
        return Err(domain_err!("(c4, c6) = ({c4}, {c6}) do not define an elliptic curve"));
    }
    let g = gcd(c4.unsigned_abs() as u64, c6.unsigned_abs() as u64).max(1);
    let mut u_rest: i128 = 1;
    let mut small: Vec<(i128, u32)> = Vec::new();
    for (p, _) in factorize(if g == 0 { 1 } else { g })? {
        let p = p as i128;
        let k = (v_p(c4, p) / 4).min(v_p(c6, p) / 6);
        if k == 0 {
            continue;
        }
        if p == 2 || p == 3 {
            small.push((p, k));
        } else {
            u_rest *= p.pow(k);
        }
    }
    let k2 = small.iter().find(|x| x.0 == 2).map_or(0, |x| x.1);
    let k3 = small.iter().find(|x| x.0 == 3).map_or(0, |x| x.1);
    for i in (0..=k2).rev() {
        for j in (0..=k3).rev() {
            let u = u_rest * 2i128.pow(i) * 3i128.pow(j);
            let (d4, d6) = (c4 / u.pow(4), c6 / u.pow(6));
            if kraus(d4, d6) {
                return model_from_invariants(d4, d6);
            }
        }
    }
    Err(domain_err!("no integral model with invariants ({c4}, {c6})"))
}

fn model_from_invariants(c4: i128, c6: i128) -> Result<EllipticCurve> {
    let mut b2 = (-c6).rem_euclid(12);
    if b2 > 6 {
        b2 -= 12;
    }
    let b4 = (b2 * b2 - c4) / 24;
    let b6 = (-b2 * b2 * b2 + 36 * b2 * b4 - c6) / 216;
    let a1 = b2.rem_euclid(2);
    let a2 = (b2 - a1) / 4;
    let a3 = b6.rem_euclid(2);
    let a4 = (b4 - a1 * a3) / 2;
    let a6 = (b6 - a3) / 4;
    let conv = |x: i128| i64::try_from(x).map_err(|_| domain_err!("model coefficient out of range"));
    let e = EllipticCurve::new([conv(a1)?, conv(a2)?, conv(a3)?, conv(a4)?, conv(a6)?])?;
    if e.c_invariants() != (c4, c6) {
        return Err(numeric_err!("model reconstruction from ({c4}, {c6}) failed"));
    }
    Ok(e)
}
