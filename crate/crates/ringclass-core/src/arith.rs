//! Elementary multiplicative arithmetic.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::domain_err;
#[allow(unused_imports)]
use crate::num::Float;
use crate::Result;

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub type Factorization = Vec<(u64, u32)>;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd(a.unsigned_abs(), b.unsigned_abs()) as i64
}

/// Extended Euclid: returns `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Inverse of `a` modulo `m > 0`, if it exists.
pub fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).map_or(true, |s| s > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= n) {
        x += 1;
    }
    x
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho. `n` must be odd and composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut g, mut x, mut ys) = (1u64, 0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Factorization by trial division up to 1000, then Pollard rho.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(domain_err!("cannot factor 0"));
    }
    let mut n = n;
    let mut out: Factorization = Vec::new();
    let mut p = 2u64;
    while p < 1000 && p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let mut big = Vec::new();
        factor_into(n, &mut big);
        big.sort_unstable();
        for q in big {
            match out.last_mut() {
                Some((p, e)) if *p == q => *e += 1,
                _ => out.push((q, 1)),
            }
        }
    }
    Ok(out)
}

pub fn moebius(n: u64) -> Result<i8> {
    let f = factorize(n)?;
    if f.iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.len() % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// Divisors of `n` from a factorization, sorted increasingly.
pub fn divisors_of(f: &[(u64, u32)]) -> Vec<u64> {
    let mut ds = vec![1u64];
    for &(p, e) in f {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn divisors(n: u64) -> Result<Vec<u64>> {
    Ok(divisors_of(&factorize(n)?))
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize(n).is_ok_and(|f| f.iter().all(|&(_, e)| e == 1))
}

/// Distinct prime divisors of `n >= 1`.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n.max(1))
        .map(|f| f.into_iter().map(|(p, _)| p).collect())
        .unwrap_or_default()
}

/// The Kronecker symbol `(a/n)` for arbitrary integers.
pub fn kronecker_symbol(a: i64, n: i64) -> i32 {
    const TAB2: [i32; 8] = [0, 1, 0, -1, 0, -1, 0, 1];
    if n == 0 {
        return i32::from(a == 1 || a == -1);
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut a = a as i128;
    let mut b = n as i128;
    let mut v = 0;
    while b % 2 == 0 {
        b /= 2;
        v += 1;
    }
    let mut k = if v % 2 == 0 { 1 } else { TAB2[(a & 7) as usize] };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        let mut v = 0;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 {
            k *= TAB2[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// True for fundamental discriminants: `d ≡ 1 (mod 4)` squarefree, or
/// `d = 4m` with `m ≡ 2, 3 (mod 4)` squarefree. `1` is not fundamental.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let m4 = d.rem_euclid(4);
    if m4 == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if m4 == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        return (r == 2 || r == 3) && is_squarefree(m.unsigned_abs());
    }
    false
}

/// The quadratic character `η_D(n) = (D/n)` attached to a fundamental
/// discriminant `D`, or the trivial character for `D = 1`.
pub fn kronecker(d: i64, n: i64) -> Result<i32> {
    if d != 1 && !is_fundamental_discriminant(d) {
        return Err(domain_err!("{d} is not a fundamental discriminant"));
    }
    Ok(kronecker_symbol(d, n))
}

/// Smallest-prime-factor table for bulk factorization of `1..=limit`.
#[derive(Debug, Clone)]
pub struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(limit: usize) -> Self {
        let limit = limit.max(2);
        let mut spf = vec![0u32; limit + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > limit {
                    break;
                }
                spf[m] = p;
            }
        }
        Sieve { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..self.spf.len()).filter(|&i| self.spf[i] as usize == i).map(|i| i as u64)
    }

    /// Factorization of `1 <= n <= limit`.
    pub fn factor(&self, mut n: usize) -> Factorization {
        let mut out: Factorization = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }

    /// Splits `n` as `(p, p^e, n / p^e)` for its smallest prime `p`.
    #[inline]
    pub fn split(&self, n: usize) -> (usize, usize, usize) {
        let p = self.spf[n] as usize;
        let mut pe = p;
        let mut m = n / p;
        while m % p == 0 {
            m /= p;
            pe *= p;
        }
        (p, pe, m)
    }
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    Sieve::new(limit as usize).primes().collect()
}

/// Least common multiple of `1 <= n` values, `None` on overflow.
pub fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_examples() {
        assert_eq!(factorize(360).unwrap(), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1).unwrap(), vec![]);
        assert!(factorize(0).is_err());
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        assert_eq!(factorize(p * q).unwrap(), vec![(q, 1), (p, 1)]);
    }

    #[test]
    fn moebius_values() {
        let mu: Vec<i8> = (1..=10).map(|n| moebius(n).unwrap()).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-4, 3).unwrap(), -1);
        assert_eq!(kronecker(-4, 5).unwrap(), 1);
        assert_eq!(kronecker(-4, 2).unwrap(), 0);
        assert_eq!(kronecker(-3, 2).unwrap(), -1);
        assert_eq!(kronecker(-7, 2).unwrap(), 1);
        assert_eq!(kronecker(5, 2).unwrap(), -1);
        assert_eq!(kronecker(8, 7).unwrap(), 1);
        assert!(kronecker(20, 3).is_err());
        assert_eq!(kronecker(12, 5).unwrap(), -1);
        assert_eq!(kronecker(1, 10).unwrap(), 1);
    }

    #[test]
    fn fundamental() {
        let neg: Vec<i64> = (-30..0).filter(|&d| is_fundamental_discriminant(d)).collect();
        assert_eq!(neg, vec![-24, -23, -20, -19, -15, -11, -8, -7, -4, -3]);
    }

    #[test]
    fn sieve_matches_factorize() {
        let s = Sieve::new(5000);
        for n in 1..=5000 {
            assert_eq!(s.factor(n), factorize(n as u64).unwrap());
        }
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
    }
}
