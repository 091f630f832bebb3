//! Exact power-series products by number-theoretic transforms over five
//! word-sized primes, reconstructed with Garner's algorithm.

use alloc::vec;
use alloc::vec::Vec;

/// `(p, g)` with `p = c·2^k + 1` prime, `2^22 | p - 1`, `g` a primitive root.
pub(crate) const PRIMES: [(u64, u64); 5] =
    [(998_244_353, 3), (167_772_161, 3), (469_762_049, 3), (754_974_721, 11), (2_013_265_921, 31)];

/// Largest transform length supported by every prime in [`PRIMES`].
pub(crate) const MAX_LEN: usize = 1 << 22;

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn ntt<const P: u64, const G: u64>(a: &mut [u64], invert: bool) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    let mut roots = vec![0u64; n / 2];
    while len <= n {
        let mut w = pow_mod(G, (P - 1) / len as u64, P);
        if invert {
            w = pow_mod(w, P - 2, P);
        }
        let half = len / 2;
        roots[0] = 1;
        for k in 1..half {
            roots[k] = roots[k - 1] * w % P;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((u, v), &r) in lo.iter_mut().zip(hi.iter_mut()).zip(&roots[..half]) {
                let t = *v * r % P;
                let x = *u;
                *u = if x + t >= P { x + t - P } else { x + t };
                *v = if x >= t { x - t } else { x + P - t };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = pow_mod(n as u64, P - 2, P);
        for x in a.iter_mut() {
            *x = *x * inv_n % P;
        }
    }
}

/// `f^(2^squarings)` truncated to `len` terms, modulo `P`.
fn repeated_square<const P: u64, const G: u64>(f: &[i64], len: usize, squarings: u32) -> Vec<u64> {
    let size = (2 * len).next_power_of_two();
    let mut a: Vec<u64> = f.iter().take(len).map(|&x| x.rem_euclid(P as i64) as u64).collect();
    for _ in 0..squarings {
        a.resize(size, 0);
        ntt::<P, G>(&mut a, false);
        for x in a.iter_mut() {
            *x = *x * *x % P;
        }
        ntt::<P, G>(&mut a, true);
        a.truncate(len);
    }
    a.resize(len, 0);
    a
}

fn residues(f: &[i64], len: usize, squarings: u32, which: usize) -> Vec<u64> {
    match which {
        0 => repeated_square::<998_244_353, 3>(f, len, squarings),
        1 => repeated_square::<167_772_161, 3>(f, len, squarings),
        2 => repeated_square::<469_762_049, 3>(f, len, squarings),
        3 => repeated_square::<754_974_721, 11>(f, len, squarings),
        _ => repeated_square::<2_013_265_921, 31>(f, len, squarings),
    }
}

/// `f^(2^squarings)` truncated to `len` terms, exact whenever every
/// coefficient of the result lies in `[-2^127, 2^127)`. The caller is
/// responsible for that bound.
pub(crate) fn power_of_two_power(f: &[i64], len: usize, squarings: u32) -> Vec<i128> {
    debug_assert!((2 * len).next_power_of_two() <= MAX_LEN);
    #[cfg(feature = "parallel")]
    let res: Vec<Vec<u64>> = {
        use rayon::prelude::*;
        (0..PRIMES.len()).into_par_iter().map(|i| residues(f, len, squarings, i)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let res: Vec<Vec<u64>> = (0..PRIMES.len()).map(|i| residues(f, len, squarings, i)).collect();
    garner_offset(&res, len)
}

/// Reconstructs `x` from residues of `x` using the shifted value
/// `x + 2^127 ∈ [0, 2^128)`.
fn garner_offset(res: &[Vec<u64>], len: usize) -> Vec<i128> {
    let k = PRIMES.len();
    let m: Vec<u64> = PRIMES.iter().map(|x| x.0).collect();
    let shift: Vec<u64> = m.iter().map(|&p| pow_mod(2, 127, p)).collect();
    // inv[i][j] = m_j^{-1} mod m_i for j < i
    let mut inv = vec![vec![0u64; k]; k];
    for i in 0..k {
        for j in 0..i {
            inv[i][j] = pow_mod(m[j] % m[i], m[i] - 2, m[i]);
        }
    }
    let mut radix = vec![1u128; k];
    for i in 1..k {
        radix[i] = radix[i - 1].wrapping_mul(m[i - 1] as u128);
    }
    let mut out = vec![0i128; len];
    let mut d = vec![0u64; k];
    for (n, o) in out.iter_mut().enumerate() {
        for i in 0..k {
            let p = m[i];
            let mut x = (res[i][n] + shift[i]) % p;
            for j in 0..i {
                x = (x + p - d[j] % p) % p * inv[i][j] % p;
            }
            d[i] = x;
        }
        let mut y: u128 = 0;
        for i in 0..k {
            y = y.wrapping_add((d[i] as u128).wrapping_mul(radix[i]));
        }
        *o = y.wrapping_sub(1u128 << 127) as i128;
    }
    out
}
