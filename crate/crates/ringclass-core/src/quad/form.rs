//! Positive definite binary quadratic forms `a x² + b x y + c y²`.

use core::fmt;

use crate::arith::{ext_gcd, gcd, gcd_i64, mod_inverse};
use crate::error::domain_err;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl Form {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Form { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        let d = self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128;
        d as i64
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a.unsigned_abs(), self.b.unsigned_abs()), self.c.unsigned_abs()) == 1
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// The principal form of discriminant `disc`.
    pub fn principal(disc: i64) -> Result<Self> {
        if disc >= 0 || disc.rem_euclid(4) > 1 {
            return Err(domain_err!("{disc} is not a negative discriminant"));
        }
        let b = disc.rem_euclid(2);
        Ok(Form::new(1, b, (b * b - disc) / 4))
    }

    pub fn inverse(&self) -> Self {
        Form::new(self.a, -self.b, self.c).reduced()
    }

    pub fn is_reduced(&self) -> bool {
        let Form { a, b, c } = *self;
        b.abs() <= a && a <= c && !(b < 0 && (b.abs() == a || a == c))
    }

    /// Image under `(x, y) -> (x + k y, y)`, with `k` chosen so `b ∈ (-a, a]`.
    fn normalized(&self) -> Self {
        let Form { a, b, c } = *self;
        let (a, b, c) = (a as i128, b as i128, c as i128);
        let k = (a - b).div_euclid(2 * a);
        Form::new(a as i64, (b + 2 * a * k) as i64, (a * k * k + b * k + c) as i64)
    }

    /// The unique reduced form properly equivalent to a positive definite form.
    pub fn reduced(&self) -> Self {
        let mut f = self.normalized();
        while f.a > f.c {
            f = Form::new(f.c, -f.b, f.a).normalized();
        }
        if f.a == f.c && f.b < 0 {
            f.b = -f.b;
        }
        f
    }

    /// Image under the unimodular substitution with first column `(x, y)` and
    /// second column `(u, v)`, where `x v - y u = 1`.
    pub fn transform(&self, x: i64, y: i64, u: i64, v: i64) -> Self {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (x, y, u, v) = (x as i128, y as i128, u as i128, v as i128);
        let a2 = a * x * x + b * x * y + c * y * y;
        let b2 = 2 * a * x * u + b * (x * v + y * u) + 2 * c * y * v;
        let c2 = a * u * u + b * u * v + c * v * v;
        Form::new(a2 as i64, b2 as i64, c2 as i64)
    }

    /// A properly equivalent form whose leading coefficient is prime to `m`.
    pub fn with_leading_coprime_to(&self, m: u64) -> Self {
        if m <= 1 || gcd(self.a.unsigned_abs(), m) == 1 {
            return *self;
        }
        for s in 1i64.. {
            for (x, y) in ring(s) {
                if gcd_i64(x, y) != 1 {
                    continue;
                }
                let val = self.eval(x, y);
                if val != 0 && gcd((val.unsigned_abs() % m as u128) as u64, m) == 1 {
                    let (_, p, q) = ext_gcd(x as i128, y as i128);
                    // x p + y q = 1, so (u, v) = (-q, p) completes the matrix.
                    return self.transform(x, y, -q as i64, p as i64);
                }
            }
        }
        unreachable!("a primitive form represents integers prime to any modulus")
    }

    /// Gauss composition via Dirichlet's united forms, reduced.
    pub fn compose(&self, other: &Form) -> Self {
        let d = self.disc();
        debug_assert_eq!(d, other.disc());
        let f1 = *self;
        let f2 = other.with_leading_coprime_to(f1.a.unsigned_abs());
        let (a1, b1) = (f1.a as i128, f1.b as i128);
        let (a2, b2) = (f2.a as i128, f2.b as i128);
        let inv = mod_inverse(a1, a2).expect("leading coefficients are coprime");
        let t = ((b2 - b1) / 2 % a2 * inv).rem_euclid(a2);
        let a3 = a1 * a2;
        let b3 = (b1 + 2 * a1 * t).rem_euclid(2 * a3);
        let c3 = (b3 * b3 - d as i128) / (4 * a3);
        Form::new(a3 as i64, b3 as i64, c3 as i64).reduced()
    }
}

/// Integer points with max norm exactly `s`, one of each `±` pair.
fn ring(s: i64) -> impl Iterator<Item = (i64, i64)> {
    let top = (-s..=s).map(move |x| (x, s));
    let side = (-s + 1..s).map(move |y| (s, y));
    top.chain(side)
}

/// All reduced primitive positive definite forms of discriminant `disc`,
/// principal form first.
pub fn reduced_forms(disc: i64) -> Result<alloc::vec::Vec<Form>> {
    let principal = Form::principal(disc)?;
    let mut out = alloc::vec![principal];
    let amax = crate::arith::isqrt((-disc / 3) as u64) as i64;
    for a in 1..=amax {
        for b in (-a + 1)..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b as i128 * b as i128 - disc as i128;
            if num % (4 * a as i128) != 0 {
                continue;
            }
            let c = (num / (4 * a as i128)) as i64;
            if c < a || (b < 0 && a == c) {
                continue;
            }
            let f = Form::new(a, b, c);
            if f.is_primitive() && f != principal {
                out.push(f);
            }
        }
    }
    Ok(out)
}
