//! Dirichlet L-functions of quadratic characters, symmetric square series,
//! root numbers and central values of `L(s, Π_K ⊗ Ω)` by the approximate
//! functional equation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{gcd, is_fundamental_discriminant, kronecker_symbol, prime_divisors};
use crate::error::{coverage_err, domain_err, numeric_err, pole_err};
use crate::exec::{chunked_sum, map_indices};
use crate::hecke::TensorProduct;
#[allow(unused_imports)]
use crate::num::Float;
#[cfg(test)]
use crate::num::{EULER_GAMMA, PI};
use crate::quad::{Character, OrderTower, QuadOrder, RepresentationTable, RingClassCharacter};
use crate::special::{digamma_real, gamma_real, ArchFactor, CutoffFunction, TestFunction, BERNOULLI};
use crate::Result;

/// Exponent toward the Ramanujan conjecture for GL(2).
pub const THETA: f64 = 7.0 / 64.0;
/// Exponent toward Lindelöf in the level aspect for GL(2).
pub const DELTA: f64 = 103.0 / 512.0;

/// The Kronecker character `n ↦ (D / n)` of a fundamental discriminant, or
/// the trivial character for `D = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticCharacter {
    pub disc: i64,
}

impl QuadraticCharacter {
    pub fn new(disc: i64) -> Result<Self> {
        if disc != 1 && !is_fundamental_discriminant(disc) {
            return Err(domain_err!("{disc} is neither 1 nor a fundamental discriminant"));
        }
        Ok(QuadraticCharacter { disc })
    }

    pub fn trivial() -> Self {
        QuadraticCharacter { disc: 1 }
    }

    pub fn modulus(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    pub fn is_trivial(&self) -> bool {
        self.disc == 1
    }

    pub fn eval(&self, n: i64) -> i32 {
        kronecker_symbol(self.disc, n)
    }
}

/// Terms summed before switching to Euler-Maclaurin.
const HURWITZ_TERMS: usize = 30;

/// `ζ(s, a) - 1/(s - 1)` for real `s > 0` and `0 < a <= 1`. At `s = 1` this
/// is `-ψ(a)`.
fn hurwitz_regular(s: f64, a: f64) -> f64 {
    let n = HURWITZ_TERMS as f64;
    let mut acc: f64 = (0..HURWITZ_TERMS).map(|j| (j as f64 + a).powf(-s)).sum();
    let na = n + a;
    let ln_na = na.ln();
    // ((N + a)^{1-s} - 1)/(s - 1), continuous through s = 1
    acc += if (s - 1.0).abs() < 1e-300 { -ln_na } else { -((1.0 - s) * ln_na).exp_m1() / (1.0 - s) };
    acc += 0.5 * na.powf(-s);
    // B_{2j}/(2j)! · s(s+1)···(s+2j-2) · (N+a)^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut pow = na.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        acc += b / fact * rising * pow;
        let m = 2.0 * (j as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        pow /= na * na;
    }
    acc
}

/// Hurwitz zeta `ζ(s, a) = Σ_{n >= 0} (n + a)^{-s}` for real `s > 0`,
/// `s ≠ 1`, `0 < a <= 1` (analytically continued below `s = 1`).
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) || !(a > 0.0 && a <= 1.0) {
        return Err(domain_err!("hurwitz zeta needs s > 0 and 0 < a <= 1, got s = {s}, a = {a}"));
    }
    if s == 1.0 {
        return Err(pole_err!("ζ(s, a) has a pole at s = 1"));
    }
    Ok(hurwitz_regular(s, a) + 1.0 / (s - 1.0))
}

/// Riemann zeta for real `s > 0`, `s ≠ 1`.
pub fn zeta(s: f64) -> Result<f64> {
    hurwitz_zeta(s, 1.0)
}

/// `L(s, χ)` for real `s`. The trivial character gives `ζ(s)` (`s > 0`,
/// `s ≠ 1`); otherwise any `s > 0` is accepted, through
/// `L(s, χ) = q^{-s} Σ_{a <= q} χ(a) ζ(s, a/q)` with the polar parts
/// cancelling exactly.
pub fn dirichlet_l(chi: QuadraticCharacter, s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain_err!("L(s, χ) is evaluated for real s > 0, got {s}"));
    }
    if chi.is_trivial() {
        return zeta(s);
    }
    let q = chi.modulus();
    let qf = q as f64;
    let mut acc = 0.0;
    for a in 1..=q {
        let x = chi.eval(a as i64);
        if x != 0 {
            acc += x as f64 * hurwitz_regular(s, a as f64 / qf);
        }
    }
    let v = acc * qf.powf(-s);
    if !v.is_finite() {
        return Err(numeric_err!("L({s}, χ_{}) is not finite", chi.disc));
    }
    Ok(v)
}

/// `L(1, χ) = -(1/q) Σ_{a <= q} χ(a) ψ(a/q)` for a nontrivial character.
pub fn dirichlet_l_one_digamma(chi: QuadraticCharacter) -> Result<f64> {
    if chi.is_trivial() {
        return Err(pole_err!("ζ(s) has a pole at s = 1"));
    }
    let q = chi.modulus();
    let mut acc = 0.0;
    for a in 1..=q {
        let x = chi.eval(a as i64);
        if x != 0 {
            acc += x as f64 * digamma_real(a as f64 / q as f64)?;
        }
    }
    Ok(-acc / q as f64)
}

/// `L^{(c)}(s, χ) = L(s, χ) ∏_{p | c} (1 - χ(p) p^{-s})`.
pub fn partial_dirichlet_l(chi: QuadraticCharacter, s: f64, c: u64) -> Result<f64> {
    let mut v = dirichlet_l(chi, s)?;
    for p in prime_divisors(c) {
        v *= 1.0 - chi.eval(p as i64) as f64 * (p as f64).powf(-s);
    }
    Ok(v)
}

/// A symmetric difference quotient and its refinement at a tenth of the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDerivative {
    pub value: f64,
    pub refined: f64,
    pub step: f64,
}

impl LogDerivative {
    pub fn discrepancy(&self) -> f64 {
        (self.value - self.refined).abs()
    }
}

/// `L'/L(s, χ)` (with the Euler factors at `p | c` removed) by symmetric
/// differences at steps `h` and `h/10`.
pub fn partial_dirichlet_log_derivative(chi: QuadraticCharacter, s: f64, c: u64, h: f64) -> Result<LogDerivative> {
    if !(h > 0.0 && h < s) {
        return Err(domain_err!("difference step {h} must lie in (0, s)"));
    }
    let quotient = |h: f64| -> Result<f64> {
        let up = partial_dirichlet_l(chi, s + h, c)?;
        let down = partial_dirichlet_l(chi, s - h, c)?;
        Ok((up - down) / (2.0 * h * partial_dirichlet_l(chi, s, c)?))
    };
    Ok(LogDerivative { value: quotient(h)?, refined: quotient(0.1 * h)?, step: h })
}

/// How the root number of `L(s, Π_K ⊗ Ω)` is determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootNumberRule {
    /// `ε = (-1)^{r/2} η(f(Π))`, the sign of `L(s, Π ⊗ π(Ω))` for `Π`
    /// unramified at the primes of `D c`. For a single form of level `N` this
    /// is the classical `-η(N)`.
    BaseChange,
    /// `ε = η(f(Π)) ∏_j ε(1/2, π_j)` from the supplied signs of the factors.
    Supplied,
}

/// The data fixing the family `{L(s, Π_K ⊗ Ω) : Ω ∈ Pic(O_c)^∨}`: order,
/// degree, conductors and the root number shared by every member.
#[derive(Debug, Clone, PartialEq)]
pub struct RankinSetup {
    pub label: String,
    pub order: QuadOrder,
    pub weights: Vec<u32>,
    /// `r = 2^N`.
    pub degree: u32,
    /// `f(Π)`.
    pub form_conductor: u64,
    /// `c(Π_K)` as a positive number; `f(Π)²` unless configured.
    pub basechange_conductor: f64,
    pub basechange_configured: bool,
    pub rule: RootNumberRule,
    pub root_number: i32,
    /// Generic parity: 0 when the root number is +1, 1 otherwise.
    pub k: u32,
}

impl RankinSetup {
    pub fn new(tensor: &TensorProduct, order: QuadOrder, rule: RootNumberRule) -> Result<Self> {
        if !order.is_imaginary() {
            return Err(domain_err!("central values are implemented for imaginary quadratic fields only"));
        }
        let f = tensor.conductor()?;
        let dc = order.d_k.unsigned_abs() * order.c;
        if gcd(f, dc) != 1 {
            return Err(domain_err!(
                "the root number formula needs f(Π) = {f} prime to D_K·c = {dc}"
            ));
        }
        let degree = tensor.degree();
        let eta_f = order.eta(f as i64);
        let root_number = match rule {
            RootNumberRule::BaseChange => {
                if (degree / 2) % 2 == 1 {
                    -eta_f
                } else {
                    eta_f
                }
            }
            RootNumberRule::Supplied => eta_f * tensor.factors.iter().map(|x| x.sign).product::<i32>(),
        };
        Ok(RankinSetup {
            label: tensor.label(),
            order,
            weights: tensor.weights(),
            degree,
            form_conductor: f,
            basechange_conductor: (f as f64) * (f as f64),
            basechange_configured: false,
            rule,
            root_number,
            k: if root_number == 1 { 0 } else { 1 },
        })
    }

    /// Overrides `c(Π_K)`.
    pub fn with_basechange_conductor(mut self, c_pik: f64) -> Result<Self> {
        if !(c_pik >= 1.0 && c_pik.is_finite()) {
            return Err(domain_err!("base change conductor must be at least 1, got {c_pik}"));
        }
        self.basechange_conductor = c_pik;
        self.basechange_configured = true;
        Ok(self)
    }

    /// `M = |D_K|^{r/2} c(Π_K)^{1/2}`, so that `Y(c') = M c'^r`.
    pub fn y_scale(&self) -> f64 {
        (self.order.d_k.unsigned_abs() as f64).powi(self.degree as i32 / 2) * self.basechange_conductor.sqrt()
    }

    /// `Y(c') = |D_K|^{r/2} c(Π_K)^{1/2} c'^r`, the square root of the
    /// conductor of `L(s, Π_K ⊗ Ω)` for `Ω` of conductor `c'`.
    pub fn y(&self, conductor: u64) -> f64 {
        self.y_scale() * (conductor as f64).powi(self.degree as i32)
    }

    /// `c·f(Π)`: the `m`-sum of the Dirichlet series runs over `m` prime to
    /// it. At `p | c` the local factor of `L(s, Π_K ⊗ Ω)` has no `L(2s, η)`
    /// part, and at a Steinberg prime `p | f(Π)` the local factor is
    /// `Σ_j λ(p^j) C_Ω(p^j) p^{-js}` alone.
    pub fn m_modulus(&self) -> u64 {
        self.order.c * self.form_conductor
    }

    pub fn arch(&self) -> Result<ArchFactor> {
        ArchFactor::from_weights(&self.weights)
    }
}

/// Where the double sum of the approximate functional equation is cut:
/// `m² n <= A · Y · X · (log Y + B)`, or earlier where the cutoff function
/// has decayed to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub a: f64,
    pub b: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { a: 30.0, b: 10.0 }
    }
}

/// Choices of an approximate functional equation evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfeOptions {
    /// Parity to evaluate; `None` uses the generic parity of the setup.
    pub k: Option<u32>,
    /// Balance parameter `X`: the two sums run with `Y X` and `Y / X`.
    pub x: f64,
    /// Damping `a` of the test function `exp(a s²)/s^{k+1}`.
    pub damping: f64,
    pub truncation: Truncation,
}

impl Default for AfeOptions {
    fn default() -> Self {
        AfeOptions { k: None, x: 1.0, damping: 0.0, truncation: Truncation::default() }
    }
}

/// A frozen approximate functional equation for one setup: the cutoff
/// `V_{k+1}` and the sign `ε (-1)^k` joining its two halves.
#[derive(Debug, Clone)]
pub struct Afe {
    pub k: u32,
    /// True when `k` differs from the generic parity.
    pub forced: bool,
    pub root_number: i32,
    /// `ε (-1)^k`.
    pub sign: f64,
    pub x: f64,
    pub truncation: Truncation,
    pub cutoff: CutoffFunction,
}

impl Afe {
    pub fn new(setup: &RankinSetup, opts: AfeOptions) -> Result<Self> {
        let k = opts.k.unwrap_or(setup.k);
        if k > 1 {
            return Err(domain_err!("parity k must be 0 or 1, got {k}"));
        }
        if !(opts.x > 0.0 && opts.x.is_finite()) {
            return Err(domain_err!("balance parameter X must be positive, got {}", opts.x));
        }
        let cutoff = CutoffFunction::new(setup.arch()?, TestFunction::new(k + 1, opts.damping)?)?;
        let sign = setup.root_number as f64 * if k == 1 { -1.0 } else { 1.0 };
        Ok(Afe {
            k,
            forced: k != setup.k,
            root_number: setup.root_number,
            sign,
            x: opts.x,
            truncation: opts.truncation,
            cutoff,
        })
    }

    /// Largest `n` (at `m = 1`) reached for square-root conductor `y`.
    pub fn n_max(&self, y: f64) -> usize {
        let span = self.x.max(1.0 / self.x);
        let cut = self.cutoff.decay_point().min(self.truncation.a * (y.ln().max(0.0) + self.truncation.b));
        (y * span * cut).floor() as usize
    }
}

/// The `n`-weights `K(n)/√n` with
/// `K(n) = Σ_{(m, c f(Π)) = 1} η(m)/m [V(m² n/(Y X)) + ε(-1)^k V(m² n X/Y)]`,
/// zero for `gcd(n, c) > 1`.
#[derive(Debug, Clone)]
pub struct AfeKernel {
    pub y: f64,
    pub conductor: u64,
    pub n_max: usize,
    pub weights: Vec<f64>,
    /// Number of `(m, n)` pairs summed.
    pub terms: u64,
    /// Majorant for the discarded terms: the cutoff at the cut point times
    /// the coefficient mass `√n_max (1 + log n_max)^r`.
    pub tail_estimate: f64,
}

impl AfeKernel {
    /// Kernel for characters of conductor `conductor` in `Pic(O_c)`,
    /// `c = setup.order.c`.
    pub fn new(setup: &RankinSetup, afe: &Afe, conductor: u64) -> Result<Self> {
        let order = setup.order;
        if order.c % conductor != 0 {
            return Err(domain_err!("character conductor {conductor} does not divide {}", order.c));
        }
        let y = setup.y(conductor);
        let n_max = afe.n_max(y);
        let m_max = (n_max as f64).sqrt() as usize + 1;
        let c = order.c;
        let cm = setup.m_modulus();
        let eta_m: Vec<f64> = (0..=m_max)
            .map(|m| if m == 0 || gcd(m as u64, cm) != 1 { 0.0 } else { order.eta(m as i64) as f64 / m as f64 })
            .collect();
        let (yx, y_over_x) = (y * afe.x, y / afe.x);
        let v = &afe.cutoff;
        const BLOCK: usize = 1024;
        let blocks = n_max.div_ceil(BLOCK);
        let parts = map_indices(blocks, |b| {
            let lo = b * BLOCK + 1;
            let hi = ((b + 1) * BLOCK).min(n_max);
            let mut out = Vec::with_capacity(hi + 1 - lo);
            let mut terms = 0u64;
            for n in lo..=hi {
                if gcd(n as u64, c) != 1 {
                    out.push(0.0);
                    continue;
                }
                let mut k = 0.0;
                let mut m = 1usize;
                while m * m * n <= n_max {
                    let e = eta_m[m];
                    if e != 0.0 {
                        let t = (m * m * n) as f64;
                        k += e * (v.eval(t / yx) + afe.sign * v.eval(t / y_over_x));
                        terms += 1;
                    }
                    m += 1;
                }
                out.push(k / (n as f64).sqrt());
            }
            (out, terms)
        });
        let mut weights = vec![0.0; 1];
        let mut terms = 0;
        for (w, t) in parts {
            weights.extend(w);
            terms += t;
        }
        let cut_y = (n_max as f64 + 1.0) / (y * afe.x.max(1.0 / afe.x));
        let edge = v.eval_direct(cut_y)?.abs();
        let nm = n_max.max(1) as f64;
        let tail_estimate = edge * nm.sqrt() * (1.0 + nm.ln()).powi(setup.degree as i32);
        Ok(AfeKernel { y, conductor, n_max, weights, terms, tail_estimate })
    }
}

/// A central value `L^{(k)}(1/2, Π_K ⊗ Ω)` in the normalization
/// `2 Σ_m η(m)/m Σ_n C_Π(n) C_Ω(n)/√n V_{k+1}(m² n/Y)` (at `X = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct CentralValueResult {
    pub value: f64,
    pub k: u32,
    pub y: f64,
    pub root_number: i32,
    pub conductor: u64,
    pub n_max: usize,
    pub terms_used: u64,
    pub tail_estimate: f64,
    pub forced_parity: bool,
}

/// Coefficient and representation data shared by all characters of
/// `Pic(O_c)` for one setup.
#[derive(Debug, Clone)]
pub struct RankinFamily {
    pub setup: RankinSetup,
    pub tower: OrderTower,
    reps: RepresentationTable,
    coefficients: Vec<f64>,
}

impl RankinFamily {
    /// Tabulates `C_Π(n)` and `r_A(n)` for `n <= n_max`.
    pub fn new(tensor: &TensorProduct, setup: RankinSetup, n_max: usize) -> Result<Self> {
        let tower = OrderTower::new(setup.order)?;
        let coefficients = tensor.coefficients(n_max)?;
        let reps = RepresentationTable::new(tower.top(), n_max);
        Ok(RankinFamily { setup, tower, reps, coefficients })
    }

    /// Sizes the tables for the given evaluations at the top conductor.
    pub fn for_afes(tensor: &TensorProduct, setup: RankinSetup, afes: &[&Afe]) -> Result<Self> {
        let y = setup.y(setup.order.c);
        let n_max = afes.iter().map(|a| a.n_max(y)).max().unwrap_or(1).max(1);
        Self::new(tensor, setup, n_max)
    }

    pub fn n_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn reps(&self) -> &RepresentationTable {
        &self.reps
    }

    pub fn characters(&self) -> Vec<RingClassCharacter> {
        self.tower.characters()
    }

    pub fn kernel(&self, afe: &Afe, conductor: u64) -> Result<AfeKernel> {
        let kernel = AfeKernel::new(&self.setup, afe, conductor)?;
        if kernel.n_max > self.n_max() {
            return Err(coverage_err!(
                "the sum for conductor {conductor} runs to n = {} but coefficients are tabulated to {}",
                kernel.n_max,
                self.n_max()
            ));
        }
        Ok(kernel)
    }

    /// `Σ_n C_Π(n) C_Ω(n) K(n)/√n`.
    pub fn value_with(&self, kernel: &AfeKernel, chi: &Character) -> Result<f64> {
        if kernel.n_max > self.n_max() {
            return Err(coverage_err!("kernel runs past the tabulated coefficients"));
        }
        let w = &kernel.weights;
        let cf = &self.coefficients;
        Ok(chunked_sum(kernel.n_max, |i| {
            let n = i + 1;
            if w[n] == 0.0 || cf[n] == 0.0 {
                0.0
            } else {
                cf[n] * self.reps.character_sum(chi, n) * w[n]
            }
        }))
    }

    pub fn central_value(&self, afe: &Afe, chi: &RingClassCharacter) -> Result<CentralValueResult> {
        let kernel = self.kernel(afe, chi.conductor)?;
        self.result(afe, &kernel, chi)
    }

    fn result(&self, afe: &Afe, kernel: &AfeKernel, chi: &RingClassCharacter) -> Result<CentralValueResult> {
        Ok(CentralValueResult {
            value: self.value_with(kernel, &chi.chi)?,
            k: afe.k,
            y: kernel.y,
            root_number: afe.root_number,
            conductor: chi.conductor,
            n_max: kernel.n_max,
            terms_used: kernel.terms,
            tail_estimate: kernel.tail_estimate,
            forced_parity: afe.forced,
        })
    }

    /// `L^{(k)}(1/2, Π_K ⊗ Ω)` for `Ω` viewed on the order of its own
    /// conductor `e`: `C_Ω(n)` from the classes of `Pic(O_e)`, `n` prime to
    /// `e` and `m` prime to `e f(Π)`. For `e < c` the family series of
    /// [`RankinFamily::central_value`] lacks the Euler factors at the primes
    /// of `c` not dividing `e` and has no functional equation of conductor
    /// `Y(e)²`; this value does.
    pub fn primitive_value(&self, afe: &Afe, chi: &RingClassCharacter) -> Result<CentralValueResult> {
        let e = chi.conductor;
        if e == self.setup.order.c {
            return self.central_value(afe, chi);
        }
        let mut setup = self.setup.clone();
        setup.order = QuadOrder::new(setup.order.d_k, e)?;
        let kernel = AfeKernel::new(&setup, afe, e)?;
        if kernel.n_max > self.n_max() {
            return Err(coverage_err!("kernel runs past the tabulated coefficients"));
        }
        let psi = self.tower.descend(&chi.chi, e)?;
        let reps = RepresentationTable::new(self.tower.group(e)?, kernel.n_max);
        let w = &kernel.weights;
        let cf = &self.coefficients;
        let value = chunked_sum(kernel.n_max, |i| {
            let n = i + 1;
            if w[n] == 0.0 || cf[n] == 0.0 {
                0.0
            } else {
                cf[n] * reps.character_sum(&psi, n) * w[n]
            }
        });
        Ok(CentralValueResult {
            value,
            k: afe.k,
            y: kernel.y,
            root_number: afe.root_number,
            conductor: e,
            n_max: kernel.n_max,
            terms_used: kernel.terms,
            tail_estimate: kernel.tail_estimate,
            forced_parity: afe.forced,
        })
    }

    /// Central values of the given characters, each with `Y` of its own
    /// conductor. Kernels are shared between characters of equal conductor.
    pub fn central_values(&self, afe: &Afe, chars: &[RingClassCharacter]) -> Result<Vec<CentralValueResult>> {
        let mut conductors: Vec<u64> = chars.iter().map(|x| x.conductor).collect();
        conductors.sort_unstable();
        conductors.dedup();
        let kernels = conductors.iter().map(|&e| self.kernel(afe, e)).collect::<Result<Vec<_>>>()?;
        chars
            .iter()
            .map(|chi| {
                let at = conductors.binary_search(&chi.conductor).expect("conductor listed");
                self.result(afe, &kernels[at], chi)
            })
            .collect()
    }
}

/// A Dirichlet series value at `s₀` from smoothed sums
/// `S(X) = Σ b(a) a^{-s₀} e^{-a/X}` at `X, 2X, 4X`, fitted to
/// `A + R g(X) + B/X` where `R g(X)` is the contribution of a simple pole
/// at `s = 1` with residue `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedValue {
    pub s0: f64,
    /// The fitted constant `A`: the value at `s₀`, or its finite part when
    /// `s₀ = 1` is a pole.
    pub value: f64,
    /// The fitted residue `R` at `s = 1`.
    pub residue: f64,
    /// True when `|R|` exceeds [`POLE_THRESHOLD`].
    pub pole: bool,
    pub x: f64,
    pub partial_sums: [f64; 3],
}

/// Residues above this magnitude flag a pole at `s = 1`.
pub const POLE_THRESHOLD: f64 = 1e-2;

/// Smoothed sums run to `a <= SMOOTHING_REACH · 4X`, where `e^{-a/4X}` is
/// below `3·10⁻¹⁶`.
pub const SMOOTHING_REACH: f64 = 36.0;

/// Shape `g(X)` of the pole term: the residue of `Γ(w) X^w/(s₀ + w - 1)` at
/// `w = 1 - s₀`.
fn pole_shape(s0: f64, x: f64) -> Result<f64> {
    let n = s0 - 1.0;
    if (n - n.round()).abs() < 1e-12 {
        // double pole of Γ(w)X^w/(w + n) at w = -n
        let n = n.round() as i32;
        let mut fact = 1.0;
        for j in 1..=n {
            fact *= j as f64;
        }
        let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
        Ok(sgn / fact * x.powi(-n) * (x.ln() + digamma_real(n as f64 + 1.0)?))
    } else {
        Ok(gamma_real(1.0 - s0)? * x.powf(1.0 - s0))
    }
}

/// Fits `Σ_{a >= 1} b[a] a^{-s₀}` (with `b[0]` ignored).
pub fn smoothed_series(b: &[f64], s0: f64, x: f64) -> Result<SmoothedValue> {
    if !(s0 >= 1.0 && s0.is_finite()) {
        return Err(domain_err!("smoothed series are evaluated at s₀ >= 1, got {s0}"));
    }
    if !(x >= 10.0 && x.is_finite()) {
        return Err(domain_err!("smoothing length must be at least 10, got {x}"));
    }
    let reach = (SMOOTHING_REACH * 4.0 * x).ceil() as usize;
    if b.len() <= reach {
        return Err(coverage_err!(
            "smoothed sum at X = {x} needs coefficients to {reach}, have {}",
            b.len().saturating_sub(1)
        ));
    }
    let xs = [x, 2.0 * x, 4.0 * x];
    let mut sums = [0.0; 3];
    for (s, &xi) in sums.iter_mut().zip(&xs) {
        let top = (SMOOTHING_REACH * xi).ceil() as usize;
        *s = chunked_sum(top, |i| {
            let a = (i + 1) as f64;
            let v = b[i + 1];
            if v == 0.0 {
                0.0
            } else {
                v * (-s0 * a.ln() - a / xi).exp()
            }
        });
    }
    // Solve [1 g(X_i) 1/X_i] (A, R, B)^T = S(X_i).
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i] = [1.0, pole_shape(s0, xs[i])?, 1.0 / xs[i], sums[i]];
    }
    let sol = solve3(m).ok_or_else(|| numeric_err!("smoothed fit is singular at s₀ = {s0}"))?;
    Ok(SmoothedValue {
        s0,
        value: sol[0],
        residue: sol[1],
        pole: sol[1].abs() > POLE_THRESHOLD,
        x,
        partial_sums: sums,
    })
}

fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

fn coprime_mask(values: &mut [f64], c: u64) {
    if c == 1 {
        return;
    }
    for p in prime_divisors(c) {
        let p = p as usize;
        for v in values.iter_mut().step_by(p) {
            *v = 0.0;
        }
    }
}

/// Coefficient reach needed by [`smoothed_series`] at smoothing length `x`.
pub fn smoothing_reach(x: f64) -> usize {
    (SMOOTHING_REACH * 4.0 * x).ceil() as usize + 1
}

/// `ζ^{(c)}(2s₀) Σ_{(n, c) = 1} C_Π(n)²/n^{s₀}`. For a single self-dual
/// form this series is `ζ^{(c)}(s) L^{(c)}(s, Sym²)` up to finitely many
/// Euler factors and has a pole at `s = 1`, which the fit reports.
pub fn sym2_value(tensor: &TensorProduct, c: u64, s0: f64, x: f64) -> Result<SmoothedValue> {
    let mut b = tensor.coefficients(smoothing_reach(x))?;
    for v in b.iter_mut() {
        *v *= *v;
    }
    coprime_mask(&mut b, c);
    let mut out = smoothed_series(&b, s0, x)?;
    let mut z = zeta(2.0 * s0)?;
    for p in prime_divisors(c) {
        z *= 1.0 - (p as f64).powf(-2.0 * s0);
    }
    out.value *= z;
    out.residue *= z;
    Ok(out)
}

/// `Z(u) = Σ_{(a, c) = 1} C_Π(a²) a^{-u}` and `Z'(u)`. For a single form
/// `Z(u) = L^{(c)}(u, Sym²)/ζ^{(c)}(2u)` away from the level, finite at
/// `u = 1`; for tensor products it can have a pole there.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareSeries {
    pub value: SmoothedValue,
    pub derivative: SmoothedValue,
}

pub fn square_series(tensor: &TensorProduct, c: u64, u: f64, x: f64) -> Result<SquareSeries> {
    let mut b = tensor.square_coefficients(smoothing_reach(x))?;
    coprime_mask(&mut b, c);
    let value = smoothed_series(&b, u, x)?;
    for (a, v) in b.iter_mut().enumerate().skip(1) {
        *v *= -(a as f64).ln();
    }
    let derivative = smoothed_series(&b, u, x)?;
    Ok(SquareSeries { value, derivative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::Eigenform;
    use crate::quad::{ClassGroup, QuadOrder};

    #[test]
    fn hurwitz_against_zeta_values() {
        assert!((zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-14);
        // ζ(1/2) = -1.4603545088095868
        assert!((zeta(0.5).unwrap() + 1.460_354_508_809_586_8).abs() < 1e-12);
        // ζ(s, 1/2) = (2^s - 1) ζ(s)
        let s = 3.3;
        let lhs = hurwitz_zeta(s, 0.5).unwrap();
        assert!((lhs - (2f64.powf(s) - 1.0) * zeta(s).unwrap()).abs() < 1e-13);
        assert!((hurwitz_regular(1.0, 1.0) - EULER_GAMMA).abs() < 1e-14);
    }

    #[test]
    fn leibniz_and_digamma_routes() {
        let chi = QuadraticCharacter::new(-4).unwrap();
        assert!((dirichlet_l(chi, 1.0).unwrap() - PI / 4.0).abs() < 1e-13);
        assert!((dirichlet_l_one_digamma(chi).unwrap() - PI / 4.0).abs() < 1e-13);
        // Catalan's constant
        assert!((dirichlet_l(chi, 2.0).unwrap() - 0.915_965_594_177_219).abs() < 1e-14);
    }

    #[test]
    fn class_number_formula() {
        for d in [-3i64, -4, -7, -8, -11, -23, -47, -71, -163] {
            let h = ClassGroup::new(d).unwrap().order() as f64;
            let w = crate::quad::unit_count(d) as f64;
            let want = 2.0 * PI * h / (w * (d.unsigned_abs() as f64).sqrt());
            let got = dirichlet_l(QuadraticCharacter::new(d).unwrap(), 1.0).unwrap();
            assert!((got - want).abs() < 1e-12, "D = {d}: {got} vs {want}");
        }
    }

    #[test]
    fn partial_log_derivative_converges() {
        let chi = QuadraticCharacter::new(-7).unwrap();
        let ld = partial_dirichlet_log_derivative(chi, 1.0, 3, 1e-4).unwrap();
        assert!(ld.discrepancy() < 1e-6, "{ld:?}");
    }

    #[test]
    fn imprimitive_characters_use_their_own_order() {
        let t = TensorProduct::single(Eigenform::delta(5000).unwrap());
        let top = RankinSetup::new(&t, QuadOrder::new(-7, 2).unwrap(), RootNumberRule::BaseChange).unwrap();
        let base = RankinSetup::new(&t, QuadOrder::new(-7, 1).unwrap(), RootNumberRule::BaseChange).unwrap();
        let afe = Afe::new(&top, AfeOptions::default()).unwrap();
        let fam = RankinFamily::for_afes(&t, top, &[&afe]).unwrap();
        let small = RankinFamily::for_afes(&t, base, &[&afe]).unwrap();
        let trivial = &fam.characters()[0];
        assert_eq!(trivial.conductor, 1);
        let want = small.central_value(&afe, &small.characters()[0]).unwrap().value;
        assert!((fam.primitive_value(&afe, trivial).unwrap().value - want).abs() < 1e-12);
        // the family series drops n even and is a different number
        assert!((fam.central_value(&afe, trivial).unwrap().value - want).abs() > 1e-3);
    }

    #[test]
    fn root_numbers() {
        let delta = TensorProduct::single(Eigenform::delta(100).unwrap());
        let s = RankinSetup::new(&delta, QuadOrder::new(-4, 1).unwrap(), RootNumberRule::BaseChange).unwrap();
        assert_eq!((s.root_number, s.k), (-1, 1));
        let s = RankinSetup::new(&delta, QuadOrder::new(-4, 1).unwrap(), RootNumberRule::Supplied).unwrap();
        assert_eq!((s.root_number, s.k), (1, 0));
        let curve = crate::hecke::EllipticCurve::new([0, -1, 1, -10, -20]).unwrap();
        let e = TensorProduct::single(Eigenform::elliptic_curve(&curve, 100, Some(11)).unwrap());
        // η_{-7}(11) = +1, η_{-3}(11) = -1
        let s = RankinSetup::new(&e, QuadOrder::new(-7, 1).unwrap(), RootNumberRule::BaseChange).unwrap();
        assert_eq!(s.root_number, -1);
        let s = RankinSetup::new(&e, QuadOrder::new(-3, 1).unwrap(), RootNumberRule::BaseChange).unwrap();
        assert_eq!(s.root_number, 1);
        assert!(RankinSetup::new(&e, QuadOrder::new(-11, 1).unwrap(), RootNumberRule::BaseChange).is_err());
        let dd = TensorProduct::new(vec![Eigenform::delta(100).unwrap(), Eigenform::delta(100).unwrap()]).unwrap();
        let s = RankinSetup::new(&dd, QuadOrder::new(-4, 1).unwrap(), RootNumberRule::BaseChange).unwrap();
        assert_eq!(s.root_number, 1);
    }

    #[test]
    fn smoothed_fit_recovers_zeta_finite_part() {
        // Σ 1/n^s: pole with residue 1, finite part γ at s = 1.
        let b = vec![1.0; smoothing_reach(200.0)];
        let v = smoothed_series(&b, 1.0, 200.0).unwrap();
        assert!(v.pole && (v.residue - 1.0).abs() < 1e-5, "{v:?}");
        assert!((v.value - EULER_GAMMA).abs() < 1e-5, "{v:?}");
        let v = smoothed_series(&b, 1.5, 200.0).unwrap();
        assert!((v.value - zeta(1.5).unwrap()).abs() < 1e-5, "{v:?}");
        let v = smoothed_series(&b, 2.0, 200.0).unwrap();
        assert!((v.value - PI * PI / 6.0).abs() < 1e-5, "{v:?}");
        // alternating series: no pole, value log 2
        let alt: Vec<f64> = (0..smoothing_reach(200.0)).map(|n| if n % 2 == 1 { 1.0 } else { -1.0 }).collect();
        let v = smoothed_series(&alt, 1.0, 200.0).unwrap();
        assert!(!v.pole && (v.value - 2f64.ln()).abs() < 1e-4, "{v:?}");
    }
}
