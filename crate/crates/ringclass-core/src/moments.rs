//! Averages of central values over ring class characters.
//!
//! Route A averages the per-character values of [`RankinFamily`]. Route B
//! never touches a character: it unwinds the average by orthogonality into
//! principal-form counts of the suborders `O_e`, `e | c`, and absorbs the
//! conductor dependence of the cutoff by partial summation over the
//! divisors with modified cutoffs. The two agree exactly up to rounding.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{divisors, gcd, moebius};
use crate::error::{domain_err, numeric_err, pole_err};
use crate::exec::{chunked_sum, map_indices};
use crate::hecke::TensorProduct;
#[allow(unused_imports)]
use crate::num::Float;
use crate::num::C64;
use crate::lseries::{
    partial_dirichlet_l, partial_dirichlet_log_derivative, square_series, sym2_value, Afe, AfeOptions, CentralValueResult,
    LogDerivative, QuadraticCharacter, RankinFamily, RankinSetup, SmoothedValue, SquareSeries,
};
use crate::quad::{form_representations, unit_count, Form, OrderTower};
use crate::special::{Contour, ModifiedCutoff};
use crate::Result;

/// Route A: the mean of the per-character central values.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteA {
    pub per_character: Vec<CentralValueResult>,
    pub average: f64,
}

/// `H = (1/h) Σ_Ω L^{(k)}(1/2, Π_K ⊗ Ω)`, each `Ω` with `Y` of its own
/// conductor.
pub fn average_route_a(family: &RankinFamily, afe: &Afe) -> Result<RouteA> {
    let chars = family.characters();
    let per_character = family.central_values(afe, &chars)?;
    let average = per_character.iter().map(|v| v.value).sum::<f64>() / per_character.len() as f64;
    Ok(RouteA { per_character, average })
}

/// Order of the divisors `d_1, ..., d_J = c` in the partial summation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisorOrder {
    /// Increasing size.
    Ascending,
    /// Increasing number of prime factors (with multiplicity), then size.
    ByOmega,
}

impl DivisorOrder {
    fn arrange(self, mut ds: Vec<u64>) -> Vec<u64> {
        match self {
            DivisorOrder::Ascending => ds.sort_unstable(),
            DivisorOrder::ByOmega => ds.sort_by_key(|&d| (big_omega(d), d)),
        }
        ds
    }
}

fn big_omega(mut n: u64) -> u32 {
    let mut k = 0;
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        p += 1;
    }
    k + u32::from(n > 1)
}

/// Which partial summation route B evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteBVariant {
    /// Cumulative coefficient sums `G_j = Σ_{i <= j} g_{d_i}` with
    /// `g_d(n) = Σ_{e | d} μ(d/e) h(O_e) ρ_e(n)`, modified cutoffs evaluated
    /// at the successor's `Y`. Exact for every divisor order.
    Exact,
    /// Difference terms `h(O_{c'}) D̃(c')` built from `r(n)` of the maximal
    /// order with `V_{c'}` at `M c'^r`, as in the closed form of the average.
    /// Agrees with [`RouteBVariant::Exact`] only when the divisor chain is
    /// the divisor lattice of a prime power and even then only up to the
    /// argument of the difference terms.
    Literal,
}

/// Route B of the average: `½ H = D_{k+1}(c) - Σ_j T_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteB {
    pub variant: RouteBVariant,
    pub order: Vec<u64>,
    /// The sum at the top conductor: principal counts of `O_c` for
    /// [`RouteBVariant::Exact`], of `O_K` for [`RouteBVariant::Literal`].
    pub d_leading: f64,
    /// `(c', T_{c'})` for each divisor `c' ≠ c`, already divided by `h(O_c)`.
    pub d_tilde_terms: Vec<(u64, f64)>,
    pub average: f64,
}

impl RouteB {
    pub fn difference_total(&self) -> f64 {
        self.d_tilde_terms.iter().map(|t| t.1).sum()
    }
}

/// `W(n) = Σ_{(m, c f) = 1} η(m)/m · v(m² n/y)` for `n <= n_max`.
fn m_sums(setup: &RankinSetup, n_max: usize, y: f64, v: &(dyn Fn(f64) -> f64 + Sync)) -> Vec<f64> {
    let cm = setup.m_modulus();
    let order = setup.order;
    let m_max = (n_max as f64).sqrt() as usize + 1;
    let eta_m: Vec<f64> = (0..=m_max)
        .map(|m| if m == 0 || gcd(m as u64, cm) != 1 { 0.0 } else { order.eta(m as i64) as f64 / m as f64 })
        .collect();
    let mut out = map_indices(n_max + 1, |n| {
        if n == 0 {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut m = 1;
        while m * m * n <= n_max {
            if eta_m[m] != 0.0 {
                acc += eta_m[m] * v((m * m * n) as f64 / y);
            }
            m += 1;
        }
        acc
    });
    out[0] = 0.0;
    out
}

/// `ρ_e(n)`: representations of `n` by the principal form of discriminant
/// `D_K e²`, divided by the number of automorphs.
fn principal_counts(d_k: i64, e: u64, n_max: usize) -> Result<Vec<f64>> {
    let disc = d_k * (e * e) as i64;
    let w = unit_count(disc) as f64;
    Ok(form_representations(&Form::principal(disc)?, n_max).into_iter().map(|r| r as f64 / w).collect())
}

/// Evaluates route B for the family's setup. Requires the generic parity and
/// `X = 1`, where the two halves of the functional equation coincide.
pub fn average_route_b(
    family: &RankinFamily,
    afe: &Afe,
    variant: RouteBVariant,
    divisor_order: DivisorOrder,
) -> Result<RouteB> {
    if afe.forced || afe.x != 1.0 {
        return Err(domain_err!("route B needs the generic parity and X = 1"));
    }
    let setup = &family.setup;
    let tower = &family.tower;
    let c = setup.order.c;
    let r = setup.degree;
    let d_k = setup.order.d_k;
    let order = {
        let mut ds = divisor_order.arrange(divisors(c)?);
        ds.retain(|&d| d != c);
        ds.push(c);
        ds
    };
    let h: Vec<f64> = order.iter().map(|&e| tower.group(e).map(|g| g.order() as f64)).collect::<Result<_>>()?;
    let h_c = *h.last().unwrap();
    let y_c = setup.y(c);
    let n_max = afe.n_max(y_c);
    if n_max > family.n_max() {
        return Err(crate::error::coverage_err!("route B runs to n = {n_max}, tabulated to {}", family.n_max()));
    }
    let cf = family.coefficients();
    let coprime: Vec<bool> = (0..=n_max).map(|n| n > 0 && gcd(n as u64, c) == 1).collect();
    let r_k = principal_counts(d_k, 1, n_max)?;
    let v = &afe.cutoff;

    // Σ_m η(m)/m Σ_{(n,c)=1} ρ(n) C(n)/√n V(m²n/Y_c)
    let w_top = m_sums(setup, n_max, y_c, &|t| v.eval(t));
    let weighted = |g: &(dyn Fn(usize) -> f64 + Sync), w: &[f64]| -> f64 {
        chunked_sum(n_max, |i| {
            let n = i + 1;
            if !coprime[n] || cf[n] == 0.0 || w[n] == 0.0 {
                0.0
            } else {
                g(n) * cf[n] * w[n] / (n as f64).sqrt()
            }
        })
    };
    let top_counts = match variant {
        RouteBVariant::Exact => principal_counts(d_k, c, n_max)?,
        RouteBVariant::Literal => r_k.clone(),
    };
    let d_leading = weighted(&|n| top_counts[n], &w_top);

    let mut d_tilde_terms = Vec::with_capacity(order.len() - 1);
    match variant {
        RouteBVariant::Exact => {
            let rho: Vec<Vec<f64>> =
                order.iter().map(|&e| principal_counts(d_k, e, n_max)).collect::<Result<_>>()?;
            let pos = |e: u64| order.iter().position(|&d| d == e).expect("divisor listed");
            // g_d(n) = Σ_{e | d} μ(d/e) h_e ρ_e(n)
            let g: Vec<Vec<f64>> = order
                .iter()
                .map(|&d| {
                    let mut out = vec![0.0; n_max + 1];
                    for e in divisors(d)? {
                        let mu = moebius(d / e)? as f64;
                        if mu != 0.0 {
                            let j = pos(e);
                            for (o, x) in out.iter_mut().zip(&rho[j]) {
                                *o += mu * h[j] * x;
                            }
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<_>>()?;
            let mut cumulative = vec![0.0; n_max + 1];
            for j in 0..order.len() - 1 {
                for (acc, x) in cumulative.iter_mut().zip(&g[j]) {
                    *acc += x;
                }
                let ratio = order[j] as f64 / order[j + 1] as f64;
                let modified: ModifiedCutoff = v.modified(ratio, r)?;
                let w = m_sums(setup, n_max, setup.y(order[j + 1]), &|t| modified.eval(t));
                let term = weighted(&|n| cumulative[n], &w) / h_c;
                d_tilde_terms.push((order[j], term));
            }
        }
        RouteBVariant::Literal => {
            for j in 0..order.len() - 1 {
                let (cp, cpp) = (order[j], order[j + 1]);
                let modified = v.modified(cp as f64 / cpp as f64, r)?;
                let w = m_sums(setup, n_max, setup.y(cp), &|t| modified.eval(t));
                let term = chunked_sum(n_max, |i| {
                    let n = i + 1;
                    if gcd(n as u64, cp) != 1 || cf[n] == 0.0 || w[n] == 0.0 {
                        0.0
                    } else {
                        r_k[n] * cf[n] * w[n] / (n as f64).sqrt()
                    }
                });
                d_tilde_terms.push((cp, h[j] * term / h_c));
            }
        }
    }
    let half = d_leading - d_tilde_terms.iter().map(|t| t.1).sum::<f64>();
    Ok(RouteB { variant, order, d_leading, d_tilde_terms, average: 2.0 * half })
}

/// Inputs of the main term of `H_c^{(k)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MainTermInputs {
    /// `L^{(c f)}(1, η)`.
    pub l_one: f64,
    /// `L'/L^{(c f)}(1, η)` with its refinement.
    pub l_log_derivative: LogDerivative,
    /// `Z(1) = Σ_{(a, c) = 1} C_Π(a²)/a` and `Z'(1)`.
    pub square: SquareSeries,
    /// `ζ^{(c)}(2s) Σ C_Π(n)²/n^s` at `s = 1` with its pole diagnostic.
    pub sym2_at_one: SmoothedValue,
    /// The same series at the offset point `s₀ = 1 + 10⁻³`.
    pub sym2_offset: SmoothedValue,
    /// `w_K`.
    pub w: u32,
    pub y: f64,
    /// `L_∞'/L_∞(1/2)`.
    pub arch_log_derivative: f64,
}

/// Offset used for the symmetric square series when `s = 1` is a pole.
pub const SYM2_OFFSET: f64 = 1e-3;

impl MainTermInputs {
    /// Evaluates every input; the smoothed series use length `x`.
    pub fn compute(tensor: &TensorProduct, setup: &RankinSetup, x: f64) -> Result<Self> {
        let c = setup.order.c;
        let eta = QuadraticCharacter::new(setup.order.d_k)?;
        let cm = setup.m_modulus();
        Ok(MainTermInputs {
            l_one: partial_dirichlet_l(eta, 1.0, cm)?,
            l_log_derivative: partial_dirichlet_log_derivative(eta, 1.0, cm, 1e-4)?,
            square: square_series(tensor, c, 1.0, x)?,
            sym2_at_one: sym2_value(tensor, c, 1.0, x)?,
            sym2_offset: sym2_value(tensor, c, 1.0 + SYM2_OFFSET, x)?,
            w: unit_count(setup.order.d_k),
            y: setup.y(c),
            arch_log_derivative: setup.arch()?.log_derivative(C64::new(0.5, 0.0))?.re,
        })
    }
}

/// The predicted average:
/// `k = 0`: `(4/w) L(1, η) Z(1)`;
/// `k = 1`: `(4/w) L(1, η) Z(1) [log Y + L_∞'/L_∞(1/2) + 2 L'/L(1, η) + 2 Z'/Z(1)]`.
/// These are the residues at `s = 0` of
/// `(4/w) L(2s + 1, η) Z(2s + 1) V̂_{k+1}(s) Y^s`. A pole of `Z` at 1 is
/// refused unless acknowledged, in which case the fitted finite parts are
/// used.
pub fn main_term(inputs: &MainTermInputs, k: u32, acknowledge_pole: bool) -> Result<f64> {
    let z = &inputs.square;
    if (z.value.pole || z.derivative.pole) && !acknowledge_pole {
        return Err(pole_err!(
            "Z(u) = Σ C(a²) a^-u has a fitted pole at u = 1 (residue {:.3e})",
            z.value.residue
        ));
    }
    let base = 4.0 / inputs.w as f64 * inputs.l_one * z.value.value;
    match k {
        0 => Ok(base),
        1 => Ok(base
            * (inputs.y.ln()
                + inputs.arch_log_derivative
                + 2.0 * inputs.l_log_derivative.value
                + 2.0 * z.derivative.value / z.value.value)),
        _ => Err(domain_err!("parity k must be 0 or 1, got {k}")),
    }
}

/// Both sides of the Mellin identity for the `b = 0` part of `D_{k+1}(c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct B0Check {
    pub direct: f64,
    pub contour: f64,
    pub gap: f64,
    pub relative_gap: f64,
}

/// Terms of the Dirichlet series on `Re u = 5` in the contour side.
pub const B0_SERIES_TERMS: usize = 2000;

/// `(2/w) Σ_{(m, c f) = 1} η(m)/m Σ_{(a, c) = 1} C(a²)/a V(m² a²/Y)` against
/// `(1/2πi) ∫_(2) (2/w) L(2s + 1, η) Z(2s + 1) V̂(s) Y^s ds`.
pub fn b0_contour_check(tensor: &TensorProduct, setup: &RankinSetup, afe: &Afe) -> Result<B0Check> {
    let c = setup.order.c;
    let cm = setup.m_modulus();
    let order = setup.order;
    let w = unit_count(order.d_k) as f64;
    let y = setup.y(c);
    let v = &afe.cutoff;
    let reach = (v.decay_point() * y).sqrt() as usize + 1;
    let a_max = reach.max(B0_SERIES_TERMS);
    let sq = tensor.square_coefficients(a_max)?;
    let eta_m: Vec<f64> = (0..=a_max)
        .map(|m| if m == 0 || gcd(m as u64, cm) != 1 { 0.0 } else { order.eta(m as i64) as f64 })
        .collect();
    let z_a: Vec<f64> = (0..=a_max).map(|a| if a == 0 || gcd(a as u64, c) != 1 { 0.0 } else { sq[a] }).collect();

    let mut direct = 0.0;
    for m in 1..=reach {
        if eta_m[m] == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for a in 1..=reach / m {
            if z_a[a] != 0.0 {
                let t = (m * m * a * a) as f64;
                inner += z_a[a] / a as f64 * v.eval(t / y);
            }
        }
        direct += eta_m[m] / m as f64 * inner;
    }
    direct *= 2.0 / w;

    let series = |coef: &[f64], u: C64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (n, &x) in coef.iter().enumerate().take(B0_SERIES_TERMS + 1).skip(1) {
            if x != 0.0 {
                acc += x * (-u * (n as f64).ln()).exp();
            }
        }
        acc
    };
    let integrand = |s: C64| -> Result<C64> {
        let u = 2.0 * s + 1.0;
        Ok(2.0 / w * series(&eta_m, u) * series(&z_a, u) * v.mellin(s)?)
    };
    let tol = v.tolerances;
    let line = Contour::vertical_line(integrand, 2.0, tol.panel_width, tol.truncation, tol.max_panels)?;
    let contour = line.eval(-y.ln());
    if !contour.is_finite() {
        return Err(numeric_err!("contour side of the b = 0 identity is not finite"));
    }
    let gap = (direct - contour).abs();
    Ok(B0Check { direct, contour, gap, relative_gap: gap / direct.abs().max(f64::MIN_POSITIVE) })
}

/// Averages over the characters of each `Pic(O_e)`, `e | c`, and over the
/// primitive characters of conductor exactly `e`, all taken from the values
/// of one family at the top order.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveAverages {
    pub divisors: Vec<u64>,
    /// `h(O_e)`.
    pub class_numbers: Vec<u64>,
    /// `|P(e)|`, the number of characters of conductor exactly `e`.
    pub primitive_counts: Vec<u64>,
    /// `H_e`, the mean over characters with conductor dividing `e`.
    pub averages: Vec<f64>,
    /// `𝒫_e` as the direct mean over characters of conductor `e`.
    pub primitive_direct: Vec<Option<f64>>,
    /// `𝒫_e` from `|P(e)| 𝒫_e = Σ_{e' | e} μ(e/e') h(O_{e'}) H_{e'}`.
    pub primitive_mobius: Vec<Option<f64>>,
}

impl PrimitiveAverages {
    pub fn new(tower: &OrderTower, per_character: &[CentralValueResult]) -> Result<Self> {
        let ds = tower.divisors.clone();
        let hs = tower.class_numbers();
        if per_character.len() as u64 != *hs.last().unwrap() {
            return Err(domain_err!(
                "{} values given for {} characters",
                per_character.len(),
                hs.last().unwrap()
            ));
        }
        let mut averages = Vec::with_capacity(ds.len());
        let mut primitive_counts = Vec::with_capacity(ds.len());
        let mut primitive_direct = Vec::with_capacity(ds.len());
        for (&e, &h) in ds.iter().zip(&hs) {
            let through: Vec<f64> =
                per_character.iter().filter(|v| e % v.conductor == 0).map(|v| v.value).collect();
            if through.len() as u64 != h {
                return Err(numeric_err!("{} characters factor through O_{e} but h = {h}", through.len()));
            }
            averages.push(through.iter().sum::<f64>() / h as f64);
            let exact: Vec<f64> = per_character.iter().filter(|v| v.conductor == e).map(|v| v.value).collect();
            primitive_counts.push(exact.len() as u64);
            primitive_direct.push((!exact.is_empty()).then(|| exact.iter().sum::<f64>() / exact.len() as f64));
        }
        let mut out = PrimitiveAverages {
            divisors: ds,
            class_numbers: hs,
            primitive_counts,
            averages,
            primitive_direct,
            primitive_mobius: Vec::new(),
        };
        out.primitive_mobius = (0..out.divisors.len()).map(|i| out.mobius_at(i)).collect::<Result<_>>()?;
        Ok(out)
    }

    fn index(&self, e: u64) -> Result<usize> {
        self.divisors.iter().position(|&d| d == e).ok_or_else(|| domain_err!("{e} is not a listed divisor"))
    }

    /// `Σ_{e' | e} μ(e/e') h(O_{e'}) H_{e'}`.
    pub fn weighted_primitive_sum(&self, e: u64) -> Result<f64> {
        let mut acc = 0.0;
        for ep in divisors(e)? {
            let j = self.index(ep)?;
            acc += moebius(e / ep)? as f64 * self.class_numbers[j] as f64 * self.averages[j];
        }
        Ok(acc)
    }

    fn mobius_at(&self, i: usize) -> Result<Option<f64>> {
        let count = self.primitive_counts[i];
        let s = self.weighted_primitive_sum(self.divisors[i])?;
        Ok((count > 0).then(|| s / count as f64))
    }

    /// `𝒫_c` for the top conductor.
    pub fn primitive_subaverage(&self) -> Option<f64> {
        *self.primitive_mobius.last().unwrap()
    }

    /// `|Σ_{e | c} |P(e)| 𝒫_e - h(O_c) H_c|`, with `𝒫` from the Möbius
    /// inversion.
    pub fn round_trip_gap(&self) -> f64 {
        let lhs: f64 = self
            .primitive_counts
            .iter()
            .zip(&self.primitive_mobius)
            .map(|(&n, p)| n as f64 * p.unwrap_or(0.0))
            .sum();
        let top = self.divisors.len() - 1;
        (lhs - self.class_numbers[top] as f64 * self.averages[top]).abs()
    }

    /// Largest gap between the Möbius and the direct primitive averages.
    pub fn mobius_gap(&self) -> f64 {
        self.primitive_mobius
            .iter()
            .zip(&self.primitive_direct)
            .map(|(a, b)| match (a, b) {
                (Some(x), Some(y)) => (x - y).abs(),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }
}

/// Which routes a report evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Routes {
    A,
    B,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentOptions {
    pub afe: AfeOptions,
    pub routes: Routes,
    pub divisor_order: DivisorOrder,
    /// Smoothing length for the main-term series; `None` skips the main term.
    pub main_term_x: Option<f64>,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions {
            afe: AfeOptions::default(),
            routes: Routes::Both,
            divisor_order: DivisorOrder::Ascending,
            main_term_x: None,
        }
    }
}

/// A full report of one average.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub label: String,
    pub d_k: i64,
    pub c: u64,
    pub k: u32,
    pub y: f64,
    pub root_number: i32,
    /// `(conductor, value)` per character, in class group order.
    pub per_character: Vec<(u64, f64)>,
    pub route_a: Option<f64>,
    pub route_b: Option<RouteB>,
    pub main_inputs: Option<MainTermInputs>,
    pub main_term: Option<f64>,
}

impl MomentReport {
    /// The average, from route A when present.
    pub fn h(&self) -> Option<f64> {
        self.route_a.or(self.route_b.as_ref().map(|b| b.average))
    }

    pub fn route_gap(&self) -> Option<f64> {
        Some((self.route_a? - self.route_b.as_ref()?.average).abs())
    }

    pub fn residual(&self) -> Option<f64> {
        Some(self.h()? - self.main_term?)
    }
}

/// Evaluates the average of one setup by the requested routes.
pub fn moment_report(tensor: &TensorProduct, setup: &RankinSetup, opts: &MomentOptions) -> Result<MomentReport> {
    let afe = Afe::new(setup, opts.afe)?;
    let family = RankinFamily::for_afes(tensor, setup.clone(), &[&afe])?;
    let (per_character, route_a) = if opts.routes == Routes::B {
        (Vec::new(), None)
    } else {
        let a = average_route_a(&family, &afe)?;
        (a.per_character.iter().map(|v| (v.conductor, v.value)).collect(), Some(a.average))
    };
    let route_b = match opts.routes {
        Routes::A => None,
        _ => Some(average_route_b(&family, &afe, RouteBVariant::Exact, opts.divisor_order)?),
    };
    let (main_inputs, main) = match opts.main_term_x {
        Some(x) => {
            let inputs = MainTermInputs::compute(tensor, setup, x)?;
            let m = main_term(&inputs, afe.k, false)?;
            (Some(inputs), Some(m))
        }
        None => (None, None),
    };
    Ok(MomentReport {
        label: setup.label.clone(),
        d_k: setup.order.d_k,
        c: setup.order.c,
        k: afe.k,
        y: setup.y(setup.order.c),
        root_number: setup.root_number,
        per_character,
        route_a,
        route_b,
        main_inputs,
        main_term: main,
    })
}

/// One point of the difference-term decay along `c = p^j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParasitePoint {
    pub c: u64,
    pub y: f64,
    /// `|Σ_{c' ≠ c} T_{c'}|`.
    pub difference: f64,
    pub average: f64,
}

/// The difference terms of route B along `c = p^j`, `0 <= j <= j_max`.
pub fn parasite_decay(
    tensor: &TensorProduct,
    d_k: i64,
    p: u64,
    j_max: u32,
    rule: crate::lseries::RootNumberRule,
) -> Result<Vec<ParasitePoint>> {
    let mut out = Vec::new();
    for j in 0..=j_max {
        let c = p.checked_pow(j).ok_or_else(|| domain_err!("{p}^{j} overflows"))?;
        let setup = RankinSetup::new(tensor, crate::quad::QuadOrder::new(d_k, c)?, rule)?;
        let report = moment_report(tensor, &setup, &MomentOptions { routes: Routes::B, ..Default::default() })?;
        let b = report.route_b.expect("route B requested");
        out.push(ParasitePoint { c, y: report.y, difference: b.difference_total().abs(), average: b.average });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::Eigenform;
    use crate::lseries::RootNumberRule;
    use crate::quad::QuadOrder;

    fn delta() -> TensorProduct {
        TensorProduct::single(Eigenform::delta(20_000).unwrap())
    }

    #[test]
    fn routes_agree_on_small_panel() {
        let t = delta();
        let setup = RankinSetup::new(&t, QuadOrder::new(-4, 6).unwrap(), RootNumberRule::BaseChange).unwrap();
        let afe = Afe::new(&setup, AfeOptions::default()).unwrap();
        let fam = RankinFamily::for_afes(&t, setup, &[&afe]).unwrap();
        let a = average_route_a(&fam, &afe).unwrap();
        for ord in [DivisorOrder::Ascending, DivisorOrder::ByOmega] {
            let b = average_route_b(&fam, &afe, RouteBVariant::Exact, ord).unwrap();
            assert!((a.average - b.average).abs() < 1e-9 * a.average.abs().max(1.0), "{} vs {}", a.average, b.average);
        }
    }

    #[test]
    fn mobius_round_trip() {
        let t = delta();
        let setup = RankinSetup::new(&t, QuadOrder::new(-7, 6).unwrap(), RootNumberRule::BaseChange).unwrap();
        let afe = Afe::new(&setup, AfeOptions::default()).unwrap();
        let fam = RankinFamily::for_afes(&t, setup, &[&afe]).unwrap();
        let a = average_route_a(&fam, &afe).unwrap();
        let p = PrimitiveAverages::new(&fam.tower, &a.per_character).unwrap();
        assert!(p.round_trip_gap() < 1e-9);
        assert!(p.mobius_gap() < 1e-9);
        assert_eq!(p.primitive_counts.iter().sum::<u64>(), *p.class_numbers.last().unwrap());
    }

    #[test]
    fn big_omega_counts() {
        assert_eq!(big_omega(1), 0);
        assert_eq!(big_omega(12), 3);
        assert_eq!(big_omega(30), 3);
    }
}
