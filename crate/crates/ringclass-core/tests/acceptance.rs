//! Exit criteria, one line each. Runs without the libtest harness so that the
//! summary is always printed; the process fails if any criterion fails.

use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64 as C64;
use ringclass_core::arith::{gcd, is_fundamental_discriminant, kronecker_symbol};
use ringclass_core::hecke::{Eigenform, TensorProduct};
use ringclass_core::lseries::{
    dirichlet_l, Afe, AfeOptions, QuadraticCharacter, RankinFamily, RankinSetup, RootNumberRule,
};
use ringclass_core::moments::{
    average_route_a, average_route_b, b0_contour_check, main_term, DivisorOrder, MainTermInputs,
    PrimitiveAverages, RouteBVariant,
};
use ringclass_core::quad::{
    dedekind_class_number, unit_count, Character, ClassGroup, QuadOrder, RepresentationTable,
};
use ringclass_core::shifted::{exponent_fit, Window};
use ringclass_core::special::{whittaker_small_y_exponent, ArchFactor, CutoffFunction, TestFunction};

type Outcome = Result<(bool, String), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Δ tabulated far enough for the shifted sums at `Y = 10⁶` and the
/// main-term series at smoothing length `MAIN_X`.
const DELTA_P_MAX: u64 = 2_000_100;
const MAIN_X: f64 = 1e4;

fn delta() -> &'static Eigenform {
    static DELTA: OnceLock<Eigenform> = OnceLock::new();
    DELTA.get_or_init(|| Eigenform::delta(DELTA_P_MAX).expect("Δ table"))
}

fn delta_tensor() -> TensorProduct {
    TensorProduct::single(delta().clone())
}

fn setup(d_k: i64, c: u64) -> Result<RankinSetup, String> {
    RankinSetup::new(&delta_tensor(), QuadOrder::new(d_k, c).map_err(err)?, RootNumberRule::BaseChange).map_err(err)
}

fn fundamentals(lo: i64) -> Vec<i64> {
    (lo..0).rev().filter(|&d| is_fundamental_discriminant(d)).collect()
}

fn class_group_exactness() -> Outcome {
    let mut cases = 0;
    let mut bad = Vec::new();
    for d in fundamentals(-200) {
        let h_k = ClassGroup::new(d).map_err(err)?.order() as u64;
        for c in 1..=12u64 {
            let enumerated = ClassGroup::new(d * (c * c) as i64).map_err(err)?.order() as u64;
            let formula = dedekind_class_number(d, c, h_k).map_err(err)?;
            cases += 1;
            if formula != enumerated {
                bad.push((d, c, formula, enumerated));
            }
        }
    }
    Ok((bad.is_empty(), format!("{cases} orders, mismatches {bad:?}")))
}

/// `Σ_Ω Ω(A)` read as a character of the dual group, tested by exact
/// equidistribution of the values.
fn orthogonality_exact(g: &ClassGroup) -> bool {
    let chars = g.characters();
    let h = g.order() as i64;
    (0..g.order()).all(|a| {
        let column = Character { exps: Vec::new(), values: chars.iter().map(|x| x.values[a]).collect(), modulus: g.exponent() };
        let (uniform, sum) = column.sum_is_exact();
        uniform && sum == if a == 0 { h } else { 0 }
    })
}

fn orthogonality_and_counting() -> Outcome {
    const N: usize = 2000;
    let mut orders = Vec::new();
    'outer: for d in fundamentals(-100) {
        for c in 2..=8u64 {
            orders.push((d, c));
            if orders.len() == 50 {
                break 'outer;
            }
        }
    }
    let mut orth_bad = 0;
    let mut principal_vs_principal = 0;
    let mut principal_vs_all = 0;
    let mut classes_vs_all = 0;
    let mut first = None;
    let mut checked = 0;
    for &(d, c) in &orders {
        let g = ClassGroup::new(d * (c * c) as i64).map_err(err)?;
        if !orthogonality_exact(&g) {
            orth_bad += 1;
        }
        let t = RepresentationTable::new(&g, N);
        let top = RepresentationTable::new(&ClassGroup::new(d).map_err(err)?, N);
        for n in (1..=N).filter(|&n| gcd(n as u64, c) == 1) {
            checked += 1;
            if t.r(0, n) != top.r(0, n) {
                principal_vs_principal += 1;
                first.get_or_insert((d, c, n, t.r(0, n), top.r(0, n)));
            }
            if t.r(0, n) != top.total(n) {
                principal_vs_all += 1;
            }
            if t.total(n) != top.total(n) {
                classes_vs_all += 1;
            }
        }
    }
    let detail = format!(
        "{} orders; orthogonality failures {orth_bad}; principal class of O_c vs principal ideals of O_K: \
         {principal_vs_principal}/{checked} failures (first (D, c, n, r_c, r_K) = {first:?}); \
         vs all ideals of O_K: {principal_vs_all}; sum over Pic(O_c) vs all ideals of O_K: {classes_vs_all}",
        orders.len()
    );
    Ok((orth_bad == 0 && principal_vs_principal == 0, detail))
}

fn classical_oracles() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [-3i64, -4, -7, -8, -23] {
        let h = ClassGroup::new(d).map_err(err)?.order() as f64;
        let w = unit_count(d) as f64;
        let want = 2.0 * std::f64::consts::PI * h / (w * (d.unsigned_abs() as f64).sqrt());
        let got = dirichlet_l(QuadraticCharacter::new(d).map_err(err)?, 1.0).map_err(err)?;
        worst = worst.max((got - want).abs());
    }
    const N: usize = 10_000;
    let mut bad = 0;
    let discs = [-3i64, -4, -7, -8, -11, -15, -20, -23, -24, -47];
    for d in discs {
        let t = RepresentationTable::new(&ClassGroup::new(d).map_err(err)?, N);
        let mut divisor_sum = vec![0i64; N + 1];
        for e in 1..=N {
            let chi = kronecker_symbol(d, e as i64) as i64;
            for n in (e..=N).step_by(e) {
                divisor_sum[n] += chi;
            }
        }
        bad += (1..=N).filter(|&n| t.total(n) as i64 != divisor_sum[n]).count();
    }
    Ok((
        worst <= 1e-6 && bad == 0,
        format!("L(1, χ_D) largest deviation {worst:.1e} (tol 1e-6); Σ_A r_A(n) = Σ η(d) failures {bad} over {} discriminants, n <= {N}", discs.len()),
    ))
}

fn cutoff_asymptotics() -> Outcome {
    let arch = || ArchFactor::from_weights(&[12]).map_err(err);
    let v1 = CutoffFunction::new(arch()?, TestFunction::new(1, 0.0).map_err(err)?).map_err(err)?;
    let v2 = CutoffFunction::new(arch()?, TestFunction::new(2, 0.0).map_err(err)?).map_err(err)?;
    let y = 1e-4f64;
    let a = v1.eval_direct(y).map_err(err)?;
    let b = v2.eval_direct(y).map_err(err)? / -y.ln();
    let c = v1.eval_direct(8.0).map_err(err)? / v1.eval_direct(1.0).map_err(err)?;
    let ok_a = (a - 1.0).abs() <= 5e-3;
    let ok_b = (b - 1.0).abs() <= 2e-2;
    let ok_c = c.abs() <= 1e-4;
    let constant = v2.small_y_constant().map_err(err)?;
    Ok((
        ok_a && ok_b && ok_c,
        format!(
            "Δ factor: V₁(1e-4) = {a:.6} [{}]; V₂(1e-4)/(-log 1e-4) = {b:.4} [{}] (V₂ ~ -log y + {constant:.4}); \
             V₁(8)/V₁(1) = {c:.2e} [{}]",
            mark(ok_a),
            mark(ok_b),
            mark(ok_c)
        ),
    ))
}

fn mellin_identity() -> Outcome {
    let t = delta_tensor();
    let configs = [(-4i64, 1u64, 1u32), (-7, 3, 1), (-23, 5, 1), (-4, 3, 0), (-7, 1, 0), (-8, 5, 0)];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (d, c, k) in configs {
        let s = setup(d, c)?;
        let afe = Afe::new(&s, AfeOptions { k: Some(k), ..Default::default() }).map_err(err)?;
        let r = b0_contour_check(&t, &s, &afe).map_err(err)?;
        worst = worst.max(r.relative_gap);
        parts.push(format!("({d},{c},k={k}) {:.1e}", r.relative_gap));
    }
    Ok((worst <= 1e-4, format!("relative gaps {} (tol 1e-4)", parts.join(", "))))
}

fn route_equality() -> Outcome {
    let t = delta_tensor();
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [-4i64, -7, -23] {
        for c in [1u64, 3, 5] {
            let start = Instant::now();
            let s = setup(d, c)?;
            let afe = Afe::new(&s, AfeOptions::default()).map_err(err)?;
            let fam = RankinFamily::for_afes(&t, s, &[&afe]).map_err(err)?;
            let a = average_route_a(&fam, &afe).map_err(err)?.average;
            let b = average_route_b(&fam, &afe, RouteBVariant::Exact, DivisorOrder::Ascending).map_err(err)?.average;
            let rel = (a - b).abs() / a.abs().max(1.0);
            let secs = start.elapsed().as_secs_f64();
            ok &= rel <= 1e-3 && secs <= 180.0;
            parts.push(format!("({d},{c}) k={} {rel:.1e} {secs:.1}s", afe.k));
        }
    }
    Ok((ok, format!("Δ, generic parity (the only one route B admits): {}", parts.join(", "))))
}

fn forced_vanishing() -> Outcome {
    let t = delta_tensor();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (d, c) in [(-4i64, 5u64), (-7, 3), (-23, 1), (-3, 2)] {
        let s = setup(d, c)?;
        if s.root_number != -1 {
            return Err(format!("setup ({d},{c}) has root number {}", s.root_number));
        }
        let a0 = Afe::new(&s, AfeOptions { k: Some(0), ..Default::default() }).map_err(err)?;
        let a1 = Afe::new(&s, AfeOptions { k: Some(1), ..Default::default() }).map_err(err)?;
        let fam = RankinFamily::for_afes(&t, s, &[&a0, &a1]).map_err(err)?;
        let chars = fam.characters();
        let v0 = fam.central_values(&a0, &chars).map_err(err)?;
        let v1 = fam.central_values(&a1, &chars).map_err(err)?;
        let scale = v1.iter().map(|v| v.value.abs()).sum::<f64>() / v1.len() as f64;
        let ratio = v0.iter().map(|v| v.value.abs()).fold(0.0, f64::max) / scale;
        worst = worst.max(ratio);
        parts.push(format!("({d},{c}) {ratio:.1e}"));
    }
    Ok((worst <= 1e-3, format!("max |k=0 value| / mean |k=1 value|: {} (tol 1e-3)", parts.join(", "))))
}

fn test_function_independence() -> Outcome {
    let t = delta_tensor();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for d in [-3i64, -4, -7, -8, -11] {
        for c in [1u64, 2] {
            let s = setup(d, c)?;
            let a0 = Afe::new(&s, AfeOptions::default()).map_err(err)?;
            let a1 = Afe::new(&s, AfeOptions { damping: 0.25, ..Default::default() }).map_err(err)?;
            let fam = RankinFamily::for_afes(&t, s, &[&a0, &a1]).map_err(err)?;
            for chi in fam.characters() {
                let x = fam.primitive_value(&a0, &chi).map_err(err)?;
                let y = fam.primitive_value(&a1, &chi).map_err(err)?;
                let den = x.value.abs().max(y.value.abs());
                if den > 0.0 {
                    worst = worst.max((x.value - y.value).abs() / den);
                }
            }
            n += 1;
        }
    }
    Ok((worst <= 1e-4, format!("{n} setups, every character on the order of its conductor, G = e^(a s²)/s^(k+1) with a = 0 and 0.25: largest relative gap {worst:.1e} (tol 1e-4)")))
}

fn nonvanishing_trend() -> Outcome {
    let t = delta_tensor();
    let discs = [-3i64, -4, -7, -8, -11, -19, -43, -67, -163];
    let mut h0_ok = true;
    let mut rows = Vec::new();
    let mut residuals = Vec::new();
    let mut pole = None;
    for d in discs {
        let s = setup(d, 1)?;
        let a0 = Afe::new(&s, AfeOptions { k: Some(0), ..Default::default() }).map_err(err)?;
        let a1 = Afe::new(&s, AfeOptions { k: Some(1), ..Default::default() }).map_err(err)?;
        let fam = RankinFamily::for_afes(&t, s.clone(), &[&a0, &a1]).map_err(err)?;
        let h0 = average_route_a(&fam, &a0).map_err(err)?.average;
        let h1 = average_route_a(&fam, &a1).map_err(err)?.average;
        // zero at the resolution of the forced-vanishing criterion
        h0_ok &= h0 > 1e-3 * h1.abs();
        let inputs = MainTermInputs::compute(&t, &s, MAIN_X).map_err(err)?;
        let m = main_term(&inputs, s.k, false).map_err(err)?;
        let h = if s.k == 0 { h0 } else { h1 };
        residuals.push((h - m).abs());
        pole.get_or_insert((inputs.sym2_at_one.residue, inputs.sym2_at_one.pole, inputs.sym2_offset.value, inputs.square.value.value));
        rows.push(format!("{d}: ε={} H0={h0:.2e} H1={h1:.4} main={m:.4}", s.root_number));
    }
    let tail = &residuals[residuals.len() - 4..];
    let monotone = tail.windows(2).all(|w| w[1] < w[0]);
    let (residue, flagged, offset, z_one) = pole.unwrap();
    let trend = if monotone {
        "residual decreasing over the last 4 points".to_string()
    } else {
        format!(
            "residual not monotone over the last 4 points (finding); pole diagnostic of the sym² series at s = 1: residue {residue:.3}, pole={flagged}, value at s₀ = 1 + 1e-3 {offset:.3}; main term uses the finite Z(1) = {z_one:.4}"
        )
    };
    let res: Vec<String> = residuals.iter().map(|r| format!("{r:.3}")).collect();
    Ok((h0_ok, format!("H0 > 0 for all: {}; {}; residuals [{}]; {trend}", mark(h0_ok), rows.join("; "), res.join(", "))))
}

fn shifted_convolution() -> Outcome {
    let lam = delta().coefficients(DELTA_P_MAX as usize).map_err(err)?;
    let lam2: Vec<f64> = lam.iter().map(|x| x * x).collect();
    let qs = [1i64, 2, 3, 4, 6, 8, 12, 16, -1, -2, -3, -5];
    let ys: Vec<f64> = (0..13).map(|i| 1e3 * 10f64.powf(i as f64 / 4.0)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, c) in [("N=1 Δ", &lam), ("N=2 Δ⊗Δ", &lam2)] {
        let fit = exponent_fit(c, &qs, &ys, Window::CompactBump).map_err(err)?;
        let limit = fit.bound.y + 0.1;
        let pass = fit.max_y_slope() <= limit;
        ok &= pass;
        parts.push(format!(
            "{name}: max Y-slope {:.3} pooled {:.3} vs bound {:.4} + 0.1 [{}], max q-slope {:.3} (bound {:.4}, reported)",
            fit.max_y_slope(),
            fit.pooled_y_slope,
            fit.bound.y,
            mark(pass),
            fit.max_q_slope(),
            fit.bound.q
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn whittaker_bounds() -> Outcome {
    let cases = [("i", 0, C64::new(0.0, 3.0), 0.5), ("ii", 0, C64::new(0.25, 0.0), 0.25), ("iii", 1, C64::new(0.0, 0.0), 0.5)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, q, nu, want) in cases {
        let fit = whittaker_small_y_exponent(q, nu, 1e-5, 1e-2, 400).map_err(err)?;
        let pass = (fit.exponent - want).abs() <= 0.05;
        ok &= pass;
        parts.push(format!("case {name} (q={q}, ν={nu}): {:.4} vs {want} [{}]", fit.exponent, mark(pass)));
    }
    Ok((ok, parts.join("; ")))
}

fn mobius_round_trip() -> Outcome {
    let t = delta_tensor();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for c in [6u64, 12, 30] {
        let s = setup(-4, c)?;
        let afe = Afe::new(&s, AfeOptions::default()).map_err(err)?;
        let fam = RankinFamily::for_afes(&t, s, &[&afe]).map_err(err)?;
        let a = average_route_a(&fam, &afe).map_err(err)?;
        let p = PrimitiveAverages::new(&fam.tower, &a.per_character).map_err(err)?;
        let scale = *p.class_numbers.last().unwrap() as f64 * a.average.abs();
        let gap = (p.round_trip_gap() / scale.max(1.0)).max(p.mobius_gap() / a.average.abs().max(1.0));
        worst = worst.max(gap);
        parts.push(format!("c={c} {gap:.1e}"));
    }
    Ok((worst <= 1e-9, format!("D = -4: {} (tol 1e-9)", parts.join(", "))))
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("class group exactness", class_group_exactness),
        ("orthogonality and coprime counting", orthogonality_and_counting),
        ("classical oracles", classical_oracles),
        ("cutoff asymptotics", cutoff_asymptotics),
        ("Mellin identity for b = 0", mellin_identity),
        ("route equality", route_equality),
        ("forced vanishing", forced_vanishing),
        ("test function independence", test_function_independence),
        ("nonvanishing trend", nonvanishing_trend),
        ("shifted convolution decay", shifted_convolution),
        ("Whittaker small-y exponents", whittaker_bounds),
        ("Möbius round trip", mobius_round_trip),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str()) || p == &(i + 1).to_string()) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name} ({:.1}s): {detail}",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
