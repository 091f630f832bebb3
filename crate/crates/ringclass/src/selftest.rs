//! A small invariant suite that runs in seconds.

use ringclass_core::arith::{gcd, is_fundamental_discriminant};
use ringclass_core::hecke::{Eigenform, TensorProduct};
use ringclass_core::lseries::{dirichlet_l, Afe, AfeOptions, QuadraticCharacter, RankinFamily, RankinSetup, RootNumberRule};
use ringclass_core::moments::{average_route_a, average_route_b, DivisorOrder, PrimitiveAverages, RouteBVariant};
use ringclass_core::quad::{dedekind_class_number, unit_count, ClassGroup, OrderTower, QuadOrder, RepresentationTable};
use ringclass_core::shifted::{shifted_sum, shifted_sum_two_sided, Window};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String), String>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn run_checks() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(check("dedekind_class_number", || {
        let mut bad = 0;
        let mut cases = 0;
        for d in (-100i64..0).filter(|&d| is_fundamental_discriminant(d)) {
            let h_k = ClassGroup::new(d).map_err(err)?.order() as u64;
            for c in 1..=6u64 {
                let h = ClassGroup::new(d * (c * c) as i64).map_err(err)?.order() as u64;
                cases += 1;
                if dedekind_class_number(d, c, h_k).map_err(err)? != h {
                    bad += 1;
                }
            }
        }
        Ok((bad == 0, format!("{bad} mismatches in {cases} orders")))
    }));
    out.push(check("orthogonality", || {
        let g = ClassGroup::new(-23 * 4).map_err(err)?;
        let chars = g.characters();
        let mut worst: f64 = 0.0;
        for a in 0..g.order() {
            let s: f64 = chars.iter().map(|c| c.cos(a)).sum();
            let want = if a == 0 { g.order() as f64 } else { 0.0 };
            worst = worst.max((s - want).abs());
        }
        Ok((worst < 1e-9, format!("largest deviation {worst:.1e}")))
    }));
    out.push(check("ideal_counts_coprime_to_conductor", || {
        let mut bad = 0;
        for d in [-4i64, -7, -23] {
            let top = RepresentationTable::new(&ClassGroup::new(d).map_err(err)?, 500);
            for c in [2u64, 3, 5] {
                let t = RepresentationTable::new(&ClassGroup::new(d * (c * c) as i64).map_err(err)?, 500);
                bad += (1..=500).filter(|&n| gcd(n as u64, c) == 1 && t.total(n) != top.total(n)).count();
            }
        }
        Ok((bad == 0, format!("{bad} mismatches")))
    }));
    out.push(check("class_number_formula", || {
        let mut worst: f64 = 0.0;
        for d in [-3i64, -4, -7, -8, -11] {
            let h = ClassGroup::new(d).map_err(err)?.order() as f64;
            let w = unit_count(d) as f64;
            let want = 2.0 * std::f64::consts::PI * h / (w * (d.unsigned_abs() as f64).sqrt());
            let got = dirichlet_l(QuadraticCharacter::new(d).map_err(err)?, 1.0).map_err(err)?;
            worst = worst.max((got - want).abs());
        }
        Ok((worst < 1e-6, format!("largest deviation {worst:.1e}")))
    }));
    let delta = Eigenform::delta(20_000);
    out.push(check("delta_eigenvalues", || {
        let f = delta.as_ref().map_err(err)?;
        let l2 = f.lambda_p(2).map_err(err)?;
        let want = -24.0 / 2f64.powf(5.5);
        let mult = (f.lambda_at(6).map_err(err)? - l2 * f.lambda_p(3).map_err(err)?).abs();
        Ok(((l2 - want).abs() < 1e-12 && mult < 1e-12, format!("λ(2) = {l2}")))
    }));
    out.push(check("routes_and_mobius", || {
        let t = TensorProduct::single(delta.clone().map_err(err)?);
        let setup = RankinSetup::new(&t, QuadOrder::new(-4, 6).map_err(err)?, RootNumberRule::BaseChange).map_err(err)?;
        let afe = Afe::new(&setup, AfeOptions::default()).map_err(err)?;
        let fam = RankinFamily::for_afes(&t, setup, &[&afe]).map_err(err)?;
        let a = average_route_a(&fam, &afe).map_err(err)?;
        let b = average_route_b(&fam, &afe, RouteBVariant::Exact, DivisorOrder::Ascending).map_err(err)?;
        let tower = OrderTower::new(QuadOrder::new(-4, 6).map_err(err)?).map_err(err)?;
        let p = PrimitiveAverages::new(&tower, &a.per_character).map_err(err)?;
        let gap = (a.average - b.average).abs();
        let ok = gap <= 1e-3 * a.average.abs().max(1.0) && p.round_trip_gap() < 1e-9;
        Ok((ok, format!("H = {:.10}, route gap {gap:.1e}, round trip {:.1e}", a.average, p.round_trip_gap())))
    }));
    out.push(check("test_function_independence", || {
        let t = TensorProduct::single(delta.clone().map_err(err)?);
        let setup = RankinSetup::new(&t, QuadOrder::new(-7, 1).map_err(err)?, RootNumberRule::BaseChange).map_err(err)?;
        let a0 = Afe::new(&setup, AfeOptions::default()).map_err(err)?;
        let a1 = Afe::new(&setup, AfeOptions { damping: 0.25, ..Default::default() }).map_err(err)?;
        let fam = RankinFamily::for_afes(&t, setup, &[&a0, &a1]).map_err(err)?;
        let chi = &fam.characters()[0];
        let v0 = fam.central_value(&a0, chi).map_err(err)?.value;
        let v1 = fam.central_value(&a1, chi).map_err(err)?.value;
        let rel = (v0 - v1).abs() / v0.abs().max(1e-300);
        Ok((rel < 1e-4, format!("{v0:.10} vs {v1:.10}")))
    }));
    out.push(check("shifted_sum_symmetry", || {
        let lam = delta.as_ref().map_err(err)?.coefficients(4000).map_err(err)?;
        let a = shifted_sum(&lam, 3, 1500.0, Window::CompactBump).map_err(err)?;
        let (s, _) = shifted_sum_two_sided(&lam, 3, 1500.0, Window::CompactBump).map_err(err)?;
        Ok(((a.s - s).abs() < 1e-11 * (1.0 + s.abs()), format!("{} vs {s}", a.s)))
    }));
    out
}
