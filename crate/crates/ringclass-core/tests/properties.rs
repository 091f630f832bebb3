use std::sync::OnceLock;

use proptest::prelude::*;
use ringclass_core::arith::{divisors, factorize, gcd, is_fundamental_discriminant, kronecker_symbol, moebius};
use ringclass_core::hecke::{Eigenform, TensorProduct};
use ringclass_core::lseries::{Afe, AfeOptions, RankinFamily, RankinSetup, RootNumberRule};
use ringclass_core::quad::{dedekind_class_number, ClassGroup, OrderTower, QuadOrder};
use ringclass_core::shifted::{shifted_sum, shifted_sum_two_sided, Window};

fn delta() -> &'static Eigenform {
    static DELTA: OnceLock<Eigenform> = OnceLock::new();
    DELTA.get_or_init(|| Eigenform::delta(20_000).unwrap())
}

fn fundamental() -> impl Strategy<Value = i64> {
    (3i64..400).prop_map(|n| -n).prop_filter("fundamental", |&d| is_fundamental_discriminant(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorization_multiplies_back(n in 1u64..u64::MAX / 4) {
        let f = factorize(n).unwrap();
        let back = f.iter().fold(1u128, |acc, &(p, e)| acc * (p as u128).pow(e));
        prop_assert_eq!(back, n as u128);
    }

    #[test]
    fn moebius_sums_to_delta(n in 1u64..5000) {
        let s: i64 = divisors(n).unwrap().into_iter().map(|d| moebius(d).unwrap() as i64).sum();
        prop_assert_eq!(s, i64::from(n == 1));
    }

    #[test]
    fn kronecker_is_multiplicative(d in fundamental(), m in 1i64..2000, n in 1i64..2000) {
        prop_assert_eq!(kronecker_symbol(d, m * n), kronecker_symbol(d, m) * kronecker_symbol(d, n));
    }

    #[test]
    fn class_group_laws(d in fundamental(), c in 1u64..7, i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let g = ClassGroup::new(d * (c * c) as i64).unwrap();
        let h = g.order();
        let (a, b, e) = (i % h, j % h, k % h);
        prop_assert_eq!(g.mul(a, b), g.mul(b, a));
        prop_assert_eq!(g.mul(g.mul(a, b), e), g.mul(a, g.mul(b, e)));
        prop_assert_eq!(g.mul(a, 0), a);
        prop_assert_eq!(g.mul(a, g.inv(a)), 0);
        prop_assert_eq!(g.invariants().iter().product::<u64>(), h as u64);
    }

    #[test]
    fn dedekind_matches_enumeration(d in fundamental(), c in 1u64..20) {
        let h_k = ClassGroup::new(d).unwrap().order() as u64;
        let h = ClassGroup::new(d * (c * c) as i64).unwrap().order() as u64;
        prop_assert_eq!(dedekind_class_number(d, c, h_k).unwrap(), h);
    }

    #[test]
    fn characters_are_homomorphisms(d in fundamental(), c in 1u64..6, i in 0usize..64, j in 0usize..64) {
        let g = ClassGroup::new(d * (c * c) as i64).unwrap();
        let (a, b) = (i % g.order(), j % g.order());
        for chi in g.characters() {
            prop_assert_eq!((chi.values[a] + chi.values[b]) % chi.modulus, chi.values[g.mul(a, b)]);
            let (exact, sum) = chi.sum_is_exact();
            prop_assert!(exact);
            prop_assert_eq!(sum, if chi.is_trivial() { g.order() as i64 } else { 0 });
        }
    }

    #[test]
    fn characters_descend_to_their_conductor(d in fundamental(), c in 2u64..7) {
        let tower = OrderTower::new(QuadOrder::new(d, c).unwrap()).unwrap();
        for chi in tower.characters() {
            for &e in tower.divisors.iter().filter(|&&e| e % chi.conductor == 0) {
                let psi = tower.descend(&chi.chi, e).unwrap();
                let map = tower.map_to(e).unwrap();
                for (a, &b) in map.iter().enumerate() {
                    prop_assert!((psi.cos(b) - chi.chi.cos(a)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn hecke_multiplicativity(m in 1u64..140, n in 1u64..140) {
        let f = delta();
        if gcd(m, n) == 1 {
            let lhs = f.lambda_at(m * n).unwrap();
            prop_assert!((lhs - f.lambda_at(m).unwrap() * f.lambda_at(n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn hecke_recursion_at_primes(i in 0usize..200, e in 1u32..5) {
        let f = delta();
        let (p, l) = f.prime_values()[i];
        prop_assert!(l.abs() <= 2.0 + 1e-9);
        let next = f.prime_power(p, e + 1).unwrap();
        let want = l * f.prime_power(p, e).unwrap() - f.prime_power(p, e - 1).unwrap();
        prop_assert!((next - want).abs() < 1e-9);
    }

    #[test]
    fn shifted_sum_sides_agree(q in prop_oneof![1i64..40, -40i64..=-1], y in 400.0f64..3000.0) {
        let lam = delta().coefficients(20_000).unwrap();
        let one = shifted_sum(&lam, q, y, Window::CompactBump).unwrap();
        let (two, _) = shifted_sum_two_sided(&lam, q, y, Window::CompactBump).unwrap();
        prop_assert!((one.s - two).abs() <= 1e-10 * (1.0 + two.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn conjugate_characters_give_equal_values(d in prop::sample::select(vec![-23i64, -31, -47, -56, -71]), c in 1u64..3) {
        let t = TensorProduct::single(delta().clone());
        let s = RankinSetup::new(&t, QuadOrder::new(d, c).unwrap(), RootNumberRule::BaseChange).unwrap();
        let afe = Afe::new(&s, AfeOptions::default()).unwrap();
        let fam = RankinFamily::for_afes(&t, s, &[&afe]).unwrap();
        let chars = fam.characters();
        let values = fam.central_values(&afe, &chars).unwrap();
        for (chi, v) in chars.iter().zip(&values) {
            let conj = chars.iter().position(|x| x.chi.values.iter().zip(&chi.chi.values).all(|(a, b)| (a + b) % chi.chi.modulus == 0)).unwrap();
            prop_assert!((values[conj].value - v.value).abs() <= 1e-10 * (1.0 + v.value.abs()));
        }
    }
}
