//! Randomized structural properties (proptest).

use num_complex::Complex64;
use proptest::prelude::*;
use sievelab::arithmetic::gcd;
use sievelab::large_sieve::{additive_energy, classical_ls_check, CoeffSequence};
use sievelab::ModuliSet;

fn arb_seq(max_len: usize) -> impl Strategy<Value = CoeffSequence> {
    (1..=max_len, any::<u64>(), -20i64..20).prop_map(|(n, seed, offset)| {
        CoeffSequence::random_gaussian(offset, n, seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // multiplying every coefficient by a unit scalar leaves both sides alone
    #[test]
    fn unit_scalar_invariance(seq in arb_seq(30), angle in 0.0f64..std::f64::consts::TAU) {
        let rotated = seq.scaled(Complex64::from_polar(1.0, angle));
        let moduli: Vec<u64> = (1..=8).collect();
        let a = additive_energy(&moduli, &seq);
        let b = additive_energy(&moduli, &rotated);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn classical_bound_holds(seq in arb_seq(50), q_cap in 1u64..=20) {
        let seq = CoeffSequence::random_gaussian(0, seq.len(), seq.seed().unwrap_or(1));
        let (lhs, rhs) = classical_ls_check(q_cap, &seq).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9), "lhs {lhs} > rhs {rhs}");
    }

    // additive energy over q = 1 is |sum a_n|^2 regardless of offset
    #[test]
    fn q1_energy_is_full_square(seq in arb_seq(40)) {
        let total: Complex64 = seq.values().iter().sum();
        let e = additive_energy(&[1], &seq);
        prop_assert!((e - total.norm_sqr()).abs() <= 1e-9 * (1.0 + total.norm_sqr()));
    }

    // windows compose: members_in(lo, mid) + members_in(mid, hi) = members_in(lo, hi)
    #[test]
    fn window_additivity(t in 1u64..=12, lo in 0u64..500, len1 in 1u64..300, len2 in 1u64..300) {
        let d = ModuliSet::squares().derive(t);
        let (lo, mid, hi) = (lo as f64, (lo + len1) as f64, (lo + len1 + len2) as f64);
        let mut joined = d.members_in(lo, mid);
        joined.extend(d.members_in(mid, hi));
        prop_assert_eq!(joined, d.members_in(lo, hi));
    }

    // gcd really is the gcd
    #[test]
    fn gcd_divides_and_maximal(a in 1u64..10_000, b in 1u64..10_000) {
        let g = gcd(a, b);
        prop_assert_eq!(a % g, 0);
        prop_assert_eq!(b % g, 0);
        for k in (g + 1)..=(g + 50).min(a.min(b)) {
            if a % k == 0 && b % k == 0 {
                prop_assert!(false, "common divisor {k} above gcd {g}");
            }
        }
    }
}
