//! Primes p = a·m² + 1 with small squarefree part: census of p <= x with
//! s(p−1) <= p^θ, the square-divisor-weighted von Mangoldt sum, and counts of
//! integers with small squarefree kernel.

use rayon::prelude::*;
use serde::Serialize;

use crate::arithmetic::{isqrt, SieveTables};
use crate::error::{Error, Result};
use crate::progressions::PHI_SQ_DENSITY;

/// Census of primes p <= x whose shifted kernel s(p−1) is at most p^θ.
#[derive(Debug, Clone, Serialize)]
pub struct Am2Census {
    pub x: u64,
    pub theta: f64,
    pub total_primes: u64,
    pub qualifying: u64,
    pub ratio: f64,
    /// (p, a = s(p−1), m = sqrt((p−1)/a)) for the qualifying primes, ascending.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<(u64, u64, u64)>,
}

/// Primes p <= x with s(p−1) <= p^θ. The threshold gets a one-ulp-scale guard
/// band (factor 1 + 1e−12) so powf noise at exact boundaries cannot flip a
/// count. `keep_witnesses` caps the recorded (p, a, m) list; the counts are
/// always exact.
pub fn census(
    tables: &SieveTables,
    x: u64,
    theta: f64,
    keep_witnesses: usize,
) -> Result<Am2Census> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "theta must lie in [0, 1], got {theta}"
        )));
    }
    if x > tables.x_max() {
        return Err(Error::OutOfTable {
            y: x as f64,
            x_max: tables.x_max(),
        });
    }
    let mut total = 0u64;
    let mut qualifying = 0u64;
    let mut witnesses = Vec::new();
    for &p in tables.primes() {
        if p > x {
            break;
        }
        total += 1;
        if p == 2 {
            // s(1) = 1 <= 2^theta always
            qualifying += 1;
            if witnesses.len() < keep_witnesses {
                witnesses.push((2, 1, 1));
            }
            continue;
        }
        let a = tables.squarefree_kernel(p - 1)?;
        let threshold = (p as f64).powf(theta) * (1.0 + 1e-12);
        if a as f64 <= threshold {
            qualifying += 1;
            if witnesses.len() < keep_witnesses {
                let m = isqrt((p - 1) / a);
                witnesses.push((p, a, m));
            }
        }
    }
    Ok(Am2Census {
        x,
        theta,
        total_primes: total,
        qualifying,
        ratio: if total == 0 {
            0.0
        } else {
            qualifying as f64 / total as f64
        },
    witnesses,
    })
}

/// Σ_{x < n <= 2x} Λ(n+1) · #{q in (y, 2y] : q² | n} with its predicted main
/// term ζ(2)ζ(3)/ζ(6) · x/(2y) (the dyadic 1/φ(q²) density times x).
#[derive(Debug, Clone, Serialize)]
pub struct WeightedSumReport {
    pub x: u64,
    pub y: u64,
    pub sum: f64,
    pub main: f64,
    pub relative_error: f64,
}

/// Evaluates the weighted sum q-major: for each q in (y, 2y], ascending, add
/// Λ(kq² + 1) over x < kq² <= 2x in ascending k. This per-(q, k) ordering is
/// the canonical reduction order; an n-major pass that groups its terms the
/// same way reproduces the result bit for bit.
pub fn weighted_sum(tables: &SieveTables, x: u64, y: u64) -> Result<WeightedSumReport> {
    if x == 0 || y == 0 {
        return Err(Error::InvalidArgument("x and y must be >= 1".into()));
    }
    if 2 * x + 1 > tables.x_max() {
        return Err(Error::OutOfTable {
            y: (2 * x + 1) as f64,
            x_max: tables.x_max(),
        });
    }
    let lambda = tables.lambda_table();
    let per_q: Vec<f64> = ((y + 1)..=(2 * y))
        .into_par_iter()
        .map(|q| {
            let q2 = q * q;
            if q2 > 2 * x {
                return 0.0;
            }
            let mut acc = 0.0f64;
            let mut n = (x / q2 + 1) * q2; // smallest multiple of q^2 above x
            while n <= 2 * x {
                acc += lambda[(n + 1) as usize];
                n += q2;
            }
            acc
        })
        .collect();
    let sum = per_q.iter().sum::<f64>();
    let main = PHI_SQ_DENSITY * x as f64 / (2.0 * y as f64);
    Ok(WeightedSumReport {
        x,
        y,
        sum,
        main,
        relative_error: if main == 0.0 { 0.0 } else { (sum - main) / main },
    })
}

/// #{n <= x : s(n) <= n^θ}, exact, by the parameterization n = a·m² with a
/// squarefree: counts pairs with a <= x^θ, a·m² <= x, and a <= (a·m²)^θ.
/// Avoids the big sieve table; builds a local μ table up to ⌊x^θ⌋.
pub fn sparsity_count(x: u64, theta: f64) -> Result<u64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "theta must lie in [0, 1], got {theta}"
        )));
    }
    if x == 0 {
        return Ok(0);
    }
    let a_cap = ((x as f64).powf(theta) * (1.0 + 1e-12)).floor() as u64;
    let a_cap = a_cap.min(x).max(1);
    let squarefree = squarefree_flags(a_cap);
    let mut count = 0u64;
    for a in 1..=a_cap {
        if !squarefree[a as usize] {
            continue;
        }
        // need a <= n^theta, n = a m^2 <= x; for fixed a the constraint
        // a <= (a m^2)^theta gives m >= (a^(1-theta)/a^0)^(1/(2 theta)) ...
        // just scan m; n grows quadratically so the loop is short.
        let mut m = 1u64;
        loop {
            let n = match a.checked_mul(m * m) {
                Some(n) if n <= x => n,
                _ => break,
            };
            let threshold = (n as f64).powf(theta) * (1.0 + 1e-12);
            if a as f64 <= threshold {
                count += 1;
            }
            m += 1;
        }
    }
    Ok(count)
}

fn squarefree_flags(cap: u64) -> Vec<bool> {
    let mut flags = vec![true; (cap + 1) as usize];
    let mut d = 2u64;
    while d * d <= cap {
        let sq = d * d;
        let mut n = sq;
        while n <= cap {
            flags[n as usize] = false;
            n += sq;
        }
        d += 1;
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn tables() -> &'static SieveTables {
        static T: OnceLock<SieveTables> = OnceLock::new();
        T.get_or_init(|| SieveTables::build(250_000).unwrap())
    }

    #[test]
    fn census_small_examples() {
        let t = tables();
        // theta = 1: everything qualifies
        let c = census(t, 100, 1.0, 100).unwrap();
        assert_eq!(c.qualifying, c.total_primes);
        assert_eq!(c.total_primes, 25);

        // theta = 0: s(p-1) = 1, i.e. p - 1 a perfect square
        let c = census(t, 200, 0.0, 100).unwrap();
        let expected: Vec<u64> = vec![2, 5, 17, 37, 101, 197];
        assert_eq!(c.qualifying as usize, expected.len());
        let ps: Vec<u64> = c.witnesses.iter().map(|w| w.0).collect();
        assert_eq!(ps, expected);
        for &(p, a, m) in &c.witnesses {
            assert_eq!(a * m * m + 1, p);
            assert_eq!(a, 1);
        }
    }

    #[test]
    fn census_witness_identity_and_monotonicity() {
        let t = tables();
        let c = census(t, 10_000, 5.0 / 9.0, usize::MAX).unwrap();
        for &(p, a, m) in &c.witnesses {
            assert_eq!(a * m * m + 1, p);
            assert_eq!(t.squarefree_kernel(p - 1).unwrap(), a);
        }
        // qualifying count is monotone in theta
        let lo = census(t, 10_000, 0.3, 0).unwrap().qualifying;
        let hi = census(t, 10_000, 0.7, 0).unwrap().qualifying;
        assert!(lo <= c.qualifying && c.qualifying <= hi);
    }

    #[test]
    fn census_errors() {
        let t = tables();
        assert!(census(t, 100, -0.1, 0).is_err());
        assert!(census(t, 100, 1.5, 0).is_err());
        assert!(census(t, t.x_max() + 1, 0.5, 0).is_err());
    }

    #[test]
    fn weighted_sum_matches_n_major_oracle() {
        let t = tables();
        for &(x, y) in &[(10_000u64, 10u64), (50_000, 20), (100_000, 7)] {
            let rep = weighted_sum(t, x, y).unwrap();
            // n-major oracle, canonicalized to the same (q, k) reduction order
            let mut per_q = Vec::new();
            for q in (y + 1)..=(2 * y) {
                let q2 = q * q;
                let mut acc = 0.0f64;
                let mut n = x + 1;
                while n <= 2 * x {
                    if n % q2 == 0 {
                        acc += t.lambda(n + 1);
                    }
                    n += 1;
                }
                per_q.push(acc);
            }
            let oracle = per_q.iter().sum::<f64>();
            assert_eq!(rep.sum.to_bits(), oracle.to_bits(), "x={x}, y={y}");
        }
    }

    #[test]
    fn weighted_sum_main_term() {
        let t = tables();
        let rep = weighted_sum(t, 100_000, 10).unwrap();
        assert!(
            rep.relative_error.abs() <= 0.25,
            "rel err {} too large",
            rep.relative_error
        );
        let main = PHI_SQ_DENSITY * 100_000.0 / (2.0 * 10.0);
        assert_eq!(rep.main, main);
    }

    #[test]
    fn weighted_sum_errors() {
        let t = tables();
        assert!(weighted_sum(t, 0, 5).is_err());
        assert!(weighted_sum(t, t.x_max(), 5).is_err());
    }

    #[test]
    fn sparsity_count_edges() {
        // theta = 0: only perfect squares, count = floor(sqrt(x))
        for &x in &[1u64, 10, 100, 12345] {
            assert_eq!(sparsity_count(x, 0.0).unwrap(), isqrt(x));
        }
        // theta = 1: everything
        assert_eq!(sparsity_count(100, 1.0).unwrap(), 100);
        assert_eq!(sparsity_count(0, 0.5).unwrap(), 0);
    }

    #[test]
    fn sparsity_count_matches_kernel_scan() {
        let t = tables();
        for &theta in &[0.3f64, 0.5, 5.0 / 9.0, 0.8] {
            for &x in &[100u64, 1000, 5000] {
                let fast = sparsity_count(x, theta).unwrap();
                let mut slow = 0u64;
                for n in 1..=x {
                    let s = t.squarefree_kernel(n).unwrap();
                    if s as f64 <= (n as f64).powf(theta) * (1.0 + 1e-12) {
                        slow += 1;
                    }
                }
                assert_eq!(fast, slow, "theta={theta}, x={x}");
            }
        }
    }
}
