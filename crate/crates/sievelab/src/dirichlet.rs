//! Dirichlet characters mod q: group construction, conductors, Gauss sums
//! and interval character sums.
//!
//! Characters are represented by exponent vectors over a fixed generator
//! basis of the unit group (Z/q)*, obtained from the CRT factorization
//! q = 2^e · ∏ p^k. Values are roots of unity; they are kept as exact
//! rational rotations `num/den` and only converted to complex doubles at the
//! evaluation boundary, so character equality and conductor detection are
//! exact integer computations.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::arithmetic::{euler_phi, gcd, powmod};
use crate::error::{Error, Result};

/// Shared per-modulus data: generator basis and discrete logs of all units.
#[derive(Debug)]
struct GroupData {
    q: u64,
    phi: u64,
    /// Order of each generator, in basis order.
    orders: Vec<u64>,
    /// Generator residues mod q (CRT-lifted), parallel to `orders`.
    gen_residues: Vec<u64>,
    /// lcm of the generator orders; every character value is a den-th root of unity.
    den: u64,
    /// dlog[n] = exponent vector of n over the basis, None when gcd(n, q) > 1.
    dlog: Vec<Option<Box<[u32]>>>,
}

/// A single Dirichlet character mod q.
#[derive(Debug, Clone)]
pub struct Character {
    data: Arc<GroupData>,
    exps: Vec<u64>,
    conductor: u64,
}

/// The full group of Dirichlet characters mod q, in a deterministic
/// (lexicographic in exponent vector) order. Index 0 is the principal character.
#[derive(Debug)]
pub struct CharacterGroup {
    data: Arc<GroupData>,
    characters: Vec<Character>,
}

impl CharacterGroup {
    pub fn modulus(&self) -> u64 {
        self.data.q
    }

    pub fn characters(&self) -> &[Character] {
        &self.characters
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Generator residues with their orders, one per CRT coordinate.
    pub fn generators(&self) -> Vec<(u64, u64)> {
        self.data
            .gen_residues
            .iter()
            .zip(&self.data.orders)
            .map(|(&g, &o)| (g, o))
            .collect()
    }

    pub fn principal(&self) -> &Character {
        &self.characters[0]
    }

    /// The characters that are primitive mod q.
    pub fn primitive(&self) -> impl Iterator<Item = &Character> {
        let q = self.data.q;
        self.characters.iter().filter(move |c| c.conductor == q)
    }
}

impl Character {
    pub fn modulus(&self) -> u64 {
        self.data.q
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.data.q
    }

    pub fn is_principal(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    /// χ(n) as an exact rotation `num/den` (value = e(num/den)), reduced.
    /// `None` when gcd(n, q) > 1.
    pub fn rotation(&self, n: i64) -> Option<(u64, u64)> {
        let q = self.data.q;
        let r = n.rem_euclid(q as i64) as u64;
        let e = self.data.dlog[r as usize].as_ref()?;
        let den = self.data.den;
        let mut num: u128 = 0;
        for (j, (&k, &ord)) in self.exps.iter().zip(&self.data.orders).enumerate() {
            let contrib = (k as u128 * e[j] as u128) % ord as u128;
            num = (num + contrib * (den / ord) as u128) % den as u128;
        }
        let mut num = num as u64;
        let mut den = den;
        let g = gcd(num, den);
        if g > 0 {
            num /= g;
            den /= g;
        }
        Some((num, den))
    }

    /// χ(n) as a complex double; 0 when gcd(n, q) > 1.
    pub fn eval(&self, n: i64) -> Complex64 {
        match self.rotation(n) {
            None => Complex64::new(0.0, 0.0),
            Some((num, den)) => unit_rotation(num, den),
        }
    }

    /// Pointwise product with another character of the same modulus.
    pub fn multiply(&self, other: &Character) -> Character {
        assert_eq!(self.data.q, other.data.q, "modulus mismatch");
        let exps: Vec<u64> = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(&self.data.orders)
            .map(|((&a, &b), &ord)| (a + b) % ord)
            .collect();
        let conductor = conductor_of(&self.data, &exps);
        Character {
            data: Arc::clone(&self.data),
            exps,
            conductor,
        }
    }
}

/// e(num/den) = exp(2πi·num/den), evaluated from the reduced fraction.
pub fn unit_rotation(num: u64, den: u64) -> Complex64 {
    let theta = TAU * (num % den) as f64 / den as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// Builds the full character group mod q.
pub fn character_group(q: u64) -> Result<CharacterGroup> {
    if q == 0 {
        return Err(Error::InvalidArgument("character_group(0)".into()));
    }
    let data = Arc::new(build_group_data(q));
    let dims = data.orders.clone();
    let mut characters = Vec::with_capacity(data.phi as usize);
    let mut exps = vec![0u64; dims.len()];
    loop {
        let conductor = conductor_of(&data, &exps);
        characters.push(Character {
            data: Arc::clone(&data),
            exps: exps.clone(),
            conductor,
        });
        // lexicographic increment (last coordinate fastest)
        let mut j = dims.len();
        loop {
            if j == 0 {
                return Ok(CharacterGroup { data, characters });
            }
            j -= 1;
            exps[j] += 1;
            if exps[j] < dims[j] {
                break;
            }
            exps[j] = 0;
        }
    }
}

/// The primitive character mod conductor(χ) that induces χ.
pub fn inducing_primitive(chi: &Character) -> Result<Character> {
    let q = chi.modulus();
    let f = chi.conductor();
    if f == q {
        return Ok(chi.clone());
    }
    let sub = character_group(f)?;
    for cand in sub.characters() {
        if cand.conductor() != f {
            continue;
        }
        let mut agrees = true;
        for n in 0..q.max(1) {
            if gcd(n % q, q) == 1 || q == 1 {
                if cand.rotation(n as i64) != chi.rotation(n as i64) {
                    agrees = false;
                    break;
                }
            }
        }
        if agrees {
            return Ok(cand.clone());
        }
    }
    unreachable!("every character is induced by a primitive character mod its conductor")
}

/// Gauss sum τ(χ) = Σ_{a mod q} χ(a) e(a/q).
pub fn gauss_sum(chi: &Character) -> Complex64 {
    let q = chi.modulus();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..q {
        if let Some((num, den)) = chi.rotation(a as i64) {
            acc += unit_rotation(num, den) * unit_rotation(a % q, q);
        }
    }
    acc
}

/// Σ_{M < n <= M+N} χ(n).
pub fn char_interval_sum(chi: &Character, m: i64, n_len: u64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in (m + 1)..=(m + n_len as i64) {
        acc += chi.eval(n);
    }
    acc
}

/// Interval sum together with the Polya–Vinogradov majorant 6·√q·log q.
/// Only non-principal characters carry the bound.
pub fn char_interval_sum_checked(chi: &Character, m: i64, n_len: u64) -> Result<(Complex64, f64)> {
    if chi.is_principal() {
        return Err(Error::InvalidArgument(
            "Polya-Vinogradov bound applies to non-principal characters only".into(),
        ));
    }
    let q = chi.modulus() as f64;
    Ok((char_interval_sum(chi, m, n_len), 6.0 * q.sqrt() * q.ln()))
}

fn build_group_data(q: u64) -> GroupData {
    // factor q
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = q;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        factors.push((m, 1));
    }

    // generator basis per factor, each given as (residue mod p^k, order)
    let mut local_gens: Vec<(u64, u64, u64)> = Vec::new(); // (factor modulus, gen, order)
    for &(p, e) in &factors {
        let pk = p.pow(e);
        if p == 2 {
            match e {
                1 => {}
                2 => local_gens.push((4, 3, 2)),
                _ => {
                    local_gens.push((pk, pk - 1, 2));
                    local_gens.push((pk, 5, pk / 4));
                }
            }
        } else {
            let g = primitive_root(p, e);
            local_gens.push((pk, g, euler_phi(pk)));
        }
    }

    // CRT-lift each generator to a residue mod q (g at its own factor, 1 elsewhere)
    let mut gen_residues = Vec::with_capacity(local_gens.len());
    let mut orders = Vec::with_capacity(local_gens.len());
    for &(fm, g, ord) in &local_gens {
        gen_residues.push(crt_lift(g, fm, q));
        orders.push(ord);
    }

    let phi = euler_phi(q);
    let den = orders.iter().fold(1u64, |acc, &o| lcm(acc, o));

    // fill dlog by enumerating all exponent tuples
    let mut dlog: Vec<Option<Box<[u32]>>> = vec![None; q as usize];
    let dims = orders.clone();
    let mut exps = vec![0u64; dims.len()];
    loop {
        let mut r: u64 = 1 % q;
        for (j, &e) in exps.iter().enumerate() {
            r = ((r as u128 * powmod(gen_residues[j], e, q) as u128) % q.max(1) as u128) as u64;
        }
        dlog[r as usize] = Some(exps.iter().map(|&e| e as u32).collect());
        let mut j = dims.len();
        loop {
            if j == 0 {
                debug_assert_eq!(
                    dlog.iter().filter(|d| d.is_some()).count() as u64,
                    phi,
                    "unit group enumeration must hit each unit exactly once"
                );
                return GroupData {
                    q,
                    phi,
                    orders,
                    gen_residues,
                    den: den.max(1),
                    dlog,
                };
            }
            j -= 1;
            exps[j] += 1;
            if exps[j] < dims[j] {
                break;
            }
            exps[j] = 0;
        }
    }
}

/// Conductor of the character with the given exponent vector: the smallest
/// divisor d of q such that χ is trivial on units that are 1 mod d.
fn conductor_of(data: &GroupData, exps: &[u64]) -> u64 {
    let q = data.q;
    let mut divisors: Vec<u64> = (1..=q).filter(|d| q % d == 0).collect();
    divisors.sort_unstable();
    'outer: for &d in &divisors {
        let mut n = 1u64;
        while n <= q {
            let r = n % q.max(1);
            if n % d == 1 % d && data.dlog[r as usize].is_some() {
                // χ(n) must equal 1
                let rot = rotation_raw(data, exps, r);
                if rot != 0 {
                    continue 'outer;
                }
            }
            n += 1;
        }
        return d;
    }
    q
}

/// Unreduced rotation numerator over data.den for a unit residue r.
fn rotation_raw(data: &GroupData, exps: &[u64], r: u64) -> u64 {
    let e = data.dlog[r as usize]
        .as_ref()
        .expect("rotation_raw needs a unit");
    let den = data.den;
    let mut num: u128 = 0;
    for (j, (&k, &ord)) in exps.iter().zip(&data.orders).enumerate() {
        let contrib = (k as u128 * e[j] as u128) % ord as u128;
        num = (num + contrib * (den / ord) as u128) % den as u128;
    }
    num as u64
}

/// Smallest primitive root mod p^e (p odd prime).
fn primitive_root(p: u64, e: u32) -> u64 {
    let phi_p = p - 1;
    let mut prime_factors = Vec::new();
    let mut m = phi_p;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            prime_factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        prime_factors.push(m);
    }
    let mut g = 2u64;
    loop {
        if g % p != 0 && prime_factors.iter().all(|&f| powmod(g, phi_p / f, p) != 1) {
            break;
        }
        g += 1;
    }
    if e == 1 {
        return g;
    }
    // g lifts to p^e unless g^(p-1) = 1 mod p^2
    let p2 = p * p;
    if powmod(g, p - 1, p2) == 1 {
        g + p
    } else {
        g
    }
}

/// x with x = r mod fm and x = 1 mod q/fm.
fn crt_lift(r: u64, fm: u64, q: u64) -> u64 {
    let other = q / fm;
    if other == 1 {
        return r % q;
    }
    // x = r + fm * k with x = 1 mod other  =>  k = (1 - r) * fm^{-1} mod other
    let inv = mod_inverse(fm % other, other);
    let diff = (1 + other - (r % other)) % other;
    let k = ((diff as u128 * inv as u128) % other as u128) as u64;
    (r + fm * k) % q
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    // extended Euclid; gcd(a, m) = 1 by construction
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    (old_s.rem_euclid(m as i128)) as u64
}

fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a.max(b).max(1);
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn group_sizes() {
        for q in 1..=60u64 {
            let g = character_group(q).unwrap();
            assert_eq!(g.len() as u64, euler_phi(q), "phi(q) characters mod {q}");
            let principals = g
                .characters()
                .iter()
                .filter(|c| c.is_principal())
                .count();
            assert_eq!(principals, 1);
        }
        assert!(character_group(0).is_err());
    }

    #[test]
    fn mod_one_and_mod_five() {
        let g1 = character_group(1).unwrap();
        assert_eq!(g1.len(), 1);
        assert_eq!(g1.principal().conductor(), 1);
        assert!(close(g1.principal().eval(0), Complex64::new(1.0, 0.0), 1e-12));

        let g5 = character_group(5).unwrap();
        assert_eq!(g5.len(), 4);
        // values of a generator character at 2 run through the 4th roots of unity
        let mut vals: Vec<(u64, u64)> = g5
            .characters()
            .iter()
            .map(|c| c.rotation(2).unwrap())
            .collect();
        vals.sort_unstable();
        assert_eq!(vals, vec![(0, 1), (1, 2), (1, 4), (3, 4)]);
    }

    #[test]
    fn mod_eight_conductors() {
        let g8 = character_group(8).unwrap();
        let mut conds: Vec<u64> = g8.characters().iter().map(|c| c.conductor()).collect();
        conds.sort_unstable();
        assert_eq!(conds, vec![1, 4, 8, 8]);
    }

    #[test]
    fn eval_known_values() {
        let g6 = character_group(6).unwrap();
        let chi0 = g6.principal();
        assert!(close(chi0.eval(35), Complex64::new(1.0, 0.0), 1e-12));
        for chi in g6.characters() {
            assert_eq!(chi.eval(3), Complex64::new(0.0, 0.0));
        }
        // order-4 character mod 5 at 4 = 2^2: chi(2) = ±i so chi(4) = -1
        let g5 = character_group(5).unwrap();
        let chi = g5
            .characters()
            .iter()
            .find(|c| c.rotation(2) == Some((1, 4)))
            .unwrap();
        assert!(close(chi.eval(4), Complex64::new(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn inducing_primitive_examples() {
        let g8 = character_group(8).unwrap();
        let chi0 = g8.principal();
        let ind = inducing_primitive(chi0).unwrap();
        assert_eq!(ind.modulus(), 1);

        for chi in g8.characters() {
            let ind = inducing_primitive(chi).unwrap();
            assert_eq!(ind.modulus(), chi.conductor());
            assert!(ind.is_primitive());
            for n in 1..8i64 {
                if gcd(n as u64, 8) == 1 {
                    assert_eq!(ind.rotation(n), chi.rotation(n));
                }
            }
            if chi.is_primitive() {
                assert_eq!(ind.exponents(), chi.exponents());
            }
        }
        // the conductor-4 character mod 8 induces the nontrivial character mod 4
        let c4 = g8
            .characters()
            .iter()
            .find(|c| c.conductor() == 4)
            .unwrap();
        let ind = inducing_primitive(c4).unwrap();
        assert_eq!(ind.modulus(), 4);
        assert!(!ind.is_principal());
    }

    #[test]
    fn gauss_sum_examples() {
        // Legendre character mod 5 (the real character of order 2)
        let g5 = character_group(5).unwrap();
        let legendre = g5
            .characters()
            .iter()
            .find(|c| !c.is_principal() && c.rotation(4) == Some((0, 1)))
            .unwrap();
        let tau = gauss_sum(legendre);
        assert!(close(tau, Complex64::new(5f64.sqrt(), 0.0), 1e-9));

        // principal character mod 4: i + (-i) = 0
        let g4 = character_group(4).unwrap();
        assert!(close(gauss_sum(g4.principal()), Complex64::new(0.0, 0.0), 1e-12));

        // all primitive characters mod 7 have |tau| = sqrt(7)
        let g7 = character_group(7).unwrap();
        for chi in g7.primitive() {
            assert!((gauss_sum(chi).norm() - 7f64.sqrt()).abs() <= 1e-6);
        }
    }

    #[test]
    fn gauss_modulus_is_sqrt_conductor_for_primitive() {
        for q in 1..=100u64 {
            let g = character_group(q).unwrap();
            for chi in g.primitive() {
                let tau = gauss_sum(chi);
                assert!(
                    (tau.norm() - (q as f64).sqrt()).abs() <= 1e-6,
                    "gauss sum modulus mismatch for primitive chi mod {q}"
                );
            }
        }
    }

    #[test]
    fn interval_sum_examples() {
        let g3 = character_group(3).unwrap();
        let chi = g3.characters().iter().find(|c| !c.is_principal()).unwrap();
        assert!(close(char_interval_sum(chi, 0, 3), Complex64::new(0.0, 0.0), 1e-12));

        let g1 = character_group(1).unwrap();
        assert!(close(
            char_interval_sum(g1.principal(), 0, 5),
            Complex64::new(5.0, 0.0),
            1e-12
        ));

        // Legendre mod 7 on 1..3: QRs mod 7 are {1, 2, 4}
        let g7 = character_group(7).unwrap();
        let legendre = g7
            .characters()
            .iter()
            .find(|c| !c.is_principal() && (1..7).all(|n| c.rotation(n).map_or(false, |(_, d)| d <= 2)))
            .unwrap();
        assert!(close(char_interval_sum(legendre, 0, 3), Complex64::new(1.0, 0.0), 1e-12));

        assert!(char_interval_sum_checked(g3.principal(), 0, 3).is_err());
    }

    #[test]
    fn orthogonality_over_characters_and_residues() {
        for q in 1..=60u64 {
            let g = character_group(q).unwrap();
            let phi = euler_phi(q) as f64;
            // row orthogonality, checked for a deterministic sample of pairs
            let chars = g.characters();
            for i in 0..chars.len().min(8) {
                for j in 0..chars.len().min(8) {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for n in 0..q.max(1) {
                        acc += chars[i].eval(n as i64) * chars[j].eval(n as i64).conj();
                    }
                    let expected = if i == j { phi } else { 0.0 };
                    assert!(
                        (acc - Complex64::new(expected, 0.0)).norm() <= 1e-6,
                        "character orthogonality failed at q={q}, i={i}, j={j}"
                    );
                }
            }
            // column orthogonality over all characters
            for a in 1..=q.min(12) {
                for b in 1..=q.min(12) {
                    if gcd(a, q) != 1 || gcd(b, q) != 1 {
                        continue;
                    }
                    let mut acc = Complex64::new(0.0, 0.0);
                    for chi in chars {
                        acc += chi.eval(a as i64) * chi.eval(b as i64).conj();
                    }
                    let expected = if a % q == b % q { phi } else { 0.0 };
                    assert!(
                        (acc - Complex64::new(expected, 0.0)).norm() <= 1e-6,
                        "residue orthogonality failed at q={q}, a={a}, b={b}"
                    );
                }
            }
        }
    }

    #[test]
    fn primitive_count_matches_moebius_formula() {
        for q in 1..=100u64 {
            let g = character_group(q).unwrap();
            let observed = g.primitive().count() as i64;
            let mut expected = 0i64;
            for d in 1..=q {
                if q % d == 0 {
                    expected += moebius(q / d) * euler_phi(d) as i64;
                }
            }
            assert_eq!(observed, expected, "primitive character count mod {q}");
        }
    }

    #[test]
    fn group_closure_under_multiplication() {
        for q in [12u64, 15, 16, 21, 40] {
            let g = character_group(q).unwrap();
            let chars = g.characters();
            for a in chars.iter().take(6) {
                for b in chars.iter().take(6) {
                    let prod = a.multiply(b);
                    let found = chars.iter().any(|c| c.exponents() == prod.exponents());
                    assert!(found, "product of characters mod {q} left the group");
                    for n in 0..q {
                        let lhs = prod.eval(n as i64);
                        let rhs = a.eval(n as i64) * b.eval(n as i64);
                        assert!(close(lhs, rhs, 1e-9));
                    }
                }
            }
        }
    }

    #[test]
    fn complete_multiplicativity_and_unit_modulus() {
        for q in [7u64, 9, 12, 24, 35] {
            let g = character_group(q).unwrap();
            for chi in g.characters() {
                for m in 0..q {
                    for n in 0..q {
                        let lhs = chi.eval((m * n) as i64);
                        let rhs = chi.eval(m as i64) * chi.eval(n as i64);
                        assert!(close(lhs, rhs, 1e-9));
                    }
                    let v = chi.eval(m as i64);
                    if gcd(m, q) == 1 {
                        assert!((v.norm() - 1.0).abs() <= 1e-9);
                    } else {
                        assert_eq!(v, Complex64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    fn moebius(mut n: u64) -> i64 {
        let mut m = 1i64;
        let mut p = 2u64;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                m = -m;
            }
            p += 1;
        }
        if n > 1 {
            m = -m;
        }
        m
    }
}
