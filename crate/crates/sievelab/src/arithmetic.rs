//! Multiplicative-function tables and the prime list everything else reads from.
//!
//! `SieveTables` is built once and never mutated. It holds, for every
//! `n <= x_max`: the smallest prime factor, the von Mangoldt function Λ(n)
//! (stored as `ln(p)` of the exact integer prime), Euler's φ, the Möbius
//! function μ, the divisor count τ, and the squarefree kernel s(n), i.e. the
//! unique squarefree `a` with `n = a * m^2`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Default table-memory budget in bytes (all six tables combined).
pub const DEFAULT_MEMORY_BUDGET: u64 = 6 << 30;

/// Bytes per table index: spf u32, lambda f64, phi u64, mu i8, tau u32, kernel u64.
const BYTES_PER_ENTRY: u64 = 4 + 8 + 8 + 1 + 4 + 8;

const CACHE_MAGIC: &[u8; 5] = b"SLAB1";

pub struct SieveTables {
    x_max: u64,
    spf: Vec<u32>,
    primes: Vec<u64>,
    lambda: Vec<f64>,
    phi: Vec<u64>,
    mu: Vec<i8>,
    tau: Vec<u32>,
    kernel: Vec<u64>,
}

impl SieveTables {
    /// Builds all tables over `[1, x_max]` with the default memory budget.
    pub fn build(x_max: u64) -> Result<Self> {
        Self::build_with_budget(x_max, DEFAULT_MEMORY_BUDGET)
    }

    pub fn build_with_budget(x_max: u64, budget_bytes: u64) -> Result<Self> {
        if x_max < 2 {
            return Err(Error::InvalidArgument(format!(
                "x_max must be at least 2, got {x_max}"
            )));
        }
        if x_max > u32::MAX as u64 {
            return Err(Error::ResourceLimit(format!(
                "x_max = {x_max} exceeds the 32-bit spf table range"
            )));
        }
        let entries = x_max + 1;
        if entries.saturating_mul(BYTES_PER_ENTRY) > budget_bytes {
            return Err(Error::ResourceLimit(format!(
                "tables for x_max = {x_max} need {} bytes, budget is {budget_bytes}",
                entries * BYTES_PER_ENTRY
            )));
        }

        let n = entries as usize;
        let mut spf = vec![0u32; n];
        let mut phi = vec![0u64; n];
        let mut mu = vec![0i8; n];
        let mut tau = vec![0u32; n];
        // exponent of spf(i) in i, used by the linear-sieve recurrences
        let mut cnt = vec![0u8; n];
        let mut primes: Vec<u64> = Vec::new();

        spf[1] = 1;
        phi[1] = 1;
        mu[1] = 1;
        tau[1] = 1;

        for i in 2..n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
                phi[i] = i as u64 - 1;
                mu[i] = -1;
                tau[i] = 2;
                cnt[i] = 1;
            }
            for &p in &primes {
                let p = p as usize;
                if p > spf[i] as usize || i * p >= n {
                    break;
                }
                let ip = i * p;
                spf[ip] = p as u32;
                if p == spf[i] as usize {
                    phi[ip] = phi[i] * p as u64;
                    mu[ip] = 0;
                    cnt[ip] = cnt[i] + 1;
                    let e = cnt[i] as u32;
                    tau[ip] = tau[i] / (e + 1) * (e + 2);
                    break;
                } else {
                    phi[ip] = phi[i] * (p as u64 - 1);
                    mu[ip] = -mu[i];
                    tau[ip] = tau[i] * 2;
                    cnt[ip] = 1;
                }
            }
        }

        let mut lambda = vec![0.0f64; n];
        for &p in &primes {
            let logp = (p as f64).ln();
            let mut pk = p;
            while pk <= x_max {
                lambda[pk as usize] = logp;
                match pk.checked_mul(p) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
        }

        let mut kernel = vec![0u64; n];
        kernel[1] = 1;
        for i in 2..n {
            let mut m = i;
            let mut k = 1u64;
            while m > 1 {
                let p = spf[m] as usize;
                let mut e = 0u32;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                if e % 2 == 1 {
                    k *= p as u64;
                }
            }
            kernel[i] = k;
        }

        Ok(SieveTables {
            x_max,
            spf,
            primes,
            lambda,
            phi,
            mu,
            tau,
            kernel,
        })
    }

    pub fn x_max(&self) -> u64 {
        self.x_max
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn lambda(&self, n: u64) -> f64 {
        self.lambda[n as usize]
    }

    pub fn phi(&self, n: u64) -> u64 {
        self.phi[n as usize]
    }

    pub fn mu(&self, n: u64) -> i8 {
        self.mu[n as usize]
    }

    pub fn tau(&self, n: u64) -> u64 {
        self.tau[n as usize] as u64
    }

    pub fn spf(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn kernel(&self, n: u64) -> u64 {
        self.kernel[n as usize]
    }

    pub fn lambda_table(&self) -> &[f64] {
        &self.lambda
    }

    /// Squarefree kernel s(n) for arbitrary `n >= 1`.
    ///
    /// Reads the table when `n <= x_max`; otherwise trial-divides by the
    /// tabled primes. The cofactor left after that has no prime factor below
    /// `x_max`, so it can still be classified when it is a perfect square
    /// (kernel contribution 1) or below `x_max^3` (then prime or a product of
    /// two distinct primes, squarefree either way). Larger non-square
    /// cofactors are rejected rather than misclassified.
    pub fn squarefree_kernel(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::InvalidArgument("squarefree_kernel(0)".into()));
        }
        if n <= self.x_max {
            return Ok(self.kernel[n as usize]);
        }
        let mut m = n;
        let mut k = 1u64;
        for &p in &self.primes {
            if p * p > m {
                break;
            }
            if m % p == 0 {
                let mut e = 0u32;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                if e % 2 == 1 {
                    k *= p;
                }
            }
        }
        if m > 1 {
            let r = isqrt(m);
            let cap = self
                .x_max
                .saturating_mul(self.x_max)
                .saturating_mul(self.x_max);
            if r * r == m {
                // perfect-square cofactor: every exponent doubles, kernel 1
            } else if m <= cap {
                // no factor <= x_max and below x_max^3: prime, or a product
                // of two distinct primes — squarefree either way
                k *= m;
            } else {
                return Err(Error::ResourceLimit(format!(
                    "squarefree_kernel({n}) needs primes beyond the table bound"
                )));
            }
        }
        Ok(k)
    }

    /// Writes the tables to a little-endian binary cache file.
    pub fn save_cache(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.x_max.to_le_bytes())?;
        for v in &self.spf {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in &self.lambda {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in &self.phi {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in &self.mu {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in &self.tau {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in &self.kernel {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Loads tables from a cache file. Returns `None` when the file carries a
    /// different magic or a different `x_max` (the cache is then stale).
    pub fn load_cache(path: &Path, x_max: u64) -> Result<Option<Self>> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 5];
        if r.read_exact(&mut magic).is_err() || &magic != CACHE_MAGIC {
            return Ok(None);
        }
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        if u64::from_le_bytes(buf8) != x_max {
            return Ok(None);
        }
        let n = (x_max + 1) as usize;
        let mut spf = vec![0u32; n];
        let mut buf4 = [0u8; 4];
        for v in spf.iter_mut() {
            r.read_exact(&mut buf4)?;
            *v = u32::from_le_bytes(buf4);
        }
        let mut lambda = vec![0.0f64; n];
        for v in lambda.iter_mut() {
            r.read_exact(&mut buf8)?;
            *v = f64::from_le_bytes(buf8);
        }
        let mut phi = vec![0u64; n];
        for v in phi.iter_mut() {
            r.read_exact(&mut buf8)?;
            *v = u64::from_le_bytes(buf8);
        }
        let mut mu = vec![0i8; n];
        let mut buf1 = [0u8; 1];
        for v in mu.iter_mut() {
            r.read_exact(&mut buf1)?;
            *v = buf1[0] as i8;
        }
        let mut tau = vec![0u32; n];
        for v in tau.iter_mut() {
            r.read_exact(&mut buf4)?;
            *v = u32::from_le_bytes(buf4);
        }
        let mut kernel = vec![0u64; n];
        for v in kernel.iter_mut() {
            r.read_exact(&mut buf8)?;
            *v = u64::from_le_bytes(buf8);
        }
        let primes = (2..=x_max).filter(|&i| spf[i as usize] as u64 == i).collect();
        Ok(Some(SieveTables {
            x_max,
            spf,
            primes,
            lambda,
            phi,
            mu,
            tau,
            kernel,
        }))
    }
}

/// φ(q²) computed exactly as q·φ(q).
pub fn euler_phi_qsq(q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidArgument("euler_phi_qsq(0)".into()));
    }
    let phi = euler_phi(q);
    q.checked_mul(phi)
        .ok_or_else(|| Error::ResourceLimit(format!("phi({q}^2) overflows u64")))
}

/// Euler's φ by trial-division factorization. Standalone, no tables needed.
pub fn euler_phi(q: u64) -> u64 {
    let mut m = q;
    let mut phi = q;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            phi -= phi / p;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        phi -= phi / m;
    }
    phi
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Integer square root (exact floor).
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |rr| rr > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |rr| rr <= n) {
        r += 1;
    }
    r
}

pub fn is_perfect_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

pub fn powmod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % modulus as u128) as u64;
        }
        base = ((base as u128 * base as u128) % modulus as u128) as u64;
        exp >>= 1;
    }
    acc
}
