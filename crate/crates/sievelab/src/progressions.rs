//! ψ(y; q, a), ψ(y, χ), ψ'(y, χ) and the four theorem left sides
//! (mean-square and worst-residue progression errors, general sparse sets and
//! square moduli), the exact Vaughan decomposition, and the Σ 1/φ(q²) lemma.
//!
//! All floating accumulation is plain ascending-order summation, so any two
//! routes that visit the same terms in the same order agree bit for bit.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arithmetic::{euler_phi_qsq, gcd, SieveTables};
use crate::dirichlet::Character;
use crate::error::{Error, Result};
use crate::sparse::ModuliSet;

/// ζ(2) = π²/6.
pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// ζ(3) (Apéry's constant).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

/// ζ(6) = π⁶/945.
pub const ZETA6: f64 = std::f64::consts::PI
    * std::f64::consts::PI
    * std::f64::consts::PI
    * std::f64::consts::PI
    * std::f64::consts::PI
    * std::f64::consts::PI
    / 945.0;

/// Mean value of q/φ(q): ∏_p (1 + 1/(p(p−1))) = ζ(2)ζ(3)/ζ(6) ≈ 1.9436.
///
/// This is the density constant in Σ_{y<q≤2y} 1/φ(q²) = Σ 1/(qφ(q)):
/// since (q/φ(q)) averages to this product, the dyadic sum is
/// ~ (ζ(2)ζ(3)/ζ(6))·(1/(2y)). (A naive expansion that swaps 1/φ(q) for
/// (1/q)Σ_{d|q} μ(d)/d would give 1/(2ζ(2)y) instead; that identity is false
/// — φ(q)/q equals the divisor sum, not its reciprocal — and the numerics
/// here settle it: 2y·Σ → 1.9436, not 0.6079.)
pub const PHI_SQ_DENSITY: f64 = ZETA2 * ZETA3 / ZETA6;

fn check_bound(tables: &SieveTables, y: f64) -> Result<u64> {
    if y > tables.x_max() as f64 {
        return Err(Error::OutOfTable {
            y,
            x_max: tables.x_max(),
        });
    }
    Ok(y.floor().max(0.0) as u64)
}

/// ψ(y; q, a) = Σ_{n <= y, n ≡ a mod q} Λ(n).
pub fn psi_progression(tables: &SieveTables, y: f64, q: u64, a: u64) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidArgument("modulus q must be >= 1".into()));
    }
    let bound = check_bound(tables, y)?;
    let lambda = tables.lambda_table();
    let start = {
        let r = a % q;
        if r == 0 {
            q
        } else {
            r
        }
    };
    let mut acc = 0.0f64;
    let mut n = start;
    while n <= bound {
        acc += lambda[n as usize];
        n += q;
    }
    Ok(acc)
}

/// ψ(y) = Σ_{n <= y} Λ(n).
pub fn psi(tables: &SieveTables, y: f64) -> Result<f64> {
    psi_progression(tables, y, 1, 0)
}

/// ψ(y, χ) = Σ_{n <= y} Λ(n) χ(n); with `primed`, subtracts y when χ is
/// principal (the ψ' normalization).
pub fn psi_character(
    tables: &SieveTables,
    y: f64,
    chi: &Character,
    primed: bool,
) -> Result<Complex64> {
    let bound = check_bound(tables, y)?;
    let lambda = tables.lambda_table();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=bound {
        let l = lambda[n as usize];
        if l != 0.0 {
            acc += l * chi.eval(n as i64);
        }
    }
    if primed && chi.is_principal() {
        acc -= Complex64::new(y, 0.0);
    }
    Ok(acc)
}

/// Which theorem shape an error-sum report instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremTag {
    BdhGeneral,
    BdhSquare,
    BvGeneral,
    BvSquare,
    ClassicalBdh,
    ClassicalBv,
}

/// Moduli selection for the theorem sums: an explicit sparse set (dyadic
/// window S(Q)) or the classical full range q <= Q.
#[derive(Debug, Clone)]
pub enum ModuliSelector {
    Set(ModuliSet),
    Classical,
}

/// One modulus row of a theorem-sum report.
#[derive(Debug, Clone, Serialize)]
pub struct QRow {
    pub q: u64,
    pub modulus: u64,
    pub contribution: f64,
    pub argmax_a: Option<u64>,
}

/// One theorem-LHS evaluation with its reporting normalizer.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorSumReport {
    pub tag: TheoremTag,
    pub x: f64,
    pub q_cap: u64,
    pub set_id: String,
    pub a_norm: f64,
    pub lhs: f64,
    pub normalizer: f64,
    pub rows: Vec<QRow>,
}

/// Per-residue ψ(x; m, ·) for every residue class mod m, one ascending pass.
fn psi_all_residues(tables: &SieveTables, x_floor: u64, modulus: u64) -> Vec<f64> {
    let lambda = tables.lambda_table();
    let mut acc = vec![0.0f64; modulus as usize];
    for n in 1..=x_floor {
        let l = lambda[n as usize];
        if l != 0.0 {
            acc[(n % modulus) as usize] += l;
        }
    }
    acc
}

fn theorem_moduli(selector: &ModuliSelector, q_cap: u64) -> Vec<u64> {
    match selector {
        ModuliSelector::Classical => (1..=q_cap).collect(),
        ModuliSelector::Set(set) => set.members_in(q_cap as f64, 2.0 * q_cap as f64),
    }
}

fn normalizer(tag: TheoremTag, x: f64, a_norm: f64, set_density: f64) -> f64 {
    let logx = x.ln().max(1.0);
    match tag {
        TheoremTag::BdhGeneral => set_density * x * x / logx.powf(a_norm),
        TheoremTag::BdhSquare | TheoremTag::ClassicalBdh => x * x / logx.powf(a_norm),
        TheoremTag::BvGeneral => set_density * x / logx.powf(a_norm),
        TheoremTag::BvSquare | TheoremTag::ClassicalBv => x / logx.powf(a_norm),
    }
}

/// Mean-square progression-error sum (Barban–Davenport–Halberstam shape).
///
/// General mode: Σ_{q} Σ*_a |ψ(x;q,a) − x/φ(q)|² over q in S(Q) (or q <= Q
/// classically). Square mode: Σ_{q <= Q} q·Σ*_{a mod q²} |ψ(x;q²,a) − x/φ(q²)|².
pub fn bdh_sum(
    tables: &SieveTables,
    x: f64,
    selector: &ModuliSelector,
    q_cap: u64,
    square_weight: bool,
    a_norm: f64,
) -> Result<ErrorSumReport> {
    theorem_sum(tables, x, selector, q_cap, square_weight, a_norm, false)
}

/// Worst-residue progression-error sum (Bombieri–Vinogradov shape); per-q rows
/// record the residue achieving the max (smallest residue on ties).
pub fn bv_sum(
    tables: &SieveTables,
    x: f64,
    selector: &ModuliSelector,
    q_cap: u64,
    square_weight: bool,
    a_norm: f64,
) -> Result<ErrorSumReport> {
    theorem_sum(tables, x, selector, q_cap, square_weight, a_norm, true)
}

fn theorem_sum(
    tables: &SieveTables,
    x: f64,
    selector: &ModuliSelector,
    q_cap: u64,
    square_weight: bool,
    a_norm: f64,
    max_mode: bool,
) -> Result<ErrorSumReport> {
    if q_cap == 0 {
        return Err(Error::InvalidArgument("Q must be >= 1".into()));
    }
    let x_floor = check_bound(tables, x)?;
    let moduli = if square_weight {
        (1..=q_cap).collect::<Vec<u64>>()
    } else {
        theorem_moduli(selector, q_cap)
    };
    if let Some(&top) = moduli.last() {
        let top_mod = if square_weight { top * top } else { top };
        if top_mod > tables.x_max() {
            return Err(Error::OutOfTable {
                y: top_mod as f64,
                x_max: tables.x_max(),
            });
        }
    }

    let rows: Vec<QRow> = moduli
        .par_iter()
        .map(|&q| {
            let modulus = if square_weight { q * q } else { q };
            let weight = if square_weight { q as f64 } else { 1.0 };
            let main = if square_weight {
                x / euler_phi_qsq(q).expect("phi(q^2) in range") as f64
            } else {
                x / tables.phi(q) as f64
            };
            let acc = psi_all_residues(tables, x_floor, modulus);
            if max_mode {
                let mut best = f64::NEG_INFINITY;
                let mut best_a = 1u64;
                for a in 1..=modulus {
                    if gcd(a, modulus) == 1 {
                        let d = (acc[(a % modulus) as usize] - main).abs();
                        if d > best {
                            best = d;
                            best_a = a;
                        }
                    }
                }
                QRow {
                    q,
                    modulus,
                    contribution: weight * best,
                    argmax_a: Some(best_a),
                }
            } else {
                let mut sum = 0.0f64;
                for a in 1..=modulus {
                    if gcd(a, modulus) == 1 {
                        let d = acc[(a % modulus) as usize] - main;
                        sum += d * d;
                    }
                }
                QRow {
                    q,
                    modulus,
                    contribution: weight * sum,
                    argmax_a: None,
                }
            }
        })
        .collect();

    let lhs = rows.iter().map(|r| r.contribution).sum::<f64>();
    let (tag, set_id, set_density) = match (selector, square_weight, max_mode) {
        (_, true, false) => (TheoremTag::BdhSquare, "squares".to_string(), 1.0),
        (_, true, true) => (TheoremTag::BvSquare, "squares".to_string(), 1.0),
        (ModuliSelector::Classical, false, false) => {
            (TheoremTag::ClassicalBdh, "classical".to_string(), 1.0)
        }
        (ModuliSelector::Classical, false, true) => {
            (TheoremTag::ClassicalBv, "classical".to_string(), 1.0)
        }
        (ModuliSelector::Set(set), false, mode) => {
            let density = moduli.len() as f64 / q_cap as f64;
            let tag = if mode {
                TheoremTag::BvGeneral
            } else {
                TheoremTag::BdhGeneral
            };
            (tag, set.id().to_string(), density)
        }
    };
    Ok(ErrorSumReport {
        tag,
        x,
        q_cap,
        set_id,
        a_norm,
        lhs,
        normalizer: normalizer(tag, x, a_norm, set_density),
        rows,
    })
}

/// Classical worst-progression sum with a max over a y-grid:
/// Σ_{q <= Q} max_{y in grid} max*_a |ψ(y;q,a) − y/φ(q)|.
pub fn bv_classical_grid(
    tables: &SieveTables,
    x: f64,
    q_cap: u64,
    y_grid: &[f64],
    a_norm: f64,
) -> Result<ErrorSumReport> {
    if y_grid.is_empty() {
        return bv_sum(tables, x, &ModuliSelector::Classical, q_cap, false, a_norm);
    }
    check_bound(tables, x)?;
    let mut grid: Vec<f64> = y_grid.iter().copied().filter(|&y| y >= 2.0 && y <= x).collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lambda = tables.lambda_table();
    let rows: Vec<QRow> = (1..=q_cap)
        .into_par_iter()
        .map(|q| {
            let phi = tables.phi(q) as f64;
            let mut acc = vec![0.0f64; q as usize];
            let mut best = f64::NEG_INFINITY;
            let mut best_a = 1u64;
            let mut n = 1u64;
            for &y in &grid {
                let bound = y.floor() as u64;
                while n <= bound {
                    let l = lambda[n as usize];
                    if l != 0.0 {
                        acc[(n % q) as usize] += l;
                    }
                    n += 1;
                }
                for a in 1..=q {
                    if gcd(a, q) == 1 {
                        let d = (acc[(a % q) as usize] - y / phi).abs();
                        if d > best || (d == best && a < best_a) {
                            best = d;
                            best_a = a;
                        }
                    }
                }
            }
            QRow {
                q,
                modulus: q,
                contribution: best,
                argmax_a: Some(best_a),
            }
        })
        .collect();
    let lhs = rows.iter().map(|r| r.contribution).sum::<f64>();
    Ok(ErrorSumReport {
        tag: TheoremTag::ClassicalBv,
        x,
        q_cap,
        set_id: "classical".into(),
        a_norm,
        lhs,
        normalizer: normalizer(TheoremTag::ClassicalBv, x, a_norm, 1.0),
        rows,
    })
}

/// The four components of the exact Vaughan decomposition of
/// Σ_{n <= x} Λ(n) f(n), with the bilinear ranges cut at U and V.
#[derive(Debug, Clone)]
pub struct VaughanDecomposition {
    pub x: f64,
    pub u: f64,
    pub v: f64,
    /// Σ_{n <= U} Λ(n) f(n)
    pub s1: Complex64,
    /// −Σ_{m <= U} Σ_{d <= V} Λ(m) μ(d) Σ_r f(mdr)
    pub s2: Complex64,
    /// Σ_{d <= V} μ(d) Σ_h log(h) f(dh)
    pub s3: Complex64,
    /// −Σ_{m > U} Σ_{k > V} Λ(m) b(k) f(mk), |b(k)| <= τ(k)
    pub s4: Complex64,
    /// Direct Σ_{n <= x} Λ(n) f(n)
    pub total: Complex64,
    /// |(s1+s2+s3+s4) − total|
    pub residual: f64,
}

impl VaughanDecomposition {
    pub fn components_magnitude(&self) -> f64 {
        self.s1.norm() + self.s2.norm() + self.s3.norm() + self.s4.norm()
    }
}

/// Type-II coefficients b(k) = Σ_{d | k, d <= V} μ(d), sieved up to k_max and
/// zeroed at k <= V (there the divisor sum is complete and vanishes except at
/// k = 1, which never enters the k > V range). Exposed so the coefficient
/// bound |b(k)| <= τ(k) can be checked against the divisor table.
pub fn vaughan_b_coeffs(tables: &SieveTables, v: f64, k_max: u64) -> Vec<i64> {
    let mut b = vec![0i64; (k_max + 1) as usize];
    let v_floor = v.floor() as u64;
    for d in 1..=v_floor.min(k_max) {
        let mu = tables.mu(d) as i64;
        if mu == 0 {
            continue;
        }
        let mut k = d;
        while k <= k_max {
            b[k as usize] += mu;
            k += d;
        }
    }
    // below the cut everything cancels
    for k in 0..=v_floor.min(k_max) {
        b[k as usize] = 0;
    }
    b
}

/// Exact four-part Vaughan decomposition of Σ_{n <= x} Λ(n) f(n).
pub fn vaughan_decompose(
    tables: &SieveTables,
    x: f64,
    u: f64,
    v: f64,
    f: &dyn Fn(u64) -> Complex64,
) -> Result<VaughanDecomposition> {
    if u < 1.0 || v < 1.0 {
        return Err(Error::InvalidArgument("U and V must be >= 1".into()));
    }
    if u * v > x {
        return Err(Error::InvalidArgument(format!(
            "Vaughan ranges need U·V <= x, got {u}·{v} > {x}"
        )));
    }
    let xn = check_bound(tables, x)?;
    let lambda = tables.lambda_table();
    let u_floor = u.floor() as u64;
    let v_floor = v.floor() as u64;

    let mut s1 = Complex64::new(0.0, 0.0);
    for n in 1..=u_floor.min(xn) {
        let l = lambda[n as usize];
        if l != 0.0 {
            s1 += l * f(n);
        }
    }

    let mut s2 = Complex64::new(0.0, 0.0);
    for m in 1..=u_floor.min(xn) {
        let lm = lambda[m as usize];
        if lm == 0.0 {
            continue;
        }
        for d in 1..=v_floor.min(xn / m) {
            let mu = tables.mu(d) as f64;
            if mu == 0.0 {
                continue;
            }
            let md = m * d;
            let mut inner = Complex64::new(0.0, 0.0);
            for r in 1..=xn / md {
                inner += f(md * r);
            }
            s2 -= lm * mu * inner;
        }
    }

    let mut s3 = Complex64::new(0.0, 0.0);
    for d in 1..=v_floor.min(xn) {
        let mu = tables.mu(d) as f64;
        if mu == 0.0 {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for h in 1..=xn / d {
            inner += (h as f64).ln() * f(d * h);
        }
        s3 += mu * inner;
    }

    let mut s4 = Complex64::new(0.0, 0.0);
    if u_floor < xn {
        let k_max = xn / (u_floor + 1);
        let b = vaughan_b_coeffs(tables, v, k_max);
        for m in (u_floor + 1)..=xn / (v_floor + 1).max(1) {
            let lm = lambda[m as usize];
            if lm == 0.0 {
                continue;
            }
            let mut inner = Complex64::new(0.0, 0.0);
            for k in (v_floor + 1)..=xn / m {
                let bk = b[k as usize];
                if bk != 0 {
                    inner += bk as f64 * f(m * k);
                }
            }
            s4 -= lm * inner;
        }
    }

    let mut total = Complex64::new(0.0, 0.0);
    for n in 1..=xn {
        let l = lambda[n as usize];
        if l != 0.0 {
            total += l * f(n);
        }
    }

    let residual = (s1 + s2 + s3 + s4 - total).norm();
    Ok(VaughanDecomposition {
        x,
        u,
        v,
        s1,
        s2,
        s3,
        s4,
        total,
        residual,
    })
}

/// Σ_{y < q <= 2y} 1/φ(q²) against its main term ζ(2)ζ(3)/ζ(6) · 1/(2y).
#[derive(Debug, Clone, Serialize)]
pub struct PhiSquareSum {
    pub y: u64,
    pub sum: f64,
    pub main: f64,
    pub error: f64,
}

pub fn phi_square_sum(tables: &SieveTables, y: u64) -> Result<PhiSquareSum> {
    if y == 0 {
        return Err(Error::InvalidArgument("y must be >= 1".into()));
    }
    if 2 * y > tables.x_max() {
        return Err(Error::OutOfTable {
            y: 2.0 * y as f64,
            x_max: tables.x_max(),
        });
    }
    let mut sum = 0.0f64;
    for q in (y + 1)..=(2 * y) {
        sum += 1.0 / (q as f64 * tables.phi(q) as f64);
    }
    let main = PHI_SQ_DENSITY / (2.0 * y as f64);
    Ok(PhiSquareSum {
        y,
        sum,
        main,
        error: sum - main,
    })
}
