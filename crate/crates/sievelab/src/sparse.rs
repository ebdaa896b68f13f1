//! Sparse moduli sets S, their derived sets S_t = { q : qt in S } and the
//! empirical well-distribution / density scans.
//!
//! Throughout the crate, `S(R)` means the members of S in the dyadic window
//! `(R, 2R]`.

use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::arithmetic::{gcd, isqrt};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum SetKind {
    Squares,
    All,
    Squarefree,
    Explicit(Arc<Vec<u64>>),
}

/// An abstract sparse set of natural numbers with a membership predicate and
/// an interval enumerator.
#[derive(Debug, Clone)]
pub struct ModuliSet {
    id: String,
    kind: SetKind,
}

impl ModuliSet {
    pub fn squares() -> Self {
        ModuliSet {
            id: "squares".into(),
            kind: SetKind::Squares,
        }
    }

    pub fn all() -> Self {
        ModuliSet {
            id: "all".into(),
            kind: SetKind::All,
        }
    }

    pub fn squarefree() -> Self {
        ModuliSet {
            id: "squarefree".into(),
            kind: SetKind::Squarefree,
        }
    }

    /// Explicit ascending list of members.
    pub fn explicit(id: &str, members: Vec<u64>) -> Result<Self> {
        for w in members.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidArgument(format!(
                    "explicit set {id} is not strictly ascending at {} >= {}",
                    w[0], w[1]
                )));
            }
        }
        if members.first() == Some(&0) {
            return Err(Error::InvalidArgument(
                "explicit set members must be >= 1".into(),
            ));
        }
        Ok(ModuliSet {
            id: id.into(),
            kind: SetKind::Explicit(Arc::new(members)),
        })
    }

    /// Loads an explicit set from a text file, one natural per line, ascending.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut members = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let value: u64 = line.parse().map_err(|e| Error::MalformedLine {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("{e}"),
            })?;
            if value == 0 {
                return Err(Error::MalformedLine {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message: "members must be >= 1".into(),
                });
            }
            if let Some(&last) = members.last() {
                if value <= last {
                    return Err(Error::MalformedLine {
                        path: path.to_path_buf(),
                        line: idx + 1,
                        message: format!("not ascending: {value} after {last}"),
                    });
                }
            }
            members.push(value);
        }
        let id = format!("file:{}", path.display());
        Ok(ModuliSet {
            id,
            kind: SetKind::Explicit(Arc::new(members)),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind_tag(&self) -> &'static str {
        match self.kind {
            SetKind::Squares => "squares",
            SetKind::All => "all",
            SetKind::Squarefree => "squarefree",
            SetKind::Explicit(_) => "explicit-list",
        }
    }

    pub fn contains(&self, q: u64) -> bool {
        if q == 0 {
            return false;
        }
        match &self.kind {
            SetKind::Squares => {
                let r = isqrt(q);
                r * r == q
            }
            SetKind::All => true,
            SetKind::Squarefree => is_squarefree(q),
            SetKind::Explicit(list) => list.binary_search(&q).is_ok(),
        }
    }

    /// Members q with lo < q <= hi, strictly ascending.
    pub fn members_in(&self, lo: f64, hi: f64) -> Vec<u64> {
        if hi < 1.0 || hi <= lo {
            return Vec::new();
        }
        let nlo = lo.max(0.0).floor() as u64; // members are > nlo (and > lo)
        let nhi = hi.floor() as u64;
        match &self.kind {
            SetKind::Squares => {
                let mut out = Vec::new();
                let mut r = isqrt(nlo);
                while r * r <= nlo || (r as f64) * (r as f64) <= lo {
                    r += 1;
                }
                while r * r <= nhi {
                    out.push(r * r);
                    r += 1;
                }
                out
            }
            SetKind::All => ((nlo + 1).max(1)..=nhi).collect(),
            SetKind::Squarefree => ((nlo + 1).max(1)..=nhi)
                .filter(|&q| is_squarefree(q))
                .collect(),
            SetKind::Explicit(list) => {
                let start = list.partition_point(|&m| (m as f64) <= lo);
                let end = list.partition_point(|&m| m <= nhi);
                list[start..end].to_vec()
            }
        }
    }

    /// |S(R)| with the dyadic convention: members in (R, 2R].
    pub fn dyadic_count(&self, r: f64) -> u64 {
        self.members_in(r, 2.0 * r).len() as u64
    }

    /// The derived set S_t.
    pub fn derive(&self, t: u64) -> DerivedSet {
        DerivedSet {
            base: self.clone(),
            t,
        }
    }
}

fn is_squarefree(mut q: u64) -> bool {
    let mut d = 2u64;
    while d * d <= q {
        if q % d == 0 {
            q /= d;
            if q % d == 0 {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// S_t = { q : q·t in S }.
#[derive(Debug, Clone)]
pub struct DerivedSet {
    base: ModuliSet,
    t: u64,
}

impl DerivedSet {
    pub fn new(base: ModuliSet, t: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument("derived set needs t >= 1".into()));
        }
        Ok(base.derive(t))
    }

    pub fn base(&self) -> &ModuliSet {
        &self.base
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// (S_{t1})_{t2} = S_{t1·t2}.
    pub fn derive(&self, t2: u64) -> DerivedSet {
        DerivedSet {
            base: self.base.clone(),
            t: self.t * t2,
        }
    }

    pub fn contains(&self, q: u64) -> bool {
        match q.checked_mul(self.t) {
            Some(qt) => self.base.contains(qt),
            None => false,
        }
    }

    /// Members q of S_t with lo < q <= hi.
    pub fn members_in(&self, lo: f64, hi: f64) -> Vec<u64> {
        if hi < 1.0 || hi <= lo {
            return Vec::new();
        }
        let t = self.t;
        match &self.base.kind {
            SetKind::All => ModuliSet::all().members_in(lo, hi),
            SetKind::Squares => {
                // q·t = s²  =>  s in (sqrt(lo·t), sqrt(hi·t)] with t | s²
                let tf = t as f64;
                let nhi = hi.floor() as u64;
                let mut out = Vec::new();
                let mut s = isqrt((lo.max(0.0) * tf) as u64);
                loop {
                    let sq = match s.checked_mul(s) {
                        Some(v) => v,
                        None => break,
                    };
                    if sq > nhi.saturating_mul(t) {
                        break;
                    }
                    if sq % t == 0 {
                        let q = sq / t;
                        if q as f64 > lo && q <= nhi {
                            out.push(q);
                        }
                    }
                    s += 1;
                }
                out
            }
            SetKind::Explicit(list) => {
                let lo_m = lo.max(0.0) * t as f64;
                let hi_m = hi.floor() * t as f64;
                let start = list.partition_point(|&m| (m as f64) <= lo_m);
                let end = list.partition_point(|&m| (m as f64) <= hi_m);
                list[start..end]
                    .iter()
                    .filter(|&&m| m % t == 0)
                    .map(|&m| m / t)
                    .collect()
            }
            SetKind::Squarefree => {
                let nlo = lo.max(0.0).floor() as u64;
                let nhi = hi.floor() as u64;
                ((nlo + 1).max(1)..=nhi)
                    .filter(|&q| self.contains(q))
                    .collect()
            }
        }
    }

    pub fn dyadic_count(&self, r: f64) -> u64 {
        self.members_in(r, 2.0 * r).len() as u64
    }
}

/// One well-distribution observation: how many members of S_t land in
/// `[x, x+y] ∩ (l mod k)` versus the expected-cardinality majorant
/// `(|S_t(R)|·y/(kR) + 1)·(Rt)^eps` with implied constant 1.
#[derive(Debug, Clone, Serialize)]
pub struct WellDistReport {
    pub t: u64,
    pub r: u64,
    pub k: u64,
    pub l: u64,
    pub x: f64,
    pub y: f64,
    pub observed: u64,
    pub majorant: f64,
    pub ratio: f64,
}

/// Exact count of q in S_t with x <= q <= x+y and q = l mod k.
pub fn count_in_progression(d: &DerivedSet, x: f64, y: f64, k: u64, l: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if y < 0.0 {
        return Err(Error::InvalidArgument("window length y must be >= 0".into()));
    }
    if gcd(k, l) != 1 && !(k == 1) {
        return Err(Error::InvalidArgument(format!(
            "gcd(k, l) must be 1, got k={k}, l={l}"
        )));
    }
    let lo = x.ceil() - 1.0; // members are > lo, i.e. >= ceil(x)
    let hi = (x + y).floor();
    let res = l % k;
    Ok(d
        .members_in(lo, hi)
        .into_iter()
        .filter(|&q| q % k == res)
        .count() as u64)
}

/// Scans a grid of (t, R, k, l) tuples and deterministic sub-windows of
/// [R, 2R], reporting the observed/majorant ratio for each and the global max.
pub fn well_distribution_scan(
    s: &ModuliSet,
    r_list: &[u64],
    t_list: &[u64],
    k_max: u64,
    eps: f64,
) -> Result<(Vec<WellDistReport>, f64)> {
    if eps <= 0.0 {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let mut reports = Vec::new();
    let mut global_max: f64 = 0.0;
    for &t in t_list {
        let d = s.derive(t);
        for &r in r_list {
            if r == 0 {
                continue;
            }
            let rf = r as f64;
            let st_count = d.dyadic_count(rf);
            let power = (rf * t as f64).powf(eps);
            for k in 1..=k_max.max(1) {
                for l in 1..=k {
                    if gcd(k, l) != 1 {
                        continue;
                    }
                    let mut best: Option<WellDistReport> = None;
                    for &y in &[rf, rf / 2.0, rf / 4.0] {
                        for &x in &[rf, rf + (rf - y) / 2.0, 2.0 * rf - y] {
                            if x < rf || x + y > 2.0 * rf + 1e-9 {
                                continue;
                            }
                            let observed = count_in_progression(&d, x, y, k, l)?;
                            let majorant =
                                (st_count as f64 * y / (k as f64 * rf) + 1.0) * power;
                            let ratio = observed as f64 / majorant;
                            if best.as_ref().map_or(true, |b| ratio > b.ratio) {
                                best = Some(WellDistReport {
                                    t,
                                    r,
                                    k,
                                    l,
                                    x,
                                    y,
                                    observed,
                                    majorant,
                                    ratio,
                                });
                            }
                        }
                    }
                    if let Some(rep) = best {
                        global_max = global_max.max(rep.ratio);
                        reports.push(rep);
                    }
                }
            }
        }
    }
    Ok((reports, global_max))
}

/// The constant that the sparseness condition |S_q(Q/q)| << |S(Q)|/q^eps
/// demands at this (Q, q): returns |S_q(Q/q)|·q^eps / |S(Q)|.
pub fn condition_23_ratio(s: &ModuliSet, q_cap: u64, q: u64, eps: f64) -> Result<f64> {
    if q == 0 || q > q_cap {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= q <= Q, got q={q}, Q={q_cap}"
        )));
    }
    let s_q = s.dyadic_count(q_cap as f64);
    if s_q == 0 {
        return Err(Error::DegenerateInput(format!(
            "|S(Q)| = 0 at Q = {q_cap}; ratio undefined"
        )));
    }
    let r = q_cap as f64 / q as f64;
    let sqq = s.derive(q).dyadic_count(r);
    Ok(sqq as f64 * (q as f64).powf(eps) / s_q as f64)
}

/// One density row of the lower-bound hypothesis check.
#[derive(Debug, Clone, Serialize)]
pub struct Condition24Row {
    pub q_cap: u64,
    pub count: u64,
    pub per_sqrt: f64,
    pub per_three_quarters: f64,
}

/// |S(Q)| together with the normalizations |S(Q)|/sqrt(Q) and |S(Q)|/Q^(3/4),
/// for deciding empirically which density hypothesis a set meets.
pub fn condition_24_check(s: &ModuliSet, q_list: &[u64]) -> Vec<Condition24Row> {
    q_list
        .iter()
        .filter(|&&q| q > 0)
        .map(|&q| {
            let count = s.dyadic_count(q as f64);
            Condition24Row {
                q_cap: q,
                count,
                per_sqrt: count as f64 / (q as f64).sqrt(),
                per_three_quarters: count as f64 / (q as f64).powf(0.75),
            }
        })
        .collect()
}
