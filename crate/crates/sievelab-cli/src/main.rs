//! `sievelab` — command-line driver for the large-sieve / sparse-moduli
//! experiments. Every subcommand is a batch run: flags in, one CSV/JSON/pretty
//! report out, byte-identical across repeat runs and thread counts.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use sievelab::am2;
use sievelab::arithmetic::SieveTables;
use sievelab::dirichlet::{character_group, gauss_sum};
use sievelab::error::Error;
use sievelab::large_sieve::{self, CoeffSequence};
use sievelab::output::{self, csv_row, fmt_f64};
use sievelab::progressions::{self, ModuliSelector};
use sievelab::sparse::{self, ModuliSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Pretty,
}

#[derive(Debug, Args)]
struct Common {
    /// Output format
    #[arg(long, value_enum, default_value = "pretty", global = true)]
    format: Format,
    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores); results do not depend on this
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Parser)]
#[command(
    name = "sievelab",
    about = "Experiments with large-sieve inequalities over sparse sets of moduli \
             and prime equidistribution in arithmetic progressions"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Build the sieve tables and store them in the cache directory
    SieveBuild {
        /// Table bound
        #[arg(long)]
        xmax: u64,
    },
    /// List the Dirichlet characters mod Q with conductors and Gauss sums
    CharTable {
        #[arg(long = "Q")]
        q: u64,
    },
    /// Classical multiplicative large sieve: lhs vs (Q^2 + N)·Z over seeded trials
    LsClassical {
        #[arg(long = "Q")]
        q_cap: u64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value = "random-unit")]
        seq: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
    },
    /// Sparse additive large sieve over S_t(Q/t) with all candidate bounds
    LsSparse {
        #[arg(long = "Q")]
        q_cap: u64,
        #[arg(long, default_value_t = 1)]
        t: u64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value = "squares")]
        set: String,
        #[arg(long, default_value = "all-ones")]
        seq: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Weighted bilinear form with truncation maximum vs its bound
    LsBilinear {
        #[arg(long = "Q")]
        q_cap: u64,
        #[arg(long, default_value_t = 1)]
        t: u64,
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value = "squares")]
        set: String,
        #[arg(long, default_value = "random-unit")]
        seq: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Ratio of the squares-set additive energy to the conjectured bound
    LsConjecture {
        #[arg(long = "Q")]
        q_cap: u64,
        #[arg(long, default_value_t = 1)]
        t: u64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value = "all-ones")]
        seq: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Mean-square progression-error sum over a moduli set or the classical range
    Bdh(TheoremArgs),
    /// Mean-square progression-error sum over square moduli q^2, q <= Q, weight q
    BdhSquare(TheoremArgs),
    /// Worst-residue progression-error sum over a moduli set or the classical range
    Bv(TheoremArgs),
    /// Worst-residue progression-error sum over square moduli q^2, q <= Q, weight q
    BvSquare(TheoremArgs),
    /// Exact four-part Vaughan decomposition of psi, residual check
    VaughanCheck {
        #[arg(long)]
        x: f64,
        #[arg(long = "U")]
        u: f64,
        #[arg(long = "V")]
        v: f64,
        /// Also decompose against every character of this modulus
        #[arg(long = "Q")]
        q: Option<u64>,
        #[arg(long)]
        xmax: Option<u64>,
    },
    /// Dyadic sum of 1/phi(q^2) against its main term zeta(2)zeta(3)/zeta(6) / (2y)
    PhiSum {
        #[arg(long)]
        y: u64,
        #[arg(long)]
        xmax: Option<u64>,
    },
    /// Well-distribution scan of a moduli set over windows and progressions
    WellDist {
        #[arg(long, default_value = "squares")]
        set: String,
        /// Dyadic scales R, comma-separated
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
        rlist: Vec<u64>,
        /// Scaling parameters t, comma-separated
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        tlist: Vec<u64>,
        #[arg(long, default_value_t = 6)]
        kmax: u64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Census of primes p <= x with squarefree kernel s(p-1) <= p^theta
    CensusAm2 {
        #[arg(long)]
        x: u64,
        /// Kernel exponent; the 5/9 default is exploratory (sharper than proved)
        #[arg(long, default_value_t = 5.0 / 9.0)]
        theta: f64,
        #[arg(long)]
        xmax: Option<u64>,
        /// How many witness rows (p, a, m) to list
        #[arg(long, default_value_t = 20)]
        witnesses: usize,
    },
    /// Square-divisor-weighted von Mangoldt sum over (x, 2x] vs its density main term
    WeightedSum {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
        #[arg(long)]
        xmax: Option<u64>,
    },
    /// Count of n <= x with squarefree kernel s(n) <= n^theta
    Sparsity {
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 5.0 / 9.0)]
        theta: f64,
    },
}

#[derive(Debug, Args)]
struct TheoremArgs {
    #[arg(long)]
    x: f64,
    #[arg(long)]
    qmax: u64,
    /// Moduli set (squares|all|squarefree|file:PATH); omit for the classical range q <= Q
    #[arg(long)]
    set: Option<String>,
    /// Exponent A in the reporting normalizer x^k / (log x)^A
    #[arg(long = "A", default_value_t = 2.0)]
    a_norm: f64,
    #[arg(long)]
    xmax: Option<u64>,
}

/// One rendered report, plus the metadata every JSON payload carries.
struct Report {
    anchor: &'static str,
    params: Value,
    seed: Option<u64>,
    data: Value,
    csv: String,
    pretty: String,
}

fn parse_set(spec: &str) -> Result<ModuliSet, Error> {
    match spec {
        "squares" => Ok(ModuliSet::squares()),
        "all" => Ok(ModuliSet::all()),
        "squarefree" => Ok(ModuliSet::squarefree()),
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                ModuliSet::from_file(Path::new(path))
            } else {
                Err(Error::InvalidArgument(format!(
                    "unknown set spec '{other}' (want squares|all|squarefree|file:PATH)"
                )))
            }
        }
    }
}

fn cache_path(xmax: u64) -> Option<PathBuf> {
    std::env::var_os("SIEVELAB_CACHE")
        .map(|dir| PathBuf::from(dir).join(format!("sievelab-tables-{xmax}.bin")))
}

fn get_tables(xmax: u64) -> Result<SieveTables, Error> {
    if let Some(path) = cache_path(xmax) {
        if let Some(t) = SieveTables::load_cache(&path, xmax).unwrap_or(None) {
            return Ok(t);
        }
        let t = SieveTables::build(xmax)?;
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        t.save_cache(&path)?;
        return Ok(t);
    }
    SieveTables::build(xmax)
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn run(cli: Cli) -> Result<Report, Error> {
    match cli.cmd {
        Cmd::SieveBuild { xmax } => {
            let path = cache_path(xmax);
            let t = get_tables(xmax)?;
            let psi = t.lambda_table().iter().sum::<f64>();
            let n_primes = t.primes().len() as u64;
            let cached = path.as_ref().map(|p| p.display().to_string());
            let mut pretty = format!(
                "sieve tables built to x_max = {xmax}\n  primes: {n_primes}\n  psi(x_max) = {}\n",
                fmt_f64(psi)
            );
            if let Some(p) = &cached {
                pretty.push_str(&format!("  cached at: {p}\n"));
            } else {
                pretty.push_str("  not cached (set SIEVELAB_CACHE to enable)\n");
            }
            Ok(Report {
                anchor: "von Mangoldt / totient / Moebius sieve tables",
                params: json!({ "xmax": xmax }),
                seed: None,
                data: json!({ "xmax": xmax, "primes": n_primes, "psi": psi, "cache": cached }),
                csv: format!(
                    "xmax,primes,psi\n{}\n",
                    csv_row(&[xmax.to_string(), n_primes.to_string(), fmt_f64(psi)])
                ),
                pretty,
            })
        }

        Cmd::CharTable { q } => {
            let group = character_group(q)?;
            let mut csv = String::from("index,conductor,primitive,principal,order,gauss_re,gauss_im,gauss_abs\n");
            let mut rows = Vec::new();
            let mut pretty = format!("characters mod {q} ({} total)\n", group.len());
            for (i, chi) in group.characters().iter().enumerate() {
                let tau = gauss_sum(chi);
                let order = char_order(chi, q);
                csv.push_str(&csv_row(&[
                    i.to_string(),
                    chi.conductor().to_string(),
                    chi.is_primitive().to_string(),
                    chi.is_principal().to_string(),
                    order.to_string(),
                    fmt_f64(tau.re),
                    fmt_f64(tau.im),
                    fmt_f64(tau.norm()),
                ]));
                csv.push('\n');
                rows.push(json!({
                    "index": i,
                    "conductor": chi.conductor(),
                    "primitive": chi.is_primitive(),
                    "principal": chi.is_principal(),
                    "order": order,
                    "gauss_sum": complex_json(tau),
                }));
                pretty.push_str(&format!(
                    "  chi_{i}: conductor {}, order {}, |tau| = {:.6}{}{}\n",
                    chi.conductor(),
                    order,
                    tau.norm(),
                    if chi.is_primitive() { ", primitive" } else { "" },
                    if chi.is_principal() { ", principal" } else { "" },
                ));
            }
            Ok(Report {
                anchor: "Dirichlet character group, conductors and Gauss sums",
                params: json!({ "Q": q }),
                seed: None,
                data: json!({ "modulus": q, "characters": rows }),
                csv,
                pretty,
            })
        }

        Cmd::LsClassical {
            q_cap,
            n,
            seq,
            seed,
            trials,
        } => {
            let mut csv = String::from("trial,seed,lhs,rhs,ratio,ok\n");
            let mut rows = Vec::new();
            let mut violations = 0u64;
            for trial in 0..trials.max(1) {
                let s = seed.wrapping_add(trial);
                let coeffs = CoeffSequence::from_spec(&seq, 0, n, s)?;
                let (lhs, rhs) = large_sieve::classical_ls_check(q_cap, &coeffs)?;
                let ok = lhs <= rhs * (1.0 + 1e-9);
                if !ok {
                    violations += 1;
                }
                let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
                csv.push_str(&csv_row(&[
                    trial.to_string(),
                    s.to_string(),
                    fmt_f64(lhs),
                    fmt_f64(rhs),
                    fmt_f64(ratio),
                    ok.to_string(),
                ]));
                csv.push('\n');
                rows.push(json!({
                    "trial": trial, "seed": s, "lhs": lhs, "rhs": rhs, "ratio": ratio, "ok": ok
                }));
            }
            let pretty = format!(
                "classical large sieve: Q = {q_cap}, N = {n}, seq = {seq}\n  trials: {}\n  violations of lhs <= (Q^2+N)Z: {violations}\n",
                trials.max(1)
            );
            Ok(Report {
                anchor: "classical multiplicative large sieve inequality",
                params: json!({ "Q": q_cap, "N": n, "seq": seq, "trials": trials }),
                seed: Some(seed),
                data: json!({ "violations": violations, "trials": rows }),
                csv,
                pretty,
            })
        }

        Cmd::LsSparse {
            q_cap,
            t,
            n,
            eps,
            set,
            seq,
            seed,
        } => {
            let set = parse_set(&set)?;
            let coeffs = CoeffSequence::from_spec(&seq, 0, n, seed)?;
            let exp = large_sieve::sparse_experiment(&set, q_cap, t, &coeffs, eps)?;
            let pretty = format!(
                "sparse additive large sieve: set = {}, Q = {q_cap}, t = {t}, N = {n}\n  lhs = {}\n  classical rhs = {} (ratio {:.4})\n  sparse rhs    = {} (ratio {:.4})\n  conjecture rhs = {} (ratio {:.4})\n",
                exp.set_id,
                fmt_f64(exp.lhs),
                fmt_f64(exp.bounds.classical),
                exp.ratios.classical,
                fmt_f64(exp.bounds.sparse),
                exp.ratios.sparse,
                fmt_f64(exp.bounds.conjecture),
                exp.ratios.conjecture,
            );
            Ok(Report {
                anchor: "large sieve with sparse sets of moduli, additive form",
                params: json!({ "Q": q_cap, "t": t, "N": n, "eps": eps, "set": exp.set_id, "seq": seq }),
                seed: Some(seed),
                data: serde_json::to_value(&exp).expect("serializable"),
                csv: output::experiment_csv(&exp),
                pretty,
            })
        }

        Cmd::LsBilinear {
            q_cap,
            t,
            m,
            n,
            eps,
            set,
            seq,
            seed,
        } => {
            let set = parse_set(&set)?;
            let a_seq = CoeffSequence::from_spec(&seq, 0, m, seed)?;
            let b_seq = CoeffSequence::from_spec(&seq, 0, n, seed.wrapping_add(1))?;
            let lhs = large_sieve::bilinear_maxx_lhs(&set, q_cap, t, &a_seq, &b_seq, None)?;
            let rhs = large_sieve::bilinear_rhs(
                &set,
                q_cap,
                t,
                m as u64,
                n as u64,
                a_seq.norm_sq(),
                b_seq.norm_sq(),
                eps,
            )?;
            let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
            Ok(Report {
                anchor: "bilinear character-sum form with truncation maximum",
                params: json!({ "Q": q_cap, "t": t, "M": m, "N": n, "eps": eps, "set": set.id(), "seq": seq }),
                seed: Some(seed),
                data: json!({ "lhs": lhs, "rhs": rhs, "ratio": ratio }),
                csv: format!(
                    "quantity,value\nlhs,{}\nrhs,{}\nratio,{}\n",
                    fmt_f64(lhs),
                    fmt_f64(rhs),
                    fmt_f64(ratio)
                ),
                pretty: format!(
                    "bilinear form: set = {}, Q = {q_cap}, t = {t}, M = {m}, N = {n}\n  lhs = {}\n  rhs = {}\n  ratio = {:.6}\n",
                    set.id(),
                    fmt_f64(lhs),
                    fmt_f64(rhs),
                    ratio
                ),
            })
        }

        Cmd::LsConjecture {
            q_cap,
            t,
            n,
            eps,
            seq,
            seed,
        } => {
            let coeffs = CoeffSequence::from_spec(&seq, 0, n, seed)?;
            let ratio = large_sieve::conjecture_ratio(q_cap, t, &coeffs, eps)?;
            Ok(Report {
                anchor: "conjectured square-moduli large sieve bound",
                params: json!({ "Q": q_cap, "t": t, "N": n, "eps": eps, "seq": seq }),
                seed: Some(seed),
                data: json!({ "ratio": ratio }),
                csv: format!("quantity,value\nratio,{}\n", fmt_f64(ratio)),
                pretty: format!(
                    "conjectured bound ratio (squares set): Q = {q_cap}, t = {t}, N = {n}\n  lhs / rhs = {:.6}\n",
                    ratio
                ),
            })
        }

        Cmd::Bdh(args) => theorem_report(args, false, false),
        Cmd::BdhSquare(args) => theorem_report(args, true, false),
        Cmd::Bv(args) => theorem_report(args, false, true),
        Cmd::BvSquare(args) => theorem_report(args, true, true),

        Cmd::VaughanCheck { x, u, v, q, xmax } => {
            let xmax = xmax.unwrap_or((x as u64).max(2));
            let tables = get_tables(xmax)?;
            let mut cases: Vec<(String, Box<dyn Fn(u64) -> Complex64>)> =
                vec![("constant-1".into(), Box::new(|_| Complex64::new(1.0, 0.0)))];
            if let Some(q) = q {
                let group = character_group(q)?;
                for (i, chi) in group.characters().iter().enumerate() {
                    let chi = chi.clone();
                    cases.push((format!("chi_{i}-mod-{q}"), Box::new(move |n| chi.eval(n as i64))));
                }
            }
            let mut csv = String::from(
                "f,s1_re,s1_im,s2_re,s2_im,s3_re,s3_im,s4_re,s4_im,total_re,total_im,residual\n",
            );
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for (tag, f) in &cases {
                let d = progressions::vaughan_decompose(&tables, x, u, v, f.as_ref())?;
                let rel = d.residual / (1.0 + d.components_magnitude());
                worst = worst.max(rel);
                csv.push_str(&csv_row(&[
                    tag.clone(),
                    fmt_f64(d.s1.re),
                    fmt_f64(d.s1.im),
                    fmt_f64(d.s2.re),
                    fmt_f64(d.s2.im),
                    fmt_f64(d.s3.re),
                    fmt_f64(d.s3.im),
                    fmt_f64(d.s4.re),
                    fmt_f64(d.s4.im),
                    fmt_f64(d.total.re),
                    fmt_f64(d.total.im),
                    fmt_f64(d.residual),
                ]));
                csv.push('\n');
                rows.push(json!({
                    "f": tag,
                    "s1": complex_json(d.s1),
                    "s2": complex_json(d.s2),
                    "s3": complex_json(d.s3),
                    "s4": complex_json(d.s4),
                    "total": complex_json(d.total),
                    "residual": d.residual,
                }));
            }
            Ok(Report {
                anchor: "Vaughan identity four-part decomposition",
                params: json!({ "x": x, "U": u, "V": v, "Q": q, "xmax": xmax }),
                seed: None,
                data: json!({ "worst_relative_residual": worst, "cases": rows }),
                csv,
                pretty: format!(
                    "Vaughan decomposition: x = {x}, U = {u}, V = {v}, {} case(s)\n  worst relative residual = {}\n",
                    cases.len(),
                    fmt_f64(worst)
                ),
            })
        }

        Cmd::PhiSum { y, xmax } => {
            let xmax = xmax.unwrap_or(2 * y + 1).max(2 * y);
            let tables = get_tables(xmax)?;
            let r = progressions::phi_square_sum(&tables, y)?;
            Ok(Report {
                anchor: "dyadic sum of reciprocal totients of squares",
                params: json!({ "y": y }),
                seed: None,
                data: serde_json::to_value(&r).expect("serializable"),
                csv: format!(
                    "y,sum,main,error\n{}\n",
                    csv_row(&[
                        y.to_string(),
                        fmt_f64(r.sum),
                        fmt_f64(r.main),
                        fmt_f64(r.error)
                    ])
                ),
                pretty: format!(
                    "sum of 1/phi(q^2) for {y} < q <= {}\n  sum   = {}\n  main  = {}\n  error = {}\n",
                    2 * y,
                    fmt_f64(r.sum),
                    fmt_f64(r.main),
                    fmt_f64(r.error)
                ),
            })
        }

        Cmd::WellDist {
            set,
            rlist,
            tlist,
            kmax,
            eps,
        } => {
            let set = parse_set(&set)?;
            let (reports, global_max) =
                sparse::well_distribution_scan(&set, &rlist, &tlist, kmax, eps)?;
            Ok(Report {
                anchor: "well-distribution of a moduli set in short windows of progressions",
                params: json!({ "set": set.id(), "rlist": rlist, "tlist": tlist, "kmax": kmax, "eps": eps }),
                seed: None,
                data: json!({
                    "max_ratio": global_max,
                    "observations": serde_json::to_value(&reports).expect("serializable"),
                }),
                csv: output::well_dist_csv(&reports),
                pretty: format!(
                    "well-distribution scan: set = {}, {} observations\n  max observed/majorant ratio = {}\n",
                    set.id(),
                    reports.len(),
                    fmt_f64(global_max)
                ),
            })
        }

        Cmd::CensusAm2 {
            x,
            theta,
            xmax,
            witnesses,
        } => {
            let tables = get_tables(xmax.unwrap_or(x).max(x))?;
            let c = am2::census(&tables, x, theta, witnesses)?;
            let mut csv = String::from("p,a,m\n");
            for &(p, a, m) in &c.witnesses {
                csv.push_str(&csv_row(&[p.to_string(), a.to_string(), m.to_string()]));
                csv.push('\n');
            }
            Ok(Report {
                anchor: "primes p = a m^2 + 1 with small squarefree kernel of p - 1",
                params: json!({ "x": x, "theta": theta, "witnesses": witnesses }),
                seed: None,
                data: serde_json::to_value(&c).expect("serializable"),
                csv,
                pretty: format!(
                    "census: primes p <= {x} with s(p-1) <= p^{theta}\n  qualifying = {} of {} primes (ratio {:.6})\n",
                    c.qualifying, c.total_primes, c.ratio
                ),
            })
        }

        Cmd::WeightedSum { x, y, xmax } => {
            let tables = get_tables(xmax.unwrap_or(2 * x + 1).max(2 * x + 1))?;
            let r = am2::weighted_sum(&tables, x, y)?;
            Ok(Report {
                anchor: "square-divisor-weighted von Mangoldt sum over a dyadic range",
                params: json!({ "x": x, "y": y }),
                seed: None,
                data: serde_json::to_value(&r).expect("serializable"),
                csv: format!(
                    "x,y,sum,main,relative_error\n{}\n",
                    csv_row(&[
                        x.to_string(),
                        y.to_string(),
                        fmt_f64(r.sum),
                        fmt_f64(r.main),
                        fmt_f64(r.relative_error)
                    ])
                ),
                pretty: format!(
                    "weighted sum: x = {x}, y = {y}\n  sum  = {}\n  main = {}\n  relative error = {:.6}\n",
                    fmt_f64(r.sum),
                    fmt_f64(r.main),
                    r.relative_error
                ),
            })
        }

        Cmd::Sparsity { x, theta } => {
            let count = am2::sparsity_count(x, theta)?;
            Ok(Report {
                anchor: "count of integers with small squarefree kernel",
                params: json!({ "x": x, "theta": theta }),
                seed: None,
                data: json!({ "x": x, "theta": theta, "count": count }),
                csv: format!("x,theta,count\n{x},{theta},{count}\n"),
                pretty: format!("#{{n <= {x} : s(n) <= n^{theta}}} = {count}\n"),
            })
        }
    }
}

fn char_order(chi: &sievelab::Character, q: u64) -> u64 {
    let mut acc = chi.clone();
    let mut order = 1u64;
    while !acc.is_principal() && order <= 2 * q {
        acc = acc.multiply(chi);
        order += 1;
    }
    order
}

fn theorem_report(args: TheoremArgs, square: bool, max_mode: bool) -> Result<Report, Error> {
    let top_modulus = if square {
        args.qmax * args.qmax
    } else if args.set.is_some() {
        2 * args.qmax
    } else {
        args.qmax
    };
    let xmax = args
        .xmax
        .unwrap_or(args.x as u64)
        .max(args.x as u64)
        .max(top_modulus)
        .max(2);
    let tables = get_tables(xmax)?;
    let selector = match &args.set {
        Some(spec) => ModuliSelector::Set(parse_set(spec)?),
        None => ModuliSelector::Classical,
    };
    let rep = if max_mode {
        progressions::bv_sum(&tables, args.x, &selector, args.qmax, square, args.a_norm)?
    } else {
        progressions::bdh_sum(&tables, args.x, &selector, args.qmax, square, args.a_norm)?
    };
    let mut csv = output::error_sum_csv(&rep);
    csv.push_str(&format!(
        "total,,{},\nnormalizer,,{},\n",
        fmt_f64(rep.lhs),
        fmt_f64(rep.normalizer)
    ));
    let pretty = format!(
        "{:?}: x = {}, Q = {}, set = {}\n  moduli evaluated: {}\n  lhs = {}\n  lhs / normalizer (A = {}) = {}\n",
        rep.tag,
        rep.x,
        rep.q_cap,
        rep.set_id,
        rep.rows.len(),
        fmt_f64(rep.lhs),
        rep.a_norm,
        fmt_f64(rep.lhs / rep.normalizer)
    );
    let anchor = match (square, max_mode) {
        (true, true) => "worst-residue progression errors over square moduli",
        (true, false) => "mean-square progression errors over square moduli",
        (false, true) => "worst-residue progression errors over a sparse moduli set",
        (false, false) => "mean-square progression errors over a sparse moduli set",
    };
    Ok(Report {
        anchor,
        params: json!({
            "x": args.x,
            "qmax": args.qmax,
            "set": args.set,
            "A": args.a_norm,
            "square_weight": square,
            "max_mode": max_mode,
        }),
        seed: None,
        data: serde_json::to_value(&rep).expect("serializable"),
        csv,
        pretty,
    })
}

fn emit(common: &Common, report: &Report) -> std::io::Result<()> {
    let body = match common.format {
        Format::Csv => report.csv.clone(),
        Format::Pretty => report.pretty.clone(),
        Format::Json => {
            let doc = json!({
                "paper_anchor": report.anchor,
                "params": report.params,
                "seed": report.seed,
                "data": report.data,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
    };
    match &common.out {
        Some(path) => std::fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("sievelab: could not size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let common = Common {
        format: cli.common.format,
        out: cli.common.out.clone(),
        threads: cli.common.threads,
    };
    match run(cli) {
        Ok(report) => {
            if let Err(e) = emit(&common, &report) {
                eprintln!("sievelab: write failed: {e}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sievelab: {e}");
            match e {
                Error::ResourceLimit(_) | Error::Io(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
