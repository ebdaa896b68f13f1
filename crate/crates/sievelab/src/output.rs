//! CSV rendering for report types. RFC 4180: CRLF-free lines are fine for our
//! numeric tables, but fields containing commas, quotes, or newlines get
//! quoted with internal quotes doubled. Floats print with 17 significant
//! digits so a round trip through text is lossless.

use crate::large_sieve::SieveRatioExperiment;
use crate::progressions::ErrorSumReport;
use crate::sparse::{Condition24Row, WellDistReport};

/// Lossless decimal rendering of an f64 (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Quote a CSV field if it needs it.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn error_sum_csv(report: &ErrorSumReport) -> String {
    let mut out = String::from("q,modulus,contribution,argmax_a\n");
    for row in &report.rows {
        out.push_str(&csv_row(&[
            row.q.to_string(),
            row.modulus.to_string(),
            fmt_f64(row.contribution),
            row.argmax_a.map(|a| a.to_string()).unwrap_or_default(),
        ]));
        out.push('\n');
    }
    out
}

pub fn well_dist_csv(reports: &[WellDistReport]) -> String {
    let mut out = String::from("t,r,k,l,x,y,observed,majorant,ratio\n");
    for rep in reports {
        out.push_str(&csv_row(&[
            rep.t.to_string(),
            rep.r.to_string(),
            rep.k.to_string(),
            rep.l.to_string(),
            fmt_f64(rep.x),
            fmt_f64(rep.y),
            rep.observed.to_string(),
            fmt_f64(rep.majorant),
            fmt_f64(rep.ratio),
        ]));
        out.push('\n');
    }
    out
}

pub fn condition24_csv(rows: &[Condition24Row]) -> String {
    let mut out = String::from("q_cap,count,per_sqrt,per_three_quarters\n");
    for row in rows {
        out.push_str(&csv_row(&[
            row.q_cap.to_string(),
            row.count.to_string(),
            fmt_f64(row.per_sqrt),
            fmt_f64(row.per_three_quarters),
        ]));
        out.push('\n');
    }
    out
}

pub fn experiment_csv(exp: &SieveRatioExperiment) -> String {
    let mut out = String::from("quantity,value\n");
    let pairs: Vec<(&str, f64)> = vec![
        ("lhs", exp.lhs),
        ("classical_rhs", exp.bounds.classical),
        ("sparse_rhs", exp.bounds.sparse),
        ("conjecture_rhs", exp.bounds.conjecture),
        ("ratio_classical", exp.ratios.classical),
        ("ratio_sparse", exp.ratios.sparse),
        ("ratio_conjecture", exp.ratios.conjecture),
    ];
    for (name, v) in pairs {
        out.push_str(&csv_row(&[name.to_string(), fmt_f64(v)]));
        out.push('\n');
    }
    out
}
