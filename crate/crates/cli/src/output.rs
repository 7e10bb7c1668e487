use std::fmt::Write as _;

use knot_atap::report::{fmt_complex, record_label, CellOutcome, GridSummary, JsonComplex, OutputRecord};
use knot_atap::selftest::SuiteReport;
use knot_atap::Complex;

fn c(v: JsonComplex) -> String {
    fmt_complex(v.into())
}

fn opt(v: Option<JsonComplex>) -> String {
    v.map(c).unwrap_or_else(|| "-".into())
}

pub fn records_text(records: &[OutputRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}", record_label(r));
        let _ = writeln!(out, "  s = {}  z = {}  riley residual = {:e}", c(r.s), c(r.z), r.riley_residual);
        if let Some(f) = r.factored_form() {
            let _ = writeln!(out, "  Delta = {f}");
        }
        let delta: Vec<String> = r.delta.iter().map(|&v| c(v)).collect();
        let _ = writeln!(out, "  coefficients = [{}]", delta.join(", "));
        let _ = writeln!(out, "  A = {}  B = {}  C = {}", opt(r.a), opt(r.b), opt(r.c));
        let _ = writeln!(out, "  D1 = {}  D2 = {}  quad_mid = {}", opt(r.d1), opt(r.d2), opt(r.quad_mid));
        let _ = writeln!(out, "  torsion closed = {}  limit = {}", opt(r.torsion_closed), opt(r.torsion_limit));
        if let Some(cc) = r.crosscheck {
            let _ = writeln!(
                out,
                "  crosscheck {} (discrepancy {:e}, shift {}, sign {})",
                if cc.pass { "pass" } else { "FAIL" },
                cc.discrepancy,
                cc.unit_shift,
                cc.sign
            );
        }
        if !r.flags.is_empty() {
            let _ = writeln!(out, "  flags: {}", r.flags.join(", "));
        }
    }
    out
}

const CSV_HEADER: [&str; 33] = [
    "m", "n", "s_re", "s_im", "x_re", "x_im", "y_re", "y_im", "z_re", "z_im", "riley_residual", "A_re", "A_im",
    "B_re", "B_im", "C_re", "C_im", "quad_mid_re", "quad_mid_im", "D1_re", "D1_im", "D2_re", "D2_im",
    "torsion_closed_re", "torsion_closed_im", "torsion_limit_re", "torsion_limit_im", "crosscheck_pass",
    "crosscheck_discrepancy", "crosscheck_unit_shift", "crosscheck_sign", "delta", "flags",
];

pub fn records_csv(records: &[OutputRecord]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    let pair = |v: Option<JsonComplex>| match v {
        Some(v) => [format!("{:?}", v.re), format!("{:?}", v.im)],
        None => [String::new(), String::new()],
    };
    for r in records {
        let mut row = vec![r.params.m.to_string(), r.params.n.to_string()];
        for v in [r.s, r.x, r.y, r.z] {
            row.extend(pair(Some(v)));
        }
        row.push(format!("{:?}", r.riley_residual));
        for v in [r.a, r.b, r.c, r.quad_mid, r.d1, r.d2, r.torsion_closed, r.torsion_limit] {
            row.extend(pair(v));
        }
        match r.crosscheck {
            Some(cc) => row.extend([
                cc.pass.to_string(),
                format!("{:?}", cc.discrepancy),
                cc.unit_shift.to_string(),
                cc.sign.to_string(),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
        let delta: Vec<String> = r.delta.iter().map(|v| format!("{} {}", v.re, v.im)).collect();
        row.push(delta.join(";"));
        row.push(r.flags.join(";"));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn riley_text(coeffs: &[Complex], roots: &[(Complex, f64, f64, usize)], excluded: &[Complex]) -> String {
    let mut out = String::new();
    let cs: Vec<String> = coeffs.iter().map(|&v| fmt_complex(v)).collect();
    let _ = writeln!(out, "coefficients (ascending in y): [{}]", cs.join(", "));
    for (y, res, rel, mult) in roots {
        let _ = writeln!(
            out,
            "root y = {}  riley residual = {res:e}  relator residual = {rel:e}{}",
            fmt_complex(*y),
            if *mult > 1 { format!("  multiplicity {mult}") } else { String::new() }
        );
    }
    for y in excluded {
        let _ = writeln!(out, "excluded abelian root y = {}", fmt_complex(*y));
    }
    out
}

pub fn grid_text(summary: &GridSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "cells {}  roots {}  passed {}  failed {}  flagged {}",
        summary.cells, summary.roots, summary.passed, summary.failed, summary.flagged
    );
    let _ = writeln!(out, "worst discrepancy {:e}", summary.worst_discrepancy);
    match summary.torsion_sign {
        Some(s) => {
            let _ = writeln!(out, "torsion sign sigma = {s} (torsion_limit = {}torsion_closed)", if s == 1 { "-" } else { "+" });
        }
        None if summary.roots > 0 => {
            let _ = writeln!(out, "torsion sign: none fits every root");
        }
        None => {}
    }
    for f in &summary.failures {
        let _ = writeln!(out, "FAIL {f}");
    }
    for f in &summary.flagged_cells {
        let _ = writeln!(out, "flagged {f}");
    }
    out
}

pub fn grid_csv(cells: &[CellOutcome]) -> Result<String, csv::Error> {
    let records: Vec<OutputRecord> = cells.iter().flat_map(|c| c.records.iter().cloned()).collect();
    records_csv(&records)
}

pub fn selftest_text(reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(
            out,
            "{:<10} {:>6} checks  {:>5} failures  worst/threshold {:.3e}  {}",
            r.name,
            r.checks,
            r.failures,
            r.worst_ratio,
            if r.passed() { "ok" } else { "FAILED" }
        );
        for m in &r.messages {
            let _ = writeln!(out, "    {m}");
        }
    }
    out
}
