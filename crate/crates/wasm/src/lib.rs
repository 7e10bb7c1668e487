//! Browser bindings: each export takes plain numbers and returns a JSON string.

use knot_atap::report::{self, Meridian};
use knot_atap::sl2::riley_roots_dd;
use knot_atap::{Complex, KnotParams, Tolerances};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest `|m|`, `|n|` the scan accepts; keeps the page responsive.
const MAX_SCAN: i64 = 4;

fn meridian(x_re: f64, x_im: f64) -> Result<Meridian, String> {
    if !(x_re.is_finite() && x_im.is_finite()) {
        return Err("the meridian trace must be finite".into());
    }
    Ok(Meridian::Trace(Complex::new(x_re, x_im)))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn riley_json(m: i64, n: i64, x_re: f64, x_im: f64) -> Result<String, String> {
    let tol = Tolerances::default();
    let params = KnotParams::new(m, n).map_err(|e| e.to_string())?;
    let s = meridian(x_re, x_im)?.eigenvalue_dd().map_err(|e| e.to_string())?;
    let roots = riley_roots_dd(params, s, &tol).map_err(|e| e.to_string())?;
    let list: Vec<_> = roots
        .reps
        .iter()
        .map(|r| {
            json!({
                "y": report::JsonComplex::from(r.y),
                "riley_residual": r.riley_residual,
                "relator_residual": r.relator_residual,
                "multiplicity": r.multiplicity,
            })
        })
        .collect();
    to_json(&json!({ "knot": params.to_string(), "roots": list }))
}

pub fn compute_json(m: i64, n: i64, x_re: f64, x_im: f64) -> Result<String, String> {
    let tol = Tolerances::default();
    let params = KnotParams::new(m, n).map_err(|e| e.to_string())?;
    let records = report::compute(params, meridian(x_re, x_im)?, &tol).map_err(|e| e.to_string())?;
    let factored: Vec<Option<String>> = records.iter().map(|r| r.factored_form()).collect();
    to_json(&json!({ "knot": params.to_string(), "records": records, "factored": factored }))
}

/// Cross-check both pipelines for every `1 <= |m|, |n| <= bound` at one trace.
pub fn scan_json(bound: i64, x_re: f64, x_im: f64) -> Result<String, String> {
    if !(1..=MAX_SCAN).contains(&bound) {
        return Err(format!("the bound must lie in 1..={MAX_SCAN}"));
    }
    let tol = Tolerances::default();
    let x = match meridian(x_re, x_im)? {
        Meridian::Trace(x) => x,
        Meridian::Eigenvalue(_) => unreachable!("meridian() builds traces"),
    };
    let range: Vec<i64> = (-bound..=bound).filter(|&k| k != 0).collect();
    let cells = report::run_grid(&range, &range, &[x], None, &tol);
    let summary = report::summarize(&cells, &tol);
    let per_cell: Vec<_> = cells
        .iter()
        .map(|c| {
            let worst = c.records.iter().filter_map(|r| r.crosscheck.map(|cc| cc.discrepancy)).fold(0.0, f64::max);
            json!({
                "m": c.params.m,
                "n": c.params.n,
                "roots": c.records.len(),
                "verified": c.records.iter().filter(|r| r.verified()).count(),
                "worst": worst,
                "error": c.error,
            })
        })
        .collect();
    to_json(&json!({ "summary": summary, "cells": per_cell }))
}

#[wasm_bindgen]
pub fn riley(m: i32, n: i32, x_re: f64, x_im: f64) -> Result<String, JsError> {
    riley_json(m.into(), n.into(), x_re, x_im).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compute(m: i32, n: i32, x_re: f64, x_im: f64) -> Result<String, JsError> {
    compute_json(m.into(), n.into(), x_re, x_im).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn scan(bound: i32, x_re: f64, x_im: f64) -> Result<String, JsError> {
    scan_json(bound.into(), x_re, x_im).map_err(|e| JsError::new(&e))
}
