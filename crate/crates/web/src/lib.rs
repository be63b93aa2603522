//! Browser bindings. Every export takes and returns plain strings so the page stays a thin
//! wrapper and the same functions run in native tests. Failures come back as text starting
//! with `error:`.

use affine_surface::flip_graph::alpha_lower_bound;
use affine_surface::geodesics::{detect_cylinders, trace, triangulability_verdict, CylinderKind, TrajectoryEvent};
use affine_surface::shell::{family_from_params, parse_angle, render_development_svg, serialize_surface, Layout};
use affine_surface::{Complex64, Surface};
use serde_json::json;
use std::collections::BTreeMap;
use wasm_bindgen::prelude::*;

fn build(family: &str, params: &str) -> Result<Surface, String> {
    let mut map = BTreeMap::new();
    for p in params.split_whitespace() {
        let (k, v) = p.split_once('=').ok_or_else(|| format!("expected key=value, got `{p}`"))?;
        map.insert(k.to_string(), parse_angle(v)?);
    }
    let fam = family_from_params(family, &map).map_err(|e| e.to_string())?;
    fam.build().map_err(|e| e.to_string())
}

fn or_error(r: Result<String, String>) -> String {
    r.unwrap_or_else(|e| format!("error: {e}"))
}

/// SVG of the development of a family member, with cylinders up to `period` shaded
/// (`period = 0` draws none). `params` is whitespace separated `key=value`.
#[wasm_bindgen]
pub fn render_family(family: &str, params: &str, period: usize) -> String {
    or_error(build(family, params).and_then(|s| {
        let cyl = if period == 0 { Vec::new() } else { detect_cylinders(&s, period) };
        render_development_svg(&s, Layout::Whole, &cyl).map_err(|e| e.to_string())
    }))
}

/// The surface in the text file format.
#[wasm_bindgen]
pub fn surface_text(family: &str, params: &str) -> String {
    or_error(build(family, params).map(|s| serialize_surface(family, &s)))
}

/// JSON summary: cone data, flip-graph angle bound, cylinders and the triangulability verdict.
#[wasm_bindgen]
pub fn analyze_family(family: &str, params: &str, budget: usize, period: usize) -> String {
    or_error(build(family, params).and_then(|s| {
        let alpha = alpha_lower_bound(&s, budget).map_err(|e| e.to_string())?;
        let cones: Vec<_> = s
            .cones()
            .iter()
            .map(|c| json!({"vertex": c.vertex, "angle": c.angle, "dilation": c.dilation, "auxiliary": c.is_auxiliary}))
            .collect();
        let cylinders: Vec<_> = detect_cylinders(&s, period)
            .iter()
            .map(|c| {
                json!({
                    "kind": c.kind.to_string(),
                    "period": c.word.len(),
                    "derivative": c.derivative,
                    "modulus": c.modulus,
                    "angle": (c.kind == CylinderKind::Hyperbolic).then_some(c.angle),
                    "width": (c.kind == CylinderKind::Flat).then_some(c.width),
                })
            })
            .collect();
        let out = json!({
            "triangles": s.triangles().len(),
            "min_angle": s.min_angle(),
            "alpha_hat": alpha.alpha_hat,
            "alpha_exact": alpha.alpha_exact,
            "cones": cones,
            "cylinders": cylinders,
            "verdict": triangulability_verdict(&s, period).to_string(),
        });
        Ok(out.to_string())
    }))
}

/// One line per trajectory event of the ray from `(x, y)` in triangle `tri` with direction angle `dir`.
#[wasm_bindgen]
pub fn trace_family(family: &str, params: &str, tri: usize, x: f64, y: f64, dir: f64, max: usize) -> String {
    or_error(build(family, params).and_then(|s| {
        let events = trace(&s, tri, Complex64::new(x, y), Complex64::from_polar(1.0, dir), max).map_err(|e| e.to_string())?;
        let lines: Vec<String> = events
            .iter()
            .map(|e| match e {
                TrajectoryEvent::CrossEdge { half_edge, t } => format!("cross {half_edge} t={t:.6}"),
                TrajectoryEvent::HitVertex { vertex, .. } => format!("vertex {vertex}"),
                TrajectoryEvent::ExitBoundary { half_edge, .. } => format!("boundary {half_edge}"),
                TrajectoryEvent::LimitCycle { word, contraction, .. } => {
                    format!("limit cycle of period {} contraction={contraction:.6}", word.len())
                }
                TrajectoryEvent::BudgetExhausted => "budget exhausted".to_string(),
            })
            .collect();
        Ok(lines.join("\n"))
    }))
}
