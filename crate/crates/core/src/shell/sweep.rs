//! Family construction from named parameters, and parameter sweeps as CSV.

use crate::builders::Family;
use crate::flip_graph::alpha_lower_bound;
use crate::geodesics::{detect_cylinders, CylinderKind};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("family {family} has no parameter `{key}`")]
    UnknownParameter { family: String, key: String },
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("csv: {0}")]
    Csv(String),
}

pub const FAMILIES: [&str; 7] = [
    "square_torus",
    "hex_torus",
    "dilation_torus",
    "star_sphere",
    "big_cylinder",
    "sectored_torus",
    "two_cylinder",
];

/// Parameter names of a family with their defaults.
pub fn family_parameters(family: &str) -> Result<Vec<(&'static str, f64)>, SweepError> {
    Ok(match family {
        "square_torus" | "hex_torus" => vec![],
        "dilation_torus" => vec![("theta", PI / 3.0), ("lambda", 2.0)],
        "star_sphere" => vec![
            ("theta1", PI / 2.0),
            ("theta2", PI / 2.0),
            ("theta3", PI / 2.0),
            ("lambda1", 1.0),
            ("lambda2", 1.0),
            ("lambda3", 1.0),
            ("re", 0.5),
            ("im", 0.75f64.sqrt()),
        ],
        "big_cylinder" => vec![("theta", 1.2 * PI), ("lambda", 2.0), ("sectors", 3.0)],
        "sectored_torus" => vec![("theta", 0.9 * PI), ("lambda", 2.0), ("sectors", 2.0)],
        "two_cylinder" => vec![("theta", 0.6 * PI), ("lambda1", 2.0), ("lambda2", 3.0)],
        other => return Err(SweepError::UnknownFamily(other.to_string())),
    })
}

/// Radians, or degrees with a `deg:` prefix.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (body, factor) = match t.strip_prefix("deg:") {
        Some(d) => (d, PI / 180.0),
        None => (t, 1.0),
    };
    body.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .map(|x| x * factor)
        .ok_or_else(|| format!("bad number `{text}`"))
}

/// Builds a family member; parameters not given take their defaults.
pub fn family_from_params(family: &str, params: &BTreeMap<String, f64>) -> Result<Family, SweepError> {
    let names = family_parameters(family)?;
    for key in params.keys() {
        if !names.iter().any(|(n, _)| n == key) {
            return Err(SweepError::UnknownParameter {
                family: family.to_string(),
                key: key.clone(),
            });
        }
    }
    let get = |name: &str| {
        params
            .get(name)
            .copied()
            .unwrap_or_else(|| names.iter().find(|(n, _)| *n == name).expect("known").1)
    };
    Ok(match family {
        "square_torus" => Family::SquareTorus,
        "hex_torus" => Family::HexTorus,
        "dilation_torus" => Family::DilationTorus {
            theta: get("theta"),
            lambda: get("lambda"),
        },
        "star_sphere" => Family::StarSphere {
            angles: [get("theta1"), get("theta2"), get("theta3")],
            dilations: [get("lambda1"), get("lambda2"), get("lambda3")],
            center: Complex64::new(get("re"), get("im")),
        },
        "big_cylinder" | "sectored_torus" => {
            let k = get("sectors");
            // non-integers become 0 and are rejected by the builder
            let sectors = if k.fract() == 0.0 && k > 0.0 { k as usize } else { 0 };
            let (theta, lambda) = (get("theta"), get("lambda"));
            if family == "big_cylinder" {
                Family::BigCylinder { theta, lambda, sectors }
            } else {
                Family::SectoredTorus { theta, lambda, sectors }
            }
        }
        "two_cylinder" => Family::TwoCylinder {
            theta: get("theta"),
            lambdas: [get("lambda1"), get("lambda2")],
        },
        _ => unreachable!("checked by family_parameters"),
    })
}

/// Parses `key=v1,v2;key=v3`; values accept the `deg:` prefix.
pub fn parse_grid(text: &str) -> Result<Vec<(String, Vec<f64>)>, SweepError> {
    let mut out: Vec<(String, Vec<f64>)> = Vec::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, values) = part
            .split_once('=')
            .ok_or_else(|| SweepError::BadGrid(format!("expected key=values in `{part}`")))?;
        let key = key.trim().to_string();
        if out.iter().any(|(k, _)| *k == key) {
            return Err(SweepError::BadGrid(format!("key `{key}` repeated")));
        }
        let values: Vec<f64> = values
            .split(',')
            .map(parse_angle)
            .collect::<Result<_, _>>()
            .map_err(SweepError::BadGrid)?;
        out.push((key, values));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub budget: usize,
    pub max_period: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            budget: 200,
            max_period: 4,
        }
    }
}

/// One CSV row per grid point, the first grid key varying slowest. Invalid parameter points
/// produce a row with the error in the `status` column.
pub fn sweep_family(family: &str, grid: &[(String, Vec<f64>)], opts: SweepOptions) -> Result<String, SweepError> {
    let names = family_parameters(family)?;
    for (key, _) in grid {
        if !names.iter().any(|(n, _)| n == key) {
            return Err(SweepError::UnknownParameter {
                family: family.to_string(),
                key: key.clone(),
            });
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["family".to_string()];
    header.extend(grid.iter().map(|(k, _)| k.clone()));
    header.extend(
        ["min_angle", "alpha_hat", "alpha_exact", "max_beta", "r_angle", "r_log", "beta_bound", "status"].map(String::from),
    );
    w.write_record(&header).map_err(|e| SweepError::Csv(e.to_string()))?;

    let total: usize = grid.iter().map(|(_, v)| v.len()).product();
    for idx in 0..total {
        let mut rem = idx;
        let mut point = vec![0.0; grid.len()];
        for (j, (_, values)) in grid.iter().enumerate().rev() {
            point[j] = values[rem % values.len()];
            rem /= values.len();
        }
        let params: BTreeMap<String, f64> = grid.iter().map(|(k, _)| k.clone()).zip(point.iter().copied()).collect();
        let mut row = vec![family.to_string()];
        row.extend(point.iter().map(|x| x.to_string()));
        row.extend(evaluate(family, &params, opts));
        w.write_record(&row).map_err(|e| SweepError::Csv(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| SweepError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

fn evaluate(family: &str, params: &BTreeMap<String, f64>, opts: SweepOptions) -> Vec<String> {
    let fail = |msg: String| {
        let mut v = vec![String::new(); 7];
        v.push(msg);
        v
    };
    let s = match family_from_params(family, params).map(|f| f.build()) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => return fail(e.to_string()),
        Err(e) => return fail(e.to_string()),
    };
    let alpha = match alpha_lower_bound(&s, opts.budget) {
        Ok(a) => a,
        Err(e) => return fail(e.to_string()),
    };
    let gb = match s.check_gauss_bonnet() {
        Ok(g) => g,
        Err(e) => return fail(e.to_string()),
    };
    let beta = detect_cylinders(&s, opts.max_period)
        .iter()
        .filter(|c| c.kind == CylinderKind::Hyperbolic)
        .map(|c| c.angle)
        .fold(None, |m: Option<f64>, b| Some(m.map_or(b, |m| m.max(b))));
    // the π − α bound concerns triangulations with vertices at true singularities only
    let bound = if !s.auxiliary_corners().is_empty() {
        "na".to_string()
    } else {
        (beta.unwrap_or(0.0) <= PI - alpha.alpha_hat + 1e-6).to_string()
    };
    vec![
        s.min_angle().to_string(),
        alpha.alpha_hat.to_string(),
        alpha.alpha_exact.to_string(),
        beta.map(|b| b.to_string()).unwrap_or_default(),
        gb.r_angle.to_string(),
        gb.r_log.to_string(),
        bound,
        "ok".to_string(),
    ]
}
