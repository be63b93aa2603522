//! Line-oriented text format for surfaces.
//!
//! ```text
//! surface square
//! triangle 0 0 0 1 0 1 1
//! triangle 1 0 0 1 1 0 1
//! glue 0:0 1:1
//! glue 0:1 1:2
//! glue 0:2 1:0
//! ```

use crate::surface::{Corner, HalfEdge, Surface, SurfaceError, Triangle};
use num_complex::Complex64;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Surface {
        line: usize,
        #[source]
        source: SurfaceError,
    },
}

impl FormatError {
    pub fn line(&self) -> usize {
        match self {
            FormatError::Syntax { line, .. } | FormatError::Surface { line, .. } => *line,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SurfaceFile {
    pub name: String,
    pub surface: Surface,
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn pair(line: usize, tok: &str) -> Result<(usize, usize), FormatError> {
    let (a, b) = tok
        .split_once(':')
        .ok_or_else(|| syntax(line, format!("expected <triangle>:<index>, got `{tok}`")))?;
    let a = a.parse().map_err(|_| syntax(line, format!("bad triangle id `{a}`")))?;
    let b: usize = b.parse().map_err(|_| syntax(line, format!("bad index `{b}`")))?;
    if b > 2 {
        return Err(syntax(line, format!("index {b} not in 0..3")));
    }
    Ok((a, b))
}

fn number(line: usize, tok: &str) -> Result<f64, FormatError> {
    let x: f64 = tok.parse().map_err(|_| syntax(line, format!("bad number `{tok}`")))?;
    if !x.is_finite() {
        return Err(syntax(line, format!("non-finite number `{tok}`")));
    }
    Ok(x)
}

pub fn parse_surface_file(text: &str) -> Result<SurfaceFile, FormatError> {
    let mut name = None;
    let mut triangles: Vec<(usize, Triangle)> = Vec::new();
    let mut glue: Vec<(usize, HalfEdge, HalfEdge)> = Vec::new();
    let mut aux: Vec<(usize, Corner)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks[0] {
            "surface" => {
                if toks.len() != 2 {
                    return Err(syntax(line, "expected `surface <name>`"));
                }
                if name.is_some() {
                    return Err(syntax(line, "duplicate `surface` line"));
                }
                name = Some(toks[1].to_string());
            }
            "triangle" => {
                if toks.len() != 8 {
                    return Err(syntax(line, "expected `triangle <id> <x0> <y0> <x1> <y1> <x2> <y2>`"));
                }
                let id: usize = toks[1].parse().map_err(|_| syntax(line, format!("bad triangle id `{}`", toks[1])))?;
                if id != triangles.len() {
                    return Err(syntax(line, format!("triangle ids must be consecutive from 0, got {id}")));
                }
                let v: Vec<f64> = toks[2..].iter().map(|t| number(line, t)).collect::<Result<_, _>>()?;
                let p = |k: usize| Complex64::new(v[2 * k], v[2 * k + 1]);
                triangles.push((line, Triangle::new(p(0), p(1), p(2))));
            }
            "glue" => {
                if toks.len() != 3 {
                    return Err(syntax(line, "expected `glue <t>:<e> <t>:<e>`"));
                }
                let (a, e) = pair(line, toks[1])?;
                let (b, f) = pair(line, toks[2])?;
                glue.push((line, HalfEdge::new(a, e), HalfEdge::new(b, f)));
            }
            "aux" => {
                if toks.len() != 2 {
                    return Err(syntax(line, "expected `aux <t>:<corner>`"));
                }
                let (t, k) = pair(line, toks[1])?;
                aux.push((line, Corner::new(t, k)));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| syntax(1, "missing `surface <name>` line"))?;
    let nt = triangles.len();
    let end = text.lines().count().max(1);
    // attribute errors to the line that introduced the offending item
    for &(line, h, k) in &glue {
        for x in [h, k] {
            if x.tri >= nt {
                return Err(FormatError::Surface {
                    line,
                    source: SurfaceError::UnknownTriangle(x.tri),
                });
            }
        }
        if h == k {
            return Err(FormatError::Surface {
                line,
                source: SurfaceError::DoubleGluing(h),
            });
        }
    }
    let mut used = vec![false; 3 * nt];
    for &(line, h, k) in &glue {
        for x in [h, k] {
            if std::mem::replace(&mut used[x.index()], true) {
                return Err(FormatError::Surface {
                    line,
                    source: SurfaceError::DoubleGluing(x),
                });
            }
        }
    }
    for &(line, c) in &aux {
        if c.tri >= nt {
            return Err(FormatError::Surface {
                line,
                source: SurfaceError::UnknownTriangle(c.tri),
            });
        }
    }
    let tris: Vec<Triangle> = triangles.iter().map(|(_, t)| t.clone()).collect();
    let pairs: Vec<(HalfEdge, HalfEdge)> = glue.iter().map(|&(_, h, k)| (h, k)).collect();
    let corners: Vec<Corner> = aux.iter().map(|&(_, c)| c).collect();
    let surface = Surface::build(tris, &pairs, &corners).map_err(|e| {
        let line = match &e {
            SurfaceError::DegenerateTriangle(t) => triangles.get(*t).map(|x| x.0),
            SurfaceError::BadAuxiliary { vertex, .. } => Surface::build(triangles.iter().map(|x| x.1.clone()).collect(), &pairs, &[])
                .ok()
                .and_then(|bare| aux.iter().find(|&&(_, c)| bare.vertex_of(c) == *vertex).map(|x| x.0)),
            _ => None,
        };
        FormatError::Surface {
            line: line.unwrap_or(end),
            source: e,
        }
    })?;
    Ok(SurfaceFile { name, surface })
}

pub fn parse_surface(text: &str) -> Result<Surface, FormatError> {
    parse_surface_file(text).map(|f| f.surface)
}

/// Canonical text of a surface. Numbers use the shortest decimal that parses back to the same
/// double, so `parse_surface(serialize_surface(..))` reproduces every coordinate exactly.
pub fn serialize_surface(name: &str, s: &Surface) -> String {
    let mut out = String::new();
    writeln!(out, "surface {name}").unwrap();
    for (i, t) in s.triangles().iter().enumerate() {
        write!(out, "triangle {i}").unwrap();
        for p in t.points {
            write!(out, " {} {}", fmt_num(p.re), fmt_num(p.im)).unwrap();
        }
        out.push('\n');
    }
    for (h, k) in s.gluings() {
        writeln!(out, "glue {h} {k}").unwrap();
    }
    for c in s.auxiliary_corners() {
        writeln!(out, "aux {c}").unwrap();
    }
    out
}

fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let t = format!("{x:?}");
    t.strip_suffix(".0").map(str::to_string).unwrap_or(t)
}
