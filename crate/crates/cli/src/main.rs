use affine_surface::flip_graph::{alpha_lower_bound, explore_flip_graph, ExploreOptions};
use affine_surface::flips::{flip, FlipError};
use affine_surface::geodesics::{
    detect_cylinders, enumerate_saddle_connections, straighten, trace, triangulability_verdict, CylinderKind,
    TrajectoryEvent,
};
use affine_surface::shell::{
    family_from_params, flip_graph_dot, parse_angle, parse_grid, parse_surface_file, render_development_svg,
    serialize_surface, sweep_family, Layout, SweepOptions,
};
use affine_surface::{Complex64, Corner, HalfEdge, Surface};
use clap::{Parser, Subcommand};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "affsurf", version, about = "Branched affine surfaces from the command line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a surface file and its Gauss–Bonnet identities.
    Validate { file: PathBuf },
    /// Counts, genus and cone data.
    Info { file: PathBuf },
    /// Flip one edge and print the new surface.
    Flip {
        file: PathBuf,
        #[arg(long)]
        edge: usize,
    },
    /// Lower bound for the best minimum angle over flip-reachable triangulations.
    Alpha {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
    /// Breadth-first flip-graph exploration.
    Explore {
        file: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long)]
        parallel: bool,
        /// Drop states whose minimum angle is below this floor (heuristic).
        #[arg(long)]
        floor: Option<String>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Follow a straight trajectory.
    Trace {
        file: PathBuf,
        #[arg(long)]
        tri: usize,
        /// Start point `X,Y` in the chart of the triangle.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Direction angle.
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        #[arg(long, default_value_t = 1000)]
        max: usize,
    },
    /// Saddle connections crossing at most `depth` edges.
    Saddles {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Cylinders whose core crosses at most `period` edges.
    Cylinders {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        period: usize,
    },
    /// Triangulability at the true singularities.
    Verdict {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        period: usize,
    },
    /// Geodesic representative of an arc given by its crossing word.
    Straighten {
        file: PathBuf,
        /// Comma-separated half-edges `t:e`.
        #[arg(long, default_value = "")]
        word: String,
        /// Start corner `t:k`.
        #[arg(long)]
        from: String,
        /// End corner `t:k` in the last triangle of the strip.
        #[arg(long)]
        to: String,
    },
    /// Build a family member, e.g. `build dilation_torus theta=deg:60 lambda=2`.
    Build {
        family: String,
        params: Vec<String>,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG picture of the development.
    Render {
        file: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        /// Shade cylinders of at most this period.
        #[arg(long)]
        cylinders: Option<usize>,
        /// Draw the strip of this word (`t:e,...`) instead of the whole complex.
        #[arg(long)]
        strip: Option<String>,
        /// First triangle of the strip.
        #[arg(long, default_value_t = 0)]
        start: usize,
    },
    /// Parameter sweep of a family as CSV.
    Sweep {
        #[arg(long)]
        family: String,
        /// `key=v1,v2;key=v3`.
        #[arg(long, default_value = "")]
        grid: String,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[arg(long, default_value_t = 4)]
        period: usize,
    },
}

enum Failure {
    Usage(String),
    Invalid(String),
}

type Outcome = Result<String, Failure>;

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(msg.to_string())
}

fn invalid(msg: impl std::fmt::Display) -> Failure {
    Failure::Invalid(msg.to_string())
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(usage)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(String, Surface), Failure> {
    let text = read_input(path)?;
    let f = parse_surface_file(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok((f.name, f.surface))
}

fn write_output(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_pair(text: &str) -> Result<(usize, usize), Failure> {
    let (a, b) = text
        .trim()
        .split_once(':')
        .ok_or_else(|| usage(format!("expected t:k, got `{text}`")))?;
    let a = a.parse().map_err(|_| usage(format!("bad index in `{text}`")))?;
    let b = b.parse().map_err(|_| usage(format!("bad index in `{text}`")))?;
    Ok((a, b))
}

fn parse_word(text: &str) -> Result<Vec<HalfEdge>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_pair(t).map(|(a, b)| HalfEdge::new(a, b)))
        .collect()
}

fn fmt_word(word: &[HalfEdge]) -> String {
    word.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(",")
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.12},{:.12}", z.re, z.im)
}

fn run(cmd: Command) -> Outcome {
    let mut out = String::new();
    match cmd {
        Command::Validate { file } => {
            let (name, s) = load(&file)?;
            let info = s.euler_info().map_err(invalid)?;
            write!(out, "ok {name}: V={} E={} F={}", info.vertices, info.edges, info.faces).unwrap();
            if s.is_closed() {
                let gb = s.check_gauss_bonnet().map_err(invalid)?;
                writeln!(out, " r_angle={:.3e} r_log={:.3e}", gb.r_angle, gb.r_log).unwrap();
                if !gb.passes(1e-9) {
                    return Err(invalid(format!("{name}: Gauss–Bonnet residuals too large")));
                }
            } else {
                writeln!(out, " boundary_components={}", info.boundary_components).unwrap();
            }
        }
        Command::Info { file } => {
            let (name, s) = load(&file)?;
            let info = s.euler_info().map_err(invalid)?;
            writeln!(out, "surface {name}").unwrap();
            writeln!(out, "V={} E={} F={} chi={}", info.vertices, info.edges, info.faces, info.euler_characteristic).unwrap();
            match info.genus {
                Some(g) => writeln!(out, "genus={g}").unwrap(),
                None => writeln!(out, "genus=undefined boundary_components={}", info.boundary_components).unwrap(),
            }
            writeln!(out, "marked_points={} auxiliary_points={}", info.marked_points, info.auxiliary_points).unwrap();
            writeln!(out, "min_angle={:.12}", s.min_angle()).unwrap();
            for c in s.cones() {
                writeln!(
                    out,
                    "vertex {} angle={:.12} dilation={:.12} holonomy_arg={:.12}{}{}",
                    c.vertex,
                    c.angle,
                    c.dilation,
                    c.holonomy_arg,
                    if c.is_boundary { " boundary" } else { "" },
                    if c.is_auxiliary { " auxiliary" } else { "" }
                )
                .unwrap();
            }
            if s.is_closed() {
                let gb = s.check_gauss_bonnet().map_err(invalid)?;
                writeln!(out, "r_angle={:.3e} r_log={:.3e}", gb.r_angle, gb.r_log).unwrap();
            }
        }
        Command::Flip { file, edge } => {
            let (name, s) = load(&file)?;
            let (f, _) = flip(&s, edge).map_err(|e| match e {
                FlipError::UnknownEdge(_) => usage(e),
                _ => invalid(e),
            })?;
            out = serialize_surface(&name, &f);
        }
        Command::Alpha { file, budget } => {
            let (_, s) = load(&file)?;
            let a = alpha_lower_bound(&s, budget).map_err(usage)?;
            writeln!(out, "alpha_hat={:.12} exact={} witness={}", a.alpha_hat, a.alpha_exact, a.witness.digest()).unwrap();
        }
        Command::Explore {
            file,
            depth,
            budget,
            parallel,
            floor,
            dot,
        } => {
            let (_, s) = load(&file)?;
            let mut opts = ExploreOptions::new(budget).parallel(parallel);
            if let Some(d) = depth {
                opts = opts.depth(d);
            }
            if let Some(f) = floor {
                opts = opts.min_angle_floor(parse_angle(&f).map_err(usage)?);
            }
            let r = explore_flip_graph(&s, &opts).map_err(usage)?;
            writeln!(
                out,
                "nodes={} edges={} exhausted={} alpha_hat={:.12} exact={} heuristic={}",
                r.nodes.len(),
                r.edges.len(),
                r.frontier_exhausted,
                r.alpha_hat,
                r.alpha_exact,
                r.heuristic
            )
            .unwrap();
            for (i, n) in r.nodes.iter().enumerate() {
                writeln!(out, "node {i} depth={} min_angle={:.12} key={}", n.depth, n.min_angle, n.key.digest()).unwrap();
            }
            if let Some(path) = dot {
                write_output(&path, &flip_graph_dot(&r))?;
            }
        }
        Command::Trace { file, tri, at, dir, max } => {
            let (_, s) = load(&file)?;
            let (x, y) = at.split_once(',').ok_or_else(|| usage("--at expects X,Y"))?;
            let x: f64 = x.trim().parse().map_err(|_| usage("bad --at"))?;
            let y: f64 = y.trim().parse().map_err(|_| usage("bad --at"))?;
            let phi = parse_angle(&dir).map_err(usage)?;
            let events = trace(&s, tri, Complex64::new(x, y), Complex64::from_polar(1.0, phi), max).map_err(usage)?;
            for e in events {
                match e {
                    TrajectoryEvent::CrossEdge { half_edge, t } => writeln!(out, "cross {half_edge} t={t:.12}"),
                    TrajectoryEvent::HitVertex { vertex, corner } => writeln!(out, "vertex {vertex} corner={corner}"),
                    TrajectoryEvent::ExitBoundary { half_edge, t } => writeln!(out, "boundary {half_edge} t={t:.12}"),
                    TrajectoryEvent::LimitCycle {
                        word,
                        derivative,
                        contraction,
                        observed_ratio,
                    } => writeln!(
                        out,
                        "limit_cycle word={} derivative={derivative:.12} contraction={contraction:.12} observed_ratio={observed_ratio:.12}",
                        fmt_word(&word)
                    ),
                    TrajectoryEvent::BudgetExhausted => writeln!(out, "budget_exhausted"),
                }
                .unwrap();
            }
        }
        Command::Saddles { file, depth } => {
            let (_, s) = load(&file)?;
            for sc in enumerate_saddle_connections(&s, depth) {
                writeln!(
                    out,
                    "{} -> {} vector={} word={}{}",
                    sc.start_vertex,
                    sc.end_vertex,
                    fmt_c(sc.vector),
                    fmt_word(&sc.word),
                    sc.edge.map(|e| format!(" edge={e}")).unwrap_or_default()
                )
                .unwrap();
            }
        }
        Command::Cylinders { file, period } => {
            let (_, s) = load(&file)?;
            for (i, c) in detect_cylinders(&s, period).iter().enumerate() {
                let size = match c.kind {
                    CylinderKind::Hyperbolic => format!("angle={:.12}", c.angle),
                    CylinderKind::Flat => format!("width={:.12}", c.width),
                };
                writeln!(
                    out,
                    "cylinder {i} kind={} derivative={:.12} modulus={:.12} {size} word={}",
                    c.kind,
                    c.derivative,
                    c.modulus,
                    fmt_word(&c.word)
                )
                .unwrap();
            }
        }
        Command::Verdict { file, period } => {
            let (_, s) = load(&file)?;
            let v = triangulability_verdict(&s, period);
            writeln!(out, "{v}").unwrap();
        }
        Command::Straighten { file, word, from, to } => {
            let (_, s) = load(&file)?;
            let word = parse_word(&word)?;
            let (a, b) = parse_pair(&from)?;
            let (c, d) = parse_pair(&to)?;
            let r = straighten(&s, Corner::new(a, b), &word, Corner::new(c, d)).map_err(usage)?;
            for (i, seg) in r.segments.iter().enumerate() {
                writeln!(
                    out,
                    "segment {i} {} -> {} vector={} word={}{}",
                    seg.start_vertex,
                    seg.end_vertex,
                    fmt_c(seg.vector),
                    fmt_word(&seg.word),
                    seg.edge.map(|e| format!(" edge={e}")).unwrap_or_default()
                )
                .unwrap();
            }
            writeln!(out, "turning={:.12}", r.total_turning() + 0.0).unwrap();
        }
        Command::Build {
            family,
            params,
            name,
            out: path,
        } => {
            let mut map = BTreeMap::new();
            for p in &params {
                let (k, v) = p.split_once('=').ok_or_else(|| usage(format!("expected key=value, got `{p}`")))?;
                map.insert(k.to_string(), parse_angle(v).map_err(usage)?);
            }
            let fam = family_from_params(&family, &map).map_err(usage)?;
            let s = fam.build().map_err(invalid)?;
            let text = serialize_surface(name.as_deref().unwrap_or(fam.tag()), &s);
            match path {
                Some(p) => write_output(&p, &text)?,
                None => out = text,
            }
        }
        Command::Render {
            file,
            svg,
            cylinders,
            strip,
            start,
        } => {
            let (_, s) = load(&file)?;
            let cyl = cylinders.map(|p| detect_cylinders(&s, p)).unwrap_or_default();
            let word = strip.as_deref().map(parse_word).transpose()?;
            let layout = match &word {
                Some(w) => Layout::Strip { start, word: w },
                None => Layout::Whole,
            };
            let text = render_development_svg(&s, layout, &cyl).map_err(usage)?;
            write_output(&svg, &text)?;
        }
        Command::Sweep {
            family,
            grid,
            csv,
            budget,
            period,
        } => {
            let g = parse_grid(&grid).map_err(usage)?;
            let text = sweep_family(&family, &g, SweepOptions { budget, max_period: period }).map_err(usage)?;
            match csv {
                Some(p) => write_output(&p, &text)?,
                None => out = text,
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(m)) => {
            eprintln!("invalid: {m}");
            ExitCode::from(2)
        }
    }
}
