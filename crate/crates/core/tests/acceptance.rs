//! Acceptance suite. Runs every criterion, prints one line each and exits non-zero if any fails.

use affine_surface::builders::*;
use affine_surface::developing::{dual_loop_polyline, loop_index, vertex_link_loop};
use affine_surface::flip_graph::{
    alpha_lower_bound, check_alpha_cylinder_bound, explore_flip_graph, triangulation_key, verify_reachability,
    ExploreOptions, FlipGraphReport, Reachability,
};
use affine_surface::flips::{flip, flippable_edges, self_folded_scan};
use affine_surface::geodesics::{
    cylinder_disjointness_check, detect_cylinders, enumerate_saddle_connections, free_reduce, trace,
    triangulability_verdict, CylinderKind, TrajectoryEvent, Verdict,
};
use affine_surface::geometry::{cross, wrap_pi};
use affine_surface::shell::{flip_graph_dot, parse_grid, parse_surface_file, render_development_svg, sweep_family};
use affine_surface::shell::{Layout, SweepOptions};
use affine_surface::{ConeSummary, Complex64, HalfEdge, Surface};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, u64);

fn fixtures() -> Vec<(String, Surface)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .expect("fixture dir")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "surf"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).unwrap();
            let f = parse_surface_file(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            (f.name, f.surface)
        })
        .collect()
}

fn closed_fixtures() -> Vec<(String, Surface)> {
    fixtures().into_iter().filter(|(_, s)| s.is_closed()).collect()
}

fn builder_outputs() -> Vec<(String, Surface)> {
    let c = Complex64::new;
    vec![
        ("square_torus".into(), build_square_torus()),
        ("hex_torus".into(), build_hex_torus()),
        ("lattice_torus".into(), build_lattice_torus(c(1.3, 0.2), c(0.4, 0.9)).unwrap()),
        ("dilation_torus".into(), build_dilation_torus(PI / 3.0, 2.0).unwrap()),
        ("dilation_torus_wide".into(), build_dilation_torus(0.9 * PI, 3.0).unwrap()),
        ("big_cylinder".into(), build_big_cylinder(1.2 * PI, 2.0, 3).unwrap()),
        ("sectored_torus".into(), build_sectored_cylinder_torus(0.7 * PI, 1.5, 4).unwrap()),
        (
            "star_sphere".into(),
            build_star_sphere([1.2, 0.9, 1.4], [2.0, 3.0, 0.25], c(0.4, 0.9)).unwrap(),
        ),
        ("two_cylinder".into(), build_two_cylinder_surface(0.6 * PI, [2.0, 3.0]).unwrap()),
        (
            "polygon_torus".into(),
            build_from_polygon(&[c(0.0, 0.0), c(2.0, 0.0), c(2.0, 1.0), c(0.0, 1.0)], &[(0, 2), (1, 3)]).unwrap(),
        ),
    ]
}

fn sorted_cones(s: &Surface) -> Vec<ConeSummary> {
    let mut v = s.cones().to_vec();
    // the flag goes first: cone angles equal up to rounding must not reorder auxiliary points
    v.sort_by(|a, b| {
        (a.is_auxiliary, a.angle, a.dilation)
            .partial_cmp(&(b.is_auxiliary, b.angle, b.dilation))
            .unwrap()
    });
    v
}

fn cones_match(a: &Surface, b: &Surface, tol: f64) -> bool {
    let (x, y) = (sorted_cones(a), sorted_cones(b));
    x.len() == y.len()
        && x.iter().zip(&y).all(|(p, q)| {
            (p.angle - q.angle).abs() < tol
                && (p.dilation - q.dilation).abs() < tol
                && wrap_pi(p.holonomy_arg - q.holonomy_arg).abs() < tol
                && p.is_auxiliary == q.is_auxiliary
        })
}

fn triangle_law(s: &Surface) -> Result<(), String> {
    let info = s.euler_info().map_err(|e| e.to_string())?;
    let g = info.genus.ok_or("open surface")?;
    let expected = 4 * g - 4 + 2 * info.vertices as i64;
    if info.faces as i64 == expected {
        Ok(())
    } else {
        Err(format!("F={} but 4g-4+2n={expected}", info.faces))
    }
}

fn c1_gauss_bonnet() -> Check {
    let mut worst = (0.0f64, 0.0f64);
    let mut count = 0;
    for (name, s) in builder_outputs().into_iter().chain(closed_fixtures()) {
        let gb = s.check_gauss_bonnet().map_err(|e| format!("{name}: {e}"))?;
        if !(gb.r_angle < 1e-9 && gb.r_log < 1e-9) {
            return Err(format!("{name}: r_angle={:.3e} r_log={:.3e}", gb.r_angle, gb.r_log));
        }
        worst = (worst.0.max(gb.r_angle), worst.1.max(gb.r_log));
        count += 1;
    }
    Ok(format!("{count} surfaces, max r_angle={:.1e} r_log={:.1e}", worst.0, worst.1))
}

fn c2_triangle_count() -> Check {
    let fx = closed_fixtures();
    for (name, s) in &fx {
        triangle_law(s).map_err(|e| format!("{name}: {e}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut current: Vec<Surface> = fx.iter().map(|(_, s)| s.clone()).collect();
    let mut flips = 0;
    while flips < 1000 {
        let i = rng.gen_range(0..current.len());
        let edges = flippable_edges(&current[i]);
        if edges.is_empty() {
            continue;
        }
        let e = edges[rng.gen_range(0..edges.len())];
        let next = flip(&current[i], e).map_err(|err| format!("{}: {err}", fx[i].0))?.0;
        triangle_law(&next).map_err(|err| format!("{} after {flips} flips: {err}", fx[i].0))?;
        current[i] = next;
        flips += 1;
    }
    Ok(format!("{} closed fixtures, {flips} random flips", fx.len()))
}

fn c3_flip_involution() -> Check {
    let fx = closed_fixtures();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut current: Vec<Surface> = fx.iter().map(|(_, s)| s.clone()).collect();
    let mut done = 0;
    while done < 1000 {
        let i = rng.gen_range(0..current.len());
        let s = &current[i];
        let edges = flippable_edges(s);
        if edges.is_empty() {
            continue;
        }
        let e = edges[rng.gen_range(0..edges.len())];
        let (f, mv) = flip(s, e).map_err(|err| err.to_string())?;
        let (back, _) = flip(&f, mv.inserted).map_err(|err| format!("{}: flip back: {err}", fx[i].0))?;
        if triangulation_key(&back) != triangulation_key(s) {
            return Err(format!("{}: key changed after flip and flip back of edge {e}", fx[i].0));
        }
        if !cones_match(s, &f, 1e-9) || !cones_match(s, &back, 1e-9) {
            return Err(format!("{}: cone data changed by flipping edge {e}", fx[i].0));
        }
        // wander so later checks see other triangulations
        current[i] = f;
        done += 1;
    }
    Ok(format!("{done} flip round trips"))
}

fn c4_alpha() -> Check {
    let hex = alpha_lower_bound(&build_hex_torus(), 1000).map_err(|e| e.to_string())?;
    if !((hex.alpha_hat - PI / 3.0).abs() < 1e-9 && hex.alpha_exact) {
        return Err(format!("hex alpha_hat={} exact={}", hex.alpha_hat, hex.alpha_exact));
    }
    let sq = alpha_lower_bound(&build_square_torus(), 1000).map_err(|e| e.to_string())?;
    if (sq.alpha_hat - PI / 4.0).abs() >= 1e-9 {
        return Err(format!("square alpha_hat={}", sq.alpha_hat));
    }
    Ok(format!("hex {:.12} exact, square {:.12}", hex.alpha_hat, sq.alpha_hat))
}

fn c5_cylinders() -> Check {
    let s = build_dilation_torus(PI / 3.0, 2.0).unwrap();
    let hyper: Vec<_> = detect_cylinders(&s, 4)
        .into_iter()
        .filter(|c| c.kind == CylinderKind::Hyperbolic)
        .collect();
    if hyper.len() != 1 {
        return Err(format!("{} hyperbolic cylinders on the dilation torus", hyper.len()));
    }
    let c = &hyper[0];
    if (c.modulus - 2.0).abs() >= 1e-9 || (c.angle - PI / 3.0).abs() >= 1e-6 {
        return Err(format!("a={} beta={}", c.modulus, c.angle));
    }
    let big = build_big_cylinder(1.2 * PI, 2.0, 3).unwrap();
    let beta = detect_cylinders(&big, 4)
        .iter()
        .filter(|c| c.kind == CylinderKind::Hyperbolic)
        .map(|c| c.angle)
        .fold(0.0, f64::max);
    if (beta - 1.2 * PI).abs() >= 1e-6 {
        return Err(format!("big cylinder beta={beta}"));
    }
    let v = triangulability_verdict(&big, 4);
    if !matches!(v, Verdict::NotTriangulableAtSingularities { .. }) {
        return Err(format!("big cylinder verdict {v}"));
    }
    Ok(format!("a={:.12} beta={:.12}; big beta/pi={:.9} {v}", c.modulus, c.angle, beta / PI))
}

fn c6_cylinder_bound() -> Check {
    let mut checked = 0;
    let mut skipped = Vec::new();
    for (name, s) in closed_fixtures() {
        if !s.auxiliary_corners().is_empty() {
            skipped.push(name);
            continue;
        }
        let alpha = alpha_lower_bound(&s, 1000).map_err(|e| e.to_string())?;
        let r = check_alpha_cylinder_bound(alpha.alpha_hat, &detect_cylinders(&s, 4));
        if !r.passes() {
            return Err(format!("{name}: alpha_hat={} violations {:?}", alpha.alpha_hat, r.violations));
        }
        checked += r.checked;
    }
    Ok(format!(
        "{checked} hyperbolic cylinders within pi - alpha_hat; fixtures with auxiliary points not applicable: {}",
        skipped.join(", ")
    ))
}

fn c7_disjointness() -> Check {
    let s = build_two_cylinder_surface(0.6 * PI, [2.0, 3.0]).unwrap();
    let wide: Vec<_> = detect_cylinders(&s, 4)
        .into_iter()
        .filter(|c| c.kind == CylinderKind::Hyperbolic && c.angle >= PI / 2.0)
        .collect();
    if wide.len() != 2 || wide.iter().any(|c| (c.angle - 0.6 * PI).abs() > 1e-6) {
        return Err(format!("expected two 0.6pi cylinders, got {:?}", wide.iter().map(|c| c.angle).collect::<Vec<_>>()));
    }
    let r = cylinder_disjointness_check(&s, &wide);
    if !r.passes() || r.pairs_checked != 2 {
        return Err(format!("{:?}", r));
    }
    Ok(format!("{} samples, no overlap", r.samples_checked))
}

fn random_point(rng: &mut ChaCha8Rng, p: [Complex64; 3]) -> Complex64 {
    let (mut u, mut v): (f64, f64) = (rng.gen(), rng.gen());
    if u + v > 1.0 {
        (u, v) = (1.0 - u, 1.0 - v);
    }
    let z = p[0] + (p[1] - p[0]) * u + (p[2] - p[0]) * v;
    // stay clear of the sides
    let centroid = (p[0] + p[1] + p[2]) / 3.0;
    centroid + (z - centroid) * 0.9
}

fn c8_limit_cycles() -> Check {
    let s = build_dilation_torus(PI / 3.0, 2.0).unwrap();
    let cyl = detect_cylinders(&s, 4)
        .into_iter()
        .find(|c| c.kind == CylinderKind::Hyperbolic)
        .ok_or("no hyperbolic cylinder")?;
    let tri = cyl.word[0].tri;
    let (lo, hi) = (cyl.lower.min(cyl.upper), cyl.lower.max(cyl.upper));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..20 {
        let x = random_point(&mut rng, s.triangle(tri).points);
        let phi = lo + (hi - lo) * rng.gen_range(0.05..0.95);
        let events = trace(&s, tri, x, Complex64::from_polar(1.0, phi), 500).map_err(|e| e.to_string())?;
        match events.last() {
            Some(TrajectoryEvent::LimitCycle { contraction, .. }) if (contraction - 0.5).abs() < 1e-6 => {}
            other => return Err(format!("start {k} at {x} dir {phi}: {other:?}")),
        }
    }
    Ok(format!("20 starts, directions in [{lo:.4}, {hi:.4}]"))
}

fn c9_reachability() -> Check {
    let s = build_square_torus();
    let mut vectors: Vec<Complex64> = Vec::new();
    for sc in enumerate_saddle_connections(&s, 4) {
        let v = sc.vector;
        let v = if v.im < -1e-9 || (v.im.abs() <= 1e-9 && v.re < 0.0) { -v } else { v };
        if !vectors.iter().any(|w| (w - v).norm() < 1e-9) {
            vectors.push(v);
        }
    }
    let has = |w: Complex64| vectors.iter().any(|x| (x - w).norm() < 1e-9 || (x + w).norm() < 1e-9);
    let mut targets = Vec::new();
    for (i, &a) in vectors.iter().enumerate() {
        for &b in &vectors[i + 1..] {
            let det = cross(a, b);
            if (det.abs() - 1.0).abs() > 1e-9 {
                continue;
            }
            let (u, v) = if det > 0.0 { (a, b) } else { (b, a) };
            // the two triangulations with sides u, v use the diagonal u + v or u - v
            for (p, q) in [(u, v), (-v, u)] {
                if has(p + q) {
                    targets.push(build_lattice_torus(p, q).map_err(|e| e.to_string())?);
                }
            }
        }
    }
    let mut keys: Vec<_> = targets.iter().map(triangulation_key).collect();
    keys.sort();
    keys.dedup();
    let res = verify_reachability(&s, &targets, 5000).map_err(|e| e.to_string())?;
    let missing = res
        .iter()
        .filter(|r| !matches!(r, Reachability::Chain(_)))
        .count();
    if targets.is_empty() || missing > 0 {
        return Err(format!("{missing} of {} triangulations not reached", targets.len()));
    }
    let longest = res
        .iter()
        .map(|r| match r {
            Reachability::Chain(c) => c.len(),
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    Ok(format!(
        "{} saddle directions, {} triangulations ({} distinct keys) reached, longest chain {longest}",
        vectors.len(),
        targets.len(),
        keys.len()
    ))
}

fn c10_self_folded() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut draws = 0;
    while draws < 100 {
        let angles = [0, 1, 2].map(|_| rng.gen_range(0.05..PI - 0.05));
        let dilations = [0, 1, 2].map(|_| rng.gen_range(0.2f64..5.0));
        let center = Complex64::new(rng.gen_range(-0.5..1.5), rng.gen_range(0.2..1.5));
        let Ok(s) = build_star_sphere(angles, dilations, center) else {
            // the fourth cone angle must exceed π; redraw
            continue;
        };
        let found = self_folded_scan(&s);
        if found.len() != 3 {
            return Err(format!("{angles:?}: {} self-folded triangles", found.len()));
        }
        let mut got: Vec<f64> = found.iter().map(|f| f.apex_angle).collect();
        let mut want = angles.to_vec();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        if got.iter().zip(&want).any(|(g, w)| (g - w).abs() > 1e-9 || *g >= PI) {
            return Err(format!("apex angles {got:?} for {want:?}"));
        }
        draws += 1;
    }
    Ok(format!("{draws} random star spheres"))
}

fn random_loop(rng: &mut ChaCha8Rng, s: &Surface) -> Option<(usize, Vec<HalfEdge>)> {
    let start = rng.gen_range(0..s.num_triangles());
    let mut word = Vec::new();
    let mut t = start;
    let len = rng.gen_range(2..12);
    while word.len() < len || t != start {
        if word.len() > 60 {
            return None;
        }
        let glued: Vec<HalfEdge> = (0..3).map(|e| HalfEdge::new(t, e)).filter(|&h| s.is_glued(h)).collect();
        let h = glued[rng.gen_range(0..glued.len())];
        word.push(h);
        t = s.partner(h).unwrap().tri;
    }
    let word = free_reduce(s, &word);
    if word.is_empty() {
        return None;
    }
    // a loop that leaves and enters through the same side is not cyclically reduced
    if s.partner(*word.last().unwrap()) == Some(word[0]) {
        return None;
    }
    Some((start, word))
}

fn c11_index_holonomy() -> Check {
    let mut surfaces: Vec<Surface> = closed_fixtures().into_iter().map(|(_, s)| s).collect();
    surfaces.extend(builder_outputs().into_iter().map(|(_, s)| s));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut sampled = 0;
    let mut links = 0;
    let mut attempts = 0;
    while sampled < 200 {
        attempts += 1;
        if attempts > 20_000 {
            return Err(format!("only {sampled} usable loops"));
        }
        let s = &surfaces[rng.gen_range(0..surfaces.len())];
        // mix in vertex links so loops with rotational holonomy are covered
        let candidate = if rng.gen_bool(0.3) {
            let v = rng.gen_range(0..s.num_vertices());
            vertex_link_loop(s, v)
        } else {
            random_loop(&mut rng, s)
        };
        let Some((start, word)) = candidate else { continue };
        let Ok((pts, hol)) = dual_loop_polyline(s, start, &word) else { continue };
        let Ok(idx) = loop_index(&pts, &hol) else { continue };
        let diff = wrap_pi(2.0 * PI * idx.theta - idx.holonomy.arg()).abs();
        if diff > 1e-9 {
            return Err(format!("loop {word:?}: 2 pi Theta={} arg rho={}", 2.0 * PI * idx.theta, idx.holonomy.arg()));
        }
        worst = worst.max(diff);
        if idx.holonomy.arg().abs() > 1e-6 {
            links += 1;
        }
        sampled += 1;
    }
    Ok(format!("{sampled} loops ({links} with rotational holonomy), max defect {worst:.1e}"))
}

fn explore_text(r: &FlipGraphReport) -> String {
    let mut out = flip_graph_dot(r);
    for n in &r.nodes {
        out.push_str(&format!("{} {} {:?}\n", n.depth, n.key.digest(), n.min_angle));
    }
    out
}

fn c12_determinism() -> Check {
    let star = build_star_sphere([1.2, 0.9, 1.4], [2.0, 3.0, 0.25], Complex64::new(0.4, 0.9)).unwrap();
    let dil = build_dilation_torus(PI / 3.0, 2.0).unwrap();
    let grid = parse_grid("theta=deg:60,deg:120;lambda=2,5").unwrap();
    let run = |parallel: bool| -> Result<(String, String, String), String> {
        let r = explore_flip_graph(&star, &ExploreOptions::new(300).parallel(parallel)).map_err(|e| e.to_string())?;
        let sweep = sweep_family("dilation_torus", &grid, SweepOptions { budget: 50, max_period: 4 }).map_err(|e| e.to_string())?;
        let svg = render_development_svg(&dil, Layout::Whole, &detect_cylinders(&dil, 4)).map_err(|e| e.to_string())?;
        Ok((explore_text(&r), sweep, svg))
    };
    let first = run(false)?;
    let second = run(false)?;
    let third = run(true)?;
    for (label, other) in [("second run", &second), ("parallel run", &third)] {
        if first.0 != other.0 {
            return Err(format!("explore output differs in the {label}"));
        }
        if first.1 != other.1 {
            return Err(format!("sweep output differs in the {label}"));
        }
        if first.2 != other.2 {
            return Err(format!("render output differs in the {label}"));
        }
    }
    Ok(format!(
        "3 runs identical (explore {} B, sweep {} B, svg {} B)",
        first.0.len(),
        first.1.len(),
        first.2.len()
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("Gauss-Bonnet residuals", c1_gauss_bonnet, 1),
        ("triangle-count law under random flips", c2_triangle_count, 5),
        ("flip involution and cone conservation", c3_flip_involution, 10),
        ("alpha on hex and square tori", c4_alpha, 30),
        ("cylinder detection", c5_cylinders, 30),
        ("cylinder angle bound", c6_cylinder_bound, 60),
        ("cylinder disjointness", c7_disjointness, 10),
        ("limit cycles on the dilation torus", c8_limit_cycles, 10),
        ("saddle triangulations reachable by flips", c9_reachability, 60),
        ("self-folded triangles of star spheres", c10_self_folded, 30),
        ("index-holonomy congruence", c11_index_holonomy, 10),
        ("determinism of explore, sweep and render", c12_determinism, 120),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = t.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{detail}; took {elapsed:.2?}, limit {limit} s"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("{:>2} PASS {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("{:>2} FAIL {name} ({elapsed:.2?}): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
